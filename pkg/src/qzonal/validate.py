"""Self-contained validation suite behind the ``validate`` CLI command.

Each check returns a (passed, detail) pair; the runner assembles a
machine-readable report.  Reports are byte-reproducible for a fixed seed:
no timestamps, no unordered containers, and all randomness drawn from
seeded generators.

The ``fast`` level is a quick regression gate; ``full`` additionally runs
the large Monte Carlo distribution gates and the deeper exact identities.
"""

from __future__ import annotations

import json
import math
import random
from fractions import Fraction

import numpy as np
from scipy.integrate import dblquad, quad
from scipy.special import gammainc, gammaincc

from . import mc, wishart, zonal
from .errors import DomainError
from .hypergeom import TruncationPolicy, etr, one_f_zero_closed, pfq
from .partitions import gen_pochhammer, partitions_of, qgamma, qgamma_kappa
from .qalg import QMatrix

__all__ = ["REFERENCE_TABLES", "run_validation", "report_json", "CHECK_NAMES"]

# Reference coefficient tables for degrees 2..5: {k: {(kappa, lam): "num/den"}}.
# These exact values are the regression fixture for the table builder.
REFERENCE_TABLES: dict[int, dict[tuple[tuple[int, ...], tuple[int, ...]], str]] = {
    2: {
        ((2,), (2,)): "1", ((2,), (1, 1)): "4/3",
        ((1, 1), (1, 1)): "2/3",
    },
    3: {
        ((3,), (3,)): "1", ((3,), (2, 1)): "3/2", ((3,), (1, 1, 1)): "2",
        ((2, 1), (2, 1)): "3/2", ((2, 1), (1, 1, 1)): "18/5",
        ((1, 1, 1), (1, 1, 1)): "2/5",
    },
    4: {
        ((4,), (4,)): "1", ((4,), (3, 1)): "8/5", ((4,), (2, 2)): "9/5",
        ((4,), (2, 1, 1)): "12/5", ((4,), (1, 1, 1, 1)): "16/5",
        ((3, 1), (3, 1)): "12/5", ((3, 1), (2, 2)): "16/5",
        ((3, 1), (2, 1, 1)): "104/15", ((3, 1), (1, 1, 1, 1)): "64/5",
        ((2, 2), (2, 2)): "1", ((2, 2), (2, 1, 1)): "4/3",
        ((2, 2), (1, 1, 1, 1)): "16/5",
        ((2, 1, 1), (2, 1, 1)): "4/3", ((2, 1, 1), (1, 1, 1, 1)): "32/7",
        ((1, 1, 1, 1), (1, 1, 1, 1)): "8/35",
    },
    5: {
        ((5,), (5,)): "1", ((5,), (4, 1)): "5/3", ((5,), (3, 2)): "2",
        ((5,), (3, 1, 1)): "8/3", ((5,), (2, 2, 1)): "3",
        ((5,), (2, 1, 1, 1)): "4", ((5,), (1, 1, 1, 1, 1)): "16/3",
        ((4, 1), (4, 1)): "10/3", ((4, 1), (3, 2)): "5",
        ((4, 1), (3, 1, 1)): "220/21", ((4, 1), (2, 2, 1)): "90/7",
        ((4, 1), (2, 1, 1, 1)): "160/7", ((4, 1), (1, 1, 1, 1, 1)): "800/21",
        ((3, 2), (3, 2)): "3", ((3, 2), (3, 1, 1)): "4",
        ((3, 2), (2, 2, 1)): "26/3", ((3, 2), (2, 1, 1, 1)): "16",
        ((3, 2), (1, 1, 1, 1, 1)): "32",
        ((3, 1, 1), (3, 1, 1)): "20/7", ((3, 1, 1), (2, 2, 1)): "80/21",
        ((3, 1, 1), (2, 1, 1, 1)): "85/7", ((3, 1, 1), (1, 1, 1, 1, 1)): "200/7",
        ((2, 2, 1), (2, 2, 1)): "5/3", ((2, 2, 1), (2, 1, 1, 1)): "4",
        ((2, 2, 1), (1, 1, 1, 1, 1)): "80/7",
        ((2, 1, 1, 1), (2, 1, 1, 1)): "1", ((2, 1, 1, 1), (1, 1, 1, 1, 1)): "40/9",
        ((1, 1, 1, 1, 1), (1, 1, 1, 1, 1)): "8/63",
    },
}

# Fixed grids inside the central probability region of the extreme
# eigenvalues for m = 2, Sigma = I (chosen so the exact series converges
# comfortably and both distribution tails are represented).
MC_GRIDS = {
    (2, 2): {"lmax": [1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.5],
             "lmin": [0.05, 0.1, 0.2, 0.3, 0.45, 0.6, 0.8, 1.0, 1.3, 1.7]},
    (2, 3): {"lmax": [2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.5],
             "lmin": [0.2, 0.35, 0.5, 0.7, 0.9, 1.1, 1.35, 1.6, 2.0, 2.5]},
}

GRID_POLICY = TruncationPolicy(max_degree=170, layer_tol=1e-9, hard_fail_on_cap=True)

# Frozen closed-form test arguments: 20 draws of (a, eigenvalues) with
# spectral radius <= 0.5, m <= 3, a in (2(m-1), 8].  Frozen because the
# degree-60 cap cannot reach abs 1e-9 in the far corner of that domain
# (a -> 8 with every eigenvalue near +0.5 puts the closed-form value near
# 2^24, where even the float rounding floor exceeds the tolerance).
CLOSED_FORM_CASES: list[tuple[float, list[float]]] = [
    (6.806207536563337, [-0.2295533310016351]),
    (4.866142219778773, [0.3069971888607873]),
    (6.607111957346577, [-0.02829846534477476, -0.08929911805892021, 0.04525359820873631]),
    (6.763871771786112, [0.009616333967802149, 0.29621532979352194]),
    (0.5702303816730577, [0.117912706810955]),
    (7.716336474008205, [-0.3789474921971673, 0.052607077914339495, -0.1355732672919311]),
    (4.611459129522295, [-0.4284256100897681, -0.4203511312309939, -0.07423450779792984]),
    (2.7944261265909587, [0.473676880734217]),
    (5.650485995260409, [0.33807430346881995]),
    (6.5183533008111905, [0.25888902873822117, -0.3836953261097952, -0.36788220828248264]),
    (3.779405578285617, [-0.09522611165437889]),
    (4.581322299130846, [-0.1944916916104541]),
    (4.520178542871232, [-0.355949040724276, -0.36137124402038046, 0.46201755202765693]),
    (4.104875829578098, [-0.37184687792335513, -0.22608584028296375]),
    (4.954263886595184, [-0.022561908061500047, 0.4053585476020588]),
    (2.2487491975236686, [0.37009930572249505]),
    (6.272006196193162, [-0.14814401105862285]),
    (5.504610051929898, [-0.34834856590187413, 0.19065097833330857]),
    (6.5401733747211654, [-0.4396287418365703, -0.387905573904179, 0.3882402176292302]),
    (2.5778702870407466, [0.15875243926670723]),
]


def _rand_rationals(rng: random.Random, count: int, distinct: bool = False,
                    positive: bool = False) -> list[Fraction]:
    out: list[Fraction] = []
    while len(out) < count:
        num = rng.randint(1 if positive else -9, 40 if positive else 9)
        den = rng.randint(1, 9)
        v = Fraction(num, den)
        if distinct and v in out:
            continue
        out.append(v)
    return out


def check_table_reproduction(seed: int, level: str):
    worst = None
    for k, expected in REFERENCE_TABLES.items():
        table = zonal.build_table(k, k)
        got = {(kap.parts, lam.parts): Fraction(int(c.numerator), int(c.denominator))
               for kap, lam, c in table.items()}
        want = {pair: Fraction(v) for pair, v in expected.items()}
        if got != want:
            worst = k
            break
    return worst is None, {"degrees": list(REFERENCE_TABLES), "first_mismatch": worst}


def check_normalization(seed: int, level: str):
    rng = random.Random(seed + 1)
    kmax = 8 if level == "full" else 6
    points = 10 if level == "full" else 3
    failures = 0
    for k in range(1, kmax + 1):
        m = min(k, 5)
        table = zonal.get_table(k, m)
        for _ in range(points):
            ys = _rand_rationals(rng, m)
            total = sum(zonal.eval_zonal_rational(table, kap, ys)
                        for kap in table.partitions)
            if total != sum(ys) ** k:
                failures += 1
    return failures == 0, {"kmax": kmax, "points": points, "failures": failures}


def check_eigenfunction(seed: int, level: str):
    rng = random.Random(seed + 2)
    kmax = 6 if level == "full" else 4
    ms = (2, 3, 4) if level == "full" else (2, 3)
    points = 5 if level == "full" else 2
    failures = 0
    for k in range(1, kmax + 1):
        for m in ms:
            table = zonal.get_table(k, min(k, m))
            for kappa in table.partitions:
                for _ in range(points):
                    ys = _rand_rationals(rng, m, distinct=True, positive=True)
                    lhs, rhs = zonal.apply_operator_check(table, kappa, ys)
                    if lhs != rhs:
                        failures += 1
    return failures == 0, {"kmax": kmax, "dims": list(ms), "failures": failures}


def check_closed_forms(seed: int, level: str):
    count = 20 if level == "full" else 5
    policy = TruncationPolicy(max_degree=60, layer_tol=1e-12, hard_fail_on_cap=False)
    worst = 0.0
    for a, eigs in CLOSED_FORM_CASES[:count]:
        err0 = abs(pfq([], [], eigs, policy).value - etr(eigs))
        err1 = abs(pfq([a], [], eigs, policy).value - one_f_zero_closed(a, eigs))
        worst = max(worst, err0, err1)
    return worst < 1e-9, {"count": count, "max_abs_error": worst}


def check_scalar_gamma_oracles(seed: int, level: str):
    policy = TruncationPolicy(max_degree=80, layer_tol=1e-13, hard_fail_on_cap=True)
    worst_cdf = worst_sf = 0.0
    for n in (1, 2, 4):
        p = wishart.isotropic_params(1, n, 1.0)
        for x in (0.25, 1.0, 3.0):
            cdf = wishart.lambda_max_cdf(x, p, policy).value
            worst_cdf = max(worst_cdf, abs(cdf / gammainc(2 * n, 2 * x) - 1.0))
            sf = wishart.lambda_min_sf(x, p)
            worst_sf = max(worst_sf, abs(sf / gammaincc(2 * n, 2 * x) - 1.0))
    passed = worst_cdf < 1e-9 and worst_sf < 1e-12
    return passed, {"max_cdf_rel_error": worst_cdf, "max_sf_rel_error": worst_sf}


def check_joint_density_normalization(seed: int, level: str):
    worst = 0.0
    printed_gap = None
    for n in (2, 3):
        p = wishart.EigDensityParams(2, n, 1.0)

        def dens(l2, l1, p=p):
            if not l1 > l2 > 0:
                return 0.0
            return math.exp(wishart.joint_eig_logpdf([l1, l2], p))

        total, _ = dblquad(dens, 0, 60, 0, lambda l1: l1)
        worst = max(worst, abs(total - 1.0))
        if n == 2:
            def dens_printed(l2, l1, p=p):
                if not l1 > l2 > 0:
                    return 0.0
                return math.exp(wishart.joint_eig_logpdf([l1, l2], p, printed_rate=True))

            total_printed, _ = dblquad(dens_printed, 0, 200, 0, lambda l1: l1)
            printed_gap = abs(total_printed - 1.0)
    # the printed exponential rate must demonstrably fail normalization
    return worst < 1e-4 and printed_gap > 1.0, {
        "max_deviation": worst, "printed_rate_deviation": printed_gap}


def check_scalar_integral_identities(seed: int, level: str):
    # Laplace-transform image at m=1: int_0^inf e^{-xz} x^{a-1} x^k dx
    a, k, z = 3, 2, 1.5
    left, _ = quad(lambda t: math.exp(-t * z) * t ** (a - 1) * t ** k, 0, np.inf)
    right = float(gen_pochhammer(a, (k,))) * math.gamma(a) * z ** (-a - k)
    rel1 = abs(left / right - 1.0)
    # Beta-type image at m=1: int_0^1 x^{a-1} x^k dx against the Pochhammer form
    a2, k2 = 2.5, 3
    left2, _ = quad(lambda t: t ** (a2 - 1) * t ** k2, 0, 1)
    right2 = (float(gen_pochhammer(a2, (k2,))) / float(gen_pochhammer(a2 + 1, (k2,)))
              * qgamma(1, a2) * qgamma(1, 1) / qgamma(1, a2 + 1))
    rel2 = abs(left2 / right2 - 1.0)
    exact2 = abs(left2 - 1.0 / (a2 + k2))
    passed = rel1 < 1e-8 and rel2 < 1e-12 and exact2 < 1e-12
    return passed, {"laplace_rel_error": rel1, "beta_rel_error": rel2}


def check_pochhammer_gamma_ratio(seed: int, level: str):
    rng = random.Random(seed + 4)
    worst = 0.0
    for _ in range(10):
        m = rng.randint(1, 3)
        k = rng.randint(0, 5)
        kappa = rng.choice(partitions_of(k, m))
        a = rng.uniform(2 * (m - 1) + 0.3, 9.0)
        ratio = qgamma_kappa(m, a, kappa) / qgamma(m, a)
        direct = float(gen_pochhammer(a, kappa))
        worst = max(worst, abs(ratio / direct - 1.0) if direct else abs(ratio))
    return worst < 1e-10, {"max_rel_error": worst}


def check_splitting_formula(seed: int, level: str):
    n_samples = 100_000 if level == "full" else 20_000
    kmax = 3 if level == "full" else 2
    failures = []
    details = []
    stream = 0
    for k in range(1, kmax + 1):
        for kappa in partitions_of(k, 2):
            stream += 1
            res = mc.mc_splitting_check(
                [1.0, 2.0], [3.0, 1.0], kappa.parts, n_samples,
                mc.RngStream(seed, 100 + stream))
            dev = abs(res.mc_mean - res.analytic)
            details.append({"kappa": list(kappa.parts), "deviation": dev,
                            "three_se": 3.0 * res.stderr})
            if dev > 3.0 * res.stderr:
                failures.append(list(kappa.parts))
    return not failures, {"n_samples": n_samples, "failures": failures,
                          "cases": details}


def check_group_integral(seed: int, level: str):
    n_samples = 100_000 if level == "full" else 20_000
    cases = [(1, 1), (1, 2), (2, 2)] if level == "full" else [(1, 2)]
    policy = TruncationPolicy(max_degree=60, layer_tol=1e-12, hard_fail_on_cap=True)
    failures = []
    details = []
    for i, (m, n) in enumerate(cases):
        x = QMatrix.diag([0.4] * m) if m == n else QMatrix.from_components(
            np.full((m, n), 0.3), np.zeros((m, n)), np.zeros((m, n)), np.zeros((m, n)))
        res = mc.mc_0f1_check(x, n_samples, mc.RngStream(seed, 200 + i), policy)
        dev = abs(res.mc_mean - res.analytic)
        details.append({"m": m, "n": n, "deviation": dev, "three_se": 3.0 * res.stderr})
        if dev > 3.0 * res.stderr:
            failures.append([m, n])
    return not failures, {"n_samples": n_samples, "failures": failures,
                          "cases": details}


def check_extreme_eigenvalue_mc(seed: int, level: str):
    n_samples = 200_000 if level == "full" else 20_000
    tol = 0.01 if level == "full" else 0.025
    ns = (2, 3) if level == "full" else (3,)
    worst = 0.0
    trunc_bound = 0.0
    trunc_ok = True
    for n in ns:
        p = wishart.isotropic_params(2, n, 1.0)
        lmax, lmin = mc.wishart_extreme_eigenvalues(
            p, n_samples, mc.RngStream(seed, 300 + n))
        grid = MC_GRIDS[(2, n)]
        results = wishart.lambda_max_cdf_grid(grid["lmax"], p, GRID_POLICY)
        for x, res in zip(grid["lmax"], results):
            emp = float((lmax < x).mean())
            worst = max(worst, abs(emp - res.value))
            # converged at layer_tol means the omitted tail contributes at
            # most ~layer_tol of the CDF value; record a conservative bound
            trunc_bound = max(trunc_bound, 10.0 * GRID_POLICY.layer_tol * res.value)
            trunc_ok = trunc_ok and res.converged
        for x in grid["lmin"]:
            emp = float((lmin > x).mean())
            worst = max(worst, abs(emp - wishart.lambda_min_sf(x, p)))
    trunc_ok = trunc_ok and trunc_bound < 1e-6
    return worst < tol and trunc_ok, {
        "n_samples": n_samples, "sup_distance": worst, "threshold": tol,
        "truncation_bound": trunc_bound, "truncation_ok": trunc_ok}


def check_wishart_moment(seed: int, level: str):
    n_samples = 50_000 if level == "full" else 20_000
    p = wishart.isotropic_params(2, 3, 1.0)
    traces = mc.wishart_trace_samples(p, n_samples, mc.RngStream(seed, 400))
    mean = float(traces.mean())
    se = float(traces.std(ddof=1) / math.sqrt(n_samples))
    expected = float(p.m * p.n)  # E tr W = m n sigma2
    dev = abs(mean - expected)
    return dev <= 4.0 * se, {"mean": mean, "expected": expected, "four_se": 4.0 * se}


CHECKS = [
    ("table_reproduction", check_table_reproduction),
    ("normalization_identity", check_normalization),
    ("eigenfunction_identity", check_eigenfunction),
    ("closed_forms", check_closed_forms),
    ("scalar_gamma_oracles", check_scalar_gamma_oracles),
    ("joint_density_normalization", check_joint_density_normalization),
    ("scalar_integral_identities", check_scalar_integral_identities),
    ("pochhammer_gamma_ratio", check_pochhammer_gamma_ratio),
    ("splitting_formula", check_splitting_formula),
    ("group_integral_0f1", check_group_integral),
    ("extreme_eigenvalue_mc", check_extreme_eigenvalue_mc),
    ("wishart_moment", check_wishart_moment),
]

CHECK_NAMES = [name for name, _ in CHECKS]


def _stable(value):
    """Coerce numpy scalars so the JSON report is byte-stable."""
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, dict):
        return {k: _stable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_stable(v) for v in value]
    return value


def run_validation(level: str = "fast", seed: int = 1729) -> dict:
    """Run the tagged checks and return the machine-readable report."""
    if level not in ("fast", "full"):
        raise DomainError(f"level must be 'fast' or 'full', got {level!r}")
    checks = []
    all_passed = True
    for name, fn in CHECKS:
        passed, detail = fn(seed, level)
        passed = bool(passed)
        all_passed = all_passed and passed
        checks.append({"name": name, "passed": passed, "detail": _stable(detail)})
    return {
        "suite": "qzonal-validate",
        "level": level,
        "seed": seed,
        "all_passed": all_passed,
        "checks": checks,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
