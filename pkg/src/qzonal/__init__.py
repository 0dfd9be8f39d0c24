"""Zonal polynomials of quaternion matrix argument, matrix-argument
hypergeometric functions built from them, and the analytic distributions of
the extreme eigenvalues of quaternion central Wishart matrices, with a
Monte Carlo validation harness."""

from .errors import DivergenceError, DomainError, QZonalError, TruncationError
from .hypergeom import (
    DEFAULT_POLICY,
    HypergeomResult,
    TruncationPolicy,
    etr,
    one_f_zero_closed,
    pfq,
    pfq_two,
)
from .mc import (
    EmpiricalCdf,
    RngStream,
    empirical_cdf,
    ks_distance,
    mc_0f1_check,
    mc_splitting_check,
    sample_haar_unitary,
    sample_qnormal,
    sample_wishart,
    wishart_extreme_eigenvalues,
)
from .partitions import (
    BigRational,
    Partition,
    gen_pochhammer,
    lex_compare,
    monomial_orbit_size,
    partitions_of,
    qgamma,
    qgamma_kappa,
    qgamma_log,
    rho,
)
from .qalg import (
    QMatrix,
    Quaternion,
    Spectrum,
    cholesky,
    complex_rep,
    conj_transpose,
    hermitian_eigenvalues,
    moore_det,
    qdet,
    qmul,
    qr_unitary,
    real_reps,
    retr,
)
from .wishart import (
    EigDensityParams,
    WishartParams,
    isotropic_params,
    joint_eig_logpdf,
    lambda_max_cdf,
    lambda_max_pdf,
    lambda_min_pdf,
    lambda_min_sf,
    prob_greater,
    prob_less,
    wishart_logpdf,
)
from .zonal import (
    ZonalTable,
    apply_operator_check,
    build_table,
    eval_zonal,
    eval_zonal_rational,
    get_table,
    load_table,
    save_table,
    zonal_at_identity,
)

__version__ = "0.1.0"
