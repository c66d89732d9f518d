"""Shared defaults and fixed numerical settings."""

import math

import numpy as np

# Gauss-Legendre nodes used by normalize_power; fixed so CSV output is bit-stable.
QUADRATURE_NODES = 256

DEFAULT_PHI_SUPPORT = (-math.pi / 3, math.pi / 3)
DEFAULT_PHI_SUPPORT_DEG = (-60.0, 60.0)
DEFAULT_LENS_PHASE = 0.0

# Central finite-difference steps over theta = [p, b, phi]. The p step is relative.
FD_STEP_AMPLITUDE = 1e-6
FD_STEP_PHASE = 1e-6
FD_STEP_DOA = 1e-6

PARAMETER_ORDER = ("p", "b", "phi")

# Analytic vs finite-difference Fisher entries, scaled by sqrt(J_ii * J_jj).
NUMERIC_RTOL = 1e-6
# Analytic vs analytic identities (determinant, inverse entry).
IDENTITY_RTOL = 1e-9
# Rounding allowance per unit condition number for the identity checks.
CONDITION_SLACK = 64 * float(np.finfo(float).eps)
# Beyond this the identities cannot be verified in double precision.
IDENTITY_RTOL_CAP = 1e-6

# Maximum-likelihood search
SEARCH_MARGIN = 0.01
DEFAULT_GRID_POINTS = 512
DEFAULT_REFINE_ITERS = 40
MIN_GRID_POINTS = 64

MIN_TRIALS = 100

# Default experiment: the four lens profiles against the plain ULA
DEFAULT_N_ELEMENTS = 17
DEFAULT_SPACING_WAVELENGTHS = 0.05
DEFAULT_SIGMA_C_LIST = (1 / 1.96, 2.0, 10.0, 100.0)
DEFAULT_PHI_GRID_DEG = (-60.0, 60.0, 121)
DEFAULT_AMPLITUDE = 1.0
DEFAULT_PHASE_DEG = 0.0
DEFAULT_NOISE_VARIANCE = 1.0
DEFAULT_MC_TRIALS = 10_000
DEFAULT_MASTER_SEED = 20170101
DEFAULT_MC_DOA_DEG = 15.0
DEFAULT_SNR_LIST_DB = (0.0, 10.0, 20.0, 30.0)
DEFAULT_OUTPUT_DIRECTORY = "results"
DEFAULT_OUTPUT_FORMAT = "svg"
OUTPUT_FORMATS = ("csv", "svg")

DEFAULT_CHECK_SEED = 1
DEFAULT_CHECK_DRAWS = 1000
DEFAULT_POSITIVITY_DRAWS = 10_000

THREADS_ENV_VAR = "LENS_CRLB_THREADS"

SWEEP_COLUMNS = ("phi_deg", "sigma_c", "crlb_lens", "crlb_ula", "d0", "d1", "d2", "margin")
MONTECARLO_COLUMNS = (
    "sigma_c",
    "snr_db",
    "trials",
    "doa_bias",
    "doa_variance",
    "crlb",
    "efficiency",
)
CURVATURE_COLUMNS = ("sigma_c", "mean_crlb_lens", "mean_crlb_ula", "gain_db")
SIGNIFICANT_DIGITS = 12

SWEEP_FILENAME = "sweep.csv"
PLOT_FILENAME = "sweep.svg"
MONTECARLO_FILENAME = "montecarlo.csv"
CURVATURE_FILENAME = "curvature.csv"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_IO = 3
