"""
Configuration file for the HOPS simulator
Adjust numerical tolerances, limits and sweep defaults here
"""
import math

# Fock-space settings
N_MAX_LIMIT = 128  # largest per-mode cutoff accepted by make_fock_space
DENSE_N_MAX_LIMIT = 32  # dense operator matrices are only built up to here
DEFAULT_N_MAX = 24  # oracle cutoff for moment / variance comparisons
ENSEMBLE_N_MAX = 30  # cutoff for phase-averaged coherent ensembles
ALGEBRA_N_MAX = 8  # cutoff for the commutator and identity suites
PICTURES_N_MAX = 80  # sparse Schrodinger-picture cutoff, kt = 0.5 needs more than the dense range
EXPM_SPARSE_MIN_DIM = 64  # below this, evolve with a dense matrix exponential

# Tolerances
NORM_TOLERANCE = 1e-10
HERMITIAN_TOLERANCE = 1e-12
VARIANCE_CLAMP = 1e-12
COHERENT_TAIL_LIMIT = 1e-12  # Poisson mass beyond n_max for coherent inputs
EVOLUTION_TAIL_LIMIT = 1e-8  # population of the two outermost shells after evolution
EVOLUTION_SHELL_DEPTH = 2
ALGEBRA_TOLERANCE = 1e-12
UNCERTAINTY_TOLERANCE = 1e-9
GAMMA_TOLERANCE = 1e-9
MOBIUS_POLE_TOLERANCE = 1e-12
BOGOLIUBOV_TOLERANCE = 1e-12  # relative, on the hyperbolic identities
ORACLE_RELATIVE_TOLERANCE = 1e-6
SQUEEZING_MARGIN = 1e-6  # |Sq - 1| below this is treated as undecided

# Dynamics ranges
KT_LIMIT = 5.0  # overflow guard on |kt| for the hyperbolic coefficients
MAX_COUPLING_TIME = 2.0  # largest |g t| accepted by evolve_oracle
ORACLE_COUPLING = 2.0  # g = 2k with k = 1, so g t = 2 kt

# Onset-time bisection
ONSET_KT_MAX = 2.0
ONSET_KT_MIN = 1e-6
ONSET_SAMPLES = 600
ONSET_BISECTION_TOL = 1e-10
ONSET_BELOW_THRESHOLD = 1e-12  # degree - 1 must drop below -this to count as classical

# Ensembles
MIN_PHASE_SAMPLES = 4
DEFAULT_PHASE_SAMPLES = 64
MONTE_CARLO_SAMPLES = 20000
MONTE_CARLO_SEED = 20240611

# Sweep output
FLOAT_FORMAT = '.17g'
SWEEP_OUTPUTS = ('sq', 'moments', 'variances', 'degree', 'margins')
DEFAULT_SWEEP_OUTPUTS = ('sq', 'moments', 'variances', 'degree')
SWEEP_COLUMN_GROUPS = {
    'sq': ['sq'],
    'moments': ['h0', 'h1', 'h2', 'h3'],
    'variances': ['v0', 'v1', 'v2', 'v3'],
    'degree': ['degree'],
    'squeezed': ['squeezed'],
    't0': ['t0'],
    'margins': ['margin_h0_vs_h3', 'margin_h2_vs_h3', 'margin_h2_vs_1_plus_h0',
                'margin_h3_vs_1_plus_h0', 'margin_h3_vs_h2', 'margin_h0_vs_h2'],
}
ORACLE_COLUMNS = ['oracle_h0', 'oracle_h1', 'oracle_h2', 'oracle_h3',
                  'oracle_v0', 'oracle_v1', 'oracle_v2', 'oracle_v3', 'oracle_status']
DEFAULT_WORKERS = 4

# Sweep presets (|alpha_x|^2 is a chosen default, the intensity ratio is fixed)
FIG1A_SETTINGS = {
    'ax_sq': 1.0,
    'ph_mag': 1.0,  # equally intense modes
    'kt_range': (0.0, 1.0, 50),
    'delta_range': (-math.pi, math.pi, 72),
}
FIG1B_SETTINGS = {
    'ax_sq': 0.5,
    'ph_mag': 5.0,  # y mode twenty five times as intense
    'kt_range': (0.0, 1.0, 50),
    'delta_range': (-math.pi, math.pi, 72),
}
POINT_SETTINGS = {
    'ax_sq': 1.0,
    'ph_mag': 1.0,
    'kt_range': (0.0, 0.25, 2),
    'delta_range': (-math.pi, 0.0, 2),
}
PRESET_ALIASES = {'equal': 'fig1a', 'unequal': 'fig1b'}  # named by intensity ratio

# Verification
GRID_FIXTURE_PATH = 'grid_fixture.json'
GRID_FIXTURE_VERSION = 1
REPORT_DIR = 'reports'
REPORT_TEXT_FILE = 'verification_report.txt'
REPORT_CSV_FILE = 'verification_report.csv'
REPORT_SUMMARY_FILE = 'verification_summary.json'
FACTORIZATION_ORDER = 3
UNCERTAINTY_SAMPLE_STATES = 20

# Exit codes
EXIT_CODES = {
    'SUCCESS': 0,
    'VERIFICATION_FAILURE': 1,
    'USAGE_ERROR': 2,
}
