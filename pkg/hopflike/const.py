SCHEMA_MODEL = "hopflike/model-1"
SCHEMA_REPORT = "hopflike/report-1"
SCHEMA_TRAJECTORY = "hopflike/trajectory-1"
SCHEMA_DIAGRAM = "hopflike/diagram-1"
SCHEMA_SCALING = "hopflike/scaling-1"
SCHEMA_LEMMAS = "hopflike/lemmas-1"
SCHEMA_ERROR = "hopflike/error-1"

MECHANISMS = (
    "smooth",
    "filippov",
    "impact",
    "impulse",
    "hysteretic",
    "delayed",
    "four_quadrant",
    "sqrt_continuous",
)

MAX_TAYLOR_ORDER = 4
MACHINE_EPS = 2.220446049250313e-16

# Hypothesis checks
EQ_TOL = 1e-9
ALPHA_TOL = 1e-8
FOLD_TOL = 1e-9

# Integration
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_MAX_STEP = 0.05
DEFAULT_EVENTS_MAX = 10_000
ZENO_Y_TOL = 1e-10
ZENO_MAX_RESETS = 1_000_000
STEP_OFF = 1e-11
EXIT_OFFSET = 1e-14
DENSE_SAMPLES = 24
RETURN_T_MAX = 1000.0
SQRT_HANDOFF = 1e-5
SQRT_S_MAX = 1e6

# Root finding
BRENT_XTOL = 1e-14
RHO_TOL = 1e-12
NEWTON_MAX_ITER = 100
NEWTON_TOL = 1e-10
FD_STEP = 1e-6

# Coefficients and period systems
COEFF_MU_STEP = 1e-4
NODE_S_MAX = 40.0
PERIOD_SEED_POINTS = 15
IMPACT_PERIOD_POINTS = 400

# Limit cycles and sweeps
CYCLE_TOL = 1e-10
CYCLE_SCAN_POINTS = 40
CYCLE_SCAN_DECADES = 3.0
DEFAULT_WORKERS = 4
MIN_SCALING_POINTS = 8
MIN_SCALING_DECADES = 2.0

# Return-map verification
LEMMA_SEED = 20
LEMMA_SAMPLES = 20
LEMMA_RTOL = 1e-12
LEMMA_ATOL = 1e-15
