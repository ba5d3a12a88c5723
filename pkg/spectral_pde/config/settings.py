# Configuration settings

# Midpoint fixed-point iterations per step
DEFAULT_ITERATIONS = 4

# A field whose max modulus grows past this multiple of its initial scale has diverged
DIVERGENCE_LIMIT = 1e12

# Step fraction used for centred time differences of boundary values
BOUNDARY_RATE_FRACTION = 1 / 100

# Worker threads for ensembles and bench rows
THREADS_ENV_VAR = "SPECTRAL_PDE_THREADS"
DEFAULT_THREADS = 1

# Trajectories integrated together along the leading axis
ENSEMBLE_BATCH = 100

# Trajectories rerun at half the step to estimate the step error of a stochastic table row
STEP_ERROR_SAMPLES = 200

# Noise seed used when none is given
DEFAULT_SEED = 0

# Steps of noise drawn at once per trajectory
NOISE_CHUNK = 64

# Output storage
DATA_DIR = "data"
REPORT_FILE = "report.json"
SURFACE_FILE = "surface.csv"
BENCH_FILE = "bench.csv"

# Error normalization: "printed" divides the mean square by M, "squared" by M**2
ERROR_NORMALIZATION = "printed"
SUPPORTED_NORMALIZATIONS = ["printed", "squared"]

# Relative mismatch allowed between summed weights and the stated extents
WEIGHT_SUM_TOLERANCE = 0.01

# Truncation threshold for analytic series
SERIES_TOLERANCE = 1e-12

# Logging
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
