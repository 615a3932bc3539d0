# Sample configuration for fockbounds; command-line flags override it.
#   python3 -m fockbounds sweep --config example/run_conf.py

# Density sweep of the lattice spacing a.
A_MIN = 0.6
A_MAX = 0.95
STEPS = 8

# Gram dimension; the lattice radius defaults to sqrt(N/pi) + 3.
N = 300

# Sampling prefactor c0 = 2^(-1/2).
C0 = 0.7071067811865476

# Extremal construction: exclusion radius around zeros, radial quadrature
# step and the extent beyond R.
EPS = 0.2
GRID = 0.05
MARGIN = 6.0

OUT = "sweep.csv"
FORMAT = "csv"
SEED = 0
