A_MIN = 0.6
A_MAX = 0.7
STEPS = 3
N = 40
SEED = 7
FORMAT = "json"
