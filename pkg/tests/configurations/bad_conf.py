A = 0.8
DENSITY = 1.5
