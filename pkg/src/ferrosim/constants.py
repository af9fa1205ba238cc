"""Physical constants (CODATA 2018), SI units."""

ELEMENTARY_CHARGE = 1.602176634e-19  # C
BOLTZMANN = 1.380649e-23             # J/K
HBAR = 1.054571817e-34               # J s
EPS0 = 8.8541878128e-12              # F/m
ELECTRON_MASS = 9.1093837015e-31     # kg
