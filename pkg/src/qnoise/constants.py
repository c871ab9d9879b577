"""Physical constants (CODATA 2018), frozen.

All internal frequencies are angular (rad/s). Spectral densities follow the
two-sided symmetric convention: the classical Johnson-Nyquist voltage noise
is 2*R*k_B*T, i.e. half the one-sided electronics value 4*k_B*T*R.
"""

# Reduced Planck constant (J s)
HBAR = 1.054571817e-34

# Boltzmann constant (J/K)
K_B = 1.380649e-23
