"""Fixed physical constants (CODATA values, frozen for reproducibility)."""

HBAR = 1.054571817e-34  # J*s
MEV = 1.602176634e-22   # J per meV
