"""
linfty-lab: exact checks for DGLAs, L-infinity morphisms and
deformation obstructions over Gaussian rationals.
"""

__version__ = "1.0.0"
