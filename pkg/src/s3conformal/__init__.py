"""Conformally deformed quantum motion on the three-sphere.

Supersymmetric potentials induced by a deformation profile, a numerical
eigensolver, meson spectroscopy fits and deconfinement estimates.
"""

__version__ = "0.1.0"
