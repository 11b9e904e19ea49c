"""torfill: exact filling certificates and spectral invariants for torus self-maps."""

__version__ = "0.1.0"
