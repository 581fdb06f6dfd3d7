"""splitjac: search for modular curves with completely split Jacobians."""

__version__ = "0.1.0"
