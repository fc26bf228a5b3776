"""weylscope: functional calculus and numerical-range geometry for
hyperbolic tuples of complex matrices."""

__version__ = "0.1.0"
