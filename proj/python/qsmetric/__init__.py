"""Exact cube weights, weighted graph metrics and dimension-drop experiments
on M-adic subdivisions of the unit cube."""

try:  # installed layout: the extension lives inside the package
    from ._qsmetric import *  # noqa: F401,F403
    from ._qsmetric import __version__, rng_scheme  # noqa: F401
except ImportError:  # build-tree layout: the extension sits next to the package
    from _qsmetric import *  # noqa: F401,F403
    from _qsmetric import __version__, rng_scheme  # noqa: F401
