"""Bar-complex cohomology of model algebras and numerical iterated integrals
on loop spaces of round spheres."""

__version__ = "0.1.0"

from .bar import (  # noqa: E402
    BarComplex,
    BarElement,
    BarWord,
    CohomologyReport,
    bar_basis,
    bar_differential,
    cohomology,
    distortion_exponent,
    min_length_detector,
    same_class_up_to_scalar,
)
from .cdga import FiniteCdga, make_algebra, multiply, differential, validate  # noqa: E402
from .errors import *  # noqa: E402,F401,F403
from .specfile import dump_algebra, load_algebra, parse_algebra  # noqa: E402
