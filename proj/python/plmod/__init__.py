"""Numerical toolkit for polynomial-like restrictions, discrete extremal
length, and modulus certificates, backed by the C++ core."""

from ._plmod import *  # noqa: F401,F403
from ._plmod import __doc__  # noqa: F401
