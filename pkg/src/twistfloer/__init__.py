"""Exact algebra for twisted Heegaard Floer homology of twist-knot surgeries and their excision relatives."""

from .complexes import ChainComplex, FreeField, GradedModule, Tower, UTorsion, homology
from .errors import TwistFloerError
from .excision import (
    compute_borromean_zero_surgery,
    compute_two_bridge,
    compute_twist_knot_zero_surgery,
    compute_whitehead_zero_surgery,
    non_relatedness_check,
)
from .knots import SurgeryRequest, ThinKnotSpec, build_thin_complex, large_surgery, twist_knot_spec
from .matrix import RingMatrix, smith_normal_form
from .rings import TwistClass

__version__ = "0.1.0"
