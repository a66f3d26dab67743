"""krl: exact knot invariants around the Casson-Lin count of SL2R and SU(2) representations.

Modules: poly (Laurent polynomials, exact real roots), knots (descriptors),
signatures (Levine-Tristram signature functions), lin (h and h-tilde),
riley (2-bridge parabolic representations), locus (slope calculus),
geomcore (matrix identities), report and cli.
"""

from .knots import knot, mirror, raw, seifert, torus, two_bridge, parse_knot_spec
from .poly import LaurentPoly
from .signatures import signature_function

__all__ = ["LaurentPoly", "knot", "mirror", "raw", "seifert", "torus", "two_bridge",
           "parse_knot_spec", "signature_function"]
__version__ = "0.1.0"
