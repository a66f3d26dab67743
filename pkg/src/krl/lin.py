"""Casson-Lin counts h, h^c_SU, h^c_SL2R and the extended invariant h-tilde.

h itself is only produced by class rules (torus knots, small alternating
knots, Montesinos knots) or supplied by the user; h^c_SU comes from the
Levine-Tristram signature and h^c_SL2R = h - h^c_SU.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .knots import KnotDescriptor, Raw, Seifert, Torus, alexander, determinant, genus_bound
from .poly import AlgebraicReal, LaurentPoly, as_laurent, count_unit_circle_roots, normalize_symmetric
from .signatures import SignatureStep, signature_at_minus_one, signature_function

_t = LaurentPoly.monomial(1)


class Unknown:
    """Placeholder for an invariant that no implemented rule determines."""

    def __init__(self, reason: str = ""):
        self.reason = reason

    def __bool__(self):
        return False

    def __repr__(self):
        return f"Unknown({self.reason!r})"

    def __eq__(self, other):
        return isinstance(other, Unknown)

    def __hash__(self):
        return hash(Unknown)


def is_known(h) -> bool:
    return not isinstance(h, Unknown)


def _as_c(c):
    if isinstance(c, AlgebraicReal):
        return c
    if isinstance(c, float):
        return Fraction(c)
    return Fraction(c)


def h_su(K: KnotDescriptor, c, sf: Optional[SignatureStep] = None) -> int:
    """-sigma(e^{2 i alpha}) / 2 for alpha = arccos(c/2)."""
    sf = sf if sf is not None else signature_function(K)
    return -sf.value_at_c(_as_c(c)) // 2


def is_unknot_presentation(K: KnotDescriptor) -> bool:
    """An empty Seifert matrix, or a bare raw polynomial 1, is read as the unknot."""
    P = K.presentation
    if isinstance(P, Seifert):
        return len(P.V) == 0
    if isinstance(P, Raw):
        return P.alexander == LaurentPoly.const(1) and not P.signature and not P.jumps
    return False


def h_rule(K: KnotDescriptor):
    """(h, provenance) by the class rules; h may be Unknown."""
    if K.h is not None:
        return K.h, "user"
    P = K.presentation
    if is_unknot_presentation(K):
        return 0, "unknot"
    if isinstance(P, Torus):
        g = (P.p - 1) * (P.q - 1) // 2
        return (-g if K.mirrored else g), "torus"
    if "alternating" in K.flags and ({"small", "rep_small"} & K.flags):
        return -signature_at_minus_one(K) // 2, "alternating"
    if "montesinos" in K.flags:
        return -signature_at_minus_one(K) // 2, "montesinos"
    return Unknown("no rule applies: not torus, small alternating or Montesinos"), None


def h_total(K: KnotDescriptor):
    return h_rule(K)[0]


def h_slr(K: KnotDescriptor, c, sf: Optional[SignatureStep] = None) -> int:
    h = h_total(K)
    if not is_known(h):
        raise ValueError(f"h unknown for {K.label()}: {h.reason}")
    return h - h_su(K, c, sf)


@dataclass
class LinReport:
    h: object
    provenance: Optional[str]
    samples: list                  # rational c per interval
    h_su: list
    h_slr: Optional[list]

    def check(self) -> bool:
        if not is_known(self.h):
            return True
        return all(a + b == self.h for a, b in zip(self.h_su, self.h_slr))

    def to_json(self):
        return {"h": self.h if is_known(self.h) else None,
                "h_provenance": self.provenance if is_known(self.h) else self.h.reason,
                "h_su_by_interval": [{"c": str(c), "c_float": float(c), "h_su": v}
                                     for c, v in zip(self.samples, self.h_su)],
                "h_slr_by_interval": None if self.h_slr is None else
                [{"c": str(c), "c_float": float(c), "h_slr": v} for c, v in zip(self.samples, self.h_slr)]}


def lin_report(K: KnotDescriptor, sf: Optional[SignatureStep] = None) -> LinReport:
    sf = sf if sf is not None else signature_function(K)
    h, prov = h_rule(K)
    cs = sf.sample_points()
    su = [-v // 2 for v in sf.values]
    slr = [h - x for x in su] if is_known(h) else None
    return LinReport(h, prov, cs, su, slr)


# ---------------------------------------------------------------------------
# numerical semigroups and h-tilde

@dataclass(frozen=True)
class GapData:
    gaps: tuple
    frobenius: int


def semigroup_gaps(p: int, q: int) -> GapData:
    if not (2 <= p < q and math.gcd(p, q) == 1):
        raise ValueError("need coprime 2 <= p < q")
    N = p * q
    rep = [False] * N
    for a in range(0, N, p):
        for b in range(a, N, q):
            rep[b] = True
    gaps = tuple(n for n in range(N) if not rep[n])
    return GapData(gaps, p * q - p - q)


def htilde_torus(p: int, q: int) -> LaurentPoly:
    out = LaurentPoly()
    for i in semigroup_gaps(p, q).gaps:
        out = out + LaurentPoly.monomial(i) + LaurentPoly.monomial(-i)
    return out


def htilde_two_bridge_conjectured(sigma: int) -> LaurentPoly:
    """-(t^sigma - t^-sigma) / (t - t^-1)."""
    if sigma % 2:
        raise ValueError("signature must be even")
    num = -(LaurentPoly.monomial(sigma) - LaurentPoly.monomial(-sigma))
    return num.exact_div(_t - LaurentPoly.monomial(-1))


def htilde_plus(ht: LaurentPoly) -> dict:
    """Coefficients c_i, i > 0, of h-tilde = sum c_i (t^i + t^-i)."""
    return {e: int(c) for e, c in ht.items() if e > 0}


def htilde_from_heights(heights: Iterable[int]) -> LaurentPoly:
    """Unsigned h-tilde: each parabolic at height i contributes t^i + t^-i (it pairs with -i)."""
    out = LaurentPoly()
    for i in heights:
        out = out + LaurentPoly.monomial(i) + LaurentPoly.monomial(-i)
    return out


# ---------------------------------------------------------------------------
# Milnor torsion and the L-space torsion conjecture

@dataclass(frozen=True)
class MilnorTorsion:
    coeffs: tuple
    genus: int
    is_good: bool
    gaps: tuple


def milnor_torsion(delta, N: int) -> MilnorTorsion:
    d = normalize_symmetric(as_laurent(delta))
    a = d.shift(-d.low).as_ordinary()
    g = d.span // 2
    M = max(N, 2 * g)
    out, s = [], Fraction(0)
    for n in range(M + 1):
        s += a[n] if n < len(a) else 0
        out.append(int(s))
    good = all(x in (0, 1) for x in out)
    gaps = tuple(n for n in range(2 * g) if out[n] == 0)
    for n in range(2 * g):
        assert out[n] + out[2 * g - 1 - n] == 1, "symmetry of Delta violated"
    return MilnorTorsion(tuple(out[:N + 1]), g, good, gaps)


def lspace_conjecture_check(delta, heights, h=None) -> dict:
    """Verdicts for the three parts of the L-space torsion conjecture.

    (1) h = r/2 (needs h); (2) the unsigned h-tilde_+ is good, i.e. heights are
    distinct; (3) every height falls in a gap of the Milnor torsion.
    """
    heights = [int(x) for x in heights]
    if any(x < 0 for x in heights):
        raise ValueError("heights must be nonnegative")
    d = normalize_symmetric(as_laurent(delta))
    r = count_unit_circle_roots(d)
    mt = milnor_torsion(d, d.span)
    gaps = set(mt.gaps)
    one = None if h is None or not is_known(h) else (h * 2 == r)
    distinct = len(set(heights)) == len(heights)
    in_gaps = all(x in gaps for x in heights)
    filled = len(gaps & set(heights))
    return {"r": r, "half_r": Fraction(r, 2), "h": h if (h is not None and is_known(h)) else None,
            "h_equals_half_r": one, "htilde_plus_good": distinct,
            "heights_in_gaps": in_gaps, "gaps": sorted(gaps),
            "misplaced": sorted(x for x in heights if x not in gaps),
            "fill_ratio": Fraction(filled, len(gaps)) if gaps else Fraction(0),
            "milnor_torsion_good": mt.is_good}


# ---------------------------------------------------------------------------
# parity and degree checks

def parity_check(K: KnotDescriptor, h=None, sigma=None):
    """(h = sigma/2, sigma/2 = (det-1)/2, h = (det-1)/2) mod 2; entries needing h are None if unknown."""
    if h is None:
        h = h_total(K)
    if sigma is None:
        sigma = signature_at_minus_one(K)
    det = determinant(K)
    s2, d2 = (sigma // 2) % 2, ((det - 1) // 2) % 2
    if not is_known(h):
        return None, s2 == d2, None
    return (h % 2 == s2), (s2 == d2), (h % 2 == d2)


def milnor_wood_degree_check(htilde, g: int, hyperbolic_fibered: bool = False) -> bool:
    ht = as_laurent(htilde)
    if ht.is_zero():
        return True
    deg = max(abs(ht.high), abs(ht.low))
    return deg < 2 * g - 1 if hyperbolic_fibered else deg <= 2 * g - 1
