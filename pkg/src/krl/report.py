"""Per-knot invariant reports and their figures."""

from __future__ import annotations

import json
import math
import os
from fractions import Fraction
from typing import Optional

from .errors import KRLError
from .knots import (KnotDescriptor, Torus, TwoBridge, alexander, descriptor_to_json, determinant,
                    genus_bound)
from .lin import (htilde_torus, htilde_two_bridge_conjectured, is_known, lin_report, parity_check,
                  is_unknot_presentation)
from .locus import (branched_refined, branched_threshold, first_certified_n, lens_arc_analysis,
                    pillowcase_rows, two_bridge_lo)
from .poly import LaurentPoly, count_unit_circle_roots
from .signatures import d_k, partition_and_width, signature_function


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, LaurentPoly):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, no extra whitespace."""
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def htilde(K: KnotDescriptor, sigma: int):
    """(h-tilde, kind): exact for torus knots and the unknot, conjectural for 2-bridge knots."""
    P = K.presentation
    if is_unknot_presentation(K):
        return LaurentPoly(), "exact"
    if isinstance(P, Torus):
        ht = htilde_torus(P.p, P.q)
        return (-ht if K.mirrored else ht), "exact"
    if isinstance(P, TwoBridge):
        return htilde_two_bridge_conjectured(sigma), "conjectured"
    return None, None


def knot_report(K: KnotDescriptor, n_max: int = 40, lens: tuple = ()) -> dict:
    """All invariants of K as a JSON-ready dict; failures are recorded under "errors"."""
    out = {"knot": K.label(), "descriptor": descriptor_to_json(K), "errors": []}
    delta = alexander(K)
    out["alexander"] = str(delta)
    out["determinant"] = determinant(K)
    out["genus_bound"] = genus_bound(K)
    out["r"] = count_unit_circle_roots(delta)
    D = d_k(delta)
    out["d_k"] = D.to_json()
    try:
        sf = signature_function(K)
    except KRLError as e:
        out["errors"].append({"stage": "signature", "error": type(e).__name__, "message": str(e)})
        return out
    out["signature_function"] = sf.to_json()
    out["sigma"] = sf.at_minus_one()
    P = partition_and_width(sf) if sf.jumps else None
    out["partition"] = None if P is None else {
        "alphas": list(P.alphas), "w_lower": float(P.w_lower), "w_upper": float(P.w_upper),
        "w_over_pi": P.w_over_pi}
    L = lin_report(K, sf)
    out.update(L.to_json())
    out["h_sum_check"] = L.check()
    ht, kind = htilde(K, out["sigma"])
    out["htilde"] = None if ht is None else str(ht)
    out["htilde_kind"] = kind
    h = L.h
    a, b, c = parity_check(K, h if is_known(h) else None, out["sigma"])
    out["parity"] = {"h_equiv_half_sigma": a, "half_sigma_equiv_half_det_minus_one": b,
                     "h_equiv_half_det_minus_one": c}
    lo = {}
    if not sf.is_constant():
        lo["branched_threshold"] = branched_threshold(sf)
        lo["branched_first_certified_n"] = first_certified_n(sf)
    if is_known(h):
        lo["branched_refined"] = sorted(branched_refined(sf, h, n_max))
        lo["branched_n_max"] = n_max
    if isinstance(K.presentation, TwoBridge) and out["sigma"] != 0:
        lo["two_bridge"] = two_bridge_lo(K.presentation.p, K.presentation.q).to_json()
    for p in lens:
        lo.setdefault("lens", []).append(lens_arc_analysis(delta, int(p)).to_json())
    out["lo"] = lo
    return out


def _safe_name(label: str) -> str:
    keep = "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in label)
    return keep.strip("_") or "knot"


def render_figures(K: KnotDescriptor, report: dict, directory: str, lens: tuple = ()) -> list:
    """Signature/h_SLR step plot and pillowcase picture; returns the written paths."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    os.makedirs(directory, exist_ok=True)
    base = os.path.join(directory, _safe_name(report["knot"]))
    paths = []
    sfj = report.get("signature_function")
    if sfj is not None:
        alphas = [0.0] + list((report.get("partition") or {}).get("alphas", [])) + [math.pi]
        xs = [a / math.pi for a in alphas]
        fig, ax = plt.subplots(figsize=(6, 3.2))
        ax.stairs([v / 2 for v in sfj["values"]], xs, label="sigma/2", lw=2)
        if report.get("h_slr_by_interval"):
            ax.stairs([d["h_slr"] for d in report["h_slr_by_interval"]], xs, label="h_SLR", lw=1.5, ls="--")
        ax.set_xlabel("alpha / pi")
        ax.set_xlim(0, 1)
        ax.legend(loc="best")
        ax.set_title(report["knot"])
        fig.tight_layout()
        p = base + "_signature.png"
        fig.savefig(p, dpi=110)
        plt.close(fig)
        paths.append(p)
    rows = pillowcase_rows(K, lens)
    fig, ax = plt.subplots(figsize=(4, 5))
    layers = {}
    for layer, x, y in rows:
        layers.setdefault(layer, []).append((x, y))
    for layer, pts in layers.items():
        if layer == "reducible_axis":
            ax.plot([p[0] for p in pts], [p[1] for p in pts], color="k", lw=1)
        elif layer == "dk_points":
            ax.plot([p[0] for p in pts], [p[1] for p in pts], "o", color="tab:blue", ms=5)
        else:
            ls = "-" if list(layers).index(layer) % 2 else "--"
            for i in range(0, len(pts), 2):
                ax.plot([pts[i][0], pts[i + 1][0]], [pts[i][1], pts[i + 1][1]], ls, color="0.5", lw=0.6)
    ax.set_xlim(0, 1)
    ax.set_ylim(-6, 6)
    ax.set_xlabel("mu*")
    ax.set_ylabel("lambda*")
    ax.set_title(report["knot"])
    fig.tight_layout()
    p = base + "_pillowcase.png"
    fig.savefig(p, dpi=110)
    plt.close(fig)
    paths.append(p)
    return paths
