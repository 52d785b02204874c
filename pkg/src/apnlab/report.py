"""Report serialization.

Reports are JSON objects written with sorted keys and no timestamps, so
identical inputs give byte-identical output.  Schema of an analysis
report::

    {"convention": {...}, "table": {"m", "k", "alpha"},
     "apn": {"apn", "delta"}, "differential_spectrum": {d: count},
     "image": {"image_size", "preimage_counts", "zero_preimages", "three_to_one"},
     "walsh": {"abs_counts", "parseval", "classical"|null},
     "degree": int, "ortho_derivative_spectrum": {d: count}}

Only the sections that were requested are present.  Spectra can also be
written as two-column CSV (value,count).
"""

from __future__ import annotations

import csv
import io
import json

from apnlab import analysis
from apnlab.functions import FunctionTable
from apnlab.gf2m import GF2m, get_field

WALSH_CONVENTION = "b over nonzero, a over all of K^2; |W| multiplicities"
INDEX_ENCODING = "index = x | y << m; output = f1 | f2 << m"
PAIRING = "<(b1,b2),(y1,y2)> = Tr(b1 y1) + Tr(b2 y2)"

ANALYSES = ("apn", "spectrum", "image", "walsh", "degree", "ortho")


def convention(field: GF2m) -> dict:
    return {
        "walsh_multiset": WALSH_CONVENTION,
        "index_encoding": INDEX_ENCODING,
        "pairing": PAIRING,
        "field_poly": f"{field.modulus:#x}",
        "m": field.m,
    }


def analyze_table(F: FunctionTable, which: list[str], field: GF2m | None = None) -> dict:
    K = field or get_field(F.m)
    rep: dict = {
        "convention": convention(K),
        "table": {"m": F.m, "k": F.k, "alpha": None if F.alpha is None else f"{F.alpha:#x}"},
    }
    if "apn" in which or "spectrum" in which:
        spec = analysis.differential_spectrum(F)
        rep["apn"] = {"apn": spec.delta == 2, "delta": spec.delta}
        if "spectrum" in which:
            rep["differential_spectrum"] = spec.counts
    if "image" in which:
        r = analysis.image_report(F)
        rep["image"] = {"image_size": r.image_size, "preimage_counts": r.preimage_counts,
                        "zero_preimages": r.zero_preimages, "three_to_one": r.three_to_one}
    if "walsh" in which:
        w = analysis.walsh_spectrum(F, K)
        rep["walsh"] = {"abs_counts": w.abs_counts, "parseval": w.parseval_ok,
                        "classical": analysis.classify_walsh(w) if F.n % 2 == 0 else None}
    if "degree" in which:
        rep["degree"] = analysis.algebraic_degree(F)
    if "ortho" in which:
        try:
            rep["ortho_derivative_spectrum"] = analysis.ortho_derivative_spectrum(F, K).counts
        except analysis.NotQuadraticAPNError as exc:
            rep["ortho_derivative_spectrum"] = {"error": str(exc)}
    return rep


def summary_lines(rep: dict) -> list[str]:
    lines = []
    if "apn" in rep:
        lines.append(f"APN: {str(rep['apn']['apn']).lower()}, delta={rep['apn']['delta']}")
    if "differential_spectrum" in rep:
        lines.append("differential spectrum: " + _fmt_counts(rep["differential_spectrum"]))
    if "image" in rep:
        im = rep["image"]
        lines.append(f"3-to-1: {str(im['three_to_one']).lower()}, image={im['image_size']}")
    if "walsh" in rep:
        w = rep["walsh"]
        cl = "n/a" if w["classical"] is None else str(w["classical"]).lower()
        lines.append(f"Walsh |W|: {_fmt_counts(w['abs_counts'])}; classical: {cl}")
    if "degree" in rep:
        lines.append(f"algebraic degree: {rep['degree']}")
    if "ortho_derivative_spectrum" in rep:
        od = rep["ortho_derivative_spectrum"]
        lines.append("ortho-derivative spectrum: " + (od["error"] if "error" in od else _fmt_counts(od)))
    return lines


def _fmt_counts(counts: dict) -> str:
    return ", ".join(f"{k}:{v}" for k, v in sorted(counts.items()))


def to_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(o):
    if isinstance(o, (set, frozenset, tuple)):
        return sorted(o) if isinstance(o, (set, frozenset)) else list(o)
    if hasattr(o, "item"):
        return o.item()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"cannot serialize {type(o).__name__}")


def spectrum_csv(counts: dict[int, int], value_name: str = "value") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([value_name, "count"])
    for k, v in sorted(counts.items()):
        w.writerow([k, v])
    return buf.getvalue()
