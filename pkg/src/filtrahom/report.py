"""Analysis caches and JSON reports.

A run first condenses its homology computation into a cache document; every
report, including the one produced by the full run, is rendered from that
document alone.  Changing the persistence threshold therefore never touches
the input or the homology engine.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Optional

from .filtration_groups import FiltrationHomology, barcode, persistence_measure
from .multiparam import BifiltrationHomology, bipersistence_region

CACHE_FORMAT = "filtrahom-cache"
CACHE_VERSION = 1
SCHEMA = 1


class CacheError(ValueError):
    """Unreadable or inconsistent cache file."""


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _label(cell_id) -> str:
    if isinstance(cell_id, tuple):
        return ",".join(_label(x) for x in cell_id)
    return str(cell_id)


def _num(x: float):
    """JSON-safe number; the at-infinity marker is the string ``"inf"``."""
    if x == math.inf:
        return "inf"
    return int(x) if float(x).is_integer() else float(x)


def _unnum(x) -> float:
    return math.inf if x == "inf" else float(x)


def build_cache(FH: FiltrationHomology, settings: dict) -> dict:
    dg = barcode(FH)
    gens = [{"dim": g.dim, "slot": g.slot, "birth": g.birth, "death": g.death,
             "coords": list(g.coords),
             "representative_cells": [_label(c) for c in g.representative]}
            for g in FH.generators()]
    param = []
    if dg.param_values is not None:
        param = [[d, _num(b), _num(e)] for d, b, e in
                 (dg.param_point(pt) for pt in dg.index_points())]
    doc = {
        "format": CACHE_FORMAT, "version": CACHE_VERSION, "kind": "filtration",
        "settings": settings, "s": FH.s, "dims": FH.dims,
        "betti_per_step": [[FH.betti(n, d) for d in FH.dims] for n in range(1, FH.s + 1)],
        "generators": gens,
        "barcode": {"index": [list(pt) for pt in dg.index_points()], "param": param},
    }
    return normalize(doc)


def build_bicache(BH: BifiltrationHomology, settings: dict) -> dict:
    BF = BH.BF
    positions = list(BF.positions())
    slots, tables, classes = [], [], []
    for n, m in positions:
        for d in BH.dims:
            slot = BH.slots[n, m, d]
            slots.append({"n": n, "m": m, "dim": d, "rank": slot.dim})
            if slot.dim:
                # table[a-1][b-1] = dim(slot ∩ im i_*(a, b, n, m))
                table = [[BH.persistent_part(n, m, d, n + 1 - a, m + 1 - b).dim
                          for b in range(1, m + 1)] for a in range(1, n + 1)]
                tables.append({"n": n, "m": m, "dim": d, "table": table})
            for i in range(BH.betti(n, m, d)):
                x = [0] * BH.betti(n, m, d)
                x[i] = 1
                classes.append({"n": n, "m": m, "dim": d, "generator": i,
                                "corner": list(bipersistence_region(BH, n, m, d, x))})
    doc = {
        "format": CACHE_FORMAT, "version": CACHE_VERSION, "kind": "bifiltration",
        "settings": settings, "s1": BF.s1, "s2": BF.s2, "dims": BH.dims,
        "betti_grid": [[[BH.betti(n, m, d) for d in BH.dims] for m in range(1, BF.s2 + 1)]
                       for n in range(1, BF.s1 + 1)],
        "slots": slots, "persistent_tables": tables, "classes": classes,
    }
    return normalize(doc)


def normalize(doc: dict) -> dict:
    """JSON round trip, so in-memory and reloaded caches render identically."""
    return json.loads(dumps(doc))


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_cache(path, doc: dict) -> None:
    Path(path).write_text(dumps(doc))


def load_cache(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise CacheError("cannot read cache %s: %s" % (path, exc)) from None
    if not isinstance(doc, dict) or doc.get("format") != CACHE_FORMAT:
        raise CacheError("%s is not an analysis cache" % path)
    if doc.get("version") != CACHE_VERSION:
        raise CacheError("unsupported cache version %r" % doc.get("version"))
    if doc.get("kind") not in ("filtration", "bifiltration"):
        raise CacheError("unknown cache kind %r" % doc.get("kind"))
    return doc


def render(cache: dict, p: int = 1, q: int = 1) -> dict:
    try:
        if cache["kind"] == "filtration":
            return _render_filtration(cache, p)
        return _render_bifiltration(cache, p, q)
    except (KeyError, TypeError, IndexError) as exc:
        raise CacheError("corrupt cache: missing or malformed %s" % exc) from None


def _render_filtration(cache: dict, p: int) -> dict:
    dims = cache["dims"]
    H = [0] * len(dims)
    P = [0] * len(dims)
    entries = []
    for g in cache["generators"]:
        pers = g["death"] - g["birth"]
        H[g["dim"]] += 1
        if pers >= p:
            P[g["dim"]] += 1
        entries.append({"dim": g["dim"], "slot": g["slot"], "birth": g["birth"],
                        "death": g["death"], "persistence": pers, "noise": pers < p,
                        "representative_cells": g["representative_cells"]})
    measure = cache["settings"].get("measure", "diff")
    param = []
    for d, b, e in cache["barcode"]["param"]:
        value = persistence_measure(_unnum(b), _unnum(e), measure)
        param.append({"dim": d, "birth": b, "death": e, measure: _num(value)})
    return {
        "schema": SCHEMA,
        "settings": dict(cache["settings"], p=p),
        "betti_per_step": cache["betti_per_step"],
        "filtration_homology": entries,
        "ranks": {"H": H, "noise_p": [h - k for h, k in zip(H, P)], "persistent_p": P},
        "barcode": {"index": cache["barcode"]["index"], "param": param},
        "representatives_canonical": False,
    }


def _render_bifiltration(cache: dict, p: int, q: int) -> dict:
    dims = cache["dims"]
    H = [0] * len(dims)
    P = [0] * len(dims)
    for slot in cache["slots"]:
        H[slot["dim"]] += slot["rank"]
    for t in cache["persistent_tables"]:
        a, b = t["n"] + 1 - p, t["m"] + 1 - q
        if a >= 1 and b >= 1:
            P[t["dim"]] += t["table"][a - 1][b - 1]
    return {
        "schema": SCHEMA,
        "settings": dict(cache["settings"], p=p, q=q),
        "betti_grid": cache["betti_grid"],
        "slots": [s for s in cache["slots"] if s["rank"]],
        "classes": cache["classes"],
        "ranks": {"H": H, "noise_pq": [h - k for h, k in zip(H, P)], "persistent_pq": P},
    }


def compare_report(rep, thresholds) -> dict:
    diagrams = []
    for dg in rep.diagrams:
        diagrams.append([[d, _num(b), _num(e)] for d, b, e in dg.param_points()])
    return {
        "schema": SCHEMA,
        "thresholds": [_num(t) for t in thresholds],
        "sup_norm": _num(rep.sup_norm),
        "bottleneck": {str(d): _num(v) for d, v in sorted(rep.distances.items())},
        "persistence_diffs": {str(d): [_num(v) for v in vs]
                              for d, vs in sorted(rep.persistence_diffs.items())},
        "stable": rep.holds,
        "diagrams": diagrams,
    }


def settings_for(command: str, path: Optional[str], field: int, **extra) -> dict:
    settings = {"command": command, "field": field}
    if path is not None:
        settings["input"] = str(path)
        settings["input_sha256"] = file_digest(path)
    settings.update(extra)
    return settings
