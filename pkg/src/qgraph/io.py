"""Graph files (JSON), scan CSVs and matrix dumps."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError
from .graph_core import CombinatorialGraph
from .model import MetricGraph
from .transfer import (
    ConstantPotential,
    PiecewisePotential,
    SampledPotential,
    ZeroPotential,
    check_potential,
)

SCAN_HEADER = ("k", "det_bond", "det_one_plus_phi_tau", "det_vertex", "is_pole", "det_oracle")


def fmt(x: float) -> str:
    """17 significant digits; enough for float -> text -> float to be exact."""
    return format(float(x), ".17g")


# -- graph files --------------------------------------------------------------


def _require(obj, key, where, line=None):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"missing field {key!r} in {where}", line=line, field=key)
    return obj[key]


def _number(value, field, line=None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{field} must be a number, got {value!r}", line=line, field=field)
    if not math.isfinite(value):
        raise ParseError(f"{field} must be finite", line=line, field=field)
    return float(value)


def _parse_potential(entry, edge_id):
    where = f"potential of edge {edge_id}"
    kind = _require(entry, "type", where)
    if kind == "zero":
        return ZeroPotential()
    if kind == "constant":
        return ConstantPotential(_number(_require(entry, "value", where), f"{where}.value"))
    if kind == "piecewise":
        pieces = _require(entry, "pieces", where)
        if not isinstance(pieces, list):
            raise ParseError(f"{where}.pieces must be a list", field="pieces")
        return PiecewisePotential(
            tuple(
                (
                    _number(_require(p, "length", where), f"{where}.pieces.length"),
                    _number(_require(p, "value", where), f"{where}.pieces.value"),
                )
                for p in pieces
            )
        )
    if kind == "sampled":
        values = _require(entry, "values", where)
        if not isinstance(values, list):
            raise ParseError(f"{where}.values must be a list", field="values")
        return SampledPotential(tuple(_number(v, f"{where}.values") for v in values))
    raise ParseError(f"unknown potential type {kind!r} on edge {edge_id}", field="type")


def graph_from_dict(data) -> MetricGraph:
    if not isinstance(data, dict):
        raise ParseError("top level must be an object")
    names = _require(data, "vertices", "graph")
    edges = _require(data, "edges", "graph")
    if not isinstance(names, list) or not all(isinstance(v, str) for v in names):
        raise ParseError("vertices must be a list of names", field="vertices")
    if len(set(names)) != len(names):
        raise ValidationError("vertex names must be unique")
    if not isinstance(edges, list):
        raise ParseError("edges must be a list", field="edges")
    index = {name: i for i, name in enumerate(names)}
    pairs, lengths, pots, ids = [], [], [], []
    for pos, e in enumerate(edges):
        eid = str(_require(e, "id", f"edge #{pos + 1}"))
        a, b = _require(e, "from", f"edge {eid}"), _require(e, "to", f"edge {eid}")
        for end in (a, b):
            if end not in index:
                raise ValidationError(f"edge {eid} refers to unknown vertex {end!r}")
        if a == b:
            raise ValidationError(
                f"edge {eid} is a self-loop at {a!r}; subdivide it with an extra "
                "degree-2 vertex (two edges of half the length) instead"
            )
        length = _number(_require(e, "length", f"edge {eid}"), f"edge {eid}.length")
        pot = _parse_potential(e.get("potential", {"type": "zero"}), eid)
        check_potential(pot, length)
        pairs.append((index[a], index[b]))
        lengths.append(length)
        pots.append(pot)
        ids.append(eid)
    if len(set(ids)) != len(ids):
        raise ValidationError("edge ids must be unique")
    graph = CombinatorialGraph(len(names), tuple(pairs))
    return MetricGraph(graph, tuple(lengths), tuple(pots), tuple(names), tuple(ids))


def loads_graph(text: str) -> MetricGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    return graph_from_dict(data)


def parse_graph(path) -> MetricGraph:
    return loads_graph(Path(path).read_text())


def _potential_to_dict(p):
    if isinstance(p, ZeroPotential):
        return {"type": "zero"}
    if isinstance(p, ConstantPotential):
        return {"type": "constant", "value": p.value}
    if isinstance(p, PiecewisePotential):
        return {"type": "piecewise", "pieces": [{"length": a, "value": b} for a, b in p.pieces]}
    return {"type": "sampled", "values": list(p.values)}


def graph_to_dict(mg: MetricGraph) -> dict:
    names = mg.vertex_names
    return {
        "vertices": list(names),
        "edges": [
            {
                "id": eid,
                "from": names[a],
                "to": names[b],
                "length": length,
                "potential": _potential_to_dict(pot),
            }
            for (a, b), length, pot, eid in zip(mg.graph.edges, mg.lengths, mg.potentials, mg.edge_ids)
        ],
    }


def dumps_graph(mg: MetricGraph) -> str:
    # json writes floats with repr, which round-trips exactly
    return json.dumps(graph_to_dict(mg), indent=2) + "\n"


def write_graph(mg: MetricGraph, path) -> None:
    Path(path).write_text(dumps_graph(mg))


# -- scan CSV ------------------------------------------------------------------


def scan_to_csv(result) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    for i in range(len(result.k)):
        w.writerow(
            [
                fmt(result.k[i]),
                fmt(result.det_bond[i]),
                fmt(result.det_one_plus_phi_tau[i]),
                fmt(result.det_vertex[i]),
                "1" if result.is_pole[i] else "0",
                fmt(result.det_oracle[i]),
            ]
        )
    return buf.getvalue()


def read_scan_csv(text: str) -> dict[str, np.ndarray]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != SCAN_HEADER:
        raise ParseError("unexpected scan CSV header", line=1)
    body = np.array([[float(x) for x in r] for r in rows[1:]]).reshape(-1, len(SCAN_HEADER))
    out = {name: body[:, j] for j, name in enumerate(SCAN_HEADER)}
    out["is_pole"] = out["is_pole"].astype(bool)
    return out


# -- matrix dumps -----------------------------------------------------------------


def matrix_to_csv(mat: np.ndarray, name: str) -> str:
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    lines = [f"# {name} {mat.shape[0]}x{mat.shape[1]}"]
    lines += [",".join(fmt(v) for v in row) for row in mat]
    return "\n".join(lines) + "\n"


def read_matrix_csv(text: str) -> np.ndarray:
    rows = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    return np.array([[float(v) for v in r.split(",")] for r in rows])
