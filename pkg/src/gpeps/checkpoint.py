"""Save and load PEPS states as ``.npz`` archives.

Layout: ``meta`` holds a JSON document (graph, engine settings, history);
``t<v>`` holds the site tensor of vertex v and ``w<u>_<v>`` the bond vector of
edge (u, v). Arrays are stored uncompressed, so loading is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidArgument
from .lattice import Graph
from .peps import PepsState

FORMAT_VERSION = 1


def save_checkpoint(state: PepsState, path: str | Path) -> None:
    g = state.graph
    meta = {
        "format": FORMAT_VERSION,
        "graph_name": g.name,
        "graph_hash": g.digest(),
        "num_vertices": g.num_vertices,
        "edges": [list(e) for e in g.edges],
        "coords": [list(c) for c in g.coords],
        "chi_max": state.chi_max,
        "lambda_floor": state.lambda_floor,
        "step_count": state.step_count,
        "theta_history": state.theta_history,
        "max_truncation_error": state.max_truncation_error,
    }
    arrays = {"meta": np.array(json.dumps(meta, sort_keys=True))}
    for v, t in enumerate(state.tensors):
        arrays[f"t{v}"] = t
    for (u, v), w in state.weights.items():
        arrays[f"w{u}_{v}"] = w
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path: str | Path) -> PepsState:
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("format") != FORMAT_VERSION:
            raise InvalidArgument(f"unsupported checkpoint format {meta.get('format')}")
        g = Graph(meta["num_vertices"], tuple(tuple(e) for e in meta["edges"]),
                  name=meta["graph_name"], coords=tuple(tuple(c) for c in meta["coords"]))
        if g.digest() != meta["graph_hash"]:
            raise InvalidArgument("checkpoint graph hash mismatch")
        tensors = [data[f"t{v}"] for v in range(g.num_vertices)]
        weights = {(u, v): data[f"w{u}_{v}"] for u, v in g.edges}
    return PepsState(
        g, tensors, weights,
        chi_max=meta["chi_max"],
        lambda_floor=meta["lambda_floor"],
        step_count=meta["step_count"],
        theta_history=list(meta["theta_history"]),
        max_truncation_error=meta["max_truncation_error"],
    )
