"""Edge-list and ground-truth file handling.

Graph files are whitespace-separated ``u v w`` lines with signed real
weights; ``#`` starts a comment. Ground truth is JSON of the form
``{"pairs": [[[labels...], [labels...]], ...], "outliers": [...]}``.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from .graph import GraphError, SignedGraph, build_graph, largest_component
from .synth import GroundTruth

logger = logging.getLogger(__name__)


class IngestError(ValueError):
    """Unparseable or empty input file."""


def read_edge_list(path) -> list[tuple[str, str, float]]:
    """Parse a ``u v w`` edge file, reporting the line number on errors."""
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise IngestError(
                    f"{path}:{lineno}: expected 'u v w', got {raw.strip()!r}"
                )
            try:
                w = float(parts[2])
            except ValueError:
                raise IngestError(
                    f"{path}:{lineno}: weight {parts[2]!r} is not a number"
                ) from None
            edges.append((parts[0], parts[1], w))
    if not edges:
        raise IngestError(f"{path}: no edges found")
    return edges


def write_edge_list(path, g: SignedGraph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
            fh.write(f"{g.labels[u]} {g.labels[v]} {w:.12g}\n")


def ingest(path, directed: bool = False) -> SignedGraph:
    """Load a graph file and restrict it to its largest connected component.

    With ``directed`` set, reciprocal entries are symmetrized by averaging:
    each line contributes half its weight to the undirected pair, so a pair
    listed in both directions averages and an antisymmetric pair cancels
    away. Dropped node/edge counts are logged.
    """
    edges = read_edge_list(path)
    if directed:
        edges = [(u, v, 0.5 * w) for u, v, w in edges]
    try:
        g = build_graph(edges)
    except GraphError as exc:
        raise IngestError(f"{path}: {exc}") from exc
    g, dropped_nodes, dropped_edges = largest_component(g)
    if dropped_nodes or dropped_edges:
        logger.warning(
            "%s: kept largest component, dropped %d nodes and %d edges",
            path,
            dropped_nodes,
            dropped_edges,
        )
    return g


def write_ground_truth(path, truth: GroundTruth) -> None:
    doc = {
        "pairs": [[sorted(a), sorted(b)] for a, b in truth.pairs],
        "outliers": sorted(truth.outliers),
        "restricted_to_lcc": truth.restricted_to_lcc,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def read_ground_truth(path) -> GroundTruth:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return GroundTruth(
        pairs=tuple((frozenset(a), frozenset(b)) for a, b in doc["pairs"]),
        outliers=frozenset(doc.get("outliers", [])),
        restricted_to_lcc=bool(doc.get("restricted_to_lcc", False)),
    )
