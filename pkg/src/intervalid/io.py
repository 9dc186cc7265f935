"""Reading and writing diagram JSON documents.

Document layout::

    {"nodes": [{"id": "Y", "outcomes": ["y1", "y2"], "parents": [],
                "lower_bounds": {"": [0.2, 0.1]}}, ...]}

A parent-configuration key joins the parents' outcome labels with ``","`` in
the node's parent order; the root context key is ``""``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .model import (
    DiagramError,
    InfluenceDiagram,
    LowerBoundTable,
    OutcomeSpace,
    Violation,
    validate_diagram,
)


class ParseError(ValueError):
    """The document is not well-formed JSON of the expected shape."""


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise ParseError(msg)


def parse_document(doc: Any) -> tuple[InfluenceDiagram, list[Violation]]:
    """Build an unchecked diagram from a decoded JSON document.

    Returns the diagram together with key-level violations (context keys that
    name unknown outcomes or have the wrong arity), which cannot be stored in
    the diagram itself. Shape errors raise :class:`ParseError`.
    """
    _expect(isinstance(doc, dict) and isinstance(doc.get("nodes"), list), "document must be an object with a 'nodes' list")
    raw_nodes = doc["nodes"]
    spaces = []
    for i, raw in enumerate(raw_nodes):
        _expect(isinstance(raw, dict), f"nodes[{i}] must be an object")
        for key in ("id", "outcomes", "parents", "lower_bounds"):
            _expect(key in raw, f"nodes[{i}] lacks {key!r}")
        _expect(isinstance(raw["id"], str), f"nodes[{i}].id must be a string")
        outs = raw["outcomes"]
        _expect(isinstance(outs, list) and all(isinstance(o, str) for o in outs), f"nodes[{i}].outcomes must be a list of strings")
        _expect(all("," not in o for o in outs), f"nodes[{i}].outcomes may not contain ','")
        parents = raw["parents"]
        _expect(isinstance(parents, list) and all(isinstance(p, str) for p in parents), f"nodes[{i}].parents must be a list of strings")
        _expect(isinstance(raw["lower_bounds"], dict), f"nodes[{i}].lower_bounds must be an object")
        spaces.append(OutcomeSpace(raw["id"], tuple(outs)))

    by_id = {s.node_id: s for s in spaces}
    violations: list[Violation] = []
    tables = []
    for raw in raw_nodes:
        node = raw["id"]
        parents = tuple(raw["parents"])
        entries = {}
        for key, vec in raw["lower_bounds"].items():
            _expect(
                isinstance(vec, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vec),
                f"{node}.lower_bounds[{key!r}] must be a list of numbers",
            )
            ctx = _decode_key(key, parents, by_id)
            if ctx is None:
                violations.append(Violation("extra-context", node, "key does not name a parent configuration", key))
                continue
            entries[ctx] = [float(v) for v in vec]
        tables.append(LowerBoundTable(node, parents, entries))
    return InfluenceDiagram(spaces, tables, check=False), violations


def _decode_key(key: str, parents: tuple[str, ...], spaces: dict[str, OutcomeSpace]):
    if not parents:
        return () if key == "" else None
    labels = key.split(",")
    if len(labels) != len(parents) or any(p not in spaces for p in parents):
        return None
    ctx = []
    for p, lab in zip(parents, labels):
        outs = spaces[p].outcomes
        if lab not in outs:
            return None
        ctx.append(outs.index(lab))
    return tuple(ctx)


def read_document(path: str | Path) -> tuple[InfluenceDiagram, list[Violation]]:
    """Read a diagram file without raising on validation problems.

    Raises:
        OSError: unreadable file.
        ParseError: malformed JSON or wrong document shape.
    """
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return parse_document(doc)


def check_document(path: str | Path) -> tuple[InfluenceDiagram, list[Violation]]:
    d, key_violations = read_document(path)
    return d, key_violations + validate_diagram(d)


def load_diagram(path: str | Path) -> InfluenceDiagram:
    """Read and validate a diagram file, raising :class:`DiagramError` if invalid."""
    d, violations = check_document(path)
    if violations:
        raise DiagramError(violations)
    return InfluenceDiagram(d._space_list, d._table_list)


def loads_diagram(text: str) -> InfluenceDiagram:
    d, violations = parse_document(json.loads(text))
    violations += validate_diagram(d)
    if violations:
        raise DiagramError(violations)
    return InfluenceDiagram(d._space_list, d._table_list)


def to_document(d: InfluenceDiagram) -> dict:
    nodes = []
    for n in d.nodes:
        t = d.table(n)
        pspaces = [d.space(p) for p in t.parents]
        bounds = {}
        for ctx in d.contexts(n):
            key = ",".join(s.outcomes[i] for s, i in zip(pspaces, ctx))
            bounds[key] = [float(v) for v in t[ctx]]
        nodes.append({
            "id": n,
            "outcomes": list(d.space(n).outcomes),
            "parents": list(t.parents),
            "lower_bounds": bounds,
        })
    return {"nodes": nodes}


def dumps_diagram(d: InfluenceDiagram, indent: int | None = 2) -> str:
    return json.dumps(to_document(d), indent=indent)


def save_diagram(d: InfluenceDiagram, path: str | Path) -> None:
    Path(path).write_text(dumps_diagram(d) + "\n")
