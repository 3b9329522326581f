"""JSON network files.

Keys: ``alphabet_size``, ``nodes``, ``edges`` (``[tail, head]`` in
contractual order), ``pairs`` (``[source, target]``) and ``coding`` (node
name to truth table, rows in base-d lexicographic order, first input most
significant). An optional ``outcome_aliases`` object maps short outcome
names to ``edge:tail>head`` or ``src:i`` selectors for ``--force``.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .coding import CodingScheme, build_scheme
from .errors import CodingError, ParseError
from .network import Network, build_network

REQUIRED = ("alphabet_size", "nodes", "edges", "pairs", "coding")
FIXTURES = ("identity.json", "butterfly.json", "butterfly_nonlinear.json", "chain_d3.json")


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture, e.g. ``fixture_path("butterfly.json")``."""
    return Path(str(resources.files("qnetcode") / "fixtures" / name))


def resolve(path: str | Path) -> Path:
    """``path`` itself if it exists, else the bundled fixture with that file name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = fixture_path(p.name)
    if bundled.exists():
        return bundled
    raise ParseError(f"{path}: no such file")


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise ParseError(msg)


def load_document(doc: dict) -> tuple[Network, CodingScheme]:
    _expect(isinstance(doc, dict), "top level must be a JSON object")
    missing = [k for k in REQUIRED if k not in doc]
    _expect(not missing, f"missing keys: {', '.join(missing)}")
    d = doc["alphabet_size"]
    _expect(isinstance(d, int) and not isinstance(d, bool) and d >= 2,
            f"alphabet_size: expected an integer >= 2, got {d!r}")
    nodes = doc["nodes"]
    _expect(isinstance(nodes, list) and all(isinstance(v, str) for v in nodes),
            "nodes: expected an array of strings")
    for key in ("edges", "pairs"):
        val = doc[key]
        _expect(isinstance(val, list) and all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p) for p in val),
            f"{key}: expected an array of [name, name] pairs")
    coding = doc["coding"]
    _expect(isinstance(coding, dict), "coding: expected an object of truth tables")

    # network errors already name the offending key, e.g. "edges[3]: ..."
    net = build_network(nodes, doc["edges"], doc["pairs"])

    for v, table in coding.items():
        _expect(isinstance(table, list) and all(
            isinstance(row, list) and all(isinstance(z, int) and not isinstance(z, bool) for z in row)
            for row in table), f"coding.{v}: expected an array of integer rows")
        if v in net.nodes and not net.is_target(v):
            rows = d ** net.fan_in(v)
            _expect(len(table) == rows,
                    f"coding.{v}: expected {rows} rows for d={d}, m={net.fan_in(v)}, got {len(table)}")
    try:
        scheme = build_scheme(net, d, coding)
    except CodingError as exc:
        raise ParseError(str(exc)) from None
    return net, scheme


def loads(text: str, name: str = "<string>") -> tuple[Network, CodingScheme]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{name}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return load_document(doc)


def parse_network_file(path: str | Path) -> tuple[Network, CodingScheme]:
    p = resolve(path)
    return loads(p.read_text(), str(p))


def load_aliases(path: str | Path) -> dict[str, str]:
    doc = json.loads(resolve(path).read_text())
    aliases = doc.get("outcome_aliases", {})
    _expect(isinstance(aliases, dict), "outcome_aliases: expected an object")
    return dict(aliases)


def to_document(net: Network, scheme: CodingScheme, aliases: dict | None = None) -> dict:
    doc = {
        "alphabet_size": scheme.d,
        "nodes": list(net.nodes),
        "edges": [[e.tail, e.head] for e in net.edges],
        "pairs": [list(p) for p in net.pairs],
        "coding": scheme.tables(),
    }
    if aliases:
        doc["outcome_aliases"] = dict(aliases)
    return doc


def dumps(net: Network, scheme: CodingScheme, aliases: dict | None = None) -> str:
    """Serialise with one truth table per line."""
    doc = to_document(net, scheme, aliases)
    parts = ["{"]
    parts.append(f'  "alphabet_size": {doc["alphabet_size"]},')
    parts.append(f'  "nodes": {json.dumps(doc["nodes"])},')
    parts.append(f'  "edges": {json.dumps(doc["edges"])},')
    parts.append(f'  "pairs": {json.dumps(doc["pairs"])},')
    parts.append('  "coding": {')
    items = list(doc["coding"].items())
    for j, (v, table) in enumerate(items):
        rows = ", ".join(json.dumps(r) for r in table)
        parts.append(f'    {json.dumps(v)}: [{rows}]' + ("," if j < len(items) - 1 else ""))
    parts.append("  }" + ("," if aliases else ""))
    if aliases:
        parts.append(f'  "outcome_aliases": {json.dumps(doc["outcome_aliases"])}')
    parts.append("}")
    return "\n".join(parts) + "\n"
