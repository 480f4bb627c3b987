"""Text formats: graph specs, map exports and certificate documents.

All numbers are written as ``"p/q"`` strings.  Graph specs and maps are YAML
(JSON is accepted as a subset); parse errors carry line and column.
"""
from __future__ import annotations

import datetime as _dt
from fractions import Fraction

import numpy as np
import yaml

from .certificate import Certificate
from .graph import GraphError, MetricGraph, PointRef, validate_graph
from .plmap import DiscontinuousMap, PLMap
from .rational import fmt, q

MAP_SCHEMA = "puremix-map/1"
CERT_SCHEMA = "puremix-certificate/1"


class SpecError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None, path: str | None = None):
        where = "" if line is None else f"{line}:{col}: "
        super().__init__(f"{path + ':' if path else ''}{where}{msg}")
        self.line, self.col = line, col


def _mark(node):
    return node.start_mark.line + 1, node.start_mark.column + 1


def _compose(text: str, path=None):
    try:
        return yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        m = exc.problem_mark
        raise SpecError(exc.problem or "malformed document", m.line + 1, m.column + 1, path) from None


def _scalar(node, what, path):
    if not isinstance(node, yaml.ScalarNode):
        raise SpecError(f"{what} must be a scalar", *_mark(node), path)
    return node.value


def _rational(node, what, path):
    text = _scalar(node, what, path)
    try:
        return q(text)
    except (TypeError, ValueError):
        raise SpecError(f"{what}: not a rational 'p/q': {text!r}", *_mark(node), path) from None


def _int(node, what, path):
    text = _scalar(node, what, path)
    try:
        return int(text)
    except ValueError:
        raise SpecError(f"{what}: not an integer: {text!r}", *_mark(node), path) from None


def _mapping(node, what, path) -> dict:
    if not isinstance(node, yaml.MappingNode):
        raise SpecError(f"{what} must be a mapping", *_mark(node), path)
    return {_scalar(k, "key", path): v for k, v in node.value}


def _seq(node, what, path) -> list:
    if not isinstance(node, yaml.SequenceNode):
        raise SpecError(f"{what} must be a list", *_mark(node), path)
    return node.value


def _req(table: dict, key: str, node, path):
    if key not in table:
        raise SpecError(f"missing '{key}'", *_mark(node), path)
    return table[key]


def _vertex(text: str):
    return int(text) if text.lstrip("-").isdigit() else text


def graph_from_node(node, path=None) -> MetricGraph:
    top = _mapping(node, "graph spec", path)
    for key in ("vertices", "edges"):
        if key not in top:
            raise SpecError(f"missing '{key}'", *_mark(node), path)
    vertices = [_vertex(_scalar(v, "vertex", path)) for v in _seq(top["vertices"], "vertices", path)]
    vset = set(vertices)
    edges = []
    for en in _seq(top["edges"], "edges", path):
        e = _mapping(en, "edge", path)
        for key in ("id", "from", "to", "length"):
            if key not in e:
                raise SpecError(f"edge missing '{key}'", *_mark(en), path)
        tail = _vertex(_scalar(e["from"], "from", path))
        head = _vertex(_scalar(e["to"], "to", path))
        for v, n in ((tail, e["from"]), (head, e["to"])):
            if v not in vset:
                raise SpecError(f"unknown vertex {v!r}", *_mark(n), path)
        L = _rational(e["length"], "length", path)
        if L <= 0:
            raise SpecError("edge length must be positive", *_mark(e["length"]), path)
        edges.append((_int(e["id"], "id", path), tail, head, L))
    try:
        return validate_graph(MetricGraph(vertices, edges))
    except GraphError as exc:
        raise SpecError(str(exc), *_mark(node), path) from None


def parse_graph(text: str, path=None) -> MetricGraph:
    node = _compose(text, path)
    if node is None:
        raise SpecError("empty document", 1, 1, path)
    return graph_from_node(node, path)


def load_graph(path) -> MetricGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read(), str(path))


def graph_to_data(g: MetricGraph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [
            {"id": e.id, "from": e.tail, "to": e.head, "length": fmt(e.length)}
            for e in sorted(g.edges.values(), key=lambda e: e.id)
        ],
    }


def point_to_data(p: PointRef) -> dict:
    return {"edge": p.edge, "param": fmt(p.param)}


def parse_point(text: str) -> PointRef:
    """``"edge,param"`` as used on the command line."""
    try:
        e, t = text.split(",")
        return PointRef(int(e), q(t.strip()))
    except (ValueError, TypeError):
        raise SpecError(f"point must be 'edge,p/q', got {text!r}") from None


# -- maps --------------------------------------------------------------------


def map_to_data(m: PLMap) -> dict:
    pieces = {}
    for eid in m.domain.edge_ids:
        ps = list(m.pieces(eid))
        pieces[eid] = {
            "breakpoints": [fmt(p[0]) for p in ps] + [fmt(ps[-1][1])],
            "images": [{"edge": p[2], "from": fmt(p[3]), "to": fmt(p[4])} for p in ps],
        }
    same = m.domain == m.codomain
    return {
        "schema": MAP_SCHEMA,
        "domain": graph_to_data(m.domain),
        "codomain": "domain" if same else graph_to_data(m.codomain),
        "pieces": pieces,
    }


def dump_map(m: PLMap) -> str:
    return yaml.safe_dump(map_to_data(m), sort_keys=False, default_flow_style=None, width=100)


def parse_map(text: str, path=None) -> PLMap:
    node = _compose(text, path)
    if node is None:
        raise SpecError("empty document", 1, 1, path)
    top = _mapping(node, "map", path)
    schema = _scalar(top["schema"], "schema", path) if "schema" in top else None
    if schema != MAP_SCHEMA:
        raise SpecError(f"expected schema {MAP_SCHEMA!r}", *_mark(node), path)
    dom = graph_from_node(_req(top, "domain", node, path), path)
    cod_node = top.get("codomain")
    if cod_node is None or (isinstance(cod_node, yaml.ScalarNode) and cod_node.value == "domain"):
        cod = dom
    else:
        cod = graph_from_node(cod_node, path)
    pieces = {}
    for key, pn in _mapping(_req(top, "pieces", node, path), "pieces", path).items():
        if not key.lstrip("-").isdigit():
            raise SpecError(f"edge id must be an integer, got {key!r}", *_mark(pn), path)
        eid = int(key)
        entry = _mapping(pn, f"pieces of edge {eid}", path)
        bps = [_rational(b, "breakpoint", path) for b in _seq(_req(entry, "breakpoints", pn, path), "breakpoints", path)]
        imgs = _seq(_req(entry, "images", pn, path), "images", path)
        if len(imgs) != len(bps) - 1:
            raise SpecError("need one image record per piece", *_mark(pn), path)
        plist = []
        for (s0, s1), rn in zip(zip(bps, bps[1:]), imgs):
            r = _mapping(rn, "image", path)
            c = _int(_req(r, "edge", rn, path), "edge", path)
            if c not in cod.edges:
                raise SpecError(f"unknown codomain edge {c}", *_mark(rn), path)
            plist.append((s0, s1, c, _rational(_req(r, "from", rn, path), "from", path), _rational(_req(r, "to", rn, path), "to", path)))
            if len(plist) > 1:
                a, b = plist[-2], plist[-1]
                if cod.canon(PointRef(a[2], a[4])) != cod.canon(PointRef(b[2], b[3])):
                    raise SpecError(f"map jumps on edge {eid} at {fmt(s0)}", *_mark(rn), path)
        pieces[eid] = plist
    missing = set(dom.edge_ids) - set(pieces)
    if missing:
        raise SpecError(f"no pieces for edges {sorted(missing)}", *_mark(node), path)
    try:
        return PLMap(dom, cod, pieces)
    except (DiscontinuousMap, GraphError, ValueError) as exc:
        raise SpecError(f"invalid map: {exc}", *_mark(node), path) from None


def load_map(path) -> PLMap:
    with open(path, encoding="utf-8") as fh:
        return parse_map(fh.read(), str(path))


# -- certificates -------------------------------------------------------------------


def plain(obj):
    """Convert witnesses to YAML-safe builtins deterministically."""
    if isinstance(obj, Certificate):
        return certificate_to_data(obj)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, PointRef):
        return point_to_data(obj)
    if isinstance(obj, Fraction) or type(obj).__name__ == "mpq":
        return fmt(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def certificate_to_data(c: Certificate) -> dict:
    return {
        "kind": c.kind,
        "verdict": c.verdict,
        "ok": bool(c.ok),
        "resolution": plain(c.resolution),
        "witnesses": plain(c.witnesses),
        "failures": plain(c.failures),
    }


def dump_certificates(certs, timestamp: bool = True) -> str:
    """Certificate document: one header comment line (the only varying line),
    then a schema tag and the certificates in order."""
    when = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds") if timestamp else "-"
    body = {"schema": CERT_SCHEMA, "certificates": [certificate_to_data(c) for c in certs]}
    return f"# generated {when}\n" + yaml.safe_dump(body, sort_keys=False, default_flow_style=None, width=100)


def load_certificates(text: str) -> list:
    data = yaml.safe_load(text)
    if not isinstance(data, dict) or data.get("schema") != CERT_SCHEMA:
        raise SpecError(f"expected schema {CERT_SCHEMA!r}")
    return data["certificates"]
