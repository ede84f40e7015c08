"""Typed heterogeneous information network, meta-paths and supervision pairs."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import (
    AsymmetricPath,
    AttributeRowMismatch,
    ContradictoryConstraint,
    DanglingEndpoint,
    DuplicateId,
    MalformedRecord,
    NoSuchLinkType,
    NonFiniteValue,
    SelfPair,
    UnknownLinkType,
    UnknownObject,
    UnknownType,
    WrongObjectType,
)


def link_key(a: str, b: str) -> tuple[str, str]:
    """Canonical (sorted) key of the undirected link type between ``a`` and ``b``."""
    return (a, b) if a <= b else (b, a)


def iter_records(text: str) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line_number, fields)`` for every non-blank, non-comment line.

    Fields are tab separated; runs of other whitespace are accepted as a
    fallback so hand-written files still parse.
    """
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split("\t") if "\t" in line else line.split()
        yield lineno, [f.strip() for f in fields]


@dataclass(frozen=True)
class NetworkSchema:
    object_types: tuple[str, ...]
    link_types: frozenset[tuple[str, str]]

    def __post_init__(self):
        types = tuple(self.object_types)
        if any(not t or not isinstance(t, str) for t in types):
            raise UnknownType("object type names must be non-empty strings")
        if len(set(types)) != len(types):
            raise DuplicateId(f"duplicate object type in schema: {types}")
        links = frozenset(link_key(*pair) for pair in self.link_types)
        for a, b in links:
            for t in (a, b):
                if t not in types:
                    raise UnknownType(f"link type {a}-{b} references undeclared type {t!r}")
        object.__setattr__(self, "object_types", types)
        object.__setattr__(self, "link_types", links)

    def has_link(self, a: str, b: str) -> bool:
        return link_key(a, b) in self.link_types


@dataclass(frozen=True, eq=False)
class Hin:
    """An immutable attributed HIN.

    ``links`` maps a canonical type pair to a sparse 0/1 ``int64`` incidence
    matrix of shape ``(n_a, n_b)`` (rows follow the first type of the key).
    """

    schema: NetworkSchema
    objects: Mapping[str, tuple[str, ...]]
    links: Mapping[tuple[str, str], sp.csr_matrix]
    attributes: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "objects", MappingProxyType(dict(self.objects)))
        object.__setattr__(self, "links", MappingProxyType(dict(self.links)))
        attrs = {}
        for t, a in self.attributes.items():
            a = np.array(a, dtype=np.float64)
            a.setflags(write=False)
            attrs[t] = a
        object.__setattr__(self, "attributes", MappingProxyType(attrs))
        index = {t: {oid: i for i, oid in enumerate(ids)} for t, ids in self.objects.items()}
        object.__setattr__(self, "_index", index)

    def n(self, object_type: str) -> int:
        return len(self.objects.get(object_type, ()))

    def index(self, object_type: str) -> Mapping[str, int]:
        if object_type not in self.schema.object_types:
            raise UnknownType(f"unknown object type {object_type!r}")
        return self._index.get(object_type, {})

    def type_of(self, object_id: str) -> str | None:
        for t, idx in self._index.items():
            if object_id in idx:
                return t
        return None

    def incidence(self, a: str, b: str) -> sp.csr_matrix:
        """Incidence matrix oriented as ``(n_a, n_b)``."""
        key = link_key(a, b)
        if key not in self.schema.link_types:
            raise UnknownLinkType(f"no link type {a}-{b} in schema")
        m = self.links.get(key)
        if m is None:
            m = sp.csr_matrix((self.n(key[0]), self.n(key[1])), dtype=np.int64)
        return m if key == (a, b) else m.T.tocsr()

    def num_edges(self) -> int:
        total = 0
        for (a, b), m in self.links.items():
            if a == b:
                total += int(sp.triu(m).nnz)
            else:
                total += int(m.nnz)
        return total


def infer_schema(node_text: str, edge_text: str) -> NetworkSchema:
    """Schema with the node types in first-appearance order and every link type seen in the edges."""
    types: list[str] = []
    id_type: dict[str, str] = {}
    for row, fields in iter_records(node_text):
        if len(fields) != 2:
            raise MalformedRecord("node record needs <id>\\t<type>", row)
        oid, t = fields
        if t not in types:
            types.append(t)
        id_type.setdefault(oid, t)
    links = set()
    for row, fields in iter_records(edge_text):
        if len(fields) != 2:
            raise MalformedRecord("edge record needs <id_src>\\t<id_dst>", row)
        for oid in fields:
            if oid not in id_type:
                raise DanglingEndpoint(f"edge endpoint {oid!r} is not a declared node", row)
        links.add(link_key(id_type[fields[0]], id_type[fields[1]]))
    return NetworkSchema(tuple(types), frozenset(links))


def _parse_float(tok: str, row: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise MalformedRecord(f"not a number: {tok!r}", row) from None
    if not math.isfinite(v):
        raise NonFiniteValue(f"non-finite attribute value {tok!r}", row)
    return v


def parse_hin(
    node_text: str,
    edge_text: str,
    attribute_tables: Mapping[str, str] | None = None,
    schema: NetworkSchema | None = None,
) -> Hin:
    """Parse the node/edge/attribute text tables into a validated :class:`Hin`.

    Object identifiers must be unique across the whole network, because
    edge endpoint types are inferred from the identifiers. Objects are
    indexed per type in first-appearance order.
    """
    if schema is None:
        schema = infer_schema(node_text, edge_text)

    objects: dict[str, list[str]] = {t: [] for t in schema.object_types}
    id_type: dict[str, str] = {}
    id_index: dict[str, int] = {}
    for row, fields in iter_records(node_text):
        if len(fields) != 2:
            raise MalformedRecord("node record needs <id>\\t<type>", row)
        oid, t = fields
        if t not in objects:
            raise UnknownType(f"unknown object type {t!r}", row)
        if oid in id_type:
            raise DuplicateId(f"duplicate object id {oid!r}", row)
        id_type[oid] = t
        id_index[oid] = len(objects[t])
        objects[t].append(oid)

    coords: dict[tuple[str, str], tuple[list[int], list[int]]] = {}
    for row, fields in iter_records(edge_text):
        if len(fields) != 2:
            raise MalformedRecord("edge record needs <id_src>\\t<id_dst>", row)
        for oid in fields:
            if oid not in id_type:
                raise DanglingEndpoint(f"edge endpoint {oid!r} is not a declared node", row)
        u, v = fields
        tu, tv = id_type[u], id_type[v]
        key = link_key(tu, tv)
        if key not in schema.link_types:
            raise UnknownLinkType(f"edge {u}-{v} has undeclared link type {tu}-{tv}", row)
        iu, iv = id_index[u], id_index[v]
        if (tu, tv) != key:
            iu, iv = iv, iu
        rows, cols = coords.setdefault(key, ([], []))
        rows.append(iu)
        cols.append(iv)
        if key[0] == key[1] and iu != iv:
            rows.append(iv)
            cols.append(iu)

    links = {}
    for key in sorted(schema.link_types):
        rows, cols = coords.get(key, ([], []))
        shape = (len(objects[key[0]]), len(objects[key[1]]))
        m = sp.coo_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=shape).tocsr()
        # duplicate edges collapse to a single 0/1 link
        m.data[:] = 1
        m.eliminate_zeros()
        m.sort_indices()
        links[key] = m

    attributes = {}
    for t, text in (attribute_tables or {}).items():
        if t not in objects:
            raise UnknownType(f"attribute table for unknown type {t!r}")
        attributes[t] = _parse_attribute_table(text, t, objects[t], id_index, id_type)

    return Hin(schema, {t: tuple(ids) for t, ids in objects.items()}, links, attributes)


def _parse_attribute_table(text, t, ids, id_index, id_type) -> np.ndarray:
    records = list(iter_records(text))
    if len(records) != len(ids):
        raise AttributeRowMismatch(
            f"attribute table for type {t!r} has {len(records)} rows but {len(ids)} objects"
        )
    width = None
    table = np.zeros((len(ids), 0))
    seen = set()
    for row, fields in records:
        oid, values = fields[0], fields[1:]
        if id_type.get(oid) != t:
            raise UnknownObject(f"attribute row for {oid!r}, not an object of type {t!r}", row)
        if oid in seen:
            raise DuplicateId(f"duplicate attribute row for {oid!r}", row)
        seen.add(oid)
        if width is None:
            width = len(values)
            table = np.zeros((len(ids), width))
        elif len(values) != width:
            raise MalformedRecord(f"expected {width} attribute values, got {len(values)}", row)
        table[id_index[oid]] = [_parse_float(tok, row) for tok in values]
    return table


def format_hin(hin: Hin) -> tuple[str, str, dict[str, str]]:
    """Serialize to ``(nodes, edges, {type: attrs})`` texts accepted by :func:`parse_hin`."""
    nodes = "".join(f"{oid}\t{t}\n" for t in hin.schema.object_types for oid in hin.objects[t])
    edges = []
    for (a, b), m in sorted(hin.links.items()):
        coo = (sp.triu(m) if a == b else m).tocoo()
        order = np.lexsort((coo.col, coo.row))
        for i, j in zip(coo.row[order], coo.col[order]):
            edges.append(f"{hin.objects[a][i]}\t{hin.objects[b][j]}\n")
    attrs = {}
    for t, table in hin.attributes.items():
        attrs[t] = "".join(
            oid + "".join(f"\t{float(v)!r}" for v in table[i]) + "\n"
            for i, oid in enumerate(hin.objects[t])
        )
    return nodes, "".join(edges), attrs


@dataclass(frozen=True)
class MetaPath:
    type_sequence: tuple[str, ...]

    def __str__(self) -> str:
        return "-".join(self.type_sequence)

    @property
    def target_type(self) -> str:
        return self.type_sequence[0]

    def __len__(self) -> int:
        return len(self.type_sequence)


def validate_metapath(
    types: str | Sequence[str], schema: NetworkSchema, symmetric: bool = True
) -> MetaPath:
    """Check a hyphen-joined (or listed) type sequence against ``schema``.

    With ``symmetric=True`` the sequence must read the same in both
    directions, which is what makes its commuting matrix symmetric.
    """
    seq = tuple(s.strip() for s in types.split("-")) if isinstance(types, str) else tuple(types)
    if len(seq) < 2:
        raise MalformedRecord(f"meta-path {'-'.join(seq)!r} needs at least two types")
    for t in seq:
        if t not in schema.object_types:
            raise UnknownType(f"unknown object type {t!r} in meta-path")
    for pos, (a, b) in enumerate(zip(seq, seq[1:])):
        if not schema.has_link(a, b):
            raise NoSuchLinkType(f"no link type {a}-{b} at position {pos}", position=pos)
    if symmetric and seq != seq[::-1]:
        raise AsymmetricPath(f"meta-path {'-'.join(seq)} is not symmetric")
    return MetaPath(seq)


def parse_metapaths(text: str, schema: NetworkSchema) -> list[MetaPath]:
    return [validate_metapath(fields[0], schema) for _, fields in iter_records(text)]


@dataclass(frozen=True)
class ConstraintSet:
    """Must-link / cannot-link pairs as sorted target-type index pairs."""

    must_link: frozenset[tuple[int, int]] = frozenset()
    cannot_link: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        ml = frozenset(_ordered_pair(u, v) for u, v in self.must_link)
        cl = frozenset(_ordered_pair(u, v) for u, v in self.cannot_link)
        both = ml & cl
        if both:
            raise ContradictoryConstraint(f"pairs both must-link and cannot-link: {sorted(both)}")
        object.__setattr__(self, "must_link", ml)
        object.__setattr__(self, "cannot_link", cl)

    def __bool__(self) -> bool:
        return bool(self.must_link or self.cannot_link)


def _ordered_pair(u: int, v: int, row: int | None = None) -> tuple[int, int]:
    if u == v:
        raise SelfPair(f"self-pair ({u}, {v})", row)
    return (u, v) if u < v else (v, u)


def parse_constraints(text: str, hin: Hin, target_type: str) -> ConstraintSet:
    index = hin.index(target_type)
    sets: dict[str, set] = {"ML": set(), "CL": set()}
    where: dict[tuple[int, int], tuple[str, int]] = {}
    for row, fields in iter_records(text):
        if len(fields) != 3 or fields[0].upper() not in sets:
            raise MalformedRecord("constraint record needs <ML|CL>\\t<id_u>\\t<id_v>", row)
        kind = fields[0].upper()
        idx = []
        for oid in fields[1:]:
            if oid not in index:
                if hin.type_of(oid) is not None:
                    raise WrongObjectType(f"{oid!r} is not of target type {target_type!r}", row)
                raise UnknownObject(f"unknown object id {oid!r}", row)
            idx.append(index[oid])
        pair = _ordered_pair(idx[0], idx[1], row)
        prev = where.get(pair)
        if prev is not None and prev[0] != kind:
            raise ContradictoryConstraint(
                f"pair {fields[1]}-{fields[2]} is both ML and CL (first seen on row {prev[1]})", row
            )
        where.setdefault(pair, (kind, row))
        sets[kind].add(pair)
    return ConstraintSet(frozenset(sets["ML"]), frozenset(sets["CL"]))


def constraint_pairs(cs: ConstraintSet) -> Iterable[tuple[int, int, int]]:
    for u, v in sorted(cs.must_link):
        yield u, v, 1
    for u, v in sorted(cs.cannot_link):
        yield u, v, -1
