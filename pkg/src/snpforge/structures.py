"""Finite relational structures over dense integer domains, plus homomorphism search."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .logic import RelationSymbol, Signature

Tuple = tuple[int, ...]


class StructureError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """A search ran out of nodes; distinct from a negative answer."""

    def __init__(self, nodes: int, what: str = "search"):
        self.nodes = nodes
        super().__init__(f"{what} exceeded budget after {nodes} nodes")


@dataclass(frozen=True)
class Structure:
    signature: Signature
    domain_size: int
    relations: Mapping[str, frozenset]

    def __post_init__(self):
        if self.domain_size < 0:
            raise StructureError("domain size must be nonnegative")
        rels = {}
        for sym in self.signature:
            tuples = frozenset(tuple(t) for t in self.relations.get(sym.name, ()))
            for t in tuples:
                if len(t) != sym.arity:
                    raise StructureError(f"arity mismatch: {sym.name}{t} for {sym.name}/{sym.arity}")
                for e in t:
                    if not 0 <= e < self.domain_size:
                        raise StructureError(f"element {e} out of range in {sym.name}{t}")
            rels[sym.name] = tuples
        extra = set(self.relations) - set(rels)
        if extra:
            raise StructureError(f"relations for undeclared symbols: {sorted(extra)}")
        object.__setattr__(self, "relations", rels)

    def __hash__(self):
        return hash((self.signature, self.domain_size, tuple(sorted((k, tuple(sorted(v))) for k, v in self.relations.items()))))

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.domain_size == other.domain_size
            and self.relations == other.relations
        )

    def __getitem__(self, name: str) -> frozenset:
        return self.relations[name]

    @classmethod
    def build(cls, signature: Signature, domain_size: int, **relations: Iterable[Sequence[int]]) -> "Structure":
        return cls(signature, domain_size, {k: frozenset(tuple(t) for t in v) for k, v in relations.items()})

    def tuple_count(self) -> int:
        return sum(len(v) for v in self.relations.values())


def empty_structure(signature: Signature, domain_size: int = 0) -> Structure:
    return Structure(signature, domain_size, {})


def parse_structure(text: str, signature: Signature | None = None) -> Structure:
    """Parse "domain N; R(0,1); ...".

    Without an explicit signature, symbols and arities are inferred from use.
    """
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    stmts = [s.strip() for s in body.split(";")]
    if stmts and stmts[-1] == "":
        stmts.pop()
    if not stmts:
        raise StructureError("missing 'domain N;' header")
    head = stmts[0].split()
    if len(head) != 2 or head[0] != "domain" or not head[1].isdigit():
        raise StructureError(f"expected 'domain N', found {stmts[0]!r}")
    n = int(head[1])
    rels: dict[str, set] = {}
    arities: dict[str, int] = {}
    for stmt in stmts[1:]:
        m = re.fullmatch(r"([A-Za-z][A-Za-z0-9_]*)\s*\(([^)]*)\)", stmt)
        if not m:
            raise StructureError(f"bad tuple statement {stmt!r}")
        name, argtext = m.group(1), m.group(2)
        try:
            t = tuple(int(a) for a in argtext.split(","))
        except ValueError:
            raise StructureError(f"non-integer element in {stmt!r}") from None
        if name in arities and arities[name] != len(t):
            raise StructureError(f"arity mismatch for {name} in {stmt!r}")
        arities.setdefault(name, len(t))
        for e in t:
            if not 0 <= e < n:
                raise StructureError(f"element {e} out of range in {stmt!r}")
        rels.setdefault(name, set()).add(t)
    if signature is None:
        signature = Signature(tuple(RelationSymbol(k, a) for k, a in arities.items()))
    else:
        for name, a in arities.items():
            if name not in signature:
                raise StructureError(f"undeclared symbol {name}")
            if signature[name].arity != a:
                raise StructureError(f"arity mismatch for {name}: expected {signature[name].arity}")
    return Structure(signature, n, {k: frozenset(v) for k, v in rels.items()})


def render_structure(a: Structure) -> str:
    parts = [f"domain {a.domain_size};"]
    for sym in a.signature:
        for t in sorted(a.relations[sym.name]):
            parts.append(f"{sym.name}({','.join(map(str, t))});")
    return " ".join(parts)


def with_signature(a: Structure, signature: Signature) -> Structure:
    """Reinterpret over a larger signature (new symbols empty)."""
    return Structure(signature, a.domain_size, {k: v for k, v in a.relations.items() if k in signature})


# ----------------------------------------------------------- homomorphisms


def is_homomorphism(a: Structure, b: Structure, mapping: Sequence[int]) -> bool:
    if len(mapping) != a.domain_size:
        return False
    for sym in a.signature:
        target = b.relations.get(sym.name, frozenset())
        for t in a.relations[sym.name]:
            if tuple(mapping[e] for e in t) not in target:
                return False
    return True


def homomorphism_exists(
    a: Structure, b: Structure, injective: bool = False, max_nodes: int = 10**7
) -> tuple[int, ...] | None:
    """First homomorphism in (source ascending, target ascending) order, or None.

    Raises BudgetExceeded if more than max_nodes partial assignments are tried.
    """
    if a.signature.names != b.signature.names:
        missing = set(a.signature.names) - set(b.signature.names)
        if missing:
            raise StructureError(f"signature mismatch: {sorted(missing)}")
    n, m = a.domain_size, b.domain_size
    if injective and n > m:
        return None
    # constraints checked as soon as the last element of a tuple is assigned
    due: list[list[tuple[str, Tuple]]] = [[] for _ in range(n)]
    for sym in a.signature:
        for t in a.relations[sym.name]:
            due[max(t)].append((sym.name, t))
    mapping = [0] * n
    used = [False] * m
    nodes = 0

    def extend(i: int) -> bool:
        nonlocal nodes
        if i == n:
            return True
        for v in range(m):
            if injective and used[v]:
                continue
            nodes += 1
            if nodes > max_nodes:
                raise BudgetExceeded(nodes, "homomorphism search")
            mapping[i] = v
            if all(tuple(mapping[e] for e in t) in b.relations[r] for r, t in due[i]):
                used[v] = True
                if extend(i + 1):
                    return True
                used[v] = False
        return False

    return tuple(mapping) if extend(0) else None


# ------------------------------------------------------- building blocks


def disjoint_union(parts: Sequence[Structure], signature: Signature | None = None) -> Structure:
    if not parts:
        return empty_structure(signature or Signature())
    sig = parts[0].signature
    for p in parts[1:]:
        if p.signature != sig:
            raise StructureError("disjoint union of structures over different signatures")
    rels: dict[str, set] = {s.name: set() for s in sig}
    offset = 0
    for p in parts:
        for name, tuples in p.relations.items():
            rels[name].update(tuple(e + offset for e in t) for t in tuples)
        offset += p.domain_size
    return Structure(sig, offset, {k: frozenset(v) for k, v in rels.items()})


def reduct(a: Structure, keep: Signature) -> Structure:
    for s in keep:
        if s.name not in a.signature:
            raise StructureError(f"unknown symbol {s.name}")
    return Structure(keep, a.domain_size, {s.name: a.relations[s.name] for s in keep})


def induced_substructure(a: Structure, subset: Iterable[int]) -> Structure:
    keep = sorted(set(subset))
    for e in keep:
        if not 0 <= e < a.domain_size:
            raise StructureError(f"element {e} out of range")
    index = {e: i for i, e in enumerate(keep)}
    rels = {
        name: frozenset(tuple(index[e] for e in t) for t in tuples if all(e in index for e in t))
        for name, tuples in a.relations.items()
    }
    return Structure(a.signature, len(keep), rels)


def singleton_structure(sig: Signature, r: RelationSymbol | str) -> Structure:
    """One r-tuple (0, 1, ..., arity-1); every other relation empty."""
    sym = sig[r if isinstance(r, str) else r.name]
    return Structure(sig, sym.arity, {sym.name: frozenset({tuple(range(sym.arity))})})


def all_structures(sig: Signature, size: int):
    """Every structure over sig with the given domain size (exponential; desk scale)."""
    from itertools import product

    slots = [(s.name, t) for s in sig for t in product(range(size), repeat=s.arity)]
    for bits in product((False, True), repeat=len(slots)):
        rels: dict[str, set] = {s.name: set() for s in sig}
        for (name, t), b in zip(slots, bits):
            if b:
                rels[name].add(t)
        yield Structure(sig, size, {k: frozenset(v) for k, v in rels.items()})
