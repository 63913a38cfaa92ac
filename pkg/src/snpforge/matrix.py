"""Matrix partition problems on loopless digraphs and their sentence encoding."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .checker import Budget, sat_bool
from .logic import Inequality, NegatedConjunct, Signature, SnpSentence, neg, pos
from .structures import Structure, all_structures, homomorphism_exists

ENTRIES = ("0", "1", "*")
EDGE = "E"
MAX_VERTICES = 12


class MatrixError(ValueError):
    pass


@dataclass(frozen=True)
class PartitionMatrix:
    entries: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        s = len(self.entries)
        if s < 1:
            raise MatrixError("matrix needs at least one class")
        for row in self.entries:
            if len(row) != s:
                raise MatrixError("matrix must be square")
            for e in row:
                if e not in ENTRIES:
                    raise MatrixError(f"entry {e!r} not in {{0,1,*}}")

    @property
    def s(self) -> int:
        return len(self.entries)

    @classmethod
    def of(cls, rows) -> "PartitionMatrix":
        return cls(tuple(tuple(str(e).replace("⋆", "*") for e in r) for r in rows))

    def render(self) -> str:
        return f"matrix {self.s}; " + " ".join("row " + " ".join(r) + ";" for r in self.entries)


def parse_matrix(text: str) -> PartitionMatrix:
    stmts = [s.split() for s in text.split(";") if s.strip()]
    if not stmts or stmts[0][0] != "matrix" or len(stmts[0]) != 2:
        raise MatrixError("expected 'matrix s;' header")
    s = int(stmts[0][1])
    rows = []
    for st in stmts[1:]:
        if st[0] != "row":
            raise MatrixError(f"expected 'row', found {st[0]!r}")
        rows.append(tuple(st[1:]))
    if len(rows) != s:
        raise MatrixError(f"header says {s} rows, found {len(rows)}")
    return PartitionMatrix(tuple(rows))


def graph_signature() -> Signature:
    return Signature.of((EDGE, 2))


def m_partition_check(g: Structure, m: PartitionMatrix, max_vertices: int = MAX_VERTICES) -> bool:
    edges = g.relations[EDGE]
    n = g.domain_size
    if any(a == b for a, b in edges):
        raise MatrixError("graph has a loop")
    if n > max_vertices:
        raise MatrixError(f"{n} vertices exceeds the brute-force cap {max_vertices}")
    cls = [0] * n

    def fits(v: int, i: int) -> bool:
        for u in range(v):
            j = cls[u]
            for (x, cx), (y, cy) in (((v, i), (u, j)), ((u, j), (v, i))):
                entry = m.entries[cx][cy]
                if entry == "0" and (x, y) in edges:
                    return False
                if entry == "1" and (x, y) not in edges:
                    return False
        return True

    def place(v: int) -> bool:
        if v == n:
            return True
        for i in range(m.s):
            if fits(v, i):
                cls[v] = i
                if place(v + 1):
                    return True
        return False

    return place(0)


def class_symbol(i: int) -> str:
    return f"X{i + 1}"


def matrix_to_sentence(m: PartitionMatrix) -> SnpSentence:
    s = m.s
    tau = graph_signature()
    sigma = Signature.of(*[(class_symbol(i), 1) for i in range(s)], kind="existential")
    conj = [NegatedConjunct((), tuple(neg(class_symbol(i), "x") for i in range(s)))]
    for i in range(s):
        for j in range(i + 1, s):
            conj.append(NegatedConjunct((), (pos(class_symbol(i), "x"), pos(class_symbol(j), "x"))))
    ne = (Inequality("x", "y"),)
    for i in range(s):
        for j in range(s):
            entry = m.entries[i][j]
            if entry == "*":
                continue
            edge = pos(EDGE, "x", "y") if entry == "0" else neg(EDGE, "x", "y")
            conj.append(NegatedConjunct((edge,), (pos(class_symbol(i), "x"), pos(class_symbol(j), "y")), ne))
    return SnpSentence(tau, sigma, tuple(conj))


def loopless_digraphs(n: int):
    sig = graph_signature()
    for g in all_structures(sig, n):
        if not any(a == b for a, b in g.relations[EDGE]):
            yield g


def relabel(g: Structure, perm) -> Structure:
    return Structure(
        g.signature,
        g.domain_size,
        {k: frozenset(tuple(perm[e] for e in t) for t in v) for k, v in g.relations.items()},
    )


def isomorphic_copies(g: Structure):
    for perm in permutations(range(g.domain_size)):
        yield relabel(g, perm)


@dataclass(frozen=True)
class ProbeCounterexample:
    source: Structure  # fails the sentence
    target: Structure  # satisfies it
    mapping: tuple[int, ...]


def inverse_hom_probe(phi: SnpSentence, size_cap: int, budget: Budget | None = None) -> ProbeCounterexample | None:
    """First A -> B with B satisfying and A failing phi, over structures up to size_cap."""
    pool = [a for n in range(size_cap + 1) for a in all_structures(phi.input_sig, n)]
    verdicts = [sat_bool(phi, a, budget) for a in pool]
    yes = [b for b, v in zip(pool, verdicts) if v]
    for a, v in zip(pool, verdicts):
        if v:
            continue
        for b in yes:
            h = homomorphism_exists(a, b)
            if h is not None:
                return ProbeCounterexample(a, b, h)
    return None
