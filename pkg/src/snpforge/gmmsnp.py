"""Inequality elimination for monadic sentences with guarded inequalities.

Every input atom R(x1..xn) is replaced by a derived atom R__k over the distinct
variables of the tuple, where k names the equality pattern of (x1..xn). Guarded
inequalities are first made explicit for every co-occurring pair, after which
they carry no information beyond the pattern and can be dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, islice

from .checker import Budget, sat_bool
from .logic import (
    Atom,
    Inequality,
    Lit,
    NegatedConjunct,
    RelationSymbol,
    Signature,
    SnpSentence,
    classify,
)
from .structures import Structure, all_structures

MAX_ARITY = 6


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class EquivalenceType:
    n: int
    classes: tuple[tuple[int, ...], ...]  # 1-based positions, ordered by least member
    index: int

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def class_of(self, position: int) -> int:
        """0-based rank of the class holding a 1-based position."""
        for r, cls in enumerate(self.classes):
            if position in cls:
                return r
        raise IndexError(position)

    def render(self) -> str:
        return "".join("{" + ",".join(map(str, c)) + "}" for c in self.classes)


def _growth_strings(n: int):
    def rec(prefix: list[int], top: int):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for v in range(top + 2):
            yield from rec(prefix + [v], max(top, v))

    yield from rec([0], 0)


def _from_rgs(rgs: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    k = max(rgs) + 1
    return tuple(tuple(i + 1 for i, b in enumerate(rgs) if b == c) for c in range(k))


_TYPE_CACHE: dict[int, tuple[EquivalenceType, ...]] = {}


def enumerate_equivalence_types(n: int, max_arity: int = MAX_ARITY) -> tuple[EquivalenceType, ...]:
    """All set partitions of {1..n}: most classes first, ties in growth-string order."""
    if n < 1:
        raise TransformError("arity must be positive")
    if n > max_arity:
        raise TransformError(f"arity {n} exceeds cap {max_arity}")
    if n not in _TYPE_CACHE:
        strings = sorted(_growth_strings(n), key=lambda r: (-(max(r) + 1), r))
        _TYPE_CACHE[n] = tuple(EquivalenceType(n, _from_rgs(r), i + 1) for i, r in enumerate(strings))
    return _TYPE_CACHE[n]


def equivalence_type_of(t) -> EquivalenceType:
    if not t:
        raise TransformError("empty tuple has no equivalence type")
    first: dict = {}
    rgs = []
    for x in t:
        rgs.append(first.setdefault(x, len(first)))
    classes = _from_rgs(tuple(rgs))
    for et in enumerate_equivalence_types(len(t), max(len(t), MAX_ARITY)):
        if et.classes == classes:
            return et
    raise AssertionError("partition missing from enumeration")


def project_p(t) -> tuple:
    """Keep the first occurrence of each entry."""
    return tuple(dict.fromkeys(t))


def expand_p(et: EquivalenceType, short) -> tuple:
    """Inverse of project_p for a known pattern."""
    return tuple(short[et.class_of(i)] for i in range(1, et.n + 1))


# ------------------------------------------------------------ signatures


def derived_name(source: str, k: int) -> str:
    return f"{source}__{k}"


@dataclass(frozen=True)
class DerivedSignature:
    source: RelationSymbol
    types: tuple[EquivalenceType, ...]

    @property
    def symbols(self) -> tuple[RelationSymbol, ...]:
        return tuple(RelationSymbol(derived_name(self.source.name, t.index), t.class_count) for t in self.types)

    def symbol_for(self, et: EquivalenceType) -> str:
        return derived_name(self.source.name, et.index)

    def type_of_symbol(self, name: str) -> EquivalenceType:
        prefix = self.source.name + "__"
        if not name.startswith(prefix):
            raise KeyError(name)
        return self.types[int(name[len(prefix):]) - 1]

    def export(self) -> list[str]:
        return [f"{self.symbol_for(t)} <- {self.source.name} : {t.render()}" for t in self.types]


def derive_signature(tau: Signature, max_arity: int = MAX_ARITY) -> dict[str, DerivedSignature]:
    return {s.name: DerivedSignature(s, enumerate_equivalence_types(s.arity, max_arity)) for s in tau}


def derived_tau(derived: dict[str, DerivedSignature]) -> Signature:
    return Signature(tuple(sym for d in derived.values() for sym in d.symbols))


def export_derived(derived: dict[str, DerivedSignature]) -> str:
    return "\n".join(line for d in derived.values() for line in d.export()) + "\n"


# -------------------------------------------------------- sentence maps


def _require_gmmsnp(phi: SnpSentence) -> None:
    rep = classify(phi)
    if not rep.is_gmmsnp_ineq:
        raise TransformError(f"not a GMMSNP≠ sentence: {rep.witnesses['is_gmmsnp_ineq'].reason}")


def _open_pair(c: NegatedConjunct) -> tuple[str, str] | None:
    have = {e.key() for e in c.inequalities}
    order = c.variables()
    rank = {v: i for i, v in enumerate(order)}
    best = None
    for l in c.tau_literals:
        for x, y in combinations(sorted(set(l.atom.args), key=rank.__getitem__), 2):
            if frozenset((x, y)) not in have:
                cand = (rank[x], rank[y])
                if best is None or cand < best:
                    best = cand
    return None if best is None else (order[best[0]], order[best[1]])


def enrich_inequalities(phi: SnpSentence) -> SnpSentence:
    """Split conjuncts until every pair sharing an input atom carries an inequality."""
    _require_gmmsnp(phi)
    done: list[NegatedConjunct] = []
    work = list(phi.conjuncts)
    while work:
        c = work.pop(0)
        pair = _open_pair(c)
        if pair is None:
            done.append(c)
            continue
        x, y = pair
        work.append(NegatedConjunct(c.tau_literals, c.sigma_literals, c.inequalities + (Inequality(x, y),)))
        work.append(c.rename({y: x}))
    return phi.with_conjuncts(done)


def _rigidity_conjuncts(derived: dict[str, DerivedSignature]) -> list[NegatedConjunct]:
    out = []
    for d in derived.values():
        for t in d.types:
            m = t.class_count
            for i, j in combinations(range(m), 2):
                args = [f"x{p + 1}" for p in range(m)]
                args[j] = args[i]
                out.append(NegatedConjunct((Lit(Atom(d.symbol_for(t), tuple(args))),)))
    return out


def to_mmsnp(phi: SnpSentence, max_arity: int = MAX_ARITY) -> SnpSentence:
    psi = enrich_inequalities(phi)
    derived = derive_signature(phi.input_sig, max_arity)
    conjuncts = []
    for c in psi.conjuncts:
        tau = []
        for l in c.tau_literals:
            et = equivalence_type_of(l.atom.args)
            tau.append(Lit(Atom(derived[l.atom.symbol].symbol_for(et), project_p(l.atom.args)), l.positive))
        conjuncts.append(NegatedConjunct(tuple(tau), c.sigma_literals, ()))
    conjuncts += _rigidity_conjuncts(derived)
    return SnpSentence(derived_tau(derived), phi.existential_sig, tuple(conjuncts))


# -------------------------------------------------------- instance maps


@dataclass(frozen=True)
class FixedNo:
    """Marker: the instance must be replaced by a fixed non-satisfying structure."""

    reason: str


def structure_forward(a: Structure, max_arity: int = MAX_ARITY) -> Structure:
    derived = derive_signature(a.signature, max_arity)
    rels: dict[str, set] = {s.name: set() for s in derived_tau(derived)}
    for name, tuples in a.relations.items():
        for t in tuples:
            rels[derived[name].symbol_for(equivalence_type_of(t))].add(project_p(t))
    return Structure(derived_tau(derived), a.domain_size, {k: frozenset(v) for k, v in rels.items()})


def structure_backward(a1: Structure, tau: Signature, max_arity: int = MAX_ARITY) -> Structure | FixedNo:
    derived = derive_signature(tau, max_arity)
    rels: dict[str, set] = {s.name: set() for s in tau}
    for d in derived.values():
        for et in d.types:
            name = d.symbol_for(et)
            for t in sorted(a1.relations.get(name, ())):
                if len(set(t)) != len(t):
                    return FixedNo(f"{name}{t} repeats an element")
                rels[d.source.name].add(expand_p(et, t))
    return Structure(tau, a1.domain_size, {k: frozenset(v) for k, v in rels.items()})


def find_fixed_instances(
    phi: SnpSentence, bound: int = 3, limit: int = 20000, budget: Budget | None = None
) -> tuple[Structure, Structure]:
    """First satisfying and first non-satisfying structure by exhaustive search up to bound.

    Raises TransformError when either kind is absent (the sentence looks trivial).
    """
    yes = no = None
    seen = 0
    for size in range(bound + 1):
        for a in islice(all_structures(phi.input_sig, size), limit):
            seen += 1
            ok = sat_bool(phi, a, budget)
            if ok and yes is None:
                yes = a
            if not ok and no is None:
                no = a
            if yes is not None and no is not None:
                return yes, no
    missing = "NO" if no is None else "YES"
    raise TransformError(f"no {missing} instance among {seen} structures of size <= {bound}; sentence looks trivial")


def reduce_backward(phi: SnpSentence, a1: Structure, fixed_no: Structure | None = None) -> Structure:
    """Map a derived-signature structure to an equisatisfiable input structure."""
    back = structure_backward(a1, phi.input_sig)
    if isinstance(back, FixedNo):
        return fixed_no if fixed_no is not None else find_fixed_instances(phi)[1]
    return back
