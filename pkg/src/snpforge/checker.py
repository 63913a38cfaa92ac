"""Finite model checking for sentences in negated-conjunct form.

Grounding joins each conjunct's positive input atoms against the structure; what
remains is a set of forbidden patterns over ground existential atoms, solved by
chronological backtracking with unit propagation.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .logic import Inequality, Lit, NegatedConjunct, SnpSentence
from .structures import Structure

SATISFIED = "satisfied"
UNSATISFIED = "unsatisfied"
BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class Budget:
    max_nodes: int = 10**7
    max_millis: int = 10_000

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_millis <= 0:
            raise ValueError("budget limits must be positive")


@dataclass
class Stats:
    nodes: int = 0
    conjunct_checks: int = 0
    propagations: int = 0
    ground_clauses: int = 0


@dataclass
class CheckResult:
    verdict: str
    witness: Structure | None = None
    stats: Stats = field(default_factory=Stats)

    @property
    def satisfied(self) -> bool:
        return self.verdict == SATISFIED

    def as_bool(self) -> bool | None:
        return {SATISFIED: True, UNSATISFIED: False}.get(self.verdict)


@dataclass(frozen=True)
class Violation:
    conjunct: int
    assignment: dict


class _OutOfBudget(Exception):
    pass


class _Clock:
    def __init__(self, budget: Budget, stats: Stats):
        self.budget = budget
        self.stats = stats
        self.deadline = time.monotonic() + budget.max_millis / 1000.0
        self._tick = 0

    def check(self) -> None:
        if self.stats.nodes > self.budget.max_nodes:
            raise _OutOfBudget
        self._tick += 1
        if self._tick & 0x3FF == 0 and time.monotonic() > self.deadline:
            raise _OutOfBudget


# ------------------------------------------------------------ matching


def _var_order(c: NegatedConjunct) -> tuple[str, ...]:
    return c.variables()


def _matches(
    order: Sequence[str],
    positive: Sequence[tuple[tuple[str, ...], frozenset]],
    negative: Sequence[tuple[tuple[str, ...], frozenset]],
    inequalities: Sequence[Inequality],
    n: int,
    clock: _Clock | None = None,
) -> Iterator[dict]:
    """Assignments order -> [0,n) in lexicographic order satisfying the given literals.

    positive: (args, tuples) that must hold; negative: (args, tuples) that must not.
    """
    depth = {v: i for i, v in enumerate(order)}
    k = len(order)
    # per level: lookups (positions of earlier vars, index) constraining the new var
    lookups: list[list[tuple[tuple[str, ...], dict]]] = [[] for _ in range(k)]
    for args, tuples in positive:
        pos_of: dict[str, list[int]] = {}
        for i, v in enumerate(args):
            pos_of.setdefault(v, []).append(i)
        consistent = [t for t in tuples if all(len({t[i] for i in ps}) == 1 for ps in pos_of.values())]
        vars_here = sorted(pos_of, key=depth.__getitem__)
        for j, v in enumerate(vars_here):
            earlier = tuple(vars_here[:j])
            index: dict[tuple, set] = {}
            for t in consistent:
                key = tuple(t[pos_of[u][0]] for u in earlier)
                index.setdefault(key, set()).add(t[pos_of[v][0]])
            lookups[depth[v]].append((earlier, index))
    checks: list[list] = [[] for _ in range(k)]
    for args, tuples in negative:
        last = max(depth[v] for v in args)
        checks[last].append(("neg", args, tuples))
    for e in inequalities:
        checks[max(depth[e.left], depth[e.right])].append(("ne", e.left, e.right))

    assign: dict[str, int] = {}
    full = range(n)

    def candidates(level: int) -> Sequence[int]:
        sets = []
        for earlier, index in lookups[level]:
            s = index.get(tuple(assign[u] for u in earlier))
            if not s:
                return ()
            sets.append(s)
        if not sets:
            return full
        sets.sort(key=len)
        cand = set(sets[0]).intersection(*sets[1:])
        return sorted(cand)

    def ok(level: int) -> bool:
        for chk in checks[level]:
            if chk[0] == "ne":
                if assign[chk[1]] == assign[chk[2]]:
                    return False
            elif tuple(assign[v] for v in chk[1]) in chk[2]:
                return False
        return True

    def rec(level: int) -> Iterator[dict]:
        if level == k:
            yield dict(assign)
            return
        v = order[level]
        for val in candidates(level):
            if clock is not None:
                clock.stats.conjunct_checks += 1
                clock.check()
            assign[v] = val
            if ok(level):
                yield from rec(level + 1)
        assign.pop(v, None)

    yield from rec(0)


def check_fo_part(expansion: Structure, phi: SnpSentence) -> Violation | None:
    """First (conjunct index, lexicographic assignment) making some conjunct true."""
    rel = expansion.relations
    for idx, c in enumerate(phi.conjuncts):
        lits = [*c.tau_literals, *c.sigma_literals]
        pos = [(l.atom.args, rel.get(l.atom.symbol, frozenset())) for l in lits if l.positive]
        negs = [(l.atom.args, rel.get(l.atom.symbol, frozenset())) for l in lits if not l.positive]
        for a in _matches(_var_order(c), pos, negs, c.inequalities, expansion.domain_size):
            return Violation(idx, a)
    return None


# ----------------------------------------------------------- grounding


def ground(phi: SnpSentence, a: Structure, clock: _Clock | None = None):
    """Ground clauses: each a tuple of ((symbol, elements), value) that must not all hold.

    Returns (clauses, atoms) or None if a conjunct is violated by the input part alone.
    """
    rel = a.relations
    clauses: dict[tuple, None] = {}
    for c in phi.conjuncts:
        pos = [(l.atom.args, rel[l.atom.symbol]) for l in c.tau_literals if l.positive]
        negs = [(l.atom.args, rel[l.atom.symbol]) for l in c.tau_literals if not l.positive]
        for asg in _matches(_var_order(c), pos, negs, c.inequalities, a.domain_size, clock):
            lits: dict[tuple, bool] = {}
            tautology = False
            for l in c.sigma_literals:
                key = (l.atom.symbol, tuple(asg[v] for v in l.atom.args))
                if lits.get(key, l.positive) != l.positive:
                    tautology = True
                    break
                lits[key] = l.positive
            if tautology:
                continue
            if not lits:
                return None
            clauses.setdefault(tuple(sorted(lits.items())), None)
    return list(clauses)


def _solve(phi: SnpSentence, a: Structure, clauses: list, clock: _Clock, stats: Stats):
    sym_rank = {s.name: i for i, s in enumerate(phi.existential_sig)}
    atoms = sorted({key for cl in clauses for key, _ in cl}, key=lambda k: (k[1], sym_rank[k[0]]))
    var_of = {key: i for i, key in enumerate(atoms)}
    nv = len(atoms)
    cls = [[(var_of[key], val) for key, val in cl] for cl in clauses]
    occ: list[list[tuple[int, bool]]] = [[] for _ in range(nv)]
    for ci, cl in enumerate(cls):
        for v, val in cl:
            occ[v].append((ci, val))
    matched = [0] * len(cls)
    falsified = [0] * len(cls)
    value: list[bool | None] = [None] * nv
    trail: list[int] = []
    queue: deque = deque()

    def assign(v: int, val: bool) -> bool:
        """Set v, update counters; enqueue forced literals. False on conflict."""
        value[v] = val
        trail.append(v)
        conflict = False
        for ci, want in occ[v]:
            if want == val:
                matched[ci] += 1
            else:
                falsified[ci] += 1
            if conflict or falsified[ci]:
                continue
            stats.conjunct_checks += 1
            size = len(cls[ci])
            if matched[ci] == size:
                conflict = True
            elif matched[ci] == size - 1:
                for u, w in cls[ci]:
                    if value[u] is None:
                        queue.append((u, not w))
                        break
        return not conflict

    def unassign_to(mark: int) -> None:
        while len(trail) > mark:
            v = trail.pop()
            val = value[v]
            for ci, want in occ[v]:
                if want == val:
                    matched[ci] -= 1
                else:
                    falsified[ci] -= 1
            value[v] = None

    def propagate() -> bool:
        while queue:
            v, val = queue.popleft()
            if value[v] is None:
                stats.propagations += 1
                if not assign(v, val):
                    queue.clear()
                    return False
            elif value[v] != val:
                queue.clear()
                return False
        return True

    # unit clauses at the root
    for cl in cls:
        if len(cl) == 1:
            queue.append((cl[0][0], not cl[0][1]))
    if not propagate():
        return None

    stack: list[tuple[int, bool, int]] = []  # (var, value tried, trail mark)
    ptr = 0
    while True:
        while ptr < nv and value[ptr] is not None:
            ptr += 1
        if ptr == nv:
            return [bool(x) for x in value]
        stats.nodes += 1
        clock.check()
        mark = len(trail)
        stack.append((ptr, False, mark))
        ok = assign(ptr, False) and propagate()
        while not ok:
            queue.clear()
            while stack and stack[-1][1]:
                _, _, m = stack.pop()
                unassign_to(m)
            if not stack:
                return None
            v, _, m = stack.pop()
            unassign_to(m)
            stats.nodes += 1
            clock.check()
            stack.append((v, True, m))
            ptr = v
            ok = assign(v, True) and propagate()
        ptr += 1
    # unreachable


def check_sat(phi: SnpSentence, a: Structure, budget: Budget | None = None) -> CheckResult:
    budget = budget or Budget()
    stats = Stats()
    clock = _Clock(budget, stats)
    try:
        clauses = ground(phi, a, clock)
        if clauses is None:
            return CheckResult(UNSATISFIED, None, stats)
        stats.ground_clauses = len(clauses)
        atoms = sorted({key for cl in clauses for key, _ in cl})
        values = _solve(phi, a, clauses, clock, stats)
    except _OutOfBudget:
        return CheckResult(BUDGET_EXCEEDED, None, stats)
    if values is None:
        return CheckResult(UNSATISFIED, None, stats)
    sym_rank = {s.name: i for i, s in enumerate(phi.existential_sig)}
    atoms.sort(key=lambda k: (k[1], sym_rank[k[0]]))
    sig = phi.input_sig.union(phi.existential_sig)
    rels: dict[str, set] = {s.name: set(a.relations[s.name]) for s in phi.input_sig}
    for s in phi.existential_sig:
        rels[s.name] = set()
    for key, val in zip(atoms, values):
        if val:
            rels[key[0]].add(key[1])
    witness = Structure(sig, a.domain_size, {k: frozenset(v) for k, v in rels.items()})
    return CheckResult(SATISFIED, witness, stats)


def sat_bool(phi: SnpSentence, a: Structure, budget: Budget | None = None) -> bool:
    """check_sat as a boolean; raises if the budget runs out."""
    r = check_sat(phi, a, budget)
    if r.verdict == BUDGET_EXCEEDED:
        raise RuntimeError("model checking exceeded its budget")
    return r.satisfied


@dataclass(frozen=True)
class InstanceVerdict:
    index: int
    phi: str
    psi: str
    agree: bool | None  # None when either side ran out of budget


def equivalent_on(
    phi: SnpSentence, psi: SnpSentence, instances: Sequence[Structure], budget: Budget | None = None
) -> list[InstanceVerdict]:
    out = []
    for i, a in enumerate(instances):
        r1 = check_sat(phi, a, budget).verdict
        r2 = check_sat(psi, a, budget).verdict
        agree = None if BUDGET_EXCEEDED in (r1, r2) else r1 == r2
        out.append(InstanceVerdict(i, r1, r2, agree))
    return out
