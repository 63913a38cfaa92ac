"""Nondeterministic Turing machines, clocked runs, and a compiler into sweeping machines.

Tape cells are numbered from 1; cell 1 holds the left-end marker ">" and "_" is the
blank. A sweeping machine (see make_oblivious) moves its head along a schedule that
depends only on the input length: one checking pass over the input, then one round
trip per simulated step, each reaching one cell further than the last.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, NamedTuple, Sequence

from .rng import CounterRng

FIRST = ">"
BLANK = "_"
FRONTIER = "_'"  # blank that the head has already visited
MARK = "^"  # suffix: the simulated machine's head sits on this cell
LEFT, RIGHT = "L", "R"

_NAME = re.compile(r"[A-Za-z0-9_]+")
_PLAIN = re.compile(r"[A-Za-z0-9]+")

Rule = tuple[str, str, str]  # (next state, written symbol, direction)


class MachineError(ValueError):
    pass


class SimulationCapExceeded(RuntimeError):
    def __init__(self, cap: int, partial: tuple):
        self.cap = cap
        self.partial = partial
        super().__init__(f"simulation exceeded the cap of {cap} steps")


# ------------------------------------------------------------ machines


@dataclass(frozen=True, eq=False)
class TuringMachine:
    states: tuple[str, ...]
    start: str
    accept: frozenset
    reject: frozenset
    alphabet: tuple[str, ...]
    delta: Mapping[tuple[str, str], tuple[Rule, ...]]

    def __post_init__(self):
        states = set(self.states)
        if len(states) != len(self.states):
            raise MachineError("duplicate state names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise MachineError("duplicate alphabet symbols")
        for sym in (FIRST, BLANK):
            if sym not in self.alphabet:
                raise MachineError(f"alphabet must contain {sym!r}")
        for q in (self.start, *self.accept, *self.reject):
            if q not in states:
                raise MachineError(f"unknown state {q!r}")
        if self.accept & self.reject:
            raise MachineError("a state cannot both accept and reject")
        alphabet = set(self.alphabet)
        norm: dict[tuple[str, str], tuple[Rule, ...]] = {}
        for (q, s), rules in self.delta.items():
            if q not in states:
                raise MachineError(f"unknown state {q!r}")
            if s not in alphabet:
                raise MachineError(f"unknown symbol {s!r}")
            if rules and (q in self.accept or q in self.reject):
                raise MachineError(f"transition from halting state {q!r}")
            for q2, w, d in rules:
                if q2 not in states:
                    raise MachineError(f"unknown state {q2!r}")
                if w not in alphabet:
                    raise MachineError(f"unknown symbol {w!r}")
                if d not in (LEFT, RIGHT):
                    raise MachineError(f"direction must be L or R, found {d!r}")
            if rules:
                norm[(q, s)] = tuple(dict.fromkeys(rules))
        object.__setattr__(self, "delta", norm)
        object.__setattr__(self, "accept", frozenset(self.accept))
        object.__setattr__(self, "reject", frozenset(self.reject))

    def rules(self, q: str, s: str) -> tuple[Rule, ...]:
        return self.delta.get((q, s), ())

    def is_halting(self, q: str) -> bool:
        return q in self.accept or q in self.reject

    @property
    def plain_symbols(self) -> tuple[str, ...]:
        return tuple(s for s in self.alphabet if s not in (FIRST, BLANK))

    def transition_count(self) -> int:
        return sum(len(r) for r in self.delta.values())

    def render(self) -> str:
        lines = [
            "states " + " ".join(self.states) + ";",
            f"start {self.start};",
            "accept " + " ".join(q for q in self.states if q in self.accept) + ";",
            "reject " + " ".join(q for q in self.states if q in self.reject) + ";",
            "alphabet " + " ".join(self.alphabet) + ";",
        ]
        for (q, s), rules in self.delta.items():
            for q2, w, d in rules:
                lines.append(f"delta {q} {s} -> {q2} {w} {d};")
        return "\n".join(lines) + "\n"


def parse_machine(text: str) -> TuringMachine:
    """Parse the ';'-separated machine grammar; '>' is the left-end marker and '_' the blank."""
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    sections: dict[str, list[str]] = {}
    delta: dict[tuple[str, str], list[Rule]] = {}
    for stmt in body.split(";"):
        toks = stmt.replace(",", " ").split()
        if not toks:
            continue
        key, rest = toks[0], toks[1:]
        if key == "delta":
            if len(rest) != 6 or rest[2] != "->":
                raise MachineError(f"expected 'delta STATE SYM -> STATE SYM DIR', found {stmt.strip()!r}")
            q, s, _, q2, w, d = rest
            delta.setdefault((q, s), []).append((q2, w, d))
        elif key in ("states", "start", "accept", "reject", "alphabet"):
            if key in sections:
                raise MachineError(f"section {key!r} given twice")
            sections[key] = rest
        else:
            raise MachineError(f"unknown section {key!r}")
    for key in ("states", "start", "alphabet"):
        if key not in sections:
            raise MachineError(f"missing section {key!r}")
    if len(sections["start"]) != 1:
        raise MachineError("start names exactly one state")
    for q in sections["states"]:
        if not _NAME.fullmatch(q):
            raise MachineError(f"bad state name {q!r}")
    declared = [s for s in sections["alphabet"] if s not in (FIRST, BLANK)]
    return TuringMachine(
        states=tuple(sections["states"]),
        start=sections["start"][0],
        accept=frozenset(sections.get("accept", ())),
        reject=frozenset(sections.get("reject", ())),
        alphabet=(FIRST, BLANK, *declared),
        delta={k: tuple(v) for k, v in delta.items()},
    )


@dataclass(frozen=True)
class StepPolynomial:
    """f(n) = sum c_i n^i with nonnegative integer coefficients."""

    coefficients: tuple[int, ...]
    zero_allowed: bool = False

    def __post_init__(self):
        if not self.coefficients:
            raise MachineError("step polynomial needs at least one coefficient")
        if any((not isinstance(c, int)) or c < 0 for c in self.coefficients):
            raise MachineError("coefficients must be nonnegative integers")
        if sum(self.coefficients) == 0 and not self.zero_allowed:
            raise MachineError("f(1) = 0 leaves no simulated step; pass zero_allowed to accept it")

    def __call__(self, n: int) -> int:
        return sum(c * n**i for i, c in enumerate(self.coefficients))

    @classmethod
    def parse(cls, text: str, zero_allowed: bool = False) -> "StepPolynomial":
        try:
            coeffs = tuple(int(t) for t in text.split(","))
        except ValueError:
            raise MachineError(f"bad step polynomial {text!r}; expected c0,c1,...") from None
        return cls(coeffs, zero_allowed)

    def render(self) -> str:
        return ",".join(map(str, self.coefficients))

    def flags(self, n: int) -> list[str]:
        if n >= 1 and self(n) == 0:
            return [f"f({n}) = 0: no simulated step fits in the schedule"]
        return []


@dataclass(frozen=True)
class ClockedMachine:
    """Runs are cut off after f(n) steps; acceptance means some branch accepts by then."""

    base: TuringMachine
    bound: StepPolynomial


@dataclass(frozen=True, eq=False)
class ObliviousMachine:
    """A sweeping machine plus the verdict read off its state at the end of the schedule.

    accepting_final lists the states that count as acceptance when the schedule ends.
    States in machine.reject are rejecting wherever they occur.
    """

    machine: TuringMachine
    bound: StepPolynomial
    accepting_final: frozenset
    source: TuringMachine | None = None
    provenance: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "accepting_final", frozenset(self.accepting_final))
        unknown = self.accepting_final - set(self.machine.states)
        if unknown:
            raise MachineError(f"unknown accepting states {sorted(unknown)}")
        if self.accepting_final & self.machine.reject:
            raise MachineError("a rejecting state cannot count as final acceptance")

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.machine.alphabet

    @property
    def states(self) -> tuple[str, ...]:
        return self.machine.states

    def directions(self, q: str, s: str) -> frozenset:
        return frozenset(d for _, _, d in self.machine.rules(q, s))


# ---------------------------------------------------------- schedules


class MoveCount(NamedTuple):
    moves: int
    round_trips: int


def g_moves(n: int, f: StepPolynomial | int) -> MoveCount:
    """Closed-form move count (f+1)(2n-2+f)/2 and the round-trip count f+1."""
    if n < 1:
        raise ValueError("input length must be at least 1")
    fv = f(n) if callable(f) else f
    prod = (fv + 1) * (2 * n - 2 + fv)
    assert prod % 2 == 0
    return MoveCount(prod // 2, fv + 1)


def round_trip_length(n: int, k: int) -> int:
    """Round trip k (from 0) turns at cell n+2+k, the blank frontier at that time."""
    return 2 * (n + 1 + k)


def schedule_moves(n: int, fv: int) -> int:
    """Moves of the sweeping schedule actually executed: sum of f+1 round trips."""
    return sum(round_trip_length(n, k) for k in range(fv + 1))


def trajectory(n: int, fv: int) -> tuple[int, ...]:
    """Head position at each time 0..schedule_moves(n, fv)."""
    pos = [1]
    for k in range(fv + 1):
        turn = n + 2 + k
        pos.extend(range(2, turn + 1))
        pos.extend(range(turn - 1, 0, -1))
    return tuple(pos)


# ---------------------------------------------------------- simulation


@dataclass(frozen=True)
class Trace:
    steps: tuple[tuple[int, int, str, str], ...]  # (time, head, state, tape digest)

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(s[1] for s in self.steps)

    @property
    def moves(self) -> int:
        return len(self.steps) - 1

    @property
    def round_trips(self) -> int:
        return sum(1 for s in self.steps[1:] if s[1] == 1)


@dataclass(frozen=True)
class SimResult:
    accept: bool
    traces: tuple[Trace, ...]
    flags: tuple[str, ...] = ()
    traces_truncated: bool = False


def tape_digest(tape: Sequence[str]) -> str:
    cells = list(tape)
    while cells and cells[-1] == BLANK:
        cells.pop()
    return hashlib.blake2b("\x1f".join(cells).encode(), digest_size=4).hexdigest()


def as_symbols(x) -> tuple[str, ...]:
    if isinstance(x, str):
        return tuple(x.split()) if " " in x else tuple(x)
    return tuple(x)


Config = tuple[str, int, tuple[str, ...]]


def _successors(m: TuringMachine, cfg: Config) -> list[Config] | None:
    """Successor configurations; None if some rule would leave the tape (invalid branch)."""
    q, head, tape = cfg
    out = []
    invalid = False
    for q2, w, d in m.rules(q, tape[head - 1]):
        nh = head + (1 if d == RIGHT else -1)
        if nh < 1:
            invalid = True
            continue
        cells = list(tape)
        cells[head - 1] = w
        if nh > len(cells):
            cells.append(BLANK)
        out.append((q2, nh, tuple(cells)))
    if not out and invalid:
        return None
    return sorted(set(out))


class _Event(NamedTuple):
    kind: str  # "halt" (no move possible), "invalid", "horizon"
    state: str
    time: int


def _explore(m: TuringMachine, tape: tuple[str, ...], horizon: int, mode: str, seed: int, trace_cap: int):
    """Breadth-first over deduplicated configurations up to `horizon` steps.

    Returns (events, traces, truncated, alive_at_horizon).
    """
    start: Config = (m.start, 1, tape)
    record = lambda t, c: (t, c[1], c[0], tape_digest(c[2]))  # noqa: E731
    frontier: dict[Config, dict[tuple, tuple]] = {start: {(1,): (record(0, start),)}}
    events: list[_Event] = []
    finished: dict[tuple, tuple] = {}
    truncated = False
    rng = CounterRng(seed, "branch")
    t = 0
    while frontier and t < horizon:
        nxt: dict[Config, dict[tuple, tuple]] = {}
        for cfg in sorted(frontier):
            hist = frontier[cfg]
            succ = _successors(m, cfg)
            if not succ:
                events.append(_Event("invalid" if succ is None else "halt", cfg[0], t))
                for k, v in hist.items():
                    finished.setdefault(k, v)
                continue
            if mode == "one-branch":
                succ = [succ[rng.randbelow(len(succ))]]
            for s in succ:
                slot = nxt.setdefault(s, {})
                for k, v in hist.items():
                    key = k + (s[1],)
                    if key in slot:
                        continue
                    if slot and sum(len(h) for h in nxt.values()) >= trace_cap:
                        truncated = True
                        continue
                    slot[key] = v + (record(t + 1, s),)
        frontier = nxt
        t += 1
    for cfg in sorted(frontier):
        events.append(_Event("horizon", cfg[0], t))
        for k, v in frontier[cfg].items():
            finished.setdefault(k, v)
    traces = tuple(Trace(finished[k]) for k in sorted(finished))
    return events, traces, truncated, bool(frontier)


def oblivious_input_length(tape: Sequence[str]) -> int:
    return len(tape) - 1


def simulate(
    m: TuringMachine | ClockedMachine | ObliviousMachine,
    x,
    step_cap: int = 100_000,
    mode: str = "exhaustive",
    seed: int = 0,
    raw: bool = False,
    moves: int | None = None,
    trace_cap: int = 256,
) -> SimResult:
    """Run m on input x (the cells after '>'; with raw=True, the whole initial tape).

    Plain machines run until every branch halts. Clocked machines stop after f(n)
    steps. Sweeping machines stop after the schedule (or `moves` steps) and read the
    verdict off the final state; a branch that stops early without rejecting counts
    as accepting, mirroring the embedding sentence, where a stalled head leaves
    nothing to check.
    """
    if step_cap <= 0:
        raise ValueError("step_cap must be positive")
    if mode not in ("exhaustive", "one-branch"):
        raise ValueError(f"unknown mode {mode!r}")
    syms = as_symbols(x)
    tape = syms if raw else (FIRST, *syms)
    if not tape:
        raise MachineError("empty tape")
    flags: tuple[str, ...] = ()

    if isinstance(m, ObliviousMachine):
        n = oblivious_input_length(tape)
        flags = tuple(m.bound.flags(n))
        horizon = schedule_moves(n, m.bound(n)) if moves is None else moves
        if horizon > step_cap:
            raise SimulationCapExceeded(step_cap, ())
        events, traces, trunc, _ = _explore(m.machine, tape, horizon, mode, seed, trace_cap)
        acc = False
        for e in events:
            if e.state in m.machine.reject:
                continue
            if e.kind == "horizon":
                acc |= e.state in m.accepting_final
            else:
                acc = True
        return SimResult(acc, traces, flags, trunc)

    if isinstance(m, ClockedMachine):
        n = len(tape) - 1
        flags = tuple(m.bound.flags(n))
        horizon = m.bound(n)
        if horizon > step_cap:
            raise SimulationCapExceeded(step_cap, ())
        events, traces, trunc, _ = _explore(m.base, tape, horizon, mode, seed, trace_cap)
        acc = any(e.kind != "invalid" and e.state in m.base.accept for e in events)
        return SimResult(acc, traces, flags, trunc)

    events, traces, trunc, alive = _explore(m, tape, step_cap, mode, seed, trace_cap)
    acc = any(e.kind == "halt" and e.state in m.accept for e in events)
    if alive and not acc:
        raise SimulationCapExceeded(step_cap, traces)
    return SimResult(acc, traces, flags, trunc)


# ---------------------------------------------------------- compiler


def _check_compilable(m: TuringMachine) -> None:
    for q in m.states:
        if not _PLAIN.fullmatch(q):
            raise MachineError(f"state {q!r}: compiled machines need alphanumeric state names")
    for s in m.plain_symbols:
        if not _PLAIN.fullmatch(s):
            raise MachineError(f"symbol {s!r}: compiled machines need alphanumeric symbols")
    for (q, s), rules in m.delta.items():
        for q2, w, d in rules:
            if s == FIRST and (w != FIRST or d != RIGHT):
                raise MachineError(f"rule at ({q}, >) must rewrite > and move right")
            if s != FIRST and w == FIRST:
                raise MachineError(f"rule at ({q}, {s}) writes > away from cell 1")


def _err(q: str) -> str:
    return q if q.startswith("err_") else "err_" + q


def sweep_state(q: str, side: str) -> str:
    return f"{q}_{side}"


def transfer_state(qi: str, qj: str, kind: str) -> str:
    """kind in R, L, wR, wL."""
    return f"{qi}_{qj}_{kind}"


def make_oblivious(cm: ClockedMachine) -> ObliviousMachine:
    """Compile a clocked machine into a sweeping machine.

    One checking pass validates the input (malformed cells switch to the err_ copy of
    the table, whose runs accept), then each round trip simulates one step: the
    simulated head is the cell carrying a "^" suffix, moved by a transfer state that
    marks its new cell on the way. Rules missing from the base table are covered by
    idle passes so that the sweep schedule is never interrupted.
    """
    m = cm.base
    _check_compilable(m)
    plain = list(m.plain_symbols)
    visited = plain + [FRONTIER]  # cells the simulated head may sit on, minus cell 1
    alphabet = (*m.alphabet, *(s + MARK for s in plain), FRONTIER, FRONTIER + MARK)
    filler = plain[0] if plain else FRONTIER

    def on_head(s: str) -> str:
        return (FRONTIER if s == BLANK else s) + MARK

    def written(s: str) -> str:
        return FRONTIER if s == BLANK else s

    table: dict[tuple[str, str], list[Rule]] = {}

    def add(q, s, q2, w, d):
        lst = table.setdefault((q, s), [])
        if (q2, w, d) not in lst:
            lst.append((q2, w, d))

    def launch(src: str, q: str) -> None:
        moves = m.rules(q, FIRST)
        for qk, _, _ in moves:
            add(src, FIRST, transfer_state(q, qk, "wR"), FIRST, RIGHT)
        if not moves:
            add(src, FIRST, sweep_state(q, "R"), FIRST, RIGHT)

    states = ["start", "search", "return"]
    for q in m.states:
        states += [sweep_state(q, "L"), sweep_state(q, "R")]
    for qi, qj in product(m.states, repeat=2):
        states += [transfer_state(qi, qj, k) for k in ("L", "R", "wL", "wR")]

    # input check: one pass right, one pass back
    add("start", FIRST, "search", FIRST, RIGHT)
    for s in alphabet:
        if s != FIRST:
            add("start", s, "err_search", FIRST, RIGHT)
    for s in plain:
        add("search", s, "search", s, RIGHT)
    for s in alphabet:
        if s not in plain and s != BLANK:
            add("search", s, "err_search", filler, RIGHT)
    add("search", BLANK, "return", FRONTIER, LEFT)
    for s in alphabet:
        if s != FIRST:
            add("return", s, "return", s, LEFT)
    launch("return", m.start)

    for q in m.states:
        qr, ql = sweep_state(q, "R"), sweep_state(q, "L")
        for s in [FIRST, *visited]:
            add(qr, s, qr, s, RIGHT)
        for s in visited:
            add(ql, s, ql, s, LEFT)
        for s in [*plain, BLANK]:
            hs = on_head(s)
            rules = m.rules(q, s)
            for qj, w, d in rules:
                if d == RIGHT:
                    add(qr, hs, transfer_state(q, qj, "wR"), written(w), RIGHT)
            add(qr, hs, qr, hs, RIGHT)  # defer to the leftward pass
            lefts = [(qj, w) for qj, w, d in rules if d == LEFT]
            for qj, w in lefts:
                add(ql, hs, transfer_state(q, qj, "wL"), written(w), LEFT)
            if not lefts:
                add(ql, hs, ql, hs, LEFT)  # no step taken this round
        add(qr, BLANK, ql, FRONTIER, LEFT)
        add(ql, FIRST, qr, FIRST, RIGHT)

    for qi, qj in product(m.states, repeat=2):
        wr, wl = transfer_state(qi, qj, "wR"), transfer_state(qi, qj, "wL")
        tr, tl = transfer_state(qi, qj, "R"), transfer_state(qi, qj, "L")
        for s in visited:
            add(wr, s, tr, s + MARK, RIGHT)
            add(wl, s, tl, s + MARK, LEFT)
        launch(wl, qj)
        for s in alphabet:
            if s not in (FIRST, BLANK):
                add(tr, s, tr, s, RIGHT)
                add(tl, s, tl, s, LEFT)
        add(tr, BLANK, tl, FRONTIER, LEFT)
        add(tl, FIRST, sweep_state(qj, "R"), FIRST, RIGHT)

    for (q, s), rules in list(table.items()):
        if q.startswith("err_"):
            continue
        for q2, w, d in rules:
            add(_err(q), s, _err(q2), w, d)

    all_states = states + [_err(q) for q in states]
    represented = {"start": m.start, "search": m.start, "return": m.start}
    provenance: dict[str, tuple] = {"start": ("start",), "search": ("search",), "return": ("return",)}
    for q in m.states:
        for side in "LR":
            represented[sweep_state(q, side)] = q
            provenance[sweep_state(q, side)] = ("sweep", side, q)
    for qi, qj in product(m.states, repeat=2):
        for k in ("L", "R", "wL", "wR"):
            represented[transfer_state(qi, qj, k)] = qj
            provenance[transfer_state(qi, qj, k)] = ("transfer", k, qi, qj)
    for q in states:
        provenance[_err(q)] = ("error", *provenance[q])
    accepting = {q for q in states if represented[q] in m.accept} | {_err(q) for q in states}

    machine = TuringMachine(
        states=tuple(all_states),
        start="start",
        accept=frozenset(),
        reject=frozenset(),
        alphabet=alphabet,
        delta={k: tuple(v) for k, v in table.items()},
    )
    return ObliviousMachine(machine, cm.bound, frozenset(accepting), m, provenance)


def represented_state(mo: ObliviousMachine, q: str) -> str | None:
    """Base-machine state a compiled state stands for; None for error copies."""
    p = mo.provenance.get(q)
    if p is None or p[0] == "error":
        return None
    if p[0] in ("start", "search", "return"):
        return mo.source.start if mo.source else None
    return p[-1]


def sweeping_acceptor(
    bound: StepPolynomial, marker: str = "b", other: str = "a", complement: bool = False
) -> ObliviousMachine:
    """Hand-written three-state sweeper accepting iff the input contains `marker`.

    It writes `other` on each blank it turns at, so its alphabet has four symbols.
    With complement=True the verdict is flipped: accept iff no marker was seen.
    """
    a, b = other, marker
    delta = {
        ("R", FIRST): (("R", FIRST, RIGHT),),
        ("R", a): (("R", a, RIGHT),),
        ("R", b): (("R", b, RIGHT),),
        ("R", BLANK): (("L", a, LEFT),),
        ("L", a): (("L", a, LEFT),),
        ("L", b): (("F", b, LEFT),),
        ("F", a): (("F", a, LEFT),),
        ("F", b): (("F", b, LEFT),),
        ("L", FIRST): (("R", FIRST, RIGHT),),
        ("F", FIRST): (("R", FIRST, RIGHT),),
    }
    machine = TuringMachine(("R", "L", "F"), "R", frozenset(), frozenset(), (FIRST, BLANK, a, b), delta)
    return ObliviousMachine(machine, bound, frozenset({"R", "L"} if complement else {"F"}))


# ------------------------------------------------------- verification


@dataclass
class ObliviousnessReport:
    n: int
    f_value: int
    inputs: int
    identical: bool
    moves: int
    expected_moves: int
    schedule: int
    round_trips: int
    expected_round_trips: int
    frontier_ok: bool
    first_divergence: tuple | None = None  # (input, time, expected position, observed trace)

    @property
    def passes(self) -> bool:
        return (
            self.identical
            and self.moves == self.expected_moves
            and self.round_trips == self.expected_round_trips
            and self.frontier_ok
        )

    def render(self) -> str:
        out = [
            f"n={self.n} f={self.f_value} inputs={self.inputs}",
            f"identical: {'yes' if self.identical else 'no'}",
            f"moves: {self.moves} (closed form {self.expected_moves}, schedule {self.schedule})",
            f"round trips: {self.round_trips} (expected {self.expected_round_trips})",
            f"frontier: {'ok' if self.frontier_ok else 'irregular'}",
        ]
        if self.first_divergence is not None:
            x, t, want, got = self.first_divergence
            out.append(f"divergence: input {''.join(x)!r} at time {t}: expected {want}, got {got}")
        return "\n".join(out)


def turning_points(positions: Sequence[int]) -> list[int]:
    return [p for i, p in enumerate(positions[1:-1], 1) if positions[i - 1] < p > positions[i + 1]]


def verify_obliviousness(mo: ObliviousMachine, n: int, f: StepPolynomial, sample=None) -> ObliviousnessReport:
    """Compare every branch on every sample input against the sweep schedule for length n."""
    fv = f(n)
    if sample is None:
        letters = mo.source.plain_symbols if mo.source else mo.machine.plain_symbols
        sample = list(product(letters, repeat=n))
    sample = [as_symbols(x) for x in sample]
    for x in sample:
        if len(x) != n:
            raise ValueError(f"sample input {x} does not have length {n}")
    expected = trajectory(n, fv)
    horizon = len(expected) - 1
    probe = ObliviousMachine(mo.machine, f, mo.accepting_final, mo.source, mo.provenance)
    divergence = None
    identical = True
    observed = None
    for x in sample:
        res = simulate(probe, x, step_cap=max(horizon, 1), moves=horizon)
        for tr in res.traces:
            pos = tr.positions
            if pos != expected:
                identical = False
                if divergence is None:
                    t = next((i for i, (a, b) in enumerate(zip(expected, pos)) if a != b), min(len(pos), len(expected)))
                    divergence = (x, t, expected[t] if t < len(expected) else None, pos)
            elif observed is None:
                observed = pos
    ref = observed if identical and observed is not None else expected
    turns = turning_points(ref)
    frontier_ok = all(b == a + 1 for a, b in zip(turns, turns[1:]))
    g = g_moves(n, fv) if n >= 1 else MoveCount(0, fv + 1)
    moves = len(ref) - 1
    trips = sum(1 for p in ref[1:] if p == 1)
    return ObliviousnessReport(
        n=n,
        f_value=fv,
        inputs=len(sample),
        identical=identical,
        moves=moves,
        expected_moves=g.moves,
        schedule=horizon,
        round_trips=trips,
        expected_round_trips=g.round_trips,
        frontier_ok=frontier_ok,
        first_divergence=divergence,
    )
