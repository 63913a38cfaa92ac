"""Space-time grids of a sweeping machine and the monadic sentence that checks them.

A grid has one row per time step of the sweep schedule. Each row starts with a
leader element followed by the tape cells that exist at that time. The leaders
form a `next` cycle that closes back at the start element, which is how the
sentence recognises the last row.

The reverse direction computes the least set of elements that every satisfying
expansion must mark, and reads a machine input off the first row.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations

from .logic import Inequality, NegatedConjunct, Signature, SnpSentence, make_conjunct, neg, pos
from .structures import Structure
from .turing import (
    BLANK,
    FIRST,
    FRONTIER,
    LEFT,
    MARK,
    RIGHT,
    ClockedMachine,
    ObliviousMachine,
    StepPolynomial,
    as_symbols,
    make_oblivious,
    parse_machine,
    schedule_moves,
    simulate,
    trajectory,
)

START, SUCC, NEXT, ROW = "start", "succ", "next", "row"
MARK_REL, INIT, HEAD = "Mark", "Init", "H"
GRID_ELEMENT_CAP = 20_000


class EmbeddingError(ValueError):
    pass


# ------------------------------------------------------------- naming


def symbol_code(s: str) -> str:
    """Identifier-safe name for a tape symbol."""
    marked = s.endswith(MARK) and len(s) > 1
    base = s[: -len(MARK)] if marked else s
    if base == FIRST:
        code = "first"
    elif base == BLANK:
        code = "blank"
    elif base == FRONTIER:
        code = "blankp"
    else:
        code = "s_" + base
    return code + "_h" if marked else code


def input_symbol(s: str) -> str:
    return symbol_code(s)


def state_symbol(q: str) -> str:
    return "Q_" + q


def tape_symbol(s: str) -> str:
    return "S_" + symbol_code(s)


def grid_symbols(mo: ObliviousMachine) -> tuple[str, ...]:
    """Tape symbols that may appear in the first row (everything except the blank)."""
    return tuple(s for s in mo.alphabet if s != BLANK)


def grid_signature(mo: ObliviousMachine) -> Signature:
    pairs = [(input_symbol(s), 1) for s in grid_symbols(mo)]
    pairs += [(START, 1), (SUCC, 2), (NEXT, 2), (ROW, 3)]
    return Signature.of(*pairs)


def existential_signature(mo: ObliviousMachine) -> Signature:
    pairs = [(tape_symbol(s), 1) for s in mo.alphabet]
    pairs += [(MARK_REL, 1), (INIT, 1), (HEAD, 1)]
    pairs += [(state_symbol(q), 1) for q in mo.states]
    return Signature.of(*pairs, kind="existential")


def _with_bound(mo: ObliviousMachine, f: StepPolynomial | None) -> ObliviousMachine:
    if f is None or f == mo.bound:
        return mo
    return ObliviousMachine(mo.machine, f, mo.accepting_final, mo.source, mo.provenance)


# --------------------------------------------------------------- grids


@dataclass(frozen=True)
class GridLayout:
    """Element ids of a built grid: leaders[j] and cells[j][i-1] for cell i of row j."""

    leaders: tuple[int, ...]
    cells: tuple[tuple[int, ...], ...]

    @property
    def rows(self) -> int:
        return len(self.leaders)

    def row_lengths(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.cells)


def row_lengths(n: int, fv: int) -> tuple[int, ...]:
    """Cells per row: the tape grows by one cell right after the head turns at the frontier."""
    path = trajectory(n, fv)
    lengths = [n + 2]
    for p in path[:-1]:
        lengths.append(lengths[-1] + (1 if p == lengths[-1] else 0))
    return tuple(lengths)


def grid_size(n: int, fv: int) -> int:
    lengths = row_lengths(n, fv)
    return len(lengths) + sum(lengths)


def _grid(tape: tuple[str, ...], mo: ObliviousMachine, fv: int, cap: int) -> tuple[Structure, GridLayout]:
    n = len(tape) - 1
    lengths = row_lengths(n, fv)
    total = len(lengths) + sum(lengths)
    if total > cap:
        raise EmbeddingError(f"grid would have {total} elements, above cap {cap}")
    leaders, cells, nxt = [], [], 0
    for length in lengths:
        leaders.append(nxt)
        cells.append(tuple(range(nxt + 1, nxt + 1 + length)))
        nxt += 1 + length
    rows = len(leaders)
    rel: dict[str, set] = defaultdict(set)
    rel[START].add((leaders[0],))
    for j in range(rows):
        a, a_next = leaders[j], leaders[(j + 1) % rows]
        row = cells[j]
        rel[NEXT].add((a, a_next))
        rel[SUCC].add((a, row[0]))
        rel[SUCC].update(zip(row, row[1:]))
        rel[SUCC].add((row[-1], a_next))
        rel[ROW].update((a, c, a_next) for c in row)
        if j + 1 < rows:
            rel[NEXT].update(zip(row, cells[j + 1]))
    for c, s in zip(cells[0], tape):
        rel[input_symbol(s)].add((c,))
    b = Structure(grid_signature(mo), total, {k: frozenset(v) for k, v in rel.items()})
    return b, GridLayout(tuple(leaders), tuple(cells))


def build_grid_with_layout(
    x, mo: ObliviousMachine, f: StepPolynomial | None = None, cap: int = GRID_ELEMENT_CAP, allow_empty: bool = False
) -> tuple[Structure, GridLayout]:
    mo = _with_bound(mo, f)
    syms = as_symbols(x)
    if not syms and not allow_empty:
        raise EmbeddingError("input must be nonempty")
    allowed = set(grid_symbols(mo))
    for s in syms:
        if s not in allowed:
            raise EmbeddingError(f"symbol {s!r} is not a first-row symbol of the machine")
    n = len(syms)
    return _grid((FIRST, *syms), mo, mo.bound(n), cap)


def build_grid(x, mo: ObliviousMachine, f: StepPolynomial | None = None, cap: int = GRID_ELEMENT_CAP) -> Structure:
    return build_grid_with_layout(x, mo, f, cap)[0]


# ------------------------------------------------------------ sentence


@dataclass(frozen=True)
class EmbeddingSentence:
    sentence: SnpSentence
    families: dict = field(default_factory=dict)  # family name -> conjunct count

    @property
    def conjunct_count(self) -> int:
        return len(self.sentence.conjuncts)


def _parse_lits(text: str) -> list:
    """Tiny literal syntax for the fixed rule bodies: 'succ(a,y) !H(y) x!=y'."""
    out = []
    for tok in text.split():
        if "!=" in tok:
            left, right = tok.split("!=")
            out.append(Inequality(left, right))
            continue
        negated = tok.startswith("!")
        name, args = tok.lstrip("!").rstrip(")").split("(")
        lit = (neg if negated else pos)(name, *args.split(","))
        out.append(lit)
    return out


MARK_SPREAD = {
    "first": (
        "succ(a,y) succ(y,z) succ(a1,y1) succ(y1,z1) next(a,a1) next(y,y1) next(z,z1) next(a1,a2) "
        "row(a,y,a1) row(a,z,a1) row(a1,y1,a2) row(a1,z1,a2) Mark(y) Mark(z)",
        ("y1",),
    ),
    "middle": (
        "succ(x,y) succ(y,z) succ(x1,y1) succ(y1,z1) next(a,a1) next(a1,a2) next(x,x1) next(y,y1) next(z,z1) "
        "row(a,x,a1) row(a,y,a1) row(a,z,a1) row(a1,x1,a2) row(a1,y1,a2) row(a1,z1,a2) Mark(x) Mark(y) Mark(z)",
        ("y1",),
    ),
    "last": (
        "succ(x,y) succ(y,a1) succ(x1,y1) succ(y1,a2) next(a,a1) next(a1,a2) next(x,x1) next(y,y1) "
        "row(a,x,a1) row(a,y,a1) row(a1,x1,a2) row(a1,y1,a2) Mark(x) Mark(y) !H(y)",
        ("y1",),
    ),
    "grow": (
        "succ(x,y) succ(y,a1) succ(x1,y1) succ(y1,z1) succ(z1,a2) next(a,a1) next(a1,a2) next(x,x1) next(y,y1) "
        "row(a,x,a1) row(a,y,a1) row(a1,x1,a2) row(a1,y1,a2) row(a1,z1,a2) Mark(x) Mark(y) H(y)",
        ("y1", "z1"),
    ),
}

STEP_BODY = {
    RIGHT: ("succ(y,z) next(y,y1) next(z,z1) succ(y1,z1)", "z1"),
    LEFT: ("succ(x,y) next(x,x1) next(y,y1) succ(x1,y1)", "x1"),
}

FINAL_ROW = "start(s) next(a,s) succ(a,x) row(a,x,s) Mark(x) H(x)"
FIRST_CELL = "start(a) succ(a,x) next(a,a1) row(a,x,a1)"
INIT_CHAIN = "start(a) Init(x) succ(x,y) row(a,y,a1) next(a,a1)"


def structural_constraints(mo: ObliviousMachine) -> list[tuple[str, list]]:
    """Input-only forbidden patterns, in the order check_fo_constraints scans them."""
    out = [
        ("start-unique", _parse_lits("start(x) start(y) x!=y")),
        ("succ-loop", _parse_lits("succ(x,x)")),
        ("next-loop", _parse_lits("next(x,x)")),
        ("row-loop", _parse_lits("row(a,x,a)")),
        ("succ-out", _parse_lits("succ(x,y) succ(x,z) y!=z")),
        ("succ-in", _parse_lits("succ(y,x) succ(z,x) y!=z")),
        ("next-out", _parse_lits("next(x,y) next(x,z) y!=z")),
        ("next-in", _parse_lits("next(y,x) next(z,x) y!=z")),
        ("row-leader", _parse_lits("row(a,x,b) row(c,x,d) a!=c")),
        ("row-successor", _parse_lits("row(a,x,b) row(a,x,d) b!=d")),
        ("leader-member", _parse_lits("row(a,x,b) row(c,a,d)")),
        ("successor-member", _parse_lits("row(a,x,b) row(c,b,d)")),
    ]
    codes = [input_symbol(s) for s in grid_symbols(mo)]
    for s, t in combinations(codes, 2):
        out.append((f"symbols {s}/{t}", [pos(s, "x"), pos(t, "x")]))
    for s in codes:
        out.append((f"first-row-end {s}", _parse_lits("start(a) next(a,a1) row(a,y,a1) succ(y,a1)") + [pos(s, "y")]))
    out.append(("first-row-above", _parse_lits("start(a) row(a,y,a1) next(x,y)")))
    return out


def build_sentence(mo: ObliviousMachine) -> EmbeddingSentence:
    tau = grid_signature(mo)
    sigma = existential_signature(mo)
    names = tau.names
    families: dict[str, int] = defaultdict(int)
    conj: list[NegatedConjunct] = []

    def add(family: str, lits) -> None:
        conj.append(make_conjunct(lits, names))
        families[family] += 1

    def implies(family: str, body: str | list, *heads) -> None:
        lits = _parse_lits(body) if isinstance(body, str) else body
        for h in heads:
            add(family, lits + [h if not h.positive else neg(h.atom.symbol, *h.atom.args)])

    alphabet = mo.alphabet
    states = mo.states

    # first row: the input is copied into S_s and the run starts at cell 1
    for s in grid_symbols(mo):
        body = _parse_lits(FIRST_CELL) + [pos(input_symbol(s), "x")]
        implies("init-first", body, pos(INIT, "x"), pos(tape_symbol(s), "x"), pos(HEAD, "x"),
                pos(state_symbol(mo.machine.start), "x"))
        chain = _parse_lits(INIT_CHAIN) + [pos(input_symbol(s), "y")]
        implies("init-chain", chain, pos(INIT, "y"), pos(tape_symbol(s), "y"))
    implies("init-blank", _parse_lits(INIT_CHAIN + " succ(y,a1)"), pos(INIT, "y"), pos(tape_symbol(BLANK), "y"))
    implies("mark-seed", "Init(x)", pos(MARK_REL, "x"))

    for name, (body, heads) in MARK_SPREAD.items():
        implies(f"mark-{name}", body, *[pos(MARK_REL, v) for v in heads])

    # partitions
    add("state-cover", [neg(state_symbol(q), "x") for q in states])
    for p, q in combinations(states, 2):
        add("state-disjoint", [pos(state_symbol(p), "x"), pos(state_symbol(q), "x")])
    for p, q in combinations(states, 2):
        add("state-row", _parse_lits("row(a,x,a1) row(a,y,a1) next(a,a1)")
            + [pos(state_symbol(p), "x"), pos(state_symbol(q), "y")])
    add("symbol-cover", [neg(tape_symbol(s), "x") for s in alphabet])
    for s, t in combinations(alphabet, 2):
        add("symbol-disjoint", [pos(tape_symbol(s), "x"), pos(tape_symbol(t), "x")])
    for s in alphabet:
        implies("propagate", f"Mark(x) !H(x) {tape_symbol(s)}(x) next(x,x1)", pos(tape_symbol(s), "x1"))
    add("head-unique", _parse_lits("row(a,x,a1) row(a,y,a1) next(a,a1) H(x) H(y) x!=y"))

    # transitions, one group per (state, read symbol)
    for q in states:
        for s in alphabet:
            rules = mo.machine.rules(q, s)
            if not rules:
                continue
            dirs = {d for _, _, d in rules}
            if len(dirs) != 1:
                raise EmbeddingError(f"rules for ({q}, {s}) move in both directions; the machine is not sweeping")
            (d,) = dirs
            shape, target = STEP_BODY[d]
            body = _parse_lits(f"{shape} Mark(y) H(y) {tape_symbol(s)}(y) {state_symbol(q)}(y)")
            family = f"step-{'right' if d == RIGHT else 'left'}"
            implies(family, body, pos(HEAD, target))
            written: dict[str, list[str]] = defaultdict(list)
            for q2, w, _ in rules:
                if w not in written[q2]:
                    written[q2].append(w)
            add(family, body + [neg(state_symbol(q2), target) for q2 in written])
            for q2, ws in written.items():
                add(family, body + [pos(state_symbol(q2), target)] + [neg(tape_symbol(w), "y1") for w in ws])
    implies("frontier", f"Mark(y) H(y) {tape_symbol(BLANK)}(y) next(y,y1) succ(y1,z1)", pos(tape_symbol(BLANK), "z1"))

    # verdict in the closing row, and rejecting states anywhere
    for q in states:
        if q not in mo.accepting_final:
            add("final-row", _parse_lits(FINAL_ROW) + [pos(state_symbol(q), "x")])
    for q in states:
        if q in mo.machine.reject:
            add("reject", _parse_lits("Mark(x) H(x)") + [pos(state_symbol(q), "x")])

    for name, lits in structural_constraints(mo):
        add("structure", lits)
    return EmbeddingSentence(SnpSentence(tau, sigma, tuple(conj)), dict(families))


# ------------------------------------------------------ direct FO scan


@dataclass(frozen=True)
class FoViolation:
    rule: str
    elements: tuple[int, ...]

    def render(self) -> str:
        return f"{self.rule} at {','.join(map(str, self.elements))}"


class _Index:
    def __init__(self, b: Structure):
        self.succ_out: dict[int, list[int]] = defaultdict(list)
        self.succ_in: dict[int, list[int]] = defaultdict(list)
        self.next_out: dict[int, list[int]] = defaultdict(list)
        self.next_in: dict[int, list[int]] = defaultdict(list)
        self.rows: dict[int, list[tuple[int, int]]] = defaultdict(list)
        self.symbols: dict[int, list[str]] = defaultdict(list)
        for x, y in sorted(b[SUCC]):
            self.succ_out[x].append(y)
            self.succ_in[y].append(x)
        for x, y in sorted(b[NEXT]):
            self.next_out[x].append(y)
            self.next_in[y].append(x)
        for a, x, c in sorted(b[ROW]):
            self.rows[x].append((a, c))
        for sym in b.signature:
            if sym.arity == 1 and sym.name != START:
                for (x,) in sorted(b[sym.name]):
                    self.symbols[x].append(sym.name)
        self.starts = sorted(x for (x,) in b[START])
        self.row_tuples = sorted(b[ROW])

    @staticmethod
    def one(d: dict, x: int) -> int | None:
        v = d.get(x)
        return v[0] if v else None


def check_fo_constraints(b: Structure) -> FoViolation | None:
    """Direct scan for the structural patterns; first hit in a fixed rule order."""
    ix = _Index(b)
    if len(ix.starts) > 1:
        return FoViolation("start-unique", tuple(ix.starts[:2]))
    for x, y in sorted(b[SUCC]):
        if x == y:
            return FoViolation("succ-loop", (x,))
    for x, y in sorted(b[NEXT]):
        if x == y:
            return FoViolation("next-loop", (x,))
    for a, x, c in ix.row_tuples:
        if a == c:
            return FoViolation("row-loop", (a, x))
    for rule, table in (("succ-out", ix.succ_out), ("succ-in", ix.succ_in),
                        ("next-out", ix.next_out), ("next-in", ix.next_in)):
        for x in sorted(table):
            if len(table[x]) > 1:
                return FoViolation(rule, (x, *table[x][:2]))
    for x in sorted(ix.rows):
        pairs = ix.rows[x]
        if len({a for a, _ in pairs}) > 1:
            return FoViolation("row-leader", (x,))
        if len({c for _, c in pairs}) > 1:
            return FoViolation("row-successor", (x,))
    for a, x, c in ix.row_tuples:
        if a in ix.rows:
            return FoViolation("leader-member", (a, x))
        if c in ix.rows:
            return FoViolation("successor-member", (c, x))
    for x in sorted(ix.symbols):
        if len(ix.symbols[x]) > 1:
            return FoViolation("symbols", (x,))
    for a in ix.starts:
        for a_row, y, a1 in ix.row_tuples:
            if a_row == a and a1 in ix.next_out.get(a, ()) and a1 in ix.succ_out.get(y, ()) and ix.symbols.get(y):
                return FoViolation("first-row-end", (y,))
        for y in sorted(ix.rows):
            if any(lead == a for lead, _ in ix.rows[y]) and ix.next_in.get(y):
                return FoViolation("first-row-above", (y,))
    return None


# ------------------------------------------------------ forced marking


@dataclass
class MarkingState:
    marked: dict  # element -> (i, j), in discovery order
    head: tuple[int, ...]  # forced head elements, one per row from row 0
    leaders: tuple[int, ...] = ()
    first_row: tuple[str, ...] = ()  # Init symbols of cells 1..N, blank cell included
    verdict_row: int | None = None
    stop_reason: str = ""

    @property
    def width(self) -> int:
        return max((i for i, j in self.marked.values() if j == 0), default=0)

    @property
    def coords(self) -> dict:
        return dict(self.marked)

    @property
    def machine_tape(self) -> tuple[str, ...]:
        syms = self.first_row
        return syms[:-1] if syms and syms[-1] == BLANK else syms


def _advance(mo: ObliviousMachine, branches: set, i: int) -> tuple[str | None, set, str]:
    """One synchronous step of every branch with the head at cell i."""
    dirs, out = set(), set()
    for q, tape in branches:
        s = tape[i - 1] if i <= len(tape) else BLANK
        rules = mo.machine.rules(q, s)
        if not rules:
            return None, set(), f"state {q} has no move on {s}"
        for q2, w, d in rules:
            dirs.add(d)
            cells = list(tape) + [BLANK] * (i - len(tape))
            cells[i - 1] = w
            out.add((q2, tuple(cells)))
    if len(dirs) != 1:
        return None, set(), "branches move in different directions"
    return dirs.pop(), out, ""


def forced_marking(b: Structure, mo: ObliviousMachine) -> MarkingState:
    """Least Mark/H sets forced by the sentence, row by row from the start element.

    Assumes check_fo_constraints(b) passed, so every degree is at most one.
    """
    ix = _Index(b)
    one = _Index.one
    decode = {input_symbol(s): s for s in grid_symbols(mo)}
    if not ix.starts:
        return MarkingState({}, (), stop_reason="no start element")
    a0 = ix.starts[0]
    leaders = [a0]
    while True:
        nx = one(ix.next_out, leaders[-1])
        if nx is None or nx in leaders:
            break
        leaders.append(nx)
    closing = one(ix.next_out, leaders[-1]) == a0

    def after(j: int) -> int | None:
        if j + 1 < len(leaders):
            return leaders[j + 1]
        return a0 if closing else None

    def member(e: int | None, j: int) -> bool:
        return e is not None and j < len(leaders) and (leaders[j], after(j)) in ix.rows.get(e, ())

    state = MarkingState({}, (), tuple(leaders))
    a1 = after(0)
    c1 = one(ix.succ_out, a0)
    if a1 is None or not member(c1, 0) or not ix.symbols.get(c1):
        state.stop_reason = "first cell missing or unlabelled"
        return state

    init, first_row = [c1], [decode[ix.symbols[c1][0]]]
    while True:
        y = one(ix.succ_out, init[-1])
        if y is None or y in init or not member(y, 0):
            break
        if ix.symbols.get(y):
            init.append(y)
            first_row.append(decode[ix.symbols[y][0]])
        elif one(ix.succ_out, y) == a1:
            init.append(y)
            first_row.append(BLANK)
            break
        else:
            break
    marked = {e: (i + 1, 0) for i, e in enumerate(init)}
    state.marked = marked
    state.first_row = tuple(first_row)

    heads = [c1]
    branches = {(mo.machine.start, state.machine_tape)}
    row_marked = list(init)
    head_alive = True
    j = 0
    while True:
        h = heads[-1] if head_alive and len(heads) == j + 1 else None
        if h is not None and h in marked:
            survivors = {br for br in branches if br[0] not in mo.machine.reject}
            if not survivors:
                state.verdict_row = j
                state.stop_reason = "every branch rejected"
                break
            branches = survivors
            if after(j) == a0 and one(ix.succ_out, leaders[j]) == h and member(h, j):
                state.verdict_row = j
                state.stop_reason = "head reached the closing row"
                break
        if j + 1 >= len(leaders):
            state.stop_reason = state.stop_reason or "no further row"
            break

        row_marked = _spread(ix, marked, row_marked, j, leaders[j], after(j), after(j + 1), h, member)

        if h is not None and h in marked and member(h, j):
            i = marked[h][0]
            d, nxt, why = _advance(mo, branches, i)
            target = _step_target(ix, h, d) if d is not None else None
            if target is None:
                head_alive = False
                state.stop_reason = why or "grid shape does not carry the head move"
            else:
                heads.append(target)
                branches = nxt
        elif head_alive:
            head_alive = False
            state.stop_reason = "head left the marked region"
        j += 1
    state.head = tuple(heads)
    return state


def _step_target(ix: _Index, h: int, d: str) -> int | None:
    one = _Index.one
    if d == RIGHT:
        z = one(ix.succ_out, h)
        y1 = one(ix.next_out, h)
        z1 = one(ix.next_out, z) if z is not None else None
        ok = y1 is not None and z1 is not None and one(ix.succ_out, y1) == z1
        return z1 if ok else None
    x = one(ix.succ_in, h)
    y1 = one(ix.next_out, h)
    x1 = one(ix.next_out, x) if x is not None else None
    ok = y1 is not None and x1 is not None and one(ix.succ_out, x1) == y1
    return x1 if ok else None


def _spread(ix, marked, row_marked, j, a, a1, a2, h, member) -> list[int]:
    """Marks forced in row j+1 by the four spread patterns."""
    one = _Index.one
    here = set(row_marked)
    out: list[int] = []
    if a2 is None:
        return out

    def put(e: int, i: int) -> None:
        if e not in marked:
            marked[e] = (i, j + 1)
            out.append(e)

    for y in row_marked:
        i = marked[y][0]
        y1 = one(ix.next_out, y)
        if not member(y1, j + 1):
            continue
        x = one(ix.succ_in, y)
        z = one(ix.succ_out, y)
        if z in here:
            z1 = one(ix.next_out, z)
            if member(z1, j + 1) and one(ix.succ_out, y1) == z1:
                if x == a and one(ix.succ_out, a1) == y1:
                    put(y1, i)
                if x in here:
                    x1 = one(ix.next_out, x)
                    if member(x1, j + 1) and one(ix.succ_out, x1) == y1:
                        put(y1, i)
        if z == a1 and x in here:
            x1 = one(ix.next_out, x)
            if not (member(x1, j + 1) and one(ix.succ_out, x1) == y1):
                continue
            head_elsewhere = h is not None and h != y and member(h, j)
            if head_elsewhere and one(ix.succ_out, y1) == a2:
                put(y1, i)
            if h == y:
                z1 = one(ix.succ_out, y1)
                if member(z1, j + 1) and one(ix.succ_out, z1) == a2:
                    put(y1, i)
                    put(z1, i + 1)
    return out


# -------------------------------------------------------- reduction


@dataclass(frozen=True)
class MachineInput:
    tape: tuple[str, ...]  # whole initial tape, normally starting with '>'
    moves: int

    @classmethod
    def for_input(cls, x, mo: ObliviousMachine) -> "MachineInput":
        syms = as_symbols(x)
        return cls((FIRST, *syms), schedule_moves(len(syms), mo.bound(len(syms))))

    @property
    def string(self) -> tuple[str, ...] | None:
        return self.tape[1:] if self.tape and self.tape[0] == FIRST else None

    def render(self) -> str:
        shown = " ".join(self.tape[1:]) if self.string is not None else "raw " + " ".join(self.tape)
        return f"MachineInput [{shown}] moves {self.moves}"


@dataclass(frozen=True)
class FixedYes:
    def render(self) -> str:
        return "FixedYes"


@dataclass(frozen=True)
class FixedNo:
    def render(self) -> str:
        return "FixedNo"


@dataclass(frozen=True)
class ReductionOutcome:
    case: str
    result: MachineInput | FixedYes | FixedNo
    detail: str = ""

    def __post_init__(self):
        if isinstance(self.result, FixedNo) != (self.case == "case1"):
            raise EmbeddingError("FixedNo goes with case1 only")
        if isinstance(self.result, FixedYes) != (self.case == "case2"):
            raise EmbeddingError("FixedYes goes with case2 only")

    def render(self) -> str:
        return f"{self.case} {self.result.render()}"


def reverse_reduce(b: Structure, mo: ObliviousMachine, f: StepPolynomial | None = None) -> ReductionOutcome:
    mo = _with_bound(mo, f)
    v = check_fo_constraints(b)
    if v is not None:
        return ReductionOutcome("case1", FixedNo(), v.render())
    ms = forced_marking(b, mo)
    if ms.verdict_row is None:
        return ReductionOutcome("case2", FixedYes(), ms.stop_reason)
    return ReductionOutcome("case3", MachineInput(ms.machine_tape, ms.verdict_row), ms.stop_reason)


def decide_sat_phi(b: Structure, mo: ObliviousMachine, f: StepPolynomial | None = None, step_cap: int = 100_000) -> bool:
    mo = _with_bound(mo, f)
    out = reverse_reduce(b, mo)
    if out.case == "case1":
        return False
    if out.case == "case2":
        return True
    mi = out.result
    return simulate(mo, mi.tape, raw=True, moves=mi.moves, step_cap=step_cap).accept


# ----------------------------------------------------------- bundles


@dataclass(frozen=True)
class EmbeddingBundle:
    """Machine, step bound and the two fixed inputs used for case 1 and case 2."""

    oblivious: ObliviousMachine
    yes: tuple[str, ...]
    no: tuple[str, ...]
    machine_text: str
    sweeping: tuple[str, ...] | None = None  # accepting states if the machine is already sweeping

    def validate(self) -> None:
        if not simulate(self.oblivious, self.yes).accept:
            raise EmbeddingError(f"fixed yes input {' '.join(self.yes)!r} is rejected")
        if simulate(self.oblivious, self.no).accept:
            raise EmbeddingError(f"fixed no input {' '.join(self.no)!r} is accepted")

    def machine_input(self, outcome: ReductionOutcome) -> MachineInput:
        if isinstance(outcome.result, MachineInput):
            return outcome.result
        x = self.yes if isinstance(outcome.result, FixedYes) else self.no
        return MachineInput.for_input(x, self.oblivious)


def parse_bundle(text: str) -> EmbeddingBundle:
    machine_lines: list[str] = []
    steps = yes = no = sweeping = None
    in_machine = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("snpforge-format"):
            continue
        if in_machine:
            if line == "end":
                in_machine = False
            else:
                machine_lines.append(line)
            continue
        head, _, rest = line.partition(" ")
        if head == "machine":
            in_machine = True
        elif head == "steps":
            steps = StepPolynomial.parse(rest.strip(), zero_allowed=True)
        elif head == "yes":
            yes = tuple(rest.split())
        elif head == "no":
            no = tuple(rest.split())
        elif head == "sweeping":
            sweeping = tuple(rest.split())
        else:
            raise EmbeddingError(f"unknown bundle line {line!r}")
    if in_machine:
        raise EmbeddingError("machine section is missing its 'end' line")
    if not machine_lines or steps is None or yes is None or no is None:
        raise EmbeddingError("bundle needs machine, steps, yes and no entries")
    machine_text = "\n".join(machine_lines)
    base = parse_machine(machine_text)
    if sweeping is not None:
        mo = ObliviousMachine(base, steps, frozenset(sweeping))
    else:
        mo = make_oblivious(ClockedMachine(base, steps))
    bundle = EmbeddingBundle(mo, yes, no, machine_text, sweeping)
    bundle.validate()
    return bundle


def render_bundle(bundle: EmbeddingBundle) -> str:
    out = ["snpforge-format 1", "machine", bundle.machine_text, "end", f"steps {bundle.oblivious.bound.render()}"]
    if bundle.sweeping is not None:
        out.append("sweeping " + " ".join(bundle.sweeping))
    out += ["yes " + " ".join(bundle.yes), "no " + " ".join(bundle.no)]
    return "\n".join(out) + "\n"
