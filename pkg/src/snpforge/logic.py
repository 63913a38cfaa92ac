"""Sentences in negated-conjunct normal form: AST, text syntax, fragment classification."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

INPUT = "input"
EXISTENTIAL = "existential"

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


class SentenceError(ValueError):
    """Parse or validation failure, with an optional source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class RelationSymbol:
    name: str
    arity: int
    kind: str = INPUT

    def __post_init__(self):
        if self.arity < 1:
            raise SentenceError(f"symbol {self.name} must have arity >= 1")
        if not _IDENT.fullmatch(self.name):
            raise SentenceError(f"bad symbol name {self.name!r}")


@dataclass(frozen=True)
class Signature:
    symbols: tuple[RelationSymbol, ...] = ()

    def __post_init__(self):
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise SentenceError(f"duplicate symbol in signature: {names}")

    @classmethod
    def of(cls, *pairs: tuple[str, int], kind: str = INPUT) -> "Signature":
        return cls(tuple(RelationSymbol(n, a, kind) for n, a in pairs))

    def __iter__(self) -> Iterator[RelationSymbol]:
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, name: object) -> bool:
        if isinstance(name, RelationSymbol):
            name = name.name
        return any(s.name == name for s in self.symbols)

    def __getitem__(self, name: str) -> RelationSymbol:
        for s in self.symbols:
            if s.name == name:
                return s
        raise KeyError(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.symbols)

    def without(self, names: Iterable[str]) -> "Signature":
        drop = set(names)
        return Signature(tuple(s for s in self.symbols if s.name not in drop))

    def union(self, other: "Signature") -> "Signature":
        return Signature(self.symbols + tuple(s for s in other.symbols if s.name not in self))


@dataclass(frozen=True)
class Atom:
    symbol: str
    args: tuple[str, ...]

    def render(self) -> str:
        return f"{self.symbol}({','.join(self.args)})"


@dataclass(frozen=True)
class Lit:
    """A possibly negated atom."""

    atom: Atom
    positive: bool = True

    @property
    def variables(self) -> tuple[str, ...]:
        return self.atom.args

    def render(self) -> str:
        return ("" if self.positive else "!") + self.atom.render()


@dataclass(frozen=True)
class Inequality:
    left: str
    right: str

    @property
    def variables(self) -> tuple[str, ...]:
        return (self.left, self.right)

    def key(self) -> frozenset:
        return frozenset((self.left, self.right))

    def render(self) -> str:
        return f"{self.left} != {self.right}"


Literal = Lit | Inequality


def pos(symbol: str, *args: str) -> Lit:
    return Lit(Atom(symbol, tuple(args)), True)


def neg(symbol: str, *args: str) -> Lit:
    return Lit(Atom(symbol, tuple(args)), False)


def _dedup(items: Iterable) -> tuple:
    return tuple(dict.fromkeys(items))


@dataclass(frozen=True)
class NegatedConjunct:
    tau_literals: tuple[Lit, ...] = ()
    sigma_literals: tuple[Lit, ...] = ()
    inequalities: tuple[Inequality, ...] = ()

    def __post_init__(self):
        # duplicates of the same literal (incl. x!=y vs y!=x) carry no meaning
        object.__setattr__(self, "tau_literals", _dedup(self.tau_literals))
        object.__setattr__(self, "sigma_literals", _dedup(self.sigma_literals))
        seen: dict[frozenset, Inequality] = {}
        for e in self.inequalities:
            seen.setdefault(e.key(), e)
        object.__setattr__(self, "inequalities", tuple(seen.values()))

    def ordered_literals(self) -> list[Literal]:
        """Literals in rendering order: tau+, tau-, sigma+, sigma-, inequalities."""
        out: list[Literal] = []
        out += [l for l in self.tau_literals if l.positive]
        out += [l for l in self.tau_literals if not l.positive]
        out += [l for l in self.sigma_literals if l.positive]
        out += [l for l in self.sigma_literals if not l.positive]
        out += list(self.inequalities)
        return out

    def variables(self) -> tuple[str, ...]:
        """Variables in first-occurrence order of the rendered literal order."""
        seen: dict[str, None] = {}
        for lit in self.ordered_literals():
            for v in lit.variables:
                seen.setdefault(v)
        return tuple(seen)

    def is_empty(self) -> bool:
        return not (self.tau_literals or self.sigma_literals or self.inequalities)

    def rename(self, mapping: dict[str, str]) -> "NegatedConjunct":
        """Apply a variable substitution; may identify variables."""

        def ren_lit(l: Lit) -> Lit:
            return Lit(Atom(l.atom.symbol, tuple(mapping.get(v, v) for v in l.atom.args)), l.positive)

        ineqs = tuple(Inequality(mapping.get(e.left, e.left), mapping.get(e.right, e.right)) for e in self.inequalities)
        return NegatedConjunct(
            tuple(ren_lit(l) for l in self.tau_literals),
            tuple(ren_lit(l) for l in self.sigma_literals),
            ineqs,
        )

    def canonical(self) -> "NegatedConjunct":
        """Literals regrouped into rendering order and variables renamed v0, v1, ..."""
        lits = self.ordered_literals()
        regrouped = NegatedConjunct(
            tuple(l for l in lits if isinstance(l, Lit) and l in self.tau_literals),
            tuple(l for l in lits if isinstance(l, Lit) and l in self.sigma_literals),
            self.inequalities,
        )
        mapping = {v: f"v{i}" for i, v in enumerate(regrouped.variables())}
        return regrouped.rename(mapping)

    def literals(self) -> list[Literal]:
        return [*self.tau_literals, *self.sigma_literals, *self.inequalities]

    def render(self) -> str:
        return "forbid " + ", ".join(l.render() for l in self.ordered_literals()) + ";"


@dataclass(frozen=True)
class SnpSentence:
    input_sig: Signature
    existential_sig: Signature
    conjuncts: tuple[NegatedConjunct, ...] = field(default=())

    def __post_init__(self):
        # drop alpha-equivalent duplicates, keep first occurrence
        seen: set = set()
        kept = []
        for c in self.conjuncts:
            key = c.canonical()
            if key not in seen:
                seen.add(key)
                kept.append(c)
        object.__setattr__(self, "conjuncts", tuple(kept))

    def alpha_key(self) -> tuple:
        return (self.input_sig, self.existential_sig, frozenset(c.canonical() for c in self.conjuncts))

    def alpha_equal(self, other: "SnpSentence") -> bool:
        return self.alpha_key() == other.alpha_key()

    def with_conjuncts(self, conjuncts: Iterable[NegatedConjunct]) -> "SnpSentence":
        return SnpSentence(self.input_sig, self.existential_sig, tuple(conjuncts))


def make_conjunct(literals: Sequence[Literal], input_names: Iterable[str]) -> NegatedConjunct:
    """Sort a flat literal list into tau/sigma/inequality groups."""
    tau_names = set(input_names)
    tau, sigma, ineq = [], [], []
    for l in literals:
        if isinstance(l, Inequality):
            ineq.append(l)
        elif l.atom.symbol in tau_names:
            tau.append(l)
        else:
            sigma.append(l)
    return NegatedConjunct(tuple(tau), tuple(sigma), tuple(ineq))


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s+|#[^\n]*|!=|[A-Za-z][A-Za-z0-9_]*|\d+|[;,()/!]|.", re.S)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    for m in _TOKEN.finditer(text):
        s = m.group(0)
        if not (s.isspace() or s.startswith("#")):
            if _IDENT.fullmatch(s):
                kind = "ident"
            elif s.isdigit():
                kind = "int"
            elif s in {";", ",", "(", ")", "/", "!", "!="}:
                kind = s
            else:
                raise SentenceError(f"unexpected character {s!r}", line, col)
            toks.append(_Tok(kind, s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self, kind: str, text: str | None = None) -> _Tok:
        t = self.toks[self.i]
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            raise SentenceError(f"expected {want!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        self.i += 1
        return t

    def decls(self, kind: str) -> list[tuple[RelationSymbol, _Tok]]:
        out = []
        if self.peek().kind == ";":
            return out
        while True:
            name = self.take("ident")
            self.take("/")
            ar = self.take("int")
            if int(ar.text) < 1:
                raise SentenceError(f"arity of {name.text} must be >= 1", ar.line, ar.col)
            out.append((RelationSymbol(name.text, int(ar.text), kind), name))
            if self.peek().kind != ",":
                return out
            self.take(",")

    def sentence(self) -> SnpSentence:
        self.take("ident", "input")
        tau = self.decls(INPUT)
        self.take(";")
        self.take("ident", "exists")
        sig = self.decls(EXISTENTIAL)
        self.take(";")
        declared: dict[str, RelationSymbol] = {}
        for sym, tok in tau + sig:
            if sym.name in declared:
                raise SentenceError(f"symbol {sym.name} declared twice", tok.line, tok.col)
            declared[sym.name] = sym
        tau_sig = Signature(tuple(s for s, _ in tau))
        conjuncts = []
        while self.peek().kind != "eof":
            conjuncts.append(self.conjunct(declared, tau_sig))
        return SnpSentence(tau_sig, Signature(tuple(s for s, _ in sig)), tuple(conjuncts))

    def conjunct(self, declared: dict[str, RelationSymbol], tau_sig: Signature) -> NegatedConjunct:
        self.take("ident", "forbid")
        lits = [self.literal(declared)]
        while self.peek().kind == ",":
            self.take(",")
            lits.append(self.literal(declared))
        self.take(";")
        return make_conjunct(lits, tau_sig.names)

    def literal(self, declared: dict[str, RelationSymbol]) -> Literal:
        positive = True
        if self.peek().kind == "!":
            self.take("!")
            positive = False
        head = self.take("ident")
        if positive and self.peek().kind == "!=":
            self.take("!=")
            rhs = self.take("ident")
            if rhs.text == head.text:
                raise SentenceError(f"inequality between identical variables {head.text}", head.line, head.col)
            return Inequality(head.text, rhs.text)
        self.take("(")
        args = [self.take("ident").text]
        while self.peek().kind == ",":
            self.take(",")
            args.append(self.take("ident").text)
        self.take(")")
        sym = declared.get(head.text)
        if sym is None:
            raise SentenceError(f"undeclared symbol {head.text}", head.line, head.col)
        if len(args) != sym.arity:
            raise SentenceError(
                f"arity mismatch: {head.text}/{sym.arity} applied to {len(args)} arguments", head.line, head.col
            )
        return Lit(Atom(head.text, tuple(args)), positive)


def parse_sentence(text: str) -> SnpSentence:
    s = _Parser(text).sentence()
    problems = validate(s)
    if problems:
        raise SentenceError(problems[0])
    return s


def _render_decls(sig: Signature) -> str:
    return ", ".join(f"{s.name}/{s.arity}" for s in sig)


def render_sentence(s: SnpSentence) -> str:
    lines = [f"input {_render_decls(s.input_sig)};", f"exists {_render_decls(s.existential_sig)};"]
    lines += [c.render() for c in s.conjuncts]
    return "\n".join(lines) + "\n"


def validate(s: SnpSentence) -> list[str]:
    """Diagnostics for every broken invariant; empty when the sentence is well formed."""
    out: list[str] = []
    clash = set(s.input_sig.names) & set(s.existential_sig.names)
    for name in sorted(clash):
        out.append(f"signature: {name} is both input and existential")
    for i, c in enumerate(s.conjuncts):
        if c.is_empty():
            out.append(f"conjunct {i}: empty conjunct")
        for l in c.tau_literals:
            if l.atom.symbol not in s.input_sig:
                out.append(f"conjunct {i}: {l.atom.symbol} is not a declared input symbol")
            elif s.input_sig[l.atom.symbol].arity != len(l.atom.args):
                out.append(f"conjunct {i}: arity mismatch in {l.render()}")
        for l in c.sigma_literals:
            if l.atom.symbol not in s.existential_sig:
                out.append(f"conjunct {i}: {l.atom.symbol} is not a declared existential symbol")
            elif s.existential_sig[l.atom.symbol].arity != len(l.atom.args):
                out.append(f"conjunct {i}: arity mismatch in {l.render()}")
        for e in c.inequalities:
            if e.left == e.right:
                out.append(f"conjunct {i}: inequality {e.render()} between identical variables")
    return out


# ---------------------------------------------------------- classification

FLAGS = (
    "is_snp",
    "is_monadic",
    "is_monotone_syntactic",
    "has_no_inequality",
    "is_mmsnp",
    "is_gmmsnp_ineq",
    "is_gmsnp",
    "is_gmpart_ineq",
    "is_mpart",
    "is_connected",
    "is_enriched",
)


@dataclass(frozen=True)
class Witness:
    """Why a flag is false: the offending conjunct (None for signature-level reasons)."""

    conjunct: int | None
    reason: str
    partition: tuple[tuple[Literal, ...], ...] | None = None


@dataclass(frozen=True)
class FragmentReport:
    flags: dict
    witnesses: dict

    def __getattr__(self, name: str):
        flags = object.__getattribute__(self, "flags")
        if name in flags:
            return flags[name]
        raise AttributeError(name)

    def labels(self) -> list[str]:
        """Short fragment names for the flags that hold."""
        names = [
            ("is_mmsnp", "MMSNP"),
            ("is_gmmsnp_ineq", "GMMSNP≠"),
            ("is_gmsnp", "GMSNP"),
            ("is_mpart", "MPART"),
            ("is_gmpart_ineq", "GMPART≠"),
            ("is_connected", "connected"),
        ]
        out = [label for flag, label in names if self.flags[flag]]
        # MPART subsumes GMPART≠ in the short listing
        if "MPART" in out and "GMPART≠" in out:
            out.remove("GMPART≠")
        return out


def components(c: NegatedConjunct) -> list[tuple[Literal, ...]]:
    """Split a conjunct's literals into variable-connected groups."""
    lits = c.literals()
    parent = list(range(len(lits)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[str, int] = {}
    for i, l in enumerate(lits):
        for v in l.variables:
            if v in owner:
                parent[find(i)] = find(owner[v])
            else:
                owner[v] = i
    groups: dict[int, list[Literal]] = {}
    for i, l in enumerate(lits):
        groups.setdefault(find(i), []).append(l)
    return [tuple(g) for g in groups.values()]


def _guarded_ineq(c: NegatedConjunct, e: Inequality) -> bool:
    return any(e.left in l.variables and e.right in l.variables for l in c.tau_literals)


def classify(s: SnpSentence) -> FragmentReport:
    w: dict[str, Witness | None] = {f: None for f in FLAGS}

    def fail(flag: str, idx: int | None, reason: str, partition=None) -> None:
        if w[flag] is None:
            w[flag] = Witness(idx, reason, partition)

    for sym in s.existential_sig:
        if sym.arity != 1:
            fail("is_monadic", None, f"existential symbol {sym.name} has arity {sym.arity}")
    for i, c in enumerate(s.conjuncts):
        negs = [l for l in c.tau_literals if not l.positive]
        poss = [l for l in c.tau_literals if l.positive]
        if negs:
            fail("is_monotone_syntactic", i, f"negated input atom {negs[0].render()}")
            if poss:
                fail("is_gmpart_ineq", i, "input literals mix positive and negated atoms")
        if c.inequalities:
            fail("has_no_inequality", i, f"inequality {c.inequalities[0].render()}")
        for e in c.inequalities:
            if not _guarded_ineq(c, e):
                fail("is_gmmsnp_ineq", i, f"inequality {e.render()} not covered by an input atom")
                fail("is_gmpart_ineq", i, f"inequality {e.render()} not covered by an input atom")
        guards = [set(l.variables) for l in c.tau_literals if l.positive]
        guards += [set(l.variables) for l in c.sigma_literals if l.positive]
        for l in c.sigma_literals:
            if not l.positive and not any(set(l.variables) <= g for g in guards):
                fail("is_gmsnp", i, f"negated atom {l.render()} has no guard")
        parts = components(c)
        if len(parts) > 1:
            fail("is_connected", i, f"splits into {len(parts)} variable-disjoint groups", tuple(parts))
        present = {l.atom.symbol for l in c.tau_literals if l.positive}
        missing = [n for n in s.input_sig.names if n not in present]
        if missing:
            fail("is_enriched", i, f"no positive atom over {missing[0]}")

    # composite fragments inherit the first failing component's witness
    def inherit(flag: str, parts: Sequence[str]) -> None:
        for p in parts:
            if w[p] is not None:
                fail(flag, w[p].conjunct, f"{p}: {w[p].reason}", w[p].partition)

    inherit("is_mmsnp", ["is_monadic", "is_monotone_syntactic", "has_no_inequality"])
    inherit("is_gmmsnp_ineq", ["is_monadic", "is_monotone_syntactic"])
    inherit("is_gmsnp", ["is_monotone_syntactic", "has_no_inequality"])
    inherit("is_gmpart_ineq", ["is_monadic"])
    inherit("is_mpart", ["is_gmpart_ineq", "has_no_inequality"])

    flags = {f: w[f] is None for f in FLAGS}
    return FragmentReport(flags, {f: v for f, v in w.items() if v is not None})
