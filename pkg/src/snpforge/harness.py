"""Seeded random sentences and structures, and batch certification of every reduction."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from itertools import product

from .checker import BUDGET_EXCEEDED, SATISFIED, Budget, check_sat
from .embedding import (
    MachineInput,
    _grid,
    build_grid,
    build_sentence,
    decide_sat_phi,
    reverse_reduce,
)
from .gmmsnp import TransformError, enrich_inequalities, find_fixed_instances, structure_forward, to_mmsnp
from .gmsnp import (
    compile_to_single,
    reduce_instance_stage1,
    reduce_instance_stage2,
    structure_to_single,
)
from .logic import (
    Atom,
    Inequality,
    Lit,
    NegatedConjunct,
    RelationSymbol,
    Signature,
    SnpSentence,
    classify,
    render_sentence,
)
from .matrix import PartitionMatrix, loopless_digraphs, m_partition_check, matrix_to_sentence
from .rng import ALGORITHM, CounterRng
from .structures import Structure, all_structures, render_structure
from .turing import ClockedMachine, StepPolynomial, make_oblivious, parse_machine, simulate, sweeping_acceptor

FRAGMENT_FLAGS = {
    "MMSNP": "is_mmsnp",
    "GMMSNP≠": "is_gmmsnp_ineq",
    "GMSNP": "is_gmsnp",
    "MPART": "is_mpart",
    "GMPART≠": "is_gmpart_ineq",
}
FRAGMENT_ALIASES = {"GMMSNP!=": "GMMSNP≠", "GMPART!=": "GMPART≠", "GMMSNP-ne": "GMMSNP≠", "GMPART-ne": "GMPART≠"}
SAMPLING_CAP = 2000

REDUCTIONS = (
    "gmmsnp-enrich",
    "gmmsnp-to-mmsnp",
    "gmsnp-prune",
    "gmsnp-enrich",
    "gmsnp-concat",
    "matrix-agree",
    "np-roundtrip",
    "phi-oracle-agree",
)

TOY_MACHINE = """
states q0 q1 acc rej; start q0; accept acc; reject rej; alphabet a b;
delta q0 > -> q1 > R; delta q1 a -> q1 a R; delta q1 a -> acc b L; delta q1 b -> q0 a L;
delta q0 a -> q1 a R; delta q0 b -> q1 b R; delta q1 _ -> rej _ L;
"""
TOY_STEPS = "0,1"


class HarnessError(RuntimeError):
    pass


def canonical_fragment(name: str) -> str:
    name = FRAGMENT_ALIASES.get(name, name)
    if name not in FRAGMENT_FLAGS:
        raise HarnessError(f"unknown fragment {name!r}; expected one of {', '.join(FRAGMENT_FLAGS)}")
    return name


# ----------------------------------------------------------- structures


def random_structure(sig: Signature, size: int, density: float, seed: int, stream: str = "structure") -> Structure:
    """Each potential tuple is kept independently with probability `density`."""
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = CounterRng(seed, stream)
    rels = {}
    for sym in sig:
        rels[sym.name] = frozenset(t for t in product(range(size), repeat=sym.arity) if rng.bernoulli(density))
    return Structure(sig, size, rels)


# ------------------------------------------------------------ sentences


@dataclass(frozen=True)
class SentenceParams:
    input_symbols: tuple[tuple[str, int], ...] = (("R", 2),)
    existential_count: int = 3
    existential_arity: int = 1
    max_conjuncts: int = 3
    max_variables: int = 3
    max_input_literals: int = 2
    max_existential_literals: int = 2
    inequality_rate: float = 0.4
    negated_input_rate: float = 0.5  # partition fragments only
    cover_rate: float = 0.6  # chance the first conjunct says "every element has some symbol"
    positive_rate: float = 0.85
    connected: bool = False

    def __post_init__(self):
        if self.existential_count < 1 or self.max_conjuncts < 1 or self.max_variables < 1:
            raise ValueError("sentence bounds must be positive")
        if any(a < 1 or a > 3 for _, a in self.input_symbols):
            raise ValueError("input arities must lie in 1..3")


def _conjunct(
    rng: CounterRng, fragment: str, p: SentenceParams, tau: Signature, sigma: Signature, cover: bool = False
) -> NegatedConjunct:
    nvars = rng.randint(1, p.max_variables)
    vs = [f"x{i}" for i in range(nvars)]
    partition = fragment in ("MPART", "GMPART≠")
    negate_tau = partition and rng.bernoulli(p.negated_input_rate)
    tau_lits = []
    n_tau = 0 if cover else rng.randint(1, p.max_input_literals)
    for _ in range(n_tau):
        sym = rng.choice(tau.symbols)
        tau_lits.append(Lit(Atom(sym.name, tuple(rng.choice(vs) for _ in range(sym.arity))), not negate_tau))
    sig_lits = []
    if not n_tau:
        # cover: every element carries some existential symbol
        for sym in sigma.symbols:
            sig_lits.append(Lit(Atom(sym.name, tuple(vs[0] for _ in range(sym.arity))), False))
    for _ in range(rng.randint(1, p.max_existential_literals) if n_tau else 0):
        sym = rng.choice(sigma.symbols)
        positive = rng.bernoulli(p.positive_rate)
        used = sorted({v for l in tau_lits for v in l.atom.args})
        sig_lits.append(Lit(Atom(sym.name, tuple(rng.choice(used) for _ in range(sym.arity))), positive))
    ineqs = []
    if fragment in ("GMMSNP≠", "GMPART≠") and rng.bernoulli(p.inequality_rate):
        wide = [l for l in tau_lits if len(set(l.atom.args)) >= 2]
        if wide:
            args = sorted(set(rng.choice(wide).atom.args))
            i = rng.randbelow(len(args))
            j = rng.randbelow(len(args) - 1)
            j += j >= i
            ineqs.append(Inequality(args[i], args[j]))
    return NegatedConjunct(tuple(tau_lits), tuple(sig_lits), tuple(ineqs))


def random_sentence(fragment: str, params: SentenceParams | None = None, seed: int = 0, stream: str = "sentence") -> SnpSentence:
    """Rejection-sample until the fragment's classifier flag holds."""
    fragment = canonical_fragment(fragment)
    p = params or SentenceParams()
    flag = FRAGMENT_FLAGS[fragment]
    tau = Signature(tuple(RelationSymbol(n, a) for n, a in p.input_symbols))
    arity = p.existential_arity if fragment == "GMSNP" else 1
    rng = CounterRng(seed, stream)
    for _ in range(SAMPLING_CAP):
        arities = [rng.randint(1, arity) for _ in range(rng.randint(1, p.existential_count))]
        sigma = Signature.of(*[(f"X{i}", a) for i, a in enumerate(arities)], kind="existential")
        count = rng.randint(1, p.max_conjuncts)
        cover = count > 1 and rng.bernoulli(p.cover_rate)
        conj = [_conjunct(rng, fragment, p, tau, sigma, cover and k == 0) for k in range(count)]
        phi = SnpSentence(tau, sigma, tuple(conj))
        rep = classify(phi)
        if rep.flags[flag] and (not p.connected or rep.is_connected):
            return phi
    raise HarnessError(f"no {fragment} sentence after {SAMPLING_CAP} draws")


# --------------------------------------------------------- certification


@dataclass(frozen=True)
class TrialConfig:
    seed: int = 0
    trials: int = 100
    max_domain: int = 5
    max_conjuncts: int = 4
    max_arity: int = 3
    fragment: str | None = None
    structures_per_sentence: int = 20
    budget_nodes: int = 10**6
    budget_millis: int = 60_000
    input_symbols: tuple[tuple[str, int], ...] | None = None  # overrides the per-fragment default

    def __post_init__(self):
        for name in ("trials", "max_domain", "max_conjuncts", "max_arity", "structures_per_sentence",
                     "budget_nodes", "budget_millis"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def budget(self) -> Budget:
        return Budget(self.budget_nodes, self.budget_millis)


@dataclass(frozen=True)
class Trial:
    index: int
    digest: str
    lhs: str
    rhs: str
    outcome: str  # agree | DISAGREE | BUDGET
    rendered: str = ""  # full inputs, kept for replay

    def line(self) -> str:
        return f"trial {self.index} {self.digest} {self.lhs} {self.rhs} {self.outcome}"


@dataclass
class TrialReport:
    reduction: str
    config: TrialConfig
    trials: list[Trial] = field(default_factory=list)

    def count(self, outcome: str) -> int:
        return sum(1 for t in self.trials if t.outcome == outcome)

    @property
    def agree(self) -> int:
        return self.count("agree")

    @property
    def disagree(self) -> int:
        return self.count("DISAGREE")

    @property
    def budget_exceeded(self) -> int:
        return self.count("BUDGET")

    @property
    def passed(self) -> bool:
        return self.disagree == 0

    @property
    def first_counterexample(self) -> Trial | None:
        return next((t for t in self.trials if t.outcome == "DISAGREE"), None)

    def render(self) -> str:
        lines = [t.line() for t in sorted(self.trials, key=lambda t: t.index)]
        lines.append(
            f"totals reduction={self.reduction} trials={len(self.trials)} agree={self.agree} "
            f"disagree={self.disagree} budget={self.budget_exceeded} seed={self.config.seed} prng={ALGORITHM}"
        )
        ce = self.first_counterexample
        if ce is not None:
            lines.append(f"counterexample trial {ce.index}")
            lines.append(ce.rendered.rstrip("\n"))
        return "\n".join(lines) + "\n"


def _digest(text: str) -> str:
    return hashlib.blake2b(text.encode(), digest_size=6).hexdigest()


def _verdict(r) -> str:
    if r.verdict == BUDGET_EXCEEDED:
        return "budget"
    return "sat" if r.verdict == SATISFIED else "unsat"


def _trial(i: int, lhs: str, rhs: str, rendered: str) -> Trial:
    if "budget" in (lhs, rhs):
        outcome = "BUDGET"
    else:
        outcome = "agree" if lhs == rhs else "DISAGREE"
    return Trial(i, _digest(rendered), lhs, rhs, outcome, rendered)


def _render_pair(phi: SnpSentence, a: Structure, extra: str = "") -> str:
    return "sentence\n" + render_sentence(phi) + "structure\n" + render_structure(a) + "\n" + extra


def _params(config: TrialConfig, fragment: str) -> SentenceParams:
    if fragment == "GMSNP":
        return SentenceParams(
            input_symbols=config.input_symbols or (("E", 2), ("U", 1)),
            existential_count=2,
            existential_arity=2,
            max_conjuncts=min(3, config.max_conjuncts),
            max_variables=3,
            inequality_rate=0.0,
            # negated existential literals are what make GMSNP sentences nontrivial
            positive_rate=0.6,
            connected=True,
        )
    arities = [a for a in (2, 3) if a <= config.max_arity] or [config.max_arity]
    names = ("R", "T")
    return SentenceParams(
        input_symbols=config.input_symbols or tuple(zip(names, arities)),
        existential_count=3,
        max_conjuncts=min(3, config.max_conjuncts),
        max_variables=3,
    )


def _sentence_structure(config: TrialConfig, fragment: str, i: int) -> tuple[SnpSentence, Structure]:
    k = config.structures_per_sentence
    phi = random_sentence(fragment, _params(config, fragment), config.seed, f"sentence/{i // k}")
    rng = CounterRng(config.seed, f"shape/{i}")
    size = rng.randint(1, config.max_domain)
    density = rng.choice((0.2, 0.35, 0.5, 0.7))
    a = random_structure(phi.input_sig, size, density, config.seed, f"structure/{i}")
    return phi, a


def _certify_gmmsnp(config: TrialConfig, i: int, to_monadic: bool) -> Trial:
    phi, a = _sentence_structure(config, config.fragment or "GMMSNP≠", i)
    lhs = _verdict(check_sat(phi, a, config.budget))
    if to_monadic:
        psi, b = to_mmsnp(phi), structure_forward(a)
    else:
        psi, b = enrich_inequalities(phi), a
    rhs = _verdict(check_sat(psi, b, config.budget))
    return _trial(i, lhs, rhs, _render_pair(phi, a))


@dataclass(frozen=True)
class CompiledGmsnp:
    original: SnpSentence
    single: SnpSentence
    trace: object  # gmsnp.StageTrace
    pruned_no: Structure  # NO instance over the pruned signature

    def stage(self, name: str):
        """(source sentence, target sentence, instance map) for one compiler stage."""
        t = self.trace
        if name == "prune":
            return self.original, t.pruned, lambda a: reduce_instance_stage1(a, t.removed_symbols, self.pruned_no)
        if name == "enrich":
            return t.pruned, t.enriched, reduce_instance_stage2
        if name == "concat":
            return t.enriched, self.single, structure_to_single
        raise HarnessError(f"unknown stage {name!r}")

    def agreement(self, name: str, a: Structure, budget: Budget) -> tuple[str, str]:
        src, dst, fwd = self.stage(name)
        return _verdict(check_sat(src, a, budget)), _verdict(check_sat(dst, fwd(a), budget))


_COMPILED: dict = {}


def compiled_gmsnp(config: TrialConfig, slot: int) -> CompiledGmsnp:
    """A compilable connected GMSNP sentence for a sentence slot (trivial draws are resampled)."""
    key = (config, slot)
    if key not in _COMPILED:
        params = _params(config, "GMSNP")
        for attempt in range(200):
            phi = random_sentence("GMSNP", params, config.seed, f"sentence/{slot}/{attempt}")
            try:
                single, trace = compile_to_single(phi, config.budget)
                pruned_no = find_fixed_instances(trace.pruned, budget=config.budget)[1]
            except (TransformError, RuntimeError):
                continue
            _COMPILED[key] = CompiledGmsnp(phi, single, trace, pruned_no)
            break
        else:
            raise HarnessError(f"no compilable GMSNP sentence for slot {slot}")
    return _COMPILED[key]


def _certify_gmsnp(config: TrialConfig, i: int, stage: str) -> Trial:
    c = compiled_gmsnp(config, i // config.structures_per_sentence)
    src, _, _ = c.stage(stage)
    rng = CounterRng(config.seed, f"shape/{i}")
    size = rng.randint(1, config.max_domain)
    a = random_structure(src.input_sig, size, rng.choice((0.1, 0.2, 0.3, 0.5)), config.seed, f"structure/{i}")
    lhs, rhs = c.agreement(stage, a, config.budget)
    return _trial(i, lhs, rhs, _render_pair(src, a))


def exhaustive_gmsnp_report(config: TrialConfig, stage: str, sentences: int, max_size: int) -> TrialReport:
    """Every structure up to max_size over each stage's source signature, for `sentences` slots."""
    report = TrialReport(f"gmsnp-{stage}", config)
    i = 0
    for slot in range(sentences):
        c = compiled_gmsnp(config, slot)
        src, _, _ = c.stage(stage)
        for n in range(max_size + 1):
            for a in all_structures(src.input_sig, n):
                lhs, rhs = c.agreement(stage, a, config.budget)
                report.trials.append(_trial(i, lhs, rhs, _render_pair(src, a)))
                i += 1
    return report


MATRICES = (
    PartitionMatrix.of([["0", "*"], ["*", "0"]]),
    PartitionMatrix.of([["0", "*", "*"], ["*", "0", "*"], ["*", "*", "0"]]),
    PartitionMatrix.of([["1"]]),
    PartitionMatrix.of([["*"]]),
)


def _certify_matrix(config: TrialConfig, i: int) -> Trial:
    m = MATRICES[i % len(MATRICES)]
    rng = CounterRng(config.seed, f"shape/{i}")
    size = rng.randint(1, min(config.max_domain, 5))
    g = random_structure(matrix_to_sentence(m).input_sig, size, rng.choice((0.2, 0.4, 0.6)), config.seed, f"graph/{i}")
    g = Structure(g.signature, size, {"E": frozenset(t for t in g["E"] if t[0] != t[1])})
    lhs = "sat" if m_partition_check(g, m) else "unsat"
    rhs = _verdict(check_sat(matrix_to_sentence(m), g, config.budget))
    return _trial(i, lhs, rhs, m.render() + "\nstructure\n" + render_structure(g) + "\n")


def toy_oblivious():
    return make_oblivious(ClockedMachine(parse_machine(TOY_MACHINE), StepPolynomial.parse(TOY_STEPS)))


def nth_string(i: int, letters: tuple[str, ...]) -> tuple[str, ...]:
    """i-th nonempty string in length-then-lexicographic order."""
    n, k = 1, len(letters)
    while i >= k**n:
        i -= k**n
        n += 1
    out = []
    for _ in range(n):
        i, r = divmod(i, k)
        out.append(letters[r])
    return tuple(reversed(out))


def _certify_roundtrip(config: TrialConfig, i: int, mo) -> Trial:
    x = nth_string(i, mo.source.plain_symbols)
    b = build_grid(x, mo)
    out = reverse_reduce(b, mo)
    lhs = "accept" if simulate(mo, x).accept else "reject"
    rhs = "accept" if decide_sat_phi(b, mo) else "reject"
    if out.result != MachineInput.for_input(x, mo):
        rhs = "misread"
    return _trial(i, lhs, rhs, f"input {' '.join(x)}\n{out.render()}\n")


def micro_instance(seed: int, i: int, complement: bool | None = None):
    """A mutated ten-element grid for the three-state sweeper (input length zero)."""
    rng = CounterRng(seed, f"micro/{i}")
    if complement is None:
        complement = bool(i % 2)
    mo = sweeping_acceptor(StepPolynomial.parse(TOY_STEPS), complement=complement)
    first = rng.choice((">", "a", "b"))
    b, _ = _grid((first,), mo, 0, 100)
    tuples = sorted((k, t) for k, v in b.relations.items() for t in v)
    rels = {k: set(v) for k, v in b.relations.items()}
    for _ in range(rng.randint(0, 2)):
        name, t = rng.choice(tuples)
        if rng.bernoulli(0.6):
            rels[name].discard(t)
        else:
            t2 = list(t)
            t2[rng.randbelow(len(t2))] = rng.randbelow(b.domain_size)
            rels[name].add(tuple(t2))
    return mo, Structure(b.signature, b.domain_size, {k: frozenset(v) for k, v in rels.items()})


_PHI_CACHE: dict = {}


def _certify_oracle(config: TrialConfig, i: int) -> Trial:
    mo, b = micro_instance(config.seed, i)
    key = tuple(sorted(mo.accepting_final))
    if key not in _PHI_CACHE:
        _PHI_CACHE[key] = build_sentence(mo).sentence
    phi = _PHI_CACHE[key]
    lhs = _verdict(check_sat(phi, b, config.budget))
    rhs = "sat" if decide_sat_phi(b, mo) else "unsat"
    final = ",".join(sorted(mo.accepting_final))
    return _trial(i, lhs, rhs, f"sweeper accepting {final}\nstructure\n{render_structure(b)}\n")


def certify(reduction: str, config: TrialConfig) -> TrialReport:
    if reduction not in REDUCTIONS:
        raise HarnessError(f"unknown reduction {reduction!r}; expected one of {', '.join(REDUCTIONS)}")
    report = TrialReport(reduction, config)
    mo = toy_oblivious() if reduction == "np-roundtrip" else None
    for i in range(config.trials):
        if reduction == "gmmsnp-enrich":
            t = _certify_gmmsnp(config, i, to_monadic=False)
        elif reduction == "gmmsnp-to-mmsnp":
            t = _certify_gmmsnp(config, i, to_monadic=True)
        elif reduction.startswith("gmsnp-"):
            t = _certify_gmsnp(config, i, reduction.split("-", 1)[1])
        elif reduction == "matrix-agree":
            t = _certify_matrix(config, i)
        elif reduction == "np-roundtrip":
            t = _certify_roundtrip(config, i, mo)
        else:
            t = _certify_oracle(config, i)
        report.trials.append(t)
    return report


def exhaustive_matrix_report(max_vertices: int = 4, matrices=MATRICES) -> TrialReport:
    """Every loopless digraph up to max_vertices against every listed matrix."""
    config = TrialConfig(trials=1)
    report = TrialReport("matrix-agree", config)
    i = 0
    for m in matrices:
        phi = matrix_to_sentence(m)
        for n in range(max_vertices + 1):
            for g in loopless_digraphs(n):
                lhs = "sat" if m_partition_check(g, m) else "unsat"
                rhs = _verdict(check_sat(phi, g))
                report.trials.append(_trial(i, lhs, rhs, m.render() + "\nstructure\n" + render_structure(g) + "\n"))
                i += 1
    return report
