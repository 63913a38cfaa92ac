"""Three-stage compiler from connected guarded monotone sentences to a single input relation.

Stage 1 drops input symbols whose one-tuple structure already fails the sentence.
Stage 2 pads every conjunct with one fresh atom per input symbol.
Stage 3 glues all input symbols into one wide relation P.
Each stage has a matching instance map; the composite is recorded in a StageTrace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from .checker import Budget, sat_bool
from .gmmsnp import TransformError
from .logic import Atom, Lit, NegatedConjunct, RelationSymbol, Signature, SnpSentence, classify
from .structures import Structure, disjoint_union, reduct, render_structure, singleton_structure

PRODUCT_CAP = 10**6
SINGLE_NAME = "P"


@dataclass(frozen=True)
class Block:
    symbol: str
    offset: int
    width: int

    def render(self) -> str:
        return f"{self.symbol}@{self.offset}..{self.offset + self.width}"


@dataclass
class StageTrace:
    removed_symbols: list[str] = field(default_factory=list)
    enrichment_map: list[list[str]] = field(default_factory=list)
    concat_layout: list[Block] = field(default_factory=list)
    fixed_yes: Structure | None = None
    fixed_no: Structure | None = None
    # intermediate sentences, for stage-wise certification
    pruned: SnpSentence | None = None
    enriched: SnpSentence | None = None

    def render(self) -> str:
        yes = render_structure(self.fixed_yes).rstrip(";") if self.fixed_yes is not None else "-"
        no = render_structure(self.fixed_no).rstrip(";") if self.fixed_no is not None else "-"
        return (
            f"removed: {','.join(self.removed_symbols)}; "
            f"layout: {','.join(b.render() for b in self.concat_layout)}; "
            f"yes: {yes}; no: {no}"
        )


def _require(phi: SnpSentence, connected: bool = True) -> None:
    rep = classify(phi)
    if not rep.is_gmsnp:
        raise TransformError(f"not a GMSNP sentence: {rep.witnesses['is_gmsnp'].reason}")
    if connected and not rep.is_connected:
        w = rep.witnesses["is_connected"]
        raise TransformError(f"conjunct {w.conjunct} is not connected; only connected sentences are compiled")


# ---------------------------------------------------------------- stage 1


def singleton_check(phi: SnpSentence, r: RelationSymbol | str, budget: Budget | None = None) -> bool:
    return sat_bool(phi, singleton_structure(phi.input_sig, r), budget)


def _mentions(c: NegatedConjunct, name: str) -> bool:
    return any(l.atom.symbol == name for l in c.tau_literals)


def prune_relation(phi: SnpSentence, r: RelationSymbol | str, budget: Budget | None = None) -> SnpSentence:
    name = r if isinstance(r, str) else r.name
    if singleton_check(phi, name, budget):
        raise TransformError(f"the one-tuple {name}-structure satisfies the sentence; {name} cannot be pruned")
    return SnpSentence(
        phi.input_sig.without([name]),
        phi.existential_sig,
        tuple(c for c in phi.conjuncts if not _mentions(c, name)),
    )


def reduce_instance_stage1(a: Structure, removed: list[str], fixed_no: Structure) -> Structure:
    """Any tuple of a pruned symbol makes the instance a NO instance."""
    if any(a.relations[r] for r in removed):
        return fixed_no
    return reduct(a, a.signature.without(removed))


def prune_all(phi: SnpSentence, budget: Budget | None = None) -> tuple[SnpSentence, list[str]]:
    """Prune to a fixpoint, scanning symbols in declaration order."""
    removed: list[str] = []
    changed = True
    while changed:
        changed = False
        for sym in phi.input_sig:
            if not singleton_check(phi, sym.name, budget):
                phi = prune_relation(phi, sym.name, budget)
                removed.append(sym.name)
                changed = True
                break
    return phi, removed


# ---------------------------------------------------------------- stage 2


def _fresh(prefix: str, taken: set[str]):
    i = 0
    while True:
        name = f"{prefix}{i}"
        i += 1
        if name not in taken:
            taken.add(name)
            yield name


def enrich_conjuncts(phi: SnpSentence) -> SnpSentence:
    out = []
    for c in phi.conjuncts:
        fresh = _fresh("u", set(c.variables()))
        extra = tuple(Lit(Atom(s.name, tuple(next(fresh) for _ in range(s.arity)))) for s in phi.input_sig)
        out.append(NegatedConjunct(c.tau_literals + extra, c.sigma_literals, c.inequalities))
    return phi.with_conjuncts(out)


def enrichment_atoms(phi: SnpSentence, enriched: SnpSentence) -> list[list[str]]:
    return [
        [l.render() for l in new.tau_literals[len(old.tau_literals):]]
        for old, new in zip(phi.conjuncts, enriched.conjuncts)
    ]


def reduce_instance_stage2(a: Structure) -> Structure:
    return disjoint_union([a] + [singleton_structure(a.signature, s.name) for s in a.signature])


# ---------------------------------------------------------------- stage 3


def concatenated_signature(tau: Signature) -> tuple[Signature, list[Block]]:
    if not len(tau):
        raise TransformError("cannot concatenate an empty signature")
    layout, offset = [], 0
    for s in tau:
        layout.append(Block(s.name, offset, s.arity))
        offset += s.arity
    return Signature((RelationSymbol(SINGLE_NAME, offset),)), layout


def concatenate(phi: SnpSentence) -> SnpSentence:
    sig1, layout = concatenated_signature(phi.input_sig)
    width = sig1.symbols[0].arity
    out = []
    for c in phi.conjuncts:
        fresh = _fresh("w", set(c.variables()))
        tau = []
        for l in c.tau_literals:
            block = next(b for b in layout if b.symbol == l.atom.symbol)
            args = [None] * width
            args[block.offset : block.offset + block.width] = l.atom.args
            tau.append(Lit(Atom(SINGLE_NAME, tuple(a if a is not None else next(fresh) for a in args)), l.positive))
        out.append(NegatedConjunct(tuple(tau), c.sigma_literals, c.inequalities))
    return SnpSentence(sig1, phi.existential_sig, tuple(out))


def structure_to_single(a: Structure, cap: int = PRODUCT_CAP) -> Structure:
    sig1, layout = concatenated_signature(a.signature)
    blocks = [sorted(a.relations[b.symbol]) for b in layout]
    size = 1
    for blk in blocks:
        size *= len(blk)
    if size > cap:
        raise TransformError(f"product relation would hold {size} tuples, above cap {cap}")
    tuples = frozenset(sum(parts, ()) for parts in product(*blocks))
    return Structure(sig1, a.domain_size, {SINGLE_NAME: tuples})


def structure_from_single(b1: Structure, tau: Signature) -> Structure:
    _, layout = concatenated_signature(tau)
    rels = {
        b.symbol: frozenset(t[b.offset : b.offset + b.width] for t in b1.relations[SINGLE_NAME]) for b in layout
    }
    return Structure(tau, b1.domain_size, rels)


# ------------------------------------------------------------- pipeline


def small_structures(sig: Signature, max_size: int, max_tuples: int):
    """Structures up to max_size elements, sparsest first within each size."""
    for size in range(max_size + 1):
        slots = [(s.name, t) for s in sig for t in product(range(size), repeat=s.arity)]
        for k in range(min(max_tuples, len(slots)) + 1):
            for chosen in combinations(slots, k):
                rels: dict[str, set] = {s.name: set() for s in sig}
                for name, t in chosen:
                    rels[name].add(t)
                yield Structure(sig, size, {n: frozenset(v) for n, v in rels.items()})


def forward_instance(trace: StageTrace, a: Structure) -> Structure:
    """Composite instance map from the original signature to the single relation."""
    if any(a.relations[r] for r in trace.removed_symbols):
        return trace.fixed_no
    kept = reduct(a, a.signature.without(trace.removed_symbols))
    return structure_to_single(reduce_instance_stage2(kept))


def compile_to_single(
    phi: SnpSentence, budget: Budget | None = None, search_size: int = 4, search_tuples: int = 3
) -> tuple[SnpSentence, StageTrace]:
    _require(phi)
    trace = StageTrace()
    pruned, trace.removed_symbols = prune_all(phi, budget)
    if not len(pruned.input_sig):
        raise TransformError("every input symbol was pruned; the sentence is trivial")
    trace.pruned = pruned
    enriched = enrich_conjuncts(pruned)
    trace.enriched = enriched
    trace.enrichment_map = enrichment_atoms(pruned, enriched)
    single = concatenate(enriched)
    _, trace.concat_layout = concatenated_signature(enriched.input_sig)

    # fixed witnesses: images of the sparsest YES/NO instances over the pruned signature
    for a in small_structures(pruned.input_sig, search_size, search_tuples):
        ok = sat_bool(pruned, a, budget)
        if ok and trace.fixed_yes is None:
            trace.fixed_yes = structure_to_single(reduce_instance_stage2(a))
        if not ok and trace.fixed_no is None:
            trace.fixed_no = structure_to_single(reduce_instance_stage2(a))
        if trace.fixed_yes is not None and trace.fixed_no is not None:
            break
    if trace.fixed_yes is None or trace.fixed_no is None:
        kind = "YES" if trace.fixed_yes is None else "NO"
        raise TransformError(f"no {kind} instance within size {search_size}; the sentence looks trivial")
    assert sat_bool(single, trace.fixed_yes, budget) and not sat_bool(single, trace.fixed_no, budget)
    return single, trace


def backward_instance(trace: StageTrace, original: SnpSentence, b1: Structure) -> Structure:
    """Map a single-relation structure back to an original-signature instance.

    Projection recovers a structure over the pruned signature; if some relation is
    empty there, every enriched conjunct is vacuous and the instance is a YES one.
    Pruned symbols are re-added as empty relations.
    """
    pruned_sig = trace.enriched.input_sig
    b = structure_from_single(b1, pruned_sig)
    if any(not b.relations[s.name] for s in pruned_sig):
        return _yes_over(original, trace)
    return Structure(original.input_sig, b.domain_size, dict(b.relations))


def _yes_over(original: SnpSentence, trace: StageTrace) -> Structure:
    back = structure_from_single(trace.fixed_yes, trace.enriched.input_sig)
    return Structure(original.input_sig, back.domain_size, dict(back.relations))
