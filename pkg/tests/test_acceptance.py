"""Acceptance criteria, one test and one printed PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v` (lines appear inline) or
`python scripts/run_acceptance.py` for the summary alone.
"""

import time
from itertools import product

import pytest
from oracles import hand_classify

from snpforge.checker import BUDGET_EXCEEDED, Budget, check_sat
from snpforge.embedding import (
    MachineInput,
    build_grid_with_layout,
    build_sentence,
    decide_sat_phi,
    grid_size,
    reverse_reduce,
)
from snpforge.gmmsnp import enrich_inequalities
from snpforge.harness import (
    SentenceParams,
    TrialConfig,
    certify,
    compiled_gmsnp,
    exhaustive_gmsnp_report,
    exhaustive_matrix_report,
    micro_instance,
    nth_string,
    random_sentence,
    random_structure,
    toy_oblivious,
)
from snpforge.logic import Signature, parse_sentence
from snpforge.matrix import inverse_hom_probe
from snpforge.rng import CounterRng
from snpforge.structures import Structure, all_structures, disjoint_union, homomorphism_exists
from snpforge.turing import (
    ClockedMachine,
    StepPolynomial,
    g_moves,
    parse_machine,
    simulate,
    verify_obliviousness,
)
from snpforge.harness import TOY_MACHINE, TOY_STEPS


@pytest.fixture
def announce(capsys):
    def emit(label: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {label} {'PASS' if ok else 'FAIL'} {detail}")

    return emit


def test_c1_monadic_translation(announce):
    start = time.monotonic()
    rep = certify("gmmsnp-to-mmsnp", TrialConfig(seed=1, trials=4000, structures_per_sentence=20, max_domain=5))
    secs = time.monotonic() - start
    ok = rep.disagree == 0 and rep.budget_exceeded == 0 and secs <= 300
    announce("C1", ok, f"gmmsnp-to-mmsnp: 200 sentences x 20 structures, agree={rep.agree} "
                      f"disagree={rep.disagree} budget={rep.budget_exceeded} {secs:.1f}s")
    assert ok, rep.render().splitlines()[-3:]


def test_c2_inequality_enrichment(announce):
    params = SentenceParams(input_symbols=(("R", 2),), existential_count=3, max_conjuncts=3, max_variables=3)
    structures = [a for n in range(4) for a in all_structures(Signature.of(("R", 2)), n)]
    disagree = budget = checks = 0
    for seed in range(200):
        phi = random_sentence("GMMSNP≠", params, seed)
        psi = enrich_inequalities(phi)
        for a in structures:
            v1, v2 = check_sat(phi, a).verdict, check_sat(psi, a).verdict
            checks += 1
            if BUDGET_EXCEEDED in (v1, v2):
                budget += 1
            elif v1 != v2:
                disagree += 1
    ok = disagree == 0 and budget == 0
    announce("C2", ok, f"enrichment: 200 sentences x {len(structures)} R-structures (size <= 3), "
                      f"{checks} checks, disagree={disagree} budget={budget}")
    assert ok


def test_c3_single_symbol_compilation(announce):
    config = TrialConfig(seed=2, trials=1, input_symbols=(("U", 1), ("V", 1)))
    parts, disagree, budget, total = [], 0, 0, 0
    for stage in ("prune", "enrich", "concat"):
        rep = exhaustive_gmsnp_report(config, stage, 50, 4)
        d, b, n = rep.disagree, rep.budget_exceeded, len(rep.trials)
        for slot in range(50):
            c = compiled_gmsnp(config, slot)
            src, _, _ = c.stage(stage)
            for k in range(20):
                a = random_structure(src.input_sig, 5, 0.3, config.seed, f"size5/{stage}/{slot}/{k}")
                lhs, rhs = c.agreement(stage, a, config.budget)
                n += 1
                b += "budget" in (lhs, rhs)
                d += "budget" not in (lhs, rhs) and lhs != rhs
        parts.append(f"{stage}={n}")
        disagree, budget, total = disagree + d, budget + b, total + n
    # supplementary: one binary and one unary input symbol, exhaustive up to size 2
    wide = TrialConfig(seed=2, trials=1)
    for stage in ("prune", "enrich", "concat"):
        rep = exhaustive_gmsnp_report(wide, stage, 50, 2)
        disagree += rep.disagree
        budget += rep.budget_exceeded
        total += len(rep.trials)
    ok = disagree == 0 and budget == 0
    announce("C3", ok, f"GMSNP stages over {{U/1,V/1}}: 50 sentences, exhaustive size <= 4 plus 20 size-5 each "
                      f"({', '.join(parts)}); with {{E/2,U/1}} size <= 2 extra; total={total} "
                      f"disagree={disagree} budget={budget}")
    assert ok


def test_c4_matrix_partitions(announce):
    rep = exhaustive_matrix_report(4)
    cex = inverse_hom_probe(parse_sentence("input E/2; exists ; forbid !E(x,y);"), 2)
    ok = rep.disagree == 0 and rep.budget_exceeded == 0 and cex is not None
    announce("C4", ok, f"4 matrices x loopless digraphs <= 4 vertices: {len(rep.trials)} checks, "
                      f"disagree={rep.disagree}; probe counterexample={'found' if cex else 'missing'}")
    assert ok


TOY_BOUND = StepPolynomial.parse(TOY_STEPS)


def test_c5_sweeping_compilation(announce):
    start = time.monotonic()
    mo = toy_oblivious()
    base = ClockedMachine(parse_machine(TOY_MACHINE), TOY_BOUND)
    identical, moves_ok, detail = True, True, []
    for n in (1, 2, 3):
        rep = verify_obliviousness(mo, n, TOY_BOUND)
        identical &= rep.identical and rep.inputs == 2**n
        expected = g_moves(n, TOY_BOUND(n)).moves
        moves_ok &= rep.moves == expected
        detail.append(f"n={n} moves={rep.moves} g={expected}")
    accept_ok = all(
        simulate(mo, x).accept == simulate(base, x).accept
        for n in (1, 2, 3) for x in product("ab", repeat=n)
    )
    secs = time.monotonic() - start
    ok = identical and moves_ok and accept_ok and secs <= 60
    announce("C5", ok, f"trajectories identical={identical}; move count equals g(n)={moves_ok} "
                      f"({'; '.join(detail)}); acceptance equivalence={accept_ok}; {secs:.1f}s")
    assert identical and accept_ok
    assert moves_ok, detail


def test_c6_embedding_round_trip(announce):
    mo = toy_oblivious()
    inputs = [x for n in (1, 2) for x in product("ab", repeat=n)]
    three = grid_size(3, TOY_BOUND(3))
    if three < 200:
        inputs += list(product("ab", repeat=3))
    bad = 0
    for x in inputs:
        b, _ = build_grid_with_layout(x, mo)
        if reverse_reduce(b, mo).result != MachineInput.for_input(x, mo):
            bad += 1
        if decide_sat_phi(b, mo) != simulate(mo, x).accept:
            bad += 1
    ok = bad == 0
    announce("C6", ok, f"{len(inputs)} inputs of length <= 2; length 3 "
                      f"{'included' if three < 200 else f'skipped ({three} grid elements)'}; disagreements={bad}")
    assert ok


def _mutate(i: int, mo):
    rng = CounterRng(7, f"mutation/{i}")
    x = nth_string(rng.randbelow(6), ("a", "b"))
    b, layout = build_grid_with_layout(x, mo)
    rels = {k: set(v) for k, v in b.relations.items()}
    name, t = rng.choice(sorted((k, t) for k, v in b.relations.items() for t in v))
    if rng.bernoulli(0.5):
        rels[name].discard(t)
        kind = "deletion"
    else:
        # duplicate the tuple with one entry redirected
        t2 = list(t)
        t2[rng.randbelow(len(t2))] = rng.randbelow(b.domain_size)
        rels[name].add(tuple(t2))
        kind = "duplication"
    mutated = Structure(b.signature, b.domain_size, {k: frozenset(v) for k, v in rels.items()})
    return x, b, layout, mutated, kind


def test_c7_degenerate_structures(announce):
    mo = toy_oblivious()
    wrong, seen = 0, {"case1": 0, "case2": 0, "case3": 0}
    for i in range(100):
        x, b, layout, mutated, _ = _mutate(i, mo)
        expected = hand_classify(b, mutated, layout)
        out = reverse_reduce(mutated, mo)
        seen[out.case] += 1
        if out.case != expected or (expected == "case3" and out.result != MachineInput.for_input(x, mo)):
            wrong += 1
    ok = wrong == 0
    announce("C7", ok, f"100 grid mutations, cases {seen}, misclassified={wrong}")
    assert ok


def test_c8_oracle_cross_check(announce):
    sentences, agree, disagree, budget = {}, 0, 0, 0
    for i in range(20):
        mo, b = micro_instance(8, i)
        key = tuple(sorted(mo.accepting_final))
        if key not in sentences:
            sentences[key] = build_sentence(mo).sentence
        phi = sentences[key]
        assert b.domain_size <= 12 and len(phi.existential_sig) <= 10
        r = check_sat(phi, b, Budget(10**7, 120_000))
        if r.verdict == BUDGET_EXCEEDED:
            budget += 1
        elif r.satisfied == decide_sat_phi(b, mo):
            agree += 1
        else:
            disagree += 1
    ok = disagree == 0 and agree >= 5
    announce("C8", ok, f"20 micro grids (<= 12 elements, <= 10 existential symbols): agree={agree} "
                      f"disagree={disagree} budget={budget}")
    assert ok


EU = Signature.of(("E", 2), ("U", 1))
CLOSURE_PARAMS = SentenceParams(input_symbols=(("E", 2), ("U", 1)), existential_count=2)


def _preimage(b: Structure, rng: CounterRng, injective: bool) -> tuple[Structure, list[int]]:
    """A structure with a known (injective) homomorphism into b."""
    n = b.domain_size
    if injective:
        size = rng.randint(1, n)
        h = list(range(n))
        for k in range(n - 1, 0, -1):
            j = rng.randbelow(k + 1)
            h[k], h[j] = h[j], h[k]
        h = h[:size]
    else:
        size = rng.randint(1, 4)
        h = [rng.randbelow(n) for _ in range(size)]
    rels = {}
    for sym in b.signature:
        rels[sym.name] = frozenset(
            t for t in product(range(size), repeat=sym.arity)
            if tuple(h[e] for e in t) in b[sym.name] and rng.bernoulli(0.7)
        )
    return Structure(b.signature, size, rels), h


def test_c9_closure_invariants(announce):
    violations = {"monotone": 0, "injective": 0, "union": 0}
    informative = {"monotone": 0, "injective": 0, "union": 0}
    for i in range(100):
        rng = CounterRng(9, f"closure/{i}")
        b = random_structure(EU, rng.randint(1, 4), 0.3, 9, f"closure-b/{i}")
        for kind, fragment, injective in (("monotone", "MMSNP", False), ("injective", "GMMSNP≠", True)):
            phi = random_sentence(fragment, CLOSURE_PARAMS, i, f"closure/{kind}")
            a, h = _preimage(b, rng, injective)
            assert homomorphism_exists(a, b, injective=injective) is not None
            if check_sat(phi, b).satisfied:
                informative[kind] += 1
                violations[kind] += not check_sat(phi, a).satisfied
        phi = random_sentence("GMMSNP≠", SentenceParams(input_symbols=CLOSURE_PARAMS.input_symbols, connected=True), i,
                              "closure/union")
        a = random_structure(EU, rng.randint(1, 3), 0.3, 9, f"closure-a/{i}")
        if check_sat(phi, a).satisfied and check_sat(phi, b).satisfied:
            informative["union"] += 1
            violations["union"] += not check_sat(phi, disjoint_union([a, b])).satisfied
    ok = not any(violations.values())
    announce("C9", ok, f"100 instances per invariant; violations={violations}; premise held in {informative}")
    assert ok
