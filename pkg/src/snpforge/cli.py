"""Command-line entry point.

Exit codes: 0 success (or a true verdict), 1 property violated (false verdict,
disagreement), 2 usage or input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import sys

from . import embedding as emb
from .checker import BUDGET_EXCEEDED, Budget, check_sat
from .gmmsnp import TransformError, export_derived, reduce_backward, structure_forward, to_mmsnp
from .gmsnp import (
    backward_instance,
    compile_to_single,
    concatenate,
    concatenated_signature,
    enrich_conjuncts,
    enrichment_atoms,
    forward_instance,
    prune_all,
    reduce_instance_stage2,
    structure_from_single,
    structure_to_single,
)
from .harness import REDUCTIONS, HarnessError, TrialConfig, certify
from .logic import SentenceError, classify, parse_sentence, render_sentence
from .matrix import MatrixError, m_partition_check, matrix_to_sentence, parse_matrix
from .structures import StructureError, parse_structure, render_structure
from .turing import (
    ClockedMachine,
    MachineError,
    SimulationCapExceeded,
    StepPolynomial,
    as_symbols,
    make_oblivious,
    parse_machine,
    simulate,
    verify_obliviousness,
)

HEADER = "snpforge-format 1"
OK, VIOLATED, USAGE, BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ io


def read_text(path: str) -> str:
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise UsageError(f"cannot read {path}: {e.strerror}") from None
    lines = text.splitlines()
    if lines and lines[0].strip().startswith("snpforge-format"):
        version = lines[0].split()[1:2]
        if version != ["1"]:
            raise UsageError(f"{path}: unsupported format version {' '.join(version)}")
        lines = lines[1:]
    return "\n".join(lines) + "\n"


def write_text(path: str | None, body: str) -> None:
    text = f"{HEADER}\n{body}" if not body.startswith(HEADER) else body
    if not text.endswith("\n"):
        text += "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def load_sentence(path: str):
    return parse_sentence(read_text(path))


def load_structure(path: str, signature=None):
    return parse_structure(read_text(path), signature)


def load_bundle(path: str) -> emb.EmbeddingBundle:
    return emb.parse_bundle(read_text(path))


def _budget(args) -> Budget:
    return Budget(args.budget, args.millis)


# ------------------------------------------------------------ commands


def cmd_classify(args) -> int:
    rep = classify(load_sentence(args.file))
    print(" ".join(rep.labels()) or "none")
    if args.verbose:
        for flag, value in rep.flags.items():
            why = rep.witnesses.get(flag)
            tail = f"  # conjunct {why.conjunct}: {why.reason}" if why else ""
            print(f"{flag} {'yes' if value else 'no'}{tail}")
    return OK


def cmd_check(args) -> int:
    phi = load_sentence(args.sentence)
    a = load_structure(args.structure, phi.input_sig)
    r = check_sat(phi, a, _budget(args))
    print(r.verdict)
    if args.witness and r.witness is not None:
        print(render_structure(r.witness))
    if r.verdict == BUDGET_EXCEEDED:
        return BUDGET
    return OK if r.satisfied else VIOLATED


def cmd_transform(args) -> int:
    phi = load_sentence(args.input)
    trace = ""
    if args.kind == "gmmsnp2mmsnp":
        out = to_mmsnp(phi)
        from .gmmsnp import derive_signature

        trace = export_derived(derive_signature(phi.input_sig))
    elif args.kind == "gmsnp-prune":
        out, removed = prune_all(phi, _budget(args))
        trace = "removed " + " ".join(removed) + "\n"
    elif args.kind == "gmsnp-enrich":
        out = enrich_conjuncts(phi)
        trace = "".join(f"conjunct {i}: {' '.join(atoms)}\n" for i, atoms in enumerate(enrichment_atoms(phi, out)))
    elif args.kind == "gmsnp-concat":
        out = concatenate(phi)
        _, layout = concatenated_signature(phi.input_sig)
        trace = "layout " + " ".join(b.render() for b in layout) + "\n"
    else:
        out, st = compile_to_single(phi, _budget(args))
        trace = st.render() + "\n"
    write_text(args.output, render_sentence(out))
    if args.trace:
        write_text(args.trace, trace)
    return OK


def cmd_reduce(args) -> int:
    phi = load_sentence(args.sentence)
    stage = args.stage
    if stage == "gmmsnp":
        if args.direction == "fwd":
            out = structure_forward(load_structure(args.structure, phi.input_sig))
        else:
            out = reduce_backward(phi, load_structure(args.structure, to_mmsnp(phi).input_sig))
    elif stage == "gmsnp-enrich":
        if args.direction == "bwd":
            raise UsageError("the enrichment stage has no separate backward map; the signature is unchanged")
        out = reduce_instance_stage2(load_structure(args.structure, phi.input_sig))
    elif stage == "gmsnp-concat":
        if args.direction == "fwd":
            out = structure_to_single(load_structure(args.structure, phi.input_sig))
        else:
            sig1, _ = concatenated_signature(phi.input_sig)
            out = structure_from_single(load_structure(args.structure, sig1), phi.input_sig)
    elif stage == "gmsnp":
        single, trace = compile_to_single(phi, _budget(args))
        if args.direction == "fwd":
            out = forward_instance(trace, load_structure(args.structure, phi.input_sig))
        else:
            out = backward_instance(trace, phi, load_structure(args.structure, single.input_sig))
    else:
        raise UsageError(f"unknown stage {stage}")
    write_text(args.output, render_structure(out))
    return OK


def cmd_matrix(args) -> int:
    m = parse_matrix(read_text(args.matrix))
    if args.action == "compile":
        write_text(args.output, render_sentence(matrix_to_sentence(m)))
        return OK
    if args.graph is None:
        raise UsageError("matrix check needs --graph")
    g = load_structure(args.graph, matrix_to_sentence(m).input_sig)
    ok = m_partition_check(g, m)
    print("yes" if ok else "no")
    return OK if ok else VIOLATED


def _machine(args):
    base = parse_machine(read_text(args.machine))
    steps = StepPolynomial.parse(args.steps, zero_allowed=True)
    return base, steps


def cmd_tm(args) -> int:
    base, steps = _machine(args)
    if args.action == "oblivious":
        mo = make_oblivious(ClockedMachine(base, steps))
        body = mo.machine.render() + "\n" + "final " + " ".join(sorted(mo.accepting_final)) + "\n"
        write_text(args.output, body)
        return OK
    if args.action == "verify":
        mo = make_oblivious(ClockedMachine(base, steps))
        ok = True
        for n in args.n:
            rep = verify_obliviousness(mo, n, steps)
            print(rep.render())
            ok &= rep.passes
        return OK if ok else VIOLATED
    x = as_symbols(args.input.split()) if args.input else ()
    target = make_oblivious(ClockedMachine(base, steps)) if args.oblivious else ClockedMachine(base, steps)
    r = simulate(target, x, step_cap=args.step_cap, mode=args.mode, seed=args.seed)
    print("accept" if r.accept else "reject")
    for flag in r.flags:
        print(f"flag {flag}")
    if args.traces:
        for t in r.traces:
            print("trace " + " ".join(map(str, t.positions)))
    return OK if r.accept else VIOLATED


def cmd_embed(args) -> int:
    bundle = load_bundle(args.bundle)
    mo = bundle.oblivious
    if args.action == "grid":
        x = tuple(args.input.split()) if args.input else bundle.yes
        write_text(args.output, render_structure(emb.build_grid(x, mo)))
        return OK
    if args.action == "sentence":
        es = emb.build_sentence(mo)
        write_text(args.output, render_sentence(es.sentence))
        return OK
    if args.structure is None:
        raise UsageError(f"embed {args.action} needs --structure")
    b = load_structure(args.structure, emb.grid_signature(mo))
    if args.action == "reverse":
        print(emb.reverse_reduce(b, mo).render())
        return OK
    ok = emb.decide_sat_phi(b, mo)
    print("true" if ok else "false")
    return OK if ok else VIOLATED


def cmd_fuzz(args) -> int:
    config = TrialConfig(seed=args.seed, trials=args.trials, budget_nodes=args.budget, budget_millis=args.millis)
    report = certify(args.reduction, config)
    write_text(args.output, report.render())
    if report.disagree:
        return VIOLATED
    return BUDGET if report.budget_exceeded else OK


# -------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="snpforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def budgeted(sp):
        sp.add_argument("--budget", type=int, default=10**7, help="search-node budget")
        sp.add_argument("--millis", type=int, default=60_000, help="time budget in milliseconds")

    sp = sub.add_parser("classify", help="report fragment membership")
    sp.add_argument("file")
    sp.add_argument("--verbose", action="store_true")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("check", help="model-check a sentence on a structure")
    sp.add_argument("--sentence", required=True)
    sp.add_argument("--structure", required=True)
    sp.add_argument("--witness", action="store_true", help="print the satisfying expansion")
    budgeted(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("transform", help="sentence-level transformations")
    sp.add_argument("kind", choices=["gmmsnp2mmsnp", "gmsnp-prune", "gmsnp-enrich", "gmsnp-concat", "gmsnp-compile"])
    sp.add_argument("input")
    sp.add_argument("-o", "--output", default="-")
    sp.add_argument("--trace")
    budgeted(sp)
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("reduce", help="instance maps of the transformations")
    sp.add_argument("direction", choices=["fwd", "bwd"])
    sp.add_argument("--stage", required=True, choices=["gmmsnp", "gmsnp-enrich", "gmsnp-concat", "gmsnp"])
    sp.add_argument("--sentence", required=True)
    sp.add_argument("--structure", required=True)
    sp.add_argument("-o", "--output", default="-")
    budgeted(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("matrix", help="matrix partition problems")
    sp.add_argument("action", choices=["check", "compile"])
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--graph")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_matrix)

    sp = sub.add_parser("tm", help="machines: simulation, sweeping compilation, verification")
    sp.add_argument("action", choices=["simulate", "oblivious", "verify"])
    sp.add_argument("--machine", required=True)
    sp.add_argument("--steps", required=True, help="step polynomial coefficients c0,c1,...")
    sp.add_argument("--input", default="", help="space-separated input symbols")
    sp.add_argument("--oblivious", action="store_true", help="simulate the compiled sweeping machine")
    sp.add_argument("--mode", choices=["exhaustive", "one-branch"], default="exhaustive")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--step-cap", type=int, default=100_000)
    sp.add_argument("--traces", action="store_true")
    sp.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_tm)

    sp = sub.add_parser("embed", help="grids and the grid sentence")
    sp.add_argument("action", choices=["grid", "sentence", "reverse", "decide"])
    sp.add_argument("--bundle", required=True)
    sp.add_argument("--input", default="")
    sp.add_argument("--structure")
    sp.add_argument("-o", "--output", default="-")
    sp.set_defaults(func=cmd_embed)

    sp = sub.add_parser("fuzz", help="seeded certification of the reductions")
    sp.add_argument("action", choices=["certify"])
    sp.add_argument("--reduction", required=True, choices=REDUCTIONS)
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("-o", "--output", default="-")
    budgeted(sp)
    sp.set_defaults(func=cmd_fuzz)
    return p


INPUT_ERRORS = (
    UsageError,
    SentenceError,
    StructureError,
    MatrixError,
    MachineError,
    TransformError,
    emb.EmbeddingError,
    HarnessError,
    ValueError,
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SimulationCapExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return BUDGET
    except INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except RuntimeError as e:  # budget exhaustion inside a transformation
        print(f"error: {e}", file=sys.stderr)
        return BUDGET


if __name__ == "__main__":
    sys.exit(main())
