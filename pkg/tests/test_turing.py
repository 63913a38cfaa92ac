from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from snpforge.harness import TOY_MACHINE, TOY_STEPS
from snpforge.turing import (
    BLANK,
    FIRST,
    ClockedMachine,
    MachineError,
    ObliviousMachine,
    SimulationCapExceeded,
    StepPolynomial,
    TuringMachine,
    g_moves,
    make_oblivious,
    parse_machine,
    schedule_moves,
    simulate,
    sweeping_acceptor,
    trajectory,
    turning_points,
    verify_obliviousness,
)

ACCEPT_NOW = "states s acc; start s; accept acc; reject ; alphabet a; delta s > -> acc > R;"
TWO_BRANCH = """
states s l r acc rej; start s; accept acc; reject rej; alphabet a;
delta s > -> l > R; delta s > -> r > R;
delta l a -> rej a R; delta r a -> acc a R;
"""
F_N = StepPolynomial.parse(TOY_STEPS)


@pytest.fixture(scope="module")
def toy():
    return parse_machine(TOY_MACHINE)


@pytest.fixture(scope="module")
def toy_mo(toy):
    return make_oblivious(ClockedMachine(toy, F_N))


class TestParse:
    def test_minimal(self):
        m = parse_machine(ACCEPT_NOW)
        assert m.start == "s" and m.accept == {"acc"}
        assert m.alphabet == (FIRST, BLANK, "a")

    def test_duplicate_lines_accumulate(self):
        m = parse_machine(TWO_BRANCH)
        assert m.rules("s", FIRST) == (("l", FIRST, "R"), ("r", FIRST, "R"))

    def test_transition_from_halting_state(self):
        with pytest.raises(MachineError, match="halting"):
            parse_machine(ACCEPT_NOW + " delta acc a -> s a R;")

    @pytest.mark.parametrize(
        "extra, message",
        [
            ("delta s c -> s a R;", "unknown symbol"),
            ("delta s a -> t a R;", "unknown state"),
            ("delta s a -> s a X;", "direction"),
            ("delta s a s a R;", "expected"),
            ("tape 3;", "unknown section"),
        ],
    )
    def test_errors(self, extra, message):
        with pytest.raises(MachineError, match=message):
            parse_machine(ACCEPT_NOW + extra)

    def test_render_round_trip(self, toy):
        again = parse_machine(toy.render())
        assert again.delta == toy.delta and again.states == toy.states


class TestSteps:
    def test_polynomial(self):
        f = StepPolynomial.parse("1,0,2")
        assert f(3) == 19 and f.render() == "1,0,2"

    def test_zero_needs_opt_in(self):
        with pytest.raises(MachineError):
            StepPolynomial.parse("0")
        assert StepPolynomial.parse("0", zero_allowed=True).flags(1)

    def test_bad_text(self):
        with pytest.raises(MachineError):
            StepPolynomial.parse("1,x")

    def test_closed_form_examples(self):
        assert g_moves(3, 1) == (5, 2)
        assert g_moves(1, 0).moves == 0
        assert g_moves(2, 2).moves == 6

    @given(st.integers(1, 30), st.integers(0, 30))
    def test_closed_form_is_sum_of_trip_halves(self, n, fv):
        # sum over trips k of (n - 1 + k), i.e. half of each trip's span doubled
        assert g_moves(n, fv).moves == sum(n - 1 + k for k in range(fv + 1))

    @given(st.integers(0, 8), st.integers(0, 6))
    def test_trajectory_shape(self, n, fv):
        pos = trajectory(n, fv)
        assert len(pos) - 1 == schedule_moves(n, fv)
        assert pos[0] == 1 and pos[-1] == 1
        assert all(abs(a - b) == 1 for a, b in zip(pos, pos[1:]))
        turns = turning_points(pos)
        assert turns == [n + 2 + k for k in range(fv + 1)]
        assert sum(1 for p in pos[1:] if p == 1) == fv + 1


class TestSimulate:
    def test_immediate_accept(self):
        r = simulate(parse_machine(ACCEPT_NOW), "aa")
        assert r.accept and max(t.moves for t in r.traces) <= 1

    def test_two_branches(self):
        assert simulate(parse_machine(TWO_BRANCH), "a").accept
        only_left = parse_machine(TWO_BRANCH.replace("delta s > -> r > R;", ""))
        assert not simulate(only_left, "a").accept

    def test_traces_are_keyed_by_head_path(self):
        # both branches walk 1, 2, 3; the trace set keeps one representative
        (tr,) = simulate(parse_machine(TWO_BRANCH), "a").traces
        assert tr.positions == (1, 2, 3)

    def test_one_branch_mode_is_seeded(self):
        m = parse_machine(TWO_BRANCH)
        seen = {simulate(m, "a", mode="one-branch", seed=s).accept for s in range(8)}
        assert seen == {True, False}
        assert simulate(m, "a", mode="one-branch", seed=3) == simulate(m, "a", mode="one-branch", seed=3)

    def test_cap(self):
        loop = parse_machine("states s; start s; accept ; reject ; alphabet a; delta s > -> s > R; delta s a -> s a L;")
        with pytest.raises(SimulationCapExceeded):
            simulate(loop, "a", step_cap=10)

    def test_left_of_cell_one_is_invalid(self):
        m = parse_machine("states s acc; start s; accept acc; reject ; alphabet a; delta s > -> acc > L;")
        assert not simulate(m, "a").accept

    def test_clocked_cuts_off(self, toy):
        # "aa" needs two base steps to accept; f(n)=n gives exactly two
        assert simulate(ClockedMachine(toy, F_N), "aa").accept
        assert not simulate(ClockedMachine(toy, StepPolynomial((1,))), "aa").accept

    def test_positions_stay_positive(self, toy_mo):
        for tr in simulate(toy_mo, "ab").traces:
            assert min(tr.positions) >= 1
            assert all(abs(a - b) == 1 for a, b in zip(tr.positions, tr.positions[1:]))


class TestCompiler:
    def test_alphabet(self, toy_mo):
        assert toy_mo.alphabet == (FIRST, BLANK, "a", "b", "a^", "b^", "_'", "_'^")

    def test_state_count_by_family(self, toy, toy_mo):
        q = len(toy.states)
        # start/search/return, two sweep states per base state, four transfer states per pair,
        # everything doubled by the error copy
        assert len(toy_mo.states) == 2 * (3 + 2 * q + 4 * q * q) == 150

    def test_every_schedule_is_identical_on_length_two(self, toy_mo):
        rep = verify_obliviousness(toy_mo, 2, F_N)
        assert rep.identical and rep.inputs == 4 and rep.frontier_ok

    def test_acceptance_matches_clocked_base(self, toy, toy_mo):
        cm = ClockedMachine(toy, F_N)
        for n in range(1, 4):
            for x in product("ab", repeat=n):
                assert simulate(toy_mo, x).accept == simulate(cm, x).accept

    def test_accept_everything(self):
        m = parse_machine("states s acc; start s; accept acc; reject ; alphabet a b; delta s > -> acc > R;")
        mo = make_oblivious(ClockedMachine(m, StepPolynomial((1,))))
        for x in ["a", "ba", "abb"]:
            assert simulate(mo, x).accept

    def test_malformed_tape_accepts(self, toy_mo):
        # a head-marked cell inside the input is not a valid starting tape
        res = simulate(toy_mo, (FIRST, "b", "a^"), raw=True)
        assert res.accept
        assert any(q.startswith("err_") for tr in res.traces for _, _, q, _ in tr.steps)

    def test_corrupted_direction_diverges(self, toy_mo):
        m = toy_mo.machine
        delta = dict(m.delta)
        key = ("search", "a")
        (q2, w, _), = delta[key]
        delta[key] = ((q2, w, "L"),)
        bad = ObliviousMachine(
            TuringMachine(m.states, m.start, m.accept, m.reject, m.alphabet, delta),
            toy_mo.bound,
            toy_mo.accepting_final,
            toy_mo.source,
            toy_mo.provenance,
        )
        rep = verify_obliviousness(bad, 2, F_N)
        assert not rep.identical and rep.first_divergence is not None
        assert "divergence" in rep.render()

    def test_rejects_rule_writing_over_marker(self):
        m = parse_machine("states s acc; start s; accept acc; reject ; alphabet a; delta s > -> acc a R;")
        with pytest.raises(MachineError):
            make_oblivious(ClockedMachine(m, StepPolynomial((1,))))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_trajectory_is_input_independent(toy_mo, n):
    rep = verify_obliviousness(toy_mo, n, F_N)
    assert rep.identical
    assert rep.round_trips == rep.expected_round_trips == n + 1


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_one_branch_runs_follow_the_schedule(toy_mo, seed):
    for x in product("ab", repeat=2):
        (tr,) = simulate(toy_mo, x, mode="one-branch", seed=seed).traces
        assert tr.positions == trajectory(2, 2)


def test_sweeper(toy_mo):
    f = StepPolynomial((1,))
    yes, no = sweeping_acceptor(f), sweeping_acceptor(f, complement=True)
    for x in product("ab", repeat=2):
        assert simulate(yes, x).accept == ("b" in x)
        assert simulate(no, x).accept == ("b" not in x)
        assert verify_obliviousness(yes, 2, f, [x]).identical


class TestClosedFormSchedule:
    """The sweep schedule against the closed-form move count g(n).

    Both examples fail: every round trip of the compiled machine must reach the
    blank frontier and come back, which costs 2(n+1+k) moves for trip k, while the
    closed form charges n-1+k. The gap is analysed in the decisions ledger.
    """

    def test_length_three_one_step(self):
        mo = sweeping_acceptor(StepPolynomial((1,)))
        rep = verify_obliviousness(mo, 3, StepPolynomial((1,)), [("a", "b", "a")])
        assert rep.moves == 5

    def test_length_one_zero_steps(self):
        f = StepPolynomial((0,), zero_allowed=True)
        rep = verify_obliviousness(sweeping_acceptor(f), 1, f, [("a",)])
        assert rep.expected_moves == 0
        assert rep.moves == 0
