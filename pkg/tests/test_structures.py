import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import brute_hom
from strategies import structures

from snpforge.logic import Signature
from snpforge.structures import (
    BudgetExceeded,
    Structure,
    StructureError,
    all_structures,
    disjoint_union,
    empty_structure,
    homomorphism_exists,
    induced_substructure,
    is_homomorphism,
    parse_structure,
    reduct,
    render_structure,
    singleton_structure,
)

E = Signature.of(("E", 2))
RS = Signature.of(("R", 2), ("S", 2))
EU = Signature.of(("E", 2), ("U", 1))


def edge() -> Structure:
    return Structure.build(E, 2, E=[(0, 1)])


def triangle() -> Structure:
    return Structure.build(E, 3, E=[(i, j) for i in range(3) for j in range(3) if i != j])


class TestText:
    def test_path(self):
        a = parse_structure("domain 3; E(0,1); E(1,2);")
        assert a.domain_size == 3
        assert a["E"] == {(0, 1), (1, 2)}

    def test_empty(self):
        a = parse_structure("domain 0;")
        assert a.domain_size == 0 and a.tuple_count() == 0

    def test_range_error(self):
        with pytest.raises(StructureError, match="out of range"):
            parse_structure("domain 2; E(0,5);")

    def test_arity_error(self):
        with pytest.raises(StructureError, match="arity"):
            parse_structure("domain 2; E(0,1); E(1);")

    def test_declared_signature(self):
        a = parse_structure("domain 2; E(0,1);", EU)
        assert a["U"] == frozenset()
        with pytest.raises(StructureError):
            parse_structure("domain 2; F(0,1);", EU)

    def test_render_sorts_tuples(self):
        a = Structure.build(E, 3, E=[(2, 0), (0, 1)])
        assert render_structure(a) == "domain 3; E(0,1); E(2,0);"


@given(structures(EU))
def test_render_parse_round_trip(a):
    assert parse_structure(render_structure(a), EU) == a


class TestHomomorphism:
    def test_edge_into_triangle(self):
        h = homomorphism_exists(edge(), triangle())
        assert h == brute_hom(edge(), triangle()) == (0, 1)

    def test_triangle_into_edge(self):
        sym_edge = Structure.build(E, 2, E=[(0, 1), (1, 0)])
        assert homomorphism_exists(triangle(), sym_edge) is None
        assert brute_hom(triangle(), sym_edge) is None

    def test_identity(self):
        assert homomorphism_exists(triangle(), triangle()) == (0, 1, 2)

    def test_injective_restriction(self):
        loop = Structure.build(E, 1, E=[(0, 0)])
        assert homomorphism_exists(edge(), loop) == (0, 0)
        assert homomorphism_exists(edge(), loop, injective=True) is None

    def test_budget_is_distinct_from_none(self):
        big = Structure.build(E, 6, E=[(i, (i + 1) % 6) for i in range(6)])
        with pytest.raises(BudgetExceeded):
            homomorphism_exists(big, triangle(), max_nodes=3)


@given(structures(E, max_size=3), structures(E, max_size=3), st.booleans())
def test_homomorphism_matches_brute_force(a, b, injective):
    # search order is source-ascending, target-ascending: same as lexicographic enumeration
    assert homomorphism_exists(a, b, injective) == brute_hom(a, b, injective)


@given(structures(EU, max_size=3), structures(EU, max_size=3), structures(EU, max_size=3))
def test_homomorphisms_compose(a, b, c):
    f = homomorphism_exists(a, b)
    g = homomorphism_exists(b, c)
    if f is not None and g is not None:
        assert is_homomorphism(a, c, [g[x] for x in f])


@given(structures(EU))
def test_identity_is_homomorphism(a):
    assert is_homomorphism(a, a, list(range(a.domain_size)))
    assert homomorphism_exists(a, a) is not None


class TestBuildingBlocks:
    def test_union_of_edges(self):
        u = disjoint_union([edge(), edge()])
        assert u.domain_size == 4 and u["E"] == {(0, 1), (2, 3)}

    def test_union_of_nothing(self):
        assert disjoint_union([], E) == empty_structure(E)

    def test_union_signature_mismatch(self):
        with pytest.raises(StructureError):
            disjoint_union([edge(), empty_structure(EU)])

    def test_union_with_singletons(self):
        a = Structure.build(EU, 3, E=[(0, 1)])
        u = disjoint_union([a, singleton_structure(EU, "E"), singleton_structure(EU, "U")])
        assert u.domain_size == 6
        assert u["E"] == {(0, 1), (3, 4)} and u["U"] == {(5,)}

    def test_reduct(self):
        a = Structure.build(RS, 2, R=[(0, 1)], S=[(1, 0)])
        r = reduct(a, Signature.of(("S", 2)))
        assert r.signature.names == ("S",) and r["S"] == {(1, 0)}
        assert reduct(a, RS) == a
        with pytest.raises(StructureError):
            reduct(a, Signature.of(("T", 1)))

    def test_reduct_of_empty_relation(self):
        a = Structure.build(RS, 2, S=[(1, 0)])
        assert reduct(a, Signature.of(("S", 2)))["S"] == a["S"]

    def test_induced(self):
        assert induced_substructure(triangle(), [0, 1, 2]) == triangle()
        assert induced_substructure(triangle(), []).domain_size == 0
        sub = induced_substructure(triangle(), [0, 2])
        assert sub["E"] == {(0, 1), (1, 0)}
        with pytest.raises(StructureError):
            induced_substructure(triangle(), [5])

    def test_singletons(self):
        assert singleton_structure(RS, "R") == Structure.build(RS, 2, R=[(0, 1)])
        u = Signature.of(("U", 1))
        assert singleton_structure(u, "U") == Structure.build(u, 1, U=[(0,)])
        t = Signature.of(("T", 3))
        assert singleton_structure(t, "T")["T"] == {(0, 1, 2)}

    def test_all_structures_count(self):
        # 2^(n^2) binary relations on n elements
        assert sum(1 for _ in all_structures(E, 2)) == 16
        assert sum(1 for _ in all_structures(EU, 2)) == 64


@given(structures(EU, max_size=3), structures(EU, max_size=3))
def test_union_admits_injective_embeddings(a, b):
    u = disjoint_union([a, b])
    assert homomorphism_exists(a, u, injective=True) is not None
    assert homomorphism_exists(b, u, injective=True) is not None


@given(structures(EU), st.data())
def test_induced_embeds_injectively(a, data):
    subset = data.draw(st.sets(st.integers(0, max(a.domain_size - 1, 0)))) if a.domain_size else set()
    sub = induced_substructure(a, subset)
    assert homomorphism_exists(sub, a, injective=True) is not None
