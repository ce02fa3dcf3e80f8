import itertools

import pytest

from deltacsa.errors import NonSplitDenominator
from deltacsa.galois import (
    classify,
    hnf_basis,
    integer_kernel,
    is_logderivative,
    lattice_contains,
    relation_lattice,
    smith_diagonal,
    tower_description,
    transcendence_degree,
)
from deltacsa.ratfield import RatFunc, derive, parse

from helpers import brute_descriptor, brute_relation_set, rand_ratfunc

EX_COLUMN = ["1/(4*x)", "-1/(4*x)"]
EX_MODULE = ["0", "1/(2*x)", "-1/(2*x)", "0"]


def _p(vals):
    return [parse(v) for v in vals]


def test_relation_lattice_examples():
    assert relation_lattice(_p(EX_COLUMN)) == hnf_basis([(1, 1), (4, 0)], 2)
    assert relation_lattice(_p(["0"])) == ((1,),)
    assert relation_lattice(_p(["1/(2*x)", "1"])) == ((2, 0),)


def test_lattice_matches_brute_force():
    for a in [EX_COLUMN, ["1/(2*x)", "1"], ["1/(3*x)", "1/(2*(x-1))"], ["1/x^2", "2/x^2"], ["x", "1/(6*x)"]]:
        basis = relation_lattice(_p(a))
        members = set(brute_relation_set(_p(a)))
        for m in itertools.product(range(-8, 9), repeat=len(a)):
            assert lattice_contains(basis, m) == (m in members), (a, m)


def test_classify_examples():
    d = classify(_p(EX_MODULE))
    assert (d.torus_rank, d.invariant_factors, d.finite_order) == (0, (2,), 2)
    d = classify(_p(EX_COLUMN))
    assert (d.torus_rank, d.invariant_factors) == (0, (4,))
    d = classify(_p(["1", "1/(2*x)"]))
    assert (d.torus_rank, d.invariant_factors) == (1, (2,))
    assert d.to_json() == {"torus_rank": 1, "invariant_factors": [2]}
    assert d.summary() == "torus of rank 1 x Z/2"


def test_classify_against_brute_force(rng):
    for _ in range(6):
        a = [parse(f"{rng.randint(-3, 3)}/({rng.choice([2, 3, 4, 6])}*x)"), rand_ratfunc(rng, deg=1, max_factors=1)]
        d = classify(a)
        assert (d.torus_rank, d.invariant_factors) == brute_descriptor(a)


def test_concatenating_trivial_generator():
    for a in [EX_COLUMN, ["1", "1/(2*x)"]]:
        d1, d2 = classify(_p(a)), classify(_p(a + ["0"]))
        assert (d1.torus_rank, d1.invariant_factors) == (d2.torus_rank, d2.invariant_factors)


def test_rational_twist_invariance(rng):
    for _ in range(10):
        a = _p(["1/(4*x)", "x+1/(3*(x-1))"])
        g = RatFunc(rng.randint(1, 4))
        for _ in range(3):
            g = g * parse(f"(x-{rng.randint(-2, 2)})") ** rng.choice([-2, -1, 1, 3])
        twisted = [a[0] + derive(g) / g, a[1]]
        d1, d2 = classify(a), classify(twisted)
        assert (d1.torus_rank, d1.invariant_factors) == (d2.torus_rank, d2.invariant_factors)


def test_rank_accounting(rng):
    for _ in range(20):
        a = [rand_ratfunc(rng, deg=1, max_factors=2) for _ in range(3)]
        d = classify(a)
        assert len(d.relation_basis) + d.torus_rank == 3
        assert all(b % c == 0 for c, b in zip(d.invariant_factors, d.invariant_factors[1:]))


def test_tower_description():
    t = tower_description(_p(EX_MODULE))
    assert (t.transcendence_degree, t.algebraic_degree, t.exponential) == (0, 2, True)
    t = tower_description(_p(["0", "0", "0"]))
    assert (t.transcendence_degree, t.algebraic_degree) == (0, 1)
    assert tower_description(_p(["1"])).transcendence_degree == 1
    assert transcendence_degree(_p(["1", "2", "1/x^2"])) == 2


def test_is_logderivative():
    assert is_logderivative(parse("2/x - 1/(x-1)"))
    assert not is_logderivative(parse("1/(2*x)"))
    assert not is_logderivative(parse("1"))
    with pytest.raises(NonSplitDenominator):
        is_logderivative(parse("1/(x^2+3)"))


def test_integer_tools():
    k = integer_kernel([[2, 4, 6]], 3)
    assert len(k) == 2 and all(2 * a + 4 * b + 6 * c == 0 for a, b, c in k)
    assert smith_diagonal([[2, 4], [6, 8]], 2) == [2, 4]
    assert smith_diagonal([[4, 0], [0, 6]], 2) == [2, 12]
    assert hnf_basis([(4, 0), (1, 1)], 2) == hnf_basis([(1, 1), (0, 4)], 2)
