import pytest
import sympy

from deltacsa import linalg
from deltacsa.diffmod import (
    DiffModule,
    direct_sum,
    dual,
    gauge_transform,
    ratmatrix,
    tensor,
    tower_inverse,
    transport_fundamental,
    trivial_module,
    verify_fundamental,
)
from deltacsa.errors import SingularGauge
from deltacsa.hyperexp import TowerElem, tower_matrix
from deltacsa.hypersolve import solve_diagonal, solve_triangular_2x2
from deltacsa.ratfield import ONE, ZERO, parse

from helpers import SX, rand_invertible_rational, rand_ratfunc, sympy_matrix

EX = ratmatrix([["1/(4*x)", "0"], ["0", "-1/(4*x)"]])
Z_EX = tower_matrix([["(x)^(1/4)", "0"], ["0", "(x)^(-1/4)"]])


def _sympy_gauge(b, m):
    bs, ms = sympy_matrix(b), sympy_matrix(m)
    mi = ms.inv()
    return (mi * bs * ms - mi * ms.diff(SX)).applyfunc(sympy.cancel)


def _same(ours, expr):
    return all(sympy.cancel(sympy_matrix(ours)[i, j] - expr[i, j]) == 0 for i in range(expr.rows) for j in range(expr.cols))


def test_gauge_examples():
    a = gauge_transform(ratmatrix([["0", "0"], ["0", "0"]]), ratmatrix([["x", "0"], ["0", "1"]]))
    assert a == ratmatrix([["-1/x", "0"], ["0", "0"]])
    assert gauge_transform(EX, linalg.identity(2, ZERO, ONE)) == EX
    m = ratmatrix([["x", "0"], ["0", "1"]])
    a = gauge_transform(EX, m)
    assert a == ratmatrix([["1/(4*x) - 1/x", "0"], ["0", "-1/(4*x)"]])
    assert _same(a, _sympy_gauge(EX, m))
    with pytest.raises(SingularGauge):
        gauge_transform(EX, ratmatrix([["x", "1"], ["x", "1"]]))


def test_transport_direction_is_inverse():
    b = ratmatrix([["0", "0"], ["0", "0"]])
    m = ratmatrix([["x", "0"], ["0", "1"]])
    a = gauge_transform(b, m)
    z = tower_matrix([["1", "0"], ["0", "1"]])
    assert verify_fundamental(DiffModule(a), transport_fundamental(z, m)).passed
    printed = linalg.matmul(linalg.map_entries(TowerElem, m), z)
    report = verify_fundamental(DiffModule(a), printed)
    assert not report.passed and report.failures() == [(0, 0)]


def test_transport_randomized(rng):
    for _ in range(15):
        p = linalg.diag([rand_ratfunc(rng, max_factors=1) for _ in range(2)], ZERO)
        z = solve_diagonal(p).entries
        m = ratmatrix(rand_invertible_rational(rng, 2))
        m = linalg.add(m, ratmatrix([[rand_ratfunc(rng, deg=1, max_factors=0), "0"], ["0", "0"]]))
        if linalg.det(m).is_zero():
            continue
        a = gauge_transform(p, m)
        assert _same(a, _sympy_gauge(p, m))
        assert verify_fundamental(DiffModule(a), transport_fundamental(z, m)).passed


def test_gauge_cocycle(rng):
    for _ in range(15):
        b = ratmatrix([[rand_ratfunc(rng) for _ in range(2)] for _ in range(2)])
        m1 = linalg.add(ratmatrix(rand_invertible_rational(rng, 2)), ratmatrix([["x", "0"], ["0", "0"]]))
        m2 = ratmatrix(rand_invertible_rational(rng, 2))
        if linalg.det(m1).is_zero():
            continue
        assert gauge_transform(b, linalg.matmul(m1, m2)) == gauge_transform(gauge_transform(b, m1), m2)


def test_verify_fundamental_examples():
    assert verify_fundamental(DiffModule(EX), Z_EX).passed
    assert verify_fundamental(trivial_module(2), tower_matrix([["1", "0"], ["0", "1"]])).passed
    rep = verify_fundamental(DiffModule(EX), tower_matrix([["1", "0"], ["0", "1"]]))
    assert not rep.passed and rep.failures()[0] == (0, 0)
    assert rep.to_json()["failures"][0]["residual"] == "-1/4/x"
    singular = verify_fundamental(trivial_module(2), tower_matrix([["1", "1"], ["1", "1"]]))
    assert not singular.passed and not singular.det_ok


def test_sign_convention_round_trip(rng):
    for _ in range(10):
        conn = ratmatrix([[rand_ratfunc(rng) for _ in range(3)] for _ in range(3)])
        mod = DiffModule(conn)
        actions = [mod.basis_action(i) for i in range(3)]
        assert DiffModule.from_basis_action(actions).conn == conn
        # delta(e_i) equals apply() on the coordinate vector of e_i
        for i in range(3):
            e = tuple(ONE if j == i else ZERO for j in range(3))
            assert mod.apply(e) == actions[i]


def test_dual():
    assert dual(DiffModule(EX)).conn == ratmatrix([["-1/(4*x)", "0"], ["0", "1/(4*x)"]])
    assert dual(trivial_module(2)).conn == trivial_module(2).conn
    zt_inv = tower_inverse(linalg.transpose(Z_EX))
    assert verify_fundamental(dual(DiffModule(EX)), zt_inv).passed
    sol = solve_triangular_2x2([["0", "1"], ["0", "0"]])
    z = sol.fundamental.entries
    assert verify_fundamental(dual(sol.fundamental.module), tower_inverse(linalg.transpose(z))).passed


def test_dual_involution(rng):
    for _ in range(10):
        mod = DiffModule([[rand_ratfunc(rng) for _ in range(2)] for _ in range(2)])
        assert dual(dual(mod)) == mod


def test_tensor_and_sum():
    a, b = DiffModule([["1/x"]]), DiffModule([["x"]])
    assert tensor(a, b).conn == ratmatrix([["1/x + x"]])
    assert direct_sum(a, b).conn == ratmatrix([["1/x", "0"], ["0", "x"]])
    v = DiffModule(EX)
    assert tensor(v, dual(v)).conn == linalg.diag(
        [ZERO, parse("1/(2*x)"), parse("-1/(2*x)"), ZERO], ZERO
    )
    assert tensor(v, DiffModule(linalg.zeros(3, 3, ZERO))).dim == 6
    assert direct_sum(v, tensor(v, v)).dim == 6
    assert tensor(trivial_module(2), trivial_module(3)) == trivial_module(6)
    assert direct_sum(trivial_module(1), trivial_module(2)) == trivial_module(3)


def test_tensor_of_fundamentals(rng):
    """Z1 (x) Z2 is fundamental for the tensor module."""
    for _ in range(5):
        p = linalg.diag([rand_ratfunc(rng, max_factors=1) for _ in range(2)], ZERO)
        q = linalg.diag([rand_ratfunc(rng, max_factors=1) for _ in range(2)], ZERO)
        z = linalg.kron(solve_diagonal(p).entries, solve_diagonal(q).entries)
        assert verify_fundamental(tensor(DiffModule(p), DiffModule(q)), z).passed
