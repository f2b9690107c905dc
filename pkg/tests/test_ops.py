import random

import pytest

from cdcalc import (
    CDiffOp, DiffPoly, JetContext, adjoint, compose, dbar_operator,
    format_operator, green_remainder, linearize, pairing,
    parse_operator_matrix, parse_scalar_op, total_derivative,
)
from cdcalc.ops import ScalarCDiffOp

from conftest import rand_operator, rand_poly


@pytest.fixture
def ctx():
    return JetContext.free("x t", "u")


@pytest.fixture
def kdv(ctx):
    return [ctx.parse("u_t - u*u_x - u_{x,x,x}")]


def test_apply_examples(ctx, kdv):
    dx = CDiffOp.total(ctx, "x")
    assert dx([ctx.parse("u^2")]) == [ctx.parse("2*u*u_x")]
    ident = CDiffOp.identity(ctx, 1)
    f = ctx.parse("u*u_t + 1/3")
    assert ident([f]) == [f]
    lf = linearize(ctx, kdv)
    assert lf([ctx.parse("u_x")]) == [ctx.parse("u_xt - u*u_xx - u_x^2 - u_xxxx")]


def test_apply_dimension_mismatch(ctx):
    dx = CDiffOp.total(ctx, "x")
    with pytest.raises(ValueError):
        dx([ctx.parse("u"), ctx.parse("u_x")])


def test_compose_examples(ctx):
    dx = CDiffOp.total(ctx, "x")
    mult_u = CDiffOp.multiplication(ctx, ctx.parse("u"))
    assert dx @ mult_u == parse_operator_matrix("u*D_{x} + u_x", ctx)
    zero = CDiffOp.zero(ctx, 1, 1)
    assert (dx @ zero).is_zero()
    assert dx @ dx == parse_operator_matrix("D_{x,x}", ctx)


def test_compose_apply_compatible(ctx):
    rng = random.Random(7)
    for _ in range(25):
        a = rand_operator(rng, ctx, 2, 2)
        b = rand_operator(rng, ctx, 2, 2)
        v = [rand_poly(rng, ctx), rand_poly(rng, ctx)]
        assert (a @ b)(v) == a(b(v))


def test_compose_associative(ctx):
    rng = random.Random(8)
    for _ in range(10):
        a = rand_operator(rng, ctx, 1, 2, max_op_order=1)
        b = rand_operator(rng, ctx, 2, 2, max_op_order=1)
        c = rand_operator(rng, ctx, 2, 1, max_op_order=1)
        assert (a @ b) @ c == a @ (b @ c)


def test_compose_order_bound(ctx):
    rng = random.Random(9)
    for _ in range(20):
        a = rand_operator(rng, ctx, 1, 1, max_op_order=2)
        b = rand_operator(rng, ctx, 1, 1, max_op_order=2)
        assert (a @ b).order <= a.order + b.order


def test_adjoint_examples(ctx):
    dx = CDiffOp.total(ctx, "x")
    assert adjoint(dx) == parse_operator_matrix("-D_{x}", ctx)
    u_dx = parse_operator_matrix("u*D_{x}", ctx)
    assert adjoint(u_dx) == parse_operator_matrix("-u*D_{x} - u_x", ctx)


def test_adjoint_kdv_golden(ctx, kdv):
    lf = linearize(ctx, kdv)
    assert lf == parse_operator_matrix("D_{t} - u*D_{x} - u_x - D_{x,x,x}", ctx)
    assert adjoint(lf) == parse_operator_matrix("-D_{t} + u*D_{x} + D_{x,x,x}", ctx)


def test_adjoint_involution_and_contravariance(ctx):
    rng = random.Random(10)
    for _ in range(20):
        a = rand_operator(rng, ctx, 2, 2)
        b = rand_operator(rng, ctx, 2, 2)
        assert adjoint(adjoint(a)) == a
        assert adjoint(a @ b) == adjoint(b) @ adjoint(a)


def test_adjoint_transposes_shape(ctx):
    rng = random.Random(11)
    op = rand_operator(rng, ctx, 3, 2)
    adj = adjoint(op)
    assert (adj.rows, adj.cols) == (2, 3)


def test_linearize_examples(ctx):
    const = [DiffPoly.const(1)]
    assert linearize(ctx, const).is_zero()
    f = ctx.parse("u")
    g = ctx.parse("u_x")
    lhs = linearize(ctx, [f * g])
    rhs_f = linearize(ctx, [f])
    rhs_g = linearize(ctx, [g])
    want = rhs_g.scale(f) + rhs_f.scale(g)
    assert lhs == want


def test_linearize_requires_free_mode():
    ctx = JetContext.evolution("u", ["u_xx"])
    with pytest.raises(ValueError):
        linearize(ctx, [ctx.parse("u_x")])


def test_linearize_commutes_with_total_derivative(ctx):
    rng = random.Random(12)
    for _ in range(15):
        f = rand_poly(rng, ctx, max_order=2)
        lhs = linearize(ctx, [total_derivative(ctx, "x", f)])
        rhs = CDiffOp.total(ctx, "x") @ linearize(ctx, [f])
        assert lhs == rhs


def green_identity_holds(ctx, op, p, q):
    lhs = pairing(q, op(p)) - pairing(adjoint(op)(q), p)
    rhs = DiffPoly.zero()
    for i, r in enumerate(green_remainder(op, p, q)):
        rhs = rhs + total_derivative(ctx, i, r)
    return lhs == rhs


def test_green_remainder_examples():
    ctx1 = JetContext.free("x", "u v")
    dx = CDiffOp.total(ctx1, "x")
    p = [ctx1.parse("u^2")]
    q = [ctx1.parse("v")]
    assert green_remainder(dx, p, q) == [ctx1.parse("v*u^2")]
    dxx = CDiffOp.total(ctx1, "x", "x")
    assert green_remainder(dxx, p, q) == [ctx1.parse("v*2*u*u_x - v_x*u^2")]
    zero_p = [DiffPoly.zero()]
    assert green_remainder(dxx, zero_p, q) == [DiffPoly.zero()]


def test_green_identity_random():
    rng = random.Random(13)
    ctx3 = JetContext.free("x y z", "u v")
    for _ in range(10):
        op = rand_operator(rng, ctx3, 2, 2, max_op_order=3)
        p = [rand_poly(rng, ctx3), rand_poly(rng, ctx3)]
        q = [rand_poly(rng, ctx3), rand_poly(rng, ctx3)]
        assert green_identity_holds(ctx3, op, p, q)


def test_dbar_operator_squares_to_zero():
    ctx3 = JetContext.free("x y z", "u")
    for q in range(0, 2):
        d2 = dbar_operator(ctx3, q + 1) @ dbar_operator(ctx3, q)
        assert d2.is_zero()


def test_dbar_operator_matches_forms():
    from cdcalc import HorizontalForm, dbar, increasing_tuples
    rng = random.Random(14)
    ctx3 = JetContext.free("x y z", "u")
    for q in range(0, 3):
        keys = increasing_tuples(3, q)
        comps = [rand_poly(rng, ctx3) for _ in keys]
        omega = HorizontalForm(3, q, dict(zip(keys, comps)))
        direct = dbar(ctx3, omega)
        out = dbar_operator(ctx3, q)(comps)
        tkeys = increasing_tuples(3, q + 1)
        for key, poly in zip(tkeys, out):
            assert direct.coeffs.get(key, DiffPoly.zero()) == poly


def test_operator_algebra_in_evolution_mode():
    # composition and adjoints stay consistent when the time derivative
    # substitutes the evolution rule inside coefficients
    ectx = JetContext.evolution("u", ["u*u_x + u_{x,x,x}"])
    rng = random.Random(16)
    for _ in range(10):
        a = rand_operator(rng, ectx, 2, 2, max_op_order=2)
        b = rand_operator(rng, ectx, 2, 2, max_op_order=2)
        v = [rand_poly(rng, ectx), rand_poly(rng, ectx)]
        assert (a @ b)(v) == a(b(v))
        assert adjoint(adjoint(a)) == a
        assert adjoint(a @ b) == adjoint(b) @ adjoint(a)


def test_zero_operator_order_convention(ctx):
    assert CDiffOp.zero(ctx, 2, 3).order == 0
    assert ScalarCDiffOp().order == 0


def test_operator_format_round_trip(ctx):
    rng = random.Random(15)
    for _ in range(25):
        op = rand_operator(rng, ctx, 2, 2)
        assert parse_operator_matrix(format_operator(op), ctx) == op


def test_operator_literal_grammar(ctx):
    op = parse_scalar_op("(u + u_x)*D_{x,t} - 3*D_{t} + u^2", ctx)
    sigma_xt = (0, 1)
    assert op.terms[sigma_xt] == ctx.parse("u + u_x")
    assert op.terms[(1,)] == ctx.parse("-3")
    assert op.terms[()] == ctx.parse("u^2")
    with pytest.raises(Exception):
        parse_scalar_op("D_{x}*u", ctx)
