"""Acceptance suite: one test per criterion, exact arithmetic throughout.

Each test enforces its stated runtime budget; a terminal-summary hook in
conftest.py prints one PASSED/FAILED line per criterion after the run.
"""

import io
import random
import time
from contextlib import redirect_stdout, redirect_stderr
from fractions import Fraction
from itertools import combinations
from math import comb
from pathlib import Path

from cdcalc import (
    CDiffOp, DiffPoly, HorizontalForm, JetContext, MatrixForm, Metric,
    OperatorComplex, adjoint, check_formal_exactness, dbar, dbar_operator,
    delta_map, e1_table, epi_check, green_remainder, hodge_star,
    is_involutive, kline_report, linearize, mc_residual, pairing,
    parse_operator_matrix, random_point, spencer_cohomology, star_operator,
    total_derivative, two_line_polynomial, wedge,
)
from cdcalc.linalg import rank
from cdcalc.spencer import sym_dim

from conftest import rand_operator, rand_poly

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


class budget:
    """Fail the criterion if it exceeds its stated runtime."""

    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.monotonic()
        return self

    def __exit__(self, *exc):
        if exc[0] is None:
            elapsed = time.monotonic() - self.start
            assert elapsed < self.seconds, f"budget {self.seconds}s exceeded: {elapsed:.1f}s"


def test_criterion_01_property_suite():
    with budget(10):
        ctx3 = JetContext.free("x y z", "u v")
        rng = random.Random(100)
        for _ in range(200):
            f = rand_poly(rng, ctx3, max_order=2)
            for i, j in combinations(range(3), 2):
                assert total_derivative(ctx3, i, total_derivative(ctx3, j, f)) \
                    == total_derivative(ctx3, j, total_derivative(ctx3, i, f))
        # dbar^2 = 0 on 100 random forms of every degree < n
        from cdcalc import increasing_tuples
        count = 0
        degree = 0
        while count < 100:
            keys = increasing_tuples(3, degree % 2)
            omega = HorizontalForm(3, degree % 2,
                                   {k: rand_poly(rng, ctx3) for k in keys})
            assert dbar(ctx3, dbar(ctx3, omega)).is_zero()
            count += 1
            degree += 1
        # Leibniz for dbar
        for qa in (0, 1):
            for qb in (0, 1):
                for _ in range(10):
                    a = HorizontalForm(3, qa, {k: rand_poly(rng, ctx3)
                                               for k in increasing_tuples(3, qa)})
                    b = HorizontalForm(3, qb, {k: rand_poly(rng, ctx3)
                                               for k in increasing_tuples(3, qb)})
                    rhs = wedge(dbar(ctx3, a), b)
                    ab = wedge(a, dbar(ctx3, b))
                    if qa % 2:
                        ab = -ab
                    assert dbar(ctx3, wedge(a, b)) == rhs + ab
        # ring laws
        for _ in range(50):
            a, b, c = (rand_poly(rng, ctx3) for _ in range(3))
            assert (a + b) + c == a + (b + c)
            assert a * (b + c) == a * b + a * c
            assert (a * b) * c == a * (b * c)


def test_criterion_02_adjoint_suite():
    with budget(30):
        ctx = JetContext.free("x t", "u")
        rng = random.Random(200)
        for _ in range(100):
            a = rand_operator(rng, ctx, 2, 2, max_op_order=3)
            b = rand_operator(rng, ctx, 2, 2, max_op_order=3)
            assert adjoint(adjoint(a)) == a
            assert adjoint(a @ b) == adjoint(b) @ adjoint(a)
        ctx3 = JetContext.free("x y z", "u v")
        for _ in range(25):
            op = rand_operator(rng, ctx3, 2, 2, max_op_order=3)
            p = [rand_poly(rng, ctx3), rand_poly(rng, ctx3)]
            q = [rand_poly(rng, ctx3), rand_poly(rng, ctx3)]
            lhs = pairing(q, op(p)) - pairing(adjoint(op)(q), p)
            rhs = DiffPoly.zero()
            for i, r in enumerate(green_remainder(op, p, q)):
                rhs = rhs + total_derivative(ctx3, i, r)
            assert lhs == rhs


def test_criterion_03_kdv_linearization_golden():
    ctx = JetContext.free("x t", "u")
    lf = linearize(ctx, [ctx.parse("u_t - u*u_x - u_{x,x,x}")])
    assert lf == parse_operator_matrix("D_{t} - u*D_{x} - u_x - D_{x,x,x}", ctx)
    assert adjoint(lf) == parse_operator_matrix("-D_{t} + u*D_{x} + D_{x,x,x}", ctx)


def test_criterion_04_kdv_zero_curvature():
    with budget(5):
        ctx = JetContext.evolution("u", ["u*u_x + u_{x,x,x}"], params="lam")
        P = ctx.parse

        def family():
            a1 = [[P("0"), P("-(lam + u)")],
                  [P("1/6"), P("0")]]
            a2 = [[P("-1/6*u_x"), P("-u_{x,x} - 1/3*u^2 + 1/3*lam*u + 2/3*lam^2")],
                  [P("1/18*u - 1/9*lam"), P("1/6*u_x")]]
            return a1, a2

        omega = MatrixForm.connection(ctx, list(family()))
        assert mc_residual(ctx, omega).is_zero()  # identically, lam symbolic
        bump = DiffPoly.const(Fraction(1, 7))
        for mat in (0, 1):
            for r in range(2):
                for c in range(2):
                    mats = list(family())
                    mats[mat][r][c] = mats[mat][r][c] + bump
                    perturbed = MatrixForm.connection(ctx, mats)
                    assert not mc_residual(ctx, perturbed).is_zero(), (mat, r, c)


def test_criterion_05_spencer_involutivity():
    with budget(60):
        for names in ("x t", "x y z"):
            ctx = JetContext.free(names, "u")
            result = is_involutive(dbar_operator(ctx, 0), 3, seed=0)
            assert result.involutive and result.l_max == 3
            assert all(v == 0 for row in result.report.dims for v in row)
        # delta-Poincare at desk scale: full-module complex exact in
        # positive exterior degree for n <= 3, total symmetric degree <= 4
        for n in (1, 2, 3):
            for rank_p in (1, 2):
                for total in range(1, 5):
                    prev_rank = 0
                    for s in range(0, min(total, n) + 1):
                        r = total - s
                        dim = rank_p * sym_dim(n, r) * comb(n, s)
                        if r == 0 or s == n:
                            out_rank = 0
                        else:
                            out_rank = rank(delta_map(n, rank_p, r, s).matrix)
                        if s >= 1:
                            assert dim - out_rank == prev_rank, (n, rank_p, total, s)
                        prev_rank = out_rank
        # the zero operator's table is zero away from the augmentation slot
        ctx = JetContext.free("x y z", "u")
        rep = spencer_cohomology(CDiffOp.zero(ctx, 1, 1), 4, seed=0)
        assert all(v == 0 for row in rep.dims for v in row)


def test_criterion_06_formal_exactness():
    with budget(300):
        ctx = JetContext.free("x t", "u")
        cplx = OperatorComplex([dbar_operator(ctx, 0), dbar_operator(ctx, 1)])
        report = check_formal_exactness(cplx, 3, seed=0)
        assert report.all_exact
        first = report.checks[0]
        assert first.dims == (6, 6, 1) and first.ranks == (5, 1) and first.defect == 0

        ctx4 = JetContext.free("x y z w", "u")
        g = Metric.diag([1, 1, 1, 1])
        wave = dbar_operator(ctx4, 2) @ star_operator(ctx4, g, 2) \
            @ dbar_operator(ctx4, 1)
        maxwell = OperatorComplex([wave, dbar_operator(ctx4, 3)])
        pt = random_point(ctx4, 3, seed=0)
        report = check_formal_exactness(maxwell, 2, pt=pt)
        assert report.all_exact


def test_criterion_07_two_line():
    with budget(5):
        for p in (2, 3, 4):
            assert not two_line_polynomial(1, p, "-").nonzero
        for k in range(2, 6):
            for p in range(2, 5):
                for sign in ("+", "-"):
                    assert two_line_polynomial(k, p, sign).nonzero, (k, p, sign)


def test_criterion_08_pform_suite():
    with budget(30):
        for n in range(1, 5):
            for sig in ([1] * n, [-1] + [1] * (n - 1)):
                g = Metric.diag(sig)
                for k in range(n + 1):
                    for indices in combinations(range(n), k):
                        b = HorizontalForm.basis(n, indices)
                        ss = hodge_star(g, hodge_star(g, b))
                        sign = (-1) ** (k * (n - k) + g.index)
                        assert ss == (b if sign == 1 else -b)
        assert epi_check(4, 1, Metric.diag([1, 1, 1, 1]), [1, 0, 0, 0]).surjective
        assert epi_check(4, 1, Metric.diag([-1, 1, 1, 1]), [2, 1, 0, 0]).surjective
        assert e1_table(4, 1).positions() == {(0, 0), (0, 2), (1, 2)}
        assert e1_table(6, 3).positions() == \
            {(0, 0), (0, 2), (1, 2), (0, 4), (1, 4)}
        assert e1_table(8, 4).positions() == \
            {(0, 0), (0, 3), (1, 3), (1, 6), (2, 6)}


def test_criterion_09_kline_golden():
    assert kline_report(2, 2).lines() == [
        "k: 2",
        "n: 2",
        "E1 vanishing: E1^{p,q} = 0 for p > 0 and q <= 0",
        "C-cohomology vanishing: H^i = 0 for i >= 2",
    ]
    assert kline_report(3, 4).lines() == [
        "k: 3",
        "n: 4",
        "E1 vanishing: E1^{p,q} = 0 for p > 0 and q <= 1",
        "C-cohomology vanishing: H^i = 0 for i >= 3",
    ]
    # p-form theory: k = p + 2, here p = 1, n = 4
    assert kline_report(3, 4).e1_bound == 4 - 1 - 2


def test_criterion_10_cli_determinism():
    from cdcalc.cli import run

    def invoke(*argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = run(list(argv))
        return code, out.getvalue(), err.getvalue()

    kdv = str(DATA / "kdv.prob")
    forms = str(DATA / "kdv_sl2.forms")
    derham = str(DATA / "derham2.cplx")
    for argv in (
        ("linearize", kdv),
        ("adjoint", kdv, "--json"),
        ("symbol", kdv, "--seed", "7"),
        ("spencer", kdv, "--l-max", "2", "--seed", "1"),
        ("involutive", kdv, "--l-max", "2"),
        ("exactness", derham, "--l-max", "2", "--seed", "2"),
        ("coker", kdv, "--k1", "1"),
        ("kline", "--k", "2", "--n", "2"),
        ("zcr", kdv, "--forms", forms),
        ("two-line", "--k", "3", "--p", "2", "--sign", "+"),
        ("pform-epi", "--n", "4", "--p", "1", "--metric", "diag(1,1,1,1)",
         "--xi", "1,0,0,0"),
        ("pform-table", "--n", "8", "--p", "4", "--json"),
    ):
        first = invoke(*argv)
        second = invoke(*argv)
        assert first == second, argv
        assert first[0] == 0, argv
