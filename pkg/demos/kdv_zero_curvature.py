"""Verify the one-parameter sl2 zero-curvature representation of KdV.

The residual D_x A2 - D_t A1 + [A1, A2] is expanded as an exact polynomial
in the jet coordinates and the spectral parameter; it vanishes identically
for the standard family and breaks under any perturbation of an entry.
The flat covering is double-checked by commuting the substituted total
derivatives.
"""

from fractions import Fraction

from cdcalc import (
    CDiffOp, DiffPoly, JetContext, MatrixForm, covering_substitute,
    format_matrix_form, mc_residual,
)

ctx = JetContext.evolution("u", ["u*u_x + u_{x,x,x}"], params="lam")
P = ctx.parse

A1 = [[P("0"), P("-(lam + u)")],
      [P("1/6"), P("0")]]
A2 = [[P("-1/6*u_x"), P("-u_{x,x} - 1/3*u^2 + 1/3*lam*u + 2/3*lam^2")],
      [P("1/18*u - 1/9*lam"), P("1/6*u_x")]]
omega = MatrixForm.connection(ctx, [A1, A2])

residual = mc_residual(ctx, omega)
print("residual of the sl2 family:", "0" if residual.is_zero() else "nonzero")

# change the 1/6 entry to 1/5 and watch the curvature appear
A1_bad = [row[:] for row in A1]
A1_bad[1][0] = P("1/5")
broken = mc_residual(ctx, MatrixForm.connection(ctx, [A1_bad, A2]))
print("\nwith the (2,1) entry changed to 1/5:")
for line in format_matrix_form(broken):
    print(" ", line)

# flatness means the substituted derivatives commute as block operators
bx = covering_substitute(CDiffOp.total(ctx, "x"), omega)
bt = covering_substitute(CDiffOp.total(ctx, "t"), omega)
commutator = (bx @ bt) - (bt @ bx)
print("\nsubstituted D_x, D_t commute:", commutator.is_zero())

# adding a constant to any entry always destroys flatness
bump = DiffPoly.const(Fraction(1, 7))
bad = 0
for mats in range(2):
    for r in range(2):
        for c in range(2):
            m1 = [row[:] for row in A1]
            m2 = [row[:] for row in A2]
            (m1, m2)[mats][r][c] = (m1, m2)[mats][r][c] + bump
            if not mc_residual(ctx, MatrixForm.connection(ctx, [m1, m2])).is_zero():
                bad += 1
print(f"perturbed entries breaking flatness: {bad}/8")
