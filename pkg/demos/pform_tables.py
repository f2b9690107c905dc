"""Hodge stars, the wedge/adjoint surjectivity check, and dimension tables.

Everything is exact: metrics are diagonal +-1, so stars and adjoints stay
rational.  The unit-dimension tables follow the two-generator algebra with
the parity rule (even generator: all powers, odd generator: square zero).
"""

from cdcalc import (
    DiffPoly, HorizontalForm, Metric, e1_table, epi_check, hodge_star,
    kline_report,
)

g2 = Metric.diag([1, 1])
dx = HorizontalForm.basis(2, (0,))
dt = HorizontalForm.basis(2, (1,))
one = HorizontalForm.function(2, DiffPoly.const(1))
print("n=2 Euclidean stars:")
print("  *dx  =", "dt" if hodge_star(g2, dx) == dt else "?")
print("  *dt  =", "-dx" if hodge_star(g2, dt) == -dx else "?")
print("  *1   =", "dx^dt" if hodge_star(g2, one) == HorizontalForm.basis(2, (0, 1)) else "?")

g4 = Metric.diag([-1, 1, 1, 1])
vol = HorizontalForm.basis(4, (0, 1, 2, 3))
print("  *vol (Lorentzian n=4) =", hodge_star(g4, vol).coeffs[()].constant_value())

print("\nwedge/adjoint surjectivity (n=4, p=1):")
for label, metric, xi in (
    ("Euclidean, xi=(1,0,0,0)", Metric.diag([1, 1, 1, 1]), [1, 0, 0, 0]),
    ("Lorentzian, xi=(2,1,0,0) non-null", g4, [2, 1, 0, 0]),
    ("Lorentzian, xi=(1,1,0,0) null", g4, [1, 1, 0, 0]),
):
    r = epi_check(4, 1, metric, xi)
    print(f"  {label}: surjective={r.surjective} (rank {r.rank} of {r.dim})")

print("\nunit-dimension tables (i, q) positions:")
for n, p in ((4, 1), (6, 3), (8, 4)):
    table = e1_table(n, p)
    print(f"  n={n}, p={p}:", sorted(table.positions()))

print("\nvanishing ranges for a length-(p+2) chain, n=4, p=1:")
for line in kline_report(1 + 2, 4).lines():
    print(" ", line)
