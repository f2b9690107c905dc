"""Formal exactness of operator complexes, checked on jet fibers.

Three complexes: the n=2 de Rham chain (exact), a truncated chain with the
curl missing (a defect appears), and the n=4 Maxwell chain built from
d-bar, the Hodge star, and d-bar again (exact).  Cokernel ranks of
prolonged operators show where a compatibility operator is required.
"""

from cdcalc import (
    CDiffOp, JetContext, Metric, OperatorComplex, check_formal_exactness,
    cokernel_rank, dbar_operator, linearize, random_point, star_operator,
)

ctx = JetContext.free("x t", "u")

print("de Rham chain F -> forms^1 -> forms^2 over n = 2:")
derham = OperatorComplex([dbar_operator(ctx, 0), dbar_operator(ctx, 1)])
report = check_formal_exactness(derham, 3, seed=0)
for c in report.checks:
    print(f"  l={c.l}: dims {c.dims[0]} -> {c.dims[1]} -> {c.dims[2]}, "
          f"ranks {c.ranks}, defect {c.defect}")
print("  all exact:", report.all_exact)

print("\ngradient followed by a zero map (the curl is missing):")
broken = OperatorComplex([dbar_operator(ctx, 0), CDiffOp.zero(ctx, 1, 2)],
                         orders=[1, 1])
report = check_formal_exactness(broken, 2, seed=0)
for c in report.checks:
    print(f"  l={c.l}: defect {c.defect}")
print("  first defect at (position, l):", report.first_defect)

print("\nMaxwell chain forms^1 -> forms^3 -> forms^4 over n = 4, Euclidean:")
ctx4 = JetContext.free("x y z w", "u")
g = Metric.diag([1, 1, 1, 1])
wave = dbar_operator(ctx4, 2) @ star_operator(ctx4, g, 2) @ dbar_operator(ctx4, 1)
maxwell = OperatorComplex([wave, dbar_operator(ctx4, 3)])
report = check_formal_exactness(maxwell, 2, pt=random_point(ctx4, 3, seed=0))
for c in report.checks:
    print(f"  l={c.l}: dims {c.dims[0]} -> {c.dims[1]} -> {c.dims[2]}, "
          f"defect {c.defect}")
print("  all exact:", report.all_exact)

print("\ncokernel ranks of one-step prolongations:")
grad = dbar_operator(ctx, 0)
print("  gradient, k1=1:", cokernel_rank(grad, 1, seed=0),
      "(the curl relation exists)")
kdv = linearize(ctx, [ctx.parse("u_t - u*u_x - u_{x,x,x}")])
print("  KdV linearization, k1=1:", cokernel_rank(kdv, 1, seed=0),
      "(determined equation: the chain stops)")
