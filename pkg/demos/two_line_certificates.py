"""Expand the power-sum vs k-th-power polynomials behind the order bound.

For an evolution equation of order k >= 2 the operators acting on the
symbol level multiply by (t1^k + ... + tp^k) +- (t1 + ... + tp)^k; the
expansion being nonzero certifies the vanishing argument.  At k = 1 the
minus variant collapses identically, which is why first-order equations
are excluded.
"""

from cdcalc import format_poly, two_line_polynomial

print("k=1, sign -, p=2..4 (degenerate):")
for p in (2, 3, 4):
    r = two_line_polynomial(1, p, "-")
    print(f"  p={p}: nonzero={r.nonzero}")

print("\nsmall cases, expanded:")
for k, p, sign in ((2, 2, "-"), (3, 2, "+"), (2, 3, "-")):
    r = two_line_polynomial(k, p, sign)
    print(f"  k={k}, p={p}, sign {sign}: {format_poly(r.poly, r.ctx)}")

print("\nfull grid 2 <= k <= 5, 2 <= p <= 4, both signs:")
all_nonzero = all(
    two_line_polynomial(k, p, sign).nonzero
    for k in range(2, 6) for p in range(2, 5) for sign in ("+", "-"))
print("  all nonzero:", all_nonzero)
