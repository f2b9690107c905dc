"""Hodge star over constant diagonal metrics and the p-form gauge data.

The metric is restricted to diagonal entries of +1/-1 so the star operator
and every adjoint stays inside exact rational arithmetic; this covers the
Euclidean and Lorentzian signatures of interest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .expr import DiffPoly
from .jet import HorizontalForm, JetContext, increasing_tuples, _merge_sign
from .linalg import rank
from .ops import CDiffOp, ScalarCDiffOp


class MetricError(ValueError):
    """Unsupported metric input."""


@dataclass(frozen=True)
class Metric:
    """Constant diagonal metric with entries +1/-1."""

    entries: tuple

    def __post_init__(self):
        if not self.entries:
            raise MetricError("metric needs at least one diagonal entry")
        if any(e not in (1, -1) for e in self.entries):
            raise MetricError(
                "only diagonal entries +1/-1 are supported (keeps the star "
                "operator rational)")

    @staticmethod
    def diag(entries) -> "Metric":
        return Metric(tuple(int(e) for e in entries))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def index(self) -> int:
        """Count of negative diagonal entries."""
        return sum(1 for e in self.entries if e < 0)

    def product(self, indices) -> int:
        out = 1
        for i in indices:
            out *= self.entries[i]
        return out


def star_basis(metric: Metric, indices: tuple, orientation: int = 1):
    """Star of a basis form dx_I: returns (complement tuple, rational sign).

    Defined by alpha ^ star(beta) = <alpha, beta> vol with
    vol = orientation * dx_1 ^ ... ^ dx_n.
    """
    n = metric.n
    complement = tuple(i for i in range(n) if i not in indices)
    _, eps = _merge_sign(indices, complement)
    return complement, Fraction(orientation * metric.product(indices) * eps)


def hodge_star(metric: Metric, omega: HorizontalForm,
               orientation: int = 1) -> HorizontalForm:
    """Hodge star on a horizontal form, coefficient by coefficient."""
    if orientation not in (1, -1):
        raise MetricError("orientation must be +1 or -1")
    n = metric.n
    if omega.n != n:
        raise MetricError("form and metric have different dimensions")
    coeffs: dict = {}
    for key, poly in omega.coeffs.items():
        comp, sign = star_basis(metric, key, orientation)
        term = poly if sign == 1 else sign * poly
        s = coeffs.get(comp, DiffPoly.zero()) + term
        if s:
            coeffs[comp] = s
        else:
            coeffs.pop(comp, None)
    return HorizontalForm(n, n - omega.degree, coeffs)


def star_operator(ctx: JetContext, metric: Metric, q: int,
                  orientation: int = 1) -> CDiffOp:
    """The star on degree-q form components as an order-0 operator matrix."""
    n = metric.n
    if ctx.n != n:
        raise MetricError("context and metric have different dimensions")
    sources = increasing_tuples(n, q)
    targets = increasing_tuples(n, n - q)
    tpos = {key: i for i, key in enumerate(targets)}
    entries = [[ScalarCDiffOp() for _ in sources] for _ in targets]
    for c, key in enumerate(sources):
        comp, sign = star_basis(metric, key, orientation)
        entries[tpos[comp]][c] = ScalarCDiffOp({(): DiffPoly.const(sign)})
    return CDiffOp(ctx, entries)


# ---------------------------------------------------------------------------
# The wedge/adjoint surjectivity check
# ---------------------------------------------------------------------------


@dataclass
class EpiCheck:
    surjective: bool
    rank: int
    dim: int
    degree: int  # target exterior degree


def _wedge_matrix(n: int, xi, k: int):
    """Matrix of (xi ^ .): Lambda^k -> Lambda^{k+1} over the fixed bases."""
    sources = increasing_tuples(n, k)
    targets = increasing_tuples(n, k + 1)
    tpos = {key: i for i, key in enumerate(targets)}
    matrix = [[Fraction(0)] * len(sources) for _ in targets]
    for c, key in enumerate(sources):
        for i in range(n):
            if xi[i] == 0 or i in key:
                continue
            newkey, sign = _merge_sign((i,), key)
            matrix[tpos[newkey]][c] += sign * xi[i]
    return matrix


def epi_check(n: int, p: int, metric: Metric, xi) -> EpiCheck:
    """Joint surjectivity of wedging by xi and its metric adjoint.

    Builds the combined map into Lambda^m for m = n - p - 1: wedge by xi
    from Lambda^{m-1} alongside the metric adjoint of the wedge from
    Lambda^{m+1}, and reports whether the two images fill Lambda^m by exact
    rank.  (The same splitting holds in every degree; this is the degree the
    compatibility argument consumes.)
    """
    if not 1 <= p < n - 1:
        raise ValueError(f"need 1 <= p < n-1, got p={p}, n={n}")
    if metric.n != n:
        raise MetricError("metric dimension does not match n")
    xi = [Fraction(v) for v in xi]
    if len(xi) != n:
        raise ValueError(f"covector must have {n} components")
    if all(v == 0 for v in xi):
        raise ValueError("covector must be nonzero (degenerate input)")

    m = n - p - 1
    wedge_in = _wedge_matrix(n, xi, m - 1)            # Lambda^{m-1} -> Lambda^m
    wedge_up = _wedge_matrix(n, xi, m)                # Lambda^m -> Lambda^{m+1}
    mids = increasing_tuples(n, m)
    highs = increasing_tuples(n, m + 1)
    # adjoint: [A*]_{I,J} = g_I g_J [A]_{J,I} for diagonal +-1 metrics
    adj = [[metric.product(mid) * metric.product(high) * wedge_up[jr][ir]
            for jr, high in enumerate(highs)]
           for ir, mid in enumerate(mids)]
    combined = [row_a + row_b for row_a, row_b in zip(wedge_in, adj)]
    r = rank(combined)
    dim = comb(n, m)
    return EpiCheck(surjective=(r == dim), rank=r, dim=dim, degree=m)


# ---------------------------------------------------------------------------
# The two-generator dimension table
# ---------------------------------------------------------------------------


@dataclass
class E1Table:
    """Sparse table of unit dimensions at bidegrees (i, q), q <= n-2.

    Generated by the free graded-commutative algebra on one generator of
    bidegree (0, n-p-1) and one of bidegree (1, n-p-1): parity is total
    degree mod 2, even generators admit all powers, odd generators square
    to zero.  A monomial w1^a w2^b sits at (i, q) = (b, (a+b)(n-p-1)).
    """

    n: int
    p: int
    entries: dict

    def dim(self, i: int, q: int) -> int:
        return self.entries.get((i, q), 0)

    def triples(self) -> list[tuple[int, int, int]]:
        return sorted((i, q, d) for (i, q), d in self.entries.items())

    def positions(self) -> set:
        return set(self.entries)


def e1_table(n: int, p: int) -> E1Table:
    """Enumerate the generator monomials surviving the degree cut q <= n-2."""
    if not 1 <= p < n - 1:
        raise ValueError(f"need 1 <= p < n-1, got p={p}, n={n}")
    d = n - p - 1
    q_max = n - 2
    w1_odd = d % 2 == 1          # parity of (0, d) generator
    w2_odd = (d + 1) % 2 == 1    # parity of (1, d) generator
    entries: dict = {}
    for a in itertools.count():
        if a * d > q_max or (w1_odd and a > 1):
            break
        for b in itertools.count():
            if (a + b) * d > q_max or (w2_odd and b > 1):
                break
            entries[(b, (a + b) * d)] = 1
    assert entries.get((0, 0)) == 1
    return E1Table(n=n, p=p, entries=entries)
