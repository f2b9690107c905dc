"""Symbols, jet-fiber maps, and delta-cohomology of operators.

Everything here is finite-dimensional exact linear algebra at a point: the
operator's coefficients are frozen to rationals, the graded symbol maps are
assembled between symmetric powers, and the delta-complex built on their
kernels yields the cohomology table used for involutivity tests.

Conventions for the cohomology table ``dims[l][i]``:

* the level-l complex has terms Lambda^i (x) g^{k+l-i} for 0 <= i <= l
  (these are the slots whose symmetric degree is at least the operator
  order k); columns i > l lie outside it and are reported as 0;
* g^r for r >= k is the kernel of the degree-r graded symbol map, and
  closedness is measured by the ambient delta differential;
* the single degenerate slot (k + l == 0, i == 0) is reported as 0: at
  symmetric degree zero the kernel of delta consists of the constants,
  which the full polynomial complex resolves.

Under these conventions the table always has dims[l][0] = dims[l][1] = 0
(injectivity of delta in positive degree, and the prolongation property of
symbol kernels), which the implementation asserts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .expr import DiffPoly, Coord, PARAM
from .jet import JetContext, JetPoint, PointError, generic_points, increasing_tuples
from .linalg import kernel_basis, rank
from .ops import CDiffOp, ScalarCDiffOp, _left_Di

# ---------------------------------------------------------------------------
# Multi-index bases
# ---------------------------------------------------------------------------


def multiindices(n: int, r: int) -> list[tuple[int, ...]]:
    """Non-decreasing r-tuples from range(n), lexicographic (basis of S^r)."""
    return list(itertools.combinations_with_replacement(range(n), r))


def multiindices_upto(n: int, r: int) -> list[tuple[int, ...]]:
    """All multi-indices of length <= r, by (length, lex); jet-fiber basis."""
    out = []
    for d in range(r + 1):
        out.extend(multiindices(n, d))
    return out


def sym_dim(n: int, r: int) -> int:
    return comb(n + r - 1, n - 1) if r >= 0 else 0


def jet_fiber_dim(n: int, r: int) -> int:
    return comb(n + r, n)


def _merge(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(a + b))


def _remove_one(sigma: tuple, i: int) -> tuple:
    out = list(sigma)
    out.remove(i)
    return tuple(out)


# ---------------------------------------------------------------------------
# Symbols
# ---------------------------------------------------------------------------


@dataclass
class SymbolMatrix:
    """Top-order coefficients frozen at a point.

    ``entries[(s, j)]`` maps a degree-k multi-index to its rational
    coefficient; only nonzero values are stored.
    """

    n: int
    rows: int
    cols: int
    degree: int
    entries: dict

    def entry(self, s: int, j: int) -> dict:
        return self.entries.get((s, j), {})


def symbol(op: CDiffOp, pt: JetPoint) -> SymbolMatrix:
    """Degree-k part of the operator with coefficients evaluated at ``pt``."""
    k = op.order
    entries: dict = {}
    for s in range(op.rows):
        for j in range(op.cols):
            cell = {}
            for sigma, poly in op.entries[s][j].terms.items():
                if len(sigma) != k:
                    continue
                value = poly.evaluate(pt)
                if value:
                    cell[sigma] = value
            if cell:
                entries[(s, j)] = cell
    return SymbolMatrix(op.ctx.n, op.rows, op.cols, k, entries)


def graded_symbol_matrix(sym: SymbolMatrix, l: int) -> list[list[Fraction]]:
    """Matrix of the degree-graded map S^{k+l} (x) P -> S^l (x) P1.

    Rows are (s, tau) with |tau| = l, columns (j, mu) with |mu| = k + l;
    the entry is the symbol coefficient at mu minus tau when tau fits
    inside mu.
    """
    n = sym.n
    taus = multiindices(n, l)
    mus = multiindices(n, sym.degree + l)
    mu_pos = {mu: c for c, mu in enumerate(mus)}
    n_cols = sym.cols * len(mus)
    matrix = []
    for s in range(sym.rows):
        for tau in taus:
            row = [Fraction(0)] * n_cols
            for j in range(sym.cols):
                cell = sym.entry(s, j)
                for sigma, value in cell.items():
                    mu = _merge(tau, sigma)
                    row[j * len(mus) + mu_pos[mu]] += value
            matrix.append(row)
    return matrix


def symbol_kernel_basis(sym: SymbolMatrix, r: int) -> list[list[Fraction]]:
    """Basis of g^r inside S^r (x) P (full module below the operator order)."""
    n_cols = sym.cols * sym_dim(sym.n, r)
    if r < 0:
        return []
    if r < sym.degree:
        return [[Fraction(1) if i == j else Fraction(0) for j in range(n_cols)]
                for i in range(n_cols)]
    return kernel_basis(graded_symbol_matrix(sym, r - sym.degree), n_cols)


# ---------------------------------------------------------------------------
# Fiber maps of prolonged operators
# ---------------------------------------------------------------------------


@dataclass
class FiberMap:
    """Rational matrix of a prolonged operator between jet fibers."""

    matrix: list
    domain_dim: int
    codomain_dim: int
    source_rank: int
    source_order: int
    target_rank: int
    target_order: int

    def rank(self) -> int:
        return rank(self.matrix)


def fiber_map(op: CDiffOp, l: int, pt: JetPoint,
              declared_order: int | None = None) -> FiberMap:
    """The prolonged operator as a map of jet fibers at a point.

    Maps the order-(k+l) fiber on the source to the order-l fiber on the
    target, k being the (declared) operator order.  The point must cover
    the operator's coefficients and their first l total derivatives.
    """
    ctx = op.ctx
    n = ctx.n
    k = op.order if declared_order is None else declared_order
    if k < op.order:
        raise ValueError(f"declared order {k} below actual order {op.order}")
    needed = op.coefficient_jet_order() + l
    if pt.order_bound < needed:
        raise PointError(
            f"point order {pt.order_bound} insufficient; need {needed}")

    taus = multiindices_upto(n, l)
    mus = multiindices_upto(n, k + l)
    mu_pos = {mu: c for c, mu in enumerate(mus)}
    prolonged: dict[tuple, list[list[ScalarCDiffOp]]] = {(): [list(r) for r in op.entries]}
    for tau in taus:
        if not tau:
            continue
        parent = prolonged[tau[:-1]]
        prolonged[tau] = [[_left_Di(ctx, tau[-1], e) for e in row] for row in parent]

    n_cols = op.cols * len(mus)
    matrix = []
    for s in range(op.rows):
        for tau in taus:
            row = [Fraction(0)] * n_cols
            entries = prolonged[tau][s]
            for j in range(op.cols):
                for mu, poly in entries[j].terms.items():
                    value = poly.evaluate(pt)
                    if value:
                        row[j * len(mus) + mu_pos[mu]] += value
            matrix.append(row)
    return FiberMap(
        matrix=matrix,
        domain_dim=n_cols,
        codomain_dim=op.rows * len(taus),
        source_rank=op.cols, source_order=k + l,
        target_rank=op.rows, target_order=l,
    )


# ---------------------------------------------------------------------------
# Delta maps
# ---------------------------------------------------------------------------


def _delta_columns(n: int, rank_p: int, r: int, s: int):
    """Basis bookkeeping for delta on Lambda^s (x) S^r (x) P.

    Returns (source basis, target basis, action) where action maps a source
    basis index to a list of (target index, sign) pairs.
    """
    src_forms = increasing_tuples(n, s)
    tgt_forms = increasing_tuples(n, s + 1)
    src_sym = multiindices(n, r)
    tgt_sym = multiindices(n, r - 1)
    tgt_form_pos = {f: i for i, f in enumerate(tgt_forms)}
    tgt_sym_pos = {m: i for i, m in enumerate(tgt_sym)}

    def tgt_index(form_i: int, comp: int, sym_i: int) -> int:
        return (form_i * rank_p + comp) * len(tgt_sym) + sym_i

    action = []
    for form in src_forms:
        for comp in range(rank_p):
            for mu in src_sym:
                hits = []
                for i in set(mu):
                    if i in form:
                        continue
                    sign = -1 if sum(1 for a in form if a < i) % 2 else 1
                    newform = tuple(sorted(form + (i,)))
                    rho = _remove_one(mu, i)
                    hits.append((tgt_index(tgt_form_pos[newform], comp,
                                           tgt_sym_pos[rho]), sign))
                action.append(hits)
    src_dim = len(src_forms) * rank_p * len(src_sym)
    tgt_dim = len(tgt_forms) * rank_p * len(tgt_sym)
    return src_dim, tgt_dim, action


def delta_map(n: int, rank_p: int, r: int, s: int) -> FiberMap:
    """Matrix of delta: Lambda^s (x) S^r (x) P -> Lambda^{s+1} (x) S^{r-1} (x) P.

    Symmetric factors use the shift model (component at rho of the i-th
    contraction is the component at rho + i), under which the square of the
    map vanishes identically.
    """
    if r < 1:
        raise ValueError("delta needs symmetric degree r >= 1")
    if not 0 <= s < n:
        raise ValueError(f"exterior degree {s} out of range 0..{n - 1}")
    src_dim, tgt_dim, action = _delta_columns(n, rank_p, r, s)
    matrix = [[Fraction(0)] * src_dim for _ in range(tgt_dim)]
    for col, hits in enumerate(action):
        for row, sign in hits:
            matrix[row][col] += sign
    return FiberMap(matrix=matrix, domain_dim=src_dim, codomain_dim=tgt_dim,
                    source_rank=rank_p, source_order=r,
                    target_rank=rank_p, target_order=r - 1)


def _delta_of_subspace(n: int, rank_p: int, r: int, s: int,
                       basis: list) -> list:
    """Images under ambient delta of Lambda^s-shifted copies of ``basis``.

    ``basis`` spans a subspace of S^r (x) P; the subspace of
    Lambda^s (x) S^r (x) P it generates has one copy per increasing s-tuple.
    Returns the image vectors (as rows, ready for a rank computation).
    """
    if r == 0:
        return []
    src_forms = increasing_tuples(n, s)
    tgt_forms = increasing_tuples(n, s + 1)
    src_sym = multiindices(n, r)
    tgt_sym = multiindices(n, r - 1)
    tgt_form_pos = {f: i for i, f in enumerate(tgt_forms)}
    tgt_sym_pos = {m: i for i, m in enumerate(tgt_sym)}
    tgt_dim = len(tgt_forms) * rank_p * len(tgt_sym)
    images = []
    for form_i, form in enumerate(src_forms):
        for vec in basis:
            out = [Fraction(0)] * tgt_dim
            for pos, value in enumerate(vec):
                if not value:
                    continue
                comp, sym_i = divmod(pos, len(src_sym))
                mu = src_sym[sym_i]
                for i in set(mu):
                    if i in form:
                        continue
                    sign = -1 if sum(1 for a in form if a < i) % 2 else 1
                    newform = tuple(sorted(form + (i,)))
                    rho = _remove_one(mu, i)
                    idx = (tgt_form_pos[newform] * rank_p + comp) * len(tgt_sym) \
                        + tgt_sym_pos[rho]
                    out[idx] += sign * value
            images.append(out)
    return images


# ---------------------------------------------------------------------------
# Cohomology tables and involutivity
# ---------------------------------------------------------------------------


@dataclass
class SpencerReport:
    """Delta-cohomology dimensions of an operator, by level and slot."""

    order: int
    l_max: int
    n: int
    dims: list
    warnings: list = field(default_factory=list)

    @property
    def first_failure(self):
        for l, row in enumerate(self.dims):
            for i, value in enumerate(row):
                if value:
                    return (l, i)
        return None

    @property
    def involutive_up_to(self):
        return self.l_max if self.first_failure is None else None

    def machine_lines(self) -> list[str]:
        lines = [f"dims.{l}.{i}: {v}" for l, row in enumerate(self.dims)
                 for i, v in enumerate(row)]
        lines.append(f"involutive_up_to: {self.involutive_up_to}")
        return lines


@dataclass
class InvolutivityResult:
    involutive: bool
    l_max: int
    failure: tuple | None
    report: SpencerReport


def _resolve_points(ctx: JetContext, needed_order: int, pt, seed: int):
    if pt is not None:
        if pt.order_bound < needed_order:
            raise PointError(
                f"point order {pt.order_bound} insufficient; need {needed_order}")
        return [pt]
    return generic_points(ctx, needed_order, seed)


def _dims_table(sym: SymbolMatrix, rank_p: int, l_max: int, n: int):
    """One cohomology table plus the tuple of every rank used to build it.

    The rank tuple orders symbol-map ranks before the delta ranks they feed,
    so its lexicographic maximum over sample points is the generic profile.
    """
    k = sym.degree
    kernels: dict[int, list] = {}
    profile = []

    def g_basis(r: int) -> list:
        if r not in kernels:
            kernels[r] = symbol_kernel_basis(sym, r)
            profile.append(rank_p * sym_dim(n, r) - len(kernels[r]))
        return kernels[r]

    dims = []
    for l in range(l_max + 1):
        row = []
        delta_ranks: dict[int, int] = {}
        sub_dims: dict[int, int] = {}
        for i in range(min(l, n) + 1):
            r = k + l - i
            basis = g_basis(r)
            sub_dims[i] = len(basis) * comb(n, i)
            if r == 0:
                delta_ranks[i] = 0
            else:
                images = _delta_of_subspace(n, rank_p, r, i, basis)
                delta_ranks[i] = rank(images)
            profile.append(delta_ranks[i])
        for i in range(n + 1):
            if i > l:
                row.append(0)
                continue
            if k + l == 0 and i == 0:
                row.append(0)  # constants: resolved by the augmentation
                continue
            ker = sub_dims[i] - delta_ranks[i]
            image = delta_ranks.get(i - 1, 0)
            value = ker - image
            assert value >= 0, "image not contained in kernel (internal error)"
            row.append(value)
        assert row[0] == 0, "slot 0 must vanish (delta is injective)"
        if n >= 1:
            assert row[1] == 0, "slot 1 must vanish (prolongation property)"
        dims.append(row)
    return dims, tuple(profile)


def spencer_cohomology(op: CDiffOp, l_max: int, pt: JetPoint | None = None,
                       seed: int = 0) -> SpencerReport:
    """Delta-cohomology dimensions dims[l][i] for l <= l_max, i <= n.

    With no explicit point, coefficients are frozen at three seeded random
    points; ranks are taken at the sample maximizing them and a warning is
    recorded if the samples disagree (a non-generic draw or genuinely
    variable rank).
    """
    ctx = op.ctx
    points = _resolve_points(ctx, op.coefficient_jet_order(), pt, seed)
    tables = []
    for point in points:
        sym = symbol(op, point)
        tables.append(_dims_table(sym, op.cols, l_max, ctx.n))
    best = max(range(len(tables)), key=lambda idx: tables[idx][1])
    warnings = []
    if len({profile for _, profile in tables}) > 1:
        warnings.append(
            "rank profiles disagree between sample points; using the maximal "
            "profile (non-generic sample or variable rank)")
    dims = tables[best][0]
    return SpencerReport(order=op.order, l_max=l_max, n=ctx.n, dims=dims,
                         warnings=warnings)


def is_involutive(op: CDiffOp, l_max: int, pt: JetPoint | None = None,
                  seed: int = 0) -> InvolutivityResult:
    """Vanishing test of the cohomology table over the tested range only."""
    report = spencer_cohomology(op, l_max, pt, seed)
    failure = report.first_failure
    return InvolutivityResult(involutive=failure is None, l_max=l_max,
                              failure=failure, report=report)


# ---------------------------------------------------------------------------
# The evolution-equation vanishing certificate
# ---------------------------------------------------------------------------


@dataclass
class TwoLineResult:
    k: int
    p: int
    sign: int
    nonzero: bool
    poly: DiffPoly
    ctx: JetContext


def two_line_polynomial(k: int, p: int, sign) -> TwoLineResult:
    """Expand (t1^k + ... + tp^k) +- (t1 + ... + tp)^k over the rationals.

    A nonzero result certifies that multiplication by it is injective on
    polynomials, the vanishing hypothesis used for evolution equations of
    order >= 2.
    """
    if k < 1 or p < 1:
        raise ValueError("need k >= 1 and p >= 1")
    sgn = 1 if sign in (1, "+", "+1") else -1 if sign in (-1, "-", "-1") else None
    if sgn is None:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    names = tuple(f"th{i + 1}" for i in range(p))
    ctx = JetContext(("x",), ("u",), params=names)
    thetas = [DiffPoly.var(Coord(PARAM, i)) for i in range(p)]
    power_sum = DiffPoly.zero()
    linear = DiffPoly.zero()
    for th in thetas:
        power_sum = power_sum + th ** k
        linear = linear + th
    poly = power_sum + linear ** k if sgn > 0 else power_sum - linear ** k
    return TwoLineResult(k=k, p=p, sign=sgn, nonzero=not poly.is_zero(),
                         poly=poly, ctx=ctx)


# ---------------------------------------------------------------------------
# Symbol printing (for reports)
# ---------------------------------------------------------------------------


def format_symbol_entry(cell: dict, ctx: JetContext) -> str:
    if not cell:
        return "0"
    pieces = []
    for sigma in sorted(cell):
        value = cell[sigma]
        counts: dict[int, int] = {}
        for i in sigma:
            counts[i] = counts.get(i, 0) + 1
        body_parts = []
        if abs(value) != 1 or not sigma:
            body_parts.append(str(abs(value)))
        for i in sorted(counts):
            name = f"xi_{ctx.indep[i]}"
            body_parts.append(name if counts[i] == 1 else f"{name}^{counts[i]}")
        body = "*".join(body_parts)
        if not pieces:
            pieces.append(body if value > 0 else "-" + body)
        else:
            pieces.append((" + " if value > 0 else " - ") + body)
    return "".join(pieces)
