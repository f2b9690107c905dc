"""Matrices of total-derivative operators.

A scalar operator is a finite sum  sum_sigma a^sigma D_sigma  with DiffPoly
coefficients; a ``CDiffOp`` is a rectangular matrix of these over a fixed
context.  Composition and adjoints are normalized back to that form by
Leibniz rewriting (D_i after a coefficient f becomes f D_i + D_i(f)), so
operator equality is literal normal-form equality.
"""

from __future__ import annotations

from .expr import JET, DiffPoly, ExprParser, ParseError, format_poly
from .jet import JetContext, total_derivative, total_derivative_sigma

MultiIndex = tuple  # non-decreasing tuple of independent-variable indices


class ScalarCDiffOp:
    """One matrix entry: finite map multi-index -> coefficient polynomial."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {}
        if terms:
            for sigma, poly in terms.items():
                if poly:
                    self.terms[tuple(sigma)] = poly

    @property
    def order(self) -> int:
        # order of the zero operator is 0 by convention
        return max((len(s) for s in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, ScalarCDiffOp):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __add__(self, other: "ScalarCDiffOp") -> "ScalarCDiffOp":
        out = dict(self.terms)
        for sigma, poly in other.terms.items():
            s = out.get(sigma, DiffPoly.zero()) + poly
            if s:
                out[sigma] = s
            else:
                out.pop(sigma, None)
        return ScalarCDiffOp(out)

    def __neg__(self) -> "ScalarCDiffOp":
        return ScalarCDiffOp({s: -p for s, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, poly: DiffPoly) -> "ScalarCDiffOp":
        """Left multiplication by a function (coefficient-wise)."""
        return ScalarCDiffOp({s: poly * p for s, p in self.terms.items()})

    def coefficient_jet_order(self) -> int:
        return max((p.jet_order() for p in self.terms.values()), default=0)

    def __repr__(self):
        return f"ScalarCDiffOp({len(self.terms)} terms, order {self.order})"


def _left_Di(ctx: JetContext, i: int, op: ScalarCDiffOp) -> ScalarCDiffOp:
    """Normalize D_i composed with ``op``: D_i (f D_sigma) = f D_{sigma i} + D_i(f) D_sigma."""
    out: dict = {}
    for sigma, poly in op.terms.items():
        lifted = tuple(sorted(sigma + (i,)))
        s = out.get(lifted, DiffPoly.zero()) + poly
        if s:
            out[lifted] = s
        else:
            out.pop(lifted, None)
        d = total_derivative(ctx, i, poly)
        if d:
            s = out.get(sigma, DiffPoly.zero()) + d
            if s:
                out[sigma] = s
            else:
                out.pop(sigma, None)
    return ScalarCDiffOp(out)


def _scalar_compose(ctx: JetContext, outer: ScalarCDiffOp,
                    inner: ScalarCDiffOp) -> ScalarCDiffOp:
    total = ScalarCDiffOp()
    for sigma, coeff in outer.terms.items():
        pushed = inner
        for i in sigma:
            pushed = _left_Di(ctx, i, pushed)
        total = total + pushed.scale(coeff)
    return total


def _scalar_apply(ctx: JetContext, op: ScalarCDiffOp, f: DiffPoly,
                  cache: dict) -> DiffPoly:
    cache.setdefault((), f)
    out = DiffPoly.zero()
    for sigma, coeff in op.terms.items():
        if sigma not in cache:
            # build from the longest cached prefix
            k = len(sigma)
            while sigma[:k] not in cache:
                k -= 1
            g = cache[sigma[:k]]
            for i in sigma[k:]:
                g = total_derivative(ctx, i, g)
                cache.setdefault(sigma[:k + 1], g)
                k += 1
        out = out + coeff * cache[sigma]
    return out


def _scalar_adjoint(ctx: JetContext, op: ScalarCDiffOp) -> ScalarCDiffOp:
    """(sum f_sigma D_sigma)* = sum (-1)^{|sigma|} D_sigma (f_sigma . )"""
    total = ScalarCDiffOp()
    for sigma, coeff in op.terms.items():
        pushed = ScalarCDiffOp({(): coeff})
        for i in sigma:
            pushed = _left_Di(ctx, i, pushed)
        if len(sigma) % 2:
            pushed = -pushed
        total = total + pushed
    return total


class CDiffOp:
    """Rectangular matrix of scalar total-derivative operators.

    Apply with ``op(vector)``, compose with ``op2 @ op1`` (so that
    ``(op2 @ op1)(v) == op2(op1(v))``), and combine with ``+``/``-``.
    """

    __slots__ = ("ctx", "entries")

    def __init__(self, ctx: JetContext, entries):
        self.ctx = ctx
        self.entries = tuple(tuple(row) for row in entries)
        if not self.entries or not self.entries[0]:
            raise ValueError("operator matrix must be at least 1x1")
        width = len(self.entries[0])
        if any(len(row) != width for row in self.entries):
            raise ValueError("operator matrix must be rectangular")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(ctx: JetContext, rows: int, cols: int) -> "CDiffOp":
        return CDiffOp(ctx, [[ScalarCDiffOp() for _ in range(cols)]
                             for _ in range(rows)])

    @staticmethod
    def identity(ctx: JetContext, size: int) -> "CDiffOp":
        one = DiffPoly.const(1)
        return CDiffOp(ctx, [[ScalarCDiffOp({(): one}) if i == j else ScalarCDiffOp()
                              for j in range(size)] for i in range(size)])

    @staticmethod
    def total(ctx: JetContext, *indices) -> "CDiffOp":
        """The 1x1 operator D_sigma for the given independent indices/names."""
        sigma = tuple(sorted(ctx._indep_idx(i) for i in indices))
        return CDiffOp(ctx, [[ScalarCDiffOp({sigma: DiffPoly.const(1)})]])

    @staticmethod
    def multiplication(ctx: JetContext, poly: DiffPoly) -> "CDiffOp":
        return CDiffOp(ctx, [[ScalarCDiffOp({(): poly})]])

    # -- shape -------------------------------------------------------------

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def order(self) -> int:
        return max(e.order for row in self.entries for e in row)

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def coefficient_jet_order(self) -> int:
        return max(e.coefficient_jet_order() for row in self.entries for e in row)

    def __eq__(self, other):
        if not isinstance(other, CDiffOp):
            return NotImplemented
        return self.ctx == other.ctx and self.entries == other.entries

    __hash__ = None

    # -- algebra -------------------------------------------------------------

    def __call__(self, vector) -> list[DiffPoly]:
        vec = [v if isinstance(v, DiffPoly) else DiffPoly.const(v) for v in vector]
        if len(vec) != self.cols:
            raise ValueError(f"operator expects {self.cols} components, got {len(vec)}")
        caches = [{} for _ in vec]
        out = []
        for row in self.entries:
            acc = DiffPoly.zero()
            for j, entry in enumerate(row):
                if not entry.is_zero():
                    acc = acc + _scalar_apply(self.ctx, entry, vec[j], caches[j])
            out.append(acc)
        return out

    def __matmul__(self, inner: "CDiffOp") -> "CDiffOp":
        if not isinstance(inner, CDiffOp):
            return NotImplemented
        if self.cols != inner.rows:
            raise ValueError(
                f"compose shape mismatch: {self.rows}x{self.cols} after "
                f"{inner.rows}x{inner.cols}")
        if self.ctx != inner.ctx:
            raise ValueError("operators live over different contexts")
        out = []
        for s in range(self.rows):
            row = []
            for j in range(inner.cols):
                acc = ScalarCDiffOp()
                for k in range(self.cols):
                    a = self.entries[s][k]
                    b = inner.entries[k][j]
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + _scalar_compose(self.ctx, a, b)
                row.append(acc)
            out.append(row)
        return CDiffOp(self.ctx, out)

    def __add__(self, other: "CDiffOp") -> "CDiffOp":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("operator shapes differ")
        return CDiffOp(self.ctx,
                       [[a + b for a, b in zip(r1, r2)]
                        for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self) -> "CDiffOp":
        return CDiffOp(self.ctx, [[-e for e in row] for row in self.entries])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, poly) -> "CDiffOp":
        poly = poly if isinstance(poly, DiffPoly) else DiffPoly.const(poly)
        return CDiffOp(self.ctx, [[e.scale(poly) for e in row] for row in self.entries])

    def __repr__(self):
        return f"CDiffOp({self.rows}x{self.cols}, order {self.order})"


def compose(outer: CDiffOp, inner: CDiffOp) -> CDiffOp:
    """Normalized composition; apply-compatible with nesting."""
    return outer @ inner


def apply_op(op: CDiffOp, vector) -> list[DiffPoly]:
    return op(vector)


def adjoint(op: CDiffOp) -> CDiffOp:
    """Formal adjoint: transpose with entrywise (sum f D_sigma)* =
    sum (-1)^{|sigma|} D_sigma (f .), renormalized.

    With this convention (D_t - L)* = -D_t - L* for any x-only operator L;
    the pairing uses the coordinate volume element, so no extra weights
    appear.
    """
    ctx = op.ctx
    out = [[_scalar_adjoint(ctx, op.entries[s][j]) for s in range(op.rows)]
           for j in range(op.cols)]
    return CDiffOp(ctx, out)


def linearize(ctx: JetContext, components) -> CDiffOp:
    """Universal linearization: entry (s, j) is sum_sigma dF_s/du^j_sigma D_sigma."""
    if ctx.is_evolution:
        raise ValueError("linearization is computed on the free jet space")
    comps = list(components)
    if not comps:
        raise ValueError("need at least one component")
    rows = []
    for f in comps:
        row = [dict() for _ in range(ctx.m)]
        for c in f.coords():
            if c.kind != JET:
                continue
            d = f.partial(c)
            if d:
                row[c.index][c.sigma] = d
        rows.append([ScalarCDiffOp(cell) for cell in row])
    return CDiffOp(ctx, rows)


def green_remainder(op: CDiffOp, p, q) -> list[DiffPoly]:
    """Integration-by-parts witness.

    Returns R_1..R_n with  <q, op p> - <op* q, p> = sum_i D_i(R_i)  exactly,
    built term by term: w D_i(g) = D_i(w g) - D_i(w) g, peeled along each
    multi-index.
    """
    ctx = op.ctx
    pvec = [v if isinstance(v, DiffPoly) else DiffPoly.const(v) for v in p]
    qvec = [v if isinstance(v, DiffPoly) else DiffPoly.const(v) for v in q]
    if len(pvec) != op.cols or len(qvec) != op.rows:
        raise ValueError("green_remainder: vector lengths must match the operator")
    remainders = [DiffPoly.zero() for _ in range(ctx.n)]
    for s in range(op.rows):
        for j in range(op.cols):
            for sigma, coeff in op.entries[s][j].terms.items():
                w = qvec[s] * coeff
                for pos, i in enumerate(sigma):
                    rest = sigma[pos + 1:]
                    remainders[i] = remainders[i] + \
                        w * total_derivative_sigma(ctx, rest, pvec[j])
                    w = -total_derivative(ctx, i, w)
    return remainders


def pairing(a, b) -> DiffPoly:
    """Componentwise product, summed."""
    acc = DiffPoly.zero()
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


# ---------------------------------------------------------------------------
# The horizontal differential as an operator matrix
# ---------------------------------------------------------------------------

def dbar_operator(ctx: JetContext, q: int) -> CDiffOp:
    """d-bar on degree-q form components, as a C(n,q+1) x C(n,q) operator.

    Components are indexed by strictly increasing tuples in lexicographic
    order; the entry for (J, I) with J = I + {i} is +-D_i with the sign of
    wedging dx_i in front of dx_I.
    """
    from .jet import increasing_tuples, _merge_sign
    n = ctx.n
    if not 0 <= q < n:
        raise ValueError(f"dbar degree {q} out of range 0..{n - 1}")
    sources = increasing_tuples(n, q)
    targets = increasing_tuples(n, q + 1)
    tindex = {key: r for r, key in enumerate(targets)}
    rows = [[ScalarCDiffOp() for _ in sources] for _ in targets]
    for c, key in enumerate(sources):
        for i in range(n):
            if i in key:
                continue
            newkey, sign = _merge_sign((i,), key)
            rows[tindex[newkey]][c] = ScalarCDiffOp(
                {(i,): DiffPoly.const(sign)})
    return CDiffOp(ctx, rows)


# ---------------------------------------------------------------------------
# Operator literals
# ---------------------------------------------------------------------------

class _OpParser(ExprParser):
    """opexpr := opterm (("+"|"-") opterm)*
    opterm  := sign? factor ("*" factor)*   with at most one trailing D-literal
    D-literal := "D_{" ident ("," ident)* "}"
    """

    def parse_scalar_op(self) -> ScalarCDiffOp:
        total = self.op_term()
        while self.at_sym("+") or self.at_sym("-"):
            _, sym, _ = self.advance()
            term = self.op_term()
            total = total + (term if sym == "+" else -term)
        kind, lex, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {lex!r}", off)
        return total

    def op_term(self) -> ScalarCDiffOp:
        negate = False
        while self.at_sym("-") or self.at_sym("+"):
            _, sym, _ = self.advance()
            if sym == "-":
                negate = not negate
        coeff = DiffPoly.const(1)
        sigma = None
        while True:
            if self._at_d_literal():
                sigma = self._d_literal()
            else:
                coeff = coeff * self.factor()
            if self.at_sym("*"):
                if sigma is not None:
                    _, _, off = self.peek()
                    raise ParseError("D_{...} must end its term", off)
                self.advance()
                continue
            break
        if negate:
            coeff = -coeff
        return ScalarCDiffOp({(sigma if sigma is not None else ()): coeff})

    def _at_d_literal(self) -> bool:
        kind, lex, _ = self.peek()
        if kind != "ident" or lex != "D":
            return False
        nkind, nlex, _ = self.tokens[self.pos + 1]
        return nkind == "sym" and nlex == "_"

    def _d_literal(self) -> MultiIndex:
        self.advance()  # D
        self.advance()  # _
        self.expect_sym("{")
        indices = []
        while True:
            kind, lex, off = self.peek()
            if kind != "ident" or lex not in self.ctx.indep_index:
                raise ParseError("expected independent variable in D_{...}", off)
            self.advance()
            indices.append(self.ctx.indep_index[lex])
            if self.at_sym(","):
                self.advance()
                continue
            break
        self.expect_sym("}")
        return tuple(sorted(indices))


def parse_scalar_op(text: str, ctx: JetContext) -> ScalarCDiffOp:
    return _OpParser(text, ctx).parse_scalar_op()


def parse_operator_matrix(text: str, ctx: JetContext) -> CDiffOp:
    """One matrix row per line, entries separated by ';'."""
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        rows.append([parse_scalar_op(cell, ctx) for cell in line.split(";")])
    if not rows:
        raise ValueError("empty operator matrix")
    return CDiffOp(ctx, rows)


def format_scalar_op(op: ScalarCDiffOp, ctx: JetContext) -> str:
    if op.is_zero():
        return "0"
    pieces = []
    for sigma in sorted(op.terms, key=lambda s: (len(s), s)):
        poly = op.terms[sigma]
        if sigma:
            dname = "D_{" + ",".join(ctx.indep[i] for i in sigma) + "}"
            if poly == DiffPoly.const(1):
                sign, body = 1, dname
            elif poly == DiffPoly.const(-1):
                sign, body = -1, dname
            elif len(poly.terms) == 1:
                from .expr import _format_monomial
                ((mono, coeff),) = poly.terms.items()
                sign, mstr = _format_monomial(mono, coeff, ctx)
                body = f"{mstr}*{dname}"
            else:
                sign, body = 1, f"({format_poly(poly, ctx)})*{dname}"
        else:
            if len(poly.terms) == 1:
                from .expr import _format_monomial
                ((mono, coeff),) = poly.terms.items()
                sign, body = _format_monomial(mono, coeff, ctx)
            else:
                sign, body = 1, f"({format_poly(poly, ctx)})"
        if not pieces:
            pieces.append(body if sign > 0 else "-" + body)
        else:
            pieces.append((" + " if sign > 0 else " - ") + body)
    return "".join(pieces)


def format_operator(op: CDiffOp) -> str:
    """Row per line, entries separated by ' ; '; re-parses to an equal operator."""
    return "\n".join(" ; ".join(format_scalar_op(e, op.ctx) for e in row)
                     for row in op.entries)
