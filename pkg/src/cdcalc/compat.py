"""Formal-exactness checks of operator complexes at a point.

A complex is a chain of operators whose consecutive compositions vanish
symbolically.  Exactness is verified on prolonged jet fibers by exact rank
arithmetic; verdicts are always qualified by the tested prolongation range
and the sample point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .jet import JetContext, JetPoint
from .ops import CDiffOp, parse_scalar_op
from .spencer import fiber_map, jet_fiber_dim, _resolve_points


class OperatorComplex:
    """P0 -> P1 -> P2 -> ... with declared orders.

    Adjacent shapes must compose and every consecutive composition must be
    the zero operator (checked symbolically at construction).  Declared
    orders default to the actual operator orders and may exceed them.
    """

    def __init__(self, operators, orders=None):
        self.operators = list(operators)
        if not self.operators:
            raise ValueError("a complex needs at least one operator")
        ctx = self.operators[0].ctx
        for op in self.operators:
            if op.ctx != ctx:
                raise ValueError("complex operators live over different contexts")
        for a, b in zip(self.operators, self.operators[1:]):
            if b.cols != a.rows:
                raise ValueError(
                    f"adjacent shapes do not chain: {a.rows}x{a.cols} then "
                    f"{b.rows}x{b.cols}")
            if not (b @ a).is_zero():
                raise ValueError("not a complex: consecutive composition is nonzero")
        if orders is None:
            self.orders = [op.order for op in self.operators]
        else:
            self.orders = [int(k) for k in orders]
            if len(self.orders) != len(self.operators):
                raise ValueError("one declared order per operator")
            for op, k in zip(self.operators, self.orders):
                if k < op.order:
                    raise ValueError(
                        f"declared order {k} below actual order {op.order}")
        self.ctx = ctx

    @property
    def module_ranks(self) -> list[int]:
        return [self.operators[0].cols] + [op.rows for op in self.operators]

    def __len__(self):
        return len(self.operators)


@dataclass
class PositionCheck:
    """Exactness data at one interior position and prolongation level."""

    position: int
    l: int
    dims: tuple          # (domain, middle, codomain) fiber dimensions
    ranks: tuple         # (incoming rank, outgoing rank)
    defect: int

    @property
    def exact(self) -> bool:
        return self.defect == 0


@dataclass
class ExactnessReport:
    l_max: int
    checks: list
    warnings: list = field(default_factory=list)

    @property
    def all_exact(self) -> bool:
        return all(c.exact for c in self.checks)

    @property
    def first_defect(self):
        for c in self.checks:
            if not c.exact:
                return (c.position, c.l)
        return None


def check_formal_exactness(cplx: OperatorComplex, l_max: int,
                           pt: JetPoint | None = None,
                           seed: int = 0) -> ExactnessReport:
    """Rank-verify exactness at every interior position for l <= l_max.

    At position i the prolonged fibers are chained as
    order (k_i + k_{i+1} + l) -> order (k_{i+1} + l) -> order l,
    and the defect is dim ker(outgoing) - rank(incoming), which is
    nonnegative by the complex property.
    """
    ops = cplx.operators
    if len(ops) < 2:
        raise ValueError("exactness needs at least two operators")
    needed = 0
    for idx in range(len(ops) - 1):
        needed = max(needed,
                     ops[idx].coefficient_jet_order() + cplx.orders[idx + 1] + l_max,
                     ops[idx + 1].coefficient_jet_order() + l_max)
    points = _resolve_points(cplx.ctx, needed, pt, seed)

    runs = []
    for point in points:
        checks = []
        profile = []
        for idx in range(len(ops) - 1):
            for l in range(l_max + 1):
                incoming = fiber_map(ops[idx], cplx.orders[idx + 1] + l, point,
                                     declared_order=cplx.orders[idx])
                outgoing = fiber_map(ops[idx + 1], l, point,
                                     declared_order=cplx.orders[idx + 1])
                if incoming.codomain_dim != outgoing.domain_dim:
                    raise AssertionError("fiber dimensions out of step")
                rank_in = incoming.rank()
                rank_out = outgoing.rank()
                defect = (outgoing.domain_dim - rank_out) - rank_in
                assert defect >= 0, "image not contained in kernel"
                checks.append(PositionCheck(
                    position=idx + 1, l=l,
                    dims=(incoming.domain_dim, outgoing.domain_dim,
                          outgoing.codomain_dim),
                    ranks=(rank_in, rank_out), defect=defect))
                profile.extend((rank_in, rank_out))
        runs.append((checks, tuple(profile)))
    best = max(range(len(runs)), key=lambda i: runs[i][1])
    warnings = []
    if len({profile for _, profile in runs}) > 1:
        warnings.append(
            "rank profiles disagree between sample points; using the maximal "
            "profile (non-generic sample or variable rank)")
    return ExactnessReport(l_max=l_max, checks=runs[best][0], warnings=warnings)


def cokernel_rank(op: CDiffOp, k1: int, pt: JetPoint | None = None,
                  seed: int = 0) -> int:
    """Fiber rank of the cokernel of the k1-fold prolongation at a point.

    This is the rank of the next module in the compatibility construction;
    zero means the complex terminates here.  The order-0 fiber map must be
    surjective (checked, not normalized away).
    """
    if k1 < 1:
        raise ValueError("prolongation depth k1 must be a positive integer")
    ctx = op.ctx
    needed = op.coefficient_jet_order() + k1
    points = _resolve_points(ctx, needed, pt, seed)
    best = None
    for point in points:
        base = fiber_map(op, 0, point)
        if base.rank() != base.codomain_dim:
            raise ValueError(
                "order-0 fiber map is not surjective; renormalize the target "
                "module before the cokernel construction")
        fm = fiber_map(op, k1, point)
        r = fm.rank()
        best = r if best is None else max(best, r)
    codim = op.rows * jet_fiber_dim(ctx.n, k1)
    return codim - best


@dataclass
class KlineReport:
    """Predicted vanishing ranges for a length-k compatibility complex."""

    k: int
    n: int

    @property
    def e1_bound(self) -> int:
        return self.n - self.k

    def lines(self) -> list[str]:
        return [
            f"k: {self.k}",
            f"n: {self.n}",
            f"E1 vanishing: E1^{{p,q}} = 0 for p > 0 and q <= {self.e1_bound}",
            f"C-cohomology vanishing: H^i = 0 for i >= {self.k}",
        ]

    def as_dict(self) -> dict:
        return {"k": self.k, "n": self.n, "e1_zero_for_q_le": self.e1_bound,
                "c_cohomology_zero_for_i_ge": self.k}


def kline_report(k: int, n: int) -> KlineReport:
    """Pure formula evaluation of the vanishing ranges for complex length k."""
    if k < 2:
        raise ValueError("complex length k must be at least 2")
    return KlineReport(k=k, n=n)


# ---------------------------------------------------------------------------
# Complex description files
# ---------------------------------------------------------------------------

def parse_complex(text: str) -> OperatorComplex:
    """File format: declaration lines, then blocks

        operator <cols> -> <rows> [order <k>]
        <rows lines of cols entries separated by ';'>

    Entries use the operator-literal grammar; '#' starts a comment.
    """
    indep: list[str] = []
    dep: list[str] = []
    params: list[str] = []
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            lines.append(line.strip())

    pos = 0
    while pos < len(lines) and not lines[pos].startswith("operator"):
        head, _, rest = lines[pos].partition(" ")
        if head == "independent":
            indep.extend(rest.split())
        elif head == "dependent":
            dep.extend(rest.split())
        elif head == "parameter":
            params.extend(rest.split())
        else:
            raise ValueError(f"unexpected statement before operators: {head!r}")
        pos += 1
    ctx = JetContext(indep, dep or ("u",), params)

    operators = []
    orders = []
    while pos < len(lines):
        header = lines[pos].split()
        if header[0] != "operator" or len(header) < 4 or header[2] != "->":
            raise ValueError(f"bad operator header: {lines[pos]!r}")
        cols, rows = int(header[1]), int(header[3])
        declared = None
        if len(header) > 4:
            if len(header) != 6 or header[4] != "order":
                raise ValueError(f"bad operator header: {lines[pos]!r}")
            declared = int(header[5])
        pos += 1
        if pos + rows > len(lines):
            raise ValueError("operator block is missing matrix rows")
        matrix = []
        for r in range(rows):
            cells = [cell.strip() for cell in lines[pos + r].split(";")]
            if len(cells) != cols:
                raise ValueError(
                    f"operator row has {len(cells)} entries, expected {cols}")
            matrix.append([parse_scalar_op(cell, ctx) for cell in cells])
        pos += rows
        op = CDiffOp(ctx, matrix)
        operators.append(op)
        orders.append(declared if declared is not None else op.order)
    return OperatorComplex(operators, orders)
