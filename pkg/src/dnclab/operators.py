"""Structured operators on one-sided sequence space.

The model class is "scaled coordinate shift outside a finite window, plus
an explicit matrix on the window": T e_i = c * e_(i+s) for i >= window,
and T e_i = block[:, i] for i < window.  Compact perturbations are modeled
exactly as finite-rank, which makes structure-group membership a decidable
predicate and keeps index computations honest (kernel/cokernel counts are
required to stabilize across two truncation levels before being believed).

Coordinates are 0-based internally; e_i is the i-th standard basis vector.
"""

from __future__ import annotations

import json

import numpy as np

from . import linalg
from .errors import (
    DomainError,
    NotGLK,
    NotRepresentable,
    NotTransversal,
    StabilizationFailure,
)
from .subspaces import ComplementedSubspace, SubspaceBasis, _interleave_basis

__all__ = [
    "SequenceOperator",
    "BlockOperator",
    "identity",
    "shift_op",
    "rank_one",
    "finite_rank",
    "block_lower_triangular",
    "fredholm_index",
    "is_glk",
    "is_glk_tilde",
    "glk_inverse",
    "retraction_path",
    "is_transversal",
    "block_is_transversal",
    "transversality_witness",
    "block_transversality_witness",
    "preimage_with_complement",
    "block_preimage_with_complement",
]


class SequenceOperator:
    """Shift-plus-finite-window operator on one-sided sequence space.

    Parameters
    ----------
    shift:
        Tail shift s; for i >= window, T e_i = tail_scale * e_(i+s).
    window:
        Number of leading coordinates whose action is given by ``block``.
    block:
        Matrix of shape (rows, window); column i is T e_i.
    tail_scale:
        Scalar applied to the tail action.  0 means the tail annihilates
        (a finite-rank operator; such operators are not Fredholm and index
        computations on them fail stabilization by construction).
    """

    __slots__ = ("shift", "window", "block", "tail_scale")

    def __init__(self, shift: int, window: int, block, tail_scale: float = 1.0):
        block = np.atleast_2d(np.asarray(block, dtype=float))
        if block.size == 0:
            block = block.reshape(0, window)
        if block.shape[1] != window:
            raise ValueError(f"block has {block.shape[1]} columns, window is {window}")
        if tail_scale == 0.0:
            shift = 0
        elif window < max(0, -shift):
            raise ValueError("window must cover negative shifts (window >= -shift)")
        self.shift = int(shift)
        self.window = int(window)
        self.block = block
        self.tail_scale = float(tail_scale)
        self._canonicalize()

    # -- construction and canonical form ---------------------------------

    def _column(self, i: int) -> np.ndarray:
        """Full action on e_i as a finite vector."""
        if i < self.window:
            return self.block[:, i].copy()
        out = np.zeros(i + max(self.shift, 0) + 1)
        if self.tail_scale != 0.0:
            out[i + self.shift] = self.tail_scale
        return out

    def _tail_column(self, i: int, length: int) -> np.ndarray:
        out = np.zeros(length)
        if self.tail_scale != 0.0 and 0 <= i + self.shift < length:
            out[i + self.shift] = self.tail_scale
        return out

    def _canonicalize(self) -> None:
        """Shrink the window to the minimal one: every column at or beyond it
        is the pure (scaled) tail action, and the block's row support stays
        within window + |shift|."""
        w = self.window
        rows = self.block.shape[0]
        cols = [self.block[:, i] for i in range(w)]
        # minimal window from tail agreement; compare at a length that can
        # hold the genuine tail entry, not just the stored block rows
        w_tail = max(0, -self.shift) if self.tail_scale != 0.0 else 0
        n = w
        while n > w_tail:
            i = n - 1
            length = rows
            if self.tail_scale != 0.0 and i + self.shift >= 0:
                length = max(length, i + self.shift + 1)
            col = linalg.pad_to(cols[i], length)
            tail = self._tail_column(i, length)
            if np.array_equal(col, tail):
                n -= 1
            else:
                break
        # row support of the surviving block
        support = 0
        for i in range(n):
            nz = np.nonzero(cols[i])[0]
            if nz.size:
                support = max(support, nz[-1] + 1)
        if self.tail_scale != 0.0:
            n = max(n, support - abs(self.shift), 0)
        new_rows = max(support, n + abs(self.shift) if self.tail_scale != 0.0 else support)
        new_block = np.zeros((new_rows, n))
        for i in range(n):
            if i < w:
                c = cols[i]
                new_block[: min(len(c), new_rows), i] = c[:new_rows]
            else:
                new_block[:, i] = self._tail_column(i, new_rows)
        self.window = n
        self.block = new_block

    @staticmethod
    def from_columns(shift: int, columns: list[np.ndarray], tail_scale: float = 1.0) -> "SequenceOperator":
        """Operator whose first len(columns) columns are given explicitly and
        whose remaining columns are the (scaled) tail shift."""
        w = len(columns)
        if tail_scale != 0.0:
            w = max(w, -shift, 0)
        rows = max([c.size for c in columns] + [w + abs(shift), 1])
        block = np.zeros((rows, w))
        for i in range(w):
            if i < len(columns):
                c = np.asarray(columns[i], dtype=float).ravel()
                block[: c.size, i] = c
            elif tail_scale != 0.0 and 0 <= i + shift:
                block[i + shift, i] = tail_scale
        return SequenceOperator(shift, w, block, tail_scale)

    # -- actions ----------------------------------------------------------

    def apply(self, x) -> np.ndarray:
        """Exact action on a finite-support vector."""
        x = np.asarray(x, dtype=float).ravel()
        w, s, c = self.window, self.shift, self.tail_scale
        out_len = max(self.block.shape[0], (x.size + max(s, 0)) if c != 0.0 else 0, 1)
        y = np.zeros(out_len)
        if w and x.size:
            head = np.zeros(w)
            head[: min(w, x.size)] = x[: min(w, x.size)]
            y[: self.block.shape[0]] += self.block @ head
        if c != 0.0 and x.size > w:
            tail = x[w:]
            y[w + s : w + s + tail.size] += c * tail
        return linalg.trim(y)

    def compose(self, other: "SequenceOperator") -> "SequenceOperator":
        """self after other (matrix product self @ other)."""
        scale = self.tail_scale * other.tail_scale
        shift = self.shift + other.shift if scale != 0.0 else 0
        if other.tail_scale == 0.0:
            w = other.window
        elif self.tail_scale == 0.0:
            w = max(other.window, self.window - other.shift, 0)
        else:
            w = max(other.window, self.window - other.shift, 0, -shift)
        cols = [self.apply(other._column(i)) for i in range(w)]
        return SequenceOperator.from_columns(shift, cols, scale)

    def __matmul__(self, other):
        if isinstance(other, SequenceOperator):
            return self.compose(other)
        return self.apply(other)

    def __add__(self, other: "SequenceOperator") -> "SequenceOperator":
        if self.tail_scale != 0.0 and other.tail_scale != 0.0 and self.shift != other.shift:
            raise NotRepresentable("sum of two different tail shifts leaves the model class")
        if self.tail_scale != 0.0 and other.tail_scale != 0.0:
            shift, scale = self.shift, self.tail_scale + other.tail_scale
        elif self.tail_scale != 0.0:
            shift, scale = self.shift, self.tail_scale
        else:
            shift, scale = other.shift, other.tail_scale
        w = max(self.window, other.window, -shift if scale != 0.0 else 0, 0)
        cols = []
        for i in range(w):
            a, b = self._column(i), other._column(i)
            n = max(a.size, b.size)
            cols.append(linalg.pad_to(a, n) + linalg.pad_to(b, n))
        return SequenceOperator.from_columns(shift, cols, scale)

    def scale(self, c: float) -> "SequenceOperator":
        return SequenceOperator(self.shift, self.window, c * self.block, c * self.tail_scale)

    def __mul__(self, c: float) -> "SequenceOperator":
        return self.scale(float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def to_dense(self, rows: int, cols: int) -> np.ndarray:
        """Truncation oracle: the rows x cols matrix of T between coordinate
        truncations (output coordinates beyond ``rows`` are projected away)."""
        a = np.zeros((rows, cols))
        r = min(rows, self.block.shape[0])
        c = min(cols, self.window)
        a[:r, :c] = self.block[:r, :c]
        if self.tail_scale != 0.0:
            for i in range(self.window, cols):
                j = i + self.shift
                if 0 <= j < rows:
                    a[j, i] = self.tail_scale
        return a

    def output_rows(self, cols: int) -> int:
        """Smallest codomain truncation capturing the full image of the
        domain truncated at ``cols`` coordinates."""
        r = self.block.shape[0]
        if self.tail_scale != 0.0 and cols > self.window:
            r = max(r, cols + self.shift)
        return max(r, 0)

    # -- comparisons and serialization ------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, SequenceOperator):
            return NotImplemented
        return (
            self.shift == other.shift
            and self.window == other.window
            and self.tail_scale == other.tail_scale
            and self.block.shape == other.block.shape
            and np.array_equal(self.block, other.block)
        )

    def approx_equal(self, other: "SequenceOperator", tol: float = 1e-10) -> bool:
        if self.tail_scale != other.tail_scale or (
            self.tail_scale != 0.0 and self.shift != other.shift
        ):
            return False
        w = max(self.window, other.window)
        for i in range(w):
            a, b = self._column(i), other._column(i)
            n = max(a.size, b.size)
            if np.max(np.abs(linalg.pad_to(a, n) - linalg.pad_to(b, n)), initial=0.0) > tol:
                return False
        return True

    def __repr__(self) -> str:
        return (
            f"SequenceOperator(shift={self.shift}, window={self.window}, "
            f"tail_scale={self.tail_scale})"
        )

    def to_json(self) -> dict:
        return {
            "tail_shift": self.shift,
            "window": self.window,
            "tail_scale": self.tail_scale,
            "block": [list(row) for row in self.block],
        }

    @staticmethod
    def from_json(obj: dict) -> "SequenceOperator":
        block = np.asarray(obj["block"], dtype=float)
        if block.size == 0:
            block = np.zeros((0, obj["window"]))
        return SequenceOperator(
            obj["tail_shift"], obj["window"], block, obj.get("tail_scale", 1.0)
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# -- statutory constructors ------------------------------------------------


def identity() -> SequenceOperator:
    return SequenceOperator(0, 0, np.zeros((0, 0)))


def shift_op(s: int) -> SequenceOperator:
    """Pure coordinate shift e_i -> e_(i+s) (coordinates below 0 are killed)."""
    w = max(0, -s)
    return SequenceOperator(s, w, np.zeros((max(w + abs(s), 1), w)) if w else np.zeros((0, 0)))


def rank_one(i: int, j: int, c: float = 1.0) -> SequenceOperator:
    """The finite-rank operator c * e_i <x, e_j> (output index i, input j)."""
    block = np.zeros((i + 1, j + 1))
    block[i, j] = c
    return SequenceOperator(0, j + 1, block, tail_scale=0.0)


def finite_rank(matrix) -> SequenceOperator:
    """Finite-rank operator given by a dense matrix on leading coordinates."""
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    return SequenceOperator(0, m.shape[1], m, tail_scale=0.0)


# -- Fredholm index ----------------------------------------------------------


def _kernel_cokernel(op: SequenceOperator, level: int, rtol: float | None):
    rows = op.output_rows(level)
    a = op.to_dense(rows, level)
    r = linalg.rank(a, rtol)
    return level - r, rows - r


def fredholm_index(op: SequenceOperator, level: int | None = None, rtol: float | None = None) -> int:
    """dim ker - dim coker, by finite linear algebra at two truncation levels.

    Counts must agree across the levels and, for a genuine shift tail, match
    the structural value -shift; any disagreement raises StabilizationFailure
    rather than being silently resolved.
    """
    base = max(level or 0, op.window + 2 * abs(op.shift) + 8)
    counts = [_kernel_cokernel(op, L, rtol) for L in (base, base + 5)]
    if counts[0] != counts[1]:
        raise StabilizationFailure(
            f"kernel/cokernel counts {counts[0]} at L={base} vs {counts[1]} at L={base + 5}"
        )
    k, c = counts[0]
    idx = k - c
    if op.tail_scale != 0.0 and idx != -op.shift:
        raise StabilizationFailure(
            f"linear-algebra index {idx} contradicts structural index {-op.shift}"
        )
    return idx


# -- structure group --------------------------------------------------------


def is_glk(op: SequenceOperator, rtol: float | None = None) -> bool:
    """Invertible identity-plus-finite-rank test: unit tail with zero shift,
    and an invertible window block."""
    if op.tail_scale != 1.0 or op.shift != 0:
        return False
    w = op.window
    if w == 0:
        return True
    b = np.zeros((w, w))
    b[: op.block.shape[0], :] = op.block[:w, :]
    return linalg.rank(b, rtol) == w


def glk_inverse(op: SequenceOperator) -> SequenceOperator:
    """Inverse of a structure-group element (exact finite solve)."""
    if not is_glk(op):
        raise NotGLK("operator is not an invertible identity-plus-finite-rank")
    w = op.window
    if w == 0:
        return identity()
    b = np.zeros((w, w))
    b[: op.block.shape[0], :] = op.block[:w, :]
    return SequenceOperator(0, w, np.linalg.inv(b))


class BlockOperator:
    """Lower block triangular operator on the external direct sum of two
    sequence spaces: (x1, x2) -> (F x1, P x1 + F2 x2)."""

    __slots__ = ("F", "P", "F2")

    def __init__(self, F: SequenceOperator, P: SequenceOperator, F2: SequenceOperator):
        self.F = F
        self.P = P
        self.F2 = F2

    def apply(self, x1, x2) -> tuple[np.ndarray, np.ndarray]:
        y1 = self.F.apply(x1)
        a, b = self.P.apply(x1), self.F2.apply(x2)
        n = max(a.size, b.size)
        return y1, linalg.pad_to(a, n) + linalg.pad_to(b, n)

    def compose(self, other: "BlockOperator") -> "BlockOperator":
        return BlockOperator(
            self.F.compose(other.F),
            self.P.compose(other.F) + self.F2.compose(other.P),
            self.F2.compose(other.F2),
        )

    def stacked_dense(self, level: int) -> tuple[np.ndarray, int, int]:
        """Dense matrix [[F, 0], [P, F2]] on compatible truncations: factor
        domains are deep enough that every codomain row reachable from the
        truncated domain is also reachable by the included tail columns (no
        partially captured columns).  Returns (matrix, rows1, rows2)."""
        cols1 = level
        rows1 = self.F.output_rows(cols1)
        reach_p = self.P.output_rows(cols1)
        cols2 = level
        if self.F2.tail_scale != 0.0:
            cols2 = max(level, reach_p - self.F2.shift)
        rows2 = max(reach_p, self.F2.output_rows(cols2))
        a = np.zeros((rows1 + rows2, cols1 + cols2))
        a[:rows1, :cols1] = self.F.to_dense(rows1, cols1)
        a[rows1:, :cols1] = self.P.to_dense(rows2, cols1)
        a[rows1:, cols1:] = self.F2.to_dense(rows2, cols2)
        return a, rows1, rows2

    def fredholm_index(self, level: int | None = None, rtol: float | None = None) -> int:
        """Index of the flattened operator via kernel/cokernel counts at two
        truncation levels (no structural shortcut: this is the oracle side)."""
        base = 8 + max(
            level or 0,
            *(op.window + 2 * abs(op.shift) for op in (self.F, self.P, self.F2)),
        )
        counts = []
        for L in (base, base + 5):
            a, r1, r2 = self.stacked_dense(L)
            r = linalg.rank(a, rtol)
            counts.append((a.shape[1] - r, r1 + r2 - r))
        if counts[0] != counts[1]:
            raise StabilizationFailure(
                f"block kernel/cokernel counts {counts[0]} vs {counts[1]}"
            )
        k, c = counts[0]
        return k - c

    def flatten(self) -> SequenceOperator:
        """Flatten to a single sequence-space operator via the even/odd
        interleaving.  Requires equal tail shifts on the diagonal and an
        annihilating tail on P, otherwise the result has no constant tail."""
        if self.F.tail_scale != 0.0 and self.F2.tail_scale != 0.0:
            if self.F.shift != self.F2.shift or self.F.tail_scale != self.F2.tail_scale:
                raise NotRepresentable("diagonal tails differ; flattened tail is not a shift")
            if self.P.tail_scale != 0.0:
                raise NotRepresentable("P has a live tail; flattened tail is not a shift")
            shift, scale = 2 * self.F.shift, self.F.tail_scale
        elif self.F.tail_scale == 0.0 and self.F2.tail_scale == 0.0 and self.P.tail_scale == 0.0:
            shift, scale = 0, 0.0
        else:
            raise NotRepresentable("mixed zero/shift tails do not flatten")
        w = max(self.F.window, self.F2.window, self.P.window, -self.F.shift if scale else 0)
        cols = []
        for i in range(w):  # factor-1 column i -> global 2i, factor-2 -> 2i+1
            y1, y2 = self.F._column(i), self.P._column(i)
            cols.append(_interleave_vec(y1, y2))
            cols.append(_interleave_vec(np.zeros(0), self.F2._column(i)))
        # reorder: we appended (2i, 2i+1) pairs in order, already global order
        return SequenceOperator.from_columns(shift, cols, scale)

    def __repr__(self) -> str:
        return f"BlockOperator(F={self.F!r}, P={self.P!r}, F2={self.F2!r})"


def _interleave_vec(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    n = max(x.size, y.size)
    out = np.zeros(2 * n)
    out[0 : 2 * x.size : 2] = x
    out[1 : 2 * y.size + 1 : 2] = y
    return linalg.trim(out)


def block_lower_triangular(F: SequenceOperator, P: SequenceOperator, F2: SequenceOperator) -> BlockOperator:
    return BlockOperator(F, P, F2)


def is_glk_tilde(b: BlockOperator, tol: float = 1e-9) -> bool:
    """Structure-group test for the lower triangular group: both diagonal
    blocks in the structure group, with invertibility asserted through an
    explicit witness inverse (back-substitution) rather than assumed."""
    if not (is_glk(b.F) and is_glk(b.F2)):
        return False
    inv = block_inverse(b)
    prod = b.compose(inv)
    return (
        prod.F.approx_equal(identity(), tol)
        and prod.F2.approx_equal(identity(), tol)
        and prod.P.approx_equal(identity().scale(0.0), tol)
    )


def block_inverse(b: BlockOperator) -> BlockOperator:
    """Witness inverse [[F^-1, 0], [-F2^-1 P F^-1, F2^-1]]."""
    f_inv = glk_inverse(b.F)
    f2_inv = glk_inverse(b.F2)
    return BlockOperator(f_inv, (f2_inv.compose(b.P).compose(f_inv)).scale(-1.0), f2_inv)


def retraction_path(b: BlockOperator, t: float) -> BlockOperator:
    """Straight-line retraction onto the block diagonal: P scaled by (1 - t)."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"retraction parameter {t} outside [0, 1]")
    if not (is_glk(b.F) and is_glk(b.F2)):
        raise NotGLK("retraction defined on the lower triangular structure group")
    return BlockOperator(b.F, b.P.scale(1.0 - t), b.F2)


# -- transversality to complemented subspaces --------------------------------


def _levels_for(op: SequenceOperator, v: ComplementedSubspace) -> tuple[int, int]:
    s = abs(op.shift)
    bound = max(
        op.window + 2 * s,
        v.space.support_bound() + s,
        v.complement.support_bound() + s,
    )
    base = bound + 8
    return base, base + 5


def _surjectivity_rank_ok(op: SequenceOperator, v: ComplementedSubspace, rows: int, rtol) -> bool:
    cols = rows + abs(op.shift) + op.window  # enough domain coordinates to hit every row
    a = op.to_dense(rows, cols)
    vb = v.space.basis_matrix(rows)
    return linalg.rank(np.hstack([a, vb]), rtol) == rows


def is_transversal(op: SequenceOperator, v: ComplementedSubspace, rtol: float | None = None) -> bool:
    """im(T) + V = codomain and the preimage construction yields a verified
    complement; rank decisions stabilized over two truncation levels."""
    l1, l2 = _levels_for(op, v)
    ok1 = _surjectivity_rank_ok(op, v, l1, rtol)
    ok2 = _surjectivity_rank_ok(op, v, l2, rtol)
    if ok1 != ok2:
        raise StabilizationFailure(
            f"transversality rank test disagrees between levels {l1} and {l2}"
        )
    if not ok1:
        return False
    try:
        preimage_with_complement(op, v, rtol=rtol, _check_surjective=False)
    except NotTransversal:
        return False
    return True


def transversality_witness(
    op: SequenceOperator, v: ComplementedSubspace, e_prime, tol: float = 1e-10
) -> tuple[np.ndarray, np.ndarray]:
    """Split e' = T e + v constructively.

    e solves the equation projected off V by minimum-norm least squares; the
    remainder is projected back onto V.  The returned pair is checked against
    the exact operator action; NotTransversal if the defining equation cannot
    be met to ``tol``.
    """
    e_prime = np.asarray(e_prime, dtype=float).ravel()
    l1, _ = _levels_for(op, v)
    rows = max(l1, e_prime.size + op.window + 2 * abs(op.shift) + 8)
    cols = rows - op.shift  # image of the domain truncation stays inside rows
    a = op.to_dense(rows, cols)
    vb = v.space.basis_matrix(rows)
    q = linalg.orthonormalize(vb)
    proj_off = np.eye(rows) - q @ q.T if q.size else np.eye(rows)
    target = linalg.pad_to(e_prime, rows)
    e = linalg.min_norm_lstsq(proj_off @ a, proj_off @ target)
    remainder = target - a @ e
    vvec = q @ (q.T @ remainder) if q.size else np.zeros(rows)
    actual = op.apply(e)
    n = max(rows, actual.size)
    resid = linalg.pad_to(target, n) - linalg.pad_to(actual, n) - linalg.pad_to(vvec, n)
    if np.linalg.norm(resid) > tol:
        raise NotTransversal("witness equation e' = T e + v not satisfiable")
    return linalg.trim(e), linalg.trim(vvec)


def block_transversality_witness(
    b: BlockOperator,
    v1: ComplementedSubspace,
    v2: ComplementedSubspace,
    e1_prime,
    e2_prime,
    tol: float = 1e-10,
):
    """Constructive split for the lower triangular operator against V1 (+) V2,
    mirroring the two-step argument: solve per factor, then correct the
    second factor for the coupling term P e1."""
    e1, w1 = transversality_witness(b.F, v1, e1_prime, tol)
    e2, w2 = transversality_witness(b.F2, v2, e2_prime, tol)
    coupling = b.P.apply(e1)
    e_corr, v_corr = transversality_witness(b.F2, v2, coupling, tol)
    n2 = max(e2.size, e_corr.size)
    m2 = max(w2.size, v_corr.size)
    return (
        (e1, linalg.pad_to(e2, n2) - linalg.pad_to(e_corr, n2)),
        (w1, linalg.pad_to(w2, m2) - linalg.pad_to(v_corr, m2)),
    )


def _preimage_head(op: SequenceOperator, v: ComplementedSubspace) -> tuple[int, bool]:
    """(head length, tail-free?) for the preimage computation: beyond the
    head, domain coordinates map into V (preimage cofinite) or the preimage
    forces them to vanish (preimage finite)."""
    s, w = op.shift, op.window
    v_tail = v.space.tail_start
    if op.tail_scale == 0.0:
        return max(w, 1), True  # annihilating tail maps into every subspace
    if v_tail is not None:
        return max(w, v_tail - s, 0), True
    return max(w, v.space.support_bound() + abs(s), 0) + 1, False


def preimage_with_complement(
    op: SequenceOperator,
    v: ComplementedSubspace,
    rtol: float | None = None,
    _check_surjective: bool = True,
) -> ComplementedSubspace:
    """T^-1(V) together with a verified complement.

    The head part is computed as a finite kernel; beyond the head the domain
    coordinates map straight into V (cofinite preimage) or are forced to
    vanish (finite preimage).
    """
    if _check_surjective and not is_transversal(op, v, rtol):
        raise NotTransversal("operator is not transversal to the subspace")
    head, has_tail = _preimage_head(op, v)
    rows = max(op.output_rows(head), v.space.support_bound(), 1)
    a = op.to_dense(rows, head)
    vb = v.space.basis_matrix(rows)
    # x in head-span with A x in span(V)  <=>  (I - P_V) A x = 0
    q = linalg.orthonormalize(vb)
    proj_off = np.eye(rows) - q @ q.T if q.size else np.eye(rows)
    kernel = linalg.nullspace(proj_off @ a, rtol)
    u = [linalg.trim(kernel[:, i]) for i in range(kernel.shape[1])]
    w_basis = linalg.nullspace(kernel.T if kernel.size else np.zeros((0, head)), rtol)
    w_vecs = [linalg.trim(w_basis[:, i]) for i in range(w_basis.shape[1])]
    if has_tail:
        space = SubspaceBasis(tail_start=head, vectors=u)
        comp = SubspaceBasis(tail_start=None, vectors=w_vecs)
    else:
        space = SubspaceBasis(tail_start=None, vectors=u)
        comp = SubspaceBasis(tail_start=head, vectors=w_vecs)
    result = ComplementedSubspace(space, comp)
    if not result.verify(rtol=rtol):
        raise NotTransversal("constructed preimage complement fails the span test")
    return result


def block_is_transversal(
    b: BlockOperator,
    v1: ComplementedSubspace,
    v2: ComplementedSubspace,
    rtol: float | None = None,
) -> bool:
    """Rank test for the lower triangular operator against V1 (+) V2,
    stabilized over two per-factor truncation levels."""
    l1a, l1b = _levels_for(b.F, v1)
    l2a, l2b = _levels_for(b.F2, v2)
    lp = b.P.window + 2 * abs(b.P.shift) + 8
    results = []
    for lv in (max(l1a, l2a, lp), max(l1b, l2b, lp) + 5):
        rows1 = max(b.F.output_rows(lv + abs(b.F.shift) + b.F.window), lv)
        rows2 = max(
            b.F2.output_rows(lv + abs(b.F2.shift) + b.F2.window),
            b.P.output_rows(lv),
            lv,
        )
        cols1 = rows1 + abs(b.F.shift) + b.F.window
        cols2 = rows2 + abs(b.F2.shift) + b.F2.window
        a = np.zeros((rows1 + rows2, cols1 + cols2))
        a[:rows1, :cols1] = b.F.to_dense(rows1, cols1)
        a[rows1:, :cols1] = b.P.to_dense(rows2, cols1)
        a[rows1:, cols1:] = b.F2.to_dense(rows2, cols2)
        vb1 = v1.space.basis_matrix(rows1)
        vb2 = v2.space.basis_matrix(rows2)
        vb = np.zeros((rows1 + rows2, vb1.shape[1] + vb2.shape[1]))
        vb[:rows1, : vb1.shape[1]] = vb1
        vb[rows1:, vb1.shape[1] :] = vb2
        results.append(linalg.rank(np.hstack([a, vb]), rtol) == rows1 + rows2)
    if results[0] != results[1]:
        raise StabilizationFailure("block transversality rank test disagrees between levels")
    return results[0]


def block_preimage_with_complement(
    b: BlockOperator,
    v1: ComplementedSubspace,
    v2: ComplementedSubspace,
    rtol: float | None = None,
) -> ComplementedSubspace:
    """Preimage of V1 (+) V2 under the lower triangular operator, realized on
    the interleaved single sequence space, with the complement taken as the
    interleaved product of the factor complements (which the two-step
    correction argument shows is a complement)."""
    if not block_is_transversal(b, v1, v2, rtol):
        raise NotTransversal("block operator is not transversal to V1 (+) V2")
    p1 = preimage_with_complement(b.F, v1, rtol)
    p2 = preimage_with_complement(b.F2, v2, rtol)
    # joint head kernel: (x1, x2) with F x1 in V1 and P x1 + F2 x2 in V2
    h1, free1 = _preimage_head(b.F, v1)
    h2, free2 = _preimage_head(b.F2, v2)
    cofinite = free1 and free2
    h1 = max(h1, b.P.window)
    if cofinite:
        # factor-1 tail coordinates must also land in V2 through the coupling
        if b.P.tail_scale != 0.0:
            t2 = v2.space.tail_start
            if t2 is None:
                raise NotRepresentable(
                    "coupling with a live tail into a finite subspace leaves the model"
                )
            h1 = max(h1, t2 - b.P.shift)
    else:
        if free1 != free2:
            raise NotRepresentable(
                "preimage with one free factor tail is not an interleaved subspace"
            )
        # the second factor must absorb whatever the coupling reaches
        h2 = max(h2, b.P.output_rows(h1) + abs(b.F2.shift) + 1)
    rows1 = max(b.F.output_rows(h1), v1.space.support_bound(), 1)
    rows2 = max(b.F2.output_rows(h2), b.P.output_rows(h1), v2.space.support_bound(), 1)
    a = np.zeros((rows1 + rows2, h1 + h2))
    a[:rows1, :h1] = b.F.to_dense(rows1, h1)
    a[rows1:, :h1] = b.P.to_dense(rows2, h1)
    a[rows1:, h1:] = b.F2.to_dense(rows2, h2)
    vb1 = v1.space.basis_matrix(rows1)
    vb2 = v2.space.basis_matrix(rows2)
    vb = np.zeros((rows1 + rows2, vb1.shape[1] + vb2.shape[1]))
    vb[:rows1, : vb1.shape[1]] = vb1
    vb[rows1:, vb1.shape[1] :] = vb2
    q = linalg.orthonormalize(vb)
    proj_off = np.eye(rows1 + rows2) - q @ q.T if q.size else np.eye(rows1 + rows2)
    kernel = linalg.nullspace(proj_off @ a, rtol)
    joint_vectors = []
    for i in range(kernel.shape[1]):
        joint_vectors.append(_interleave_vec(kernel[:h1, i], kernel[h1:, i]))
    if cofinite:
        space = _interleave_basis(SubspaceBasis(h1, []), SubspaceBasis(h2, []))
        space = SubspaceBasis(space.tail_start, space.vectors + joint_vectors)
        comp = _interleave_basis(p1.complement, p2.complement)
    else:
        space = SubspaceBasis(None, joint_vectors)
        comp = _interleave_basis(p1.complement, p2.complement)
    result = ComplementedSubspace(space, comp)
    if not result.verify(rtol=rtol):
        raise NotTransversal("factor complements do not complement the block preimage")
    return result
