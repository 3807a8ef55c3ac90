"""Complemented subspaces of one-sided sequence space.

A subspace is either the span of finitely many finite-support vectors, or
cofinite: all coordinates beyond ``tail_start`` together with a finite list
of correction vectors.  Every subspace is stored with a complement, and the
pair is checked by exact rank tests at truncation levels.
"""

from __future__ import annotations

import json

import numpy as np

from . import linalg

__all__ = [
    "SubspaceBasis",
    "ComplementedSubspace",
    "coordinate_span",
    "interleave_subspaces",
    "subspace_image",
    "prepend_coordinate",
]


class SubspaceBasis:
    """Half of a complemented pair: a finite span, or a coordinate tail
    plus finite corrections."""

    __slots__ = ("tail_start", "vectors")

    def __init__(self, tail_start: int | None, vectors):
        self.tail_start = tail_start
        vs = []
        for v in vectors:
            v = linalg.trim(np.asarray(v, dtype=float))
            if v.size:
                vs.append(v)
        self.vectors = vs

    def support_bound(self) -> int:
        b = max([v.size for v in self.vectors] + [0])
        if self.tail_start is not None:
            b = max(b, self.tail_start)
        return b

    def basis_matrix(self, level: int) -> np.ndarray:
        """Columns spanning the subspace's trace at truncation ``level``."""
        cols = [linalg.pad_to(v, level) for v in self.vectors]
        if self.tail_start is not None:
            for i in range(self.tail_start, level):
                e = np.zeros(level)
                e[i] = 1.0
                cols.append(e)
        if not cols:
            return np.zeros((level, 0))
        return np.column_stack(cols)

    def dim_at(self, level: int, rtol: float | None = None) -> int:
        return linalg.rank(self.basis_matrix(level), rtol)

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float).ravel()
        level = max(self.support_bound(), x.size, 1)
        q = linalg.orthonormalize(self.basis_matrix(level))
        xx = linalg.pad_to(x, level)
        resid = xx - q @ (q.T @ xx) if q.size else xx
        return float(np.linalg.norm(resid)) <= tol

    def contains_subspace(self, other: "SubspaceBasis", rtol: float | None = None) -> bool:
        level = max(self.support_bound(), other.support_bound()) + 3
        mine = self.basis_matrix(level)
        theirs = other.basis_matrix(level)
        return linalg.rank(np.hstack([mine, theirs]), rtol) == linalg.rank(mine, rtol)

    def to_json(self) -> dict:
        return {
            "tail_start": self.tail_start,
            "vectors": [list(v) for v in self.vectors],
        }

    @staticmethod
    def from_json(obj: dict) -> "SubspaceBasis":
        return SubspaceBasis(obj["tail_start"], obj["vectors"])

    def __repr__(self) -> str:
        return f"SubspaceBasis(tail_start={self.tail_start}, n_vectors={len(self.vectors)})"


class ComplementedSubspace:
    """A subspace stored together with a complement; the defining property
    (direct sum at every truncation level) is rank-verifiable."""

    __slots__ = ("space", "complement")

    def __init__(self, space: SubspaceBasis, complement: SubspaceBasis):
        self.space = space
        self.complement = complement

    def verify(self, rtol: float | None = None, margin: int = 5) -> bool:
        """Span + trivial intersection at two truncation levels."""
        bound = max(self.space.support_bound(), self.complement.support_bound(), 1)
        for level in (bound + margin, bound + 2 * margin):
            a = self.space.basis_matrix(level)
            b = self.complement.basis_matrix(level)
            ra, rb = linalg.rank(a, rtol), linalg.rank(b, rtol)
            if ra + rb != level or linalg.rank(np.hstack([a, b]), rtol) != level:
                return False
        return True

    def to_json(self) -> dict:
        return {"basis": self.space.to_json(), "complement": self.complement.to_json()}

    @staticmethod
    def from_json(obj: dict) -> "ComplementedSubspace":
        return ComplementedSubspace(
            SubspaceBasis.from_json(obj["basis"]),
            SubspaceBasis.from_json(obj["complement"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    def __repr__(self) -> str:
        return f"ComplementedSubspace({self.space!r}, {self.complement!r})"


def coordinate_span(n: int) -> ComplementedSubspace:
    """span{e_0, ..., e_(n-1)} with the coordinate tail as complement."""
    vs = []
    for i in range(n):
        e = np.zeros(i + 1)
        e[i] = 1.0
        vs.append(e)
    return ComplementedSubspace(
        SubspaceBasis(None, vs), SubspaceBasis(n, [])
    )


def coordinate_tail(n: int) -> ComplementedSubspace:
    """Coordinates beyond n, complemented by the leading span."""
    inner = coordinate_span(n)
    return ComplementedSubspace(inner.complement, inner.space)


def _interleave(v: np.ndarray, parity: int) -> np.ndarray:
    out = np.zeros(2 * v.size)
    out[parity : 2 * v.size + parity : 2] = v
    return linalg.trim(out)


def _interleave_basis(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    vectors = [_interleave(v, 0) for v in a.vectors] + [_interleave(v, 1) for v in b.vectors]
    if a.tail_start is None and b.tail_start is None:
        return SubspaceBasis(None, vectors)
    # global tail where both factor tails are live; stragglers become corrections
    ka = a.tail_start if a.tail_start is not None else None
    kb = b.tail_start if b.tail_start is not None else None
    if ka is None or kb is None:
        # an every-other-coordinate tail is not expressible in this model
        raise ValueError("cannot interleave a finite subspace with a cofinite one")
    start = max(2 * ka, 2 * kb + 1)
    for g in range(2 * ka, start, 2):  # even stragglers below the joint tail
        e = np.zeros(g + 1)
        e[g] = 1.0
        vectors.append(e)
    for g in range(2 * kb + 1, start, 2):  # odd stragglers
        e = np.zeros(g + 1)
        e[g] = 1.0
        vectors.append(e)
    return SubspaceBasis(start, vectors)


def interleave_subspaces(v1: ComplementedSubspace, v2: ComplementedSubspace) -> ComplementedSubspace:
    """External direct sum realized on one sequence space: factor-1
    coordinate i sits at 2i, factor-2 coordinate j at 2j+1."""
    return ComplementedSubspace(
        _interleave_basis(v1.space, v2.space),
        _interleave_basis(v1.complement, v2.complement),
    )


def subspace_image(g, v: ComplementedSubspace) -> ComplementedSubspace:
    """Image of a complemented subspace under a structure-group operator
    (identity beyond its window, so cofinite tails stay coordinate-aligned)."""
    if g.tail_scale != 1.0 or g.shift != 0:
        raise ValueError("subspace_image requires an identity-tail operator")

    def push(basis: SubspaceBasis) -> SubspaceBasis:
        vectors = [g.apply(v_) for v_ in basis.vectors]
        if basis.tail_start is None:
            return SubspaceBasis(None, vectors)
        start = max(basis.tail_start, g.window)
        for i in range(basis.tail_start, start):
            e = np.zeros(i + 1)
            e[i] = 1.0
            vectors.append(g.apply(e))
        return SubspaceBasis(start, vectors)

    return ComplementedSubspace(push(v.space), push(v.complement))


def prepend_coordinate(v: ComplementedSubspace, include_in_space: bool = True) -> ComplementedSubspace:
    """Shift every coordinate up by one and adjoin the distinguished new
    coordinate e_0 to the subspace (or to its complement)."""

    def shift_basis(basis: SubspaceBasis, adjoin: bool) -> SubspaceBasis:
        vectors = [np.concatenate([[0.0], v_]) for v_ in basis.vectors]
        if adjoin:
            vectors.append(np.array([1.0]))
        start = None if basis.tail_start is None else basis.tail_start + 1
        return SubspaceBasis(start, vectors)

    return ComplementedSubspace(
        shift_basis(v.space, include_in_space),
        shift_basis(v.complement, not include_in_space),
    )
