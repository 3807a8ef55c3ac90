"""Built-in manifold catalog, addressable by name + parameters.

Everything here is deterministic: sample points come from fixed unit-vector
patterns or a caller-supplied seed, never from global state.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .geometry import ImplicitManifold, ManifoldPair, SmoothMap, TubularMap

__all__ = [
    "circle",
    "sphere",
    "torus",
    "graph_manifold",
    "linear_subspace",
    "projective_space",
    "sym_embed",
    "sym_embed_map",
    "linear_pair",
    "sphere_equator_pair",
    "parabola_pair",
    "flat_tubular",
    "sphere_tubular",
    "get",
]


def _unit_samples(dim_sphere: int, ambient: int, count: int, seed: int = 7) -> list[np.ndarray]:
    """Deterministic points on the unit sphere of the leading dim_sphere+1
    coordinates of an ambient space."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    out = []
    for _ in range(count):
        v = rng.normal(size=dim_sphere + 1)
        v = v / np.linalg.norm(v)
        x = np.zeros(ambient)
        x[: dim_sphere + 1] = v
        out.append(x)
    return out


def sphere(k: int, ambient: int | None = None, n_samples: int = 8, seed: int = 7) -> ImplicitManifold:
    """Unit sphere of the leading k+1 coordinates, embedded with trailing
    zeros when the ambient space is bigger."""
    ambient = ambient or k + 1
    if ambient < k + 1:
        raise DomainError(f"ambient {ambient} too small for a {k}-sphere")
    extra = ambient - (k + 1)

    def g(x):
        out = np.empty(1 + extra)
        out[0] = float(x[: k + 1] @ x[: k + 1]) - 1.0 + float(x[k + 1 :] @ x[k + 1 :])
        out[1:] = x[k + 1 :]
        return out

    def jac(x):
        j = np.zeros((1 + extra, ambient))
        j[0, :] = 2.0 * x
        for i in range(extra):
            j[1 + i, k + 1 + i] = 1.0
        return j

    def projector(x):
        y = np.zeros(ambient)
        head = x[: k + 1]
        n = np.linalg.norm(head)
        y[: k + 1] = head / n if n > 0 else np.eye(ambient)[0][: k + 1]
        return y

    return ImplicitManifold(
        name=f"S^{k}" + (f"@R^{ambient}" if extra else ""),
        ambient_dim=ambient,
        dim=k,
        constraints=SmoothMap(ambient, 1 + extra, g, jac, f"sphere{k}"),
        samples=_unit_samples(k, ambient, n_samples, seed),
        projector=projector,
    )


def circle(n_samples: int = 8, seed: int = 7) -> ImplicitManifold:
    return sphere(1, n_samples=n_samples, seed=seed)


def torus(R: float = 2.0, r: float = 0.5, n_samples: int = 8, seed: int = 11) -> ImplicitManifold:
    def g(x):
        rho = np.sqrt(x[0] ** 2 + x[1] ** 2)
        return np.array([(rho - R) ** 2 + x[2] ** 2 - r**2])

    rng = np.random.Generator(np.random.Philox(key=seed))
    samples = []
    for _ in range(n_samples):
        u, v = rng.uniform(0, 2 * np.pi, size=2)
        samples.append(
            np.array([(R + r * np.cos(v)) * np.cos(u), (R + r * np.cos(v)) * np.sin(u), r * np.sin(v)])
        )
    return ImplicitManifold("torus", 3, 2, SmoothMap(3, 1, g, name="torus"), samples)


def graph_manifold(fn, d_in: int, d_out: int, base_points, name: str = "graph") -> ImplicitManifold:
    """Graph {(x, fn(x))} inside R^(d_in + d_out)."""

    def g(z):
        return z[d_in:] - np.asarray(fn(z[:d_in]), dtype=float)

    samples = [np.concatenate([np.asarray(p, float), np.asarray(fn(np.asarray(p, float)), float)]) for p in base_points]
    return ImplicitManifold(name, d_in + d_out, d_in, SmoothMap(d_in + d_out, d_out, g, name=name), samples)


def linear_subspace(ambient: int, n: int, n_samples: int = 6, seed: int = 5) -> ImplicitManifold:
    """Span of the leading n coordinates inside R^ambient."""
    if n > ambient:
        raise DomainError("subspace dimension exceeds ambient")

    def g(x):
        return x[n:]

    def jac(x):
        j = np.zeros((ambient - n, ambient))
        j[:, n:] = np.eye(ambient - n)
        return j

    def projector(x):
        y = np.array(x, dtype=float)
        y[n:] = 0.0
        return y

    rng = np.random.Generator(np.random.Philox(key=seed))
    samples = []
    for _ in range(n_samples):
        x = np.zeros(ambient)
        x[:n] = rng.normal(size=n)
        samples.append(x)
    return ImplicitManifold(
        f"E_{n}@R^{ambient}",
        ambient,
        n,
        SmoothMap(ambient, ambient - n, g, jac, "linear"),
        samples,
        projector=projector,
    )


# -- projective space via rank-one projections -------------------------------


def _sym_indices(n: int):
    return [(i, j) for i in range(n) for j in range(i, n)]


def sym_embed(x: np.ndarray) -> np.ndarray:
    """Upper-triangle vectorization of the rank-one projection x x^T."""
    x = np.asarray(x, dtype=float)
    p = np.outer(x, x)
    return np.array([p[i, j] for i, j in _sym_indices(x.size)])


def sym_embed_map(k: int, ambient_in: int | None = None) -> SmoothMap:
    """The two-to-one map (unit vectors) -> (projections): the concrete
    double cover of projective space by the sphere."""
    n = k + 1
    d_in = ambient_in or n
    m = n * (n + 1) // 2

    def fn(x):
        return sym_embed(np.asarray(x[:n], dtype=float))

    return SmoothMap(d_in, m, fn, name=f"double_cover_S{k}")


def projective_space(k: int, big_n: int | None = None, n_samples: int = 8, seed: int = 13) -> ImplicitManifold:
    """Real projective k-space as rank-one symmetric projections.

    Embedded in the symmetric matrices on R^(big_n) (upper-triangle
    coordinates); entries beyond the leading (k+1) block are constrained to
    zero so nested projective spaces share one ambient space.  The
    constraint system (P^2 = P, trace 1, trailing block 0) is overdetermined;
    its Jacobian has rank ambient - k at every sample.
    """
    n = big_n or k + 1
    if n < k + 1:
        raise DomainError("big_n too small")
    idx = _sym_indices(n)
    m = len(idx)
    pos = {ij: a for a, ij in enumerate(idx)}

    def mat(s):
        p = np.zeros((n, n))
        for a, (i, j) in enumerate(idx):
            p[i, j] = s[a]
            p[j, i] = s[a]
        return p

    def g(s):
        p = mat(s)
        q = p @ p - p
        eqs = [q[i, j] for i, j in idx]
        eqs.append(np.trace(p) - 1.0)
        for a, (i, j) in enumerate(idx):
            if i > k or j > k:
                eqs.append(s[a])
        return np.asarray(eqs)

    n_eqs = m + 1 + sum(1 for i, j in idx if i > k or j > k)
    rng = np.random.Generator(np.random.Philox(key=seed))
    samples = []
    for _ in range(n_samples):
        v = rng.normal(size=k + 1)
        v = v / np.linalg.norm(v)
        x = np.zeros(n)
        x[: k + 1] = v
        samples.append(sym_embed_full(x, idx))
    return ImplicitManifold(
        f"RP^{k}" + (f"@sym{n}" if n != k + 1 else ""),
        m,
        k,
        SmoothMap(m, n_eqs, g, name=f"rp{k}"),
        samples,
    )


def sym_embed_full(x: np.ndarray, idx) -> np.ndarray:
    p = np.outer(x, x)
    return np.array([p[i, j] for i, j in idx])


# -- pairs and tubular maps ---------------------------------------------------


def linear_pair(ambient: int, n: int, n_samples: int = 6, seed: int = 5) -> ManifoldPair:
    """(R^ambient, leading-n coordinate subspace)."""
    big = linear_subspace(ambient, ambient, n_samples, seed)
    big.name = f"R^{ambient}"
    small = linear_subspace(ambient, n, n_samples, seed + 1)
    return ManifoldPair(big, small)


def flat_tubular(pair: ManifoldPair, radius: float = 10.0) -> TubularMap:
    """Affine tubular map m + X; valid whenever the big manifold is flat
    along normal directions (linear pairs)."""
    return TubularMap(pair, lambda m, x: m + x, radius)


def sphere_equator_pair(k: int, ambient: int | None = None, n_samples: int = 6, seed: int = 9) -> ManifoldPair:
    """(S^k, equatorial S^(k-1)) in a common ambient space."""
    big = sphere(k, ambient, n_samples, seed)
    small = sphere(k - 1, ambient or k + 1, n_samples, seed + 1)
    return ManifoldPair(big, small)


def sphere_tubular(pair: ManifoldPair, radius: float = 0.9) -> TubularMap:
    """Normalized-sum tubular map for sphere pairs: (m, X) -> (m+X)/|m+X|."""

    def phi(m, x):
        y = m + x
        return y / np.linalg.norm(y)

    return TubularMap(pair, phi, radius)


def parabola_pair(ambient: int = 2, curvature: float = 1.0, n_samples: int = 6, seed: int = 3) -> ManifoldPair:
    """(R^2, graph of y = c x^2): a curved submanifold of a flat manifold,
    the standard fixture for O(h^2) triangularity defects."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    base = [np.array([t]) for t in rng.uniform(-1.0, 1.0, size=n_samples)]
    small = graph_manifold(lambda u: np.array([curvature * u[0] ** 2]), 1, 1, base, name="parabola")
    big = linear_subspace(2, 2, n_samples, seed + 1)
    big.name = "R^2"
    return ManifoldPair(big, small)


def antipodal_cover(k: int, big_n: int | None = None, n_samples: int = 6, seed: int = 13):
    """The 2-sheeted covering of projective space by the sphere: unit vectors
    to rank-one projections, with lifts recovered by eigendecomposition."""
    from .filtration import CoveringMap

    n = big_n or k + 1
    total = sphere(k, ambient=n, n_samples=n_samples, seed=seed)
    base = projective_space(k, big_n=n, n_samples=n_samples, seed=seed)
    idx = _sym_indices(n)

    def lift(q):
        p = np.zeros((n, n))
        for a, (i, j) in enumerate(idx):
            p[i, j] = q[a]
            p[j, i] = q[a]
        w, v = np.linalg.eigh(p)
        x = v[:, int(np.argmax(w))]
        return [x, -x]

    return CoveringMap(total=total, base=base, projection=sym_embed_map(k, ambient_in=n), lift=lift)


def get(name: str, **params) -> ImplicitManifold:
    """Catalog lookup used by the CLI configuration surface."""
    table = {
        "circle": circle,
        "sphere": sphere,
        "torus": torus,
        "linear": linear_subspace,
        "projective": projective_space,
    }
    if name not in table:
        raise DomainError(f"unknown manifold {name!r}; choices: {sorted(table)}")
    return table[name](**params)
