"""Matrix Muckenhoupt A_p estimation over dyadic cube families.

Two regimes of the A_p condition are implemented: the essential-supremum
form for 0 < p <= 1 and the double-average form for p > 1.  Suprema over
cubes and over the inner variable are realized as maxima over tensor
midpoint quadrature nodes, so every estimate is a certified lower bound of
the true constant and refinement convergence is monotone.

Also here: scalar reductions w_x, doubling constants/exponents, and the
cross-cube comparison constant of the unit-cube lattice.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import EmptyFamily, ExponentOutOfRange, ZeroMass
from .weights import WeightSpec, root_batch, spectral_norms

# elements per pairwise-product block before chunking kicks in
_CHUNK_ELEMS = 1 << 22


@dataclass(frozen=True)
class CubeFamily:
    """Dyadic cube family Q(z, r) = z + r[-1/2, 1/2)^n.

    Scales are r = scale * 2^j for j in [j_min, j_max]; per scale, centers sit
    on the (r/2)-lattice inside [-X, X]^n.  q is the number of midpoint
    quadrature nodes per axis; q must be even so origin-centered cubes never
    sample the origin (and with (r/2)-lattice centers, no cube ever does).
    """

    n: int
    j_min: int = -8
    j_max: int = 4
    X: float = 16.0
    q: int = 128
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.j_min > self.j_max:
            raise EmptyFamily("empty scale range")
        if self.q < 2 or self.q % 2 != 0:
            raise ValueError("q must be an even integer >= 2")
        if self.X <= 0 or self.scale <= 0:
            raise ValueError("X and scale must be positive")

    @property
    def scales(self) -> list[float]:
        return [self.scale * 2.0**j for j in range(self.j_min, self.j_max + 1)]

    def centers_at(self, r: float) -> np.ndarray:
        """(C, n) lattice of centers with spacing r/2 inside [-X, X]^n."""
        kmax = int(np.floor(self.X / (r / 2.0)))
        axis = (r / 2.0) * np.arange(-kmax, kmax + 1, dtype=float)
        grids = np.meshgrid(*([axis] * self.n), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def quad_offsets(self, r: float) -> np.ndarray:
        """(q^n, n) tensor midpoint offsets relative to the cube center."""
        axis = r * ((np.arange(self.q) + 0.5) / self.q - 0.5)
        grids = np.meshgrid(*([axis] * self.n), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def dilate(self, R: float) -> "CubeFamily":
        """The family mapped by x -> R x (bijectively onto itself as a set)."""
        if not R > 0:
            raise ValueError("dilation factor must be positive")
        return CubeFamily(self.n, self.j_min, self.j_max, self.X * R, self.q, self.scale * R)


@dataclass(frozen=True)
class ApEstimate:
    value: float
    p: float
    regime: str  # "small_p" | "large_p"
    argmax_center: tuple
    argmax_scale: float
    refinement: tuple  # (q, j_min, j_max, X)


@dataclass(frozen=True)
class DoublingReport:
    C_dbl: float
    beta: float
    c_w: float
    directions_tested: int
    worst_direction: np.ndarray
    argmax_center: tuple
    argmax_scale: float


def default_directions(N: int, seed: int = 0) -> np.ndarray:
    """N coordinate vectors plus 2 N^2 seeded random complex unit vectors."""
    rng = np.random.default_rng(seed)
    coords = np.eye(N, dtype=complex)
    z = rng.standard_normal((2 * N * N, N)) + 1j * rng.standard_normal((2 * N * N, N))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return np.concatenate([coords, z], axis=0)


def scalar_reduction(spec: WeightSpec, p: float, x: np.ndarray):
    """The scalar weight t -> |W^{1/p}(t) x|^p for a fixed unit direction x."""
    x = np.asarray(x, dtype=complex).reshape(spec.N)
    if abs(np.linalg.norm(x) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")

    def w(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        pts = t[..., np.newaxis] if spec.n == 1 and (t.ndim == 0 or t.shape[-1] != 1) else t
        return direction_weights(spec, p, pts, x[np.newaxis, :])[0]

    return w


def direction_weights(spec: WeightSpec, p: float, pts: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """w_x(t) = |W^{1/p}(t) x|^p for points pts (..., n) and directions xs (D, N).

    Returns shape (D,) + pts.shape[:-1].
    """
    form, data = root_batch(spec, pts, 1.0 / p)
    D = xs.shape[0]
    if form == "scalar":
        w = np.power(data, p)
        return np.broadcast_to(w, (D,) + w.shape).copy()
    if form == "diagonal":
        # |diag(d) x|^2 = sum_i d_i^2 |x_i|^2
        mag2 = np.abs(xs) ** 2  # (D, N)
        sq = np.einsum("...i,di->d...", data**2, mag2)
        return np.power(sq, p / 2.0)
    v = np.einsum("...ij,dj->d...i", data, xs)
    return np.power(np.sum(np.abs(v) ** 2, axis=-1), p / 2.0)


def _pair_norms(A_form, A, B_form, B, t_slice):
    """||A_t B_y|| for all (t, y) pairs within one chunk of cubes.

    A, B carry shape (C, Q[, ...]) per the root_batch form tags; the result
    has shape (C, Qt, Qy).
    """
    if A_form == "scalar":
        return A[:, t_slice, np.newaxis] * B[:, np.newaxis, :]
    if A_form == "diagonal":
        prod = A[:, t_slice, np.newaxis, :] * B[:, np.newaxis, :, :]
        return np.max(np.abs(prod), axis=-1)
    prod = np.einsum("ctij,cyjk->ctyik", A[:, t_slice], B)
    return spectral_norms(prod)


def _sweep(spec, p, cubes, per_cube_value):
    """Run per_cube_value over every scale, return (best, center, scale)."""
    best = -np.inf
    best_center: tuple = ()
    best_scale = 0.0
    for r in cubes.scales:
        centers = cubes.centers_at(r)
        offs = cubes.quad_offsets(r)
        Q = offs.shape[0]
        chunk = max(1, _CHUNK_ELEMS // (Q * Q * spec.N * spec.N))
        for lo in range(0, centers.shape[0], chunk):
            sub = centers[lo : lo + chunk]
            nodes = sub[:, np.newaxis, :] + offs[np.newaxis, :, :]
            vals = per_cube_value(nodes)
            i = int(np.argmax(vals))
            if vals[i] > best:
                best = float(vals[i])
                best_center = tuple(sub[i])
                best_scale = r
    return best, best_center, best_scale


def ap_constant_small_p(spec: WeightSpec, p: float, cubes: CubeFamily) -> ApEstimate:
    """[W]_{A_p} for 0 < p <= 1: sup over cubes and y of avg_t ||W^{1/p}(t) W^{-1/p}(y)||^p.

    The essential supremum over y is realized as a max over the quadrature
    nodes of the same cube, hence a lower estimate of the true constant.
    """
    if not 0.0 < p <= 1.0:
        raise ExponentOutOfRange(f"small-p regime needs p in (0, 1], got {p}")

    def per_cube(nodes):
        A_form, A = root_batch(spec, nodes, 1.0 / p)
        B_form, B = root_batch(spec, nodes, -1.0 / p)
        Q = nodes.shape[1]
        if A_form == "scalar":
            # ||A_t B_y|| = a_t b_y factorizes
            return np.mean(A**p, axis=1) * np.max(B**p, axis=1)
        best = np.full(nodes.shape[0], -np.inf)
        tchunk = max(1, _CHUNK_ELEMS // (nodes.shape[0] * Q * spec.N * spec.N))
        for lo in range(0, Q, tchunk):
            norms = _pair_norms(A_form, A, B_form, B, slice(lo, lo + tchunk))
            part = np.sum(norms**p, axis=1)  # accumulate over t
            best = part if lo == 0 else best + part
        return np.max(best / Q, axis=-1)  # avg over t, then sup over y

    value, center, r = _sweep(spec, p, cubes, per_cube)
    return ApEstimate(value, p, "small_p", center, r, (cubes.q, cubes.j_min, cubes.j_max, cubes.X))


def ap_constant_large_p(spec: WeightSpec, p: float, cubes: CubeFamily) -> ApEstimate:
    """[W]_{A_p} for p > 1 in the double-average form with p' = p/(p-1)."""
    if not p > 1.0:
        raise ExponentOutOfRange(f"large-p regime needs p > 1, got {p}")
    pp = p / (p - 1.0)

    def per_cube(nodes):
        A_form, A = root_batch(spec, nodes, 1.0 / p)
        B_form, B = root_batch(spec, nodes, -1.0 / p)
        Q = nodes.shape[1]
        if A_form == "scalar":
            inner = np.mean(B**pp, axis=1)[:, np.newaxis] * A**pp
            return np.mean(inner ** (p / pp), axis=1)
        acc = None
        xchunk = max(1, _CHUNK_ELEMS // (nodes.shape[0] * Q * spec.N * spec.N))
        for lo in range(0, Q, xchunk):
            norms = _pair_norms(A_form, A, B_form, B, slice(lo, lo + xchunk))
            inner = np.mean(norms**pp, axis=2) ** (p / pp)  # avg over t
            s = np.sum(inner, axis=1)
            acc = s if acc is None else acc + s
        return acc / Q  # avg over x

    value, center, r = _sweep(spec, p, cubes, per_cube)
    return ApEstimate(value, p, "large_p", center, r, (cubes.q, cubes.j_min, cubes.j_max, cubes.X))


def ap_constant(spec: WeightSpec, p: float, cubes: CubeFamily) -> ApEstimate:
    if p > 1.0:
        return ap_constant_large_p(spec, p, cubes)
    return ap_constant_small_p(spec, p, cubes)


def _default_window(n: int) -> int:
    return {1: 16, 2: 4}.get(n, 2)


def doubling_report(
    spec: WeightSpec,
    p: float,
    cubes: CubeFamily,
    directions: np.ndarray | None = None,
    seed: int = 0,
    window: int | None = None,
) -> DoublingReport:
    """Doubling constant, exponent and cross-cube constant of the w_x family.

    C_dbl is the largest observed ratio of the w_x mass of Q(z, 2r) to that of
    Q(z, r) over the family and the direction set; beta = log2(C_dbl).  c_w is
    the smallest constant (realized as a max) making the unit-cube comparison
    mass(Q_k) <= c_w (1 + |k - l|)^beta mass(Q_l) hold on the lattice window.
    """
    if directions is None:
        directions = default_directions(spec.N, seed)
    directions = np.asarray(directions, dtype=complex)
    if directions.size == 0:
        raise ValueError("directions must be nonempty")

    C_dbl = -np.inf
    worst = directions[0]
    argmax_center: tuple = ()
    argmax_scale = 0.0
    for r in cubes.scales:
        centers = cubes.centers_at(r)
        offs1 = cubes.quad_offsets(r)
        offs2 = cubes.quad_offsets(2.0 * r)
        chunk = max(1, _CHUNK_ELEMS // (2 * offs1.shape[0] * directions.shape[0]))
        for lo in range(0, centers.shape[0], chunk):
            sub = centers[lo : lo + chunk]
            w1 = direction_weights(spec, p, sub[:, None, :] + offs1[None], directions)
            w2 = direction_weights(spec, p, sub[:, None, :] + offs2[None], directions)
            m1 = np.mean(w1, axis=-1)  # (D, C); mass = mean * r^n
            m2 = np.mean(w2, axis=-1)
            if np.any(m1 == 0.0):
                raise ZeroMass("cube integral underflowed to zero")
            ratios = (2.0**spec.n) * m2 / m1
            d, c = np.unravel_index(int(np.argmax(ratios)), ratios.shape)
            if ratios[d, c] > C_dbl:
                C_dbl = float(ratios[d, c])
                worst = directions[d]
                argmax_center = tuple(sub[c])
                argmax_scale = r
    beta = float(np.log2(C_dbl))

    # cross-cube constant on unit cubes Q(k, 1), k in [-window, window]^n
    win = _default_window(spec.n) if window is None else window
    ks = np.array(list(itertools.product(range(-win, win + 1), repeat=spec.n)), dtype=float)
    offs = cubes.quad_offsets(1.0)
    masses = np.mean(
        direction_weights(spec, p, ks[:, None, :] + offs[None], directions), axis=-1
    )  # (D, K)
    if np.any(masses == 0.0):
        raise ZeroMass("unit-cube integral underflowed to zero")
    dist = np.linalg.norm(ks[:, None, :] - ks[None, :, :], axis=-1)
    denom = (1.0 + dist) ** beta
    c_w = float(np.max(masses[:, :, None] / (denom[None] * masses[:, None, :])))

    return DoublingReport(
        C_dbl=C_dbl,
        beta=beta,
        c_w=max(c_w, 1.0),
        directions_tested=directions.shape[0],
        worst_direction=worst,
        argmax_center=argmax_center,
        argmax_scale=argmax_scale,
    )
