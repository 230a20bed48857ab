"""Hermitian matrix algebra and analytic matrix-weight generators.

A matrix weight is a map W: R^n -> C^{NxN} with W(x) Hermitian positive
definite away from its singular points.  Weights are described analytically
by :class:`WeightSpec` so that fractional powers W^{+-1/p} can be evaluated
in closed form on large point batches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    NonFinite,
    NonHermitian,
    NonPositiveScale,
    NotPositiveDefinite,
    SingularPoint,
)

HERMITIAN_TOL = 1e-12
PD_EPS_REL = 1e-12

KINDS = ("identity", "scalar-power", "diagonal-power", "conjugated", "scaled")


def check_hermitian(A: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    """Raise NonHermitian unless A equals its conjugate transpose within tol."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonHermitian(f"expected a square matrix, got shape {A.shape}")
    scale = max(np.abs(A).max(), 1.0)
    if np.abs(A - A.conj().T).max() > tol * scale:
        raise NonHermitian("matrix is not Hermitian within tolerance")


def spectral_norm(A: np.ndarray) -> float:
    """Largest singular value of A (any complex matrix)."""
    A = np.asarray(A, dtype=complex)
    if not np.all(np.isfinite(A.view(float))):
        raise NonFinite("matrix has NaN or Inf entries")
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def _spectral_norms_2x2(A: np.ndarray) -> np.ndarray:
    """Largest singular values of a batch of 2x2 matrices, closed form.

    sigma_max^2 = (|A|_F^2 + sqrt(|A|_F^4 - 4 |det A|^2)) / 2
    """
    fro2 = np.sum(np.abs(A) ** 2, axis=(-2, -1))
    det = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    disc = np.maximum(fro2**2 - 4.0 * np.abs(det) ** 2, 0.0)
    return np.sqrt(0.5 * (fro2 + np.sqrt(disc)))


def spectral_norms(A: np.ndarray) -> np.ndarray:
    """Largest singular values over the leading batch axes of (..., N, N)."""
    A = np.asarray(A, dtype=complex)
    if A.shape[-1] == 1:
        return np.abs(A[..., 0, 0])
    if A.shape[-1] == 2:
        return _spectral_norms_2x2(A)
    return np.linalg.svd(A, compute_uv=False)[..., 0]


def hermitian_power(A: np.ndarray, alpha: float, eps_rel: float = PD_EPS_REL) -> np.ndarray:
    """A^alpha for Hermitian positive definite A, via eigendecomposition.

    The guard on the smallest eigenvalue is relative to the spectral norm so
    the check is invariant under rescaling of A.
    """
    A = np.asarray(A, dtype=complex)
    check_hermitian(A)
    lam, U = np.linalg.eigh(A)
    lam_max = float(lam[-1])
    if lam_max <= 0.0 or float(lam[0]) <= eps_rel * lam_max:
        raise NotPositiveDefinite(
            f"eigenvalues in [{lam[0]:.3e}, {lam_max:.3e}] fail the PD guard"
        )
    B = (U * np.power(lam, alpha)) @ U.conj().T
    # symmetrize to kill roundoff skew
    return 0.5 * (B + B.conj().T)


@dataclass(frozen=True)
class WeightSpec:
    """Analytic descriptor of a matrix weight.

    kind is one of
      identity              W(x) = I_N
      scalar-power          W(x) = |x|^alpha I_N
      diagonal-power        W(x) = diag(|x|^alpha_1, ..., |x|^alpha_N)
      conjugated            W(x) = U(x) diag(|x|^alpha_i) U(x)^*, with U(x) a
                            planar rotation in coordinates (1,2) by |x| mod 2pi
      scaled                W(x) = W_inner(factor * x)

    Power exponents should stay in (-n, n*max(p-1, 0)] or (-n, 0] for the
    intended A_p regime; this is documented, not enforced here.
    """

    n: int
    N: int
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.n < 1 or self.N < 1:
            raise ValueError("dimensions must be >= 1")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identity(n: int, N: int) -> "WeightSpec":
        return WeightSpec(n, N, "identity")

    @staticmethod
    def scalar_power(n: int, N: int, alpha: float) -> "WeightSpec":
        return WeightSpec(n, N, "scalar-power", {"alpha": float(alpha)})

    @staticmethod
    def diagonal_power(n: int, alphas) -> "WeightSpec":
        alphas = tuple(float(a) for a in alphas)
        return WeightSpec(n, len(alphas), "diagonal-power", {"alphas": alphas})

    @staticmethod
    def conjugated(n: int, alphas) -> "WeightSpec":
        alphas = tuple(float(a) for a in alphas)
        if len(alphas) < 2:
            raise ValueError("conjugated weights need N >= 2")
        return WeightSpec(n, len(alphas), "conjugated", {"alphas": alphas})

    # -- structure ---------------------------------------------------------

    @property
    def is_singular_at_origin(self) -> bool:
        if self.kind == "identity":
            return False
        if self.kind == "scalar-power":
            return self.params["alpha"] != 0.0
        if self.kind in ("diagonal-power", "conjugated"):
            return any(a != 0.0 for a in self.params["alphas"])
        return self.params["inner"].is_singular_at_origin

    def exponents(self) -> tuple[float, ...]:
        if self.kind == "identity":
            return (0.0,) * self.N
        if self.kind == "scalar-power":
            return (self.params["alpha"],) * self.N
        if self.kind in ("diagonal-power", "conjugated"):
            return self.params["alphas"]
        return self.params["inner"].exponents()

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        obj: dict[str, Any] = {"n": self.n, "N": self.N, "kind": self.kind}
        for key, val in self.params.items():
            if key == "inner":
                obj["inner"] = val.to_json()
            elif isinstance(val, tuple):
                obj[key] = list(val)
            else:
                obj[key] = val
        return obj

    @staticmethod
    def from_json(obj: dict) -> "WeightSpec":
        params = {k: v for k, v in obj.items() if k not in ("n", "N", "kind")}
        if "inner" in params:
            params["inner"] = WeightSpec.from_json(params["inner"])
        if "alphas" in params:
            params["alphas"] = tuple(float(a) for a in params["alphas"])
        return WeightSpec(int(obj["n"]), int(obj["N"]), str(obj["kind"]), params)


def dilate_weight(spec: WeightSpec, R: float) -> WeightSpec:
    """Spec for x -> W(R x).  Nested dilations fold into a single factor."""
    if not R > 0:
        raise NonPositiveScale(f"dilation factor must be positive, got {R}")
    if spec.kind == "scaled":
        return WeightSpec(
            spec.n,
            spec.N,
            "scaled",
            {"factor": float(R) * spec.params["factor"], "inner": spec.params["inner"]},
        )
    return WeightSpec(spec.n, spec.N, "scaled", {"factor": float(R), "inner": spec})


# -- batched evaluation ----------------------------------------------------


def _radii(spec: WeightSpec, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 0 or X.shape[-1] != spec.n:
        if spec.n == 1 and (X.ndim == 0 or X.shape[-1] != 1):
            X = X[..., np.newaxis]
        else:
            raise ValueError(f"points must have trailing dimension {spec.n}")
    return np.sqrt(np.sum(X * X, axis=-1))


def root_batch(spec: WeightSpec, X: np.ndarray, sigma: float):
    """Evaluate W(x)^sigma on a batch of points, in closed form.

    X has shape (..., n).  Returns (form, data) where form tags the matrix
    structure so callers can pick cheap norm paths:

      "scalar"   data shape (...,)        W^sigma = data * I
      "diagonal" data shape (..., N)      W^sigma = diag(data)
      "full"     data shape (..., N, N)
    """
    if spec.kind == "scaled":
        X = np.asarray(X, dtype=float) * spec.params["factor"]
        return root_batch(spec.params["inner"], X, sigma)

    if spec.kind == "identity":
        r = _radii(spec, X)
        return "scalar", np.ones_like(r)

    r = _radii(spec, X)
    if spec.is_singular_at_origin and np.any(r == 0.0):
        raise SingularPoint("weight evaluated at x = 0")

    if spec.kind == "scalar-power":
        return "scalar", np.power(r, spec.params["alpha"] * sigma)

    alphas = np.asarray(spec.params["alphas"])
    diag = np.power(r[..., np.newaxis], alphas * sigma)
    if spec.kind == "diagonal-power":
        return "diagonal", diag

    # conjugated: planar rotation by theta(x) = |x| mod 2pi in coords (1, 2)
    theta = np.mod(r, 2.0 * np.pi)
    c, s = np.cos(theta), np.sin(theta)
    N = spec.N
    out = np.zeros(r.shape + (N, N), dtype=complex)
    for i in range(2, N):
        out[..., i, i] = diag[..., i]
    d0, d1 = diag[..., 0], diag[..., 1]
    out[..., 0, 0] = c * c * d0 + s * s * d1
    out[..., 1, 1] = s * s * d0 + c * c * d1
    out[..., 0, 1] = c * s * (d0 - d1)
    out[..., 1, 0] = out[..., 0, 1]
    return "full", out


def as_matrices(form: str, data: np.ndarray, N: int) -> np.ndarray:
    """Expand a root_batch result to explicit (..., N, N) matrices."""
    if form == "full":
        return data
    if form == "diagonal":
        out = np.zeros(data.shape[:-1] + (N, N), dtype=complex)
        idx = np.arange(N)
        out[..., idx, idx] = data
        return out
    out = np.zeros(data.shape + (N, N), dtype=complex)
    idx = np.arange(N)
    out[..., idx, idx] = data[..., np.newaxis]
    return out


def evaluate_weight(spec: WeightSpec, x) -> np.ndarray:
    """W(x) as an explicit N x N Hermitian matrix."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    form, data = root_batch(spec, x, 1.0)
    return as_matrices(form, data, spec.N)


def weight_root_at(spec: WeightSpec, x, sigma: float) -> np.ndarray:
    """W(x)^sigma as an explicit matrix, using the analytic closed form."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    form, data = root_batch(spec, x, sigma)
    return as_matrices(form, data, spec.N)
