"""Explicit boundedness constant chain for bandlimited multipliers.

The chain assembles C = (L * c_w * c_M * K^p * [W]_{A_p})^{1/p} from

    L    lattice sum over Z^n of (1 + |k|)^{-(M p - beta)},
    c_w  cross-cube comparison constant of the scalar reductions,
    c_M  shift constant sup_{u in Q_0} (1 + |u|)^{M p},
    K    kernel decay constant of the multiplier symbol,

valid whenever M > (n + beta) / p for 0 < p <= 1, and measures the empirical
operator norm of phi(D) over seeded bandlimited corpora.  beta and c_w come
from the doubling sweep and are one-sided (lower) estimates; a warning flag
records this.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import numpy as np

from .errors import BandViolation, Divergent, HypothesisViolated, ZeroNorm
from .muckenhoupt import (
    ApEstimate,
    CubeFamily,
    DoublingReport,
    ap_constant_small_p,
    doubling_report,
)
from .spectral import (
    MultiplierSymbol,
    SampledVectorField,
    TorusGrid,
    apply_multiplier,
    bandlimit_check,
    lp_w_norm,
    make_symbol,
    synthesize_bandlimited,
)
from .weights import WeightSpec

_PROFILE_CYCLE = ("flat", "decaying", "annulus")


@dataclass
class BoundednessReport:
    p: float
    n: int
    N: int
    R: float
    K: float
    M: float
    beta: float
    c_w: float
    c_M: float
    L: float
    ap: float
    C_theory: float
    ratio_max: float | None = None
    corpus_size: int = 0
    R_sweep: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


def lattice_sum_L(n: int, s: float, tol: float = 1e-8) -> float:
    """sum over Z^n of (1 + |k|)^{-s}, requiring s > n for convergence.

    n = 1 reduces to 2 zeta(s) - 1 exactly.  For n >= 2 the sum is truncated
    at a radius whose integral tail bound is <= tol (radius capped at desk
    scale; the cap is generous for s - n >= 1).
    """
    if not s > n:
        raise Divergent(f"lattice sum needs exponent s > n, got s={s}, n={n}")
    if n == 1:
        return float(2.0 * mpmath.zeta(s) - 1.0)

    # truncation radius: tail <= surf_n * int_{rho - sqrt(n)/2}^inf (1 + r)^{-s} r^{n-1} dr
    surf = {2: 2.0 * np.pi, 3: 4.0 * np.pi}.get(n, 2.0 * np.pi ** (n / 2.0))

    def tail_bound(rho: float) -> float:
        a = max(rho - np.sqrt(n) / 2.0, 1.0)
        # (1+r)^{-s} r^{n-1} <= (1+r)^{n-1-s}; integrate the closed form
        return surf * (1.0 + a) ** (n - s) / (s - n)

    rho = 20.0
    while tail_bound(rho) > tol and rho < 3.0e4:
        rho *= 1.5
    return _lattice_partial_sum(n, s, rho)


def _lattice_partial_sum(n: int, s: float, rho: float) -> float:
    """Direct sum of (1 + |k|)^{-s} over |k| <= rho, vectorized on the last axis."""
    r = int(np.floor(rho))
    if n == 2:
        # octant symmetry: (a, b) with a >= 1, 0 <= b <= a carries weight
        # 8, except the axis (b = 0) and diagonal (b = a) orbits carry 4
        total = 1.0
        for a in range(1, r + 1):
            bmax = min(a, int(np.floor(np.sqrt(rho**2 - a * a))) if a <= rho else -1)
            if bmax < 0:
                continue
            b = np.arange(0, bmax + 1, dtype=float)
            vals = (1.0 + np.hypot(float(a), b)) ** (-s)
            weights = np.full(b.size, 8.0)
            weights[0] = 4.0
            if bmax == a:
                weights[-1] = 4.0
            total += float(np.dot(weights, vals))
        return total
    if n == 3:
        ax = np.arange(-r, r + 1, dtype=float)
        total = 0.0
        for k1 in ax:
            for k2 in ax:
                rem = rho**2 - k1**2 - k2**2
                if rem < 0:
                    continue
                k3 = ax[np.abs(ax) <= np.sqrt(rem)]
                total += float(np.sum((1.0 + np.sqrt(k1**2 + k2**2 + k3**2)) ** (-s)))
        return total
    raise NotImplementedError("lattice sum implemented for n <= 3")


def peetre_constant(n: int, M: float, p: float) -> float:
    """sup_{u in Q_0} (1 + |u|)^{M p} = (1 + sqrt(n)/2)^{M p}."""
    return float((1.0 + np.sqrt(n) / 2.0) ** (M * p))


def theoretical_constant(
    spec: WeightSpec,
    sym: MultiplierSymbol,
    p: float,
    cubes: CubeFamily,
    dbl: DoublingReport | None = None,
    ap: ApEstimate | None = None,
    seed: int = 0,
    lattice_tol: float = 1e-8,
) -> BoundednessReport:
    """Assemble C_theory = (L c_w c_M K^p [W]_{A_p})^{1/p} with all factors recorded."""
    if not 0.0 < p <= 1.0:
        raise ValueError("the constant chain is stated for 0 < p <= 1")
    if sym.K is None or sym.M is None:
        raise ValueError("symbol needs a fitted decay constant; call decay_constant first")
    if dbl is None:
        dbl = doubling_report(spec, p, cubes, seed=seed)
    if ap is None:
        ap = ap_constant_small_p(spec, p, cubes)
    n = spec.n
    if not sym.M > (n + dbl.beta) / p:
        raise HypothesisViolated(
            f"need decay exponent M > (n + beta)/p = {(n + dbl.beta) / p:.4f}, got M = {sym.M}"
        )
    L = lattice_sum_L(n, sym.M * p - dbl.beta, lattice_tol)
    c_M = peetre_constant(n, sym.M, p)
    C = (L * dbl.c_w * c_M * sym.K**p * ap.value) ** (1.0 / p)
    return BoundednessReport(
        p=p,
        n=n,
        N=spec.N,
        R=sym.R,
        K=sym.K,
        M=sym.M,
        beta=dbl.beta,
        c_w=dbl.c_w,
        c_M=c_M,
        L=L,
        ap=ap.value,
        C_theory=float(C),
        warnings=["beta and c_w are sampled lower estimates; the hypothesis check is one-sided"],
    )


def make_corpus(
    grid: TorusGrid, R: float, N: int, count: int, seed: int
) -> list[SampledVectorField]:
    """count seeded bandlimited fields cycling through the spectral profiles."""
    return [
        synthesize_bandlimited(grid, R, N, seed + i, profile=_PROFILE_CYCLE[i % 3])
        for i in range(count)
    ]


def empirical_ratio(
    spec: WeightSpec,
    sym: MultiplierSymbol,
    p: float,
    corpus: list[SampledVectorField],
    band_tol: float = 1e-8,
) -> float:
    """max over the corpus of ||phi(D)f||_{L^p(W)} / ||f||_{L^p(W)}."""
    best = 0.0
    for f in corpus:
        ok, _ = bandlimit_check(f, sym.R, band_tol)
        if not ok:
            raise BandViolation("corpus member is not bandlimited to the symbol radius")
        denom = lp_w_norm(f, spec, p)
        if denom == 0.0:
            raise ZeroNorm("corpus member has vanishing weighted norm")
        best = max(best, lp_w_norm(apply_multiplier(sym, f), spec, p) / denom)
    return best


def large_p_ratio(
    spec: WeightSpec,
    sym: MultiplierSymbol,
    p: float,
    corpus: list[SampledVectorField],
) -> float:
    """Empirical ratio for p >= 1; no band restriction, no theoretical chain.

    The constant for this regime comes from the end-point multiplier result
    cited for 1 <= p < infinity and is not assembled here.
    """
    if p < 1.0:
        raise ValueError("this regime needs p >= 1")
    best = 0.0
    for f in corpus:
        denom = lp_w_norm(f, spec, p)
        if denom == 0.0:
            raise ZeroNorm("corpus member has vanishing weighted norm")
        best = max(best, lp_w_norm(apply_multiplier(sym, f), spec, p) / denom)
    return best


def rescale_experiment(
    spec: WeightSpec,
    base_form,
    base_grid: TorusGrid,
    p: float,
    R_list: list[float],
    corpus_size: int = 32,
    seed: int = 0,
) -> list[tuple[float, float]]:
    """Ratios of phi_R(xi) = phi_base(xi / R) over matched corpora in E_R.

    Each R uses the grid with period T / R and the same node count, i.e. the
    base nodes mapped by x -> x / R.  For power-of-two R every rescaled array
    is an exact scalar multiple of its base counterpart, so the W = identity
    ratios are R-independent to machine precision.
    """
    out = []
    for R in R_list:
        T_R = base_grid.T / R
        if abs(T_R - round(T_R)) > 1e-12 or round(T_R) % 2 != 0:
            raise ValueError(f"period {base_grid.T}/{R} is not an even integer")
        grid = TorusGrid(base_grid.n, int(round(T_R)), base_grid.m, base_grid.offset)

        def form_R(xi, R=R):
            return base_form(np.asarray(xi) / R)

        sym = make_symbol(grid, R, form_R)
        corpus = make_corpus(grid, R, spec.N, corpus_size, seed)
        out.append((R, empirical_ratio(spec, sym, p, corpus)))
    return out
