"""Non-linear smoothing on reordered pixel sets.

Each iteration diffuses every pixel toward the members of its forward and
reverse similarity sets, weighting each exchange by a tonal similarity g
(evaluated on a collaboratively pre-smoothed image) times a patch
similarity h (evaluated on the rescaled patch distance). The step size is
normalized so the result stays inside the previous iterate's value range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .image import as_image, gaussian_smooth
from .reorder import ReorderedSets, build_sets, disc_stencil

TONAL_DECAY = 3.31488  # calibrates g so g(lam) stays close to 1 below the contrast


@dataclass(frozen=True)
class NfprParams:
    """All scalar knobs of the denoiser.

    sigma scales the patch-similarity weight h (units of rescaled distance,
    [0, 255]); lam is the tonal contrast for g (intensity units); k_max the
    iteration count. The remaining fields default to the fixed protocol:
    search and patch disc radii 10, pre-smoothing sigma_g 2.5, step tau 0.95,
    set size 35, and reordering recomputed for the first two iterations.
    """

    sigma: float
    lam: float
    k_max: int
    rho_search: int = 10
    rho_sim: int = 10
    sigma_g: float = 2.5
    tau: float = 0.95
    n_set: int = 35
    reorder_iters: int = 2

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not self.lam > 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if self.k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {self.k_max}")
        if not 0 < self.tau <= 1:
            raise ValueError(f"tau must be in (0, 1], got {self.tau}")
        if self.n_set < 1:
            raise ValueError(f"n_set must be >= 1, got {self.n_set}")
        if self.rho_search < 0 or self.rho_sim < 0:
            raise ValueError("disc radii must be >= 0")
        if self.sigma_g < 0:
            raise ValueError(f"sigma_g must be >= 0, got {self.sigma_g}")
        if self.reorder_iters < 1:
            raise ValueError(f"reorder_iters must be >= 1, got {self.reorder_iters}")


def g_weight(s, lam: float):
    """Tonal similarity weight: 1 - exp(-3.31488 / (s/lam)^8).

    Even in s, equal to 1 at s = 0 (the analytic limit), and decaying
    steeply once |s| exceeds lam. Accepts scalars or arrays.
    """
    if not lam > 0:
        raise ValueError(f"lam must be > 0, got {lam}")
    s = np.asarray(s, dtype=np.float64)
    x = s / lam
    x2 = x * x
    x8 = (x2 * x2) ** 2
    with np.errstate(divide="ignore"):
        out = -np.expm1(-TONAL_DECAY / x8)
    out = np.where(np.abs(s) < 1e-12 * lam, 1.0, out)
    return out if out.ndim else float(out)


def h_weight(s, sigma: float):
    """Patch similarity weight: exp(-s^2 / (2 sigma^2)) on rescaled distances."""
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    s = np.asarray(s, dtype=np.float64)
    out = np.exp(-(s * s) / (2.0 * sigma * sigma))
    return out if out.ndim else float(out)


def presmooth(u: np.ndarray, sets: ReorderedSets, params: NfprParams) -> np.ndarray:
    """Collaborative non-local means over the forward and reverse sets.

    Each pixel becomes the h-weighted average of its own set members and of
    every pixel that selected it; the result is a convex combination, so the
    output range stays inside the input range.
    """
    u = as_image(u)
    npix = u.size
    owners, targets, resc = sets.edges()
    hv = h_weight(resc, params.sigma)
    uf = u.ravel()
    den = (np.bincount(owners, hv, minlength=npix)
           + np.bincount(targets, hv, minlength=npix))
    num = (np.bincount(owners, hv * uf[targets], minlength=npix)
           + np.bincount(targets, hv * uf[owners], minlength=npix))
    return (num / den).reshape(u.shape)


def evolve_step(u: np.ndarray, u_sigma: np.ndarray, sets: ReorderedSets,
                params: NfprParams) -> np.ndarray:
    """One explicit update of the non-linear smoothing.

    u_sigma must be presmooth(u, sets, params) from the same iteration: the
    tonal weight g reads differences of the pre-smoothed values, while the
    actual exchange moves raw values. The step is normalised by the combined
    set size M_i: since g <= 1 and h <= 1, the total exchange coefficient
    tau/M_i * sum(g*h) never exceeds tau, which keeps every update inside
    [min u, max u] for tau <= 1.
    """
    u = as_image(u)
    u_sigma = as_image(u_sigma)
    npix = u.size
    owners, targets, resc = sets.edges()
    hv = h_weight(resc, params.sigma)
    uf = u.ravel()
    us = u_sigma.ravel()

    gv = g_weight(us[targets] - us[owners], params.lam)  # even: same both ways
    wv = gv * hv
    contrib = wv * (uf[targets] - uf[owners])
    flux = (np.bincount(owners, contrib, minlength=npix)
            - np.bincount(targets, contrib, minlength=npix))
    scale = params.tau / sets.combined_sizes()

    # numeric guard for the range bound: total exchange coefficient <= 1
    coeff = scale * (np.bincount(owners, wv, minlength=npix)
                     + np.bincount(targets, wv, minlength=npix))
    assert coeff.max() <= 1.0 + 1e-12, "exchange coefficient exceeds 1"

    return (uf + scale * flux).reshape(u.shape)


def denoise(noisy: np.ndarray, params: NfprParams, threads: int = 1,
            callback: Callable[[int, np.ndarray], None] | None = None) -> np.ndarray:
    """Run the full pipeline and return the (unclamped) denoised image.

    The smoothing starts from the noisy image itself; the first reordering
    uses its Gaussian pre-smoothed version as guide, and iterations
    1 .. reorder_iters-1 re-reorder on the current evolving image. The
    optional callback receives (k, u) after every iteration.
    """
    noisy = as_image(noisy)
    search = disc_stencil(params.rho_search)
    sim = disc_stencil(params.rho_sim)
    u = noisy.copy()
    sets = build_sets(gaussian_smooth(noisy, params.sigma_g), search, sim,
                      params.n_set, threads)
    for k in range(params.k_max):
        if 1 <= k < params.reorder_iters:
            sets = build_sets(u, search, sim, params.n_set, threads)
        u_sigma = presmooth(u, sets, params)
        u = evolve_step(u, u_sigma, sets, params)
        if callback is not None:
            callback(k, u)
    return u
