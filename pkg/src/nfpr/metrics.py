"""Quantitative evaluation: mean squared error and Fourier ring correlation.

FRC convention
--------------
Rings are uniform in radial frequency up to Nyquist (0.5 cycles/pixel),
half-open with the upper edge inclusive: ring l collects spectrum bins
whose radius r (in cycles/pixel, r = |k|/size on the centered integer
frequency lattice) satisfies

    l * (0.5/levels) < r <= (l+1) * (0.5/levels).

The DC bin (r = 0) belongs to no ring, and bins beyond Nyquist (the
spectrum corners) are discarded. Per ring, with spectra F and G,

    FRC(l) = Re( sum F * conj(G) ) / sqrt( sum |F|^2 * sum |G|^2 ),

using the real part of the cross term so sign information survives.
Empty rings and rings with zero energy in either spectrum report a
correlation of 0 and are flagged as degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import as_image


def mse(a: np.ndarray, b: np.ndarray) -> float:
    """Mean squared error between two same-sized images, on unclamped values."""
    a = as_image(a)
    b = as_image(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.mean(d * d))


def dft2(img: np.ndarray) -> np.ndarray:
    """Unnormalized forward 2D DFT; the DC bin equals the sum of all pixels."""
    return np.fft.fft2(as_image(img))


@dataclass(frozen=True)
class FrcCurve:
    """Per-ring correlation of two spectra.

    freq holds the ring centers (l + 0.5) * (0.5/levels), strictly
    increasing; n_bins the number of spectrum bins per ring; degenerate
    flags rings reported as 0 because they were empty or carried no energy.
    """

    levels: int
    freq: np.ndarray
    corr: np.ndarray
    n_bins: np.ndarray
    degenerate: np.ndarray

    def __len__(self) -> int:
        return self.levels


def _ring_indices(n: int, levels: int) -> np.ndarray:
    """Ring index per spectrum bin; -1 for DC, `levels` for beyond-Nyquist."""
    k = ((np.arange(n) + n // 2) % n) - n // 2  # signed integer frequencies
    r2 = (k[:, None].astype(np.float64) ** 2 + k[None, :].astype(np.float64) ** 2)
    edges2 = (np.arange(levels + 1) * (0.5 / levels) * n) ** 2
    # searchsorted('left') finds i with edges2[i-1] < r2 <= edges2[i]
    return np.searchsorted(edges2, r2.ravel(), side="left") - 1


def frc(a: np.ndarray, b: np.ndarray, levels: int = 64) -> FrcCurve:
    """Fourier ring correlation between two equal, square images.

    Parameters
    ----------
    a, b : ndarray
        Square images of identical shape (two views of the same scene).
    levels : int
        Number of frequency rings between DC (exclusive) and Nyquist.

    Returns
    -------
    FrcCurve with exactly `levels` rings.
    """
    a = as_image(a)
    b = as_image(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"FRC requires square images, got {a.shape}")
    if levels < 1:
        raise ValueError(f"levels must be >= 1, got {levels}")

    n = a.shape[0]
    fa = np.fft.fft2(a).ravel()
    fb = np.fft.fft2(b).ravel()
    ring = _ring_indices(n, levels)
    keep = (ring >= 0) & (ring < levels)
    ring = ring[keep]
    fa = fa[keep]
    fb = fb[keep]

    cross = np.bincount(ring, weights=(fa * np.conj(fb)).real, minlength=levels)
    ea = np.bincount(ring, weights=np.abs(fa) ** 2, minlength=levels)
    eb = np.bincount(ring, weights=np.abs(fb) ** 2, minlength=levels)
    n_bins = np.bincount(ring, minlength=levels).astype(np.int64)

    energy = ea * eb
    degenerate = (n_bins == 0) | (energy <= 0.0)
    corr = np.zeros(levels, dtype=np.float64)
    ok = ~degenerate
    corr[ok] = cross[ok] / np.sqrt(energy[ok])

    freq = (np.arange(levels) + 0.5) * (0.5 / levels)
    return FrcCurve(levels=levels, freq=freq, corr=corr,
                    n_bins=n_bins, degenerate=degenerate)


def write_frc_csv(curve: FrcCurve, path) -> None:
    """Write a curve as CSV: ring_index, freq_center, correlation, n_bins.

    Comment lines document the binning convention and the exact ring edges
    so the plot can be reproduced without reading code.
    """
    edges = np.arange(curve.levels + 1) * (0.5 / curve.levels)
    lines = [
        "# fourier ring correlation",
        "# rings uniform in radial frequency, Nyquist 0.5 cycles/pixel;"
        " ring l covers (edge[l], edge[l+1]], DC excluded",
        "# degenerate rings (empty or zero-energy) report correlation 0",
        "# edges: " + ",".join(f"{e:.10g}" for e in edges),
        "ring_index,freq_center,correlation,n_bins",
    ]
    for i in range(curve.levels):
        lines.append(f"{i},{curve.freq[i]:.10g},{curve.corr[i]:.17g},{int(curve.n_bins[i])}")
    with open(path, "w", encoding="ascii") as f:
        f.write("\n".join(lines) + "\n")
