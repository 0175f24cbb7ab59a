"""Fast patch reordering: per-pixel nearest-patch sets over a disc search region.

For every pixel i this builds the set of the n candidates inside a disc
around i whose surrounding patches (also disc-shaped) are closest in the
L2 sense, plus the transposed "reverse" sets of every pixel that selected
i. Distances are affinely rescaled to [0, 255] within each forward set.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .image import as_image, mirror_pad, reflect_indices

_SELECT_CHUNK = 16384  # pixels sorted per slab; bounds peak index memory


@dataclass(frozen=True)
class DiscStencil:
    """Integer offsets (dy, dx) with dy^2 + dx^2 <= radius^2, row-major order."""

    radius: int
    offsets: np.ndarray

    def __len__(self) -> int:
        return len(self.offsets)


def disc_stencil(radius: int) -> DiscStencil:
    """Build the disc stencil of the given radius (0 gives just the center)."""
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    r2 = radius * radius
    rng = np.arange(-radius, radius + 1, dtype=np.int64)
    dy, dx = np.meshgrid(rng, rng, indexing="ij")
    keep = (dy * dy + dx * dx) <= r2
    offsets = np.stack([dy[keep], dx[keep]], axis=1)  # already (dy, dx) sorted
    return DiscStencil(radius=radius, offsets=offsets)


@dataclass
class ReorderedSets:
    """Forward and reverse patch-similarity sets for every pixel.

    forward arrays are (npix, n), rank-ordered by ascending (raw distance,
    row-major neighbor index); rows with fewer than n candidates (possible
    only when the clipped search disc is smaller than n) are padded with
    neighbor -1 and NaN distances, with `counts` giving the real size.
    Reverse sets are stored CSR-style, grouped by target pixel: pixel i's
    owners are rev_owners[rev_offsets[i]:rev_offsets[i+1]].
    """

    shape: tuple[int, int]
    n: int
    neighbors: np.ndarray
    raw: np.ndarray
    rescaled: np.ndarray
    counts: np.ndarray
    rev_offsets: np.ndarray
    rev_owners: np.ndarray
    rev_raw: np.ndarray
    rev_rescaled: np.ndarray
    _edges: tuple | None = field(default=None, repr=False, compare=False)

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flat forward edges as (owners, targets, rescaled distances)."""
        if self._edges is None:
            npix = self.shape[0] * self.shape[1]
            valid = np.arange(self.n)[None, :] < self.counts[:, None]
            owners = np.repeat(np.arange(npix, dtype=np.int64), self.counts)
            self._edges = (owners, self.neighbors[valid], self.rescaled[valid])
        return self._edges

    def combined_sizes(self) -> np.ndarray:
        """Per-pixel |forward set| + |reverse set| (reverse includes every owner)."""
        return self.counts + np.diff(self.rev_offsets)

    def forward_of(self, i: int) -> list[tuple[int, float, float]]:
        k = int(self.counts[i])
        return [
            (int(self.neighbors[i, r]), float(self.raw[i, r]), float(self.rescaled[i, r]))
            for r in range(k)
        ]

    def reverse_of(self, i: int) -> list[tuple[int, float, float]]:
        lo, hi = int(self.rev_offsets[i]), int(self.rev_offsets[i + 1])
        return [
            (int(self.rev_owners[e]), float(self.rev_raw[e]), float(self.rev_rescaled[e]))
            for e in range(lo, hi)
        ]


def patch_distance(img: np.ndarray, i: int, j: int, sim: DiscStencil) -> float:
    """L2 norm between the disc patches centered at row-major pixels i and j.

    Out-of-bounds patch samples come from mirror extension. Symmetric in
    (i, j), zero for i == j.
    """
    img = as_image(img)
    h, w = img.shape
    npix = h * w
    if not (0 <= i < npix and 0 <= j < npix):
        raise ValueError(f"pixel index out of range for {h}x{w} image")
    dy, dx = sim.offsets[:, 0], sim.offsets[:, 1]
    iy, ix = divmod(int(i), w)
    jy, jx = divmod(int(j), w)
    pa = img[reflect_indices(iy + dy, h), reflect_indices(ix + dx, w)]
    pb = img[reflect_indices(jy + dy, h), reflect_indices(jx + dx, w)]
    diff = pa - pb
    return float(np.sqrt(np.dot(diff, diff)))


def rescale_distances(distances) -> np.ndarray:
    """Affine min-max rescaling of a distance set to [0, 255].

    A degenerate set (all distances equal) maps to all zeros, the
    maximal-similarity value.
    """
    d = np.asarray(distances, dtype=np.float64)
    if d.size == 0:
        raise ValueError("empty distance set")
    lo, hi = d.min(), d.max()
    if hi == lo:
        return np.zeros_like(d)
    # ratio before scaling keeps the top of the range at exactly 255
    return (d - lo) / (hi - lo) * 255.0


def build_sets(guide: np.ndarray, search: DiscStencil, sim: DiscStencil,
               n: int, threads: int = 1) -> ReorderedSets:
    """Build every pixel's forward set of the n nearest patches and the reverse sets.

    Candidates are the real pixels inside the search disc (clipped at the
    image border); patch sampling mirrors across the border. Ties in patch
    distance break by ascending row-major candidate index. Distances are
    computed per displacement vector over the whole image (squared-difference
    plane plus running row sums over the patch disc's row spans), which
    matches the per-pair definition to within accumulation roundoff.
    """
    guide = as_image(guide)
    if n < 1:
        raise ValueError(f"set size must be >= 1, got {n}")
    h, w = guide.shape
    npix = h * w
    offsets = search.offsets
    n_off = len(offsets)

    sq = _displacement_fields(guide, offsets, sim.radius, threads)
    flat = sq.reshape(n_off, npix)
    counts = np.minimum(np.isfinite(flat).sum(axis=0), n).astype(np.int64)

    off_lin = offsets[:, 0] * w + offsets[:, 1]
    take = min(n, n_off)  # the whole disc may hold fewer candidates than n
    neighbors = np.full((npix, n), -1, dtype=np.int64)
    raw = np.full((npix, n), np.nan, dtype=np.float64)
    for c0 in range(0, npix, _SELECT_CHUNK):
        c1 = min(c0 + _SELECT_CHUNK, npix)
        d2 = np.ascontiguousarray(flat[:, c0:c1].T)  # (chunk, n_off)
        jidx = np.arange(c0, c1, dtype=np.int64)[:, None] + off_lin[None, :]
        order = np.lexsort((jidx, d2), axis=1)[:, :take]
        neighbors[c0:c1, :take] = np.take_along_axis(jidx, order, axis=1)
        raw[c0:c1, :take] = np.sqrt(np.take_along_axis(d2, order, axis=1))

    # per-set affine rescale; row 0 is the set minimum because rows are sorted
    last = np.take_along_axis(raw, counts[:, None] - 1, axis=1)
    span = last - raw[:, :1]
    with np.errstate(invalid="ignore", divide="ignore"):
        rescaled = np.where(span > 0, (raw - raw[:, :1]) / span * 255.0, 0.0)

    pad = np.arange(n)[None, :] >= counts[:, None]
    neighbors[pad] = -1
    raw[pad] = np.nan
    rescaled[pad] = np.nan

    rev = _transpose_sets(neighbors, raw, rescaled, counts, npix)
    return ReorderedSets((h, w), n, neighbors, raw, rescaled, counts, *rev)


def _transpose_sets(neighbors, raw, rescaled, counts, npix):
    valid = np.arange(neighbors.shape[1])[None, :] < counts[:, None]
    owners = np.repeat(np.arange(npix, dtype=np.int64), counts)
    targets = neighbors[valid]
    order = np.argsort(targets, kind="stable")  # owners stay ascending per target
    rev_offsets = np.zeros(npix + 1, dtype=np.int64)
    np.cumsum(np.bincount(targets, minlength=npix), out=rev_offsets[1:])
    return rev_offsets, owners[order], raw[valid][order], rescaled[valid][order]


def _disc_row_spans(radius: int) -> list[tuple[int, int]]:
    """(dy, half-width) pairs describing the disc one raster row at a time."""
    return [
        (dy, int(np.floor(np.sqrt(radius * radius - dy * dy))))
        for dy in range(-radius, radius + 1)
    ]


def _displacement_fields(guide: np.ndarray, offsets: np.ndarray,
                         sim_radius: int, threads: int) -> np.ndarray:
    """Squared patch distances for every search displacement, +inf where the
    displaced candidate falls outside the image."""
    h, w = guide.shape
    pad = sim_radius
    ext = mirror_pad(guide, pad)
    spans = _disc_row_spans(sim_radius)
    sq = np.empty((len(offsets), h, w), dtype=np.float64)

    # pair each displacement with its negation: d(i, i+v) = d(i-v+v, i-v)
    # lets the -v field be a shifted copy of the +v field
    index_of = {(int(dy), int(dx)): k for k, (dy, dx) in enumerate(offsets)}
    jobs = []
    for k, (dy, dx) in enumerate(offsets):
        dy, dx = int(dy), int(dx)
        if (dy, dx) == (0, 0):
            sq[k] = 0.0
        elif (dy, dx) > (0, 0):
            jobs.append((k, index_of[(-dy, -dx)], dy, dx))

    def run(job):
        k_pos, k_neg, dy, dx = job
        field = _one_field(ext, dy, dx, h, w, pad, spans)
        _fill_invalid(field, dy, dx, h, w)
        sq[k_pos] = field
        mirror = sq[k_neg]
        mirror.fill(np.inf)
        ry0, ry1 = max(0, dy), h + min(0, dy)
        rx0, rx1 = max(0, dx), w + min(0, dx)
        mirror[ry0:ry1, rx0:rx1] = field[ry0 - dy:ry1 - dy, rx0 - dx:rx1 - dx]

    if threads == 1 or len(jobs) < 2:
        for job in jobs:
            run(job)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, jobs))
    return sq


def _one_field(ext: np.ndarray, dy: int, dx: int, h: int, w: int,
               pad: int, spans: list[tuple[int, int]]) -> np.ndarray:
    hp, wp = ext.shape
    sq_diff = np.zeros((hp, wp), dtype=np.float64)
    y0, y1 = max(0, -dy), hp - max(0, dy)
    x0, x1 = max(0, -dx), wp - max(0, dx)
    d = ext[y0:y1, x0:x1] - ext[y0 + dy:y1 + dy, x0 + dx:x1 + dx]
    sq_diff[y0:y1, x0:x1] = d * d

    run = np.zeros((hp, wp + 1), dtype=np.float64)
    np.cumsum(sq_diff, axis=1, out=run[:, 1:])

    out = np.zeros((h, w), dtype=np.float64)
    for drow, half in spans:
        r0 = pad + drow
        out += run[r0:r0 + h, pad + half + 1:pad + half + 1 + w]
        out -= run[r0:r0 + h, pad - half:pad - half + w]
    return out


def _fill_invalid(field: np.ndarray, dy: int, dx: int, h: int, w: int) -> None:
    if dy > 0:
        field[h - dy:, :] = np.inf
    elif dy < 0:
        field[:-dy, :] = np.inf
    if dx > 0:
        field[:, w - dx:] = np.inf
    elif dx < 0:
        field[:, :-dx] = np.inf
