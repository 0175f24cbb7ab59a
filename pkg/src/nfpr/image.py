"""Grayscale raster handling: PGM and float-raster I/O, AWGN, Gaussian smoothing.

Images are 2D float64 numpy arrays in row-major order. Nominal display range
is [0, 255], but values are kept unclamped through the whole pipeline;
clamping and quantisation happen only when exporting to 8-bit PGM.
"""

from __future__ import annotations

import numpy as np

SIDECAR_MAGIC = b"NFPRF1"


class ImageFormatError(Exception):
    """Base class for raster file problems."""


class UnsupportedFormatError(ImageFormatError):
    """Magic number of a format we do not read (e.g. color PPM)."""


class MalformedHeaderError(ImageFormatError):
    """File structure present but unparseable."""


class TruncatedDataError(ImageFormatError):
    """Pixel payload shorter than the header promises."""


def as_image(data) -> np.ndarray:
    """Coerce to a valid 2D float64 image, rejecting NaN/Inf and empty axes."""
    img = np.asarray(data, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ValueError(f"expected a 2D image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains NaN or Inf")
    return img


def reflect_indices(positions, n: int) -> np.ndarray:
    """Map integer positions onto [0, n) by mirror (whole-sample) reflection.

    Reflection is about the boundary samples themselves (abc -> cb|abc|ba),
    valid for arbitrarily far out-of-range positions and for n == 1.
    """
    pos = np.asarray(positions, dtype=np.int64)
    if n == 1:
        return np.zeros_like(pos)
    period = 2 * n - 2
    m = np.mod(pos, period)
    return np.where(m >= n, period - m, m)


def mirror_pad(img: np.ndarray, pad: int) -> np.ndarray:
    """Extend an image by `pad` samples on every side with mirror reflection."""
    if pad == 0:
        return img
    rows = reflect_indices(np.arange(-pad, img.shape[0] + pad), img.shape[0])
    cols = reflect_indices(np.arange(-pad, img.shape[1] + pad), img.shape[1])
    return img[np.ix_(rows, cols)]


# ---------------------------------------------------------------------------
# PGM (portable graymap), P5 binary and P2 ASCII
# ---------------------------------------------------------------------------

def _pgm_tokens(buf: bytes, start: int):
    """Yield (token, end_offset) for whitespace-separated header tokens.

    '#' starts a comment running to end of line, per the PNM convention.
    """
    i = start
    n = len(buf)
    while True:
        while i < n and buf[i : i + 1].isspace():
            i += 1
        if i < n and buf[i] == ord("#"):
            while i < n and buf[i] not in (ord("\n"), ord("\r")):
                i += 1
            continue
        break
    if i >= n:
        raise MalformedHeaderError("unexpected end of file in PGM header")
    j = i
    while j < n and not buf[j : j + 1].isspace():
        j += 1
    return buf[i:j], j


def load_pgm(path) -> np.ndarray:
    """Read a binary (P5) or ASCII (P2) PGM file as a float64 image.

    Sample values are kept as stored (an 8-bit file stays in [0, 255]);
    maxval up to 65535 is accepted, with two-byte big-endian samples in P5.
    """
    with open(path, "rb") as f:
        buf = f.read()
    if len(buf) < 2:
        raise MalformedHeaderError("file too short for a PGM magic number")
    magic = buf[:2]
    if magic not in (b"P5", b"P2"):
        raise UnsupportedFormatError(f"unsupported magic number {magic!r}")

    pos = 2
    fields = []
    for name in ("width", "height", "maxval"):
        tok, pos = _pgm_tokens(buf, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise MalformedHeaderError(f"non-numeric {name} token {tok!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"bad dimensions {width}x{height}")
    if not 0 < maxval <= 65535:
        raise MalformedHeaderError(f"maxval {maxval} outside (0, 65535]")

    npix = width * height
    if magic == b"P2":
        toks = buf[pos:].split()
        if len(toks) < npix:
            raise TruncatedDataError(f"expected {npix} ASCII samples, got {len(toks)}")
        try:
            data = np.array([int(t) for t in toks[:npix]], dtype=np.float64)
        except ValueError:
            raise MalformedHeaderError("non-numeric ASCII sample") from None
        return data.reshape(height, width)

    # P5: exactly one whitespace byte separates maxval from the payload
    pos += 1
    bytes_per = 1 if maxval <= 255 else 2
    need = npix * bytes_per
    payload = buf[pos : pos + need]
    if len(payload) < need:
        raise TruncatedDataError(f"expected {need} payload bytes, got {len(payload)}")
    dtype = np.uint8 if bytes_per == 1 else ">u2"
    data = np.frombuffer(payload, dtype=dtype).astype(np.float64)
    return data.reshape(height, width)


def save_pgm(img: np.ndarray, path) -> None:
    """Write an image as binary P5 with maxval 255.

    Values are clamped to [0, 255] and rounded half-away-from-zero; loading
    the result back reproduces it exactly (the export is idempotent after
    the first clamp-round).
    """
    img = as_image(img)
    q = np.floor(np.clip(img, 0.0, 255.0) + 0.5).astype(np.uint8)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    with open(path, "wb") as f:
        f.write(header)
        f.write(q.tobytes())


# ---------------------------------------------------------------------------
# Lossless float sidecar: "NFPRF1 <width> <height>\n" + row-major LE float64
# ---------------------------------------------------------------------------

def save_sidecar(img: np.ndarray, path) -> None:
    """Write the lossless float raster used to move unclamped data between runs."""
    img = as_image(img)
    header = SIDECAR_MAGIC + f" {img.shape[1]} {img.shape[0]}\n".encode("ascii")
    with open(path, "wb") as f:
        f.write(header)
        f.write(img.astype("<f8").tobytes())


def load_sidecar(path) -> np.ndarray:
    """Read a float raster written by save_sidecar."""
    with open(path, "rb") as f:
        buf = f.read()
    if not buf.startswith(SIDECAR_MAGIC):
        raise UnsupportedFormatError(f"not a {SIDECAR_MAGIC.decode()} raster")
    nl = buf.find(b"\n")
    if nl < 0:
        raise MalformedHeaderError("missing header newline")
    parts = buf[len(SIDECAR_MAGIC) : nl].split()
    if len(parts) != 2:
        raise MalformedHeaderError(f"expected width and height, got {parts!r}")
    try:
        width, height = int(parts[0]), int(parts[1])
    except ValueError:
        raise MalformedHeaderError(f"non-numeric dimensions {parts!r}") from None
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"bad dimensions {width}x{height}")
    need = width * height * 8
    payload = buf[nl + 1 : nl + 1 + need]
    if len(payload) < need:
        raise TruncatedDataError(f"expected {need} payload bytes, got {len(payload)}")
    return np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(height, width)


def load_image(path) -> np.ndarray:
    """Load either a PGM or a float sidecar, sniffing the magic number."""
    with open(path, "rb") as f:
        head = f.read(len(SIDECAR_MAGIC))
    if head.startswith(SIDECAR_MAGIC):
        return load_sidecar(path)
    return load_pgm(path)


# ---------------------------------------------------------------------------
# Experiment setup operations
# ---------------------------------------------------------------------------

def add_awgn(img: np.ndarray, sigma_noise: float, rng) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise of the given standard deviation.

    The output is NOT clamped; the smoothing stage relies on the dynamic
    range of the actual noisy values. `rng` is a numpy Generator or a seed.
    """
    img = as_image(img)
    if sigma_noise < 0:
        raise ValueError(f"sigma_noise must be >= 0, got {sigma_noise}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return img + rng.normal(0.0, sigma_noise, img.shape)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled 1D Gaussian, truncated at radius ceil(3*sigma), renormalized."""
    radius = int(np.ceil(3.0 * sigma))
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(t * t) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_smooth(img: np.ndarray, sigma_g: float) -> np.ndarray:
    """Separable Gaussian convolution with mirror-extended boundaries.

    sigma_g == 0 returns the input unchanged (as a copy). The kernel sums
    to one, so constant images and the image mean are preserved.
    """
    img = as_image(img)
    if sigma_g < 0:
        raise ValueError(f"sigma_g must be >= 0, got {sigma_g}")
    if sigma_g == 0:
        return img.copy()
    taps = gaussian_kernel(sigma_g)
    out = _convolve_axis(img, taps, axis=0)
    return _convolve_axis(out, taps, axis=1)


def _convolve_axis(img: np.ndarray, taps: np.ndarray, axis: int) -> np.ndarray:
    radius = (len(taps) - 1) // 2
    n = img.shape[axis]
    ext = np.take(img, reflect_indices(np.arange(-radius, n + radius), n), axis=axis)
    out = np.zeros_like(img)
    sl = [slice(None), slice(None)]
    for k, wk in enumerate(taps):
        sl[axis] = slice(k, k + n)
        out += wk * ext[tuple(sl)]
    return out
