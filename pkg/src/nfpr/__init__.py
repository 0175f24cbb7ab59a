"""Grayscale denoising by fast patch reordering and non-linear smoothing."""

from .filtering import NfprParams, denoise, evolve_step, g_weight, h_weight, presmooth
from .image import (
    ImageFormatError,
    MalformedHeaderError,
    TruncatedDataError,
    UnsupportedFormatError,
    add_awgn,
    gaussian_smooth,
    load_image,
    load_pgm,
    load_sidecar,
    mirror_pad,
    save_pgm,
    save_sidecar,
)
from .metrics import FrcCurve, dft2, frc, mse, write_frc_csv
from .reorder import DiscStencil, ReorderedSets, build_sets, disc_stencil, patch_distance

__all__ = [
    "DiscStencil",
    "FrcCurve",
    "ImageFormatError",
    "MalformedHeaderError",
    "NfprParams",
    "ReorderedSets",
    "TruncatedDataError",
    "UnsupportedFormatError",
    "add_awgn",
    "build_sets",
    "denoise",
    "dft2",
    "disc_stencil",
    "evolve_step",
    "frc",
    "g_weight",
    "gaussian_smooth",
    "h_weight",
    "load_image",
    "load_pgm",
    "load_sidecar",
    "mirror_pad",
    "mse",
    "patch_distance",
    "presmooth",
    "save_pgm",
    "save_sidecar",
    "write_frc_csv",
]

__version__ = "0.1.0"
