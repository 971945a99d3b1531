"""Image utilities: synthetic test image, noise models, PGM/PNG I/O.

All images are processed in double precision on the [0, 255] scale;
files are 8-bit binary PGM (P5), with PNG supported when Pillow is
available and the filename asks for it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np


@dataclass(frozen=True)
class GaussianNoise:
    sigma: float


@dataclass(frozen=True)
class SaltPepperNoise:
    fraction: float

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must be in [0, 1]")


NoiseSpec = Union[GaussianNoise, SaltPepperNoise]


def synthetic_image(size: int = 64) -> np.ndarray:
    """Deterministic geometric test image (values kept inside [20, 235]).

    A diagonal gradient background with a bright rectangle, a dark disk,
    and a mid-gray stripe; enough structure for filters and masks to bite
    without external data.
    """
    y, x = np.mgrid[0:size, 0:size].astype(float)
    img = 60.0 + 80.0 * (x + y) / (2 * (size - 1))
    # bright rectangle upper-left
    img[size // 8: size // 2, size // 8: 3 * size // 8] = 225.0
    # dark disk lower-right
    cy, cx, r = 0.65 * size, 0.68 * size, 0.18 * size
    img[(y - cy) ** 2 + (x - cx) ** 2 <= r * r] = 30.0
    # horizontal stripe
    img[int(0.8 * size): int(0.87 * size), :] = 150.0
    return img


def add_noise(u0: np.ndarray, spec: NoiseSpec, seed: int) -> np.ndarray:
    """Apply the noise model deterministically for a given seed.

    Gaussian noise adds i.i.d. zero-mean samples (no clipping).  Salt &
    pepper picks exactly ``round(fraction * N)`` distinct pixels and sets
    each to 0 or 255 with equal probability.
    """
    u0 = np.asarray(u0, dtype=float)
    rng = np.random.default_rng(seed)
    if isinstance(spec, GaussianNoise):
        if spec.sigma == 0:
            return u0.copy()
        return u0 + spec.sigma * rng.standard_normal(u0.shape)
    if isinstance(spec, SaltPepperNoise):
        out = u0.copy()
        flat = out.ravel()
        count = int(round(spec.fraction * flat.size))
        idx = rng.choice(flat.size, size=count, replace=False)
        flat[idx] = np.where(rng.random(count) < 0.5, 0.0, 255.0)
        return out
    raise TypeError(f"unknown noise spec: {spec!r}")


def write_pgm(path, image: np.ndarray) -> None:
    """Write an image as binary 8-bit PGM, clipping and rounding to [0, 255]."""
    img = np.clip(np.round(np.asarray(image, dtype=float)), 0, 255).astype(np.uint8)
    if img.ndim != 2:
        raise ValueError("PGM output needs a 2-D image")
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a binary 8-bit PGM (P5) into a float array."""
    data = Path(path).read_bytes()
    # header: magic, width, height, maxval, separated by whitespace/comments
    tokens = []
    pos = 0
    while len(tokens) < 4:
        m = re.compile(rb"\s*(#[^\n]*\n)*\s*(\S+)").match(data, pos)
        if m is None:
            raise ValueError(f"malformed PGM header in {path}")
        tokens.append(m.group(2))
        pos = m.end()
    if tokens[0] != b"P5":
        raise ValueError(f"not a binary PGM (P5) file: {path}")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval > 255:
        raise ValueError("only 8-bit PGM supported")
    pos += 1  # single whitespace byte after maxval
    raster = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=pos)
    return raster.reshape(h, w).astype(float)


def write_image(path, image: np.ndarray) -> None:
    """Dispatch on extension: .pgm natively, .png via Pillow."""
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        write_pgm(path, image)
    elif path.suffix.lower() == ".png":
        from PIL import Image
        img = np.clip(np.round(np.asarray(image)), 0, 255).astype(np.uint8)
        Image.fromarray(img, mode="L").save(path)
    else:
        raise ValueError(f"unsupported image format: {path.suffix}")


def read_image(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return read_pgm(path)
    if path.suffix.lower() == ".png":
        from PIL import Image
        return np.asarray(Image.open(path).convert("L"), dtype=float)
    raise ValueError(f"unsupported image format: {path.suffix}")
