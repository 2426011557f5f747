"""Binary PGM/PPM snapshot rendering for 2D configurations.

Ising snapshots become 8-bit P5 grayscale: +1 -> 255, -1 -> 0, one pixel per
site in row-major order (image height = first extent, width = second).
Potts snapshots become P6 color images using the fixed palette below,
indexed by state-1.

With the interface overlay the canvas doubles to (2H-1) x (2W-1): sites sit
on even pixels, the pixel between two neighbors shows their shared color
when they agree and mid-gray 128 when they disagree, and an odd-odd pixel
shows the common color of its four surrounding sites or 128 when they are
not all equal (any unequal plaquette is crossed by the interface).

The formats are written byte-exactly so golden tests can compare files.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .model import SpinConfig

# Fixed Potts palette (RGB), state s uses PALETTE[s-1]; rendering supports
# q up to its length.
PALETTE = (
    (230, 25, 75),    # red
    (60, 120, 216),   # blue
    (60, 180, 75),    # green
    (255, 225, 25),   # yellow
    (145, 30, 180),   # purple
    (70, 240, 240),   # cyan
    (245, 130, 48),   # orange
    (240, 50, 230),   # magenta
    (210, 245, 60),   # lime
    (170, 110, 40),   # brown
    (128, 128, 0),    # olive
    (0, 128, 128),    # teal
)

MID_GRAY = 128


def _site_grid(config: SpinConfig) -> np.ndarray:
    if config.lattice.d != 2:
        raise ValueError(f"rendering is 2D-only, got d={config.lattice.d}")
    return config.values.reshape(config.lattice.extents)


def ising_pixels(config: SpinConfig, overlay: bool = False) -> np.ndarray:
    """Grayscale pixel matrix for an Ising snapshot."""
    grid = _site_grid(config)
    plain = np.where(grid == 1, 255, 0).astype(np.uint8)
    if not overlay:
        return plain
    return _overlay(grid, plain[..., None]).reshape(2 * grid.shape[0] - 1,
                                                    2 * grid.shape[1] - 1)


def potts_pixels(config: SpinConfig, overlay: bool = False) -> np.ndarray:
    """RGB pixel array for a Potts snapshot."""
    grid = _site_grid(config)
    if config.q is None or config.q > len(PALETTE):
        raise ValueError(f"palette covers q <= {len(PALETTE)}")
    colors = np.array(PALETTE, dtype=np.uint8)
    plain = colors[grid.astype(int) - 1]
    if not overlay:
        return plain
    return _overlay(grid, plain)


def _overlay(grid: np.ndarray, plain: np.ndarray) -> np.ndarray:
    h, w = grid.shape
    ch = plain.shape[-1]
    canvas = np.full((2 * h - 1, 2 * w - 1, ch), MID_GRAY, dtype=np.uint8)
    canvas[::2, ::2] = plain
    # horizontal between vertical neighbors (axis 0), vertical between axis-1 ones
    agree_v = grid[:-1, :] == grid[1:, :]
    agree_h = grid[:, :-1] == grid[:, 1:]
    canvas[1::2, ::2] = np.where(agree_v[..., None], plain[:-1, :], MID_GRAY)
    canvas[::2, 1::2] = np.where(agree_h[..., None], plain[:, :-1], MID_GRAY)
    quad_equal = (grid[:-1, :-1] == grid[1:, :-1]) & \
        (grid[:-1, :-1] == grid[:-1, 1:]) & (grid[:-1, :-1] == grid[1:, 1:])
    canvas[1::2, 1::2] = np.where(quad_equal[..., None], plain[:-1, :-1], MID_GRAY)
    return canvas


def pgm_bytes(pixels: np.ndarray) -> bytes:
    h, w = pixels.shape
    return b"P5\n%d %d\n255\n" % (w, h) + pixels.astype(np.uint8).tobytes()


def ppm_bytes(pixels: np.ndarray) -> bytes:
    h, w, _ = pixels.shape
    return b"P6\n%d %d\n255\n" % (w, h) + pixels.astype(np.uint8).tobytes()


def render_bytes(config: SpinConfig, overlay: bool = False) -> bytes:
    """Dispatch to P5 for Ising and P6 for Potts."""
    if config.q is None:
        return pgm_bytes(ising_pixels(config, overlay))
    return ppm_bytes(potts_pixels(config, overlay))


def write_atomic(path: str, data: bytes):
    """Write via a temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_text_atomic(path: str, text: str):
    write_atomic(path, text.encode("utf-8"))
