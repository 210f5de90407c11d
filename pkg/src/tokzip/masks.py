"""Patch-grid mask rendering as plain (ASCII) portable graymaps.

Two rasters per sub-image: a redundancy mask (redundant patches bright) and
a selection mask with three gray levels for globally retained, locally
sampled, and dropped patches. One pixel per patch, scalable by an integer
factor; P2 output keeps the files dependency-free and diffable.
"""

from pathlib import Path

import numpy as np

from .errors import GridMismatchError

LEVEL_DROPPED = 0
LEVEL_LOCAL = 128
LEVEL_GLOBAL = 255

_PROVENANCE_LEVEL = {
    "global": LEVEL_GLOBAL,
    "both": LEVEL_GLOBAL,
    "local": LEVEL_LOCAL,
    "fallback": LEVEL_LOCAL,
}


def write_pgm(path, grid, scale=1):
    """Write a uint8 2-D array as an ASCII PGM, upscaled by an integer factor."""
    g = np.asarray(grid, dtype=np.uint8)
    if g.ndim != 2:
        raise ValueError("grid must be 2-D")
    if scale < 1:
        raise ValueError("scale must be >= 1")
    g = np.repeat(np.repeat(g, scale, axis=0), scale, axis=1)
    lines = [f"P2", f"{g.shape[1]} {g.shape[0]}", "255"]
    lines += [" ".join(str(int(v)) for v in row) for row in g]
    Path(path).write_text("\n".join(lines) + "\n")


def render_masks(bundle, result, out_prefix, scale=1):
    """Emit redundancy and selection masks for one sub-image.

    Returns the two written paths. Patch index i maps to grid cell
    (i // cols, i % cols), matching raster token order.
    """
    rows, cols = bundle.grid_shape
    n = bundle.n_tokens
    if rows * cols != n:
        raise GridMismatchError(f"grid {bundle.grid_shape} does not tile {n} tokens")
    out_prefix = Path(out_prefix)

    redundancy = np.zeros(n, dtype=np.uint8)
    if result.density_report is not None:
        redundancy[np.asarray(result.density_report.redundant_mask, dtype=bool)] = 255
    red_path = out_prefix.with_name(out_prefix.name + "_redundancy.pgm")
    write_pgm(red_path, redundancy.reshape(rows, cols), scale)

    selection = np.full(n, LEVEL_DROPPED, dtype=np.uint8)
    for idx, tag in zip(result.retained_indices, result.branch_provenance):
        selection[int(idx)] = _PROVENANCE_LEVEL[tag]
    if result.is_global_passthrough:
        selection[:] = LEVEL_GLOBAL
    sel_path = out_prefix.with_name(out_prefix.name + "_selection.pgm")
    write_pgm(sel_path, selection.reshape(rows, cols), scale)
    return red_path, sel_path
