import numpy as np
import pytest

from tokzip import DensityConfig, SelectionConfig, compress_subimage, render_masks
from tokzip.errors import GridMismatchError
from tokzip.masks import LEVEL_DROPPED, LEVEL_GLOBAL, LEVEL_LOCAL, write_pgm


def _read_pgm(path):
    tokens = path.read_text().split()
    assert tokens[0] == "P2"
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    assert maxval == 255
    vals = np.array([int(t) for t in tokens[4:]], dtype=np.uint8)
    return vals.reshape(h, w)


def test_write_pgm_scaling(tmp_path):
    p = tmp_path / "g.pgm"
    write_pgm(p, [[0, 255]], scale=3)
    img = _read_pgm(p)
    assert img.shape == (3, 6)
    assert (img[:, :3] == 0).all() and (img[:, 3:] == 255).all()


def test_clone_bundle_masks(tmp_path, clone_bundle, clone_density_cfg):
    res = compress_subimage(clone_bundle, clone_density_cfg, SelectionConfig(seed=1))
    red_path, sel_path = render_masks(clone_bundle, res, tmp_path / "m")
    red = _read_pgm(red_path).ravel()
    # bright exactly on the 12 cloned cells
    assert (red[:12] == 255).all() and (red[12:] == 0).all()
    sel = _read_pgm(sel_path).ravel()
    assert (sel[:12] == LEVEL_DROPPED).all()
    assert (sel[12:] == LEVEL_GLOBAL).all()  # retained via both branches


def test_full_retention_has_no_dropped(tmp_path, clone_bundle):
    # limit_k high enough that nothing is redundant: everything retained locally
    res = compress_subimage(clone_bundle, DensityConfig(alpha=0.7, limit_k=15),
                            SelectionConfig(seed=0))
    assert res.ratio == 1.0
    _, sel_path = render_masks(clone_bundle, res, tmp_path / "full")
    sel = _read_pgm(sel_path).ravel()
    assert not (sel == LEVEL_DROPPED).any()
    assert set(np.unique(sel)) <= {LEVEL_LOCAL, LEVEL_GLOBAL}


def test_grid_mismatch(tmp_path, clone_bundle, clone_density_cfg):
    res = compress_subimage(clone_bundle, clone_density_cfg)
    clone_bundle.grid_shape = (3, 5)
    with pytest.raises(GridMismatchError):
        render_masks(clone_bundle, res, tmp_path / "bad")
