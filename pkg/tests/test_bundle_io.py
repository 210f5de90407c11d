import numpy as np
import pytest
import yaml

from tokzip import (
    SyntheticSpec,
    compress_document,
    generate,
    load_bundle,
    load_results,
    write_bundle,
    write_results,
    write_tensor,
)
from tokzip.errors import DimensionMismatchError, NonFiniteValueError, ParseError, ZeroRowError


def _small_bundle(seed=0, n=4, profile="uniform"):
    b = generate(SyntheticSpec(n_tokens=n, dim=n + 2, redundancy_fraction=0.0,
                               attention_profile=profile, seed=seed))
    b.grid_shape = (2, n // 2)
    return b


def test_round_trip_bitwise(tmp_path):
    bundles = [_small_bundle(seed=s) for s in (1, 2)]
    manifest = write_bundle(tmp_path, bundles, notes={"head_reduction": "mean"})
    loaded = load_bundle(manifest)
    assert len(loaded) == 2
    for orig, back in zip(bundles, loaded):
        for name in ("y_last", "keys_low", "attn_low", "keys_deep", "attn_deep"):
            a = np.asarray(getattr(orig, name), dtype=np.float32)
            b = np.asarray(getattr(back, name), dtype=np.float32)
            assert a.tobytes() == b.tobytes()
        assert back.grid_shape == orig.grid_shape
        assert back.dataset == orig.dataset


def test_length_mismatch_names_files(tmp_path):
    b = _small_bundle()
    manifest = write_bundle(tmp_path, [b])
    # overwrite the attention file with the wrong length
    doc = yaml.safe_load(manifest.read_text())
    attn_file = doc["subimages"][0]["attn_low"]
    write_tensor(tmp_path / attn_file, np.ones(5, dtype=np.float32))
    with pytest.raises(DimensionMismatchError) as exc:
        load_bundle(manifest)
    assert attn_file in str(exc.value)


def test_nonfinite_rejected(tmp_path):
    b = _small_bundle()
    manifest = write_bundle(tmp_path, [b])
    doc = yaml.safe_load(manifest.read_text())
    bad = np.asarray(b.y_last, dtype=np.float32).copy()
    bad[1, 1] = np.nan
    write_tensor(tmp_path / doc["subimages"][0]["y_last"], bad)
    with pytest.raises(NonFiniteValueError):
        load_bundle(manifest)


def test_zero_key_row_rejected(tmp_path):
    b = _small_bundle()
    manifest = write_bundle(tmp_path, [b])
    doc = yaml.safe_load(manifest.read_text())
    bad = np.asarray(b.keys_low, dtype=np.float32).copy()
    bad[2] = 0.0
    write_tensor(tmp_path / doc["subimages"][0]["keys_low"], bad)
    with pytest.raises(ZeroRowError) as exc:
        load_bundle(manifest)
    assert exc.value.index == 2


def test_attention_sum_warning(tmp_path):
    b = _small_bundle()
    b.attn_low = b.attn_low * 3.0  # sums to 3, far from 1
    manifest = write_bundle(tmp_path, [b])
    with pytest.warns(UserWarning, match="sums to"):
        load_bundle(manifest)


def test_bad_manifest(tmp_path):
    p = tmp_path / "manifest.yaml"
    p.write_text("just a string")
    with pytest.raises(ParseError):
        load_bundle(p)
    p.write_text("subimages:\n  - y_last: missing.tkzt\n")
    with pytest.raises((ParseError, FileNotFoundError)):
        load_bundle(p)


def test_results_round_trip(tmp_path):
    bundles = [_small_bundle(seed=s, n=8) for s in (1, 2)]
    results = compress_document(bundles)
    write_results(tmp_path / "out", bundles, results, {"seed": 0})
    metas = load_results(tmp_path / "out" / "results.json")
    assert len(metas) == 2
    for res, meta in zip(results, metas):
        assert meta["ratio"] == res.ratio
        assert meta["retained_indices"] == res.retained_indices.tolist()
        from tokzip import read_tensor

        tokens = read_tensor(meta["tokens_path"])
        assert tokens.shape == res.compressed_tokens.shape
