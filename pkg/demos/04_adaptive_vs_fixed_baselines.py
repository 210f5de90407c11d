"""Adaptive compression vs fixed-ratio baselines over a redundancy sweep.

Fixed ratios stay flat no matter the content; the adaptive pipeline tracks
the injected redundancy level.
"""

import numpy as np

from tokzip import (
    DensityConfig,
    SelectionConfig,
    SyntheticSpec,
    baseline_select,
    compress_subimage,
    generate,
)

N = 576
dcfg = DensityConfig()  # alpha=0.7, limit_k=50

print("rho   adaptive  fixed(1/2)")
for rho in np.arange(0.0, 1.0, 0.1):
    adaptive, fixed = [], []
    for seed in range(3):
        bundle = generate(SyntheticSpec(n_tokens=N, dim=N + 1,
                                        redundancy_fraction=float(rho), seed=seed))
        res = compress_subimage(bundle, dcfg, SelectionConfig(seed=seed))
        adaptive.append(res.ratio)
        sel = baseline_select("fixed", bundle, seed=seed, ratio=0.5, density_cfg=dcfg)
        fixed.append(sel.merged_indices.size / N)
    print(f"{rho:.1f}   {np.mean(adaptive):.3f}     {np.mean(fixed):.3f}")

print("\nThe adaptive column spans most of [0, 1]; the fixed column does not move.")
