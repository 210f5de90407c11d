"""The two selection branches: IQR outlier retention and weighted sampling.

The global branch adapts its count to the attention distribution; the local
branch samples proportionally to attention, at a ratio set by density.
"""

import numpy as np

from tokzip import SelectionConfig, global_select, local_sample_count, local_select

rng = np.random.default_rng(0)

# A mostly flat attention vector with a few spikes: the IQR fence finds
# exactly the spikes, however many there are.
for n_spikes in (0, 2, 5):
    attn = np.full(64, 1.0)
    spikes = rng.choice(64, size=n_spikes, replace=False)
    attn[spikes] = 40.0
    picked = global_select(attn / attn.sum())
    print(f"{n_spikes} spikes -> global branch keeps {sorted(picked.tolist())}")

# The local branch: higher-attention tokens are sampled more often.
attn = np.array([0.5, 0.3, 0.1, 0.05, 0.05])
counts = np.zeros(5)
for seed in range(5000):
    j = local_select(attn, 2, SelectionConfig(seed=seed))
    counts[j] += 1
print("\nattention:", attn)
print("empirical inclusion frequency over 5000 draws of 2:", np.round(counts / 5000, 3))

# Density sets how many local samples are taken.
for d in (0.1, 0.5, 1.0):
    print(f"density {d} over 576 tokens -> sample {local_sample_count(d, 576)}")
