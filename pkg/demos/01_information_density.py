"""How information density responds to repetitive content.

We build synthetic sub-images with a controlled fraction of near-duplicate
key vectors and watch the density estimate track the construction.
"""

import numpy as np

from tokzip import DensityConfig, SyntheticSpec, compute_density, generate

# A sub-image with 60% clones: think of a form that is mostly whitespace.
bundle = generate(SyntheticSpec(n_tokens=100, dim=110, redundancy_fraction=0.6, seed=0))
report = compute_density(bundle.keys_low, DensityConfig(alpha=0.7, limit_k=10))
print(f"60% clones -> redundancy {report.redundancy:.2f}, density {report.density:.2f}")

# Sweep the redundancy fraction; density should mirror it one-for-one.
print("\nrho   density")
for rho in np.linspace(0, 0.9, 10):
    b = generate(SyntheticSpec(n_tokens=100, dim=110, redundancy_fraction=float(rho), seed=1))
    rep = compute_density(b.keys_low, DensityConfig(alpha=0.7, limit_k=5))
    print(f"{rho:.1f}   {rep.density:.2f}")

# The threshold alpha controls how aggressive redundancy detection is.
b = generate(SyntheticSpec(n_tokens=100, dim=110, redundancy_fraction=0.5, seed=2))
print("\nalpha  n_redundant")
for alpha in (0.5, 0.7, 0.9, 0.9995):
    rep = compute_density(b.keys_low, DensityConfig(alpha=alpha, limit_k=5))
    print(f"{alpha:<6} {rep.n_redundant}")
