"""Walk through the readout channel on a small array, cell by cell.

Shows how a broken selector on a stored 1 turns specific HRS cells into
sneak-path cells that read the degraded level instead of plain HRS, and
what the noisy readout looks like.
"""

import numpy as np

from sneakpath import ChannelParams, SFPattern, compute_sp_indicators, resistance_map, sample_readout

x = np.array(
    [[0, 1, 0, 1],
     [1, 0, 1, 0],
     [0, 0, 0, 1],
     [1, 0, 1, 1]],
    dtype=np.uint8,
)
params = ChannelParams(r0=1000.0, r1=100.0, rs=250.0, sigma=30.0, q=0.5)

print("stored bits:")
print(x)
print(f"\nlevels: r1={params.r1:g} (stored 1), r0={params.r0:g} (stored 0), "
      f"r0'={params.r0_prime:g} (stored 0 behind a sneak path)")

sf = SFPattern(((0, 3),))
print(f"\nbroken selector at {sf.pairs[0]} (stores a 1, so it can carry a path)")

e = compute_sp_indicators(x, sf)
print("\nsneak-path cells (1 = degraded readout):")
print(e)
for (m, n) in map(tuple, np.argwhere(e == 1)):
    (i, j) = sf.pairs[0]
    print(f"  cell ({m},{n}): stores 0, path ({m},{n})->({m},{j})->({i},{j})->({i},{n}) "
          f"closes through the broken selector")

r = resistance_map(x, e, params)
print("\nnoiseless readout (ohms):")
print(r)

rng = np.random.default_rng(42)
y = sample_readout(x, e, params, rng)
print(f"\nnoisy readout at sigma={params.sigma:g}:")
print(np.round(y, 1))
