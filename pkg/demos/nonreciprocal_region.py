"""Rate-profile sweep on a three-relay network with non-reciprocal channels.

Each boundary point comes from bisection over semidefinite relaxations.
With a sum-power budget the relaxed optimum is reduced to an exact rank-one
beam vector; with per-relay limits a phase randomisation picks the beam.
The relaxation bound r* scales the profile: no beam reaches rates above
(kappa r*, (1 - kappa) r*) in both coordinates. Comparing the achieved
rates with that pair shows how much the randomisation loses.

    python3 demos/nonreciprocal_region.py
"""

import numpy as np

from twrelay import (
    BisectionConfig,
    Individual,
    SumPower,
    SystemConfig,
    gen_channels,
    solve_nonreciprocal,
)

K = 3
ch = gen_channels(K, seed=21, reciprocal=False)
bis = BisectionConfig(epsilon=1e-3)

for name, rc in (("sum power 10 W", SumPower(10.0)),
                 ("per-relay 2/3/5 W", Individual([2.0, 3.0, 5.0]))):
    cfg = SystemConfig.unit_noise(1.0, 1.0, K, rc)
    print(f"\n{name}")
    print("  kappa   r*      R1      R2     steps")
    for kappa in np.linspace(0, 1, 6):
        sol = solve_nonreciprocal(ch, cfg, kappa, bis, seed=0)
        print(f"  {kappa:.1f}   {sol.r_star:.4f}  {sol.rates[0]:.4f}  {sol.rates[1]:.4f}"
              f"  {len(sol.bisection.trace)}")
