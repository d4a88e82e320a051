"""Rate region of a five-relay network with reciprocal channels.

Sweeps the closed-form weighted inverse-SNR solutions for both relay power
models, prints the boundary points next to the simple heuristics, and checks
one boundary point against the brute-force grid at K=2.

    python3 demos/reciprocal_region.py
"""


from twrelay import (
    Individual,
    SumPower,
    SystemConfig,
    effective_channels,
    equal_power,
    gen_channels,
    max_power,
    rate_pair,
    sweep_reciprocal,
    wsismin_sum_power,
)
from twrelay.oracle import grid_wsismin
from twrelay.reciprocal import wsis_objective

K = 5
ch = gen_channels(K, seed=7)
sum_cfg = SystemConfig.unit_noise(1.0, 1.0, K, SumPower(10.0))
ind_cfg = SystemConfig.unit_noise(1.0, 1.0, K, Individual([2.5, 3.0, 0.5, 1.0, 3.0]))

for name, cfg, heuristic in (("sum power", sum_cfg, equal_power),
                             ("per-relay power", ind_cfg, max_power)):
    reg = sweep_reciprocal(ch, cfg)
    print(f"\n{name}: hull area {reg.area:.4f} bit^2")
    print("   mu     R1      R2")
    for mu, (r1, r2) in zip(reg.params, reg.raw_points):
        print(f"  {mu:.1f}  {r1:.4f}  {r2:.4f}")
    h = rate_pair(heuristic(ch, cfg), effective_channels(ch, cfg), cfg)
    print(f"  {heuristic.__name__}: ({h[0]:.4f}, {h[1]:.4f}), "
          f"inside hull: {bool(reg.contains([h], 1e-9)[0])}")

# the closed form against an exhaustive grid on a two-relay network
ch2 = gen_channels(2, seed=3)
cfg2 = SystemConfig.unit_noise(1.0, 1.0, 2, SumPower(10.0))
eff2 = effective_channels(ch2, cfg2)
closed = wsis_objective(wsismin_sum_power(eff2, cfg2, 0.3).x, eff2, cfg2, 0.3)
_, grid = grid_wsismin(eff2, cfg2, 0.3, 400)
print(f"\nK=2, mu=0.3 weighted inverse SNR (lower is better): "
      f"closed form {closed:.8f}, best of 401 grid points {grid:.8f}")
