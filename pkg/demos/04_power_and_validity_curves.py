"""Power and validity as functions of the pairing budget L.

Two regimes with opposite advice about L:

* exact-duplicate features (the paired-expertise world): more pairs is pure
  win, power climbs toward 1 with no validity cost;
* continuous features (the validity cube, where the null is true): more pairs
  forces worse matches, and the false-rejection rate climbs toward 1 as L
  approaches n/2.

Trial counts are kept small here so the script runs in about a minute.
"""

from experttest import run_power_curve, run_power_vs_L, run_type1_curve

print("power vs expertise delta (L = n/8, 60 trials per cell):")
cells = run_power_curve(
    n_values=[200, 600, 1200],
    delta_values=[0.0, 0.1, 0.2, 0.3],
    L_rule=lambda n: n // 8,
    K=100, alpha=0.05, trials=60, master_seed=1,
)
print(f"{'n':>6} {'delta':>6} {'L':>5} {'power':>6}")
for c in cells:
    print(f"{c.n:>6} {c.delta:>6.2f} {c.L:>5} {c.rate:>6.2f}")

print()
print("power vs L at n=600, delta=0.2 (120 trials per point):")
for c in run_power_vs_L(n=600, delta=0.2, L_values=[20, 40, 80, 160],
                        K=100, alpha=0.05, trials=120, master_seed=2):
    print(f"  L={c.L:<4} power={c.rate:.2f}")

print()
print("false-rejection rate vs L on null data with continuous features")
print("(n=500, alpha=0.05, 30 trials per point):")
for c in run_type1_curve(n=500, L_values=[25, 100, 175, 250],
                         K=50, alpha=0.05, trials=30, master_seed=3):
    print(f"  L={c.L:<4} type-I rate={c.rate:.2f}")
