"""Distance-constrained partitions: a separation sweep on rectangle(2, 1)
with k = 2, the cutoff competitor built from the touching partition, and the
free-boundary diagnostics.

The sweep optimizes at each separation r (largest first, warm-starting the
next level), then matches components to the r = 0 solution.  Expected
behavior: the energy c_r grows roughly linearly in r, the Lipschitz norms
stay flat, and the eigenfunctions converge uniformly as r -> 0.
"""

import segpart as sp
from segpart.partition import (
    PartitionProblem,
    cutoff_competitor,
    exterior_sphere_fraction,
    free_boundary_point,
    run_sweep,
)

dom = sp.build_domain("rectangle", 64, 2.0, 1.0)
r_values = [1 / 8, 1 / 16, 1 / 32, 0.0]
prob = PartitionProblem(dom, k=2, r=max(r_values), seed=11, tol_eig=1e-8)

print(f"== sweep on rectangle(2,1), n=64, k=2, r in {r_values} ==")
report = run_sweep(prob, r_values)
for line in report.to_csv_lines():
    print("  " + line)
slope, resid = report.fitted_slope()
print(f"  fitted slope of c_r - c_0 vs r: {slope:.2f} (relative residual {resid:.2%})")

state0 = report.states[0.0]
print(f"\n== cutoff competitor from the r = 0 optimum (c_0 = {state0.c:.4f}) ==")
p0 = prob.with_r(0.0)
for r in (1 / 32, 1 / 16, 1 / 8):
    out = cutoff_competitor(state0, p0, r)
    print(f"  r = {r:.4f}   energy = {out['energy']:.4f}   "
          f"gap = {out['energy'] - state0.c:.4f}   "
          f"|N_r|/(2r) = {out['nodal_volume'] / (2 * r):.3f}")
print("  (the tubular-neighborhood ratio estimates the interface length, about 1)")

print("\n== free-boundary diagnostics ==")
pt = free_boundary_point(state0)
print(f"  deep interface point: ({pt[0]:.3f}, {pt[1]:.3f})  (midline is x = 1)")
state = report.states[1 / 16]
frac = exterior_sphere_fraction(state, prob.with_r(1 / 16))
print(f"  exact-distance echo at r = 1/16: {frac:.0%} of free-boundary nodes "
      f"have the other support within r + 2h")

print("\n== gradient location (max |grad u| sits at the boundary) ==")
from segpart.eigensolve import EigenResult
from segpart.partition import gradient_location_check

for i, (lam, f) in enumerate(zip(state0.lambdas, state0.fields)):
    res = EigenResult(float(lam), f, 0.0, 0)
    out = gradient_location_check(res, dom)
    print(f"  component {i + 1}: boundary/max gradient ratio = {out['ratio']:.3f}")
