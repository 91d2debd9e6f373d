"""Radial reference solutions: ball ground states, the psi profile, and
spherical-cap eigenvalues.

The radial ground state phi of the ball B_{2R} (normalized phi(0) = 1)
generates the weight Gamma solving -div(phi^2 grad Gamma) = delta and the
product psi = s^(N-2) phi^2 Gamma, which stays within C*r of 1 near the
origin.  The spherical cap {y_1 > -r/2} of the unit sphere has first
Laplace-Beltrami eigenvalue N - 1 at r = 0, decreasing linearly in r.
"""

import numpy as np

import segpart as sp
from segpart.monotonicity import build_radial_profile

print("== radial ground states (phi(0)=1, first zero at 2R) ==")
for dim, R in ((2, 0.5), (3, 0.5), (4, 0.5)):
    out = sp.radial_ground_state(dim, R, 512)
    print(f"  N={dim}  lambda_1(B_{{2R}}) = {out.lambda_bar:.8f}")
print("  (N=3, R=1/2 target: pi^2 =", f"{np.pi ** 2:.8f})")

print("\n== psi profile, N = 3, R = 1 ==")
prof = build_radial_profile(3, 1.0, 1024)
sel = (prof.s > 0) & (prof.s <= prof.R_bar)
fitted_C = float(np.max(np.abs(prof.psi[sel] - 1.0) / prof.s[sel]))
print(f"  psi(0) = {prof.psi[0]}   Gamma(3R/2) = {prof.gamma_phi[-1]}")
print(f"  linear-bound constant max |psi - 1| / r on (0, R]: {fitted_C:.4f}")
for frac in (0.1, 0.25, 0.5, 0.75, 1.0):
    idx = int(frac * (len(prof.s) - 1) * (prof.R_bar / prof.s[-1]))
    print(f"    r = {prof.s[idx]:.3f}   psi = {prof.psi[idx]:.6f}")

print("\n== spherical-cap spectrum ==")
for dim in (3, 4, 5):
    row = []
    for r in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5):
        row.append(sp.cap_eigenvalue(dim, r, 2048).lambda1)
    vals = "  ".join(f"{v:.5f}" for v in row)
    print(f"  N={dim}:  lambda_1(cap_r) for r=0..0.5:  {vals}")
    slope = (sp.cap_eigenvalue(dim, 0.01, 4096).lambda1 - row[0]) / 0.01
    print(f"        value at r=0: {row[0]:.8f} (target {dim - 1}); "
          f"slope at 0: {slope:.4f} (negative)")

print("\n== hemisphere profile vs cosine ==")
cs = sp.cap_eigenvalue(3, 0.0, 2048)
err = np.abs(cs.profile - np.cos(cs.theta)).max()
print(f"  max |w - cos(theta)| = {err:.2e}")
