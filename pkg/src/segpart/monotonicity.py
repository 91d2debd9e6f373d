"""Monotonicity machinery for eigenfunctions near free boundaries.

Given a reference eigenvalue lambda_bar, phi denotes the radial ground state
of the ball B_{2R} normalized to phi(0) = 1.  From it we build

    Gamma(r) = (N-2) * int_r^{3R/2} s^(1-N) / phi(s)^2 ds,
    psi(r)   = r^(N-2) * phi(r)^2 * Gamma(r),   psi(0) = 1 by continuity,

and the exponentially corrected average

    Psi(r) = e^(Cr) / r^2 * int_{B_r} phi^2 Gamma |grad(u/phi)|^2,

which is nondecreasing in r for nonnegative eigen-subsolutions vanishing on
an exterior tangent ball.  On planar grids (N = 2) the Gamma weight
degenerates and Psi drops it, keeping only phi^2; the same convention gives
the two-phase product its weight-1 form.  The mean-value comparison
(ball averages of a subsolution controlled by phi(R)) and the exponent
function gamma(t) = sqrt(((N-2)/2)^2 + t) - (N-2)/2 live here as well.

Quadrature note: Gamma's integrand blows up like s^(1-N) at the origin, so
the cumulative Simpson sweep from the outer endpoint runs in the variable
u = s^(2-N), where the integrand is smooth and the power-law divergence is
captured exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import ConstraintViolationError
from .eigensolve import bessel_first_zero, exterior_ball_nodes, radial_ground_state
from .grid import GridDomain, ScalarField, discrete_gradient
from .io import atomic_write_text


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """phi, Gamma_phi and psi sampled on [0, 3R/2].

    For dim == 2 the Gamma/psi legs are not defined (the functional drops
    them) and are stored as None.
    """

    dim: int
    R_bar: float
    lambda_bar: float
    s: np.ndarray
    phi: np.ndarray
    gamma_phi: np.ndarray | None
    psi: np.ndarray | None

    def phi_at(self, rho: np.ndarray | float) -> np.ndarray | float:
        rho_arr = np.asarray(rho, dtype=float)
        if np.any(rho_arr > 2.0 * self.R_bar * (1 + 1e-12)):
            raise ValueError("phi sampled beyond its ball of definition")
        # the profile grid stops at 3R/2; fall back to the stored ODE solution
        return np.interp(rho_arr, self._s_full, self._phi_full)

    # populated by build_radial_profile
    _s_full: np.ndarray = field(default=None, repr=False)
    _phi_full: np.ndarray = field(default=None, repr=False)


@dataclass(eq=False)
class MonotonicityReport:
    """Sampled functional values over increasing radii.

    ``max_violation`` is the worst relative failure of the report's claimed
    comparison: for monotone functionals the largest relative decrease
    between consecutive radii, for the mean-value check the worst excess of
    a small-ball average over its phi-corrected large-ball bound.
    """

    radii: np.ndarray
    values: np.ndarray
    max_violation: float
    metadata: dict = field(default_factory=dict)

    def write_csv(self, path: str) -> None:
        lines = ["r,value"]
        for r, v in zip(self.radii, self.values):
            lines.append(f"{float(r)!r},{float(v)!r}")
        atomic_write_text(path, "\n".join(lines) + "\n")

    def summary(self) -> dict:
        fitted = {
            k: v
            for k, v in self.metadata.items()
            if isinstance(v, (int, float)) and not isinstance(v, bool)
        }
        return {"max_violation": self.max_violation, "fitted_constants": fitted}

    def write_summary(self, path: str) -> None:
        atomic_write_text(path, json.dumps(self.summary(), sort_keys=True) + "\n")


def _consecutive_decrease(values: np.ndarray) -> float:
    worst = 0.0
    for a, b in zip(values[:-1], values[1:]):
        scale = max(abs(a), 1e-300)
        worst = max(worst, (a - b) / scale)
    return max(worst, 0.0)


def build_radial_profile(dim: int, R_bar: float, samples: int = 1024) -> RadialProfile:
    """Sample phi on [0, 2R] and integrate Gamma inward from 3R/2.

    The composite Simpson sweep runs in u = s^(2-N) so the divergence of the
    integrand at the origin costs no accuracy; psi(0) is set to its
    continuity limit 1.
    """
    if dim < 2:
        raise ValueError(f"dimension must be at least 2, got {dim}")
    if R_bar <= 0:
        raise ValueError(f"R_bar must be positive, got {R_bar}")
    if samples < 256:
        raise ValueError(f"need at least 256 samples, got {samples}")
    ground = radial_ground_state(dim, R_bar, 4 * samples)
    outer = 1.5 * R_bar
    s = np.linspace(0.0, outer, samples)
    phi = np.interp(s, ground.s, ground.phi)

    if dim == 2:
        profile = RadialProfile(dim, R_bar, ground.lambda_bar, s, phi, None, None)
    else:
        gamma_phi, psi = gamma_psi_from_phi(s, phi, dim)
        profile = RadialProfile(dim, R_bar, ground.lambda_bar, s, phi, gamma_phi, psi)
    object.__setattr__(profile, "_s_full", ground.s)
    object.__setattr__(profile, "_phi_full", ground.phi)
    return profile


def gamma_psi_from_phi(
    s: np.ndarray, phi: np.ndarray, dim: int
) -> tuple[np.ndarray, np.ndarray]:
    """Gamma and psi from a sampled phi on a grid [0, 3R/2], dim >= 3.

    Gamma(s_i) = (N-2) int_{s_i}^{3R/2} t^(1-N) / phi(t)^2 dt, computed as a
    cumulative Simpson sweep from the outer endpoint in the variable
    u = t^(2-N); psi = s^(N-2) phi^2 Gamma with psi(0) pinned at its limit.
    """
    if dim < 3:
        raise ValueError("Gamma/psi require dimension at least 3")
    if s[0] != 0.0:
        raise ValueError("the sample grid must start at 0")
    s_pos = s[1:]
    u = s_pos ** (2.0 - dim)
    g = 1.0 / phi[1:] ** 2
    u_rev = u[::-1]          # increasing: from u(3R/2) up to u(s_1)
    g_rev = g[::-1]
    gam_rev = cumulative_simpson(g_rev, x=u_rev, initial=0.0)
    gamma_phi = np.empty_like(s)
    gamma_phi[1:] = gam_rev[::-1]
    gamma_phi[0] = np.inf
    psi = np.empty_like(s)
    psi[1:] = s_pos ** (dim - 2) * phi[1:] ** 2 * gamma_phi[1:]
    psi[0] = 1.0
    return gamma_phi, psi


def profile_for_lambda(dim: int, lambda_bar: float, samples: int = 1024) -> RadialProfile:
    """Profile whose reference ball B_{2R} has first eigenvalue lambda_bar."""
    if lambda_bar <= 0:
        raise ValueError(f"lambda_bar must be positive, got {lambda_bar}")
    j = bessel_first_zero(dim / 2.0 - 1.0)
    two_R = j / math.sqrt(lambda_bar)
    return build_radial_profile(dim, two_R / 2.0, samples)


def gamma_fun(dim: int, t: float) -> float:
    """Exponent function sqrt(((N-2)/2)^2 + t) - (N-2)/2; gamma(N-1) = 1."""
    if t < 0:
        raise ValueError(f"argument must be nonnegative, got {t}")
    half = (dim - 2) / 2.0
    return math.sqrt(half * half + t) - half


def gamma_fun_derivative(dim: int, t: float, dt: float = 1e-6) -> float:
    """Central-difference derivative, exposed for the slope checks."""
    lo = max(t - dt, 0.0)
    return (gamma_fun(dim, t + dt) - gamma_fun(dim, lo)) / (t + dt - lo)


# ---------------------------------------------------------------------------
# ball quadrature


def ball_sum(
    domain: GridDomain,
    values: np.ndarray,
    center: tuple[float, float],
    r: float,
    weight_exponent: float = 0.0,
) -> float:
    """Integral over B_r(center) with optional |x - center|^(-e) weight.

    For e > 0 the singular center cell contributes through the analytic
    integral of the weight over the disk of radius h/2 times the center
    value, which keeps the quadrature O(h^2)-consistent; plain nodal
    quadrature diverges there.
    """
    x, y = domain.coords()
    rho = np.hypot(x - center[0], y - center[1])
    ball = rho <= r
    h = domain.h
    if weight_exponent == 0.0:
        return float(values[ball].sum()) * h * h
    at_center = ball & (rho < h * 1e-9)
    rest = ball & ~at_center
    total = float((values[rest] * rho[rest] ** (-weight_exponent)).sum()) * h * h
    if at_center.any() and weight_exponent < 2.0:
        cell = 2.0 * math.pi * (h / 2.0) ** (2.0 - weight_exponent) / (2.0 - weight_exponent)
        total += cell * float(values[at_center].sum())
    return total


def _laplacian_values(f: ScalarField) -> np.ndarray:
    """5-point lap_h f with the off-mask zero-extension convention."""
    v = f.values
    h2 = f.domain.h**2
    out = -4.0 * v.copy()
    out[1:, :] += v[:-1, :]
    out[:-1, :] += v[1:, :]
    out[:, 1:] += v[:, :-1]
    out[:, :-1] += v[:, 1:]
    return out / h2


def mean_value_check(
    v: ScalarField,
    lam: float,
    center: tuple[float, float],
    radii,
    profile: RadialProfile,
    subsolution_tol: float | None = None,
) -> MonotonicityReport:
    """Normalized ball averages of a nonnegative eigen-subsolution.

    values[i] = (1/r_i^2) * int_{B_{r_i}} v.  The claimed comparison is
    values[i] <= (1/(phi(r_j) r_j^2)) int_{B_{r_j}} v for every pair
    r_i < r_j; ``max_violation`` is its worst relative failure.  The report
    metadata carries the phi-weighted averages (1/r^2) int v/phi, which are
    nondecreasing in exact arithmetic.
    """
    radii = np.asarray(sorted(float(r) for r in radii))
    if radii.size < 2:
        raise ValueError("need at least two radii")
    if lam > profile.lambda_bar * (1 + 1e-9):
        raise ValueError(
            f"lambda {lam} exceeds the profile's lambda_bar {profile.lambda_bar}"
        )
    dom = v.domain
    ci, cj = dom.nearest_node(center)
    if not dom.mask[ci, cj]:
        raise ValueError("center is off the domain mask")
    if np.any(v.values < 0):
        raise ConstraintViolationError("field must be nonnegative")
    x, yy = dom.coords()
    rho = np.hypot(x - center[0], yy - center[1])
    rmax = float(radii[-1])
    if rmax >= 2.0 * profile.R_bar:
        raise ValueError("largest radius reaches the profile's zero")
    inscribed = float(rho[~dom.mask].min()) if (~dom.mask).any() else math.inf
    if rmax > inscribed:
        raise ValueError(
            f"radius {rmax} exceeds the inscribed distance {inscribed:.6g}"
        )

    # nodewise subsolution check on the sampled balls (discrete slack)
    lapv = _laplacian_values(v)
    region = (rho <= rmax) & dom.mask
    # skip the outermost ring, where the stencil reaches outside the region
    inner = region & (rho <= rmax - dom.h)
    defect = (-lapv - lam * v.values)[inner]
    tol = subsolution_tol
    if tol is None:
        tol = 1e-9 * max(1.0, lam * float(v.values.max()))
    if defect.size and float(defect.max()) > tol:
        raise ConstraintViolationError(
            f"field is not a lambda-subsolution on the sampled balls "
            f"(worst defect {float(defect.max()):.3e} > tol {tol:.3e})"
        )

    averages = np.array([ball_sum(dom, v.values, center, r) / r**2 for r in radii])
    phi_r = np.asarray(profile.phi_at(radii))
    bounds = averages / phi_r
    worst = 0.0
    for i in range(radii.size):
        for j in range(i + 1, radii.size):
            scale = max(abs(bounds[j]), 1e-300)
            worst = max(worst, (averages[i] - bounds[j]) / scale)
    phi_vals = np.ones_like(rho)
    near = rho <= rmax + 1e-12
    phi_vals[near] = np.asarray(profile.phi_at(rho[near]))
    weighted = np.where(near, v.values / phi_vals, 0.0)
    phi_averages = np.array(
        [ball_sum(dom, weighted, center, r) / r**2 for r in radii]
    )
    return MonotonicityReport(
        radii,
        averages,
        max(worst, 0.0),
        metadata={
            "lambda": lam,
            "lambda_bar": profile.lambda_bar,
            "phi_weighted_averages": phi_averages,
            "phi_bounds": bounds,
        },
    )


def _prepare_quotient_gradient(
    u: ScalarField, profile: RadialProfile, center: tuple[float, float], rmax: float
):
    """|grad(u/phi)|^2 nodewise on the working ball."""
    dom = u.domain
    x, y = dom.coords()
    rho = np.hypot(x - center[0], y - center[1])
    reach = rmax + 2.5 * dom.h
    if reach >= 2.0 * profile.R_bar:
        raise ValueError("radii reach the zero of phi; shrink them below R_bar")
    inv_phi = np.zeros_like(rho)
    near = rho <= reach
    inv_phi[near] = 1.0 / np.asarray(profile.phi_at(rho[near]))
    w = ScalarField.from_values(dom, u.values * inv_phi)
    gx, gy = discrete_gradient(w)
    return rho, gx.values**2 + gy.values**2


def acf_psi_functional(
    u: ScalarField,
    profile: RadialProfile,
    center: tuple[float, float],
    radii,
    C: float,
    excluded: np.ndarray | None = None,
) -> MonotonicityReport:
    """One-phase monotonicity functional over balls at an exterior-ball point.

    Planar grids use the two-dimensional form
    Psi(r) = e^(Cr) r^-2 int_{B_r} phi^2 |grad(u/phi)|^2 (the Gamma weight
    degenerates in 2-D).  ``max_violation`` is the largest relative decrease
    between consecutive radii; metadata carries the plain gradient averages
    r^-2 int |grad u|^2 for the two-sided comparison with Psi.
    """
    radii = np.asarray(sorted(float(r) for r in radii))
    if radii.size < 2:
        raise ValueError("need at least two radii")
    dom = u.domain
    if np.any(u.values < 0):
        raise ConstraintViolationError("field must be nonnegative")
    if excluded is None:
        excluded = exterior_ball_nodes(dom)
    if np.any(u.values[excluded] != 0.0):
        raise ConstraintViolationError("field does not vanish on the exterior ball")
    x, y = dom.coords()
    rho = np.hypot(x - center[0], y - center[1])
    rmax = float(radii[-1])
    # off-mask nodes inside the working ball must belong to the exterior
    # ball; anything else means the ball leaks through the outer boundary
    leak = ~dom.mask & ~excluded & (rho < rmax - dom.h)
    if leak.any():
        raise ValueError("center too close to the outer boundary for these radii")

    rho, grad_sq = _prepare_quotient_gradient(u, profile, center, rmax)
    phi_vals = np.ones_like(rho)
    near = rho <= rmax + 1e-12
    phi_vals[near] = np.asarray(profile.phi_at(rho[near]))
    integrand = phi_vals**2 * grad_sq

    values = np.empty(radii.size)
    grad_avg = np.empty(radii.size)
    gsq_plain = _plain_gradient_sq(u)
    for k, r in enumerate(radii):
        values[k] = math.exp(C * r) / r**2 * ball_sum(dom, integrand, center, r)
        grad_avg[k] = ball_sum(dom, gsq_plain, center, r) / r**2
    return MonotonicityReport(
        radii,
        values,
        _consecutive_decrease(values),
        metadata={
            "C": C,
            "variant": "planar (phi^2 weight, Gamma dropped)",
            "gradient_averages": grad_avg,
        },
    )


def _plain_gradient_sq(u: ScalarField) -> np.ndarray:
    gx, gy = discrete_gradient(u)
    return gx.values**2 + gy.values**2


def cjk_product(
    u1: ScalarField,
    u2: ScalarField,
    center: tuple[float, float],
    radii,
) -> MonotonicityReport:
    """Two-phase product of gradient ball averages for segregated fields.

    Each factor is r^-2 int_{B_r} |grad u_i|^2; the planar convention takes
    weight 1 (the |x|^(2-N) kernel is trivial for N = 2), which is recorded
    in the metadata.
    """
    radii = np.asarray(sorted(float(r) for r in radii))
    if np.any(u1.values < 0) or np.any(u2.values < 0):
        raise ConstraintViolationError("fields must be nonnegative")
    if np.any((u1.values != 0) & (u2.values != 0)):
        raise ConstraintViolationError("overlapping supports")
    dom = u1.domain
    g1 = _plain_gradient_sq(u1)
    g2 = _plain_gradient_sq(u2)
    f1 = np.array([ball_sum(dom, g1, center, r) / r**2 for r in radii])
    f2 = np.array([ball_sum(dom, g2, center, r) / r**2 for r in radii])
    values = f1 * f2
    return MonotonicityReport(
        radii,
        values,
        _consecutive_decrease(values),
        metadata={
            "weight_convention": "planar weight 1 (2-D form of the kernel)",
            "factors_1": f1,
            "factors_2": f2,
        },
    )
