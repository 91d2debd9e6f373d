"""Alternating eigenfunction relaxation for distance-constrained partitions.

The energy is the sum of first Dirichlet eigenvalues of k node sets whose
pairwise Euclidean distance stays at or above the separation r.  Block
passes run sequentially (Gauss-Seidel) in a deterministic label-invariant
order: component i solves the eigenproblem on the domain minus the
(r - h)-dilation of everyone else's support, so each block solve is the
global minimum over its block given the others, the energy never increases
across a pass, and feasibility is preserved unconditionally.  (A
Jacobi-style simultaneous pass can let two components claim the same
vacated territory, breaking both properties.)

The h slack in the dilation radius is the discretization rule for "distance
at least r": two node sets are accepted when neither meets the (r - h)-
dilation of the other, which keeps a continuum-feasible configuration
feasible under refinement.

Supports are thresholded positivity sets {u > tau * max u}: discrete
eigenfunctions are strictly positive on their whole carrying component, so
the exact positivity set is useless as geometry; the threshold is what
stabilizes the dilation/erosion geometry between passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConstraintViolationError,
    EmptyRegionError,
    InfeasibleError,
    SqueezedOutError,
)
from .eigensolve import EigenResult, first_dirichlet_eig
from .grid import (
    GridDomain,
    Mask,
    ScalarField,
    _distance_to,
    dilate,
    erode,
    gradient_magnitude,
    norms,
    rayleigh_quotient,
)


@dataclass(frozen=True, eq=False)
class PartitionProblem:
    """Problem data: domain, component count, separation, tolerances."""

    domain: GridDomain
    k: int
    r: float
    seed: int = 0
    tol_outer: float = 1e-6
    tol_eig: float = 1e-8
    max_outer: int = 50
    tau: float = 1e-3

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"component count must be at least 1, got {self.k}")
        if self.r < 0:
            raise ValueError(f"separation must be nonnegative, got {self.r}")
        if not (0.0 <= self.tau <= 0.1):
            raise ValueError(f"support threshold must lie in [0, 0.1], got {self.tau}")
        if self.k >= 2 and self.r >= self.domain.diameter() / self.k:
            raise InfeasibleError("infeasible r")

    def with_r(self, r: float) -> "PartitionProblem":
        return PartitionProblem(
            self.domain, self.k, r, self.seed, self.tol_outer,
            self.tol_eig, self.max_outer, self.tau,
        )


@dataclass(eq=False)
class PartitionState:
    """k eigenfunctions, their thresholded supports, eigenvalues, and energy."""

    fields: list[ScalarField]
    supports: list[Mask]
    lambdas: np.ndarray
    c: float
    outer_iterations: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.fields)


def support_mask(f: ScalarField, tau: float) -> Mask:
    peak = float(f.values.max())
    if peak <= 0:
        raise EmptyRegionError("field has empty support")
    return Mask(f.domain, f.values > tau * peak)


def _truncate(f: ScalarField, tau: float) -> tuple[ScalarField, Mask, float]:
    """Zero the field off its thresholded support, renormalize, and report
    the Rayleigh quotient of the stored field.

    Storing exact zeros off the support is what makes segregation
    (u_i * u_j = 0 nodewise) and the energy identity exact; the truncation
    overhead is O(tau^2 * perimeter / h) and tiny against the eigenvalues.
    """
    supp = support_mask(f, tau)
    vals = np.where(supp.nodes, f.values, 0.0)
    nrm = math.sqrt(float((vals**2).sum())) * f.domain.h
    if nrm == 0.0:
        raise EmptyRegionError("field has empty support")
    cut = ScalarField(f.domain, vals / nrm)
    return cut, supp, rayleigh_quotient(cut)


def pairwise_support_distances(state: PartitionState) -> np.ndarray:
    """Matrix of minimal node-to-node distances between supports."""
    k = state.k
    out = np.full((k, k), np.inf)
    dts = [_distance_to(s.nodes, s.domain.h) for s in state.supports]
    for i in range(k):
        for j in range(k):
            if i != j and state.supports[i].nodes.any():
                out[i, j] = float(dts[j][state.supports[i].nodes].min())
    return out


def check_feasible(
    state: PartitionState, prob: PartitionProblem, r: float | None = None
) -> bool:
    """Pairwise support distances at least r - h and segregated fields."""
    if prob.k == 1:
        return True
    sep = prob.r if r is None else r
    d = pairwise_support_distances(state)
    slack = sep - prob.domain.h
    iu = np.triu_indices(prob.k, 1)
    if np.any(d[iu] < slack - 1e-9 * max(sep, 1.0)):
        return False
    for i in range(prob.k):
        for j in range(i + 1, prob.k):
            if np.any((state.fields[i].values != 0) & (state.fields[j].values != 0)):
                return False
    return True


def voronoi_cells(domain: GridDomain, sites: list[tuple[int, int]]) -> list[np.ndarray]:
    """Partition of the domain mask by nearest site.

    Nodes exactly equidistant to two sites belong to neither cell (they sit
    on the interface, which keeps mirror-symmetric sites producing
    mirror-symmetric cells)."""
    ii, jj = np.indices(domain.mask.shape)
    dist2 = np.stack(
        [(ii - si) ** 2 + (jj - sj) ** 2 for (si, sj) in sites], axis=0
    )
    owner = np.argmin(dist2, axis=0)
    if len(sites) > 1:
        part = np.partition(dist2, 1, axis=0)
        tie = part[0] == part[1]
    else:
        tie = np.zeros_like(domain.mask)
    return [(owner == i) & domain.mask & ~tie for i in range(len(sites))]


def _lloyd_sites(
    domain: GridDomain, sites: list[tuple[int, int]], iters: int = 40
) -> list[tuple[int, int]]:
    """Polish Voronoi sites toward the centroidal tessellation.

    Block passes freeze the interface wherever the initial cells put it
    (every component immediately fills its allowed region), so start
    quality is what decides the optimized energy; centroidal cells are the
    balanced starting geometry.
    """
    sites = [tuple(map(int, s)) for s in sites]
    for _ in range(iters):
        cells = voronoi_cells(domain, sites)
        new_sites = []
        for c, old in zip(cells, sites):
            if not c.any():
                new_sites.append(old)
                continue
            ii, jj = np.nonzero(c)
            ci, cj = float(ii.mean()), float(jj.mean())
            pick = int(np.argmin((ii - ci) ** 2 + (jj - cj) ** 2))
            new_sites.append((int(ii[pick]), int(jj[pick])))
        if new_sites == sites:
            break
        sites = new_sites
    return sites


def _solve_component(
    domain: GridDomain, allowed: np.ndarray, prob: PartitionProblem
) -> EigenResult:
    return first_dirichlet_eig(
        domain, Mask(domain, allowed), tol=prob.tol_eig, seed=prob.seed
    )


def init_partition(
    prob: PartitionProblem,
    sites: list[tuple[int, int]] | None = None,
    lloyd: bool | None = None,
    seed: int | None = None,
) -> PartitionState:
    """Feasible start: Voronoi cells of seeded random sites (polished to the
    centroidal tessellation unless explicit sites are given), each eroded by
    r/2 + h so that supports come out pairwise r + 2h apart, then one
    ground-state solve per cell."""
    domain = prob.domain
    rng = np.random.default_rng(prob.seed if seed is None else seed)
    flat_mask = np.flatnonzero(domain.mask.ravel())
    margin = prob.r / 2.0 + domain.h
    explicit = sites is not None
    if lloyd is None:
        lloyd = not explicit
    cells = None
    for _ in range(50):
        if not explicit:
            if flat_mask.size < prob.k:
                raise InfeasibleError("infeasible r")
            picks = rng.choice(flat_mask, size=prob.k, replace=False)
            sites = [tuple(np.unravel_index(p, domain.mask.shape)) for p in picks]
        trial_sites = _lloyd_sites(domain, sites) if lloyd else sites
        trial = voronoi_cells(domain, trial_sites)
        eroded = [erode(Mask(domain, c), margin).nodes for c in trial]
        if all(e.any() for e in eroded):
            cells = eroded
            break
        if explicit:
            break
    if cells is None:
        raise InfeasibleError("infeasible r")

    fields, supports, lambdas = [], [], []
    for allowed in cells:
        res = _solve_component(domain, allowed, prob)
        f, supp, lam = _truncate(res.field, prob.tau)
        fields.append(f)
        supports.append(supp)
        lambdas.append(lam)
    lambdas = np.array(lambdas)
    return PartitionState(
        fields, supports, lambdas, float(lambdas.sum()),
        metadata={"seed": prob.seed, "pass_style": "gauss-seidel"},
    )


def _block_order(supports: list[Mask]) -> list[int]:
    """Deterministic label-invariant pass order: by each support's first
    raveled node.  An index-fixed order would hand the first-listed
    component whatever slack the initial cells leave open, so permuting the
    initial sites would not permute the output; ordering by geometry makes
    relabeling an exact symmetry of the algorithm."""
    keys = []
    for i, s in enumerate(supports):
        flat = np.flatnonzero(s.nodes.ravel())
        keys.append((int(flat[0]) if flat.size else -1, i))
    return [i for _, i in sorted(keys)]


def relax_step(state: PartitionState, prob: PartitionProblem) -> PartitionState:
    """One block pass; the energy cannot increase.

    allowed_i = domain minus the (r - h)-dilation of the union of the other
    components' current supports; component i becomes the ground state of
    allowed_i, truncated at the support threshold.  A block update is kept
    only if its stored-field Rayleigh quotient does not exceed the current
    one (the previous field stays feasible, so descent is always available).
    """
    domain = prob.domain
    slack = max(prob.r - domain.h, 0.0)
    fields = list(state.fields)
    supports = list(state.supports)
    lambdas = state.lambdas.copy().astype(float)
    for i in _block_order(supports):
        others = np.zeros_like(domain.mask)
        for j in range(prob.k):
            if j != i:
                others |= supports[j].nodes
        if others.any() and slack > 0:
            blocked = dilate(Mask(domain, others), slack).nodes
        else:
            blocked = others
        allowed = domain.mask & ~blocked
        if not allowed.any():
            raise SqueezedOutError(i)
        res = _solve_component(domain, allowed, prob)
        f, supp, lam = _truncate(res.field, prob.tau)
        if lam <= lambdas[i] * (1 + 1e-14) or not supports[i].nodes.any():
            fields[i] = f
            supports[i] = supp
            lambdas[i] = lam
    return PartitionState(
        fields, supports, lambdas, float(lambdas.sum()),
        outer_iterations=state.outer_iterations + 1,
        metadata=dict(state.metadata),
    )


def _optimize_from(prob: PartitionProblem, state: PartitionState) -> PartitionState:
    best = state
    quiet = 0
    stalled = False
    passes = 0
    for passes in range(1, prob.max_outer + 1):
        new = relax_step(state, prob)
        drop = (state.c - new.c) / max(abs(state.c), 1e-300)
        if new.c < best.c:
            best = new
        if drop < -10.0 * prob.tol_eig:
            stalled = True
        quiet = quiet + 1 if drop < prob.tol_outer else 0
        state = new
        if quiet >= 3:
            break
    best.metadata.update(
        {"passes": passes, "stalled": stalled, "pass_style": "gauss-seidel"}
    )
    best.outer_iterations = passes
    return best


def optimize(
    prob: PartitionProblem,
    initial: PartitionState | None = None,
    sites: list[tuple[int, int]] | None = None,
    restarts: int = 3,
) -> PartitionState:
    """Iterate block passes until the relative energy decrease stays below
    tol_outer for three consecutive passes (or max_outer); returns the best
    state seen.  Deterministic for a fixed problem and seed.

    Cold starts run a few deterministic restarts (sub-seeds derived from the
    problem seed) and keep the lowest energy: the centroidal initialization
    has more than one stable basin (a 2:1 rectangle also supports the
    stacked-strips tessellation) and block passes cannot leave a basin.
    Warm starts and explicit sites run once.
    """
    if initial is not None or sites is not None:
        state = initial if initial is not None else init_partition(prob, sites=sites)
        return _optimize_from(prob, state)
    best = None
    for j in range(max(restarts, 1)):
        start = init_partition(prob, seed=prob.seed + 9176 * j)
        out = _optimize_from(prob, start)
        out.metadata["restart"] = j
        if best is None or out.c < best.c:
            best = out
    return best


# ---------------------------------------------------------------------------
# cutoff competitor


def _nodal_distance(state: PartitionState, domain: GridDomain) -> np.ndarray:
    """Distance to the nodal set: zero off every support, and for a support
    node the distance to the nearest other support minus h/2 (the interface
    sits halfway between adjacent node columns of touching supports)."""
    dist = np.zeros(domain.mask.shape)
    union = np.zeros_like(domain.mask)
    for s in state.supports:
        union |= s.nodes
    dts = [_distance_to(s.nodes, domain.h) for s in state.supports]
    for i, s in enumerate(state.supports):
        other = np.full(domain.mask.shape, np.inf)
        for j in range(state.k):
            if j != i:
                other = np.minimum(other, dts[j])
        sel = s.nodes
        dist[sel] = np.maximum(other[sel] - domain.h / 2.0, 0.0)
    dist[~union] = 0.0
    dist[~domain.mask] = 0.0
    return dist


def cutoff_competitor(
    state: PartitionState, prob: PartitionProblem, r: float
) -> dict:
    """Separate an r = 0 partition by the linear cutoff around its nodal set.

    eta vanishes within r/2 of the nodal set, ramps linearly to 1 at
    distance r, and each u_i * eta is renormalized; Rayleigh quotients are
    recomputed from scratch.  Returns the competitor state, its energy, and
    the tubular-neighborhood measure |N_r| for the Minkowski diagnostic.
    """
    if r < 0:
        raise ValueError(f"separation must be nonnegative, got {r}")
    domain = prob.domain
    dist = _nodal_distance(state, domain)
    if r == 0:
        eta = (dist > 0).astype(float)
    else:
        eta = np.clip((dist - r / 2.0) / (r / 2.0), 0.0, 1.0)
    nodal_volume = float(((dist < r) & domain.mask).sum()) * domain.h**2

    fields, supports, lambdas = [], [], []
    for i, f in enumerate(state.fields):
        cut = ScalarField.from_values(domain, f.values * eta)
        if not (cut.values != 0).any():
            raise EmptyRegionError(f"component {i} annihilated by the cutoff")
        f2, supp, lam = _truncate(cut, prob.tau)
        fields.append(f2)
        supports.append(supp)
        lambdas.append(lam)
    lambdas = np.array(lambdas)
    comp = PartitionState(
        fields, supports, lambdas, float(lambdas.sum()),
        metadata={"cutoff_r": r, "nodal_volume": nodal_volume},
    )
    if not check_feasible(comp, prob, r=r):
        raise ConstraintViolationError(
            f"cutoff competitor is not feasible at separation {r}"
        )
    return {"state": comp, "energy": comp.c, "nodal_volume": nodal_volume}


# ---------------------------------------------------------------------------
# sweeps


@dataclass(eq=False)
class SweepReport:
    """Per-separation record of energy, eigenvalues, norms, and distances to
    the r = 0 solution (components matched by support overlap)."""

    rows: list[dict]
    metadata: dict
    states: dict

    def to_csv_lines(self) -> list[str]:
        k = self.metadata["k"]
        lam_cols = ",".join(f"lambda_{i + 1}" for i in range(k))
        lines = [f"r,c_r,{lam_cols},lip_max,linf_max,holder_05,dist_to_u0"]
        for row in sorted(self.rows, key=lambda q: q["r"]):
            if row.get("error"):
                lines.append(f"{row['r']!r},error,{row['error']}")
                continue
            lams = ",".join(repr(float(v)) for v in row["lambdas"])
            dist = max(row["dist_to_u0"]) if row["dist_to_u0"] else math.nan
            lines.append(
                f"{row['r']!r},{row['c']!r},{lams},{row['lip_max']!r},"
                f"{row['linf_max']!r},{row['holder_05']!r},{float(dist)!r}"
            )
        return lines

    def fitted_slope(self) -> tuple[float, float]:
        """Least-squares slope of c_r - c_0 against r (through the origin)
        and the relative residual of that fit."""
        ok = [q for q in self.rows if not q.get("error")]
        base = [q["c"] for q in ok if q["r"] == 0.0]
        if not base:
            return math.nan, math.nan
        c0 = base[0]
        rs = np.array([q["r"] for q in ok if q["r"] > 0])
        dc = np.array([q["c"] - c0 for q in ok if q["r"] > 0])
        if rs.size == 0 or float((rs**2).sum()) == 0.0:
            return math.nan, math.nan
        slope = float((rs * dc).sum() / (rs**2).sum())
        resid = float(np.linalg.norm(dc - slope * rs))
        scale = float(np.linalg.norm(dc))
        return slope, (resid / scale if scale > 0 else 0.0)


def match_components(state: PartitionState, ref: PartitionState) -> list[int]:
    """Greedy maximal-Jaccard assignment of state components onto ref's,
    ties broken by the lower index pair."""
    k = state.k
    scores = np.zeros((k, k))
    for i in range(k):
        a = state.supports[i].nodes
        for j in range(k):
            b = ref.supports[j].nodes
            inter = float(np.logical_and(a, b).sum())
            union = float(np.logical_or(a, b).sum())
            scores[i, j] = inter / union if union > 0 else 0.0
    perm = [-1] * k
    used_i: set[int] = set()
    used_j: set[int] = set()
    order = sorted(
        ((-scores[i, j], i, j) for i in range(k) for j in range(k))
    )
    for neg, i, j in order:
        if i not in used_i and j not in used_j:
            perm[j] = i
            used_i.add(i)
            used_j.add(j)
    return perm


def _restore_feasibility(
    supports: list[Mask], prob: PartitionProblem
) -> list[np.ndarray]:
    """Erode warm-start supports until they satisfy the new separation."""
    nodes = [s.nodes.copy() for s in supports]
    need = prob.r - prob.domain.h
    for _ in range(8):
        dts = [_distance_to(m, prob.domain.h) if m.any() else None for m in nodes]
        worst = 0.0
        for i in range(prob.k):
            for j in range(i + 1, prob.k):
                if nodes[i].any() and dts[j] is not None:
                    d = float(dts[j][nodes[i]].min())
                    worst = max(worst, need - d)
        if worst <= 0:
            return nodes
        shrink = worst / 2.0 + prob.domain.h
        nodes = [erode(Mask(prob.domain, m), shrink).nodes for m in nodes]
        if not all(m.any() for m in nodes):
            raise InfeasibleError("infeasible r")
    raise InfeasibleError("infeasible r")


def _state_from_supports(
    cells: list[np.ndarray], prob: PartitionProblem
) -> PartitionState:
    """One sequential rebuild pass: solve each component against the current
    supports of the others (a relax pass seeded with the given geometry)."""
    domain = prob.domain
    slack = max(prob.r - domain.h, 0.0)
    current: list[np.ndarray] = [c.copy() for c in cells]
    k = prob.k
    fields: list = [None] * k
    supports: list = [None] * k
    lambdas = np.zeros(k)
    order = _block_order([Mask(domain, c) for c in cells])
    for i in order:
        others = np.zeros_like(domain.mask)
        for j in range(k):
            if j != i:
                block = supports[j].nodes if supports[j] is not None else current[j]
                others |= block
        if others.any() and slack > 0:
            blocked = dilate(Mask(domain, others), slack).nodes
        else:
            blocked = others
        allowed = domain.mask & ~blocked
        if not allowed.any():
            raise SqueezedOutError(i)
        res = _solve_component(domain, allowed, prob)
        f, supp, lam = _truncate(res.field, prob.tau)
        fields[i] = f
        supports[i] = supp
        lambdas[i] = lam
    return PartitionState(
        fields, supports, lambdas, float(lambdas.sum()),
        metadata={"seed": prob.seed, "pass_style": "gauss-seidel"},
    )


def run_sweep(prob_base: PartitionProblem, r_values) -> SweepReport:
    """Optimize along descending separations, warm-starting each level from
    the previous optimum; components are matched to the r = 0 solution by
    support overlap before distances are reported."""
    r_values = [float(r) for r in r_values]
    if sorted(r_values, reverse=True) != r_values:
        raise ValueError("r_values must be sorted descending")
    if r_values[-1] != 0.0:
        raise ValueError("the sweep must end at r = 0")
    rows: list[dict] = []
    states: dict[float, PartitionState] = {}
    prev: PartitionState | None = None
    for r in r_values:
        prob = prob_base.with_r(r)
        try:
            if prev is None:
                state = optimize(prob)
            else:
                cells = _restore_feasibility(prev.supports, prob)
                state = optimize(prob, initial=_state_from_supports(cells, prob))
        except (InfeasibleError, SqueezedOutError, EmptyRegionError) as exc:
            rows.append({"r": r, "error": str(exc)})
            continue
        states[r] = state
        prev = state
        per_norms = [norms(f) for f in state.fields]
        rows.append(
            {
                "r": r,
                "c": state.c,
                "lambdas": [float(v) for v in state.lambdas],
                "lip_max": max(q["lip"] for q in per_norms),
                "linf_max": max(q["linf"] for q in per_norms),
                "holder_05": max(q["holder"] for q in per_norms),
                "dist_to_u0": [],
                "error": None,
            }
        )
    if 0.0 in states:
        ref = states[0.0]
        for row in rows:
            if row.get("error") or row["r"] not in states:
                continue
            state = states[row["r"]]
            perm = match_components(state, ref)
            row["dist_to_u0"] = [
                float(np.abs(state.fields[perm[j]].values - ref.fields[j].values).max())
                for j in range(prob_base.k)
            ]
    meta = {
        "k": prob_base.k,
        "seed": prob_base.seed,
        "n_shape": (prob_base.domain.shape, prob_base.domain.params),
        "h": prob_base.domain.h,
        "tol_eig": prob_base.tol_eig,
        "tol_outer": prob_base.tol_outer,
        "tau": prob_base.tau,
        "pass_style": "gauss-seidel",
    }
    return SweepReport(rows, meta, states)


# ---------------------------------------------------------------------------
# diagnostics


def gradient_location_check(e: EigenResult, d: GridDomain) -> dict:
    """Compare the global max of |grad u| with the max within 3h of the
    support boundary; the ratio lands in (0, 1]."""
    g = gradient_magnitude(e.field).values
    supp = e.field.values > 0
    if not supp.any():
        raise EmptyRegionError("eigenfunction has empty support")
    comp = ~supp
    if comp.any():
        edge_dist = _distance_to(comp, d.h)
        band = supp & (edge_dist <= 3.0 * d.h * (1 + 1e-12))
    else:
        band = supp
    max_grad = float(g[supp].max())
    boundary_grad = float(g[band].max()) if band.any() else 0.0
    ratio = boundary_grad / max_grad if max_grad > 0 else math.nan
    return {"max_grad": max_grad, "boundary_grad": boundary_grad, "ratio": ratio}


def free_boundary_point(state: PartitionState) -> tuple[float, float]:
    """Deep interface node: minimizes the worse of the distances to the two
    nearest supports, ties broken toward the domain interior."""
    domain = state.fields[0].domain
    dts = np.stack([_distance_to(s.nodes, domain.h) for s in state.supports])
    # per node: the two smallest support distances
    part = np.sort(dts, axis=0)
    score = part[1] if state.k >= 2 else part[0]
    score = np.where(domain.mask, score, np.inf)
    best = score.min()
    cands = np.argwhere(score <= best + domain.h * 0.51)
    if (~domain.mask).any():
        wall = _distance_to(~domain.mask, domain.h)
    else:
        wall = np.full(domain.mask.shape, np.inf)
    depths = [wall[i, j] for i, j in cands]
    i, j = cands[int(np.argmax(depths))]
    return (domain.bbox[0] + i * domain.h, domain.bbox[1] + j * domain.h)


def exterior_sphere_fraction(state: PartitionState, prob: PartitionProblem) -> float:
    """Fraction of free-boundary support nodes with another support within
    r + 2h (the discrete echo of the exact-distance property)."""
    domain = prob.domain
    if prob.r <= 0:
        raise ValueError("the diagnostic needs a positive separation")
    reach = prob.r + 2.0 * domain.h
    off_domain = ~domain.mask
    wall = _distance_to(off_domain, domain.h) if off_domain.any() else None
    dts = [_distance_to(s.nodes, domain.h) for s in state.supports]
    hits = 0
    total = 0
    for i, s in enumerate(state.supports):
        comp = ~s.nodes
        if not comp.any():
            continue
        edge = s.nodes & (_distance_to(comp, domain.h) <= domain.h * (1 + 1e-9))
        if wall is not None:
            edge &= wall > reach
        others = np.full(domain.mask.shape, np.inf)
        for j in range(state.k):
            if j != i:
                others = np.minimum(others, dts[j])
        total += int(edge.sum())
        hits += int((others[edge] <= reach).sum())
    return hits / total if total else math.nan
