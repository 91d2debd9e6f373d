"""Masked lattice domains and discrete field operations.

A domain is a uniform node lattice covering the bounding box of a planar
shape; the boolean mask marks nodes strictly inside the shape.  Dirichlet
conditions are imposed by node exclusion: off-mask nodes carry the value 0,
so a field in the discrete H^1_0 space is just an array that vanishes off
the mask.

The module provides the geometry layer everything else stands on: exact
Euclidean distance transforms, dilation/erosion by a Euclidean radius,
centered/one-sided gradients, and the norm bundle (L2, Linf, H1, Lipschitz,
Holder) used by the separation sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolationError, EmptyDomainError, EmptyRegionError

SHAPE_PARAM_COUNT = {
    "disk": 1,
    "rectangle": 2,
    "square": 1,
    "l_shape": 1,
    "disk_minus_ball": 2,
}


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Uniform lattice with a boolean interior mask.

    ``mask[i, j]`` refers to the node at physical coordinates
    ``(bbox[0] + i*h, bbox[1] + j*h)``.  Node (0, 0) sits at ``bbox``.
    Instances are treated as immutable after construction.
    """

    nx: int
    ny: int
    h: float
    mask: np.ndarray
    bbox: tuple[float, float]
    shape: str = "raw"
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError(f"grid spacing must be positive, got {self.h}")
        if self.mask.shape != (self.nx, self.ny):
            raise ValueError(
                f"mask shape {self.mask.shape} does not match ({self.nx}, {self.ny})"
            )
        if self.mask.dtype != np.bool_:
            raise ValueError("mask must be boolean")
        if not self.mask.any():
            raise EmptyDomainError("empty domain")

    @classmethod
    def raw(cls, nx: int, ny: int, h: float, bbox: tuple[float, float] = (0.0, 0.0)):
        """Free lattice with every node in the mask (no excluded boundary)."""
        return cls(nx, ny, float(h), np.ones((nx, ny), dtype=bool), bbox)

    def xs(self) -> np.ndarray:
        return self.bbox[0] + self.h * np.arange(self.nx)

    def ys(self) -> np.ndarray:
        return self.bbox[1] + self.h * np.arange(self.ny)

    def coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Meshgrid of physical node coordinates, shape (nx, ny) each."""
        return np.meshgrid(self.xs(), self.ys(), indexing="ij")

    def nearest_node(self, point: tuple[float, float]) -> tuple[int, int]:
        i = int(round((point[0] - self.bbox[0]) / self.h))
        j = int(round((point[1] - self.bbox[1]) / self.h))
        return min(max(i, 0), self.nx - 1), min(max(j, 0), self.ny - 1)

    def interior_count(self) -> int:
        return int(self.mask.sum())

    def diameter(self) -> float:
        """Diagonal of the bounding box of mask nodes (diameter upper bound)."""
        ii, jj = np.nonzero(self.mask)
        return float(self.h * np.hypot(ii.max() - ii.min(), jj.max() - jj.min()))


@dataclass(frozen=True, eq=False)
class Mask:
    """Boolean node subset of a domain's interior mask."""

    domain: GridDomain
    nodes: np.ndarray

    def __post_init__(self):
        if self.nodes.shape != self.domain.mask.shape:
            raise ValueError("mask array shape does not match domain")
        if self.nodes.dtype != np.bool_:
            raise ValueError("mask must be boolean")
        if np.any(self.nodes & ~self.domain.mask):
            raise ConstraintViolationError("mask is not a subset of the domain mask")

    def count(self) -> int:
        return int(self.nodes.sum())

    def is_empty(self) -> bool:
        return not self.nodes.any()


@dataclass(frozen=True, eq=False)
class ScalarField:
    """One real value per node, exactly zero off the domain mask."""

    domain: GridDomain
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.domain.mask.shape:
            raise ValueError("values shape does not match domain")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")
        if np.any(self.values[~self.domain.mask] != 0.0):
            raise ConstraintViolationError("field is nonzero off the domain mask")

    @classmethod
    def from_values(cls, domain: GridDomain, values: np.ndarray) -> "ScalarField":
        """Build a field, zeroing whatever falls off the mask."""
        v = np.asarray(values, dtype=float).copy()
        v[~domain.mask] = 0.0
        return cls(domain, v)

    @classmethod
    def zeros(cls, domain: GridDomain) -> "ScalarField":
        return cls(domain, np.zeros_like(domain.mask, dtype=float))


def build_domain(shape: str, n: int, *params: float) -> GridDomain:
    """Lattice domain for one of the supported shapes.

    ``n`` cells span the shape's characteristic extent (side for squares and
    L-shapes, shorter side for rectangles, diameter for disks), so the
    spacing is ``extent / n``.  Boundary nodes are excluded from the mask.
    """
    if shape not in SHAPE_PARAM_COUNT:
        raise ValueError(f"unknown shape {shape!r}")
    if len(params) != SHAPE_PARAM_COUNT[shape]:
        raise ValueError(
            f"shape {shape!r} takes {SHAPE_PARAM_COUNT[shape]} parameter(s), got {len(params)}"
        )
    if n < 2:
        raise ValueError(f"resolution n must be at least 2, got {n}")
    p = tuple(float(v) for v in params)
    if any(v <= 0 for v in p):
        raise ValueError(f"shape parameters must be positive, got {p}")

    if shape == "disk":
        (radius,) = p
        h = 2.0 * radius / n
        ax = -radius + h * np.arange(n + 1)
        x, y = np.meshgrid(ax, ax, indexing="ij")
        mask = x * x + y * y < radius * radius
        dom = GridDomain(n + 1, n + 1, h, mask, (-radius, -radius), shape, p)
    elif shape in ("rectangle", "square"):
        a, b = p if shape == "rectangle" else (p[0], p[0])
        h = min(a, b) / n
        ncx = int(np.ceil(a / h - 1e-12))
        ncy = int(np.ceil(b / h - 1e-12))
        xg = h * np.arange(ncx + 1)
        yg = h * np.arange(ncy + 1)
        x, y = np.meshgrid(xg, yg, indexing="ij")
        mask = (x > 0) & (x < a) & (y > 0) & (y < b)
        dom = GridDomain(ncx + 1, ncy + 1, h, mask, (0.0, 0.0), shape, p)
    elif shape == "l_shape":
        (a,) = p
        h = a / n
        ax = h * np.arange(n + 1)
        x, y = np.meshgrid(ax, ax, indexing="ij")
        mask = (x > 0) & (x < a) & (y > 0) & (y < a) & ((x < a / 2) | (y < a / 2))
        dom = GridDomain(n + 1, n + 1, h, mask, (0.0, 0.0), shape, p)
    else:  # disk_minus_ball
        radius, r0 = p
        if r0 >= radius:
            raise ValueError(f"excluded ball radius {r0} must be smaller than {radius}")
        h = 2.0 * radius / n
        ax = -radius + h * np.arange(n + 1)
        x, y = np.meshgrid(ax, ax, indexing="ij")
        # excluded ball is centered at (-r0, 0) so its boundary passes through
        # the origin: the origin is the contact point of the exterior sphere
        mask = (x * x + y * y < radius * radius) & (
            (x + r0) ** 2 + y * y > r0 * r0
        )
        dom = GridDomain(n + 1, n + 1, h, mask, (-radius, -radius), shape, p)

    if not dom.mask.any():  # pragma: no cover - GridDomain already raises
        raise EmptyDomainError("empty domain")
    return dom


def _edt_1d_sq(f: np.ndarray) -> np.ndarray:
    """Lower-envelope pass of the two-pass exact distance transform.

    ``f`` holds squared offsets along the orthogonal axis (may be inf);
    returns ``min_j (i-j)^2 + f[j]`` for every i, in index units.
    """
    m = f.shape[0]
    d = np.full(m, np.inf)
    sites = np.flatnonzero(np.isfinite(f))
    if sites.size == 0:
        return d
    v = np.zeros(sites.size, dtype=np.intp)  # parabola apex positions
    z = np.empty(sites.size + 1)             # envelope breakpoints
    k = 0
    v[0] = sites[0]
    z[0] = -np.inf
    z[1] = np.inf
    for q in sites[1:]:
        fq = f[q] + q * q
        while True:
            p = v[k]
            s = (fq - (f[p] + p * p)) / (2.0 * (q - p))
            if k > 0 and s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = np.inf
    k = 0
    for q in range(m):
        while z[k + 1] < q:
            k += 1
        p = v[k]
        d[q] = (q - p) ** 2 + f[p]
    return d


def _edt_sq_index(true_nodes: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance (index units) to the nearest true node."""
    nx, ny = true_nodes.shape
    total = nx * ny
    if not true_nodes.any():
        raise EmptyRegionError("distance transform of an empty node set")
    # brute force is exact and fast enough below 64^2; envelope passes above
    if total <= 64 * 64:
        ti, tj = np.nonzero(true_nodes)
        ii, jj = np.indices(true_nodes.shape)
        pts = np.stack([ii.ravel(), jj.ravel()], axis=1).astype(float)
        best = np.full(total, np.inf)
        chunk = 2048
        tvec = np.stack([ti, tj], axis=1).astype(float)
        for s in range(0, total, chunk):
            block = pts[s : s + chunk]
            d2 = ((block[:, None, :] - tvec[None, :, :]) ** 2).sum(axis=2)
            best[s : s + chunk] = d2.min(axis=1)
        return best.reshape(nx, ny)
    g = np.where(true_nodes, 0.0, np.inf)
    for j in range(ny):
        col = g[:, j]
        if np.isfinite(col).any():
            g[:, j] = _edt_1d_sq(col)
    out = np.empty_like(g)
    for i in range(nx):
        out[i, :] = _edt_1d_sq(g[i, :])
    return out


def distance_transform(m: Mask) -> ScalarField:
    """Exact Euclidean distance (physical units) to the nearest node of ``m``.

    Zero on ``m`` itself.  Values are reported on the domain mask; off-mask
    nodes carry 0 by the field convention.
    """
    if m.is_empty():
        raise EmptyRegionError("distance transform of an empty mask")
    d = np.sqrt(_edt_sq_index(m.nodes)) * m.domain.h
    return ScalarField.from_values(m.domain, d)


def _distance_to(true_nodes: np.ndarray, h: float) -> np.ndarray:
    """Lattice-wide physical distance to ``true_nodes`` (no mask clipping)."""
    return np.sqrt(_edt_sq_index(true_nodes)) * h


def dilate(m: Mask, r: float) -> Mask:
    """Nodes of the domain mask within Euclidean distance ``r`` of ``m``."""
    if r < 0:
        raise ValueError(f"dilation radius must be nonnegative, got {r}")
    if m.is_empty():
        from .errors import EmptyRegionError

        raise EmptyRegionError("dilate of an empty mask")
    if r == 0:
        return Mask(m.domain, m.nodes.copy())
    d = _distance_to(m.nodes, m.domain.h)
    return Mask(m.domain, (d <= r * (1 + 1e-12)) & m.domain.mask)


def erode(m: Mask, r: float) -> Mask:
    """Nodes of ``m`` farther than ``r`` from its complement (lattice-wide)."""
    if r < 0:
        raise ValueError(f"erosion radius must be nonnegative, got {r}")
    comp = ~m.nodes
    if not comp.any():
        return Mask(m.domain, m.nodes.copy())
    if r == 0:
        return Mask(m.domain, m.nodes.copy())
    d = _distance_to(comp, m.domain.h)
    return Mask(m.domain, m.nodes & (d > r * (1 + 1e-12)))


def discrete_gradient(f: ScalarField) -> tuple[ScalarField, ScalarField]:
    """Centered differences inside the mask, one-sided at the mask edge.

    Components are zero at off-mask nodes and at mask nodes isolated along
    an axis.
    """
    h = f.domain.h
    v = f.values
    m = f.domain.mask

    def axis_grad(axis: int) -> np.ndarray:
        g = np.zeros_like(v)
        plus = np.zeros_like(m)
        minus = np.zeros_like(m)
        vp = np.zeros_like(v)
        vm = np.zeros_like(v)
        if axis == 0:
            plus[:-1, :] = m[1:, :]
            minus[1:, :] = m[:-1, :]
            vp[:-1, :] = v[1:, :]
            vm[1:, :] = v[:-1, :]
        else:
            plus[:, :-1] = m[:, 1:]
            minus[:, 1:] = m[:, :-1]
            vp[:, :-1] = v[:, 1:]
            vm[:, 1:] = v[:, :-1]
        both = m & plus & minus
        only_p = m & plus & ~minus
        only_m = m & ~plus & minus
        g[both] = (vp[both] - vm[both]) / (2 * h)
        g[only_p] = (vp[only_p] - v[only_p]) / h
        g[only_m] = (v[only_m] - vm[only_m]) / h
        return g

    gx = axis_grad(0)
    gy = axis_grad(1)
    return ScalarField(f.domain, gx), ScalarField(f.domain, gy)


def gradient_magnitude(f: ScalarField) -> ScalarField:
    gx, gy = discrete_gradient(f)
    return ScalarField(f.domain, np.hypot(gx.values, gy.values))


def dirichlet_energy(f: ScalarField) -> float:
    """Quadratic form of the masked 5-point Laplacian: sum over lattice edges
    of the squared difference quotient, times the cell area.

    Edges from a mask node to an off-mask node contribute the full drop to
    zero, which is what makes this the H^1_0 energy consistent with the
    eigensolver (the centered-difference seminorm from :func:`norms` is a
    reporting quantity and differs at O(h^2))."""
    v = f.values
    m = f.domain.mask
    h = f.domain.h
    e = 0.0
    # interior edges along each axis
    dx = v[1:, :] - v[:-1, :]
    both_x = m[1:, :] & m[:-1, :]
    e += float((dx[both_x] ** 2).sum())
    dy = v[:, 1:] - v[:, :-1]
    both_y = m[:, 1:] & m[:, :-1]
    e += float((dy[both_y] ** 2).sum())
    # boundary edges: value drops to 0 at the off-mask side and beyond the lattice edge
    for shift_mask, vals in (
        (np.pad(m, ((0, 1), (0, 0)))[1:, :], v),
        (np.pad(m, ((1, 0), (0, 0)))[:-1, :], v),
        (np.pad(m, ((0, 0), (0, 1)))[:, 1:], v),
        (np.pad(m, ((0, 0), (1, 0)))[:, :-1], v),
    ):
        edge = m & ~shift_mask
        e += float((vals[edge] ** 2).sum())
    return e  # units: (field)^2, since (diff/h)^2 * h^2 = diff^2


def l2_norm(f: ScalarField) -> float:
    return float(np.sqrt((f.values**2).sum()) * f.domain.h)


def rayleigh_quotient(f: ScalarField) -> float:
    """Dirichlet energy over squared L2 norm (operator-consistent form)."""
    nrm2 = float((f.values**2).sum()) * f.domain.h**2
    if nrm2 == 0:
        raise ValueError("Rayleigh quotient of the zero field")
    return dirichlet_energy(f) / nrm2


_HOLDER_PAIR_BUDGET = 1_000_000
_HOLDER_SEED = 20240117


def _holder_seminorm(f: ScalarField, alpha: float) -> float:
    """max |f(x)-f(y)| / |x-y|^alpha over node pairs.

    Exhaustive on lattices up to 64^2 nodes, a fixed-seed sample of 1e6
    pairs above that (the scan is quadratic)."""
    v = f.values.ravel()
    nx, ny = f.values.shape
    total = nx * ny
    ii, jj = np.indices((nx, ny))
    px = ii.ravel().astype(float) * f.domain.h
    py = jj.ravel().astype(float) * f.domain.h
    best = 0.0
    if total <= 64 * 64:
        chunk = 512
        for s in range(0, total, chunk):
            e = min(s + chunk, total)
            dx = px[s:e, None] - px[None, :]
            dy = py[s:e, None] - py[None, :]
            dist = np.hypot(dx, dy)
            np.fill_diagonal(dist[:, s:e], np.inf)
            ratio = np.abs(v[s:e, None] - v[None, :]) / dist**alpha
            best = max(best, float(np.nanmax(ratio)))
        return best
    rng = np.random.default_rng(_HOLDER_SEED)
    a = rng.integers(0, total, size=_HOLDER_PAIR_BUDGET)
    b = rng.integers(0, total, size=_HOLDER_PAIR_BUDGET)
    keep = a != b
    a, b = a[keep], b[keep]
    dist = np.hypot(px[a] - px[b], py[a] - py[b])
    ratio = np.abs(v[a] - v[b]) / dist**alpha
    return float(ratio.max()) if ratio.size else 0.0


def norms(f: ScalarField, alpha: float = 0.5) -> dict:
    """Norm bundle: l2, linf, h1_seminorm, lip (max |grad|), holder(alpha)."""
    if not (0.0 < alpha < 1.0):
        raise ValueError(f"holder exponent must lie in (0, 1), got {alpha}")
    h = f.domain.h
    g = gradient_magnitude(f)
    return {
        "l2": float(np.sqrt((f.values**2).sum()) * h),
        "linf": float(np.abs(f.values).max()),
        "h1_seminorm": float(np.sqrt((g.values**2).sum()) * h),
        "lip": float(g.values.max()),
        "holder": _holder_seminorm(f, alpha),
    }
