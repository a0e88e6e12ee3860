"""Lippmann-Schwinger solver on a uniform cell grid (Nystrom discretization).

The kernel is radial and the nodes sit on a uniform lattice, so the quadrature
weight for a pair of cells depends only on their index offset.  Assembly
therefore evaluates the Green's function once per unique distance and fills
the dense matrix by lookup.  Off-diagonal weights use the midpoint rule;
entries whose cells lie within the 3^n neighborhood are replaced by a local
integration of the kernel over the source cell (polar/pyramid decomposition
around the singularity with a power substitution absorbing it), which
converges under refinement of the local subdivision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError, NearResonanceError
from .green import green_eval_batch, green_radial_derivative
from .kernels import Problem
from .quadrature import DEFAULT_SPEC

RCOND_FLOOR = 1e-12


@dataclass
class PotentialGrid:
    """Compactly supported contrast q sampled at the midpoints of a uniform
    cell grid over an axis-aligned box."""

    lo: np.ndarray
    hi: np.ndarray
    cells_per_axis: int
    nodes: np.ndarray
    q_values: np.ndarray
    cell_sizes: np.ndarray
    cell_volume: float
    index: np.ndarray

    @classmethod
    def build(cls, lo, hi, cells_per_axis, q):
        """q may be a constant, an array of length cells^n, or a callable on points."""
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1 or lo.size not in (1, 2, 3):
            raise DomainError("box must have matching lo/hi of dimension 1-3")
        if np.any(hi <= lo):
            raise DomainError("box must be nonempty")
        nc = int(cells_per_axis)
        if nc < 1:
            raise DomainError("cells_per_axis must be >= 1")
        n = lo.size
        h = (hi - lo) / nc
        idx = np.indices((nc,) * n).reshape(n, -1).T
        nodes = lo[None, :] + (idx + 0.5) * h[None, :]
        if callable(q):
            qv = np.asarray(q(nodes), dtype=float)
        elif np.ndim(q) == 0:
            qv = np.full(nodes.shape[0], float(q))
        else:
            qv = np.asarray(q, dtype=float).ravel()
            if qv.size != nodes.shape[0]:
                raise DomainError(f"q array has {qv.size} entries, grid has {nodes.shape[0]}")
        if not np.all(np.isfinite(qv)):
            raise DomainError("q must be bounded")
        return cls(lo, hi, nc, nodes, qv, h, float(np.prod(h)), idx)

    @property
    def dim(self):
        return self.lo.size

    @property
    def sup_norm(self):
        return float(np.max(np.abs(self.q_values)))


@dataclass(frozen=True)
class IncidentField:
    """Plane wave e^{i k x . d} with |d| = 1."""

    direction: np.ndarray
    kind: str = "plane_wave"

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.direction, dtype=float))
        if not np.isclose(np.linalg.norm(d), 1.0, atol=1e-12):
            raise DomainError("incident direction must be a unit vector")
        object.__setattr__(self, "direction", d)

    def values(self, problem, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.exp(1j * problem.k * pts @ self.direction)


@dataclass
class NystromSystem:
    """Dense collocation matrix A = I - k^{2s} T_k with its assembly record."""

    problem: Problem
    pot: PotentialGrid
    matrix: np.ndarray
    weight_table: np.ndarray
    offset_encode: np.ndarray
    correction_record: dict = field(default_factory=dict)

    def apply_T(self, u):
        """T u = sum_j w_ij q_j u_j (the volume-potential matrix action)."""
        w = self.weight_table[self.offset_encode]
        return w @ (self.pot.q_values * np.asarray(u))

    def with_contrast(self, q_values):
        """New system for a different contrast on the same grid, reusing the
        kernel weight tables (they do not depend on q)."""
        pot = PotentialGrid(self.pot.lo, self.pot.hi, self.pot.cells_per_axis,
                            self.pot.nodes, np.asarray(q_values, dtype=float).ravel(),
                            self.pot.cell_sizes, self.pot.cell_volume, self.pot.index)
        w_ij = self.weight_table[self.offset_encode]
        a = -self.problem.k2s * w_ij * pot.q_values[None, :]
        a[np.diag_indices_from(a)] += 1.0
        return NystromSystem(self.problem, pot, a, self.weight_table,
                             self.offset_encode, dict(self.correction_record))


@dataclass
class ScatterSolution:
    problem: Problem
    pot: PotentialGrid
    incident: IncidentField
    u_total: np.ndarray
    residual: float
    rcond: float


# ---------------------------------------------------------------------------
# Local integration of the radial kernel over one cell
# ---------------------------------------------------------------------------

def _segment_nodes(edges, order):
    xg, wg = leggauss(order)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    return (mid + half * xg[None, :]).ravel(), (half * wg[None, :]).ravel()


def _power_line(length, gamma, level, order=10):
    """Radial nodes rho = length * v^gamma on (0, length].

    The substitution absorbs the integrable kernel singularity at 0: every
    local integrand here behaves like rho^{2s-1} after the volume Jacobian, so
    gamma >= 1/(2s) turns it into a smooth function of v.
    """
    edges = np.linspace(0.0, 1.0, 4 + level)
    v, wv = _segment_nodes(edges, order + level)
    rho = length * v ** gamma
    w = length * gamma * v ** (gamma - 1.0) * wv
    return rho, w


def _tensor_cell_nodes(t, h, level, order):
    """Tensor Gauss points over the cell (centered at origin) for a target t
    outside the cell; returns (radii to t, weights)."""
    n = h.size
    xg, wg = leggauss(order + 2 * level)
    grids = np.meshgrid(*[0.5 * h[a] * xg for a in range(n)], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    wgrid = np.meshgrid(*[0.5 * h[a] * wg for a in range(n)], indexing="ij")
    w = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    radii = np.linalg.norm(pts - t[None, :], axis=1)
    return radii, w


def _fan_triangle_nodes(p1, p2, gamma, level, order_theta=8, order_rho=9):
    """Polar nodes for the triangle (origin, p1, p2): theta Gauss times
    singularity-absorbing radial nodes up to the opposite edge."""
    a1 = np.arctan2(p1[1], p1[0])
    a2 = np.arctan2(p2[1], p2[0])
    if a2 <= a1:
        a2 += 2.0 * np.pi
    edge = p2 - p1
    nrm = np.array([edge[1], -edge[0]])
    nrm /= np.linalg.norm(nrm)
    d = abs(float(nrm @ p1))
    xg, wg = leggauss(order_theta + 2 * level)
    thetas = 0.5 * (a1 + a2) + 0.5 * (a2 - a1) * xg
    wth = 0.5 * (a2 - a1) * wg
    radii, weights = [], []
    for th, wt in zip(thetas, wth):
        cosang = abs(np.cos(th) * nrm[0] + np.sin(th) * nrm[1])
        rmax = d / max(cosang, 1e-300)
        rho, wr = _power_line(rmax, gamma, level, order_rho)
        radii.append(rho)
        weights.append(wt * wr * rho)   # polar Jacobian rho
    return np.concatenate(radii), np.concatenate(weights)


def _pyramid_nodes(t, h, gamma, level, order_tau=7):
    """3D: six pyramids from the interior target t to the cell faces."""
    radii, weights = [], []
    xg, wg = leggauss(7 + 3 * level)
    tau, wtau = _power_line(1.0, gamma, level, order_tau)
    for axis in range(3):
        for sign in (-1.0, 1.0):
            d = sign * h[axis] / 2.0 - t[axis]
            if d == 0.0:
                raise DomainError("target on a cell face is not supported")
            others = [a for a in range(3) if a != axis]
            u = 0.5 * h[others[0]] * xg
            v = 0.5 * h[others[1]] * xg
            wu = 0.5 * h[others[0]] * wg
            wv = 0.5 * h[others[1]] * wg
            uu, vv = np.meshgrid(u, v, indexing="ij")
            ww = np.outer(wu, wv)
            p = np.zeros(uu.shape + (3,))
            p[..., axis] = d
            p[..., others[0]] = uu - t[others[0]]
            p[..., others[1]] = vv - t[others[1]]
            pnorm = np.linalg.norm(p, axis=-1).ravel()
            wflat = (ww * abs(d)).ravel()
            radii.append(np.outer(tau, pnorm).ravel())
            weights.append(np.outer(wtau * tau ** 2, wflat).ravel())
    return np.concatenate(radii), np.concatenate(weights)


def _cell_quad(t, h, gamma, level):
    """Quadrature (radii, weights) for int_cell G(|y - t|) dy; the cell is
    centered at the origin with sizes h, the target at t (inside or outside)."""
    n = h.size
    inside = np.all(np.abs(t) < 0.5 * h - 1e-14)
    if n == 1:
        if inside:
            r1, w1 = _power_line(0.5 * h[0] - t[0], gamma, level)
            r2, w2 = _power_line(0.5 * h[0] + t[0], gamma, level)
            return np.concatenate([r1, r2]), np.concatenate([w1, w2])
        lo, hi = sorted((abs(-0.5 * h[0] - t[0]), abs(0.5 * h[0] - t[0])))
        rho, w = _segment_nodes(np.linspace(lo, hi, 4 + level), 10 + level)
        return rho, w
    if not inside:
        return _tensor_cell_nodes(t, h, level, order=10)
    if n == 2:
        corners = np.array([[0.5 * h[0], 0.5 * h[1]], [-0.5 * h[0], 0.5 * h[1]],
                            [-0.5 * h[0], -0.5 * h[1]], [0.5 * h[0], -0.5 * h[1]]])
        rel = corners - t[None, :]
        radii, weights = [], []
        for i in range(4):
            r, w = _fan_triangle_nodes(rel[i], rel[(i + 1) % 4], gamma, level)
            radii.append(r)
            weights.append(w)
        return np.concatenate(radii), np.concatenate(weights)
    return _pyramid_nodes(t, h, gamma, level)


def _green_total_at(problem, radii, spec):
    """Total Green values at a radius array, deduplicated before evaluation."""
    rr = np.asarray(radii, dtype=float)
    uniq, inv = np.unique(np.round(rr, 14), return_inverse=True)
    helm, riesz, jt, _ = green_eval_batch(problem, 0.0, uniq, spec)
    return (helm + riesz + jt)[inv]


def cell_weight(problem, offset, cell_sizes, spec=DEFAULT_SPEC, level=1):
    """Locally integrated quadrature weight int_cell G(|offset - z|) dz."""
    t = np.atleast_1d(np.asarray(offset, dtype=float))
    h = np.atleast_1d(np.asarray(cell_sizes, dtype=float))
    gamma = max(2.0, 1.0 / problem.s)
    radii, weights = _cell_quad(t, h, gamma, level)
    vals = _green_total_at(problem, radii, spec)
    return complex(np.sum(weights * vals))


# ---------------------------------------------------------------------------
# Assembly / solve / evaluation
# ---------------------------------------------------------------------------

def _offset_tables(pot):
    """Flat encoding of pairwise index offsets plus the distance per offset."""
    nc, n = pot.cells_per_axis, pot.dim
    side = 2 * nc - 1
    offs = np.indices((side,) * n).reshape(n, -1).T - (nc - 1)
    dist = np.linalg.norm(offs * pot.cell_sizes[None, :], axis=1)
    strides = side ** np.arange(n - 1, -1, -1)
    idx = pot.index
    code = np.zeros((idx.shape[0], idx.shape[0]), dtype=np.int64)
    for a in range(n):
        code += (idx[:, None, a] - idx[None, :, a] + nc - 1) * strides[a]
    return offs, dist, code


def build_nystrom(problem, pot, spec=DEFAULT_SPEC, correction_level=1):
    """Assemble A = I - k^{2s} T_k on the grid nodes.

    Off-diagonal entries use the midpoint rule w = vol * G(|x_i - y_j|); the
    3^n-neighborhood entries integrate G over the source cell around the
    singularity instead.
    """
    if pot.dim != problem.n:
        raise DomainError(f"grid dimension {pot.dim} != problem dimension {problem.n}")
    offs, dist, code = _offset_tables(pot)
    weights = np.zeros(dist.shape, dtype=complex)
    far = np.max(np.abs(offs), axis=1) > 1
    if np.any(far):
        weights[far] = pot.cell_volume * _green_total_at(problem, dist[far], spec)
    record = {}
    near_ids = np.flatnonzero(~far)
    cache = {}
    for oid in near_ids:
        key = tuple(np.abs(offs[oid]).tolist())
        if key not in cache:
            t = np.abs(offs[oid]) * pot.cell_sizes
            cache[key] = cell_weight(problem, t, pot.cell_sizes, spec, correction_level)
            record[key] = cache[key]
        weights[oid] = cache[key]
    w_ij = weights[code]
    a = -problem.k2s * w_ij * pot.q_values[None, :]
    a[np.diag_indices_from(a)] += 1.0
    return NystromSystem(problem, pot, a, weights, code, record)


def correction_refinement_delta(problem, pot, spec=DEFAULT_SPEC, levels=(1, 2)):
    """Max relative change of the corrected near weights between two local
    subdivision levels (self-convergence indicator)."""
    deltas = {}
    n = pot.dim
    for key in {tuple(v) for v in np.indices((2,) * n).reshape(n, -1).T}:
        t = np.asarray(key, dtype=float) * pot.cell_sizes
        w0 = cell_weight(problem, t, pot.cell_sizes, spec, levels[0])
        w1 = cell_weight(problem, t, pot.cell_sizes, spec, levels[1])
        deltas[key] = abs(w1 - w0) / max(abs(w1), 1e-300)
    return deltas


def solve_ls(system, incident, check_conditioning=True):
    """Direct dense solve of (I - k^{2s} T_k) u = u_inc on the grid nodes."""
    b = incident.values(system.problem, system.pot.nodes)
    rcond = 1.0
    if check_conditioning and np.any(system.pot.q_values):
        sv = np.linalg.svd(system.matrix, compute_uv=False)
        rcond = float(sv[-1] / sv[0])
        if rcond < RCOND_FLOOR:
            raise NearResonanceError(
                f"Nystrom matrix numerically singular (rcond={rcond:.2e}); "
                "candidate resonance wavenumber", rcond=rcond)
    u = np.linalg.solve(system.matrix, b)
    residual = float(np.linalg.norm(system.matrix @ u - b) / np.linalg.norm(b))
    return ScatterSolution(system.problem, system.pot, incident, u, residual, rcond)


def _scatter_weights(problem, pot, x, spec):
    """Quadrature weights w_j(x) for the volume potential at observation x,
    with local correction when x lies within 2 cells of a node."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    delta = x[None, :] - pot.nodes
    dist = np.linalg.norm(delta, axis=1)
    w = np.zeros(dist.shape, dtype=complex)
    near = np.max(np.abs(delta) / pot.cell_sizes[None, :], axis=1) < 2.0
    if np.any(~near):
        w[~near] = pot.cell_volume * _green_total_at(problem, dist[~near], spec)
    for j in np.flatnonzero(near):
        w[j] = cell_weight(problem, delta[j], pot.cell_sizes, spec)
    return w


def eval_scattered(solution, x, spec=DEFAULT_SPEC):
    """Scattered field u^scat(x) = k^{2s} sum_j w_j G(x - y_j) q_j u_j."""
    p, pot = solution.problem, solution.pot
    w = _scatter_weights(p, pot, x, spec)
    return complex(p.k2s * np.sum(w * pot.q_values * solution.u_total))


def born_approx(problem, pot, incident, x, spec=DEFAULT_SPEC):
    """First Born approximation: the volume potential applied to u_inc."""
    w = _scatter_weights(problem, pot, x, spec)
    uinc = incident.values(problem, pot.nodes)
    return complex(problem.k2s * np.sum(w * pot.q_values * uinc))


def eval_scattered_with_radial_derivative(solution, x, spec=None):
    """(u^scat(x), d/d|x| u^scat(x)) for far observation points.

    Uses the chain rule on the radial kernel; requires x outside the
    2-cell correction neighborhood of every node.
    """
    p, pot = solution.problem, solution.pot
    x = np.atleast_1d(np.asarray(x, dtype=float))
    delta = x[None, :] - pot.nodes
    dist = np.linalg.norm(delta, axis=1)
    if np.any(np.max(np.abs(delta) / pot.cell_sizes[None, :], axis=1) < 2.0):
        raise DomainError("radial derivative evaluation requires a far observation point")
    gvals = _green_total_at(p, dist, spec or DEFAULT_SPEC)
    dg = np.array([green_radial_derivative(p, 0.0, float(d), spec) for d in dist])
    xhat = x / np.linalg.norm(x)
    proj = (delta @ xhat) / dist
    coef = pot.cell_volume * p.k2s * pot.q_values * solution.u_total
    val = np.sum(coef * gvals)
    dval = np.sum(coef * dg * proj)
    return complex(val), complex(dval)


def resonance_scan(problem_template, pot, k_grid, spec=DEFAULT_SPEC, correction_level=1):
    """Invertibility indicators of I - k^{2s} T_k over a wavenumber grid.

    Returns a list of (k, reciprocal condition number, smallest singular
    value); dips toward zero flag candidate members of the exceptional set.
    Indicators are reported even when tiny.
    """
    rows = []
    for k in np.asarray(k_grid, dtype=float):
        if not k > 0.0:
            raise DomainError("scan wavenumbers must be positive")
        p = Problem(problem_template.n, problem_template.s, float(k))
        system = build_nystrom(p, pot, spec, correction_level)
        sv = np.linalg.svd(system.matrix, compute_uv=False)
        rows.append((float(k), float(sv[-1] / sv[0]), float(sv[-1])))
    return rows
