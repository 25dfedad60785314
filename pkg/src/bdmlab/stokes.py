"""Symmetric interior penalty DG discretization of steady Stokes with
lowest-order H(div)-conforming velocities and piecewise-constant pressures,
plus the boundary-layer manufactured solution and the convergence study.

The velocity space shares the two normal-moment DOFs of every edge between
its neighbours (one global edge orientation), which makes the discrete
velocity normal-continuous and, combined with the elementwise mass
constraint, exactly divergence-free.  The normal component of the Dirichlet
datum is imposed strongly through the boundary-edge DOFs; the tangential
part is enforced weakly by the interior-penalty terms.  Keeping the normal
trace strong is what preserves both the zero-mean pressure gauge and the
machine-zero elementwise divergence.
"""

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .polynomials import Polynomial
from .quadrature import gauss_01, simplex_rule
from .shishkin import (Mesh2D, ShishkinParams, build_shishkin, build_uniform,
                       mesh_aspect_ratio, transition_point)


def penalty(sigma, k=1, convention="natural"):
    """Jump penalization gamma = 4 k^2 ceil(log sigma); for sigma <= 1 the
    aspect-ratio bump is floored away."""
    if sigma <= 1:
        return 4 * k * k
    val = math.log(sigma) if convention == "natural" else math.log10(sigma)
    return 4 * k * k * math.ceil(val)


# ---------------------------------------------------------------------------
# fields of the form  poly * exp(-x1/eps) + poly

class ExpPoly:
    """q_exp(x) * exp(-x1/eps) + q_plain(x); closed under differentiation,
    which is all the manufactured solution needs."""

    __slots__ = ("pexp", "pplain", "eps")

    def __init__(self, pexp=None, pplain=None, eps=Fraction(1)):
        self.pexp = pexp if pexp is not None else Polynomial.zero(2)
        self.pplain = pplain if pplain is not None else Polynomial.zero(2)
        self.eps = eps

    def diff(self, axis):
        pexp = self.pexp.diff(axis)
        if axis == 0:
            pexp = pexp - self.pexp * (1 / Fraction(self.eps))
        return ExpPoly(pexp, self.pplain.diff(axis), self.eps)

    def __add__(self, other):
        if not isinstance(other, ExpPoly):
            return ExpPoly(self.pexp, self.pplain + other, self.eps)
        return ExpPoly(self.pexp + other.pexp, self.pplain + other.pplain, self.eps)

    def __sub__(self, other):
        return self + (other * (-1))

    def __mul__(self, scalar):
        return ExpPoly(self.pexp * scalar, self.pplain * scalar, self.eps)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, ExpPoly) and self.pexp == other.pexp
                and self.pplain == other.pplain
                and float(self.eps) == float(other.eps))

    def is_zero(self):
        return self.pexp.is_zero() and self.pplain.is_zero()

    def eval(self, pts):
        pts = np.asarray(pts, dtype=float)
        vals = np.zeros(pts.shape[0])
        if self.pexp.terms:
            vals += self.pexp.eval(pts) * np.exp(-pts[:, 0] / float(self.eps))
        if self.pplain.terms:
            vals += self.pplain.eval(pts)
        return vals

    __call__ = eval


@dataclass
class StokesCase:
    epsilon: float
    nu: float
    u: tuple           # (ExpPoly, ExpPoly)
    p: ExpPoly
    f: tuple           # (ExpPoly, ExpPoly)
    grad_u: tuple      # ((du1dx, du1dy), (du2dx, du2dy))
    pressure_mean: float
    homogeneous_bc: bool = True

    def boundary_g(self, pts):
        """Dirichlet trace of the exact velocity (identically zero here,
        the stream function has double zeros on the boundary)."""
        pts = np.asarray(pts, dtype=float)
        return np.column_stack([self.u[0].eval(pts), self.u[1].eval(pts)])


def manufactured_case(eps, nu=1.0) -> StokesCase:
    """Boundary-layer stream-function solution on the unit square:
    xi = x^2 (1-x)^2 y^2 (1-y)^2 exp(-x/eps), u = curl xi, p = exp(-x/eps),
    f = -nu Lap u + grad p (all derivatives exact in the coefficients)."""
    eps_fr = Fraction(eps).limit_denominator(10 ** 12)
    x = Polynomial.variable(2, 0)
    y = Polynomial.variable(2, 1)
    one = Polynomial.constant(2, Fraction(1))
    poly = (x ** 2) * ((one - x) ** 2) * (y ** 2) * ((one - y) ** 2)
    xi = ExpPoly(pexp=poly, eps=eps_fr)
    u1 = xi.diff(1)
    u2 = xi.diff(0) * (-1)
    p = ExpPoly(pexp=Polynomial.constant(2, Fraction(1)), eps=eps_fr)
    f = tuple(
        (ui.diff(0).diff(0) + ui.diff(1).diff(1)) * (-nu) + p.diff(i)
        for i, ui in enumerate((u1, u2))
    )
    grad = ((u1.diff(0), u1.diff(1)), (u2.diff(0), u2.diff(1)))
    e = float(eps_fr)
    mean = e * (1.0 - math.exp(-1.0 / e))  # integral of exp(-x/eps) over the square
    return StokesCase(epsilon=e, nu=nu, u=(u1, u2), p=p, f=f, grad_u=grad,
                      pressure_mean=mean)


# ---------------------------------------------------------------------------
# DG space: one pair of normal moments per edge + one pressure per triangle

class DGSpace:
    def __init__(self, mesh: Mesh2D):
        self.mesh = mesh
        self.x = np.array([[float(a), float(b)] for a, b in mesh.vertices])
        self.tris = np.array(mesh.triangles, dtype=int)
        self.n_tri = len(mesh.triangles)
        self.facets = mesh.facets
        self.n_facets = len(self.facets)
        self.facet_index = {(f.v0, f.v1): i for i, f in enumerate(self.facets)}
        self._build_geometry()
        self._build_local_bases()

    @property
    def ndof(self):
        """Velocity plus pressure DOFs of the discrete spaces."""
        return 2 * self.n_facets + self.n_tri

    @property
    def n_vel(self):
        return 2 * self.n_facets

    def _build_geometry(self):
        pts = self.x[self.tris]                       # (T, 3, 2)
        self.tri_pts = pts
        self.centers = pts.mean(axis=1)
        e1 = pts[:, 1] - pts[:, 0]
        e2 = pts[:, 2] - pts[:, 0]
        self.areas = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        fv = np.array([[f.v0, f.v1] for f in self.facets], dtype=int)
        self.facet_p0 = self.x[fv[:, 0]]
        tang = self.x[fv[:, 1]] - self.x[fv[:, 0]]
        self.facet_tangent = tang
        self.facet_len = np.hypot(tang[:, 0], tang[:, 1])
        # unnormalized global edge normal (t_y, -t_x); unit copy for SIP terms
        self.facet_m = np.column_stack([tang[:, 1], -tang[:, 0]])
        self.facet_n = self.facet_m / self.facet_len[:, None]
        # stored normals point away from the `left` triangle on interior
        # facets; on boundary facets the key ordering can leave them inward,
        # so keep an explicit outward sign for the one-sided terms
        out_sign = np.ones(self.n_facets)
        for i, f in enumerate(self.facets):
            if f.right is None:
                rel = self.centers[f.left] - self.facet_p0[i]
                if float(rel @ self.facet_n[i]) > 0:
                    out_sign[i] = -1.0
        self.facet_out_sign = out_sign
        # penalty length scale: element width normal to the facet
        # (2 min |T| / |e|); with the facet length itself, the inverse-trace
        # constant of thin layer elements grows like the aspect ratio and no
        # log-sized penalty can stabilize them
        h_pen = np.empty(self.n_facets)
        for i, f in enumerate(self.facets):
            amin = self.areas[f.left]
            if f.right is not None:
                amin = min(amin, self.areas[f.right])
            h_pen[i] = 2.0 * amin / self.facet_len[i]
        self.facet_h_pen = h_pen
        tri_facets = []
        for a, b, c in self.tris:
            ids = []
            for v0, v1 in ((a, b), (b, c), (c, a)):
                ids.append(self.facet_index[(min(v0, v1), max(v0, v1))])
            tri_facets.append(sorted(ids))
        self.tri_facets = np.array(tri_facets, dtype=int)
        dof_ids = np.empty((self.n_tri, 6), dtype=int)
        dof_ids[:, 0::2] = 2 * self.tri_facets
        dof_ids[:, 1::2] = 2 * self.tri_facets + 1
        self.tri_dof_ids = dof_ids

    def _build_local_bases(self):
        """Per triangle, the 6x6 map from the edge-moment DOF values to the
        local monomial coefficients [(1, xh, yh) per component]; the edge
        moments of linear traces are exact (trapezoid-type formulas)."""
        T = self.n_tri
        vander = np.zeros((T, 6, 6))
        for k in range(3):
            fi = self.tri_facets[:, k]                          # (T,)
            p0 = self.facet_p0[fi] - self.centers               # local coords
            p1 = p0 + self.facet_tangent[fi]
            m = self.facet_m[fi]                                # (T, 2)
            for b in range(6):
                comp, kind = divmod(b, 3)
                if kind == 0:
                    f0 = m[:, comp]
                    f1 = m[:, comp]
                else:
                    f0 = p0[:, kind - 1] * m[:, comp]
                    f1 = p1[:, kind - 1] * m[:, comp]
                vander[:, 2 * k, b] = 0.5 * (f0 + f1)
                vander[:, 2 * k + 1, b] = f0 / 6.0 + f1 / 3.0
        self.coeff_from_dofs = np.linalg.inv(vander)
        C = self.coeff_from_dofs
        grads = np.zeros((T, 6, 2, 2))                          # [t, j, comp, axis]
        grads[:, :, 0, 0] = C[:, 1, :]
        grads[:, :, 0, 1] = C[:, 2, :]
        grads[:, :, 1, 0] = C[:, 4, :]
        grads[:, :, 1, 1] = C[:, 5, :]
        self.shape_grads = grads
        self.shape_divs = C[:, 1, :] + C[:, 5, :]               # (T, 6)

    def psi_values(self, tri_ids, pts):
        """Local monomial basis values at points: (F, m, 6, 2)."""
        local = pts - self.centers[tri_ids][:, None, :]
        F, m = local.shape[:2]
        psi = np.zeros((F, m, 6, 2))
        psi[:, :, 0, 0] = 1.0
        psi[:, :, 1, 0] = local[..., 0]
        psi[:, :, 2, 0] = local[..., 1]
        psi[:, :, 3, 1] = 1.0
        psi[:, :, 4, 1] = local[..., 0]
        psi[:, :, 5, 1] = local[..., 1]
        return psi

    def shape_values(self, tri_ids, pts):
        """Shape-function values at points: (F, m, 6, 2)."""
        psi = self.psi_values(tri_ids, pts)
        return np.einsum("fbj,fmbc->fmjc", self.coeff_from_dofs[tri_ids], psi)

    def boundary_dof_mask(self):
        mask = np.zeros(self.n_vel, dtype=bool)
        for i, f in enumerate(self.facets):
            if f.right is None:
                mask[2 * i] = mask[2 * i + 1] = True
        return mask

    def boundary_dof_values(self, g):
        """Normal moments of the Dirichlet datum on boundary edges."""
        vals = np.zeros(self.n_vel)
        ts, ws = gauss_01(4)
        for i, f in enumerate(self.facets):
            if f.right is not None:
                continue
            pts = self.facet_p0[i][None, :] + ts[:, None] * self.facet_tangent[i][None, :]
            gv = np.asarray(g(pts), dtype=float)
            gn = gv @ self.facet_m[i]
            vals[2 * i] = float(np.dot(ws, gn))
            vals[2 * i + 1] = float(np.dot(ws, gn * ts))
        return vals

    def triangle_quad(self, degree, tri_ids=None):
        """Physical quadrature points/weights per triangle: (T, m, 2), (T, m)."""
        if tri_ids is None:
            tri_ids = np.arange(self.n_tri)
        ref_pts, ref_wts = simplex_rule(2, degree)
        origin = self.tri_pts[tri_ids, 0]
        E = self.tri_pts[tri_ids][:, 1:] - origin[:, None, :]   # (T, 2, 2)
        phys = np.einsum("qk,tkd->tqd", ref_pts, E) + origin[:, None, :]
        wts = ref_wts[None, :] * (2.0 * self.areas[tri_ids])[:, None]
        return phys, wts


@dataclass
class StokesSolution:
    space: DGSpace
    vel_dofs: np.ndarray     # all velocity DOF values (fixed ones included)
    coeffs: np.ndarray       # (T, 6) local monomial coefficients per triangle
    pressure: np.ndarray     # (T,) physical piecewise constants
    multiplier: float
    stats: dict

    def velocity_at(self, t, pts):
        local = pts - self.space.centers[t]
        c = self.coeffs[t]
        u = c[0] + c[1] * local[:, 0] + c[2] * local[:, 1]
        v = c[3] + c[4] * local[:, 0] + c[5] * local[:, 1]
        return np.column_stack([u, v])

    def velocity_gradient(self, t):
        c = self.coeffs[t]
        return np.array([[c[1], c[2]], [c[4], c[5]]])

    def elementwise_divergence(self):
        return self.coeffs[:, 1] + self.coeffs[:, 5]

    def max_normal_jump(self):
        """Largest normal-component mismatch across interior facets."""
        sp_ = self.space
        worst = 0.0
        ts = np.array([0.25, 0.75])
        for i, f in enumerate(sp_.facets):
            if f.right is None:
                continue
            pts = sp_.facet_p0[i][None, :] + ts[:, None] * sp_.facet_tangent[i][None, :]
            n = sp_.facet_n[i]
            jl = self.velocity_at(f.left, pts) @ n
            jr = self.velocity_at(f.right, pts) @ n
            worst = max(worst, float(np.max(np.abs(jl - jr))))
        return worst


def _facet_block(space, facet_ids, sides, gamma, nu, ts, ws):
    """SIP facet contributions for a batch of facets.

    `sides` is [(tri_ids, sign)] with one entry for boundary facets and two
    for interior ones; returns (ids, local) with shapes (F, n) and (F, n, n),
    plus the traces/gradn used for the data lift.
    """
    h_e = space.facet_len[facet_ids]
    h_pen = space.facet_h_pen[facet_ids]
    n = space.facet_n[facet_ids] * space.facet_out_sign[facet_ids][:, None]
    pts = (space.facet_p0[facet_ids][:, None, :]
           + ts[None, :, None] * space.facet_tangent[facet_ids][:, None, :])
    avg_w = 0.5 if len(sides) == 2 else 1.0
    traces, gradns, ids = [], [], []
    for tri_ids, sign in sides:
        shp = space.shape_values(tri_ids, pts)                  # (F, m, 6, 2)
        gn = np.einsum("fjca,fa->fjc", space.shape_grads[tri_ids], n)
        traces.append(sign * shp)
        gradns.append(avg_w * gn)
        ids.append(space.tri_dof_ids[tri_ids])
    trace = np.concatenate(traces, axis=2)                      # (F, m, n, 2)
    gradn = np.concatenate(gradns, axis=1)                      # (F, n, 2)
    ids = np.concatenate(ids, axis=1)                           # (F, n)
    wline = ws[None, :] * h_e[:, None]                          # (F, m)
    cons = np.einsum("fmac,fm,fbc->fab", trace, wline, gradn)
    pen = np.einsum("fmac,fm,fmbc->fab", trace, wline, trace)
    local = (-nu * (cons + cons.transpose(0, 2, 1))
             + (nu * gamma / h_pen)[:, None, None] * pen)
    return ids, local, trace, gradn, pts, wline


def assemble(space: DGSpace, case: StokesCase, gamma, quad_degree=8):
    """Assemble the SIP saddle-point system.

    Returns (K, rhs, free_ids, fixed_ids, fixed_values): K couples the free
    velocity DOFs, the area-scaled pressures and the zero-mean multiplier.
    """
    if gamma <= 0:
        raise ValueError("penalty parameter must be positive")
    nu = case.nu
    n_vel = space.n_vel
    n_tri = space.n_tri
    gamma = float(gamma)

    rows, cols, vals = [], [], []
    rhs_vel = np.zeros(n_vel)

    # volume terms: nu * area * (grad a : grad b), constants for P1 shapes
    G = space.shape_grads.reshape(n_tri, 6, 4)
    vol = nu * np.einsum("t,tak,tbk->tab", space.areas, G, G)
    ids = space.tri_dof_ids
    rows.append(np.repeat(ids, 6, axis=1).ravel())
    cols.append(np.tile(ids, (1, 6)).ravel())
    vals.append(vol.ravel())

    # facet terms
    ts, ws = gauss_01(2)
    interior = np.array([i for i, f in enumerate(space.facets)
                         if f.right is not None], dtype=int)
    boundary = np.array([i for i, f in enumerate(space.facets)
                         if f.right is None], dtype=int)
    left = np.array([space.facets[i].left for i in interior], dtype=int)
    right = np.array([space.facets[i].right for i in interior], dtype=int)
    if len(interior):
        fids, local, _, _, _, _ = _facet_block(
            space, interior, [(left, 1.0), (right, -1.0)], gamma, nu, ts, ws)
        nloc = fids.shape[1]
        rows.append(np.repeat(fids, nloc, axis=1).ravel())
        cols.append(np.tile(fids, (1, nloc)).ravel())
        vals.append(local.ravel())
    if len(boundary):
        bleft = np.array([space.facets[i].left for i in boundary], dtype=int)
        fids, local, trace, gradn, pts, wline = _facet_block(
            space, boundary, [(bleft, 1.0)], gamma, nu, ts, ws)
        rows.append(np.repeat(fids, 6, axis=1).ravel())
        cols.append(np.tile(fids, (1, 6)).ravel())
        vals.append(local.ravel())
        if not case.homogeneous_bc:
            # weak Dirichlet data in the jump slots (tangential part; the
            # normal part is fixed strongly through the boundary DOFs)
            F, m = pts.shape[:2]
            gv = case.boundary_g(pts.reshape(-1, 2)).reshape(F, m, 2)
            h_pen = space.facet_h_pen[boundary]
            lift = (-nu * np.einsum("fmc,fm,fac->fa", gv, wline, gradn)
                    + (nu * gamma / h_pen)[:, None]
                    * np.einsum("fmc,fm,fmac->fa", gv, wline, trace))
            np.add.at(rhs_vel, fids.ravel(), lift.ravel())

    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_vel, n_vel)).tocsr()
    A = 0.5 * (A + A.T)  # the form is symmetric; remove summation roundoff

    # body force: int_T f . shape; layer elements of very small eps get a
    # doubled rule, mirroring the error-integral policy
    for ids_group, degree in _quad_groups(space, case, quad_degree):
        if not len(ids_group):
            continue
        phys, wts = space.triangle_quad(degree, ids_group)
        flat = phys.reshape(-1, 2)
        fv = np.stack([case.f[0].eval(flat), case.f[1].eval(flat)],
                      axis=1).reshape(len(ids_group), -1, 2)
        shp = space.shape_values(ids_group, phys)
        contrib = np.einsum("tm,tmjc,tmc->tj", wts, shp, fv)
        np.add.at(rhs_vel, space.tri_dof_ids[ids_group].ravel(), contrib.ravel())

    # continuity rows, scaled to enforce the divergence value itself
    B = sp.coo_matrix(
        (-space.shape_divs.ravel(),
         (np.repeat(np.arange(n_tri), 6), space.tri_dof_ids.ravel())),
        shape=(n_tri, n_vel)).tocsr()

    fixed_mask = space.boundary_dof_mask()
    free_ids = np.where(~fixed_mask)[0]
    fixed_ids = np.where(fixed_mask)[0]
    fixed_values = space.boundary_dof_values(case.boundary_g)[fixed_ids]

    A_ff = A[free_ids][:, free_ids]
    A_fc = A[free_ids][:, fixed_ids]
    B_f = B[:, free_ids]
    B_c = B[:, fixed_ids]

    rhs_u = rhs_vel[free_ids] - A_fc @ fixed_values
    rhs_p = -B_c @ fixed_values

    ones = sp.csr_matrix(np.ones((n_tri, 1)))
    K = sp.bmat([[A_ff, B_f.T, None],
                 [B_f, None, ones],
                 [None, ones.T, None]], format="csc")
    rhs = np.concatenate([rhs_u, rhs_p, [0.0]])
    return K, rhs, free_ids, fixed_ids, fixed_values


def velocity_block(space: DGSpace, case: StokesCase, gamma):
    """The SIP bilinear-form matrix on the free velocity DOFs (for symmetry
    and positivity diagnostics)."""
    K, _, free_ids, _, _ = assemble(space, case, gamma)
    n = len(free_ids)
    return K[:n, :n]


def solve(space: DGSpace, case: StokesCase, gamma, quad_degree=8) -> StokesSolution:
    K, rhs, free_ids, fixed_ids, fixed_values = assemble(
        space, case, gamma, quad_degree)
    x = spla.spsolve(K, rhs)
    denom = float(np.linalg.norm(rhs))
    residual = float(np.linalg.norm(K @ x - rhs)) / (denom if denom else 1.0)
    n_free = len(free_ids)
    vel = np.zeros(space.n_vel)
    vel[free_ids] = x[:n_free]
    vel[fixed_ids] = fixed_values
    p_scaled = x[n_free:n_free + space.n_tri]
    multiplier = float(x[-1])
    coeffs = np.einsum("tbj,tj->tb", space.coeff_from_dofs,
                       vel[space.tri_dof_ids])
    pressure = p_scaled / space.areas
    stats = {
        "residual": residual,
        "n_unknowns": K.shape[0],
        "nnz": int(K.nnz),
        "multiplier": multiplier,
        "div_max": float(np.max(np.abs(coeffs[:, 1] + coeffs[:, 5]))),
    }
    if residual > 1e-10:
        stats["warning"] = "solver residual above contract"
    if stats["div_max"] > 1e-12:
        stats["warning_div"] = "elementwise divergence above contract"
    return StokesSolution(space, vel, coeffs, pressure, multiplier, stats)


def _quad_groups(space, case, quad_degree):
    """Triangles grouped by quadrature degree: the default rule, doubled on
    layer elements when epsilon is at or below 1e-3."""
    tri_ids = np.arange(space.n_tri)
    if case.epsilon > 1e-3:
        return [(tri_ids, quad_degree)]
    layer_width = 3.0 * case.epsilon * abs(math.log(case.epsilon))
    in_layer = space.tri_pts[:, :, 0].min(axis=1) < layer_width
    return [(tri_ids[in_layer], 2 * quad_degree),
            (tri_ids[~in_layer], quad_degree)]


def errors(sol: StokesSolution, case: StokesCase, quad_degree=8):
    """(broken H1 velocity error, L2 pressure error with the exact pressure
    shifted to the zero-mean gauge).  Layer elements get a doubled rule for
    very small epsilon."""
    space = sol.space
    err_grad_sq = 0.0
    err_p_sq = 0.0
    for ids, degree in _quad_groups(space, case, quad_degree):
        if not len(ids):
            continue
        phys, wts = space.triangle_quad(degree, ids)
        flat = phys.reshape(-1, 2)
        m = phys.shape[1]
        diff_sq = np.zeros((len(ids), m))
        gh = np.stack([sol.coeffs[ids][:, 1], sol.coeffs[ids][:, 2],
                       sol.coeffs[ids][:, 4], sol.coeffs[ids][:, 5]], axis=1)
        for pos, (comp, axis) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
            exact = case.grad_u[comp][axis].eval(flat).reshape(len(ids), m)
            diff_sq += (exact - gh[:, pos][:, None]) ** 2
        err_grad_sq += float(np.sum(wts * diff_sq))
        p_exact = case.p.eval(flat).reshape(len(ids), m) - case.pressure_mean
        err_p_sq += float(np.sum(wts * (p_exact - sol.pressure[ids][:, None]) ** 2))
    return math.sqrt(err_grad_sq), math.sqrt(err_p_sq)


def interpolate_exact_solution(space: DGSpace, case: StokesCase):
    """Baseline: velocity from edge moments of the exact solution, pressure
    from elementwise means; useful as an interpolation-error yardstick."""
    ts, ws = gauss_01(6)
    pts = (space.facet_p0[:, None, :]
           + ts[None, :, None] * space.facet_tangent[:, None, :])
    flat = pts.reshape(-1, 2)
    uv = np.stack([case.u[0].eval(flat), case.u[1].eval(flat)],
                  axis=1).reshape(space.n_facets, -1, 2)
    un = np.einsum("fmc,fc->fm", uv, space.facet_m)
    vel = np.empty(space.n_vel)
    vel[0::2] = un @ ws
    vel[1::2] = un @ (ws * ts)
    coeffs = np.einsum("tbj,tj->tb", space.coeff_from_dofs,
                       vel[space.tri_dof_ids])
    phys, wts = space.triangle_quad(8)
    pvals = case.p.eval(phys.reshape(-1, 2)).reshape(space.n_tri, -1)
    pressure = (np.sum(wts * (pvals - case.pressure_mean), axis=1)
                / np.sum(wts, axis=1))
    return StokesSolution(space, vel, coeffs, pressure, 0.0,
                          {"kind": "interpolant"})


# ---------------------------------------------------------------------------
# convergence study

STUDY_COLUMNS = ["epsilon", "mesh_kind", "N", "ndof", "tau", "sigma", "gamma",
                 "err_grad_u", "err_p", "rate_u", "rate_p"]


def study_mesh(kind, N, eps, log_convention="natural"):
    if kind == "uniform":
        mesh = build_uniform(N)
        tau = 0.5
    elif kind == "shishkin":
        tau = transition_point(eps, log_convention)
        mesh = build_shishkin(ShishkinParams(N=N, epsilon=float(eps), tau=tau))
    else:
        raise ValueError(f"unknown mesh kind {kind!r}")
    return mesh, float(tau)


def convergence_study(eps_list, N_list, kind, log_convention="natural",
                      gamma_override=None, quad_degree=8, nu=1.0):
    """One row per (epsilon, N): errors, parameters and observed rates."""
    rows = []
    for eps in eps_list:
        case = manufactured_case(eps, nu)
        prev = None
        for N in N_list:
            mesh, tau = study_mesh(kind, N, eps, log_convention)
            sigma = mesh_aspect_ratio(mesh)
            gamma = gamma_override if gamma_override is not None else penalty(
                sigma, 1, log_convention)
            space = DGSpace(mesh)
            sol = solve(space, case, gamma, quad_degree)
            err_u, err_p = errors(sol, case, quad_degree)
            rate_u = math.log2(prev[0] / err_u) if prev else None
            rate_p = math.log2(prev[1] / err_p) if prev else None
            prev = (err_u, err_p)
            rows.append({
                "epsilon": float(eps), "mesh_kind": kind, "N": N,
                "ndof": space.ndof, "tau": tau, "sigma": sigma,
                "gamma": gamma, "err_grad_u": err_u, "err_p": err_p,
                "rate_u": rate_u, "rate_p": rate_p,
                "div_max": float(np.max(np.abs(sol.elementwise_divergence()))),
                "jump_max": sol.max_normal_jump(),
                "residual": sol.stats["residual"],
            })
    return rows


def study_to_csv(rows, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(STUDY_COLUMNS)
        for r in rows:
            writer.writerow([_cell(r[c]) for c in STUDY_COLUMNS])


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, (int, str)):
        return x
    return repr(float(x))
