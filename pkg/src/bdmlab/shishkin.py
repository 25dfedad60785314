"""Piecewise-uniform layer-adapted (and uniform) triangulations of the unit
square, with transition-point and aspect-ratio diagnostics.

Coordinates are kept as exact rationals whenever the transition point is
rational, so the total mesh area is exactly 1 in that mode.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional


def transition_point(eps, convention="natural", factor=3):
    """tau = min(1/2, 3 eps |log eps|), with the log base configurable.

    Returns an exact Fraction in base-10 mode when eps is an exact negative
    power of ten, a float otherwise.
    """
    eps_f = float(eps)
    if not 0 < eps_f < 1:
        raise ValueError("eps must lie in (0, 1)")
    if convention == "natural":
        tau = factor * eps_f * abs(math.log(eps_f))
        return min(0.5, tau)
    if convention == "base10":
        fr = Fraction(eps).limit_denominator(10 ** 15)
        if fr.numerator == 1 and _is_power_of_ten(fr.denominator):
            exponent = round(math.log10(fr.denominator))
            tau = Fraction(factor, 1) * fr * exponent
            return min(Fraction(1, 2), tau)
        tau = factor * eps_f * abs(math.log10(eps_f))
        return min(0.5, tau)
    raise ValueError(f"unknown log convention {convention!r}")


def _is_power_of_ten(n):
    while n % 10 == 0:
        n //= 10
    return n == 1


def aspect_ratio(tau):
    """Closed-form aspect ratio of the layer-column right triangles:
    sqrt(1 + 4 tau^2) / (1 + 2 tau - sqrt(1 + 4 tau^2))."""
    t = float(tau)
    if not 0 < t < 1:
        raise ValueError("tau must lie in (0, 1)")
    root = math.sqrt(1.0 + 4.0 * t * t)
    return root / (1.0 + 2.0 * t - root)


def triangle_aspect_ratio(pts):
    """Longest edge over twice the inradius."""
    a = math.dist(pts[0], pts[1])
    b = math.dist(pts[1], pts[2])
    c = math.dist(pts[2], pts[0])
    s = 0.5 * (a + b + c)
    area = math.sqrt(max(s * (s - a) * (s - b) * (s - c), 0.0))
    inradius = area / s
    return max(a, b, c) / (2.0 * inradius)


@dataclass(frozen=True)
class ShishkinParams:
    N: int
    epsilon: float
    tau: object = None              # Fraction or float; derived when None
    log_convention: str = "natural"

    def resolved_tau(self):
        if self.tau is not None:
            return self.tau
        return transition_point(self.epsilon, self.log_convention)


@dataclass(frozen=True)
class Facet:
    v0: int
    v1: int
    left: int                      # triangle index
    right: Optional[int] = None    # None on the boundary
    boundary_tag: Optional[str] = None


@dataclass
class Mesh2D:
    vertices: list
    triangles: list
    facets: list = field(default_factory=list)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def triangle_points(self, t):
        return [self.vertices[i] for i in self.triangles[t]]

    def triangle_area(self, t):
        (x0, y0), (x1, y1), (x2, y2) = self.triangle_points(t)
        return ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)) / 2

    def boundary_facets(self):
        return [f for f in self.facets if f.right is None]

    def interior_facets(self):
        return [f for f in self.facets if f.right is not None]

    def build_facets(self):
        """Unique edges with their incident triangles; left = the triangle
        for which the edge normal (t_y, -t_x) points outward."""
        edge_tris = {}
        for t, (a, b, c) in enumerate(self.triangles):
            for v0, v1 in ((a, b), (b, c), (c, a)):
                key = (min(v0, v1), max(v0, v1))
                edge_tris.setdefault(key, []).append(t)
        facets = []
        for (v0, v1) in sorted(edge_tris):
            tris = edge_tris[(v0, v1)]
            if len(tris) not in (1, 2):
                raise ValueError("non-conforming mesh")
            p0, p1 = self.vertices[v0], self.vertices[v1]
            normal = (p1[1] - p0[1], -(p1[0] - p0[0]))
            left = None
            right = None
            for t in tris:
                other = next(i for i in self.triangles[t] if i not in (v0, v1))
                po = self.vertices[other]
                side = (po[0] - p0[0]) * normal[0] + (po[1] - p0[1]) * normal[1]
                if side < 0:
                    left = t
                else:
                    right = t
            tag = None
            if len(tris) == 1:
                if left is None:
                    left, right = right, None
                tag = self._boundary_tag(p0, p1)
            facets.append(Facet(v0, v1, left, right, tag))
        self.facets = facets
        return self

    @staticmethod
    def _boundary_tag(p0, p1):
        if p0[0] == p1[0] == 0:
            return "left"
        if p0[0] == p1[0] == 1:
            return "right"
        if p0[1] == p1[1] == 0:
            return "bottom"
        if p0[1] == p1[1] == 1:
            return "top"
        return "boundary"


def _x_coordinates(N, tau):
    """Piecewise-uniform abscissae: N/2+1 points in [0, tau], N/2+1 in
    [tau, 1] sharing the transition point."""
    half = N // 2
    exact = isinstance(tau, (Fraction, int))
    tau = Fraction(tau) if exact else float(tau)
    one = Fraction(1) if exact else 1.0
    xs = [tau * 2 * i / N if exact else tau * 2.0 * i / N for i in range(half + 1)]
    for i in range(half + 1, N + 1):
        step = (one - tau) * 2 * (i - half) / N
        xs.append(tau + step)
    return xs


def build_shishkin(params: ShishkinParams) -> Mesh2D:
    """Tensor grid with the layer-graded x direction, each rectangle split
    along the lower-left to upper-right diagonal."""
    N = params.N
    if N < 2 or N % 2:
        raise ValueError("N must be even and >= 2")
    tau = params.resolved_tau()
    xs = _x_coordinates(N, tau)
    exact = isinstance(tau, (Fraction, int))
    ys = [Fraction(j, N) if exact else j / N for j in range(N + 1)]
    vertices = []
    for j in range(N + 1):
        for i in range(N + 1):
            vertices.append((xs[i], ys[j]))

    def vid(i, j):
        return j * (N + 1) + i

    triangles = []
    for j in range(N):
        for i in range(N):
            ll, lr = vid(i, j), vid(i + 1, j)
            ul, ur = vid(i, j + 1), vid(i + 1, j + 1)
            triangles.append((ll, lr, ur))
            triangles.append((ll, ur, ul))
    return Mesh2D(vertices, triangles).build_facets()


def build_uniform(N: int) -> Mesh2D:
    """Uniform grid: the layer construction with the transition at 1/2."""
    if N == 1:
        mesh = Mesh2D([(Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)),
                       (Fraction(0), Fraction(1)), (Fraction(1), Fraction(1))],
                      [(0, 1, 3), (0, 3, 2)])
        return mesh.build_facets()
    return build_shishkin(ShishkinParams(N=N, epsilon=0.5, tau=Fraction(1, 2)))


def mesh_aspect_ratio(mesh: Mesh2D):
    """Max elementwise longest-edge / (2 inradius)."""
    return max(triangle_aspect_ratio([(float(x), float(y))
                                      for x, y in mesh.triangle_points(t)])
               for t in range(mesh.n_triangles))


# ---------------------------------------------------------------------------
# text format: "dim nv nt", vertex lines, then 0-based triangle lines

def write_mesh(mesh: Mesh2D, path):
    with open(path, "w") as fh:
        fh.write(mesh_to_text(mesh))


def mesh_to_text(mesh: Mesh2D):
    lines = [f"2 {mesh.n_vertices} {mesh.n_triangles}"]
    for x, y in mesh.vertices:
        lines.append(f"{_token(x)} {_token(y)}")
    for a, b, c in mesh.triangles:
        lines.append(f"{a} {b} {c}")
    return "\n".join(lines) + "\n"


def read_mesh(path) -> Mesh2D:
    with open(path) as fh:
        return mesh_from_text(fh.read())


def mesh_from_text(text) -> Mesh2D:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    dim, nv, nt = (int(x) for x in lines[0].split())
    if dim != 2:
        raise ValueError("only 2D meshes supported")
    vertices = []
    for ln in lines[1:1 + nv]:
        a, b = ln.split()
        vertices.append((_untoken(a), _untoken(b)))
    triangles = []
    for ln in lines[1 + nv:1 + nv + nt]:
        a, b, c = (int(x) for x in ln.split())
        triangles.append((a, b, c))
    return Mesh2D(vertices, triangles).build_facets()


def _token(x):
    if isinstance(x, (Fraction, int)):
        x = Fraction(x)
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def _untoken(tok):
    if "/" in tok:
        num, den = tok.split("/")
        return Fraction(int(num), int(den))
    return float(tok)
