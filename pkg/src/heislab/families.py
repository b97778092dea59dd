"""Counterexample families for the averaging and maximal operators.

Each family packages an input field, a thin test region with its own
measure-correct lattice, a time selector, and a predicted power of delta
for the ratio |Mf|_q / |f|_p.  Running a family down a delta ladder and
fitting the log-log slope reproduces the necessary-condition exponents.

Test regions are parametrized over the unit cube with explicit Jacobians,
so thin slabs are integrated in coordinates aligned with their thin
directions.  All per-axis lattice counts are fixed along the ladder while
the coordinate ranges scale linearly with delta; relative quadrature bias
is then delta-independent and cancels in the fitted slope.
"""

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .groups import DomainError, MetivierStructure, standard_heisenberg
from .spheres import (ScalarField, SphereRule, TimeSelector,
                      fixed_time_selector, operator_ratio, sphere_rule)

FAMILIES = ("ball", "scaling", "knapp", "stein", "moment")


@dataclass(frozen=True)
class ParamRegion:
    """Region given by a unit-cube parametrization with Jacobian weight.

    mapper sends a (count, k) batch of cube points to (count, d) group
    coordinates; jacobian gives the volume factor so that integrals over
    the region equal integrals of F(mapper(u)) * jacobian(u) over the cube.
    """

    dim: int
    mapper: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    counts: Tuple[int, ...]

    def lattice(self) -> np.ndarray:
        axes = [(np.arange(c) + 0.5) / c for c in self.counts]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def points_and_weights(self):
        u = self.lattice()
        pts = self.mapper(u)
        w = np.asarray(self.jacobian(u), dtype=float) / len(u)
        return pts, w

    def lq_norm(self, values_fn, q: float) -> float:
        pts, w = self.points_and_weights()
        vals = np.abs(np.asarray(values_fn(pts), dtype=float))
        if np.isinf(q):
            return float(vals.max())
        return float((np.sum(vals ** q * w)) ** (1.0 / q))

    def mean_value(self, values_fn) -> float:
        pts, w = self.points_and_weights()
        vals = np.asarray(values_fn(pts), dtype=float)
        total = float(np.sum(w))
        return float(np.sum(vals * w) / total)


@dataclass(frozen=True)
class ExampleInstance:
    """One counterexample family at a fixed scale."""

    family: str
    delta: float
    structure: MetivierStructure
    field: ScalarField
    test_region: Optional[ParamRegion]
    field_region: Optional[ParamRegion]
    selector: TimeSelector
    rule: SphereRule
    field_lattice: int = 24

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")


# --- family constants ----------------------------------------------------

def _specnorm(M):
    return float(np.linalg.norm(M, 2))


def c_ring(s: MetivierStructure) -> float:
    """10 (1 + |Lambda| + max_i |J_i|), the ball-family window constant."""
    return 10.0 * (1.0 + _specnorm(s.Lambda) + max(_specnorm(J) for J in s.J))


def c_zero(s: MetivierStructure) -> float:
    """10 sum_i |J_i|, the scaling-family window constant."""
    return 10.0 * sum(_specnorm(J) for J in s.J)


def c_one(s: MetivierStructure) -> float:
    """10 (1 + 2 |Lambda|), the knapp-family window constant.

    This is the smallest constant for which the slab catches every cap
    image: the in-plane displacement is at most 10 delta, the center
    displacement at most (5 + 20 |Lambda|) delta.  Any larger constant
    also works asymptotically, but it postpones the onset of the
    delta^(1/2) ratio law to delta well below 1/(2 C1), which matters on
    short ladders.
    """
    return 10.0 * (1.0 + 2.0 * _specnorm(s.Lambda))


def _check_delta(delta: float):
    if not 0.0 < delta <= 0.25:
        raise DomainError("delta must lie in (0, 1/4]")


# --- sphere direction parametrizations ----------------------------------

def _circle_dir(u: np.ndarray):
    ang = 2.0 * np.pi * u
    return np.stack([np.cos(ang), np.sin(ang)], axis=1), 2.0 * np.pi


def _hopf_dir(u: np.ndarray):
    # (v, a1, a2) in the cube -> S^3; surface measure 1/2 dv da1 da2.
    v, a1, a2 = u[:, 0], 2 * np.pi * u[:, 1], 2 * np.pi * u[:, 2]
    r0 = np.sqrt(1.0 - v)
    r1 = np.sqrt(v)
    dirs = np.stack([r0 * np.cos(a1), r0 * np.sin(a1),
                     r1 * np.cos(a2), r1 * np.sin(a2)], axis=1)
    return dirs, 0.5 * (2 * np.pi) ** 2


def _sphere_dir(n: int, u: np.ndarray):
    if n == 1:
        return _circle_dir(u[:, 0])
    if n == 2:
        return _hopf_dir(u[:, :3])
    raise DomainError("direction parametrization implemented for n <= 2")


def _dir_dims(n: int) -> int:
    return 1 if n == 1 else 3


def default_sphere_resolution(n: int, delta: float) -> int:
    """Per-factor node count keeping the nodes-per-cap count stable in delta."""
    if n == 1:
        return max(256, int(math.ceil(64.0 / delta)))
    return max(16, int(round(2.0 / delta)))


# --- ball family ---------------------------------------------------------

def _indicator(test) -> Callable[[np.ndarray], np.ndarray]:
    def ev(pts):
        return test(pts).astype(float)
    return ev


def ball_example(s: MetivierStructure, delta: float,
                 sphere_resolution: Optional[int] = None,
                 region_counts: Optional[Tuple[int, ...]] = None,
                 ) -> ExampleInstance:
    """Indicator of the 10 delta ball against the shell-adapted slab.

    Test region: 9/8 <= |ubar x| <= 15/8 with the center coordinate within
    delta/C of the tilt sheet, selector t(x) = |ubar x|.
    """
    _check_delta(delta)
    n, m, d = s.n, s.m, s.d
    two_n = 2 * n
    C = c_ring(s)
    r_ball = 10.0 * delta

    def inside(pts):
        return (np.linalg.norm(pts, axis=1) <= r_ball)

    f = ScalarField(_indicator(inside), -r_ball * np.ones(d),
                    r_ball * np.ones(d), f"ball indicator delta={delta}")

    dd = _dir_dims(n)
    half_b = delta / C

    def mapper(u):
        r = 9.0 / 8.0 + (6.0 / 8.0) * u[:, 0]
        dirs, _ = _sphere_dir(n, u[:, 1:1 + dd])
        ubar = r[:, None] * dirs
        b = half_b * (2.0 * u[:, 1 + dd:1 + dd + m] - 1.0)
        bar = b + r[:, None] * (ubar @ s.Lambda.T)
        return np.concatenate([ubar, bar], axis=1)

    def jac(u):
        r = 9.0 / 8.0 + (6.0 / 8.0) * u[:, 0]
        _, ang = _sphere_dir(n, u[:, 1:1 + dd])
        return (6.0 / 8.0) * r ** (two_n - 1) * ang * (2.0 * half_b) ** m

    if region_counts is None:
        region_counts = (8, 16, 8) if n == 1 else (3, 4, 6, 6, 4)
    region = ParamRegion(dim=1 + dd + m, mapper=mapper, jacobian=jac,
                         counts=region_counts)
    res = sphere_resolution or default_sphere_resolution(n, delta)
    rule = sphere_rule(n, res)
    sel = TimeSelector(kind="map",
                       mapper=lambda pts: np.linalg.norm(pts[:, :two_n], axis=1))
    return ExampleInstance("ball", delta, s, f, region, None, sel, rule)


# --- scaling family ------------------------------------------------------

def scaling_example(s: MetivierStructure, delta: float, t: float = 1.5,
                    sphere_resolution: Optional[int] = None,
                    region_counts: Optional[Tuple[int, ...]] = None,
                    ) -> ExampleInstance:
    """Fixed-time shell indicator tested near the origin.

    Field: indicator of ||ubar y| - t| <= C0 delta, |ybar - t Lambda
    ubar y| <= C0 delta.  Test region: |ubar x| <= delta with the center
    within delta of the tilt sheet; the average there is order one.
    """
    _check_delta(delta)
    if not 1.0 <= t <= 2.0:
        raise DomainError("t must lie in [1, 2]")
    n, m, d = s.n, s.m, s.d
    two_n = 2 * n
    C0 = c_zero(s)
    shell = C0 * delta

    def inside(pts):
        ubar = pts[:, :two_n]
        r = np.linalg.norm(ubar, axis=1)
        bar = pts[:, two_n:]
        dev = bar - t * (ubar @ s.Lambda.T)
        return ((np.abs(r - t) <= shell)
                & np.all(np.abs(dev) <= shell, axis=1))

    r_hi = t + shell
    bar_hw = shell + t * _specnorm(s.Lambda) * r_hi
    lo = np.concatenate([-r_hi * np.ones(two_n), -bar_hw * np.ones(m)])
    hi = -lo
    f = ScalarField(_indicator(inside), lo, hi,
                    f"shell indicator delta={delta} t={t}")

    dd = _dir_dims(n)

    # Field support in adapted shell coordinates: exact up to the smooth
    # radial Jacobian, so the denominator norm carries no delta-dependent
    # lattice bias.
    def f_mapper(u):
        r = (t - shell) + 2.0 * shell * u[:, 0]
        dirs, _ = _sphere_dir(n, u[:, 1:1 + dd])
        ubar = r[:, None] * dirs
        b = shell * (2.0 * u[:, 1 + dd:1 + dd + m] - 1.0)
        bar = b + t * (ubar @ s.Lambda.T)
        return np.concatenate([ubar, bar], axis=1)

    def f_jac(u):
        r = (t - shell) + 2.0 * shell * u[:, 0]
        _, ang = _sphere_dir(n, u[:, 1:1 + dd])
        return 2.0 * shell * r ** (two_n - 1) * ang * (2.0 * shell) ** m

    def r_mapper(u):
        rho = delta * u[:, 0] ** (1.0 / two_n)
        dirs, _ = _sphere_dir(n, u[:, 1:1 + dd])
        ubar = rho[:, None] * dirs
        b = delta * (2.0 * u[:, 1 + dd:1 + dd + m] - 1.0)
        bar = b + t * (ubar @ s.Lambda.T)
        return np.concatenate([ubar, bar], axis=1)

    def r_jac(u):
        # equidistributed radial substitution: rho^{2n-1} drho = delta^{2n}/(2n) du
        _, ang = _sphere_dir(n, u[:, 1:1 + dd])
        return delta ** two_n / two_n * ang * np.ones(len(u)) * (2.0 * delta) ** m

    if region_counts is None:
        counts = (8, 16, 8) if n == 1 else (4, 4, 8, 8, 4)
    else:
        counts = region_counts
    region = ParamRegion(1 + dd + m, r_mapper, r_jac, counts)
    fregion = ParamRegion(1 + dd + m, f_mapper, f_jac, counts)
    res = sphere_resolution or (256 if n == 1 else 16)
    rule = sphere_rule(n, res)
    return ExampleInstance("scaling", delta, s, f, region, fregion,
                           fixed_time_selector(t), rule)


# --- knapp family --------------------------------------------------------

def knapp_frame(s: MetivierStructure):
    """(u, v, basis of the complement) for the anisotropic slab geometry.

    u is the unit tilt direction (e_1 when Lambda = 0), v = Ju/|Ju|; the
    plane span{u, v} and its orthogonal complement are both J-invariant
    when J^2 = -I.
    """
    if s.m != 1:
        raise DomainError("this family needs a one-dimensional center")
    two_n = 2 * s.n
    J = s.J[0]
    if _specnorm(J @ J + np.eye(two_n)) > 1e-10:
        raise DomainError("this family needs the normalization J^2 = -I")
    lam = s.Lambda[0]
    if np.linalg.norm(lam) > 0:
        u = lam / np.linalg.norm(lam)
    else:
        u = np.zeros(two_n)
        u[0] = 1.0
    v = J @ u
    v = v / np.linalg.norm(v)
    W = np.stack([u, v], axis=1)
    # complement basis from the SVD of the projector
    q, _ = np.linalg.qr(np.concatenate([W, np.eye(two_n)], axis=1))
    comp = q[:, 2:two_n]
    return u, v, comp


def knapp_example(s: MetivierStructure, delta: float,
                  sphere_resolution: Optional[int] = None,
                  region_counts: Optional[Tuple[int, ...]] = None,
                  ) -> ExampleInstance:
    """Anisotropic slab aligned with a flat direction of the incidence set.

    Field: indicator of |P_perp ubar y| <= C1 sqrt(delta), |P ubar y| <=
    C1 delta, |y_d| <= C1 delta, where P projects onto span{u, v}.  Test
    region: sqrt(delta)-tube over an arc window, selector t(x) =
    |P ubar x|.
    """
    _check_delta(delta)
    n, d = s.n, s.d
    two_n = 2 * n
    if n < 2:
        raise DomainError("the slab needs a nontrivial complement, n >= 2")
    C1 = c_one(s)
    u_dir, v_dir, comp = knapp_frame(s)
    P = np.outer(u_dir, u_dir) + np.outer(v_dir, v_dir)
    lam = s.Lambda[0]
    sq = math.sqrt(delta)

    hw_plane = C1 * delta
    hw_perp = C1 * sq

    def inside(pts):
        ubar = pts[:, :two_n]
        yd = pts[:, two_n]
        in_plane = ubar @ P.T
        perp = ubar - in_plane
        return ((np.linalg.norm(perp, axis=1) <= hw_perp)
                & (np.linalg.norm(in_plane, axis=1) <= hw_plane)
                & (np.abs(yd) <= C1 * delta))

    plane_part = np.sqrt(u_dir ** 2 + v_dir ** 2)
    perp_part = np.sqrt(np.maximum(0.0, 1.0 - plane_part ** 2))
    hw = hw_plane * plane_part + hw_perp * perp_part
    lo = np.concatenate([-hw, [-C1 * delta]])
    f = ScalarField(_indicator(inside), lo, -lo,
                    f"knapp slab delta={delta}")

    # Test region coordinates: polar radius/angle in the plane, polar
    # coordinates in the sqrt(delta)-thin complement, sheared center.
    phi_lo, phi_hi = 0.73, 0.84
    k_perp = two_n - 2

    def split(u):
        rho = 9.0 / 8.0 + (6.0 / 8.0) * u[:, 0]
        phi = phi_lo + (phi_hi - phi_lo) * u[:, 1]
        rperp = sq * u[:, 2] ** (1.0 / k_perp) if k_perp > 0 else None
        return rho, phi, rperp

    def mapper(u):
        rho, phi, rperp = split(u)
        ubar = (rho * np.cos(phi))[:, None] * u_dir + \
               (rho * np.sin(phi))[:, None] * v_dir
        if k_perp == 2:
            psi = 2.0 * np.pi * u[:, 3]
            w = rperp[:, None] * (np.cos(psi)[:, None] * comp[:, 0]
                                  + np.sin(psi)[:, None] * comp[:, 1])
            ubar = ubar + w
            bcol = 4
        else:
            raise DomainError("region parametrization implemented for n = 2")
        b = delta * (2.0 * u[:, bcol] - 1.0)
        t_here = rho
        bar = b + t_here * (ubar @ lam)
        return np.concatenate([ubar, bar[:, None]], axis=1)

    def jac(u):
        rho, phi, rperp = split(u)
        # plane polar: rho drho dphi; complement polar via equidistributed
        # radius: rperp dr dpsi = delta/2 du dpsi for k_perp = 2
        return ((6.0 / 8.0) * rho * (phi_hi - phi_lo)
                * (delta / 2.0) * (2.0 * np.pi)
                * (2.0 * delta) * np.ones(len(u)))

    if region_counts is None:
        region_counts = (3, 4, 4, 5, 4)
    region = ParamRegion(dim=5, mapper=mapper, jacobian=jac,
                         counts=region_counts)
    if sphere_resolution is None:
        # caps are delta-thin in the Hopf latitude and sqrt(delta)-wide in
        # the angles; match the rule to that anisotropy
        c_lat = max(24, int(math.ceil(3.0 / delta)))
        c_ang = max(24, int(math.ceil(10.0 / sq)))
        sphere_resolution = (c_lat, c_ang, c_ang)
    rule = sphere_rule(n, sphere_resolution, latitude="uniform")

    def t_of(pts):
        return np.linalg.norm(pts[:, :two_n] @ P.T, axis=1)

    sel = TimeSelector(kind="map", mapper=t_of)
    return ExampleInstance("knapp", delta, s, f, region, None, sel, rule)


# --- stein density -------------------------------------------------------

def stein_example(s: MetivierStructure, alpha: float,
                  cutoff: float) -> ExampleInstance:
    """Singular density whose spherical means diverge as the cutoff shrinks.

    f(v) = |ubar v|^{-(2n-1)} |log |ubar v||^{-alpha} on cutoff <=
    |ubar v| <= 1/2, |vbar| <= 1.  The density lies in L^{2n/(2n-1)} for
    alpha above the conjugate threshold, yet its maximal function is
    infinite on a set of positive measure in the limit.
    """
    if s.m != 1:
        raise DomainError("this family needs a one-dimensional center")
    n = s.n
    p2 = 2.0 * n / (2.0 * n - 1.0)
    if not 1.0 / p2 < alpha < 1.0:
        raise DomainError("alpha must lie strictly between 1/p2 and 1")
    if not 0.0 < cutoff < 0.5:
        raise DomainError("cutoff must lie in (0, 1/2)")
    two_n = 2 * n

    def ev(pts):
        ubar = pts[:, :two_n]
        r = np.linalg.norm(ubar, axis=1)
        vbar = pts[:, two_n]
        ok = (r >= cutoff) & (r <= 0.5) & (np.abs(vbar) <= 1.0)
        out = np.zeros(len(pts))
        rr = np.where(ok, r, 1.0)
        out[ok] = (rr[ok] ** (-(two_n - 1))
                   * np.abs(np.log(rr[ok])) ** (-alpha))
        return out

    lo = np.concatenate([-0.5 * np.ones(two_n), [-1.0]])
    f = ScalarField(ev, lo, -lo, f"stein density alpha={alpha} eps={cutoff}")
    sel = TimeSelector(
        kind="map",
        mapper=lambda pts: np.linalg.norm(pts[:, :two_n], axis=1))
    rule = sphere_rule(n, 512 if n == 1 else 24)
    return ExampleInstance("stein", cutoff, s, f, None, None, sel, rule)


STEIN_PROBE = (1.5, 0.0, 0.0)


def stein_probe_curve(alpha: float, j_hi: int, j_lo: int = 2,
                      panel_nodes: int = 32) -> np.ndarray:
    """Truncated spherical mean at a fixed probe versus the cutoff level.

    For the probe x = (3/2, 0, 0) with t = |ubar x| on the standard
    3-dimensional group, the horizontal radius along the circle is
    r(s) = 2t sin(s/2).  The mean of the density truncated at 2^{-j} is
    accumulated dyadic panel by dyadic panel with Gauss-Legendre nodes,
    so the returned sequence value[j] is increasing in j by construction.

    Returns an array of (j, value) rows for j = j_lo .. j_hi.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    t = STEIN_PROBE[0]
    gl_x, gl_w = np.polynomial.legendre.leggauss(panel_nodes)

    def s_of_r(r):
        return 2.0 * math.asin(r / (2.0 * t))

    def panel(r_lo, r_hi):
        a, b = s_of_r(r_lo), s_of_r(r_hi)
        sm = 0.5 * (b - a) * gl_x + 0.5 * (a + b)
        w = 0.5 * (b - a) * gl_w
        r = 2.0 * t * np.sin(sm / 2.0)
        vals = r ** (-1.0) * np.abs(np.log(r)) ** (-alpha)
        return float(np.sum(w * vals)) / np.pi

    rows = []
    total = 0.0
    for k in range(2, j_hi + 1):
        total += panel(2.0 ** (-k), 2.0 ** (-k + 1))
        if k >= j_lo:
            rows.append((k, total))
    return np.array(rows)


def stein_growth_exponent(curve: np.ndarray) -> float:
    """Growth exponent of the probe curve in log(1/cutoff).

    The curve behaves like c (j log 2)^{1-alpha} + const; a direct
    log-log fit of the values is biased by the additive constant, so the
    exponent is recovered from the increments, which scale like
    j^{-alpha}: fitted slope of log increment vs log j, plus one.
    """
    j = curve[:, 0]
    vals = curve[:, 1]
    inc = np.diff(vals)
    jj = j[1:]
    if np.any(inc <= 0):
        raise DomainError("curve must be strictly increasing")
    slope = np.polyfit(np.log(jj), np.log(inc), 1)[0]
    return float(1.0 + slope)


# --- moment curve family -------------------------------------------------

def moment_structure() -> MetivierStructure:
    """3-dimensional group normalized so that x^T J y = x_2 y_1 - x_1 y_2."""
    J = np.array([[[0.0, -1.0], [1.0, 0.0]]])
    return MetivierStructure(n=1, m=1, J=J, Lambda=np.zeros((1, 2)))


def moment_example(delta: float,
                   sphere_resolution: Optional[int] = None,
                   region_counts: Optional[Tuple[int, ...]] = None,
                   ) -> ExampleInstance:
    """Sheared box matched to the circle average on the 3-dimensional group.

    Field: indicator of |y1| <= (2 delta)^2, |y2| <= 2 delta,
    |y3 + y2| <= (2 delta)^3.  Test region: |x1 - 1| <= delta^2,
    |x2| <= delta, |x3| <= delta^3, fixed time t = 1.
    """
    _check_delta(delta)
    s = moment_structure()

    def inside(pts):
        return ((np.abs(pts[:, 0]) <= (2 * delta) ** 2)
                & (np.abs(pts[:, 1]) <= 2 * delta)
                & (np.abs(pts[:, 2] + pts[:, 1]) <= (2 * delta) ** 3))

    hw1, hw2, hw3 = (2 * delta) ** 2, 2 * delta, (2 * delta) ** 3
    lo = np.array([-hw1, -hw2, -(hw3 + hw2)])
    f = ScalarField(_indicator(inside), lo, -lo,
                    f"moment box delta={delta}")

    def f_mapper(u):
        y1 = hw1 * (2 * u[:, 0] - 1)
        y2 = hw2 * (2 * u[:, 1] - 1)
        z = hw3 * (2 * u[:, 2] - 1)
        return np.stack([y1, y2, z - y2], axis=1)

    def f_jac(u):
        return 8.0 * hw1 * hw2 * hw3 * np.ones(len(u))

    def v_mapper(u):
        x1 = 1.0 + delta ** 2 * (2 * u[:, 0] - 1)
        x2 = delta * (2 * u[:, 1] - 1)
        x3 = delta ** 3 * (2 * u[:, 2] - 1)
        return np.stack([x1, x2, x3], axis=1)

    def v_jac(u):
        return 8.0 * delta ** 6 * np.ones(len(u))

    counts = region_counts or (6, 6, 6)
    region = ParamRegion(3, v_mapper, v_jac, counts)
    fregion = ParamRegion(3, f_mapper, f_jac, counts)
    res = sphere_resolution or max(256, int(math.ceil(64.0 / delta)))
    rule = sphere_rule(1, res)
    return ExampleInstance("moment", delta, s, f, region, fregion,
                           fixed_time_selector(1.0), rule)


# --- exponents and fitting ----------------------------------------------

def _inv(x) -> Fraction:
    if x == math.inf:
        return Fraction(0)
    return Fraction(1) / Fraction(x)


def predicted_exponent(family: str, n: int, m: int, p, q) -> Fraction:
    """Exact delta-exponent of the certified lower bound on the ratio."""
    ip, iq = _inv(p), _inv(q)
    if family == "ball":
        return (2 * n - 1) + m * iq - (2 * n + m) * ip
    if family == "scaling":
        return (2 * n + m) * iq - (m + 1) * ip
    if family == "knapp":
        if m != 1:
            raise DomainError("knapp exponent defined for m = 1 only")
        return n * iq + n - (n + 2) * ip
    if family == "moment":
        if (n, m) != (1, 1):
            raise DomainError("moment exponent defined for n = m = 1 only")
        return 1 + 6 * iq - 6 * ip
    if family == "stein":
        raise DomainError("the stein family is a divergence diagnostic, "
                          "it has no ratio exponent")
    raise DomainError(f"unknown family {family!r}")


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    r_squared: float


def fit_exponent(points: Sequence[Tuple[float, float]]) -> ExponentFit:
    """Least squares fit of log ratio against log delta."""
    if len(points) < 3:
        raise DomainError("need at least 3 ladder points")
    deltas = np.array([p[0] for p in points], dtype=float)
    ratios = np.array([p[1] for p in points], dtype=float)
    if np.any(np.diff(deltas) >= 0):
        raise DomainError("deltas must be strictly decreasing")
    if np.any(ratios <= 0):
        raise DomainError("ratios must be positive")
    lx = np.log(deltas)
    ly = np.log(ratios)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ExponentFit(float(slope), float(intercept), float(r2))


def run_ladder(make_instance: Callable[[float], ExampleInstance],
               deltas: Sequence[float], p, q):
    """(delta, ratio) rows down a delta ladder, largest delta first."""
    rows = []
    for delta in deltas:
        inst = make_instance(delta)
        rows.append((float(delta),
                     operator_ratio(inst.structure, inst, float(p), float(q))))
    return rows


EXPERIMENT_CSV_HEADER = "# schema=1"


def experiment_csv(family: str, n: int, m: int, p, q, rows,
                   predicted: Optional[Fraction]) -> str:
    lines = [EXPERIMENT_CSV_HEADER,
             "family,n,m,p,q,delta,ratio,predicted_exponent"]
    pred = "" if predicted is None else str(predicted)
    for delta, ratio in rows:
        lines.append(f"{family},{n},{m},{p},{q},{delta!r},{ratio!r},{pred}")
    return "\n".join(lines) + "\n"
