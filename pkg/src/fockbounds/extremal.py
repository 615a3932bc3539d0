# -*- coding: utf-8 -*-
"""
The extremal function F_a near the critical density.

F_a has zeros on the dilated lattice b^-1 Z^2 inside the disc of radius
R - 3 and one zero at the centroid of each equal-area sector of the
remaining annulus. Its lattice norm over Fock norm, divided by 1 - a^2,
stays bounded as a tends to 1.
"""

import logging
import math
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace

import numpy as np
from scipy.optimize import bisect
from scipy.spatial import cKDTree

from fockbounds.bargmann import PlanarQuadrature
from fockbounds.bargmann import ZeroBased
from fockbounds.bargmann import weighted_density
from fockbounds.phase_space import SquareLattice
from fockbounds.phase_space import theta_sum
from fockbounds.util.exceptions import AreaMismatch
from fockbounds.util.exceptions import AsymmetricZeroSet
from fockbounds.util.exceptions import NoIntegerInRange
from fockbounds.util.exceptions import RegimeError
from fockbounds.util.exceptions import ValidationError
from fockbounds.util.numerics import extended_sum
from fockbounds.util.numerics import log_abs_product

# Module level logger.
logger = logging.getLogger(__name__)

A_MIN = 0.98
TWO_PI = 2.0 * math.pi
# Angles sampled per sector when measuring its diameter.
DIAMETER_RAYS = 17


@dataclass(frozen=True)
class RadiusSelection:
    a: float
    R: float
    b2: float
    n_R: int
    q_R: int
    p_R: int
    R_lo: float
    R_hi: float

    @property
    def b(self):
        return math.sqrt(self.b2)

    @property
    def gap(self):
        return 1.0 - self.a * self.a

    @property
    def inner_radius(self):
        """
        Squared-index bound: (m, n) is inner iff m^2 + n^2 < (b(R-3))^2.
        """
        return self.b * (self.R - 3.0)


def disc_count(R):
    return math.pi * (1.0 - R ** -1.5) * R * R


def inner_indices_for(b, R):
    bound = b * (R - 3.0)
    if bound <= 0:
        return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
    k = int(math.ceil(bound)) + 1
    axis = np.arange(-k, k + 1)
    m, n = np.meshgrid(axis, axis, indexing="ij")
    m = m.ravel()
    n = n.ravel()
    r2 = m * m + n * n
    keep = r2 < bound * bound
    m, n, r2 = m[keep], n[keep], r2[keep]
    order = np.lexsort((n, m, r2))
    return m[order], n[order]


def select_radius(a):
    """
    Radius R with 2(1-a^2) < R^(-3/2) < 4(1-a^2) and pi b^2 R^2 an integer,
    where b^2 = 1 - R^(-3/2).

    :param a: lattice spacing in (0.98, 1)
    :return: RadiusSelection
    """
    if not A_MIN < a < 1.0:
        raise RegimeError("The extremal construction needs %g < a < 1, got %g"
                          % (A_MIN, a))
    gap = 1.0 - a * a
    R_lo = (4.0 * gap) ** (-2.0 / 3.0)
    R_hi = (2.0 * gap) ** (-2.0 / 3.0)
    n_R = int(math.floor(disc_count(R_lo))) + 1
    if n_R >= disc_count(R_hi):
        raise NoIntegerInRange("No integer in (%g, %g) for R in (%g, %g)"
                               % (disc_count(R_lo), disc_count(R_hi),
                                  R_lo, R_hi))
    R = bisect(lambda r: disc_count(r) - n_R, R_lo, R_hi, xtol=1e-12,
               maxiter=200)
    b2 = 1.0 - R ** -1.5
    m, _ = inner_indices_for(math.sqrt(b2), R)
    q_R = len(m)
    p_R = n_R - q_R
    if p_R < 1:
        raise ValidationError("No annulus zeros at a=%g (n_R=%d, q_R=%d)"
                              % (a, n_R, q_R))
    logger.debug("a=%g: R=%.12g n_R=%d q_R=%d p_R=%d" % (a, R, n_R, q_R, p_R))
    return RadiusSelection(a, R, b2, n_R, q_R, p_R, R_lo, R_hi)


def inner_indices(sel):
    return inner_indices_for(sel.b, sel.R)


def inner_zeros(sel):
    """
    The dilated lattice points (m + in)/b with |m + in|/b < R - 3.
    """
    m, n = inner_indices(sel)
    return (m + 1j * n) / sel.b


def in_inner_squares(sel, z):
    """
    Whether z lies in D'_R, the union of the squares Q_{m,n} of the inner zeros.
    """
    z = np.asarray(z, dtype=complex)
    m = np.rint(sel.b * z.real)
    n = np.rint(sel.b * z.imag)
    return m * m + n * n < sel.inner_radius ** 2


def _inner_pieces(sel):
    """
    The squares Q_{m,n} of D'_R split along the coordinate axes, so each
    piece lies in one closed quadrant.

    :return: (vertices (k, 4) counterclockwise, angle ranges (k, 2), areas)
    """
    h = 0.5 / sel.b
    rects = []
    for m, n in zip(*inner_indices(sel)):
        cx, cy = m / sel.b, n / sel.b
        xs = [(cx - h, 0.0), (0.0, cx + h)] if m == 0 else [(cx - h, cx + h)]
        ys = [(cy - h, 0.0), (0.0, cy + h)] if n == 0 else [(cy - h, cy + h)]
        for x0, x1 in xs:
            for y0, y1 in ys:
                rects.append((x0, x1, y0, y1))
    rects = np.array(rects).reshape(-1, 4)
    x0, x1, y0, y1 = rects.T
    vertices = np.stack((x0 + 1j * y0, x1 + 1j * y0, x1 + 1j * y1, x0 + 1j * y1),
                        axis=1)
    center = 0.5 * (x0 + x1) + 0.5j * (y0 + y1)
    center_arg = np.mod(np.angle(center), TWO_PI)
    offsets = np.angle(vertices * np.exp(-1j * center_arg)[:, np.newaxis])
    offsets = np.where(vertices == 0, np.nan, offsets)
    ranges = np.column_stack((center_arg + np.nanmin(offsets, axis=1),
                              center_arg + np.nanmax(offsets, axis=1)))
    areas = (x1 - x0) * (y1 - y0)
    return vertices, ranges, areas


def _clip_below(vertices, theta):
    """
    Area and first moment of each polygon on the side arg z < theta of the
    line through the origin at angle theta.

    Edges along that line pass through the origin and drop out of the
    shoelace sums, so only the kept parts of the original edges count.
    """
    ux, uy = math.cos(theta), math.sin(theta)
    start = vertices
    end = np.roll(vertices, -1, axis=1)
    sa = ux * start.imag - uy * start.real
    sb = ux * end.imag - uy * end.real
    ina = sa < 0
    inb = sb < 0
    with np.errstate(divide="ignore", invalid="ignore"):
        cut = start + (end - start) * (sa / (sa - sb))
    p = np.where(ina, start, cut)
    q = np.where(inb, end, cut)
    keep = ina | inb
    cross = np.where(keep, p.real * q.imag - p.imag * q.real, 0.0)
    area = 0.5 * np.sum(cross, axis=1)
    moment = np.sum(np.where(keep, (p + q) * cross, 0.0), axis=1) / 6.0
    return area, moment


class WedgeIntegrals(object):
    """
    Area and first moment of D'_R inside the wedge 0 <= arg z < theta.
    """

    def __init__(self, sel):
        self.vertices, self.ranges, self.areas = _inner_pieces(sel)
        start = self.vertices
        end = np.roll(start, -1, axis=1)
        cross = start.real * end.imag - start.imag * end.real
        self.moments = np.sum((start + end) * cross, axis=1) / 6.0

    def __call__(self, theta):
        lo, hi = self.ranges[:, 0], self.ranges[:, 1]
        full = hi <= theta
        partial = (lo < theta) & ~full
        area = float(extended_sum(self.areas[full]))
        moment = complex(np.sum(self.moments[full]))
        if np.any(partial):
            parea, pmoment = _clip_below(self.vertices[partial], theta)
            area += float(extended_sum(parea))
            moment += complex(np.sum(pmoment))
        return area, moment

    def total_area(self):
        return float(extended_sum(self.areas))


def _boundary_squares(sel):
    m, n = inner_indices(sel)
    bound = sel.inner_radius ** 2
    outer = np.zeros(len(m), dtype=bool)
    for dm, dn in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        outer |= (m + dm) ** 2 + (n + dn) ** 2 >= bound
    return m[outer] / sel.b, n[outer] / sel.b


def inner_boundary(sel, angles, block=256):
    """
    Radius at which the ray at each angle leaves D'_R.
    """
    angles = np.asarray(angles, dtype=float)
    flat = angles.ravel()
    cx, cy = _boundary_squares(sel)
    h = 0.5 / sel.b
    out = np.zeros(flat.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        for start in range(0, len(flat), block):
            phi = flat[start:start + block, np.newaxis]
            ux, uy = np.cos(phi), np.sin(phi)
            tx = np.stack(((cx - h) / ux, (cx + h) / ux))
            ty = np.stack(((cy - h) / uy, (cy + h) / uy))
            enter = np.maximum(np.min(tx, axis=0), np.min(ty, axis=0))
            leave = np.minimum(np.max(tx, axis=0), np.max(ty, axis=0))
            hit = (enter <= leave) & (leave > 0)
            out[start:start + block] = np.max(np.where(hit, leave, 0.0), axis=1)
    return out.reshape(angles.shape)


@dataclass(frozen=True, eq=False)
class SectorPartition:
    """
    Sectors of D''_R, layer by layer.

    radii[0] = 0 stands for the outer edge of D'_R; every other radius
    encloses a whole number of b^-2 areas. cuts[k] holds the angles
    0 = theta_0 < ... < theta_{counts[k]} = 2 pi of layer k.
    """
    radii: np.ndarray
    counts: np.ndarray
    cuts: tuple
    layer: np.ndarray
    areas: np.ndarray
    centroids: np.ndarray
    diameters: np.ndarray
    clearances: np.ndarray
    inside: np.ndarray

    @property
    def count(self):
        return len(self.centroids)

    @property
    def min_centroid_clearance(self):
        return float(np.min(self.clearances))


def inner_extent(sel):
    """
    Largest |z| over the squares of D'_R.
    """
    m, n = inner_indices(sel)
    if not len(m):
        return 0.0
    corners = np.hypot(np.abs(m) + 0.5, np.abs(n) + 0.5)
    return float(np.max(corners)) / sel.b


def annulus_layers(sel, thickness=None):
    """
    Split D''_R into rings about one dilated lattice spacing thick.

    The innermost layer runs from the edge of D'_R out to the first radius;
    the first radius clears D'_R, so the layers beyond it are plain rings.

    :param sel: RadiusSelection
    :param thickness: target ring thickness, 1/b by default
    :return: (radii, counts)
    """
    if thickness is None:
        thickness = 1.0 / sel.b
    scale = math.pi * sel.b2
    mean_edge = math.sqrt(sel.q_R / scale)
    extent = inner_extent(sel)
    depth = sel.R - mean_edge
    layers = max(1, int(round(depth / thickness)))
    while layers > 1 and mean_edge + depth / layers < extent:
        layers -= 1

    radii = [0.0]
    counts = []
    filled = 0
    for k in range(1, layers):
        r = mean_edge + k * depth / layers
        enclosed = int(round(scale * r * r)) - sel.q_R
        if enclosed <= filled or enclosed >= sel.p_R:
            continue
        radius = math.sqrt((sel.q_R + enclosed) / scale)
        if radius < extent:
            continue
        radii.append(radius)
        counts.append(enclosed - filled)
        filled = enclosed
    radii.append(sel.R)
    counts.append(sel.p_R - filled)
    return np.array(radii), np.array(counts, dtype=int)


def _edge_layer(wedge, radius, count, target, tol):
    """
    Cuts, areas and moments of the layer between D'_R and |z| = radius.

    The area of the layer in the wedge 0 <= arg z < theta is
    radius^2 theta / 2 - |D'_R within the wedge|, strictly increasing in
    theta; each cut angle is found by bisection.
    """
    r2 = radius * radius

    def layer_area(theta):
        return 0.5 * r2 * theta - wedge(theta)[0]

    cuts = [0.0]
    for k in range(1, count):
        level = k * target
        cuts.append(bisect(lambda t: layer_area(t) - level, cuts[-1], TWO_PI,
                           xtol=tol, maxiter=200))
    cuts.append(TWO_PI)
    cuts = np.array(cuts)

    levels = np.array([layer_area(t) for t in cuts])
    inner = np.array([wedge(t)[1] for t in cuts])
    disc = (radius ** 3 / 3.0) * (np.exp(1j * cuts[1:])
                                  - np.exp(1j * cuts[:-1])) / 1j
    return cuts, np.diff(levels), disc - np.diff(inner)


def _ring_layer(r_in, r_out, count):
    cuts = np.linspace(0.0, TWO_PI, count + 1)
    cuts[-1] = TWO_PI
    width = np.diff(cuts)
    areas = 0.5 * (r_out * r_out - r_in * r_in) * width
    moments = ((r_out ** 3 - r_in ** 3) / 3.0) * (np.exp(1j * cuts[1:])
                                                  - np.exp(1j * cuts[:-1])) / 1j
    return cuts, areas, moments


def _sector_shape(sel, r_in, r_out, theta1, theta2, centroid):
    phi = np.linspace(theta1, theta2, DIAMETER_RAYS)
    rays = np.exp(1j * phi)
    inner = inner_boundary(sel, phi) if r_in == 0 else np.full(phi.shape, r_in)
    outline = np.concatenate((inner * rays, r_out * rays))
    diameter = float(np.max(np.abs(outline[:, np.newaxis] - outline[np.newaxis, :])))

    radius = abs(centroid)
    arg = float(np.mod(np.angle(centroid), TWO_PI))
    if theta2 >= TWO_PI and arg < theta1:
        arg += TWO_PI
    if r_in == 0:
        rho_in = float(inner_boundary(sel, np.array([arg]))[0])
    else:
        rho_in = r_in
    inside = theta1 <= arg <= theta2 and rho_in < radius < r_out
    clearance = min(r_out - radius, radius - rho_in,
                    radius * math.sin(min(arg - theta1, math.pi / 2)),
                    radius * math.sin(min(theta2 - arg, math.pi / 2)))
    return diameter, clearance, inside


def partition_annulus(sel, tol=1e-13):
    """
    Split D''_R = D_R minus D'_R into p_R sectors of area b^-2 each.

    D''_R is first cut into the layers of annulus_layers, then every layer
    into equal-area sectors by angle, so sectors stay about one lattice
    spacing across whatever the depth of D''_R.

    :param sel: RadiusSelection
    :param tol: angular tolerance of the cuts
    :return: SectorPartition
    """
    if sel.p_R < 1:
        raise ValidationError("Nothing to partition for p_R=%d" % sel.p_R)
    wedge = WedgeIntegrals(sel)
    target = 1.0 / sel.b2

    total = math.pi * sel.R * sel.R - wedge.total_area()
    expected = sel.p_R * target
    if abs(total - expected) > 1e-4 * expected:
        raise AreaMismatch("Annulus area %.12g differs from p_R/b^2 = %.12g"
                           % (total, expected))

    radii, counts = annulus_layers(sel)
    cuts, areas, moments, layer, shapes = [], [], [], [], []
    for k, count in enumerate(counts):
        r_in, r_out = radii[k], radii[k + 1]
        if k == 0:
            layer_cuts, layer_areas, layer_moments = _edge_layer(
                wedge, r_out, count, target, tol)
        else:
            layer_cuts, layer_areas, layer_moments = _ring_layer(r_in, r_out,
                                                                 count)
        cuts.append(layer_cuts)
        areas.append(layer_areas)
        moments.append(layer_moments)
        layer.append(np.full(count, k))
        centroids = sel.b2 * layer_moments
        shapes.extend(_sector_shape(sel, r_in, r_out, layer_cuts[j],
                                    layer_cuts[j + 1], centroids[j])
                      for j in range(count))

    centroids = sel.b2 * np.concatenate(moments)
    diameters, clearances, inside = (np.array(v) for v in zip(*shapes))
    logger.debug("partition a=%g: %d sectors in %d layers, diameters %.3g..%.3g"
                 % (sel.a, sel.p_R, len(counts), np.min(diameters),
                    np.max(diameters)))
    return SectorPartition(radii, counts, tuple(cuts), np.concatenate(layer),
                           np.concatenate(areas), centroids, diameters,
                           clearances, inside.astype(bool))


def annulus_contains_ring(sel, angles=720, radial=16):
    """
    Check {R-1 < |z| < R} inside D''_R inside {R-4 < |z| < R} on a polar grid.
    """
    phi = TWO_PI * (np.arange(angles) + 0.5) / angles
    ring = np.linspace(sel.R - 1.0, sel.R, radial + 2)[1:-1]
    core = np.linspace(0.0, sel.R - 4.0, radial + 2)[1:-1]
    rays = np.exp(1j * phi)[np.newaxis, :]
    outer_ok = not np.any(in_inner_squares(sel, ring[:, np.newaxis] * rays))
    inner_ok = bool(np.all(in_inner_squares(sel, core[:, np.newaxis] * rays)))
    return outer_ok and inner_ok


class ExtremalFunction(ZeroBased):
    """
    F_a(z) = z prod (1 - z/zeta) over the nonzero inner zeros and the
    sector centroids.
    """

    def __init__(self, sel, partition):
        inner = inner_zeros(sel)
        zeros = np.concatenate((inner[inner != 0], partition.centroids))
        ZeroBased.__init__(self, 1.0, zeros, origin_order=1)
        self.selection = sel
        self.partition = partition

    @property
    def zero_set(self):
        return np.concatenate(([0j], self.zeros))

    @property
    def zero_count(self):
        return len(self.zeros) + 1


def build_extremal(a):
    sel = select_radius(a)
    partition = partition_annulus(sel)
    return sel, ExtremalFunction(sel, partition)


def logabs_Fa(fa, z):
    return fa.logabs(z)


def u_R_eval(R, z):
    """
    pi|z|^2/2 inside the disc of radius R, pi R^2 (log(|z|/R) + 1/2) outside.
    """
    if not R > 0:
        raise ValidationError("u_R needs R > 0, got %r" % R)
    r = np.abs(np.asarray(z, dtype=complex))
    with np.errstate(divide="ignore"):
        outside = math.pi * R * R * (np.log(r) - math.log(R) + 0.5)
    return np.where(r <= R, 0.5 * math.pi * r * r, outside)


@dataclass(frozen=True)
class ExtremalReport:
    a: float
    R: float
    b2: float
    n_R: int
    q_R: int
    p_R: int
    fock_norm_sq: float
    lattice_norm_sq: float
    inner_sum: float
    outer_sum: float
    tail_integral: float
    min_centroid_clearance: float
    zero_count: int
    defect_sup: float = None
    notes: tuple = field(default_factory=tuple)

    @property
    def ratio(self):
        return self.lattice_norm_sq / self.fock_norm_sq

    @property
    def ratio_over_gap(self):
        return self.ratio / (1.0 - self.a * self.a)

    def as_row(self):
        row = asdict(self)
        row["ratio"] = self.ratio
        row["ratio_over_gap"] = self.ratio_over_gap
        row["notes"] = ";".join(self.notes)
        return row


def norms_and_ratio(fa, sel, quad=None, margin=6.0, dr=0.05, rim_tol=1e-16):
    """
    Fock norm, lattice norm and their ratio for the extremal function.

    :param fa: ExtremalFunction
    :param sel: RadiusSelection
    :param quad: PlanarQuadrature reaching at least R + margin
    :param margin: extent beyond R for the quadrature and the lattice sum
    :param dr: radial step when quad is not given
    :return: ExtremalReport without the defect
    """
    if quad is None:
        quad = PlanarQuadrature(sel.R + margin, dr)
    if quad.outer_radius < sel.R + margin - 1e-9:
        raise ValidationError("Quadrature radius %g is below R + margin = %g"
                              % (quad.outer_radius, sel.R + margin))
    profile = quad.profile(weighted_density(fa))
    profile.check_rim(rim_tol)
    fock = profile.total()
    tail = profile.total(min_radius=sel.R - 4.0)

    lattice = SquareLattice(sel.a)
    m, n = lattice.indices(sel.R + margin)
    values = weighted_density(fa)(lattice.a * (m + 1j * n))
    inner = m * m + n * n < sel.inner_radius ** 2
    inner_sum = float(extended_sum(values[inner]))
    outer_sum = float(extended_sum(values[~inner]))

    logger.info("extremal a=%g: ||F||_F^2=%.6g ||F||_a^2=%.6g"
                % (sel.a, fock, inner_sum + outer_sum))
    return ExtremalReport(sel.a, sel.R, sel.b2, sel.n_R, sel.q_R, sel.p_R,
                          fock, inner_sum + outer_sum, inner_sum, outer_sum,
                          tail, fa.partition.min_centroid_clearance,
                          fa.zero_count)


def defect_sup(fa, sel, eps=0.2, step=0.1):
    """
    max |log|F_a(z)| - b^2 u_R(z)| over grid points with |z| <= R + 5 at
    distance more than eps from every zero.
    """
    if not eps > 0:
        raise ValidationError("eps must be positive, got %r" % eps)
    extent = sel.R + 5.0
    axis = np.arange(-extent, extent + step / 2, step)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    z = (x + 1j * y).ravel()
    z = z[np.abs(z) <= extent]
    zeros = fa.zero_set
    tree = cKDTree(np.column_stack((zeros.real, zeros.imag)))
    dist, _ = tree.query(np.column_stack((z.real, z.imag)))
    z = z[dist > eps]
    if not len(z):
        return float("nan")
    defect = np.abs(fa.logabs(z) - sel.b2 * u_R_eval(sel.R, z))
    return float(np.max(defect))


def truncated_sigma_identity(sel, z, zeros=None, tol=1e-12):
    """
    log|V_R(z)| as the plain product and with Weierstrass factors.

    The factor exponents z/zeta + (z/zeta)^2/2 cancel over a zero set that
    is invariant under multiplication by i, so both forms agree.

    :param sel: RadiusSelection supplying the inner zeros
    :param z: complex point
    :param zeros: nonzero zeros to use instead of the inner zeros
    :return: (plain, weierstrass_form)
    """
    if zeros is None:
        inner = inner_zeros(sel)
        zeros = inner[inner != 0]
    zeros = np.asarray(zeros, dtype=complex)
    s1 = np.sum(1.0 / zeros)
    s2 = np.sum(1.0 / zeros ** 2)
    if abs(s1) > tol * max(len(zeros), 1) or abs(s2) > tol * max(len(zeros), 1):
        raise AsymmetricZeroSet("Zero set is not rotation symmetric: "
                                "|sum 1/zeta|=%.3e |sum 1/zeta^2|=%.3e"
                                % (abs(s1), abs(s2)))
    z = complex(z)
    if z == 0:
        return float("-inf"), float("-inf")
    head = math.log(abs(z))
    plain = head + float(log_abs_product(np.array([z]), zeros)[0])
    w = z / zeros
    with np.errstate(divide="ignore"):
        terms = np.log(np.abs(1.0 - w)) + np.real(w + 0.5 * w * w)
    weierstrass = head + float(extended_sum(terms))
    return plain, weierstrass


def trivial_ratio(a):
    """
    Lattice over Fock norm for F = 1: theta(a)^2, and that over 1 - a^2.
    """
    if not 0.5 < a < 1.0:
        raise RegimeError("Trivial branch is for 1/2 < a < 1, got %g" % a)
    ratio = theta_sum(a) ** 2
    return ratio, ratio / (1.0 - a * a)


def run_extremal(a, margin=6.0, dr=0.05, eps=0.2, step=0.1):
    """
    Build F_a and report its norms, ratio and defect.
    """
    sel, fa = build_extremal(a)
    report = norms_and_ratio(fa, sel, margin=margin, dr=dr)
    notes = []
    if not np.all(fa.partition.inside):
        notes.append("centroid-outside-sector")
        logger.warning("a=%g: some sector centroids fall outside their sector"
                       % a)
    return replace(report, defect_sup=defect_sup(fa, sel, eps, step),
                   notes=tuple(notes))
