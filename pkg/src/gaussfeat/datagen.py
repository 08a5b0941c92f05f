"""Procedural machining-feature surfaces for training and evaluation.

Each builder produces the surface a feature leaves on a part: walls
face the removed material (into the cavity), floors face up toward the
mouth, in a stock frame with +z up. Vertical through features run
along z; features tied to an edge of the stock run along x with length
10. Dimensions, tessellation density, and pose are drawn from the
supplied generator, so one seed pins down the whole sample.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .mesh import TriangleMesh, bounding_ball_radius, clean_mesh
from .polygons import (
    circle_profile,
    ensure_ccw,
    rect_profile,
    rounded_rect_profile,
    signed_area,
    stadium_profile,
    triangulate_with_holes,
)

FULL_LENGTH = 10.0  # features cut along a stock edge span this much


# -- mesh assembly helpers -----------------------------------------------------


def _strip_faces(n_rows, n_cols, base=0, closed=False):
    faces = []
    cols = n_cols if closed else n_cols - 1
    for i in range(n_rows - 1):
        for j in range(cols):
            j2 = (j + 1) % n_cols
            a = base + i * n_cols + j
            b = base + i * n_cols + j2
            c = base + (i + 1) * n_cols + j2
            d = base + (i + 1) * n_cols + j
            faces.append([a, b, c])
            faces.append([a, c, d])
    return faces


def _vertical_walls(points, z_top, z_bottom, bands=1, closed=True,
                    bottom=None):
    """Walls dropped from a 2D path; they face the left of the travel
    direction, so a counter-clockwise ring yields inward normals.

    An explicit bottom ring pitches the walls off vertical. The first
    and last rows reuse the input arrays bitwise so rims and floors
    built from the same arrays weld exactly.
    """
    points = np.asarray(points, dtype=np.float64)
    top = np.column_stack([points, np.full(len(points), z_top)])
    if bottom is None:
        bot = np.column_stack([points, np.full(len(points), z_bottom)])
    else:
        bot = np.column_stack([np.asarray(bottom, dtype=np.float64),
                               np.full(len(points), z_bottom)])
    ts = np.linspace(0.0, 1.0, bands + 1)
    rows = [top] + [top + t * (bot - top) for t in ts[1:-1]] + [bot]
    verts = np.vstack(rows)
    faces = _strip_faces(len(rows), len(points), closed=closed)
    return verts, np.asarray(faces, dtype=np.int64)


def _inset_path(points, dist, closed=True):
    """Offset every edge of a convex path by ``dist`` along its left-hand
    normal and intersect neighbors, so a wall dropped to the offset ring
    pitches off vertical by the same angle everywhere. Positive ``dist``
    moves a counter-clockwise ring inward; endpoints of an open path
    slide along their single edge's normal."""
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    nxt = np.roll(np.arange(n), -1)
    tang = points[nxt] - points
    tang /= np.linalg.norm(tang, axis=1, keepdims=True)
    norm = np.column_stack([-tang[:, 1], tang[:, 0]])
    anchor = points + dist * norm
    out = np.empty_like(points)
    for i in range(n):
        j = i - 1 if (closed or i > 0) else i
        k = i if (closed or i < n - 1) else i - 1
        if j == k:
            out[i] = anchor[j] + tang[j] * ((points[i] - anchor[j]) @ tang[j])
            continue
        cross = tang[j][0] * tang[k][1] - tang[j][1] * tang[k][0]
        if abs(cross) < 1e-12:
            out[i] = points[i] + dist * norm[k]
            continue
        d = anchor[k] - anchor[j]
        s = (d[0] * tang[k][1] - d[1] * tang[k][0]) / cross
        out[i] = anchor[j] + s * tang[j]
    return out


def _sweep(section, axis, u0, u1, segments=1):
    """Extrude a 2D section along +x or +y; normals follow the section
    tangent crossed with the sweep direction."""
    section = np.asarray(section, dtype=np.float64)
    levels = np.linspace(u0, u1, segments + 1)
    rows = []
    for u in levels:
        if axis == "x":
            rows.append(np.column_stack([np.full(len(section), u),
                                         section[:, 0], section[:, 1]]))
        else:
            rows.append(np.column_stack([section[:, 0],
                                         np.full(len(section), u),
                                         section[:, 1]]))
    verts = np.vstack(rows)
    faces = _strip_faces(len(levels), len(section))
    return verts, np.asarray(faces, dtype=np.int64)


def _floor(points, z, holes=None, downward=False):
    pts2d, faces = triangulate_with_holes(points, holes or [])
    verts = np.column_stack([pts2d, np.full(len(pts2d), z)])
    if downward:
        faces = faces[:, ::-1]
    return verts, faces.astype(np.int64)


def _planar_wall(points2d, to3d, flip=False):
    """Ear-clip a planar polygon given in 2D and lift it with ``to3d``."""
    pts, faces = triangulate_with_holes(points2d, [])
    verts = np.asarray([to3d(p) for p in pts])
    if flip:
        faces = faces[:, ::-1]
    return verts, faces.astype(np.int64)


def _assemble(*pieces):
    verts = []
    faces = []
    offset = 0
    for v, f in pieces:
        verts.append(v)
        faces.append(np.asarray(f, dtype=np.int64) + offset)
        offset += len(v)
    mesh, _ = clean_mesh(np.vstack(verts), np.vstack(faces))
    return mesh


def _fillet_corners(points, radius, seg):
    """Replace each corner of a convex ring with a tangent arc, the way a
    cylindrical cutter leaves plan corners. The radius is clamped so every
    arc fits its two edges with room to spare."""
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    vecs = pts - np.roll(pts, 1, axis=0)
    lens = np.linalg.norm(vecs, axis=1)
    a_unit = vecs / lens[:, None]
    b_unit = np.roll(a_unit, -1, axis=0)
    cos_int = np.clip(np.einsum("ij,ij->i", -a_unit, b_unit), -1.0, 1.0)
    half = 0.5 * np.arccos(cos_int)
    fits = 0.4 * np.minimum(lens, np.roll(lens, -1)) * np.tan(half)
    r = min(radius, fits.min())
    r_used = r
    out = []
    for i in range(n):
        bis = b_unit[i] - a_unit[i]
        c = pts[i] + (r / np.sin(half[i])) * bis / np.linalg.norm(bis)
        t = r / np.tan(half[i])
        q1 = pts[i] - t * a_unit[i]
        q2 = pts[i] + t * b_unit[i]
        a0 = np.arctan2(q1[1] - c[1], q1[0] - c[0])
        a1 = np.arctan2(q2[1] - c[1], q2[0] - c[0])
        if a1 < a0:
            a1 += 2.0 * np.pi
        ang = np.linspace(a0, a1, seg + 1)
        out.append(c + r * np.column_stack([np.cos(ang), np.sin(ang)]))
    return np.vstack(out), r_used


def _jittered_polygon(rng, sides, r_lo, r_hi, jitter=0.25):
    radii = rng.uniform(r_lo, r_hi, size=sides)
    angles = (2.0 * np.pi * np.arange(sides) / sides
              + rng.uniform(-jitter, jitter, size=sides))
    return np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])


def _arc(center, radius, a0, a1, n):
    t = np.linspace(a0, a1, n + 1)
    return np.column_stack([center[0] + radius * np.cos(t),
                            center[1] + radius * np.sin(t)])


def _segments(rng):
    return 2 * int(rng.integers(12, 33))


def _bands(rng):
    return int(rng.integers(1, 4))


def _distinct_pair(rng, lo, hi, gap):
    a = rng.uniform(lo, hi)
    b = rng.uniform(lo, hi)
    while abs(a - b) < gap:
        b = rng.uniform(lo, hi)
    return a, b


def _path_length(points, closed=True):
    seg = np.diff(points, axis=0)
    total = float(np.linalg.norm(seg, axis=1).sum())
    if closed:
        total += float(np.linalg.norm(points[0] - points[-1]))
    return total


def _floor_share_depth(rng, area, perimeter, lo, hi, pitch=0.0):
    """Cut depth that hands the floor a set share of the surface area.

    Every pocket-like class draws the share from the same band, so the
    floor-to-wall balance carries no class identity and depth tracks the
    plan size instead of being a free dial."""
    t = rng.uniform(0.36, 0.50)
    d = np.cos(np.radians(pitch)) * area * (1.0 - t) / (t * perimeter)
    return float(np.clip(d, lo, hi))


# -- builders -------------------------------------------------------------------


def _build_o_ring(rng):
    # groove widens toward the floor: the outer wall flares while the
    # island wall carries an ordinary casting taper
    r_out = rng.uniform(1.6, 3.2)
    r_in = r_out * rng.uniform(0.22, 0.75)
    a_out = rng.uniform(7.0, 10.0)
    a_in = rng.uniform(7.0, 10.0)
    depth = _floor_share_depth(rng, np.pi * (r_out ** 2 - r_in ** 2),
                               2.0 * np.pi * (r_out + r_in), 0.5, 2.2,
                               0.5 * (a_out + a_in))
    k_out = -depth * np.tan(np.radians(a_out))
    k_in = depth * np.tan(np.radians(a_in))
    seg = _segments(rng)
    bands = _bands(rng)
    outer = circle_profile(r_out, seg)
    inner = circle_profile(r_in, seg)
    outer_base = _inset_path(outer, k_out)
    inner_base_rev = _inset_path(inner[::-1], k_in)
    return _assemble(
        _vertical_walls(outer, 0.0, -depth, bands, bottom=outer_base),
        _vertical_walls(inner[::-1], 0.0, -depth, bands,
                        bottom=inner_base_rev),
        _floor(outer_base, -depth, holes=[inner_base_rev[::-1]]),
    )


def _build_through_hole(rng):
    r = rng.uniform(1.0, 2.4)
    h = rng.uniform(6.0, 10.0)
    return _assemble(
        _vertical_walls(circle_profile(r, _segments(rng)), 0.0, -h, _bands(rng)))


def _build_blind_hole(rng):
    r = rng.uniform(0.8, 1.8)
    d = r * rng.uniform(2.6, 4.5)
    profile = circle_profile(r, _segments(rng))
    return _assemble(
        _vertical_walls(profile, 0.0, -d, _bands(rng)),
        _floor(profile, -d),
    )


def _build_triangular_passage(rng):
    profile = _jittered_polygon(rng, 3, 1.2, 2.2, jitter=0.12)
    h = rng.uniform(6.0, 10.0)
    return _assemble(_vertical_walls(ensure_ccw(profile), 0.0, -h, _bands(rng)))


def _build_rectangular_passage(rng):
    w = rng.uniform(2.2, 3.4)
    l = w * rng.uniform(1.15, 1.6)
    h = rng.uniform(6.0, 10.0)
    return _assemble(
        _vertical_walls(rect_profile(w, l), 0.0, -h, _bands(rng)))


def _build_circular_through_slot(rng):
    r = rng.uniform(1.1, 2.2)
    n_arc = int(rng.integers(12, 25))
    theta = np.linspace(0.0, np.pi, n_arc + 1)
    section = np.column_stack([r * np.cos(theta), -r * np.sin(theta)])
    return _assemble(
        _sweep(section, "x", 0.0, FULL_LENGTH, int(rng.integers(1, 4))))


def _build_triangular_through_slot(rng):
    # depth at least 1.3x the half width keeps the wall opening angle
    # (two equal-area peaks) well away from the 90-degree step classes;
    # capping it at 1.7x keeps the section clearly wider than deep, so
    # the pose stays stable (near-square sections can flip axes)
    w = rng.uniform(2.4, 4.0)
    d = 0.5 * w * rng.uniform(1.3, 1.7)
    section = np.array([[0.5 * w, 0.0], [0.0, -d], [-0.5 * w, 0.0]])
    return _assemble(
        _sweep(section, "x", 0.0, FULL_LENGTH, int(rng.integers(1, 4))))


def _build_rectangular_through_slot(rng):
    w, d = rng.uniform(2.2, 3.8), rng.uniform(1.2, 2.4)
    while abs(w - d) < 0.2:
        d = rng.uniform(1.2, 2.4)
    section = np.array([[0.5 * w, 0.0], [0.5 * w, -d],
                        [-0.5 * w, -d], [-0.5 * w, 0.0]])
    return _assemble(
        _sweep(section, "x", 0.0, FULL_LENGTH, int(rng.integers(1, 4))))


def _build_rectangular_blind_slot(rng):
    # enters the part at x = 0, closed at x = length; the walls flare a
    # few degrees wider at the bottom
    w = rng.uniform(2.2, 3.4)
    length = rng.uniform(w + 1.0, 5.5)
    pitch = rng.uniform(7.0, 10.0)
    d = _floor_share_depth(rng, length * w, 2.0 * length + w, 1.0, 2.4,
                           pitch)
    k = -d * np.tan(np.radians(pitch))
    y = 0.5 * w
    path = np.array([[0.0, -y], [length, -y], [length, y], [0.0, y]])
    base = _inset_path(path, k, closed=False)
    return _assemble(
        _vertical_walls(path, 0.0, -d, _bands(rng), closed=False,
                        bottom=base),
        _floor(base, -d),
    )


def _build_triangular_pocket(rng):
    # walls taper inward toward the floor; radii stay within 10 percent
    # of a common size so the plan never degenerates into a sliver
    r0 = rng.uniform(2.0, 3.8)
    angles = (2.0 * np.pi * np.arange(3) / 3
              + rng.uniform(-0.15, 0.15, size=3))
    radii = r0 * rng.uniform(0.9, 1.1, size=3)
    profile = ensure_ccw(np.column_stack([radii * np.cos(angles),
                                          radii * np.sin(angles)]))
    pitch = rng.uniform(7.0, 10.0)
    d = _floor_share_depth(rng, abs(signed_area(profile)),
                           _path_length(profile), 0.9, 2.1, pitch)
    base = _inset_path(profile, d * np.tan(np.radians(pitch)))
    return _assemble(
        _vertical_walls(profile, 0.0, -d, _bands(rng), bottom=base),
        _floor(base, -d),
    )


def _build_rectangular_pocket(rng):
    # corners carry the cutter radius, as a round-nosed end mill leaves
    w = rng.uniform(3.6, 6.8)
    l = rng.uniform(2.6, 0.78 * w)
    profile = rounded_rect_profile(w, l, rng.uniform(0.6, 0.49 * l),
                                   corner_segments=int(rng.integers(3, 7)))
    d = _floor_share_depth(rng, abs(signed_area(profile)),
                           _path_length(profile), 0.8, 2.0)
    return _assemble(
        _vertical_walls(profile, 0.0, -d, _bands(rng)),
        _floor(profile, -d),
    )


def _build_circular_end_pocket(rng):
    # walls taper inward toward the floor
    w = rng.uniform(2.2, 3.4)
    length = w * rng.uniform(1.2, 2.6)
    profile = stadium_profile(length, w, cap_segments=int(rng.integers(6, 13)))
    pitch = rng.uniform(7.0, 10.0)
    d = _floor_share_depth(rng, abs(signed_area(profile)),
                           _path_length(profile), 0.225 * w, 0.525 * w,
                           pitch)
    base = _inset_path(profile, d * np.tan(np.radians(pitch)))
    return _assemble(
        _vertical_walls(profile, 0.0, -d, _bands(rng), bottom=base),
        _floor(base, -d),
    )


def _build_triangular_blind_step(rng):
    # corner bite with a triangular plan: one slanted wall, one floor.
    # A shallow cut pins the floor at 3.2-4.5x the wall area; the other
    # two-peak classes keep their mass split below 2.4x (see the through
    # step) or at exactly 1x (vee slot), so the fractions never overlap.
    a, b = _distinct_pair(rng, 3.0, 6.0, 0.3)
    hyp = float(np.hypot(a, b))
    d = 0.5 * a * b / hyp / rng.uniform(3.2, 4.5)
    plan = np.array([[0.0, 0.0], [a, 0.0], [0.0, b]])
    wall = np.array([[a, 0.0], [0.0, b]])
    return _assemble(
        _vertical_walls(wall, 0.0, -d, _bands(rng), closed=False),
        _floor(plan, -d),
    )


def _build_circular_blind_step(rng):
    # the arc wall carries a casting taper, leaning in toward the floor.
    # Depth tracks the radius: the floor never reaches 60 percent of the
    # area, under the through step family's 60-71 band
    r = rng.uniform(2.5, 5.0)
    d = float(np.clip(r * rng.uniform(0.35, 0.55), 1.2, 2.4))
    arc = _arc((0.0, 0.0), r, 0.0, 0.5 * np.pi, int(rng.integers(18, 33)))
    base = _inset_path(arc, d * np.tan(np.radians(rng.uniform(7.0, 10.0))),
                       closed=False)
    plan = np.vstack([[[0.0, 0.0]], base])
    return _assemble(
        _vertical_walls(arc, 0.0, -d, _bands(rng), closed=False,
                        bottom=base),
        _floor(plan, -d),
    )


def _build_rectangular_blind_step(rng):
    # the floor carries at most 63 percent of the area; the
    # corner-wrapping through step is built floor-dominant, above 68.
    # Both shoulder walls flare out a few degrees toward the bottom,
    # and the cut stays shallow so the bounding frame sits square
    a, b = _distinct_pair(rng, 4.0, 5.6, 0.3)
    d = rng.uniform(max(1.2, 0.59 * a * b / (a + b)), 1.9)
    k = -d * np.tan(np.radians(rng.uniform(7.0, 10.0)))
    walls = np.array([[a, 0.0], [a, b], [0.0, b]])
    base = _inset_path(walls, k, closed=False)
    plan = np.vstack([[[0.0, 0.0]], base])
    return _assemble(
        _vertical_walls(walls, 0.0, -d, _bands(rng), closed=False,
                        bottom=base),
        _floor(plan, -d),
    )


def _build_rectangular_through_step(rng):
    # floor 1.5-2.4x wider than the riser is tall: the area ratio of the
    # two peaks separates this from equal-area vee slots below and from
    # the floor-heavy triangular blind step above
    ratio = rng.uniform(1.5, 2.4)
    d = rng.uniform(1.5, min(2.8, 4.5 / ratio))
    w = ratio * d
    section = np.array([[w, 0.0], [w, -d], [0.0, -d]])
    return _assemble(
        _sweep(section, "x", 0.0, FULL_LENGTH, int(rng.integers(1, 4))))


def _build_two_sides_through_step(rng):
    # one step wrapped around a corner: an L floor and two back walls;
    # kept shallow so the floor dominates both walls
    w1 = rng.uniform(2.5, 3.5)
    w2 = rng.uniform(2.5, 3.5)
    d = rng.uniform(1.0, 1.45)
    reach = 0.9 * FULL_LENGTH
    plan = np.array([[0.0, 0.0], [FULL_LENGTH, 0.0], [FULL_LENGTH, w1],
                     [w2, w1], [w2, reach], [0.0, reach]])
    walls = np.array([[FULL_LENGTH, w1], [w2, w1], [w2, reach]])
    return _assemble(
        _vertical_walls(walls, 0.0, -d, _bands(rng), closed=False),
        _floor(plan, -d),
    )


def _build_slanted_through_step(rng):
    # riser leans 25-45 degrees, so its peak sits well over a ring away
    # from any right-angle pair
    d = rng.uniform(1.5, 2.6)
    tilt = np.radians(rng.uniform(25.0, 45.0))
    riser = d / np.cos(tilt)
    # ledge under half the section area: the floor share stays in
    # 0.40-0.47, clear of the square step (over 0.60) and the vee slot
    # (exactly 0.5) wherever their peaks share a bin
    w = riser * rng.uniform(0.67, 0.88)
    run = d * np.tan(tilt)
    section = np.array([[w + run, 0.0], [w, -d], [0.0, -d]])
    return _assemble(
        _sweep(section, "x", 0.0, FULL_LENGTH, int(rng.integers(1, 4))))


def _build_chamfer(rng):
    c = rng.uniform(1.2, 2.8)
    h = c * rng.uniform(0.7, 1.4)
    section = np.array([[c, 0.0], [0.0, -h]])
    return _assemble(
        _sweep(section, "x", 0.0, FULL_LENGTH, int(rng.integers(1, 4))))


def _build_round(rng):
    r = rng.uniform(1.0, 2.2)
    n_arc = int(rng.integers(8, 17))
    phi = np.linspace(0.5 * np.pi, np.pi, n_arc + 1)
    section = np.column_stack([r + r * np.cos(phi), -r + r * np.sin(phi)])
    return _assemble(
        _sweep(section, "x", 0.0, FULL_LENGTH, int(rng.integers(1, 4))))


def _build_v_circular_end_blind_slot(rng):
    # closed end rounds up from the floor: quarter cylinder across the
    # slot, horizontal axis
    w = rng.uniform(2.2, 3.4)
    d = rng.uniform(1.2, 2.2)
    length = rng.uniform(4.0, 7.0)
    flat = length - d
    n_arc = int(rng.integers(8, 17))
    y = 0.5 * w
    theta = np.linspace(0.0, 0.5 * np.pi, n_arc + 1)
    arc_xz = np.column_stack([flat + d * np.sin(theta), -d * np.cos(theta)])
    side = np.vstack([[[0.0, 0.0], [0.0, -d]], arc_xz])
    return _assemble(
        _floor(rect_profile(flat, w, center=(0.5 * flat, 0.0)), -d),
        _sweep(arc_xz, "y", -y, y, 1),
        _planar_wall(side, lambda p: (p[0], y, p[1])),
        _planar_wall(side, lambda p: (p[0], -y, p[1]), flip=True),
    )


def _build_h_circular_end_blind_slot(rng):
    # closed end rounds in plan: half cylinder, vertical axis; the walls
    # flare a few degrees wider at the bottom
    w = rng.uniform(2.2, 3.4)
    length = rng.uniform(w + 1.0, 7.0)
    r = 0.5 * w
    flat = length - r
    arc = _arc((flat, 0.0), r, -0.5 * np.pi, 0.5 * np.pi,
               int(rng.integers(10, 21)))
    path = np.vstack([[[0.0, -r]], arc, [[0.0, r]]])
    pitch = rng.uniform(7.0, 10.0)
    d = _floor_share_depth(rng, abs(signed_area(path)),
                           _path_length(path, closed=False), 1.0, 2.4,
                           pitch)
    k = -d * np.tan(np.radians(pitch))
    base = _inset_path(path, k, closed=False)
    return _assemble(
        _vertical_walls(path, 0.0, -d, _bands(rng), closed=False,
                        bottom=base),
        # closing edge along x = 0 is the open mouth
        _floor(base, -d),
    )


def _build_six_sides_passage(rng):
    # nearly regular: six walls 60 degrees apart probe the bin grid's
    # angular resolution against the smooth circular fans
    profile = ensure_ccw(_jittered_polygon(rng, 6, 1.8, 2.6, jitter=0.05))
    h = rng.uniform(6.0, 10.0)
    return _assemble(_vertical_walls(profile, 0.0, -h, _bands(rng)))


def _build_six_sides_pocket(rng):
    # walls taper inward toward the floor; the plan stretches along x so
    # the long flanks face +-y like every other elongated cut
    profile = ensure_ccw(_jittered_polygon(rng, 6, 1.6, 2.6, jitter=0.1))
    profile[:, 0] *= rng.uniform(1.35, 1.9)
    pitch = rng.uniform(7.0, 10.0)
    d = _floor_share_depth(rng, abs(signed_area(profile)),
                           _path_length(profile), 0.7, 2.4, pitch)
    base = _inset_path(profile, d * np.tan(np.radians(pitch)))
    return _assemble(
        _vertical_walls(profile, 0.0, -d, _bands(rng), bottom=base),
        _floor(base, -d),
    )


# -- registry --------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureClass:
    id: int
    name: str
    builder: object


CLASSES = tuple(
    FeatureClass(i, name, builder) for i, (name, builder) in enumerate([
        ("o_ring", _build_o_ring),
        ("through_hole", _build_through_hole),
        ("blind_hole", _build_blind_hole),
        ("triangular_passage", _build_triangular_passage),
        ("rectangular_passage", _build_rectangular_passage),
        ("circular_through_slot", _build_circular_through_slot),
        ("triangular_through_slot", _build_triangular_through_slot),
        ("rectangular_through_slot", _build_rectangular_through_slot),
        ("rectangular_blind_slot", _build_rectangular_blind_slot),
        ("triangular_pocket", _build_triangular_pocket),
        ("rectangular_pocket", _build_rectangular_pocket),
        ("circular_end_pocket", _build_circular_end_pocket),
        ("triangular_blind_step", _build_triangular_blind_step),
        ("circular_blind_step", _build_circular_blind_step),
        ("rectangular_blind_step", _build_rectangular_blind_step),
        ("rectangular_through_step", _build_rectangular_through_step),
        ("two_sides_through_step", _build_two_sides_through_step),
        ("slanted_through_step", _build_slanted_through_step),
        ("chamfer", _build_chamfer),
        ("round", _build_round),
        ("v_circular_end_blind_slot", _build_v_circular_end_blind_slot),
        ("h_circular_end_blind_slot", _build_h_circular_end_blind_slot),
        ("six_sides_passage", _build_six_sides_passage),
        ("six_sides_pocket", _build_six_sides_pocket),
    ])
)

N_CLASSES = len(CLASSES)
_BY_NAME = {c.name: c for c in CLASSES}


def class_by_id(class_id):
    if isinstance(class_id, str):
        if class_id not in _BY_NAME:
            raise ConfigError(f"unknown feature class {class_id!r}")
        return _BY_NAME[class_id]
    if not 0 <= int(class_id) < N_CLASSES:
        raise ConfigError(f"class id must be in 0..{N_CLASSES - 1}, "
                          f"got {class_id}")
    return CLASSES[int(class_id)]


def class_names():
    return [c.name for c in CLASSES]


# -- sampling ---------------------------------------------------------------------


def random_rotation(rng):
    """Uniformly random rotation (QR of a Gaussian matrix, sign-fixed)."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0.0:
        q[:, 2] *= -1.0
    return q


def _spin_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def gen_feature_surface(class_id, rng, rigid_motion=True):
    """One feature surface drawn from ``rng``.

    ``rigid_motion`` spins the feature about its stock z axis (so
    tessellation phase varies for surfaces of revolution), then applies
    a uniform random rotation and a translation.
    """
    mesh = class_by_id(class_id).builder(rng)
    if rigid_motion:
        spin = _spin_z(rng.uniform(0.0, 2.0 * np.pi))
        rotation = random_rotation(rng) @ spin
        translation = rng.uniform(-20.0, 20.0, size=3)
        mesh = mesh.transformed(rotation=rotation, translation=translation)
    return mesh


def sample_rng(master_seed, class_id, index):
    """Generator for one sample; independent of every other sample."""
    return np.random.default_rng(
        np.random.SeedSequence((master_seed, class_id, index)))


def gen_sample(master_seed, class_id, index, rigid_motion=True, noise=0.0):
    rng = sample_rng(master_seed, class_id, index)
    mesh = gen_feature_surface(class_id, rng, rigid_motion=rigid_motion)
    if noise > 0.0:
        mesh = add_normal_noise(mesh, noise, rng)
    return mesh


def add_normal_noise(mesh, f, rng):
    """Displace vertices along their normals by N(0, (f * R)^2).

    R is the bounding ball radius, so the distortion is relative to
    object size. ``f = 0`` returns the input mesh unchanged.
    """
    if f < 0.0:
        raise ConfigError("noise fraction must be nonnegative")
    if f == 0.0:
        return mesh
    radius = bounding_ball_radius(mesh.vertices)
    normals = np.zeros_like(mesh.vertices)
    weighted = mesh.face_normals * mesh.face_areas[:, None]
    for k in range(3):
        np.add.at(normals, mesh.faces[:, k], weighted)
    norms = np.linalg.norm(normals, axis=1, keepdims=True)
    np.divide(normals, norms, out=normals, where=norms > 0.0)
    offsets = rng.normal(0.0, f * radius, size=len(normals))
    return TriangleMesh(mesh.vertices + offsets[:, None] * normals,
                        mesh.faces)
