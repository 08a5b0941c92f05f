"""2D polygon utilities: profiles, ear-clip triangulation, hole bridging.

Coordinates are (n, 2) float arrays. Simple polygons only; the clipper
fails fast on self-intersecting input rather than guessing.
"""

import numpy as np

from .errors import DegenerateGeometryError


def signed_area(points):
    """Shoelace area; positive for counter-clockwise loops."""
    p = np.asarray(points, dtype=np.float64)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def ensure_ccw(points, ccw=True):
    """Copy of the loop in the requested orientation."""
    p = np.array(points, dtype=np.float64)
    if (signed_area(p) > 0.0) != ccw:
        p = p[::-1].copy()
    return p


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _point_in_triangle(p, a, b, c, eps):
    # sign-consistent barycentric test, valid for either winding;
    # boundary points count as inside
    d1 = _cross(a, b, p)
    d2 = _cross(b, c, p)
    d3 = _cross(c, a, p)
    return ((d1 >= -eps and d2 >= -eps and d3 >= -eps)
            or (d1 <= eps and d2 <= eps and d3 <= eps))


def triangulate_polygon(points):
    """Ear-clip a simple polygon into triangles.

    Returns (m, 3) int64 indices into ``points`` in the original input
    order; triangles wind counter-clockwise. Collinear corners are
    dropped without emitting a sliver.
    """
    points = np.asarray(points, dtype=np.float64)
    n = len(points)
    if n < 3:
        raise DegenerateGeometryError("polygon needs at least 3 vertices")
    reversed_input = signed_area(points) < 0.0
    order = list(range(n))[::-1] if reversed_input else list(range(n))
    return _clip_ears(points, order)


def _clip_ears(points, order):
    idx = list(order)
    scale = float(np.ptp(points[idx], axis=0).max())
    if scale <= 0.0:
        raise DegenerateGeometryError("polygon has zero extent")
    eps = 1e-12 * scale * scale
    faces = []
    while len(idx) > 3:
        n = len(idx)
        clipped = False
        for k in range(n):
            i_prev, i_cur, i_next = idx[k - 1], idx[k], idx[(k + 1) % n]
            a, b, c = points[i_prev], points[i_cur], points[i_next]
            cross = _cross(a, b, c)
            if abs(cross) <= eps:
                e1 = b - a
                e2 = c - b
                if np.dot(e1, e2) > 0.0:
                    # straight continuation, the corner is redundant
                    del idx[k]
                    clipped = True
                    break
                continue  # a spike is never an ear
            if cross < 0.0:
                continue  # reflex corner
            blocked = False
            for j in idx:
                if j in (i_prev, i_cur, i_next):
                    continue
                p = points[j]
                # bridge duplicates share coordinates with corner points
                if (np.array_equal(p, a) or np.array_equal(p, b)
                        or np.array_equal(p, c)):
                    continue
                if _point_in_triangle(p, a, b, c, eps):
                    blocked = True
                    break
            if blocked:
                continue
            faces.append((i_prev, i_cur, i_next))
            del idx[k]
            clipped = True
            break
        if not clipped:
            raise DegenerateGeometryError(
                "no ear found; polygon is degenerate or self-intersecting")
    a, b, c = idx
    if abs(_cross(points[a], points[b], points[c])) > eps:
        faces.append((a, b, c))
    return np.asarray(faces, dtype=np.int64).reshape(-1, 3)


def triangulate_with_holes(outer, holes=()):
    """Triangulate a polygon with holes by bridging each hole outward.

    Returns ``(points, faces)`` where ``points`` stacks the outer loop
    (counter-clockwise) and every hole loop (clockwise), and ``faces``
    index into that stack. Bridges reuse indices, so no coordinates are
    duplicated and every bridge edge is used once in each direction.
    """
    outer = ensure_ccw(outer, ccw=True)
    hole_arrays = [ensure_ccw(h, ccw=False) for h in holes]
    points = np.vstack([outer] + hole_arrays) if hole_arrays else outer
    loop = list(range(len(outer)))
    base = len(outer)
    hole_index = []
    for h in hole_arrays:
        hole_index.append(list(range(base, base + len(h))))
        base += len(h)
    # bridge right to left so later rays may legally hit earlier bridges
    hole_index.sort(key=lambda ix: -points[ix, 0].max())
    for ix in hole_index:
        loop = _merge_hole(points, loop, ix)
    return points, _clip_ears(points, loop)


def _merge_hole(points, loop, hole):
    # rightmost hole vertex shoots a +x ray at the current loop
    m_pos = int(np.argmax([points[i][0] for i in hole]))
    m = hole[m_pos]
    mx, my = points[m]
    best_x = np.inf
    best_edge = None
    n = len(loop)
    for k in range(n):
        a, b = loop[k], loop[(k + 1) % n]
        ay, by = points[a][1], points[b][1]
        if not (ay <= my < by or by <= my < ay):
            continue
        ax, bx = points[a][0], points[b][0]
        x_int = ax + (my - ay) * (bx - ax) / (by - ay)
        if mx < x_int < best_x:
            best_x = x_int
            best_edge = k
    if best_edge is None:
        raise DegenerateGeometryError("hole is not inside the outer polygon")
    a, b = loop[best_edge], loop[(best_edge + 1) % n]
    # visible vertex: the intersected edge endpoint of larger x unless a
    # reflex loop vertex hides it inside triangle (m, intersection, p)
    p_pos = best_edge if points[a][0] >= points[b][0] else (best_edge + 1) % n
    p = loop[p_pos]
    tri_a = np.array([mx, my])
    tri_b = np.array([best_x, my])
    scale = float(np.ptp(points[loop], axis=0).max())
    eps = 1e-12 * scale * scale
    best_metric = None
    for k in range(n):
        j = loop[k]
        if j in (a, b, p):
            continue
        pj = points[j]
        if _cross(points[loop[k - 1]], pj, points[loop[(k + 1) % n]]) >= -eps:
            continue  # only reflex vertices can occlude
        if _point_in_triangle(pj, tri_a, tri_b, points[p], eps):
            dx, dy = pj[0] - mx, pj[1] - my
            dist = dx * dx + dy * dy
            angle = abs(dy) / max(np.sqrt(dist), 1e-300)
            metric = (angle, dist)
            if best_metric is None or metric < best_metric:
                best_metric = metric
                p_pos = k
                p = j
    rotated = hole[m_pos:] + hole[:m_pos]
    return (loop[:p_pos + 1] + rotated + [rotated[0], loop[p_pos]]
            + loop[p_pos + 1:])


# -- profile builders ----------------------------------------------------------


def rect_profile(width, height, center=(0.0, 0.0)):
    cx, cy = center
    w, h = 0.5 * width, 0.5 * height
    return np.array([
        [cx - w, cy - h], [cx + w, cy - h], [cx + w, cy + h], [cx - w, cy + h],
    ])


def circle_profile(radius, segments, center=(0.0, 0.0), phase=0.0):
    if segments < 3:
        raise DegenerateGeometryError("circle needs at least 3 segments")
    ang = phase + 2.0 * np.pi * np.arange(segments) / segments
    return np.column_stack([center[0] + radius * np.cos(ang),
                            center[1] + radius * np.sin(ang)])


def stadium_profile(length, width, cap_segments=8, center=(0.0, 0.0)):
    """Rectangle with semicircular caps on the +-x ends, total ``length``."""
    r = 0.5 * width
    half = 0.5 * length - r
    if half < 0.0:
        raise DegenerateGeometryError("stadium length must exceed its width")
    right = -0.5 * np.pi + np.pi * np.arange(cap_segments + 1) / cap_segments
    left = 0.5 * np.pi + np.pi * np.arange(cap_segments + 1) / cap_segments
    pts = [np.column_stack([half + r * np.cos(right), r * np.sin(right)]),
           np.column_stack([-half + r * np.cos(left), r * np.sin(left)])]
    out = np.vstack(pts)
    out[:, 0] += center[0]
    out[:, 1] += center[1]
    return out


def rounded_rect_profile(width, height, radius, corner_segments=4,
                         center=(0.0, 0.0)):
    """Rectangle with quarter-circle corners, counter-clockwise."""
    if radius <= 0.0 or 2.0 * radius >= min(width, height):
        raise DegenerateGeometryError(
            "corner radius must fit inside the rectangle")
    hw, hh = 0.5 * width - radius, 0.5 * height - radius
    quarter = 0.5 * np.pi * np.arange(corner_segments + 1) / corner_segments
    arcs = []
    for cx, cy, a0 in ((hw, -hh, -0.5 * np.pi), (hw, hh, 0.0),
                       (-hw, hh, 0.5 * np.pi), (-hw, -hh, np.pi)):
        ang = a0 + quarter
        arcs.append(np.column_stack([cx + radius * np.cos(ang),
                                     cy + radius * np.sin(ang)]))
    out = np.vstack(arcs)
    out[:, 0] += center[0]
    out[:, 1] += center[1]
    return out


def ngon_profile(radii, phase=0.0, center=(0.0, 0.0)):
    """Star-shaped polygon from per-corner radii, equally spaced angles."""
    radii = np.asarray(radii, dtype=np.float64)
    n = len(radii)
    if n < 3:
        raise DegenerateGeometryError("polygon needs at least 3 corners")
    ang = phase + 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([center[0] + radii * np.cos(ang),
                            center[1] + radii * np.sin(ang)])
