"""Pose normalization into a canonical frame.

The frame comes from the covariance of the feature's convex hull
surface. Axes are ordered by hull extent: largest to Z, second to X,
third to Y. Axis signs are pinned by geometry, trying two rules per
axis in order:

1. mouth direction: the offset of the largest boundary loop's centroid
   from the surface's area centroid should point to a negative
   coordinate (open side faces down the axis);
2. skew: the surface's third moment along the axis should be positive.

A rule abstains inside its tolerance and the next one decides; axes
where every rule abstains keep a default sign. Both rules are exact
surface integrals, so the outcome depends on the shape, not on its
tessellation or starting pose.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, EmptyMeshError
from .mesh import TriangleMesh, convex_hull

EXTENT_TIE_REL = 0.01
MOUTH_REL = 1e-6
SKEW_REL = 1e-9


def surface_covariance(vertices, faces):
    """Area centroid and second-moment matrix of a triangle surface.

    The per-triangle integral uses the edge-midpoint rule, which is
    exact for quadratics, so the result is independent of how the
    surface is tessellated.
    """
    v0 = vertices[faces[:, 0]]
    v1 = vertices[faces[:, 1]]
    v2 = vertices[faces[:, 2]]
    areas = 0.5 * np.linalg.norm(np.cross(v1 - v0, v2 - v0), axis=1)
    total = areas.sum()
    if total <= 0.0:
        raise DegenerateGeometryError("surface has zero area")
    centroid = (areas[:, None] * (v0 + v1 + v2)).sum(axis=0) / (3.0 * total)
    cov = np.zeros((3, 3))
    for a, b in ((v0, v1), (v1, v2), (v2, v0)):
        m = 0.5 * (a + b) - centroid
        cov += np.einsum("f,fi,fj->ij", areas / 3.0, m, m)
    return centroid, cov, float(total)


def surface_skew(mesh, centroid, axis):
    """Exact integral of ((x - centroid) . axis)^3 over the surface.

    For a linear function with corner values g1, g2, g3 the cube
    integrates to area/10 times the sum of all degree-3 monomials,
    which equals e1^3 - 2 e1 e2 + e3 in elementary symmetric terms.
    """
    g = (mesh.vertices - centroid) @ axis
    gf = g[mesh.faces]
    e1 = gf.sum(axis=1)
    e2 = (gf[:, 0] * gf[:, 1] + gf[:, 0] * gf[:, 2] + gf[:, 1] * gf[:, 2])
    e3 = gf[:, 0] * gf[:, 1] * gf[:, 2]
    return float(np.sum(mesh.face_areas / 10.0 * (e1 ** 3 - 2.0 * e1 * e2 + e3)))


@dataclass(frozen=True)
class BoundaryLoop:
    vertices: np.ndarray
    perimeter: float
    centroid: np.ndarray


def boundary_loops(mesh):
    """Closed boundary loops, largest perimeter first.

    Loop centroids are length-weighted, so they do not depend on how
    densely the rim is sampled. An empty list means a closed surface.
    """
    f = mesh.faces
    if len(f) == 0:
        raise EmptyMeshError("mesh has no faces")
    directed = f[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2).astype(np.int64)
    n = int(mesh.n_vertices)
    keys = directed[:, 0] * n + directed[:, 1]
    reverse = directed[:, 1] * n + directed[:, 0]
    open_edges = directed[~np.isin(reverse, keys)]
    if len(open_edges) == 0:
        return []
    successors = {}
    for a, b in open_edges:
        successors.setdefault(int(a), []).append(int(b))
    for targets in successors.values():
        targets.sort(reverse=True)  # pop() then takes the smallest
    loops = []
    for start in sorted(successors):
        if not successors[start]:
            continue
        walk = [start]
        cur = start
        for _ in range(len(open_edges) + 1):
            cur = successors[cur].pop()
            if cur == start:
                break
            walk.append(cur)
        else:
            raise DegenerateGeometryError("boundary does not close into loops")
        pts = mesh.vertices[walk]
        seg = np.roll(pts, -1, axis=0) - pts
        lengths = np.linalg.norm(seg, axis=1)
        total = lengths.sum()
        mid = pts + 0.5 * seg
        loops.append(BoundaryLoop(
            vertices=np.asarray(walk, dtype=np.int64),
            perimeter=float(total),
            centroid=(lengths[:, None] * mid).sum(axis=0) / total))
    loops.sort(key=lambda lp: -lp.perimeter)
    return loops


@dataclass(frozen=True)
class AlignmentTransform:
    """Rigid motion ``x -> rotation @ x + translation``; extents are the
    aligned-frame bounding extents of the support points (x, y, z)."""

    rotation: np.ndarray
    translation: np.ndarray
    extents: np.ndarray

    def apply(self, points):
        return points @ self.rotation.T + self.translation

    def as_dict(self):
        return {
            "rotation": self.rotation.tolist(),
            "translation": self.translation.tolist(),
            "extents": self.extents.tolist(),
        }


def _ordered_axes(axes, support):
    """Rows sorted by support extent, largest first.

    Axes whose extents tie within EXTENT_TIE_REL are ordered by greedy
    match against the global +X, +Y, +Z directions, so boxes and other
    near-isotropic shapes get a stable assignment.
    """
    extents = np.array([np.ptp(support @ ax) for ax in axes])
    order = list(np.argsort(-extents, kind="stable"))
    i = 0
    while i < 3:
        j = i + 1
        while j < 3 and extents[order[j]] > extents[order[i]] * (1.0 - EXTENT_TIE_REL):
            j += 1
        if j - i > 1:
            group = order[i:j]
            picked = []
            for g in np.eye(3):
                if len(picked) == len(group):
                    break
                rest = [k for k in group if k not in picked]
                picked.append(max(rest, key=lambda k: abs(axes[k] @ g)))
            order[i:j] = picked
        i = j
    return axes[order], extents[order]


def canonical_axes(mesh):
    """Canonical (a1, a2, a3) rows plus the area centroid.

    a1 carries the largest hull extent. Falls back to the feature's own
    surface when its hull is flat.
    """
    try:
        hull = convex_hull(mesh.vertices)
        centroid_h, cov, _ = surface_covariance(hull.vertices, hull.faces)
        support = hull.vertices
    except DegenerateGeometryError:
        centroid_h, cov, _ = surface_covariance(mesh.vertices, mesh.faces)
        support = mesh.vertices
    _, vecs = np.linalg.eigh(cov)
    axes = vecs.T.copy()
    for row in axes:
        if row[np.argmax(np.abs(row))] < 0.0:
            row *= -1.0
    axes, _ = _ordered_axes(axes, support)
    a1, a2 = axes[0], axes[1]
    a3 = np.cross(a1, a2)

    centroid = mesh.area_centroid()
    diag = mesh.bbox_diagonal()
    total_area = mesh.total_area()
    loops = boundary_loops(mesh)
    mouth = loops[0].centroid - centroid if loops else np.zeros(3)

    def cue(axis):
        # dimensionless cue with a trust tier: a mouth offset outranks
        # a skew cue no matter their relative sizes
        d = float(mouth @ axis) / diag
        if abs(d) > MOUTH_REL:
            return d, 2
        s = surface_skew(mesh, centroid, axis) / (total_area * diag ** 3)
        if abs(s) > SKEW_REL:
            return s, 1
        return 0.0, 0

    cues = [cue(a1), cue(a2), cue(a3)]
    # only two signs are free, the third follows from handedness, so the
    # cues cannot always all be honored; try the four candidates and keep
    # the one that points the most trusted cues down the negative side
    rank = sorted(range(3), key=lambda k: (cues[k][1], abs(cues[k][0])),
                  reverse=True)
    weight = np.empty(3)
    weight[rank] = (16.0, 4.0, 1.0)
    best, best_score = (1.0, 1.0), -np.inf
    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            signs = (s1, s2, s1 * s2)
            score = 0.0
            for k in range(3):
                if cues[k][0] != 0.0:
                    ok = signs[k] * cues[k][0] < 0.0
                    score += weight[k] * (1.0 if ok else -1.0)
            if score > best_score:
                best, best_score = (s1, s2), score
    a1 = a1 * best[0]
    a2 = a2 * best[1]
    a3 = np.cross(a1, a2)
    return np.vstack([a1, a2, a3]), centroid


def align_feature(mesh):
    """Canonical pose: centroid at the origin, support axes mapped to
    (X, Y, Z) in decreasing extent order.

    Putting the longest axis on X spreads the normals of extruded
    features across sphere rings, whose polar spacing is finer than the
    longitude spacing, instead of piling them onto one ring.

    Returns (aligned_mesh, transform). Aligning an already aligned
    feature is the identity within float tolerance.
    """
    axes, centroid = canonical_axes(mesh)
    rotation = np.vstack([axes[0], axes[1], axes[2]])
    translation = -rotation @ centroid
    aligned = mesh.transformed(rotation=rotation, translation=translation)
    extents = np.ptp(aligned.vertices, axis=0)
    return aligned, AlignmentTransform(rotation=rotation,
                                       translation=translation,
                                       extents=extents)
