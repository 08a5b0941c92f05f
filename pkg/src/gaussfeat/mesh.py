"""Triangle mesh core: geometry queries used by every later stage.

The mesh is a plain indexed face set: float64 vertices, int64 triangle
corners. All per-face quantities are computed vectorized and cached on
first use. Tolerances scale with the bounding-box diagonal so behaviour
does not depend on model units.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateGeometryError,
    EmptyMeshError,
    InputError,
)

# Angle comparisons (radians) and unit-normal comparisons use absolute
# tolerances; length-like tolerances are relative to the bbox diagonal.
EPS_ANGLE = 1e-8
EPS_NORMAL = 1e-6
WELD_REL = 1e-9
AREA_REL = 1e-12
PLANE_REL = 1e-9


class TriangleMesh:
    """Indexed triangle mesh.

    Parameters
    ----------
    vertices : array_like
        (n, 3) float coordinates.
    faces : array_like
        (m, 3) integer corner indices, counter-clockwise seen from outside.
    validate : bool
        Check index ranges (default True).
    """

    def __init__(self, vertices, faces, validate=True):
        v = np.ascontiguousarray(vertices, dtype=np.float64)
        f = np.ascontiguousarray(faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise InputError(f"vertices must be (n, 3), got {v.shape}")
        if f.size == 0:
            f = f.reshape(0, 3)
        if f.ndim != 2 or f.shape[1] != 3:
            raise InputError(f"faces must be (m, 3), got {f.shape}")
        if validate and len(f):
            if f.min() < 0 or f.max() >= len(v):
                raise InputError("face index out of range")
        self.vertices = v
        self.faces = f
        self._cross = None
        self._areas = None
        self._normals = None

    # -- basic properties -------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    def _edge_cross(self):
        if self._cross is None:
            p0 = self.vertices[self.faces[:, 0]]
            p1 = self.vertices[self.faces[:, 1]]
            p2 = self.vertices[self.faces[:, 2]]
            self._cross = np.cross(p1 - p0, p2 - p0)
        return self._cross

    @property
    def face_areas(self):
        """(m,) triangle areas."""
        if self._areas is None:
            self._areas = 0.5 * np.linalg.norm(self._edge_cross(), axis=1)
        return self._areas

    @property
    def face_normals(self):
        """(m, 3) unit normals; zero rows for degenerate faces."""
        if self._normals is None:
            cross = self._edge_cross()
            norm = np.linalg.norm(cross, axis=1)
            safe = np.where(norm > 0.0, norm, 1.0)
            self._normals = cross / safe[:, None]
        return self._normals

    @property
    def face_centroids(self):
        return self.vertices[self.faces].mean(axis=1)

    def bbox(self):
        if self.n_vertices == 0:
            raise EmptyMeshError("mesh has no vertices")
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def bbox_diagonal(self):
        lo, hi = self.bbox()
        return float(np.linalg.norm(hi - lo))

    def total_area(self):
        return float(self.face_areas.sum())

    def area_centroid(self):
        """Area-weighted centroid of the surface."""
        w = self.face_areas
        total = w.sum()
        if total <= 0.0:
            raise DegenerateGeometryError("surface has zero total area")
        return (self.face_centroids * w[:, None]).sum(axis=0) / total

    # -- derived meshes ----------------------------------------------------

    def transformed(self, rotation=None, translation=None):
        v = self.vertices
        if rotation is not None:
            v = v @ np.asarray(rotation, dtype=np.float64).T
        if translation is not None:
            v = v + np.asarray(translation, dtype=np.float64)
        return TriangleMesh(v, self.faces.copy(), validate=False)

    def scaled(self, factor):
        return TriangleMesh(self.vertices * float(factor), self.faces.copy(),
                            validate=False)

    def submesh(self, face_indices):
        """Extract the faces in ``face_indices`` with compacted vertices."""
        idx = np.asarray(face_indices, dtype=np.int64)
        faces = self.faces[idx]
        used, inverse = np.unique(faces, return_inverse=True)
        return TriangleMesh(self.vertices[used],
                            inverse.reshape(faces.shape), validate=False)


def facet_normal_area(mesh, face_index):
    """Unit normal and area of one facet.

    Raises
    ------
    DegenerateGeometryError
        If the facet area is at or below the degeneracy threshold.
    """
    if not 0 <= face_index < mesh.n_faces:
        raise InputError(f"face index {face_index} out of range")
    area = float(mesh.face_areas[face_index])
    if area <= AREA_REL * mesh.bbox_diagonal() ** 2:
        raise DegenerateGeometryError(f"face {face_index} is degenerate")
    return mesh.face_normals[face_index].copy(), area


# -- vertex welding and cleanup -------------------------------------------


def weld_vertices(vertices, faces, tolerance):
    """Merge vertices that snap to the same grid cell of size ``tolerance``."""
    v = np.asarray(vertices, dtype=np.float64)
    f = np.asarray(faces, dtype=np.int64)
    if tolerance <= 0.0 or len(v) == 0:
        return v.copy(), f.copy(), 0
    keys = np.round(v / tolerance).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True,
                                  return_inverse=True)
    merged = len(v) - len(first)
    return v[first], inverse[f] if len(f) else f.copy(), merged


def clean_mesh(vertices, faces):
    """Weld duplicates, drop degenerate faces, compact vertices.

    Returns (mesh, report) where report counts what was removed.
    """
    v = np.asarray(vertices, dtype=np.float64)
    f = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    if len(v) == 0 or len(f) == 0:
        raise EmptyMeshError("mesh has no faces")
    lo, hi = v.min(axis=0), v.max(axis=0)
    diag = float(np.linalg.norm(hi - lo))
    if diag == 0.0:
        raise DegenerateGeometryError("all vertices coincide", dimension=0)

    v, f, welded = weld_vertices(v, f, WELD_REL * diag)

    # Repeated corners first, then an area cut for slivers.
    distinct = ((f[:, 0] != f[:, 1]) & (f[:, 1] != f[:, 2])
                & (f[:, 0] != f[:, 2]))
    f = f[distinct]
    dropped = int((~distinct).sum())
    if len(f):
        p0, p1, p2 = v[f[:, 0]], v[f[:, 1]], v[f[:, 2]]
        areas = 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)
        keep = areas > AREA_REL * diag * diag
        dropped += int((~keep).sum())
        f = f[keep]
    if len(f) == 0:
        raise EmptyMeshError("all faces were degenerate")

    used, inverse = np.unique(f, return_inverse=True)
    mesh = TriangleMesh(v[used], inverse.reshape(f.shape), validate=False)
    return mesh, {"welded_vertices": welded, "dropped_faces": dropped}


# -- edge adjacency ---------------------------------------------------------


class EdgeAdjacency:
    """Undirected edge table with per-edge incident faces (CSR layout).

    Built once per mesh; answers boundary / manifold / orientation
    queries and provides the face adjacency used for region growing.
    """

    def __init__(self, mesh):
        f = mesh.faces
        m = len(f)
        directed = f[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
        self._face_of = np.repeat(np.arange(m, dtype=np.int64), 3)
        a = directed.min(axis=1)
        b = directed.max(axis=1)
        key = a * np.int64(mesh.n_vertices) + b
        order = np.argsort(key, kind="stable")
        sorted_key = key[order]
        unique_key, start, counts = np.unique(
            sorted_key, return_index=True, return_counts=True)
        self.edges = np.column_stack(
            [unique_key // mesh.n_vertices, unique_key % mesh.n_vertices])
        self.edge_face_counts = counts
        self._incident = self._face_of[order]
        self._offsets = np.concatenate([start, [len(sorted_key)]])
        # was the stored (a, b) traversal also the stored direction?
        self._forward = (directed[:, 0] < directed[:, 1])[order]
        self._index = {(int(ea), int(eb)): i
                       for i, (ea, eb) in enumerate(self.edges)}

    @property
    def n_edges(self):
        return len(self.edges)

    def edge_faces(self, a, b):
        """Faces incident to undirected edge (a, b)."""
        key = (min(a, b), max(a, b))
        i = self._index.get(key)
        if i is None:
            raise InputError(f"no edge {key} in mesh")
        return self._incident[self._offsets[i]:self._offsets[i + 1]].copy()

    def boundary_edges(self):
        return self.edges[self.edge_face_counts == 1]

    def nonmanifold_edges(self):
        return self.edges[self.edge_face_counts > 2]

    def is_closed(self):
        return bool((self.edge_face_counts != 1).all())

    def is_manifold(self):
        return bool((self.edge_face_counts <= 2).all())

    def is_oriented(self):
        """True if every interior edge is traversed once in each direction."""
        two = self.edge_face_counts == 2
        starts = self._offsets[:-1][two]
        return bool((self._forward[starts] != self._forward[starts + 1]).all())

    def interior_edge_faces(self):
        """(k,) edge ids and (k, 2) face pairs for edges with exactly 2 faces."""
        two = np.nonzero(self.edge_face_counts == 2)[0]
        starts = self._offsets[:-1][two]
        pairs = np.column_stack([self._incident[starts],
                                 self._incident[starts + 1]])
        return two, pairs

    def vertex_is_interior(self):
        """Per-vertex flag: every incident edge has exactly two faces.

        Vertices not on any edge are reported as not interior.
        """
        n = int(self.edges.max()) + 1 if len(self.edges) else 0
        touched = np.zeros(n, dtype=bool)
        bad = np.zeros(n, dtype=bool)
        np.add.at(touched, self.edges.ravel(), True)
        not_two = self.edge_face_counts != 2
        np.add.at(bad, self.edges[not_two].ravel(), True)
        return touched & ~bad


def build_edge_adjacency(mesh):
    if mesh.n_faces == 0:
        raise EmptyMeshError("mesh has no faces")
    return EdgeAdjacency(mesh)


# -- discrete curvature ------------------------------------------------------


@dataclass
class CurvatureField:
    """Angle deficit per vertex; boundary and isolated vertices are flagged
    and carry deficit 0."""

    deficit: np.ndarray
    is_interior: np.ndarray

    def hyperbolic_vertices(self):
        """Interior vertices with clearly negative deficit."""
        return np.nonzero(self.is_interior & (self.deficit < -EPS_ANGLE))[0]


def vertex_angle_deficit(mesh, adjacency=None):
    """Discrete Gaussian curvature proxy: 2*pi minus the incident angle sum.

    The deficit sign stands in for the sign of the Gaussian curvature;
    boundary vertices never count as curved here.
    """
    if adjacency is None:
        adjacency = build_edge_adjacency(mesh)
    v = mesh.vertices
    f = mesh.faces
    angle_sum = np.zeros(len(v))
    for corner in range(3):
        p = v[f[:, corner]]
        e1 = v[f[:, (corner + 1) % 3]] - p
        e2 = v[f[:, (corner + 2) % 3]] - p
        cross = np.linalg.norm(np.cross(e1, e2), axis=1)
        dot = np.einsum("ij,ij->i", e1, e2)
        np.add.at(angle_sum, f[:, corner], np.arctan2(cross, dot))
    interior = np.zeros(len(v), dtype=bool)
    flags = adjacency.vertex_is_interior()
    interior[:len(flags)] = flags
    deficit = np.where(interior, 2.0 * np.pi - angle_sum, 0.0)
    return CurvatureField(deficit=deficit, is_interior=interior)


# -- edge concavity ----------------------------------------------------------


def edge_concavity_values(mesh, adjacency=None):
    """Signed concavity measure for every interior manifold edge.

    For edge faces (f1, f2) the measure is dot(n1, centroid2 - centroid1):
    positive when the surface folds toward the normals (concave), negative
    when it folds away (convex). Returns (edge_ids, face_pairs, values).
    """
    if adjacency is None:
        adjacency = build_edge_adjacency(mesh)
    edge_ids, pairs = adjacency.interior_edge_faces()
    n1 = mesh.face_normals[pairs[:, 0]]
    c1 = mesh.face_centroids[pairs[:, 0]]
    c2 = mesh.face_centroids[pairs[:, 1]]
    values = np.einsum("ij,ij->i", n1, c2 - c1)
    return edge_ids, pairs, values


def classify_edge_concavity(mesh, edge, adjacency=None):
    """Classify one edge as "concave", "convex", or "planar"."""
    if adjacency is None:
        adjacency = build_edge_adjacency(mesh)
    faces = adjacency.edge_faces(edge[0], edge[1])
    if len(faces) != 2:
        raise InputError(
            f"edge {tuple(edge)} has {len(faces)} incident faces, need 2")
    n1 = mesh.face_normals[faces[0]]
    c1 = mesh.face_centroids[faces[0]]
    c2 = mesh.face_centroids[faces[1]]
    s = float(np.dot(n1, c2 - c1))
    eps = PLANE_REL * mesh.bbox_diagonal()
    if s > eps:
        return "concave"
    if s < -eps:
        return "convex"
    return "planar"


# -- connectivity ------------------------------------------------------------


def connected_components(mesh, face_indices=None, adjacency=None):
    """Connected components of a face subset under shared-edge adjacency.

    Returns a list of sorted index arrays, ordered by smallest contained
    face index. ``face_indices=None`` means all faces.
    """
    if adjacency is None:
        adjacency = build_edge_adjacency(mesh)
    if face_indices is None:
        face_indices = np.arange(mesh.n_faces)
    faces = np.unique(np.asarray(face_indices, dtype=np.int64))
    if len(faces) == 0:
        return []
    in_set = np.zeros(mesh.n_faces, dtype=bool)
    in_set[faces] = True
    _, pairs = adjacency.interior_edge_faces()
    keep = in_set[pairs[:, 0]] & in_set[pairs[:, 1]]
    pairs = pairs[keep]

    parent = {int(i): int(i) for i in faces}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for fa, fb in pairs:
        ra, rb = find(int(fa)), find(int(fb))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    groups = {}
    for i in faces:
        groups.setdefault(find(int(i)), []).append(int(i))
    comps = [np.asarray(sorted(members), dtype=np.int64)
             for members in groups.values()]
    comps.sort(key=lambda c: int(c[0]))
    return comps


# -- convex hull and bounding ball -------------------------------------------


def convex_hull(points):
    """Convex hull as an outward-oriented TriangleMesh.

    Raises DegenerateGeometryError (with the detected dimension) when the
    points do not span 3D.
    """
    from scipy.spatial import ConvexHull as _Hull
    from scipy.spatial import QhullError

    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)

    def _rank():
        centered = pts - pts.mean(axis=0)
        if len(pts) < 2:
            return 0
        s = np.linalg.svd(centered, compute_uv=False)
        scale = s[0] if s[0] > 0 else 1.0
        return int((s / scale > 1e-9).sum())

    if len(pts) < 4:
        raise DegenerateGeometryError(
            f"need at least 4 points for a hull, got {len(pts)}",
            dimension=_rank())
    try:
        hull = _Hull(pts)
    except QhullError as exc:
        raise DegenerateGeometryError(
            f"points are not full-dimensional: {exc}",
            dimension=_rank()) from exc

    simplices = hull.simplices.astype(np.int64)
    normals = hull.equations[:, :3]
    p0 = pts[simplices[:, 0]]
    p1 = pts[simplices[:, 1]]
    p2 = pts[simplices[:, 2]]
    flip = np.einsum("ij,ij->i", np.cross(p1 - p0, p2 - p0), normals) < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]

    used, inverse = np.unique(simplices, return_inverse=True)
    return TriangleMesh(pts[used], inverse.reshape(simplices.shape),
                        validate=False)


def bounding_ball_radius(points):
    """Radius of an enclosing ball, within 1.5x of the minimal one.

    Two passes: a farthest-point diameter guess seeds the ball, a growth
    sweep absorbs stragglers, and the radius is tightened to the farthest
    point from the final center.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(pts) == 0:
        raise EmptyMeshError("no points")
    if len(pts) == 1:
        return 0.0
    p = pts[np.argmax(np.linalg.norm(pts - pts[0], axis=1))]
    q = pts[np.argmax(np.linalg.norm(pts - p, axis=1))]
    center = 0.5 * (p + q)
    radius = 0.5 * float(np.linalg.norm(p - q))
    for pt in pts:
        d = float(np.linalg.norm(pt - center))
        if d > radius:
            shift = 0.5 * (d - radius)
            center = center + (pt - center) * (shift / d)
            radius += shift
    return float(np.linalg.norm(pts - center, axis=1).max())
