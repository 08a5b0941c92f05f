import numpy as np
import pytest

from gaussfeat.mesh import TriangleMesh


def make_box(size=(1.0, 1.0, 1.0), origin=(0.0, 0.0, 0.0)):
    """Axis-aligned closed box, two triangles per side, outward normals."""
    sx, sy, sz = size
    ox, oy, oz = origin
    v = np.array([
        [0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
        [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1],
    ], dtype=float) * [sx, sy, sz] + [ox, oy, oz]
    f = np.array([
        [0, 2, 1], [0, 3, 2],      # bottom (-z)
        [4, 5, 6], [4, 6, 7],      # top (+z)
        [0, 1, 5], [0, 5, 4],      # front (-y)
        [2, 3, 7], [2, 7, 6],      # back (+y)
        [1, 2, 6], [1, 6, 5],      # right (+x)
        [3, 0, 4], [3, 4, 7],      # left (-x)
    ])
    return TriangleMesh(v, f)


def make_grid_patch(nx=4, ny=4, z_fn=None):
    """Open rectangular patch of (nx*ny) cells, normals up."""
    xs = np.linspace(0.0, 1.0, nx + 1)
    ys = np.linspace(0.0, 1.0, ny + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    gz = np.zeros_like(gx) if z_fn is None else z_fn(gx, gy)
    v = np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])
    f = []
    for i in range(nx):
        for j in range(ny):
            a = i * (ny + 1) + j
            b = (i + 1) * (ny + 1) + j
            f.append([a, b, b + 1])
            f.append([a, b + 1, a + 1])
    return TriangleMesh(v, np.array(f))


def make_tube(radius=1.0, height=2.0, segments=24, cap_bottom=False,
              inward=False):
    """Open cylinder wall around z, optional bottom disk.

    Outward normals model a boss; ``inward=True`` flips everything so
    the surface reads as a drilled hole (walls face the axis, the floor
    faces up toward the mouth).
    """
    ang = 2.0 * np.pi * np.arange(segments) / segments
    ring = np.column_stack([radius * np.cos(ang), radius * np.sin(ang)])
    bottom = np.column_stack([ring, np.zeros(segments)])
    top = np.column_stack([ring, np.full(segments, height)])
    verts = [bottom, top]
    faces = []
    for i in range(segments):
        j = (i + 1) % segments
        faces.append([i, j, segments + j])
        faces.append([i, segments + j, segments + i])
    if cap_bottom:
        center = len(bottom) + len(top)
        verts.append(np.array([[0.0, 0.0, 0.0]]))
        for i in range(segments):
            j = (i + 1) % segments
            faces.append([center, j, i])
    faces = np.array(faces)
    if inward:
        faces = faces[:, ::-1]
    return TriangleMesh(np.vstack(verts), faces)


def make_open_pocket(plan=(4.0, 3.0), depth=1.2):
    """Four inward-facing walls plus a floor; the top stays open.

    Centered on the origin in x, y with the mouth plane at z = 0.
    """
    w, l = plan
    x, y = 0.5 * w, 0.5 * l
    v = np.array([
        [-x, -y, -depth], [x, -y, -depth], [x, y, -depth], [-x, y, -depth],
        [-x, -y, 0.0], [x, -y, 0.0], [x, y, 0.0], [-x, y, 0.0],
    ])
    f = np.array([
        [0, 1, 2], [0, 2, 3],      # floor, normal up into the pocket
        [0, 4, 5], [0, 5, 1],      # -y wall, faces +y
        [1, 5, 6], [1, 6, 2],      # +x wall, faces -x
        [2, 6, 7], [2, 7, 3],      # +y wall, faces -y
        [3, 7, 4], [3, 4, 0],      # -x wall, faces +x
    ])
    return TriangleMesh(v, f)


def random_rotation(rng):
    """Uniform random rotation matrix (QR of a Gaussian matrix)."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 2] *= -1
    return q


@pytest.fixture
def box_mesh():
    return make_box()
