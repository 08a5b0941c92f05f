"""Gauss map area signatures.

A mesh is summarized by where its facet normals point: the unit sphere
is sampled at ``nv`` directions (two poles plus latitude rings), every
facet's area is credited to the sampled direction nearest its normal,
and the histogram is normalized to area fractions. The result is a
fixed-length vector that ignores scale and tessellation.
"""

from dataclasses import dataclass

import numpy as np

from ._base import BaseEstimator
from .errors import ConfigError, DegenerateGeometryError, EmptyMeshError, MismatchError
from .validation import check_is_fitted

# nv -> (rings, longitudes); nv = 2 + rings * longitudes
_LAYOUTS = {27: (5, 5), 102: (10, 10), 227: (15, 15)}

# components this close to zero are snapped to exactly zero before
# binning, so normals that sit on a bin boundary by construction
# (e.g. walls parallel to the major axis) bin identically no matter
# which float-rounding path produced them
_SNAP = 1e-9


@dataclass(frozen=True)
class SphereSampling:
    """Sampled directions on the unit sphere.

    Index 0 is the north pole (0, 0, 1), the last index is the south
    pole, and ring ``i`` (1-based) occupies indices ``1 + (i-1)*L``
    through ``i*L``, west to east, north to south.
    """

    nv: int
    rings: int
    longitudes: int
    directions: np.ndarray

    def ring_slice(self, ring):
        """Index range of 1-based ring number ``ring``."""
        if not 1 <= ring <= self.rings:
            raise ConfigError(f"ring must be in 1..{self.rings}")
        start = 1 + (ring - 1) * self.longitudes
        return slice(start, start + self.longitudes)


def make_sphere_sampling(nv=102):
    if nv not in _LAYOUTS:
        raise ConfigError(
            f"nv must be one of {sorted(_LAYOUTS)}, got {nv}")
    rings, longs = _LAYOUTS[nv]
    # one longitude quadrant is computed, the rest is mirrored, so
    # directions that are geometric mirror images share bitwise values
    # and normals on a mirror plane produce exact dot-product ties that
    # resolve by index instead of by rounding noise
    cos_phi = np.empty(longs)
    sin_phi = np.empty(longs)
    for j in range(longs // 4 + 1):
        ang = 2.0 * np.pi * j / longs
        cos_phi[j] = np.cos(ang)
        sin_phi[j] = np.sin(ang)
    for j in range(longs // 4 + 1, longs // 2 + 1):
        if longs % 2 == 0:
            cos_phi[j] = -cos_phi[longs // 2 - j]
            sin_phi[j] = sin_phi[longs // 2 - j]
        else:
            ang = 2.0 * np.pi * j / longs
            cos_phi[j] = np.cos(ang)
            sin_phi[j] = np.sin(ang)
    for j in range(longs // 2 + 1, longs):
        cos_phi[j] = cos_phi[longs - j]
        sin_phi[j] = -sin_phi[longs - j]

    # same idea for the rings: build the northern half and mirror it,
    # so ties across the equator are exact as well
    sin_theta = np.empty(rings)
    cos_theta = np.empty(rings)
    for i in range(1, rings // 2 + 1):
        theta = i * np.pi / (rings + 1)
        sin_theta[i - 1] = np.sin(theta)
        cos_theta[i - 1] = np.cos(theta)
        sin_theta[rings - i] = sin_theta[i - 1]
        cos_theta[rings - i] = -cos_theta[i - 1]
    if rings % 2 == 1:
        mid = rings // 2
        sin_theta[mid] = 1.0
        cos_theta[mid] = 0.0

    directions = np.empty((nv, 3))
    directions[0] = (0.0, 0.0, 1.0)
    for i in range(rings):
        block = slice(1 + i * longs, 1 + (i + 1) * longs)
        directions[block, 0] = sin_theta[i] * cos_phi
        directions[block, 1] = sin_theta[i] * sin_phi
        directions[block, 2] = cos_theta[i]
    directions[-1] = (0.0, 0.0, -1.0)
    directions.setflags(write=False)
    return SphereSampling(nv=nv, rings=rings, longitudes=longs,
                          directions=directions)


def nearest_direction(sampling, normal):
    """Index of the sampled direction with the largest dot product.

    Exact ties resolve to the lowest index (numpy argmax semantics).
    """
    normal = np.asarray(normal, dtype=np.float64)
    if normal.shape != (3,):
        raise ConfigError(f"normal must be shape (3,), got {normal.shape}")
    return int(np.argmax(sampling.directions @ normal))


def nearest_directions(sampling, normals):
    """Vectorized nearest sampled direction for (n, 3) unit normals.

    A k-d tree prunes the candidates; the winner among candidates is
    re-ranked by the exact dot product with the same lowest-index tie
    rule as the one-at-a-time path, so both agree bit for bit.
    """
    from scipy.spatial import cKDTree

    normals = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
    if len(normals) == 0:
        return np.zeros(0, dtype=np.int64)
    k = min(sampling.nv, 16)
    tree = _tree_cache(sampling)
    _, candidates = tree.query(normals, k=k)
    candidates = candidates.reshape(len(normals), k)
    cand_dirs = sampling.directions[candidates]
    dots = np.einsum("nkj,nj->nk", cand_dirs, normals)
    best = dots.max(axis=1, keepdims=True)
    tied = dots == best
    picked = np.where(tied, candidates, sampling.nv).min(axis=1)
    return picked.astype(np.int64)


_TREES = {}


def _tree_cache(sampling):
    from scipy.spatial import cKDTree

    key = sampling.nv
    tree = _TREES.get(key)
    if tree is None:
        tree = cKDTree(sampling.directions)
        _TREES[key] = tree
    return tree


@dataclass(frozen=True)
class GaussSignature:
    """Normalized area histogram over the sampled directions."""

    values: np.ndarray
    nv: int


def compute_signature(mesh, sampling):
    """Signature of a mesh: per-direction area fractions.

    Facet normals are snapped componentwise to exact zeros within 1e-9
    before binning; see the module notes on boundary-riding normals.
    """
    if mesh.n_faces == 0:
        raise EmptyMeshError("cannot sign an empty mesh")
    areas = mesh.face_areas
    total = areas.sum()
    if total <= 0.0:
        raise DegenerateGeometryError("mesh has zero total area")
    normals = mesh.face_normals.copy()
    normals[np.abs(normals) < _SNAP] = 0.0
    bins = nearest_directions(sampling, normals)
    values = np.bincount(bins, weights=areas, minlength=sampling.nv)
    values /= total
    values.setflags(write=False)
    return GaussSignature(values=values, nv=sampling.nv)


class GaussMapEncoder(BaseEstimator):
    """Transformer: list of meshes -> (n, nv) signature matrix."""

    def __init__(self, nv=102):
        self.nv = nv

    def fit(self, X=None, y=None):
        self.sampling_ = make_sphere_sampling(self.nv)
        return self

    def transform(self, X):
        check_is_fitted(self, "sampling_")
        rows = [compute_signature(mesh, self.sampling_).values for mesh in X]
        return np.vstack(rows) if rows else np.zeros((0, self.nv))

    def fit_transform(self, X, y=None):
        return self.fit(X, y).transform(X)


# -- signature CSV ------------------------------------------------------------


def write_signature_csv(path, labels, matrix, nv):
    """Rows of ``label,v0,...`` behind a one-line layout header."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[1] != nv:
        raise ConfigError(
            f"matrix must be (n, {nv}), got {matrix.shape}")
    if len(labels) != len(matrix):
        raise ConfigError("labels and matrix row counts differ")
    with open(path, "w", encoding="ascii") as handle:
        handle.write(f"# gauss-signature nv={nv} layout=uv\n")
        for label, row in zip(labels, matrix):
            text = ",".join(f"{x:.9g}" for x in row)
            handle.write(f"{int(label)},{text}\n")


def read_signature_csv(path):
    """Read back (labels, matrix, nv); the header is authoritative for nv."""
    with open(path, "r", encoding="ascii") as handle:
        header = handle.readline().strip()
        parts = header.split()
        if (len(parts) < 3 or parts[0] != "#"
                or parts[1] != "gauss-signature"
                or not parts[2].startswith("nv=")):
            raise MismatchError(f"{path}: not a signature CSV (header {header!r})")
        try:
            nv = int(parts[2][3:])
        except ValueError:
            raise MismatchError(f"{path}: bad nv in header") from None
        labels = []
        rows = []
        for lineno, line in enumerate(handle, start=2):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != nv + 1:
                raise MismatchError(
                    f"{path}:{lineno}: expected {nv + 1} fields, "
                    f"got {len(fields)}")
            labels.append(int(fields[0]))
            rows.append([float(x) for x in fields[1:]])
    matrix = np.asarray(rows, dtype=np.float64).reshape(-1, nv)
    return np.asarray(labels, dtype=np.int64), matrix, nv
