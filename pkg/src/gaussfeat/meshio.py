"""Mesh file loading and saving: binary/ASCII STL and Wavefront OBJ.

Loading always welds duplicate vertices (STL stores one vertex triple
per facet corner) and drops degenerate faces; what was removed is
available in the returned report.
"""

import json
import logging
import struct

import numpy as np

from .errors import EmptyMeshError, MeshFormatError
from .mesh import TriangleMesh, clean_mesh

log = logging.getLogger(__name__)

_STL_RECORD = 50  # 12 float32 + uint16 attribute
_STL_HEADER = 84


def load_mesh(path, format=None):
    """Load a triangle mesh; format is sniffed when not given.

    Accepted formats: "stl" (binary or ASCII, auto), "obj".
    Returns a cleaned TriangleMesh; parse failures raise MeshFormatError
    with the offending location, empty files raise EmptyMeshError.
    """
    mesh, _ = load_mesh_report(path, format)
    return mesh


def load_mesh_report(path, format=None):
    path = str(path)
    if format is None:
        format = "obj" if path.lower().endswith(".obj") else "stl"
    if format == "obj":
        vertices, faces = _parse_obj(path)
    elif format in ("stl", "stl-binary", "stl-ascii"):
        with open(path, "rb") as handle:
            blob = handle.read()
        if format == "stl-ascii" or (format == "stl" and _looks_ascii(blob)):
            vertices, faces = _parse_stl_ascii(path, blob)
        else:
            vertices, faces = _parse_stl_binary(path, blob)
    else:
        raise MeshFormatError(f"unknown mesh format {format!r}")
    if len(faces) == 0:
        raise EmptyMeshError(f"{path}: no faces")
    mesh, report = clean_mesh(vertices, faces)
    if report["welded_vertices"] or report["dropped_faces"]:
        log.debug("%s: welded %d vertices, dropped %d faces", path,
                  report["welded_vertices"], report["dropped_faces"])
    return mesh, report


def _looks_ascii(blob):
    if not blob.lstrip().startswith(b"solid"):
        return False
    # binary files may also start with "solid": trust the record count
    if len(blob) >= _STL_HEADER:
        (count,) = struct.unpack_from("<I", blob, 80)
        if _STL_HEADER + _STL_RECORD * count == len(blob):
            return False
    return True


def _parse_stl_binary(path, blob):
    if len(blob) < _STL_HEADER:
        raise MeshFormatError(
            f"{path}: binary STL shorter than the 84-byte preamble")
    (count,) = struct.unpack_from("<I", blob, 80)
    expected = _STL_HEADER + _STL_RECORD * count
    if len(blob) < expected:
        raise MeshFormatError(
            f"{path}: header promises {count} facets ({expected} bytes), "
            f"file has {len(blob)}")
    records = np.frombuffer(blob, dtype=np.uint8,
                            count=_STL_RECORD * count, offset=_STL_HEADER)
    records = records.reshape(count, _STL_RECORD)
    floats = records[:, :48].copy().view("<f4").reshape(count, 4, 3)
    vertices = floats[:, 1:4, :].astype(np.float64).reshape(-1, 3)
    faces = np.arange(3 * count, dtype=np.int64).reshape(-1, 3)
    return vertices, faces


def _parse_stl_ascii(path, blob):
    try:
        text = blob.decode("ascii")
    except UnicodeDecodeError as exc:
        raise MeshFormatError(f"{path}: not ASCII at byte {exc.start}") from exc
    vertices = []
    corners = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens:
            continue
        word = tokens[0].lower()
        if word == "vertex":
            if len(tokens) != 4:
                raise MeshFormatError(
                    f"{path}:{lineno}: vertex needs 3 coordinates")
            try:
                vertices.append([float(t) for t in tokens[1:]])
            except ValueError:
                raise MeshFormatError(
                    f"{path}:{lineno}: bad vertex coordinate") from None
            corners += 1
        elif word == "endloop":
            if corners != 3:
                raise MeshFormatError(
                    f"{path}:{lineno}: facet loop has {corners} vertices, "
                    "triangles required")
            corners = 0
        elif word in ("solid", "endsolid", "facet", "endfacet", "outer"):
            continue
        else:
            raise MeshFormatError(f"{path}:{lineno}: unexpected {word!r}")
    vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    faces = np.arange(len(vertices), dtype=np.int64).reshape(-1, 3)
    return vertices, faces


def _parse_obj(path):
    vertices = []
    faces = []
    with open(path, "r", encoding="utf-8", errors="replace") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if tokens[0] == "v":
                if len(tokens) < 4:
                    raise MeshFormatError(
                        f"{path}:{lineno}: vertex needs 3 coordinates")
                try:
                    vertices.append([float(t) for t in tokens[1:4]])
                except ValueError:
                    raise MeshFormatError(
                        f"{path}:{lineno}: bad vertex coordinate") from None
            elif tokens[0] == "f":
                if len(tokens) < 4:
                    raise MeshFormatError(
                        f"{path}:{lineno}: face needs at least 3 vertices")
                idx = []
                for token in tokens[1:]:
                    head = token.split("/")[0]
                    try:
                        i = int(head)
                    except ValueError:
                        raise MeshFormatError(
                            f"{path}:{lineno}: bad face index {token!r}"
                        ) from None
                    if i == 0:
                        raise MeshFormatError(
                            f"{path}:{lineno}: OBJ indices are 1-based")
                    idx.append(i - 1 if i > 0 else len(vertices) + i)
                for k in range(1, len(idx) - 1):  # fan for polygons
                    faces.append([idx[0], idx[k], idx[k + 1]])
            # othr directives (vn, vt, g, o, s, usemtl, ...) are ignored
    vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    if len(faces) and (faces.min() < 0 or faces.max() >= len(vertices)):
        raise MeshFormatError(f"{path}: face index out of range")
    return vertices, faces


# -- writers -----------------------------------------------------------------


def write_stl(path, mesh, binary=True, name="mesh"):
    """Write a mesh as STL (binary by default)."""
    v = mesh.vertices
    f = mesh.faces
    normals = mesh.face_normals
    if binary:
        blob = bytearray()
        header = name.encode("ascii", "replace")[:80]
        blob += header + b"\0" * (80 - len(header))
        blob += struct.pack("<I", len(f))
        tri = np.empty((len(f), 12), dtype="<f4")
        tri[:, 0:3] = normals
        tri[:, 3:6] = v[f[:, 0]]
        tri[:, 6:9] = v[f[:, 1]]
        tri[:, 9:12] = v[f[:, 2]]
        records = np.zeros((len(f), _STL_RECORD), dtype=np.uint8)
        records[:, :48] = tri.view(np.uint8).reshape(len(f), 48)
        blob += records.tobytes()
        with open(path, "wb") as handle:
            handle.write(blob)
        return
    with open(path, "w", encoding="ascii") as handle:
        handle.write(f"solid {name}\n")
        for i in range(len(f)):
            n = normals[i]
            handle.write(f"  facet normal {n[0]:.9g} {n[1]:.9g} {n[2]:.9g}\n")
            handle.write("    outer loop\n")
            for corner in f[i]:
                p = v[corner]
                handle.write(
                    f"      vertex {p[0]:.9g} {p[1]:.9g} {p[2]:.9g}\n")
            handle.write("    endloop\n  endfacet\n")
        handle.write(f"endsolid {name}\n")


def write_obj(path, mesh, face_groups=None, group_labels=None):
    """Write an OBJ file, optionally with ``g`` groups per feature.

    ``face_groups`` maps each face to a group id; ``group_labels`` maps
    group ids to readable names. When labels are given a sidecar JSON
    (same path plus ".json") records the group-to-label table.
    """
    v = mesh.vertices
    f = mesh.faces
    lines = []
    for p in v:
        lines.append(f"v {p[0]:.9g} {p[1]:.9g} {p[2]:.9g}")
    if face_groups is None:
        for tri in f:
            lines.append(f"f {tri[0] + 1} {tri[1] + 1} {tri[2] + 1}")
    else:
        face_groups = np.asarray(face_groups)
        order = np.argsort(face_groups, kind="stable")
        current = None
        for i in order:
            gid = int(face_groups[i])
            if gid != current:
                name = (group_labels or {}).get(gid, f"group_{gid}")
                lines.append(f"g {name}")
                current = gid
            tri = f[i]
            lines.append(f"f {tri[0] + 1} {tri[1] + 1} {tri[2] + 1}")
    with open(path, "w", encoding="ascii") as handle:
        handle.write("\n".join(lines) + "\n")
    if face_groups is not None and group_labels is not None:
        table = {str(gid): label for gid, label in sorted(group_labels.items())}
        with open(str(path) + ".json", "w", encoding="ascii") as handle:
            json.dump({"groups": table}, handle, indent=2, sort_keys=True)
            handle.write("\n")
