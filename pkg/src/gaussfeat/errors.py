"""Exception hierarchy shared across the package.

Errors are grouped by how a command-line caller should react:
``InputError`` means the caller handed us something unusable,
``MismatchError`` means two otherwise-valid artifacts do not belong
together (wrong signature width, wrong schema version, ...), and
``InternalError`` flags a broken invariant inside the library itself.
"""


class GaussFeatError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GaussFeatError):
    """Unusable input: bad file, empty mesh, degenerate geometry, bad config."""


class MeshFormatError(InputError):
    """A mesh file could not be parsed; message carries the location."""


class EmptyMeshError(InputError):
    """A mesh with zero faces where faces are required."""


class DegenerateGeometryError(InputError):
    """Geometry without enough dimensions for the requested operation."""

    def __init__(self, message, dimension=None):
        super().__init__(message)
        self.dimension = dimension


class PlacementError(InputError):
    """Feature placements overlap or fall outside the stock."""


class ConfigError(InputError):
    """Invalid parameter value (ratios, nv, class name, ...)."""


class MismatchError(GaussFeatError):
    """Artifacts that do not fit each other (model vs. data, schema version)."""


class PersistenceError(MismatchError):
    """A stored model or dataset file has the wrong schema or is corrupt."""


class InternalError(GaussFeatError):
    """An invariant the library guarantees was violated; always a bug."""
