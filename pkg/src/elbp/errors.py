"""Exception hierarchy.

Everything raised for bad input data derives from :class:`ElbpError`, which the
CLI maps to its data-error exit status.
"""


class ElbpError(Exception):
    pass


class ImageFormatError(ElbpError):
    """Unknown magic number or unsupported container."""


class CorruptImageError(ElbpError):
    """Header or payload is truncated or malformed."""


class UnsupportedDepthError(ElbpError):
    """Sample depth other than 8 bits."""


class GeometryError(ElbpError):
    """Degenerate crop geometry, e.g. coincident eye points."""


class OutOfBoundsError(ElbpError, IndexError):
    pass


class ImageTooSmallError(ElbpError):
    pass


class ModelFormatError(ElbpError):
    pass


class ModelVersionError(ModelFormatError):
    pass


class ModelTruncatedError(ModelFormatError):
    pass


class IncompatibleModelsError(ElbpError):
    pass


class ManifestError(ElbpError):
    pass


class DatasetError(ElbpError):
    pass
