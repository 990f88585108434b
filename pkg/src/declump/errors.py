"""Exception types raised by the declump package."""


class DeclumpError(Exception):
    """Base class for all declump errors."""


class NotFound(DeclumpError):
    """Requested label is absent from the mask."""


class AmbiguousRegion(DeclumpError):
    """Label maps to more than one connected component."""


class TooSmall(DeclumpError):
    """Region or polygon is below the minimum usable size."""


class InvalidBoundary(DeclumpError):
    """Polygon is self-intersecting or otherwise unusable."""


class DegenerateVertex(DeclumpError):
    """No usable tangent could be computed at a vertex."""


class BoundaryTooShort(DeclumpError):
    """Boundary has too few vertices for the requested stencil."""


class DuplicateSeed(DeclumpError):
    """Two seed points coincide."""


class EmptySeeds(DeclumpError):
    """No seed points were supplied."""


class SeedOutsideBoundary(DeclumpError):
    """A seed point lies outside the boundary polygon."""


class ShapeMismatch(DeclumpError):
    """Rasters that must share a shape do not."""


class GenerationFailed(DeclumpError):
    """Synthetic clump generation exhausted its retry budget."""


class EmptyField(DeclumpError):
    """Operation received an empty raster field."""
