"""Exception hierarchy shared by every module of the package."""


class HilbertGeometryError(ValueError):
    """Base class for all errors raised by :mod:`hilbertgeom`."""


class InvalidBody(HilbertGeometryError):
    pass


class PointNotInterior(HilbertGeometryError):
    pass


class ZeroDirection(HilbertGeometryError):
    pass


class NotOnBoundary(HilbertGeometryError):
    pass


class UnsupportedRepresentation(HilbertGeometryError):
    pass


class SingularMap(HilbertGeometryError):
    pass


class ImageUnbounded(HilbertGeometryError):
    pass


class RegionNotInside(HilbertGeometryError):
    pass


class TriangleNotInside(HilbertGeometryError):
    pass


class NotACornerOrFlat(HilbertGeometryError):
    pass


class DeltaTooLarge(HilbertGeometryError):
    pass


class SolverDidNotConverge(HilbertGeometryError):
    pass


class BodyIsEllipse(HilbertGeometryError):
    """Raised when the non-ellipse dichotomy is requested on an ellipse.

    ``areas`` carries the two triangle areas that were computed anyway.
    """

    def __init__(self, message, areas=()):
        super().__init__(message)
        self.areas = tuple(areas)


class DegenerateTriangle(HilbertGeometryError):
    pass


class OutsideDomain(HilbertGeometryError):
    pass


class OutOfRange(HilbertGeometryError):
    pass


class NegativeT(HilbertGeometryError):
    pass


class NonpositiveT(HilbertGeometryError):
    pass


class OutsideSquare(HilbertGeometryError):
    pass


class DegenerateDirection(HilbertGeometryError):
    pass


class PreconditionViolated(HilbertGeometryError):
    pass


class NoIntersection(HilbertGeometryError):
    pass


class RectangleNotInside(HilbertGeometryError):
    pass
