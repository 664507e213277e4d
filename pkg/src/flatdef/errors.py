"""Exception hierarchy; the CLI maps these to exit code 1."""


class FlatdefError(Exception):
    """Base class for all input/geometry errors raised by this package."""

    @property
    def name(self) -> str:
        return type(self).__name__


class NonClosedPolygon(FlatdefError):
    pass


class NonSimplePolygon(FlatdefError):
    pass


class GluingMismatch(FlatdefError):
    pass


class BadConeAngle(FlatdefError):
    pass


class NotConnected(FlatdefError):
    pass


class NonPositiveLength(FlatdefError):
    pass


class SingularMatrix(FlatdefError):
    pass


class DeformationTooLarge(FlatdefError):
    pass


class DegenerateCylinder(FlatdefError):
    pass


class StaleCocycle(FlatdefError):
    pass


class InternalInvariantError(Exception):
    """A certified invariant failed; the CLI maps this to exit code 2."""
