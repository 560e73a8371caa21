"""Exception hierarchy shared by every module of the package."""


class BorelError(Exception):
    """Base class for all errors raised by borelsum."""


class ParameterError(BorelError, ValueError):
    """An argument is outside its admissible domain."""


class RangeError(BorelError, ValueError):
    """A requested order, radius or point lies beyond the available range."""


class ValidationError(BorelError, ValueError):
    """A contour violates the hypotheses of the bent-contour Watson lemma."""


class GeometryError(BorelError, ValueError):
    """A path or contour comes too close to an excluded point set."""


class DivergenceError(BorelError, ArithmeticError):
    """The Laplace kernel does not decay along the contour tail."""


class BranchError(BorelError, ValueError):
    """A point lies on a branch cut of a multivalued map."""


class InsufficientSignalError(BorelError, ArithmeticError):
    """A fitted quantity is buried in quadrature noise."""


class LandauPoleError(BorelError, ZeroDivisionError):
    """The one-loop running coupling was evaluated at its Landau pole."""
