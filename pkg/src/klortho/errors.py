"""Exception hierarchy shared by the library and the command line."""


class KLError(Exception):
    """Base class for every error raised by klortho."""


class PoleError(KLError, ValueError):
    """A gamma or Pochhammer argument sits on (or next to) a pole."""


class DomainError(KLError, ValueError):
    """Arguments outside the supported parameter box or a family's range."""


class ConvergenceError(KLError, ArithmeticError):
    """A series or quadrature failed to converge, or produced non-finite values."""
