"""Exception types shared across the toolkit."""


class HorseshoeError(Exception):
    """Base class for all toolkit errors."""


class NotIrreducible(HorseshoeError):
    """Operation requires an irreducible matrix."""


class NotChaotic(HorseshoeError):
    """Operation requires an irreducible, non-minimal matrix."""


class NoConvergence(HorseshoeError):
    """Eigenvalue iteration exhausted its budget."""


class BudgetExceeded(HorseshoeError):
    """Enumeration would exceed the configured budget."""


class DimensionMismatch(HorseshoeError):
    """State dimension does not match the system."""


class OutOfRange(HorseshoeError):
    """Chart coordinates outside the unit square."""


class Escaped(HorseshoeError):
    """Orbit left the escape radius during integration."""

    def __init__(self, state, t):
        super().__init__(f"orbit escaped at t={t:.6g}")
        self.state = state
        self.t = t


class NoReturn(HorseshoeError):
    """No qualifying section crossing before max_time."""

    def __init__(self, t_max):
        super().__init__(f"no section return within max_time={t_max:.6g}")
        self.t_max = t_max


class OffSection(HorseshoeError):
    """Point violates the section membership constraints."""

    def __init__(self, point, reason=""):
        msg = f"point {tuple(point)} is off the section"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
        self.point = point


class InvalidBlocks(HorseshoeError):
    """Block set violates convexity or pairwise disjointness."""


class ScenarioError(HorseshoeError):
    """Scenario file failed schema or invariant validation."""

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
