"""Exception hierarchy shared across the package."""


class StopGameError(Exception):
    """Base class for all package errors."""


class ValidationError(StopGameError, ValueError):
    """Malformed instance data, e.g. a broken tree or an incomplete payoff table.

    ``node`` names the offending node id when there is one.
    """

    def __init__(self, message, node=None):
        self.node = node
        if node is not None:
            message = f"node {node}: {message}"
        super().__init__(message)


class CapacityError(StopGameError):
    """An exhaustive enumeration would exceed its configured cap."""

    def __init__(self, what, cap, needed=None):
        self.what = what
        self.cap = cap
        self.needed = needed
        msg = f"{what} exceeds cap {cap}"
        if needed is not None:
            msg += f" (needs {needed})"
        super().__init__(msg)


class OrderingError(StopGameError):
    """Closed-loop Dynkin solve requested with lower > upper at some node."""

    def __init__(self, node, lower, upper):
        self.node = node
        super().__init__(
            f"lower ({lower}) > upper ({upper}) at node {node}; "
            "use dynkin_open_loop for unordered families"
        )


class ConvergenceError(StopGameError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no fixed point after {iterations} iterations (residual {residual})"
        )


class CaseIdentityError(StopGameError):
    """Best-response case identity broken: the strategy map is not Type II."""
