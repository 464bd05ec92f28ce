"""Exception types shared across the package."""


class ShapeError(ValueError):
    """Invalid subgraph input (empty cell set, malformed shape file, ...)."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class CapExceededError(ValueError):
    """A size cap (dense solver, enumeration, brute force) was exceeded."""


class ConvergenceError(RuntimeError):
    """An iterative solver hit its iteration cap.

    ``best_estimate`` carries the last eigenvalue estimate and ``residual``
    the residual norm reached at that point.
    """

    def __init__(self, message, best_estimate=None, residual=None, iterations=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.residual = residual
        self.iterations = iterations
