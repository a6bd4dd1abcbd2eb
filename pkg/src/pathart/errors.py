"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed condition or domain text, with a 1-based source position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class UnboundVariable(LookupError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable {name!r}")


class DegenerateDomain(ValueError):
    def __init__(self, name: str, size: int, n: int):
        self.name = name
        super().__init__(
            f"dimension {name!r} has {size} integer values, fewer than n={n} cells"
        )


class NotAdjacent(ValueError):
    pass


class Exhausted(RuntimeError):
    """First-valid search gave up: the condition may be unsatisfiable or the
    satisfying region is finer than the largest grid tried."""

    def __init__(self, probes_used: int, last_n: int, reason: str = "n_max reached"):
        self.probes_used = probes_used
        self.last_n = last_n
        self.reason = reason
        super().__init__(
            f"no valid cell found ({reason}; last n={last_n}, probes={probes_used})"
        )


class UnsatProven(RuntimeError):
    """Every cell was refuted by interval evaluation."""


class AcceptanceTooLow(RuntimeError):
    def __init__(self, generated: int, accepted: int, requested: int):
        self.generated = generated
        self.accepted = accepted
        self.requested = requested
        super().__init__(
            f"acceptance cap hit after {generated} evaluations "
            f"({accepted}/{requested} accepted)"
        )
