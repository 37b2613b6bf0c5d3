"""Exception types raised while parsing crosswalks and computing scores."""


class GemError(Exception):
    """Base class for all gementropy errors."""


class ParseError(GemError):
    """A line or field could not be parsed. Carries file/line context."""

    def __init__(self, message, filename=None, line=None):
        self.filename = filename
        self.line = line
        prefix = ""
        if filename is not None:
            prefix = f"{filename}:"
        if line is not None:
            prefix += f"{line}:"
        if prefix:
            prefix += " "
        super().__init__(prefix + message)


class StructuralError(GemError):
    """Parsed values violate a structural invariant (flag combinations,
    scenario numbering gaps, mixed no-match sources, overlapping classes)."""

    def __init__(self, message, filename=None, line=None, source=None):
        self.filename = filename
        self.line = line
        self.source = source
        prefix = ""
        if filename is not None:
            prefix = f"{filename}:"
        if line is not None:
            prefix += f"{line}:"
        if prefix:
            prefix += " "
        super().__init__(prefix + message)


class EmptyMapError(GemError):
    """A map with no valid target codes (m = 0) was scored or used where a
    non-empty map is required; callers must exclude such maps."""

    def __init__(self, source=None, message=None):
        self.source = source
        if message is None:
            message = f"map {source!r} has no target codes (m = 0) and must be excluded"
        super().__init__(message)


class DegenerateMeasureError(GemError):
    """Normalization is impossible because a measure has zero spread."""

    def __init__(self, measure):
        self.measure = measure
        super().__init__(
            f"measure {measure!r} is constant across all maps; z-scores are undefined"
        )


class ConvergenceError(GemError):
    """Power iteration failed to converge within the iteration budget."""

    def __init__(self, residual, iterations):
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"eigenvector centrality did not converge after {iterations} "
            f"iterations (residual {residual:.3e})"
        )
