"""Exception types shared across the package."""


class GallaiError(Exception):
    """Base class for errors raised by this package."""


class SchemaError(GallaiError, ValueError):
    """Malformed JSON input, unknown colors or fields."""


class NotGallaiError(GallaiError, ValueError):
    """An operation defined only on Gallai multigraphs got a rainbow triangle."""


class CliqueViolation(GallaiError):
    """The double-edge relation failed to form uniformly colored cliques."""

    def __init__(self, reason: str, triple: tuple[int, ...] | None = None):
        super().__init__(reason if triple is None else f"{reason}: {triple}")
        self.reason = reason
        self.triple = triple


class ConstructionError(GallaiError, ValueError):
    """Inputs to a construction violate its requirements."""


class BoundsError(GallaiError, ValueError):
    """An exhaustive search was asked to exceed its configured bounds."""
