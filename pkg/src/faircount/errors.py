"""Exception types shared across the package."""


class FaircountError(Exception):
    """Base class for package-specific errors."""


class ShapeError(FaircountError):
    """An element does not match the group descriptor it is used with."""


class CapExceededError(FaircountError):
    """A computation would exceed a configured enumeration or work cap."""


class SieveLimitError(FaircountError):
    """A sieve request exceeds the memory budget or an available table."""


class InconsistentDatumError(FaircountError):
    """A fibered datum is inconsistent with its group."""


class EvenOrderError(FaircountError):
    """Mass-heuristic constants are refused for groups of even order."""


class PoleError(FaircountError):
    """A leading-constant evaluation would hit a Gamma pole (orbit count < 1)."""
