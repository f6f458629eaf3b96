"""Exception hierarchy.

Bad arguments raise plain ``ValueError``; everything below signals a
mathematical or geometric obstruction that callers may want to catch.
"""


class MonocharError(Exception):
    pass


class ResourceError(MonocharError):
    pass


class GeometryError(MonocharError):
    pass


class HomologyObstructionError(MonocharError):
    """A cycle has no integer cap (it is not a boundary)."""


class SingularityError(MonocharError):
    """A form was evaluated on, or integrated across, its singular ray."""


class QuantizationError(MonocharError):
    def __init__(self, g: float, defect: float):
        self.g = g
        self.defect = defect
        super().__init__(f"2g = {2 * g!r} is not an integer (defect {defect:.3g})")


class IntegralityError(MonocharError):
    def __init__(self, period: float, defect: float):
        self.period = period
        self.defect = defect
        super().__init__(f"period {period!r} is not integral (defect {defect:.3g})")


class CocycleError(MonocharError):
    pass
