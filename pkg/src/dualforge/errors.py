"""Exception hierarchy shared by every module."""


class DualforgeError(Exception):
    """Base class; the CLI maps these to exit code 2."""


class StructureError(DualforgeError):
    pass


class SignatureMismatch(DualforgeError):
    pass


class CarrierMismatch(DualforgeError):
    pass


class SizeCapExceeded(DualforgeError):
    def __init__(self, needed, cap, what="structure"):
        super().__init__(f"{what} of size {needed} exceeds cap {cap}")
        self.needed = needed
        self.cap = cap


class BudgetExceeded(DualforgeError):
    def __init__(self, budget, partial_count):
        super().__init__(
            f"search budget of {budget} nodes exhausted after {partial_count} solutions")
        self.budget = budget
        self.partial_count = partial_count


class EmptyGeneration(DualforgeError):
    pass


class NotInPrevariety(DualforgeError):
    pass


class InternalInvariantViolation(DualforgeError):
    """A computation produced something theory rules out; indicates a bug."""


class NotALattice(DualforgeError):
    pass


class NotCompatible(DualforgeError):
    pass


class NotAPoset(DualforgeError):
    pass


class NotASemilattice(DualforgeError):
    pass


class NotOdd(DualforgeError):
    pass


class GNotOrderReversing(DualforgeError):
    pass


class UnknownClassTag(DualforgeError):
    pass
