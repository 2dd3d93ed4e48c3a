"""Exception hierarchy shared by the sincov modules."""


class SincovError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(SincovError, ValueError):
    def __init__(self, left, right, what="dimension"):
        self.left = left
        self.right = right
        super().__init__(f"{what} mismatch: {left} != {right}")


class AlgebraInvariantError(SincovError, ValueError):
    """A structure-constants tensor is not commutative, associative or unital."""


class CharacterComputationError(SincovError, RuntimeError):
    pass


class UnsupportedFamilyError(SincovError, TypeError):
    pass


class NotSemisimpleError(SincovError, ValueError):
    def __init__(self, radical_dim):
        self.radical_dim = radical_dim
        super().__init__(f"algebra is not semisimple (radical dimension {radical_dim})")


class GroundSetMismatchError(SincovError, ValueError):
    pass


class DomainError(SincovError, ValueError):
    """An input lies outside the domain an operation is defined on."""


class GroupAxiomError(SincovError, ValueError):
    def __init__(self, axiom, detail=""):
        self.axiom = axiom
        msg = f"table fails the {axiom} axiom"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class PremiseError(SincovError, ValueError):
    """The hypothesis a bound depends on does not hold for the given data."""


class InputFormatError(SincovError, ValueError):
    def __init__(self, message, path=None, line=None, field=None):
        self.path = path
        self.line = line
        self.field = field
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
