"""Exception hierarchy.  ``exit_code`` is what the CLI returns for each class."""


class AnalysisError(Exception):
    exit_code = 1
    partial = None  # whatever was computed before the failure, for reporting


class ValidationError(AnalysisError):
    exit_code = 2


class ExprSyntaxError(ValidationError):
    def __init__(self, message, position, text=""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownSymbol(ValidationError):
    def __init__(self, name, position=None):
        self.name = name
        self.position = position
        where = "" if position is None else f" at position {position}"
        super().__init__(f"unknown symbol {name!r}{where}")


class DivisionByZero(AnalysisError):
    pass


class DivisionByExcluded(DivisionByZero):
    """A denominator vanished identically after substitution."""


class DegreeOverflow(AnalysisError):
    pass


class UnsupportedSystem(AnalysisError):
    exit_code = 3


class NotAlmostRegular(UnsupportedSystem):
    pass


class RankNotConstant(UnsupportedSystem):
    pass


class NonSolvableConstraint(UnsupportedSystem):
    pass


class NonlinearMultiplier(UnsupportedSystem):
    pass


class MaxStepsExceeded(UnsupportedSystem):
    pass


class EmptyFinalManifold(AnalysisError):
    exit_code = 4


class NotRegular(AnalysisError):
    pass


class NotProjectable(AnalysisError):
    pass


class CorrespondenceMismatch(AnalysisError):
    def __init__(self, level, detail):
        self.level = level
        super().__init__(f"level {level}: {detail}")
