"""Exception hierarchy shared by all modules."""


class KGVacuaError(Exception):
    pass


class DomainError(KGVacuaError, ValueError):
    """Evaluation outside a family's working interval or a function's range."""


class PoleError(KGVacuaError, ValueError):
    def __init__(self, n):
        super().__init__(f"Gamma pole at nonpositive integer {n}")
        self.n = n


class SeriesBudgetError(KGVacuaError, ArithmeticError):
    pass


class SingularityError(KGVacuaError, ValueError):
    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class DegenerateParameterError(KGVacuaError, ValueError):
    pass


class UnsupportedFamilyError(KGVacuaError, ValueError):
    pass


class InvalidStructureError(KGVacuaError, ValueError):
    pass


class ScreeningError(KGVacuaError, ValueError):
    """Positivity or reality screening of a vacuum failed."""


class ConfigError(KGVacuaError, ValueError):
    def __init__(self, msg, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(msg + loc)
        self.line = line
        self.column = column
