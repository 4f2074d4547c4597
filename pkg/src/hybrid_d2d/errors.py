"""Exceptions raised by the numerical evaluators."""


class AnalyticError(RuntimeError):
    """Base class for evaluator failures (quadrature, inversion, determinants)."""


class QuadratureError(AnalyticError):
    def __init__(self, message: str, achieved_error: float):
        self.achieved_error = achieved_error
        super().__init__(f"{message} (achieved error {achieved_error:.3e})")


class NearSingularDeterminant(AnalyticError):
    pass


class InversionDivergence(AnalyticError):
    pass


class QuantileSearchError(AnalyticError):
    pass
