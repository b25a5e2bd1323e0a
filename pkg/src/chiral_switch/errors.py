"""Exception hierarchy. CLI exit codes key off the two top-level branches."""


class ChiralSwitchError(Exception):
    pass


class InvalidConfigError(ChiralSwitchError, ValueError):
    """Bad user input: negative rates, malformed config files, violated preconditions."""


class SolverError(ChiralSwitchError, RuntimeError):
    pass


class DegenerateSteadyStateError(SolverError):
    pass


class StiffnessError(SolverError):
    pass


class SwitchNotFoundError(SolverError):
    def __init__(self, message, best_residual=float("nan"), best_omega21=complex("nan")):
        super().__init__(message)
        self.best_residual = best_residual
        self.best_omega21 = best_omega21


class UndefinedEstimateError(SolverError):
    pass


class DegeneratePerturbationError(SolverError):
    pass


class NoCrossingError(SolverError):
    pass
