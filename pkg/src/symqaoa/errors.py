"""Exception hierarchy. Each family maps onto one CLI exit code."""


class SymqaoaError(Exception):
    exit_code = 1


class InputError(SymqaoaError, ValueError):
    """Malformed user input: graph files, angle lists, mismatched sizes."""

    exit_code = 2


class ResourceGuardError(SymqaoaError):
    exit_code = 3


class ConeTooWideError(ResourceGuardError):
    def __init__(self, support, width, max_width):
        self.support = tuple(support)
        self.width = width
        self.max_width = max_width
        super().__init__(
            f"reverse causal cone of term {list(self.support)} spans {width} qubits "
            f"(limit {max_width})"
        )


class SolverTimeoutError(SymqaoaError):
    """Automorphism search ran out of time; ``partial`` holds the generators found so far."""

    exit_code = 4

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ConsistencyError(SymqaoaError):
    exit_code = 5


class OrbitError(ConsistencyError):
    """Orbit partition does not match the Hamiltonian it is applied to."""


class DegenerateCorrelationError(ConsistencyError):
    pass
