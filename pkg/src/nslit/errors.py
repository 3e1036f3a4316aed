"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical or physical domain of an operation."""


class NodeError(ArithmeticError):
    """The wavefunction modulus vanished; the pilot-wave velocity is undefined there."""


class ConfigError(ValueError):
    """Invalid run configuration.  Collects every problem found in one pass."""

    def __init__(self, problems):
        self.problems = list(problems)
        lines = "\n".join(f"  - {p}" for p in self.problems)
        super().__init__(f"invalid configuration:\n{lines}")
