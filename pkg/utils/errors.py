"""
Error types for the simulator, each carrying its CLI exit code
"""


class UnruhSimError(Exception):
    """Base class for expected simulator failures"""

    exit_code = 1


class ConfigError(UnruhSimError):
    """Malformed, incomplete or inconsistent run configuration"""

    exit_code = 2

    def __init__(self, message: str, field: str = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class PhysicsError(UnruhSimError):
    """Parameters outside the physical model: instability, non-physical state"""

    exit_code = 3


class NumericalError(UnruhSimError):
    """A numerical method failed to deliver the requested accuracy"""

    exit_code = 4

    def __init__(self, message: str, time: float = None):
        self.time = time
        super().__init__(f"{message} (t={time:.6g})" if time is not None else message)
