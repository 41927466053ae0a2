import enum


class ExitCode(enum.IntEnum):
    ABEND = 11
    UNSATISFIABLE = 12
    MAX_SECONDS = 13
    MAX_MEM = 14
    MAX_MODELS = 15
    ALL_MODELS = 16
    SIGINT = 17
    SEGV = 18
    INPUT_ERROR = 19


class InputError(Exception):
    """Malformed or unsupported input.  ``line``/``col`` are 1-based when known."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(str(self))

    def __str__(self):
        if self.line is None:
            return self.message
        return f"line {self.line}, column {self.col}: {self.message}"


class MemoryLimit(Exception):
    pass


class TimeLimit(Exception):
    pass


class Interrupted(Exception):
    pass


class MemoryBudget:
    """Byte counter checked against a kilobyte ceiling.

    Large allocations (ground clause blocks, solver arrays) are charged
    here so the ``-k`` option can stop the run before the process grows.
    """

    def __init__(self, max_kbytes=None):
        self.max_kbytes = max_kbytes
        self.used = 0

    def charge(self, nbytes):
        self.used += int(nbytes)
        if self.max_kbytes is not None and self.used > self.max_kbytes * 1024:
            raise MemoryLimit(
                f"memory limit of {self.max_kbytes}K exceeded ({self.used // 1024}K requested)")

    def release(self, nbytes):
        self.used = max(0, self.used - int(nbytes))
