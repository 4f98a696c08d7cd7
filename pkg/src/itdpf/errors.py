"""Exception types shared across the package.

The CLI maps these onto its exit codes: ParameterError -> 2,
LiftInconsistentError -> 3, ArtifactMismatchError -> 4.
"""


class ParameterError(ValueError):
    """Invalid or incompatible user-supplied parameters / inputs."""


class LiftInconsistentError(RuntimeError):
    """The multiplicity-2 lift system was inconsistent.

    The lift of a certified multiplicity-1 interpolation set is guaranteed
    to be solvable, so this always signals a parameter or implementation
    bug and must abort loudly rather than be worked around.
    """


class ArtifactMismatchError(RuntimeError):
    """Persisted artifacts disagree (e.g. key digest vs. params file)."""


class FamilyViolationError(RuntimeError):
    """A dot product landed outside the allowed canonical set."""


class KeyParseError(ValueError):
    """Malformed serialized key; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset
