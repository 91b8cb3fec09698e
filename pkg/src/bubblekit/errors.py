"""Exception taxonomy shared across the package."""

from __future__ import annotations


class BubblekitError(Exception):
    """Base class for all package-specific errors."""


class ParseError(BubblekitError):
    """Syntax error in a germ or polynomial expression.

    Carries the character position of the offending token.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class AmbiguousTruncation(BubblekitError):
    """Two series agree on their whole common truncation window.

    The tree topology cannot be decided at the current precision; the
    caller must supply more series terms.  ``j is None`` means the
    conflict is between input germ ``i`` and the section.
    """

    def __init__(self, i: int, j: int | None):
        other = "the section" if j is None else f"germ {j}"
        super().__init__(
            f"germ {i} and {other} are indistinguishable within truncation; "
            "supply more terms"
        )
        self.i = i
        self.j = j


class CollapseViolation(BubblekitError):
    """A cluster of cone angles has total deficit >= 1."""

    def __init__(self, cluster, total):
        super().__init__(
            f"angle deficit sum {total} >= 1 on cluster {sorted(cluster)}"
        )
        self.cluster = tuple(sorted(cluster))
        self.total = total


class ClusterMismatch(BubblekitError):
    """The section does not start at a collision point of the family."""


class WeightOne(BubblekitError):
    """A node weight equals 1 exactly (non-collapsing assumption broken)."""

    def __init__(self, edge):
        super().__init__(f"node weight equals 1 on edge {edge}")
        self.edge = edge


class PrincipalNotFound(BubblekitError):
    """No component has all weights < 1 (violated precondition)."""


class PrincipalNotUnique(BubblekitError):
    """More than one component has all weights < 1 (violated precondition)."""


class SingularPoint(BubblekitError):
    """Evaluation requested at a monopole point."""


class StepUnderflow(BubblekitError):
    """Finite-difference step forced below floating-point resolution."""


class NonPlanar(BubblekitError):
    """Monopole points do not all lie on the x3 = 0 plane."""


class MaxDepthExceeded(BubblekitError):
    """Adaptive quadrature failed to converge within the depth budget."""


class RadiiTooLarge(BubblekitError):
    """Probe radii reach other cone points."""


class EmptyBreakpoints(BubblekitError):
    """A cascade stage has no positive breakpoint (flat/terminal regime)."""

    def __init__(self, stage: int):
        super().__init__(f"no positive breakpoint at cascade stage {stage}")
        self.stage = stage


class SpecFileError(BubblekitError):
    """Invalid CLI spec file; carries file path and JSON pointer."""

    def __init__(self, path: str, pointer: str, message: str):
        super().__init__(f"{path}: {pointer}: {message}")
        self.path = path
        self.pointer = pointer
