"""Exception taxonomy shared across the package."""


class GreenflowError(Exception):
    """Base class for all package errors."""


class ConfigError(GreenflowError):
    """Run configuration is malformed; the message names the offending key."""


class WeightSumError(GreenflowError):
    """Parabolic end weights do not sum to one (required when there is no
    hyperbolic end)."""


class FamilyMismatch(GreenflowError):
    """Surface data inconsistent with the declared family."""


class OutOfDomain(GreenflowError):
    """Point lies outside the surface domain."""


class PoleCollision(GreenflowError):
    """Pole placed on top of a puncture."""


class SingularPoint(GreenflowError):
    """Evaluation requested exactly at a pole or non-removable end."""


class WindowTouchesSingularity(GreenflowError):
    """Finite-difference window overlaps the exclusion disk of a singular
    point."""


class WindingAmbiguous(GreenflowError):
    """Cell boundary passes too close to a zero even after perturb/retry."""


class NewtonDiverged(GreenflowError):
    """Newton refinement failed to converge from a cell seed."""


class DegenerateCircle(GreenflowError):
    """Winding number is zero on every probe radius: not a zero of the field."""


class StepCollapse(GreenflowError):
    """Adaptive step fell below the floor away from any terminal state."""


class IncompleteGraph(GreenflowError):
    """Skeleton graph has unresolved edges; Betti numbers are undefined."""


class DegenerateTriangle(GreenflowError):
    """Mesh contains a triangle below the minimum-angle threshold."""


class SolverStall(GreenflowError):
    """Conjugate gradients failed to reach the requested residual."""


class NotNested(GreenflowError):
    """Exhaustion domains are not an increasing chain."""
