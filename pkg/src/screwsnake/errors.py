"""Exception hierarchy for the screwsnake package."""


class ScrewSnakeError(Exception):
    """Base class for all package errors."""


class InvalidGeometryError(ScrewSnakeError):
    """Chain geometry parameters violate their invariants."""


class SegmentIndexError(ScrewSnakeError, IndexError):
    """Segment or joint index outside 1..n."""


class JointLimitError(ScrewSnakeError, ValueError):
    """A joint angle exceeds the configured limit."""


class FrameMismatchError(ScrewSnakeError, ValueError):
    """A BodyTwist was passed in the wrong reference frame."""


class InfeasibleRadiusError(ScrewSnakeError, ValueError):
    """Commanded turning radius is below the joint-limit minimum.

    Carries the minimum feasible radius in ``r_min``.
    """

    def __init__(self, radius, r_min):
        super().__init__(
            f"turn radius {radius:.4f} m below minimum {r_min:.4f} m"
        )
        self.radius = radius
        self.r_min = r_min


class UnsupportedConfigurationError(ScrewSnakeError, ValueError):
    """Operation defined only for the 4-segment layout."""


class UndefinedSlippageError(ScrewSnakeError, ZeroDivisionError):
    """Slippage ratio requested at zero screw speed."""


class TractionSingularityError(ScrewSnakeError, ZeroDivisionError):
    """Inverse kinematics at full slip (s >= 1): no radial traction."""


class SegmentOnCenterError(ScrewSnakeError, ZeroDivisionError):
    """Speed-ratio denominator segment sits on the rotation center.

    Its commanded speed is zero; express the ratio with that segment as
    the numerator instead.
    """

    def __init__(self, j, y_j):
        super().__init__(
            f"segment {j} lies on the rotation center (y={y_j:.4f} m)"
        )
        self.segment = j
        self.y = y_j


class SaturationError(ScrewSnakeError, ValueError):
    """Command exceeds actuator bounds and cannot be auto-scaled."""


class CalibrationError(ScrewSnakeError, ValueError):
    """Terrain calibration failed (underdetermined or out of range).

    ``missing`` lists the observations that would make the fit determined.
    """

    def __init__(self, message, missing=()):
        super().__init__(message)
        self.missing = tuple(missing)


class ScenarioConfigError(ScrewSnakeError, ValueError):
    """Scenario configuration failed validation.

    ``field`` is the dotted path of the offending entry.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class SimulationFaultError(ScrewSnakeError, RuntimeError):
    """Non-finite velocity produced during stepping.

    Carries the 1-based index of the offending segment.
    """

    def __init__(self, segment, message="non-finite realized velocity"):
        super().__init__(f"segment {segment}: {message}")
        self.segment = segment


class InsufficientArcError(ScrewSnakeError, ValueError):
    """Trajectory sweeps less heading change than a circle fit needs.

    Carries the swept angle in radians.
    """

    def __init__(self, swept, required):
        super().__init__(
            f"trajectory sweeps {swept:.3f} rad, need >= {required:.3f} rad"
        )
        self.swept = swept
        self.required = required


class FrameRejectedError(ScrewSnakeError, ValueError):
    """Teleop frame rejected (non-finite values or malformed payload)."""


class SessionOccupiedError(ScrewSnakeError, RuntimeError):
    """A pilot session is already active on this simulation."""
