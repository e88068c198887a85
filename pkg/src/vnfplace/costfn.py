"""Piecewise-linear convex link-cost function used for load balancing.

The cost of a link is a convex, nondecreasing, piecewise-linear penalty on
its utilization ``u = load / capacity``.  Each segment ``i`` contributes
``a_i * u - b_i``; the cost is the upper envelope of all segments, clamped
at zero.  Because the envelope is a maximum of affine functions it drops
into an LP as one ``K >= a_i * U - b_i`` row per segment.

The default segment set is the classic traffic-engineering penalty whose
slopes grow roughly exponentially: cheap up to 1/3 utilization, then
progressively punishing, with a cliff just above full utilization.
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_SLOPES = (1.0, 3.0, 10.0, 70.0, 500.0, 5000.0)
DEFAULT_BREAKPOINTS = (1.0 / 3.0, 2.0 / 3.0, 9.0 / 10.0, 1.0, 11.0 / 10.0)


class CostFunctionError(ValueError):
    pass


@dataclass(frozen=True)
class CostSegment:
    """One affine piece ``cost = slope * u - offset``."""

    slope: float
    offset: float

    def value(self, u: float) -> float:
        return self.slope * u - self.offset


@dataclass(frozen=True)
class CostFunction:
    """Convex piecewise-linear penalty given as an upper envelope of segments."""

    segments: tuple[CostSegment, ...]

    def __post_init__(self):
        if not self.segments:
            raise CostFunctionError("cost function needs at least one segment")
        slopes = [s.slope for s in self.segments]
        if any(a < 0 for a in slopes):
            raise CostFunctionError("segment slopes must be non-negative")
        if any(b <= a + 1e-12 for a, b in zip(slopes, slopes[1:])):
            raise CostFunctionError("segment slopes must be strictly increasing")
        # Breakpoints (segment hand-over points) must be strictly increasing,
        # otherwise a segment never attains the envelope.
        bps = self.breakpoints()
        if any(v >= w - 1e-12 for v, w in zip(bps, bps[1:])):
            raise CostFunctionError("segment breakpoints must be strictly increasing")

    @classmethod
    def from_slopes_breakpoints(
        cls, slopes: tuple[float, ...], breakpoints: tuple[float, ...]
    ) -> "CostFunction":
        """Build a continuous envelope from slopes and hand-over utilizations.

        ``breakpoints[i]`` is where segment ``i`` hands over to segment
        ``i+1``; offsets are derived so adjacent segments meet there.  The
        first segment passes through the origin.
        """
        if len(breakpoints) != len(slopes) - 1:
            raise CostFunctionError(
                "need exactly one breakpoint between consecutive slopes "
                f"({len(slopes)} slopes, {len(breakpoints)} breakpoints)"
            )
        offsets = [0.0]
        for i, u in enumerate(breakpoints):
            if u <= 0:
                raise CostFunctionError("breakpoints must be positive")
            offsets.append(offsets[i] + (slopes[i + 1] - slopes[i]) * u)
        return cls(tuple(CostSegment(a, b) for a, b in zip(slopes, offsets)))

    def breakpoints(self) -> tuple[float, ...]:
        """Utilizations where consecutive segments intersect."""
        out = []
        for s, t in zip(self.segments, self.segments[1:]):
            out.append((t.offset - s.offset) / (t.slope - s.slope))
        return tuple(out)

    def envelope(self, u: float) -> float:
        """Penalty at utilization ``u`` (clamped at zero)."""
        if u != u or u in (float("inf"), float("-inf")):
            raise CostFunctionError(f"utilization must be finite, got {u}")
        return max(0.0, max(s.value(u) for s in self.segments))

    def to_jsonable(self) -> dict:
        return {
            "slopes": [s.slope for s in self.segments],
            "offsets": [s.offset for s in self.segments],
        }


def default_cost_function() -> CostFunction:
    return CostFunction.from_slopes_breakpoints(DEFAULT_SLOPES, DEFAULT_BREAKPOINTS)
