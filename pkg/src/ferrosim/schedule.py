"""Voltage schedules and the steady-state detection rule."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SteadyStateRule:
    """Settle when max|dP|/max(|P|, floor) stays below tol for a run of steps."""

    rel_change_tol: float = 1e-6
    consecutive_steps: int = 50
    max_steps: int = 200_000
    floor: float = 1e-6

    def __post_init__(self):
        if self.rel_change_tol <= 0 or self.consecutive_steps <= 0 or self.max_steps <= 0:
            raise ValueError("steady-state rule parameters must be positive")


@dataclass(frozen=True)
class SweepSchedule:
    waveform: str = "hold"  # "hold" | "triangular" | "list"
    vmax: float = 0.0
    n_points_per_quarter: int = 20
    hold_v: float = 0.0
    values: tuple[float, ...] = ()
    cycles: int = 1
    settle: SteadyStateRule = field(default_factory=SteadyStateRule)

    def __post_init__(self):
        if self.waveform not in ("hold", "triangular", "list"):
            raise ValueError(f"unknown waveform {self.waveform!r}")
        if self.waveform == "triangular":
            if self.vmax <= 0:
                raise ValueError("triangular waveform requires vmax > 0")
            if self.n_points_per_quarter < 2:
                raise ValueError("triangular waveform requires n_points_per_quarter >= 2")
        if self.waveform == "list" and not self.values:
            raise ValueError("list waveform requires at least one value")
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")

    def voltage_points(self) -> list[float]:
        """Applied-voltage sequence, bottom contact grounded (V0=0, V1=V_app)."""
        if self.waveform == "hold":
            return [self.hold_v] * self.cycles
        if self.waveform == "list":
            return list(self.values) * self.cycles
        # triangular: 0 -> +vmax -> -vmax -> 0 per cycle; endpoints not duplicated
        n = self.n_points_per_quarter
        step = self.vmax / n
        up = [i * step for i in range(1, n + 1)]                    # (0, vmax]
        down = [self.vmax - i * step for i in range(1, 2 * n + 1)]  # (vmax, -vmax]
        rise = [-self.vmax + i * step for i in range(1, 2 * n + 1)]  # (-vmax, vmax]
        home = [-self.vmax + i * step for i in range(1, n + 1)]     # (-vmax, 0]
        pts = [0.0] + up + down
        for _ in range(self.cycles - 1):
            pts += rise + down
        pts += home
        return pts
