"""Loop rate budget: 100 Hz integration, 20 FPS sensors, 20 Hz control.

The sensor and control rates must divide the integration rate so the
lockstep loop lands exactly on sensor and control ticks. sim_frame_cap
mirrors the real-time cap of the original setup; the lockstep loop is
not wall-clock coupled, so the cap only feeds the soak benchmark.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class RateConfig:
    sim_tick: int = 100
    sensor_rate: int = 20
    control_rate: int = 20
    tracking_rate: int = 100
    sim_frame_cap: int = 60

    def __post_init__(self):
        for name in ("sensor_rate", "control_rate"):
            rate = getattr(self, name)
            if rate <= 0 or self.sim_tick % rate != 0:
                raise ValueError(f"sim_tick must be divisible by {name} ({rate})")
        if self.tracking_rate <= 0 or self.sim_tick % self.tracking_rate != 0:
            raise ValueError("sim_tick must be divisible by tracking_rate")

    @property
    def dt(self):
        return 1.0 / self.sim_tick

    @property
    def sensor_period(self):
        return self.sim_tick // self.sensor_rate

    @property
    def control_period(self):
        return self.sim_tick // self.control_rate

    @property
    def control_dt(self):
        return 1.0 / self.control_rate
