"""Simulated sensor drivers: seeded, deterministic stand-ins for the real
hardware, shaped plausibly per sensor but with no physical fidelity claim.

Every value is a pure function of (seed, time), never of call order, so a
re-read returns the same number and identical scenarios replay identically
across processes. Continuous channels get a diurnal sinusoid plus bounded
noise; binary light follows a day/night square wave (0 = light detected,
matching the hardware convention) with jittered dawn/dusk; event sensors
draw Poisson arrivals per hour bucket.
"""

from __future__ import annotations

import hashlib
import math
import random
from datetime import datetime, timezone

from ..node.drivers import DriverFault, adc_quantize
from ..records import SensorSpec
from ..catalog import PROFILES, catalog_spec

__all__ = [
    "FlakyDriver",
    "SimContinuousDriver",
    "SimBinaryDriver",
    "SimEventDriver",
    "build_profile_drivers",
    "simulated_driver",
]

DAY_S = 86400
_TWO_PI = 2 * math.pi


def stable_seed(*parts) -> int:
    """A process-independent 64-bit seed from arbitrary labels."""
    text = "\x1f".join(str(p) for p in parts)
    return int.from_bytes(hashlib.blake2s(text.encode()).digest()[:8], "big")


def unit_noise(seed: int, t: int) -> float:
    """Deterministic uniform [0, 1) from (seed, t); cheap integer mixing."""
    h = (t * 2654435761 + seed * 40503 + 0x9E3779B9) & 0xFFFFFFFF
    h ^= h >> 16
    h = (h * 0x45D9F3B) & 0xFFFFFFFF
    h ^= h >> 16
    return h / 4294967296.0


def _second_of_day(t: int) -> int:
    return t % DAY_S


class SimContinuousDriver:
    """Diurnal sinusoid + noise, clamped to the sensor's physical range.
    With ``as_adc`` the value is treated as a voltage fraction and reported
    in converter counts (0..1023)."""

    def __init__(
        self,
        spec: SensorSpec,
        seed: int,
        base: float,
        amplitude: float,
        noise: float,
        lo: float,
        hi: float,
        phase_s: int = 0,
        as_adc: bool = False,
    ):
        self.spec = spec
        self._seed = seed
        self._base = base
        self._amplitude = amplitude
        self._noise = noise
        self._lo = lo
        self._hi = hi
        self._phase = phase_s
        self._as_adc = as_adc

    def value_at(self, t: int) -> float:
        angle = _TWO_PI * ((t % DAY_S - self._phase) / DAY_S)
        # unit_noise inlined: this runs once per sensor per tick
        h = (t * 2654435761 + self._seed * 40503 + 0x9E3779B9) & 0xFFFFFFFF
        h ^= h >> 16
        h = (h * 0x45D9F3B) & 0xFFFFFFFF
        h ^= h >> 16
        value = (
            self._base
            + self._amplitude * math.sin(angle)
            + self._noise * (h / 4294967296.0 - 0.5)
        )
        value = min(max(value, self._lo), self._hi)
        if self._as_adc:
            # value is a 0..1 voltage fraction of the 3.3 V rail
            return adc_quantize(value * 3.3, 3.3)
        return round(value, 3)

    def read(self, now: datetime) -> float:
        return self.value_at(int(now.timestamp()))


class SimBinaryDriver:
    """0/1 level. ``invert`` handles the light sensor's 0-means-light
    convention; dawn/dusk edges jitter a little per simulated day."""

    def __init__(
        self,
        spec: SensorSpec,
        seed: int,
        day_start_s: int = 6 * 3600,
        day_end_s: int = 18 * 3600,
        jitter_s: int = 1200,
        rare_high: float = 0.0,
    ):
        self.spec = spec
        self._seed = seed
        self._day_start = day_start_s
        self._day_end = day_end_s
        self._jitter = jitter_s
        self._rare_high = rare_high

    def read(self, now: datetime) -> int:
        t = int(now.timestamp())
        if self._rare_high:
            # sensors like flame: almost always 0, seeded rare blips
            return 1 if unit_noise(self._seed, t) < self._rare_high else 0
        day_index = t // DAY_S
        dawn = self._day_start + int(
            (unit_noise(self._seed, day_index) - 0.5) * 2 * self._jitter
        )
        dusk = self._day_end + int(
            (unit_noise(self._seed ^ 0xD05C, day_index) - 0.5) * 2 * self._jitter
        )
        daylight = dawn <= _second_of_day(t) < dusk
        return 0 if daylight else 1


class SimEventDriver:
    """Poisson arrivals, generated and cached per hour bucket so any window
    query sees the same stream: counts over adjacent windows always add up
    to the bucket totals."""

    def __init__(self, spec: SensorSpec, seed: int, day_rate_per_h: float, night_rate_per_h: float):
        self.spec = spec
        self._seed = seed
        self._day_rate = day_rate_per_h
        self._night_rate = night_rate_per_h
        self._buckets: dict[int, list[datetime]] = {}

    def _rate(self, hour_start: int) -> float:
        sod = _second_of_day(hour_start)
        return self._day_rate if 6 * 3600 <= sod < 18 * 3600 else self._night_rate

    def _bucket(self, index: int) -> list[datetime]:
        cached = self._buckets.get(index)
        if cached is not None:
            return cached
        rng = random.Random(stable_seed(self._seed, index))
        lam = self._rate(index * 3600)
        # Knuth's method; rates here are small enough for it
        threshold = math.exp(-lam)
        count = 0
        product = rng.random()
        while product > threshold:
            count += 1
            product *= rng.random()
        base = index * 3600
        stamps = sorted(base + rng.random() * 3600 for _ in range(count))
        events = [datetime.fromtimestamp(s, tz=timezone.utc) for s in stamps]
        self._buckets[index] = events
        if len(self._buckets) > 64:
            oldest = min(self._buckets)
            if oldest != index:
                del self._buckets[oldest]
        return events

    def events_between(self, start: datetime, end: datetime) -> list[datetime]:
        lo = int(start.timestamp()) // 3600
        hi = int(math.ceil(end.timestamp() / 3600))
        out = []
        for index in range(lo, hi):
            out.extend(e for e in self._bucket(index) if start <= e < end)
        return out

    def read(self, now: datetime) -> int:
        raise DriverFault("event sensors are read through events_between")


class FlakyDriver:
    """Wraps a driver with deterministic, seeded read faults."""

    def __init__(self, inner, fault_rate: float, seed: int):
        self.inner = inner
        self.spec = inner.spec
        self._rate = fault_rate
        self._seed = seed

    def _faulted(self, t: int) -> bool:
        return unit_noise(self._seed, t) < self._rate

    def read(self, now: datetime):
        if self._faulted(int(now.timestamp())):
            raise DriverFault(f"simulated fault on {self.spec.name}")
        return self.inner.read(now)

    def events_between(self, start: datetime, end: datetime):
        if self._faulted(int(end.timestamp())):
            raise DriverFault(f"simulated fault on {self.spec.name}")
        return self.inner.events_between(start, end)


def simulated_driver(sensor_name: str, seed: int, spec: SensorSpec | None = None):
    """A deterministic driver for one supported sensor, seeded so the same
    (sensor, seed) pair always produces the same reading sequence. ``spec``
    overrides the catalog entry (custom channel, unit, ...)."""
    spec = spec or catalog_spec(sensor_name)
    sub = stable_seed(seed, sensor_name)
    if sensor_name == "temperature":
        return SimContinuousDriver(spec, sub, 23.0, 4.0, 0.8, -10.0, 45.0, phase_s=9 * 3600)
    if sensor_name == "humidity":
        return SimContinuousDriver(spec, sub, 45.0, 12.0, 3.0, 0.0, 100.0, phase_s=21 * 3600)
    if sensor_name == "pressure":
        return SimContinuousDriver(spec, sub, 1013.0, 4.0, 1.0, 950.0, 1050.0, phase_s=3 * 3600)
    if sensor_name == "proximity":
        return SimContinuousDriver(spec, sub, 12.0, 8.0, 10.0, 0.0, 255.0)
    if sensor_name == "light":
        return SimBinaryDriver(spec, sub)
    if sensor_name == "flame":
        return SimBinaryDriver(spec, sub, rare_high=0.0005)
    if sensor_name == "sound":
        return SimEventDriver(spec, sub, day_rate_per_h=90.0, night_rate_per_h=12.0)
    if sensor_name == "vibration":
        return SimEventDriver(spec, sub, day_rate_per_h=8.0, night_rate_per_h=8.0)
    if sensor_name == "motion":
        return SimEventDriver(spec, sub, day_rate_per_h=30.0, night_rate_per_h=3.0)
    if sensor_name in ("smoke", "co", "lpg", "gas_oxidising", "gas_reducing"):
        # slow drift in volts, reported in converter counts
        offsets = {"smoke": 0.25, "co": 0.18, "lpg": 0.20, "gas_oxidising": 0.35, "gas_reducing": 0.30}
        return SimContinuousDriver(
            spec,
            sub,
            base=offsets[sensor_name],
            amplitude=0.08,
            noise=0.04,
            lo=0.0,
            hi=1.0,
            phase_s=(sub % DAY_S),
            as_adc=True,
        )
    raise KeyError(f"no simulated driver for sensor {sensor_name!r}")


def build_profile_drivers(profile: str, seed: int, fault_rate: float = 0.0) -> list:
    """All drivers for a named node profile, individually seeded."""
    drivers = []
    for name in PROFILES[profile]:
        driver = simulated_driver(name, seed)
        if fault_rate > 0:
            driver = FlakyDriver(driver, fault_rate, stable_seed(seed, name, "fault"))
        drivers.append(driver)
    return drivers
