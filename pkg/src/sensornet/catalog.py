"""Supported-sensor catalog: the list the GUI offers for code-free sensor
management, and the named per-node sensor mixes used when simulating.

Channels follow the wiring conventions of the reference node builds:
analogue readings share the converter channels (0..7), digital sensors
sit on ordinary GPIO pins.
"""

from __future__ import annotations

from .records import SensorInterface, SensorSpec, ValueKind

__all__ = ["SENSOR_CATALOG", "PROFILES", "catalog_spec", "profile_specs"]

_T1 = SensorInterface.DIRECT_INPUT
_T2 = SensorInterface.EVENT_FEEDBACK
_T3 = SensorInterface.CUSTOM

# name -> (interface, kind, default channel, unit, description)
SENSOR_CATALOG: dict[str, tuple[SensorInterface, ValueKind, int, str, str]] = {
    "temperature": (_T3, ValueKind.CONTINUOUS, 4, "degC", "air temperature"),
    "humidity": (_T3, ValueKind.CONTINUOUS, 4, "%", "relative humidity"),
    "pressure": (_T3, ValueKind.CONTINUOUS, 5, "hPa", "barometric pressure"),
    "proximity": (_T3, ValueKind.CONTINUOUS, 6, "raw", "nearby-object level"),
    "light": (_T1, ValueKind.BINARY, 17, "0/1", "0 = light detected, 1 = dark"),
    "flame": (_T1, ValueKind.BINARY, 22, "0/1", "1 = flame present"),
    "sound": (_T2, ValueKind.EVENT_COUNT, 27, "beats/interval", "sound beats per interval"),
    "vibration": (_T2, ValueKind.EVENT_COUNT, 23, "beats/interval", "vibration beats per interval"),
    "motion": (_T2, ValueKind.EVENT_COUNT, 24, "beats/interval", "motion edges per interval"),
    "smoke": (_T3, ValueKind.CONTINUOUS, 0, "raw", "smoke level, converter counts"),
    "co": (_T3, ValueKind.CONTINUOUS, 0, "raw", "carbon monoxide, converter counts"),
    "lpg": (_T3, ValueKind.CONTINUOUS, 0, "raw", "LPG level, converter counts"),
    "gas_oxidising": (_T3, ValueKind.CONTINUOUS, 2, "raw", "oxidising gases, converter counts"),
    "gas_reducing": (_T3, ValueKind.CONTINUOUS, 3, "raw", "reducing gases, converter counts"),
}

# Named node builds: which readings a node of that flavour produces.
PROFILES: dict[str, tuple[str, ...]] = {
    # compact sensor-board build: six readings
    "enviro": (
        "proximity",
        "humidity",
        "pressure",
        "light",
        "gas_oxidising",
        "gas_reducing",
    ),
    # breadboard build: seven physical sensors, ten readings
    "prototype-v1": (
        "temperature",
        "humidity",
        "light",
        "sound",
        "flame",
        "vibration",
        "motion",
        "smoke",
        "co",
        "lpg",
    ),
}


def catalog_spec(name: str) -> SensorSpec:
    if name not in SENSOR_CATALOG:
        raise KeyError(f"unknown sensor {name!r}; not in the supported list")
    interface, kind, channel, unit, _ = SENSOR_CATALOG[name]
    return SensorSpec(
        name=name, interface_type=interface, value_kind=kind, channel=channel, unit=unit
    )


def profile_specs(profile: str) -> list[SensorSpec]:
    if profile not in PROFILES:
        raise KeyError(
            f"unknown profile {profile!r}; known: {sorted(PROFILES)}"
        )
    return [catalog_spec(name) for name in PROFILES[profile]]
