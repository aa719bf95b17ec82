from .daemon import NodeDaemon, SamplingConfig, sample_cycle
from .drivers import DriverFault, SensorDriver, adc_quantize, beat_accumulate
from .store import LocalStore

__all__ = [
    "DriverFault",
    "LocalStore",
    "NodeDaemon",
    "SamplingConfig",
    "SensorDriver",
    "adc_quantize",
    "beat_accumulate",
    "sample_cycle",
]
