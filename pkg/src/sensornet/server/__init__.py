from .store import CentralStore, RegistryError, UnknownNodeError
from .resample import BucketStats, ResampleQuery, SensorBucket, query_resampled

__all__ = [
    "BucketStats",
    "CentralStore",
    "RegistryError",
    "ResampleQuery",
    "SensorBucket",
    "UnknownNodeError",
    "query_resampled",
]
