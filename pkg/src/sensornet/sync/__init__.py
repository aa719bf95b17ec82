from .client import SyncClient, SyncOutcome, SyncPolicy, build_batches
from .transport import HttpTransport, Transport, TransportError

__all__ = [
    "HttpTransport",
    "SyncClient",
    "SyncOutcome",
    "SyncPolicy",
    "Transport",
    "TransportError",
    "build_batches",
]
