"""Distributed indoor-environment sensing stack.

Sensing-node daemons sample pluggable drivers on a fixed interval, buffer
records in a durable local store, and sync to a central server via an
hourly checkpoint-and-batch protocol. The server keeps per-node partitions,
answers resampled min/max/mean queries, and exposes everything over HTTP.
A deterministic simulation harness reproduces multi-node deployments with
fault injection on a virtual clock.
"""

from .records import (
    BatchFile,
    ErrorCategory,
    ErrorLogEntry,
    IngestReport,
    NodeDescriptor,
    Record,
    RecordId,
    SensorInterface,
    SensorSpec,
    ValueKind,
    make_record_id,
    parse_record_id,
)
from .csvcodec import CodecError, decode_batch, encode_batch
from .validation import validate_record

__version__ = "0.1.0"

__all__ = [
    "BatchFile",
    "CodecError",
    "ErrorCategory",
    "ErrorLogEntry",
    "IngestReport",
    "NodeDescriptor",
    "Record",
    "RecordId",
    "SensorInterface",
    "SensorSpec",
    "ValueKind",
    "decode_batch",
    "encode_batch",
    "make_record_id",
    "parse_record_id",
    "validate_record",
    "__version__",
]
