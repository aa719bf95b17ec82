"""Brute-force consistency check between the nodes' local stores and the
central store: after a final connected sync, every locally generated record
must sit in the central partition exactly once with identical readings,
and the server must hold nothing the nodes never produced."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from ..records import Record

__all__ = ["OracleVerdict", "consistency_oracle"]


@dataclass
class OracleVerdict:
    consistent: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.consistent


def consistency_oracle(
    local: Mapping[str, Iterable[Record]],
    central: Mapping[str, Iterable[Record]],
) -> OracleVerdict:
    """Enumerate every divergence; an empty list means consistent.

    ``local`` maps node id to that node's full record collection; ``central``
    is the server's per-partition view (e.g. CentralStore.partition_snapshot()).
    """
    violations: list[str] = []

    central_by_node: dict[str, dict] = {}
    for node_id, records in central.items():
        seen: dict = {}
        for record in records:
            if record.id.node_id != node_id:
                violations.append(
                    f"record {record.id.canonical} filed under partition {node_id!r}"
                )
            if record.id in seen:
                violations.append(
                    f"duplicate record id {record.id.canonical} in central partition"
                )
            else:
                seen[record.id] = record
        central_by_node[node_id] = seen

    for node_id, records in local.items():
        held = central_by_node.get(node_id, {})
        local_ids = set()
        for record in records:
            local_ids.add(record.id)
            counterpart = held.get(record.id)
            if counterpart is None:
                violations.append(f"record {record.id.canonical} lost: not in central store")
            elif counterpart.readings != record.readings:
                violations.append(
                    f"record {record.id.canonical} differs between node and server"
                )
        for rid in held:
            if rid not in local_ids:
                violations.append(
                    f"record {rid.canonical} fabricated: in central store, "
                    "never generated by the node"
                )

    for node_id in central_by_node:
        if node_id not in local and central_by_node[node_id]:
            violations.append(f"central partition {node_id!r} has no local counterpart")

    return OracleVerdict(consistent=not violations, violations=violations)
