// Payload shapes of the central server's HTTP API.

export interface SensorInfo {
  sensor_id: string;
  name: string;
  interface_type: number; // 1 direct input, 2 event feedback, 3 custom code
  value_kind: string; // continuous | event_count | binary
  channel: number;
  unit: string;
  active: boolean;
}

export interface NodeInfo {
  node_id: string;
  label: string;
  updated: boolean;
  created_at: string | null;
  record_interval_s: number;
  sensors: SensorInfo[];
}

export interface SensorStats {
  count: number;
  min: number;
  max: number;
  mean: number;
  aggregate: number;
}

export interface BucketRow {
  bucket_start: string;
  sensors: Record<string, SensorStats>;
}

export interface IngestReport {
  inserted: number;
  duplicates: number;
  rejected: { line: number; reason: string }[];
}

export interface CatalogEntry {
  name: string;
  interface_type: number;
  value_kind: string;
  channel: number;
  unit: string;
  description: string;
}

export interface SensorSpecInput {
  name: string;
  interface_type: number;
  value_kind: string;
  channel: number;
  unit: string;
}

export interface DataQuery {
  node: string;
  sensors: string[];
  from: string; // ISO-8601
  to: string;
  intervalS: number;
}
