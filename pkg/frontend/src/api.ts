// Typed client for the central server. Every number the UI shows comes
// out of one of these calls; the UI itself never aggregates.

import type {
  BucketRow,
  CatalogEntry,
  DataQuery,
  IngestReport,
  NodeInfo,
  SensorSpecInput,
} from "./types.js";

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  private onReachable: ((up: boolean) => void) | null = null;

  constructor(
    readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  /** The offline banner subscribes here; flips on every request outcome. */
  watchReachability(handler: (up: boolean) => void): void {
    this.onReachable = handler;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (error) {
      this.onReachable?.(false);
      throw new ApiError(`server unreachable: ${String(error)}`, 0);
    }
    this.onReachable?.(true);
    if (!response.ok) {
      const body = await response.text();
      throw new ApiError(body || `HTTP ${response.status}`, response.status);
    }
    return response;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    return (await this.request(path, init)).json() as Promise<T>;
  }

  listNodes(): Promise<NodeInfo[]> {
    return this.json<NodeInfo[]>("/api/nodes");
  }

  createNode(label: string, recordIntervalS?: number): Promise<{ node_id: string }> {
    return this.json("/api/nodes", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(
        recordIntervalS
          ? { label, record_interval_s: recordIntervalS }
          : { label },
      ),
    });
  }

  addSensor(nodeId: string, spec: SensorSpecInput): Promise<NodeInfo> {
    return this.json(`/api/nodes/${nodeId}/sensors`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(spec),
    });
  }

  removeSensor(nodeId: string, name: string): Promise<NodeInfo> {
    return this.json(`/api/nodes/${nodeId}/sensors/${name}`, { method: "DELETE" });
  }

  fetchConfig(nodeId: string): Promise<NodeInfo> {
    return this.json(`/api/nodes/${nodeId}/config`);
  }

  supportedSensors(): Promise<CatalogEntry[]> {
    return this.json("/api/sensors/supported");
  }

  checkpoint(nodeId: string): Promise<string> {
    return this.request("/api/checkpoint", { method: "POST", body: nodeId }).then(
      (response) => response.text(),
    );
  }

  ingest(csv: string): Promise<IngestReport> {
    return this.json("/api/ingest", {
      method: "POST",
      headers: { "content-type": "text/csv" },
      body: csv,
    });
  }

  queryData(query: DataQuery): Promise<BucketRow[]> {
    return this.json(`/api/data?${dataParams(query)}`);
  }

  dataExportUrl(node: string, sensors: string[], from: string, to: string): string {
    const params = new URLSearchParams({ node, from, to });
    if (sensors.length) params.set("sensors", sensors.join(","));
    return `${this.baseUrl}/api/export/data?${params}`;
  }

  errorsExportUrl(node: string, from: string, to: string): string {
    return `${this.baseUrl}/api/export/errors?${new URLSearchParams({ node, from, to })}`;
  }

  /** The export bytes, verbatim; downloads stream exactly this. */
  async exportData(node: string, sensors: string[], from: string, to: string): Promise<Uint8Array> {
    const response = await this.request(
      this.dataExportUrl(node, sensors, from, to).slice(this.baseUrl.length),
    );
    return new Uint8Array(await response.arrayBuffer());
  }

  async exportErrors(node: string, from: string, to: string): Promise<Uint8Array> {
    const response = await this.request(
      this.errorsExportUrl(node, from, to).slice(this.baseUrl.length),
    );
    return new Uint8Array(await response.arrayBuffer());
  }
}

function dataParams(query: DataQuery): URLSearchParams {
  return new URLSearchParams({
    node: query.node,
    sensors: query.sensors.join(","),
    from: query.from,
    to: query.to,
    interval: String(query.intervalS),
  });
}
