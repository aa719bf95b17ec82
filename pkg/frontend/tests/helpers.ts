// Test scaffolding: spawn the real central server, build wire-format CSV
// batches, and poll the DOM for async renders.

import { spawn, type ChildProcess } from "node:child_process";

export interface LiveServer {
  url: string;
  stop(): void;
}

export async function startServer(): Promise<LiveServer> {
  const port = 8400 + Math.floor(Math.random() * 1000);
  const url = `http://127.0.0.1:${port}`;
  const child: ChildProcess = spawn(
    "python3",
    ["-m", "sensornet.cli", "serve", "--host", "127.0.0.1", "--port", String(port)],
    { stdio: "ignore" },
  );
  for (let attempt = 0; attempt < 200; attempt++) {
    if (child.exitCode !== null) break;
    try {
      const response = await fetch(`${url}/api/nodes`);
      if (response.ok) {
        return { url, stop: () => child.kill("SIGTERM") };
      }
    } catch {
      // not up yet
    }
    await sleep(100);
  }
  child.kill("SIGTERM");
  throw new Error(`central server did not come up on ${url}`);
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export async function waitFor(
  check: () => boolean,
  what: string,
  timeoutMs = 10_000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await sleep(25);
  }
  throw new Error(`timed out waiting for ${what}`);
}

/** ISO instant -> the wire format's basic form, 20210801T000000Z. */
export function basicStamp(iso: string): string {
  return iso.replace(/\.\d{3}Z$/, "Z").replace(/[-:]/g, "");
}

export interface BatchRow {
  iso: string;
  values: (number | null)[];
}

/** A batch file in the exact wire format the server ingests. */
export function batchCsv(nodeId: string, columns: string[], rows: BatchRow[]): string {
  const lines = [`id,node_id,timestamp,${columns.join(",")}`];
  for (const row of rows) {
    const stamp = basicStamp(row.iso);
    const cells = row.values.map((v) => (v === null ? "" : String(v)));
    lines.push(`${nodeId}|${stamp},${nodeId},${stamp},${cells.join(",")}`);
  }
  return lines.join("\n") + "\n";
}

/** Minute-spaced records from a start instant; value generators per column. */
export function minuteRows(
  startIso: string,
  count: number,
  generators: ((i: number) => number | null)[],
): BatchRow[] {
  const startMs = Date.parse(startIso);
  const rows: BatchRow[] = [];
  for (let i = 0; i < count; i++) {
    rows.push({
      iso: new Date(startMs + i * 60_000).toISOString().replace(/\.\d{3}Z$/, "Z"),
      values: generators.map((g) => g(i)),
    });
  }
  return rows;
}
