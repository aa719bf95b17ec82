// End-to-end against a live central server: all five operator functions.
// The server is the real Python process; only Chart.js is replaced by a
// recording factory (jsdom has no canvas).

import { afterAll, beforeAll, describe, expect, test } from "vitest";

import { ApiClient } from "../src/api.js";
import { bucketsToSeries, intervalChoices, type ChartFactory, type SeriesPoint } from "../src/charts.js";
import { startApp } from "../src/main.js";
import {
  basicStamp,
  batchCsv,
  minuteRows,
  sleep,
  startServer,
  waitFor,
  type LiveServer,
} from "./helpers.js";

let server: LiveServer;
let api: ApiClient;
let nodeId: string;

// scenario data: three hours of minute records starting at a fixed local
// wall time (converted the same way the app converts its inputs)
const FROM_LOCAL = "2021-08-01T06:00:00";
const TO_LOCAL = "2021-08-01T09:00:00";
const fromIso = new Date(FROM_LOCAL).toISOString().replace(/\.\d{3}Z$/, "Z");
const RECORDS = 180;

interface RecordedChart {
  sensor: string;
  unit: string;
  points: SeriesPoint[];
}

function recordingFactory(log: RecordedChart[]): ChartFactory {
  return (_canvas, sensor, unit, points) => {
    log.push({ sensor, unit, points });
    return { destroy: () => undefined };
  };
}

const SENSORS = [
  { name: "temperature", interface_type: 3, value_kind: "continuous", channel: 4, unit: "degC" },
  { name: "light", interface_type: 1, value_kind: "binary", channel: 17, unit: "0/1" },
  { name: "sound", interface_type: 2, value_kind: "event_count", channel: 27, unit: "beats/interval" },
];

beforeAll(async () => {
  server = await startServer();
  api = new ApiClient(server.url);

  nodeId = (await api.createNode("house1/living", 60)).node_id;
  for (const sensor of SENSORS) {
    await api.addSensor(nodeId, sensor);
  }
  await api.fetchConfig(nodeId); // the node picked up its config

  const rows = minuteRows(fromIso, RECORDS, [
    (i) => Math.round((20 + 6 * Math.sin(i / 30)) * 100) / 100,
    (i) => (i % 90 < 60 ? 0 : 1),
    (i) => (i * 7) % 5,
  ]);
  const report = await api.ingest(batchCsv(nodeId, SENSORS.map((s) => s.name), rows));
  expect(report).toEqual({ inserted: RECORDS, duplicates: 0, rejected: [] });

  // one sensor-fault entry so the error export has a row
  const errorCsv =
    `id,node_id,timestamp,${SENSORS.map((s) => s.name).join(",")}\n` +
    `${nodeId}|${basicStamp(new Date(Date.parse(fromIso) + RECORDS * 60_000).toISOString())},` +
    `${nodeId},${basicStamp(new Date(Date.parse(fromIso) + RECORDS * 60_000).toISOString())},21.5,0,3\n` +
    `\n` +
    `node_id,timestamp,category,sensor,message\n` +
    `${nodeId},${basicStamp(fromIso)},sensor_fault,temperature,read timed out\n`;
  const withError = await api.ingest(errorCsv);
  expect(withError.inserted).toBe(1);
}, 120_000);

afterAll(() => {
  server?.stop();
});

async function freshApp(chartLog: RecordedChart[]): Promise<HTMLElement> {
  document.body.innerHTML = `<div id="app"></div>`;
  const root = document.getElementById("app")!;
  startApp(root, api, recordingFactory(chartLog));
  await waitFor(
    () => root.querySelectorAll("#node-select option").length > 0,
    "node list to load",
  );
  const from = root.querySelector<HTMLInputElement>("#from")!;
  const to = root.querySelector<HTMLInputElement>("#to")!;
  from.value = FROM_LOCAL;
  to.value = TO_LOCAL;
  to.dispatchEvent(new Event("change"));
  await waitFor(
    () => (root.querySelector(".chart-grid") as HTMLElement | null)?.dataset.points !== undefined,
    "charts to render",
  );
  return root;
}

describe("function 1: data visualization", () => {
  test("chart grid renders one chart per sensor from server buckets", async () => {
    const charts: RecordedChart[] = [];
    const root = await freshApp(charts);

    const cards = root.querySelectorAll(".chart-card");
    expect(cards.length).toBe(3);
    expect([...cards].map((c) => (c as HTMLElement).dataset.sensor).sort()).toEqual(
      ["light", "sound", "temperature"],
    );

    // every plotted number is traceable to the API response
    const buckets = await api.queryData({
      node: nodeId,
      sensors: ["temperature", "light", "sound"],
      from: fromIso,
      to: new Date(TO_LOCAL).toISOString().replace(/\.\d{3}Z$/, "Z"),
      intervalS: 600,
    });
    const latest = new Map(charts.map((c) => [c.sensor, c]));
    for (const sensor of ["temperature", "light", "sound"]) {
      expect(latest.get(sensor)!.points).toEqual(bucketsToSeries(buckets, sensor));
      expect(latest.get(sensor)!.points.length).toBe(18); // 3 h / 10 min
    }
  });

  test("single-sensor view shows the server's min/max/mean summary", async () => {
    const charts: RecordedChart[] = [];
    const root = await freshApp(charts);

    for (const name of ["light", "sound"]) {
      const box = root.querySelector<HTMLInputElement>(`#sensor-${name}`)!;
      box.checked = false;
      box.dispatchEvent(new Event("change"));
    }
    await waitFor(
      () => root.querySelector(".summary") !== null,
      "summary panel",
    );
    const whole = await api.queryData({
      node: nodeId,
      sensors: ["temperature"],
      from: fromIso,
      to: new Date(TO_LOCAL).toISOString().replace(/\.\d{3}Z$/, "Z"),
      intervalS: RECORDS * 60,
    });
    const stats = whole[0].sensors["temperature"];
    const summary = root.querySelector(".summary")!;
    expect(stats.min).toBeLessThanOrEqual(stats.mean);
    expect(stats.mean).toBeLessThanOrEqual(stats.max);
    const shown = (v: number) => (Number.isInteger(v) ? String(v) : v.toFixed(2));
    expect(summary.querySelector("[data-field=min]")!.textContent).toBe(shown(stats.min));
    expect(summary.querySelector("[data-field=max]")!.textContent).toBe(shown(stats.max));
    expect(summary.querySelector("[data-field=mean]")!.textContent).toBe(shown(stats.mean));
  });

  test("empty range renders zero data points", async () => {
    const charts: RecordedChart[] = [];
    const root = await freshApp(charts);
    const from = root.querySelector<HTMLInputElement>("#from")!;
    const to = root.querySelector<HTMLInputElement>("#to")!;
    from.value = "1999-01-01T00:00:00";
    to.value = "1999-01-02T00:00:00";
    charts.length = 0;
    to.dispatchEvent(new Event("change"));
    await waitFor(
      () => root.querySelectorAll(".chart-card .empty").length === 3,
      "empty-state cards",
    );
    expect(charts.length).toBe(0); // nothing fabricated
  });

  test("interval selector never offers less than the record interval", async () => {
    expect(intervalChoices(60).every((c) => c.seconds >= 60)).toBe(true);
    expect(intervalChoices(300).every((c) => c.seconds >= 300)).toBe(true);
    expect(intervalChoices(300)[0].seconds).toBe(300); // native offered

    const slowNode = (await api.createNode("house2/slow", 300)).node_id;
    await api.addSensor(slowNode, SENSORS[0]);
    const charts: RecordedChart[] = [];
    const root = await freshApp(charts);
    const select = root.querySelector<HTMLSelectElement>("#node-select")!;
    select.value = slowNode;
    select.dispatchEvent(new Event("change"));
    await waitFor(
      () =>
        [...root.querySelectorAll<HTMLOptionElement>("#interval-select option")].every(
          (option) => Number(option.value) >= 300,
        ) && root.querySelectorAll("#interval-select option").length > 0,
      "interval options to respect the slow node's record interval",
    );
  });
});

describe("functions 2 and 3: data and error-log downloads", () => {
  test("download links stream bytes identical to direct API exports", async () => {
    const charts: RecordedChart[] = [];
    const root = await freshApp(charts);
    root.querySelector<HTMLButtonElement>("button[data-tab=downloads]")!.click();
    await waitFor(() => root.querySelector("#download-data") !== null, "download links");

    const toIso = new Date(TO_LOCAL).toISOString().replace(/\.\d{3}Z$/, "Z");
    const dataHref = root.querySelector<HTMLAnchorElement>("#download-data")!.href;
    const viaLink = new Uint8Array(await (await fetch(dataHref)).arrayBuffer());
    const direct = await api.exportData(
      nodeId,
      ["temperature", "light", "sound"],
      fromIso,
      toIso,
    );
    expect(viaLink).toEqual(direct);
    const text = new TextDecoder().decode(viaLink);
    expect(text.startsWith("id,node_id,timestamp,")).toBe(true);
    expect(text.trim().split("\n").length).toBe(1 + RECORDS);

    const errorHref = root.querySelector<HTMLAnchorElement>("#download-errors")!.href;
    const errorsViaLink = new Uint8Array(await (await fetch(errorHref)).arrayBuffer());
    const errorsDirect = await api.exportErrors(nodeId, fromIso, toIso);
    expect(errorsViaLink).toEqual(errorsDirect);
    const errorText = new TextDecoder().decode(errorsViaLink);
    expect(errorText.split("\n")[0]).toBe("node_id,timestamp,category,sensor,message");
    expect(errorText).toContain("sensor_fault,temperature");
  });

  test("error download for a fault-free node is header-only", async () => {
    const quiet = (await api.createNode("house3/quiet")).node_id;
    const payload = await api.exportErrors(quiet, "2021-01-01T00:00:00Z", "2022-01-01T00:00:00Z");
    expect(new TextDecoder().decode(payload)).toBe("node_id,timestamp,category,sensor,message\n");
  });
});

describe("functions 4 and 5: nodes and sensors, code-free", () => {
  test("add node via form, add sensors via form, updated flag lifecycle", async () => {
    const charts: RecordedChart[] = [];
    const root = await freshApp(charts);
    root.querySelector<HTMLButtonElement>("button[data-tab=registry]")!.click();
    await waitFor(() => root.querySelector("#add-node") !== null, "registry forms");

    // add a node
    const nodeForm = root.querySelector<HTMLFormElement>("#add-node")!;
    nodeForm.querySelector<HTMLInputElement>("[name=label]")!.value = "house9/office";
    nodeForm.dispatchEvent(new Event("submit"));
    await waitFor(
      () => [...root.querySelectorAll("table.nodes tr")].some((r) => r.textContent!.includes("house9/office")),
      "new node row",
    );
    const listing = await api.listNodes();
    const added = listing.find((n) => n.label === "house9/office")!;
    expect(added).toBeDefined();
    expect(added.sensors).toEqual([]);
    expect(added.updated).toBe(false); // nothing changed since creation

    // add a Type-2 sensor through the form -> flag flips on
    const sensorForm = root.querySelector<HTMLFormElement>("#add-sensor")!;
    sensorForm.querySelector<HTMLSelectElement>("[name=node]")!.value = added.node_id;
    sensorForm.querySelector<HTMLSelectElement>("[name=type]")!.value = "2";
    sensorForm.querySelector<HTMLInputElement>("[name=name]")!.value = "sound";
    sensorForm.querySelector<HTMLSelectElement>("[name=kind]")!.value = "event_count";
    sensorForm.querySelector<HTMLInputElement>("[name=channel]")!.value = "17";
    sensorForm.dispatchEvent(new Event("submit"));
    await waitFor(
      () =>
        [...root.querySelectorAll("table.nodes tr")].some(
          (r) => r.textContent!.includes("house9/office") && r.textContent!.includes("pending"),
        ),
      "updated flag shown after sensor add",
    );
    expect((await api.listNodes()).find((n) => n.node_id === added.node_id)!.updated).toBe(true);

    // the node fetches its config -> flag clears
    await api.fetchConfig(added.node_id);
    expect((await api.listNodes()).find((n) => n.node_id === added.node_id)!.updated).toBe(false);

    // a Type-3 sensor comes from the supported list with its defaults
    root.querySelector<HTMLButtonElement>("button[data-tab=registry]")!.click();
    await waitFor(() => root.querySelector("#add-sensor") !== null, "registry re-render");
    const form = root.querySelector<HTMLFormElement>("#add-sensor")!;
    form.querySelector<HTMLSelectElement>("[name=node]")!.value = added.node_id;
    const typeSelect = form.querySelector<HTMLSelectElement>("[name=type]")!;
    typeSelect.value = "3";
    typeSelect.dispatchEvent(new Event("change"));
    const catalogSelect = form.querySelector<HTMLSelectElement>("[name=catalog]")!;
    expect(form.querySelector<HTMLElement>("[data-catalog-name]")!.hidden).toBe(false);
    catalogSelect.value = "pressure";
    catalogSelect.dispatchEvent(new Event("change"));
    form.dispatchEvent(new Event("submit"));
    await waitFor(
      () =>
        [...root.querySelectorAll("table.nodes tr")].some(
          (r) => r.textContent!.includes("house9/office") && r.textContent!.includes("pressure"),
        ),
      "catalog sensor added",
    );
    const after = (await api.listNodes()).find((n) => n.node_id === added.node_id)!;
    const pressure = after.sensors.find((s) => s.name === "pressure")!;
    expect(pressure.interface_type).toBe(3);
    expect(pressure.value_kind).toBe("continuous");
    expect(after.updated).toBe(true);
  });

  test("duplicate sensor shows an inline error", async () => {
    const charts: RecordedChart[] = [];
    const root = await freshApp(charts);
    root.querySelector<HTMLButtonElement>("button[data-tab=registry]")!.click();
    await waitFor(() => root.querySelector("#add-sensor") !== null, "registry forms");
    const form = root.querySelector<HTMLFormElement>("#add-sensor")!;
    form.querySelector<HTMLSelectElement>("[name=node]")!.value = nodeId;
    form.querySelector<HTMLSelectElement>("[name=type]")!.value = "1";
    form.querySelector<HTMLInputElement>("[name=name]")!.value = "light"; // already present
    form.dispatchEvent(new Event("submit"));
    await waitFor(
      () => (form.querySelector(".form-error")!.textContent ?? "").length > 0,
      "inline validation error",
    );
    expect(form.querySelector(".form-error")!.textContent).toContain("light");
  });

  test("removing a sensor keeps its history chartable", async () => {
    const charts: RecordedChart[] = [];
    const root = await freshApp(charts);
    root.querySelector<HTMLButtonElement>("button[data-tab=registry]")!.click();
    await waitFor(() => root.querySelector("table.nodes") !== null, "node table");

    const row = [...root.querySelectorAll<HTMLElement>("table.nodes tbody tr")].find(
      (r) => r.dataset.node === nodeId,
    )!;
    const soundChip = [...row.querySelectorAll(".chip")].find(
      (chip) => chip.textContent!.startsWith("sound"),
    )!;
    soundChip.querySelector("button")!.click();
    await waitFor(
      () =>
        [...root.querySelectorAll<HTMLElement>("table.nodes tbody tr")]
          .find((r) => r.dataset.node === nodeId)
          ?.querySelector(".chip.inactive") != null,
      "sound chip marked inactive",
    );
    const desc = (await api.listNodes()).find((n) => n.node_id === nodeId)!;
    expect(desc.sensors.find((s) => s.name === "sound")!.active).toBe(false);
    expect(desc.updated).toBe(true);

    // back to charts: historical sound data still renders
    charts.length = 0;
    root.querySelector<HTMLButtonElement>("button[data-tab=charts]")!.click();
    await waitFor(
      () => charts.some((c) => c.sensor === "sound" && c.points.length === 18),
      "historical chart for the removed sensor",
    );
  });
});

describe("resilience", () => {
  test("unreachable server shows the offline banner, no fabricated numbers", async () => {
    const dead = new ApiClient("http://127.0.0.1:9");
    document.body.innerHTML = `<div id="app2"></div>`;
    const root = document.getElementById("app2")!;
    const charts: RecordedChart[] = [];
    startApp(root, dead, recordingFactory(charts));
    await waitFor(
      () => root.querySelector<HTMLElement>("#offline-banner")!.hidden === false,
      "offline banner",
    );
    expect(charts.length).toBe(0);
    expect(root.querySelector("#panel")!.textContent).toContain("unreachable");
  });

  test("viewing-interval rule errors surface, not crash", async () => {
    // the server rejects a sub-record-interval query; the API client
    // carries the reason through
    await expect(
      api.queryData({
        node: nodeId,
        sensors: ["temperature"],
        from: fromIso,
        to: new Date(TO_LOCAL).toISOString().replace(/\.\d{3}Z$/, "Z"),
        intervalS: 30,
      }),
    ).rejects.toThrowError(/interval/);
  });
});
