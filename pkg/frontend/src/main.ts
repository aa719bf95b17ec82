// Single-page shell: persistent control sidebar on the left, one of three
// panels (charts / downloads / registry) on the right. Control changes
// re-render the active panel in place; no page reloads.

import { ApiClient } from "./api.js";
import { intervalChoices, type ChartFactory, type SeriesPoint } from "./charts.js";
import { renderDashboard } from "./views/dashboard.js";
import { renderDownloads } from "./views/downloads.js";
import { renderRegistry } from "./views/registry.js";
import type { NodeInfo } from "./types.js";

declare const Chart: any; // chart.umd.js, loaded globally by index.html

type Tab = "charts" | "downloads" | "registry";

interface AppState {
  nodes: NodeInfo[];
  nodeId: string | null;
  sensors: Set<string>;
  from: string;
  to: string;
  intervalS: number;
  tab: Tab;
}

const chartJsFactory: ChartFactory = (canvas, sensor, unit, points: SeriesPoint[]) => {
  const chart = new Chart(canvas, {
    type: "line",
    data: {
      labels: points.map((p) => p.x.replace("T", " ").replace("Z", "")),
      datasets: [
        {
          label: unit ? `${sensor} [${unit}]` : sensor,
          data: points.map((p) => p.y),
          borderWidth: 1.5,
          pointRadius: points.length > 200 ? 0 : 2,
          spanGaps: false,
        },
      ],
    },
    options: {
      animation: false,
      scales: { x: { ticks: { maxTicksLimit: 8 } } },
      plugins: { legend: { display: false } },
    },
  });
  return { destroy: () => chart.destroy() };
};

export function startApp(
  root: HTMLElement,
  api: ApiClient,
  charts: ChartFactory = chartJsFactory,
): void {
  const now = new Date();
  const dayAgo = new Date(now.getTime() - 24 * 3600 * 1000);
  const state: AppState = {
    nodes: [],
    nodeId: null,
    sensors: new Set(),
    from: toLocalInput(dayAgo),
    to: toLocalInput(now),
    intervalS: 600,
    tab: "charts",
  };

  root.innerHTML = `
    <div id="offline-banner" hidden>Server unreachable; showing nothing rather than stale numbers.</div>
    <div class="layout">
      <aside id="sidebar">
        <h1>sensornet</h1>
        <nav>
          <button data-tab="charts" class="active">Charts</button>
          <button data-tab="downloads">Downloads</button>
          <button data-tab="registry">Registry</button>
        </nav>
        <div id="controls">
          <label>node <select id="node-select"></select></label>
          <fieldset id="sensor-select"><legend>sensors</legend></fieldset>
          <label>from <input id="from" type="datetime-local" step="1"></label>
          <label>to <input id="to" type="datetime-local" step="1"></label>
          <label>interval <select id="interval-select"></select></label>
        </div>
      </aside>
      <main id="panel"></main>
    </div>`;

  const banner = root.querySelector<HTMLElement>("#offline-banner")!;
  api.watchReachability((up) => {
    banner.hidden = up;
  });

  const panel = root.querySelector<HTMLElement>("#panel")!;
  const nodeSelect = root.querySelector<HTMLSelectElement>("#node-select")!;
  const sensorBox = root.querySelector<HTMLElement>("#sensor-select")!;
  const fromInput = root.querySelector<HTMLInputElement>("#from")!;
  const toInput = root.querySelector<HTMLInputElement>("#to")!;
  const intervalSelect = root.querySelector<HTMLSelectElement>("#interval-select")!;
  fromInput.value = state.from;
  toInput.value = state.to;

  const currentNode = (): NodeInfo | null =>
    state.nodes.find((n) => n.node_id === state.nodeId) ?? null;

  const syncControls = () => {
    nodeSelect.innerHTML = state.nodes
      .map(
        (n) =>
          `<option value="${n.node_id}" ${n.node_id === state.nodeId ? "selected" : ""}>
            ${n.node_id} (${n.label})</option>`,
      )
      .join("");
    const node = currentNode();
    sensorBox.innerHTML = "<legend>sensors</legend>";
    if (node) {
      for (const sensor of node.sensors) {
        const id = `sensor-${sensor.name}`;
        const label = document.createElement("label");
        label.innerHTML = `<input type="checkbox" id="${id}" value="${sensor.name}"
            ${state.sensors.has(sensor.name) ? "checked" : ""}>
          ${sensor.name}${sensor.active ? "" : " (removed)"}`;
        label.querySelector("input")!.addEventListener("change", (event) => {
          const box = event.target as HTMLInputElement;
          if (box.checked) state.sensors.add(box.value);
          else state.sensors.delete(box.value);
          void renderPanel();
        });
        sensorBox.appendChild(label);
      }
      intervalSelect.innerHTML = intervalChoices(node.record_interval_s)
        .map(
          (choice) =>
            `<option value="${choice.seconds}" ${choice.seconds === state.intervalS ? "selected" : ""}>
              ${choice.label}</option>`,
        )
        .join("");
      if (!intervalSelect.value) state.intervalS = node.record_interval_s;
      else state.intervalS = Number(intervalSelect.value);
    }
  };

  const renderPanel = async () => {
    root.querySelectorAll<HTMLButtonElement>("nav button").forEach((button) => {
      button.classList.toggle("active", button.dataset.tab === state.tab);
    });
    const node = currentNode();
    if (state.tab === "registry") {
      try {
        await renderRegistry(panel, api, { refresh: reload });
      } catch {
        panel.innerHTML = `<p class="error">Server unreachable.</p>`;
      }
      return;
    }
    if (!node) {
      panel.innerHTML = `<p class="empty">No nodes registered. Add one under Registry.</p>`;
      return;
    }
    const range = {
      from: fromIso(fromInput.value),
      to: fromIso(toInput.value),
    };
    if (state.tab === "charts") {
      await renderDashboard(panel, api, charts, {
        node,
        sensors: [...state.sensors],
        from: range.from,
        to: range.to,
        intervalS: state.intervalS,
      });
    } else {
      renderDownloads(panel, api, {
        node,
        sensors: [...state.sensors],
        from: range.from,
        to: range.to,
      });
    }
  };

  const reload = async () => {
    try {
      state.nodes = await api.listNodes();
    } catch {
      panel.innerHTML = `<p class="error">Server unreachable.</p>`;
      return; // the banner is already up via watchReachability
    }
    if (!state.nodeId && state.nodes.length) {
      state.nodeId = state.nodes[0].node_id;
      // sensible default: chart everything the node has
      state.sensors = new Set(state.nodes[0].sensors.map((s) => s.name));
    }
    syncControls();
    await renderPanel();
  };

  nodeSelect.addEventListener("change", () => {
    state.nodeId = nodeSelect.value;
    const node = currentNode();
    state.sensors = new Set(node ? node.sensors.map((s) => s.name) : []);
    syncControls();
    void renderPanel();
  });
  intervalSelect.addEventListener("change", () => {
    state.intervalS = Number(intervalSelect.value);
    void renderPanel();
  });
  for (const input of [fromInput, toInput]) {
    input.addEventListener("change", () => void renderPanel());
  }
  root.querySelectorAll<HTMLButtonElement>("nav button").forEach((button) => {
    button.addEventListener("click", () => {
      state.tab = button.dataset.tab as Tab;
      void renderPanel();
    });
  });

  void reload();
}

function toLocalInput(date: Date): string {
  const pad = (n: number) => String(n).padStart(2, "0");
  return (
    `${date.getFullYear()}-${pad(date.getMonth() + 1)}-${pad(date.getDate())}` +
    `T${pad(date.getHours())}:${pad(date.getMinutes())}:${pad(date.getSeconds())}`
  );
}

function fromIso(localValue: string): string {
  const parsed = new Date(localValue);
  return new Date(parsed.getTime() - parsed.getMilliseconds()).toISOString().replace(/\.\d{3}Z$/, "Z");
}

// browser bootstrap; tests import startApp and drive it inside jsdom
if (typeof document !== "undefined" && document.getElementById("app")) {
  startApp(document.getElementById("app")!, new ApiClient(""));
}
