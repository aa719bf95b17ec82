// Visualization: one time-series chart per selected sensor (time on x,
// reading on y), and a min/max/mean summary when exactly one sensor is
// selected. Data arrives resampled from the server.

import { ApiClient, ApiError } from "../api.js";
import { bucketsToSeries, summaryStats, type ChartFactory, type ChartHandle } from "../charts.js";
import type { NodeInfo } from "../types.js";

export interface DashboardSelection {
  node: NodeInfo;
  sensors: string[];
  from: string;
  to: string;
  intervalS: number;
}

let liveCharts: ChartHandle[] = [];

export async function renderDashboard(
  root: HTMLElement,
  api: ApiClient,
  charts: ChartFactory,
  selection: DashboardSelection,
): Promise<void> {
  for (const chart of liveCharts) chart.destroy();
  liveCharts = [];
  root.innerHTML = "";

  if (!selection.sensors.length) {
    root.innerHTML = `<p class="empty">Select at least one sensor.</p>`;
    return;
  }

  let buckets;
  try {
    buckets = await api.queryData({
      node: selection.node.node_id,
      sensors: selection.sensors,
      from: selection.from,
      to: selection.to,
      intervalS: selection.intervalS,
    });
  } catch (error) {
    root.innerHTML = `<p class="error">${
      error instanceof ApiError && error.status > 0
        ? `Query failed: ${escapeHtml(error.message)}`
        : "Server unreachable."
    }</p>`;
    return;
  }

  if (selection.sensors.length === 1) {
    await renderSummary(root, api, selection);
  }

  const grid = document.createElement("div");
  grid.className = "chart-grid";
  root.appendChild(grid);

  const units = new Map(selection.node.sensors.map((s) => [s.name, s.unit]));
  let plotted = 0;
  for (const sensor of selection.sensors) {
    const points = bucketsToSeries(buckets, sensor);
    const card = document.createElement("div");
    card.className = "chart-card";
    card.dataset.sensor = sensor;
    const title = document.createElement("h3");
    title.textContent = `${sensor}${units.get(sensor) ? ` [${units.get(sensor)}]` : ""}`;
    card.appendChild(title);
    if (!points.length) {
      const empty = document.createElement("p");
      empty.className = "empty";
      empty.textContent = "No data in this range.";
      card.appendChild(empty);
    } else {
      const canvas = document.createElement("canvas");
      card.appendChild(canvas);
      liveCharts.push(charts(canvas, sensor, units.get(sensor) ?? "", points));
      plotted += points.length;
    }
    grid.appendChild(card);
  }
  grid.dataset.points = String(plotted);
}

async function renderSummary(
  root: HTMLElement,
  api: ApiClient,
  selection: DashboardSelection,
): Promise<void> {
  const sensor = selection.sensors[0];
  const rangeS = Math.max(
    selection.node.record_interval_s,
    (Date.parse(selection.to) - Date.parse(selection.from)) / 1000,
  );
  let stats = null;
  try {
    const whole = await api.queryData({
      node: selection.node.node_id,
      sensors: [sensor],
      from: selection.from,
      to: selection.to,
      intervalS: rangeS,
    });
    stats = summaryStats(whole, sensor);
  } catch {
    return; // the chart request already surfaces errors
  }
  const panel = document.createElement("div");
  panel.className = "summary";
  panel.dataset.sensor = sensor;
  panel.innerHTML = stats
    ? `<span>min <b data-field="min">${fmt(stats.min)}</b></span>
       <span>max <b data-field="max">${fmt(stats.max)}</b></span>
       <span>average <b data-field="mean">${fmt(stats.mean)}</b></span>
       <span>${stats.count} readings</span>`
    : `<span class="empty">No readings in range.</span>`;
  root.appendChild(panel);
}

function fmt(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(2);
}

function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (c) => `&#${c.charCodeAt(0)};`);
}
