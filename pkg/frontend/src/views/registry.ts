// Code-free topology management: add nodes, add sensors (type dropdown,
// name, pin/channel; custom-code sensors picked from the server's
// supported list), remove sensors. The table shows each node's updated
// flag so it's obvious which nodes will refetch configuration.

import { ApiClient, ApiError } from "../api.js";
import type { CatalogEntry, NodeInfo } from "../types.js";

export interface RegistryCallbacks {
  refresh(): Promise<void>;
}

export async function renderRegistry(
  root: HTMLElement,
  api: ApiClient,
  callbacks: RegistryCallbacks,
): Promise<void> {
  const [nodes, catalog] = await Promise.all([api.listNodes(), api.supportedSensors()]);
  root.innerHTML = "";
  root.appendChild(nodeTable(api, nodes, callbacks));
  root.appendChild(addNodeForm(api, callbacks));
  root.appendChild(addSensorForm(api, nodes, catalog, callbacks));
}

function nodeTable(api: ApiClient, nodes: NodeInfo[], callbacks: RegistryCallbacks): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "panel";
  wrap.innerHTML = `<h2>Sensing nodes</h2>`;
  if (!nodes.length) {
    wrap.innerHTML += `<p class="empty">No nodes registered yet.</p>`;
    return wrap;
  }
  const table = document.createElement("table");
  table.className = "nodes";
  table.innerHTML = `<thead><tr>
      <th>node</th><th>placement</th><th>interval</th><th>updated</th><th>sensors</th>
    </tr></thead>`;
  const body = document.createElement("tbody");
  for (const node of nodes) {
    const row = document.createElement("tr");
    row.dataset.node = node.node_id;
    const sensors = document.createElement("td");
    for (const sensor of node.sensors) {
      const chip = document.createElement("span");
      chip.className = sensor.active ? "chip" : "chip inactive";
      chip.textContent = sensor.name;
      if (sensor.active) {
        const remove = document.createElement("button");
        remove.textContent = "x";
        remove.title = `remove ${sensor.name}`;
        remove.addEventListener("click", async () => {
          try {
            await api.removeSensor(node.node_id, sensor.name);
          } catch (error) {
            alertError(error);
            return;
          }
          await callbacks.refresh();
        });
        chip.appendChild(remove);
      } else {
        chip.title = "removed; history retained";
      }
      sensors.appendChild(chip);
    }
    row.innerHTML = `
      <td><code>${node.node_id}</code></td>
      <td>${escapeHtml(node.label)}</td>
      <td>${node.record_interval_s} s</td>
      <td class="updated">${node.updated ? "&#9679; pending" : "&#10003; synced"}</td>`;
    row.appendChild(sensors);
    body.appendChild(row);
  }
  table.appendChild(body);
  wrap.appendChild(table);
  return wrap;
}

function addNodeForm(api: ApiClient, callbacks: RegistryCallbacks): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "panel";
  wrap.innerHTML = `<h2>Add sensing node</h2>`;
  const form = document.createElement("form");
  form.id = "add-node";
  form.innerHTML = `
    <label>placement label <input name="label" required placeholder="house3/kitchen"></label>
    <label>record interval [s] <input name="interval" type="number" value="60" min="2"></label>
    <button type="submit">Add node</button>
    <span class="form-error" data-for="label"></span>`;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(form);
    try {
      await api.createNode(
        String(data.get("label") ?? ""),
        Number(data.get("interval") ?? 60),
      );
    } catch (error) {
      showInline(form, "label", error);
      return;
    }
    await callbacks.refresh();
  });
  wrap.appendChild(form);
  return wrap;
}

function addSensorForm(
  api: ApiClient,
  nodes: NodeInfo[],
  catalog: CatalogEntry[],
  callbacks: RegistryCallbacks,
): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "panel";
  wrap.innerHTML = `<h2>Add sensor</h2>`;
  if (!nodes.length) {
    wrap.innerHTML += `<p class="empty">Register a node first.</p>`;
    return wrap;
  }
  const custom = catalog.filter((entry) => entry.interface_type === 3);
  const form = document.createElement("form");
  form.id = "add-sensor";
  form.innerHTML = `
    <label>node <select name="node">${nodes
      .map((n) => `<option value="${n.node_id}">${n.node_id} (${escapeHtml(n.label)})</option>`)
      .join("")}</select></label>
    <label>type <select name="type">
      <option value="1">Type 1: direct input</option>
      <option value="2">Type 2: event feedback</option>
      <option value="3">Type 3: supported sensor</option>
    </select></label>
    <label data-free-name>name <input name="name" placeholder="light"></label>
    <label data-catalog-name hidden>sensor <select name="catalog">${custom
      .map((entry) => `<option value="${entry.name}">${entry.name} (${escapeHtml(entry.description)})</option>`)
      .join("")}</select></label>
    <label data-kind>kind <select name="kind">
      <option value="binary">binary</option>
      <option value="event_count">event count</option>
      <option value="continuous">continuous</option>
    </select></label>
    <label>pin/channel <input name="channel" type="number" value="17" min="0"></label>
    <label>unit <input name="unit" placeholder="0/1"></label>
    <button type="submit">Add sensor</button>
    <span class="form-error" data-for="name"></span>`;

  const typeSelect = form.querySelector<HTMLSelectElement>("[name=type]")!;
  const syncTypeFields = () => {
    const isCustom = typeSelect.value === "3";
    form.querySelector<HTMLElement>("[data-free-name]")!.hidden = isCustom;
    form.querySelector<HTMLElement>("[data-catalog-name]")!.hidden = !isCustom;
    form.querySelector<HTMLElement>("[data-kind]")!.hidden = isCustom;
    if (isCustom) {
      const chosen = custom.find(
        (entry) => entry.name === form.querySelector<HTMLSelectElement>("[name=catalog]")!.value,
      );
      if (chosen) {
        form.querySelector<HTMLInputElement>("[name=channel]")!.value = String(chosen.channel);
        form.querySelector<HTMLInputElement>("[name=unit]")!.value = chosen.unit;
      }
    }
  };
  typeSelect.addEventListener("change", syncTypeFields);
  form.querySelector<HTMLSelectElement>("[name=catalog]")?.addEventListener("change", syncTypeFields);

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const interfaceType = Number(data.get("type"));
    const isCustom = interfaceType === 3;
    const catalogName = String(data.get("catalog") ?? "");
    const chosen = custom.find((entry) => entry.name === catalogName);
    const spec = {
      name: isCustom ? catalogName : String(data.get("name") ?? ""),
      interface_type: interfaceType,
      value_kind: isCustom && chosen ? chosen.value_kind : String(data.get("kind")),
      channel: Number(data.get("channel")),
      unit: String(data.get("unit") ?? ""),
    };
    try {
      await api.addSensor(String(data.get("node")), spec);
    } catch (error) {
      showInline(form, "name", error);
      return;
    }
    await callbacks.refresh();
  });
  wrap.appendChild(form);
  return wrap;
}

function showInline(form: HTMLFormElement, field: string, error: unknown): void {
  const slot = form.querySelector<HTMLElement>(`[data-for=${field}]`);
  if (slot) {
    slot.textContent = error instanceof ApiError ? error.message : String(error);
  }
}

function alertError(error: unknown): void {
  // surfaced inline elsewhere; a removal failure has no anchored field
  console.error(error);
}

function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (c) => `&#${c.charCodeAt(0)};`);
}
