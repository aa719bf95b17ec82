// Data and error-log downloads. The anchors point straight at the export
// endpoints, so the browser saves exactly the bytes the server streams.

import { ApiClient } from "../api.js";
import type { NodeInfo } from "../types.js";

export interface DownloadSelection {
  node: NodeInfo;
  sensors: string[];
  from: string;
  to: string;
}

export function renderDownloads(
  root: HTMLElement,
  api: ApiClient,
  selection: DownloadSelection,
): void {
  root.innerHTML = "";
  const panel = document.createElement("div");
  panel.className = "panel";
  panel.innerHTML = `<h2>Downloads</h2>
    <p>Node <code>${selection.node.node_id}</code>, ${describeRange(selection)}.</p>`;

  const dataUrl = api.dataExportUrl(
    selection.node.node_id,
    selection.sensors,
    selection.from,
    selection.to,
  );
  const errorsUrl = api.errorsExportUrl(selection.node.node_id, selection.from, selection.to);

  const dataLink = anchor(dataUrl, `${selection.node.node_id}_data.csv`, "Download data CSV");
  dataLink.id = "download-data";
  const errorLink = anchor(errorsUrl, `${selection.node.node_id}_errors.csv`, "Download error log CSV");
  errorLink.id = "download-errors";

  panel.appendChild(dataLink);
  panel.appendChild(errorLink);
  const note = document.createElement("p");
  note.className = "hint";
  note.textContent =
    selection.sensors.length === 0
      ? "All sensors included (none selected = everything)."
      : `Sensors: ${selection.sensors.join(", ")}`;
  panel.appendChild(note);
  root.appendChild(panel);
}

function describeRange(selection: DownloadSelection): string {
  return `${selection.from} to ${selection.to}`;
}

function anchor(url: string, filename: string, label: string): HTMLAnchorElement {
  const link = document.createElement("a");
  link.className = "download";
  link.href = url;
  link.download = filename;
  link.textContent = label;
  return link;
}
