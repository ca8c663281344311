// HTML/SVG string rendering. Pure functions of the view state so the
// contract tests can inspect exactly what a browser would show.

import type { Completion, GraphSummary, Preview, SessionDoc } from "./api.js";
import {
  ViewState,
  SortOrder,
  SortKey,
  cellText,
  opportunityText,
  previewRows,
  sortPreviews,
  trailPoints,
} from "./state.js";

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const COLUMNS: Array<{ key: SortKey; label: string }> = [
  { key: "neighbor", label: "neighbor" },
  { key: "edge_weight", label: "edge cost" },
  { key: "reachable_candidates", label: "reachable" },
  { key: "delta_reachable", label: "delta" },
  { key: "branching_factor", label: "branching" },
  { key: "opportunity", label: "opportunity per target" },
];

export function renderBanner(banner: string | null): string {
  if (banner === null) return "";
  return (
    `<div class="banner" role="alert">${esc(banner)} ` +
    `<button data-action="retry">retry</button></div>`
  );
}

export function renderScatter(summary: GraphSummary, session: SessionDoc | null): string {
  const xs = summary.vertices.map((v) => v.x);
  const ys = summary.vertices.map((v) => v.y);
  const pad = 0.05;
  const x0 = Math.min(...xs) - pad;
  const y0 = Math.min(...ys) - pad;
  const w = Math.max(...xs) + pad - x0;
  const h = Math.max(...ys) + pad - y0;
  const current = session === null ? null : session.current;
  const parts: string[] = [];
  parts.push(
    `<svg viewBox="${x0} ${y0} ${w} ${h}" preserveAspectRatio="xMidYMid meet">`,
  );
  if (session !== null && session.history.length > 1) {
    const pts = trailPoints(summary, session)
      .map(([x, y]) => `${x},${y}`)
      .join(" ");
    parts.push(`<polyline class="trail" points="${pts}" />`);
  }
  for (const v of summary.vertices) {
    const cls = [
      "vertex",
      v.candidate ? "candidate" : "",
      v.id === current ? "current" : "",
    ]
      .filter(Boolean)
      .join(" ");
    const label = v.class === null ? "" : ` data-class="${esc(v.class)}"`;
    parts.push(
      `<circle class="${cls}" data-id="${v.id}"${label} cx="${v.x}" cy="${v.y}" r="${
        v.id === current ? 0.018 : 0.01
      }" />`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}

function sortIndicator(order: SortOrder, key: SortKey): string {
  if (order.key !== key) return "";
  return order.descending ? " ▼" : " ▲";
}

/** The preview table. Every data cell carries data-field so tests can
 * read back exactly what is displayed. */
export function renderPreviewTable(previews: Preview[], order: SortOrder): string {
  const head = COLUMNS.map(
    (c) =>
      `<th><button data-sort="${c.key}">${esc(c.label)}${sortIndicator(order, c.key)}</button></th>`,
  ).join("");
  const rows = sortPreviews(previews, order)
    .map((p) => {
      const cells = [
        `<td data-field="neighbor">${cellText(p.neighbor)}</td>`,
        `<td data-field="edge_weight">${cellText(p.edge_weight)}</td>`,
        `<td data-field="reachable_candidates">${cellText(p.reachable_candidates)}</td>`,
        `<td data-field="delta_reachable">${cellText(p.delta_reachable)}</td>`,
        `<td data-field="branching_factor">${cellText(p.branching_factor)}</td>`,
        `<td data-field="opportunity_to_each_target">${esc(
          opportunityText(p.opportunity_to_each_target),
        )}</td>`,
      ].join("");
      const mark = p.candidate ? " class=\"candidate-row\"" : "";
      return (
        `<tr${mark} data-neighbor="${p.neighbor}">${cells}` +
        `<td><button data-step="${p.neighbor}">step</button></td></tr>`
      );
    })
    .join("");
  return (
    `<table class="previews"><thead><tr>${head}<th></th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`
  );
}

export function renderCompletion(c: Completion): string {
  const lines = [
    `<p>reached candidate <strong data-field="reached">${cellText(c.reached)}</strong></p>`,
    `<p>journey length <span data-field="realized_total">${cellText(
      c.realized.total_length,
    )}</span> over ${c.realized.vertices.length - 1} steps</p>`,
  ];
  if (c.optimal !== null) {
    lines.push(
      `<p>optimal length <span data-field="optimal_total">${cellText(
        c.optimal.total_length,
      )}</span> via ${esc(c.optimal.vertices.join(" → "))}</p>`,
    );
  }
  if (c.distance_ratio !== undefined) {
    lines.push(
      `<p>distance ratio <span data-field="distance_ratio">${cellText(
        c.distance_ratio,
      )}</span></p>`,
    );
  }
  if (c.opportunity_vs_optimal !== undefined) {
    lines.push(
      `<p>opportunity vs optimal <span data-field="opportunity_vs_optimal">${cellText(
        c.opportunity_vs_optimal,
      )}</span></p>`,
    );
  }
  return `<section class="completion">${lines.join("")}</section>`;
}

function renderHistory(doc: SessionDoc): string {
  const items = doc.history
    .map((h) => {
      const cost = h.edge_weight === null ? "" : ` (+${cellText(h.edge_weight)})`;
      return `<li>vertex ${h.vertex}${esc(cost)}</li>`;
    })
    .join("");
  return (
    `<ol class="history">${items}</ol>` +
    `<p>total traversed weight <span data-field="total_weight">${cellText(
      doc.total_weight,
    )}</span> · version <span data-field="version">${cellText(doc.version)}</span></p>`
  );
}

export function renderLanding(): string {
  return (
    `<form class="landing" data-form="open">` +
    `<label>graph id <input name="graph" required /></label>` +
    `<label>factual vertex <input name="factual" type="number" required /></label>` +
    `<button type="submit">start session</button>` +
    `</form>` +
    `<form class="landing" data-form="upload">` +
    `<label>or upload a graph document <input name="file" type="file" accept=".json" required /></label>` +
    `<button type="submit">upload</button>` +
    `</form>`
  );
}

export function renderApp(view: ViewState): string {
  const parts: string[] = [renderBanner(view.banner)];
  if (view.summary === null) {
    parts.push(renderLanding());
    return parts.join("");
  }
  if (view.summary.candidates.length === 0) {
    parts.push(`<p class="notice">no counterfactuals at this threshold</p>`);
  }
  parts.push(renderScatter(view.summary, view.session));
  if (view.session !== null) {
    parts.push(
      `<p>at vertex <strong data-field="current">${cellText(view.session.current)}</strong></p>`,
    );
    parts.push(renderHistory(view.session));
    if (view.session.complete && view.session.completion !== null) {
      parts.push(renderCompletion(view.session.completion));
    } else {
      parts.push(renderPreviewTable(previewRows(view.session), view.sort));
    }
  }
  return parts.join("");
}
