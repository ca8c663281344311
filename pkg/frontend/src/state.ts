// View state and the pure helpers behind the preview table.
//
// The service is the single source of truth: every value displayed is
// taken from its JSON as-is. Sorting reorders rows but never alters a
// displayed value; geometry helpers position markers but draw only
// service-provided coordinates.

import type { GraphSummary, Preview, SessionDoc } from "./api.js";

export type SortKey =
  | "neighbor"
  | "edge_weight"
  | "reachable_candidates"
  | "delta_reachable"
  | "branching_factor"
  | "opportunity";

export type SortOrder = { key: SortKey; descending: boolean };

export type ViewState = {
  summary: GraphSummary | null;
  session: SessionDoc | null;
  sort: SortOrder;
  banner: string | null;
  busy: boolean;
};

export function initialState(): ViewState {
  return {
    summary: null,
    session: null,
    sort: { key: "edge_weight", descending: false },
    banner: null,
    busy: false,
  };
}

/** Rows are the service's preview objects, untouched. */
export function previewRows(doc: SessionDoc): Preview[] {
  return doc.previews;
}

/** Verbatim cell rendering: null becomes an empty cell, everything
 * else is the JSON value's canonical string. No rounding. */
export function cellText(v: number | boolean | string | null): string {
  return v === null ? "" : String(v);
}

/** One cell for the per-target opportunity map, e.g. "3:1 7:0".
 * Values pass through cellText; only the layout is ours. */
export function opportunityText(map: Record<string, number>): string {
  return Object.keys(map)
    .map((k) => `${k}:${cellText(map[k] as number)}`)
    .join(" ");
}

function sortScalar(p: Preview, key: SortKey): number {
  switch (key) {
    case "neighbor":
      return p.neighbor;
    case "edge_weight":
      return p.edge_weight;
    case "reachable_candidates":
      return p.reachable_candidates;
    case "delta_reachable":
      return p.delta_reachable;
    case "branching_factor":
      // null means the service could not score the vertex; sort it last
      return p.branching_factor === null ? Number.POSITIVE_INFINITY : p.branching_factor;
    case "opportunity": {
      // ordering key only, never displayed: total of the per-target map
      let total = 0;
      for (const v of Object.values(p.opportunity_to_each_target)) total += v;
      return total;
    }
  }
}

/** Stable copy-sort of the previews by one column. */
export function sortPreviews(previews: Preview[], order: SortOrder): Preview[] {
  const sign = order.descending ? -1 : 1;
  return previews
    .map((p, i) => ({ p, i }))
    .sort((a, b) => {
      const ka = sortScalar(a.p, order.key);
      const kb = sortScalar(b.p, order.key);
      if (ka !== kb) {
        // nulls (mapped to +inf) stay last regardless of direction
        if (ka === Number.POSITIVE_INFINITY) return 1;
        if (kb === Number.POSITIVE_INFINITY) return -1;
        return ka < kb ? -sign : sign;
      }
      return a.i - b.i;
    })
    .map((x) => x.p);
}

export function toggleSort(order: SortOrder, key: SortKey): SortOrder {
  if (order.key === key) return { key, descending: !order.descending };
  return { key, descending: false };
}

/** Projection coordinates of the walked vertices, in walk order. */
export function trailPoints(
  summary: GraphSummary,
  doc: SessionDoc,
): Array<[number, number]> {
  const byId = new Map(summary.vertices.map((v) => [v.id, v]));
  return doc.history.map((h) => {
    const v = byId.get(h.vertex);
    if (v === undefined) throw new Error(`history vertex ${h.vertex} not in summary`);
    return [v.x, v.y];
  });
}
