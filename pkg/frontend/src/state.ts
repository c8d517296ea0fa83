// View state and its URL encoding.
//
// The whole view (metric, filters, facet, y-mode, zoomed bin range) round
// trips through the query string, so a copied URL reproduces the exact view.

import { Mode, QueryRequest } from "./types";

export interface Viewport {
    // Visible bin-index range of the step chart; null = fit to data.
    x0: number | null;
    x1: number | null;
}

export interface UiState {
    metric: string;
    filters: Record<string, string[]>;
    facet: string | null;
    mode: Mode;
    viewport: Viewport;
}

const FILTER_PREFIX = "f.";
const VALUE_SEPARATOR = "|";

export function defaultState(metric = ""): UiState {
    return {
        metric,
        filters: {},
        facet: null,
        mode: "percent",
        viewport: { x0: null, x1: null },
    };
}

/** Serialize a state to a query string (no leading "?"), deterministically. */
export function encodeState(state: UiState): string {
    const params = new URLSearchParams();
    params.set("metric", state.metric);
    params.set("mode", state.mode);
    if (state.facet !== null) {
        params.set("facet", state.facet);
    }
    for (const dimension of Object.keys(state.filters).sort()) {
        const values = state.filters[dimension];
        if (values.length > 0) {
            params.set(FILTER_PREFIX + dimension, values.join(VALUE_SEPARATOR));
        }
    }
    if (state.viewport.x0 !== null && state.viewport.x1 !== null) {
        params.set("x0", String(state.viewport.x0));
        params.set("x1", String(state.viewport.x1));
    }
    return params.toString();
}

/** Parse a query string (with or without leading "?") back into a state. */
export function decodeState(query: string): UiState {
    const params = new URLSearchParams(query);
    const state = defaultState(params.get("metric") ?? "");
    if (params.get("mode") === "miles") {
        state.mode = "miles";
    }
    state.facet = params.get("facet");
    for (const [key, value] of params.entries()) {
        if (key.startsWith(FILTER_PREFIX) && value !== "") {
            state.filters[key.slice(FILTER_PREFIX.length)] = value.split(VALUE_SEPARATOR);
        }
    }
    const x0 = params.get("x0");
    const x1 = params.get("x1");
    if (x0 !== null && x1 !== null && isFinite(Number(x0)) && isFinite(Number(x1))) {
        state.viewport = { x0: Number(x0), x1: Number(x1) };
    }
    return state;
}

/** The API request a state corresponds to (viewport is client-side only). */
export function toRequest(state: UiState): QueryRequest {
    const filters: Record<string, string[]> = {};
    for (const dimension of Object.keys(state.filters).sort()) {
        if (state.filters[dimension].length > 0) {
            filters[dimension] = [...state.filters[dimension]];
        }
    }
    return { metric: state.metric, filters, facet: state.facet, mode: state.mode };
}
