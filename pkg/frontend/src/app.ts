// Application shell: controls, URL sync, fetching, and chart rendering.

import { ApiClient, ApiError } from "./api";
import { renderBoxChart } from "./charts/box";
import { renderStepChart } from "./charts/step";
import { decodeState, encodeState, toRequest, UiState } from "./state";
import { Dimensions, MetricInfo, Mode, QueryResponse } from "./types";

const MODES: Mode[] = ["percent", "miles"];
const NO_FACET = "(none)";

function element<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className = "",
    parent?: HTMLElement,
): HTMLElementTagNameMap[K] {
    const el = document.createElement(tag);
    if (className !== "") {
        el.className = className;
    }
    parent?.appendChild(el);
    return el;
}

export class App {
    state: UiState;

    private readonly metricSelect: HTMLSelectElement;
    private readonly modeSelect: HTMLSelectElement;
    private readonly facetSelect: HTMLSelectElement;
    private readonly filtersEl: HTMLElement;
    private readonly downloadButton: HTMLButtonElement;
    private readonly statusEl: HTMLElement;
    private readonly stepEl: HTMLElement;
    private readonly boxEl: HTMLElement;

    private dimensions: Dimensions = {};
    private response: QueryResponse | null = null;
    // Full bin extent of the loaded response, for clamping pan/zoom.
    private fullExtent: [number, number] | null = null;
    private dragStart: { clientX: number; x0: number; x1: number } | null = null;

    constructor(
        root: HTMLElement,
        private readonly api: ApiClient,
        private readonly win: Window = window,
    ) {
        this.state = decodeState(this.win.location.search);

        const controls = element("div", "controls", root);
        this.metricSelect = this.labeledSelect(controls, "Metric", "metric");
        this.modeSelect = this.labeledSelect(controls, "Y axis", "mode");
        for (const mode of MODES) {
            this.modeSelect.add(new Option(mode === "percent" ? "% of miles" : "miles", mode));
        }
        this.facetSelect = this.labeledSelect(controls, "Facet by", "facet");
        this.downloadButton = element("button", "download", controls);
        this.downloadButton.id = "download";
        this.downloadButton.textContent = "Download CSV";
        this.statusEl = element("span", "status", controls);
        this.statusEl.id = "status";

        this.filtersEl = element("div", "filters", root);
        this.filtersEl.id = "filters";

        element("h2", "", root).textContent = "Miles per bin";
        this.stepEl = element("div", "chart", root);
        this.stepEl.id = "step";
        element("h2", "", root).textContent = "Per-driver distribution (% of own miles)";
        this.boxEl = element("div", "chart", root);
        this.boxEl.id = "box";

        this.bindEvents();
    }

    /** Load metrics/dimensions and render the view encoded in the URL. */
    async init(): Promise<void> {
        let metrics: MetricInfo[];
        try {
            metrics = await this.api.metrics();
        } catch (err) {
            this.showError(err);
            return;
        }
        this.metricSelect.length = 0;
        for (const info of metrics) {
            this.metricSelect.add(new Option(info.metric, info.metric));
        }
        if (!metrics.some(info => info.metric === this.state.metric)) {
            this.state.metric = metrics.length > 0 ? metrics[0].metric : "";
        }
        await this.loadDimensions();
        await this.refresh();
    }

    /** The request currently shown; what download/export will use. */
    currentRequest() {
        return toRequest(this.state);
    }

    async refresh(): Promise<void> {
        this.syncUrl();
        let response: QueryResponse | null;
        try {
            response = await this.api.query(toRequest(this.state));
        } catch (err) {
            this.showError(err);
            return;
        }
        if (response === null) {
            return; // superseded by a newer query
        }
        this.response = response;
        const bins = response.step.flatMap(s => s.points.map(p => p.bin_index));
        this.fullExtent = bins.length > 0 ? [Math.min(...bins), Math.max(...bins) + 1] : null;
        this.statusEl.textContent =
            `${response.total_miles.toFixed(1)} miles · ${response.n_drivers} drivers`;
        this.render();
    }

    /** Fetch the current selection as CSV and trigger a browser download. */
    async downloadCurrent(): Promise<{ filename: string; csv: string }> {
        const csv = await this.api.exportCsv(toRequest(this.state));
        const stamp = new Date().toISOString().replace(/[-:]/g, "").replace(/\..*/, "");
        const filename = `${this.state.metric}_${stamp}.csv`;
        const url = URL.createObjectURL(new Blob([csv], { type: "text/csv" }));
        const anchor = document.createElement("a");
        anchor.href = url;
        anchor.download = filename;
        anchor.click();
        URL.revokeObjectURL(url);
        return { filename, csv };
    }

    /** Scale the visible bin range by `factor` around `center` (0..1). */
    zoomViewport(factor: number, center = 0.5): void {
        const current = this.viewportOrExtent();
        if (current === null) {
            return;
        }
        const [x0, x1] = current;
        const span = Math.max(1, Math.round((x1 - x0) * factor));
        const pivot = x0 + (x1 - x0) * center;
        let lo = Math.round(pivot - span * center);
        let hi = lo + span;
        [lo, hi] = this.clampToExtent(lo, hi);
        this.state.viewport = this.coversExtent(lo, hi) ? { x0: null, x1: null } : { x0: lo, x1: hi };
        this.syncUrl();
        this.render();
    }

    /** Shift the visible bin range by a whole number of bins. */
    panViewport(deltaBins: number): void {
        const current = this.viewportOrExtent();
        if (current === null || this.state.viewport.x0 === null) {
            return; // nothing to pan when fit to data
        }
        const [x0, x1] = current;
        const [lo, hi] = this.clampToExtent(x0 + deltaBins, x1 + deltaBins);
        this.state.viewport = { x0: lo, x1: hi };
        this.syncUrl();
        this.render();
    }

    resetViewport(): void {
        this.state.viewport = { x0: null, x1: null };
        this.syncUrl();
        this.render();
    }

    private render(): void {
        if (this.response === null) {
            return;
        }
        renderStepChart(this.stepEl, this.response.step, this.state.mode, this.state.viewport);
        renderBoxChart(this.boxEl, this.response.box, this.state.viewport);
    }

    private async loadDimensions(): Promise<void> {
        if (this.state.metric === "") {
            return;
        }
        this.dimensions = await this.api.dimensions(this.state.metric);
        this.rebuildFilterControls();
        this.applyStateToControls();
    }

    private rebuildFilterControls(): void {
        this.filtersEl.textContent = "";
        this.facetSelect.length = 0;
        this.facetSelect.add(new Option(NO_FACET, ""));
        for (const [dimension, values] of Object.entries(this.dimensions)) {
            this.facetSelect.add(new Option(dimension, dimension));

            const label = element("label", "filter", this.filtersEl);
            element("span", "", label).textContent = dimension;
            const select = element("select", "", label);
            select.multiple = true;
            select.size = Math.min(4, values.length);
            select.dataset.dimension = dimension;
            for (const value of values) {
                select.add(new Option(value, value));
            }
            select.addEventListener("change", () => {
                void this.onFilterChange(dimension, select);
            });
        }
    }

    private applyStateToControls(): void {
        this.metricSelect.value = this.state.metric;
        this.modeSelect.value = this.state.mode;
        this.facetSelect.value = this.state.facet ?? "";
        for (const select of this.filtersEl.querySelectorAll<HTMLSelectElement>("select")) {
            const chosen = this.state.filters[select.dataset.dimension ?? ""] ?? [];
            for (const option of select.options) {
                option.selected = chosen.includes(option.value);
            }
        }
    }

    private bindEvents(): void {
        this.metricSelect.addEventListener("change", () => {
            this.state.metric = this.metricSelect.value;
            this.state.filters = {}; // observed values differ per metric
            this.state.facet = null;
            this.state.viewport = { x0: null, x1: null };
            void this.loadDimensions().then(() => this.refresh());
        });
        // Every step point carries both miles and percent, so the toggle is a
        // pure re-encode of the y axis — no new request.
        this.modeSelect.addEventListener("change", () => {
            this.state.mode = this.modeSelect.value as Mode;
            this.syncUrl();
            this.render();
        });
        this.facetSelect.addEventListener("change", () => {
            this.state.facet = this.facetSelect.value === "" ? null : this.facetSelect.value;
            void this.refresh();
        });
        this.downloadButton.addEventListener("click", () => {
            void this.downloadCurrent().catch(err => this.showError(err));
        });

        this.stepEl.addEventListener("wheel", event => {
            event.preventDefault();
            this.zoomViewport(event.deltaY > 0 ? 1.25 : 0.8, this.pointerFraction(event));
        });
        this.stepEl.addEventListener("pointerdown", event => {
            const viewport = this.viewportOrExtent();
            if (viewport !== null && this.state.viewport.x0 !== null) {
                this.dragStart = { clientX: event.clientX, x0: viewport[0], x1: viewport[1] };
            }
        });
        this.stepEl.addEventListener("pointermove", event => {
            if (this.dragStart === null) {
                return;
            }
            const width = this.stepEl.getBoundingClientRect().width || 1;
            const span = this.dragStart.x1 - this.dragStart.x0;
            const delta = Math.round(((this.dragStart.clientX - event.clientX) / width) * span);
            const [lo, hi] = this.clampToExtent(this.dragStart.x0 + delta, this.dragStart.x1 + delta);
            this.state.viewport = { x0: lo, x1: hi };
            this.render();
        });
        for (const type of ["pointerup", "pointerleave"]) {
            this.stepEl.addEventListener(type, () => {
                if (this.dragStart !== null) {
                    this.dragStart = null;
                    this.syncUrl();
                }
            });
        }
        this.stepEl.addEventListener("dblclick", () => this.resetViewport());

        this.win.addEventListener("popstate", () => {
            this.state = decodeState(this.win.location.search);
            this.applyStateToControls();
            void this.refresh();
        });
    }

    private async onFilterChange(dimension: string, select: HTMLSelectElement): Promise<void> {
        const chosen = [...select.selectedOptions].map(option => option.value);
        // No selection means "all": drop the constraint entirely.
        if (chosen.length === 0) {
            delete this.state.filters[dimension];
        } else {
            this.state.filters[dimension] = chosen;
        }
        await this.refresh();
    }

    private syncUrl(): void {
        this.win.history.replaceState(null, "", "?" + encodeState(this.state));
    }

    private viewportOrExtent(): [number, number] | null {
        if (this.state.viewport.x0 !== null && this.state.viewport.x1 !== null) {
            return [this.state.viewport.x0, this.state.viewport.x1];
        }
        return this.fullExtent;
    }

    private clampToExtent(lo: number, hi: number): [number, number] {
        if (this.fullExtent === null) {
            return [lo, hi];
        }
        const [min, max] = this.fullExtent;
        const span = Math.min(hi - lo, max - min);
        lo = Math.max(min, Math.min(lo, max - span));
        return [lo, lo + span];
    }

    private coversExtent(lo: number, hi: number): boolean {
        return this.fullExtent !== null && lo <= this.fullExtent[0] && hi >= this.fullExtent[1];
    }

    private pointerFraction(event: MouseEvent): number {
        const rect = this.stepEl.getBoundingClientRect();
        return rect.width > 0 ? (event.clientX - rect.left) / rect.width : 0.5;
    }

    private labeledSelect(parent: HTMLElement, text: string, id: string): HTMLSelectElement {
        const label = element("label", "", parent);
        element("span", "", label).textContent = text;
        const select = element("select", "", label);
        select.id = id;
        return select;
    }

    private showError(err: unknown): void {
        this.statusEl.textContent =
            err instanceof ApiError ? err.message : `error: ${String(err)}`;
    }
}
