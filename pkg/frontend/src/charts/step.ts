// Step-plot renderer: one SVG panel per facet, shared x/y scales.
//
// Every bin gets an invisible hit rectangle carrying the point's numbers as
// data attributes; hover shows them via a <title> tooltip. The y encoding is
// the only thing that changes between miles and percent mode — panel layout,
// bin rectangles, and x positions are identical.

import { Viewport } from "../state";
import { Mode, StepPoint, StepSeries } from "../types";

const WIDTH = 520;
const HEIGHT = 220;
const MARGIN = { top: 10, right: 12, bottom: 28, left: 52 };
const SVG_NS = "http://www.w3.org/2000/svg";

export interface StepDomain {
    binLo: number; // first visible bin index
    binHi: number; // one past the last visible bin index
}

function svgElement<K extends keyof SVGElementTagNameMap>(
    tag: K,
    attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
    const el = document.createElementNS(SVG_NS, tag);
    for (const [name, value] of Object.entries(attrs)) {
        el.setAttribute(name, value);
    }
    return el;
}

function pointValue(point: StepPoint, mode: Mode): number {
    return mode === "percent" ? point.percent : point.miles;
}

function visiblePoints(series: StepSeries[], viewport: Viewport): StepPoint[] {
    const points = series.flatMap(s => s.points);
    if (viewport.x0 === null || viewport.x1 === null) {
        return points;
    }
    const [lo, hi] = [viewport.x0, viewport.x1];
    return points.filter(p => p.bin_index >= lo && p.bin_index < hi);
}

function formatTick(value: number): string {
    return value >= 100 ? value.toFixed(0) : value.toPrecision(3);
}

function renderPanel(
    series: StepSeries,
    mode: Mode,
    domain: StepDomain,
    yMax: number,
): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "facet-panel";
    panel.dataset.facet = series.facet_value;

    const title = document.createElement("h3");
    title.textContent = series.facet_value;
    panel.appendChild(title);

    const svg = svgElement("svg", {
        viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
        width: String(WIDTH),
        height: String(HEIGHT),
        class: "step-chart",
    });
    svg.dataset.encoding = mode;
    svg.dataset.facet = series.facet_value;

    const plotW = WIDTH - MARGIN.left - MARGIN.right;
    const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
    const nBins = Math.max(1, domain.binHi - domain.binLo);
    const x = (bin: number) => MARGIN.left + ((bin - domain.binLo) / nBins) * plotW;
    const y = (value: number) => MARGIN.top + plotH - (value / yMax) * plotH;

    // Axes: baseline, left line, y-max tick, and bin labels at both ends.
    svg.appendChild(svgElement("line", {
        x1: String(MARGIN.left), y1: String(MARGIN.top + plotH),
        x2: String(MARGIN.left + plotW), y2: String(MARGIN.top + plotH),
        class: "axis",
    }));
    svg.appendChild(svgElement("line", {
        x1: String(MARGIN.left), y1: String(MARGIN.top),
        x2: String(MARGIN.left), y2: String(MARGIN.top + plotH),
        class: "axis",
    }));
    const yLabel = svgElement("text", {
        x: String(MARGIN.left - 6), y: String(MARGIN.top + 4),
        "text-anchor": "end", class: "tick",
    });
    yLabel.textContent = formatTick(yMax) + (mode === "percent" ? "%" : " mi");
    svg.appendChild(yLabel);

    const inView = series.points.filter(
        p => p.bin_index >= domain.binLo && p.bin_index < domain.binHi,
    );

    let path = "";
    for (const point of inView) {
        const value = pointValue(point, mode);
        const x0 = x(point.bin_index);
        const x1 = x(point.bin_index + 1);
        const yv = y(value);
        path += path === "" ? `M ${x0} ${yv}` : ` L ${x0} ${yv}`;
        path += ` L ${x1} ${yv}`;

        const hit = svgElement("rect", {
            x: String(x0), y: String(MARGIN.top),
            width: String(x1 - x0), height: String(plotH),
            class: "bin-hit",
        });
        hit.dataset.binIndex = String(point.bin_index);
        hit.dataset.binLabel = point.label;
        hit.dataset.miles = String(point.miles);
        hit.dataset.percent = String(point.percent);
        hit.dataset.value = String(value);
        const tip = svgElement("title", {});
        tip.textContent =
            `${point.label}: ${point.percent.toFixed(2)}% / ${point.miles.toFixed(1)} mi`;
        hit.appendChild(tip);
        svg.appendChild(hit);
    }
    if (path !== "") {
        svg.insertBefore(svgElement("path", { d: path, class: "step-line" }), svg.firstChild);
    }

    if (inView.length > 0) {
        const first = inView[0];
        const last = inView[inView.length - 1];
        for (const [point, anchor] of [[first, "start"], [last, "end"]] as const) {
            const label = svgElement("text", {
                x: String(anchor === "start" ? x(point.bin_index) : x(point.bin_index + 1)),
                y: String(MARGIN.top + plotH + 16),
                "text-anchor": anchor, class: "tick",
            });
            label.textContent = point.label;
            svg.appendChild(label);
        }
    }

    panel.appendChild(svg);
    return panel;
}

/**
 * Render the step series into `container`, replacing its contents.
 * Returns the bin domain that was drawn (for pan/zoom bookkeeping).
 */
export function renderStepChart(
    container: HTMLElement,
    series: StepSeries[],
    mode: Mode,
    viewport: Viewport = { x0: null, x1: null },
): StepDomain {
    container.textContent = "";
    const visible = visiblePoints(series, viewport);
    if (visible.length === 0) {
        const placeholder = document.createElement("div");
        placeholder.className = "placeholder";
        placeholder.textContent = "No data for the current selection.";
        container.appendChild(placeholder);
        return { binLo: 0, binHi: 0 };
    }

    const bins = visible.map(p => p.bin_index);
    const domain: StepDomain =
        viewport.x0 !== null && viewport.x1 !== null
            ? { binLo: viewport.x0, binHi: viewport.x1 }
            : { binLo: Math.min(...bins), binHi: Math.max(...bins) + 1 };
    const yMax = Math.max(1e-9, ...visible.map(p => pointValue(p, mode)));

    for (const s of series) {
        container.appendChild(renderPanel(s, mode, domain, yMax));
    }
    return domain;
}
