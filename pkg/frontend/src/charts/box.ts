// Tukey box-and-whisker renderer for the per-driver distributions.
//
// The y axis is always "percent of the driver's own filtered miles", so this
// chart is unaffected by the miles/percent toggle. Boxes carry their
// five-number summary as data attributes; outlier dots carry the driver id.

import { Viewport } from "../state";
import { BoxGroup, BoxStats } from "../types";

const WIDTH = 520;
const HEIGHT = 220;
const MARGIN = { top: 10, right: 12, bottom: 28, left: 52 };
const SVG_NS = "http://www.w3.org/2000/svg";

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

function statExtent(stats: BoxStats[]): number {
    let top = 0;
    for (const s of stats) {
        top = Math.max(top, s.max_whisker, ...s.outliers.map(o => o.percent));
    }
    return Math.max(top, 1e-9);
}

function inViewport(stats: BoxStats[], viewport: Viewport): BoxStats[] {
    if (viewport.x0 === null || viewport.x1 === null) {
        return stats;
    }
    const [lo, hi] = [viewport.x0, viewport.x1];
    return stats.filter(s => s.bin_index >= lo && s.bin_index < hi);
}

function renderPanel(group: BoxGroup, viewport: Viewport, yMax: number): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "facet-panel";
    panel.dataset.facet = group.facet_value;

    const title = document.createElement("h3");
    title.textContent = group.facet_value;
    panel.appendChild(title);

    const stats = inViewport(group.stats, viewport);
    const svg = svgElement("svg", {
        viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
        width: String(WIDTH),
        height: String(HEIGHT),
        class: "box-chart",
    });
    svg.dataset.facet = group.facet_value;

    const plotW = WIDTH - MARGIN.left - MARGIN.right;
    const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
    const bins = stats.map(s => s.bin_index);
    const binLo = bins.length > 0 ? Math.min(...bins) : 0;
    const nBins = bins.length > 0 ? Math.max(...bins) - binLo + 1 : 1;
    const slot = plotW / nBins;
    const xMid = (bin: number) => MARGIN.left + (bin - binLo + 0.5) * slot;
    const y = (value: number) => MARGIN.top + plotH - (value / yMax) * plotH;
    const boxW = Math.min(24, slot * 0.6);

    svg.appendChild(svgElement("line", {
        x1: String(MARGIN.left), y1: String(MARGIN.top + plotH),
        x2: String(MARGIN.left + plotW), y2: String(MARGIN.top + plotH),
        class: "axis",
    }));
    const yLabel = svgElement("text", {
        x: String(MARGIN.left - 6), y: String(MARGIN.top + 4),
        "text-anchor": "end", class: "tick",
    });
    yLabel.textContent = `${yMax.toPrecision(3)}%`;
    svg.appendChild(yLabel);

    for (const stat of stats) {
        const cx = xMid(stat.bin_index);
        const g = svgElement("g", { class: "box-group" });
        g.dataset.binIndex = String(stat.bin_index);
        g.dataset.binLabel = stat.label;
        g.dataset.nDrivers = String(stat.n_drivers);
        g.dataset.q1 = String(stat.q1);
        g.dataset.median = String(stat.median);
        g.dataset.q3 = String(stat.q3);
        g.dataset.minWhisker = String(stat.min_whisker);
        g.dataset.maxWhisker = String(stat.max_whisker);

        g.appendChild(svgElement("line", {
            x1: String(cx), y1: String(y(stat.min_whisker)),
            x2: String(cx), y2: String(y(stat.max_whisker)),
            class: "whisker",
        }));
        g.appendChild(svgElement("rect", {
            x: String(cx - boxW / 2), y: String(y(stat.q3)),
            width: String(boxW),
            height: String(Math.max(0, y(stat.q1) - y(stat.q3))),
            class: "iqr-box",
        }));
        g.appendChild(svgElement("line", {
            x1: String(cx - boxW / 2), y1: String(y(stat.median)),
            x2: String(cx + boxW / 2), y2: String(y(stat.median)),
            class: "median",
        }));
        for (const outlier of stat.outliers) {
            const dot = svgElement("circle", {
                cx: String(cx), cy: String(y(outlier.percent)), r: "2.5",
                class: "outlier",
            });
            dot.dataset.driverId = outlier.driver_id;
            dot.dataset.percent = String(outlier.percent);
            const tip = svgElement("title", {});
            tip.textContent = `${outlier.driver_id}: ${outlier.percent.toFixed(2)}%`;
            dot.appendChild(tip);
            g.appendChild(dot);
        }

        const tip = svgElement("title", {});
        tip.textContent =
            `${stat.label} (${stat.n_drivers} drivers)\n` +
            `whiskers [${stat.min_whisker.toFixed(2)}, ${stat.max_whisker.toFixed(2)}], ` +
            `Q1 ${stat.q1.toFixed(2)}, median ${stat.median.toFixed(2)}, Q3 ${stat.q3.toFixed(2)}`;
        g.appendChild(tip);
        svg.appendChild(g);
    }

    panel.appendChild(svg);
    return panel;
}

/** Render the box groups into `container`, replacing its contents. */
export function renderBoxChart(
    container: HTMLElement,
    groups: BoxGroup[],
    viewport: Viewport = { x0: null, x1: null },
): void {
    container.textContent = "";
    const allStats = groups.flatMap(g => inViewport(g.stats, viewport));
    if (allStats.length === 0) {
        const placeholder = document.createElement("div");
        placeholder.className = "placeholder";
        placeholder.textContent = "No data for the current selection.";
        container.appendChild(placeholder);
        return;
    }
    const yMax = statExtent(allStats);
    for (const group of groups) {
        container.appendChild(renderPanel(group, viewport, yMax));
    }
}
