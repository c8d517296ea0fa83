import { describe, expect, it } from "vitest";

import { renderBoxChart } from "../src/charts/box";
import { renderStepChart } from "../src/charts/step";
import { SPEEDING_RESPONSE } from "./helpers";

function container(): HTMLElement {
    const el = document.createElement("div");
    document.body.appendChild(el);
    return el;
}

function hitRects(panel: Element): HTMLElement[] {
    return [...panel.querySelectorAll<HTMLElement>(".bin-hit")];
}

describe("step chart", () => {
    it("renders one panel per facet with the API's per-bin percentages", () => {
        const el = container();
        renderStepChart(el, SPEEDING_RESPONSE.step, "percent");

        const panels = [...el.querySelectorAll(".facet-panel")];
        expect(panels.map(p => (p as HTMLElement).dataset.facet)).toEqual(
            SPEEDING_RESPONSE.step.map(s => s.facet_value),
        );
        for (const [i, series] of SPEEDING_RESPONSE.step.entries()) {
            const rects = hitRects(panels[i]);
            expect(rects).toHaveLength(series.points.length);
            for (const [j, point] of series.points.entries()) {
                expect(rects[j].dataset.binLabel).toBe(point.label);
                // DOM value vs API value, within 0.01 percentage points.
                expect(
                    Math.abs(parseFloat(rects[j].dataset.percent!) - point.percent),
                ).toBeLessThanOrEqual(0.01);
                expect(parseFloat(rects[j].dataset.value!)).toBeCloseTo(point.percent, 9);
            }
        }
    });

    it("changes only the y encoding between percent and miles", () => {
        const percentEl = container();
        const milesEl = container();
        renderStepChart(percentEl, SPEEDING_RESPONSE.step, "percent");
        renderStepChart(milesEl, SPEEDING_RESPONSE.step, "miles");

        const percentPanels = [...percentEl.querySelectorAll(".facet-panel")];
        const milesPanels = [...milesEl.querySelectorAll(".facet-panel")];
        expect(milesPanels).toHaveLength(percentPanels.length);

        for (let i = 0; i < percentPanels.length; i++) {
            const p = hitRects(percentPanels[i]);
            const m = hitRects(milesPanels[i]);
            expect(m).toHaveLength(p.length);
            for (let j = 0; j < p.length; j++) {
                // Identical x layout and bin identity ...
                expect(m[j].getAttribute("x")).toBe(p[j].getAttribute("x"));
                expect(m[j].getAttribute("width")).toBe(p[j].getAttribute("width"));
                expect(m[j].dataset.binLabel).toBe(p[j].dataset.binLabel);
                expect(m[j].dataset.miles).toBe(p[j].dataset.miles);
                expect(m[j].dataset.percent).toBe(p[j].dataset.percent);
                // ... but the encoded value switches to miles.
                expect(m[j].dataset.value).toBe(m[j].dataset.miles);
                expect(p[j].dataset.value).toBe(p[j].dataset.percent);
            }
            expect(percentPanels[i].querySelector("svg")!.dataset.encoding).toBe("percent");
            expect(milesPanels[i].querySelector("svg")!.dataset.encoding).toBe("miles");
        }
    });

    it("restricts bins to the viewport", () => {
        const el = container();
        renderStepChart(el, SPEEDING_RESPONSE.step, "percent", { x0: 0, x1: 3 });
        const bins = hitRects(el.querySelector(".facet-panel")!).map(r => r.dataset.binIndex);
        expect(bins).toEqual(["0", "1", "2"]);
    });

    it("shows a placeholder when there is nothing to draw", () => {
        const el = container();
        const domain = renderStepChart(el, [], "percent");
        expect(el.querySelector(".placeholder")).not.toBeNull();
        expect(domain).toEqual({ binLo: 0, binHi: 0 });
    });
});

describe("box chart", () => {
    it("carries the five-number summary and outliers in the DOM", () => {
        const el = container();
        renderBoxChart(el, SPEEDING_RESPONSE.box);

        const panels = [...el.querySelectorAll(".facet-panel")];
        expect(panels.map(p => (p as HTMLElement).dataset.facet)).toEqual(
            SPEEDING_RESPONSE.box.map(g => g.facet_value),
        );
        for (const [i, group] of SPEEDING_RESPONSE.box.entries()) {
            const boxes = [...panels[i].querySelectorAll<HTMLElement>(".box-group")];
            expect(boxes).toHaveLength(group.stats.length);
            for (const [j, stat] of group.stats.entries()) {
                expect(parseFloat(boxes[j].dataset.q1!)).toBeCloseTo(stat.q1, 9);
                expect(parseFloat(boxes[j].dataset.median!)).toBeCloseTo(stat.median, 9);
                expect(parseFloat(boxes[j].dataset.q3!)).toBeCloseTo(stat.q3, 9);
                expect(boxes[j].dataset.nDrivers).toBe(String(stat.n_drivers));
                const dots = [...boxes[j].querySelectorAll<HTMLElement>(".outlier")];
                expect(dots.map(d => d.dataset.driverId)).toEqual(
                    stat.outliers.map(o => o.driver_id),
                );
            }
        }
    });

    it("shows a placeholder for an empty view", () => {
        const el = container();
        renderBoxChart(el, []);
        expect(el.querySelector(".placeholder")).not.toBeNull();
    });
});
