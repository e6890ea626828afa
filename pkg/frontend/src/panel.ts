/** Shared panel scaffolding: frames, ticks, grid lines, legends. */

import { formatTick, linearScale, niceTicks, type Scale } from "./scale.js";
import { line, rect, text, type Scene } from "./scene.js";

export const PANEL_WIDTH = 320;
export const PANEL_HEIGHT = 300;
export const MARGIN = { left: 62, right: 14, top: 30, bottom: 44 };

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export const AXIS_COLOR = "#000000";
export const GRID_COLOR = "#d9d9d9";
export const TEXT_COLOR = "#000000";

export function colorFor(names: string[], name: string): string {
    return PALETTE[Math.max(0, names.indexOf(name)) % PALETTE.length];
}

export interface PlotArea {
    x0: number;
    y0: number;
    x1: number;
    y1: number;
}

export function panelArea(panelIndex: number): PlotArea {
    const left = panelIndex * PANEL_WIDTH + MARGIN.left;
    return {
        x0: left,
        y0: MARGIN.top,
        x1: panelIndex * PANEL_WIDTH + PANEL_WIDTH - MARGIN.right,
        y1: PANEL_HEIGHT - MARGIN.bottom,
    };
}

export function xScaleFor(area: PlotArea, domain: [number, number]): Scale {
    return linearScale(domain, [area.x0, area.x1]);
}

export function yScaleFor(area: PlotArea, domain: [number, number]): Scale {
    return linearScale(domain, [area.y1, area.y0]); // pixel y grows down
}

export function drawTitle(scene: Scene, area: PlotArea, title: string): void {
    text(scene, (area.x0 + area.x1) / 2, area.y0 - 10, title, 12, TEXT_COLOR, "middle");
}

export function drawFrame(scene: Scene, area: PlotArea): void {
    rect(scene, area.x0, area.y0, area.x1 - area.x0, area.y1 - area.y0, null, AXIS_COLOR, 1);
}

export function drawYAxis(
    scene: Scene,
    area: PlotArea,
    scale: Scale,
    label: string,
    ticks?: number[],
    tickLabels?: string[],
): void {
    const values = ticks ?? niceTicks(scale.domain[0], scale.domain[1]);
    values.forEach((v, i) => {
        const y = scale(v);
        if (y < area.y0 - 0.5 || y > area.y1 + 0.5) return;
        line(scene, area.x0, y, area.x1, y, GRID_COLOR, 1);
        line(scene, area.x0 - 4, y, area.x0, y, AXIS_COLOR, 1);
        text(scene, area.x0 - 7, y + 3.5, tickLabels ? tickLabels[i] : formatTick(v), 9, TEXT_COLOR, "end");
    });
    text(scene, area.x0 - 48, (area.y0 + area.y1) / 2, label, 10, TEXT_COLOR, "middle");
}

export function drawXAxisNumeric(
    scene: Scene,
    area: PlotArea,
    scale: Scale,
    label: string,
    ticks?: number[],
    tickLabels?: string[],
): void {
    const values = ticks ?? niceTicks(scale.domain[0], scale.domain[1]);
    values.forEach((v, i) => {
        const x = scale(v);
        if (x < area.x0 - 0.5 || x > area.x1 + 0.5) return;
        line(scene, x, area.y1, x, area.y1 + 4, AXIS_COLOR, 1);
        text(scene, x, area.y1 + 15, tickLabels ? tickLabels[i] : formatTick(v), 9, TEXT_COLOR, "middle");
    });
    text(scene, (area.x0 + area.x1) / 2, area.y1 + 32, label, 10, TEXT_COLOR, "middle");
}

export function drawXGroups(scene: Scene, area: PlotArea, names: string[], label: string): void {
    names.forEach((name, i) => {
        const x = area.x0 + ((i + 0.5) / names.length) * (area.x1 - area.x0);
        line(scene, x, area.y1, x, area.y1 + 4, AXIS_COLOR, 1);
        text(scene, x, area.y1 + 15, name, 10, TEXT_COLOR, "middle");
    });
    if (label) {
        text(scene, (area.x0 + area.x1) / 2, area.y1 + 32, label, 10, TEXT_COLOR, "middle");
    }
}

export function drawLegend(scene: Scene, area: PlotArea, names: string[]): void {
    names.forEach((name, i) => {
        const y = area.y0 + 8 + i * 14;
        const x = area.x1 - 66;
        rect(scene, x, y - 5, 9, 9, colorFor(names, name));
        text(scene, x + 13, y + 3, name, 9, TEXT_COLOR, "start");
    });
}
