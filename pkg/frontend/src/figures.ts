/** The four figure kinds built on the scene/panel primitives.
 *
 * boxplot: per-estimator distribution of a metric across networks
 * sweep:   metric vs swept factor value, median line per estimator
 * paired:  per network, best non-PS baseline vs PS, ranked by baseline;
 *          red line when PS is smaller, blue when it is not
 * scaling: log10 replicate variance vs log10 tree size with fitted
 *          slopes per estimator
 */

import {
    AXIS_COLOR,
    colorFor,
    drawFrame,
    drawLegend,
    drawTitle,
    drawXAxisNumeric,
    drawXGroups,
    drawYAxis,
    PANEL_HEIGHT,
    PANEL_WIDTH,
    panelArea,
    xScaleFor,
    yScaleFor,
} from "./panel.js";
import { estimatorNames, METRICS, metricValue, type Metric, type ReportRow } from "./report.js";
import { extent, formatTick, padded } from "./scale.js";
import { circle, line, newScene, polyline, rect, text, type Scene } from "./scene.js";
import { boxStats, linearFit, median } from "./stats.js";

export const FIGURE_KINDS = ["boxplot", "sweep", "paired", "scaling"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];
export type MetricChoice = Metric | "all";

export class FigureError extends Error {}

const METRIC_TITLES: Record<Metric, string> = {
    abs_bias: "abs bias",
    sd: "sd",
    rmse: "rmse",
};

function chosenMetrics(metric: MetricChoice): Metric[] {
    return metric === "all" ? [...METRICS] : [metric];
}

function multiPanelScene(panels: number): Scene {
    return newScene(panels * PANEL_WIDTH, PANEL_HEIGHT);
}

export function buildFigure(kind: FigureKind, metric: MetricChoice, rows: ReportRow[]): Scene {
    switch (kind) {
        case "boxplot":
            return boxplotFigure(rows, metric);
        case "sweep":
            return sweepFigure(rows, metric);
        case "paired":
            return pairedFigure(rows, metric);
        case "scaling":
            return scalingFigure(rows);
    }
}

// -- boxplot ----------------------------------------------------------------

function boxplotFigure(rows: ReportRow[], metric: MetricChoice): Scene {
    const names = estimatorNames(rows);
    const metrics = chosenMetrics(metric);
    const scene = multiPanelScene(metrics.length);
    metrics.forEach((m, p) => {
        const area = panelArea(p);
        const values = rows.map((r) => metricValue(r, m));
        const y = yScaleFor(area, [0, padded(extent(values), 0.1)[1]]);
        drawYAxis(scene, area, y, METRIC_TITLES[m]);
        drawFrame(scene, area);
        drawTitle(scene, area, METRIC_TITLES[m]);
        drawXGroups(scene, area, names, "estimator");
        const slot = (area.x1 - area.x0) / names.length;
        names.forEach((name, i) => {
            const vals = rows.filter((r) => r.estimator === name).map((r) => metricValue(r, m));
            const stats = boxStats(vals);
            const cx = area.x0 + (i + 0.5) * slot;
            const half = Math.min(28, slot * 0.28);
            const color = colorFor(names, name);
            line(scene, cx, y(stats.min), cx, y(stats.q1), AXIS_COLOR, 1);
            line(scene, cx, y(stats.q3), cx, y(stats.max), AXIS_COLOR, 1);
            line(scene, cx - half / 2, y(stats.min), cx + half / 2, y(stats.min), AXIS_COLOR, 1);
            line(scene, cx - half / 2, y(stats.max), cx + half / 2, y(stats.max), AXIS_COLOR, 1);
            rect(scene, cx - half, y(stats.q3), 2 * half, y(stats.q1) - y(stats.q3), "#f2f2f2", color, 1.5);
            line(scene, cx - half, y(stats.median), cx + half, y(stats.median), color, 2);
            for (const v of vals) {
                circle(scene, cx + half + 6, y(v), 1.2, "#888888");
            }
        });
    });
    return scene;
}

// -- sweep ------------------------------------------------------------------

function sweepFigure(rows: ReportRow[], metric: MetricChoice): Scene {
    if (rows.some((r) => r.axisValue === null)) {
        throw new FigureError("sweep figure needs axis_value on every row (sweep or scaling CSV)");
    }
    const names = estimatorNames(rows);
    const axisValues = [...new Set(rows.map((r) => r.axisValue as number))].sort((a, b) => a - b);
    const metrics = chosenMetrics(metric);
    const scene = multiPanelScene(metrics.length);
    metrics.forEach((m, p) => {
        const area = panelArea(p);
        const values = rows.map((r) => metricValue(r, m));
        const x = xScaleFor(area, padded(extent(axisValues), 0.06));
        const y = yScaleFor(area, [0, padded(extent(values), 0.1)[1]]);
        drawYAxis(scene, area, y, METRIC_TITLES[m]);
        drawFrame(scene, area);
        drawTitle(scene, area, METRIC_TITLES[m]);
        drawXAxisNumeric(scene, area, x, "factor value", axisValues);
        for (const name of names) {
            const color = colorFor(names, name);
            const points: Array<[number, number]> = axisValues.map((v) => {
                const atValue = rows
                    .filter((r) => r.estimator === name && r.axisValue === v)
                    .map((r) => metricValue(r, m));
                return [x(v), y(median(atValue))];
            });
            polyline(scene, points, color, 1.6);
            for (const [px, py] of points) {
                circle(scene, px, py, 2.6, color);
            }
        }
        drawLegend(scene, area, names);
    });
    return scene;
}

// -- paired -----------------------------------------------------------------

const BETTER_COLOR = "#d62728"; // PS smaller
const WORSE_COLOR = "#1f77b4";

function pairedFigure(rows: ReportRow[], metric: MetricChoice): Scene {
    const names = estimatorNames(rows);
    if (!names.includes("ps")) {
        throw new FigureError('paired figure needs "ps" rows');
    }
    const baselineNames = names.filter((n) => n !== "ps");
    if (baselineNames.length === 0) {
        throw new FigureError("paired figure needs a baseline estimator besides ps");
    }
    const networks = [...new Set(rows.map((r) => r.networkId))].sort((a, b) => a - b);
    const metrics = chosenMetrics(metric);
    const scene = multiPanelScene(metrics.length);
    metrics.forEach((m, p) => {
        const area = panelArea(p);
        const pairs = networks.map((id) => {
            const mine = rows.filter((r) => r.networkId === id);
            const ps = mine.find((r) => r.estimator === "ps");
            const baselines = mine.filter((r) => r.estimator !== "ps");
            if (!ps || baselines.length === 0) {
                throw new FigureError(`network ${id} lacks ps or baseline rows`);
            }
            const baseline = Math.min(...baselines.map((r) => metricValue(r, m)));
            return { baseline, ps: metricValue(ps, m) };
        });
        pairs.sort((a, b) => a.baseline - b.baseline);
        const xMax = padded(extent(pairs.flatMap((q) => [q.baseline, q.ps])), 0.08)[1];
        const x = xScaleFor(area, [0, xMax]);
        const y = yScaleFor(area, [-0.8, pairs.length - 0.2]);
        drawYAxis(scene, area, y, "network (ranked)", intTicks(0, pairs.length - 1));
        drawFrame(scene, area);
        drawTitle(scene, area, METRIC_TITLES[m]);
        drawXAxisNumeric(scene, area, x, METRIC_TITLES[m]);
        pairs.forEach((pair, rank) => {
            const color = pair.ps < pair.baseline ? BETTER_COLOR : WORSE_COLOR;
            line(scene, x(pair.baseline), y(rank), x(pair.ps), y(rank), color, 1.4);
            circle(scene, x(pair.baseline), y(rank), 2.2, "#555555");
            circle(scene, x(pair.ps), y(rank), 2.2, color);
        });
        text(scene, area.x1 - 4, area.y0 + 12, "red: ps smaller", 9, BETTER_COLOR, "end");
    });
    return scene;
}

function intTicks(lo: number, hi: number): number[] {
    const step = Math.max(1, Math.round((hi - lo) / 5));
    const out: number[] = [];
    for (let v = lo; v <= hi; v += step) out.push(v);
    return out;
}

// -- scaling ----------------------------------------------------------------

function scalingFigure(rows: ReportRow[]): Scene {
    if (rows.some((r) => r.axisValue === null)) {
        throw new FigureError("scaling figure needs axis_value = tree size on every row");
    }
    const names = estimatorNames(rows);
    const scene = multiPanelScene(1);
    const area = panelArea(0);
    const sizes = [...new Set(rows.map((r) => r.axisValue as number))].sort((a, b) => a - b);

    const logPoints = new Map<string, { xs: number[]; ys: number[] }>();
    for (const name of names) {
        const mine = rows.filter((r) => r.estimator === name && r.sd > 0);
        if (mine.length < 2) {
            throw new FigureError(`scaling fit for "${name}" needs >= 2 positive-variance points`);
        }
        logPoints.set(name, {
            xs: mine.map((r) => Math.log10(r.axisValue as number)),
            ys: mine.map((r) => Math.log10(r.sd ** 2)),
        });
    }
    const allY = [...logPoints.values()].flatMap((p) => p.ys);
    const x = xScaleFor(area, padded([Math.log10(sizes[0]), Math.log10(sizes[sizes.length - 1])], 0.06));
    const y = yScaleFor(area, padded(extent(allY), 0.12));

    const yTicks: number[] = [];
    for (let e = Math.floor(y.domain[0]); e <= Math.ceil(y.domain[1]); e++) yTicks.push(e);
    drawYAxis(scene, area, y, "log10 var", yTicks, yTicks.map((e) => `1E${e}`));
    drawFrame(scene, area);
    drawTitle(scene, area, "variance vs sample size");
    drawXAxisNumeric(scene, area, x, "tree size n", sizes.map((n) => Math.log10(n)), sizes.map((n) => String(n)));

    names.forEach((name, i) => {
        const color = colorFor(names, name);
        const pts = logPoints.get(name)!;
        const fit = linearFit(pts.xs, pts.ys);
        const [d0, d1] = x.domain;
        line(scene, x(d0), y(fit.intercept + fit.slope * d0), x(d1), y(fit.intercept + fit.slope * d1), color, 1.2);
        pts.xs.forEach((px, k) => circle(scene, x(px), y(pts.ys[k]), 3, color));
        text(
            scene,
            area.x1 - 6,
            area.y1 - 10 - 13 * (names.length - 1 - i),
            `${name} slope ${formatTick(fit.slope)}`,
            10,
            color,
            "end",
        );
    });
    return scene;
}
