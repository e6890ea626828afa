/** Render experiment report CSVs to SVG + PNG figure files. */

import { readFileSync, writeFileSync } from "node:fs";
import * as path from "node:path";

import { buildFigure, FIGURE_KINDS, FigureError, type FigureKind, type MetricChoice } from "./figures.js";
import { encodePng } from "./png.js";
import { renderRaster } from "./raster.js";
import { METRICS, parseReport } from "./report.js";
import { sceneToSvg } from "./svg.js";

export { FIGURE_KINDS, FigureError, buildFigure } from "./figures.js";
export { EmptyReportError, METRICS, parseReport, SchemaError } from "./report.js";
export { sceneToSvg } from "./svg.js";
export { renderRaster } from "./raster.js";
export { encodePng } from "./png.js";

export interface FigureSpec {
    csvPath: string;
    kind: FigureKind;
    metric: MetricChoice;
    outPath: string; // extension replaced; both .svg and .png are written
}

export interface RenderedFigure {
    svgPath: string;
    pngPath: string;
}

export function validateSpec(spec: FigureSpec): void {
    if (!FIGURE_KINDS.includes(spec.kind)) {
        throw new FigureError(`unknown figure kind "${spec.kind}"; known: ${FIGURE_KINDS.join(", ")}`);
    }
    if (spec.metric !== "all" && !METRICS.includes(spec.metric)) {
        throw new FigureError(`unknown metric "${spec.metric}"; known: ${METRICS.join(", ")}, all`);
    }
}

export function render(spec: FigureSpec): RenderedFigure {
    validateSpec(spec);
    const text = readFileSync(spec.csvPath, "utf-8");
    const rows = parseReport(text);
    const scene = buildFigure(spec.kind, spec.metric, rows);

    const stem = spec.outPath.replace(/\.(svg|png)$/i, "");
    const svgPath = `${stem}.svg`;
    const pngPath = `${stem}.png`;
    writeFileSync(svgPath, sceneToSvg(scene), "utf-8");
    writeFileSync(pngPath, encodePng(renderRaster(scene)));
    return { svgPath: path.normalize(svgPath), pngPath: path.normalize(pngPath) };
}
