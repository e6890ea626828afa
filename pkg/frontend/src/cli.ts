#!/usr/bin/env node
/** plotkit <input.csv> <kind> <metric> <output>
 *
 * kind:   boxplot | sweep | paired | scaling
 * metric: abs_bias | sd | rmse | all   (scaling always plots variance)
 *
 * Writes <output>.svg and <output>.png (deterministic bytes).
 * Exit codes: 0 ok, 1 runtime/data failure, 2 usage error.
 */

import { FIGURE_KINDS, render, type FigureSpec } from "./index.js";
import { METRICS } from "./report.js";

const USAGE = `usage: plotkit <input.csv> <kind> <metric> <output>
  kind:   ${FIGURE_KINDS.join(" | ")}
  metric: ${METRICS.join(" | ")} | all`;

export function main(argv: string[]): number {
    if (argv.length !== 4) {
        console.error(USAGE);
        return 2;
    }
    const [csvPath, kind, metric, outPath] = argv;
    if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
        console.error(`plotkit: unknown figure kind "${kind}"\n${USAGE}`);
        return 2;
    }
    if (metric !== "all" && !(METRICS as readonly string[]).includes(metric)) {
        console.error(`plotkit: unknown metric "${metric}"\n${USAGE}`);
        return 2;
    }
    const spec: FigureSpec = {
        csvPath,
        kind: kind as FigureSpec["kind"],
        metric: metric as FigureSpec["metric"],
        outPath,
    };
    try {
        const out = render(spec);
        console.log(`${out.svgPath}\n${out.pngPath}`);
        return 0;
    } catch (err) {
        console.error(`plotkit: ${err instanceof Error ? err.message : String(err)}`);
        return 1;
    }
}

const invokedDirectly =
    process.argv[1] !== undefined && import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
    process.exitCode = main(process.argv.slice(2));
}
