/** Typed view of experiment report CSVs.
 *
 * Expected schema (one row per network x estimator):
 *   network_id,axis_value,estimator,abs_bias,sd,rmse,mu_true,failures
 * axis_value is empty for plain runs, the swept factor for sweeps, and
 * the tree size for scaling studies.
 */

import { parseCsv } from "./csv.js";

export const METRICS = ["abs_bias", "sd", "rmse"] as const;
export type Metric = (typeof METRICS)[number];

export const REQUIRED_COLUMNS = [
    "network_id",
    "axis_value",
    "estimator",
    "abs_bias",
    "sd",
    "rmse",
    "mu_true",
    "failures",
] as const;

export interface ReportRow {
    networkId: number;
    axisValue: number | null;
    estimator: string;
    abs_bias: number;
    sd: number;
    rmse: number;
    muTrue: number;
    failures: number;
}

export class SchemaError extends Error {}
export class EmptyReportError extends Error {}

function parseNumber(field: string, column: string, line: number): number {
    const value = Number(field);
    if (field === "" || !Number.isFinite(value)) {
        throw new SchemaError(`line ${line}: column "${column}" is not a number: "${field}"`);
    }
    return value;
}

export function parseReport(text: string): ReportRow[] {
    const { header, rows } = parseCsv(text);
    for (const column of REQUIRED_COLUMNS) {
        if (!header.includes(column)) {
            throw new SchemaError(`missing column "${column}"`);
        }
    }
    if (rows.length === 0) {
        throw new EmptyReportError("report has a header but no data rows; nothing to draw");
    }
    const at = new Map(header.map((name, i) => [name, i]));
    const col = (row: string[], name: string) => row[at.get(name)!];
    return rows.map((row, i) => {
        const line = i + 2;
        const axisField = col(row, "axis_value");
        return {
            networkId: Math.trunc(parseNumber(col(row, "network_id"), "network_id", line)),
            axisValue: axisField === "" ? null : parseNumber(axisField, "axis_value", line),
            estimator: col(row, "estimator"),
            abs_bias: parseNumber(col(row, "abs_bias"), "abs_bias", line),
            sd: parseNumber(col(row, "sd"), "sd", line),
            rmse: parseNumber(col(row, "rmse"), "rmse", line),
            muTrue: parseNumber(col(row, "mu_true"), "mu_true", line),
            failures: Math.trunc(parseNumber(col(row, "failures"), "failures", line)),
        };
    });
}

/** Estimator names in deterministic (alphabetical) order. */
export function estimatorNames(rows: ReportRow[]): string[] {
    return [...new Set(rows.map((r) => r.estimator))].sort();
}

export function metricValue(row: ReportRow, metric: Metric): number {
    return row[metric];
}
