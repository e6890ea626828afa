/** Minimal CSV reader for the report schema (no quoting, comma-separated). */

export interface CsvTable {
    header: string[];
    rows: string[][];
}

export function parseCsv(text: string): CsvTable {
    const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
    if (lines.length === 0) {
        throw new Error("empty CSV: no header line");
    }
    const header = lines[0].split(",").map((s) => s.trim());
    const rows: string[][] = [];
    for (let i = 1; i < lines.length; i++) {
        const fields = lines[i].split(",");
        if (fields.length !== header.length) {
            throw new Error(
                `CSV line ${i + 1}: expected ${header.length} fields, got ${fields.length}`,
            );
        }
        rows.push(fields.map((s) => s.trim()));
    }
    return { header, rows };
}
