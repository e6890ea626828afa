/** Stroke font for the raster backend.
 *
 * Uppercase-only vector glyphs on a 4-wide x 6-tall grid (baseline at
 * y=0, y up); lowercase maps to uppercase. Enough coverage for plot
 * labels: letters, digits, and common punctuation.
 */

type Segment = [number, number, number, number];

const GLYPHS: Record<string, Segment[]> = {
    " ": [],
    "0": [[0, 0, 4, 0], [4, 0, 4, 6], [4, 6, 0, 6], [0, 6, 0, 0], [0, 0, 4, 6]],
    "1": [[1, 5, 2, 6], [2, 6, 2, 0], [1, 0, 3, 0]],
    "2": [[0, 6, 4, 6], [4, 6, 4, 3], [4, 3, 0, 3], [0, 3, 0, 0], [0, 0, 4, 0]],
    "3": [[0, 6, 4, 6], [4, 6, 4, 0], [4, 0, 0, 0], [1, 3, 4, 3]],
    "4": [[0, 6, 0, 3], [0, 3, 4, 3], [3, 6, 3, 0]],
    "5": [[4, 6, 0, 6], [0, 6, 0, 3], [0, 3, 4, 3], [4, 3, 4, 0], [4, 0, 0, 0]],
    "6": [[4, 6, 0, 6], [0, 6, 0, 0], [0, 0, 4, 0], [4, 0, 4, 3], [4, 3, 0, 3]],
    "7": [[0, 6, 4, 6], [4, 6, 1, 0]],
    "8": [[0, 0, 4, 0], [4, 0, 4, 6], [4, 6, 0, 6], [0, 6, 0, 0], [0, 3, 4, 3]],
    "9": [[0, 0, 4, 0], [4, 0, 4, 6], [4, 6, 0, 6], [0, 6, 0, 3], [0, 3, 4, 3]],
    "-": [[0.5, 3, 3.5, 3]],
    "+": [[2, 1, 2, 5], [0, 3, 4, 3]],
    "=": [[0, 2, 4, 2], [0, 4, 4, 4]],
    ".": [[1.5, 0, 2.5, 0], [2.5, 0, 2.5, 1], [2.5, 1, 1.5, 1], [1.5, 1, 1.5, 0]],
    ",": [[2, 1, 1.2, -1]],
    ":": [[2, 1, 2, 1.8], [2, 4, 2, 4.8]],
    "/": [[0, 0, 4, 6]],
    "_": [[0, 0, 4, 0]],
    "(": [[3, 6, 2, 4.5], [2, 4.5, 2, 1.5], [2, 1.5, 3, 0]],
    ")": [[1, 6, 2, 4.5], [2, 4.5, 2, 1.5], [2, 1.5, 1, 0]],
    "%": [[0, 0, 4, 6], [0, 5, 1, 5], [1, 5, 1, 6], [1, 6, 0, 6], [0, 6, 0, 5], [3, 0, 4, 0], [4, 0, 4, 1], [4, 1, 3, 1], [3, 1, 3, 0]],
    A: [[0, 0, 2, 6], [2, 6, 4, 0], [1, 2, 3, 2]],
    B: [[0, 0, 0, 6], [0, 6, 3, 6], [3, 6, 4, 5], [4, 5, 3, 3.5], [0, 3.5, 3, 3.5], [3, 3.5, 4, 2], [4, 2, 3, 0], [3, 0, 0, 0]],
    C: [[4, 1, 3, 0], [3, 0, 1, 0], [1, 0, 0, 1], [0, 1, 0, 5], [0, 5, 1, 6], [1, 6, 3, 6], [3, 6, 4, 5]],
    D: [[0, 0, 0, 6], [0, 6, 3, 6], [3, 6, 4, 4], [4, 4, 4, 2], [4, 2, 3, 0], [3, 0, 0, 0]],
    E: [[4, 0, 0, 0], [0, 0, 0, 6], [0, 6, 4, 6], [0, 3, 3, 3]],
    F: [[0, 0, 0, 6], [0, 6, 4, 6], [0, 3, 3, 3]],
    G: [[4, 5, 3, 6], [3, 6, 1, 6], [1, 6, 0, 5], [0, 5, 0, 1], [0, 1, 1, 0], [1, 0, 3, 0], [3, 0, 4, 1], [4, 1, 4, 3], [4, 3, 2, 3]],
    H: [[0, 0, 0, 6], [4, 0, 4, 6], [0, 3, 4, 3]],
    I: [[1, 0, 3, 0], [2, 0, 2, 6], [1, 6, 3, 6]],
    J: [[3, 6, 3, 1], [3, 1, 2, 0], [2, 0, 1, 0], [1, 0, 0, 1]],
    K: [[0, 0, 0, 6], [4, 6, 0, 3], [1.3, 4, 4, 0]],
    L: [[0, 6, 0, 0], [0, 0, 4, 0]],
    M: [[0, 0, 0, 6], [0, 6, 2, 3], [2, 3, 4, 6], [4, 6, 4, 0]],
    N: [[0, 0, 0, 6], [0, 6, 4, 0], [4, 0, 4, 6]],
    O: [[1, 0, 3, 0], [3, 0, 4, 1], [4, 1, 4, 5], [4, 5, 3, 6], [3, 6, 1, 6], [1, 6, 0, 5], [0, 5, 0, 1], [0, 1, 1, 0]],
    P: [[0, 0, 0, 6], [0, 6, 3, 6], [3, 6, 4, 5], [4, 5, 4, 4], [4, 4, 3, 3], [3, 3, 0, 3]],
    Q: [[1, 0, 3, 0], [3, 0, 4, 1], [4, 1, 4, 5], [4, 5, 3, 6], [3, 6, 1, 6], [1, 6, 0, 5], [0, 5, 0, 1], [0, 1, 1, 0], [2.5, 1.5, 4, -0.5]],
    R: [[0, 0, 0, 6], [0, 6, 3, 6], [3, 6, 4, 5], [4, 5, 4, 4], [4, 4, 3, 3], [3, 3, 0, 3], [1.5, 3, 4, 0]],
    S: [[4, 5, 3, 6], [3, 6, 1, 6], [1, 6, 0, 5], [0, 5, 0, 4], [0, 4, 4, 2], [4, 2, 4, 1], [4, 1, 3, 0], [3, 0, 1, 0], [1, 0, 0, 1]],
    T: [[0, 6, 4, 6], [2, 6, 2, 0]],
    U: [[0, 6, 0, 1], [0, 1, 1, 0], [1, 0, 3, 0], [3, 0, 4, 1], [4, 1, 4, 6]],
    V: [[0, 6, 2, 0], [2, 0, 4, 6]],
    W: [[0, 6, 1, 0], [1, 0, 2, 3], [2, 3, 3, 0], [3, 0, 4, 6]],
    X: [[0, 0, 4, 6], [0, 6, 4, 0]],
    Y: [[0, 6, 2, 3], [4, 6, 2, 3], [2, 3, 2, 0]],
    Z: [[0, 6, 4, 6], [4, 6, 0, 0], [0, 0, 4, 0]],
};

const FALLBACK: Segment[] = [[0, 0, 4, 0], [4, 0, 4, 6], [4, 6, 0, 6], [0, 6, 0, 0]];

const ADVANCE = 5.5; // glyph cell width incl. gap, in grid units
const CAP = 6; // cap height in grid units

export function textWidth(content: string, size: number): number {
    return (content.length * ADVANCE - 1.5) * (size / (CAP + 2));
}

/** Flatten a string into stroke segments in pixel coordinates.
 *
 * `x, y` is the baseline anchor point (y down, like the scene).
 */
export function textStrokes(
    content: string,
    x: number,
    y: number,
    size: number,
    anchor: "start" | "middle" | "end",
): Segment[] {
    const unit = size / (CAP + 2);
    const total = textWidth(content, size);
    let x0 = x;
    if (anchor === "middle") x0 -= total / 2;
    if (anchor === "end") x0 -= total;
    const out: Segment[] = [];
    for (let i = 0; i < content.length; i++) {
        const ch = content[i].toUpperCase();
        const glyph = ch in GLYPHS ? GLYPHS[ch] : FALLBACK;
        const gx = x0 + i * ADVANCE * unit;
        for (const [sx1, sy1, sx2, sy2] of glyph) {
            out.push([gx + sx1 * unit, y - sy1 * unit, gx + sx2 * unit, y - sy2 * unit]);
        }
    }
    return out;
}
