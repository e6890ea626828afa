/** Backend-independent drawing primitives.
 *
 * Figures build a Scene; the SVG and raster backends render it. Pixel
 * coordinates have the origin at the top-left, y growing downward.
 */

export type TextAnchor = "start" | "middle" | "end";

export interface LineCmd {
    kind: "line";
    x1: number;
    y1: number;
    x2: number;
    y2: number;
    color: string;
    width: number;
}

export interface RectCmd {
    kind: "rect";
    x: number;
    y: number;
    w: number;
    h: number;
    fill: string | null;
    stroke: string | null;
    strokeWidth: number;
}

export interface CircleCmd {
    kind: "circle";
    cx: number;
    cy: number;
    r: number;
    fill: string;
}

export interface PolylineCmd {
    kind: "polyline";
    points: Array<[number, number]>;
    color: string;
    width: number;
}

export interface TextCmd {
    kind: "text";
    x: number;
    y: number; // baseline
    text: string;
    size: number;
    color: string;
    anchor: TextAnchor;
}

export type Cmd = LineCmd | RectCmd | CircleCmd | PolylineCmd | TextCmd;

export interface Scene {
    width: number;
    height: number;
    background: string;
    items: Cmd[];
}

export function newScene(width: number, height: number): Scene {
    return { width, height, background: "#ffffff", items: [] };
}

export function line(s: Scene, x1: number, y1: number, x2: number, y2: number, color = "#000000", width = 1): void {
    s.items.push({ kind: "line", x1, y1, x2, y2, color, width });
}

export function rect(
    s: Scene,
    x: number,
    y: number,
    w: number,
    h: number,
    fill: string | null,
    stroke: string | null = null,
    strokeWidth = 1,
): void {
    s.items.push({ kind: "rect", x, y, w, h, fill, stroke, strokeWidth });
}

export function circle(s: Scene, cx: number, cy: number, r: number, fill: string): void {
    s.items.push({ kind: "circle", cx, cy, r, fill });
}

export function polyline(s: Scene, points: Array<[number, number]>, color: string, width = 1): void {
    s.items.push({ kind: "polyline", points, color, width });
}

export function text(
    s: Scene,
    x: number,
    y: number,
    content: string,
    size = 11,
    color = "#000000",
    anchor: TextAnchor = "start",
): void {
    s.items.push({ kind: "text", x, y, text: content, size, color, anchor });
}
