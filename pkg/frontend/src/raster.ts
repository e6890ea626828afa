/** Scene -> RGBA pixel buffer. Anti-aliasing-free on purpose: integer
 * coverage rules keep the output bytes identical everywhere. */

import { textStrokes } from "./font.js";
import type { Cmd, Scene } from "./scene.js";

export interface Raster {
    width: number;
    height: number;
    data: Uint8Array; // RGBA
}

function parseColor(color: string): [number, number, number] {
    const hex = color.startsWith("#") ? color.slice(1) : color;
    if (hex.length === 6) {
        return [
            parseInt(hex.slice(0, 2), 16),
            parseInt(hex.slice(2, 4), 16),
            parseInt(hex.slice(4, 6), 16),
        ];
    }
    if (hex.length === 3) {
        return [
            parseInt(hex[0] + hex[0], 16),
            parseInt(hex[1] + hex[1], 16),
            parseInt(hex[2] + hex[2], 16),
        ];
    }
    return [0, 0, 0];
}

function put(r: Raster, x: number, y: number, rgb: [number, number, number]): void {
    if (x < 0 || y < 0 || x >= r.width || y >= r.height) return;
    const at = (y * r.width + x) * 4;
    r.data[at] = rgb[0];
    r.data[at + 1] = rgb[1];
    r.data[at + 2] = rgb[2];
    r.data[at + 3] = 255;
}

function disc(r: Raster, cx: number, cy: number, radius: number, rgb: [number, number, number]): void {
    const lo = Math.floor(-radius);
    const hi = Math.ceil(radius);
    for (let dy = lo; dy <= hi; dy++) {
        for (let dx = lo; dx <= hi; dx++) {
            if (dx * dx + dy * dy <= radius * radius) {
                put(r, Math.round(cx) + dx, Math.round(cy) + dy, rgb);
            }
        }
    }
}

function stroke(
    r: Raster,
    x1: number,
    y1: number,
    x2: number,
    y2: number,
    rgb: [number, number, number],
    width: number,
): void {
    const steps = Math.max(1, Math.ceil(Math.hypot(x2 - x1, y2 - y1) * 2));
    const radius = Math.max(0.5, width / 2);
    for (let i = 0; i <= steps; i++) {
        const t = i / steps;
        const x = x1 + (x2 - x1) * t;
        const y = y1 + (y2 - y1) * t;
        if (radius <= 0.5) {
            put(r, Math.round(x), Math.round(y), rgb);
        } else {
            disc(r, x, y, radius, rgb);
        }
    }
}

function fillRect(r: Raster, x: number, y: number, w: number, h: number, rgb: [number, number, number]): void {
    const x0 = Math.round(x);
    const y0 = Math.round(y);
    const x1 = Math.round(x + w);
    const y1 = Math.round(y + h);
    for (let yy = y0; yy < y1; yy++) {
        for (let xx = x0; xx < x1; xx++) {
            put(r, xx, yy, rgb);
        }
    }
}

function draw(r: Raster, cmd: Cmd): void {
    switch (cmd.kind) {
        case "line":
            stroke(r, cmd.x1, cmd.y1, cmd.x2, cmd.y2, parseColor(cmd.color), cmd.width);
            return;
        case "rect": {
            if (cmd.fill) {
                fillRect(r, cmd.x, cmd.y, cmd.w, cmd.h, parseColor(cmd.fill));
            }
            if (cmd.stroke) {
                const rgb = parseColor(cmd.stroke);
                stroke(r, cmd.x, cmd.y, cmd.x + cmd.w, cmd.y, rgb, cmd.strokeWidth);
                stroke(r, cmd.x + cmd.w, cmd.y, cmd.x + cmd.w, cmd.y + cmd.h, rgb, cmd.strokeWidth);
                stroke(r, cmd.x + cmd.w, cmd.y + cmd.h, cmd.x, cmd.y + cmd.h, rgb, cmd.strokeWidth);
                stroke(r, cmd.x, cmd.y + cmd.h, cmd.x, cmd.y, rgb, cmd.strokeWidth);
            }
            return;
        }
        case "circle":
            disc(r, cmd.cx, cmd.cy, cmd.r, parseColor(cmd.fill));
            return;
        case "polyline": {
            const rgb = parseColor(cmd.color);
            for (let i = 1; i < cmd.points.length; i++) {
                const [x1, y1] = cmd.points[i - 1];
                const [x2, y2] = cmd.points[i];
                stroke(r, x1, y1, x2, y2, rgb, cmd.width);
            }
            return;
        }
        case "text": {
            const rgb = parseColor(cmd.color);
            for (const [x1, y1, x2, y2] of textStrokes(cmd.text, cmd.x, cmd.y, cmd.size, cmd.anchor)) {
                stroke(r, x1, y1, x2, y2, rgb, 1);
            }
            return;
        }
    }
}

export function renderRaster(scene: Scene): Raster {
    const raster: Raster = {
        width: scene.width,
        height: scene.height,
        data: new Uint8Array(scene.width * scene.height * 4),
    };
    fillRect(raster, 0, 0, scene.width, scene.height, parseColor(scene.background));
    for (const cmd of scene.items) {
        draw(raster, cmd);
    }
    return raster;
}
