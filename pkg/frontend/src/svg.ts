/** Scene -> SVG string. Output is byte-deterministic: fixed attribute
 * order, fixed number formatting, no timestamps or generated ids. */

import type { Cmd, Scene } from "./scene.js";

function fmt(value: number): string {
    const rounded = Math.round(value * 100) / 100;
    return Object.is(rounded, -0) ? "0" : String(rounded);
}

function esc(text: string): string {
    return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function render(cmd: Cmd): string {
    switch (cmd.kind) {
        case "line":
            return `<line x1="${fmt(cmd.x1)}" y1="${fmt(cmd.y1)}" x2="${fmt(cmd.x2)}" y2="${fmt(cmd.y2)}" stroke="${cmd.color}" stroke-width="${fmt(cmd.width)}"/>`;
        case "rect": {
            const fill = cmd.fill ?? "none";
            const stroke = cmd.stroke ? ` stroke="${cmd.stroke}" stroke-width="${fmt(cmd.strokeWidth)}"` : "";
            return `<rect x="${fmt(cmd.x)}" y="${fmt(cmd.y)}" width="${fmt(cmd.w)}" height="${fmt(cmd.h)}" fill="${fill}"${stroke}/>`;
        }
        case "circle":
            return `<circle cx="${fmt(cmd.cx)}" cy="${fmt(cmd.cy)}" r="${fmt(cmd.r)}" fill="${cmd.fill}"/>`;
        case "polyline": {
            const points = cmd.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
            return `<polyline points="${points}" fill="none" stroke="${cmd.color}" stroke-width="${fmt(cmd.width)}"/>`;
        }
        case "text":
            return `<text x="${fmt(cmd.x)}" y="${fmt(cmd.y)}" font-family="Helvetica,Arial,sans-serif" font-size="${fmt(cmd.size)}" fill="${cmd.color}" text-anchor="${cmd.anchor}">${esc(cmd.text)}</text>`;
    }
}

export function sceneToSvg(scene: Scene): string {
    const body = scene.items.map(render).join("\n  ");
    return (
        `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">\n` +
        `  <rect x="0" y="0" width="${scene.width}" height="${scene.height}" fill="${scene.background}"/>\n` +
        `  ${body}\n</svg>\n`
    );
}
