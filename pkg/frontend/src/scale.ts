/** Linear data-to-pixel scales with 1-2-5 tick placement. */

export interface Scale {
    (value: number): number;
    domain: [number, number];
    range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
    const [d0, d1] = domain;
    const [r0, r1] = range;
    const span = d1 - d0 || 1;
    const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
    scale.domain = domain;
    scale.range = range;
    return scale;
}

/** Round tick step to 1/2/5 x 10^k covering roughly `count` intervals. */
export function niceTicks(lo: number, hi: number, count = 5): number[] {
    if (!(hi > lo)) {
        const pad = Math.abs(lo) || 1;
        return niceTicks(lo - pad / 2, lo + pad / 2, count);
    }
    const rawStep = (hi - lo) / count;
    const power = Math.floor(Math.log10(rawStep));
    const base = rawStep / 10 ** power;
    const mult = base < 1.5 ? 1 : base < 3.5 ? 2 : base < 7.5 ? 5 : 10;
    const step = mult * 10 ** power;
    const start = Math.ceil(lo / step) * step;
    const ticks: number[] = [];
    for (let v = start; v <= hi + step * 1e-9; v += step) {
        ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
    }
    return ticks;
}

/** Pad a [lo, hi] data extent by a fraction on both sides. */
export function padded(extent: [number, number], fraction = 0.08): [number, number] {
    const [lo, hi] = extent;
    const pad = (hi - lo || Math.abs(lo) || 1) * fraction;
    return [lo - pad, hi + pad];
}

export function extent(values: number[]): [number, number] {
    let lo = Infinity;
    let hi = -Infinity;
    for (const v of values) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    return [lo, hi];
}

export function formatTick(value: number): string {
    if (value === 0) return "0";
    const abs = Math.abs(value);
    if (abs >= 10000 || abs < 0.001) {
        return value.toExponential(1).replace("e", "E");
    }
    const digits = abs >= 100 ? 0 : abs >= 1 ? 1 : abs >= 0.01 ? 3 : 4;
    return value.toFixed(digits).replace(/\.?0+$/, "");
}
