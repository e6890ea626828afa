/** Small numeric helpers: quantiles, box summaries, least-squares fits. */

export function quantile(sortedValues: number[], q: number): number {
    const n = sortedValues.length;
    if (n === 0) {
        throw new Error("quantile of empty array");
    }
    const pos = q * (n - 1);
    const lo = Math.floor(pos);
    const hi = Math.ceil(pos);
    const frac = pos - lo;
    return sortedValues[lo] * (1 - frac) + sortedValues[hi] * frac;
}

export interface BoxStats {
    min: number;
    q1: number;
    median: number;
    q3: number;
    max: number;
}

export function boxStats(values: number[]): BoxStats {
    const sorted = [...values].sort((a, b) => a - b);
    return {
        min: sorted[0],
        q1: quantile(sorted, 0.25),
        median: quantile(sorted, 0.5),
        q3: quantile(sorted, 0.75),
        max: sorted[sorted.length - 1],
    };
}

export interface LinearFit {
    slope: number;
    intercept: number;
}

export function linearFit(xs: number[], ys: number[]): LinearFit {
    const n = xs.length;
    if (n < 2) {
        throw new Error("linear fit needs at least 2 points");
    }
    const xMean = xs.reduce((a, b) => a + b, 0) / n;
    const yMean = ys.reduce((a, b) => a + b, 0) / n;
    let sxx = 0;
    let sxy = 0;
    for (let i = 0; i < n; i++) {
        sxx += (xs[i] - xMean) ** 2;
        sxy += (xs[i] - xMean) * (ys[i] - yMean);
    }
    const slope = sxy / sxx;
    return { slope, intercept: yMean - slope * xMean };
}

export function median(values: number[]): number {
    return quantile([...values].sort((a, b) => a - b), 0.5);
}
