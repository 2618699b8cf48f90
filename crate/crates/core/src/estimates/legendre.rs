//! Gauss–Legendre rules and composite panels for the 1D kernel integrals.

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite rule on [a, b]: panels split at every breakpoint inside the
/// interval and further subdivided to width ≤ `max_width`.
pub fn composite(a: f64, b: f64, breaks: &[f64], max_width: f64, order: usize) -> Vec<(f64, f64)> {
    let (gx, gw) = gauss_legendre(order);
    let mut cuts: Vec<f64> = vec![a, b];
    cuts.extend(breaks.iter().copied().filter(|&c| c > a && c < b));
    cuts.sort_by(|p, q| p.total_cmp(q));
    cuts.dedup();
    let mut out = Vec::new();
    for seg in cuts.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let pieces = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let h = (hi - lo) / pieces as f64;
        for p in 0..pieces {
            let c = lo + (p as f64 + 0.5) * h;
            for (x, w) in gx.iter().zip(&gw) {
                out.push((c + 0.5 * h * x, 0.5 * h * w));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in 1..30 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn composite_respects_breaks() {
        let rule = composite(-2.0, 3.0, &[0.25, -7.0], 0.5, 8);
        let area: f64 = rule.iter().map(|p| p.1).sum();
        assert!((area - 5.0).abs() < 1e-13);
        let step: f64 = rule.iter().map(|&(x, w)| if x < 0.25 { w } else { 0.0 }).sum();
        assert!((step - 2.25).abs() < 1e-13);
    }
}
