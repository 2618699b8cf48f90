//! Spectral calculus of the harmonic oscillator `A = −Δ + |x|²` on ℝ²:
//! eigenvalues, projectors, dyadic blocks, powers of A and the norms that
//! compare the harmonic scale with the classical Sobolev/moment scales.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::hermite::ladder::{d_dx, mul_x, Axis};
use crate::hermite::{synthesize_on_nodes, Grid, SpectralField, WeightScale};

/// Eigenvalue of A on the degree-n eigenspace.
pub fn eigenvalue(n: usize) -> u64 {
    2 * n as u64 + 2
}

/// Π_n: keeps the coefficients with `k1 + k2 = n`.
pub fn project_pi_n(u: &SpectralField, n: usize) -> SpectralField {
    let mut out = SpectralField::zeros(u.n_max());
    if n > u.n_max() {
        return out;
    }
    for k1 in 0..=n {
        out.set(k1, n - k1, u.get(k1, n - k1));
    }
    out
}

/// Dyadic Littlewood–Paley block: degrees n with `2n+2 ∈ [N², 4N²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicBlock {
    label: u64,
    lo: usize,
    hi: usize,
}

impl DyadicBlock {
    pub fn new(label: u64) -> Result<Self> {
        if label == 0 || !label.is_power_of_two() {
            return Err(Error::NotDyadic(label));
        }
        let n2 = label.checked_mul(label).ok_or(Error::NotDyadic(label))?;
        // 2n+2 ≥ N²  ⇔  n ≥ N²/2 − 1 ;  2n+2 < 4N²  ⇔  n ≤ 2N² − 2
        let lo = (n2 / 2).saturating_sub(1) as usize;
        let hi = (2 * n2 - 2) as usize;
        Ok(DyadicBlock { label, lo, hi })
    }

    /// The block containing degree `n`.
    pub fn containing(n: usize) -> Self {
        let mut label = 1u64;
        while eigenvalue(n) >= 4 * label * label {
            label *= 2;
        }
        DyadicBlock::new(label).expect("power of two")
    }

    pub fn label(&self) -> u64 {
        self.label
    }

    /// Smallest degree in the block.
    pub fn lo(&self) -> usize {
        self.lo
    }

    /// Largest degree in the block.
    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.lo..=self.hi).contains(&n)
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }

    /// Whether the whole block fits under a truncation degree.
    pub fn resolvable(&self, n_max: usize) -> bool {
        self.hi <= n_max
    }

    /// Largest dyadic label whose block fits under `n_max`.
    pub fn max_resolvable(n_max: usize) -> u64 {
        let mut label = 1u64;
        while DyadicBlock::new(label * 2).is_ok_and(|b| b.resolvable(n_max)) {
            label *= 2;
        }
        label
    }
}

/// Δ_N u, a sharp spectral cutoff onto the block of label N.
pub fn littlewood_paley(u: &SpectralField, label: u64) -> Result<SpectralField> {
    let block = DyadicBlock::new(label)?;
    let mut out = SpectralField::zeros(u.n_max());
    for (k1, k2, c) in u.iter() {
        if block.contains(k1 + k2) {
            out.set(k1, k2, c);
        }
    }
    Ok(out)
}

/// A^{s/2} u; any real s is allowed since the spectrum starts at 2.
pub fn apply_power_a(u: &SpectralField, s: f64) -> SpectralField {
    u.map_degree(|n| Complex64::new((eigenvalue(n) as f64).powf(s / 2.0), 0.0))
}

/// A u.
pub fn apply_a(u: &SpectralField) -> SpectralField {
    u.map_degree(|n| Complex64::new(eigenvalue(n) as f64, 0.0))
}

/// ‖u‖_{ℋ^s} = ‖A^{s/2} u‖.
pub fn norm_hs(u: &SpectralField, s: f64) -> f64 {
    u.iter()
        .map(|(k1, k2, c)| (eigenvalue(k1 + k2) as f64).powf(s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// ‖∇u‖², exact through the ladder relations.
pub fn gradient_norm_sq(u: &SpectralField) -> f64 {
    Axis::BOTH.iter().map(|&a| d_dx(u, a).norm_sq()).sum()
}

/// ‖|x| u‖², exact through the ladder relations.
pub fn radial_moment_sq(u: &SpectralField) -> f64 {
    Axis::BOTH.iter().map(|&a| mul_x(u, a).norm_sq()).sum()
}

/// Σ_i ‖|x| ∂_i u‖², the weighted-gradient quantity of the norm equivalence.
pub fn weighted_gradient_sq(u: &SpectralField) -> f64 {
    Axis::BOTH
        .iter()
        .map(|&a| radial_moment_sq(&d_dx(u, a)))
        .sum()
}

/// Repeated application of `⟨x⟩² = 1 + |x|²`, giving `⟨x⟩^{2j} u` exactly.
pub fn bracket_power_even(u: &SpectralField, j: usize) -> SpectralField {
    let mut out = u.clone();
    for _ in 0..j {
        out = crate::hermite::ladder::mul_bracket_sq(&out);
    }
    out
}

/// Repeated application of `−Δ`, giving `(−Δ)^j u` exactly.
pub fn neg_laplacian_power(u: &SpectralField, j: usize) -> SpectralField {
    let mut out = u.clone();
    for _ in 0..j {
        out = &crate::hermite::ladder::laplacian(&out) * -1.0;
    }
    out
}

/// Uniform periodic box `[−L, L)²` with `points` samples per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    pub half_width: f64,
    pub points: usize,
    /// Largest admissible boundary magnitude relative to the peak.
    pub tail_tolerance: f64,
}

impl Default for BoxSpec {
    fn default() -> Self {
        BoxSpec {
            half_width: 12.0,
            points: 512,
            tail_tolerance: 1e-12,
        }
    }
}

impl BoxSpec {
    /// A box whose half width clears the turning point of degree `n_max`
    /// by enough Gaussian decay.
    pub fn for_degree(n_max: usize) -> Self {
        let turning = (2.0 * n_max as f64 + 1.0).sqrt();
        BoxSpec {
            half_width: (turning + 8.0).max(12.0),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    /// ‖A^{s/2} u‖
    pub harmonic: f64,
    /// ‖D^s u‖ (Fourier multiplier |ξ|^s)
    pub fourier: f64,
    /// ‖⟨x⟩^s u‖
    pub moment: f64,
    /// ‖|x|^s u‖
    pub pure_moment: f64,
    /// harmonic² / (fourier² + moment²)
    pub ratio_low: f64,
    /// (fourier² + moment²) / harmonic²
    pub ratio_high: f64,
}

/// Harmonic norm against the classical pair `‖D^s u‖ + ‖⟨x⟩^s u‖`.
pub fn classical_norms(u: &SpectralField, s: f64, bx: BoxSpec) -> Result<NormReport> {
    if !(s >= 0.0) {
        return Err(Error::Parameter(format!("s must be nonnegative, got {s}")));
    }
    if bx.points < 8 || !(bx.half_width > 0.0) {
        return Err(Error::Parameter("box needs a positive width and at least 8 points".into()));
    }
    let harmonic = norm_hs(u, s);
    let fourier = fourier_norm(u, s, bx)?;
    let (moment, pure_moment) = moments(u, s)?;
    let classical = fourier * fourier + moment * moment;
    let h2 = harmonic * harmonic;
    Ok(NormReport {
        harmonic,
        fourier,
        moment,
        pure_moment,
        ratio_low: if classical > 0.0 { h2 / classical } else { 0.0 },
        ratio_high: if h2 > 0.0 { classical / h2 } else { 0.0 },
    })
}

fn fourier_norm(u: &SpectralField, s: f64, bx: BoxSpec) -> Result<f64> {
    let p = bx.points;
    let l = bx.half_width;
    let dx = 2.0 * l / p as f64;
    let nodes: Vec<f64> = (0..p).map(|i| -l + i as f64 * dx).collect();
    let mut values = synthesize_on_nodes(u, &nodes);

    let peak = values.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    if peak == 0.0 {
        return Ok(0.0);
    }
    let mut edge = 0.0f64;
    for i in 0..p {
        for v in [values[(0, i)], values[(i, 0)], values[(p - 1, i)], values[(i, p - 1)]] {
            edge = edge.max(v.norm());
        }
    }
    let measured = edge / peak;
    if measured > bx.tail_tolerance {
        return Err(Error::BoxTooSmall {
            measured,
            tolerance: bx.tail_tolerance,
        });
    }

    let fft = FftPlanner::<f64>::new().plan_fft_forward(p);
    for mut row in values.rows_mut() {
        let mut buf: Vec<Complex64> = row.to_vec();
        fft.process(&mut buf);
        row.iter_mut().zip(buf).for_each(|(a, b)| *a = b);
    }
    for mut col in values.columns_mut() {
        let mut buf: Vec<Complex64> = col.to_vec();
        fft.process(&mut buf);
        col.iter_mut().zip(buf).for_each(|(a, b)| *a = b);
    }

    let dk = std::f64::consts::PI / l;
    let freq = |k: usize| {
        let signed = if k < p / 2 { k as f64 } else { k as f64 - p as f64 };
        signed * dk
    };
    let mut acc = 0.0;
    for ((a, b), c) in values.indexed_iter() {
        let xi2 = freq(a).powi(2) + freq(b).powi(2);
        let mult = if s == 0.0 { 1.0 } else { xi2.powf(s) };
        acc += mult * c.norm_sqr();
    }
    Ok((acc * dx * dx / (p * p) as f64).sqrt())
}

/// (‖⟨x⟩^s u‖, ‖|x|^s u‖) by scale-1 quadrature, generous in Q so the
/// non-polynomial weight is integrated to near machine precision.
fn moments(u: &SpectralField, s: f64) -> Result<(f64, f64)> {
    let q = 2 * u.n_max() + 2 * s.ceil() as usize + 40;
    let grid = Grid::new(q, WeightScale::One, u.n_max() + 1)?;
    let f = grid.to_physical(u)?;
    let bracket = f.integrate(|v, x, y| (1.0 + x * x + y * y).powf(s) * v.norm_sqr());
    let pure = f.integrate(|v, x, y| {
        let r2 = x * x + y * y;
        let w = if s == 0.0 { 1.0 } else { r2.powf(s) };
        w * v.norm_sqr()
    });
    Ok((bracket.sqrt(), pure.sqrt()))
}

/// The operators `L` compared against powers of √A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundOperator {
    D1,
    D2,
    Bracket,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorBound {
    /// ‖L v‖_{ℋ^{level−1}} / ‖v‖_{ℋ^{level}}
    pub ratio: f64,
    /// Norm of `L v` beyond degree n_max+1 (nonzero only for ⟨x⟩).
    pub tail: f64,
}

/// `‖L v‖_{ℋ^{level−1}} / ‖v‖_{ℋ^{level}}` for `level ∈ {1, 2}`.
pub fn operator_bound_ratio(v: &SpectralField, op: BoundOperator, level: u8) -> Result<OperatorBound> {
    if !(1..=2).contains(&level) {
        return Err(Error::UnsupportedOrder(level as usize, "1, 2"));
    }
    let den = norm_hs(v, level as f64);
    if den == 0.0 {
        return Err(Error::ZeroField);
    }
    let (num, tail) = match op {
        BoundOperator::D1 | BoundOperator::D2 => {
            let axis = if op == BoundOperator::D1 { Axis::X1 } else { Axis::X2 };
            let lv = d_dx(v, axis);
            (norm_hs(&lv, level as f64 - 1.0), 0.0)
        }
        BoundOperator::Bracket => bracket_norm(v, level)?,
    };
    Ok(OperatorBound {
        ratio: num / den,
        tail,
    })
}

/// `(‖⟨x⟩v‖_{ℋ^{level−1}}, tail)`. Level 1 is exact through ladders; level 2
/// uses `‖√A w‖² = ‖∇w‖² + ‖|x|w‖²` with `∇(⟨x⟩v) = (x/⟨x⟩)v + ⟨x⟩∇v` on a
/// physical grid.
fn bracket_norm(v: &SpectralField, level: u8) -> Result<(f64, f64)> {
    let n = v.n_max();
    let q = 2 * n + 64;
    let grid = Grid::new(q, WeightScale::One, n + 3)?;
    let fv = grid.to_physical(v)?;
    let exact_sq = v.norm_sq() + radial_moment_sq(v);
    let bracket = |x: f64, y: f64| (1.0 + x * x + y * y).sqrt();

    let mut wv = fv.clone();
    for ((j, l), c) in wv.values_mut().indexed_iter_mut() {
        *c *= bracket(grid.nodes()[j], grid.nodes()[l]);
    }
    let projected = grid.to_spectral(&wv, n + 1)?;
    let tail = (exact_sq - projected.norm_sq()).max(0.0).sqrt();

    if level == 1 {
        return Ok((exact_sq.sqrt(), tail));
    }
    let g1 = grid.to_physical(&d_dx(v, Axis::X1))?;
    let g2 = grid.to_physical(&d_dx(v, Axis::X2))?;
    let nodes = grid.nodes();
    let total = grid.integrate_values(|j, l| {
        let (x, y) = (nodes[j], nodes[l]);
        let b = bracket(x, y);
        let u = fv.values()[(j, l)];
        let d1 = u * (x / b) + g1.values()[(j, l)] * b;
        let d2 = u * (y / b) + g2.values()[(j, l)] * b;
        d1.norm_sqr() + d2.norm_sqr() + (x * x + y * y) * b * b * u.norm_sqr()
    });
    Ok((total.sqrt(), tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize) -> SpectralField {
        SpectralField::from_fn(n, |k1, k2| {
            Complex64::new(1.0 / (1.0 + (k1 + k2) as f64).powi(3), 0.3 * (k1 as f64 - k2 as f64).sin())
        })
    }

    #[test]
    fn first_eigenvalues() {
        assert_eq!(eigenvalue(0), 2);
        assert_eq!(eigenvalue(1), 4);
        assert_eq!(eigenvalue(49), 100);
    }

    #[test]
    fn projector_basics() {
        let g = SpectralField::ground_state(4);
        assert_eq!(project_pi_n(&g, 0), g);
        assert_eq!(project_pi_n(&g, 1).norm_sq(), 0.0);
        let ones = SpectralField::from_fn(6, |_, _| Complex64::new(1.0, 0.0));
        for n in 0..=6 {
            assert_eq!(project_pi_n(&ones, n).norm_sq(), (n + 1) as f64);
        }
        assert_eq!(project_pi_n(&ones, 7).norm_sq(), 0.0);
    }

    #[test]
    fn block_index_sets() {
        let b1 = DyadicBlock::new(1).unwrap();
        assert_eq!(b1.degrees(), 0..=0);
        let b2 = DyadicBlock::new(2).unwrap();
        assert_eq!(b2.degrees(), 1..=6);
        assert_eq!(DyadicBlock::new(4).unwrap().degrees(), 7..=30);
        assert_eq!(DyadicBlock::new(8).unwrap().degrees(), 31..=126);
        assert!(matches!(DyadicBlock::new(3), Err(Error::NotDyadic(3))));
        assert!(DyadicBlock::new(0).is_err());
    }

    #[test]
    fn blocks_partition_degrees() {
        for n in 0..2000 {
            let b = DyadicBlock::containing(n);
            assert!(b.contains(n));
            let e = eigenvalue(n);
            assert!(e >= b.label() * b.label() && e < 4 * b.label() * b.label());
        }
        assert_eq!(DyadicBlock::max_resolvable(32), 4);
        assert_eq!(DyadicBlock::max_resolvable(29), 2);
        assert_eq!(DyadicBlock::max_resolvable(126), 8);
    }

    #[test]
    fn power_examples() {
        let g = SpectralField::ground_state(3);
        assert!(apply_power_a(&g, 2.0).max_abs_diff(&(&g * 2.0)) < 1e-15);
        let u = unit(5);
        assert!(apply_power_a(&u, 0.0).max_abs_diff(&u) < 1e-15);
        assert!(apply_power_a(&apply_power_a(&u, -2.0), 2.0).max_abs_diff(&u) < 1e-14);
        assert!((norm_hs(&g, 3.0) - 2f64.powf(1.5)).abs() < 1e-14);
        let mut w = SpectralField::ground_state(2);
        w.set(1, 0, Complex64::new(1.0, 0.0));
        assert!((norm_hs(&w, 1.0) - 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn ground_state_classical_norms() {
        let g = SpectralField::ground_state(0);
        let r = classical_norms(&g, 1.0, BoxSpec::default()).unwrap();
        assert!((r.fourier.powi(2) - 1.0).abs() < 1e-10, "{}", r.fourier);
        assert!((r.moment.powi(2) - 2.0).abs() < 1e-10);
        assert!((r.harmonic.powi(2) - 2.0).abs() < 1e-14);
        assert!((r.ratio_low - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn small_box_is_rejected() {
        let bx = BoxSpec {
            half_width: 3.0,
            ..Default::default()
        };
        assert!(matches!(
            classical_norms(&SpectralField::ground_state(0), 1.0, bx),
            Err(Error::BoxTooSmall { .. })
        ));
    }

    #[test]
    fn ground_state_operator_bounds() {
        let g = SpectralField::ground_state(0);
        let d = operator_bound_ratio(&g, BoundOperator::D1, 1).unwrap();
        assert!((d.ratio - 0.5).abs() < 1e-14);
        let b = operator_bound_ratio(&g, BoundOperator::Bracket, 1).unwrap();
        assert!((b.ratio - 1.0).abs() < 1e-14);
        assert!(operator_bound_ratio(&SpectralField::zeros(2), BoundOperator::D2, 1).is_err());
    }

    #[test]
    fn bracket_level_two_is_homogeneous() {
        let u = unit(6);
        let a = operator_bound_ratio(&u, BoundOperator::Bracket, 2).unwrap();
        let b = operator_bound_ratio(&(&u * 2.0), BoundOperator::Bracket, 2).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-12 * a.ratio);
        assert!(a.tail > 0.0);
    }
}
