//! Deterministic initial data.
//!
//! Every random family draws from a SplitMix64 stream seeded explicitly, so a
//! seed fully determines the coefficients.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::hermite::SpectralField;
use crate::spectral::{eigenvalue, DyadicBlock};

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `seed ⊕ hash(parts)`.
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let h = parts.iter().fold(0x6a09_e667_f3bc_c908u64, |acc, &p| mix64(acc ^ p));
    seed ^ h
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn normalized(mut u: SpectralField, norm: f64) -> SpectralField {
    let n = u.norm();
    if n > 0.0 {
        u = &u * (norm / n);
    }
    u
}

/// Gaussian coefficients with `(2n+2)^{−r}` decay on degrees `≤ max_degree`,
/// scaled to L² norm `norm`.
pub fn random_smooth(n_max: usize, max_degree: usize, r: f64, norm: f64, seed: u64) -> SpectralField {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let u = SpectralField::from_fn(n_max, |k1, k2| {
        let z = complex_gaussian(&mut rng);
        let n = k1 + k2;
        if n > max_degree {
            Complex64::new(0.0, 0.0)
        } else {
            z * (eigenvalue(n) as f64).powf(-r)
        }
    });
    normalized(u, norm)
}

/// Gaussian coefficients on the degrees of the dyadic block `label`, unit L².
pub fn random_block(label: u64, n_max: usize, seed: u64) -> Result<SpectralField> {
    let block = DyadicBlock::new(label)?;
    if !block.resolvable(n_max) {
        return Err(Error::Unresolvable {
            n: label,
            n_max,
            max_resolvable: DyadicBlock::max_resolvable(n_max),
        });
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let u = SpectralField::from_fn(n_max, |k1, k2| {
        let z = complex_gaussian(&mut rng);
        if block.contains(k1 + k2) {
            z
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(normalized(u, 1.0))
}

/// Named initial-data families.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    GroundState,
    Mode { k1: usize, k2: usize },
    RandomSmooth { decay: f64, max_degree: usize, seed: u64 },
    Block { label: u64, seed: u64 },
}

impl InitialData {
    /// The datum at truncation `n_max`, scaled to L² norm `amplitude`.
    pub fn build(&self, n_max: usize, amplitude: f64) -> Result<SpectralField> {
        let u = match *self {
            InitialData::GroundState => SpectralField::ground_state(n_max),
            InitialData::Mode { k1, k2 } => {
                if k1 + k2 > n_max {
                    return Err(Error::Parameter(format!(
                        "mode ({k1},{k2}) exceeds n_max={n_max}"
                    )));
                }
                SpectralField::mode(k1, k2, n_max)
            }
            InitialData::RandomSmooth { decay, max_degree, seed } => {
                random_smooth(n_max, max_degree.min(n_max), decay, 1.0, seed)
            }
            InitialData::Block { label, seed } => random_block(label, n_max, seed)?,
        };
        Ok(&u * amplitude)
    }
}
