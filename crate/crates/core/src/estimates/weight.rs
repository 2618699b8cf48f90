use crate::error::{Error, Result};

/// Convex C¹ smoothing of |z| at scale 1/M, extended evenly:
/// `ρ_M(z) = (M/2) z² + 1/(2M)` for `|z| ≤ 1/M`, `|z|` beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightRhoM {
    m: f64,
}

impl WeightRhoM {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Parameter(format!("weight scale M must be positive, got {m}")));
        }
        Ok(WeightRhoM { m })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Where the quadratic and linear branches meet.
    pub fn breakpoint(&self) -> f64 {
        1.0 / self.m
    }

    pub fn value(&self, z: f64) -> f64 {
        if z.abs() <= self.breakpoint() {
            0.5 * self.m * z * z + 0.5 / self.m
        } else {
            z.abs()
        }
    }

    pub fn first(&self, z: f64) -> f64 {
        if z.abs() <= self.breakpoint() {
            self.m * z
        } else {
            z.signum()
        }
    }

    /// `M` inside the quadratic zone (closed), `0` outside.
    pub fn second(&self, z: f64) -> f64 {
        if z.abs() <= self.breakpoint() {
            self.m
        } else {
            0.0
        }
    }
}

/// `(ρ_M(z), ρ′_M(z), ρ″_M(z))`.
pub fn rho_m(z: f64, m: f64) -> Result<(f64, f64, f64)> {
    let w = WeightRhoM::new(m)?;
    Ok((w.value(z), w.first(z), w.second(z)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_meet() {
        for &m in &[0.5, 1.0, 3.0, 64.0] {
            let w = WeightRhoM::new(m).unwrap();
            let b = 1.0 / m;
            assert!((w.value(b) - b).abs() < 1e-15);
            assert!((w.value(b * (1.0 + 1e-12)) - w.value(b)).abs() < 1e-10);
            assert!((w.first(b) - 1.0).abs() < 1e-15);
            assert!((w.value(0.0) - 0.5 / m).abs() < 1e-15);
            assert_eq!(w.value(-3.0 * b), w.value(3.0 * b));
        }
    }

    #[test]
    fn second_derivative_is_indicator() {
        let w = WeightRhoM::new(4.0).unwrap();
        assert_eq!(w.second(0.2), 4.0);
        assert_eq!(w.second(-0.2), 4.0);
        assert_eq!(w.second(0.3), 0.0);
        assert!(rho_m(0.0, 0.0).is_err());
        assert!(rho_m(0.0, -1.0).is_err());
    }
}
