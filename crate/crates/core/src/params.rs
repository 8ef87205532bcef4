use crate::error::{Error, Result};

/// Dimension, nonlinearity exponent and frequency of the focusing NLS
/// `i u_t + Δu + |u|^{p-1} u = 0` together with the action frequency ω.
///
/// Valid only in the mass-supercritical, energy-subcritical window
/// `1 + 4/d < p < 1 + 4/(d-2)` (upper bound absent for d ≤ 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NlsParameters {
    pub dim: usize,
    pub p: f64,
    pub omega: f64,
}

impl NlsParameters {
    pub fn new(dim: usize, p: f64, omega: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameters(format!("dimension {dim} not in 1..=3")));
        }
        if !(p.is_finite() && omega.is_finite()) {
            return Err(Error::InvalidParameters("non-finite p or omega".into()));
        }
        let d = dim as f64;
        if p <= 1.0 + 4.0 / d {
            return Err(Error::InvalidParameters(format!(
                "p = {p} is not mass-supercritical (need p > {})",
                1.0 + 4.0 / d
            )));
        }
        if dim >= 3 && p >= 1.0 + 4.0 / (d - 2.0) {
            return Err(Error::InvalidParameters(format!(
                "p = {p} is not energy-subcritical (need p < {})",
                1.0 + 4.0 / (d - 2.0)
            )));
        }
        if omega <= 0.0 {
            return Err(Error::InvalidParameters(format!("omega = {omega} must be positive")));
        }
        Ok(Self { dim, p, omega })
    }

    pub fn d(&self) -> f64 {
        self.dim as f64
    }

    /// `δ = 2(p-1-4/d) / (d(p-1+4/d))`, the gap constant on the `K ≥ 0` side.
    pub fn delta(&self) -> f64 {
        let d = self.d();
        2.0 * (self.p - 1.0 - 4.0 / d) / (d * (self.p - 1.0 + 4.0 / d))
    }

    /// Coefficient `d(p-1)/(d(p-1)-4)` bounding the H¹-type quantity by the action.
    pub fn sandwich_constant(&self) -> f64 {
        let d = self.d();
        d * (self.p - 1.0) / (d * (self.p - 1.0) - 4.0)
    }

    /// Time exponent α of the space-time diagnostic norm `L^α_t L^r_x`.
    pub fn scatter_alpha(&self) -> f64 {
        let d = self.d();
        2.0 * (self.p - 1.0) * (self.p + 1.0) / (4.0 - (d - 2.0) * (self.p - 1.0))
    }

    /// Space exponent r = p + 1 of the diagnostic norm.
    pub fn scatter_r(&self) -> f64 {
        self.p + 1.0
    }

    /// Exponent of the exact frequency scaling `l_ω = ω^e · l_1`.
    pub fn action_scaling_exponent(&self) -> f64 {
        2.0 / (self.p - 1.0) - (self.d() - 2.0) / 2.0
    }

    /// Decay rate √ω of the ground state tail; its inverse is used as the
    /// soliton width throughout.
    pub fn width(&self) -> f64 {
        1.0 / self.omega.sqrt()
    }

    /// `|u|^{p-1}` from `|u|²`.
    pub fn nonlinear_factor(&self, modulus_sq: f64) -> f64 {
        let half = 0.5 * (self.p - 1.0);
        if half.fract() == 0.0 && half <= 16.0 {
            modulus_sq.powi(half as i32)
        } else {
            modulus_sq.powf(half)
        }
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.dim, self.p, omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissible_window() {
        assert!(NlsParameters::new(1, 7.0, 1.0).is_ok());
        assert!(NlsParameters::new(2, 5.0, 1.0).is_ok());
        assert!(NlsParameters::new(3, 3.0, 1.0).is_ok());
        assert!(NlsParameters::new(1, 5.0, 1.0).is_err());
        assert!(NlsParameters::new(3, 5.0, 1.0).is_err());
        assert!(NlsParameters::new(3, 3.0, 0.0).is_err());
        assert!(NlsParameters::new(4, 2.0, 1.0).is_err());
    }

    #[test]
    fn delta_is_positive() {
        for (d, p) in [(1, 7.0), (2, 5.0), (3, 3.0), (1, 5.5)] {
            let params = NlsParameters::new(d, p, 1.0).unwrap();
            assert!(params.delta() > 0.0);
        }
        let p = NlsParameters::new(1, 7.0, 1.0).unwrap();
        // 2(6-4)/(1*(6+4)) = 0.4
        assert!((p.delta() - 0.4).abs() < 1e-15);
        assert!((p.sandwich_constant() - 3.0).abs() < 1e-15);
        assert!((p.scatter_alpha() - 9.6).abs() < 1e-12);
    }
}
