use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Dimension data of the Heisenberg group `H_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupParams {
    n: usize,
}

impl GroupParams {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("group dimension n must be positive".into()));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Homogeneous dimension `Q = 2n + 2`.
    pub fn homogeneous_dim(&self) -> usize {
        2 * self.n + 2
    }

    /// Plancherel constant `c_n = (2π)^{-(3n+1)}`.
    pub fn plancherel_constant(&self) -> f64 {
        (2.0 * PI).powi(-(3 * self.n as i32 + 1))
    }

    /// `(2π)^{-(n+1)}`: the measure constant that makes the Plancherel
    /// identity hold for the Schrödinger representation
    /// `π_λ(x,y,τ)φ(w) = e^{iλ(τ+x·y/2)} e^{i sign(λ)√|λ| y·w} φ(w+√|λ| x)`
    /// with Lebesgue measure on `ℝ^{2n+1}`. Differs from
    /// [`Self::plancherel_constant`] by `(2π)^{2n}`.
    pub fn lebesgue_plancherel_constant(&self) -> f64 {
        (2.0 * PI).powi(-(self.n as i32 + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let g = GroupParams::new(1).unwrap();
        assert_eq!(g.homogeneous_dim(), 4);
        assert!((g.plancherel_constant() - (2.0 * PI).powi(-4)).abs() < 1e-20);
        let g = GroupParams::new(3).unwrap();
        assert_eq!(g.homogeneous_dim(), 8);
        assert!(g.plancherel_constant() > 0.0);
        assert!(GroupParams::new(0).is_err());
    }
}
