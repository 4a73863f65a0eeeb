//! Uniform grids on `[-L, L]`.

use serde::{Deserialize, Serialize};

use crate::scattering::DiscreteSpectrum;
use crate::{Error, Result};

/// Default half-width of the field grid.
pub const DEFAULT_HALF_WIDTH: f64 = 32.0;
/// Default number of samples (a power of two).
pub const DEFAULT_SAMPLES: usize = 4096;
/// Largest spacing [`GridSpec::covering`] will produce (that of the default grid).
pub const MAX_COVERING_SPACING: f64 = 2.0 * DEFAULT_HALF_WIDTH / (DEFAULT_SAMPLES - 1) as f64;

/// `samples` equally spaced nodes from `-half_width` to `half_width` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub samples: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            half_width: DEFAULT_HALF_WIDTH,
            samples: DEFAULT_SAMPLES,
        }
    }
}

impl GridSpec {
    pub fn new(half_width: f64, samples: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid half-width must be positive, got {half_width}"
            )));
        }
        if samples < 8 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 8 samples, got {samples}"
            )));
        }
        Ok(Self {
            half_width,
            samples,
        })
    }

    /// Smallest default-or-wider grid on which every soliton of the given
    /// spectra decays below `decay_tol` at both edges.
    pub fn covering(spectra: &[&DiscreteSpectrum], decay_tol: f64) -> Self {
        let mut half_width = DEFAULT_HALF_WIDTH;
        for spec in spectra {
            for (j, (&lam, &c)) in spec.eigenvalues().iter().zip(spec.norming()).enumerate() {
                let a = lam.im;
                // interaction phase shift of soliton j against all others
                let shift: f64 = spec
                    .eigenvalues()
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &mu)| ((lam - mu) / (lam - mu.conj())).norm().ln().abs())
                    .sum();
                let center = c.norm().ln().abs() / (2.0 * a) + shift / (2.0 * a);
                let tail = (8.0 * lam.norm().max(a) / decay_tol).ln() / (2.0 * a);
                half_width = half_width.max(center + tail + 2.0);
            }
        }
        let half_width = half_width.ceil();
        let needed = (2.0 * half_width / MAX_COVERING_SPACING).ceil() as usize + 1;
        let samples = needed.next_power_of_two().max(DEFAULT_SAMPLES);
        Self {
            half_width,
            samples,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.samples - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.samples).map(|i| self.node(i)).collect()
    }

    pub fn cells(&self) -> usize {
        self.samples - 1
    }

    pub fn contains(&self, xi: f64) -> bool {
        xi >= -self.half_width - 1e-12 && xi <= self.half_width + 1e-12
    }

    /// Index of the cell `[node(k), node(k+1)]` holding `xi` (clamped).
    pub fn cell_of(&self, xi: f64) -> usize {
        let k = ((xi + self.half_width) / self.spacing()).floor();
        if k < 0.0 {
            0
        } else {
            (k as usize).min(self.cells() - 1)
        }
    }

    pub fn is_power_of_two(&self) -> bool {
        self.samples.is_power_of_two()
    }

    pub(crate) fn same_as(&self, other: &GridSpec) -> bool {
        self.samples == other.samples && (self.half_width - other.half_width).abs() < 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn nodes_span_symmetric_interval() {
        let g = GridSpec::new(20.0, 4096).unwrap();
        assert_eq!(g.node(0), -20.0);
        assert!((g.node(4095) - 20.0).abs() < 1e-12);
        assert_eq!(g.cell_of(-25.0), 0);
        assert_eq!(g.cell_of(25.0), 4094);
        assert_eq!(g.cell_of(g.node(10) + 1e-9), 10);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::new(0.0, 100).is_err());
        assert!(GridSpec::new(10.0, 4).is_err());
        assert!(GridSpec::new(f64::NAN, 100).is_err());
    }

    #[test]
    fn covering_widens_for_slow_solitons() {
        let slow =
            DiscreteSpectrum::imaginary(crate::Chirality::Plus, &[0.3, 0.9], &[1.0, 1.0]).unwrap();
        let g = GridSpec::covering(&[&slow], 1e-10);
        assert!(g.half_width > 38.0);
        assert!(g.spacing() <= MAX_COVERING_SPACING * (1.0 + 1e-12));
        assert!(g.is_power_of_two());
        // 4a e^{-2aL} bound for the slow component
        assert!(4.0 * 0.3 * (-0.6 * g.half_width).exp() < 1e-10);

        let fast = DiscreteSpectrum::new(
            crate::Chirality::Plus,
            vec![Complex64::new(0.0, 0.5)],
            vec![Complex64::new(1.0, 0.0)],
        )
        .unwrap();
        assert_eq!(GridSpec::covering(&[&fast], 1e-10), GridSpec::default());
    }
}
