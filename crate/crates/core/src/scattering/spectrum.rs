use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::Chirality;
use crate::{Error, Result};

/// Relative size of `Re(lambda)` below which an eigenvalue counts as imaginary.
const IMAG_TOL: f64 = 1e-12;

/// Discrete scattering data of one chirality: eigenvalues in the upper
/// half-plane and the norming constants used for synthesis.
///
/// Each eigenvalue is either purely imaginary with a real constant, or
/// paired with `-conj(lambda)` carrying the conjugate constant.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSpectrum {
    chirality: Chirality,
    eigenvalues: Vec<Complex64>,
    norming: Vec<Complex64>,
}

/// One line of a spectrum file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumRecord {
    pub re: f64,
    pub im: f64,
    pub c: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub c_im: f64,
    pub chirality: Chirality,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl DiscreteSpectrum {
    pub fn new(
        chirality: Chirality,
        eigenvalues: Vec<Complex64>,
        norming: Vec<Complex64>,
    ) -> Result<Self> {
        if eigenvalues.len() != norming.len() {
            return Err(Error::InvalidSpectrum(format!(
                "{} eigenvalues but {} norming constants",
                eigenvalues.len(),
                norming.len()
            )));
        }
        let mut eigenvalues = eigenvalues;
        let mut norming = norming;
        for (j, (lam, c)) in eigenvalues.iter_mut().zip(norming.iter_mut()).enumerate() {
            if !(lam.re.is_finite() && lam.im.is_finite() && c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::InvalidSpectrum(format!("entry {j} is not finite")));
            }
            if lam.im <= 0.0 {
                return Err(Error::InvalidSpectrum(format!(
                    "eigenvalue {lam} is not in the open upper half-plane"
                )));
            }
            if c.norm() == 0.0 {
                return Err(Error::InvalidSpectrum(format!(
                    "norming constant {j} vanishes"
                )));
            }
            if lam.re.abs() <= IMAG_TOL * lam.norm() {
                lam.re = 0.0;
                if c.im.abs() > IMAG_TOL * c.norm() {
                    return Err(Error::InvalidSpectrum(format!(
                        "imaginary eigenvalue {lam} needs a real norming constant, got {c}"
                    )));
                }
                c.im = 0.0;
            }
        }
        for j in 0..eigenvalues.len() {
            for k in 0..j {
                if (eigenvalues[j] - eigenvalues[k]).norm() <= 1e-10 * eigenvalues[j].norm() {
                    return Err(Error::InvalidSpectrum(format!(
                        "eigenvalue {} repeated",
                        eigenvalues[j]
                    )));
                }
            }
        }
        for j in 0..eigenvalues.len() {
            let lam = eigenvalues[j];
            if lam.re == 0.0 {
                continue;
            }
            let partner = (0..eigenvalues.len())
                .find(|&k| (eigenvalues[k] + lam.conj()).norm() <= 1e-10 * lam.norm());
            match partner {
                Some(k) if (norming[k] - norming[j].conj()).norm() <= 1e-10 * norming[j].norm() => {
                }
                Some(_) => {
                    return Err(Error::InvalidSpectrum(format!(
                        "paired eigenvalues {lam} and {} need conjugate norming constants",
                        -lam.conj()
                    )))
                }
                None => {
                    return Err(Error::InvalidSpectrum(format!(
                        "eigenvalue {lam} is neither imaginary nor paired with {}",
                        -lam.conj()
                    )))
                }
            }
        }
        Ok(Self {
            chirality,
            eigenvalues,
            norming,
        })
    }

    pub fn empty(chirality: Chirality) -> Self {
        Self {
            chirality,
            eigenvalues: Vec::new(),
            norming: Vec::new(),
        }
    }

    /// Purely imaginary spectrum `{i a_j}` with real constants `c_j`.
    pub fn imaginary(chirality: Chirality, a: &[f64], c: &[f64]) -> Result<Self> {
        Self::new(
            chirality,
            a.iter().map(|&a| Complex64::new(0.0, a)).collect(),
            c.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        )
    }

    pub fn chirality(&self) -> Chirality {
        self.chirality
    }

    pub fn with_chirality(mut self, chirality: Chirality) -> Self {
        self.chirality = chirality;
        self
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn norming(&self) -> &[Complex64] {
        &self.norming
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn imaginary_count(&self) -> usize {
        self.eigenvalues.iter().filter(|l| l.re == 0.0).count()
    }

    /// Topological charge of the synthesized field: `-sum sgn(c)` over the
    /// imaginary eigenvalues (pairs contribute nothing).
    pub fn expected_charge(&self) -> i64 {
        self.eigenvalues
            .iter()
            .zip(&self.norming)
            .filter(|(l, _)| l.re == 0.0)
            .map(|(_, c)| -(c.re.signum() as i64))
            .sum()
    }

    /// Data of the profile `rho(xi + shift)`: `c_j -> c_j exp(-2i lambda_j shift)`.
    pub fn shifted(&self, shift: f64) -> Self {
        let i = Complex64::i();
        Self {
            chirality: self.chirality,
            eigenvalues: self.eigenvalues.clone(),
            norming: self
                .eigenvalues
                .iter()
                .zip(&self.norming)
                .map(|(l, c)| c * (-2.0 * i * l * shift).exp())
                .collect(),
        }
    }

    pub fn records(&self) -> Vec<SpectrumRecord> {
        self.eigenvalues
            .iter()
            .zip(&self.norming)
            .map(|(l, c)| SpectrumRecord {
                re: l.re,
                im: l.im,
                c: c.re,
                c_im: c.im,
                chirality: self.chirality,
            })
            .collect()
    }

    /// Splits records by chirality into the `(+, -)` spectra.
    pub fn from_records(records: &[SpectrumRecord]) -> Result<(Self, Self)> {
        let pick = |ch: Chirality| {
            let (l, c): (Vec<_>, Vec<_>) = records
                .iter()
                .filter(|r| r.chirality == ch)
                .map(|r| (Complex64::new(r.re, r.im), Complex64::new(r.c, r.c_im)))
                .unzip();
            Self::new(ch, l, c)
        };
        Ok((pick(Chirality::Plus)?, pick(Chirality::Minus)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validation() {
        let p = Chirality::Plus;
        assert!(DiscreteSpectrum::imaginary(p, &[0.5], &[1.0]).is_ok());
        assert!(DiscreteSpectrum::imaginary(p, &[-0.5], &[1.0]).is_err());
        assert!(DiscreteSpectrum::imaginary(p, &[0.5], &[0.0]).is_err());
        assert!(DiscreteSpectrum::imaginary(p, &[0.5, 0.5], &[1.0, 2.0]).is_err());
        assert!(DiscreteSpectrum::new(p, vec![c(0.0, 0.5)], vec![c(1.0, 0.1)]).is_err());
        assert!(DiscreteSpectrum::new(p, vec![c(0.3, 0.5)], vec![c(1.0, 0.0)]).is_err());
        let pair = DiscreteSpectrum::new(
            p,
            vec![c(0.5, 0.4), c(-0.5, 0.4)],
            vec![c(1.0, 0.5), c(1.0, -0.5)],
        );
        assert!(pair.is_ok());
        assert_eq!(pair.unwrap().expected_charge(), 0);
        assert!(DiscreteSpectrum::new(
            p,
            vec![c(0.5, 0.4), c(-0.5, 0.4)],
            vec![c(1.0, 0.5), c(1.0, 0.5)]
        )
        .is_err());
    }

    #[test]
    fn charge_from_signs() {
        let s = DiscreteSpectrum::imaginary(Chirality::Minus, &[0.3, 0.9, 0.5], &[1.0, 2.0, -1.0])
            .unwrap();
        assert_eq!(s.expected_charge(), -1);
        assert_eq!(s.imaginary_count(), 3);
    }

    #[test]
    fn records_round_trip() {
        let s = DiscreteSpectrum::new(
            Chirality::Minus,
            vec![c(0.5, 0.4), c(-0.5, 0.4), c(0.0, 0.9)],
            vec![c(1.0, 0.5), c(1.0, -0.5), c(-2.0, 0.0)],
        )
        .unwrap();
        let json = serde_json::to_string(&s.records()).unwrap();
        let back: Vec<SpectrumRecord> = serde_json::from_str(&json).unwrap();
        let (plus, minus) = DiscreteSpectrum::from_records(&back).unwrap();
        assert!(plus.is_empty());
        assert_eq!(minus, s);
        assert_eq!(json.matches("c_im").count(), 2);
    }
}
