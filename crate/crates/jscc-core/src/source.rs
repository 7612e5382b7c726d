//! Analog source models.
//!
//! A source is described by the handful of constants the rest of the crate
//! needs: its variance, its differential entropy (for the OPTA constant), and
//! a density certificate — an interval `[a, b]` together with a lower bound
//! `p_min` on the density over that interval — which is what the
//! displacement-testing lower bounds integrate against.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Built-in source families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Gaussian,
    Uniform,
}

/// A memoryless analog source plus the certificates used by the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    /// Source variance sigma_S^2.
    pub variance: f64,
    /// Differential entropy h(S) in nats.
    pub diff_entropy: f64,
    /// Interval [a, b] on which the density certificate holds.
    pub ziv_interval: (f64, f64),
    /// Lower bound on the density over `ziv_interval`.
    pub p_min: f64,
}

const TWO_PI_E: f64 = 2.0 * std::f64::consts::PI * std::f64::consts::E;

impl SourceSpec {
    /// Zero-mean Gaussian with the given variance. The density certificate
    /// uses [-sigma, sigma] with p_min equal to the density at one standard
    /// deviation.
    pub fn gaussian(variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::arg(format!("source variance must be positive, got {variance}")));
        }
        let sigma = variance.sqrt();
        Ok(SourceSpec {
            kind: SourceKind::Gaussian,
            variance,
            diff_entropy: 0.5 * (TWO_PI_E * variance).ln(),
            ziv_interval: (-sigma, sigma),
            p_min: (-0.5f64).exp() / (2.0 * std::f64::consts::PI * variance).sqrt(),
        })
    }

    /// Unit-variance Gaussian, the default source.
    pub fn gaussian_unit() -> Self {
        SourceSpec::gaussian(1.0).expect("unit variance is valid")
    }

    /// Uniform on [-sqrt(3 v), sqrt(3 v)], which has variance v. The density
    /// is constant, so the certificate covers the whole support exactly.
    pub fn uniform(variance: f64) -> Result<Self> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::arg(format!("source variance must be positive, got {variance}")));
        }
        let half = (3.0 * variance).sqrt();
        Ok(SourceSpec {
            kind: SourceKind::Uniform,
            variance,
            diff_entropy: (2.0 * half).ln(),
            ziv_interval: (-half, half),
            p_min: 1.0 / (2.0 * half),
        })
    }

    /// Unit-variance uniform source on [-sqrt(3), sqrt(3)].
    pub fn uniform_unit() -> Self {
        SourceSpec::uniform(1.0).expect("unit variance is valid")
    }

    /// Draw one source letter.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            SourceKind::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                z * self.variance.sqrt()
            }
            SourceKind::Uniform => {
                let half = (3.0 * self.variance).sqrt();
                rng.gen_range(-half..half)
            }
        }
    }

    /// Probability density at `s`.
    pub fn density(&self, s: f64) -> f64 {
        match self.kind {
            SourceKind::Gaussian => {
                (-0.5 * s * s / self.variance).exp()
                    / (2.0 * std::f64::consts::PI * self.variance).sqrt()
            }
            SourceKind::Uniform => {
                let half = (3.0 * self.variance).sqrt();
                if (-half..=half).contains(&s) {
                    1.0 / (2.0 * half)
                } else {
                    0.0
                }
            }
        }
    }

    /// The constant c = exp(2 h(S)) / (2 pi e) in the optimum-performance
    /// bound c (1+snr)^-n. Equals 1 for a unit-variance Gaussian.
    pub fn opta_constant(&self) -> f64 {
        (2.0 * self.diff_entropy).exp() / TWO_PI_E
    }

    /// Whether `s` lies in the support of the density.
    pub fn in_support(&self, s: f64) -> bool {
        match self.kind {
            SourceKind::Gaussian => s.is_finite(),
            SourceKind::Uniform => {
                let half = (3.0 * self.variance).sqrt();
                s.is_finite() && (-half..=half).contains(&s)
            }
        }
    }
}
