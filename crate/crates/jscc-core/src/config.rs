//! Scheme configuration.
//!
//! One `SchemeConfig` pins everything the encoder, decoder and bounds share:
//! block length n, power budget P, noise variance, the quantizer resolution
//! beta with its exponent offset eps (tied by beta^2 = snr^(1-eps)), the
//! power headroom delta, the decay constant k of the lattice-decoding error
//! exponent, and the residual variance sigma_E^2.

use crate::error::{Error, Result};
use crate::source::SourceSpec;

/// Parameters of one (n, snr, beta) operating point.
///
/// Construct with [`SchemeConfig::new`] (or [`SchemeConfig::noiseless`]) and
/// adjust via the `with_*` methods; every path re-validates, so a held value
/// always satisfies the invariants (n >= 2, beta > 1, beta^2 = snr^(1-eps)
/// whenever the channel is noisy, sigma_e2 in (0, 1/4]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    /// Channel uses per source letter.
    pub n: usize,
    /// Per-use transmit power P.
    pub power: f64,
    /// Channel noise variance sigma_Z^2. Zero selects the noiseless debug
    /// mode, in which the beta/eps tie is not enforced.
    pub noise_var: f64,
    /// Quantizer resolution (lattice step 1/beta).
    pub beta: f64,
    /// Resolution exponent offset; beta^2 = snr^(1-eps).
    pub epsilon: f64,
    /// Power headroom added to sigma_S^2 when scaling lattice symbols.
    pub delta: f64,
    /// Decay constant of the lattice-decoding error exponent
    /// (error probability ~ exp(-k snr^eps)); used by the eps schedules.
    pub k: f64,
    /// Source variance, copied from the `SourceSpec` at construction.
    pub sigma_s2: f64,
    /// Variance of the final residual E_{n-1}. Defaults to the
    /// high-resolution value 1/12 until a pilot estimate replaces it.
    pub sigma_e2: f64,
}

impl SchemeConfig {
    /// Operating point at the given snr with unit power, eps = 0 (so
    /// beta = sqrt(snr)), delta = 0.1 sigma_S^2 and k = 1/(8 (sigma_S^2 + delta)).
    pub fn new(n: usize, snr: f64, src: &SourceSpec) -> Result<Self> {
        if !snr.is_finite() || snr <= 1.0 {
            return Err(Error::config(format!("snr must exceed 1, got {snr}")));
        }
        let delta = 0.1 * src.variance;
        let cfg = SchemeConfig {
            n,
            power: 1.0,
            noise_var: 1.0 / snr,
            beta: snr.sqrt(),
            epsilon: 0.0,
            delta,
            k: 1.0 / (8.0 * (src.variance + delta)),
            sigma_s2: src.variance,
            sigma_e2: 1.0 / 12.0,
        };
        cfg.validated()
    }

    /// Noiseless debug configuration with an explicit beta; the channel
    /// reproduces its input exactly and the beta/eps tie is vacuous.
    pub fn noiseless(n: usize, beta: f64, src: &SourceSpec) -> Result<Self> {
        let delta = 0.1 * src.variance;
        let cfg = SchemeConfig {
            n,
            power: 1.0,
            noise_var: 0.0,
            beta,
            epsilon: 0.0,
            delta,
            k: 1.0 / (8.0 * (src.variance + delta)),
            sigma_s2: src.variance,
            sigma_e2: 1.0 / 12.0,
        };
        cfg.validated()
    }

    /// Signal-to-noise ratio P / sigma_Z^2 (infinite in noiseless mode).
    #[inline]
    pub fn snr(&self) -> f64 {
        self.power / self.noise_var
    }

    /// Scale factor gamma = sqrt(P / (sigma_S^2 + delta)) applied to lattice
    /// symbols.
    #[inline]
    pub fn lattice_gain(&self) -> f64 {
        (self.power / (self.sigma_s2 + self.delta)).sqrt()
    }

    /// Scale factor sqrt(P / sigma_E^2) applied to the final residual.
    #[inline]
    pub fn residual_gain(&self) -> f64 {
        (self.power / self.sigma_e2).sqrt()
    }

    /// Set eps and derive beta from the tie beta^2 = snr^(1-eps).
    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.beta = self.snr().powf(0.5 * (1.0 - epsilon));
        self.validated()
    }

    /// Set beta and derive eps from the tie.
    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = beta;
        if self.noise_var > 0.0 {
            self.epsilon = 1.0 - (beta * beta).ln() / self.snr().ln();
        }
        self.validated()
    }

    /// Change the power budget, keeping beta and re-deriving eps.
    pub fn with_power(mut self, power: f64) -> Result<Self> {
        self.power = power;
        if self.noise_var > 0.0 {
            self.epsilon = 1.0 - (self.beta * self.beta).ln() / self.snr().ln();
        }
        self.validated()
    }

    /// Change the noise variance, keeping beta and re-deriving eps. Zero
    /// switches to the noiseless debug mode.
    pub fn with_noise_var(mut self, noise_var: f64) -> Result<Self> {
        self.noise_var = noise_var;
        if noise_var > 0.0 {
            self.epsilon = 1.0 - (self.beta * self.beta).ln() / self.snr().ln();
        }
        self.validated()
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        self.delta = delta;
        self.validated()
    }

    pub fn with_k(mut self, k: f64) -> Result<Self> {
        self.k = k;
        self.validated()
    }

    /// Install a residual-variance estimate (typically from a pilot run).
    pub fn with_sigma_e2(mut self, sigma_e2: f64) -> Result<Self> {
        self.sigma_e2 = sigma_e2;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.n < 2 {
            return Err(Error::config(format!("n must be >= 2, got {}", self.n)));
        }
        if !(self.power > 0.0) || !self.power.is_finite() {
            return Err(Error::config(format!("power must be positive, got {}", self.power)));
        }
        if !(self.noise_var >= 0.0) || !self.noise_var.is_finite() {
            return Err(Error::config(format!(
                "noise variance must be nonnegative, got {}",
                self.noise_var
            )));
        }
        if !(self.beta > 1.0) || !self.beta.is_finite() {
            return Err(Error::config(format!("beta must exceed 1, got {}", self.beta)));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::config(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::config(format!("k must be positive, got {}", self.k)));
        }
        if !(self.sigma_s2 > 0.0) || !self.sigma_s2.is_finite() {
            return Err(Error::config(format!(
                "source variance must be positive, got {}",
                self.sigma_s2
            )));
        }
        // E_{n-1} lives in [-1/2, 1/2), so its variance cannot exceed 1/4
        // (allowing a hair of floating-point slack for pilot estimates).
        if !(self.sigma_e2 > 0.0) || self.sigma_e2 > 0.25 + 1e-12 {
            return Err(Error::config(format!(
                "sigma_e2 must lie in (0, 1/4], got {}",
                self.sigma_e2
            )));
        }
        if self.noise_var > 0.0 {
            let snr = self.snr();
            if snr <= 1.0 {
                return Err(Error::config(format!("snr must exceed 1, got {snr}")));
            }
            if !(0.0..1.0).contains(&self.epsilon) {
                return Err(Error::config(format!(
                    "epsilon must lie in [0, 1), got {}",
                    self.epsilon
                )));
            }
            let tied = snr.powf(0.5 * (1.0 - self.epsilon));
            let rel = (self.beta - tied).abs() / tied;
            if rel > 1e-12 {
                return Err(Error::config(format!(
                    "beta^2 = snr^(1-eps) violated: beta {} vs derived {tied} (rel {rel:e})",
                    self.beta
                )));
            }
        }
        Ok(self)
    }
}
