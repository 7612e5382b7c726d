//! The suboptimal receiver: per-use minimum-distance decoding of the lattice
//! symbols, a linear (LMMSE) estimate of the analog residual, and the same
//! Horner recombination the encoder inverts.
//!
//! ```text
//! Qhat_i = Int(beta y_i / gamma) / beta          (i = 1..n-1)
//! Ehat   = alpha y_n,  alpha = sqrt(P sigma_E^2) / (P + sigma_Z^2)
//! Shat   = sum_i beta^-(i-1) Qhat_i + beta^-(n-1) Ehat
//! ```
//!
//! The squared error splits componentwise,
//! mse = sum_i beta^-2(i-1) Err_Q,i + beta^-2(n-1) Err_E, exactly in
//! expectation (cross terms vanish by independence); [`ErrorAccumulator`]
//! measures both sides of that identity on a batch.

use crate::accum::CompensatedSum;
use crate::channel::ChannelOutput;
use crate::codec::Codeword;
use crate::config::SchemeConfig;
use crate::error::{Error, Result};

/// Decoded quantities for one letter. `e_hat` is the raw linear estimate —
/// not clamped to the residual's support unless explicitly requested, since
/// clamping would change the estimator being analyzed.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub q_hat: Vec<f64>,
    pub e_hat: f64,
    pub s_hat: f64,
}

/// Receiver variants. The defaults match the analyzed estimator: unclamped
/// residual, LMMSE gain from the zero-mean model moments.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecoderOptions {
    /// Clamp `e_hat` into [-1/2, 1/2] (exploration only; default off).
    pub clamp_residual: bool,
    /// Override the LMMSE gain, e.g. with [`empirical_lmmse_gain`].
    /// `None` uses the model gain of [`lmmse_gain`].
    pub lmmse_gain: Option<f64>,
}

/// Minimum-distance estimate of one lattice symbol: the nearest point of
/// gamma Z / beta to y_i, returned on the source scale (multiple of 1/beta).
/// Ties at cell midpoints resolve upward, mirroring the encoder's rounding.
#[inline]
pub fn ml_decode_q(y_i: f64, cfg: &SchemeConfig) -> f64 {
    let gamma = cfg.lattice_gain();
    (cfg.beta * y_i / gamma + 0.5).floor() / cfg.beta
}

/// LMMSE gain under the model moments E[E Y_n] = sqrt(P sigma_E^2) and
/// E[Y_n^2] = P + sigma_Z^2. At zero noise it reduces to sqrt(sigma_E^2/P),
/// the exact inverse of the residual modulation.
#[inline]
pub fn lmmse_gain(cfg: &SchemeConfig) -> f64 {
    (cfg.power * cfg.sigma_e2).sqrt() / (cfg.power + cfg.noise_var)
}

/// LMMSE gain with E[Y_n^2] replaced by its batch estimate. The cross-moment
/// stays on the model value: the receiver never observes E_{n-1}.
pub fn empirical_lmmse_gain(cfg: &SchemeConfig, y_n: &[f64]) -> Result<f64> {
    if y_n.is_empty() {
        return Err(Error::arg("empirical gain needs a non-empty batch".to_string()));
    }
    let mut acc = CompensatedSum::new();
    for &y in y_n {
        acc.add(y * y);
    }
    let second_moment = acc.value() / y_n.len() as f64;
    if !(second_moment > 0.0) {
        return Err(Error::arg("empirical gain needs a nonzero second moment".to_string()));
    }
    Ok((cfg.power * cfg.sigma_e2).sqrt() / second_moment)
}

/// Linear estimate of the final residual from the last channel output.
#[inline]
pub fn lmmse_decode_e(y_n: f64, cfg: &SchemeConfig) -> f64 {
    lmmse_gain(cfg) * y_n
}

/// Full receiver with the default options.
pub fn decode(y: &ChannelOutput, cfg: &SchemeConfig) -> Result<DecodeResult> {
    decode_with(y, cfg, &DecoderOptions::default())
}

/// Full receiver: symbol decisions on y_1..y_{n-1}, residual estimate from
/// y_n, recombined inner-to-outer.
pub fn decode_with(
    y: &ChannelOutput,
    cfg: &SchemeConfig,
    opts: &DecoderOptions,
) -> Result<DecodeResult> {
    if y.y.len() != cfg.n {
        return Err(Error::DimensionMismatch { expected: cfg.n, got: y.y.len() });
    }
    let q_hat: Vec<f64> = y.y[..cfg.n - 1].iter().map(|&yi| ml_decode_q(yi, cfg)).collect();
    let gain = opts.lmmse_gain.unwrap_or_else(|| lmmse_gain(cfg));
    let mut e_hat = gain * y.y[cfg.n - 1];
    if opts.clamp_residual {
        e_hat = e_hat.clamp(-0.5, 0.5);
    }
    let mut s_hat = e_hat;
    for qi in q_hat.iter().rev() {
        s_hat = qi + s_hat / cfg.beta;
    }
    Ok(DecodeResult { q_hat, e_hat, s_hat })
}

/// Batch error statistics: the componentwise energies, their weighted
/// recombination, the direct sample MSE, and a 95% half-width on the latter.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// Err_Q,i = mean of (Q_i - Qhat_i)^2, one entry per lattice level.
    pub err_q: Vec<f64>,
    /// Err_E = mean of (E_{n-1} - Ehat)^2.
    pub err_e: f64,
    /// sum_i beta^-2(i-1) err_q[i] + beta^-2(n-1) err_e.
    pub mse_components: f64,
    /// Sample mean of (S - Shat)^2.
    pub mse_direct: f64,
    /// 95% half-width on `mse_direct` (delta method on the squared errors).
    pub ci_halfwidth: f64,
    /// Standard error of the per-sample gap (components minus direct), for
    /// testing that the decomposition identity holds on matched samples.
    pub gap_se: f64,
    pub samples: u64,
}

/// Streaming accumulator behind [`decompose_error`]. Partitions of a batch
/// may be accumulated separately and merged; merging in a fixed order keeps
/// results bit-identical regardless of how the batch was split.
#[derive(Debug, Clone)]
pub struct ErrorAccumulator {
    n: usize,
    count: u64,
    err_q: Vec<CompensatedSum>,
    err_e: CompensatedSum,
    direct: CompensatedSum,
    direct_sq: CompensatedSum,
    gap: CompensatedSum,
    gap_sq: CompensatedSum,
}

impl ErrorAccumulator {
    pub fn new(n: usize) -> Self {
        ErrorAccumulator {
            n,
            count: 0,
            err_q: vec![CompensatedSum::new(); n - 1],
            err_e: CompensatedSum::new(),
            direct: CompensatedSum::new(),
            direct_sq: CompensatedSum::new(),
            gap: CompensatedSum::new(),
            gap_sq: CompensatedSum::new(),
        }
    }

    pub fn push(&mut self, s: f64, cw: &Codeword, dr: &DecodeResult, cfg: &SchemeConfig) -> Result<()> {
        if cw.q.len() != self.n - 1 || dr.q_hat.len() != self.n - 1 {
            return Err(Error::DimensionMismatch { expected: self.n - 1, got: cw.q.len().min(dr.q_hat.len()) });
        }
        let mut components = 0.0;
        let mut weight = 1.0;
        let w_step = 1.0 / (cfg.beta * cfg.beta);
        for (i, acc) in self.err_q.iter_mut().enumerate() {
            let d = cw.q[i] - dr.q_hat[i];
            acc.add(d * d);
            components += weight * d * d;
            weight *= w_step;
        }
        let de = cw.e_final - dr.e_hat;
        self.err_e.add(de * de);
        components += weight * de * de;

        let d = s - dr.s_hat;
        self.direct.add(d * d);
        self.direct_sq.add(d * d * d * d);

        let gap = components - d * d;
        self.gap.add(gap);
        self.gap_sq.add(gap * gap);
        self.count += 1;
        Ok(())
    }

    /// Fold another partition in. Callers must merge partitions in one fixed
    /// order (e.g. ascending chunk index) for bit-stable totals.
    pub fn merge(&mut self, other: &ErrorAccumulator) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.err_q.iter_mut().zip(&other.err_q) {
            a.merge(b);
        }
        self.err_e.merge(&other.err_e);
        self.direct.merge(&other.direct);
        self.direct_sq.merge(&other.direct_sq);
        self.gap.merge(&other.gap);
        self.gap_sq.merge(&other.gap_sq);
        self.count += other.count;
    }

    pub fn samples(&self) -> u64 {
        self.count
    }

    pub fn finish(&self, cfg: &SchemeConfig) -> Result<ErrorReport> {
        if self.count == 0 {
            return Err(Error::arg("error decomposition needs a non-empty batch".to_string()));
        }
        let nf = self.count as f64;
        let err_q: Vec<f64> = self.err_q.iter().map(|a| a.value() / nf).collect();
        let err_e = self.err_e.value() / nf;

        let mut components = 0.0;
        let mut weight = 1.0;
        let w_step = 1.0 / (cfg.beta * cfg.beta);
        for &eq in &err_q {
            components += weight * eq;
            weight *= w_step;
        }
        components += weight * err_e;

        let mse_direct = self.direct.value() / nf;
        let var_direct =
            ((self.direct_sq.value() - nf * mse_direct * mse_direct) / (nf - 1.0).max(1.0)).max(0.0);
        let mean_gap = self.gap.value() / nf;
        let var_gap = ((self.gap_sq.value() - nf * mean_gap * mean_gap) / (nf - 1.0).max(1.0)).max(0.0);

        Ok(ErrorReport {
            err_q,
            err_e,
            mse_components: components,
            mse_direct,
            ci_halfwidth: 1.96 * (var_direct / nf).sqrt(),
            gap_se: (var_gap / nf).sqrt(),
            samples: self.count,
        })
    }
}

/// Componentwise error statistics over a decoded batch (all under one cfg).
pub fn decompose_error(
    batch: &[(f64, Codeword, DecodeResult)],
    cfg: &SchemeConfig,
) -> Result<ErrorReport> {
    let mut acc = ErrorAccumulator::new(cfg.n);
    for (s, cw, dr) in batch {
        acc.push(*s, cw, dr, cfg)?;
    }
    acc.finish(cfg)
}
