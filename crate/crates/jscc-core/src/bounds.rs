//! Distortion lower bounds and the resolution-schedule solver.
//!
//! Four bound families are evaluated at finite snr, all as valid
//! inequalities (not just asymptotic orders):
//!
//! * OPTA: c (1+snr)^-n with c = exp(2 h(S)) / (2 pi e) — binds any scheme.
//! * Displacement test ("Ziv" construction): p_min (Delta/2)^2
//!   ∫ Q(d(s,Delta) / 2 sigma_Z) ds over the certificate interval, where
//!   d(s,Delta) = ||X(s) - X(s+Delta)|| is the encoder distance. Numeric,
//!   with quadrature panels split at the encoder's representation
//!   breakpoints where d jumps.
//! * Subcell bound: the displacement test specialized to in-cell pairs,
//!   Delta = 1/(sqrt(snr) beta^(n-1)), in closed form:
//!   (p_min/4) snr^(-n+(n-1)eps) Q(1/(2 sigma_E)) (B-A-Delta)(1 - snr^-1/2).
//! * Lattice-step bound: Delta = 1/beta, in closed form:
//!   (p_min/4) beta^-2 Q(sqrt(snr/(sigma_S^2+delta))/(2 beta)) (B-A-1/beta),
//!   with the tail-equivalent asymptote c snr^(-1+eps/2) exp(-snr^eps/k),
//!   k = 8 (sigma_S^2 + delta).
//!
//! With beta^2 = snr^(1-eps), the subcell bound decays like
//! l1 = snr^(-n+(n-1)eps) and the lattice-step bound like
//! l2 = snr^(-1+eps/2) exp(-snr^eps/k): l1 falls with eps, l2 grows. The
//! balance point l1 = l2 has the closed form
//! snr^(eps*) = b k W(snr^((n-1)/b) / (b k)), b = n - 3/2, via the Lambert W
//! function, and forces mse = Omega(snr^-n (ln snr)^(n-1)) — the scaling
//! this crate reproduces by simulation.

use std::f64::consts::{E, SQRT_2};

use crate::codec::{encode_modulate, rep_breakpoints};
use crate::config::SchemeConfig;
use crate::error::{Error, Result};
use crate::source::SourceSpec;

/// Hard cap on enumerated representation breakpoints per quadrature call;
/// beyond it the integrator falls back to adaptive refinement alone.
const BREAKPOINT_CAP: usize = 262_144;

/// Upper Gaussian tail Q(x) = P(N(0,1) > x).
#[inline]
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// Principal-branch Lambert W on x > 0: the unique w > 0 with w e^w = x.
///
/// Newton iteration on the log form w + ln w = ln x (immune to e^w overflow),
/// started from ln(1+x); converges quadratically to machine precision.
pub fn lambert_w(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::arg(format!("lambert_w requires x > 0, got {x}")));
    }
    let ln_x = x.ln();
    let mut w = x.ln_1p();
    if w <= 0.0 {
        // Subnormal x: ln_1p underflows to x itself; the series W = x - x^2
        // is already exact at this scale.
        return Ok(x);
    }
    for _ in 0..50 {
        let g = w + w.ln() - ln_x;
        let step = g * w / (w + 1.0);
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * w.abs() {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence(format!("lambert_w failed to converge at x={x}")))
}

/// The channel-capacity distortion floor c (1+snr)^-n, the bound no scheme
/// of any delay can beat.
pub fn opta_bound(snr: f64, n: usize, src: &SourceSpec) -> Result<f64> {
    if !(snr >= 0.0) || !snr.is_finite() {
        return Err(Error::arg(format!("opta bound requires snr >= 0, got {snr}")));
    }
    if n == 0 {
        return Err(Error::arg("opta bound requires n >= 1".to_string()));
    }
    Ok(src.opta_constant() * (1.0 + snr).powi(-(n as i32)))
}

/// The reference decay snr^-n (ln snr)^(n-1) (arbitrary constant 1).
pub fn scaling_reference(snr: f64, n: usize) -> Result<f64> {
    if !(snr > 1.0) {
        return Err(Error::arg(format!("scaling reference requires snr > 1, got {snr}")));
    }
    if n == 0 {
        return Err(Error::arg("scaling reference requires n >= 1".to_string()));
    }
    Ok(snr.powi(-(n as i32)) * snr.ln().powi(n as i32 - 1))
}

/// The achievability schedule eps(snr) = ln((n/k) ln snr) / ln snr, i.e.
/// snr^eps = (n/k) ln snr. `k` is the multiplying decay constant of the
/// lattice error (error proportional to exp(-k snr^eps)).
pub fn achievability_eps(snr: f64, n: usize, k: f64) -> Result<f64> {
    if !(snr > E) || !snr.is_finite() {
        return Err(Error::arg(format!("achievability schedule requires snr > e, got {snr}")));
    }
    if n == 0 {
        return Err(Error::arg("achievability schedule requires n >= 1".to_string()));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::arg(format!("decay constant must be positive, got {k}")));
    }
    let ln_snr = snr.ln();
    Ok(((n as f64 / k) * ln_snr).ln() / ln_snr)
}

/// A closed-form bound evaluated at finite snr: either a number or a signal
/// that the bound's positivity precondition has not kicked in yet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundValue {
    Valid(f64),
    NotYetValid,
}

impl BoundValue {
    pub fn value(self) -> Option<f64> {
        match self {
            BoundValue::Valid(v) => Some(v),
            BoundValue::NotYetValid => None,
        }
    }

    pub fn is_valid(self) -> bool {
        matches!(self, BoundValue::Valid(_))
    }
}

fn check_bound_args(snr: f64, n: usize, eps: f64) -> Result<()> {
    if !(snr > 1.0) || !snr.is_finite() {
        return Err(Error::arg(format!("bound requires snr > 1, got {snr}")));
    }
    if n < 2 {
        return Err(Error::arg("n must be >= 2".to_string()));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::arg(format!("bound requires 0 <= eps < 1, got {eps}")));
    }
    Ok(())
}

/// The in-cell displacement Delta = 1/(sqrt(snr) beta^(n-1)) used by the
/// subcell bound, with beta^2 = snr^(1-eps).
pub fn subcell_displacement(snr: f64, n: usize, eps: f64) -> f64 {
    let beta = snr.powf(0.5 * (1.0 - eps));
    1.0 / (snr.sqrt() * beta.powi(n as i32 - 1))
}

/// Closed-form displacement bound over in-cell pairs:
/// (p_min/4) snr^(-n+(n-1)eps) Q(1/(2 sigma_E)) (B-A-Delta)(1-snr^-1/2).
/// Decays like snr^(-n+(n-1)eps): the incentive to keep eps small.
pub fn subcell_bound(
    snr: f64,
    n: usize,
    eps: f64,
    src: &SourceSpec,
    sigma_e2: f64,
) -> Result<BoundValue> {
    check_bound_args(snr, n, eps)?;
    if !(sigma_e2 > 0.0) || !sigma_e2.is_finite() {
        return Err(Error::arg(format!("sigma_e2 must be positive, got {sigma_e2}")));
    }
    let (a, b) = src.ziv_interval;
    let delta = subcell_displacement(snr, n, eps);
    let t1 = (b - a) - delta;
    let t2 = 1.0 - 1.0 / snr.sqrt();
    if t1 <= 0.0 || t2 <= 0.0 {
        return Ok(BoundValue::NotYetValid);
    }
    let decay = snr.powf(-(n as f64) + (n as f64 - 1.0) * eps);
    Ok(BoundValue::Valid(
        0.25 * src.p_min * decay * gaussian_q(0.5 / sigma_e2.sqrt()) * t1 * t2,
    ))
}

/// Closed-form displacement bound at one lattice step (Delta = 1/beta):
/// (p_min/4) beta^-2 Q(sqrt(snr/(sigma_S^2+delta))/(2 beta)) (B-A-1/beta).
/// With beta^2 = snr^(1-eps) the Q-argument is sqrt(snr^eps/(sigma_S^2 +
/// delta))/2, so at eps = 0 the bound decays only as snr^-1 — the
/// resolution ceiling that rules out eps = 0.
pub fn lattice_step_bound(
    snr: f64,
    n: usize,
    eps: f64,
    src: &SourceSpec,
    delta: f64,
) -> Result<BoundValue> {
    check_bound_args(snr, n, eps)?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::arg(format!("power margin delta must be positive, got {delta}")));
    }
    let (a, b) = src.ziv_interval;
    let beta = snr.powf(0.5 * (1.0 - eps));
    let step = 1.0 / beta;
    if step >= b - a {
        return Ok(BoundValue::NotYetValid);
    }
    let q_arg = (snr / (src.variance + delta)).sqrt() / (2.0 * beta);
    Ok(BoundValue::Valid(
        0.25 * src.p_min * step * step * gaussian_q(q_arg) * (b - a - step),
    ))
}

/// Tail-equivalent form of [`lattice_step_bound`]:
/// c snr^(-1+eps/2) exp(-snr^eps/k) with k = 8 (sigma_S^2 + delta) and
/// c = (p_min (B-A)/2) sqrt((sigma_S^2+delta)/(2 pi)). Accurate once the
/// Q-argument is a few units; exact-to-asymptotic agreement tightens like
/// one over the argument squared.
pub fn lattice_step_asymptotic(
    snr: f64,
    n: usize,
    eps: f64,
    src: &SourceSpec,
    delta: f64,
) -> Result<f64> {
    check_bound_args(snr, n, eps)?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::arg(format!("power margin delta must be positive, got {delta}")));
    }
    let (a, b) = src.ziv_interval;
    let s2 = src.variance + delta;
    let k = 8.0 * s2;
    let c = 0.5 * src.p_min * (b - a) * (s2 / (2.0 * std::f64::consts::PI)).sqrt();
    Ok(c * snr.powf(-1.0 + 0.5 * eps) * (-snr.powf(eps) / k).exp())
}

/// The solved balance point between the two decay families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsSolution {
    pub snr: f64,
    pub eps_star: f64,
    /// Exponent -(n-1) of the balance equation's left side.
    pub a: f64,
    /// Coefficient b = n - 3/2 multiplying eps.
    pub b: f64,
    /// Threshold xi = ln(k/2)/ln snr below which the lattice-step family
    /// still increases in eps.
    pub xi: f64,
    /// snr^(-n+(n-1) eps*): the subcell decay at the balance point.
    pub l1: f64,
    /// snr^(-1+eps*/2) exp(-snr^(eps*)/k): the lattice-step decay there.
    pub l2: f64,
    /// Argument handed to the Lambert W function.
    pub w_arg: f64,
}

impl EpsSolution {
    /// Relative defect of the balance l1 = l2.
    pub fn residual(&self) -> f64 {
        (self.l1 - self.l2).abs() / self.l1.max(self.l2)
    }
}

/// Solve l1(eps) = l2(eps) for the exponent schedule:
/// snr^(eps*) = b k W(snr^((n-1)/b) / (b k)) with b = n - 3/2. `k` is the
/// dividing decay constant (error proportional to exp(-snr^eps / k)).
///
/// Dropping the Q-prefactors and constants, the balance reduces to
/// u^b e^(u/k) = snr^(n-1) in u = snr^eps; taking the 1/b-th power maps it
/// onto the defining equation of W.
pub fn solve_eps_star(snr: f64, n: usize, k: f64) -> Result<EpsSolution> {
    if n < 2 {
        return Err(Error::arg("n must be >= 2".to_string()));
    }
    if !(snr > 1.0) || !snr.is_finite() {
        return Err(Error::arg(format!("snr must exceed 1, got {snr}")));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::arg(format!("decay constant must be positive, got {k}")));
    }
    let nf = n as f64;
    let b = nf - 1.5;
    let a = -(nf - 1.0);
    let w_arg = snr.powf((nf - 1.0) / b) / (b * k);
    if !w_arg.is_finite() {
        return Err(Error::arg(format!(
            "snr {snr} overflows the solver's Lambert argument at n={n}"
        )));
    }
    let u = b * k * lambert_w(w_arg)?;
    let eps_star = u.ln() / snr.ln();
    let l1 = snr.powf(-nf + (nf - 1.0) * eps_star);
    let l2 = snr.powf(-1.0 + 0.5 * eps_star) * (-u / k).exp();
    Ok(EpsSolution {
        snr,
        eps_star,
        a,
        b,
        xi: (k / 2.0).ln() / snr.ln(),
        l1,
        l2,
        w_arg,
    })
}

/// Numeric displacement-test bound
/// p_min (Delta/2)^2 ∫_A^(B-Delta) Q(d(s,Delta)/(2 sigma_z)) ds for an
/// arbitrary encoder map s -> X(s).
///
/// `split_points` lists the discontinuities of the map (for the scheme:
/// its representation breakpoints); panels are split there and at their
/// -Delta shifts, then refined by doubling until successive composite
/// Simpson estimates agree to 1e-8 relative (refinement depth capped).
pub fn ziv_bound_numeric<F>(
    src: &SourceSpec,
    encoder_map: F,
    delta: f64,
    sigma_z: f64,
    quad_points: usize,
    split_points: &[f64],
) -> Result<f64>
where
    F: Fn(f64) -> Vec<f64>,
{
    let (lo, hi) = src.ziv_interval;
    if !(delta >= 0.0) || !delta.is_finite() || delta >= hi - lo {
        return Err(Error::arg(format!(
            "displacement must satisfy 0 <= delta < {}, got {delta}",
            hi - lo
        )));
    }
    if !(sigma_z >= 0.0) || !sigma_z.is_finite() {
        return Err(Error::arg(format!("noise level must be nonnegative, got {sigma_z}")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let upper = hi - delta;

    let integrand = |s: f64| -> f64 {
        let xa = encoder_map(s);
        let xb = encoder_map(s + delta);
        let d2: f64 = xa.iter().zip(&xb).map(|(p, q)| (p - q) * (p - q)).sum();
        let d = d2.sqrt();
        if d == 0.0 {
            0.5
        } else if sigma_z == 0.0 {
            0.0
        } else {
            gaussian_q(d / (2.0 * sigma_z))
        }
    };

    let mut edges = Vec::with_capacity(2 * split_points.len() + 2);
    edges.push(lo);
    edges.push(upper);
    for &p in split_points {
        for cand in [p, p - delta] {
            if cand > lo && cand < upper {
                edges.push(cand);
            }
        }
    }
    edges.sort_by(f64::total_cmp);
    let span = upper - lo;
    edges.dedup_by(|later, kept| (*later - *kept).abs() < 1e-14 * span.max(1.0));

    let mut counts: Vec<usize> = edges
        .windows(2)
        .map(|w| {
            let m = ((quad_points as f64 * (w[1] - w[0]) / span).ceil() as usize).max(2);
            m + m % 2
        })
        .collect();

    let mut estimate = 0.0;
    let mut prev = f64::NAN;
    for round in 0..13 {
        let mut total = crate::accum::CompensatedSum::new();
        for (w, &m) in edges.windows(2).zip(&counts) {
            total.add(simpson(&integrand, w[0], w[1], m));
        }
        estimate = total.value();
        if round > 0 && (estimate - prev).abs() <= 1e-8 * estimate.abs().max(1e-300) {
            break;
        }
        prev = estimate;
        for m in counts.iter_mut() {
            *m *= 2;
        }
    }
    Ok(src.p_min * (delta / 2.0) * (delta / 2.0) * estimate)
}

fn simpson<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64, m: usize) -> f64 {
    let h = (hi - lo) / m as f64;
    // Segment boundaries sit exactly on integrand discontinuities, where a
    // floating-point evaluation of the (s, s+Delta) pair can land on either
    // side of the jump. Pull the end nodes a hair inward so every segment
    // sees only its own one-sided limits; the perturbation is far below the
    // quadrature tolerance for smooth integrands.
    let eta = (hi - lo) * 1e-9;
    let mut sum = g(lo + eta) + g(hi - eta);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * g(lo + i as f64 * h);
    }
    sum * h / 3.0
}

/// [`ziv_bound_numeric`] wired to the scheme's own encoder: the map is
/// encode-then-modulate under `cfg`, noise level sqrt(cfg.noise_var), panels
/// split at the encoder's representation breakpoints.
pub fn ziv_bound_for_scheme(
    cfg: &SchemeConfig,
    src: &SourceSpec,
    delta: f64,
    quad_points: usize,
) -> Result<f64> {
    ziv_bound_for_scheme_at(cfg, src, delta, quad_points, cfg.noise_var.sqrt())
}

/// [`ziv_bound_for_scheme`] with an explicit noise level, for evaluating the
/// bound at a nominal operating point (e.g. in the noiseless debug mode,
/// where cfg.noise_var is zero but the curves are still drawn against the
/// snr implied by beta).
pub fn ziv_bound_for_scheme_at(
    cfg: &SchemeConfig,
    src: &SourceSpec,
    delta: f64,
    quad_points: usize,
    sigma_z: f64,
) -> Result<f64> {
    let (lo, hi) = src.ziv_interval;
    let splits = rep_breakpoints(cfg.beta, cfg.n, lo, hi, BREAKPOINT_CAP);
    let map = |s: f64| encode_modulate(s, cfg).expect("quadrature nodes are finite");
    ziv_bound_numeric(src, map, delta, sigma_z, quad_points, &splits)
}

/// The displacement test restricted to pairs in a common constant-
/// representation subcell, in closed form: there d(s,Delta) is the constant
/// residual_gain * beta^(n-1) * Delta, so only the measure of surviving
/// pairs needs computing. This is the integral the subcell bound relaxes
/// (it replaces the exact measure with (B-A-Delta)(1-snr^-1/2)).
pub fn ziv_bound_restricted(cfg: &SchemeConfig, src: &SourceSpec, delta: f64) -> Result<f64> {
    let (lo, hi) = src.ziv_interval;
    if !(delta > 0.0) || !delta.is_finite() || delta >= hi - lo {
        return Err(Error::arg(format!(
            "displacement must satisfy 0 < delta < {}, got {delta}",
            hi - lo
        )));
    }
    let sigma_z = cfg.noise_var.sqrt();
    let d0 = cfg.residual_gain() * cfg.beta.powi(cfg.n as i32 - 1) * delta;
    let q_val = if d0 == 0.0 {
        0.5
    } else if sigma_z == 0.0 {
        0.0
    } else {
        gaussian_q(d0 / (2.0 * sigma_z))
    };
    let bps = rep_breakpoints(cfg.beta, cfg.n, lo, hi, BREAKPOINT_CAP);
    let mut edges = Vec::with_capacity(bps.len() + 2);
    edges.push(lo);
    edges.extend_from_slice(&bps);
    edges.push(hi);
    let mut measure = 0.0;
    for w in edges.windows(2) {
        // s ranges over [w0, w1 - delta] clipped to [lo, hi - delta].
        let s_hi = (w[1] - delta).min(hi - delta);
        let s_lo = w[0];
        if s_hi > s_lo {
            measure += s_hi - s_lo;
        }
    }
    Ok(src.p_min * (delta / 2.0) * (delta / 2.0) * q_val * measure)
}

/// A named bound sampled over an snr grid, with the parameters that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub name: String,
    /// (snr, value) pairs, snr strictly increasing, values positive.
    pub points: Vec<(f64, f64)>,
    pub meta: CurveMeta,
}

/// Parameters a curve was evaluated with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveMeta {
    pub n: usize,
    pub eps: Option<f64>,
    /// Displacement Delta for displacement-test curves.
    pub displacement: Option<f64>,
    pub k: Option<f64>,
    /// Certificate interval [A, B] of the source.
    pub support: (f64, f64),
    pub p_min: f64,
}

impl CurveMeta {
    pub fn for_source(n: usize, src: &SourceSpec) -> Self {
        CurveMeta {
            n,
            eps: None,
            displacement: None,
            k: None,
            support: src.ziv_interval,
            p_min: src.p_min,
        }
    }
}

impl BoundCurve {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>, meta: CurveMeta) -> Result<Self> {
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::arg(format!(
                    "curve snr grid must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        for &(snr, v) in &points {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::arg(format!(
                    "curve values must be positive and finite, got {v} at snr {snr}"
                )));
            }
        }
        Ok(BoundCurve { name: name.into(), points, meta })
    }
}
