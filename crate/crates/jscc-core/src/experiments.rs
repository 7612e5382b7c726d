//! Monte Carlo evaluation of the scheme against its bounds.
//!
//! A "point" is one (n, snr, eps) operating configuration: a pilot run
//! calibrates sigma_E^2, a batch of letters is pushed through
//! encode -> modulate -> channel -> decode, and the resulting error report
//! is laid beside the four bound curves at the same operating point. A
//! "sweep" strings points along an snr grid under an epsilon policy, and
//! `fit_scaling` regresses log mse against either log snr or the reference
//! decay snr^-n (ln snr)^(n-1) to read off the achieved order.
//!
//! Determinism contract: a point's randomness is keyed on (seed, snr_db)
//! only, so re-running, reordering grids, or splitting a sweep never changes
//! a row. Within a point, samples are drawn in fixed-size chunks with one
//! RNG substream per chunk and chunk partials merged in index order, which
//! makes sequential and data-parallel execution bit-identical.

use crate::bounds;
use crate::channel::{mix64, transmit, RngStream};
use crate::codec::{encode, encode_modulate, estimate_sigma_e, modulate};
use crate::config::SchemeConfig;
use crate::decoder::{decode, ErrorAccumulator};
use crate::error::{Error, Result};
use crate::source::SourceSpec;
use rand::Rng;
use rand_distr::StandardNormal;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Samples per RNG chunk. Fixed (not tied to thread count) so that the
/// chunk decomposition, and hence every drawn variate, is identical no
/// matter how the work is scheduled.
pub const CHUNK: u64 = 1 << 16;

/// Pilot letters used to calibrate sigma_E^2 before each point.
pub const PILOT_SAMPLES: u64 = 100_000;

/// Chunk tag reserved for the pilot stream (simulation chunks count up
/// from zero and can never reach it).
const PILOT_TAG: u64 = u64::MAX;

/// Baseline panel count for the displacement-test quadrature.
const ZIV_QUAD_POINTS: usize = 2048;

/// How eps is chosen at each snr of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsPolicy {
    /// The same eps at every snr.
    Fixed(f64),
    /// The schedule snr^eps = (n/k) ln snr that keeps the lattice error
    /// below the quantization floor.
    Achievability,
    /// The bound-balancing exponent from the Lambert-W solver.
    Optimal,
}

/// Resolve a policy to a concrete eps at one snr. `k` is the multiplying
/// decay constant carried by the configuration.
pub fn policy_epsilon(policy: EpsPolicy, snr: f64, n: usize, k: f64) -> Result<f64> {
    match policy {
        EpsPolicy::Fixed(eps) => Ok(eps),
        EpsPolicy::Achievability => bounds::achievability_eps(snr, n, k),
        EpsPolicy::Optimal => Ok(bounds::solve_eps_star(snr, n, 1.0 / k)?.eps_star),
    }
}

/// Simulation scheduling. Both modes produce bit-identical rows; Parallel
/// fans chunks out across the rayon pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Data-parallel over chunks (falls back to sequential when the crate
    /// is built without the `parallel` feature).
    #[default]
    Parallel,
}

/// One simulated operating point with its surrounding bound values.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub snr: f64,
    pub n: usize,
    pub eps: f64,
    pub beta: f64,
    pub samples: u64,
    /// Direct sample mean of (S - Shat)^2.
    pub mse: f64,
    /// 95% half-width on `mse`.
    pub ci_halfwidth: f64,
    /// Per-level symbol error energies Err_Q,i (length n-1).
    pub err_q: Vec<f64>,
    /// Residual error energy Err_E.
    pub err_e: f64,
    /// Capacity floor at this (snr, n).
    pub opta: f64,
    /// Subcell displacement bound; None while its positivity precondition
    /// has not kicked in.
    pub lemma4: Option<f64>,
    /// Lattice-step displacement bound; None likewise.
    pub lemma5: Option<f64>,
    /// Numeric displacement test, best (largest) over the in-cell and
    /// one-lattice-step displacements.
    pub ziv: f64,
    /// Reference decay snr^-n (ln snr)^(n-1).
    pub theorem_ref: f64,
}

/// Simulate one operating point with the default (parallel) scheduling.
pub fn run_point(
    cfg: &SchemeConfig,
    src: &SourceSpec,
    samples: u64,
    seed: u64,
) -> Result<SweepRow> {
    run_point_with(cfg, src, samples, seed, Execution::default())
}

/// Simulate one operating point under explicit scheduling.
pub fn run_point_with(
    cfg: &SchemeConfig,
    src: &SourceSpec,
    samples: u64,
    seed: u64,
    execution: Execution,
) -> Result<SweepRow> {
    if samples < 1_000 {
        return Err(Error::arg(format!(
            "a point needs at least 10^3 samples for a meaningful CI, got {samples}"
        )));
    }
    // In the noiseless debug mode the bounds and reported snr resolve from
    // the operating point beta implies through beta^2 = snr^(1-eps).
    let nominal_snr = if cfg.noise_var > 0.0 {
        cfg.snr()
    } else {
        cfg.beta.powf(2.0 / (1.0 - cfg.epsilon))
    };
    let snr_db = 10.0 * nominal_snr.log10();

    // All randomness of this row is keyed on (seed, snr_db): rows are
    // reproducible individually, independent of any surrounding grid.
    let row = RngStream::new(seed, mix64(snr_db.to_bits()));
    let pilot = estimate_sigma_e(cfg, src, PILOT_SAMPLES, row.substream(PILOT_TAG))?;
    let cfg = cfg.with_sigma_e2(pilot.sigma_e2)?;

    let num_chunks = samples.div_ceil(CHUNK);
    let accs = match execution {
        Execution::Sequential => chunks_sequential(&cfg, src, &row, num_chunks, samples)?,
        Execution::Parallel => chunks_parallel(&cfg, src, &row, num_chunks, samples)?,
    };
    let mut total = ErrorAccumulator::new(cfg.n);
    for acc in &accs {
        total.merge(acc);
    }
    let report = total.finish(&cfg)?;

    let opta = bounds::opta_bound(nominal_snr, cfg.n, src)?;
    let lemma4 = bounds::subcell_bound(nominal_snr, cfg.n, cfg.epsilon, src, cfg.sigma_e2)?.value();
    let lemma5 = bounds::lattice_step_bound(nominal_snr, cfg.n, cfg.epsilon, src, cfg.delta)?.value();
    let ziv = ziv_column(&cfg, src, nominal_snr)?;
    let theorem_ref = bounds::scaling_reference(nominal_snr, cfg.n)?;

    Ok(SweepRow {
        snr_db,
        snr: nominal_snr,
        n: cfg.n,
        eps: cfg.epsilon,
        beta: cfg.beta,
        samples,
        mse: report.mse_direct,
        ci_halfwidth: report.ci_halfwidth,
        err_q: report.err_q,
        err_e: report.err_e,
        opta,
        lemma4,
        lemma5,
        ziv,
        theorem_ref,
    })
}

fn chunk_len(chunk: u64, num_chunks: u64, samples: u64) -> u64 {
    if chunk + 1 == num_chunks {
        samples - chunk * CHUNK
    } else {
        CHUNK
    }
}

fn chunks_sequential(
    cfg: &SchemeConfig,
    src: &SourceSpec,
    row: &RngStream,
    num_chunks: u64,
    samples: u64,
) -> Result<Vec<ErrorAccumulator>> {
    (0..num_chunks)
        .map(|c| simulate_chunk(cfg, src, row, c, chunk_len(c, num_chunks, samples)))
        .collect()
}

#[cfg(feature = "parallel")]
fn chunks_parallel(
    cfg: &SchemeConfig,
    src: &SourceSpec,
    row: &RngStream,
    num_chunks: u64,
    samples: u64,
) -> Result<Vec<ErrorAccumulator>> {
    (0..num_chunks)
        .into_par_iter()
        .map(|c| simulate_chunk(cfg, src, row, c, chunk_len(c, num_chunks, samples)))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn chunks_parallel(
    cfg: &SchemeConfig,
    src: &SourceSpec,
    row: &RngStream,
    num_chunks: u64,
    samples: u64,
) -> Result<Vec<ErrorAccumulator>> {
    chunks_sequential(cfg, src, row, num_chunks, samples)
}

/// One chunk of the batch: its own RNG substream, letters drawn
/// source-then-noise so the variate sequence is schedule-independent.
fn simulate_chunk(
    cfg: &SchemeConfig,
    src: &SourceSpec,
    row: &RngStream,
    chunk: u64,
    len: u64,
) -> Result<ErrorAccumulator> {
    let mut rng = row.substream(chunk).rng();
    let mut acc = ErrorAccumulator::new(cfg.n);
    for _ in 0..len {
        let s = src.sample(&mut rng);
        let cw = modulate(&encode(s, cfg)?, cfg)?;
        let x = cw.x.as_deref().expect("modulate fills channel inputs");
        let y = transmit(x, cfg.noise_var, &mut rng)?;
        let dr = decode(&y, cfg)?;
        acc.push(s, &cw, &dr, cfg)?;
    }
    Ok(acc)
}

/// The ziv CSV column: the displacement test at the nominal noise level,
/// taking the better of the in-cell and one-lattice-step displacements.
pub fn ziv_column(cfg: &SchemeConfig, src: &SourceSpec, nominal_snr: f64) -> Result<f64> {
    let sigma_z = (cfg.power / nominal_snr).sqrt();
    let (lo, hi) = src.ziv_interval;
    let mut best = 0.0f64;
    for delta in [
        bounds::subcell_displacement(nominal_snr, cfg.n, cfg.epsilon),
        1.0 / cfg.beta,
    ] {
        if delta > 0.0 && delta < hi - lo {
            let v = bounds::ziv_bound_for_scheme_at(cfg, src, delta, ZIV_QUAD_POINTS, sigma_z)?;
            best = best.max(v);
        }
    }
    Ok(best)
}

/// Run one point per grid entry (dB, strictly increasing), resolving eps by
/// `policy` and re-deriving beta at each snr.
pub fn sweep(
    base: &SchemeConfig,
    src: &SourceSpec,
    grid_db: &[f64],
    policy: EpsPolicy,
    samples: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    for w in grid_db.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::arg(format!(
                "snr grid must be strictly increasing ({} dB then {} dB)",
                w[0], w[1]
            )));
        }
    }
    let mut rows = Vec::with_capacity(grid_db.len());
    for &db in grid_db {
        let snr = 10f64.powf(db / 10.0);
        let eps = policy_epsilon(policy, snr, base.n, base.k)?;
        let cfg = SchemeConfig {
            noise_var: base.power / snr,
            ..*base
        }
        .with_epsilon(eps)?;
        rows.push(run_point(&cfg, src, samples, seed)?);
    }
    Ok(rows)
}

/// Which abscissa the scaling fit regresses log mse against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    /// ln mse vs ln snr: the raw decay order.
    RawLogLog,
    /// ln mse vs ln of the reference decay: slope 1 means the simulated
    /// curve tracks snr^-n (ln snr)^(n-1) up to a constant.
    VsTheoremCurve,
}

impl std::fmt::Display for FitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FitMode::RawLogLog => write!(f, "raw-loglog"),
            FitMode::VsTheoremCurve => write!(f, "vs-theorem-curve"),
        }
    }
}

/// Least-squares line through the selected rows in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Rows that fell inside the window.
    pub points: usize,
    pub mode: FitMode,
}

/// Regress ln mse over the rows whose snr_db lies in `window_db`
/// (inclusive). Needs at least four rows in the window.
pub fn fit_scaling(rows: &[SweepRow], window_db: (f64, f64), mode: FitMode) -> Result<FitResult> {
    let (lo, hi) = window_db;
    if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::arg(format!("fit window is empty: [{lo}, {hi}] dB")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for r in rows {
        if r.snr_db < lo - 1e-9 || r.snr_db > hi + 1e-9 {
            continue;
        }
        if !(r.mse > 0.0) {
            return Err(Error::arg(format!(
                "scaling fit needs positive mse, got {} at {} dB",
                r.mse, r.snr_db
            )));
        }
        xs.push(match mode {
            FitMode::RawLogLog => r.snr.ln(),
            FitMode::VsTheoremCurve => r.theorem_ref.ln(),
        });
        ys.push(r.mse.ln());
    }
    let m = xs.len();
    if m < 4 {
        return Err(Error::arg(format!(
            "scaling fit needs at least 4 rows in the window, got {m}"
        )));
    }
    let mf = m as f64;
    let x_mean = xs.iter().sum::<f64>() / mf;
    let y_mean = ys.iter().sum::<f64>() / mf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x - x_mean;
        let dy = y - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if !(sxx > 0.0) {
        return Err(Error::arg(
            "scaling fit needs at least two distinct snr values".to_string(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res = (syy - slope * sxy).max(0.0);
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(FitResult { slope, intercept, r2, points: m, mode })
}

/// Outcome of the two-codeword sanity check underpinning the displacement
/// bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryCheck {
    /// Fraction of trials the minimum-distance rule picked the wrong
    /// hypothesis.
    pub empirical: f64,
    /// The pairwise tail Q(d / 2 sigma_Z).
    pub predicted: f64,
    /// Codeword distance d = ||X(s) - X(s+delta)||.
    pub distance: f64,
    pub trials: u64,
    pub errors: u64,
    /// Binomial standard error sqrt(p(1-p)/trials) at the predicted rate.
    pub binomial_se: f64,
}

/// Transmit one of X(s), X(s+delta) picked by a fair coin and decide by
/// minimum distance; the error rate must land on the pairwise Gaussian tail
/// Q(d/2 sigma_Z). This isolates the channel/decision layer from the
/// quantizer: any systematic gap here invalidates the displacement bounds
/// before they are ever compared to the full scheme.
pub fn binary_signaling_check(
    s: f64,
    delta: f64,
    cfg: &SchemeConfig,
    src: &SourceSpec,
    trials: u64,
    seed: u64,
) -> Result<BinaryCheck> {
    if trials < 10_000 {
        return Err(Error::arg(format!(
            "binary check needs at least 10^4 trials, got {trials}"
        )));
    }
    if !src.in_support(s) || !src.in_support(s + delta) {
        return Err(Error::arg(format!(
            "both test letters must lie in the source support, got {s} and {}",
            s + delta
        )));
    }
    let x0 = encode_modulate(s, cfg)?;
    let x1 = encode_modulate(s + delta, cfg)?;
    let distance = x0
        .iter()
        .zip(&x1)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt();
    let sigma_z = cfg.noise_var.sqrt();
    let predicted = if distance == 0.0 {
        0.5
    } else if sigma_z == 0.0 {
        0.0
    } else {
        bounds::gaussian_q(distance / (2.0 * sigma_z))
    };

    let stream = RngStream::new(seed, mix64(s.to_bits() ^ mix64(delta.to_bits())));
    let mut rng = stream.rng();
    let mut errors = 0u64;
    for _ in 0..trials {
        let send_one = rng.gen_bool(0.5);
        let sent = if send_one { &x1 } else { &x0 };
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for (i, &xi) in sent.iter().enumerate() {
            let noise: f64 = rng.sample(StandardNormal);
            let y = xi + sigma_z * noise;
            d0 += (y - x0[i]) * (y - x0[i]);
            d1 += (y - x1[i]) * (y - x1[i]);
        }
        // Ties resolve to hypothesis 0, so identical codewords err on
        // exactly the trials that sent hypothesis 1.
        let decide_one = d1 < d0;
        if decide_one != send_one {
            errors += 1;
        }
    }
    let empirical = errors as f64 / trials as f64;
    let binomial_se = (predicted * (1.0 - predicted) / trials as f64).sqrt();
    Ok(BinaryCheck {
        empirical,
        predicted,
        distance,
        trials,
        errors,
        binomial_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian() -> SourceSpec {
        SourceSpec::gaussian_unit()
    }

    fn row_bits(r: &SweepRow) -> Vec<u64> {
        let mut bits = vec![
            r.snr_db.to_bits(),
            r.snr.to_bits(),
            r.eps.to_bits(),
            r.beta.to_bits(),
            r.mse.to_bits(),
            r.ci_halfwidth.to_bits(),
            r.err_e.to_bits(),
            r.opta.to_bits(),
            r.ziv.to_bits(),
            r.theorem_ref.to_bits(),
        ];
        bits.extend(r.err_q.iter().map(|v| v.to_bits()));
        bits.push(r.lemma4.unwrap_or(f64::NAN).to_bits());
        bits.push(r.lemma5.unwrap_or(f64::NAN).to_bits());
        bits
    }

    #[test]
    fn point_rejects_thin_batches() {
        let src = gaussian();
        let cfg = SchemeConfig::new(2, 1e4, &src).unwrap();
        assert!(run_point(&cfg, &src, 999, 7).is_err());
    }

    #[test]
    fn noiseless_point_reproduces_the_source() {
        let src = gaussian();
        let cfg = SchemeConfig::noiseless(3, 32.0, &src).unwrap();
        let row = run_point(&cfg, &src, 2_000, 11).unwrap();
        println!("noiseless mse = {:e}", row.mse);
        assert!(row.mse <= 1e-18, "noiseless mse {}", row.mse);
        for (i, eq) in row.err_q.iter().enumerate() {
            assert!(*eq <= 1e-18, "err_q_{} = {}", i + 1, eq);
        }
        // Bounds still populate from the nominal operating point beta
        // implies (snr = beta^2 here).
        assert_relative_eq!(row.snr, 1024.0, max_relative = 1e-12);
        assert!(row.opta > 0.0 && row.theorem_ref > 0.0 && row.ziv > 0.0);
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let src = gaussian();
        let cfg = SchemeConfig::new(2, 1e4, &src).unwrap().with_epsilon(0.3).unwrap();
        let a = run_point(&cfg, &src, 1_000, 42).unwrap();
        let b = run_point(&cfg, &src, 1_000, 42).unwrap();
        assert_eq!(row_bits(&a), row_bits(&b));
        let c = run_point(&cfg, &src, 1_000, 43).unwrap();
        assert_ne!(a.mse.to_bits(), c.mse.to_bits(), "seed must matter");
    }

    #[test]
    fn sequential_and_parallel_schedules_agree_bitwise() {
        let src = gaussian();
        let cfg = SchemeConfig::new(2, 1e4, &src).unwrap();
        // 150k samples spans three chunks, exercising the remainder chunk.
        let seq = run_point_with(&cfg, &src, 150_000, 5, Execution::Sequential).unwrap();
        let par = run_point_with(&cfg, &src, 150_000, 5, Execution::Parallel).unwrap();
        println!("seq mse = {:.17e}, par mse = {:.17e}", seq.mse, par.mse);
        assert_eq!(row_bits(&seq), row_bits(&par));
    }

    #[test]
    fn sweep_resolves_policies_and_keeps_rows_mergeable() {
        let src = gaussian();
        let base = SchemeConfig::new(2, 1e4, &src).unwrap();
        let rows = sweep(&base, &src, &[40.0, 46.0], EpsPolicy::Fixed(0.3), 1_000, 9).unwrap();
        assert_eq!(rows.len(), 2);
        assert_relative_eq!(rows[0].eps, 0.3, max_relative = 1e-15);
        assert!(rows[1].snr > rows[0].snr);
        // A row depends only on (seed, snr_db): the sub-grid reproduces it.
        let alone = sweep(&base, &src, &[46.0], EpsPolicy::Fixed(0.3), 1_000, 9).unwrap();
        assert_eq!(row_bits(&rows[1]), row_bits(&alone[0]));

        let ach = policy_epsilon(EpsPolicy::Achievability, 1e5, 2, base.k).unwrap();
        let opt = policy_epsilon(EpsPolicy::Optimal, 1e5, 2, base.k).unwrap();
        assert_relative_eq!(
            ach,
            bounds::achievability_eps(1e5, 2, base.k).unwrap(),
            max_relative = 1e-15
        );
        // The conservative schedule over-resolves relative to the balance
        // point: more of the budget spent suppressing lattice errors.
        println!("achievability eps = {ach:.4}, balance eps = {opt:.4}");
        assert!(ach > opt);

        assert!(sweep(&base, &src, &[40.0, 40.0], EpsPolicy::Fixed(0.3), 1_000, 9).is_err());
        assert!(sweep(&base, &src, &[], EpsPolicy::Fixed(0.3), 1_000, 9).unwrap().is_empty());
    }

    #[test]
    fn fit_recovers_exact_power_laws() {
        let mut rows = Vec::new();
        for i in 0..6 {
            let db = 30.0 + 6.0 * i as f64;
            let snr = 10f64.powf(db / 10.0);
            let theorem_ref = bounds::scaling_reference(snr, 2).unwrap();
            rows.push(SweepRow {
                snr_db: db,
                snr,
                n: 2,
                eps: 0.0,
                beta: snr.sqrt(),
                samples: 1000,
                mse: 3.5 * snr.powi(-2),
                ci_halfwidth: 0.0,
                err_q: vec![0.0],
                err_e: 0.0,
                opta: 1.0,
                lemma4: None,
                lemma5: None,
                ziv: 0.0,
                theorem_ref,
            });
        }
        let raw = fit_scaling(&rows, (30.0, 60.0), FitMode::RawLogLog).unwrap();
        assert_relative_eq!(raw.slope, -2.0, max_relative = 1e-10);
        assert!(raw.r2 >= 1.0 - 1e-12);
        assert_eq!(raw.points, 6);
        assert_relative_eq!(raw.intercept, 3.5f64.ln(), max_relative = 1e-9);

        // Against the reference curve an exact multiple gives slope one.
        for r in rows.iter_mut() {
            r.mse = 0.8 * r.theorem_ref;
        }
        let vs = fit_scaling(&rows, (30.0, 60.0), FitMode::VsTheoremCurve).unwrap();
        assert_relative_eq!(vs.slope, 1.0, max_relative = 1e-10);
        assert!(vs.r2 >= 1.0 - 1e-12);

        // Window filtering and the minimum-row precondition.
        let tail = fit_scaling(&rows, (42.0, 60.0), FitMode::RawLogLog).unwrap();
        assert_eq!(tail.points, 4);
        assert!(fit_scaling(&rows[..3], (30.0, 60.0), FitMode::RawLogLog).is_err());
        assert_eq!(format!("{}", FitMode::RawLogLog), "raw-loglog");
        assert_eq!(format!("{}", FitMode::VsTheoremCurve), "vs-theorem-curve");
    }

    #[test]
    fn binary_check_validates_input() {
        let src = gaussian();
        let cfg = SchemeConfig::new(2, 1e4, &src).unwrap();
        assert!(binary_signaling_check(0.1, 0.2, &cfg, &src, 9_999, 1).is_err());
        let uni = SourceSpec::uniform_unit();
        let cfg_u = SchemeConfig::new(2, 1e4, &uni).unwrap();
        let half_width = (3.0f64).sqrt();
        assert!(binary_signaling_check(half_width * 0.99, 0.1 * half_width, &cfg_u, &uni, 10_000, 1)
            .is_err());
    }

    #[test]
    fn binary_check_identical_codewords_err_half_the_time() {
        let src = gaussian();
        let cfg = SchemeConfig::new(2, 1e4, &src).unwrap();
        let chk = binary_signaling_check(0.1234, 0.0, &cfg, &src, 20_000, 3).unwrap();
        assert_eq!(chk.distance, 0.0);
        assert_eq!(chk.predicted, 0.5);
        println!("identical-codeword error rate = {}", chk.empirical);
        assert!((chk.empirical - 0.5).abs() <= 3.0 * chk.binomial_se);
    }

    #[test]
    fn binary_check_noiseless_channel_never_errs() {
        let src = gaussian();
        let cfg = SchemeConfig::noiseless(2, 50.0, &src).unwrap();
        let chk = binary_signaling_check(0.1, 0.3, &cfg, &src, 10_000, 4).unwrap();
        assert!(chk.distance > 0.0);
        assert_eq!(chk.predicted, 0.0);
        assert_eq!(chk.errors, 0);
    }

    #[test]
    fn binary_check_matches_the_pairwise_tail() {
        let src = gaussian();
        let cfg = SchemeConfig::new(2, 1e4, &src).unwrap();
        // One lattice step: constant distance lattice_gain/beta, a tail
        // probability around 0.3 — far from both degenerate extremes.
        let chk =
            binary_signaling_check(0.2345, 1.0 / cfg.beta, &cfg, &src, 20_000, 8).unwrap();
        assert_relative_eq!(
            chk.distance,
            cfg.lattice_gain() / cfg.beta,
            max_relative = 1e-9
        );
        println!(
            "pairwise check: empirical {} vs predicted {} (se {})",
            chk.empirical, chk.predicted, chk.binomial_se
        );
        assert!((chk.empirical - chk.predicted).abs() <= 3.0 * chk.binomial_se);
    }
}
