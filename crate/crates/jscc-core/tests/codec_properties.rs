//! Property tests for the recursive quantizer: exact round-trips, the
//! one-lattice-step shift identity, residual range, and the cell structure
//! (symbols constant between representation breakpoints, residual affine
//! with slope beta^(n-1) inside each cell).

use jscc_core::codec::{encode, rep_breakpoints};
use jscc_core::{reconstruct_exact, SchemeConfig, SourceSpec};
use proptest::prelude::*;

fn cfg_for(n: usize, beta: f64) -> SchemeConfig {
    SchemeConfig::noiseless(n, beta, &SourceSpec::gaussian_unit()).unwrap()
}

/// Distance of beta * E_i from the nearest rounding tie (half-integer), for
/// every level of the chain at `s`. Cases too close to a tie are skipped:
/// there the float image of a shifted input may legitimately round to the
/// neighboring symbol.
fn min_tie_distance(s: f64, cfg: &SchemeConfig) -> f64 {
    let cw = encode(s, cfg).unwrap();
    let mut dist = f64::INFINITY;
    let mut e = s;
    for q in &cw.q {
        let scaled = cfg.beta * e;
        let frac = (scaled - scaled.floor() - 0.5).abs();
        dist = dist.min(frac);
        e = cfg.beta * (e - q);
    }
    dist
}

proptest! {
    #[test]
    fn round_trip_is_exact_to_float_precision(
        s in -50.0f64..50.0,
        beta in 1.5f64..40.0,
        n in 2usize..=4,
    ) {
        let cfg = cfg_for(n, beta);
        let cw = encode(s, &cfg).unwrap();
        let back = reconstruct_exact(&cw, &cfg);
        let tol = 1e-10 * s.abs().max(1.0);
        prop_assert!((back - s).abs() <= tol, "round trip off by {}", back - s);
    }

    #[test]
    fn residual_chain_stays_in_half_open_unit_cell(
        s in -50.0f64..50.0,
        beta in 1.5f64..40.0,
        n in 2usize..=4,
    ) {
        let cfg = cfg_for(n, beta);
        let cw = encode(s, &cfg).unwrap();
        // Slack for accumulated rounding in the chain.
        let slack = n as f64 * beta * f64::EPSILON;
        prop_assert!(cw.e_final >= -0.5 - slack && cw.e_final < 0.5 + slack);
        for q in &cw.q {
            // Symbols are integer multiples of the lattice step.
            let scaled = q * beta;
            prop_assert!((scaled - scaled.round()).abs() <= 1e-9 * scaled.abs().max(1.0));
        }
    }

    #[test]
    fn one_lattice_step_shift_moves_only_the_first_symbol(
        s in -20.0f64..20.0,
        beta in 1.5f64..40.0,
        n in 2usize..=4,
    ) {
        let cfg = cfg_for(n, beta);
        let step = 1.0 / beta;
        prop_assume!(min_tie_distance(s, &cfg) > 1e-6);
        prop_assume!(min_tie_distance(s + step, &cfg) > 1e-6);
        let a = encode(s, &cfg).unwrap();
        let b = encode(s + step, &cfg).unwrap();
        prop_assert!(
            ((b.q[0] - a.q[0]) - step).abs() <= 1e-9,
            "Q_1 moved by {} instead of {}",
            b.q[0] - a.q[0],
            step
        );
        for i in 1..a.q.len() {
            prop_assert!((b.q[i] - a.q[i]).abs() <= 1e-9, "Q_{} changed", i + 1);
        }
        prop_assert!((b.e_final - a.e_final).abs() <= 1e-9, "residual changed");
    }

    #[test]
    fn symbols_constant_and_residual_affine_within_cells(
        center in -2.0f64..2.0,
        beta in 1.5f64..20.0,
        n in 2usize..=4,
        pick in 0usize..1000,
    ) {
        let cfg = cfg_for(n, beta);
        let (lo, hi) = (center - 0.2, center + 0.2);
        let mut edges = vec![lo];
        edges.extend(rep_breakpoints(beta, n, lo, hi, 100_000));
        edges.push(hi);
        let gap = pick % (edges.len() - 1);
        let (a, b) = (edges[gap], edges[gap + 1]);
        prop_assume!(b - a > 1e-9);
        // Probe strictly inside the cell, away from both edges.
        let m = 0.25 * (b - a);
        let probes = [a + m, 0.5 * (a + b), b - m];
        let base = encode(probes[1], &cfg).unwrap();
        let slope = beta.powi(n as i32 - 1);
        for &p in &probes {
            let cw = encode(p, &cfg).unwrap();
            prop_assert_eq!(&cw.q, &base.q, "symbols changed inside a cell at {}", p);
            let predicted = base.e_final + slope * (p - probes[1]);
            prop_assert!(
                (cw.e_final - predicted).abs() <= 1e-9 * slope.max(1.0),
                "residual not affine: {} vs {}",
                cw.e_final,
                predicted
            );
        }
    }
}
