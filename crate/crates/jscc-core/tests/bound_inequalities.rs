//! Cross-bound orderings on snr grids. These are the relations that make
//! the bound family usable as a corridor: the capacity floor never exceeds
//! the best displacement bound, the full displacement integral dominates
//! its in-cell restriction, and the closed forms track their integral
//! counterparts.

use jscc_core::bounds::{
    lattice_step_bound, opta_bound, subcell_bound, subcell_displacement, ziv_bound_for_scheme_at,
    ziv_bound_restricted,
};
use jscc_core::{SchemeConfig, SourceSpec};

fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.log10(), hi.log10());
    (0..count)
        .map(|i| 10f64.powf(llo + (lhi - llo) * i as f64 / (count - 1) as f64))
        .collect()
}

#[test]
fn capacity_floor_stays_below_the_best_displacement_bound() {
    // With most of the exponent budget spent on resolution (eps = 0.8) the
    // subcell bound decays slowly enough that the displacement family
    // dominates the capacity floor across six decades.
    let src = SourceSpec::gaussian_unit();
    let eps = 0.8;
    for n in [2usize, 3] {
        for snr in logspace(1e4, 1e10, 20) {
            let opta = opta_bound(snr, n, &src).unwrap();
            let sub = subcell_bound(snr, n, eps, &src, 1.0 / 12.0)
                .unwrap()
                .value()
                .unwrap();
            let step = lattice_step_bound(snr, n, eps, &src, 0.1)
                .unwrap()
                .value()
                .unwrap();
            let envelope = sub.max(step);
            println!(
                "n={n} snr={snr:.3e}: opta={opta:.3e} envelope={envelope:.3e} ratio={:.3e}",
                opta / envelope
            );
            assert!(
                opta <= envelope,
                "capacity floor {opta:e} above displacement envelope {envelope:e} \
                 at n={n}, snr={snr:e}"
            );
        }
    }
}

#[test]
fn full_displacement_integral_dominates_its_in_cell_restriction() {
    // Dropping the cross-cell pairs removes a nonnegative part of the
    // integrand, so the full integral sits above the in-cell restriction at
    // every grid point (up to the 1e-8 quadrature refinement target).
    let src = SourceSpec::gaussian_unit();
    let eps = 0.3;
    for snr in logspace(1e4, 10f64.powf(5.5), 10) {
        let cfg = SchemeConfig::new(2, snr, &src)
            .unwrap()
            .with_epsilon(eps)
            .unwrap();
        let delta = subcell_displacement(snr, 2, eps);
        let sigma_z = (cfg.power / snr).sqrt();
        let full = ziv_bound_for_scheme_at(&cfg, &src, delta, 1024, sigma_z).unwrap();
        let restricted = ziv_bound_restricted(&cfg, &src, delta).unwrap();
        println!(
            "snr={snr:.3e}: full={full:.6e} restricted={restricted:.6e} cross={:.3e}",
            full / restricted - 1.0
        );
        assert!(
            full >= restricted * (1.0 - 1e-6),
            "full integral {full:e} fell below its restriction {restricted:e} at snr={snr:e}"
        );
    }
}

#[test]
fn restricted_integral_tracks_the_subcell_closed_form_on_a_grid() {
    // On the in-cell restriction the integrand is the constant tail weight,
    // so the integral reduces to that constant times the surviving measure.
    // The closed form replaces the surviving measure with
    // (B - A - delta) * (1 - beta^{n-1} * delta), which treats the certificate
    // interval as if it held an exact real number of lattice cells.  The two
    // partial cells at the ends of [A, B] each shift the true measure by at
    // most delta, so the forms agree to 2*delta absolute — a self-scaling
    // tolerance, not a fixed one.
    let src = SourceSpec::gaussian_unit();
    let (a, b) = src.ziv_interval;
    let eps = 0.3;
    for snr in logspace(1e4, 10f64.powf(5.5), 10) {
        let cfg = SchemeConfig::new(2, snr, &src)
            .unwrap()
            .with_epsilon(eps)
            .unwrap();
        let delta = subcell_displacement(snr, 2, eps);
        let restricted = ziv_bound_restricted(&cfg, &src, delta).unwrap();
        let closed = subcell_bound(snr, 2, eps, &src, cfg.sigma_e2)
            .unwrap()
            .value()
            .unwrap();
        let rel = restricted / closed - 1.0;
        let tol = 3.0 * delta / (b - a) + 1e-9;
        println!(
            "snr={snr:.3e}: restricted={restricted:.6e} closed={closed:.6e} \
             rel={rel:+.2e} tol={tol:.2e}"
        );
        assert!(
            rel.abs() <= tol,
            "tiling correction {rel:e} exceeds end-cell budget {tol:e} at snr={snr:e}"
        );
    }
}

#[test]
fn displacement_bounds_decay_monotonically_in_snr() {
    let src = SourceSpec::gaussian_unit();
    for n in [2usize, 3] {
        for eps in [0.0, 0.4, 0.8] {
            let mut prev = f64::INFINITY;
            for snr in logspace(1e3, 1e9, 15) {
                let v = subcell_bound(snr, n, eps, &src, 1.0 / 12.0)
                    .unwrap()
                    .value()
                    .unwrap();
                assert!(
                    v < prev,
                    "subcell bound not decreasing at n={n}, eps={eps}, snr={snr:e}"
                );
                prev = v;
            }
        }
    }
}
