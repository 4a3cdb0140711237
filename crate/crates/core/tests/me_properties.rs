//! Master-equation relaxation from a coherent state.

use kpo_core::hilbert::{coherent_ket, FockSpace};
use kpo_core::me_dynamics::{evolve_me_with, measure_jump_rate, MeOptions, MeScheme, DEFAULT_ME_DT, FIT_THRESHOLD};
use kpo_core::model::KpoModel;
use kpo_core::{alpha_stationary, KpoParams};

fn params(beta_over_chi: f64) -> KpoParams {
    KpoParams::ideal_from_mhz(3.0, 3.0 * beta_over_chi, 3.0).unwrap()
}

#[test]
fn mean_x_decays_monotonically_after_the_transient() {
    let space = FockSpace::new(30).unwrap();
    for p in [params(1.0), params(0.5)] {
        let alpha = alpha_stationary(&p).unwrap();
        let rho0 = coherent_ket(space, alpha).unwrap().projector();
        // long enough to fall through the fit window at both settings
        let t_end = if p.beta == p.chi { 10.0 } else { 3.0 };
        let options = MeOptions {
            scheme: MeScheme::InteractionRk4,
            snapshot_stride: 0,
        };
        let traj = evolve_me_with(KpoModel::new(space, p).unwrap(), &rho0, t_end, DEFAULT_ME_DT, options).unwrap();
        let settle = 3.0 / p.kappa;
        let mut checked = 0;
        for (w, t) in traj.mean_x.windows(2).zip(&traj.times[1..]) {
            if *t > settle && w[0] >= FIT_THRESHOLD * alpha.re {
                assert!(w[1] <= w[0], "<x> rises at t = {t}: {} -> {}", w[0], w[1]);
                checked += 1;
            }
        }
        assert!(checked > 1000);
        assert!(*traj.mean_x.last().unwrap() < FIT_THRESHOLD * alpha.re);
    }
}

#[test]
fn jump_interval_grows_exponentially_with_amplitude() {
    // |alpha|^2 runs from ~0.87 (beta = chi/2) to ~1.94 (beta = chi)
    let space = FockSpace::new(20).unwrap();
    let points: Vec<(f64, f64)> = [0.5, 0.625, 0.75, 0.875, 1.0]
        .iter()
        .map(|&r| {
            let p = params(r);
            let fit = measure_jump_rate(space, &p, DEFAULT_ME_DT, 40.0).unwrap();
            (alpha_stationary(&p).unwrap().norm_sqr(), (1.0 / fit.omega).ln())
        })
        .collect();
    assert!(points.first().unwrap().0 < 0.9 && points.last().unwrap().0 > 1.9);
    for w in points.windows(2) {
        assert!(w[1].1 > w[0].1, "E[T_i] not increasing: {points:?}");
    }

    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    assert!(r2 > 0.95, "log-linear fit R^2 = {r2:.4} over {points:?}");
}
