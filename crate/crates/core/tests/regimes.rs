//! Regression checks of the headline tuning regimes: branch structure of
//! the angle-tuning table, the co-propagating branch closure, and the
//! degenerate bandwidth blowup.

use ppwg::{
    builtin_ppln_e, idler_from_energy, solve_signal_idler, tuning_sweep, DirectionPair,
    InteractionConfig, PolingSpec, SweepAxis, SweepSolve, WaveguideSpec,
};

fn config(theta_deg: f64, period_um: f64, dirs: DirectionPair) -> InteractionConfig<f64> {
    let poling = PolingSpec::with_period(period_um * 1e-6).unwrap();
    let waveguide = WaveguideSpec::new(4e5, 1e-3, builtin_ppln_e()).unwrap();
    InteractionConfig::new(532.0, theta_deg, poling, waveguide, dirs).unwrap()
}

#[test]
fn angle_tuning_branches_order_by_grating_order() {
    // counter-propagating pairs at 80 degrees: each grating order from -3 to
    // +3 contributes exactly one branch, at strictly increasing signal
    // wavelength
    let cfg = config(80.0, 6.8, DirectionPair::counter());
    let orders = [-3, -2, -1, 0, 1, 2, 3];
    let sols = solve_signal_idler(&cfg, &orders).unwrap();
    assert_eq!(sols.len(), orders.len());
    let tol = cfg.mismatch_tolerance();
    let mut prev = 0.0;
    for (sol, &m) in sols.iter().zip(&orders) {
        assert_eq!(sol.order, m);
        assert!(sol.lambda_s_nm > prev, "branches out of order at m = {m}");
        assert!(sol.residual.abs() < tol);
        let li = idler_from_energy(532.0, sol.lambda_s_nm).unwrap();
        assert!(((li - sol.lambda_i_nm) / li).abs() < 1e-12);
        prev = sol.lambda_s_nm;
    }
}

#[test]
fn copropagating_curve_closes_near_normal_incidence() {
    // at the longer period the co-propagating pair curve exists only within
    // a few degrees of normal incidence, with two roots straddling
    // degeneracy until the branch closes
    let cfg = config(0.0, 7.4, DirectionPair::co());
    let sweep = tuning_sweep(
        &cfg,
        SweepAxis::ThetaDeg {
            lo: 0.0,
            hi: 4.5,
            step: 0.5,
        },
        SweepSolve::Pairs,
        &[1],
        None,
    )
    .unwrap();
    for row in &sweep.rows {
        if row.axis_value <= 4.0 {
            assert_eq!(
                row.solutions.len(),
                2,
                "expected both branches at theta = {}",
                row.axis_value
            );
            assert!(row.solutions[0].lambda_s_nm < 1064.0);
            assert!(row.solutions[1].lambda_s_nm > 1064.0);
        } else {
            assert!(
                row.solutions.is_empty(),
                "curve should have closed by theta = {}",
                row.axis_value
            );
        }
    }
}

#[test]
fn degenerate_bandwidth_dwarfs_nondegenerate() {
    // co-propagating width at degeneracy versus at the 810 nm branch; the
    // blowup factor is around 18 with appreciable dependence on the
    // dispersion fit, so the band is wide
    let co_deg = ppwg::spectrum_slice(
        &config(0.0, 6.8, DirectionPair::co()),
        &ppwg::LambdaWindow::new(900.0, 1250.0, 0.05).unwrap(),
    )
    .unwrap()
    .fwhm_nm
    .unwrap();
    let co_810 = ppwg::auto_slice(&config(0.0, 7.4, DirectionPair::co()), Some(810.0))
        .unwrap()
        .fwhm_nm
        .unwrap();
    let factor = co_deg / co_810;
    assert!(
        (9.0..=27.0).contains(&factor),
        "degenerate/nondegenerate width factor = {factor}"
    );
}
