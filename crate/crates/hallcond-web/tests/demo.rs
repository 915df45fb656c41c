//! The three page computations, checked natively.

use hallcond::config::preset;
use hallcond::run::run;
use hallcond_web::{curvature_map, curvature_map_js, spectrum_curve, switching_sweep, DemoParams};

fn clean() -> DemoParams {
    DemoParams { disorder: 0.0, ..DemoParams::default() }
}

#[test]
fn parameters_default_and_use_camel_case_keys() {
    let p: DemoParams = serde_json::from_str("{}").unwrap();
    assert_eq!(p, DemoParams::default());
    let p: DemoParams = serde_json::from_str(r#"{"M": 6, "nMax": 3, "filling": 2}"#).unwrap();
    assert_eq!((p.m, p.n_max, p.filling), (6, 3, 2));
}

#[test]
fn out_of_range_parameters_are_configuration_errors() {
    for p in [
        DemoParams { m: 7, ..clean() },
        DemoParams { m: 18, ..clean() },
        DemoParams { filling: 4, n_max: 4, ..clean() },
        DemoParams { filling: 0, ..clean() },
    ] {
        let err = curvature_map(&p, 4).unwrap_err();
        assert_eq!(err.exit_code(), 1, "{p:?}: {err}");
    }
}

#[test]
fn clean_spectrum_is_flat_landau_levels() {
    let r = spectrum_curve(&clean(), 8, 4).unwrap();
    assert_eq!(r.n, 8);
    assert_eq!(r.levels.len(), 12);
    assert_eq!(r.phi_x.len(), 9);
    for (k, row) in r.levels.iter().enumerate() {
        let expected = if k < 8 { 0.5 } else { 1.5 };
        assert!(row.iter().all(|e| (e - expected).abs() < 1e-10), "level {k}: {row:?}");
    }
    assert!((r.min_gap - 1.0).abs() < 1e-10);
}

#[test]
fn disordered_spectrum_is_ordered_and_gapped() {
    let r = spectrum_curve(&DemoParams::default(), 12, 3).unwrap();
    for i in 0..r.phi_x.len() {
        assert!(r.levels.windows(2).all(|w| w[0][i] <= w[1][i] + 1e-12));
    }
    assert!(r.min_gap > 0.3, "{}", r.min_gap);
    assert!(r.levels[0].iter().any(|e| (e - 0.5).abs() > 1e-3));
}

#[test]
fn curvature_map_integrates_to_the_chern_number() {
    for (filling, chern) in [(1usize, -1i64), (2, -2)] {
        let r = curvature_map(&DemoParams { filling, ..DemoParams::default() }, 6).unwrap();
        assert_eq!(r.chern, chern);
        assert_eq!(r.winding_p, Some(-chern));
        assert_eq!(r.phases.len(), r.nx * r.ny);
        let total: f64 = r.phases.iter().sum::<f64>() / (2.0 * std::f64::consts::PI);
        assert!((total - chern as f64).abs() < 1e-9, "{total}");
        assert!((r.sigma_xy - chern as f64).abs() < 1e-12);
    }
}

#[test]
fn json_wrapper_returns_the_same_map() {
    let text = curvature_map_js(r#"{"M": 4, "nMax": 3}"#, 4).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["chern"], -1);
    assert_eq!(v["phases"].as_array().unwrap().len(), 16);
}

#[test]
fn switching_sweep_matches_the_run_scan_and_respects_the_bound() {
    let etas = [1e-1, 1e-2, 1e-3];
    let points = switching_sweep(&clean(), &etas, 15.0).unwrap();
    let rows = run(&preset("switching-sweep").unwrap()).unwrap().scan.unwrap();
    for (p, row) in points.iter().zip(&rows) {
        assert_eq!(p.eta, row.value);
        assert!((p.envelope - row.delta_envelope.unwrap()).abs() < 1e-12);
        assert!((p.bound - row.delta_bound.unwrap()).abs() < 1e-12);
        assert!((p.delta_sigma_xy - row.delta_sigma_xy.unwrap()).abs() < 1e-12);
        assert!(p.envelope <= p.bound);
    }
    assert!(points.windows(2).all(|w| w[1].envelope < w[0].envelope));
}
