//! Loading configs and time series, fitting, and empirical tables.

use nalgebra::DMatrix;
use phi_geom::io::{
    empirical_joint, fit_ar, load_system, parse_system, parse_timeseries_str, read_timeseries,
    save_system, simulate_ar, write_timeseries, SystemConfig,
};
use phi_geom::random::{random_discrete, random_gaussian, rng};
use phi_geom::{Error, System};
use rand::Rng;

fn code(text: &str) -> &'static str {
    match parse_system(text).and_then(|c| c.build()) {
        Ok(_) => "ok",
        Err(e) => e.code(),
    }
}

#[test]
fn config_errors_carry_codes() {
    assert_eq!(
        code(r#"{"type":"discrete","n":1,"probs":[0.5,0.5,0.5,0.5]}"#),
        "E_NOT_NORMALIZED"
    );
    assert_eq!(
        code(r#"{"type":"discrete","n":1,"probs":[0.5,0.5]}"#),
        "E_DIMENSION"
    );
    assert_eq!(
        code(
            r#"{"type":"gaussian","n":2,"sigma_x":[[1,0.5],[0.4,1]],"a":[[0,0],[0,0]],"sigma_e":[[1,0],[0,1]]}"#
        ),
        "E_NOT_SYMMETRIC"
    );
    assert_eq!(
        code(
            r#"{"type":"gaussian","n":2,"sigma_x":[[1,2],[2,1]],"a":[[0,0],[0,0]],"sigma_e":[[1,0],[0,1]]}"#
        ),
        "E_NOT_SPD"
    );
    assert_eq!(code(r#"{"type":"discrete","n":1}"#), "E_SCHEMA");
    assert_eq!(code("not json"), "E_PARSE");
    assert_eq!(
        code(r#"{"type":"discrete","n":1,"probs":[0.25,0.25,0.25,0.25]}"#),
        "ok"
    );
}

#[test]
fn near_normalized_tables_are_accepted() {
    let text = r#"{"type":"discrete","n":1,"probs":[0.25,0.25,0.25,0.2500000001]}"#;
    match parse_system(text).unwrap().build().unwrap() {
        System::Discrete(p) => assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15),
        System::Gaussian(_) => unreachable!(),
    }
}

#[test]
fn transition_form_builds_the_joint() {
    let text = r#"{"type":"discrete","n":1,"prior":[0.3,0.7],"kernel":[[0.9,0.1],[0.2,0.8]]}"#;
    match parse_system(text).unwrap().build().unwrap() {
        System::Discrete(p) => {
            // cell = x + 2y
            let want = [0.27, 0.14, 0.03, 0.56];
            for (a, b) in p.probs().iter().zip(want) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        System::Gaussian(_) => unreachable!(),
    }
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sys.json");
    for seed in 0..10 {
        let cfg = SystemConfig::from_discrete(&random_discrete(2, seed).unwrap()).with_seed(seed);
        save_system(&path, &cfg).unwrap();
        assert_eq!(load_system(&path).unwrap(), cfg);
        let cfg = SystemConfig::from_gaussian(&random_gaussian(3, seed).unwrap()).with_label("g");
        save_system(&path, &cfg).unwrap();
        assert_eq!(load_system(&path).unwrap(), cfg);
    }
    assert_eq!(
        load_system(dir.path().join("missing.json"))
            .unwrap_err()
            .code(),
        "E_IO"
    );
}

#[test]
fn timeseries_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ts.csv");
    let a = DMatrix::from_row_slice(2, 2, &[0.5, 0.2, 0.0, 0.3]);
    let ts = simulate_ar(&a, &DMatrix::identity(2, 2), 100, 10, 1).unwrap();
    write_timeseries(&path, &ts).unwrap();
    let back = read_timeseries(&path).unwrap();
    assert_eq!(back.names, ts.names);
    assert_eq!(back.data, ts.data);

    assert!(matches!(
        parse_timeseries_str("a,b\n1,2\n3\n"),
        Err(Error::Csv(_))
    ));
    assert_eq!(
        parse_timeseries_str("a,b\n1,x\n").unwrap_err().code(),
        "E_SCHEMA"
    );
}

#[test]
fn fit_recovers_scalar_coefficient() {
    let a = DMatrix::from_element(1, 1, 0.5);
    let ts = simulate_ar(&a, &DMatrix::identity(1, 1), 5_000, 100, 42).unwrap();
    let fit = fit_ar(&ts).unwrap();
    assert!((fit.system.a()[(0, 0)] - 0.5).abs() < 0.05);
    assert!((fit.residual_variances[0] - 1.0).abs() < 0.1);
    assert_eq!(fit.pairs, 4_999);
}

/// Independent least squares: normal equations on centered pairs.
#[test]
fn fit_matches_normal_equations() {
    let a = DMatrix::from_row_slice(2, 2, &[0.6, -0.2, 0.1, 0.4]);
    let ts = simulate_ar(&a, &DMatrix::identity(2, 2), 300, 20, 9).unwrap();
    let m = ts.len() - 1;
    let (mut x, mut y) = (
        ts.data.rows(0, m).into_owned(),
        ts.data.rows(1, m).into_owned(),
    );
    for c in 0..2 {
        let (mx, my) = (x.column(c).mean(), y.column(c).mean());
        x.column_mut(c).add_scalar_mut(-mx);
        y.column_mut(c).add_scalar_mut(-my);
    }
    let want = ((x.transpose() * &x).try_inverse().unwrap() * x.transpose() * &y).transpose();
    let fit = fit_ar(&ts).unwrap();
    assert!((fit.system.a() - want).amax() < 1e-12);
    assert!((fit.system.sigma_x() - x.transpose() * &x / m as f64).amax() < 1e-12);
}

#[test]
fn fit_rejects_degenerate_series() {
    let short = parse_timeseries_str("a,b\n1,2\n3,4\n5,6\n").unwrap();
    assert_eq!(fit_ar(&short).unwrap_err().code(), "E_INSUFFICIENT_DATA");
    let mut text = String::from("a,b\n");
    for t in 0..50 {
        text.push_str(&format!("{t},1\n"));
    }
    let constant = parse_timeseries_str(&text).unwrap();
    assert_eq!(fit_ar(&constant).unwrap_err().code(), "E_RANK_DEFICIENT");
}

#[test]
fn empirical_joint_of_uniform_draws() {
    let mut r = rng(5);
    let samples: Vec<(usize, usize)> = (0..1_000_000)
        .map(|_| (r.random_range(0..4), r.random_range(0..4)))
        .collect();
    let p = empirical_joint(2, &samples, 0.0).unwrap();
    for &v in p.probs() {
        assert!((v - 1.0 / 16.0).abs() < 0.005);
    }
}

#[test]
fn empirical_joint_pseudo_counts_and_errors() {
    let p = empirical_joint(1, &[(0, 0), (0, 0), (1, 1)], 1.0).unwrap();
    // counts + 1: [3, 1, 1, 2] / 7, cell = x + 2y
    let want = [3.0 / 7.0, 1.0 / 7.0, 1.0 / 7.0, 2.0 / 7.0];
    for (a, b) in p.probs().iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
    assert_eq!(
        empirical_joint(1, &[(2, 0)], 0.0).unwrap_err().code(),
        "E_STATE_RANGE"
    );
    assert!(empirical_joint(1, &[], 0.0).is_err());
}
