use std::fs;
use std::path::PathBuf;

use arcdet_core::harness::commands::{cmd_scaling, ScalingRule};
use arcdet_core::harness::fit::class_constants;
use arcdet_core::harness::manifest::parameter_hash;
use arcdet_core::harness::{execute, replay, write_run, Command, FamilySpec, Format, RunManifest, RunOptions};
use arcdet_core::numerics::{sinc, widom_constant, RealContext};
use arcdet_core::toeplitz::log_det_config;
use arcdet_core::{Float, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("arcdet-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn small_compare() -> Command {
    Command::Compare {
        eps: vec!["1/2".into()],
        n_min: 8,
        n_max: 14,
        k: 1,
    }
}

#[test]
fn manifest_replays_byte_identical() {
    let dir = scratch("replay");
    let options = RunOptions::default();
    let cmd = small_compare();
    let report = execute(&cmd, &options).unwrap();
    let (manifest, path) = write_run(&dir, &cmd, &options, &report).unwrap();
    assert_eq!(manifest.outputs.len(), 2);
    let csv = fs::read_to_string(dir.join(&manifest.outputs[0].file)).unwrap();
    assert!(csv.starts_with(&format!("# manifest {}\n", manifest.hash)));
    assert!(replay(&path).unwrap().is_empty());

    let mut tampered: RunManifest = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    tampered.outputs[0].sha256 = "0".repeat(64);
    fs::write(&path, serde_json::to_string(&tampered).unwrap()).unwrap();
    assert_eq!(replay(&path).unwrap(), vec![manifest.outputs[0].file.clone()]);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn hash_depends_on_parameters_only() {
    let a = RunOptions::default();
    let b = RunOptions {
        seed: 7,
        ..RunOptions::default()
    };
    let cmd = small_compare();
    assert_eq!(parameter_hash(&cmd, &a).unwrap(), parameter_hash(&cmd, &a).unwrap());
    assert_ne!(parameter_hash(&cmd, &a).unwrap(), parameter_hash(&cmd, &b).unwrap());
}

#[test]
fn json_format_outputs_parse() {
    let options = RunOptions {
        format: Format::Json,
        ..RunOptions::default()
    };
    let report = execute(
        &Command::Fourier {
            family: FamilySpec::Odd { r: 1 },
            eps: "1/2".into(),
            k_max: 6,
        },
        &options,
    )
    .unwrap();
    for f in &report.files {
        let v: serde_json::Value = serde_json::from_str(&f.body).unwrap();
        assert_eq!(v["manifest"], "{manifest}");
    }
    assert!(report.passed());
}

#[test]
fn one_cut_determinants_match_hand_values() {
    // t_0 = 1/2, t_1 = 1/pi for the half circle
    let cfg = FamilySpec::OneCut.config(&q(1, 2)).unwrap();
    let ctx = RealContext::new(256).unwrap();
    let one = log_det_config(&cfg, 1, 256).unwrap();
    assert!((one.log_det + ctx.ln2()).abs() < 1e-70);
    let two = log_det_config(&cfg, 2, 256).unwrap();
    let pi2 = ctx.pi().square();
    let expect = (Float::with_val(256, 0.25f64) - pi2.recip()).ln();
    assert!((two.log_det - expect).abs() < 1e-70);
}

#[test]
fn compare_constant_reading_favours_zeta() {
    let report = execute(
        &Command::Compare {
            eps: vec!["1/2".into()],
            n_min: 20,
            n_max: 35,
            k: 2,
        },
        &RunOptions::default(),
    )
    .unwrap();
    assert!(report.passed(), "{:?}", report.checks);
    assert_eq!(report.summary["runs"][0]["constant_verdict"], "zeta");
}

/// `g = n - s` matches the closed form exactly when `n >= 2s`.
#[test]
fn n_minus_s_holds_from_twice_s() {
    let report = cmd_scaling(
        &[ScalingRule::NMinusS { s: 2 }, ScalingRule::NMinusS { s: 3 }],
        9,
        &[q(3, 10)],
        &RunOptions::default(),
    )
    .unwrap();
    let d2 = &report.checks[0].detail;
    let d3 = &report.checks[1].detail;
    assert!(d2.ends_with("failing at (eps=3/10, n=3)"), "{d2}");
    assert!(d3.ends_with("failing at (eps=3/10, n=4) (eps=3/10, n=5)"), "{d3}");
}

/// For odd `n` the determinant carries one fewer factor of `1 - a^2`
/// than the floor-half closed form.
#[test]
fn floor_half_odd_n_has_one_fewer_factor() {
    let ctx = RealContext::new(256).unwrap();
    for eps in [q(3, 10), q(7, 10)] {
        for n in [3usize, 5, 9, 13] {
            let fam = FamilySpec::with_intervals((n / 2) as u32).unwrap();
            let det = log_det_config(&fam.config(&eps).unwrap(), n, 256).unwrap().log_det;
            let closed = ScalingRule::FloorHalf.closed_form(n, &eps, &ctx);
            let a = sinc(&(ctx.pi() * ctx.float(&eps)));
            let one_minus = Float::with_val(256, 1u32) - a.square();
            let corrected = closed - one_minus.ln();
            assert!((det - corrected).abs() < 1e-60, "eps {eps} n {n}");
        }
    }
}

/// Per-class constants are close to the block-factorized limit at moderate eps
/// but drift near eps = 1, where finite-n corrections grow.
#[test]
fn class_constant_drift_grows_with_eps() {
    let ctx = RealContext::new(256).unwrap();
    let w = widom_constant(&ctx).to_f64();
    let gap = |e: Rational| {
        let cc = class_constants(FamilySpec::Odd { r: 1 }, &e, 70, 256).unwrap();
        let ang = std::f64::consts::PI * e.to_f64() / 2.0;
        let limit = 3.0 * (w - 0.25 * ang.cos().ln()) + 0.75 * 3f64.ln();
        (cc[0].2.to_f64() - limit).abs()
    };
    let low = gap(q(7, 20));
    let high = gap(q(9, 10));
    assert!(low < 1e-4, "{low}");
    assert!(high > 5e-3, "{high}");
}
