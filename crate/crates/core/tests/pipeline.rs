use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nlets::css::{css_distance_exhaustive, logical_basis, steane, Basis};
use nlets::expansion::TrialConfig;
use nlets::gf2::DEFAULT_COSET_CAP;
use nlets::hgp::DEFAULT_AUDIT_CAP;
use nlets::pipeline::{
    class_distance, run_nlets, run_warmup, Amplitudes, AuditConfig, CodeSpec, ExperimentConfig,
    GraphSpec, NletsReport, WarmupConfig,
};
use num_complex::Complex64;
use serde_json::Value;

fn cycle3(eps: f64, seed: u64, runs: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(GraphSpec::Cycle { n: 3 }, eps, Amplitudes::Random, seed);
    c.runs = runs;
    c
}

/// `(2/3) log₂(μD / (4√n))` from the report fields.
fn recomputed_depth(r: &NletsReport) -> Option<f64> {
    let p = r.part3.as_ref()?;
    let (mu, d) = (p.mu?, p.distance? as f64);
    Some(2.0 / 3.0 * (mu * d / (4.0 * (p.n_bits as f64).sqrt())).log2())
}

#[test]
fn cycle3_runs_hold_and_reproduce() {
    let cfg = cycle3(0.02, 100, 20);
    let a = run_nlets(&cfg).unwrap();
    assert_eq!(a.falsified_runs, 0);
    assert_eq!(a.runs.len(), 20);
    for r in &a.runs {
        assert!(
            r.falsifications.is_empty(),
            "seed {}: {:?}",
            r.seed,
            r.falsifications
        );
        let p2 = r.part2.as_ref().unwrap();
        assert!(p2.distance_consistent);
        assert!(p2.distance_lb.iter().all(|&d| d > 0));
        let p3 = r.part3.as_ref().unwrap();
        let got = p3.depth_bound.unwrap();
        assert!((got - recomputed_depth(r).unwrap()).abs() <= 1e-12);
        assert!(r.depth_bound_consistent());
    }
    assert_eq!(run_nlets(&cfg).unwrap(), a);
}

#[test]
fn cycle3_single_flips_keep_positive_distance() {
    let mut cfg = cycle3(0.0, 200, 30);
    cfg.error_weight = Some(1);
    let batch = run_nlets(&cfg).unwrap();
    assert_eq!(batch.falsified_runs, 0);
    for r in &batch.runs {
        assert_eq!(r.error.x_support.len().max(r.error.z_support.len()), 1);
        assert_eq!(r.part1.sub_qubits, 18);
        let p2 = r.part2.as_ref().unwrap();
        assert!(p2.in_family && p2.distance_consistent);
        assert!(p2.distance_lb.iter().all(|&d| d >= 1));
        assert!(r.part3.as_ref().unwrap().chosen.is_some());
    }
}

#[test]
fn warmup_distances_and_bases() {
    let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let steane_report = run_warmup(&steane(), 0, a, a, DEFAULT_COSET_CAP).unwrap();
    assert_eq!(steane_report.chosen, Some(Basis::Z));
    assert_eq!(steane_report.distance, Some(3));
    let toric = CodeSpec::Product {
        graph: GraphSpec::Cycle { n: 3 },
    }
    .build()
    .unwrap();
    let r = run_warmup(
        &toric,
        0,
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        DEFAULT_COSET_CAP,
    )
    .unwrap();
    // A logical basis state is balanced only in the X basis.
    assert_eq!(r.chosen, Some(Basis::X));
    assert_eq!((r.distance, r.code_distance), (Some(3), Some(3)));
    assert!((r.mu.unwrap() - 0.5).abs() < 1e-12);
    for code in [steane(), toric] {
        let d = css_distance_exhaustive(&code).unwrap();
        let lb = logical_basis(&code).unwrap();
        let per_class = [Basis::Z, Basis::X].map(|b| {
            (0..lb.k())
                .map(|i| class_distance(&code, &lb, i, b, DEFAULT_COSET_CAP).unwrap())
                .min()
                .unwrap()
        });
        assert_eq!(per_class.into_iter().min().unwrap(), d);
    }
}

fn nlets_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlets"))
        .args(args)
        .output()
        .unwrap()
}

fn write_json(path: &Path, v: &impl serde::Serialize) {
    fs::write(path, serde_json::to_string(v).unwrap()).unwrap();
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cli_round_trip_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);

    fs::write(p("build.json"), r#"{"graph": {"kind": "cycle", "n": 3}}"#).unwrap();
    let out = nlets_cli(&[
        "build",
        "--config",
        s(&p("build.json")),
        "--out",
        s(&p("toric.css")),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = nlets_cli(&["css", "--code", s(&p("toric.css"))]);
    assert_eq!(out.status.code(), Some(0));
    let params: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        (
            params["n"].as_u64(),
            params["k"].as_u64(),
            params["distance"].as_u64()
        ),
        (Some(18), Some(2), Some(3))
    );

    let audit = AuditConfig {
        graph: GraphSpec::Cycle { n: 3 },
        distance_max_dim: 26,
        audit_cap: DEFAULT_AUDIT_CAP,
    };
    write_json(&p("audit.json"), &audit);
    let out = nlets_cli(&[
        "audit",
        "--config",
        s(&p("audit.json")),
        "--out",
        s(&p("audit_out.json")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        read_json(&p("audit_out.json"))["structural"]["distance"].as_u64(),
        Some(3)
    );

    let warm = WarmupConfig {
        code: CodeSpec::File {
            path: s(&p("toric.css")).into(),
        },
        logical_index: 1,
        alpha: [FRAC_1_SQRT_2, 0.0],
        beta: [0.0, FRAC_1_SQRT_2],
        cap: DEFAULT_COSET_CAP,
    };
    write_json(&p("warm.json"), &warm);
    let out = nlets_cli(&[
        "warmup",
        "--config",
        s(&p("warm.json")),
        "--out",
        s(&p("warm_out.json")),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read_json(&p("warm_out.json"))["distance"].as_u64(), Some(3));

    write_json(&p("nlets.json"), &cycle3(0.02, 0, 1));
    let (cfg_path, out_path) = (p("nlets.json"), p("nlets_out.json"));
    let args = [
        "nlets",
        "--config",
        s(&cfg_path),
        "--out",
        s(&out_path),
        "--runs",
        "3",
        "--seed",
        "40",
    ];
    let out = nlets_cli(&args);
    assert_eq!(out.status.code(), Some(0));
    let first = fs::read_to_string(p("nlets_out.json")).unwrap();
    let batch: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(batch["runs"].as_array().unwrap().len(), 3);
    assert_eq!(batch["runs"][0]["seed"].as_u64(), Some(40));
    nlets_cli(&args);
    assert_eq!(fs::read_to_string(p("nlets_out.json")).unwrap(), first);

    // Depth-0 circuits have blow-up 1, where the stated radius at γ = 1/2 is 1/4.
    let trials = TrialConfig {
        trials: 6,
        n_max: 5,
        depth_max: 0,
        ancillas_max: 0,
        seed: 2,
        ..TrialConfig::default()
    };
    write_json(&p("trials.json"), &trials);
    let (cfg_path, out_path) = (p("trials.json"), p("trials_out.json"));
    let base = [
        "expansion-trials",
        "--config",
        s(&cfg_path),
        "--out",
        s(&out_path),
    ];
    assert_eq!(nlets_cli(&base).status.code(), Some(2));
    let mut relaxed = base.to_vec();
    relaxed.push("--nonvacuous");
    assert_eq!(nlets_cli(&relaxed).status.code(), Some(0));

    let missing = nlets_cli(&[
        "audit",
        "--config",
        s(&p("absent.json")),
        "--out",
        s(&p("x.json")),
    ]);
    assert_eq!(missing.status.code(), Some(1));
    fs::write(p("bad.json"), r#"{"graph": {"kind": "cycle"}}"#).unwrap();
    let bad = nlets_cli(&[
        "audit",
        "--config",
        s(&p("bad.json")),
        "--out",
        s(&p("x.json")),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!p("x.json").exists());
    // No temporary files are left behind.
    assert!(fs::read_dir(dir.path()).unwrap().all(|e| !e
        .unwrap()
        .file_name()
        .to_string_lossy()
        .ends_with(".tmp")));
}
