use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hybrid_noma::cli::sweep::{read_csv, write_csv, Link, Mode, RunRecord, CSV_HEADER};
use hybrid_noma::cli::Settings;
use hybrid_noma::rate::Method;
use proptest::prelude::*;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hybrid-noma"));
    c.env_remove("HYBRID_NOMA_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    let o = run(&["sumrate", "--link", "rf", "--mode", "ofdma"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn empty_config_gives_reference_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.toml");
    fs::write(&path, "").unwrap();
    let o = run(&["--config", path.to_str().unwrap(), "config"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for line in [
        "height = 2.15  # default",
        "cell_radius = 3.6  # default",
        "semi_angle_deg = 45.0  # default",
        "fov_deg = 60.0  # default",
        "responsivity = 0.4  # default",
        "pd_area = 0.0001  # default",
        "refractive_index = 1.5  # default",
    ] {
        assert!(text.contains(line), "missing `{line}` in\n{text}");
    }
    assert_eq!(text, stdout(&run(&["config"])));
}

#[test]
fn single_override_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.toml");
    fs::write(&path, "# users\nK = 5\n").unwrap();
    let text = stdout(&run(&["--config", path.to_str().unwrap(), "config"]));
    assert!(text.contains("K = 5  # file line 2"), "{text}");
    assert!(text.contains("height = 2.15  # default"));
    let text = stdout(&run(&["--config", path.to_str().unwrap(), "-K", "3", "config"]));
    assert!(text.contains("K = 3  # flag"), "{text}");
    let text = stdout(&bin().env("HYBRID_NOMA_SEED", "42").arg("config").output().unwrap());
    assert!(text.contains("seed = 42  # env"), "{text}");
}

#[test]
fn bad_config_values_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "K = 2\nsemi_angle_deg = 120\n").unwrap();
    let o = run(&["--config", path.to_str().unwrap(), "config"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("semi_angle_deg"), "{}", stderr(&o));

    fs::write(&path, "K = 2\nwat = 1\n").unwrap();
    let o = run(&["--config", path.to_str().unwrap(), "config"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("wat"));
    assert!(stderr(&o).contains('2'));

    fs::write(&path, "K = 2\nrho_db = = 3\n").unwrap();
    let o = run(&["--config", path.to_str().unwrap(), "config"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = run(&["--set", "nonsense", "config"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sumrate_reports_both_methods() {
    let o = run(&["-K", "3", "--rho-db", "150", "--trials", "20000", "sumrate"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("vlc noma analytic:"));
    assert!(text.contains("vlc noma mc:") && text.contains("20000 trials"));
}

#[test]
fn sweep_writes_well_formed_csv() {
    let o = run(&[
        "-K", "3", "--trials", "5000", "sweep", "--param", "rho_db", "--from", "120", "--to", "180", "--steps", "4",
        "--modes", "noma,ofdma",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with(CSV_HEADER));
    assert!(!text.contains('\r'));
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 4 * 2 * 2);
    for r in &rows {
        match r.method {
            Method::Analytic => assert_eq!((r.std_error, r.trials), (0.0, 0)),
            Method::MonteCarlo => assert!(r.std_error > 0.0 && r.trials == 5000),
        }
        assert!(r.estimate.is_finite() && r.estimate >= 0.0);
    }
    let digests: std::collections::HashSet<_> = rows.iter().map(|r| r.config_digest.as_str()).collect();
    assert_eq!(digests.len(), 4);
}

#[test]
fn sweep_rejects_bad_ranges() {
    for args in [
        ["sweep", "--param", "semi_angle_deg", "--from", "30", "--to", "120"],
        ["sweep", "--param", "rho_db", "--from", "150", "--to", "100"],
        ["sweep", "--param", "bogus", "--from", "1", "--to", "2"],
    ] {
        assert_eq!(run(&args).status.code(), Some(1), "{args:?}");
    }
}

fn reproduce_into(dir: &Path) -> Output {
    run(&["--trials", "4000", "--seed", "9", "reproduce", "--figure", "fig6", "--out", dir.to_str().unwrap()])
}

#[test]
fn reproduce_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let oa = reproduce_into(a.path());
    assert!(oa.status.success(), "{}", stderr(&oa));
    assert!(reproduce_into(b.path()).status.success());
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n.to_string_lossy() == "fig6.manifest"));
    assert!(names.iter().any(|n| n.to_string_lossy() == "fig6.gp"));
    assert!(names.iter().filter(|n| n.to_string_lossy().ends_with(".csv")).count() >= 2);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn digest_tracks_resolved_values_only() {
    let a = Settings::default();
    let mut b = Settings::default();
    b.set_flag("height=2.15").unwrap();
    assert_eq!(a.digest(), b.digest());
    b.set_flag("height=2.5").unwrap();
    assert_ne!(a.digest(), b.digest());
    assert_eq!(a.digest().len(), 16);
    assert!(a.digest().chars().all(|c| c.is_ascii_hexdigit()));
}

fn record() -> impl Strategy<Value = RunRecord> {
    (
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        prop::sample::select(Link::ALL.to_vec()),
        prop::sample::select(Mode::ALL.to_vec()),
        prop::bool::ANY,
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        0.0..1e3f64,
        any::<u64>(),
        any::<u64>(),
        "[0-9a-f]{16}",
    )
        .prop_map(|(value, link, mode, mc, estimate, se, trials, seed, digest)| RunRecord {
            param: "rho_db".into(),
            value,
            link,
            mode,
            method: if mc { Method::MonteCarlo } else { Method::Analytic },
            estimate,
            std_error: se,
            trials,
            seed,
            config_digest: digest,
            error: None,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trips_exactly(rows in prop::collection::vec(record(), 0..20)) {
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, rows);
    }

    #[test]
    fn digest_is_a_function_of_values(k in 1u64..12, rho in 100.0..200.0f64) {
        let mut a = Settings::default();
        a.set_flag(&format!("K={k}")).unwrap();
        a.set_flag(&format!("rho_db={rho:?}")).unwrap();
        let mut b = Settings::default();
        b.merge_str(&format!("rho_db = {rho:?}\nK = {k}\n")).unwrap();
        prop_assert_eq!(a.digest(), b.digest());
    }
}
