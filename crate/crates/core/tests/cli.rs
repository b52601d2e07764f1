use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const TG: &str = "box_l = 6.283185307179586\nt_final = 0.05\ndt = 0.001\ncutoff = 2\n[ic]\nfamily = \"taylor_green\"\n\
[output]\ncheckpoint_every = 25\n";

const RANDOM: &str = "box_l = 6.283185307179586\nviscosity = 0.1\nt_final = 0.1\ndt = 0.01\ncutoff = 3\n\
[ic]\nfamily = \"random_band\"\nseed = 4\nk_max = 3.0\nslope = -2.0\namplitude = 0.3\n\
[forcing]\nfamily = \"random_band\"\nseed = 5\nk_max = 2.0\namplitude = 0.2\n";

struct Case {
    dir: tempfile::TempDir,
}

impl Case {
    fn new(config: &str) -> Self {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("cfg.toml"), config).unwrap();
        Case { dir }
    }

    fn cfg(&self) -> PathBuf {
        self.dir.path().join("cfg.toml")
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, sub: &str, out: &str, extra: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_periodic-ns"))
            .arg(sub)
            .arg("--config")
            .arg(self.cfg())
            .arg("--out")
            .arg(self.out(out))
            .args(extra)
            .output()
            .unwrap()
    }
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn zero_run_is_trivial() {
    let c = Case::new("box_l = 1.0\nt_final = 0.05\ndt = 0.01\ncutoff = 2\n[ic]\nfamily = \"zero\"\n");
    let o = c.run("run", "o", &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(c.out("o/ledger.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("# periodic-ns-ledger v1")));
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("step"))
        .collect();
    assert_eq!(rows.len(), 6);
    assert!(rows
        .iter()
        .all(|r| r.split(',').skip(2).all(|v| v.parse::<f64>().unwrap() == 0.0)));
}

#[test]
fn taylor_green_run_certifies_decay() {
    let c = Case::new(TG);
    let o = c.run("run", "o", &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cert = report(&c.out("o/certificates.json"));
    assert_eq!(cert["report"]["taylor_green_decay"]["passed"], true);
    assert_eq!(cert["report"]["passed"], true);
    assert!(cert["config"].as_str().unwrap().contains("taylor_green"));
    assert_eq!(cert["config_hash"].as_str().unwrap().len(), 64);
    for name in [
        "checkpoint_00000000.json",
        "checkpoint_00000025.json",
        "checkpoint_00000050.json",
        "final.json",
    ] {
        assert!(c.out("o").join(name).exists(), "{name}");
    }

    // pressure of the final state
    let ck = c.out("o/final.json");
    let o = c.run("pressure", "p", &["--checkpoint", ck.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = report(&c.out("p/pressure_report.json"));
    assert!(
        rep["report"]["analytic"]["taylor_green_relative_error"]
            .as_f64()
            .unwrap()
            < 1e-8
    );
    let snap = report(&c.out("p/pressure.json"));
    assert_eq!(snap["scalar"], true);
    assert_eq!(snap["q0"].as_f64().unwrap(), std::f64::consts::TAU.powi(3));
}

#[test]
fn viscous_cfl_violation_is_a_config_error() {
    let c = Case::new("scheme = \"rk4\"\nbox_l = 1.0\nt_final = 1.0\ndt = 0.1\ncutoff = 4\n[ic]\nfamily = \"zero\"\n");
    let o = c.run("run", "o", &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("viscous"));
}

#[test]
fn unknown_keys_and_missing_files_are_config_errors() {
    let c = Case::new("box_l = 1.0\nt_final = 0.1\ndt = 0.01\ncutoff = 2\nviscosty = 2.0\n[ic]\nfamily = \"zero\"\n");
    assert_eq!(code(&c.run("run", "o", &[])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_periodic-ns"))
        .args(["run", "--config", "/nonexistent/cfg.toml"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn blow_up_exits_3_with_partial_ledger() {
    let c = Case::new(
        "scheme = \"rk4\"\nbox_l = 1.0\nt_final = 2.0\ndt = 0.01\ncutoff = 3\n[ic]\nfamily = \"random_band\"\nseed = 1\nk_max = 3.0\n\
         [tolerances]\ncfl_viscous = 1e9\ncfl_advective = 1e300\nsolenoidal = 1e300\n",
    );
    let o = c.run("run", "o", &[]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(c.out("o/ledger.csv")).unwrap();
    assert!(csv.lines().count() > 3);
    assert_eq!(report(&c.out("o/certificates.json"))["report"]["passed"], false);
}

#[test]
fn replay_is_byte_identical() {
    let c = Case::new(RANDOM);
    assert_eq!(code(&c.run("run", "a", &[])), 0);
    assert_eq!(code(&c.run("run", "b", &[])), 0);
    for name in ["ledger.csv", "certificates.json", "final.json"] {
        assert_eq!(
            fs::read(c.out("a").join(name)).unwrap(),
            fs::read(c.out("b").join(name)).unwrap(),
            "{name}"
        );
    }
    assert_eq!(code(&c.run("run", "s", &["--seed", "99"])), 0);
    assert_ne!(
        fs::read(c.out("a/ledger.csv")).unwrap(),
        fs::read(c.out("s/ledger.csv")).unwrap()
    );
    let cert = report(&c.out("s/certificates.json"));
    assert!(cert["config"].as_str().unwrap().contains("seed = 99"));
}

#[test]
fn convergence_subcommand() {
    let c = Case::new(TG);
    let o = c.run("convergence", "o", &["--cutoffs", "2,3,4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = report(&c.out("o/convergence.json"));
    assert_eq!(t["report"]["rows"].as_array().unwrap().len(), 2);
    assert!(c.out("o/convergence.csv").exists());
    assert_eq!(code(&c.run("convergence", "x", &["--cutoffs", "2,4"])), 2);
}

#[test]
fn uniqueness_subcommand() {
    let c = Case::new(RANDOM);
    let o = c.run("uniqueness", "zero", &["--delta", "0"]);
    assert_eq!(code(&o), 0);
    let rep = report(&c.out("zero/gronwall.json"));
    assert!(rep["report"]["w_sq"]
        .as_array()
        .unwrap()
        .iter()
        .all(|w| w.as_f64() == Some(0.0)));

    let o = c.run("uniqueness", "d", &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = report(&c.out("d/gronwall.json"));
    assert_eq!(rep["report"]["mode"], "derived");
    assert!(rep["report"]["derivation"].as_str().unwrap().contains("1/(2 nu)"));

    let o = c.run("uniqueness", "m", &["--delta", "0.5", "--constant", "measure"]);
    assert_eq!(code(&o), 0);
    assert!(report(&c.out("m/gronwall.json"))["report"]["measured_c"].is_number());

    // a negative constant demands faster decay than the run shows
    let o = c.run("uniqueness", "f", &["--delta", "0.5", "--constant=-10"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn check_compat_and_norms() {
    let c = Case::new(RANDOM);
    let o = c.run("check-compat", "c", &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = report(&c.out("c/compat.json"));
    assert_eq!(rep["report"]["passed"], true);
    assert_eq!(rep["report"]["face_points"], 64);

    let o = c.run("norms", "n", &[]);
    assert_eq!(code(&o), 0);
    let rep = report(&c.out("n/norms.json"));
    assert_eq!(rep["report"]["interpolation"]["holds"], true);
    assert!(rep["report"]["max_divergence"].as_f64().unwrap() < 1e-12);
}
