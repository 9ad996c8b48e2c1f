//! End-to-end tests of the recurgcd binary: output formats, exit codes and
//! byte-level determinism of the CSV artifacts.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recurgcd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(body.as_bytes()).unwrap();
    path.to_string_lossy().into_owned()
}

const MERSENNE_CFG: &str = "field = Q\ns_primes = 2, 3\nn_max = 30\neps = 1/20\nprecision = 256\n\n[F]\n1 ; 2\n-1 ; 1\n\n[G]\n1 ; 3\n-1 ; 1\n";

#[test]
fn loggcd_sweep_csv_format_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.cfg", MERSENNE_CFG);
    let out = run(&["loggcd-sweep", "--config", &cfg]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("coprime_in_r_gamma: true"), "{stdout}");
    assert!(stdout.contains("hypothesis_max_root_ge_1: ok"));
    assert!(stdout.contains("n,loggcd_lo,loggcd_hi,eps_n,below_eps,reason"));
    // n = 4: gcd(15, 80) = 5, not below eps*4.
    let row4 = stdout.lines().find(|l| l.starts_with("4,")).unwrap();
    assert!(row4.ends_with(",0,"), "{row4}");
    // n = 0 is skipped: both sequences vanish.
    let row0 = stdout.lines().find(|l| l.starts_with("0,")).unwrap();
    assert!(row0.contains("zero_value"));
}

#[test]
fn csv_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.cfg", MERSENNE_CFG);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, _) in [(&a, 0), (&b, 1)] {
        let out = run(&["loggcd-sweep", "--config", &cfg, "--out", path.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn cli_overrides_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.cfg", MERSENNE_CFG);
    let out = run(&["loggcd-sweep", "--config", &cfg, "--n-max", "5"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("rows: 6"), "{stdout}");
}

#[test]
fn group_reports_torsion_and_split_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g.cfg",
        "field = Q\nn_max = 10\neps = 1/2\n\n[F]\n1 ; -2\n1 ; 1\n\n[G]\n1 ; 2\n-1 ; 1\n",
    );
    let out = run(&["group", "--config", &cfg]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("torsion_order: 2"), "{stdout}");
    assert!(stdout.contains("coprime_ell_0: true"));
    assert!(stdout.contains("coprime_ell_1: false"));
}

#[test]
fn skolem_finds_the_zero_at_the_origin() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.cfg", MERSENNE_CFG);
    let out = run(&["skolem", "--config", &cfg, "--n-max", "100"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("zeros: 0\n"), "{stdout}");
    assert!(stdout.contains("nondegenerate: true"));
}

#[test]
fn hadamard_counts_integral_indices() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "h.cfg",
        "field = Q\ns_primes = \nn_max = 50\n\n[F]\n1 ; 4\n-1 ; 1\n\n[G]\n1 ; 2\n-1 ; 1\n",
    );
    let out = run(&["hadamard", "--config", &cfg]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    // (4^n - 1)/(2^n - 1) = 2^n + 1 for every n >= 1.
    assert!(stdout.contains("integral_count: 50"), "{stdout}");
}

#[test]
fn subspace_reports_no_violations_for_powers_of_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.cfg",
        "field = Q\ns_primes = 2\nn_max = 15\neps = 1/2\nprecision = 256\n\n[form]\n1\n0\n\n[form]\n0\n1\n\n[form]\n1\n1\n\n[point]\n1 ; 1\n--\n1 ; 2\n",
    );
    let out = run(&["subspace", "--config", &cfg]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("violations: 0"), "{stdout}");
    assert!(stdout.contains("undecided: 0"));
    assert!(stdout.contains("index,lhs_lo,lhs_hi,rhs_lo,rhs_hi,violated,undecided"));
}

#[test]
fn group_reports_zero_recurrence_splits() {
    // (-2)^n + 2^n vanishes on every odd index, so the l = 1 split is the
    // zero recurrence and must be reported as such rather than erroring.
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "z.cfg",
        "field = Q\nn_max = 10\neps = 1/2\n\n[F]\n1 ; -2\n1 ; 2\n\n[G]\n1 ; 2\n-1 ; 1\n",
    );
    let out = run(&["group", "--config", &cfg]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("coprime_ell_1: zero_recurrence"), "{stdout}");
}

#[test]
fn quadratic_fibonacci_experiment_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "fib.cfg",
        "field = 5\nquad_unit = (1/2 + 1/2*sqrt(5))\nn_max = 40\neps = 1/10\nprecision = 256\n\n\
         [F]\n(0 + 1/5*sqrt(5)) ; (1/2 + 1/2*sqrt(5))\n(0 - 1/5*sqrt(5)) ; (1/2 - 1/2*sqrt(5))\n\n\
         [G]\n1 ; (1/2 + 1/2*sqrt(5))\n1 ; (1/2 - 1/2*sqrt(5))\n",
    );
    // The combined root group has torsion 2, so the sweep reports that and
    // the group subcommand resolves the split verdicts.
    let out = run(&["loggcd-sweep", "--config", &cfg]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("coprime_in_r_gamma: torsion(2)"), "{stdout}");
    // gcd(F_1, L_1) = 1: log gcd = 0 < eps.
    let row1 = stdout.lines().find(|l| l.starts_with("1,")).unwrap();
    assert!(row1.contains(",1,"), "{row1}");

    let out = run(&["group", "--config", &cfg]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("torsion_order: 2"), "{stdout}");
    assert!(stdout.contains("coprime_ell_0: true"));
    assert!(stdout.contains("coprime_ell_1: true"));
}

#[test]
fn selftest_runs_without_config() {
    let out = run(&["selftest", "--precision", "128"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("result: ok"));
    assert!(stdout.contains("rational,10000,1"));
}

#[test]
fn missing_config_is_an_error() {
    let out = run(&["loggcd-sweep"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("--config is required"), "{stderr}");
}

#[test]
fn bad_config_fails_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "eps = 0\n");
    let out = run(&["loggcd-sweep", "--config", &cfg]);
    assert!(!out.status.success());
}
