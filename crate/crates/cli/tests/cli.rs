use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cbifree::bnc::Face;
use cbifree::dist::{DistributionJson, Generator};
use cbifree::limits::gaussian_cumulants;
use cbifree::scalar::{q, qi};
use cbifree::{
    is_cbf_independent, pair_moments, CumulantTable, FamilyAssignment, MatrixModel, PairMomentTable,
    TwoStateDistribution,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cbifree")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn write(dir: &TempDir, name: &str, v: &impl serde::Serialize) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn nonzero(map: &Value) -> usize {
    map.as_object().unwrap().values().filter(|v| v.as_str().unwrap() != "0").count()
}

fn pair_distribution(family: u32, seed: u64) -> TwoStateDistribution {
    let alphabet = vec![
        Generator::new(format!("x{family}"), family, Face::L),
        Generator::new(format!("y{family}"), family, Face::R),
    ];
    TwoStateDistribution::random(alphabet, 4, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[test]
fn gaussian_pair_table_has_five_conditional_cumulants() {
    let dir = TempDir::new().unwrap();
    let cond = [qi(1), q(1, 2), qi(2), qi(0), qi(0)];
    let kappa = [qi(0), qi(0), qi(3), qi(-1), qi(1)];
    let moments = pair_moments(&gaussian_cumulants(&cond, &kappa, 6)).unwrap();
    let path = write(&dir, "gauss.json", &moments.to_json());
    let o = run(&["cumulants", &path]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["degree"], 6);
    assert_eq!(nonzero(&v["K"]), 3);
    assert_eq!(nonzero(&v["kappa"]), 3);

    let cond = [qi(1), q(1, 2), qi(2), qi(1), qi(-1)];
    let moments = pair_moments(&gaussian_cumulants(&cond, &kappa, 6)).unwrap();
    let path = write(&dir, "gauss5.json", &moments.to_json());
    let v = stdout_json(&run(&["cumulants", &path]));
    assert_eq!(nonzero(&v["K"]), 5);
    assert_eq!(v["K"]["1,0"], "1");
    assert_eq!(v["K"]["1,1"], "-1");
}

#[test]
fn delta_table_has_no_nonzero_cumulants() {
    let dir = TempDir::new().unwrap();
    let t = PairMomentTable::from_fn(5, |_, _| qi(0), |_, _| qi(0));
    let path = write(&dir, "delta.json", &t.to_json());
    let v = stdout_json(&run(&["cumulants", &path]));
    assert_eq!(nonzero(&v["K"]) + nonzero(&v["kappa"]), 0);
}

#[test]
fn malformed_rational_is_a_schema_error() {
    let dir = TempDir::new().unwrap();
    let text = std::fs::read_to_string(data("pair.json")).unwrap().replace("1/2", "1/0");
    let p = dir.path().join("bad.json");
    std::fs::write(&p, text).unwrap();
    let o = run(&["cumulants", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("1/0") && err.contains("phi at 1,1"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn type_errors_name_field_and_line() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\n  \"degree\": 1,\n  \"phi\": {\"1,0\": 3},\n  \"psi\": {}\n}").unwrap();
    let o = run(&["cumulants", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("phi.1,0") && err.contains("line 3"), "{err}");

    std::fs::write(&p, "[1, 2]").unwrap();
    assert_eq!(code(&run(&["cumulants", p.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["cumulants", "/nonexistent/file.json"])), 2);
}

#[test]
fn incomplete_or_too_short_inputs_fail() {
    let pair = data("pair.json");
    let o = run(&["cumulants", pair.to_str().unwrap(), "--degree", "3"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["cumulants", pair.to_str().unwrap(), "--degree", "0"])), 2);
    let o = run(&["cumulants", pair.to_str().unwrap(), "--degree", "1"]);
    assert_eq!(stdout_json(&o)["degree"], 1);
}

#[test]
fn word_distribution_cumulants_match_library() {
    let dir = TempDir::new().unwrap();
    let dist = pair_distribution(0, 5);
    let path = write(&dir, "d.json", &dist.to_json());
    let v = stdout_json(&run(&["cumulants", &path, "--degree", "3"]));
    let expected = serde_json::to_value(CumulantTable::from_distribution(&dist.truncate(3), 3).unwrap().to_json()).unwrap();
    assert_eq!(v, expected);

    let f = stdout_json(&run(&["cumulants", &path, "--mode", "float"]));
    let exact = &stdout_json(&run(&["cumulants", &path]))["cumulants"];
    for (key, cell) in f["cumulants"].as_object().unwrap() {
        let k: f64 = cbifree::scalar::parse_q(exact[key]["K"].as_str().unwrap()).map(|x| cbifree::Scalar::to_f64(&x)).unwrap();
        assert!((cell["K"].as_f64().unwrap() - k).abs() < 1e-12);
    }

    let o = run(&["--format", "csv", "cumulants", &path, "--degree", "2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "word,kappa,K");
    assert_eq!(lines.len(), 1 + 2 + 4);
}

#[test]
fn join_output_is_cbifree() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", &pair_distribution(0, 1).to_json());
    let b = write(&dir, "b.json", &pair_distribution(1, 2).to_json());
    let o = run(&["join", &a, &b, "--degree", "3"]);
    assert_eq!(code(&o), 0);
    let raw: DistributionJson = serde_json::from_slice(&o.stdout).unwrap();
    let joint = TwoStateDistribution::from_json(raw).unwrap();
    assert_eq!(joint.degree(), 3);
    assert_eq!(joint.alphabet().len(), 4);
    let report = is_cbf_independent(&joint, &FamilyAssignment::from_alphabet(joint.alphabet()), 3).unwrap();
    assert!(report.independent);

    let o = run(&["join", &a, &a]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("x0"));
}

#[test]
fn verify_random_model_agrees() {
    let o = run(&["verify", "--seed", "42", "--families", "2", "--dim", "3", "--cap", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["all_agree"], true);
    assert_eq!(v["mixed_cumulants_vanish"], true);
    assert_eq!(v["words"].as_array().unwrap().len(), 4 + 16 + 64 + 256 + 1024);
    assert!(v["disagreements"].as_array().unwrap().is_empty());
}

#[test]
fn verify_single_family_agrees() {
    let v = stdout_json(&run(&["verify", "--seed", "3", "--families", "1", "--cap", "4"]));
    assert_eq!(v["all_agree"], true);
}

#[test]
fn fault_injection_is_detected_and_localized() {
    let o = run(&["verify", "--seed", "42", "--cap", "4", "--fault-inject", "b1"]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["all_agree"], false);
    assert_eq!(v["fault_localized"], true);
    let bad = v["disagreements"].as_array().unwrap();
    assert!(bad.iter().any(|w| w == "b1"));
    for w in bad {
        assert!(w.as_str().unwrap().split(',').any(|s| s == "b1"));
    }
    for c in v["words"].as_array().unwrap() {
        if !c["word"].as_str().unwrap().split(',').any(|s| s == "b1") {
            assert_eq!(c["cumulant"], true);
        }
    }
    assert_eq!(code(&run(&["verify", "--cap", "2", "--fault-inject", "zz"])), 2);
}

#[test]
fn verify_reads_model_files_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let model = MatrixModel::random(2, 2, &mut ChaCha8Rng::seed_from_u64(9));
    let path = write(&dir, "model.json", &model.to_json());
    let first = run(&["verify", "--model", &path, "--cap", "3"]);
    let second = run(&["verify", "--model", &path, "--cap", "3"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(stdout_json(&first)["source"]["model"], path.as_str());
    assert_eq!(code(&run(&["verify", "--model", &path, "--seed", "1"])), 2);
    assert_eq!(code(&run(&["--format", "csv", "verify", "--cap", "2"])), 2);
}

#[test]
fn residuals_vanish() {
    let v = stdout_json(&run(&["residuals", "--seed", "11", "--degree", "5"]));
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 7);
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["max_abs"], 0.0);
    }
    let o = run(&["residuals", "--seed", "11", "--mode", "float"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["tolerance"], 1e-9);
    let o = run(&["residuals", data("pair.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&["residuals"])), 2);
}

#[test]
fn clt_limit_exponent() {
    let o = run(&["limits", data("clt.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["pass"], true);
    for c in v["checks"].as_array().unwrap() {
        assert!((c["fitted"].as_f64().unwrap() + 0.5).abs() < 0.05);
    }
}

#[test]
fn poisson_limit_exponent_and_csv() {
    let o = run(&["limits", data("poisson.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let fit = v["checks"][0]["fitted"].as_f64().unwrap();
    assert!((fit + 1.0).abs() < 0.1);

    let dir = TempDir::new().unwrap();
    let out = dir.path().join("rows.csv");
    let o = run(&["limits", data("poisson.json").to_str().unwrap(), "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("side,m,n,steps,target,observed,abs_error,exponent\n"));
    assert_eq!(text.lines().count(), 1 + 3 * 2 * 14);
}

#[test]
fn degenerate_poisson_has_zero_error() {
    let v = stdout_json(&run(&["limits", data("poisson_zero.json").to_str().unwrap()]));
    for r in v["rows"].as_array().unwrap() {
        assert_eq!(r["abs_error"], 0.0);
    }
    assert!(v["fits"].as_array().unwrap().iter().all(|f| f["exponent"].is_null()));
}

#[test]
fn limit_config_errors_and_failed_expectations() {
    let dir = TempDir::new().unwrap();
    let mut cfg: Value = serde_json::from_str(&std::fs::read_to_string(data("clt.json")).unwrap()).unwrap();
    cfg["expect"][0]["exponent"] = (-2.0).into();
    let p = write(&dir, "fail.json", &cfg);
    assert_eq!(code(&run(&["limits", &p])), 1);

    cfg["stray"] = 1.into();
    let p = write(&dir, "stray.json", &cfg);
    let o = run(&["limits", &p]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("stray"));

    let mut cfg: Value = serde_json::from_str(&std::fs::read_to_string(data("clt.json")).unwrap()).unwrap();
    cfg["cumulants"]["K"]["1,0"] = "1".into();
    let p = write(&dir, "mean.json", &cfg);
    assert_eq!(code(&run(&["limits", &p])), 2);
}

#[test]
fn clap_rejects_unknown_subcommands() {
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["--format", "xml", "limits", "x"])), 2);
}
