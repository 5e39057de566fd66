use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use cbifree::cumulants::CumulantTable;
use cbifree::dist::{parse_word, DistributionJson};
use cbifree::independence::{phi_moment_formula, psi_moment_formula};
use cbifree::limits::{clt_experiment, poisson_limit_experiment, Side};
use cbifree::oracle::ModelJson;
use cbifree::pair::{CumulantDataJson, Grid, PairTableJson};
use cbifree::scalar::{format_q, q_str, qi};
use cbifree::series::{check_cfree_series_relations, check_partial_functional_equation, Series1, Series2};
use cbifree::{
    cbf_join, is_cbf_independent, pair_cumulants, AtomicMeasure2D, CumulantData, FamilyAssignment, JointSource,
    LimitReport, MatrixModel, MomentSource, PairMomentTable, Scalar, TwoStateDistribution, Q,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::io::{in_file, load_json, parse_json, read_text, Report, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Rational,
    Float,
}

fn pick_degree(requested: Option<usize>, stored: usize) -> CliResult<usize> {
    match requested.unwrap_or(stored) {
        0 => Err(CliError::Usage("degree must be at least 1".into())),
        d => Ok(d),
    }
}

fn grid_f64(g: &Grid<f64>) -> BTreeMap<String, f64> {
    g.indices()
        .into_iter()
        .skip(1)
        .map(|(m, n)| (format!("{m},{n}"), *g.get(m, n)))
        .collect()
}

fn load_distribution(path: &Path, text: &str, degree: Option<usize>) -> CliResult<TwoStateDistribution> {
    let mut raw: DistributionJson = parse_json(path, text)?;
    raw.degree = pick_degree(degree, raw.degree)?;
    in_file(path, TwoStateDistribution::from_json(raw))
}

fn load_pair(path: &Path, text: &str, degree: Option<usize>) -> CliResult<PairMomentTable<Q>> {
    let mut raw: PairTableJson = parse_json(path, text)?;
    raw.degree = pick_degree(degree, raw.degree)?;
    in_file(path, PairMomentTable::from_json(&raw))
}

/// Cumulant tables of a word distribution or of a commuting pair, detected from the top-level keys.
pub fn cumulants(input: &Path, degree: Option<usize>, mode: Mode) -> CliResult<Report> {
    let text = read_text(input)?;
    let probe: Value = parse_json(input, &text)?;
    let schema = |msg: &str| CliError::Schema {
        file: input.display().to_string(),
        msg: msg.into(),
    };
    let obj = probe.as_object().ok_or_else(|| schema("top level must be an object"))?;
    if obj.contains_key("alphabet") {
        let dist = load_distribution(input, &text, degree)?;
        let table = CumulantTable::from_distribution(&dist, dist.degree())?;
        word_cumulants(&table, mode)
    } else if obj.contains_key("phi") || obj.contains_key("psi") {
        let pair = load_pair(input, &text, degree)?;
        Ok(match mode {
            Mode::Rational => {
                let data = pair_cumulants(&pair)?;
                let mut report = Report::new(serde_json::to_value(data.to_json()).expect("serializable"));
                report.table = Some(pair_table(&data));
                report
            }
            Mode::Float => {
                let data = pair_cumulants(&pair.map(f64::from_q))?;
                let mut report = Report::new(json!({
                    "degree": data.degree(),
                    "kappa": grid_f64(&data.kappa),
                    "K": grid_f64(&data.cond),
                }));
                report.table = Some(pair_table(&data));
                report
            }
        })
    } else {
        Err(schema("expected a distribution (alphabet, degree, moments) or a pair table (degree, phi, psi)"))
    }
}

fn pair_table<T: Scalar>(data: &CumulantData<T>) -> Table {
    Table {
        header: vec!["m", "n", "kappa", "K"],
        rows: data
            .kappa
            .indices()
            .into_iter()
            .skip(1)
            .map(|(m, n)| {
                vec![m.to_string(), n.to_string(), data.kappa.get(m, n).render(), data.cond.get(m, n).render()]
            })
            .collect(),
    }
}

fn word_cumulants(table: &CumulantTable, mode: Mode) -> CliResult<Report> {
    let entries = table.entries();
    let key = |w: &[usize]| cbifree::dist::word_key(table.alphabet(), w);
    let json = match mode {
        Mode::Rational => serde_json::to_value(table.to_json()).expect("serializable"),
        Mode::Float => {
            let cumulants: BTreeMap<String, Value> = entries
                .iter()
                .map(|(w, (k, c))| (key(w), json!({"kappa": k.to_f64(), "K": c.to_f64()})))
                .collect();
            json!({"alphabet": table.alphabet(), "degree": table.degree(), "cumulants": cumulants})
        }
    };
    let cell = |v: &Q| match mode {
        Mode::Rational => format_q(v),
        Mode::Float => Scalar::to_f64(v).render(),
    };
    let mut report = Report::new(json);
    report.table = Some(Table {
        header: vec!["word", "kappa", "K"],
        rows: entries.iter().map(|(w, (k, c))| vec![key(w), cell(k), cell(c)]).collect(),
    });
    Ok(report)
}

/// c-bi-free product of several distributions with disjoint families.
pub fn join(inputs: &[PathBuf], degree: Option<usize>) -> CliResult<Report> {
    let dists = inputs
        .iter()
        .map(|p| load_distribution(p, &read_text(p)?, None))
        .collect::<CliResult<Vec<_>>>()?;
    let stored = dists.iter().map(|d| d.degree()).min().unwrap_or(0);
    let d = pick_degree(degree, stored)?;
    let joint = cbf_join(&dists, d)?;
    let mut report = Report::new(serde_json::to_value(joint.to_json()).expect("serializable"));
    report.table = Some(Table {
        header: vec!["word", "phi", "psi"],
        rows: joint
            .entries()
            .into_iter()
            .skip(1)
            .map(|(w, (p, s))| vec![joint.word_key(w), format_q(p), format_q(s)])
            .collect(),
    });
    Ok(report)
}

pub struct VerifyArgs {
    pub model: Option<PathBuf>,
    pub seed: u64,
    pub families: usize,
    pub dim: usize,
    pub cap: usize,
    pub fault: Option<String>,
}

#[derive(Serialize)]
struct WordCheck {
    word: String,
    cumulant: bool,
    diagram_phi: bool,
    diagram_psi: bool,
}

/// Compares the free-product oracle with the cumulant join and the diagram formulas, word by word.
pub fn verify(args: &VerifyArgs) -> CliResult<Report> {
    if args.cap == 0 {
        return Err(CliError::Usage("cap must be at least 1".into()));
    }
    let (model, source) = match &args.model {
        Some(p) => {
            let raw: ModelJson = load_json(p)?;
            (in_file(p, MatrixModel::from_json(raw))?, json!({"model": p.display().to_string()}))
        }
        None => {
            if args.families == 0 || args.dim < 2 {
                return Err(CliError::Usage("need at least one family of dimension 2 or more".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (
                MatrixModel::random(args.families, args.dim, &mut rng),
                json!({"seed": args.seed, "families": args.families, "dim": args.dim}),
            )
        }
    };
    let head = |extra: Value| {
        let mut v = json!({"source": source, "cap": args.cap, "fault_inject": args.fault});
        v.as_object_mut().unwrap().extend(extra.as_object().unwrap().clone());
        v
    };
    let oracle = match model.oracle_distribution(args.cap) {
        Ok(o) => o,
        Err(e @ cbifree::Error::TruncationOverflow(_)) => {
            let mut report = Report::new(head(json!({"error": e.to_string(), "all_agree": false})));
            report.ok = false;
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    let mut locals = (0..model.families().len())
        .map(|k| model.local_distribution(k, args.cap))
        .collect::<cbifree::Result<Vec<_>>>()?;
    if let Some(sym) = &args.fault {
        let (k, l) = locals
            .iter()
            .enumerate()
            .find_map(|(k, d)| d.symbol_index(sym).map(|l| (k, l)))
            .ok_or_else(|| CliError::Usage(format!("fault target `{sym}` is not a generator of the model")))?;
        let (p, s) = locals[k].moments(&[l])?;
        locals[k].set_moment(&[l], (p + qi(1), s + qi(1)))?;
    }
    let joined = cbf_join(&locals, args.cap)?;
    let src = JointSource::new(&locals)?;
    let mut words = Vec::new();
    for (w, m) in oracle.entries().into_iter().skip(1) {
        let key = oracle.word_key(w);
        let jw = joined.parse_word(&key)?;
        let sw = parse_word(src.alphabet(), &key)?;
        words.push(WordCheck {
            cumulant: &joined.moments(&jw)? == m,
            diagram_phi: phi_moment_formula(&sw, &src)? == m.0,
            diagram_psi: psi_moment_formula(&sw, &src)? == m.1,
            word: key,
        });
    }
    let independence = is_cbf_independent(&oracle, &FamilyAssignment::from_alphabet(oracle.alphabet()), args.cap)?;
    let disagreements: Vec<&str> = words
        .iter()
        .filter(|c| !(c.cumulant && c.diagram_phi && c.diagram_psi))
        .map(|c| c.word.as_str())
        .collect();
    let localized = args.fault.as_ref().map(|sym| {
        disagreements
            .iter()
            .all(|w| w.split(',').any(|s| s == sym))
    });
    let all_agree = disagreements.is_empty() && independence.independent;
    let json = head(json!({
        "words": words,
        "mixed_cumulants_vanish": independence.independent,
        "witness": independence.witness.map(|w| w.describe()),
        "disagreements": disagreements,
        "fault_localized": localized,
        "all_agree": all_agree,
    }));
    let mut report = Report::new(json);
    report.ok = all_agree;
    Ok(report)
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    max_abs: f64,
    pass: bool,
}

fn max1<T: Scalar>(s: &Series1<T>) -> f64 {
    s.coeffs().iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
}

fn max2<T: Scalar>(s: &Series2<T>) -> f64 {
    let g = s.grid();
    g.indices().into_iter().map(|(m, n)| g.get(m, n).to_f64().abs()).fold(0.0, f64::max)
}

fn residual_checks<T: Scalar>(t: &PairMomentTable<T>, tol: f64) -> CliResult<Vec<Check>> {
    let one = |name, s: &Series1<T>| Check {
        name,
        max_abs: max1(s),
        pass: s.is_negligible(tol),
    };
    let two = |name, s: &Series2<T>| Check {
        name,
        max_abs: max2(s),
        pass: s.is_negligible(tol),
    };
    let m = check_cfree_series_relations(t)?;
    let mut checks = vec![
        one("left.conditional_transform", &m.left.0),
        one("left.cauchy_transform", &m.left.1),
        one("right.conditional_transform", &m.right.0),
        one("right.cauchy_transform", &m.right.1),
    ];
    if t.degree() >= 2 {
        let p = check_partial_functional_equation(t)?;
        checks.push(two("pair.functional_equation", &p.functional));
        checks.push(two("pair.reduced_transform", &p.decomposition));
        checks.push(two("pair.bifree_transform", &p.bifree));
    }
    Ok(checks)
}

/// Series identities of a commuting pair, from a table file or a seeded random table.
pub fn residuals(input: Option<&Path>, seed: Option<u64>, degree: Option<usize>, mode: Mode, tol: f64) -> CliResult<Report> {
    let table = match (input, seed) {
        (Some(p), _) => load_pair(p, &read_text(p)?, degree)?,
        (None, Some(s)) => PairMomentTable::random(pick_degree(degree, 6)?, &mut ChaCha8Rng::seed_from_u64(s)),
        (None, None) => return Err(CliError::Usage("give a table file or --seed".into())),
    };
    let checks = match mode {
        Mode::Rational => residual_checks(&table, tol)?,
        Mode::Float => residual_checks(&table.map(f64::from_q), tol)?,
    };
    let all_pass = checks.iter().all(|c| c.pass);
    let mode_name = match mode {
        Mode::Rational => "rational",
        Mode::Float => "float",
    };
    let mut report = Report::new(json!({
        "degree": table.degree(),
        "mode": mode_name,
        "tolerance": if mode == Mode::Float { Some(tol) } else { None },
        "checks": checks,
        "all_pass": all_pass,
    }));
    report.ok = all_pass;
    Ok(report)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Expectation {
    side: Side,
    m: usize,
    n: usize,
    exponent: f64,
    tolerance: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "experiment", rename_all = "lowercase", deny_unknown_fields)]
enum LimitConfig {
    Clt {
        cumulants: CumulantDataJson,
        steps: Vec<u64>,
        #[serde(default)]
        expect: Vec<Expectation>,
    },
    Poisson {
        #[serde(with = "q_str")]
        lambda: Q,
        sigma: AtomicMeasure2D,
        #[serde(with = "q_str")]
        lambda_free: Q,
        sigma_free: AtomicMeasure2D,
        steps: Vec<u64>,
        degree: usize,
        #[serde(default)]
        expect: Vec<Expectation>,
    },
}

/// Limit experiment over a grid of step counts, with optional exponent expectations.
pub fn limits(config: &Path) -> CliResult<Report> {
    let cfg: LimitConfig = load_json(config)?;
    let (report, expect) = match &cfg {
        LimitConfig::Clt { cumulants, steps, expect } => {
            let data = in_file(config, CumulantData::from_json(cumulants))?;
            (clt_experiment(&data, steps)?, expect)
        }
        LimitConfig::Poisson {
            lambda,
            sigma,
            lambda_free,
            sigma_free,
            steps,
            degree,
            expect,
        } => {
            let d = pick_degree(Some(*degree), *degree)?;
            (poisson_limit_experiment(lambda, sigma, lambda_free, sigma_free, steps, d)?, expect)
        }
    };
    let checks: Vec<Value> = expect
        .iter()
        .map(|e| {
            let got = report.fit(e.side, e.m, e.n);
            let pass = got.is_some_and(|x| (x - e.exponent).abs() <= e.tolerance);
            json!({"side": e.side, "m": e.m, "n": e.n, "expected": e.exponent, "tolerance": e.tolerance, "fitted": got, "pass": pass})
        })
        .collect();
    let pass = checks.iter().all(|c| c["pass"] == json!(true));
    let mut json = serde_json::to_value(&report).expect("serializable");
    json["checks"] = Value::Array(checks);
    json["pass"] = json!(pass);
    let mut out = Report::new(json);
    out.table = Some(limit_table(&report));
    out.ok = pass;
    Ok(out)
}

fn limit_table(report: &LimitReport) -> Table {
    Table {
        header: vec!["side", "m", "n", "steps", "target", "observed", "abs_error", "exponent"],
        rows: report
            .rows
            .iter()
            .map(|r| {
                let exp = report.fit(r.side, r.m, r.n).map(|x| x.to_string()).unwrap_or_default();
                vec![
                    r.side.label().to_string(),
                    r.m.to_string(),
                    r.n.to_string(),
                    r.steps.to_string(),
                    r.target.to_string(),
                    r.observed.to_string(),
                    r.abs_error.to_string(),
                    exp,
                ]
            })
            .collect(),
    }
}
