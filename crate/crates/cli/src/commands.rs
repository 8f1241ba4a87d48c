use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Pow, Signed, Zero};
use serde::Serialize;

use betawalk_core::catalog::{self, CATALOG};
use betawalk_core::exact::{pochhammer, HalfInt};
use betawalk_core::format::{decimal_string, parse_rational, rational_string, rational_to_f64};
use betawalk_core::moments::{verify_equal_coeff_form, verify_master as verify_master_exact};
use betawalk_core::numeric::verify_master_float;
use betawalk_core::report::{params, IdentityReport, Mode};
use betawalk_core::series::{evaluate_series, SeriesOutcome, SeriesVariant};
use betawalk_core::simulate::{simulate_beta_moment, simulate_walk};
use betawalk_core::walk::{brute_force_return, return_probability, returning_paths, WalkSpec};
use betawalk_core::{BetaParams, CoefficientVector, Error};

use crate::output::{pi_rational, Record, Status};
use crate::{EqualCoeffArgs, MasterArgs, ModeArg, MomentArgs, OracleArgs, SeriesArgs, SimArgs, WalkArgs};

/// `|zScore|` at or above this is a statistical failure.
pub const Z_LIMIT: f64 = 4.0;

pub struct Context {
    pub threads: usize,
}

pub type Outcome = Result<(Vec<Record>, u8), String>;

fn usage<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn exit_code(records: &[Record], violated: u8) -> u8 {
    if records.iter().any(|r| r.status == Status::Violated) {
        violated
    } else {
        0
    }
}

/// `a`, `a..b` (inclusive) or a comma-separated list.
fn parse_range(flag: &str, s: &str) -> Result<Vec<u64>, String> {
    let bad = || format!("--{flag}: expected `a`, `a..b` or `a,b,...`, got {s:?}");
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.parse().map_err(|_| bad())?;
        let b: u64 = b.parse().map_err(|_| bad())?;
        if a > b {
            return Err(format!("--{flag}: empty range {s}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad()))
        .collect()
}

fn parse_positive_rational(flag: &str, s: &str) -> Result<BigRational, String> {
    let r = parse_rational(s).map_err(|e| format!("--{flag}: {e}"))?;
    if !r.is_positive() {
        return Err(format!("--{flag} must be positive, got {s}"));
    }
    Ok(r)
}

fn parse_positive_float(flag: &str, s: &str) -> Result<f64, String> {
    let x = match parse_rational(s) {
        Ok(r) => rational_to_f64(&r),
        Err(_) => s
            .parse::<f64>()
            .map_err(|_| format!("--{flag}: cannot parse {s:?} as a number"))?,
    };
    if !(x > 0.0 && x.is_finite()) {
        return Err(format!("--{flag} must be positive, got {s}"));
    }
    Ok(x)
}

fn parse_beta_params(s: &str) -> Result<BetaParams, String> {
    let r = parse_positive_rational("p", s)?;
    let p = HalfInt::from_rational(&r).ok_or_else(|| {
        format!("--p {s}: exact mode needs a multiple of 1/2; use --mode float for other values")
    })?;
    BetaParams::new(p).map_err(usage)
}

fn coefficient_strings(args: &MasterArgs) -> Result<Vec<Vec<String>>, String> {
    if let Some(list) = &args.coeffs {
        return Ok(vec![list.split(',').map(|s| s.trim().to_string()).collect()]);
    }
    let Some(ks) = &args.k else {
        return Ok(vec![vec!["1".to_string()]]);
    };
    parse_range("k", ks)?
        .into_iter()
        .map(|k| {
            if k == 0 {
                return Err("--k must be at least 1".to_string());
            }
            let c = args.c.clone().unwrap_or_else(|| format!("1/{k}"));
            Ok(vec![c; k as usize])
        })
        .collect()
}

fn check_orders(ns: &[u64]) -> Result<(), String> {
    if ns.contains(&0) {
        return Err("--n must be at least 1".into());
    }
    Ok(())
}

fn report_columns(r: &IdentityReport) -> (String, String) {
    let side = |v: &betawalk_core::SideValue| match v.as_exact() {
        Some(x) => pi_rational(x),
        None => v.to_f64().to_string(),
    };
    (side(&r.lhs), side(&r.rhs))
}

pub fn verify_master(ctx: &Context, args: &MasterArgs) -> Outcome {
    let ns = parse_range("n", &args.n)?;
    check_orders(&ns)?;
    let coeff_sets = coefficient_strings(args)?;
    if !(args.tolerance > 0.0) {
        return Err("--tolerance must be positive".into());
    }
    let mut records = Vec::new();
    match args.mode {
        ModeArg::Exact => {
            let p = parse_beta_params(&args.p)?;
            let vectors = coeff_sets
                .iter()
                .map(|set| {
                    let cs = set
                        .iter()
                        .map(|c| parse_positive_rational("coeffs", c))
                        .collect::<Result<Vec<_>, _>>()?;
                    CoefficientVector::new(cs).map_err(usage)
                })
                .collect::<Result<Vec<_>, String>>()?;
            for cv in &vectors {
                for &n in &ns {
                    let rep = verify_master_exact(n, cv, p, Mode::Exact, args.tolerance, ctx.threads)
                        .map_err(usage)?;
                    let (lhs, rhs) = report_columns(&rep);
                    let coeffs = cv.coeffs().iter().map(rational_string).collect::<Vec<_>>().join(";");
                    records.push(Record::new(
                        "verify master",
                        params([
                            ("n", n.to_string()),
                            ("coeffs", coeffs.clone()),
                            ("p", p.p().to_string()),
                            ("mode", "exact".into()),
                            ("threads", ctx.threads.to_string()),
                        ]),
                        Status::from_ok(rep.verified),
                        &rep,
                        vec![
                            ("n", n.to_string()),
                            ("coeffs", coeffs),
                            ("p", p.p().to_string()),
                            ("mode", "exact".into()),
                            ("lhs", lhs),
                            ("rhs", rhs),
                            ("verified", rep.verified.to_string()),
                        ],
                    ));
                }
            }
        }
        ModeArg::Float => {
            let p = parse_positive_float("p", &args.p)?;
            for set in &coeff_sets {
                let cs = set
                    .iter()
                    .map(|c| parse_positive_float("coeffs", c))
                    .collect::<Result<Vec<_>, _>>()?;
                let coeffs = set.join(";");
                for &n in &ns {
                    let fv = verify_master_float(n, &cs, p, args.tolerance).map_err(usage)?;
                    records.push(Record::new(
                        "verify master",
                        params([
                            ("n", n.to_string()),
                            ("coeffs", coeffs.clone()),
                            ("p", args.p.clone()),
                            ("mode", "float".into()),
                            ("tolerance", format!("{:e}", args.tolerance)),
                            ("threads", ctx.threads.to_string()),
                        ]),
                        Status::from_ok(fv.passed),
                        &fv,
                        vec![
                            ("n", n.to_string()),
                            ("coeffs", coeffs.clone()),
                            ("p", args.p.clone()),
                            ("mode", "float".into()),
                            ("lhs", fv.lhs.to_string()),
                            ("rhs", fv.rhs.to_string()),
                            ("relDiff", format!("{:e}", fv.rel_diff)),
                            ("conditionNumber", format!("{:e}", fv.condition_number)),
                            ("tolerance", format!("{:e}", fv.tolerance)),
                            ("passed", fv.passed.to_string()),
                        ],
                    ));
                }
            }
        }
    }
    let code = exit_code(&records, 1);
    Ok((records, code))
}

pub fn verify_equal_coeff(ctx: &Context, args: &EqualCoeffArgs) -> Outcome {
    let ns = parse_range("n", &args.n)?;
    check_orders(&ns)?;
    let ks = parse_range("k", &args.k)?;
    if ks.contains(&0) {
        return Err("--k must be at least 1".into());
    }
    let p = parse_beta_params(&args.p)?;
    let mut records = Vec::new();
    for &k in &ks {
        for &n in &ns {
            let rep = verify_equal_coeff_form(n, k as usize, p).map_err(usage)?;
            let (lhs, rhs) = report_columns(&rep);
            let mut parameters = rep.parameters.clone();
            parameters.insert("threads".into(), ctx.threads.to_string());
            records.push(Record::new(
                "verify equal-coeff",
                parameters,
                Status::from_ok(rep.verified),
                &rep,
                vec![
                    ("n", n.to_string()),
                    ("k", k.to_string()),
                    ("p", p.p().to_string()),
                    ("lhs", lhs),
                    ("rhs", rhs),
                    ("verified", rep.verified.to_string()),
                ],
            ));
        }
    }
    let code = exit_code(&records, 1);
    Ok((records, code))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ExactPayload {
    exact: String,
    decimal: String,
}

impl ExactPayload {
    fn of(r: &BigRational) -> Self {
        ExactPayload {
            exact: rational_string(r),
            decimal: decimal_string(r, 15),
        }
    }
}

/// Validated walk lengths: `Some(n)` for `2n` steps, `None` for an allowed odd length.
fn walk_lengths(args: &WalkArgs) -> Result<Vec<(u64, Option<u32>)>, String> {
    if args.dim == 0 {
        return Err("--dim must be at least 1".into());
    }
    parse_range("steps", &args.steps)?
        .into_iter()
        .map(|s| {
            if s == 0 {
                Err("--steps must be at least 1".to_string())
            } else if s % 2 == 1 {
                if args.allow_odd {
                    Ok((s, None))
                } else {
                    Err(format!("--steps {s} is odd; pass --allow-odd to accept the exact answer 0"))
                }
            } else {
                let half = u32::try_from(s / 2).map_err(|_| format!("--steps {s} is too large"))?;
                Ok((s, Some(half)))
            }
        })
        .collect()
}

fn walk_params(ctx: &Context, dim: u32, steps: u64) -> BTreeMap<String, String> {
    params([
        ("dim", dim.to_string()),
        ("steps", steps.to_string()),
        ("threads", ctx.threads.to_string()),
    ])
}

pub fn return_prob(ctx: &Context, args: &WalkArgs) -> Outcome {
    let mut records = Vec::new();
    for (steps, half) in walk_lengths(args)? {
        let value = match half {
            Some(n) => return_probability(args.dim, n).map_err(usage)?,
            None => BigRational::zero(),
        };
        let payload = ExactPayload::of(&value);
        records.push(Record::new(
            "compute return-prob",
            walk_params(ctx, args.dim, steps),
            Status::Ok,
            &payload,
            vec![
                ("dim", args.dim.to_string()),
                ("steps", steps.to_string()),
                ("exact", payload.exact.clone()),
                ("decimal", payload.decimal.clone()),
            ],
        ));
    }
    Ok((records, 0))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PathPayload {
    count: String,
    total_paths: String,
}

pub fn path_count(ctx: &Context, args: &WalkArgs) -> Outcome {
    let mut records = Vec::new();
    for (steps, half) in walk_lengths(args)? {
        let count = match half {
            Some(n) => returning_paths(args.dim, n).map_err(usage)?,
            None => BigUint::zero(),
        };
        let total = Pow::pow(BigUint::from(2 * args.dim), steps as u32);
        let payload = PathPayload {
            count: count.to_string(),
            total_paths: total.to_string(),
        };
        records.push(Record::new(
            "compute path-count",
            walk_params(ctx, args.dim, steps),
            Status::Ok,
            &payload,
            vec![
                ("dim", args.dim.to_string()),
                ("steps", steps.to_string()),
                ("count", payload.count.clone()),
                ("totalPaths", payload.total_paths.clone()),
            ],
        ));
    }
    Ok((records, 0))
}

pub fn moment(ctx: &Context, args: &MomentArgs) -> Outcome {
    let ns = parse_range("n", &args.n)?;
    check_orders(&ns)?;
    let p = parse_positive_rational("p", &args.p)?;
    let half = BigRational::new(1.into(), 2.into());
    let shifted = &p + &half;
    let mut records = Vec::new();
    for n in ns {
        // E[U^{2n}] = (1/2)_n / (p + 1/2)_n
        let value = pochhammer(&half, n) / pochhammer(&shifted, n);
        let payload = ExactPayload::of(&value);
        records.push(Record::new(
            "compute moment",
            params([
                ("n", n.to_string()),
                ("p", rational_string(&p)),
                ("threads", ctx.threads.to_string()),
            ]),
            Status::Ok,
            &payload,
            vec![
                ("n", n.to_string()),
                ("p", rational_string(&p)),
                ("exact", payload.exact.clone()),
                ("decimal", payload.decimal.clone()),
            ],
        ));
    }
    Ok((records, 0))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct OraclePayload {
    count: String,
    total_paths: String,
    probability: String,
    expected: String,
    matches: bool,
}

pub fn oracle(ctx: &Context, args: &OracleArgs) -> Outcome {
    if args.steps == 0 || args.steps % 2 == 1 {
        return Err(format!("--steps must be a positive even number, got {}", args.steps));
    }
    let n = args.steps / 2;
    let counted = match brute_force_return(args.dim, n, args.budget) {
        Ok(c) => c,
        Err(Error::BudgetExceeded { required, budget }) => {
            return Err(format!(
                "enumeration needs {required} paths but --budget is {budget}; rerun with --budget {required} or more"
            ))
        }
        Err(e) => return Err(usage(e)),
    };
    let expected = return_probability(args.dim, n).map_err(usage)?;
    let probability = counted.probability();
    let matches = probability == expected;
    let payload = OraclePayload {
        count: counted.count.to_string(),
        total_paths: counted.total_paths.to_string(),
        probability: rational_string(&probability),
        expected: rational_string(&expected),
        matches,
    };
    let record = Record::new(
        "oracle",
        params([
            ("dim", args.dim.to_string()),
            ("steps", args.steps.to_string()),
            ("budget", args.budget.to_string()),
            ("threads", ctx.threads.to_string()),
        ]),
        Status::from_ok(matches),
        &payload,
        vec![
            ("dim", args.dim.to_string()),
            ("steps", args.steps.to_string()),
            ("count", payload.count.clone()),
            ("totalPaths", payload.total_paths.clone()),
            ("probability", payload.probability.clone()),
            ("expected", payload.expected.clone()),
            ("match", matches.to_string()),
        ],
    );
    Ok((vec![record], u8::from(!matches)))
}

pub fn simulate(ctx: &Context, args: &SimArgs, beta: bool) -> Outcome {
    if args.trials == 0 {
        return Err("--trials must be at least 1".into());
    }
    let result = if beta {
        simulate_beta_moment(args.dim, args.n, args.trials, args.seed, ctx.threads)
    } else {
        WalkSpec::new(args.dim, args.n)
            .and_then(|spec| simulate_walk(&spec, args.trials, args.seed, ctx.threads))
    }
    .map_err(usage)?;
    let ok = result.within(Z_LIMIT);
    let command = if beta { "simulate beta" } else { "simulate walk" };
    let record = Record::new(
        command,
        params([
            ("dim", args.dim.to_string()),
            ("n", args.n.to_string()),
            ("trials", args.trials.to_string()),
            ("seed", args.seed.to_string()),
            ("threads", ctx.threads.to_string()),
        ]),
        Status::from_ok(ok),
        &result,
        vec![
            ("dim", args.dim.to_string()),
            ("n", args.n.to_string()),
            ("trials", args.trials.to_string()),
            ("seed", args.seed.to_string()),
            ("workers", result.workers.to_string()),
            ("hits", result.hits.to_string()),
            ("estimate", result.estimate.to_string()),
            ("stdError", result.std_error.to_string()),
            ("exact", result.exact_reference.exact.clone()),
            ("zScore", result.z_score.to_string()),
        ],
    );
    if !ok {
        eprintln!(
            "statistical check failed: |zScore| = {} >= {Z_LIMIT}",
            result.z_score.abs()
        );
    }
    Ok((vec![record], if ok { 0 } else { 3 }))
}

fn erratum_banner(entry: &catalog::CatalogEntry) {
    if let Some(text) = entry.erratum {
        eprintln!("ERRATUM [{}]: {text}", entry.name);
    }
}

pub fn catalog_list(ctx: &Context) -> Outcome {
    let records = CATALOG
        .iter()
        .map(|e| {
            erratum_banner(e);
            Record::new(
                "catalog list",
                params([("name", e.name.to_string()), ("threads", ctx.threads.to_string())]),
                Status::Ok,
                e,
                vec![
                    ("name", e.name.to_string()),
                    ("variant", format!("{:?}", e.variant).to_lowercase()),
                    ("paperLocation", e.location.to_string()),
                    ("parameterRange", e.parameter_range.to_string()),
                    ("erratum", e.erratum.unwrap_or("").to_string()),
                ],
            )
        })
        .collect();
    Ok((records, 0))
}

fn joined_params(p: &BTreeMap<String, String>) -> String {
    p.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn catalog_verify(ctx: &Context, name: &str) -> Outcome {
    let entries: Vec<&catalog::CatalogEntry> = if name == "all" {
        CATALOG.iter().collect()
    } else {
        let e = catalog::entry(name).ok_or_else(|| {
            let names: Vec<&str> = CATALOG.iter().map(|e| e.name).collect();
            format!("unknown catalog entry {name:?}; expected one of {} or all", names.join(", "))
        })?;
        vec![e]
    };
    let mut records = Vec::new();
    for e in entries {
        erratum_banner(e);
        if let Some(cx) = e.counterexample() {
            let cx = cx.map_err(usage)?;
            if let Some(pf) = &cx.printed_form {
                eprintln!(
                    "  printed form at {}: lhs = {}, rhs = {} ({})",
                    joined_params(&cx.parameters),
                    pi_rational(&pf.lhs),
                    pi_rational(&pf.rhs),
                    if pf.holds { "holds" } else { "fails" }
                );
            }
        }
        for rep in e.verify_all().map_err(usage)? {
            let (lhs, rhs) = report_columns(&rep);
            let pf = rep.printed_form.as_ref();
            let mut parameters = rep.parameters.clone();
            parameters.insert("name".into(), e.name.into());
            parameters.insert("threads".into(), ctx.threads.to_string());
            records.push(Record::new(
                "catalog verify",
                parameters,
                Status::from_ok(rep.verified),
                &rep,
                vec![
                    ("name", e.name.to_string()),
                    ("parameters", joined_params(&rep.parameters)),
                    ("lhs", lhs),
                    ("rhs", rhs),
                    ("verified", rep.verified.to_string()),
                    ("printedLhs", pf.map(|p| pi_rational(&p.lhs)).unwrap_or_default()),
                    ("printedRhs", pf.map(|p| pi_rational(&p.rhs)).unwrap_or_default()),
                    ("printedHolds", pf.map(|p| p.holds.to_string()).unwrap_or_default()),
                ],
            ));
        }
    }
    let code = exit_code(&records, 1);
    Ok((records, code))
}

fn opt_float(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn series(ctx: &Context, args: &SeriesArgs) -> Outcome {
    let variants: Vec<SeriesVariant> = if args.variant == "all" {
        SeriesVariant::ALL.to_vec()
    } else {
        vec![args.variant.parse().map_err(usage)?]
    };
    let mut records = Vec::new();
    for v in variants {
        let e = evaluate_series(args.n, v, args.max_terms, args.cutoff).map_err(usage)?;
        if e.outcome == SeriesOutcome::Diverged {
            eprintln!(
                "note: {} diverges at n = {}: terms increase after {} terms",
                e.variant_name, e.n, e.terms_evaluated
            );
        }
        records.push(Record::new(
            "series402",
            params([
                ("n", args.n.to_string()),
                ("variant", e.variant_name.clone()),
                ("maxTerms", args.max_terms.to_string()),
                ("cutoff", format!("{:e}", args.cutoff)),
                ("threads", ctx.threads.to_string()),
            ]),
            Status::Ok,
            &e,
            vec![
                ("variant", e.variant_name.clone()),
                ("n", e.n.to_string()),
                ("termsEvaluated", e.terms_evaluated.to_string()),
                ("outcome", format!("{:?}", e.outcome).to_lowercase()),
                ("converged", e.converged.to_string()),
                ("limitEstimate", opt_float(e.limit_estimate)),
                ("target", e.target.to_string()),
                ("targetGap", opt_float(e.target_gap)),
                ("matchesTarget", e.matches_target.to_string()),
            ],
        ));
    }
    Ok((records, 0))
}
