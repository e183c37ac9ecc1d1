use std::path::Path;

use entroplab::catalog::{Family, FamilySpec};
use entroplab::graphlab::gen_gnk;
use entroplab::ineqlab::{
    delta_prime, delta_term, eq13_gap, eq97_gap, gamma_term, ingleton_gap, verify_lemma2,
    verify_theorem1, verify_theorem2, Status,
};
use entroplab::lawcheck::{
    audit_lemma1, audit_lemma3, check_ci_given, check_functional, check_independence,
    check_pointwise_product, check_support_saturation, check_unique_common_value, fingerprint,
    PointwiseReport, Verdict,
};
use entroplab::probkit::{info_report as measures, load_distribution};
use entroplab::{Distribution, Exact, Rational};
use serde_json::{json, Value};

use crate::{
    fuzz, read_file, write_file, CheckArgs, CmdResult, CommandOutcome, Condition, Format, FuzzArgs,
    GenArgs, Theorem, UsageError, VerifyArgs, EXIT_FALSE, EXIT_OK, EXIT_THEOREM_FAILED,
};

pub(crate) fn load(path: &Path) -> Result<Distribution, UsageError> {
    let text = read_file(path)?;
    Ok(load_distribution::<Rational>(&text)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?
        .distribution)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn needs_seed(family: Family) -> bool {
    matches!(
        family,
        Family::RandomFull | Family::RandomSupport | Family::RandomCond2c
    )
}

pub(crate) fn catalog_gen(args: GenArgs) -> CmdResult {
    let family: Family = args.family.parse()?;
    if (needs_seed(family) || args.b_size.is_some()) && args.seed.is_none() {
        return Err(UsageError("this family needs --seed".into()));
    }
    let text = if family == Family::GnkGraph && !args.edge_distribution {
        let n = args
            .n
            .ok_or_else(|| UsageError("missing parameter --n".into()))?;
        let k = args
            .k
            .ok_or_else(|| UsageError("missing parameter --k".into()))?;
        gen_gnk::<Rational>(n, k)?.to_json()
    } else {
        let delta = match &args.delta {
            Some(s) => {
                Some(Rational::parse(s).ok_or_else(|| UsageError(format!("bad rational `{s}`")))?)
            }
            None => None,
        };
        let spec = FamilySpec {
            family,
            n: args.n,
            k: args.k,
            q_exp: args.q_exp,
            delta,
            sizes: args.sizes,
            seed: args.seed,
            b_size: args.b_size,
        };
        spec.generate()?.to_json()
    };
    match args.out {
        Some(path) => {
            write_file(&path, &text)?;
            Ok(CommandOutcome::default())
        }
        None => Ok(CommandOutcome {
            stdout: text,
            ..Default::default()
        }),
    }
}

fn pointwise_value(r: &PointwiseReport<Rational>) -> Value {
    let mut v = to_value(&r.verdict);
    let obj = v.as_object_mut().expect("object");
    obj.insert("equality_everywhere".into(), json!(r.equality_everywhere));
    obj.insert(
        "max_ratio".into(),
        r.max_ratio
            .as_ref()
            .map_or(Value::Null, |p| json!(p.to_text())),
    );
    obj.insert("note".into(), json!(r.note));
    v
}

fn has_roles(d: &Distribution) -> bool {
    ["A", "X", "Y"].iter().all(|v| d.has_variable(v))
}

pub(crate) fn info_report(path: &Path) -> CmdResult {
    let d = load(path)?;
    let mut doc = serde_json::Map::new();
    doc.insert("fingerprint".into(), json!(fingerprint(&d)));
    doc.insert("variables".into(), json!(d.variables()));
    doc.insert("atoms".into(), json!(d.len()));
    doc.insert("measures".into(), to_value(&measures(&d)?));
    if has_roles(&d) {
        let conditions = json!({
            "independence": check_independence(&d, &["X"], &["Y"])?,
            "ci": check_ci_given(&d, &["X"], &["Y"], &["A"])?,
            "cond-1": check_functional(&d, &["A"], &["X"], &["Y"])?,
            "cond-2-B": check_support_saturation(&d)?,
            "cond-2-C": check_unique_common_value(&d)?,
            "eq3": pointwise_value(&check_pointwise_product(&d)?),
        });
        doc.insert("conditions".into(), conditions);
        doc.insert(
            "gaps".into(),
            json!({
                "ingleton": ingleton_gap(&d)?,
                "eq97": eq97_gap(&d)?,
                "eq13": eq13_gap(&d)?,
            }),
        );
        let dp = match delta_prime(&d) {
            Ok(c) => to_value(&c),
            Err(e) => json!({ "not_applicable": e.to_string() }),
        };
        doc.insert(
            "error_terms".into(),
            json!({
                "gamma": gamma_term(&d)?,
                "delta": delta_term(&d)?,
                "delta_prime": dp,
            }),
        );
    } else {
        doc.insert(
            "note".into(),
            json!("conditions, gaps and error terms need variables A, X and Y"),
        );
    }
    Ok(CommandOutcome::json(EXIT_OK, &Value::Object(doc)))
}

fn check_one(
    d: &Distribution,
    c: Condition,
    a: &[&str],
    x: &[&str],
    y: &[&str],
) -> Result<(bool, Value), UsageError> {
    let verdict = |v: Verdict| (v.holds, to_value(&v));
    Ok(match c {
        Condition::Independence => verdict(check_independence(d, x, y)?),
        Condition::Ci => verdict(check_ci_given(d, x, y, a)?),
        Condition::Cond1 => verdict(check_functional(d, a, x, y)?),
        Condition::Cond2B => verdict(check_support_saturation(d)?),
        Condition::Cond2C => verdict(check_unique_common_value(d)?),
        Condition::Eq3 => {
            let r = check_pointwise_product(d)?;
            (r.verdict.holds, pointwise_value(&r))
        }
    })
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

pub(crate) fn check(args: CheckArgs) -> CmdResult {
    let d = load(&args.dist)?;
    let (a, x, y) = (refs(&args.a), refs(&args.x), refs(&args.y));
    let conditions = match args.condition {
        Some(c) => vec![c],
        None => vec![
            Condition::Independence,
            Condition::Ci,
            Condition::Cond1,
            Condition::Cond2B,
            Condition::Cond2C,
            Condition::Eq3,
        ],
    };
    let mut all_hold = true;
    let mut verdicts = Vec::new();
    for c in conditions {
        let (holds, v) = check_one(&d, c, &a, &x, &y)?;
        all_hold &= holds;
        verdicts.push(v);
    }
    let doc = if verdicts.len() == 1 {
        verdicts.pop().expect("one verdict")
    } else {
        json!({ "fingerprint": fingerprint(&d), "verdicts": verdicts })
    };
    let code = if args.strict && !all_hold {
        EXIT_FALSE
    } else {
        EXIT_OK
    };
    Ok(CommandOutcome::json(code, &doc))
}

fn status_code(status: Status, strict: bool) -> i32 {
    match status {
        Status::Pass => EXIT_OK,
        Status::NotApplicable if strict => EXIT_FALSE,
        Status::NotApplicable => EXIT_OK,
        Status::Fail => EXIT_THEOREM_FAILED,
    }
}

pub(crate) fn verify(args: VerifyArgs) -> CmdResult {
    let d = load(&args.dist)?;
    let (code, doc) = match args.theorem {
        Theorem::One => {
            let c = verify_theorem1(&d)?;
            (status_code(c.status, args.strict), to_value(&c))
        }
        Theorem::Two => {
            let c = verify_theorem2(&d)?;
            (status_code(c.status, args.strict), to_value(&c))
        }
        Theorem::Lemma1 => {
            let a = audit_lemma1(&d)?;
            let code = if a.consistent() {
                EXIT_OK
            } else {
                EXIT_THEOREM_FAILED
            };
            (code, to_value(&a))
        }
        Theorem::Lemma2 => {
            let c = verify_lemma2(&d)?;
            (status_code(c.status, args.strict), to_value(&c))
        }
        Theorem::Lemma3 => {
            let seed = args
                .seed
                .ok_or_else(|| UsageError("lemma3 needs --seed".into()))?;
            match audit_lemma3(&d, args.trials, seed) {
                Ok(a) => {
                    let code = if a.preserved() {
                        EXIT_OK
                    } else {
                        EXIT_THEOREM_FAILED
                    };
                    (code, to_value(&a))
                }
                Err(entroplab::Error::PreconditionFailed(msg)) => {
                    let code = if args.strict { EXIT_FALSE } else { EXIT_OK };
                    (code, json!({ "status": "NOT_APPLICABLE", "detail": msg }))
                }
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok(CommandOutcome::json(code, &doc))
}

pub(crate) fn fuzz(args: FuzzArgs) -> CmdResult {
    let summary = fuzz::run_fuzz(
        args.target,
        args.trials,
        args.seed,
        args.max_size,
        args.events,
    )?;
    let code = if summary.failed() > 0 {
        EXIT_THEOREM_FAILED
    } else {
        EXIT_OK
    };
    match args.format {
        Format::Json => Ok(CommandOutcome::json(code, &to_value(&summary.to_json()))),
        Format::Csv => Ok(CommandOutcome {
            code,
            stdout: summary.to_csv(),
            stderr: String::new(),
        }),
    }
}
