//! Seeded fuzz runs of the verifiers.

use clap::ValueEnum;
use entroplab::catalog::{sample_cond2c, sample_random_distribution, sample_random_support};
use entroplab::ineqlab::{verify_lemma2, verify_theorem1, verify_theorem2, Status};
use entroplab::lawcheck::{audit_lemma1, audit_lemma3, fingerprint};
use entroplab::{Distribution, Exact, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::UsageError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Theorem1,
    Theorem2,
    Lemma1,
    Lemma2,
    Lemma3,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::Theorem1 => "theorem1",
            Target::Theorem2 => "theorem2",
            Target::Lemma1 => "lemma1",
            Target::Lemma2 => "lemma2",
            Target::Lemma3 => "lemma3",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzRow {
    pub trial: usize,
    pub seed: u64,
    /// Alphabet sizes of `(A, B, X, Y)`.
    pub sizes: [usize; 4],
    pub fingerprint: String,
    pub status: &'static str,
    /// Smallest slack or gap of the verified inequality, in bits.
    pub gap: f64,
    /// Exact side of the certificate held (`Γ` sum at most one for `theorem1`).
    pub exact_ok: bool,
    pub certificate: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuzzSummary {
    pub target: Target,
    pub seed: u64,
    pub rows: Vec<FuzzRow>,
}

impl FuzzSummary {
    fn count(&self, status: &str) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    pub fn passed(&self) -> usize {
        self.count("PASS")
    }

    pub fn not_applicable(&self) -> usize {
        self.count("NOT_APPLICABLE")
    }

    pub fn failed(&self) -> usize {
        self.count("FAIL")
    }

    pub fn min_gap(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.gap)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "trial": r.trial,
                    "seed": r.seed,
                    "sizes": r.sizes,
                    "fingerprint": r.fingerprint,
                    "status": r.status,
                    "gap": r.gap,
                    "exact_ok": r.exact_ok,
                    "certificate": r.certificate,
                    "detail": r.detail,
                })
            })
            .collect();
        json!({
            "target": self.target.name(),
            "trials": self.rows.len(),
            "seed": self.seed,
            "counts": {
                "PASS": self.passed(),
                "NOT_APPLICABLE": self.not_applicable(),
                "FAIL": self.failed(),
            },
            "rows": rows,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "trial",
            "seed",
            "sizes",
            "fingerprint",
            "status",
            "gap",
            "exact_ok",
            "certificate",
            "detail",
        ])
        .expect("in-memory write");
        for r in &self.rows {
            let sizes = r.sizes.map(|s| s.to_string()).join("x");
            w.write_record([
                r.trial.to_string(),
                r.seed.to_string(),
                sizes,
                r.fingerprint.clone(),
                r.status.to_string(),
                r.gap.to_string(),
                r.exact_ok.to_string(),
                r.certificate.clone(),
                r.detail.clone(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::NotApplicable => "NOT_APPLICABLE",
        Status::Fail => "FAIL",
    }
}

fn draw_sizes(seed: u64, max: usize) -> [usize; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    [(); 4].map(|_| rng.gen_range(1..=max))
}

const ROLES: [&str; 4] = ["A", "B", "X", "Y"];

/// Full support on even trials, random support on odd ones.
fn unconstrained(trial: usize, seed: u64, sizes: [usize; 4]) -> entroplab::Result<Distribution> {
    if trial.is_multiple_of(2) {
        sample_random_distribution(&ROLES, &sizes, seed)
    } else {
        sample_random_support(&ROLES, &sizes, seed)
    }
}

fn one_trial(
    target: Target,
    trial: usize,
    seed: u64,
    sizes: [usize; 4],
    events: usize,
) -> entroplab::Result<FuzzRow> {
    let mut row = FuzzRow {
        trial,
        seed,
        sizes,
        fingerprint: String::new(),
        status: "PASS",
        gap: 0.0,
        exact_ok: true,
        certificate: String::new(),
        detail: String::new(),
    };
    let d: Distribution = match target {
        Target::Theorem1 | Target::Lemma3 => sample_cond2c(seed, sizes)?,
        Target::Lemma1 if trial % 3 == 2 => sample_cond2c(seed, sizes)?,
        _ => unconstrained(trial, seed, sizes)?,
    };
    row.fingerprint = fingerprint(&d);
    match target {
        Target::Theorem1 => {
            let c = verify_theorem1(&d)?;
            row.status = status_name(c.status);
            row.gap = c.gap.gap;
            row.exact_ok = c.gamma.at_most_one() && c.fork_mass == Rational::from_u64(1);
            row.certificate = c.gamma.power_sum.to_text();
            row.detail = c.failures.join("; ");
        }
        Target::Theorem2 => {
            let c = verify_theorem2(&d)?;
            row.status = status_name(c.status);
            let bonus = c.delta_prime.as_ref().map_or(0.0, |t| t.bits);
            row.gap = c.gap.gap
                + if c.equality_everywhere == Some(true) {
                    0.0
                } else {
                    bonus
                };
            row.exact_ok = c.status != Status::Fail;
            row.certificate = c
                .delta_prime
                .as_ref()
                .map_or(String::new(), |t| t.power_sum.to_text());
            row.detail = c.failures.join("; ");
        }
        Target::Lemma1 => {
            let a = audit_lemma1(&d)?;
            row.status = if a.consistent() { "PASS" } else { "FAIL" };
            row.exact_ok = a.consistent();
            row.detail = format!(
                "ci={} cond-1={} cond-2-B={} cond-2-C={}",
                a.ci, a.functional, a.saturation, a.unique_common_value
            );
            if !a.consistent() {
                row.detail = format!("{}; {}", row.detail, a.violations.join("; "));
            }
        }
        Target::Lemma2 => {
            let c = verify_lemma2(&d)?;
            row.status = status_name(c.status);
            row.gap = c.eq9_slack.min(c.eq10_slack);
            row.exact_ok = c.status != Status::Fail;
            row.certificate = c.gamma.power_sum.to_text();
            row.detail = c.failures.join("; ");
        }
        Target::Lemma3 => {
            let a = audit_lemma3(&d, events, seed)?;
            row.status = if a.preserved() { "PASS" } else { "FAIL" };
            row.exact_ok = a.preserved();
            row.detail = format!(
                "{} atom-subset events, {} value events{}",
                a.atom_subset_events,
                a.value_events,
                if a.preserved() {
                    String::new()
                } else {
                    format!("; {}", a.violations.join("; "))
                }
            );
        }
    }
    Ok(row)
}

/// Runs `trials` cases; trial `i` uses seed `seed + i` and alphabet sizes in `1..=max_size`.
pub fn run_fuzz(
    target: Target,
    trials: usize,
    seed: u64,
    max_size: usize,
    events: usize,
) -> Result<FuzzSummary, UsageError> {
    if max_size == 0 {
        return Err(UsageError("--max-size must be at least 1".into()));
    }
    let rows = (0..trials)
        .map(|i| {
            let s = seed.wrapping_add(i as u64);
            one_trial(target, i, s, draw_sizes(s, max_size), events).map_err(UsageError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FuzzSummary { target, seed, rows })
}
