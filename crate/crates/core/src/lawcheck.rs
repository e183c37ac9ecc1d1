//! Witness-producing checkers for the side conditions of the conditional
//! inequalities, decided exactly on rational probabilities.
//!
//! Condition ids used in reports:
//!
//! | id            | statement                                                        |
//! |---------------|------------------------------------------------------------------|
//! | `independence`| `p(x,y) = p(x) p(y)` for all `x, y`                               |
//! | `ci`          | `p(a,x) p(a,y) = p(a,x,y) p(a)` for all `a, x, y`                 |
//! | `cond-1`      | every positive `(x,y)` determines `a`                             |
//! | `cond-2-B`    | `p(a,x) > 0` and `p(a,y) > 0` imply `p(a,x,y) > 0`                |
//! | `cond-2-C`    | `p(a,x), p(a,y), p(a',x), p(a',y)` all positive implies `a = a'` |
//! | `eq3`         | `p(a,x) p(a,y) p(x,y) <= p(a) p(x) p(y) p(a,x,y)`                 |
//!
//! When a condition fails, the lexicographically smallest violating tuple is
//! returned as the witness.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::probkit::{Event, JointDistribution, Symbol};
use crate::scalar::Exact;

type Key = Vec<Symbol>;

/// Named values of a violating tuple, in reporting order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness(pub Vec<(String, String)>);

impl Witness {
    fn of(entries: &[(&str, &Key)]) -> Self {
        Witness(
            entries
                .iter()
                .map(|(k, v)| (k.to_string(), v.join(",")))
                .collect(),
        )
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub condition: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub detail: String,
}

impl Verdict {
    pub(crate) fn pass(condition: &str, detail: impl Into<String>) -> Self {
        Self {
            condition: condition.into(),
            holds: true,
            witness: None,
            detail: detail.into(),
        }
    }

    pub(crate) fn fail(condition: &str, witness: Witness, detail: impl Into<String>) -> Self {
        Self {
            condition: condition.into(),
            holds: false,
            witness: Some(witness),
            detail: detail.into(),
        }
    }
}

/// Marginal tables of a variable-set triple `(A, X, Y)`, built in one pass.
pub(crate) struct Triple<P> {
    pub axy: BTreeMap<(Key, Key, Key), P>,
    pub ax: BTreeMap<(Key, Key), P>,
    pub ay: BTreeMap<(Key, Key), P>,
    pub xy: BTreeMap<(Key, Key), P>,
    pub a: BTreeMap<Key, P>,
    pub x: BTreeMap<Key, P>,
    pub y: BTreeMap<Key, P>,
    /// `{x : p(a,x) > 0}` per `a`
    pub xs_of_a: BTreeMap<Key, BTreeSet<Key>>,
    /// `{y : p(a,y) > 0}` per `a`
    pub ys_of_a: BTreeMap<Key, BTreeSet<Key>>,
}

fn bump<K: Ord, P: Exact>(m: &mut BTreeMap<K, P>, k: K, p: &P) {
    match m.get_mut(&k) {
        Some(acc) => *acc = acc.clone() + p.clone(),
        None => {
            m.insert(k, p.clone());
        }
    }
}

impl<P: Exact> Triple<P> {
    pub fn new(d: &JointDistribution<P>, a: &[&str], x: &[&str], y: &[&str]) -> Result<Self> {
        let (ca, cx, cy) = (d.columns(a)?, d.columns(x)?, d.columns(y)?);
        for (l, r) in [(&ca, &cx), (&ca, &cy), (&cx, &cy)] {
            if let Some(c) = l.iter().find(|c| r.contains(c)) {
                return Err(Error::OverlappingSets(d.variables()[*c].clone()));
            }
        }
        let pick =
            |v: &[Symbol], cols: &[usize]| -> Key { cols.iter().map(|&c| v[c].clone()).collect() };
        let mut t = Triple {
            axy: BTreeMap::new(),
            ax: BTreeMap::new(),
            ay: BTreeMap::new(),
            xy: BTreeMap::new(),
            a: BTreeMap::new(),
            x: BTreeMap::new(),
            y: BTreeMap::new(),
            xs_of_a: BTreeMap::new(),
            ys_of_a: BTreeMap::new(),
        };
        for (v, p) in d.iter() {
            let (ka, kx, ky) = (pick(v, &ca), pick(v, &cx), pick(v, &cy));
            bump(&mut t.axy, (ka.clone(), kx.clone(), ky.clone()), p);
            bump(&mut t.ax, (ka.clone(), kx.clone()), p);
            bump(&mut t.ay, (ka.clone(), ky.clone()), p);
            bump(&mut t.xy, (kx.clone(), ky.clone()), p);
            bump(&mut t.a, ka.clone(), p);
            bump(&mut t.x, kx.clone(), p);
            bump(&mut t.y, ky.clone(), p);
            t.xs_of_a.entry(ka.clone()).or_default().insert(kx);
            t.ys_of_a.entry(ka).or_default().insert(ky);
        }
        Ok(t)
    }

    pub fn roles(d: &JointDistribution<P>) -> Result<Self> {
        Self::new(d, &["A"], &["X"], &["Y"])
    }

    fn get2(m: &BTreeMap<(Key, Key), P>, l: &Key, r: &Key) -> P {
        // BTreeMap lookups on tuple keys need owned tuples
        m.get(&(l.clone(), r.clone()))
            .cloned()
            .unwrap_or_else(P::zero)
    }

    pub fn p_ax(&self, a: &Key, x: &Key) -> P {
        Self::get2(&self.ax, a, x)
    }

    pub fn p_ay(&self, a: &Key, y: &Key) -> P {
        Self::get2(&self.ay, a, y)
    }

    pub fn p_xy(&self, x: &Key, y: &Key) -> P {
        Self::get2(&self.xy, x, y)
    }

    pub fn p_axy(&self, a: &Key, x: &Key, y: &Key) -> P {
        self.axy
            .get(&(a.clone(), x.clone(), y.clone()))
            .cloned()
            .unwrap_or_else(P::zero)
    }
}

/// `X` and `Y` are independent: `p(x,y) = p(x) p(y)` for every value pair,
/// zero cells included.
pub fn check_independence<P: Exact>(
    d: &JointDistribution<P>,
    x: &[&str],
    y: &[&str],
) -> Result<Verdict> {
    let t = Triple::new(d, &[], x, y)?;
    for (kx, px) in &t.x {
        for (ky, py) in &t.y {
            let joint = t.p_xy(kx, ky);
            let product = px.clone() * py.clone();
            if joint != product {
                return Ok(Verdict::fail(
                    "independence",
                    Witness::of(&[("x", kx), ("y", ky)]),
                    format!("p(x,y) = {joint} but p(x)p(y) = {product}"),
                ));
            }
        }
    }
    Ok(Verdict::pass(
        "independence",
        "p(x,y) = p(x)p(y) at every cell",
    ))
}

/// Conditional independence of `X` and `Y` given `A`:
/// `p(a,x) p(a,y) = p(a,x,y) p(a)` for all `a, x, y`.
pub fn check_ci_given<P: Exact>(
    d: &JointDistribution<P>,
    x: &[&str],
    y: &[&str],
    a: &[&str],
) -> Result<Verdict> {
    let t = Triple::new(d, a, x, y)?;
    // outside xs_of_a x ys_of_a both sides vanish
    for (ka, pa) in &t.a {
        for kx in &t.xs_of_a[ka] {
            for ky in &t.ys_of_a[ka] {
                let lhs = t.p_ax(ka, kx) * t.p_ay(ka, ky);
                let rhs = t.p_axy(ka, kx, ky) * pa.clone();
                if lhs != rhs {
                    return Ok(Verdict::fail(
                        "ci",
                        Witness::of(&[("a", ka), ("x", kx), ("y", ky)]),
                        format!("p(a,x)p(a,y) = {lhs} but p(a,x,y)p(a) = {rhs}"),
                    ));
                }
            }
        }
    }
    Ok(Verdict::pass(
        "ci",
        "p(a,x)p(a,y) = p(a,x,y)p(a) at every cell",
    ))
}

/// `A` is a function of `(X, Y)` on the support.
pub fn check_functional<P: Exact>(
    d: &JointDistribution<P>,
    a: &[&str],
    x: &[&str],
    y: &[&str],
) -> Result<Verdict> {
    let t = Triple::new(d, a, x, y)?;
    let mut first: BTreeMap<(&Key, &Key), &Key> = BTreeMap::new();
    let mut best: Option<(&Key, &Key, &Key, &Key)> = None;
    for (ka, kx, ky) in t.axy.keys() {
        match first.get(&(kx, ky)) {
            None => {
                first.insert((kx, ky), ka);
            }
            Some(&prev) => {
                let cand = (kx, ky, prev, ka);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
    }
    Ok(match best {
        Some((kx, ky, ka, ka2)) => Verdict::fail(
            "cond-1",
            Witness::of(&[("x", kx), ("y", ky), ("a", ka), ("a2", ka2)]),
            "two values of A share one (x,y) cell",
        ),
        None => Verdict::pass("cond-1", "every (x,y) in the support has exactly one a"),
    })
}

fn support_saturation<P: Exact>(t: &Triple<P>) -> Verdict {
    for (ka, xs) in &t.xs_of_a {
        for kx in xs {
            for ky in &t.ys_of_a[ka] {
                if !t.axy.contains_key(&(ka.clone(), kx.clone(), ky.clone())) {
                    return Verdict::fail(
                        "cond-2-B",
                        Witness::of(&[("a", ka), ("x", kx), ("y", ky)]),
                        "p(a,x) > 0 and p(a,y) > 0 but p(a,x,y) = 0",
                    );
                }
            }
        }
    }
    Verdict::pass(
        "cond-2-B",
        "p(a,x) > 0 and p(a,y) > 0 always force p(a,x,y) > 0",
    )
}

/// `p(a,x) > 0` and `p(a,y) > 0` imply `p(a,x,y) > 0`, on roles `A, X, Y`.
pub fn check_support_saturation<P: Exact>(d: &JointDistribution<P>) -> Result<Verdict> {
    Ok(support_saturation(&Triple::roles(d)?))
}

fn unique_common_value<P: Exact>(t: &Triple<P>) -> Verdict {
    let colors: Vec<&Key> = t.a.keys().collect();
    for (i, ka) in colors.iter().enumerate() {
        for ka2 in &colors[i + 1..] {
            let x = t.xs_of_a[*ka].intersection(&t.xs_of_a[*ka2]).next();
            let y = t.ys_of_a[*ka].intersection(&t.ys_of_a[*ka2]).next();
            if let (Some(kx), Some(ky)) = (x, y) {
                return Verdict::fail(
                    "cond-2-C",
                    Witness::of(&[("a", ka), ("a2", ka2), ("x", kx), ("y", ky)]),
                    "two values of A are each compatible with both x and y",
                );
            }
        }
    }
    Verdict::pass(
        "cond-2-C",
        "no (x,y) pair is compatible with two values of A",
    )
}

/// No quadruple `a != a', x, y` has `p(a,x), p(a,y), p(a',x), p(a',y)` all
/// positive, including pairs with `p(x,y) = 0`. Roles `A, X, Y`.
pub fn check_unique_common_value<P: Exact>(d: &JointDistribution<P>) -> Result<Verdict> {
    Ok(unique_common_value(&Triple::roles(d)?))
}

/// Outcome of the pointwise comparison `p(a,x)p(a,y)p(x,y)` vs `p(a)p(x)p(y)p(a,x,y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointwiseReport<P> {
    pub verdict: Verdict,
    /// Both sides agree at every cell.
    pub equality_everywhere: bool,
    /// Largest left/right ratio over cells with a positive right-hand side.
    pub max_ratio: Option<P>,
    pub note: &'static str,
}

/// Cell-by-cell check of `p(a,x)p(a,y)p(x,y) <= p(a)p(x)p(y)p(a,x,y)` on
/// roles `A, X, Y`, with undefined terms read as zero.
pub fn check_pointwise_product<P: Exact>(d: &JointDistribution<P>) -> Result<PointwiseReport<P>> {
    Ok(pointwise_product(&Triple::roles(d)?))
}

pub(crate) fn pointwise_product<P: Exact>(t: &Triple<P>) -> PointwiseReport<P> {
    let mut equality = true;
    let mut max_ratio: Option<P> = None;
    let mut violation: Option<(Witness, String)> = None;
    // cells outside xs_of_a x ys_of_a have both sides zero
    for (ka, pa) in &t.a {
        for kx in &t.xs_of_a[ka] {
            for ky in &t.ys_of_a[ka] {
                let lhs = t.p_ax(ka, kx) * t.p_ay(ka, ky) * t.p_xy(kx, ky);
                let rhs = pa.clone() * t.x[kx].clone() * t.y[ky].clone() * t.p_axy(ka, kx, ky);
                if lhs != rhs {
                    equality = false;
                }
                if rhs.is_positive() {
                    let ratio = lhs.clone() / rhs.clone();
                    if max_ratio.as_ref().is_none_or(|m| ratio > *m) {
                        max_ratio = Some(ratio);
                    }
                }
                if lhs > rhs && violation.is_none() {
                    violation = Some((
                        Witness::of(&[("a", ka), ("x", kx), ("y", ky)]),
                        format!("left side {lhs} exceeds right side {rhs}"),
                    ));
                }
            }
        }
    }
    let verdict = match violation {
        Some((w, detail)) => Verdict::fail("eq3", w, detail),
        None if equality => Verdict::pass("eq3", "both sides agree at every cell"),
        None => Verdict::pass("eq3", "left side never exceeds right side"),
    };
    PointwiseReport {
        verdict,
        equality_everywhere: equality,
        max_ratio,
        note: "left side is p(a,x)p(a,y)p(x,y); the third factor is p(x,y)",
    }
}

/// Short stable identifier of a distribution: SHA-256 of its canonical JSON.
pub fn fingerprint<P: Exact>(d: &JointDistribution<P>) -> String {
    let digest = Sha256::digest(d.to_json().as_bytes());
    hex::encode(&digest[..8])
}

/// Evaluation of the four support conditions and the implications between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Audit {
    pub ci: bool,
    pub functional: bool,
    pub saturation: bool,
    pub unique_common_value: bool,
    /// Empty unless an implication failed, which signals a checker bug.
    pub violations: Vec<String>,
    pub fingerprint: String,
}

impl Lemma1Audit {
    pub fn consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates `ci`, `cond-1`, `cond-2-B`, `cond-2-C` and asserts
/// `ci => cond-2-B`, `cond-1 & cond-2-B => cond-2-C`, `cond-2-C => cond-1`.
pub fn audit_lemma1<P: Exact>(d: &JointDistribution<P>) -> Result<Lemma1Audit> {
    let t = Triple::roles(d)?;
    let ci = check_ci_given(d, &["X"], &["Y"], &["A"])?.holds;
    let functional = check_functional(d, &["A"], &["X"], &["Y"])?.holds;
    let saturation = support_saturation(&t).holds;
    let unique = unique_common_value(&t).holds;
    let mut violations = Vec::new();
    if ci && !saturation {
        violations.push("ci holds but cond-2-B fails".to_string());
    }
    if functional && saturation && !unique {
        violations.push("cond-1 and cond-2-B hold but cond-2-C fails".to_string());
    }
    if unique && !functional {
        violations.push("cond-2-C holds but cond-1 fails".to_string());
    }
    let fingerprint = if violations.is_empty() {
        String::new()
    } else {
        fingerprint(d)
    };
    Ok(Lemma1Audit {
        ci,
        functional,
        saturation,
        unique_common_value: unique,
        violations,
        fingerprint,
    })
}

/// Result of conditioning a `cond-2-C` distribution on random events.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma3Audit {
    pub trials: usize,
    pub atom_subset_events: usize,
    pub value_events: usize,
    pub violations: Vec<String>,
}

impl Lemma3Audit {
    pub fn preserved(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Conditions `d` on `trials` random positive-mass events (random atom subsets
/// alternating with slices `B = b`, or `X = x` / `Y = y` without `B`) and
/// re-checks `cond-2-C` each time.
pub fn audit_lemma3<P: Exact>(
    d: &JointDistribution<P>,
    trials: usize,
    seed: u64,
) -> Result<Lemma3Audit> {
    let base = check_unique_common_value(d)?;
    if !base.holds {
        return Err(Error::PreconditionFailed(format!(
            "cond-2-C fails at {}",
            base.witness.unwrap_or_default()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keys: Vec<Key> = d.iter().map(|(k, _)| k.to_vec()).collect();
    let slice_var = ["B", "X", "Y"].into_iter().find(|v| d.has_variable(v));
    let mut audit = Lemma3Audit {
        trials,
        atom_subset_events: 0,
        value_events: 0,
        violations: Vec::new(),
    };
    for trial in 0..trials {
        let event = match slice_var {
            Some(var) if trial % 2 == 1 => {
                audit.value_events += 1;
                let values: Vec<Symbol> = d.alphabet(var)?.into_iter().collect();
                let chosen = values.choose(&mut rng).expect("non-empty alphabet");
                Event::equals(var, chosen)
            }
            _ => {
                audit.atom_subset_events += 1;
                let size = rng.gen_range(1..=keys.len());
                let kept: BTreeSet<Key> = keys.choose_multiple(&mut rng, size).cloned().collect();
                Event::Atoms(kept)
            }
        };
        let conditioned = d.condition(&event)?;
        let v = check_unique_common_value(&conditioned)?;
        if !v.holds {
            audit.violations.push(format!(
                "trial {trial}: cond-2-C lost at {}",
                v.witness.unwrap_or_default()
            ));
        }
    }
    Ok(audit)
}
