//! Inequality gaps, exact error terms, and end-to-end certificates.
//!
//! Gaps are `RHS - LHS` in bits, so a non-negative gap means the inequality
//! holds. The error terms are logarithms of exact rational sums; their
//! certificates carry the rational itself so `<= 1` can be decided without
//! rounding.

use std::collections::{BTreeMap, BTreeSet};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lawcheck::{self, Triple, Verdict};
use crate::probkit::{cond_entropy, mutual_info, optional_role, JointDistribution, Symbol};
use crate::scalar::Exact;
use crate::TAU;

type Key = Vec<Symbol>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Inequality {
    /// `I(A:B) <= I(A:B|X) + I(A:B|Y) + I(X:Y)`
    #[serde(rename = "ingleton")]
    Ingleton,
    /// `I(A:B) <= I(A:B|X) + I(A:B|Y)`
    #[serde(rename = "eq97")]
    Eq97,
    /// `H(A|B,X) + H(A|B,Y) <= H(A|B)`
    #[serde(rename = "eq13")]
    Eq13,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub inequality: Inequality,
    pub gap: f64,
    pub terms: BTreeMap<String, f64>,
}

impl GapReport {
    pub fn holds(&self) -> bool {
        self.gap >= -TAU
    }

    /// Gap recomputed from the listed terms.
    pub fn recompute(&self) -> f64 {
        let t = |k: &str| self.terms[k];
        match self.inequality {
            Inequality::Ingleton => t("I(A:B|X)") + t("I(A:B|Y)") + t("I(X:Y)") - t("I(A:B)"),
            Inequality::Eq97 => t("I(A:B|X)") + t("I(A:B|Y)") - t("I(A:B)"),
            Inequality::Eq13 => t("H(A|B)") - t("H(A|B,X)") - t("H(A|B,Y)"),
        }
    }
}

fn mi_terms<P: Exact>(d: &JointDistribution<P>) -> Result<BTreeMap<String, f64>> {
    let b = optional_role(d, "B");
    let mut terms = BTreeMap::new();
    terms.insert("I(A:B)".into(), mutual_info(d, &["A"], &b, &[])?);
    terms.insert("I(A:B|X)".into(), mutual_info(d, &["A"], &b, &["X"])?);
    terms.insert("I(A:B|Y)".into(), mutual_info(d, &["A"], &b, &["Y"])?);
    Ok(terms)
}

fn finish(inequality: Inequality, terms: BTreeMap<String, f64>) -> GapReport {
    let mut r = GapReport {
        inequality,
        gap: 0.0,
        terms,
    };
    r.gap = r.recompute();
    r
}

/// Gap of the Ingleton inequality. A missing `B` column is a constant.
pub fn ingleton_gap<P: Exact>(d: &JointDistribution<P>) -> Result<GapReport> {
    let mut terms = mi_terms(d)?;
    terms.insert("I(X:Y)".into(), mutual_info(d, &["X"], &["Y"], &[])?);
    Ok(finish(Inequality::Ingleton, terms))
}

/// Gap of `I(A:B) <= I(A:B|X) + I(A:B|Y)`.
pub fn eq97_gap<P: Exact>(d: &JointDistribution<P>) -> Result<GapReport> {
    Ok(finish(Inequality::Eq97, mi_terms(d)?))
}

/// Gap of `H(A|B,X) + H(A|B,Y) <= H(A|B)`.
pub fn eq13_gap<P: Exact>(d: &JointDistribution<P>) -> Result<GapReport> {
    let b = optional_role(d, "B");
    let bx: Vec<&str> = b.iter().copied().chain(["X"]).collect();
    let by: Vec<&str> = b.iter().copied().chain(["Y"]).collect();
    let mut terms = BTreeMap::new();
    terms.insert("H(A|B)".into(), cond_entropy(d, &["A"], &b)?);
    terms.insert("H(A|B,X)".into(), cond_entropy(d, &["A"], &bx)?);
    terms.insert("H(A|B,Y)".into(), cond_entropy(d, &["A"], &by)?);
    Ok(finish(Inequality::Eq13, terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TermKind {
    Gamma,
    Delta,
    DeltaPrime,
}

/// An error term `log2(power_sum)` with its exact argument.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorTermCertificate<P> {
    pub kind: TermKind,
    pub power_sum: P,
    pub bits: f64,
}

impl<P: Exact> ErrorTermCertificate<P> {
    fn new(kind: TermKind, power_sum: P) -> Self {
        let bits = power_sum.log2();
        Self {
            kind,
            power_sum,
            bits,
        }
    }

    /// `power_sum <= 1`, decided exactly; equivalent to `bits <= 0`.
    pub fn at_most_one(&self) -> bool {
        self.power_sum <= P::one()
    }
}

impl<P: Exact> Serialize for ErrorTermCertificate<P> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ErrorTermCertificate", 4)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("power_sum", &self.power_sum.to_text())?;
        st.serialize_field("bits", &self.bits)?;
        st.serialize_field("at_most_one", &self.at_most_one())?;
        st.end()
    }
}

/// Tables over `(A, B, X, Y)` with `B` possibly absent (empty key).
struct Quad<P> {
    ab: BTreeMap<(Key, Key), P>,
    xs_of_ab: BTreeMap<(Key, Key), BTreeSet<Key>>,
    ys_of_ab: BTreeMap<(Key, Key), BTreeSet<Key>>,
    a: BTreeMap<Key, P>,
    b: BTreeMap<Key, P>,
    x: BTreeMap<Key, P>,
    y: BTreeMap<Key, P>,
    ax: BTreeMap<(Key, Key), P>,
    ay: BTreeMap<(Key, Key), P>,
    bx: BTreeMap<(Key, Key), P>,
    by: BTreeMap<(Key, Key), P>,
}

fn add<K: Ord, P: Exact>(m: &mut BTreeMap<K, P>, k: K, p: &P) {
    match m.get_mut(&k) {
        Some(acc) => *acc = acc.clone() + p.clone(),
        None => {
            m.insert(k, p.clone());
        }
    }
}

fn at<P: Exact>(m: &BTreeMap<(Key, Key), P>, l: &Key, r: &Key) -> P {
    m.get(&(l.clone(), r.clone()))
        .cloned()
        .unwrap_or_else(P::zero)
}

impl<P: Exact> Quad<P> {
    fn new(d: &JointDistribution<P>) -> Result<Self> {
        let ca = d.columns(&["A"])?;
        let cb = d.columns(&optional_role(d, "B"))?;
        let cx = d.columns(&["X"])?;
        let cy = d.columns(&["Y"])?;
        let pick =
            |v: &[Symbol], cols: &[usize]| -> Key { cols.iter().map(|&c| v[c].clone()).collect() };
        let mut q = Quad {
            ab: BTreeMap::new(),
            xs_of_ab: BTreeMap::new(),
            ys_of_ab: BTreeMap::new(),
            a: BTreeMap::new(),
            b: BTreeMap::new(),
            x: BTreeMap::new(),
            y: BTreeMap::new(),
            ax: BTreeMap::new(),
            ay: BTreeMap::new(),
            bx: BTreeMap::new(),
            by: BTreeMap::new(),
        };
        for (v, p) in d.iter() {
            let (a, b, x, y) = (pick(v, &ca), pick(v, &cb), pick(v, &cx), pick(v, &cy));
            add(&mut q.ab, (a.clone(), b.clone()), p);
            q.xs_of_ab
                .entry((a.clone(), b.clone()))
                .or_default()
                .insert(x.clone());
            q.ys_of_ab
                .entry((a.clone(), b.clone()))
                .or_default()
                .insert(y.clone());
            add(&mut q.a, a.clone(), p);
            add(&mut q.b, b.clone(), p);
            add(&mut q.x, x.clone(), p);
            add(&mut q.y, y.clone(), p);
            add(&mut q.ax, (a.clone(), x.clone()), p);
            add(&mut q.ay, (a, y.clone()), p);
            add(&mut q.bx, (b.clone(), x), p);
            add(&mut q.by, (b, y), p);
        }
        Ok(q)
    }

    /// Sums `w(a, b) fx(a, b, x) fy(a, b, y)` over every quadruple with
    /// `p(a,b,x) > 0` and `p(a,b,y) > 0`. For fixed `(a, b)` the admissible
    /// `(x, y)` form a product set, so the inner double sum factors.
    fn sum_over_index_set(
        &self,
        w: impl Fn(&Key, &Key) -> P,
        fx: impl Fn(&Key, &Key, &Key) -> P,
        fy: impl Fn(&Key, &Key, &Key) -> P,
    ) -> P {
        let mut total = P::zero();
        for (a, b) in self.ab.keys() {
            let key = (a.clone(), b.clone());
            let sx = self.xs_of_ab[&key]
                .iter()
                .fold(P::zero(), |acc, x| acc + fx(a, b, x));
            let sy = self.ys_of_ab[&key]
                .iter()
                .fold(P::zero(), |acc, y| acc + fy(a, b, y));
            total = total + w(a, b) * sx * sy;
        }
        total
    }
}

/// `Γ = log2 Σ p(b,x) p(b,y) / p(b)` over quadruples `(a,b,x,y)` with
/// `p(a,b,x) > 0` and `p(a,b,y) > 0`, one summand per quadruple.
pub fn gamma_term<P: Exact>(d: &JointDistribution<P>) -> Result<ErrorTermCertificate<P>> {
    let q = Quad::new(d)?;
    let sum = q.sum_over_index_set(
        |_, b| P::one() / q.b[b].clone(),
        |_, b, x| at(&q.bx, b, x),
        |_, b, y| at(&q.by, b, y),
    );
    Ok(ErrorTermCertificate::new(TermKind::Gamma, sum))
}

/// `Δ = log2 Σ p(a,x)p(a,y)p(b,x)p(b,y) / (p(a)p(x)p(y)p(b))` over the same index set as `Γ`.
pub fn delta_term<P: Exact>(d: &JointDistribution<P>) -> Result<ErrorTermCertificate<P>> {
    let q = Quad::new(d)?;
    let sum = q.sum_over_index_set(
        |a, b| P::one() / (q.a[a].clone() * q.b[b].clone()),
        |a, b, x| at(&q.ax, a, x) * at(&q.bx, b, x) / q.x[x].clone(),
        |a, b, y| at(&q.ay, a, y) * at(&q.by, b, y) / q.y[y].clone(),
    );
    Ok(ErrorTermCertificate::new(TermKind::Delta, sum))
}

/// `Σ p(b,x) p(b,y) / p(b)` over `(b,x,y)` with `p(b,x) > 0`, `p(b,y) > 0`.
/// This is a probability distribution over triples, so the sum is exactly one.
pub fn fork_mass<P: Exact>(d: &JointDistribution<P>) -> Result<P> {
    let q = Quad::new(d)?;
    let mut xs: BTreeMap<&Key, Vec<&P>> = BTreeMap::new();
    for ((b, _), p) in &q.bx {
        xs.entry(b).or_default().push(p);
    }
    let mut ys: BTreeMap<&Key, Vec<&P>> = BTreeMap::new();
    for ((b, _), p) in &q.by {
        ys.entry(b).or_default().push(p);
    }
    let mut total = P::zero();
    for (b, pb) in &q.b {
        for px in &xs[b] {
            for py in &ys[b] {
                total = total + (*px).clone() * (*py).clone() / pb.clone();
            }
        }
    }
    Ok(total)
}

/// `Δ' = log2 max p(a,x)p(a,y)p(x,y) / (p(a)p(x)p(y)p(a,x,y))`; requires `cond-2-B`.
pub fn delta_prime<P: Exact>(d: &JointDistribution<P>) -> Result<ErrorTermCertificate<P>> {
    let sat = lawcheck::check_support_saturation(d)?;
    if !sat.holds {
        return Err(Error::PreconditionFailed(format!(
            "cond-2-B fails at {}",
            sat.witness.unwrap_or_default()
        )));
    }
    let t = Triple::roles(d)?;
    let rep = lawcheck::pointwise_product(&t);
    let max = rep
        .max_ratio
        .expect("a non-empty distribution has a positive cell");
    Ok(ErrorTermCertificate::new(TermKind::DeltaPrime, max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    /// The hypothesis does not hold; nothing to verify.
    NotApplicable,
    /// The verified statement is contradicted. Always a bug.
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "P: Exact")]
pub struct Lemma2Certificate<P> {
    pub status: Status,
    pub gamma: ErrorTermCertificate<P>,
    pub delta: ErrorTermCertificate<P>,
    /// `H(A|B) + Γ - H(A|X,B) - H(A|Y,B)`
    pub eq9_slack: f64,
    /// `I(A:B|X) + I(A:B|Y) + Δ - I(A:B)`
    pub eq10_slack: f64,
    pub failures: Vec<String>,
}

/// Both unconditional bounds with error terms, on any distribution:
/// `H(A|X,B) + H(A|Y,B) <= H(A|B) + Γ` and `I(A:B) <= I(A:B|X) + I(A:B|Y) + Δ`.
pub fn verify_lemma2<P: Exact>(d: &JointDistribution<P>) -> Result<Lemma2Certificate<P>> {
    let gamma = gamma_term(d)?;
    let delta = delta_term(d)?;
    let e13 = eq13_gap(d)?;
    let e97 = eq97_gap(d)?;
    let eq9_slack = e13.gap + gamma.bits;
    let eq10_slack = e97.gap + delta.bits;
    let mut failures = Vec::new();
    if eq9_slack < -TAU {
        failures.push(format!("entropy bound with Γ violated by {}", -eq9_slack));
    }
    if eq10_slack < -TAU {
        failures.push(format!(
            "mutual-information bound with Δ violated by {}",
            -eq10_slack
        ));
    }
    if gamma.at_most_one() && !e13.holds() {
        failures.push(format!("Γ sum <= 1 but entropy gap is {}", e13.gap));
    }
    Ok(Lemma2Certificate {
        status: if failures.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        },
        gamma,
        delta,
        eq9_slack,
        eq10_slack,
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "P: Exact")]
pub struct Theorem1Certificate<P> {
    pub status: Status,
    pub condition: Verdict,
    pub gap: GapReport,
    pub gamma: ErrorTermCertificate<P>,
    /// Exact value of the second-route sum; must equal one.
    #[serde(serialize_with = "ser_text")]
    pub fork_mass: P,
    pub failures: Vec<String>,
}

fn ser_text<P: Exact, S: Serializer>(p: &P, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_text())
}

/// Under `cond-2-C`, `H(A|B,X) + H(A|B,Y) <= H(A|B)`, certified by the exact
/// bound `Γ`-sum `<= 1` and by the fork mass being exactly one.
pub fn verify_theorem1<P: Exact>(d: &JointDistribution<P>) -> Result<Theorem1Certificate<P>> {
    let condition = lawcheck::check_unique_common_value(d)?;
    let gap = eq13_gap(d)?;
    let gamma = gamma_term(d)?;
    let fork_mass = fork_mass(d)?;
    let mut failures = Vec::new();
    let status = if !condition.holds {
        Status::NotApplicable
    } else {
        if !gap.holds() {
            failures.push(format!("entropy gap {} is negative", gap.gap));
        }
        if !gamma.at_most_one() {
            failures.push(format!("Γ sum {} exceeds 1", gamma.power_sum.to_text()));
        }
        if !fork_mass.is_one() {
            failures.push(format!("fork mass {} is not 1", fork_mass.to_text()));
        }
        if gamma.power_sum > fork_mass {
            failures.push("Γ sum exceeds fork mass".into());
        }
        if failures.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        }
    };
    Ok(Theorem1Certificate {
        status,
        condition,
        gap,
        gamma,
        fork_mass,
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "P: Exact")]
pub struct Theorem2Certificate<P> {
    pub status: Status,
    pub condition: Verdict,
    pub pointwise: Option<Verdict>,
    pub equality_everywhere: Option<bool>,
    pub delta: ErrorTermCertificate<P>,
    pub delta_prime: Option<ErrorTermCertificate<P>>,
    pub gap: GapReport,
    pub failures: Vec<String>,
}

/// Under `cond-2-B`, `I(A:B) <= I(A:B|X) + I(A:B|Y) + Δ'`; when the pointwise
/// product inequality holds everywhere the error term drops and both sides of
/// it must coincide at every cell.
pub fn verify_theorem2<P: Exact>(d: &JointDistribution<P>) -> Result<Theorem2Certificate<P>> {
    let condition = lawcheck::check_support_saturation(d)?;
    let gap = eq97_gap(d)?;
    let delta = delta_term(d)?;
    if !condition.holds {
        return Ok(Theorem2Certificate {
            status: Status::NotApplicable,
            condition,
            pointwise: None,
            equality_everywhere: None,
            delta,
            delta_prime: None,
            gap,
            failures: Vec::new(),
        });
    }
    let pw = lawcheck::check_pointwise_product(d)?;
    let dp = delta_prime(d)?;
    let mut failures = Vec::new();
    if gap.gap < -dp.bits - TAU {
        failures.push(format!("gap {} below -Δ' = {}", gap.gap, -dp.bits));
    }
    if delta.power_sum > dp.power_sum {
        failures.push(format!(
            "Δ sum {} exceeds Δ' ratio {}",
            delta.power_sum.to_text(),
            dp.power_sum.to_text()
        ));
    }
    if pw.verdict.holds {
        if !gap.holds() {
            failures.push(format!("gap {} negative although eq3 holds", gap.gap));
        }
        if !pw.equality_everywhere {
            failures.push("eq3 holds as a strict inequality somewhere".into());
        }
    }
    Ok(Theorem2Certificate {
        status: if failures.is_empty() {
            Status::Pass
        } else {
            Status::Fail
        },
        condition,
        pointwise: Some(pw.verdict),
        equality_everywhere: Some(pw.equality_everywhere),
        delta,
        delta_prime: Some(dp),
        gap,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probkit::fixtures::*;
    use crate::{Distribution, Rational};
    use num_traits::One;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= TAU
    }

    fn r(n: u64, d: u64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn ingleton_on_trivial_cases() {
        let d: Distribution = four_independent_bits();
        assert!(close(ingleton_gap(&d).unwrap().gap, 0.0));
        let d: Distribution = copy_bit_with_b();
        let g = ingleton_gap(&d).unwrap();
        assert!(close(g.gap, 0.0));
        assert!(close(g.terms["I(X:Y)"], 1.0));
    }

    #[test]
    fn eq97_constant_b_and_copy_bit() {
        let d: Distribution = xor_triple();
        assert!(close(eq97_gap(&d).unwrap().gap, 0.0));
        let d: Distribution = copy_bit_with_b();
        assert!(close(eq97_gap(&d).unwrap().gap, -1.0));
    }

    #[test]
    fn eq13_equality_case() {
        let d: Distribution = copy_x_independent_y();
        assert!(close(eq13_gap(&d).unwrap().gap, 0.0));
    }

    #[test]
    fn gamma_and_delta_on_xor() {
        let d: Distribution = xor_triple();
        let g = gamma_term(&d).unwrap();
        assert_eq!(g.power_sum, r(2, 1));
        assert!(close(g.bits, 1.0));
        // H(A) - H(A|X) - H(A|Y) = 1 - 1 - 1: the Γ bound is tight
        assert!(close(eq13_gap(&d).unwrap().gap, -1.0));
        let dl = delta_term(&d).unwrap();
        assert_eq!(dl.power_sum, r(1, 1));
    }

    #[test]
    fn gamma_one_when_a_is_pinned() {
        let d: Distribution = copy_x_independent_y();
        assert_eq!(gamma_term(&d).unwrap().power_sum, r(1, 1));
    }

    #[test]
    fn delta_collapses_on_products() {
        let d: Distribution = four_independent_bits();
        assert_eq!(delta_term(&d).unwrap().power_sum, r(1, 1));
    }

    #[test]
    fn delta_prime_cases() {
        let d: Distribution = copy_bit();
        let dp = delta_prime(&d).unwrap();
        assert_eq!(dp.power_sum, r(2, 1));
        assert!(close(dp.bits, 1.0));
        assert!(matches!(
            delta_prime(&xor_triple::<Rational>()),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn lemma2_xor_is_tight() {
        let c = verify_lemma2(&xor_triple::<Rational>()).unwrap();
        assert_eq!(c.status, Status::Pass);
        assert!(close(c.eq9_slack, 0.0));
    }

    #[test]
    fn theorem1_equality_case_passes() {
        let c = verify_theorem1(&copy_x_independent_y::<Rational>()).unwrap();
        assert_eq!(c.status, Status::Pass);
        assert!(close(c.gap.gap, 0.0));
        assert!(c.fork_mass.is_one());
    }

    #[test]
    fn theorem1_not_applicable_on_xor() {
        let c = verify_theorem1(&xor_triple::<Rational>()).unwrap();
        assert_eq!(c.status, Status::NotApplicable);
        assert!(c.condition.witness.is_some());
    }

    #[test]
    fn theorem2_copy_bit_bound_is_tight() {
        let c = verify_theorem2(&copy_bit_with_b::<Rational>()).unwrap();
        assert_eq!(c.status, Status::Pass);
        assert!(c.condition.holds);
        assert!(close(c.gap.gap, -1.0));
        assert!(close(c.delta_prime.unwrap().bits, 1.0));
    }

    #[test]
    fn gap_reports_recompute() {
        let d: Distribution = copy_bit_with_b();
        for g in [ingleton_gap(&d), eq97_gap(&d), eq13_gap(&d)] {
            let g = g.unwrap();
            assert!(close(g.gap, g.recompute()));
        }
    }

    #[test]
    fn certificate_json_carries_exact_sum() {
        let g = gamma_term(&xor_triple::<Rational>()).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(
            json,
            r#"{"kind":"Gamma","power_sum":"2","bits":1.0,"at_most_one":false}"#
        );
    }
}
