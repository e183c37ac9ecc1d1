use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::Serialize;

use super::JointDistribution;
use crate::error::{Error, Result};
use crate::scalar::Exact;

/// Shannon entropy in bits of the marginal on `vars`. `H(∅) = 0`.
pub fn entropy<P: Exact>(d: &JointDistribution<P>, vars: &[&str]) -> Result<f64> {
    let table = d.marginal_table(vars)?;
    let h: f64 = table.values().map(|p| -p.to_f64() * p.log2()).sum();
    // -0.0 and tiny negative rounding from a single unit atom
    Ok(h.max(0.0))
}

fn ensure_disjoint(sets: &[&[&str]]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for set in sets {
        let mut local = BTreeSet::new();
        for v in *set {
            if !local.insert(*v) {
                continue;
            }
            if !seen.insert(*v) {
                return Err(Error::OverlappingSets(v.to_string()));
            }
        }
    }
    Ok(())
}

fn union<'a>(sets: &[&[&'a str]]) -> Vec<&'a str> {
    sets.iter().flat_map(|s| s.iter().copied()).collect()
}

/// `H(vars | given) = H(vars, given) - H(given)`.
pub fn cond_entropy<P: Exact>(
    d: &JointDistribution<P>,
    vars: &[&str],
    given: &[&str],
) -> Result<f64> {
    d.columns(vars)?;
    d.columns(given)?;
    ensure_disjoint(&[vars, given])?;
    Ok(entropy(d, &union(&[vars, given]))? - entropy(d, given)?)
}

/// `I(U:V | given)`; pass an empty `given` for the unconditional form.
pub fn mutual_info<P: Exact>(
    d: &JointDistribution<P>,
    u: &[&str],
    v: &[&str],
    given: &[&str],
) -> Result<f64> {
    d.columns(u)?;
    d.columns(v)?;
    d.columns(given)?;
    ensure_disjoint(&[u, v, given])?;
    let h_ug = entropy(d, &union(&[u, given]))?;
    let h_vg = entropy(d, &union(&[v, given]))?;
    let h_uvg = entropy(d, &union(&[u, v, given]))?;
    let h_g = entropy(d, given)?;
    Ok(h_ug + h_vg - h_uvg - h_g)
}

/// `I(U:V:W) = I(U:V) - I(U:V | W)`; may be negative.
pub fn triple_mutual_info<P: Exact>(
    d: &JointDistribution<P>,
    u: &[&str],
    v: &[&str],
    w: &[&str],
) -> Result<f64> {
    ensure_disjoint(&[u, v, w])?;
    Ok(mutual_info(d, u, v, &[])? - mutual_info(d, u, v, w)?)
}

/// Named information measures in bits over the variables of a distribution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfoReport {
    pub entropies: BTreeMap<String, f64>,
    pub conditional_entropies: BTreeMap<String, f64>,
    pub mutual_informations: BTreeMap<String, f64>,
    pub conditional_mutual_informations: BTreeMap<String, f64>,
    pub triple_mutual_informations: BTreeMap<String, f64>,
}

impl InfoReport {
    /// Smallest value among the quantities that must be non-negative.
    pub fn min_nonnegative_measure(&self) -> f64 {
        self.entropies
            .values()
            .chain(self.conditional_entropies.values())
            .chain(self.mutual_informations.values())
            .chain(self.conditional_mutual_informations.values())
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

const FULL_SUBSET_LIMIT: usize = 6;

/// Entropies of variable subsets, conditional entropies of single variables,
/// and pairwise/conditional/triple mutual informations of single variables.
pub fn info_report<P: Exact>(d: &JointDistribution<P>) -> Result<InfoReport> {
    let vars: Vec<&str> = d.variables().iter().map(String::as_str).collect();
    let name = |s: &[&str]| s.join(",");

    let subsets: Vec<Vec<&str>> = if vars.len() <= FULL_SUBSET_LIMIT {
        (1..=vars.len())
            .flat_map(|k| vars.iter().copied().combinations(k))
            .collect()
    } else {
        let mut s: Vec<Vec<&str>> = (1..=2)
            .flat_map(|k| vars.iter().copied().combinations(k))
            .collect();
        s.push(vars.clone());
        s
    };

    let mut entropies = BTreeMap::new();
    entropies.insert(format!("H({})", name(&vars)), entropy(d, &vars)?);
    for s in &subsets {
        entropies.insert(format!("H({})", name(s)), entropy(d, s)?);
    }

    let mut conditional_entropies = BTreeMap::new();
    for &u in &vars {
        for g in &subsets {
            if g.contains(&u) {
                continue;
            }
            conditional_entropies
                .insert(format!("H({}|{})", u, name(g)), cond_entropy(d, &[u], g)?);
        }
    }

    let mut mutual_informations = BTreeMap::new();
    let mut conditional_mutual_informations = BTreeMap::new();
    let mut triple_mutual_informations = BTreeMap::new();
    for pair in vars.iter().copied().combinations(2) {
        let (u, v) = (pair[0], pair[1]);
        mutual_informations.insert(format!("I({u}:{v})"), mutual_info(d, &[u], &[v], &[])?);
        for &w in vars.iter().filter(|w| **w != u && **w != v) {
            conditional_mutual_informations
                .insert(format!("I({u}:{v}|{w})"), mutual_info(d, &[u], &[v], &[w])?);
        }
    }
    for t in vars.iter().copied().combinations(3) {
        triple_mutual_informations.insert(
            format!("I({}:{}:{})", t[0], t[1], t[2]),
            triple_mutual_info(d, &[t[0]], &[t[1]], &[t[2]])?,
        );
    }

    Ok(InfoReport {
        entropies,
        conditional_entropies,
        mutual_informations,
        conditional_mutual_informations,
        triple_mutual_informations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probkit::fixtures::*;
    use crate::{Distribution, Rational, Rational64, TAU};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= TAU
    }

    #[test]
    fn uniform_four_symbols_has_two_bits() {
        let d: Distribution = independent_bits();
        assert!(close(entropy(&d, &["X", "Y"]).unwrap(), 2.0));
        assert!(close(entropy(&d, &[]).unwrap(), 0.0));
    }

    #[test]
    fn self_conditioning_is_zero_and_overlap_is_rejected() {
        let d: Distribution = xor_triple();
        assert!(close(cond_entropy(&d, &["A"], &["X", "Y"]).unwrap(), 0.0));
        assert_eq!(
            cond_entropy(&d, &["A"], &["A"]).unwrap_err(),
            Error::OverlappingSets("A".into())
        );
    }

    #[test]
    fn xor_mutual_informations() {
        let d: Distribution = xor_triple();
        assert!(close(mutual_info(&d, &["X"], &["Y"], &[]).unwrap(), 0.0));
        assert!(close(mutual_info(&d, &["X"], &["Y"], &["A"]).unwrap(), 1.0));
        assert!(close(
            triple_mutual_info(&d, &["X"], &["Y"], &["A"]).unwrap(),
            -1.0
        ));
    }

    #[test]
    fn copy_bit_triple_information_is_one() {
        let d: Distribution = copy_bit();
        assert!(close(
            triple_mutual_info(&d, &["X"], &["Y"], &["A"]).unwrap(),
            1.0
        ));
    }

    #[test]
    fn independent_triple_has_zero_triple_information() {
        let d: Distribution = four_independent_bits();
        assert!(close(
            triple_mutual_info(&d, &["X"], &["Y"], &["A"]).unwrap(),
            0.0
        ));
    }

    #[test]
    fn scalar_type_does_not_change_measures() {
        let big: Distribution = xor_triple();
        let small: JointDistribution<Rational64> = xor_triple();
        let a = info_report(&big).unwrap();
        let b = info_report(&small).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn point_distribution_reports_zeros() {
        let d = JointDistribution::<Rational>::point();
        let rep = info_report(&d).unwrap();
        assert_eq!(rep.entropies.len(), 1);
        assert!(rep.entropies.values().all(|h| *h == 0.0));
    }
}
