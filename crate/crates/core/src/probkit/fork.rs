use std::collections::BTreeMap;

use super::{optional_role, JointDistribution, Symbol};
use crate::error::Result;
use crate::scalar::Exact;

/// Regenerates `X` and `Y` independently given `(A, B)`:
/// `p'(a,b,x,y) = p(a,b,x) p(a,b,y) / p(a,b)` wherever `p(a,b) > 0`.
///
/// The result is over `(A, B, X, Y)`, or `(A, X, Y)` when `B` is absent.
/// It keeps the `(A,B,X)` and `(A,B,Y)` marginals of `d` and its support
/// contains the support of `d`.
pub fn build_markov_fork<P: Exact>(d: &JointDistribution<P>) -> Result<JointDistribution<P>> {
    let b = optional_role(d, "B");
    let ab: Vec<&str> = ["A"].into_iter().chain(b.iter().copied()).collect();
    let abx: Vec<&str> = ab.iter().copied().chain(["X"]).collect();
    let aby: Vec<&str> = ab.iter().copied().chain(["Y"]).collect();

    let p_ab = d.marginal_table(&ab)?;
    let p_abx = d.marginal_table(&abx)?;
    let p_aby = d.marginal_table(&aby)?;

    // group x- and y-extensions by their (a,b) prefix
    let mut xs: BTreeMap<&[Symbol], Vec<(&Symbol, &P)>> = BTreeMap::new();
    for (k, p) in &p_abx {
        xs.entry(&k[..k.len() - 1])
            .or_default()
            .push((&k[k.len() - 1], p));
    }
    let mut ys: BTreeMap<&[Symbol], Vec<(&Symbol, &P)>> = BTreeMap::new();
    for (k, p) in &p_aby {
        ys.entry(&k[..k.len() - 1])
            .or_default()
            .push((&k[k.len() - 1], p));
    }

    let mut atoms = BTreeMap::new();
    for (prefix, pab) in &p_ab {
        let (Some(xs), Some(ys)) = (xs.get(prefix.as_slice()), ys.get(prefix.as_slice())) else {
            continue;
        };
        for (x, px) in xs {
            for (y, py) in ys {
                let mut key = prefix.clone();
                key.push((*x).clone());
                key.push((*y).clone());
                atoms.insert(key, (*px).clone() * (*py).clone() / pab.clone());
            }
        }
    }
    let variables = abx
        .iter()
        .copied()
        .chain(["Y"])
        .map(str::to_string)
        .collect();
    Ok(JointDistribution::from_parts_unchecked(variables, atoms))
}
