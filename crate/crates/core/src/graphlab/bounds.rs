use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use super::{
    check_property_doublestar, check_property_star, color_classes, edge_distribution,
    ColoredBipartiteGraph,
};
use crate::error::{Error, Result};
use crate::lawcheck::Verdict;
use crate::probkit::{cond_entropy, entropy};
use crate::scalar::{biguint_log2, binomial, Exact};
use crate::{Rational, TAU};

/// A lower bound on the biclique covering number.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound: String,
    pub value: f64,
    /// Smallest integer not below `value` (up to `TAU`), and at least 1.
    pub integer: u64,
    /// Exact rational value when it is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    /// The graph property the bound relies on.
    pub requires: String,
}

fn integer_bound(value: f64) -> u64 {
    ((value - TAU).ceil() as u64).max(1)
}

fn require(v: Verdict) -> Result<()> {
    if v.holds {
        return Ok(());
    }
    let w = v.witness.map(|w| w.to_string()).unwrap_or_default();
    Err(Error::PreconditionFailed(format!(
        "{} fails: {w}",
        v.condition
    )))
}

/// `2^{(H(A|X) + H(A|Y) - H(A)) / 2}` on the edge distribution. Needs property (**).
pub fn bcc_entropy_bound<P: Exact>(g: &ColoredBipartiteGraph<P>) -> Result<BoundReport> {
    require(check_property_doublestar(g)?)?;
    let d = edge_distribution(g)?;
    let exponent = (cond_entropy(&d, &["A"], &["X"])? + cond_entropy(&d, &["A"], &["Y"])?
        - entropy(&d, &["A"])?)
        / 2.0;
    let value = exponent.exp2();
    Ok(BoundReport {
        bound: "entropy".into(),
        value,
        integer: integer_bound(value),
        exact: None,
        requires: "property-doublestar".into(),
    })
}

/// Largest color class. Needs property (*): no biclique holds two edges of one color.
pub fn bcc_color_bound<P: Exact>(g: &ColoredBipartiteGraph<P>) -> Result<BoundReport> {
    require(check_property_star(g)?)?;
    let max = color_classes(g)?
        .values()
        .map(Vec::len)
        .max()
        .ok_or(Error::EmptyGraph)?;
    Ok(BoundReport {
        bound: "color".into(),
        value: max as f64,
        integer: max as u64,
        exact: Some(max.to_string()),
        requires: "property-star".into(),
    })
}

/// `2^{H(X,Y) - H(A)}` on the edge distribution. Needs property (*).
///
/// Exact when edges are unweighted and all color classes have equal size:
/// then the value is `|E| / #colors`.
pub fn bcc_dual_entropy_bound<P: Exact>(g: &ColoredBipartiteGraph<P>) -> Result<BoundReport> {
    require(check_property_star(g)?)?;
    let d = edge_distribution(g)?;
    let value = (entropy(&d, &["X", "Y"])? - entropy(&d, &["A"])?).exp2();
    let classes = color_classes(g)?;
    let sizes: Vec<usize> = classes.values().map(Vec::len).collect();
    let unweighted = g.edges().iter().all(|e| e.weight.is_none());
    let exact = (unweighted && sizes.iter().all(|&s| s == sizes[0]))
        .then(|| P::from_ratio(g.edge_count() as u64, sizes.len() as u64).to_text());
    Ok(BoundReport {
        bound: "dual".into(),
        value,
        integer: integer_bound(value),
        exact,
        requires: "property-star".into(),
    })
}

/// Exact quantities of `G_{n,k}` from binomials alone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GnkClosedForms {
    pub n: u32,
    pub k: u32,
    #[serde(serialize_with = "as_text")]
    pub edges: BigUint,
    #[serde(serialize_with = "as_text")]
    pub colors: BigUint,
    /// `C(2k, k)`: edges per color, which is also the color and dual bound.
    #[serde(serialize_with = "as_text")]
    pub per_color: BigUint,
    /// `C(n-k, k)^2 / C(n, 2k)`, the square of the entropy bound.
    pub entropy_bound_squared: String,
    pub entropy_bound: f64,
    /// `C(n,k) C(n-k,k) = C(n,2k) C(2k,k)`
    pub identity_holds: bool,
}

fn as_text<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn gnk_closed_forms(n: u32, k: u32) -> Result<GnkClosedForms> {
    if k < 1 || 2 * k > n {
        return Err(Error::BadParam(format!(
            "G(n,k) needs 1 <= k <= n/2, got n={n} k={k}"
        )));
    }
    let (n64, k64) = (u64::from(n), u64::from(k));
    let side = binomial(n64, k64);
    let completions = binomial(n64 - k64, k64);
    let colors = binomial(n64, 2 * k64);
    let per_color = binomial(2 * k64, k64);
    let edges = &side * &completions;
    let squared = Rational::new(
        BigInt::from(&completions * &completions),
        BigInt::from(colors.clone()),
    );
    let entropy_bound = ((2.0 * biguint_log2(&completions) - biguint_log2(&colors)) / 2.0).exp2();
    Ok(GnkClosedForms {
        n,
        k,
        identity_holds: edges == &colors * &per_color,
        edges,
        colors,
        per_color,
        entropy_bound_squared: squared.to_string(),
        entropy_bound,
    })
}
