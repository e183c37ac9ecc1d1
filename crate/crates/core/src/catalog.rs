//! Deterministic distribution families and seeded random samplers.
//!
//! All generators are pure functions of their parameters (and seed). Random
//! masses are integers drawn uniformly from `[1, 2^16]` and normalized exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lawcheck::check_unique_common_value;
use crate::probkit::{JointDistribution, Symbol};
use crate::scalar::{biguint_log2, binomial, Exact};

/// Atom budget for enumerated families.
pub const MAX_ATOMS: u64 = 1_000_000;

const WEIGHT_MAX: u64 = 1 << 16;

fn set_symbol(items: &[u32]) -> Symbol {
    format!("{{{}}}", items.iter().join(","))
}

fn names(vars: &[&str]) -> Vec<String> {
    vars.iter().map(|s| s.to_string()).collect()
}

fn uniform_over<P: Exact>(
    variables: &[&str],
    rows: Vec<Vec<Symbol>>,
) -> Result<JointDistribution<P>> {
    let p = P::from_ratio(1, rows.len() as u64);
    JointDistribution::new(names(variables), rows.into_iter().map(|r| (r, p.clone())))
}

/// Uniform over ordered pairs `x != y` from `{1..n}`, with `A = {x, y}`. Over `(X, Y, A)`.
pub fn gen_distinct_pairs<P: Exact>(n: u32) -> Result<JointDistribution<P>> {
    if n < 2 {
        return Err(Error::BadParam(format!(
            "distinct-pairs needs n >= 2, got {n}"
        )));
    }
    if u64::from(n) * u64::from(n - 1) > MAX_ATOMS {
        return Err(Error::BadParam(format!(
            "distinct-pairs n = {n} exceeds the atom budget"
        )));
    }
    let rows = (1..=n)
        .cartesian_product(1..=n)
        .filter(|(x, y)| x != y)
        .map(|(x, y)| {
            vec![
                x.to_string(),
                y.to_string(),
                set_symbol(&[x.min(y), x.max(y)]),
            ]
        })
        .collect();
    uniform_over(&["X", "Y", "A"], rows)
}

/// Uniform over ordered pairs of disjoint `k`-subsets of `{1..n}`, with `A = x ∪ y`.
/// Over `(X, Y, A)`.
pub fn gen_disjoint_sets<P: Exact>(n: u32, k: u32) -> Result<JointDistribution<P>> {
    if k < 1 || 2 * k > n {
        return Err(Error::BadParam(format!(
            "disjoint-sets needs 1 <= k <= n/2, got n={n} k={k}"
        )));
    }
    let atoms = binomial(n.into(), k.into()) * binomial((n - k).into(), k.into());
    if atoms > BigUint::from(MAX_ATOMS) {
        return Err(Error::BadParam(format!(
            "disjoint-sets ({n},{k}) has {atoms} atoms"
        )));
    }
    let subsets: Vec<Vec<u32>> = (1..=n).combinations(k as usize).collect();
    let mut rows = Vec::new();
    for x in &subsets {
        for y in &subsets {
            if x.iter().any(|e| y.contains(e)) {
                continue;
            }
            let mut a: Vec<u32> = x.iter().chain(y).copied().collect();
            a.sort_unstable();
            rows.push(vec![set_symbol(x), set_symbol(y), set_symbol(&a)]);
        }
    }
    uniform_over(&["X", "Y", "A"], rows)
}

/// Exact closed forms for the disjoint-sets family.
#[derive(Clone, Debug, PartialEq)]
pub struct DisjointSetsClosedForm {
    /// `C(n, 2k)`, the number of equiprobable colors.
    pub colors: BigUint,
    /// `C(n-k, k)`, the number of completions given one side.
    pub completions: BigUint,
    /// `log2 C(n, 2k)`
    pub h_a: f64,
    /// `log2 C(n-k, k)`
    pub h_a_given_x: f64,
    /// `H(A) - 2 H(A|X) = -log2(C(n-k,k)^2 / C(n,2k))`
    pub gap: f64,
    /// `log2 C(2k, k)`, the magnitude the gap approaches for `n >> k`.
    pub limit: f64,
}

pub fn disjoint_sets_closed_form(n: u32, k: u32) -> Result<DisjointSetsClosedForm> {
    if k < 1 || 2 * k > n {
        return Err(Error::BadParam(format!(
            "disjoint-sets needs 1 <= k <= n/2, got n={n} k={k}"
        )));
    }
    let colors = binomial(n.into(), (2 * k).into());
    let completions = binomial((n - k).into(), k.into());
    let h_a = biguint_log2(&colors);
    let h_a_given_x = biguint_log2(&completions);
    let ratio_log = biguint_log2(&(&completions * &completions)) - h_a;
    Ok(DisjointSetsClosedForm {
        h_a,
        h_a_given_x,
        gap: -ratio_log,
        limit: biguint_log2(&binomial((2 * k).into(), k.into())),
        colors,
        completions,
    })
}

/// Multiplication in GF(2^k), polynomial basis.
pub(crate) mod gf2k {
    /// Irreducible polynomials, bit i = coefficient of t^i.
    const MODULI: [u32; 6] = [0, 0b11, 0b111, 0b1011, 0b1_0011, 0b10_0101];

    pub const MAX_EXP: u32 = 5;

    pub fn mul(mut a: u32, mut b: u32, k: u32) -> u32 {
        let modulus = MODULI[k as usize];
        let top = 1 << k;
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= modulus;
            }
        }
        acc
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn every_nonzero_element_is_invertible() {
            for k in 1..=MAX_EXP {
                let q = 1u32 << k;
                for a in 1..q {
                    assert!((1..q).any(|b| mul(a, b, k) == 1), "k={k} a={a}");
                }
            }
        }

        #[test]
        fn multiplication_is_commutative_and_distributive() {
            let k = 4;
            for a in 0..16 {
                for b in 0..16 {
                    assert_eq!(mul(a, b, k), mul(b, a, k));
                    for c in 0..16 {
                        assert_eq!(mul(a, b ^ c, k), mul(a, b, k) ^ mul(a, c, k));
                    }
                }
            }
        }
    }
}

/// Random lines over GF(q), `q = 2^k_exp`: `A` is a uniformly chosen line
/// `a0 + a1 t`, `X` a point on it with first coordinate in the lower half `F'`
/// of the field, `Y` a point with first coordinate in the upper half `F''`.
///
/// Given `A`, the pair of first coordinates `(t1, t2)` has mass
/// `(1 + delta χ'(t1) χ''(t2)) / (q/2)^2`, where `χ', χ''` are balanced ±1
/// labelings. Per-line marginals of `t1` and `t2` stay uniform, every cell of a
/// line has positive mass, and `X`, `Y` are dependent exactly when `delta != 0`.
/// Over `(X, Y, A)`.
pub fn gen_field_lines<P: Exact>(k_exp: u32, delta: &P) -> Result<JointDistribution<P>> {
    if !(2..=gf2k::MAX_EXP).contains(&k_exp) {
        return Err(Error::BadParam(format!(
            "field-lines needs 2 <= k_exp <= {}, got {k_exp}",
            gf2k::MAX_EXP
        )));
    }
    if delta.abs() >= P::one() {
        return Err(Error::BadParam(format!(
            "field-lines needs |delta| < 1, got {delta}"
        )));
    }
    let q = 1u32 << k_exp;
    let half = q / 2;
    let chi = |t: u32| -> i32 {
        // within each half, the first quarter of the field is +1
        if t % half < half / 2 {
            1
        } else {
            -1
        }
    };
    let line_mass = P::from_ratio(1, u64::from(q) * u64::from(q));
    let cell_share = P::from_ratio(1, u64::from(half) * u64::from(half));
    let mut atoms = Vec::with_capacity((q * q * half * half) as usize);
    for a0 in 0..q {
        for a1 in 0..q {
            let a = format!("{a0}+{a1}t");
            for t1 in 0..half {
                let v1 = a0 ^ gf2k::mul(a1, t1, k_exp);
                for t2 in half..q {
                    let v2 = a0 ^ gf2k::mul(a1, t2, k_exp);
                    let sign = chi(t1) * chi(t2);
                    let coupling = if sign > 0 {
                        P::one() + delta.clone()
                    } else {
                        P::one() - delta.clone()
                    };
                    let p = line_mass.clone() * cell_share.clone() * coupling;
                    atoms.push((
                        vec![format!("({t1},{v1})"), format!("({t2},{v2})"), a.clone()],
                        p,
                    ));
                }
            }
        }
    }
    JointDistribution::new(names(&["X", "Y", "A"]), atoms)
}

fn value_name(var: &str, i: usize) -> Symbol {
    format!("{}{}", var.to_lowercase(), i)
}

fn check_sizes(variables: &[&str], sizes: &[usize]) -> Result<u64> {
    if variables.len() != sizes.len() {
        return Err(Error::BadParam(format!(
            "{} variables but {} sizes",
            variables.len(),
            sizes.len()
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::BadParam("alphabet sizes must be >= 1".into()));
    }
    let cells = sizes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s as u64));
    match cells {
        Some(c) if c <= 100_000 => Ok(c),
        _ => Err(Error::BadParam("more than 100000 cells".into())),
    }
}

fn all_cells(variables: &[&str], sizes: &[usize]) -> Vec<Vec<Symbol>> {
    sizes
        .iter()
        .zip(variables)
        .map(|(&s, v)| (0..s).map(|i| value_name(v, i)).collect::<Vec<_>>())
        .multi_cartesian_product()
        .collect()
}

fn weight<P: Exact>(rng: &mut ChaCha8Rng) -> P {
    P::from_u64(rng.gen_range(1..=WEIGHT_MAX))
}

/// Full-support distribution over the product of the alphabets with random masses.
pub fn sample_random_distribution<P: Exact>(
    variables: &[&str],
    sizes: &[usize],
    seed: u64,
) -> Result<JointDistribution<P>> {
    check_sizes(variables, sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let atoms: Vec<_> = all_cells(variables, sizes)
        .into_iter()
        .map(|c| (c, weight::<P>(&mut rng)))
        .collect();
    JointDistribution::from_weights(names(variables), atoms)
}

/// Random non-empty support (each cell kept with probability 1/2) with random masses.
pub fn sample_random_support<P: Exact>(
    variables: &[&str],
    sizes: &[usize],
    seed: u64,
) -> Result<JointDistribution<P>> {
    check_sizes(variables, sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = all_cells(variables, sizes);
    let mut atoms = Vec::new();
    for c in &cells {
        if rng.gen_bool(0.5) {
            atoms.push((c.clone(), weight::<P>(&mut rng)));
        }
    }
    if atoms.is_empty() {
        let c = cells.choose(&mut rng).expect("at least one cell").clone();
        atoms.push((c, weight(&mut rng)));
    }
    JointDistribution::from_weights(names(variables), atoms)
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> BTreeSet<usize> {
    let mut s: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if s.is_empty() {
        s.insert(rng.gen_range(0..n));
    }
    s
}

const COND2C_RETRIES: usize = 16;

/// Random distribution over `(A, B, X, Y)` whose `(A, X, Y)` support satisfies `cond-2-C`.
///
/// Each color `a` claims a row set `R_a` and a column set `C_a`; a color is
/// admitted only if, against every admitted color, its rows or its columns are
/// disjoint. Its support is a random subset of `R_a × C_a`, and every cell
/// is spread over a random non-empty set of `B` values. `sizes` is
/// `[|A|, |B|, |X|, |Y|]`.
pub fn sample_cond2c<P: Exact>(seed: u64, sizes: [usize; 4]) -> Result<JointDistribution<P>> {
    check_sizes(&["A", "B", "X", "Y"], &sizes)?;
    let [na, nb, nx, ny] = sizes;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..COND2C_RETRIES {
        let mut claimed: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = Vec::new();
        let mut atoms = Vec::new();
        for a in 0..na {
            let rows = random_subset(&mut rng, nx);
            let cols = random_subset(&mut rng, ny);
            let clash = claimed
                .iter()
                .any(|(r, c)| !r.is_disjoint(&rows) && !c.is_disjoint(&cols));
            if clash {
                continue;
            }
            let mut cells: Vec<(usize, usize)> = rows
                .iter()
                .flat_map(|&x| cols.iter().map(move |&y| (x, y)))
                .filter(|_| rng.gen_bool(0.6))
                .collect();
            if cells.is_empty() {
                cells.push((*rows.iter().next().unwrap(), *cols.iter().next().unwrap()));
            }
            for (x, y) in cells {
                for b in random_subset(&mut rng, nb) {
                    atoms.push((
                        vec![
                            value_name("A", a),
                            value_name("B", b),
                            value_name("X", x),
                            value_name("Y", y),
                        ],
                        weight::<P>(&mut rng),
                    ));
                }
            }
            claimed.push((rows, cols));
        }
        let d = JointDistribution::from_weights(names(&["A", "B", "X", "Y"]), atoms)?;
        if check_unique_common_value(&d)?.holds {
            return Ok(d);
        }
    }
    Err(Error::RetryExhausted(COND2C_RETRIES))
}

/// Splits each atom over `b_size` values of a new variable `B` with random
/// positive weights, preserving the original marginal exactly. The weights of
/// one atom are a random composition of `WEIGHT_MAX`, so every split shares
/// that denominator and exact sums stay small. `B` is placed
/// right after `A` (or last when there is no `A`).
pub fn extend_with_random_b<P: Exact>(
    d: &JointDistribution<P>,
    b_size: usize,
    seed: u64,
) -> Result<JointDistribution<P>> {
    if b_size == 0 {
        return Err(Error::BadParam("b_size must be >= 1".into()));
    }
    if b_size as u64 > WEIGHT_MAX {
        return Err(Error::BadParam(format!("b_size must be <= {WEIGHT_MAX}")));
    }
    if d.has_variable("B") {
        return Err(Error::BadParam(
            "distribution already has a B column".into(),
        ));
    }
    let pos = d
        .variables()
        .iter()
        .position(|v| v == "A")
        .map_or(d.variables().len(), |i| i + 1);
    let mut variables = d.variables().to_vec();
    variables.insert(pos, "B".into());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut atoms = Vec::with_capacity(d.len() * b_size);
    for (values, p) in d.iter() {
        let mut cuts: Vec<u64> = sample(&mut rng, WEIGHT_MAX as usize - 1, b_size - 1)
            .into_iter()
            .map(|c| c as u64 + 1)
            .collect();
        cuts.sort_unstable();
        cuts.push(WEIGHT_MAX);
        let mut prev = 0;
        for (b, cut) in cuts.into_iter().enumerate() {
            let mut v = values.to_vec();
            v.insert(pos, value_name("B", b));
            atoms.push((v, p.clone() * P::from_ratio(cut - prev, WEIGHT_MAX)));
            prev = cut;
        }
    }
    JointDistribution::new(variables, atoms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    DistinctPairs,
    DisjointSets,
    FieldLines,
    GnkGraph,
    /// Full support over the product of the alphabets.
    RandomFull,
    /// Random sparse support.
    RandomSupport,
    RandomCond2c,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "distinct-pairs" => Family::DistinctPairs,
            "disjoint-sets" => Family::DisjointSets,
            "field-lines" => Family::FieldLines,
            "gnk-graph" => Family::GnkGraph,
            "random-full" => Family::RandomFull,
            "random-support" => Family::RandomSupport,
            "random-cond2c" => Family::RandomCond2c,
            other => return Err(Error::BadParam(format!("unknown family `{other}`"))),
        })
    }
}

/// Parameters of one catalog family.
#[derive(Clone, Debug)]
pub struct FamilySpec<P> {
    pub family: Family,
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub q_exp: Option<u32>,
    pub delta: Option<P>,
    /// Alphabet sizes of `(A, B, X, Y)` for the random families.
    pub sizes: Option<Vec<usize>>,
    pub seed: Option<u64>,
    /// When set, the result is extended with a random `B` of this size.
    pub b_size: Option<usize>,
}

impl<P: Exact> FamilySpec<P> {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            n: None,
            k: None,
            q_exp: None,
            delta: None,
            sizes: None,
            seed: None,
            b_size: None,
        }
    }

    fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| Error::BadParam(format!("missing parameter --{name}")))
    }

    /// Builds the distribution. `gnk-graph` yields the edge distribution of the graph.
    pub fn generate(&self) -> Result<JointDistribution<P>> {
        let base = match self.family {
            Family::DistinctPairs => gen_distinct_pairs(Self::need(self.n, "n")?)?,
            Family::DisjointSets => {
                gen_disjoint_sets(Self::need(self.n, "n")?, Self::need(self.k, "k")?)?
            }
            Family::FieldLines => {
                let delta = self.delta.clone().unwrap_or_else(P::zero);
                gen_field_lines(Self::need(self.q_exp, "q-exp")?, &delta)?
            }
            Family::GnkGraph => {
                let g = crate::graphlab::gen_gnk::<P>(
                    Self::need(self.n, "n")?,
                    Self::need(self.k, "k")?,
                )?;
                crate::graphlab::edge_distribution(&g)?
            }
            Family::RandomFull | Family::RandomSupport => {
                let sizes = self.sizes.clone().unwrap_or_else(|| vec![2, 2, 2, 2]);
                let vars: Vec<&str> = ["A", "B", "X", "Y", "Z"]
                    .into_iter()
                    .take(sizes.len())
                    .collect();
                let seed = Self::need(self.seed, "seed")?;
                if self.family == Family::RandomFull {
                    sample_random_distribution(&vars, &sizes, seed)?
                } else {
                    sample_random_support(&vars, &sizes, seed)?
                }
            }
            Family::RandomCond2c => {
                let sizes = self.sizes.clone().unwrap_or_else(|| vec![3, 2, 3, 3]);
                let sizes: [usize; 4] = sizes
                    .try_into()
                    .map_err(|_| Error::BadParam("random-cond2c needs 4 sizes".into()))?;
                sample_cond2c(Self::need(self.seed, "seed")?, sizes)?
            }
        };
        match self.b_size {
            Some(b) => extend_with_random_b(&base, b, self.seed.unwrap_or(0)),
            None => Ok(base),
        }
    }
}

/// Counts of atoms per value of one variable; handy for quick family summaries.
pub fn value_counts<P: Exact>(
    d: &JointDistribution<P>,
    var: &str,
) -> Result<BTreeMap<Symbol, usize>> {
    let c = d.columns(&[var])?[0];
    let mut m = BTreeMap::new();
    for (v, _) in d.iter() {
        *m.entry(v[c].clone()).or_insert(0) += 1;
    }
    Ok(m)
}
