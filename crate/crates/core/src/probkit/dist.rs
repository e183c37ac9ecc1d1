use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::scalar::Exact;
use crate::Rational;

/// Opaque value token of a discrete variable.
pub type Symbol = String;

/// One point of the probability space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom<P = Rational> {
    pub values: Vec<Symbol>,
    pub p: P,
}

/// Finite joint distribution with exact probabilities.
///
/// Atoms are stored keyed by their value tuple (aligned with `variables`),
/// so iteration order is lexicographic and the support is exactly the key set.
/// Every atom has strictly positive mass and the masses sum to exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointDistribution<P = Rational> {
    variables: Vec<String>,
    atoms: BTreeMap<Vec<Symbol>, P>,
}

/// Positive-mass event used by [`JointDistribution::condition`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    /// Keep exactly these value tuples (tuples absent from the support are ignored).
    Atoms(BTreeSet<Vec<Symbol>>),
    /// Keep atoms whose value for each listed variable lies in the allowed set.
    Values(BTreeMap<String, BTreeSet<Symbol>>),
}

impl Event {
    pub fn whole() -> Self {
        Event::Values(BTreeMap::new())
    }

    pub fn equals(variable: &str, value: &str) -> Self {
        let mut m = BTreeMap::new();
        m.insert(variable.to_string(), BTreeSet::from([value.to_string()]));
        Event::Values(m)
    }
}

pub(crate) fn render_tuple(values: &[Symbol]) -> String {
    format!("({})", values.join(","))
}

impl<P: Exact> JointDistribution<P> {
    /// Validating constructor; zero-mass atoms are dropped silently.
    pub fn new(
        variables: Vec<String>,
        atoms: impl IntoIterator<Item = (Vec<Symbol>, P)>,
    ) -> Result<Self> {
        Self::new_counting(variables, atoms).map(|(d, _)| d)
    }

    /// Like [`new`](Self::new) but also returns how many zero-mass atoms were dropped.
    pub fn new_counting(
        variables: Vec<String>,
        atoms: impl IntoIterator<Item = (Vec<Symbol>, P)>,
    ) -> Result<(Self, usize)> {
        let (atoms, dropped) = Self::collect(&variables, atoms)?;
        let sum = atoms.values().fold(P::zero(), |acc, p| acc + p.clone());
        if !sum.is_one() {
            return Err(Error::SumNotOne { sum: sum.to_text() });
        }
        Ok((Self { variables, atoms }, dropped))
    }

    /// Builds a distribution from positive weights by exact normalization.
    pub fn from_weights(
        variables: Vec<String>,
        atoms: impl IntoIterator<Item = (Vec<Symbol>, P)>,
    ) -> Result<Self> {
        let (mut atoms, _) = Self::collect(&variables, atoms)?;
        let total = atoms.values().fold(P::zero(), |acc, p| acc + p.clone());
        if total.is_zero() {
            return Err(Error::BadParam("all weights are zero".into()));
        }
        for p in atoms.values_mut() {
            *p = p.clone() / total.clone();
        }
        Ok(Self { variables, atoms })
    }

    /// Distribution of zero variables: a single empty atom with mass one.
    pub fn point() -> Self {
        Self {
            variables: Vec::new(),
            atoms: BTreeMap::from([(Vec::new(), P::one())]),
        }
    }

    /// Validated atom table and the count of dropped zero-mass atoms.
    fn collect(
        variables: &[String],
        atoms: impl IntoIterator<Item = (Vec<Symbol>, P)>,
    ) -> Result<(BTreeMap<Vec<Symbol>, P>, usize)> {
        let mut seen = BTreeSet::new();
        for v in variables {
            if !seen.insert(v.as_str()) {
                return Err(Error::Schema(format!("variable `{v}` declared twice")));
            }
        }
        let mut map = BTreeMap::new();
        let mut zero_keys = BTreeSet::new();
        let mut dropped = 0;
        for (values, p) in atoms {
            if values.len() != variables.len() {
                return Err(Error::Schema(format!(
                    "atom {} has {} values for {} variables",
                    render_tuple(&values),
                    values.len(),
                    variables.len()
                )));
            }
            if p.is_negative() {
                return Err(Error::NegativeProb {
                    atom: render_tuple(&values),
                    p: p.to_text(),
                });
            }
            if map.contains_key(&values) || zero_keys.contains(&values) {
                return Err(Error::DuplicateAtom(render_tuple(&values)));
            }
            if p.is_zero() {
                dropped += 1;
                zero_keys.insert(values);
                continue;
            }
            map.insert(values, p);
        }
        Ok((map, dropped))
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn has_variable(&self, name: &str) -> bool {
        self.variables.iter().any(|v| v == name)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Atoms in lexicographic order of their value tuples.
    pub fn iter(&self) -> impl Iterator<Item = (&[Symbol], &P)> {
        self.atoms.iter().map(|(k, p)| (k.as_slice(), p))
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom<P>> + '_ {
        self.atoms.iter().map(|(k, p)| Atom {
            values: k.clone(),
            p: p.clone(),
        })
    }

    /// Mass of a value tuple; zero outside the support.
    pub fn prob(&self, values: &[Symbol]) -> P {
        self.atoms.get(values).cloned().unwrap_or_else(P::zero)
    }

    pub fn total(&self) -> P {
        self.atoms
            .values()
            .fold(P::zero(), |acc, p| acc + p.clone())
    }

    /// Column positions of the named variables, deduplicated in first-seen order.
    pub fn columns(&self, vars: &[&str]) -> Result<Vec<usize>> {
        let mut out: Vec<usize> = Vec::with_capacity(vars.len());
        for v in vars {
            let idx = self
                .variables
                .iter()
                .position(|name| name == v)
                .ok_or_else(|| Error::UnknownVariable(v.to_string()))?;
            if !out.contains(&idx) {
                out.push(idx);
            }
        }
        Ok(out)
    }

    /// Marginal masses keyed by the projected value tuple.
    pub fn marginal_table(&self, vars: &[&str]) -> Result<BTreeMap<Vec<Symbol>, P>> {
        let cols = self.columns(vars)?;
        let mut table: BTreeMap<Vec<Symbol>, P> = BTreeMap::new();
        for (values, p) in &self.atoms {
            let key: Vec<Symbol> = cols.iter().map(|&c| values[c].clone()).collect();
            match table.get_mut(&key) {
                Some(acc) => *acc = acc.clone() + p.clone(),
                None => {
                    table.insert(key, p.clone());
                }
            }
        }
        Ok(table)
    }

    /// Projection onto `vars`, merging atoms and summing their masses exactly.
    pub fn marginal(&self, vars: &[&str]) -> Result<Self> {
        let cols = self.columns(vars)?;
        let variables = cols.iter().map(|&c| self.variables[c].clone()).collect();
        let names: Vec<&str> = cols.iter().map(|&c| self.variables[c].as_str()).collect();
        Ok(Self {
            variables,
            atoms: self.marginal_table(&names)?,
        })
    }

    /// Conditional distribution given a positive-mass event, renormalized exactly.
    pub fn condition(&self, event: &Event) -> Result<Self> {
        let kept: BTreeMap<Vec<Symbol>, P> = match event {
            Event::Atoms(set) => self
                .atoms
                .iter()
                .filter(|(k, _)| set.contains(*k))
                .map(|(k, p)| (k.clone(), p.clone()))
                .collect(),
            Event::Values(constraints) => {
                let mut cols = Vec::with_capacity(constraints.len());
                for (var, allowed) in constraints {
                    let c = self.columns(&[var.as_str()])?[0];
                    cols.push((c, allowed));
                }
                self.atoms
                    .iter()
                    .filter(|(k, _)| cols.iter().all(|(c, allowed)| allowed.contains(&k[*c])))
                    .map(|(k, p)| (k.clone(), p.clone()))
                    .collect()
            }
        };
        let mass = kept.values().fold(P::zero(), |acc, p| acc + p.clone());
        if mass.is_zero() {
            return Err(Error::ZeroMassEvent);
        }
        let atoms = kept
            .into_iter()
            .map(|(k, p)| (k, p / mass.clone()))
            .collect();
        Ok(Self {
            variables: self.variables.clone(),
            atoms,
        })
    }

    /// Values of `var` with positive marginal probability, sorted.
    pub fn alphabet(&self, var: &str) -> Result<BTreeSet<Symbol>> {
        let c = self.columns(&[var])?[0];
        Ok(self.atoms.keys().map(|k| k[c].clone()).collect())
    }

    /// Renames symbols of one variable. The mapping must be injective on the alphabet.
    pub fn relabel(&self, var: &str, f: impl Fn(&str) -> Symbol) -> Result<Self> {
        let c = self.columns(&[var])?[0];
        let atoms: Vec<_> = self
            .atoms
            .iter()
            .map(|(k, p)| {
                let mut k = k.clone();
                k[c] = f(&k[c]);
                (k, p.clone())
            })
            .collect();
        Self::new(self.variables.clone(), atoms)
    }

    /// Maps the probabilities into another exact scalar type.
    pub fn convert<Q: Exact>(&self, f: impl Fn(&P) -> Q) -> Result<JointDistribution<Q>> {
        JointDistribution::new(
            self.variables.clone(),
            self.atoms.iter().map(|(k, p)| (k.clone(), f(p))),
        )
    }

    /// Builds without validation; caller guarantees the invariants.
    pub(crate) fn from_parts_unchecked(
        variables: Vec<String>,
        atoms: BTreeMap<Vec<Symbol>, P>,
    ) -> Self {
        debug_assert!(atoms
            .values()
            .fold(P::zero(), |a, p| a + p.clone())
            .is_one());
        Self { variables, atoms }
    }
}
