//! Strategies and a naive floating-point entropy oracle shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use entroplab::{Distribution, Rational};
use itertools::Itertools;
use proptest::prelude::*;

/// Raw weighted table: variable names, cells and non-negative integer weights.
#[derive(Clone, Debug)]
pub struct Table {
    pub vars: Vec<String>,
    pub cells: Vec<Vec<String>>,
    pub weights: Vec<u64>,
}

impl Table {
    pub fn dist(&self) -> Distribution {
        let atoms = self.cells.iter().cloned().zip(
            self.weights
                .iter()
                .map(|&w| Rational::from_integer(w.into())),
        );
        Distribution::from_weights(self.vars.clone(), atoms).unwrap()
    }

    /// Entropy in bits of the named columns, straight from the weights.
    pub fn h(&self, names: &[&str]) -> f64 {
        let cols: Vec<usize> = names
            .iter()
            .map(|n| self.vars.iter().position(|v| v == n).unwrap())
            .collect();
        let total: u64 = self.weights.iter().sum();
        let mut groups: HashMap<Vec<&str>, u64> = HashMap::new();
        for (cell, &w) in self.cells.iter().zip(&self.weights) {
            let key = cols.iter().map(|&c| cell[c].as_str()).collect();
            *groups.entry(key).or_default() += w;
        }
        groups
            .values()
            .filter(|&&w| w > 0)
            .map(|&w| {
                let p = w as f64 / total as f64;
                -p * p.log2()
            })
            .sum()
    }

    /// Same support, each positive weight replaced by `f(i, w)`.
    pub fn reweighted(&self, f: impl Fn(usize, u64) -> u64) -> Table {
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, &w)| if w == 0 { 0 } else { f(i, w).max(1) })
            .collect();
        Table {
            weights,
            ..self.clone()
        }
    }
}

/// Tables over `vars` with alphabet sizes in `1..=max_size` and weights in `0..=max_weight`,
/// at least one weight positive.
pub fn table(
    vars: &'static [&'static str],
    max_size: usize,
    max_weight: u64,
) -> impl Strategy<Value = Table> {
    proptest::collection::vec(1..=max_size, vars.len()).prop_flat_map(move |sizes| {
        let cells: Vec<Vec<String>> = sizes
            .iter()
            .zip(vars)
            .map(|(&s, v)| {
                (0..s)
                    .map(|i| format!("{}{i}", v.to_lowercase()))
                    .collect::<Vec<_>>()
            })
            .multi_cartesian_product()
            .collect();
        let n = cells.len();
        proptest::collection::vec(0..=max_weight, n)
            .prop_filter("some positive weight", |w| w.iter().any(|&x| x > 0))
            .prop_map(move |weights| Table {
                vars: vars.iter().map(|s| s.to_string()).collect(),
                cells: cells.clone(),
                weights,
            })
    })
}

pub const AXY: &[&str] = &["A", "X", "Y"];
pub const ABXY: &[&str] = &["A", "B", "X", "Y"];
