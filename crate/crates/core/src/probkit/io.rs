use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{Map, Value};

use super::JointDistribution;
use crate::error::{Error, Result};
use crate::scalar::Exact;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionDoc {
    variables: Vec<String>,
    atoms: Vec<AtomDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomDoc {
    values: BTreeMap<String, String>,
    p: ProbDoc,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ProbDoc {
    Int(i64),
    Text(String),
}

/// A parsed distribution together with the number of zero-mass atoms dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Loaded<P> {
    pub distribution: JointDistribution<P>,
    pub dropped_zero_atoms: usize,
}

/// Parses and validates the distribution JSON document.
pub fn load_distribution<P: Exact>(doc: &str) -> Result<Loaded<P>> {
    let doc: DistributionDoc =
        serde_json::from_str(doc).map_err(|e| Error::Schema(e.to_string()))?;
    let mut atoms = Vec::with_capacity(doc.atoms.len());
    for (i, atom) in doc.atoms.into_iter().enumerate() {
        if atom.values.len() != doc.variables.len()
            || doc.variables.iter().any(|v| !atom.values.contains_key(v))
        {
            return Err(Error::Schema(format!(
                "atom {i}: values must name exactly the declared variables"
            )));
        }
        let p = match atom.p {
            ProbDoc::Int(n) if n < 0 => P::zero() - P::from_u64(n.unsigned_abs()),
            ProbDoc::Int(n) => P::from_u64(n as u64),
            ProbDoc::Text(s) => P::parse(&s)
                .ok_or_else(|| Error::Schema(format!("atom {i}: bad probability `{s}`")))?,
        };
        let values = doc
            .variables
            .iter()
            .map(|v| atom.values[v].clone())
            .collect();
        atoms.push((values, p));
    }
    let (distribution, dropped_zero_atoms) = JointDistribution::new_counting(doc.variables, atoms)?;
    Ok(Loaded {
        distribution,
        dropped_zero_atoms,
    })
}

impl<P: Exact> JointDistribution<P> {
    /// Canonical JSON value: variables in declared order, atoms sorted by value tuple,
    /// probabilities as lowest-terms strings.
    pub fn to_json_value(&self) -> Value {
        let atoms: Vec<Value> = self
            .iter()
            .map(|(values, p)| {
                let mut vm = Map::new();
                for (name, v) in self.variables().iter().zip(values) {
                    vm.insert(name.clone(), Value::String(v.clone()));
                }
                let mut am = Map::new();
                am.insert("values".into(), Value::Object(vm));
                am.insert("p".into(), Value::String(p.to_text()));
                Value::Object(am)
            })
            .collect();
        let mut root = Map::new();
        root.insert(
            "variables".into(),
            Value::Array(
                self.variables()
                    .iter()
                    .cloned()
                    .map(Value::String)
                    .collect(),
            ),
        );
        root.insert("atoms".into(), Value::Array(atoms));
        Value::Object(root)
    }

    /// Canonical pretty-printed JSON, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("serializable");
        s.push('\n');
        s
    }
}
