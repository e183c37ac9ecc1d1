use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::ColoredBipartiteGraph;
use crate::error::{Error, Result};
use crate::lawcheck::{check_unique_common_value, Verdict, Witness};
use crate::probkit::{cond_entropy, entropy, JointDistribution};
use crate::scalar::Exact;
use crate::TAU;

pub const DEFAULT_PARTITION_LIMIT: usize = 12;

/// A list of edge sets, each given as `(x, y)` name pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingPartition {
    pub matchings: Vec<Vec<(String, String)>>,
}

impl MatchingPartition {
    pub fn k(&self) -> usize {
        self.matchings.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionVerdict {
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "R")]
    pub r: usize,
}

fn min_or_zero(v: Vec<usize>) -> usize {
    v.into_iter().min().unwrap_or(0)
}

/// Checks that the parts partition `E`, that each part is a matching and that
/// no pair `(x, y)` has edges at both `x` and `y` in two different parts.
/// Reports `L` and `R`, the minimum left and right degrees.
pub fn verify_matching_partition<P: Exact>(
    g: &ColoredBipartiteGraph<P>,
    partition: &MatchingPartition,
) -> Result<PartitionVerdict> {
    const ID: &str = "matching-partition";
    let mut part_of: Vec<Option<usize>> = vec![None; g.edge_count()];
    let mut resolved: Vec<Vec<usize>> = Vec::with_capacity(partition.k());
    for part in &partition.matchings {
        let mut ids = Vec::with_capacity(part.len());
        for (x, y) in part {
            let e = g
                .left_index(x)
                .zip(g.right_index(y))
                .and_then(|(xi, yi)| g.edge_at(xi, yi))
                .ok_or_else(|| Error::NotAPartition(format!("({x}, {y}) is not an edge")))?;
            ids.push(e);
        }
        resolved.push(ids);
    }
    let report = |verdict| PartitionVerdict {
        verdict,
        k: partition.k(),
        l: min_or_zero(g.left_degrees()),
        r: min_or_zero(g.right_degrees()),
    };
    let edge_name = |e: usize| format!("{},{}", g.edges()[e].x, g.edges()[e].y);

    for (j, ids) in resolved.iter().enumerate() {
        for &e in ids {
            if let Some(prev) = part_of[e] {
                let w = Witness(vec![
                    ("edge".into(), edge_name(e)),
                    ("parts".into(), format!("{prev},{j}")),
                ]);
                return Ok(report(Verdict::fail(ID, w, "edge listed more than once")));
            }
            part_of[e] = Some(j);
        }
    }
    if let Some(e) = part_of.iter().position(Option::is_none) {
        let w = Witness(vec![("edge".into(), edge_name(e))]);
        return Ok(report(Verdict::fail(ID, w, "edge not covered by any part")));
    }
    for (j, ids) in resolved.iter().enumerate() {
        let mut seen_x = HashMap::new();
        let mut seen_y = HashMap::new();
        for &e in ids {
            let (x, y) = g.ends(e);
            let clash = seen_x.insert(x, e).or(seen_y.insert(y, e));
            if let Some(other) = clash {
                let w = Witness(vec![
                    ("part".into(), j.to_string()),
                    ("e1".into(), edge_name(other)),
                    ("e2".into(), edge_name(e)),
                ]);
                return Ok(report(Verdict::fail(ID, w, "part is not a matching")));
            }
        }
    }
    let mut involved: HashMap<(usize, usize), usize> = HashMap::new();
    for (j, ids) in resolved.iter().enumerate() {
        for &e1 in ids {
            for &e2 in ids {
                let pair = (g.ends(e1).0, g.ends(e2).1);
                if let Some(prev) = involved.insert(pair, j) {
                    if prev != j {
                        let w = Witness(vec![
                            ("x".into(), g.left()[pair.0].clone()),
                            ("y".into(), g.right()[pair.1].clone()),
                            ("parts".into(), format!("{prev},{j}")),
                        ]);
                        return Ok(report(Verdict::fail(ID, w, "pair involved in two parts")));
                    }
                }
            }
        }
    }
    Ok(report(Verdict::pass(ID, "valid matching partition")))
}

/// Entropy side of the corollary on the uniform edge distribution colored by part index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyCertificate {
    pub h_a: f64,
    pub h_a_given_x: f64,
    pub h_a_given_y: f64,
    pub log2_l: f64,
    pub log2_r: f64,
    pub unique_common_value: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorollaryCertificate {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "R")]
    pub r: usize,
    /// `K >= L * R`
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<EntropyCertificate>,
}

/// `K >= L R`, plus `H(A|X) >= log2 L`, `H(A|Y) >= log2 R`, `H(A) >= log2 L + log2 R`
/// where `A` is the index of the part holding a uniformly random edge.
pub fn corollary_bound_check<P: Exact>(
    g: &ColoredBipartiteGraph<P>,
    partition: &MatchingPartition,
) -> Result<CorollaryCertificate> {
    let v = verify_matching_partition(g, partition)?;
    if !v.verdict.holds {
        return Err(Error::PreconditionFailed(format!(
            "not a valid matching partition: {}",
            v.verdict.detail
        )));
    }
    let entropy_cert = if g.edge_count() == 0 {
        None
    } else {
        let p = P::from_ratio(1, g.edge_count() as u64);
        let atoms = partition
            .matchings
            .iter()
            .enumerate()
            .flat_map(|(j, part)| {
                let p = p.clone();
                part.iter()
                    .map(move |(x, y)| (vec![x.clone(), y.clone(), format!("m{j}")], p.clone()))
            });
        let d = JointDistribution::new(vec!["X".into(), "Y".into(), "A".into()], atoms)?;
        let h_a = entropy(&d, &["A"])?;
        let h_a_given_x = cond_entropy(&d, &["A"], &["X"])?;
        let h_a_given_y = cond_entropy(&d, &["A"], &["Y"])?;
        let log2_l = (v.l as f64).log2();
        let log2_r = (v.r as f64).log2();
        Some(EntropyCertificate {
            holds: h_a_given_x >= log2_l - TAU
                && h_a_given_y >= log2_r - TAU
                && h_a >= log2_l + log2_r - TAU,
            unique_common_value: check_unique_common_value(&d)?.holds,
            h_a,
            h_a_given_x,
            h_a_given_y,
            log2_l,
            log2_r,
        })
    };
    Ok(CorollaryCertificate {
        holds: v.k >= v.l * v.r,
        k: v.k,
        l: v.l,
        r: v.r,
        entropy: entropy_cert,
    })
}

/// Compact edge list for the exhaustive searches: vertices renumbered to bit positions.
struct Compact {
    ends: Vec<(u64, u64)>,
}

impl Compact {
    fn new<P: Exact>(g: &ColoredBipartiteGraph<P>, limit: usize) -> Result<Self> {
        let m = g.edge_count();
        if m > limit || m > 64 {
            return Err(Error::TooLarge {
                size: m,
                limit: limit.min(64),
            });
        }
        let mut lx = HashMap::new();
        let mut ry = HashMap::new();
        let ends = (0..m)
            .map(|e| {
                let (x, y) = g.ends(e);
                let n = lx.len();
                let bx = *lx.entry(x).or_insert(n);
                let n = ry.len();
                let by = *ry.entry(y).or_insert(n);
                (1u64 << bx, 1u64 << by)
            })
            .collect();
        Ok(Self { ends })
    }
}

#[derive(Clone, Copy, Default)]
struct Part {
    xs: u64,
    ys: u64,
}

/// Whether edge `(x, y)` can join part `p` (index `j`, or a fresh part when
/// `None`) without breaking the matching or pair-involvement rules.
fn admissible(parts: &[Part], j: Option<usize>, p: Part, x: u64, y: u64) -> bool {
    if p.xs & x != 0 || p.ys & y != 0 {
        return false;
    }
    let (xs, ys) = (p.xs | x, p.ys | y);
    parts.iter().enumerate().all(|(i, q)| {
        Some(i) == j || !((q.xs & x != 0 && q.ys & ys != 0) || (q.ys & y != 0 && q.xs & xs != 0))
    })
}

/// Restricted-growth search over edge-to-part assignments.
struct Search<'a> {
    c: &'a Compact,
    assign: Vec<usize>,
    parts: Vec<Part>,
}

impl Search<'_> {
    fn run(
        &mut self,
        e: usize,
        visit: &mut dyn FnMut(&[usize], usize) -> Option<usize>,
        cap: &mut usize,
    ) {
        if self.parts.len() >= *cap {
            return;
        }
        if e == self.c.ends.len() {
            if let Some(new_cap) = visit(&self.assign, self.parts.len()) {
                *cap = new_cap;
            }
            return;
        }
        let (x, y) = self.c.ends[e];
        for j in 0..self.parts.len() {
            if admissible(&self.parts, Some(j), self.parts[j], x, y) {
                let saved = self.parts[j];
                self.parts[j].xs |= x;
                self.parts[j].ys |= y;
                self.assign[e] = j;
                self.run(e + 1, visit, cap);
                self.parts[j] = saved;
            }
        }
        if admissible(&self.parts, None, Part::default(), x, y) {
            self.assign[e] = self.parts.len();
            self.parts.push(Part { xs: x, ys: y });
            self.run(e + 1, visit, cap);
            self.parts.pop();
        }
    }
}

fn to_partition<P: Exact>(
    g: &ColoredBipartiteGraph<P>,
    assign: &[usize],
    k: usize,
) -> MatchingPartition {
    let mut matchings = vec![Vec::new(); k];
    for (e, &j) in assign.iter().enumerate() {
        let edge = &g.edges()[e];
        matchings[j].push((edge.x.clone(), edge.y.clone()));
    }
    MatchingPartition { matchings }
}

/// Minimal `K` over all valid matching partitions, by exhaustive search.
pub fn min_valid_matching_partition<P: Exact>(
    g: &ColoredBipartiteGraph<P>,
    limit: usize,
) -> Result<(usize, MatchingPartition)> {
    let c = Compact::new(g, limit)?;
    let m = c.ends.len();
    // all singletons is always valid
    let mut best: (usize, Vec<usize>) = (m, (0..m).collect());
    let mut search = Search {
        c: &c,
        assign: vec![0; m],
        parts: Vec::new(),
    };
    let mut cap = m;
    search.run(
        0,
        &mut |assign, k| {
            best = (k, assign.to_vec());
            Some(k)
        },
        &mut cap,
    );
    Ok((best.0, to_partition(g, &best.1, best.0)))
}

/// Calls `f` on every valid matching partition (parts in first-edge order).
/// Returns the number visited.
pub fn for_each_valid_partition<P: Exact>(
    g: &ColoredBipartiteGraph<P>,
    limit: usize,
    mut f: impl FnMut(&MatchingPartition),
) -> Result<usize> {
    let c = Compact::new(g, limit)?;
    let m = c.ends.len();
    let mut count = 0;
    let mut search = Search {
        c: &c,
        assign: vec![0; m],
        parts: Vec::new(),
    };
    let mut cap = usize::MAX;
    search.run(
        0,
        &mut |assign, k| {
            count += 1;
            f(&to_partition(g, assign, k));
            None
        },
        &mut cap,
    );
    Ok(count)
}
