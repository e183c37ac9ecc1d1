//! Edge-colored bipartite graphs, matching partitions and biclique covers.

mod biclique;
mod bounds;
mod partition;

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::lawcheck::{Verdict, Witness};
use crate::probkit::JointDistribution;
use crate::scalar::{binomial, Exact};

pub use biclique::{
    bcc_exact, extend_with_cover_index, maximal_bicliques, verify_cover, BccSolution, Biclique,
    BicliqueCover, CliqueRestriction, ZExtension, DEFAULT_BCC_LIMIT,
};
pub use bounds::{
    bcc_color_bound, bcc_dual_entropy_bound, bcc_entropy_bound, gnk_closed_forms, BoundReport,
    GnkClosedForms,
};
pub use partition::{
    corollary_bound_check, for_each_valid_partition, min_valid_matching_partition,
    verify_matching_partition, CorollaryCertificate, EntropyCertificate, MatchingPartition,
    PartitionVerdict, DEFAULT_PARTITION_LIMIT,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge<P> {
    pub x: String,
    pub y: String,
    pub color: Option<String>,
    pub weight: Option<P>,
}

/// Bipartite graph `(V1, V2, E)` with optional edge colors and weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredBipartiteGraph<P> {
    left: Vec<String>,
    right: Vec<String>,
    edges: Vec<Edge<P>>,
    ends: Vec<(usize, usize)>,
    cell: HashMap<(usize, usize), usize>,
}

fn index_of(names: &[String], side: &str) -> Result<HashMap<String, usize>> {
    let mut m = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if m.insert(n.clone(), i).is_some() {
            return Err(Error::Schema(format!("duplicate {side} vertex `{n}`")));
        }
    }
    Ok(m)
}

impl<P: Exact> ColoredBipartiteGraph<P> {
    /// Validates vertex names, parallel edges and weights. Weights must be given
    /// on all edges or on none; when given they are positive and sum to 1.
    pub fn new(left: Vec<String>, right: Vec<String>, edges: Vec<Edge<P>>) -> Result<Self> {
        let li = index_of(&left, "left")?;
        let ri = index_of(&right, "right")?;
        let mut ends = Vec::with_capacity(edges.len());
        let mut cell = HashMap::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            let x = *li.get(&e.x).ok_or_else(|| {
                Error::Schema(format!("edge endpoint `{}` is not a left vertex", e.x))
            })?;
            let y = *ri.get(&e.y).ok_or_else(|| {
                Error::Schema(format!("edge endpoint `{}` is not a right vertex", e.y))
            })?;
            if cell.insert((x, y), i).is_some() {
                return Err(Error::Schema(format!("parallel edge ({}, {})", e.x, e.y)));
            }
            ends.push((x, y));
        }
        let weighted = edges.iter().filter(|e| e.weight.is_some()).count();
        if weighted != 0 {
            if weighted != edges.len() {
                return Err(Error::Schema(
                    "weights must be given on all edges or none".into(),
                ));
            }
            let mut total = P::zero();
            for e in &edges {
                let w = e.weight.as_ref().expect("checked");
                if !w.is_positive() {
                    return Err(Error::Schema(format!(
                        "non-positive weight on ({}, {})",
                        e.x, e.y
                    )));
                }
                total = total + w.clone();
            }
            if !total.is_one() {
                return Err(Error::SumNotOne {
                    sum: total.to_text(),
                });
            }
        }
        Ok(Self {
            left,
            right,
            edges,
            ends,
            cell,
        })
    }

    pub fn left(&self) -> &[String] {
        &self.left
    }

    pub fn right(&self) -> &[String] {
        &self.right
    }

    pub fn edges(&self) -> &[Edge<P>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Endpoint indices of edge `i`.
    pub(crate) fn ends(&self, i: usize) -> (usize, usize) {
        self.ends[i]
    }

    /// Index of the edge between left vertex `x` and right vertex `y`.
    pub(crate) fn edge_at(&self, x: usize, y: usize) -> Option<usize> {
        self.cell.get(&(x, y)).copied()
    }

    pub fn left_index(&self, name: &str) -> Option<usize> {
        self.left.iter().position(|v| v == name)
    }

    pub fn right_index(&self, name: &str) -> Option<usize> {
        self.right.iter().position(|v| v == name)
    }

    pub fn has_edge(&self, x: &str, y: &str) -> bool {
        match (self.left_index(x), self.right_index(y)) {
            (Some(x), Some(y)) => self.edge_at(x, y).is_some(),
            _ => false,
        }
    }

    pub fn left_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.left.len()];
        for &(x, _) in &self.ends {
            d[x] += 1;
        }
        d
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.right.len()];
        for &(_, y) in &self.ends {
            d[y] += 1;
        }
        d
    }

    /// Edge colors, or `PreconditionFailed` naming the first uncolored edge.
    pub fn colors(&self) -> Result<Vec<&str>> {
        self.edges
            .iter()
            .map(|e| {
                e.color.as_deref().ok_or_else(|| {
                    Error::PreconditionFailed(format!("edge ({}, {}) has no color", e.x, e.y))
                })
            })
            .collect()
    }

    /// Same graph with edge `i` colored `f(i)`.
    pub fn recolor(&self, f: impl Fn(usize) -> String) -> Self {
        let mut g = self.clone();
        for (i, e) in g.edges.iter_mut().enumerate() {
            e.color = Some(f(i));
        }
        g
    }

    pub fn to_json_value(&self) -> Value {
        let strings = |v: &[String]| Value::Array(v.iter().cloned().map(Value::String).collect());
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut m = Map::new();
                m.insert("x".into(), Value::String(e.x.clone()));
                m.insert("y".into(), Value::String(e.y.clone()));
                if let Some(c) = &e.color {
                    m.insert("color".into(), Value::String(c.clone()));
                }
                if let Some(w) = &e.weight {
                    m.insert("w".into(), Value::String(w.to_text()));
                }
                Value::Object(m)
            })
            .collect();
        let mut root = Map::new();
        root.insert("left".into(), strings(&self.left));
        root.insert("right".into(), strings(&self.right));
        root.insert("edges".into(), Value::Array(edges));
        Value::Object(root)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("serializable");
        s.push('\n');
        s
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    left: Vec<String>,
    right: Vec<String>,
    edges: Vec<EdgeDoc>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    x: String,
    y: String,
    #[serde(default)]
    color: Option<String>,
    #[serde(default)]
    w: Option<WeightDoc>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum WeightDoc {
    Int(u64),
    Text(String),
}

pub fn load_graph<P: Exact>(doc: &str) -> Result<ColoredBipartiteGraph<P>> {
    let doc: GraphDoc = serde_json::from_str(doc).map_err(|e| Error::Schema(e.to_string()))?;
    let edges = doc
        .edges
        .into_iter()
        .map(|e| {
            let weight = match e.w {
                None => None,
                Some(WeightDoc::Int(n)) => Some(P::from_u64(n)),
                Some(WeightDoc::Text(s)) => {
                    Some(P::parse(&s).ok_or_else(|| Error::Schema(format!("bad weight `{s}`")))?)
                }
            };
            Ok(Edge {
                x: e.x,
                y: e.y,
                color: e.color,
                weight,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ColoredBipartiteGraph::new(doc.left, doc.right, edges)
}

fn set_symbol(items: &[u32]) -> String {
    format!("{{{}}}", items.iter().join(","))
}

/// Cap on `C(n, k)` for `G_{n,k}`.
pub const MAX_GNK_SIDE: u64 = 10_000;

/// `G_{n,k}`: `k`-subsets of `{1..n}` on both sides, edges between disjoint
/// subsets, colored by their union.
pub fn gen_gnk<P: Exact>(n: u32, k: u32) -> Result<ColoredBipartiteGraph<P>> {
    if k < 1 || 2 * k > n {
        return Err(Error::BadParam(format!(
            "G(n,k) needs 1 <= k <= n/2, got n={n} k={k}"
        )));
    }
    if binomial(n.into(), k.into()) > MAX_GNK_SIDE.into() {
        return Err(Error::BadParam(format!(
            "G({n},{k}) has more than {MAX_GNK_SIDE} vertices per side"
        )));
    }
    let subsets: Vec<Vec<u32>> = (1..=n).combinations(k as usize).collect();
    let names: Vec<String> = subsets.iter().map(|s| set_symbol(s)).collect();
    let mut edges = Vec::new();
    for (x, xs) in subsets.iter().enumerate() {
        for (y, ys) in subsets.iter().enumerate() {
            if xs.iter().any(|e| ys.contains(e)) {
                continue;
            }
            let mut a: Vec<u32> = xs.iter().chain(ys).copied().collect();
            a.sort_unstable();
            edges.push(Edge {
                x: names[x].clone(),
                y: names[y].clone(),
                color: Some(set_symbol(&a)),
                weight: None,
            });
        }
    }
    ColoredBipartiteGraph::new(names.clone(), names, edges)
}

/// Complete bipartite graph `K_{m,n}` with vertices `x1..`, `y1..` and no colors.
pub fn complete_bipartite<P: Exact>(m: usize, n: usize) -> ColoredBipartiteGraph<P> {
    let left: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
    let right: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let edges = left
        .iter()
        .cartesian_product(&right)
        .map(|(x, y)| Edge {
            x: x.clone(),
            y: y.clone(),
            color: None,
            weight: None,
        })
        .collect();
    ColoredBipartiteGraph::new(left, right, edges).expect("well-formed")
}

/// Random graph on `left x right` vertices: each cell is an edge with
/// probability 1/2, then at most `max_edges` are kept. With `colors > 0` every
/// edge gets a uniformly random color `c0..`.
pub fn sample_random_graph<P: Exact>(
    left: usize,
    right: usize,
    max_edges: usize,
    colors: usize,
    seed: u64,
) -> ColoredBipartiteGraph<P> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l: Vec<String> = (1..=left).map(|i| format!("x{i}")).collect();
    let r: Vec<String> = (1..=right).map(|i| format!("y{i}")).collect();
    let mut cells: Vec<(usize, usize)> = (0..left)
        .cartesian_product(0..right)
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    cells.shuffle(&mut rng);
    cells.truncate(max_edges);
    cells.sort_unstable();
    let edges = cells
        .into_iter()
        .map(|(x, y)| Edge {
            x: l[x].clone(),
            y: r[y].clone(),
            color: (colors > 0).then(|| format!("c{}", rng.gen_range(0..colors))),
            weight: None,
        })
        .collect();
    ColoredBipartiteGraph::new(l, r, edges).expect("well-formed")
}

/// Uniform (or weighted) distribution on the edges over `(X, Y, A)`, with `A` the color.
pub fn edge_distribution<P: Exact>(g: &ColoredBipartiteGraph<P>) -> Result<JointDistribution<P>> {
    if g.edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let colors = g.colors()?;
    let uniform = P::from_ratio(1, g.edges.len() as u64);
    let atoms = g.edges.iter().zip(colors).map(|(e, c)| {
        (
            vec![e.x.clone(), e.y.clone(), c.to_string()],
            e.weight.clone().unwrap_or_else(|| uniform.clone()),
        )
    });
    JointDistribution::new(vec!["X".into(), "Y".into(), "A".into()], atoms)
}

fn edge_witness<P>(g: &ColoredBipartiteGraph<P>, pairs: &[(&str, usize)]) -> Witness {
    Witness(
        pairs
            .iter()
            .map(|(k, i)| {
                let e = &g.edges[*i];
                let c = e.color.as_deref().unwrap_or("");
                (k.to_string(), format!("{},{},{}", e.x, e.y, c))
            })
            .collect(),
    )
}

/// Same-colored edge pairs, grouped by color.
fn color_classes<P: Exact>(g: &ColoredBipartiteGraph<P>) -> Result<BTreeMap<&str, Vec<usize>>> {
    let mut m: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, c) in g.colors()?.into_iter().enumerate() {
        m.entry(c).or_default().push(i);
    }
    Ok(m)
}

/// Property (*): no biclique contains two edges of the same color.
///
/// Two edges `(x,y)`, `(x',y')` lie in a common biclique exactly when `(x,y')`
/// and `(x',y)` are edges, which includes every pair sharing an endpoint.
pub fn check_property_star<P: Exact>(g: &ColoredBipartiteGraph<P>) -> Result<Verdict> {
    for class in color_classes(g)?.values() {
        for (&i, &j) in class.iter().tuple_combinations() {
            let (x, y) = g.ends(i);
            let (x2, y2) = g.ends(j);
            if g.edge_at(x, y2).is_some() && g.edge_at(x2, y).is_some() {
                return Ok(Verdict::fail(
                    "property-star",
                    edge_witness(g, &[("e1", i), ("e2", j)]),
                    "two edges of one color lie in a common biclique",
                ));
            }
        }
    }
    Ok(Verdict::pass(
        "property-star",
        "every biclique has at most one edge per color",
    ))
}

/// Property (**): if `(x',y)` and `(x,y')` share color `a` and `(x,y)`, `(x',y')`
/// are edges, then `(x,y)` has color `a`.
pub fn check_property_doublestar<P: Exact>(g: &ColoredBipartiteGraph<P>) -> Result<Verdict> {
    let colors = g.colors()?;
    for class in color_classes(g)?.values() {
        for &i in class {
            for &j in class {
                let (x2, y) = g.ends(i);
                let (x, y2) = g.ends(j);
                if x == x2 || y == y2 {
                    continue;
                }
                let (Some(corner), Some(_)) = (g.edge_at(x, y), g.edge_at(x2, y2)) else {
                    continue;
                };
                if colors[corner] != colors[i] {
                    return Ok(Verdict::fail(
                        "property-doublestar",
                        edge_witness(g, &[("e1", i), ("e2", j), ("corner", corner)]),
                        "crossing edges of one color with a differently colored corner",
                    ));
                }
            }
        }
    }
    Ok(Verdict::pass(
        "property-doublestar",
        "every crossing pair forces its corner color",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probkit::{cond_entropy, entropy};
    use crate::{Graph, Rational, TAU};

    pub(crate) fn k22_colored(colors: [&str; 4]) -> Graph {
        let cs: Vec<String> = colors.iter().map(|c| c.to_string()).collect();
        complete_bipartite::<Rational>(2, 2).recolor(|e| cs[e].clone())
    }

    #[test]
    fn gnk_sizes() {
        for (n, k, side, edges, colors) in [(4, 1, 4, 12, 6), (6, 2, 15, 90, 15), (2, 1, 2, 2, 1)] {
            let g: Graph = gen_gnk(n, k).unwrap();
            assert_eq!(g.left().len(), side);
            assert_eq!(g.right().len(), side);
            assert_eq!(g.edge_count(), edges);
            let classes = color_classes(&g).unwrap();
            assert_eq!(classes.len(), colors);
            let per = binomial((2 * k).into(), k.into());
            assert!(classes.values().all(|c| per == (c.len() as u64).into()));
        }
        assert!(gen_gnk::<Rational>(3, 2).is_err());
    }

    #[test]
    fn gnk_edge_distribution_entropies() {
        let d = edge_distribution(&gen_gnk::<Rational>(4, 1).unwrap()).unwrap();
        assert_eq!(d.len(), 12);
        assert!((entropy(&d, &["A"]).unwrap() - 6f64.log2()).abs() < TAU);
        assert!((cond_entropy(&d, &["A"], &["X"]).unwrap() - 3f64.log2()).abs() < TAU);
        assert!(cond_entropy(&d, &["A"], &["X", "Y"]).unwrap().abs() < TAU);
    }

    #[test]
    fn edge_distribution_edge_cases() {
        let g = complete_bipartite::<Rational>(1, 1).recolor(|_| "a".into());
        let d = edge_distribution(&g).unwrap();
        assert!(entropy(&d, &["X", "Y", "A"]).unwrap().abs() < TAU);
        let empty = ColoredBipartiteGraph::<Rational>::new(vec![], vec![], vec![]).unwrap();
        assert_eq!(edge_distribution(&empty), Err(Error::EmptyGraph));
        assert!(matches!(
            edge_distribution(&complete_bipartite::<Rational>(1, 1)),
            Err(Error::PreconditionFailed(_))
        ));
    }

    #[test]
    fn graph_validation() {
        let e = |x: &str, y: &str, w: Option<Rational>| Edge {
            x: x.into(),
            y: y.into(),
            color: None,
            weight: w,
        };
        let l = vec!["x".to_string()];
        let r = vec!["y".to_string(), "z".to_string()];
        assert!(ColoredBipartiteGraph::new(
            l.clone(),
            r.clone(),
            vec![e("x", "y", None), e("x", "y", None)]
        )
        .is_err());
        assert!(ColoredBipartiteGraph::new(l.clone(), r.clone(), vec![e("q", "y", None)]).is_err());
        let half = Some(Rational::from_ratio(1, 2));
        assert!(
            ColoredBipartiteGraph::new(l.clone(), r.clone(), vec![e("x", "y", half.clone())])
                .is_err()
        );
        assert!(ColoredBipartiteGraph::new(
            l.clone(),
            r.clone(),
            vec![e("x", "y", half.clone()), e("x", "z", None)]
        )
        .is_err());
        assert!(ColoredBipartiteGraph::new(
            l,
            r,
            vec![e("x", "y", half.clone()), e("x", "z", half)]
        )
        .is_ok());
    }

    #[test]
    fn graph_json_round_trip() {
        let g: Graph = gen_gnk(4, 1).unwrap();
        let text = g.to_json();
        let back: Graph = load_graph(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), text);
        let weighted = r#"{"left":["x1"],"right":["y1","y2"],
            "edges":[{"x":"x1","y":"y1","color":"a","w":"1/3"},{"x":"x1","y":"y2","color":"b","w":"2/3"}]}"#;
        let g: Graph = load_graph(weighted).unwrap();
        let d = edge_distribution(&g).unwrap();
        assert_eq!(
            d.prob(&["x1".into(), "y2".into(), "b".into()]),
            Rational::from_ratio(2, 3)
        );
        assert!(load_graph::<Rational>(r#"{"left":[],"right":[],"edges":[],"extra":1}"#).is_err());
    }

    #[test]
    fn property_star_cases() {
        let g: Graph = gen_gnk(4, 1).unwrap();
        assert!(check_property_star(&g).unwrap().holds);
        assert!(
            check_property_star(&gen_gnk::<Rational>(6, 2).unwrap())
                .unwrap()
                .holds
        );
        let mono = k22_colored(["a", "a", "a", "a"]);
        let v = check_property_star(&mono).unwrap();
        assert!(!v.holds);
        assert!(v.witness.is_some());
    }

    #[test]
    fn property_doublestar_cases() {
        assert!(
            check_property_doublestar(&gen_gnk::<Rational>(4, 1).unwrap())
                .unwrap()
                .holds
        );
        // edges in order (x1,y1) (x1,y2) (x2,y1) (x2,y2)
        let g = k22_colored(["b", "a", "a", "c"]);
        let v = check_property_doublestar(&g).unwrap();
        assert!(!v.holds);
        let corner = v.witness.unwrap().get("corner").unwrap().to_string();
        assert!(corner == "x1,y1,b" || corner == "x2,y2,c");
        let rainbow = k22_colored(["a", "b", "c", "d"]);
        assert!(check_property_doublestar(&rainbow).unwrap().holds);
        assert!(check_property_star(&rainbow).unwrap().holds);
    }

    #[test]
    fn star_implies_doublestar_on_random_graphs() {
        for seed in 0..300 {
            let g: Graph = sample_random_graph(3, 3, 9, 3, seed);
            if check_property_star(&g).unwrap().holds {
                assert!(check_property_doublestar(&g).unwrap().holds, "seed {seed}");
            }
        }
    }
}
