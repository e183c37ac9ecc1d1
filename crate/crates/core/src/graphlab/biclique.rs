use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{
    bcc_color_bound, bcc_entropy_bound, check_property_star, edge_distribution,
    ColoredBipartiteGraph,
};
use crate::error::{Error, Result};
use crate::ineqlab::eq13_gap;
use crate::lawcheck::{check_support_saturation, Verdict, Witness};
use crate::probkit::{cond_entropy, entropy, Event, JointDistribution};
use crate::scalar::Exact;
use crate::TAU;

pub const DEFAULT_BCC_LIMIT: usize = 20;

/// Cap on the number of maximal bicliques enumerated.
const MAX_BICLIQUES: usize = 100_000;

/// Complete bipartite subgraph `S x T`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Biclique {
    pub left: BTreeSet<String>,
    pub right: BTreeSet<String>,
}

impl Biclique {
    pub fn contains(&self, x: &str, y: &str) -> bool {
        self.left.contains(x) && self.right.contains(y)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BicliqueCover {
    pub bicliques: Vec<Biclique>,
}

impl BicliqueCover {
    pub fn len(&self) -> usize {
        self.bicliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bicliques.is_empty()
    }
}

/// Each member is a non-empty complete subgraph of `g` and together they contain every edge.
pub fn verify_cover<P: Exact>(
    g: &ColoredBipartiteGraph<P>,
    cover: &BicliqueCover,
) -> Result<Verdict> {
    const ID: &str = "biclique-cover";
    let w = |pairs: &[(&str, String)]| {
        Witness(
            pairs
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        )
    };
    for (i, b) in cover.bicliques.iter().enumerate() {
        if b.left.is_empty() || b.right.is_empty() {
            return Ok(Verdict::fail(
                ID,
                w(&[("biclique", i.to_string())]),
                "empty side",
            ));
        }
        for x in &b.left {
            for y in &b.right {
                if !g.has_edge(x, y) {
                    return Ok(Verdict::fail(
                        ID,
                        w(&[
                            ("biclique", i.to_string()),
                            ("x", x.clone()),
                            ("y", y.clone()),
                        ]),
                        "biclique contains a non-edge",
                    ));
                }
            }
        }
    }
    for e in g.edges() {
        if !cover.bicliques.iter().any(|b| b.contains(&e.x, &e.y)) {
            return Ok(Verdict::fail(
                ID,
                w(&[("x", e.x.clone()), ("y", e.y.clone())]),
                "edge not covered",
            ));
        }
    }
    Ok(Verdict::pass(
        ID,
        format!("{} bicliques cover all edges", cover.len()),
    ))
}

fn require_cover<P: Exact>(g: &ColoredBipartiteGraph<P>, cover: &BicliqueCover) -> Result<()> {
    let v = verify_cover(g, cover)?;
    if v.holds {
        Ok(())
    } else {
        let w = v.witness.map(|w| w.to_string()).unwrap_or_default();
        Err(Error::NotACover(format!("{}: {w}", v.detail)))
    }
}

/// Maximal bicliques as `(left indices, right indices)`, sorted.
///
/// The right sides of maximal bicliques are exactly the non-empty intersections
/// of left neighborhoods, closed under intersection.
fn maximal_index_bicliques<P: Exact>(
    g: &ColoredBipartiteGraph<P>,
) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    let mut nbrs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); g.left().len()];
    for i in 0..g.edge_count() {
        let (x, y) = g.ends(i);
        nbrs[x].insert(y);
    }
    let mut closed: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for n in nbrs.iter().filter(|n| !n.is_empty()) {
        let mut fresh: Vec<BTreeSet<usize>> = closed
            .iter()
            .map(|t| t.intersection(n).copied().collect::<BTreeSet<_>>())
            .filter(|t| !t.is_empty())
            .collect();
        fresh.push(n.clone());
        closed.extend(fresh);
        if closed.len() > MAX_BICLIQUES {
            return Err(Error::TooLarge {
                size: closed.len(),
                limit: MAX_BICLIQUES,
            });
        }
    }
    Ok(closed
        .into_iter()
        .map(|t| {
            let s = (0..nbrs.len()).filter(|&x| t.is_subset(&nbrs[x])).collect();
            (s, t.into_iter().collect())
        })
        .collect())
}

/// All maximal bicliques of `g`.
pub fn maximal_bicliques<P: Exact>(g: &ColoredBipartiteGraph<P>) -> Result<Vec<Biclique>> {
    Ok(maximal_index_bicliques(g)?
        .into_iter()
        .map(|(s, t)| Biclique {
            left: s.into_iter().map(|x| g.left()[x].clone()).collect(),
            right: t.into_iter().map(|y| g.right()[y].clone()).collect(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BccSolution {
    pub size: usize,
    pub cover: BicliqueCover,
    pub maximal_bicliques: usize,
    /// Lower bound used to stop the search early.
    pub lower_bound: usize,
}

struct CoverSearch {
    masks: Vec<u64>,
    /// For each edge, the masks that contain it.
    by_edge: Vec<Vec<usize>>,
    widest: u32,
    floor: usize,
    best: Vec<usize>,
    chosen: Vec<usize>,
}

impl CoverSearch {
    fn run(&mut self, uncovered: u64) {
        if self.best.len() <= self.floor {
            return;
        }
        if uncovered == 0 {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        let rest = uncovered.count_ones().div_ceil(self.widest) as usize;
        if self.chosen.len() + rest >= self.best.len() {
            return;
        }
        let mut pick = None;
        for e in (0..64).filter(|e| uncovered >> e & 1 == 1) {
            let n = self.by_edge[e].len();
            if pick.is_none_or(|(_, best_n)| n < best_n) {
                pick = Some((e, n));
            }
        }
        let (e, _) = pick.expect("uncovered is non-empty");
        let mut options = self.by_edge[e].clone();
        options.sort_by_key(|&b| std::cmp::Reverse((self.masks[b] & uncovered).count_ones()));
        for b in options {
            self.chosen.push(b);
            self.run(uncovered & !self.masks[b]);
            self.chosen.pop();
        }
    }
}

/// Minimum biclique cover by branch and bound over maximal bicliques.
pub fn bcc_exact<P: Exact>(g: &ColoredBipartiteGraph<P>, limit: usize) -> Result<BccSolution> {
    let m = g.edge_count();
    if m > limit || m > 64 {
        return Err(Error::TooLarge {
            size: m,
            limit: limit.min(64),
        });
    }
    let maximal = maximal_index_bicliques(g)?;
    let masks: Vec<u64> = maximal
        .iter()
        .map(|(s, t)| {
            let mut mask = 0u64;
            for &x in s {
                for &y in t {
                    mask |= 1 << g.edge_at(x, y).expect("biclique of edges");
                }
            }
            mask
        })
        .collect();
    let mut by_edge = vec![Vec::new(); m];
    for (b, &mask) in masks.iter().enumerate() {
        for (e, list) in by_edge.iter_mut().enumerate() {
            if mask >> e & 1 == 1 {
                list.push(b);
            }
        }
    }
    let floor = if m == 0 {
        0
    } else {
        let color = bcc_color_bound(g).map(|b| b.integer).unwrap_or(1);
        let ent = bcc_entropy_bound(g).map(|b| b.integer).unwrap_or(1);
        color.max(ent) as usize
    };
    let mut search = CoverSearch {
        widest: masks.iter().map(|m| m.count_ones()).max().unwrap_or(1),
        best: (0..masks.len()).collect(),
        masks,
        by_edge,
        floor,
        chosen: Vec::new(),
    };
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    // the full list of maximal bicliques is a cover and seeds the incumbent
    search.run(full);
    let to_biclique = |b: usize| {
        let (s, t) = &maximal[b];
        Biclique {
            left: s.iter().map(|&x| g.left()[x].clone()).collect(),
            right: t.iter().map(|&y| g.right()[y].clone()).collect(),
        }
    };
    let mut bicliques: Vec<Biclique> = search.best.iter().map(|&b| to_biclique(b)).collect();
    bicliques.sort();
    Ok(BccSolution {
        size: bicliques.len(),
        cover: BicliqueCover { bicliques },
        maximal_bicliques: maximal.len(),
        lower_bound: floor,
    })
}

/// Theorem-1 data for the edges assigned to one biclique.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliqueRestriction {
    pub index: String,
    pub mass: String,
    pub support_saturation: bool,
    pub eq13_gap: f64,
}

/// The edge distribution extended by the index `Z` of a covering biclique.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZExtension<P> {
    #[serde(skip)]
    pub distribution: JointDistribution<P>,
    pub t: usize,
    pub h_z: f64,
    pub h_a_given_xz: f64,
    pub h_a_given_yz: f64,
    pub h_a_given_z: f64,
    /// `H(A|X,Z) + H(A|Y,Z) <= H(A|Z)` up to `TAU`
    pub inequality_holds: bool,
    pub restrictions: Vec<CliqueRestriction>,
    /// `(H(A|X) + H(A|Y) - H(A)) / 2`
    pub entropy_exponent: f64,
    /// `2^entropy_exponent`
    pub t_lower_bound: f64,
    /// `log2 t >= H(Z) >= entropy_exponent` up to `TAU`
    pub t_bound_holds: bool,
    /// `H(X,Y) - H(A)`, a valid lower bound on `H(Z)` under property (*).
    pub dual_exponent: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_holds: Option<bool>,
}

fn z_symbol(i: usize) -> String {
    format!("C{}", i + 1)
}

/// Splits every edge atom uniformly over the bicliques that contain it.
/// Output variables are `(X, Y, A, Z)`.
pub fn extend_with_cover_index<P: Exact>(
    g: &ColoredBipartiteGraph<P>,
    cover: &BicliqueCover,
) -> Result<ZExtension<P>> {
    require_cover(g, cover)?;
    let d = edge_distribution(g)?;
    let mut atoms = Vec::new();
    for (values, p) in d.iter() {
        let owners: Vec<usize> = (0..cover.len())
            .filter(|&i| cover.bicliques[i].contains(&values[0], &values[1]))
            .collect();
        let share = p.clone() * P::from_ratio(1, owners.len() as u64);
        for i in owners {
            let mut v = values.to_vec();
            v.push(z_symbol(i));
            atoms.push((v, share.clone()));
        }
    }
    let vars = ["X", "Y", "A", "Z"].map(String::from).to_vec();
    let ext = JointDistribution::new(vars, atoms)?;

    let h_a_given_xz = cond_entropy(&ext, &["A"], &["X", "Z"])?;
    let h_a_given_yz = cond_entropy(&ext, &["A"], &["Y", "Z"])?;
    let h_a_given_z = cond_entropy(&ext, &["A"], &["Z"])?;
    let h_z = entropy(&ext, &["Z"])?;

    let mut restrictions = Vec::new();
    let z_mass = ext.marginal_table(&["Z"])?;
    for (z, mass) in &z_mass {
        let within = ext
            .condition(&Event::equals("Z", &z[0]))?
            .marginal(&["A", "X", "Y"])?;
        restrictions.push(CliqueRestriction {
            index: z[0].clone(),
            mass: mass.to_text(),
            support_saturation: check_support_saturation(&within)?.holds,
            eq13_gap: eq13_gap(&within)?.gap,
        });
    }

    let entropy_exponent = (cond_entropy(&d, &["A"], &["X"])? + cond_entropy(&d, &["A"], &["Y"])?
        - entropy(&d, &["A"])?)
        / 2.0;
    let t = cover.len();
    let dual_exponent = entropy(&d, &["X", "Y"])? - entropy(&d, &["A"])?;
    let star = check_property_star(g)?.holds;
    Ok(ZExtension {
        distribution: ext,
        t,
        h_z,
        h_a_given_xz,
        h_a_given_yz,
        h_a_given_z,
        inequality_holds: h_a_given_xz + h_a_given_yz <= h_a_given_z + TAU,
        restrictions,
        entropy_exponent,
        t_lower_bound: entropy_exponent.exp2(),
        t_bound_holds: (t as f64).log2() >= h_z - TAU && h_z >= entropy_exponent - TAU,
        dual_exponent,
        dual_holds: star.then_some(h_z >= dual_exponent - TAU),
    })
}

/// Greedy cover, used in tests as an upper-bound oracle.
#[cfg(test)]
fn greedy_cover_size<P: Exact>(g: &ColoredBipartiteGraph<P>) -> usize {
    let maximal = maximal_index_bicliques(g).unwrap();
    let mut uncovered: BTreeSet<(usize, usize)> = (0..g.edge_count()).map(|i| g.ends(i)).collect();
    let mut n = 0;
    while !uncovered.is_empty() {
        let (s, t) = maximal
            .iter()
            .max_by_key(|(s, t)| {
                s.iter()
                    .flat_map(|x| t.iter().map(move |y| (*x, *y)))
                    .filter(|c| uncovered.contains(c))
                    .count()
            })
            .unwrap();
        for x in s {
            for y in t {
                uncovered.remove(&(*x, *y));
            }
        }
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphlab::{
        bcc_dual_entropy_bound, check_property_doublestar, complete_bipartite, gen_gnk,
        sample_random_graph,
    };
    use crate::{Graph, Rational};

    fn set(v: &[&str]) -> BTreeSet<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// Exhaustive minimum over subsets of maximal bicliques.
    fn brute_bcc(g: &Graph) -> usize {
        let maximal = maximal_bicliques(g).unwrap();
        let n = maximal.len();
        assert!(n <= 20);
        (0u32..1 << n)
            .filter(|mask| {
                let cover = BicliqueCover {
                    bicliques: (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| maximal[i].clone())
                        .collect(),
                };
                verify_cover(g, &cover).unwrap().holds
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap_or(0)
    }

    #[test]
    fn single_biclique_graph() {
        let g: Graph = complete_bipartite(2, 3);
        let sol = bcc_exact(&g, 20).unwrap();
        assert_eq!(sol.size, 1);
        assert_eq!(sol.maximal_bicliques, 1);
    }

    #[test]
    fn g41_exact_is_four() {
        let g: Graph = gen_gnk(4, 1).unwrap();
        let sol = bcc_exact(&g, 20).unwrap();
        assert_eq!(sol.size, brute_bcc(&g));
        assert_eq!(sol.size, 4);
        assert!(verify_cover(&g, &sol.cover).unwrap().holds);
    }

    #[test]
    fn maximal_bicliques_of_path() {
        // x1-y1, x1-y2, x2-y2
        let g = Graph::new(
            set(&["x1", "x2"]).into_iter().collect(),
            set(&["y1", "y2"]).into_iter().collect(),
            [("x1", "y1"), ("x1", "y2"), ("x2", "y2")]
                .iter()
                .map(|(x, y)| crate::graphlab::Edge {
                    x: x.to_string(),
                    y: y.to_string(),
                    color: None,
                    weight: None,
                })
                .collect(),
        )
        .unwrap();
        let m = maximal_bicliques(&g).unwrap();
        assert_eq!(
            m,
            vec![
                Biclique {
                    left: set(&["x1"]),
                    right: set(&["y1", "y2"])
                },
                Biclique {
                    left: set(&["x1", "x2"]),
                    right: set(&["y2"])
                },
            ]
        );
        assert_eq!(bcc_exact(&g, 20).unwrap().size, 2);
    }

    #[test]
    fn exact_matches_brute_force_and_sandwich() {
        for seed in 0..60 {
            let g: Graph = sample_random_graph(4, 4, 12, 3, seed);
            if g.edge_count() == 0 {
                continue;
            }
            let sol = bcc_exact(&g, 20).unwrap();
            assert_eq!(sol.size, brute_bcc(&g), "seed {seed}");
            assert!(sol.size <= greedy_cover_size(&g));
            assert!(sol.size <= sol.maximal_bicliques);
            if let Ok(b) = bcc_color_bound(&g) {
                assert!(b.integer as usize <= sol.size);
            }
            if let Ok(b) = bcc_entropy_bound(&g) {
                assert!(b.integer as usize <= sol.size, "seed {seed}");
            }
            if let Ok(b) = bcc_dual_entropy_bound(&g) {
                assert!(b.integer as usize <= sol.size);
            }
        }
    }

    #[test]
    fn cover_verification() {
        let g: Graph = complete_bipartite(2, 2);
        let whole = Biclique {
            left: set(&["x1", "x2"]),
            right: set(&["y1", "y2"]),
        };
        assert!(
            verify_cover(
                &g,
                &BicliqueCover {
                    bicliques: vec![whole]
                }
            )
            .unwrap()
            .holds
        );
        let partial = Biclique {
            left: set(&["x1"]),
            right: set(&["y1", "y2"]),
        };
        let v = verify_cover(
            &g,
            &BicliqueCover {
                bicliques: vec![partial],
            },
        )
        .unwrap();
        assert_eq!(v.detail, "edge not covered");
        let g2 = Graph::new(vec!["x1".into()], vec!["y1".into(), "y2".into()], vec![]).unwrap();
        let v = verify_cover(
            &g2,
            &BicliqueCover {
                bicliques: vec![Biclique {
                    left: set(&["x1"]),
                    right: set(&["y1"]),
                }],
            },
        )
        .unwrap();
        assert_eq!(v.detail, "biclique contains a non-edge");
        assert!(bcc_exact(&complete_bipartite::<Rational>(5, 5), 20).is_err());
    }

    #[test]
    fn z_extension_on_g41() {
        let g: Graph = gen_gnk(4, 1).unwrap();
        let sol = bcc_exact(&g, 20).unwrap();
        let z = extend_with_cover_index(&g, &sol.cover).unwrap();
        assert!(z.inequality_holds);
        assert!(z.t_bound_holds);
        assert_eq!(z.dual_holds, Some(true));
        assert!(z.h_z <= 2.0 + TAU);
        assert!(z
            .restrictions
            .iter()
            .all(|r| r.support_saturation && r.eq13_gap >= -TAU));
        let d = edge_distribution(&g).unwrap();
        assert_eq!(z.distribution.marginal(&["X", "Y", "A"]).unwrap(), d);
    }

    #[test]
    fn z_extension_single_clique() {
        let g = complete_bipartite::<Rational>(2, 2).recolor(|_| "a".into());
        let cover = BicliqueCover {
            bicliques: maximal_bicliques(&g).unwrap(),
        };
        let z = extend_with_cover_index(&g, &cover).unwrap();
        assert!(z.h_z.abs() < TAU);
        assert!(z.inequality_holds);
        assert_eq!(z.dual_holds, None);
        assert!(check_property_doublestar(&g).unwrap().holds);
        let bad = BicliqueCover::default();
        assert!(matches!(
            extend_with_cover_index(&g, &bad),
            Err(Error::NotACover(_))
        ));
    }
}
