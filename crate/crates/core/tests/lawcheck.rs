mod common;

use std::collections::BTreeSet;

use common::{table, Table, AXY};
use entroplab::catalog::sample_cond2c;
use entroplab::lawcheck::{
    audit_lemma1, audit_lemma3, check_ci_given, check_functional, check_independence,
    check_support_saturation, check_unique_common_value,
};
use entroplab::probkit::mutual_info;
use entroplab::{Distribution, Error, TAU};
use proptest::prelude::*;

/// Positive-mass cells of an `(A, X, Y)` table.
fn support(t: &Table) -> BTreeSet<(String, String, String)> {
    t.cells
        .iter()
        .zip(&t.weights)
        .filter(|(_, &w)| w > 0)
        .map(|(c, _)| (c[0].clone(), c[1].clone(), c[2].clone()))
        .collect()
}

fn naive_functional(s: &BTreeSet<(String, String, String)>) -> bool {
    s.iter()
        .all(|(a, x, y)| s.iter().all(|(a2, x2, y2)| x != x2 || y != y2 || a == a2))
}

fn naive_saturation(s: &BTreeSet<(String, String, String)>) -> bool {
    s.iter().all(|(a, x, _)| {
        s.iter()
            .filter(|(a2, _, _)| a2 == a)
            .all(|(_, _, y)| s.contains(&(a.clone(), x.clone(), y.clone())))
    })
}

fn naive_unique(s: &BTreeSet<(String, String, String)>) -> bool {
    let ax: BTreeSet<_> = s.iter().map(|(a, x, _)| (a, x)).collect();
    let ay: BTreeSet<_> = s.iter().map(|(a, _, y)| (a, y)).collect();
    let aa: BTreeSet<_> = s.iter().map(|(a, _, _)| a).collect();
    for a in &aa {
        for a2 in &aa {
            if a >= a2 {
                continue;
            }
            let xs = ax
                .iter()
                .filter(|(b, _)| b == a)
                .any(|(_, x)| ax.contains(&(*a2, *x)));
            let ys = ay
                .iter()
                .filter(|(b, _)| b == a)
                .any(|(_, y)| ay.contains(&(*a2, *y)));
            if xs && ys {
                return false;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn support_checkers_match_naive_oracles(t in table(AXY, 3, 3)) {
        let d = t.dist();
        let s = support(&t);
        prop_assert_eq!(check_functional(&d, &["A"], &["X"], &["Y"]).unwrap().holds, naive_functional(&s));
        prop_assert_eq!(check_support_saturation(&d).unwrap().holds, naive_saturation(&s));
        prop_assert_eq!(check_unique_common_value(&d).unwrap().holds, naive_unique(&s));
    }

    #[test]
    fn support_checkers_ignore_masses(t in table(AXY, 3, 4), salt in 1u64..50) {
        let d = t.dist();
        let e = t.reweighted(|i, w| (w * salt + i as u64 * 7) % 11).dist();
        for (u, v) in [
            (check_functional(&d, &["A"], &["X"], &["Y"]).unwrap(), check_functional(&e, &["A"], &["X"], &["Y"]).unwrap()),
            (check_support_saturation(&d).unwrap(), check_support_saturation(&e).unwrap()),
            (check_unique_common_value(&d).unwrap(), check_unique_common_value(&e).unwrap()),
        ] {
            prop_assert_eq!(u.holds, v.holds);
        }
    }

    #[test]
    fn lemma1_implications_hold(t in table(AXY, 3, 3)) {
        let audit = audit_lemma1(&t.dist()).unwrap();
        prop_assert!(audit.consistent(), "{:?}", audit.violations);
    }

    #[test]
    fn independence_verdicts_agree_with_measures(t in table(AXY, 3, 3)) {
        let d = t.dist();
        let ind = check_independence(&d, &["X"], &["Y"]).unwrap();
        let mi = mutual_info(&d, &["X"], &["Y"], &[]).unwrap();
        prop_assert_eq!(ind.holds, mi.abs() < TAU);
        let ci = check_ci_given(&d, &["X"], &["Y"], &["A"]).unwrap();
        let cmi = mutual_info(&d, &["X"], &["Y"], &["A"]).unwrap();
        prop_assert_eq!(ci.holds, cmi.abs() < TAU);
        if !ind.holds {
            prop_assert!(ind.witness.is_some());
        }
    }

    #[test]
    fn conditioning_preserves_unique_common_value(seed in any::<u64>(), sizes in proptest::array::uniform4(1usize..=4)) {
        let d: Distribution = sample_cond2c(seed, sizes).unwrap();
        prop_assert!(check_unique_common_value(&d).unwrap().holds);
        let audit = audit_lemma3(&d, 30, seed).unwrap();
        prop_assert!(audit.preserved(), "{:?}", audit.violations);
    }
}

#[test]
fn lemma3_refuses_distributions_outside_its_hypothesis() {
    let d: Distribution = entroplab::catalog::gen_distinct_pairs(3).unwrap();
    assert!(matches!(
        audit_lemma3(&d, 10, 1),
        Err(Error::PreconditionFailed(_))
    ));
}

#[test]
fn failed_verdicts_carry_witnesses() {
    let d: Distribution = entroplab::catalog::gen_distinct_pairs(3).unwrap();
    let v = check_unique_common_value(&d).unwrap();
    assert!(!v.holds);
    let w = v.witness.unwrap();
    for name in ["a", "a2", "x", "y"] {
        assert!(w.get(name).is_some());
    }
    let v = check_support_saturation(&d).unwrap();
    assert!(!v.holds && v.witness.is_some());
}
