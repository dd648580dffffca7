use netrecon_core::model::{apply, diff, enabled};
use netrecon_core::{Reaction, RegulatoryStructure, SpeciesTable};
use proptest::prelude::*;

fn table(maxima: &[i32]) -> SpeciesTable {
    SpeciesTable::new(maxima.iter().enumerate().map(|(i, &m)| (format!("s{i}"), m))).unwrap()
}

/// Capacities, a state within them, and a reaction respecting them.
fn setup() -> impl Strategy<Value = (Vec<i32>, Vec<i32>, Vec<i32>)> {
    prop::collection::vec(1..=3i32, 1..=5).prop_flat_map(|maxima| {
        let x = maxima.iter().map(|&m| 0..=m).collect::<Vec<_>>();
        let r = maxima.iter().map(|&m| -m..=m).collect::<Vec<_>>();
        (Just(maxima.clone()), x, r)
    })
}

proptest! {
    #[test]
    fn apply_adds_exactly_the_reaction((maxima, x, mut r) in setup()) {
        if r.iter().all(|&v| v >= 0) {
            r[0] = -1;
        }
        let sp = table(&maxima);
        let rx = Reaction::new(r.clone(), &sp).unwrap();
        match apply(&rx, &x, &sp) {
            Ok(y) => {
                prop_assert!(enabled(&rx, &x, &sp).unwrap());
                prop_assert_eq!(diff(&x, &y).unwrap(), r);
                prop_assert!(sp.admits(&y));
            }
            Err(_) => prop_assert!(!enabled(&rx, &x, &sp).unwrap()),
        }
    }

    #[test]
    fn raising_capacity_keeps_reactions_enabled((maxima, x, mut r) in setup(), extra in 0..3i32) {
        if r.iter().all(|&v| v >= 0) {
            r[0] = -1;
        }
        let small = table(&maxima);
        let big = table(&maxima.iter().map(|m| m + extra).collect::<Vec<_>>());
        let rx = Reaction::new(r.clone(), &small).unwrap();
        let ry = Reaction::new(r, &big).unwrap();
        if enabled(&rx, &x, &small).unwrap() {
            prop_assert!(enabled(&ry, &x, &big).unwrap());
        }
    }

    #[test]
    fn nonnegative_vectors_are_rejected(maxima in prop::collection::vec(1..=3i32, 1..=4)) {
        let sp = table(&maxima);
        prop_assert!(Reaction::new(vec![0; maxima.len()], &sp).is_err());
        prop_assert!(Reaction::new(maxima.clone(), &sp).is_err());
        let mut too_big = vec![0; maxima.len()];
        too_big[0] = -maxima[0] - 1;
        prop_assert!(Reaction::new(too_big, &sp).is_err());
    }

    #[test]
    fn slower_relation_is_a_closed_strict_order(
        n in 1usize..7,
        raw in prop::collection::vec((0usize..7, 0usize..7), 0..12),
    ) {
        let sp = table(&vec![1; n]);
        let reactions: Vec<Reaction> = (0..n)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = -1;
                Reaction::new(v, &sp).unwrap()
            })
            .collect();
        // orient every pair forwards so the input is acyclic
        let pairs: Vec<(usize, usize)> = raw
            .into_iter()
            .filter(|&(a, b)| a < n && b < n && a != b)
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        let rs = RegulatoryStructure::new(reactions, pairs.iter().copied()).unwrap();
        for &(a, b) in rs.slower() {
            prop_assert!(a != b);
            prop_assert!(!rs.is_slower(b, a));
            for &(c, d) in rs.slower() {
                if b == c {
                    prop_assert!(rs.is_slower(a, d));
                }
            }
        }
        for &(a, b) in &pairs {
            prop_assert!(rs.is_slower(a, b));
        }
        // the cover generates the same closure
        let again = RegulatoryStructure::new(rs.reactions().to_vec(), rs.cover()).unwrap();
        prop_assert_eq!(again.slower(), rs.slower());
    }
}

#[test]
fn cyclic_orders_are_rejected() {
    let sp = table(&[1, 1]);
    let rs = vec![
        Reaction::new(vec![-1, 0], &sp).unwrap(),
        Reaction::new(vec![0, -1], &sp).unwrap(),
    ];
    assert!(RegulatoryStructure::new(rs.clone(), [(0, 1), (1, 0)]).is_err());
    assert!(RegulatoryStructure::new(rs, [(0, 0)]).is_err());
}
