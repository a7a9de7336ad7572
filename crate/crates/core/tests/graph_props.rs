use chaincliq::graph::{edge_difference, is_clique, EdgeSet, Graph};
use proptest::prelude::*;

const N: usize = 7;

fn edge_set(n: usize) -> impl Strategy<Value = EdgeSet> {
    let slots = n * (n - 1) / 2;
    prop::collection::vec(any::<bool>(), slots).prop_map(move |bits| {
        let mut pairs = Vec::new();
        let mut k = 0;
        for u in 1..=n {
            for v in u + 1..=n {
                if bits[k] {
                    pairs.push((u, v));
                }
                k += 1;
            }
        }
        EdgeSet::from_pairs(n, pairs).unwrap()
    })
}

/// A clique given by a vertex subset of size >= 2.
fn clique(n: usize) -> impl Strategy<Value = EdgeSet> {
    prop::sample::subsequence((1..=n).collect::<Vec<_>>(), 2..=n).prop_map(move |vs| {
        let mut pairs = Vec::new();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                pairs.push((u, v));
            }
        }
        EdgeSet::from_pairs(n, pairs).unwrap()
    })
}

/// Two cliques of size >= 2 sharing at most one vertex, hence edge-disjoint.
fn edge_disjoint_cliques(n: usize) -> impl Strategy<Value = (EdgeSet, EdgeSet)> {
    let on = move |vs: &[usize]| {
        let mut pairs = Vec::new();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                pairs.push((u, v));
            }
        }
        EdgeSet::from_pairs(n, pairs).unwrap()
    };
    (
        Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
        2..n,
        any::<bool>(),
    )
        .prop_flat_map(move |(order, k1, share)| {
            let start = if share { k1 - 1 } else { k1 };
            (Just(order), Just(k1), Just(start), 2..=(n - start).max(2))
        })
        .prop_filter("second clique must fit", move |(_, _, start, k2)| {
            start + k2 <= n
        })
        .prop_map(move |(order, k1, start, k2)| (on(&order[..k1]), on(&order[start..start + k2])))
}

/// Direct definition: the set equals all pairs within its support.
fn clique_by_enumeration(s: &EdgeSet) -> Option<Vec<usize>> {
    let support: Vec<usize> = (1..=s.n())
        .filter(|&v| s.iter().any(|e| e.u() == v || e.v() == v))
        .collect();
    for (i, &u) in support.iter().enumerate() {
        for &v in &support[i + 1..] {
            if !s.contains_pair(u, v) {
                return None;
            }
        }
    }
    Some(support)
}

proptest! {
    #[test]
    fn is_clique_matches_enumeration(s in edge_set(N)) {
        prop_assert_eq!(is_clique(&s).map(|v| v.to_vec()), clique_by_enumeration(&s));
    }

    #[test]
    fn clique_intersection_is_clique(a in clique(N), b in clique(N)) {
        let both = a.intersection(&b);
        if !both.is_empty() {
            prop_assert!(is_clique(&both).is_some());
        }
    }

    #[test]
    fn disjoint_union_of_cliques_is_not_a_clique((a, b) in edge_disjoint_cliques(N)) {
        prop_assert!(a.is_disjoint(&b));
        prop_assert!(is_clique(&a.union(&b)).is_none());
    }

    #[test]
    fn difference_partitions_the_supergraph(a in edge_set(N), extra in edge_set(N)) {
        let sub = Graph::from(a.clone());
        let sup = Graph::from(a.union(&extra));
        let diff = edge_difference(&sup, &sub).unwrap();
        prop_assert!(diff.is_disjoint(sub.edges()));
        prop_assert_eq!(&diff.union(sub.edges()), sup.edges());
    }
}
