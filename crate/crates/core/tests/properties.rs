use proptest::prelude::*;

use ca_forge::bounds::chromatic_estimate;
use ca_forge::combin::ColumnSetCursor;
use ca_forge::coverage::{uncovered_list, uncovered_sequential};
use ca_forge::groups::{orbit_count, OrbitTable, SymbolGroup};
use ca_forge::rng::{stream, Purpose};
use ca_forge::stage2::{build_incompat_graph, color_cover, density_cover, greedy_cover, naive_cover};
use ca_forge::{Array, GroupKind, Interaction, Parameters};

fn groups() -> impl Strategy<Value = GroupKind> {
    prop_oneof![Just(GroupKind::Trivial), Just(GroupKind::Cyclic), Just(GroupKind::Frobenius)]
}

fn array_strategy(max_n: usize, k: usize, v: usize) -> impl Strategy<Value = Array> {
    prop::collection::vec(prop::collection::vec(0..v as u8, k), 0..max_n)
        .prop_map(move |rows| Array::from_rows(k, v, &rows).unwrap())
}

/// Small instances: (t, k, v, array).
fn instance() -> impl Strategy<Value = (usize, usize, usize, Array)> {
    (2usize..=3, 0usize..=4, 2usize..=3).prop_flat_map(|(t, extra, v)| {
        let k = t + extra;
        array_strategy(14, k, v).prop_map(move |a| (t, k, v, a))
    })
}

/// Canonical uncovered items of a random partial array.
fn uncovered_items(t: usize, k: usize, v: usize, a: &Array, g: GroupKind) -> Vec<Interaction> {
    uncovered_list(a, &Parameters::new(t, k, v).unwrap(), g, u64::MAX).unwrap().uncovered
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn uncovered_plus_covered_is_total((t, k, v, a) in instance(), g in groups()) {
        let p = Parameters::new(t, k, v).unwrap();
        let grp = SymbolGroup::new(g, v).unwrap();
        let report = uncovered_list(&a, &p, g, u64::MAX).unwrap();
        let mut covered = 0u64;
        let mut cursor = ColumnSetCursor::new(k, t);
        while let Some(cols) = cursor.next() {
            let mut seen = std::collections::HashSet::new();
            for r in 0..a.rows() {
                let sym: Vec<u8> = cols.iter().map(|&c| a.get(r, c)).collect();
                let (canon, short) = grp.canonicalize(&sym);
                if !short {
                    seen.insert(canon);
                }
            }
            covered += seen.len() as u64;
        }
        let (full, _) = orbit_count(&p, g).unwrap();
        prop_assert_eq!(report.uncovered_count + covered, u64::try_from(full).unwrap());
    }

    #[test]
    fn row_permutations_do_not_change_the_list((t, k, v, a) in instance(), g in groups(), shift in 0usize..14) {
        let mut rows = a.to_rows();
        if !rows.is_empty() {
            let s = shift % rows.len();
            rows.rotate_left(s);
        }
        rows.reverse();
        let b = Array::from_rows(k, v, &rows).unwrap();
        prop_assert_eq!(uncovered_items(t, k, v, &a, g), uncovered_items(t, k, v, &b, g));
    }

    #[test]
    fn sequential_and_default_scans_agree((t, k, v, a) in instance(), g in groups(), cap in 0u64..30) {
        let table = OrbitTable::new(&SymbolGroup::new(g, v).unwrap(), t).unwrap();
        let p = Parameters::new(t, k, v).unwrap();
        prop_assert_eq!(uncovered_sequential(&a, &table, cap), uncovered_list(&a, &p, g, cap).unwrap());
    }

    #[test]
    fn greedy_never_needs_more_rows_than_naive((t, k, v, a) in instance(), g in groups(), seed: u64) {
        let items = uncovered_items(t, k, v, &a, g);
        let grp = SymbolGroup::new(g, v).unwrap();
        let mut rng = stream(seed, Purpose::Fill, 0);
        let greedy = greedy_cover(&items, k, &grp, &mut rng);
        let naive = naive_cover(&items, k, v, &mut rng);
        prop_assert!(greedy.len() <= naive.len());
    }

    #[test]
    fn graph_edges_match_pair_scan((t, k, v, a) in instance(), g in groups()) {
        let items = uncovered_items(t, k, v, &a, g);
        let graph = build_incompat_graph(&items, &SymbolGroup::new(g, v).unwrap());
        let mut m = 0u64;
        for i in 0..graph.len() {
            prop_assert!(!graph.adjacency[i].contains(&i));
            prop_assert!(graph.adjacency[i].windows(2).all(|w| w[0] < w[1]));
            for j in i + 1..graph.len() {
                let edge = graph.vertices[i].conflicts_with(&graph.vertices[j]);
                prop_assert_eq!(edge, graph.adjacency[i].binary_search(&j).is_ok());
                prop_assert_eq!(edge, graph.adjacency[j].binary_search(&i).is_ok());
                m += edge as u64;
            }
        }
        prop_assert_eq!(m, graph.m_edges);
    }

    #[test]
    fn coloring_rows_respect_the_edge_bound((t, k, v, a) in instance(), g in groups(), seed: u64) {
        let items = uncovered_items(t, k, v, &a, g);
        let graph = build_incompat_graph(&items, &SymbolGroup::new(g, v).unwrap());
        let (rows, stats) = color_cover(&graph, k, v, &mut stream(seed, Purpose::Fill, 0)).unwrap();
        prop_assert_eq!(rows.len(), stats.colors);
        prop_assert!(stats.colors <= stats.degeneracy + 1);
        prop_assert!(rows.len() as f64 <= chromatic_estimate(graph.m_edges as f64) + 1e-9);
        for vertex in &graph.vertices {
            prop_assert!(rows.iter().any(|r| vertex.matches_row(|c| r[c])));
        }
    }

    #[test]
    fn density_rows_meet_the_guarantee((t, k, v, a) in instance(), g in groups()) {
        // density_cover checks the per-row guarantee itself and errors on a shortfall.
        let items = uncovered_items(t, k, v, &a, g);
        let grp = SymbolGroup::new(g, v).unwrap();
        let rows = density_cover(&items, k, &grp).unwrap();
        prop_assert!(rows.len() <= items.len());
        let developed = grp.develop(&Array::from_rows(k, v, &rows).unwrap());
        for item in &items {
            prop_assert!(item.is_covered_by(&developed));
        }
    }
}
