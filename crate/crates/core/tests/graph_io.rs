mod support;

use lrw::graph::write_edge_list;
use lrw::{load_edge_list, VertexId};
use proptest::prelude::*;

#[test]
fn karate_shape() {
    let (g, factions) = support::karate();
    assert_eq!(g.vertex_count(), 34);
    assert_eq!(g.edge_count(), 78);
    assert_eq!(g.vertices().map(|v| g.degree(v)).max(), Some(17));
    assert_eq!(factions.iter().map(Vec::len).sum::<usize>(), 34);
}

proptest! {
    #[test]
    fn reload_is_idempotent(edges in proptest::collection::vec((0u64..1_000_000, 0u64..1_000_000), 0..200)) {
        let text: String = edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect();
        let first = load_edge_list(text.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_edge_list(&first.graph, &first.ids, &mut out).unwrap();
        let second = load_edge_list(&out[..]).unwrap();
        let mut again = Vec::new();
        write_edge_list(&second.graph, &second.ids, &mut again).unwrap();
        let third = load_edge_list(&again[..]).unwrap();
        prop_assert_eq!(&second.graph, &third.graph);
        prop_assert_eq!(second.graph.edge_count(), first.graph.edge_count());
        // Same edges in original ids.
        let orig = |l: &lrw::LoadedGraph| {
            let mut e: Vec<(u64, u64)> = l.graph.edges().map(|(a, b)| {
                let (a, b) = (l.ids.original(a), l.ids.original(b));
                (a.min(b), a.max(b))
            }).collect();
            e.sort();
            e
        };
        prop_assert_eq!(orig(&first), orig(&second));
    }

    #[test]
    fn degree_is_column_length_minus_one(edges in proptest::collection::vec((0u32..30, 0u32..30), 0..120)) {
        let g = lrw::Graph::from_edges(30, edges);
        for v in g.vertices() {
            prop_assert_eq!(g.degree(v), g.transition_column(v).len() - 1);
            prop_assert!(g.transition_column(v).contains(&(v, 1.0 / (g.degree(v) + 1) as f64)));
        }
        let _ = VertexId(0);
    }
}
