//! Property tests over randomly generated hypergraphs and label codecs.

use mmp_core::assign::classical_indices_exact;
use mmp_core::lang::{
    decompose_components, parse_mmp, serialize_mmp, Hypergraph, VertexLabel,
};
use mmp_core::structure::{multiplicities, strip_unishared};
use proptest::prelude::*;

fn arb_hypergraph() -> impl Strategy<Value = Hypergraph> {
    // Up to 14 vertices, up to 8 edges of size 2..=4.
    (2usize..=14, 1usize..=8)
        .prop_flat_map(|(k, l)| {
            proptest::collection::vec(
                proptest::collection::vec(0usize..k, 2..=4usize.min(k)),
                l,
            )
        })
        .prop_map(|raw| {
            let edges: Vec<Vec<usize>> = raw
                .into_iter()
                .map(|mut e| {
                    e.sort_unstable();
                    e.dedup();
                    e
                })
                .filter(|e| e.len() >= 2)
                .collect();
            edges
        })
        .prop_filter("needs an edge", |edges| !edges.is_empty())
        .prop_map(|edges| Hypergraph::from_edges(edges, None))
}

proptest! {
    #[test]
    fn label_codec_identity(i in 0usize..200_000) {
        prop_assert_eq!(VertexLabel::encode(i).decode(), Some(i));
    }

    #[test]
    fn serialize_parse_roundtrip(h in arb_hypergraph()) {
        let text = serialize_mmp(&h);
        let parsed = parse_mmp(&text).unwrap();
        prop_assert_eq!(parsed.k(), h.k());
        prop_assert_eq!(parsed.edges, h.edges);
    }

    #[test]
    fn strip_never_grows(h in arb_hypergraph()) {
        if let Ok(stripped) = strip_unishared(&h, false) {
            prop_assert!(stripped.l() <= h.l());
            // No surviving vertex gains multiplicity.
            let before = multiplicities(&h);
            let after = multiplicities(&stripped);
            for (v, lab) in stripped.vertices.iter().enumerate() {
                let orig = h.vertices.iter().position(|l| l == lab).unwrap();
                prop_assert!(after[v] <= before[orig]);
            }
        }
    }

    #[test]
    fn components_partition_edges(h in arb_hypergraph()) {
        let comps = decompose_components(&h);
        let total: usize = comps.iter().map(|c| c.l()).sum();
        prop_assert_eq!(total, h.l());
        let sizes: usize = comps.iter().map(|c| c.k()).sum();
        prop_assert_eq!(sizes, h.k());
    }

    #[test]
    fn adding_an_edge_never_raises_hi_cm(h in arb_hypergraph(), extra in proptest::collection::vec(0usize..14, 2..=3)) {
        let mut e: Vec<usize> = extra.into_iter().filter(|&v| v < h.k()).collect();
        e.sort_unstable();
        e.dedup();
        prop_assume!(e.len() >= 2);
        let before = classical_indices_exact(&h).unwrap().hi_c_max;
        let mut edges = h.edges.clone();
        edges.push(e);
        let bigger = Hypergraph::from_edges(edges, Some(h.n));
        let after = classical_indices_exact(&bigger).unwrap().hi_c_max;
        prop_assert!(after <= before);
    }
}
