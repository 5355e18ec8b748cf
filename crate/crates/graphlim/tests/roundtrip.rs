use graphlim::io::{num, GraphFile, GraphonFile, QuotientSetFile};
use graphlim::report::envelope;
use graphlim_core::graph::WeightedGraph;
use graphlim_core::graphon::StepGraphon;
use graphlim_core::quotient::sample_quotient_set;
use proptest::prelude::*;
use serde_json::{json, Value};

fn symmetric(k: usize, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, k * k).prop_map(move |mut m| {
        for a in 0..k {
            for b in 0..a {
                m[a * k + b] = m[b * k + a];
            }
        }
        m
    })
}

fn graph() -> impl Strategy<Value = WeightedGraph> {
    (1usize..9).prop_flat_map(|n| {
        (prop::collection::vec(0.01f64..5.0, n), symmetric(n, -2.0, 2.0), prop::collection::vec(any::<bool>(), n * n))
            .prop_map(move |(a, mut b, keep)| {
                // sparsify so that the edge list skips zero pairs
                for u in 0..n {
                    for v in 0..n {
                        if !keep[u.min(v) * n + u.max(v)] {
                            b[u * n + v] = 0.0;
                        }
                    }
                }
                WeightedGraph::new(a, b).unwrap()
            })
    })
}

fn graphon() -> impl Strategy<Value = StepGraphon> {
    (1usize..6).prop_flat_map(|k| {
        (prop::collection::vec(0.05f64..1.0, k), symmetric(k, -3.0, 3.0)).prop_map(|(l, v)| {
            let s: f64 = l.iter().sum();
            StepGraphon::new(l.iter().map(|x| x / s).collect(), v).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn graphs_round_trip(g in graph()) {
        let text = serde_json::to_string(&GraphFile::from_graph(&g)).unwrap();
        let back: GraphFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_graph().unwrap(), g);
    }

    #[test]
    fn graphons_round_trip(w in graphon()) {
        let text = serde_json::to_string(&GraphonFile::from_graphon(&w)).unwrap();
        let back: GraphonFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_graphon().unwrap(), w);
    }

    #[test]
    fn quotient_sets_round_trip(w in graphon(), q in 1usize..4, seed in any::<u64>()) {
        let set = sample_quotient_set(&w, q, 0.0, 20, seed).unwrap();
        let text = serde_json::to_string(&QuotientSetFile::from_set(&set)).unwrap();
        let back: QuotientSetFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_set().unwrap(), set);
    }

    #[test]
    fn reports_round_trip(xs in prop::collection::vec(any::<f64>(), 0..8), seed in any::<u64>()) {
        let result = json!({ "values": xs.iter().map(|&x| num(x)).collect::<Vec<_>>() });
        let report = envelope("distance", seed, json!({ "budget": 720 }), result);
        let back: Value = serde_json::from_str(&graphlim::io::to_pretty(&report)).unwrap();
        prop_assert_eq!(back, report);
    }
}
