mod common;

use common::*;
use hornlab::efgame::{build_instance, play, SpoilerPolicy};
use hornlab::generators::{density_witness, high_chromatic_sparse, random_hyperforest, SearchBudget};
use hornlab::io::{hypergraph_to_json, kstructure_to_json};
use hornlab::KStructure;

#[test]
fn forests_repeat_byte_for_byte() {
    for seed in 0..20 {
        let a = hypergraph_to_json(&random_hyperforest(3, 5, seed).unwrap());
        let b = hypergraph_to_json(&random_hyperforest(3, 5, seed).unwrap());
        assert_eq!(a, b);
    }
}

#[test]
fn sparse_searches_repeat_byte_for_byte() {
    let budget = SearchBudget::with_seed(5);
    let a = high_chromatic_sparse(2, 3, 2, &budget).unwrap();
    let b = high_chromatic_sparse(2, 3, 2, &budget).unwrap();
    assert_eq!(hypergraph_to_json(&a), hypergraph_to_json(&b));

    let k3: KStructure = hornlab::generators::complete_hypergraph(3, 2)
        .unwrap()
        .to_kstructure(2)
        .unwrap();
    let a = density_witness(&k2(2), &k3, &budget).unwrap();
    let b = density_witness(&k2(2), &k3, &budget).unwrap();
    assert_eq!(kstructure_to_json(&a.structure), kstructure_to_json(&b.structure));
}

#[test]
fn random_plays_repeat() {
    let c9 = hornlab::generators::cycle(9).unwrap().to_kstructure(2).unwrap();
    let inst = build_instance(&c9, 2, 2, false).unwrap();
    let policy = SpoilerPolicy::Random {
        seed: 17,
        trials: 300,
    };
    let a = serde_json::to_string(&play(&inst, &policy)).unwrap();
    let b = serde_json::to_string(&play(&inst, &policy)).unwrap();
    assert_eq!(a, b);
}
