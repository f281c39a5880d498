mod common;

use vcsynth::boundary::crucial_set;
use vcsynth::config::LocalConfiguration;
use vcsynth::graph::Graph;

#[test]
fn corpus_is_closed_and_deduplicated() {
    let corpus = common::corpus(6);
    assert!(corpus.len() > 100);
    assert!(corpus.iter().all(|l| l.vertex_count() <= 6));
    let mut keys: Vec<Vec<u8>> = corpus.iter().map(|l| l.canonical_key().unwrap()).collect();
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), corpus.len());
}

#[test]
fn crucial_set_covers_every_requirement() {
    let (checked, bad) = common::crucial_set_exceptions(&common::corpus(6));
    assert!(checked > 1000);
    assert_eq!(bad, 0);
}

#[test]
fn neighbouring_requirements_imply_each_other() {
    let (checked, bad) = common::neighbour_implication_exceptions(&common::corpus(6));
    assert!(checked > 10_000);
    assert_eq!(bad, 0);
}

#[test]
fn crucial_set_of_an_open_edge() {
    let l = LocalConfiguration::new(Graph::path(2), vec![2, 2], 3).unwrap();
    assert_eq!(crucial_set(&l).unwrap(), vec![0b01, 0b10]);
}
