mod common;

use common::{graph, naive_cds, naive_ids, NaiveRun};
use mule_gather::geom_graph::{make_graph, Point, UnitDiskGraph};
use mule_gather::primal_dual::{build_cds, build_ids, NodeWeights, PdResult};
use mule_gather::tree_builder::{reduction_weights, weight_constant};

fn assert_same(lib: &PdResult, naive: &NaiveRun, what: &str) {
    assert_eq!(lib.chosen, naive.chosen, "{what}: chosen");
    assert_eq!(lib.selection_order, naive.order, "{what}: order");
    for (a, b) in lib.singleton_y.iter().zip(&naive.singleton_y) {
        assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{what}: y {a} vs {b}");
    }
    assert!((lib.lower_bound - naive.lower_bound).abs() <= 1e-9 * (1.0 + naive.lower_bound), "{what}: lb");
}

fn replay(g: &UnitDiskGraph, w: &NodeWeights, what: &str) {
    let ids = build_ids(g, w).unwrap();
    let naive = naive_ids(g, w.as_slice());
    assert_same(&ids, &naive, &format!("{what} ids"));
    for r in &naive.packed_residuals {
        assert!(r.abs() < 1e-9, "{what}: oracle selected an unpacked node");
    }
    if w.as_slice().iter().all(|&x| x > 2.0) {
        let cds = build_cds(g, w, &ids.chosen).unwrap();
        let naive = naive_cds(g, w.as_slice(), &ids.chosen);
        assert_same(&cds, &naive, &format!("{what} cds"));
    }
}

#[test]
fn hand_examples_match_replay() {
    let path = make_graph((0..4).map(|i| Point::new(i as f64, 0.0)).collect()).unwrap();
    let naive = naive_ids(&path, &[1.0; 4]);
    assert_eq!(naive.chosen, vec![1, 3]);
    assert!((naive.lower_bound - 0.02).abs() < 1e-12);
    let naive = naive_cds(&path, &[20.0; 4], &[1, 3]);
    assert_eq!(naive.chosen, vec![1, 2, 3]);
    assert!((naive.lower_bound - 19.8).abs() < 1e-12);

    let pair = make_graph(vec![Point::new(0.0, 0.0), Point::new(0.5, 0.0)]).unwrap();
    let naive = naive_ids(&pair, &[1.0, 2.0]);
    assert_eq!(naive.chosen, vec![0]);
    assert!((naive.lower_bound - 0.02).abs() < 1e-12);
}

#[test]
fn unit_weights_match_replay() {
    for seed in 0..25 {
        let g = graph(seed, 6 + (seed as usize % 20), 3.0);
        replay(&g, &NodeWeights::uniform(g.n(), 1.0).unwrap(), &format!("unit seed {seed}"));
    }
}

#[test]
fn integer_weights_match_replay() {
    // Uniform integral weights produce many exact ties.
    for seed in 0..25 {
        let g = graph(100 + seed, 8 + (seed as usize % 18), 2.5);
        replay(&g, &NodeWeights::uniform(g.n(), 20.0).unwrap(), &format!("w20 seed {seed}"));
    }
}

#[test]
fn reduction_weights_match_replay() {
    let c = weight_constant(0.2).unwrap();
    for seed in 0..40 {
        let g = graph(200 + seed, 10 + (seed as usize % 20), 2.5);
        let m = seed as usize % g.n();
        replay(&g, &reduction_weights(&g, m, c).unwrap(), &format!("reduction seed {seed}"));
    }
}
