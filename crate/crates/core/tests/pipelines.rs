//! Cross-module pipelines through the public API: surfaces feed cluster
//! transformations, which are checked classically, tropically, in quantum
//! matrix models and by grid intertwiners.

use clusterdouble::cluster::{apply_transformation, is_trivial_classical, ClusterTransformation, Space};
use clusterdouble::intertwiner::{default_tests, verify_relation_numeric};
use clusterdouble::quantum::relations::{default_orders, verify_quantum_relation};
use clusterdouble::surface::Triangulation;
use clusterdouble::symbolic::TropicalInt;
use clusterdouble::Feed;

#[test]
fn flip_pentagon_is_a_scalar_under_the_intertwiner() {
    let word = Triangulation::polygon(5).unwrap().pentagon_word(0, 1).unwrap().transformation().unwrap();
    assert!(is_trivial_classical(&word).unwrap());
    let r = verify_relation_numeric(&word, 0.7, &default_tests(2).unwrap(), 128).unwrap();
    assert!(r.passes(1e-3), "{r:?}");
    // dropping the final flip leaves a non-scalar operator
    let mut open = word.clone();
    open.steps.remove(4);
    let bad = verify_relation_numeric(&open, 0.7, &default_tests(2).unwrap(), 128).unwrap();
    assert!(!bad.passes(1e-3));
}

#[test]
fn transformations_roundtrip_through_json() {
    let t = ClusterTransformation::polygon_relation(2).unwrap();
    let back = ClusterTransformation::from_json(&t.to_json().to_string()).unwrap();
    assert_eq!(back, t);
    let f = Feed::rank2(3);
    assert_eq!(Feed::from_json(&f.to_json().to_string()).unwrap(), f);
    let s = Triangulation::annulus(2, 1).unwrap();
    assert_eq!(Triangulation::from_json(&s.to_json().to_string()).unwrap(), s);
}

#[test]
fn annulus_twist_acts_on_laminations_and_quantum_tori() {
    let w = Triangulation::annulus_twist_word(2, 1).unwrap().transformation().unwrap();
    assert_eq!(w.target().unwrap(), w.source);
    // the twist and its inverse cancel in the quantum X-torus
    let there_and_back = w.concat(&w.inverse().unwrap());
    let q = verify_quantum_relation(&there_and_back, Space::X, &default_orders(&w.source), 5).unwrap();
    assert!(q.passes(1e-8), "{q:?}");
    // while the twist alone moves tropical points
    let pt = vec![1i64, -2, 3];
    assert_ne!(apply_transformation(&w, Space::X, &TropicalInt, &pt).unwrap(), pt);
}

#[test]
fn polygon_words_of_rank_two_match_the_surface_feed() {
    // the A₂ feed is the feed of the pentagon
    assert_eq!(Triangulation::polygon(5).unwrap().feed(), Feed::rank2(1));
}
