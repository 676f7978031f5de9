//! End-to-end checks on the explicit example channels.

use dqms::generators::*;
use dqms::indices::*;
use dqms::linalg::*;
use dqms::opsys::*;
use dqms::spectral::*;

fn cfg() -> Config {
    Config::default()
}

#[test]
fn extremal_matrices_attain_the_bounds() {
    let expected = [(3, 3, 5), (4, 5, 10), (5, 9, 17), (6, 13, 26), (7, 19, 37)];
    for (d, c, w) in expected {
        let ch = a_d_channel(d);
        let ci = c_index(&ch, &cfg()).unwrap();
        let wi = w_index(&ch, &cfg()).unwrap();
        assert_eq!(ci.value, IndexValue::Finite(c), "c(A_{d})");
        assert_eq!(wi.index.value, IndexValue::Finite(w), "w(A_{d})");
        assert!(ci.certified && wi.index.certified);
    }
}

#[test]
fn extremal_matrix_predicates() {
    let p = classical_predicates(&a_d(3), &Tolerances::default()).unwrap();
    assert!(!p.scrambling && !p.strictly_positive && p.mixing && p.primitive);
    assert!(p.spectral_agrees);
}

#[test]
fn entanglement_assisted_time_equals_scrambling_time_for_a3() {
    let ch = a_d_channel(3);
    assert_eq!(ce_index(&ch, &cfg()).unwrap().value, IndexValue::Finite(3));
    assert!(c0e_is_zero(&ch.power(3).unwrap(), &Tolerances::default()).unwrap());
    assert!(!c0e_is_zero(&ch.power(2).unwrap(), &Tolerances::default()).unwrap());
}

#[test]
fn a3_confusability_edges() {
    let g = confusability_graph(&a_d(3));
    assert_eq!(g.edges(), vec![(0, 1)]);
}

#[test]
fn m3_chain_and_indices() {
    let ch = m3();
    let tol = Tolerances::default();
    let chain_res = chain(&ch, &tol).unwrap();
    assert_eq!(chain_res.dims, vec![3, 5, 9]);
    assert_eq!(chain_res.n, 3);
    assert!(chain_res.consistent);
    assert_eq!(mult_domain_chain(&ch, &tol).unwrap(), vec![3, 2, 1]);
    let c = c_index(&ch, &cfg()).unwrap();
    let ce = ce_index(&ch, &cfg()).unwrap();
    let q = q_index(&ch, &cfg()).unwrap();
    assert_eq!((c.value, ce.value, q.value), (IndexValue::Finite(3), IndexValue::Finite(3), IndexValue::Finite(1)));
    assert!(c.certified && ce.certified && q.certified);
    match algebra_chain_bounds(&ch, &cfg()).unwrap() {
        AlgebraChainBounds::Checked { q_holds, c_holds, .. } => assert!(q_holds && c_holds),
        other => panic!("{other:?}"),
    }
}

#[test]
fn m3_is_primitive() {
    let cl = classify(&m3(), &Tolerances::default()).unwrap();
    assert!(cl.primitive && cl.aeb);
}

#[test]
fn firr4_is_not_scrambling() {
    let ch = firr4();
    let v = c_scrambling(&ch, &cfg()).unwrap();
    assert!(v.is_certified() && !v.value());
    let (x, y) = v.vectors().unwrap();
    assert!(output_overlap(&ch, x, y).abs() <= 1e-10);
    assert_eq!((x, y), (&ket(4, 0), &ket(4, 2)));
    // The generic path finds a witness as well.
    let g = c_scrambling(&ch.as_generic(), &cfg()).unwrap();
    assert!(g.is_certified() && !g.value());
    let (x, y) = g.vectors().unwrap();
    assert!(output_overlap(&ch, x, y).abs() <= 1e-8);
}

#[test]
fn scr5_scrambling_but_square_not_positive() {
    let ch = scr5();
    let s = c_scrambling(&ch, &cfg()).unwrap();
    assert!(s.is_certified() && s.value());
    let sq = strictly_positive(&ch.power(2).unwrap(), &cfg()).unwrap();
    assert!(sq.is_certified() && !sq.value());
}

#[test]
fn cycle_indices_infinite() {
    let ch = cycle(3);
    assert_eq!(c_index(&ch, &cfg()).unwrap().value, IndexValue::Infinite);
    assert_eq!(w_index(&ch, &cfg()).unwrap().index.value, IndexValue::Infinite);
    assert_eq!(q_index(&ch, &cfg()).unwrap().value, IndexValue::Finite(1));
}

#[test]
fn covariant_channel_inherits_wielandt_index() {
    let a = a_d(4);
    let d = a.dim();
    let b = CMat::from_fn(d, d, |i, j| c((a.get(i, i) * a.get(j, j)).sqrt(), 0.0));
    let ch = dqms::channel::Channel::cduc(dqms::channel::CducParams::new(a, b).unwrap()).unwrap();
    assert_eq!(w_index(&ch, &cfg()).unwrap().index.value, IndexValue::Finite(10));
}
