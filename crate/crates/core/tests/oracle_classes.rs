//! The class space of F0 enumerated exhaustively, and oracle concordance on
//! the degree-6 tower.

use std::collections::HashSet;

use num_rational::Ratio;

use rlab_core::embed::radical_extension;
use rlab_core::oracle::{ClassSpace, NormOracle};
use rlab_core::reciprocity::{hilbert_symbol, CyclotomicContext};
use rlab_core::roots::is_pth_power;
use rlab_core::sample::{random_element, Constraint};
use rlab_core::{make_field, Field, FieldDesc, KElement};

fn f0() -> Field {
    make_field(FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1])).unwrap()
}

#[test]
fn cube_test_matches_every_class() {
    let k = f0();
    let space = ClassSpace::new(&k).unwrap();
    assert_eq!(space.dim(), 4);
    for idx in 0..81u64 {
        let digits: Vec<u64> = (0..4).map(|i| idx / 3u64.pow(i) % 3).collect();
        let mut x = random_element(&k, Constraint::Unit, idx).pow_u(3);
        // generators are exact (pi, 1 + c pi^i), stored at the search precision
        for (g, &d) in space.generators().iter().zip(&digits) {
            x = &x * &g.assume_prec(k.work_prec()).pow_u(d);
        }
        let x = x.reduce_prec(k.work_prec() - 4);
        assert_eq!(is_pth_power(&x).unwrap(), idx == 0, "class {digits:?}");
        assert_eq!(space.coordinates(&x).unwrap(), digits);
    }
}

#[test]
fn samples_cover_several_classes() {
    let k = f0();
    let space = ClassSpace::new(&k).unwrap();
    let classes: HashSet<Vec<u64>> =
        (0..1000).map(|s| space.coordinates(&random_element(&k, Constraint::Unit, s)).unwrap()).collect();
    assert!(classes.len() >= 3, "{} classes", classes.len());
}

#[test]
fn concordance_on_the_sextic_tower() {
    let (big, _) = radical_extension(&f0(), 3).unwrap();
    let ctx = CyclotomicContext::new(&big).unwrap();
    let oracle = NormOracle::new(&big).unwrap();
    assert_eq!(oracle.space().dim(), 8);
    let pi = big.pi();
    for s in 0..8u64 {
        let alpha = random_element(&big, Constraint::PrincipalUnit(Ratio::from(1)), s);
        let u = random_element(&big, Constraint::Unit, s + 100);
        let beta: KElement = if s % 2 == 0 { u } else { &u * &pi };
        let c = hilbert_symbol(&ctx, &alpha, &beta).unwrap();
        let v = oracle.verdict(&alpha, &beta).unwrap();
        assert_eq!(c.is_trivial(), v.is_norm, "alpha = {alpha}, beta = {beta}");
        if !v.degenerate {
            assert_eq!(v.rank, 7);
        }
    }
}
