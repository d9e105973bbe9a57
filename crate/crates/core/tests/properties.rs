//! Property suites over seeded random elements.

use std::sync::OnceLock;

use num_rational::Ratio;
use proptest::prelude::*;

use rlab_core::analytic::{exp_eta, pexp, plog, EtaGuard};
use rlab_core::embed::{radical_extension, SubfieldEmbedding};
use rlab_core::forms::{d, dlog, exp1, exp2_eval, rewrite_to_zeta, FormExpression};
use rlab_core::laurent::{laurent_mul, LaurentElement};
use rlab_core::reciprocity::{hilbert_symbol, sen_symbol, CyclotomicContext};
use rlab_core::roots::{hensel_root, pth_power_test};
use rlab_core::sample::{random_element, Constraint};
use rlab_core::{canonical_poly_lift, make_field, Field, FieldDesc, KElement, Poly};

fn f0() -> &'static Field {
    static F: OnceLock<Field> = OnceLock::new();
    F.get_or_init(|| make_field(FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1])).unwrap())
}

fn tower() -> &'static (Field, SubfieldEmbedding) {
    static T: OnceLock<(Field, SubfieldEmbedding)> = OnceLock::new();
    T.get_or_init(|| radical_extension(f0(), 3).unwrap())
}

/// `Q_3(i)(sqrt 3)`: `f = 2`, `e = 2`, no `zeta_3`.
fn mixed() -> &'static Field {
    static F: OnceLock<Field> = OnceLock::new();
    F.get_or_init(|| make_field(FieldDesc::new(3, 0, &[1, 0, 1], &[-3, 0, 1])).unwrap())
}

fn ctx() -> &'static CyclotomicContext {
    static C: OnceLock<CyclotomicContext> = OnceLock::new();
    C.get_or_init(|| CyclotomicContext::new(f0()).unwrap())
}

fn integral(k: &Field, seed: u64) -> KElement {
    random_element(k, Constraint::Integral, seed)
}

fn unit(k: &Field, seed: u64) -> KElement {
    random_element(k, Constraint::Unit, seed)
}

fn principal(k: &Field, seed: u64) -> KElement {
    random_element(k, Constraint::PrincipalUnit(Ratio::from(1)), seed)
}

fn fields() -> [&'static Field; 3] {
    [f0(), &tower().0, mixed()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(s in any::<u64>(), which in 0usize..3) {
        let k = fields()[which];
        let (x, y, z) = (integral(k, s), integral(k, s ^ 1), integral(k, s ^ 2));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x + &y, &y + &x);
        let u = unit(k, s ^ 3);
        prop_assert_eq!(&u * &u.inv().unwrap(), k.one());
    }

    #[test]
    fn valuations(s in any::<u64>(), which in 0usize..3, a in 0u64..4, b in 0u64..4) {
        let k = fields()[which];
        let x = &unit(k, s) * &k.pi().pow_u(a);
        let y = &unit(k, s ^ 7) * &k.pi().pow_u(b);
        prop_assert_eq!((&x * &y).ord().unwrap(), x.ord().unwrap() + y.ord().unwrap());
        let sum = &x + &y;
        let lo = x.ord().unwrap().min(y.ord().unwrap());
        if a != b {
            prop_assert_eq!(sum.ord().unwrap(), lo);
        } else if !sum.is_zero() {
            prop_assert!(sum.ord().unwrap() >= lo);
        }
    }

    #[test]
    fn trace_and_norm(s in any::<u64>(), which in 0usize..3) {
        let k = fields()[which];
        let (x, y) = (integral(k, s), integral(k, s ^ 5));
        prop_assert!((&x + &y).trace_abs().congruent(&x.trace_abs().add(&y.trace_abs())));
        prop_assert!((&x * &y).norm_abs().congruent(&x.norm_abs().mul(&y.norm_abs())));
    }

    #[test]
    fn trace_is_transitive(s in any::<u64>()) {
        let (big, emb) = tower();
        let x = integral(big, s);
        prop_assert!(emb.relative_trace(&x).unwrap().trace_abs().congruent(&x.trace_abs()));
    }

    #[test]
    fn lift_round_trip(s in any::<u64>(), which in 0usize..3) {
        let k = fields()[which];
        let x = integral(k, s);
        prop_assert_eq!(canonical_poly_lift(&x).unwrap().eval(&k.pi()), x);
    }

    #[test]
    fn hensel_recovers_square_roots(s in any::<u64>(), which in 0usize..3) {
        let k = fields()[which];
        let y = unit(k, s);
        let prec = k.work_prec();
        let f = Poly::new(k, vec![-y.square(), k.zero(), k.int_prec(1, prec)]);
        let x0 = &y + &(&integral(k, s ^ 9) * &k.int(3));
        let root = hensel_root(&f, &x0).unwrap();
        prop_assert!(f.eval(&root).reduce_prec(prec - 4).is_zero());
        prop_assert_eq!(root, y);
    }

    #[test]
    fn pth_power_witness(s in any::<u64>(), which in 0usize..3) {
        let k = fields()[which];
        let y = &unit(k, s) * &k.pi().pow_u(s % 3);
        let t = pth_power_test(&y.pow_u(3)).unwrap();
        prop_assert!(t.is_power);
        prop_assert_eq!(t.witness.unwrap().pow_u(3), y.pow_u(3));
    }

    #[test]
    fn log_exp_inverse(s in any::<u64>(), which in 0usize..3) {
        let k = fields()[which];
        let x = principal(k, s);
        prop_assert_eq!(pexp(&plog(&x).unwrap()).unwrap(), x.clone());
        let y = &principal(k, s ^ 11) - &k.one();
        prop_assert_eq!(plog(&pexp(&y).unwrap()).unwrap(), y);
    }

    #[test]
    fn exp_eta_is_a_homomorphism(s in any::<u64>(), which in 0usize..3) {
        let k = fields()[which];
        let eta = k.int(3);
        let (a, b) = (integral(k, s), integral(k, s ^ 13));
        let e = |t: &KElement| exp_eta(&eta, t, EtaGuard::Theorem).unwrap();
        prop_assert_eq!(e(&(&a + &b)), &e(&a) * &e(&b));
        let out = exp1(&eta, &a).unwrap();
        let dev = &out - &k.one();
        prop_assert!(dev.is_zero() || dev.ord().unwrap() >= eta.ord().unwrap());
    }

    #[test]
    fn differentials(s in any::<u64>(), which in 0usize..3) {
        let k = fields()[which];
        let (b1, b2) = (integral(k, s), integral(k, s ^ 17));
        let leibniz = d(&b1).unwrap().scale(&b2).unwrap().add(&d(&b2).unwrap().scale(&b1).unwrap()).unwrap();
        prop_assert_eq!(d(&(&b1 * &b2)).unwrap(), leibniz);
        prop_assert_eq!(d(&(&b1 + &b2)).unwrap(), d(&b1).unwrap().add(&d(&b2).unwrap()).unwrap());
        let (u1, u2) = (unit(k, s ^ 19), unit(k, s ^ 23));
        prop_assert_eq!(dlog(&(&u1 * &u2)).unwrap(), dlog(&u1).unwrap().add(&dlog(&u2).unwrap()).unwrap());
        prop_assert_eq!(dlog(&u1.pow_u(3)).unwrap(), dlog(&u1).unwrap().scale(&k.int(3)).unwrap());
        prop_assert!(d(&Poly::eisenstein(k).eval(&k.pi())).unwrap().is_zero());
    }

    #[test]
    fn symbols_are_bilinear(s in any::<u64>(), m in 0u64..3) {
        let k = f0();
        let ctx = ctx();
        let (a1, a2) = (principal(k, s), principal(k, s ^ 29));
        let b1 = &unit(k, s ^ 31) * &k.pi().pow_u(m);
        let b2 = unit(k, s ^ 37);
        let h = |a: &KElement, b: &KElement| hilbert_symbol(ctx, a, b).unwrap();
        prop_assert_eq!(h(&a1, &(&b1 * &b2)), h(&a1, &b1).add(&h(&a1, &b2)));
        prop_assert_eq!(h(&(&a1 * &a2), &b1), h(&a1, &b1).add(&h(&a2, &b1)));
        prop_assert!(h(&a1, &(-&a1)).is_trivial());
        prop_assert!(h(&a1, &b2.pow_u(3)).is_trivial());
    }

    #[test]
    fn sen_ignores_the_lift(s in any::<u64>()) {
        let k = f0();
        let prec = k.work_prec();
        let (alpha, beta) = (principal(k, s), unit(k, s ^ 41));
        let g = canonical_poly_lift(&beta).unwrap();
        let q = Poly::new(k, vec![integral(k, s ^ 43).reduce_prec(prec), integral(k, s ^ 47).reduce_prec(prec)]);
        let g2 = g.add(&q.mul(&Poly::eisenstein(k)));
        prop_assert_eq!(sen_symbol(ctx(), &alpha, &beta, &g).unwrap(), sen_symbol(ctx(), &alpha, &beta, &g2).unwrap());
    }

    #[test]
    fn rewrite_preserves_exp2(s in any::<u64>()) {
        let k = f0();
        let mut expr = FormExpression::new(k);
        for i in 0..2 {
            expr.push(integral(k, s ^ (53 + i)), unit(k, s ^ (59 + i))).unwrap();
        }
        let a = rewrite_to_zeta(ctx(), &expr).unwrap();
        let rewritten = FormExpression::single(a, ctx().zeta().clone()).unwrap();
        let eta = k.int(3);
        prop_assert_eq!(rewritten.reduce().unwrap(), expr.reduce().unwrap());
        prop_assert_eq!(exp2_eval(ctx(), &eta, &rewritten).unwrap(), exp2_eval(ctx(), &eta, &expr).unwrap());
    }

    #[test]
    fn laurent_ring_laws(s in any::<u64>(), i in -2i64..=2, j in -2i64..=2, l in -2i64..=2) {
        let k = f0();
        let m = 8;
        let x = LaurentElement::from_terms(k, m, [(i, integral(k, s)), (0, integral(k, s ^ 1))]).unwrap();
        let y = LaurentElement::from_terms(k, m, [(j, integral(k, s ^ 2))]).unwrap();
        let z = LaurentElement::from_terms(k, m, [(l, integral(k, s ^ 3)), (1, k.one())]).unwrap();
        prop_assert_eq!(laurent_mul(&x, &y).unwrap(), laurent_mul(&y, &x).unwrap());
        let left = laurent_mul(&laurent_mul(&x, &y).unwrap(), &z).unwrap();
        let right = laurent_mul(&x, &laurent_mul(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let dist = laurent_mul(&x, &y.add(&z).unwrap()).unwrap();
        prop_assert_eq!(dist, laurent_mul(&x, &y).unwrap().add(&laurent_mul(&x, &z).unwrap()).unwrap());
    }

    #[test]
    fn records_round_trip(s in any::<u64>(), which in 0usize..3, shift in -3i64..3) {
        let k = fields()[which];
        let x = integral(k, s).scale_p(shift);
        let back = KElement::from_record(k, &x.to_record()).unwrap();
        prop_assert_eq!(back.prec(), x.prec());
        prop_assert_eq!(back, x);
    }
}
