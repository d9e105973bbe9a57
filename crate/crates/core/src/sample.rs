//! Deterministic samplers for test suites.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{Field, KElement};

/// Shape of a sampled element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    Integral,
    Unit,
    /// `ord(x - 1) >= r`.
    PrincipalUnit(Ratio<i64>),
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One sample, determined by `seed`.
pub fn random_element(field: &Field, constraint: Constraint, seed: u64) -> KElement {
    random_element_with(field, constraint, &mut rng_from_seed(seed))
}

pub fn random_element_with(field: &Field, constraint: Constraint, rng: &mut ChaCha8Rng) -> KElement {
    let prec = field.work_prec();
    match constraint {
        Constraint::Integral => random_integral(field, prec, rng),
        Constraint::Unit => loop {
            let x = random_integral(field, prec, rng);
            if x.is_unit() {
                return x;
            }
        },
        Constraint::PrincipalUnit(r) => {
            let e = field.e() as i64;
            let k = (r * e).ceil().to_integer().max(1);
            let t = random_integral(field, prec, rng);
            let step = field.pi_prec(prec + k).pow_u(k as u64);
            (&field.int_prec(1, prec) + &(&t * &step)).reduce_prec(prec)
        }
    }
}

fn random_integral(field: &Field, prec: i64, rng: &mut ChaCha8Rng) -> KElement {
    let bound = crate::padic::pow_p(field.p(), prec as u32);
    let mut bytes = vec![0u8; (bound.bits() / 8 + 16) as usize];
    let coords = (0..field.degree())
        .map(|_| {
            rng.fill_bytes(&mut bytes);
            BigInt::from_bytes_le(num_bigint::Sign::Plus, &bytes).mod_floor(&bound)
        })
        .collect();
    KElement::from_raw(field, 0, coords, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldDesc};

    #[test]
    fn deterministic_and_constrained() {
        let k = make_field(FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1])).unwrap();
        let a = random_element(&k, Constraint::Unit, 1);
        let b = random_element(&k, Constraint::Unit, 1);
        assert_eq!(a.to_record(), b.to_record());
        assert!(a.is_unit());
        for seed in 0..20 {
            let x = random_element(&k, Constraint::PrincipalUnit(Ratio::from(1)), seed);
            assert!((&x - &k.one()).ord().unwrap() >= Ratio::from(1));
        }
    }
}
