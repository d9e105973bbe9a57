//! Dense polynomials with coefficients in a tower.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{Field, KElement};

#[derive(Clone, Debug)]
pub struct Poly {
    field: Field,
    coeffs: Vec<KElement>,
}

impl Poly {
    pub fn new(field: &Field, coeffs: Vec<KElement>) -> Self {
        Poly { field: field.clone(), coeffs }
    }

    pub fn from_ints(field: &Field, coeffs: &[i64], prec: i64) -> Self {
        let coeffs = coeffs.iter().map(|&c| field.int_prec(c, prec)).collect();
        Poly { field: field.clone(), coeffs }
    }

    pub fn from_bigints(field: &Field, coeffs: &[BigInt], prec: i64) -> Self {
        let coeffs = coeffs.iter().map(|c| field.int_prec(c.clone(), prec)).collect();
        Poly { field: field.clone(), coeffs }
    }

    /// The defining Eisenstein polynomial of the tower, coefficients exact to
    /// the working precision.
    pub fn eisenstein(field: &Field) -> Self {
        let prec = field.work_prec() + 16;
        let coeffs = field.eisenstein_coeffs().iter().map(|c| field.k0_element(c, prec)).collect();
        Poly { field: field.clone(), coeffs }
    }

    /// The `p^n`-th cyclotomic polynomial `sum_{k<p} X^(k p^(n-1))`.
    pub fn cyclotomic(field: &Field, n: u32, prec: i64) -> Self {
        let p = field.p() as usize;
        let step = p.pow(n.saturating_sub(1));
        let mut coeffs = vec![0i64; step * (p - 1) + 1];
        for k in 0..p {
            coeffs[k * step] = 1;
        }
        Self::from_ints(field, &coeffs, prec)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[KElement] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &KElement) -> KElement {
        let mut acc: Option<KElement> = None;
        for c in self.coeffs.iter().rev() {
            acc = Some(match acc {
                None => c.clone(),
                Some(a) => &(&a * x) + c,
            });
        }
        acc.unwrap_or_else(|| KElement::zero(&self.field, x.prec()))
    }

    pub fn deriv(&self) -> Poly {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.mul_int(i as i64)).collect();
        Poly { field: self.field.clone(), coeffs }
    }

    pub fn eval_deriv(&self, x: &KElement) -> KElement {
        self.deriv().eval(x)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly { field: self.field.clone(), coeffs }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly { field: self.field.clone(), coeffs: Vec::new() };
        }
        let mut coeffs: Vec<Option<KElement>> = vec![None; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = a * b;
                coeffs[i + j] = Some(match coeffs[i + j].take() {
                    None => t,
                    Some(c) => &c + &t,
                });
            }
        }
        Poly { field: self.field.clone(), coeffs: coeffs.into_iter().map(Option::unwrap).collect() }
    }

    /// Whether every coefficient lies in the unramified subfield `K_0`.
    pub fn is_over_k0(&self) -> bool {
        let f = self.field.f();
        self.coeffs.iter().all(|c| c.raw_coords()[f..].iter().all(|x| x.is_zero()))
    }
}

pub fn eval_poly(g: &Poly, x: &KElement) -> KElement {
    g.eval(x)
}

pub fn eval_deriv(g: &Poly, x: &KElement) -> KElement {
    g.eval_deriv(x)
}

/// The polynomial of degree `< e` over `O_{K_0}` whose value at `pi` is `x`,
/// read off from the basis coordinates.
pub fn canonical_poly_lift(x: &KElement) -> Result<Poly> {
    let field = x.field();
    if !x.is_integral() {
        return Err(Error::NotIntegral { ord: x.ord()? });
    }
    let f = field.f();
    let raw = x.raw_coords();
    let coeffs = (0..field.e())
        .map(|i| {
            let mut c = vec![BigInt::zero(); field.degree()];
            c[..f].clone_from_slice(&raw[i * f..(i + 1) * f]);
            KElement::from_raw(field, x.shift(), c, x.prec())
        })
        .collect();
    Ok(Poly::new(field, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldDesc};

    fn f0() -> Field {
        make_field(FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1])).unwrap()
    }

    #[test]
    fn evaluates_lifts_of_zeta() {
        let k = f0();
        let h = Poly::from_ints(&k, &[1, 1], k.work_prec());
        assert_eq!(h.eval(&k.pi()), k.zeta().unwrap());
        assert_eq!(h.eval_deriv(&k.pi()), k.one());
        let g = Poly::from_ints(&k, &[0, 1], k.work_prec());
        assert_eq!(g.eval(&k.pi()), k.pi());
        assert_eq!(g.eval_deriv(&k.pi()), k.one());
    }

    #[test]
    fn different_lift_same_value() {
        let k = f0();
        // T + 1 + T * e(T)
        let t_e = Poly::from_ints(&k, &[0, 3, 3, 1], k.work_prec());
        let g = Poly::from_ints(&k, &[1, 1], k.work_prec()).add(&t_e);
        assert_eq!(g.eval(&k.pi()), k.zeta().unwrap());
    }

    #[test]
    fn lift_of_zeta_and_pi_squared() {
        let k = f0();
        let lift = canonical_poly_lift(&k.zeta().unwrap()).unwrap();
        assert_eq!(lift.coeffs()[0], k.one());
        assert_eq!(lift.coeffs()[1], k.one());
        let lift = canonical_poly_lift(&k.pi().square()).unwrap();
        assert_eq!(lift.coeffs()[0], k.int(-3));
        assert_eq!(lift.coeffs()[1], k.int(-3));
        assert!(lift.is_over_k0());
    }

    #[test]
    fn lift_rejects_non_integral() {
        let k = f0();
        assert!(canonical_poly_lift(&k.pi().inv().unwrap()).is_err());
    }

    #[test]
    fn eisenstein_vanishes_at_pi() {
        let k = f0();
        assert!(Poly::eisenstein(&k).eval(&k.pi()).is_zero());
        assert_eq!(k.different_exponent(), 1);
    }
}
