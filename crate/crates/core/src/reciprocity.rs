//! Explicit formulas for the Hilbert symbol `(alpha, beta)` of level `p^n`.
//!
//! Symbols are exponents `c` with `(alpha, beta) = zeta^c` for the root of
//! unity fixed in the [`CyclotomicContext`]. All formulas share one shape:
//! `c = Tr_{K/Q_p}(w * log alpha) / p^n mod p^n` for an integrand `w`.

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::analytic::plog;
use crate::error::{Error, Result};
use crate::field::{Field, KElement};
use crate::poly::{canonical_poly_lift, Poly};

/// Fixed data for symbol computations: `zeta = h(pi)`.
#[derive(Clone, Debug)]
pub struct CyclotomicContext {
    field: Field,
    n: u32,
    zeta: KElement,
    pi: KElement,
    h: Poly,
    /// `zeta / h'(pi)`.
    zeta_over_dh: KElement,
}

impl CyclotomicContext {
    pub fn new(field: &Field) -> Result<Self> {
        Self::with_zeta(field, field.zeta()?)
    }

    /// Uses the given primitive `p^n`-th root of unity (`n` from the field) and
    /// its canonical lift.
    pub fn with_zeta(field: &Field, zeta: KElement) -> Result<Self> {
        let h = canonical_poly_lift(&zeta)?;
        Self::with_lift(field, zeta, h)
    }

    pub fn with_lift(field: &Field, zeta: KElement, h: Poly) -> Result<Self> {
        Self::with_lift_at(field, field.level(), zeta, h)
    }

    /// Symbols of level `p^k` for `1 <= k <= n`, using `zeta_{p^n}^(p^(n-k))`.
    pub fn at_level(field: &Field, k: u32) -> Result<Self> {
        let n = field.level();
        if k == 0 || k > n {
            return Err(Error::Unsupported(format!("level {k} outside 1..={n}")));
        }
        let zeta = field.zeta()?.pow_u(field.p().pow(n - k));
        let h = canonical_poly_lift(&zeta)?;
        Self::with_lift_at(field, k, zeta, h)
    }

    fn with_lift_at(field: &Field, n: u32, zeta: KElement, h: Poly) -> Result<Self> {
        if n == 0 {
            return Err(Error::Unsupported("symbols need a level n >= 1".into()));
        }
        let p = field.p();
        let one = field.one();
        let order = p.pow(n);
        if zeta.pow_u(order) != one || zeta.pow_u(order / p) == one {
            return Err(Error::NoRootOfUnity { order });
        }
        let pi = field.pi();
        if h.eval(&pi) != zeta {
            return Err(Error::LiftMismatch);
        }
        let zeta_over_dh = zeta.div(&h.eval_deriv(&pi))?;
        Ok(CyclotomicContext { field: field.clone(), n, zeta, pi, h, zeta_over_dh })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn zeta(&self) -> &KElement {
        &self.zeta
    }

    pub fn pi(&self) -> &KElement {
        &self.pi
    }

    pub fn h(&self) -> &Poly {
        &self.h
    }

    /// `p^n`.
    pub fn modulus(&self) -> u64 {
        self.field.p().pow(self.n)
    }

    pub fn zero_symbol(&self) -> SymbolValue {
        SymbolValue::new(0, self.modulus())
    }
}

/// `zeta^c`, stored as `c` in `[0, modulus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymbolValue {
    c: u64,
    modulus: u64,
}

impl SymbolValue {
    pub fn new(c: i64, modulus: u64) -> Self {
        SymbolValue { c: c.rem_euclid(modulus as i64) as u64, modulus }
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_trivial(&self) -> bool {
        self.c == 0
    }

    pub fn add(&self, other: &SymbolValue) -> SymbolValue {
        assert_eq!(self.modulus, other.modulus);
        SymbolValue::new((self.c + other.c) as i64, self.modulus)
    }

    pub fn neg(&self) -> SymbolValue {
        SymbolValue::new(-(self.c as i64), self.modulus)
    }

    pub fn mul_int(&self, k: i64) -> SymbolValue {
        let m = self.modulus as i128;
        SymbolValue::new(((self.c as i128 * k as i128).rem_euclid(m)) as i64, self.modulus)
    }
}

#[derive(Serialize)]
struct SymbolRecord {
    c: u64,
    modulus: u64,
    zeta_power: String,
}

impl Serialize for SymbolValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymbolRecord { c: self.c, modulus: self.modulus, zeta_power: format!("zeta^{}", self.c) }.serialize(s)
    }
}

/// Rejects `alpha` unless `ord(alpha - 1) >= 2/(p-1)`.
pub fn check_symbol_domain(alpha: &KElement) -> Result<()> {
    let field = alpha.field();
    let d = alpha - &field.int_prec(1, alpha.prec());
    if d.is_zero() {
        return Ok(());
    }
    let v = d.ord()?;
    let p = field.p() as i64;
    if v < Ratio::new(2, p - 1) {
        return Err(Error::Domain { what: "alpha - 1", ord: v, required: format!(">= {}", Ratio::new(2, p - 1)) });
    }
    Ok(())
}

/// Extra `p`-digits the trace must carry beyond the `2n` needed to read `c`.
fn guard_digits(n: u32) -> i64 {
    2 * n as i64 + 5
}

fn symbol_from_trace(ctx: &CyclotomicContext, integrand: &KElement) -> Result<SymbolValue> {
    let n = ctx.n;
    let tr = integrand.trace_abs();
    let need = 2 * n as i64 + guard_digits(n);
    if tr.prec() < need {
        return Err(Error::Precision(format!(
            "trace known mod p^{} but p^{} is required before dividing by p^{n}",
            tr.prec(),
            need
        )));
    }
    if let Some(v) = tr.valuation() {
        if v < n as i64 {
            return Err(Error::NonIntegralTrace { n, ord: Ratio::from(v) });
        }
    }
    let c = tr.scale_p(-(n as i64)).residue(n)?;
    Ok(SymbolValue::new(c.to_i64().expect("c < p^n"), ctx.modulus()))
}

fn check_same(ctx: &CyclotomicContext, x: &KElement) -> Result<()> {
    if x.field() != &ctx.field {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// `c = Tr(zeta/h'(pi) * g'(pi)/beta * log alpha) / p^n` for integral
/// `beta = g(pi)`. Units are the intended input; `beta = pi` with `g = T`
/// recovers [`iwasawa_prime`].
pub fn sen_symbol(ctx: &CyclotomicContext, alpha: &KElement, beta: &KElement, g: &Poly) -> Result<SymbolValue> {
    check_same(ctx, alpha)?;
    check_same(ctx, beta)?;
    check_symbol_domain(alpha)?;
    if beta.is_zero() {
        return Err(Error::IndistinguishableFromZero { prec: beta.prec() });
    }
    if !beta.is_integral() {
        return Err(Error::NotIntegral { ord: beta.ord()? });
    }
    if g.eval(&ctx.pi) != *beta {
        return Err(Error::LiftMismatch);
    }
    let log_a = plog(alpha)?;
    let w = &(&ctx.zeta_over_dh * &g.eval_deriv(&ctx.pi)) * &beta.inv()?;
    symbol_from_trace(ctx, &(&w * &log_a))
}

/// `(alpha, zeta)`: `c = Tr(log alpha) / p^n`.
pub fn artin_hasse(ctx: &CyclotomicContext, alpha: &KElement) -> Result<SymbolValue> {
    check_same(ctx, alpha)?;
    check_symbol_domain(alpha)?;
    symbol_from_trace(ctx, &plog(alpha)?)
}

/// `(alpha, pi)`: `c = Tr(zeta / (h'(pi) pi) * log alpha) / p^n`.
pub fn iwasawa_prime(ctx: &CyclotomicContext, alpha: &KElement) -> Result<SymbolValue> {
    check_same(ctx, alpha)?;
    check_symbol_domain(alpha)?;
    let w = ctx.zeta_over_dh.div(&ctx.pi)?;
    symbol_from_trace(ctx, &(&w * &plog(alpha)?))
}

/// `(alpha, pi)` independent of the presentation.
///
/// The `g = T` formula changes with the choice of `pi` when
/// `ord(alpha - 1) = 2/(p-1)` exactly. On that boundary, with
/// `1 - alpha = pi^m w` and `p` not dividing `m`, the Steinberg relation
/// `{alpha, 1 - alpha} = 0` gives `m (alpha, pi) = -(alpha, w)` instead.
pub fn prime_slot(ctx: &CyclotomicContext, alpha: &KElement) -> Result<SymbolValue> {
    check_same(ctx, alpha)?;
    check_symbol_domain(alpha)?;
    let field = &ctx.field;
    let x = &field.int_prec(1, alpha.prec()) - alpha;
    let Some(m) = x.valuation_pi() else {
        return Ok(ctx.zero_symbol());
    };
    let p = field.p() as i64;
    let on_boundary = m * (p - 1) == 2 * field.e() as i64;
    if !on_boundary || m % p == 0 {
        return iwasawa_prime(ctx, alpha);
    }
    let w = x.div(&field.pi_prec(x.prec() + m).pow(m)?)?;
    let s = sen_symbol(ctx, alpha, &w, &canonical_poly_lift(&w)?)?;
    let modulus = ctx.modulus() as i64;
    let m_inv = crate::padic::mod_inverse(&m.into(), &modulus.into()).expect("p does not divide m");
    Ok(s.neg().mul_int(m_inv.to_i64().expect("below the modulus")))
}

/// `(alpha, beta)` for any nonzero `beta = pi^m u`:
/// `m (alpha, pi) + (alpha, u)`, the second term by Sen's formula with the
/// canonical lift of `u`.
pub fn hilbert_symbol(ctx: &CyclotomicContext, alpha: &KElement, beta: &KElement) -> Result<SymbolValue> {
    check_same(ctx, beta)?;
    let m = beta.valuation_pi().ok_or(Error::IndistinguishableFromZero { prec: beta.prec() })?;
    let (prime_part, u) = if m == 0 {
        (ctx.zero_symbol(), beta.clone())
    } else {
        let pi_m = ctx.field.pi_prec(beta.prec() + m.abs()).pow(m)?;
        (prime_slot(ctx, alpha)?.mul_int(m), beta.div(&pi_m)?)
    };
    let lift = canonical_poly_lift(&u)?;
    Ok(prime_part.add(&sen_symbol(ctx, alpha, &u, &lift)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldDesc};

    fn f0() -> Field {
        make_field(FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1])).unwrap()
    }

    #[test]
    fn fixture_values() {
        let k = f0();
        let ctx = CyclotomicContext::new(&k).unwrap();
        let four = k.int(4);
        let zeta = k.zeta().unwrap();
        let h = Poly::from_ints(&k, &[1, 1], k.work_prec());
        assert_eq!(sen_symbol(&ctx, &four, &zeta, &h).unwrap().c(), 2);
        assert_eq!(artin_hasse(&ctx, &four).unwrap().c(), 2);
        assert_eq!(iwasawa_prime(&ctx, &four).unwrap().c(), 1);
        assert_eq!(prime_slot(&ctx, &four).unwrap().c(), 1);
        let minus_one = Poly::from_ints(&k, &[-1], k.work_prec());
        assert_eq!(sen_symbol(&ctx, &four, &k.int(-1), &minus_one).unwrap().c(), 0);
        let z2 = zeta.square();
        let lift = canonical_poly_lift(&z2).unwrap();
        assert_eq!(sen_symbol(&ctx, &four, &z2, &lift).unwrap().c(), 1);
        assert_eq!(hilbert_symbol(&ctx, &four, &(&k.pi() * &zeta)).unwrap().c(), 0);
        let t = Poly::from_ints(&k, &[0, 1], k.work_prec());
        assert_eq!(sen_symbol(&ctx, &four, &k.pi(), &t).unwrap().c(), 1);
        assert_eq!(hilbert_symbol(&ctx, &four, &k.int(-4)).unwrap().c(), 0);
    }

    #[test]
    fn domain_and_lift_errors() {
        let k = f0();
        let ctx = CyclotomicContext::new(&k).unwrap();
        let zeta = k.zeta().unwrap();
        assert!(matches!(artin_hasse(&ctx, &zeta), Err(Error::Domain { .. })));
        let wrong = Poly::from_ints(&k, &[0, 1], k.work_prec());
        assert_eq!(sen_symbol(&ctx, &k.int(4), &zeta, &wrong).unwrap_err(), Error::LiftMismatch);
        assert!(hilbert_symbol(&ctx, &k.int(4), &k.int_prec(0, 10)).is_err());
    }

    #[test]
    fn symbol_json_shape() {
        let s = SymbolValue::new(-1, 3);
        assert_eq!(s.c(), 2);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"c":2,"modulus":3,"zeta_power":"zeta^2"}"#);
    }
}
