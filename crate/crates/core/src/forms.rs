//! The differential module `O_K dpi / (E'(pi) dpi)` and the exponential maps
//! on forms, observed through the Hilbert pairing.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::analytic::{check_eta, exp_eta, EtaGuard};
use crate::embed::SubfieldEmbedding;
use crate::error::{Error, Result};
use crate::field::{Field, KElement};
use crate::poly::canonical_poly_lift;
use crate::reciprocity::{hilbert_symbol, CyclotomicContext, SymbolValue};

/// A class `a dpi`, with `a` kept in canonical form: the basis coordinate of
/// `pi^i u^j` is reduced modulo `p^(m_i)`, `m_i = ceil((delta - i)/e)`,
/// `delta = v_pi(E'(pi))`.
#[derive(Clone, Debug)]
pub struct DifferentialForm {
    field: Field,
    coeff: Vec<BigInt>,
}

fn moduli(field: &Field) -> Vec<i64> {
    let (e, f) = (field.e() as i64, field.f());
    let delta = field.different_exponent();
    (0..field.degree())
        .map(|idx| Integer::div_ceil(&(delta - (idx / f) as i64), &e).max(0))
        .collect()
}

impl DifferentialForm {
    pub fn zero(field: &Field) -> Self {
        DifferentialForm { field: field.clone(), coeff: vec![BigInt::from(0); field.degree()] }
    }

    /// The class of `a dpi`.
    pub fn from_coefficient(a: &KElement) -> Result<Self> {
        let field = a.field();
        if !a.is_integral() {
            return Err(Error::NotIntegral { ord: a.ord()? });
        }
        let ms = moduli(field);
        let need = ms.iter().copied().max().unwrap_or(0);
        if a.prec() < need {
            return Err(Error::Precision(format!("form coefficient known mod p^{}, need p^{need}", a.prec())));
        }
        let ints = a.integer_coords()?;
        let coeff = ints.iter().zip(&ms).map(|(c, &m)| c.mod_floor(&field.pow_p(m))).collect();
        Ok(DifferentialForm { field: field.clone(), coeff })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// The canonical coefficient as an element of `K`.
    pub fn coefficient(&self) -> KElement {
        KElement::from_raw(&self.field, 0, self.coeff.clone(), self.field.work_prec())
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.iter().all(|c| c == &BigInt::from(0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::from_coefficient(&(&self.coefficient() + &other.coefficient()))
    }

    /// `x * omega` for integral `x`.
    pub fn scale(&self, x: &KElement) -> Result<Self> {
        Self::from_coefficient(&(x * &self.coefficient()))
    }
}

impl PartialEq for DifferentialForm {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeff == other.coeff
    }
}

/// `db = B'(pi) dpi` for the canonical lift `B` of `b`.
pub fn d(b: &KElement) -> Result<DifferentialForm> {
    let lift = canonical_poly_lift(b)?;
    DifferentialForm::from_coefficient(&lift.eval_deriv(&b.field().pi()))
}

/// `db / b` for a unit `b`.
pub fn dlog(b: &KElement) -> Result<DifferentialForm> {
    if !b.is_unit() {
        return Err(Error::NotUnit { ord: b.ord()? });
    }
    let lift = canonical_poly_lift(b)?;
    DifferentialForm::from_coefficient(&(&lift.eval_deriv(&b.field().pi()) * &b.inv()?))
}

/// `sum a_i db_i / b_i` with unit `b_i`.
#[derive(Clone, Debug)]
pub struct FormExpression {
    field: Field,
    terms: Vec<(KElement, KElement)>,
}

impl FormExpression {
    pub fn new(field: &Field) -> Self {
        FormExpression { field: field.clone(), terms: Vec::new() }
    }

    /// Appends `a db/b`.
    pub fn push(&mut self, a: KElement, b: KElement) -> Result<()> {
        if a.field() != &self.field || b.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        if !b.is_unit() {
            return Err(Error::NotUnit { ord: b.ord()? });
        }
        if !a.is_integral() {
            return Err(Error::NotIntegral { ord: a.ord()? });
        }
        self.terms.push((a, b));
        Ok(())
    }

    pub fn single(a: KElement, b: KElement) -> Result<Self> {
        let mut e = Self::new(a.field());
        e.push(a, b)?;
        Ok(e)
    }

    /// The exact form `a db = (a b) db/b`.
    pub fn exact(a: &KElement, b: &KElement) -> Result<Self> {
        Self::single(a * b, b.clone())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> &[(KElement, KElement)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The class of the expression.
    pub fn reduce(&self) -> Result<DifferentialForm> {
        let mut acc = KElement::zero(&self.field, self.field.work_prec());
        for (a, b) in &self.terms {
            acc = &acc + &(a * &dlog(b)?.coefficient());
        }
        DifferentialForm::from_coefficient(&acc)
    }

    /// Replaces term `i`, `a db/b`, by `a db1/b1 + a db2/b2` with `b = b1 b2`.
    pub fn split_term(&self, i: usize, b1: &KElement) -> Result<Self> {
        let (a, b) = self.terms[i].clone();
        let b2 = b.div(b1)?;
        let mut out = Self::new(&self.field);
        for (j, (x, y)) in self.terms.iter().enumerate() {
            if j == i {
                out.push(a.clone(), b1.clone())?;
                out.push(a.clone(), b2.clone())?;
            } else {
                out.push(x.clone(), y.clone())?;
            }
        }
        Ok(out)
    }
}

/// `exp(eta a)` under the theorem guard `ord(eta) >= 2/(p-1)`.
pub fn exp1(eta: &KElement, a: &KElement) -> Result<KElement> {
    exp_eta(eta, a, EtaGuard::Theorem)
}

/// Pairing image of `exp_eta^(2)(sum a_i db_i/b_i) = sum {exp(eta a_i), b_i}`.
pub fn exp2_eval(ctx: &CyclotomicContext, eta: &KElement, expr: &FormExpression) -> Result<SymbolValue> {
    check_eta(eta, EtaGuard::Theorem)?;
    let mut acc = ctx.zero_symbol();
    for (a, b) in expr.terms() {
        let alpha = exp1(eta, a)?;
        acc = acc.add(&hilbert_symbol(ctx, &alpha, b)?);
    }
    Ok(acc)
}

/// `exp_p^(2)(p da) = {exp(p^2 a), a}`; elements of `p dO_K` should pair
/// trivially.
pub fn kernel_check(ctx: &CyclotomicContext, a: &KElement) -> Result<SymbolValue> {
    let p = ctx.field().int(ctx.field().p());
    let expr = FormExpression::exact(&p, a)?;
    exp2_eval(ctx, &p, &expr)
}

/// `sum Tr_{K/k}(a_i) db_i/b_i` for forms whose `b_i` lie in `k`.
pub fn trace_form(expr: &FormExpression, emb: &SubfieldEmbedding) -> Result<FormExpression> {
    let mut out = FormExpression::new(emb.sub());
    for (a, b) in expr.terms() {
        let b_small = emb.preimage(b)?;
        out.push(emb.relative_trace(a)?, b_small)?;
    }
    Ok(out)
}

/// Both routes around the norm/trace square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagramCheck {
    pub top: SymbolValue,
    pub bottom: SymbolValue,
}

impl DiagramCheck {
    pub fn holds(&self) -> bool {
        self.top == self.bottom
    }
}

/// Compares `(exp(eta a), b)` over `K` with `(exp(eta Tr a), b)` over `k`,
/// the latter reached through [`trace_form`].
pub fn norm_diagram_check(
    big: &CyclotomicContext,
    small: &CyclotomicContext,
    emb: &SubfieldEmbedding,
    eta: &KElement,
    a: &KElement,
    b: &KElement,
) -> Result<DiagramCheck> {
    if emb.embed(small.zeta()) != *big.zeta() {
        return Err(Error::OutOfModeledDomain("contexts use different roots of unity".into()));
    }
    let eta_big = emb.embed(eta);
    let expr = FormExpression::single(a.clone(), emb.embed(b))?;
    let top = exp2_eval(big, &eta_big, &expr)?;
    let bottom = exp2_eval(small, eta, &trace_form(&expr, emb)?)?;
    Ok(DiagramCheck { top, bottom })
}

/// The coefficient `a` with `expr = a dzeta/zeta`; requires `pi = zeta - 1`.
pub fn rewrite_to_zeta(ctx: &CyclotomicContext, expr: &FormExpression) -> Result<KElement> {
    let field = ctx.field();
    if &(ctx.zeta() - &field.one()) != ctx.pi() {
        return Err(Error::OutOfModeledDomain("presentation mismatch: pi != zeta - 1".into()));
    }
    let coeff = expr.reduce()?.coefficient();
    Ok(DifferentialForm::from_coefficient(&(&coeff * ctx.zeta()))?.coefficient())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldDesc};

    fn f0() -> Field {
        make_field(FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1])).unwrap()
    }

    #[test]
    fn differentials_in_f0() {
        let k = f0();
        assert_eq!(d(&k.pi()).unwrap(), DifferentialForm::from_coefficient(&k.one()).unwrap());
        assert!(d(&k.pi().square()).unwrap().is_zero());
        let zeta = k.zeta().unwrap();
        let expected = DifferentialForm::from_coefficient(&zeta.inv().unwrap()).unwrap();
        assert_eq!(dlog(&zeta).unwrap(), expected);
    }

    #[test]
    fn exp2_fixture() {
        let k = f0();
        let ctx = CyclotomicContext::new(&k).unwrap();
        let three = k.int(3);
        let expr = FormExpression::single(k.one(), k.zeta().unwrap()).unwrap();
        assert_eq!(exp2_eval(&ctx, &three, &expr).unwrap().c(), 2);
        assert!(exp2_eval(&ctx, &three, &FormExpression::new(&k)).unwrap().is_trivial());
        assert!(kernel_check(&ctx, &k.zeta().unwrap()).unwrap().is_trivial());
        assert!(kernel_check(&ctx, &k.one()).unwrap().is_trivial());
    }

    #[test]
    fn rewrite_examples() {
        let k = f0();
        let ctx = CyclotomicContext::new(&k).unwrap();
        let zeta = k.zeta().unwrap();
        let expr = FormExpression::single(k.one(), zeta.clone()).unwrap();
        assert_eq!(rewrite_to_zeta(&ctx, &expr).unwrap(), k.one());
    }
}
