//! Finite windows of `O_{K{{T}}}` and the residue maps on decomposable forms
//! and symbols.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, KElement};
use crate::forms::{exp1, exp2_eval, DiagramCheck, FormExpression};
use crate::reciprocity::{hilbert_symbol, CyclotomicContext};

/// `sum_{|i| <= M} a_i T^i` with integral `a_i`; products that leave the
/// window are errors, never truncated.
#[derive(Clone)]
pub struct LaurentElement {
    field: Field,
    trunc: i64,
    coeffs: BTreeMap<i64, KElement>,
}

impl LaurentElement {
    pub fn zero(field: &Field, trunc: i64) -> Self {
        LaurentElement { field: field.clone(), trunc, coeffs: BTreeMap::new() }
    }

    pub fn from_terms(field: &Field, trunc: i64, terms: impl IntoIterator<Item = (i64, KElement)>) -> Result<Self> {
        let mut out = Self::zero(field, trunc);
        for (i, a) in terms {
            if a.field() != field {
                return Err(Error::FieldMismatch);
            }
            if !a.is_integral() {
                return Err(Error::NotIntegral { ord: a.ord()? });
            }
            out.add_term(i, a)?;
        }
        Ok(out)
    }

    pub fn constant(x: &KElement, trunc: i64) -> Result<Self> {
        Self::from_terms(x.field(), trunc, [(0, x.clone())])
    }

    /// `T^k`.
    pub fn t_power(field: &Field, k: i64, trunc: i64) -> Result<Self> {
        Self::from_terms(field, trunc, [(k, field.one())])
    }

    fn add_term(&mut self, i: i64, a: KElement) -> Result<()> {
        if a.is_zero() {
            return Ok(());
        }
        if i.abs() > self.trunc {
            return Err(Error::WindowOverflow { exponent: i, trunc: self.trunc });
        }
        let sum = match self.coeffs.remove(&i) {
            Some(b) => &b + &a,
            None => a,
        };
        if !sum.is_zero() {
            self.coeffs.insert(i, sum);
        }
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn coeff(&self, i: i64) -> KElement {
        self.coeffs.get(&i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &KElement)> {
        self.coeffs.iter().map(|(&i, a)| (i, a))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Whether the element is a constant (no `T`).
    pub fn is_t_free(&self) -> bool {
        self.coeffs.keys().all(|&i| i == 0)
    }

    /// Whether the element is exactly `T`.
    pub fn is_t(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&1).is_some_and(|a| *a == self.field.one())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.trunc = self.trunc.min(other.trunc);
        for (i, a) in other.terms() {
            out.add_term(i, a.clone())?;
        }
        if let Some((&i, _)) = out.coeffs.iter().find(|(i, _)| i.abs() > out.trunc) {
            return Err(Error::WindowOverflow { exponent: i, trunc: out.trunc });
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        LaurentElement {
            field: self.field.clone(),
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|(&i, a)| (i, -a)).collect(),
        }
    }

    pub fn scale(&self, x: &KElement) -> Self {
        let mut out = Self::zero(&self.field, self.trunc);
        for (i, a) in self.terms() {
            out.add_term(i, a * x).expect("scaling stays in the window");
        }
        out
    }
}

impl PartialEq for LaurentElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.add(&other.neg()).map(|d| d.is_zero()).unwrap_or(false)
    }
}

/// `coeff@exponent` list.
impl fmt::Display for LaurentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms().map(|(i, a)| format!("{a}@{i}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl fmt::Debug for LaurentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (|i| <= {})", self.trunc)
    }
}

/// Product inside the common window.
pub fn laurent_mul(x: &LaurentElement, y: &LaurentElement) -> Result<LaurentElement> {
    if x.field != y.field {
        return Err(Error::FieldMismatch);
    }
    let mut out = LaurentElement::zero(&x.field, x.trunc.min(y.trunc));
    for (i, a) in x.terms() {
        for (j, b) in y.terms() {
            out.add_term(i + j, a * b)?;
        }
    }
    Ok(out)
}

/// A slot of a wedge or symbol: a `T`-free unit or the variable `T`.
#[derive(Clone, Debug)]
pub enum Slot {
    Unit(KElement),
    T,
}

/// Forms of degree 1 (`f dpi + g dT/T`) or 2 (`sum c_k dlog b_k ^ dT/T`), the
/// latter in normal form with `dT/T` last.
#[derive(Clone, Debug)]
pub struct HLForm {
    field: Field,
    degree: usize,
    dpi_part: LaurentElement,
    dt_part: LaurentElement,
    wedge_terms: Vec<(LaurentElement, KElement)>,
}

impl HLForm {
    pub fn degree1(dpi_part: LaurentElement, dt_part: LaurentElement) -> Result<Self> {
        if dpi_part.field != dt_part.field {
            return Err(Error::FieldMismatch);
        }
        let field = dpi_part.field.clone();
        Ok(HLForm { field, degree: 1, dpi_part, dt_part, wedge_terms: Vec::new() })
    }

    pub fn zero2(field: &Field, trunc: i64) -> Self {
        HLForm {
            field: field.clone(),
            degree: 2,
            dpi_part: LaurentElement::zero(field, trunc),
            dt_part: LaurentElement::zero(field, trunc),
            wedge_terms: Vec::new(),
        }
    }

    /// `c dlog(first) ^ dlog(second)`, rewritten with `dT/T` last. A wedge of
    /// two `T`-free logarithmic differentials is zero, since both are
    /// multiples of `dpi`.
    pub fn wedge(c: LaurentElement, first: Slot, second: Slot) -> Result<Self> {
        let mut out = Self::zero2(&c.field, c.trunc);
        let (sign, b) = match (first, second) {
            (Slot::Unit(b), Slot::T) => (1, b),
            (Slot::T, Slot::Unit(b)) => (-1, b),
            _ => return Ok(out),
        };
        if !b.is_unit() {
            return Err(Error::NotUnit { ord: b.ord()? });
        }
        let c = if sign < 0 { c.neg() } else { c };
        out.wedge_terms.push((c, b));
        Ok(out)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dpi_part(&self) -> &LaurentElement {
        &self.dpi_part
    }

    pub fn dt_part(&self) -> &LaurentElement {
        &self.dt_part
    }

    pub fn wedge_terms(&self) -> &[(LaurentElement, KElement)] {
        &self.wedge_terms
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::OutOfModeledDomain("adding forms of different degree".into()));
        }
        let mut out = self.clone();
        out.dpi_part = self.dpi_part.add(&other.dpi_part)?;
        out.dt_part = self.dt_part.add(&other.dt_part)?;
        out.wedge_terms.extend(other.wedge_terms.iter().cloned());
        Ok(out)
    }
}

/// Residue of a form.
#[derive(Clone, Debug)]
pub enum Residue {
    /// Degree 1: the `T^0` coefficient of the `dT/T` part.
    Function(KElement),
    /// Degree 2: `sum c_k(0) dlog b_k` over `K`.
    Form(FormExpression),
}

/// `omega dT/T -> omega`, reading off the `T^0` coefficient.
pub fn residue_form(omega: &HLForm) -> Result<Residue> {
    match omega.degree {
        1 => Ok(Residue::Function(omega.dt_part.coeff(0))),
        _ => {
            let mut expr = FormExpression::new(&omega.field);
            for (c, b) in &omega.wedge_terms {
                let c0 = c.coeff(0);
                if !c0.is_zero() {
                    expr.push(c0, b.clone())?;
                }
            }
            Ok(Residue::Form(expr))
        }
    }
}

/// `{x_1, ..., x_q}` with entries in `K{{T}}`.
#[derive(Clone, Debug)]
pub struct LaurentSymbol {
    entries: Vec<LaurentElement>,
}

impl LaurentSymbol {
    pub fn new(entries: Vec<LaurentElement>) -> Self {
        LaurentSymbol { entries }
    }

    pub fn entries(&self) -> &[LaurentElement] {
        &self.entries
    }

    /// Moves a single `T` entry to the end by transpositions, each flipping
    /// the sign. Every other entry must be `T`-free.
    pub fn to_t_last(&self) -> Result<(i64, LaurentSymbol)> {
        let t_slots: Vec<usize> = (0..self.entries.len()).filter(|&i| self.entries[i].is_t()).collect();
        let decomposable = t_slots.len() == 1
            && self.entries.iter().enumerate().all(|(i, x)| i == t_slots[0] || x.is_t_free());
        if !decomposable {
            return Err(Error::OutOfModeledDomain(
                "symbol residue is only modeled for {x_1, ..., x_q, T} with T-free x_i".into(),
            ));
        }
        let k = t_slots[0];
        let moves = self.entries.len() - 1 - k;
        let mut entries = self.entries.clone();
        let t = entries.remove(k);
        entries.push(t);
        Ok((if moves % 2 == 0 { 1 } else { -1 }, LaurentSymbol { entries }))
    }
}

/// `{x_1, ..., x_q, T} -> {x_1, ..., x_q}`.
pub fn residue_symbol(sym: &LaurentSymbol) -> Result<Vec<KElement>> {
    let n = sym.entries.len();
    let ok = n >= 1
        && sym.entries[n - 1].is_t()
        && sym.entries[..n - 1].iter().all(|x| x.is_t_free());
    if !ok {
        return Err(Error::OutOfModeledDomain(
            "symbol residue is only modeled for {x_1, ..., x_q, T} with T-free x_i".into(),
        ));
    }
    Ok(sym.entries[..n - 1].iter().map(|x| x.coeff(0)).collect())
}

/// Order of the wedge/symbol slots fed to [`residue_diagram_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WedgeOrder {
    /// `a dlog b ^ dT/T` and `{exp(eta a), b, T}`.
    TLast,
    /// `a dT/T ^ dlog b` and `{exp(eta a), T, b}`.
    TFirst,
}

/// Residue then exponential on forms versus exponential then residue on
/// symbols, both observed through the Hilbert pairing.
pub fn residue_diagram_check(
    ctx: &CyclotomicContext,
    eta: &KElement,
    a: &KElement,
    b: &KElement,
    order: WedgeOrder,
    trunc: i64,
) -> Result<DiagramCheck> {
    let field = ctx.field();
    let coeff = LaurentElement::constant(a, trunc)?;
    let (s1, s2) = match order {
        WedgeOrder::TLast => (Slot::Unit(b.clone()), Slot::T),
        WedgeOrder::TFirst => (Slot::T, Slot::Unit(b.clone())),
    };
    let omega = HLForm::wedge(coeff, s1, s2)?;
    let top = match residue_form(&omega)? {
        Residue::Form(expr) => exp2_eval(ctx, eta, &expr)?,
        Residue::Function(_) => unreachable!("wedge forms have degree 2"),
    };
    let x = LaurentElement::constant(&exp1(eta, a)?, trunc)?;
    let bb = LaurentElement::constant(b, trunc)?;
    let t = LaurentElement::t_power(field, 1, trunc)?;
    let sym = match order {
        WedgeOrder::TLast => LaurentSymbol::new(vec![x, bb, t]),
        WedgeOrder::TFirst => LaurentSymbol::new(vec![x, t, bb]),
    };
    let (sign, sym) = sym.to_t_last()?;
    let res = residue_symbol(&sym)?;
    let bottom = hilbert_symbol(ctx, &res[0], &res[1])?.mul_int(sign);
    Ok(DiagramCheck { top, bottom })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldDesc};

    fn f0() -> Field {
        make_field(FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1])).unwrap()
    }

    #[test]
    fn multiplication_in_window() {
        let k = f0();
        let t = LaurentElement::t_power(&k, 1, 4).unwrap();
        let x = t.add(&LaurentElement::t_power(&k, -1, 4).unwrap()).unwrap();
        let prod = laurent_mul(&x, &t).unwrap();
        let expected = LaurentElement::t_power(&k, 2, 4).unwrap().add(&LaurentElement::constant(&k.one(), 4).unwrap()).unwrap();
        assert_eq!(prod, expected);
        let one = LaurentElement::constant(&k.one(), 4).unwrap();
        assert_eq!(laurent_mul(&x, &one).unwrap(), x);
        let t3 = LaurentElement::t_power(&k, 3, 4).unwrap();
        assert!(matches!(laurent_mul(&t3, &t3), Err(Error::WindowOverflow { exponent: 6, trunc: 4 })));
    }

    #[test]
    fn residue_of_forms() {
        let k = f0();
        let zeta = k.zeta().unwrap();
        let dt = LaurentElement::from_terms(&k, 3, [(-1, k.pi()), (0, k.int(5)), (1, zeta.clone())]).unwrap();
        let w = HLForm::degree1(LaurentElement::zero(&k, 3), dt).unwrap();
        match residue_form(&w).unwrap() {
            Residue::Function(x) => assert_eq!(x, k.int(5)),
            other => panic!("{other:?}"),
        }
        let no_dt = HLForm::degree1(LaurentElement::constant(&k.one(), 3).unwrap(), LaurentElement::zero(&k, 3)).unwrap();
        match residue_form(&no_dt).unwrap() {
            Residue::Function(x) => assert!(x.is_zero()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn residue_of_symbols() {
        let k = f0();
        let c = |x: KElement| LaurentElement::constant(&x, 3).unwrap();
        let t = LaurentElement::t_power(&k, 1, 3).unwrap();
        let zeta = k.zeta().unwrap();
        let res = residue_symbol(&LaurentSymbol::new(vec![c(k.int(4)), c(zeta.clone()), t.clone()])).unwrap();
        assert_eq!(res, vec![k.int(4), zeta.clone()]);
        let tv = laurent_mul(&t, &c(k.int(2))).unwrap();
        assert!(residue_symbol(&LaurentSymbol::new(vec![c(k.int(4)), tv, t])).is_err());
    }

    #[test]
    fn diagram_fixture() {
        let k = f0();
        let ctx = CyclotomicContext::new(&k).unwrap();
        let zeta = k.zeta().unwrap();
        let three = k.int(3);
        let r = residue_diagram_check(&ctx, &three, &k.one(), &zeta, WedgeOrder::TLast, 4).unwrap();
        assert_eq!((r.top.c(), r.bottom.c()), (2, 2));
        let r = residue_diagram_check(&ctx, &three, &k.one(), &zeta, WedgeOrder::TFirst, 4).unwrap();
        assert_eq!((r.top.c(), r.bottom.c()), (1, 1));
        let r = residue_diagram_check(&ctx, &three, &k.zero(), &zeta, WedgeOrder::TLast, 4).unwrap();
        assert!(r.top.is_trivial() && r.bottom.is_trivial());
    }
}
