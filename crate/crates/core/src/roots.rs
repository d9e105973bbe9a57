//! Newton lifting, roots of unity, Teichmüller representatives and `p`-th
//! roots.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::ToPrimitive;

use crate::analytic::{pexp, plog};
use crate::error::{Error, Result};
use crate::field::{Field, KElement};
use crate::padic::mod_inverse;
use crate::poly::Poly;

/// Newton iteration from `x0`; requires `ord f(x0) > 2 ord f'(x0)`.
pub fn hensel_root(f: &Poly, x0: &KElement) -> Result<KElement> {
    let e = x0.field().e() as i64;
    let fx = f.eval(x0);
    let dfx = f.eval_deriv(x0);
    let vf = fx.valuation_pi_capped();
    let Some(vd) = dfx.valuation_pi() else {
        return Err(Error::NoQuadraticConvergence { f_ord: Ratio::new(vf, e), df_ord: Ratio::new(dfx.valuation_pi_capped(), e) });
    };
    if vf <= 2 * vd {
        return Err(Error::NoQuadraticConvergence { f_ord: Ratio::new(vf, e), df_ord: Ratio::new(vd, e) });
    }
    let coeff_prec = f.coeffs().iter().map(|c| c.prec()).min().unwrap_or(x0.prec());
    let mut x = x0.assume_prec(coeff_prec);
    for _ in 0..256 {
        let fx = f.eval(&x);
        if fx.is_zero() {
            return Ok(x);
        }
        let dx = fx.div(&f.eval_deriv(&x))?;
        if dx.is_zero() {
            return Ok(x);
        }
        x = &x - &dx;
    }
    Err(Error::Precision("Newton iteration did not stabilise".into()))
}

/// A primitive `p^n`-th root of unity, found by a digit search for an
/// approximate root of the cyclotomic polynomial followed by Newton lifting.
pub fn find_zeta(field: &Field, n: u32) -> Option<KElement> {
    if n == 0 {
        return Some(field.one());
    }
    let prec = field.work_prec() + 8;
    let phi = Poly::cyclotomic(field, n, prec);
    let digits = field.residue_digits(prec);
    let pi = field.pi_prec(prec);
    let max_depth = 2 * field.e() as i64 * n as i64 + 4;
    zeta_search(&phi, &digits, &pi, KElement::zero(field, prec), 0, max_depth)
        .map(|z| z.reduce_prec(field.work_prec()))
}

fn zeta_search(
    phi: &Poly,
    digits: &[KElement],
    pi: &KElement,
    x: KElement,
    k: i64,
    max_depth: i64,
) -> Option<KElement> {
    let fx = phi.eval(&x);
    if fx.valuation_pi_capped() < k {
        return None;
    }
    if k > 0 && hensel_ready(phi, &x) {
        return hensel_root(phi, &x).ok();
    }
    if k >= max_depth {
        return None;
    }
    let step = pi.pow_u(k as u64);
    digits.iter().find_map(|d| zeta_search(phi, digits, pi, &x + &(d * &step), k + 1, max_depth))
}

fn hensel_ready(f: &Poly, x: &KElement) -> bool {
    match f.eval_deriv(x).valuation_pi() {
        Some(vd) => f.eval(x).valuation_pi_capped() > 2 * vd,
        None => false,
    }
}

/// The Teichmüller representative of a unit.
pub fn teichmuller(x: &KElement) -> Result<KElement> {
    if !x.is_unit() {
        return Err(Error::NotUnit { ord: x.ord()? });
    }
    let field = x.field();
    let q = field.residue_size() as usize;
    let prec = x.prec().max(field.work_prec());
    let mut coeffs = vec![0i64; q];
    coeffs[0] = -1;
    coeffs[q - 1] = 1;
    let f = Poly::from_ints(field, &coeffs, prec);
    Ok(hensel_root(&f, x)?.reduce_prec(x.prec()))
}

/// Outcome of a `p`-th power test.
#[derive(Clone, Debug)]
pub struct PthPowerTest {
    pub is_power: bool,
    pub witness: Option<KElement>,
}

/// Search for `y` with `v_pi(w1 - y^p) > e p / (p - 1)`, `w1` a principal
/// unit. Only `y = 1 + sum d_i pi^i` are tried, digit by digit, keeping a
/// prefix while `w1 - y^p` vanishes to the level forced by the prefix.
fn principal_root_approx(w1: &KElement) -> Result<Option<KElement>> {
    let field = w1.field();
    let (p, e) = (field.p() as i64, field.e() as i64);
    let target = e * p / (p - 1) + 1;
    if e * w1.prec() < target {
        return Err(Error::Precision(format!(
            "p-th power test needs v_pi precision {target}, have {}",
            e * w1.prec()
        )));
    }
    // enumeration depth cap: ceil(e p / (p - 1)) + 1 digits
    let max_depth = (e * p + p - 2) / (p - 1) + 1;
    let digits = field.residue_digits(w1.prec());
    let pi = field.pi_prec(w1.prec());
    let y = field.int_prec(1, w1.prec());
    root_search(w1, &digits, &pi, y, 1, target, max_depth)
}

fn root_search(
    w1: &KElement,
    digits: &[KElement],
    pi: &KElement,
    y: KElement,
    k: i64,
    target: i64,
    max_depth: i64,
) -> Result<Option<KElement>> {
    let field = w1.field();
    let (p, e) = (field.p() as i64, field.e() as i64);
    let lev = (e + k).min(p * k);
    let diff = w1 - &y.pow_u(p as u64);
    let vd = diff.valuation_pi_capped();
    if diff.is_zero() && e * diff.prec() < lev.min(target) {
        return Err(Error::Precision("p-th power test lost precision".into()));
    }
    if lev >= target {
        return Ok((vd >= target).then_some(y));
    }
    if vd < lev || k > max_depth {
        return Ok(None);
    }
    let step = pi.pow_u(k as u64);
    for d in digits {
        if let Some(r) = root_search(w1, digits, pi, &y + &(d * &step), k + 1, target, max_depth)? {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

fn split_unit(u: &KElement) -> Result<(i64, KElement)> {
    let v = u.valuation_pi().ok_or(Error::IndistinguishableFromZero { prec: u.prec() })?;
    if v == 0 {
        return Ok((0, u.clone()));
    }
    let field = u.field();
    let w = u.div(&field.pi_prec(u.prec() + v).pow(v)?)?;
    Ok((v, w))
}

/// A `p`-th root of `u`, or `None` when `u` is not a `p`-th power.
pub fn pth_root(u: &KElement) -> Result<Option<KElement>> {
    let field = u.field();
    let p = field.p();
    let (v, w) = split_unit(u)?;
    if v.rem_euclid(p as i64) != 0 {
        return Ok(None);
    }
    let omega = teichmuller(&w)?;
    let w1 = w.div(&omega)?;
    let Some(y) = principal_root_approx(&w1)? else {
        return Ok(None);
    };
    // z = w1 / y^p has ord(z - 1) > p/(p-1); its root is exp(log(z)/p)
    let z = w1.div(&y.pow_u(p))?;
    let root1 = &y * &pexp(&plog(&z)?.scale_p(-1))?;
    let q1 = BigInt::from(field.residue_size() - 1);
    let m = mod_inverse(&BigInt::from(p), &q1).expect("p is prime to q - 1").to_u64().unwrap();
    let omega_root = omega.pow_u(m);
    let mut root = &omega_root * &root1;
    if v != 0 {
        root = &root * &field.pi_prec(u.prec()).pow(v / p as i64)?;
    }
    Ok(Some(root))
}

pub fn pth_power_test(u: &KElement) -> Result<PthPowerTest> {
    let witness = pth_root(u)?;
    Ok(PthPowerTest { is_power: witness.is_some(), witness })
}

/// Whether a principal unit is a `p`-th power.
pub fn is_principal_pth_power(w1: &KElement) -> Result<bool> {
    Ok(principal_root_approx(w1)?.is_some())
}

/// Whether `u` lies in `(K^*)^p`. Units are tested through `u^(q-1)`, which
/// kills the Teichmüller part without changing the answer.
pub fn is_pth_power(u: &KElement) -> Result<bool> {
    let p = u.field().p();
    let (v, w) = split_unit(u)?;
    if v.rem_euclid(p as i64) != 0 {
        return Ok(false);
    }
    let w1 = w.pow_u(u.field().residue_size() - 1);
    Ok(principal_root_approx(&w1)?.is_some())
}
