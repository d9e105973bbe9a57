//! p-adic logarithm and exponential.
//!
//! Both series are summed on a representative carried at raised internal
//! precision; the result is then clamped to the absolute precision of the
//! argument. On `ord > 1/(p-1)` both maps are isometries, so a perturbation of
//! the input below `p^N` moves the output by less than `p^N`.

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::KElement;

/// Truncation certificate of a series evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesBudget {
    pub target_prec: i64,
    pub term_count: u64,
    /// Lower bound for `ord_p` of every discarded term.
    pub tail_bound: Ratio<i64>,
}

/// Guard applied to `eta` in `exp(eta * a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EtaGuard {
    /// `ord(eta) > 1/(p-1)`: the series converges.
    Convergence,
    /// `ord(eta) >= 2/(p-1)`: the bound required by the exponential homomorphism on forms.
    Theorem,
}

fn v_p(mut k: u64, p: u64) -> i64 {
    let mut v = 0;
    while k % p == 0 {
        k /= p;
        v += 1;
    }
    v
}

fn digit_sum(mut k: u64, p: u64) -> u64 {
    let mut s = 0;
    while k > 0 {
        s += k % p;
        k /= p;
    }
    s
}

fn ilog(k: u64, p: u64) -> i64 {
    let mut v = 0;
    let mut acc = 1u64;
    while acc <= k {
        acc = acc.saturating_mul(p);
        v += 1;
    }
    v
}

/// Terms of `sum (-1)^(k+1) y^k / k` needed for `ord y = v`: returns the last
/// index whose term has `ord < target`, and the minimum `ord` of the rest.
pub fn log_term_count(v: Ratio<i64>, target: i64, p: u64) -> (u64, Ratio<i64>) {
    assert!(v > Ratio::zero());
    let pr = Ratio::from(p as i64);
    let tgt = Ratio::from(target);
    // G(j) = p^j v - j is increasing once p^j (p-1) v >= 1.
    let mut j = 0i64;
    let mut pj = Ratio::<i64>::one();
    while pj * (pr - 1) * v < Ratio::one() {
        j += 1;
        pj *= pr;
    }
    while pj * v - j < tgt {
        j += 1;
        pj *= pr;
    }
    let limit = pj.to_integer() as u64;
    let mut last = 0;
    for k in 1..limit {
        if Ratio::from(k as i64) * v - v_p(k, p) < tgt {
            last = k;
        }
    }
    let mut tail = pj * v - j;
    for k in last + 1..limit {
        tail = tail.min(Ratio::from(k as i64) * v - v_p(k, p));
    }
    (last, tail)
}

/// Terms of `sum y^k / k!` needed for `ord y = v > 1/(p-1)`.
pub fn exp_term_count(v: Ratio<i64>, target: i64, p: u64) -> (u64, Ratio<i64>) {
    let c = Ratio::new(1, p as i64 - 1);
    assert!(v > c);
    let tgt = Ratio::from(target);
    // lower bound k (v - 1/(p-1)) + 1/(p-1), increasing in k
    let bound = |k: u64| Ratio::from(k as i64) * (v - c) + c;
    let mut k0 = 1u64;
    while bound(k0) < tgt {
        k0 += 1;
    }
    let exact = |k: u64| Ratio::from(k as i64) * v - Ratio::new((k - digit_sum(k, p)) as i64, p as i64 - 1);
    let mut last = 0;
    for k in 1..k0 {
        if exact(k) < tgt {
            last = k;
        }
    }
    let mut tail = bound(k0);
    for k in last + 1..k0 {
        tail = tail.min(exact(k));
    }
    (last, tail)
}

pub fn plog(x: &KElement) -> Result<KElement> {
    plog_with_budget(x, 0).map(|r| r.0)
}

/// `log x` together with its truncation certificate; `extra_terms` sums
/// further terms beyond the certified count.
pub fn plog_with_budget(x: &KElement, extra_terms: u64) -> Result<(KElement, SeriesBudget)> {
    let field = x.field();
    let p = field.p();
    let target = x.prec();
    let y = x - &field.int_prec(1, target);
    if y.is_zero() {
        let budget = SeriesBudget { target_prec: target, term_count: 0, tail_bound: Ratio::from(target) };
        return Ok((KElement::zero(field, target), budget));
    }
    let v = y.ord()?;
    if v <= Ratio::zero() {
        return Err(Error::Domain { what: "log argument x - 1", ord: v, required: "> 0".into() });
    }
    let (count, tail) = log_term_count(v, target, p);
    let count = count + extra_terms;
    let mut extra = ilog(count, p) + 2;
    loop {
        let yy = y.assume_prec(target + extra);
        let mut sum = KElement::zero(field, target + extra);
        let mut pow = yy.clone();
        for k in 1..=count {
            if k > 1 {
                pow = &pow * &yy;
            }
            let term = pow.div_int(k)?;
            sum = if k % 2 == 1 { &sum + &term } else { &sum - &term };
        }
        if sum.prec() >= target {
            let budget = SeriesBudget { target_prec: target, term_count: count, tail_bound: tail };
            return Ok((sum.reduce_prec(target), budget));
        }
        extra += target - sum.prec() + 2;
    }
}

pub fn pexp(x: &KElement) -> Result<KElement> {
    pexp_with_budget(x, 0).map(|r| r.0)
}

pub fn pexp_with_budget(x: &KElement, extra_terms: u64) -> Result<(KElement, SeriesBudget)> {
    let field = x.field();
    let p = field.p();
    let target = x.prec();
    if x.is_zero() {
        let budget = SeriesBudget { target_prec: target, term_count: 0, tail_bound: Ratio::from(target) };
        return Ok((field.int_prec(1, target), budget));
    }
    let v = x.ord()?;
    if v <= Ratio::new(1, p as i64 - 1) {
        return Err(Error::Domain { what: "exp argument", ord: v, required: format!("> 1/{}", p - 1) });
    }
    let (count, tail) = exp_term_count(v, target, p);
    let count = count + extra_terms;
    let mut extra = (count as i64) / (p as i64 - 1) + 2;
    loop {
        let xx = x.assume_prec(target + extra);
        let mut term = field.int_prec(1, target + extra);
        let mut sum = term.clone();
        for k in 1..=count {
            term = (&term * &xx).div_int(k)?;
            sum = &sum + &term;
        }
        if sum.prec() >= target {
            let budget = SeriesBudget { target_prec: target, term_count: count, tail_bound: tail };
            return Ok((sum.reduce_prec(target), budget));
        }
        extra += target - sum.prec() + 2;
    }
}

/// Checks `eta` against the requested guard. Zero passes both.
pub fn check_eta(eta: &KElement, guard: EtaGuard) -> Result<()> {
    if eta.is_zero() {
        return Ok(());
    }
    let p = eta.field().p() as i64;
    let v = eta.ord()?;
    match guard {
        EtaGuard::Convergence if v <= Ratio::new(1, p - 1) => {
            Err(Error::Domain { what: "eta", ord: v, required: format!("> 1/{}", p - 1) })
        }
        EtaGuard::Theorem if v < Ratio::new(2, p - 1) => {
            Err(Error::Domain { what: "eta", ord: v, required: format!(">= 2/{}", p - 1) })
        }
        _ => Ok(()),
    }
}

/// `exp(eta * a)` for integral `a`.
pub fn exp_eta(eta: &KElement, a: &KElement, guard: EtaGuard) -> Result<KElement> {
    check_eta(eta, guard)?;
    if !a.is_integral() {
        return Err(Error::NotIntegral { ord: a.ord()? });
    }
    pexp(&(eta * a))
}
