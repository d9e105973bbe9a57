//! Scalars of `Q_p` with absolute-precision tracking, and the small amount of
//! p-adic linear algebra the tower code needs.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Returns `p^k` as a big integer.
pub fn pow_p(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// Splits a nonzero integer into `(v_p(x), x / p^v)`.
pub fn split_p(x: &BigInt, p: u64) -> (i64, BigInt) {
    debug_assert!(!x.is_zero());
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut cur = x.clone();
    loop {
        let (q, r) = cur.div_rem(&pb);
        if !r.is_zero() {
            return (v, cur);
        }
        cur = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero integer.
pub fn val_p(x: &BigInt, p: u64) -> i64 {
    split_p(x, p).0
}

/// Inverse of `x` modulo `m`, if it exists.
pub fn mod_inverse(x: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let g = x.mod_floor(m).extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// A number `p^shift * unit`, known modulo `p^prec`.
///
/// The unit part is kept reduced into `[0, p^(prec - shift))` and is prime to
/// `p` unless the value is indistinguishable from zero, in which case
/// `unit = 0` and `shift = prec`.
#[derive(Clone)]
pub struct PadicScalar {
    p: u64,
    shift: i64,
    unit: BigInt,
    prec: i64,
}

impl PadicScalar {
    pub fn zero(p: u64, prec: i64) -> Self {
        PadicScalar { p, shift: prec, unit: BigInt::zero(), prec }
    }

    pub fn from_int(p: u64, value: impl Into<BigInt>, prec: i64) -> Self {
        Self::from_parts(p, 0, value.into(), prec)
    }

    /// `p^shift * digits` known modulo `p^prec`.
    pub fn from_parts(p: u64, shift: i64, digits: BigInt, prec: i64) -> Self {
        let rel = prec - shift;
        if rel <= 0 || digits.is_zero() {
            return Self::zero(p, prec);
        }
        let m = pow_p(p, rel as u32);
        let d = digits.mod_floor(&m);
        if d.is_zero() {
            return Self::zero(p, prec);
        }
        let (v, u) = split_p(&d, p);
        PadicScalar { p, shift: shift + v, unit: u, prec }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    /// Exact valuation, or `None` when indistinguishable from zero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.shift)
    }

    /// Valuation, saturating at the precision for zero values.
    pub fn valuation_capped(&self) -> i64 {
        self.shift
    }

    pub fn unit_part(&self) -> &BigInt {
        &self.unit
    }

    /// Reinterprets the value with a different absolute precision.
    pub fn with_prec(&self, prec: i64) -> Self {
        Self::from_parts(self.p, self.shift, self.unit.clone(), prec)
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(self.p, self.shift, -&self.unit, self.prec)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        let prec = self.prec.min(other.prec);
        let s = self.shift.min(other.shift);
        let a = &self.unit * pow_p(self.p, (self.shift - s) as u32);
        let b = &other.unit * pow_p(self.p, (other.shift - s) as u32);
        Self::from_parts(self.p, s, a + b, prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = (self.prec + other.shift).min(other.prec + self.shift);
        Self::from_parts(self.p, self.shift + other.shift, &self.unit * &other.unit, prec)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::IndistinguishableFromZero { prec: self.prec });
        }
        let rel = self.prec - self.shift;
        let m = pow_p(self.p, rel as u32);
        let u = mod_inverse(&self.unit, &m).expect("unit part is prime to p");
        Ok(Self::from_parts(self.p, -self.shift, u, self.prec - 2 * self.shift))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Multiplies by `p^k`.
    pub fn scale_p(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero(self.p, self.prec + k);
        }
        PadicScalar { p: self.p, shift: self.shift + k, unit: self.unit.clone(), prec: self.prec + k }
    }

    /// Integer representative in `[0, p^prec)`; requires a nonnegative valuation.
    pub fn to_integer(&self) -> Result<BigInt> {
        if self.is_zero() {
            return Ok(BigInt::zero());
        }
        if self.shift < 0 {
            return Err(Error::NotIntegral { ord: self.shift.into() });
        }
        Ok(&self.unit * pow_p(self.p, self.shift as u32))
    }

    /// Residue class modulo `p^k`; fails if the precision does not determine it.
    pub fn residue(&self, k: u32) -> Result<BigInt> {
        if self.prec < k as i64 {
            return Err(Error::Precision(format!(
                "value known mod p^{} but residue mod p^{} requested",
                self.prec, k
            )));
        }
        Ok(self.to_integer()?.mod_floor(&pow_p(self.p, k)))
    }

    /// Symmetric small-integer representative when it fits into an `i64`.
    pub fn to_i64_signed(&self) -> Option<i64> {
        let v = self.to_integer().ok()?;
        let m = pow_p(self.p, self.prec.max(0) as u32);
        let half: BigInt = &m / 2;
        let s = if v > half { v - m } else { v };
        s.to_i64()
    }

    /// Whether `self == other` within the smaller of the two precisions.
    pub fn congruent(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.prec);
        }
        if self.shift == 0 {
            write!(f, "{} + O({}^{})", self.unit, self.p, self.prec)
        } else {
            write!(f, "{}^{} * {} + O({}^{})", self.p, self.shift, self.unit, self.p, self.prec)
        }
    }
}

/// Solves `m * x = rhs` over `Q_p` by Gaussian elimination, choosing in every
/// column the pivot of smallest valuation.
pub fn solve(mut m: Vec<Vec<PadicScalar>>, mut rhs: Vec<PadicScalar>) -> Result<Vec<PadicScalar>> {
    let n = m.len();
    assert_eq!(rhs.len(), n);
    for row in 0..n {
        let pivot = (row..n)
            .filter(|&r| !m[r][row].is_zero())
            .min_by_key(|&r| m[r][row].valuation_capped())
            .ok_or(Error::Singular)?;
        m.swap(row, pivot);
        rhs.swap(row, pivot);
        let inv = m[row][row].inv()?;
        for r in row + 1..n {
            if m[r][row].is_zero() {
                continue;
            }
            let factor = m[r][row].mul(&inv);
            for c in row..n {
                let t = factor.mul(&m[row][c]);
                m[r][c] = m[r][c].sub(&t);
            }
            let t = factor.mul(&rhs[row]);
            rhs[r] = rhs[r].sub(&t);
        }
    }
    let p = rhs.first().map(|s| s.p).unwrap_or(2);
    let mut x = vec![PadicScalar::zero(p, i64::MAX / 4); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for c in row + 1..n {
            acc = acc.sub(&m[row][c].mul(&x[c]));
        }
        x[row] = acc.div(&m[row][row])?;
    }
    Ok(x)
}

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
pub fn det_bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_two_mod_27() {
        let two = PadicScalar::from_int(3, 2, 3);
        let inv = two.inv().unwrap();
        assert_eq!(inv.to_integer().unwrap(), BigInt::from(14));
    }

    #[test]
    fn product_tracks_precision() {
        let a = PadicScalar::from_int(3, 9, 10);
        let b = PadicScalar::from_int(3, 4, 10);
        let c = a.mul(&b);
        // min(10 + v(4), 10 + v(9))
        assert_eq!(c.prec(), 10);
        assert_eq!(c.valuation(), Some(2));
        assert_eq!(c.to_integer().unwrap(), BigInt::from(36));
    }

    #[test]
    fn division_by_p_lowers_precision() {
        let a = PadicScalar::from_int(5, 10, 8);
        let q = a.div(&PadicScalar::from_int(5, 5, 8)).unwrap();
        assert_eq!(q.prec(), 7);
        assert_eq!(q.to_integer().unwrap(), BigInt::from(2));
    }

    #[test]
    fn zero_is_indistinguishable() {
        let z = PadicScalar::from_int(3, 81, 4);
        assert!(z.is_zero());
        assert!(z.inv().is_err());
    }

    #[test]
    fn solve_small_system() {
        let s = |v: i64| PadicScalar::from_int(3, v, 20);
        let m = vec![vec![s(3), s(1)], vec![s(1), s(2)]];
        // x = (1, 2): 3 + 2 = 5, 1 + 4 = 5
        let x = solve(m, vec![s(5), s(5)]).unwrap();
        assert!(x[0].congruent(&s(1)));
        assert!(x[1].congruent(&s(2)));
    }

    #[test]
    fn bareiss_matches_hand_determinant() {
        let m = vec![
            vec![BigInt::from(2), BigInt::from(0), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(3), BigInt::from(2)],
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(1)],
        ];
        // 2*(3-2) - 0 + 1*(1-3) = 0
        assert_eq!(det_bareiss(m), BigInt::from(0));
        let m = vec![vec![BigInt::from(0), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(0)]];
        assert_eq!(det_bareiss(m), BigInt::from(-1));
    }
}
