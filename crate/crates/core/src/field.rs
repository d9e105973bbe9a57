//! Two-step towers `K = K_0(pi)` over `Q_p` (`K_0` unramified, `pi` a root of an
//! Eisenstein polynomial) and their elements.
//!
//! An element is stored as `p^shift * sum c_ij pi^i u^j` with integer
//! coordinates `c_ij` on the `Z_p`-basis `{pi^i u^j : i < e, j < f}` of `O_K`,
//! together with an absolute precision `prec`: the value is known modulo
//! `p^prec O_K`. Coordinates are reduced into `[0, p^(prec - shift))` and are
//! not all divisible by `p` unless the element is indistinguishable from zero.
//!
//! Precision rules:
//! - sums take the smaller precision;
//! - products use `min(prec_x + lv(y), prec_y + lv(x))` where `lv` is the
//!   lattice valuation (`floor(ord_p)`);
//! - inverses lose `2 ord_p(x)` (rounded down to the lattice);
//! - multiplying by `p^k` moves precision by `k`.

use std::fmt;
use std::ops::{Add, Deref, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{det_bareiss, pow_p, split_p, val_p, PadicScalar};

const POW_CACHE: usize = 512;

/// Defining data of a tower.
///
/// `unram_poly` is a monic integer polynomial of degree `f`, irreducible mod
/// `p`, defining `K_0 = Q_p(u)`. `eisenstein` lists the coefficients of a monic
/// Eisenstein polynomial over `O_{K_0}`, each coefficient given by its
/// coordinates on `1, u, ..., u^(f-1)`. All lists are little-endian.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldDesc {
    pub p: u64,
    pub n: u32,
    pub unram_poly: Vec<BigInt>,
    pub eisenstein: Vec<Vec<BigInt>>,
    pub precision: Option<i64>,
}

impl FieldDesc {
    /// A description with integer Eisenstein coefficients.
    pub fn new(p: u64, n: u32, unram_poly: &[i64], eisenstein: &[i64]) -> Self {
        FieldDesc {
            p,
            n,
            unram_poly: unram_poly.iter().map(|&c| BigInt::from(c)).collect(),
            eisenstein: eisenstein.iter().map(|&c| vec![BigInt::from(c)]).collect(),
            precision: None,
        }
    }

    pub fn with_precision(mut self, prec: i64) -> Self {
        self.precision = Some(prec);
        self
    }

    /// `Q_p` itself, presented with `pi = p`.
    pub fn qp(p: u64) -> Self {
        Self::new(p, 0, &[0, 1], &[-(p as i64), 1])
    }

    /// `Q_p(zeta_{p^n})` with `pi = zeta - 1`, i.e. Eisenstein polynomial
    /// `Phi_{p^n}(X + 1)`.
    pub fn cyclotomic(p: u64, n: u32) -> Self {
        assert!(n >= 1);
        let step = pow_p(p, n - 1).to_usize().expect("small level");
        // Phi_{p^n}(X + 1) = sum_{k < p} (X + 1)^(k p^(n-1))
        let deg = step * (p as usize - 1);
        let mut coeffs = vec![BigInt::zero(); deg + 1];
        for k in 0..p as usize {
            let m = k * step;
            let mut binom = BigInt::one();
            for (i, c) in coeffs.iter_mut().enumerate().take(m + 1) {
                *c += &binom;
                binom = binom * BigInt::from(m - i) / BigInt::from(i + 1);
            }
        }
        FieldDesc {
            p,
            n,
            unram_poly: vec![BigInt::zero(), BigInt::one()],
            eisenstein: coeffs.into_iter().map(|c| vec![c]).collect(),
            precision: None,
        }
    }

    /// The extension `K(pi^(1/m))` presented by the Eisenstein polynomial
    /// `E(X^m)`.
    pub fn radical(&self, m: usize) -> Self {
        let f = self.degree_f();
        let mut eis = vec![vec![BigInt::zero(); f]; (self.eisenstein.len() - 1) * m + 1];
        for (i, c) in self.eisenstein.iter().enumerate() {
            eis[i * m] = c.clone();
        }
        FieldDesc { eisenstein: eis, precision: None, ..self.clone() }
    }

    pub fn degree_e(&self) -> usize {
        self.eisenstein.len().saturating_sub(1)
    }

    pub fn degree_f(&self) -> usize {
        self.unram_poly.len().saturating_sub(1)
    }

    /// `max(40, 10 n e)` unless overridden.
    pub fn working_precision(&self) -> i64 {
        self.precision.unwrap_or_else(|| 40.max(10 * self.n as i64 * self.degree_e() as i64))
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p;
        if p < 2 || !(2..p).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            return Err(Error::InvalidField(format!("p = {p} is not prime")));
        }
        let f = self.degree_f();
        if f == 0 || !self.unram_poly[f].is_one() {
            return Err(Error::InvalidField("unram_poly must be monic of degree >= 1".into()));
        }
        if !irreducible_mod_p(&self.unram_poly, p) {
            return Err(Error::InvalidField("unram_poly is reducible mod p".into()));
        }
        let e = self.degree_e();
        if e == 0 {
            return Err(Error::InvalidField("Eisenstein polynomial must have degree >= 1".into()));
        }
        for c in &self.eisenstein {
            if c.len() > f {
                return Err(Error::InvalidField(format!(
                    "Eisenstein coefficient {c:?} has more than f = {f} coordinates"
                )));
            }
        }
        let lead = &self.eisenstein[e];
        if lead.is_empty() || !lead[0].is_one() || lead[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::InvalidField("Eisenstein polynomial must be monic".into()));
        }
        let pb = BigInt::from(p);
        for (i, c) in self.eisenstein[..e].iter().enumerate() {
            if c.iter().any(|x| !x.is_multiple_of(&pb)) {
                return Err(Error::InvalidField(format!(
                    "not Eisenstein: coefficient of X^{i} has ord_p = 0"
                )));
            }
        }
        let c0 = &self.eisenstein[0];
        let ord0 = c0.iter().filter(|x| !x.is_zero()).map(|x| val_p(x, p)).min();
        if ord0 != Some(1) {
            let shown = ord0.map(|v| v.to_string()).unwrap_or_else(|| "infinity".into());
            return Err(Error::InvalidField(format!(
                "not Eisenstein: constant term ord_p = {shown}, must be exactly 1"
            )));
        }
        Ok(())
    }

    /// Canonical `key = value` text; also used for fingerprints.
    pub fn to_config(&self) -> String {
        let ints = |v: &[BigInt]| {
            format!("[{}]", v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "))
        };
        let eis = if self.eisenstein.iter().all(|c| c.len() <= 1) {
            let flat: Vec<BigInt> =
                self.eisenstein.iter().map(|c| c.first().cloned().unwrap_or_default()).collect();
            ints(&flat)
        } else {
            format!("[{}]", self.eisenstein.iter().map(|c| ints(c)).collect::<Vec<_>>().join(", "))
        };
        format!(
            "p = {}\nn = {}\nunram_poly = {}\neisenstein = {}\nprecision = {}\n",
            self.p,
            self.n,
            ints(&self.unram_poly),
            eis,
            self.working_precision()
        )
    }
}

fn irreducible_mod_p(poly: &[BigInt], p: u64) -> bool {
    let reduce = |c: &BigInt| c.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    let g: Vec<u64> = poly.iter().map(reduce).collect();
    let f = g.len() - 1;
    // trial division by every monic polynomial of degree <= f/2
    for d in 1..=f / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut h = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                h.push(t % p);
                t /= p;
            }
            h.push(1);
            if poly_rem_mod_p(&g, &h, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - lead * bc % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// The tower data shared by all of its elements.
pub struct FieldTower {
    desc: FieldDesc,
    p: u64,
    e: usize,
    f: usize,
    work_prec: i64,
    unram: Vec<BigInt>,
    eis: Vec<Vec<BigInt>>,
    pows: Vec<BigInt>,
    zeta: OnceLock<Option<RawElement>>,
    delta: OnceLock<i64>,
}

#[derive(Clone)]
struct RawElement {
    shift: i64,
    coords: Vec<BigInt>,
    prec: i64,
}

/// Shared handle to a [`FieldTower`].
#[derive(Clone)]
pub struct Field(Arc<FieldTower>);

impl Deref for Field {
    type Target = FieldTower;
    fn deref(&self) -> &FieldTower {
        &self.0
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.desc == other.desc
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(p={}, e={}, f={}, N={})", self.p, self.e, self.f, self.work_prec)
    }
}

/// Validates a description, builds the tower and checks that
/// `zeta_{p^n}` is present.
pub fn make_field(desc: FieldDesc) -> Result<Field> {
    Field::new(desc)
}

impl Field {
    pub fn new(desc: FieldDesc) -> Result<Field> {
        let field = Self::without_root_check(desc)?;
        if field.desc.n >= 1 && field.zeta_opt().is_none() {
            return Err(Error::NoRootOfUnity { order: field.p.pow(field.desc.n) });
        }
        Ok(field)
    }

    /// Builds the tower without requiring `zeta_{p^n}` to exist.
    pub fn without_root_check(desc: FieldDesc) -> Result<Field> {
        desc.validate()?;
        let p = desc.p;
        let e = desc.degree_e();
        let f = desc.degree_f();
        let eis = desc
            .eisenstein
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.resize(f, BigInt::zero());
                c
            })
            .collect();
        let mut pows = Vec::with_capacity(POW_CACHE);
        let mut cur = BigInt::one();
        for _ in 0..POW_CACHE {
            pows.push(cur.clone());
            cur *= p;
        }
        Ok(Field(Arc::new(FieldTower {
            work_prec: desc.working_precision(),
            unram: desc.unram_poly.clone(),
            desc,
            p,
            e,
            f,
            eis,
            pows,
            zeta: OnceLock::new(),
            delta: OnceLock::new(),
        })))
    }

    /// The same tower at a different working precision.
    pub fn with_precision(&self, prec: i64) -> Result<Field> {
        Field::new(self.desc.clone().with_precision(prec))
    }

    pub fn int(&self, v: impl Into<BigInt>) -> KElement {
        KElement::from_int(self, v, self.work_prec)
    }

    pub fn int_prec(&self, v: impl Into<BigInt>, prec: i64) -> KElement {
        KElement::from_int(self, v, prec)
    }

    pub fn zero(&self) -> KElement {
        KElement::zero(self, self.work_prec)
    }

    pub fn one(&self) -> KElement {
        self.int(1)
    }

    /// The basis element `pi^i u^j` at precision `prec`.
    pub fn basis_element(&self, i: usize, j: usize, prec: i64) -> KElement {
        let mut coords = vec![BigInt::zero(); self.degree()];
        coords[i * self.f + j] = BigInt::one();
        KElement::from_raw(self, 0, coords, prec)
    }

    pub fn pi(&self) -> KElement {
        self.pi_prec(self.work_prec)
    }

    pub fn pi_prec(&self, prec: i64) -> KElement {
        if self.e == 1 {
            // pi is a root of X + c_0 with c_0 in O_{K_0}
            let coords = self.eis[0].iter().map(|c| -c).collect();
            return KElement::from_raw(self, 0, coords, prec);
        }
        self.basis_element(1, 0, prec)
    }

    /// The generator `u` of the unramified part.
    pub fn unram_gen(&self) -> KElement {
        if self.f == 1 {
            return KElement::from_int(self, -&self.unram[0], self.work_prec);
        }
        self.basis_element(0, 1, self.work_prec)
    }

    /// The cached primitive `p^n`-th root of unity.
    pub fn zeta(&self) -> Result<KElement> {
        self.zeta_opt().ok_or(Error::NoRootOfUnity { order: self.p.pow(self.desc.n) })
    }

    pub fn zeta_opt(&self) -> Option<KElement> {
        let raw = self
            .zeta
            .get_or_init(|| {
                crate::roots::find_zeta(self, self.desc.n).map(|z| RawElement {
                    shift: z.shift,
                    coords: z.coords,
                    prec: z.prec,
                })
            })
            .clone()?;
        Some(KElement::from_raw(self, raw.shift, raw.coords, raw.prec))
    }

    /// `v_pi(E'(pi))`, the exponent of the different of `K/K_0`.
    pub fn different_exponent(&self) -> i64 {
        *self.delta.get_or_init(|| {
            let d = crate::poly::Poly::eisenstein(self).eval_deriv(&self.pi());
            d.valuation_pi().expect("separable Eisenstein polynomial")
        })
    }

    /// Representatives `sum c_j u^j` (`0 <= c_j < p`) of the residue field.
    pub fn residue_digits(&self, prec: i64) -> Vec<KElement> {
        let q = self.residue_size();
        (0..q)
            .map(|mut idx| {
                let mut coords = vec![BigInt::zero(); self.degree()];
                for c in coords.iter_mut().take(self.f) {
                    *c = BigInt::from(idx % self.p);
                    idx /= self.p;
                }
                KElement::from_raw(self, 0, coords, prec)
            })
            .collect()
    }

    /// Embeds an element of the unramified subfield given by coordinates on
    /// `1, u, ..., u^(f-1)`.
    pub fn k0_element(&self, coords: &[BigInt], prec: i64) -> KElement {
        let mut c = vec![BigInt::zero(); self.degree()];
        for (j, x) in coords.iter().enumerate().take(self.f) {
            c[j] = x.clone();
        }
        KElement::from_raw(self, 0, c, prec)
    }

    fn ptr_eq(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl FieldTower {
    pub fn desc(&self) -> &FieldDesc {
        &self.desc
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Ramification index.
    pub fn e(&self) -> usize {
        self.e
    }

    /// Residue degree.
    pub fn f(&self) -> usize {
        self.f
    }

    /// `[K : Q_p]`.
    pub fn degree(&self) -> usize {
        self.e * self.f
    }

    /// Level `n` of the root of unity the description asks for.
    pub fn level(&self) -> u32 {
        self.desc.n
    }

    pub fn work_prec(&self) -> i64 {
        self.work_prec
    }

    /// Size `q = p^f` of the residue field.
    pub fn residue_size(&self) -> u64 {
        self.p.pow(self.f as u32)
    }

    pub fn eisenstein_coeffs(&self) -> &[Vec<BigInt>] {
        &self.eis
    }

    pub fn unram_coeffs(&self) -> &[BigInt] {
        &self.unram
    }

    pub(crate) fn pow_p(&self, k: i64) -> BigInt {
        debug_assert!(k >= 0);
        match self.pows.get(k as usize) {
            Some(v) => v.clone(),
            None => pow_p(self.p, k as u32),
        }
    }

    fn reduce_k0(&self, mut row: Vec<BigInt>, m: &BigInt) -> Vec<BigInt> {
        let f = self.f;
        for d in (f..row.len()).rev() {
            let c = std::mem::take(&mut row[d]);
            if c.is_zero() {
                continue;
            }
            for k in 0..f {
                row[d - f + k] -= &c * &self.unram[k];
            }
        }
        row.truncate(f);
        for c in row.iter_mut() {
            *c = c.mod_floor(m);
        }
        row
    }

    fn k0_mul(&self, x: &[BigInt], y: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        let f = self.f;
        if f == 1 {
            return vec![(&x[0] * &y[0]).mod_floor(m)];
        }
        let mut row = vec![BigInt::zero(); 2 * f - 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                row[i + j] += a * b;
            }
        }
        self.reduce_k0(row, m)
    }

    /// Product of two coordinate vectors modulo `m`.
    pub(crate) fn mul_coords(&self, a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        let (e, f) = (self.e, self.f);
        let mut prod = vec![vec![BigInt::zero(); 2 * f - 1]; 2 * e - 1];
        for i1 in 0..e {
            for j1 in 0..f {
                let x = &a[i1 * f + j1];
                if x.is_zero() {
                    continue;
                }
                for i2 in 0..e {
                    for j2 in 0..f {
                        let y = &b[i2 * f + j2];
                        if !y.is_zero() {
                            prod[i1 + i2][j1 + j2] += x * y;
                        }
                    }
                }
            }
        }
        let mut red: Vec<Vec<BigInt>> = prod.into_iter().map(|row| self.reduce_k0(row, m)).collect();
        for d in (e..2 * e - 1).rev() {
            let c = std::mem::take(&mut red[d]);
            if c.iter().all(|x| x.is_zero()) {
                continue;
            }
            for k in 0..e {
                let t = self.k0_mul(&c, &self.eis[k], m);
                for j in 0..f {
                    red[d - e + k][j] -= &t[j];
                }
            }
        }
        red.truncate(e);
        red.into_iter().flatten().map(|c| c.mod_floor(m)).collect()
    }
}

/// An element of `K`, known to a finite absolute precision.
#[derive(Clone)]
pub struct KElement {
    field: Field,
    shift: i64,
    coords: Vec<BigInt>,
    prec: i64,
}

impl KElement {
    pub fn zero(field: &Field, prec: i64) -> Self {
        KElement { field: field.clone(), shift: prec, coords: vec![BigInt::zero(); field.degree()], prec }
    }

    pub fn from_int(field: &Field, v: impl Into<BigInt>, prec: i64) -> Self {
        let mut coords = vec![BigInt::zero(); field.degree()];
        coords[0] = v.into();
        Self::from_raw(field, 0, coords, prec)
    }

    /// `p^shift * sum coords[i*f + j] pi^i u^j` known modulo `p^prec`.
    pub fn from_raw(field: &Field, shift: i64, coords: Vec<BigInt>, prec: i64) -> Self {
        assert_eq!(coords.len(), field.degree());
        let rel = prec - shift;
        if rel <= 0 {
            return Self::zero(field, prec);
        }
        let m = field.pow_p(rel);
        let mut coords: Vec<BigInt> = coords.into_iter().map(|c| c.mod_floor(&m)).collect();
        let v = coords.iter().filter(|c| !c.is_zero()).map(|c| val_p(c, field.p)).min();
        let Some(v) = v else {
            return Self::zero(field, prec);
        };
        if v > 0 {
            let d = field.pow_p(v);
            for c in coords.iter_mut() {
                *c = &*c / &d;
            }
        }
        KElement { field: field.clone(), shift: shift + v, coords, prec }
    }

    /// Builds an element from `Q_p`-coordinates on the basis `{pi^i u^j}`.
    pub fn from_scalars(field: &Field, coords: &[PadicScalar]) -> Result<Self> {
        assert_eq!(coords.len(), field.degree());
        let prec = coords.iter().map(|c| c.prec()).min().unwrap_or(field.work_prec);
        let shift = coords.iter().map(|c| c.valuation_capped()).min().unwrap_or(prec).min(prec);
        let raw = coords
            .iter()
            .map(|c| {
                if c.is_zero() {
                    BigInt::zero()
                } else {
                    c.unit_part() * field.pow_p(c.valuation_capped() - shift)
                }
            })
            .collect();
        Ok(Self::from_raw(field, shift, raw, prec))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Power of `p` factored out of the coordinates; equals `floor(ord_p)`.
    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Raw coordinates (after the `p^shift` factor).
    pub fn raw_coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// Coordinates as `Q_p` scalars.
    pub fn coords(&self) -> Vec<PadicScalar> {
        self.coords
            .iter()
            .map(|c| PadicScalar::from_parts(self.field.p, self.shift, c.clone(), self.prec))
            .collect()
    }

    /// Integer coordinates of the value itself, modulo `p^prec`.
    pub fn integer_coords(&self) -> Result<Vec<BigInt>> {
        if self.is_zero() {
            return Ok(vec![BigInt::zero(); self.coords.len()]);
        }
        if self.shift < 0 {
            return Err(Error::NotIntegral { ord: self.ord()? });
        }
        let s = self.field.pow_p(self.shift);
        Ok(self.coords.iter().map(|c| c * &s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// `v_pi(x)`, or `None` when indistinguishable from zero.
    pub fn valuation_pi(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let (e, f) = (self.field.e as i64, self.field.f);
        let v = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(idx, c)| e * val_p(c, self.field.p) + (idx / f) as i64)
            .min()
            .unwrap();
        Some(e * self.shift + v)
    }

    /// `v_pi(x)`, or `e * prec` for values indistinguishable from zero.
    pub fn valuation_pi_capped(&self) -> i64 {
        self.valuation_pi().unwrap_or(self.field.e as i64 * self.prec)
    }

    /// `ord_p(x)` in `(1/e) Z`.
    pub fn ord(&self) -> Result<Ratio<i64>> {
        let v = self.valuation_pi().ok_or(Error::IndistinguishableFromZero { prec: self.prec })?;
        Ok(Ratio::new(v, self.field.e as i64))
    }

    pub fn is_integral(&self) -> bool {
        self.shift >= 0
    }

    pub fn is_unit(&self) -> bool {
        self.valuation_pi() == Some(0)
    }

    /// Lowers the precision to `min(prec, self.prec)`.
    pub fn reduce_prec(&self, prec: i64) -> Self {
        Self::from_raw(&self.field, self.shift, self.coords.clone(), prec.min(self.prec))
    }

    /// Treats the stored digits as exact and claims precision `prec`.
    pub fn assume_prec(&self, prec: i64) -> Self {
        if self.is_zero() {
            return Self::zero(&self.field, prec);
        }
        Self::from_raw(&self.field, self.shift, self.coords.clone(), prec)
    }

    /// Multiplies by `p^k`.
    pub fn scale_p(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero(&self.field, self.prec + k);
        }
        KElement { field: self.field.clone(), shift: self.shift + k, coords: self.coords.clone(), prec: self.prec + k }
    }

    /// Multiplies by an exact integer.
    pub fn mul_int(&self, k: impl Into<BigInt>) -> Self {
        let k = k.into();
        if k.is_zero() {
            return Self::zero(&self.field, self.prec);
        }
        let (v, u) = split_p(&k, self.field.p);
        let coords = self.coords.iter().map(|c| c * &u).collect();
        Self::from_raw(&self.field, self.shift + v, coords, self.prec + v)
    }

    /// Divides by a nonzero integer; the `p`-part lowers the precision.
    pub fn div_int(&self, k: impl Into<BigInt>) -> Result<Self> {
        let k = k.into();
        if k.is_zero() {
            return Err(Error::IndistinguishableFromZero { prec: self.prec });
        }
        let (v, u) = split_p(&k, self.field.p);
        if self.is_zero() {
            return Ok(Self::zero(&self.field, self.prec - v));
        }
        let m = self.field.pow_p(self.prec - self.shift);
        let inv = crate::padic::mod_inverse(&u, &m).expect("unit part is prime to p");
        let coords = self.coords.iter().map(|c| c * &inv).collect();
        Ok(Self::from_raw(&self.field, self.shift - v, coords, self.prec - v))
    }

    fn check_field(&self, other: &Self) {
        assert!(
            self.field.ptr_eq(&other.field) || self.field == other.field,
            "elements belong to different fields"
        );
    }

    fn add_impl(&self, other: &Self) -> Self {
        self.check_field(other);
        let prec = self.prec.min(other.prec);
        let s = self.shift.min(other.shift);
        if s >= prec {
            return Self::zero(&self.field, prec);
        }
        let a = self.field.pow_p(self.shift - s);
        let b = self.field.pow_p(other.shift - s);
        let coords = self.coords.iter().zip(&other.coords).map(|(x, y)| x * &a + y * &b).collect();
        Self::from_raw(&self.field, s, coords, prec)
    }

    fn neg_impl(&self) -> Self {
        let coords = self.coords.iter().map(|c| -c).collect();
        Self::from_raw(&self.field, self.shift, coords, self.prec)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        self.check_field(other);
        let prec = (self.prec + other.shift).min(other.prec + self.shift);
        let shift = self.shift + other.shift;
        let rel = prec - shift;
        if rel <= 0 || self.is_zero() || other.is_zero() {
            return Self::zero(&self.field, prec);
        }
        let m = self.field.pow_p(rel);
        let coords = self.field.mul_coords(&self.coords, &other.coords, &m);
        Self::from_raw(&self.field, shift, coords, prec)
    }

    pub fn square(&self) -> Self {
        self.mul_impl(self)
    }

    pub fn pow_u(&self, mut n: u64) -> Self {
        let mut result: Option<KElement> = None;
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => &r * &base,
                });
            }
            n >>= 1;
            if n > 0 {
                base = base.square();
            }
        }
        result.unwrap_or_else(|| KElement::from_int(&self.field, 1, self.prec.max(self.field.work_prec)))
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        if n >= 0 {
            Ok(self.pow_u(n as u64))
        } else {
            Ok(self.inv()?.pow_u(n.unsigned_abs()))
        }
    }

    /// Inverse of a unit with `U z = 1` solved by Newton iteration.
    fn unit_inverse(&self) -> Self {
        debug_assert!(self.shift == 0 && self.is_unit());
        let q = self.field.residue_size();
        let mut z = self.reduce_prec(1).pow_u(q.saturating_sub(2)).assume_prec(self.prec);
        let one = KElement::from_int(&self.field, 1, self.prec);
        for _ in 0..128 {
            let r = &one - &(self * &z);
            if r.is_zero() {
                return z;
            }
            z = &z + &(&z * &r);
        }
        unreachable!("Newton inversion of a unit converges quadratically")
    }

    pub fn inv(&self) -> Result<Self> {
        let vpi = self.valuation_pi().ok_or(Error::IndistinguishableFromZero { prec: self.prec })?;
        let e = self.field.e as i64;
        let s = self.shift;
        let r = vpi - e * s;
        let rel = self.prec - s;
        let new_prec = Integer::div_floor(&(e * rel - 2 * r), &e) - s;
        let work = rel.max(new_prec + s + 3);
        let x = KElement::from_raw(&self.field, 0, self.coords.clone(), work);
        let res = if r == 0 {
            x.unit_inverse()
        } else {
            let pi_pow = self.field.pi_prec(work).pow_u((e - r) as u64);
            let unit = (&x * &pi_pow).scale_p(-1);
            (&unit.unit_inverse() * &pi_pow).scale_p(-1)
        };
        Ok(res.scale_p(-s).reduce_prec(new_prec))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Integer matrix of multiplication by the unshifted coordinates, modulo
    /// `p^(prec - shift)`; column `b` holds the coordinates of `x * basis_b`.
    fn mul_matrix(&self) -> Vec<Vec<BigInt>> {
        let d = self.field.degree();
        let m = self.field.pow_p(self.prec - self.shift);
        let mut cols = Vec::with_capacity(d);
        for b in 0..d {
            let mut unit = vec![BigInt::zero(); d];
            unit[b] = BigInt::one();
            cols.push(self.field.mul_coords(&self.coords, &unit, &m));
        }
        (0..d).map(|r| (0..d).map(|c| cols[c][r].clone()).collect()).collect()
    }

    /// `Tr_{K/Q_p}(x)`.
    pub fn trace_abs(&self) -> PadicScalar {
        if self.is_zero() {
            return PadicScalar::zero(self.field.p, self.prec);
        }
        let mat = self.mul_matrix();
        let t: BigInt = (0..mat.len()).map(|i| mat[i][i].clone()).sum();
        PadicScalar::from_parts(self.field.p, self.shift, t, self.prec)
    }

    /// `N_{K/Q_p}(x)`.
    pub fn norm_abs(&self) -> PadicScalar {
        let d = self.field.degree() as i64;
        if self.is_zero() {
            return PadicScalar::zero(self.field.p, d * self.prec);
        }
        let det = det_bareiss(self.mul_matrix());
        let rel = self.prec - self.shift;
        PadicScalar::from_parts(self.field.p, self.shift * d, det, self.shift * d + rel)
    }

    /// Symmetric representatives of the unshifted coordinates.
    fn symmetric_coords(&self) -> Vec<BigInt> {
        let m = self.field.pow_p(self.prec - self.shift);
        let half = &m / 2;
        self.coords.iter().map(|c| if c > &half { c - &m } else { c.clone() }).collect()
    }

    /// Serializable record: shift, precision and base-p digit strings.
    pub fn to_record(&self) -> ElementRecord {
        let p = self.field.p;
        let coords = self
            .coords
            .iter()
            .map(|c| {
                if c.is_zero() {
                    return "0".to_string();
                }
                c.to_str_radix(p as u32)
            })
            .collect();
        ElementRecord { shift: self.shift, prec: self.prec, coords }
    }

    pub fn from_record(field: &Field, rec: &ElementRecord) -> Result<Self> {
        if rec.coords.len() != field.degree() {
            return Err(Error::InvalidField(format!(
                "record has {} coordinates, field degree is {}",
                rec.coords.len(),
                field.degree()
            )));
        }
        let coords = rec
            .coords
            .iter()
            .map(|s| {
                BigInt::parse_bytes(s.as_bytes(), field.p as u32)
                    .ok_or_else(|| Error::InvalidField(format!("bad base-{} digit string {s:?}", field.p)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_raw(field, rec.shift, coords, rec.prec))
    }
}

/// Element serialization: coordinates as base-p digit strings (most
/// significant digit first) on the basis `{pi^i u^j}`, scaled by `p^shift`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementRecord {
    pub shift: i64,
    pub prec: i64,
    pub coords: Vec<String>,
}

impl PartialEq for KElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && (self - other).is_zero()
    }
}

impl fmt::Display for KElement {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(fm, "0");
        }
        let f = self.field.f;
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (idx, c) in self.symmetric_coords().into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (i, j) = (idx / f, idx % f);
            let mut factors = Vec::new();
            let mag = c.abs();
            if !mag.is_one() || (i == 0 && j == 0) {
                factors.push(mag.to_string());
            }
            match i {
                0 => {}
                1 => factors.push("pi".into()),
                _ => factors.push(format!("pi^{i}")),
            }
            match j {
                0 => {}
                1 => factors.push("u".into()),
                _ => factors.push(format!("u^{j}")),
            }
            parts.push((c.is_negative(), factors.join("*")));
        }
        let mut body = String::new();
        for (k, (neg, term)) in parts.iter().enumerate() {
            match (k, neg) {
                (0, true) => body.push_str(&format!("-{term}")),
                (0, false) => body.push_str(term),
                (_, true) => body.push_str(&format!(" - {term}")),
                (_, false) => body.push_str(&format!(" + {term}")),
            }
        }
        if self.shift == 0 {
            write!(fm, "({body})")
        } else {
            write!(fm, "p^{}*({body})", self.shift)
        }
    }
}

impl fmt::Debug for KElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(p^{})", self, self.prec)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl $tr<&KElement> for &KElement {
            type Output = KElement;
            fn $method(self, rhs: &KElement) -> KElement {
                self.$imp(rhs)
            }
        }
        impl $tr<KElement> for KElement {
            type Output = KElement;
            fn $method(self, rhs: KElement) -> KElement {
                (&self).$imp(&rhs)
            }
        }
        impl $tr<&KElement> for KElement {
            type Output = KElement;
            fn $method(self, rhs: &KElement) -> KElement {
                (&self).$imp(rhs)
            }
        }
        impl $tr<KElement> for &KElement {
            type Output = KElement;
            fn $method(self, rhs: KElement) -> KElement {
                self.$imp(&rhs)
            }
        }
    };
}

impl KElement {
    fn sub_impl(&self, other: &Self) -> Self {
        self.add_impl(&other.neg_impl())
    }
}

forward_binop!(Add, add, add_impl);
forward_binop!(Sub, sub, sub_impl);
forward_binop!(Mul, mul, mul_impl);

impl Neg for &KElement {
    type Output = KElement;
    fn neg(self) -> KElement {
        self.neg_impl()
    }
}

impl Neg for KElement {
    type Output = KElement;
    fn neg(self) -> KElement {
        self.neg_impl()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f0() -> Field {
        make_field(FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1])).unwrap()
    }

    fn q3() -> Field {
        Field::new(FieldDesc::qp(3)).unwrap()
    }

    #[test]
    fn f0_has_expected_shape() {
        let k = f0();
        assert_eq!((k.e(), k.f()), (2, 1));
        assert_eq!(k.zeta().unwrap(), &k.one() + &k.pi());
    }

    #[test]
    fn rejects_non_eisenstein() {
        let err = make_field(FieldDesc::new(3, 1, &[0, 1], &[9, 0, 1])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("constant term ord_p = 2"), "{msg}");
    }

    #[test]
    fn rejects_reducible_unramified_polynomial() {
        // X^2 - 1 = (X - 1)(X + 1)
        let err = make_field(FieldDesc::new(3, 0, &[-1, 0, 1], &[-3, 1])).unwrap_err();
        assert!(err.to_string().contains("reducible"));
    }

    #[test]
    fn radical_tower_is_valid() {
        let k6 = make_field(FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1]).radical(3)).unwrap();
        assert_eq!(k6.e(), 6);
        assert_eq!(k6.desc().eisenstein.len(), 7);
    }

    #[test]
    fn cyclotomic_desc_matches_f0() {
        assert_eq!(FieldDesc::cyclotomic(3, 1).eisenstein, FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1]).eisenstein);
        let five = FieldDesc::cyclotomic(5, 1);
        let flat: Vec<i64> = five.eisenstein.iter().map(|c| c[0].to_i64().unwrap()).collect();
        assert_eq!(flat, vec![5, 10, 10, 5, 1]);
    }

    #[test]
    fn arithmetic_in_q3() {
        let q = q3();
        let four = q.int(4);
        assert_eq!(&four * &four, q.int(16));
        let inv2 = q.int_prec(2, 3).inv().unwrap();
        assert_eq!(inv2.prec(), 3);
        assert_eq!(inv2.integer_coords().unwrap()[0], BigInt::from(14));
    }

    #[test]
    fn pi_squared_reduces_by_eisenstein() {
        let k = f0();
        let pi = k.pi();
        let expected = &(&pi * &k.int(-3)) - &k.int(3);
        assert_eq!(pi.square(), expected);
    }

    #[test]
    fn valuations() {
        let k = f0();
        assert_eq!(k.pi().ord().unwrap(), Ratio::new(1, 2));
        assert_eq!(q3().int(18).ord().unwrap(), Ratio::from(2));
        let x = &k.pi().mul_int(2) + &k.int(3);
        assert_eq!(x.ord().unwrap(), Ratio::new(1, 2));
        assert!(k.int_prec(0, 10).ord().is_err());
    }

    #[test]
    fn trace_and_norm_f0() {
        let k = f0();
        let z = k.zeta().unwrap();
        assert_eq!(z.trace_abs().to_i64_signed(), Some(-1));
        assert_eq!(k.pi().norm_abs().to_i64_signed(), Some(3));
        let inv_pi = k.pi().inv().unwrap();
        assert_eq!(inv_pi.trace_abs().to_i64_signed(), Some(-1));
    }

    #[test]
    fn inverse_precision_loss_is_bounded() {
        let k = f0();
        let pi = k.pi();
        let inv = pi.inv().unwrap();
        // 1/pi = pi^(2-1) / (pi^2): loses one p-digit at most
        assert!(inv.prec() >= k.work_prec() - 1);
        assert_eq!(&inv * &pi, k.one().reduce_prec(inv.prec() - 1));
    }

    #[test]
    fn record_round_trip() {
        let k = f0();
        let x = (&k.pi() + &k.int(5)).inv().unwrap().scale_p(-2);
        let rec = x.to_record();
        let back = KElement::from_record(&k, &rec).unwrap();
        assert_eq!(back, x);
        assert_eq!(back.prec(), x.prec());
    }

    #[test]
    fn display_uses_expression_syntax() {
        let k = f0();
        let x = &k.int(-3) - &k.pi();
        assert_eq!(x.to_string(), "(-3 - pi)");
        assert_eq!(k.pi().scale_p(2).to_string(), "p^2*(pi)");
    }
}
