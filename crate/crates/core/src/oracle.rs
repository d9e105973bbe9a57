//! Brute-force norm-group oracle for level `n = 1`.
//!
//! `alpha` is a norm from `L = K(beta^(1/p))` iff `(alpha, beta) = 1`. The
//! oracle decides membership directly: it computes coordinates in
//! `V = K^*/(K^*)^p` by exhaustive search, spans the image of sampled norms
//! from `L`, and tests `alpha` against that span. It shares no code with the
//! explicit formulas.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, KElement};
use crate::par::Exec;
use crate::roots::{is_principal_pth_power, is_pth_power, teichmuller};
use crate::sample::{random_element_with, rng_from_seed, Constraint};

/// `L = K[X]/(X^p - beta)`.
#[derive(Clone, Debug)]
pub struct KummerExtension {
    base: Field,
    beta: KElement,
    degenerate: bool,
}

/// An element `sum c_i gamma^i` of `L`, `gamma^p = beta`.
#[derive(Clone, Debug)]
pub struct LElement {
    coeffs: Vec<KElement>,
}

impl LElement {
    pub fn coeffs(&self) -> &[KElement] {
        &self.coeffs
    }
}

pub fn build_extension(field: &Field, beta: &KElement) -> Result<KummerExtension> {
    if beta.is_zero() {
        return Err(Error::IndistinguishableFromZero { prec: beta.prec() });
    }
    let degenerate = is_pth_power(beta)?;
    Ok(KummerExtension { base: field.clone(), beta: beta.clone(), degenerate })
}

impl KummerExtension {
    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn beta(&self) -> &KElement {
        &self.beta
    }

    /// Whether `beta` is a `p`-th power, so that `X^p - beta` is reducible.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn degree(&self) -> usize {
        self.base.p() as usize
    }

    pub fn element(&self, coeffs: Vec<KElement>) -> LElement {
        assert_eq!(coeffs.len(), self.degree());
        LElement { coeffs }
    }

    pub fn from_base(&self, x: &KElement) -> LElement {
        let mut coeffs = vec![KElement::zero(&self.base, x.prec()); self.degree()];
        coeffs[0] = x.clone();
        LElement { coeffs }
    }

    /// The adjoined root `gamma`.
    pub fn gamma(&self, prec: i64) -> LElement {
        let mut coeffs = vec![KElement::zero(&self.base, prec); self.degree()];
        coeffs[1] = self.base.int_prec(1, prec);
        LElement { coeffs }
    }

    pub fn mul(&self, x: &LElement, y: &LElement) -> LElement {
        let p = self.degree();
        let mut out: Vec<Option<KElement>> = vec![None; p];
        for (i, a) in x.coeffs.iter().enumerate() {
            for (j, b) in y.coeffs.iter().enumerate() {
                let mut t = a * b;
                if i + j >= p {
                    t = &t * &self.beta;
                }
                let slot = &mut out[(i + j) % p];
                *slot = Some(match slot.take() {
                    None => t,
                    Some(s) => &s + &t,
                });
            }
        }
        LElement { coeffs: out.into_iter().map(Option::unwrap).collect() }
    }

    /// Matrix of multiplication by `x` on the basis `gamma^j`; entry `[r][c]`.
    fn mul_matrix(&self, x: &LElement) -> Vec<Vec<KElement>> {
        let p = self.degree();
        let prec = x.coeffs.iter().map(|c| c.prec()).min().unwrap();
        let mut m = vec![vec![KElement::zero(&self.base, prec); p]; p];
        for (i, xi) in x.coeffs.iter().enumerate() {
            for c in 0..p {
                let r = (i + c) % p;
                m[r][c] = if i + c >= p { xi * &self.beta } else { xi.clone() };
            }
        }
        m
    }
}

/// `N_{L/K}(x)` as the determinant of multiplication by `x`, expanded by the
/// Leibniz formula.
pub fn norm_l_to_k(ext: &KummerExtension, x: &LElement) -> KElement {
    let m = ext.mul_matrix(x);
    let p = ext.degree();
    let mut acc: Option<KElement> = None;
    for perm in (0..p).permutations(p) {
        let inversions = (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        let mut t = m[0][perm[0]].clone();
        for (r, &c) in perm.iter().enumerate().skip(1) {
            t = &t * &m[r][c];
        }
        if inversions % 2 == 1 {
            t = -t;
        }
        acc = Some(match acc {
            None => t,
            Some(a) => &a + &t,
        });
    }
    acc.unwrap()
}

/// A subspace of `F_p^dim` kept in echelon form.
#[derive(Clone, Debug)]
pub struct Span {
    p: u64,
    dim: usize,
    rows: Vec<(usize, Vec<u64>)>,
}

impl Span {
    pub fn new(p: u64, dim: usize) -> Self {
        Span { p, dim, rows: Vec::new() }
    }

    pub fn full(p: u64, dim: usize) -> Self {
        let mut s = Self::new(p, dim);
        for i in 0..dim {
            let mut v = vec![0; dim];
            v[i] = 1;
            s.insert(&v);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut v = v.to_vec();
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = (*x + (p - c) * r) % p;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        let p = self.p;
        let mut v = self.reduce(v);
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = (1..p).find(|k| k * v[piv] % p == 1).unwrap();
        for x in v.iter_mut() {
            *x = *x * inv % p;
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = (*x + (p - c) * r) % p;
                }
            }
        }
        self.rows.push((piv, v));
        true
    }
}

/// Generators of `V = K^*/(K^*)^p` with a table for coordinate search.
///
/// `generators[0] = pi`; the rest are principal units `1 + c pi^i`, chosen
/// greedily (first `c = 1`, then other residues) and kept only when
/// independent of those already chosen.
#[derive(Clone, Debug)]
pub struct ClassSpace {
    field: Field,
    prec: i64,
    exec: Exec,
    generators: Vec<KElement>,
    /// Entry `t` is `prod_j g_j^(-d_j)` over the unit generators, `d_j` the
    /// base-`p` digits of `t` (first generator lowest).
    table: Vec<KElement>,
}

impl ClassSpace {
    pub fn new(field: &Field) -> Result<Self> {
        Self::with_exec(field, Exec::default())
    }

    pub fn with_exec(field: &Field, exec: Exec) -> Result<Self> {
        let (p, e) = (field.p() as i64, field.e() as i64);
        let top = e * p / (p - 1);
        // classes are determined modulo U^(top + 1)
        let prec = (top + 1 + e - 1) / e + 2;
        let has_mu_p = field.level() >= 1 || crate::roots::find_zeta(field, 1).is_some();
        let want_units = field.degree() + has_mu_p as usize;
        let pi = field.pi_prec(prec);
        let one = field.int_prec(1, prec);
        let digits = field.residue_digits(prec);
        let pi_pows: Vec<KElement> = (0..=top).map(|i| pi.pow_u(i as u64)).collect();
        let mut candidates = Vec::new();
        for i in 1..=top {
            candidates.push(&one + &pi_pows[i as usize]);
        }
        for i in 1..=top {
            for c in digits.iter().skip(2) {
                candidates.push(&one + &(c * &pi_pows[i as usize]));
            }
        }
        let mut units: Vec<KElement> = Vec::new();
        let mut table = vec![one.clone()];
        for g in candidates {
            if units.len() == want_units {
                break;
            }
            let dependent = exec.find_first(0..table.len() as u64, |t| {
                match is_principal_pth_power(&(&g * &table[t as usize])) {
                    Ok(true) => Some(Ok(())),
                    Ok(false) => None,
                    Err(err) => Some(Err(err)),
                }
            });
            match dependent {
                Some(Err(err)) => return Err(err),
                Some(Ok(())) => continue,
                None => {}
            }
            let g_inv = g.inv()?;
            let mut next = Vec::with_capacity(table.len() * p as usize);
            let mut power = one.clone();
            for _ in 0..p {
                next.extend(table.iter().map(|s| s * &power));
                power = &power * &g_inv;
            }
            table = next;
            units.push(g);
        }
        if units.len() < want_units {
            return Err(Error::Oracle(format!(
                "generator ladder reached {} independent units, expected {want_units}",
                units.len()
            )));
        }
        let mut generators = vec![pi];
        generators.extend(units);
        Ok(ClassSpace { field: field.clone(), prec, exec, generators, table })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[KElement] {
        &self.generators
    }

    /// Absolute precision the search runs at.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Number of candidate unit classes searched per query.
    pub fn candidates(&self) -> usize {
        self.table.len()
    }

    /// Exponent vector of `u` on the generators, entries in `[0, p)`.
    pub fn coordinates(&self, u: &KElement) -> Result<Vec<u64>> {
        let field = &self.field;
        let p = field.p();
        let v = u.valuation_pi().ok_or(Error::IndistinguishableFromZero { prec: u.prec() })?;
        let w = if v == 0 {
            u.clone()
        } else {
            u.div(&field.pi_prec(u.prec() + v.abs() + 1).pow(v)?)?
        };
        let w = w.reduce_prec(self.prec);
        if w.prec() < self.prec {
            return Err(Error::Precision(format!("class search needs precision p^{}", self.prec)));
        }
        let w1 = w.div(&teichmuller(&w)?)?;
        let hit = self.exec.find_first(0..self.table.len() as u64, |t| {
            match is_principal_pth_power(&(&w1 * &self.table[t as usize])) {
                Ok(true) => Some(Ok(t)),
                Ok(false) => None,
                Err(err) => Some(Err(err)),
            }
        });
        let mut t = match hit {
            Some(r) => r?,
            None => return Err(Error::Oracle("no class matched; generators do not span V".into())),
        };
        let mut coords = vec![v.rem_euclid(p as i64) as u64];
        for _ in 1..self.dim() {
            coords.push(t % p);
            t /= p;
        }
        Ok(coords)
    }
}

pub fn class_coordinates(space: &ClassSpace, u: &KElement) -> Result<Vec<u64>> {
    space.coordinates(u)
}

/// The image of `N_{L/K}` in `V`.
#[derive(Clone, Debug)]
pub struct NormSubgroup {
    pub span: Span,
    pub samples: usize,
    pub degenerate: bool,
}

impl NormSubgroup {
    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    pub fn contains(&self, coords: &[u64]) -> bool {
        self.span.contains(coords)
    }
}

/// Samples after the expected rank is reached, to confirm it does not grow.
const CONFIRM_SAMPLES: usize = 3;
const RANDOM_BUDGET: usize = 64;

/// Spans the classes of a deterministic set of norms: `gamma`,
/// `1 + pi^i gamma^j`, `c + gamma` for residues `c`, then seeded random
/// elements. Index `p` is asserted: the rank must reach `dim - 1` and stay
/// there.
pub fn norm_subgroup(space: &ClassSpace, ext: &KummerExtension) -> Result<NormSubgroup> {
    let field = space.field();
    let p = field.p();
    let dim = space.dim();
    if ext.is_degenerate() {
        return Ok(NormSubgroup { span: Span::full(p, dim), samples: 0, degenerate: true });
    }
    // headroom for dividing norms by their pi-power
    let prec = space.prec() + 10;
    let e = field.e() as i64;
    let top = e * p as i64 / (p as i64 - 1);
    let one = field.int_prec(1, prec);
    let zero = KElement::zero(field, prec);
    let pi = field.pi_prec(prec);
    let mut fixed: Vec<LElement> = vec![ext.gamma(prec)];
    for i in 0..=top {
        let pi_i = pi.pow_u(i as u64);
        for j in 1..p as usize {
            let mut c = vec![zero.clone(); p as usize];
            c[0] = one.clone();
            c[j] = &c[j] + &pi_i;
            fixed.push(ext.element(c));
        }
    }
    for d in field.residue_digits(prec).into_iter().skip(1) {
        let mut c = vec![zero.clone(); p as usize];
        c[0] = d;
        c[1] = one.clone();
        fixed.push(ext.element(c));
    }
    let mut rng = rng_from_seed(0x6e6f726d);
    let random = (0..RANDOM_BUDGET).map(move |_| {
        let c = (0..p).map(|_| random_element_with(field, Constraint::Integral, &mut rng).reduce_prec(prec)).collect();
        LElement { coeffs: c }
    });
    let mut span = Span::new(p, dim);
    let mut samples = 0;
    let mut confirmed = 0;
    for x in fixed.into_iter().chain(random) {
        let n = norm_l_to_k(ext, &x);
        if n.is_zero() {
            continue;
        }
        samples += 1;
        span.insert(&space.coordinates(&n)?);
        if span.rank() >= dim {
            return Err(Error::Oracle(format!("norms span all of V (dim {dim}); index p violated")));
        }
        if span.rank() == dim - 1 {
            confirmed += 1;
            if confirmed > CONFIRM_SAMPLES {
                break;
            }
        }
    }
    if span.rank() != dim - 1 {
        return Err(Error::Oracle(format!(
            "sampled norms reached rank {} after {samples} samples, expected {}",
            span.rank(),
            dim - 1
        )));
    }
    Ok(NormSubgroup { span, samples, degenerate: false })
}

/// Oracle answer for one pair.
#[derive(Clone, Debug, Serialize)]
pub struct OracleVerdict {
    pub alpha: String,
    pub beta: String,
    pub is_norm: bool,
    pub rank: usize,
    pub degenerate: bool,
}

/// Reusable oracle for a fixed tower.
#[derive(Clone, Debug)]
pub struct NormOracle {
    space: ClassSpace,
}

/// The oracle covers `n = 1` and `p` in `{3, 5}`.
pub fn check_supported(p: u64, n: u32) -> Result<()> {
    if n != 1 || !matches!(p, 3 | 5) {
        return Err(Error::Unsupported(format!("norm oracle needs n = 1 and p in {{3, 5}}, got p = {p}, n = {n}")));
    }
    Ok(())
}

impl NormOracle {
    pub fn new(field: &Field) -> Result<Self> {
        Self::with_exec(field, Exec::default())
    }

    pub fn with_exec(field: &Field, exec: Exec) -> Result<Self> {
        check_supported(field.p(), field.level())?;
        Ok(NormOracle { space: ClassSpace::with_exec(field, exec)? })
    }

    pub fn space(&self) -> &ClassSpace {
        &self.space
    }

    pub fn norm_subgroup(&self, beta: &KElement) -> Result<NormSubgroup> {
        norm_subgroup(&self.space, &build_extension(self.space.field(), beta)?)
    }

    pub fn verdict(&self, alpha: &KElement, beta: &KElement) -> Result<OracleVerdict> {
        if alpha.is_zero() {
            return Err(Error::IndistinguishableFromZero { prec: alpha.prec() });
        }
        let sub = self.norm_subgroup(beta)?;
        let is_norm = sub.contains(&self.space.coordinates(alpha)?);
        Ok(OracleVerdict {
            alpha: alpha.to_string(),
            beta: beta.to_string(),
            is_norm,
            rank: sub.rank(),
            degenerate: sub.degenerate,
        })
    }

    pub fn is_norm(&self, alpha: &KElement, beta: &KElement) -> Result<bool> {
        Ok(self.verdict(alpha, beta)?.is_norm)
    }
}

/// Whether `alpha` is a norm from `K(beta^(1/p))`.
pub fn is_norm(field: &Field, alpha: &KElement, beta: &KElement) -> Result<bool> {
    NormOracle::new(field)?.is_norm(alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldDesc};

    fn f0() -> Field {
        make_field(FieldDesc::new(3, 1, &[0, 1], &[3, 3, 1])).unwrap()
    }

    #[test]
    fn class_space_of_f0() {
        let k = f0();
        let space = ClassSpace::new(&k).unwrap();
        assert_eq!(space.dim(), 4);
        assert_eq!(space.candidates(), 27);
        let pi = k.pi();
        let expected = [k.one(), &k.one() + &pi, &k.one() + &pi.square(), &k.one() + &pi.pow_u(3)];
        for (g, x) in space.generators()[1..].iter().zip(&expected[1..]) {
            assert_eq!(g, x);
        }
        assert_eq!(space.coordinates(&k.pi()).unwrap(), vec![1, 0, 0, 0]);
        assert_eq!(space.coordinates(&k.int(4)).unwrap()[0], 0);
        assert_eq!(space.coordinates(&k.int(8)).unwrap(), vec![0; 4]);
        assert_eq!(space.coordinates(&k.int(-1)).unwrap(), vec![0; 4]);
        let zeta = k.zeta().unwrap();
        let a = space.coordinates(&zeta).unwrap();
        let b = space.coordinates(&zeta.square()).unwrap();
        assert_eq!(b, a.iter().map(|x| 2 * x % 3).collect::<Vec<_>>());
    }

    #[test]
    fn kummer_norms() {
        let k = f0();
        let zeta = k.zeta().unwrap();
        let ext = build_extension(&k, &zeta).unwrap();
        assert!(!ext.is_degenerate());
        let prec = k.work_prec();
        assert_eq!(norm_l_to_k(&ext, &ext.gamma(prec)), zeta);
        let x = ext.from_base(&k.int(2));
        assert_eq!(norm_l_to_k(&ext, &x), k.int(8));
        let y = ext.element(vec![k.one(), k.pi(), k.int(2)]);
        let ny = norm_l_to_k(&ext, &y);
        let nxy = norm_l_to_k(&ext, &ext.mul(&x, &y));
        assert_eq!(nxy, &k.int(8) * &ny);
    }

    #[test]
    fn degenerate_extensions() {
        let k = f0();
        let oracle = NormOracle::new(&k).unwrap();
        for beta in [k.int(-1), k.int(8)] {
            let sub = oracle.norm_subgroup(&beta).unwrap();
            assert!(sub.degenerate);
            assert!(oracle.is_norm(&k.pi(), &beta).unwrap());
        }
    }

    #[test]
    fn zeta_extension() {
        let k = f0();
        let oracle = NormOracle::new(&k).unwrap();
        let zeta = k.zeta().unwrap();
        let sub = oracle.norm_subgroup(&zeta).unwrap();
        assert_eq!(sub.rank(), 3);
        // (4, zeta) = zeta^2
        assert!(!oracle.is_norm(&k.int(4), &zeta).unwrap());
        assert!(oracle.is_norm(&zeta, &zeta).unwrap());
        assert!(oracle.is_norm(&k.int(-1), &zeta).unwrap());
    }

    #[test]
    fn span_echelon() {
        let mut s = Span::new(3, 3);
        assert!(s.insert(&[1, 2, 0]));
        assert!(!s.insert(&[2, 1, 0]));
        assert!(s.contains(&[0, 0, 0]));
        assert!(!s.contains(&[0, 1, 0]));
        assert!(s.insert(&[0, 1, 1]));
        assert_eq!(s.rank(), 2);
        assert!(s.contains(&[1, 0, 1]));
        assert_eq!(Span::full(3, 3).rank(), 3);
    }

    #[test]
    fn unsupported_fields() {
        let k = make_field(FieldDesc::qp(3)).unwrap();
        assert!(matches!(NormOracle::new(&k), Err(Error::Unsupported(_))));
    }
}
