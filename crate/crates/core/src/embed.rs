//! Embeddings of a smaller tower `k` into `K`, relative coordinates and the
//! relative trace.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{make_field, Field, FieldDesc, KElement};
use crate::padic::{solve, PadicScalar};
use crate::poly::Poly;

/// `k -> K` given by the images of `pi_k` and `u_k`.
///
/// `K` is viewed as a `k`-vector space on the basis `g^i u_K^j`
/// (`i < e_K/e_k`, `j < f_K/f_k`) for a relative generator `g`, by default
/// `pi_K`.
#[derive(Clone, Debug)]
pub struct SubfieldEmbedding {
    sub: Field,
    target: Field,
    pi_image: KElement,
    u_image: KElement,
    rel_gen: KElement,
    /// Images of the basis `pi_k^i u_k^j` of `k`.
    sub_basis: Vec<KElement>,
    /// The `k`-basis of `K`.
    rel_basis: Vec<KElement>,
    /// Columns `sub_basis[c] * rel_basis[r]` in `Q_p`-coordinates, index `r * d_k + c`.
    columns: Vec<Vec<PadicScalar>>,
}

impl SubfieldEmbedding {
    pub fn new(sub: &Field, target: &Field, pi_image: KElement, u_image: KElement) -> Result<Self> {
        let rel_gen = target.pi();
        Self::with_generator(sub, target, pi_image, u_image, rel_gen)
    }

    pub fn with_generator(
        sub: &Field,
        target: &Field,
        pi_image: KElement,
        u_image: KElement,
        rel_gen: KElement,
    ) -> Result<Self> {
        if sub.p() != target.p() {
            return Err(Error::FieldMismatch);
        }
        if target.e() % sub.e() != 0 || target.f() % sub.f() != 0 {
            return Err(Error::InvalidField(format!(
                "(e, f) = ({}, {}) does not divide ({}, {})",
                sub.e(),
                sub.f(),
                target.e(),
                target.f()
            )));
        }
        let prec = target.work_prec();
        let check = sub.work_prec().min(prec) - 4;
        let unram = Poly::from_bigints(target, sub.unram_coeffs(), prec + 8);
        if !unram.eval(&u_image).reduce_prec(check).is_zero() {
            return Err(Error::InvalidField("u image is not a root of the unramified polynomial".into()));
        }
        let sub_f = sub.f();
        let mut u_pows = vec![target.int_prec(1, prec)];
        for j in 1..sub_f {
            let next = &u_pows[j - 1] * &u_image;
            u_pows.push(next);
        }
        let k0_image = |coords: &[num_bigint::BigInt]| -> KElement {
            let mut acc = KElement::zero(target, prec);
            for (j, c) in coords.iter().enumerate() {
                if !c.is_zero() {
                    acc = &acc + &u_pows[j].mul_int(c.clone());
                }
            }
            acc
        };
        let eis = Poly::new(target, sub.eisenstein_coeffs().iter().map(|c| k0_image(c)).collect());
        if !eis.eval(&pi_image).reduce_prec(check).is_zero() {
            return Err(Error::InvalidField("pi image is not a root of the Eisenstein polynomial".into()));
        }
        let mut sub_basis = Vec::with_capacity(sub.degree());
        let mut pi_pow = target.int_prec(1, prec);
        for i in 0..sub.e() {
            for u in &u_pows {
                sub_basis.push(&pi_pow * u);
            }
            if i + 1 < sub.e() {
                pi_pow = &pi_pow * &pi_image;
            }
        }
        let (re, rf) = (target.e() / sub.e(), target.f() / sub.f());
        let mut rel_basis = Vec::with_capacity(re * rf);
        let mut g_pow = target.int_prec(1, prec);
        for i in 0..re {
            let mut u = target.int_prec(1, prec);
            for j in 0..rf {
                rel_basis.push(&g_pow * &u);
                if j + 1 < rf {
                    u = &u * &target.unram_gen();
                }
            }
            if i + 1 < re {
                g_pow = &g_pow * &rel_gen;
            }
        }
        let columns = rel_basis
            .iter()
            .flat_map(|b| sub_basis.iter().map(move |s| (s * b).coords()))
            .collect();
        Ok(SubfieldEmbedding {
            sub: sub.clone(),
            target: target.clone(),
            pi_image,
            u_image,
            rel_gen,
            sub_basis,
            rel_basis,
            columns,
        })
    }

    pub fn sub(&self) -> &Field {
        &self.sub
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    pub fn pi_image(&self) -> &KElement {
        &self.pi_image
    }

    pub fn u_image(&self) -> &KElement {
        &self.u_image
    }

    pub fn relative_generator(&self) -> &KElement {
        &self.rel_gen
    }

    /// `[K : k]`.
    pub fn relative_degree(&self) -> usize {
        self.rel_basis.len()
    }

    pub fn relative_basis(&self) -> &[KElement] {
        &self.rel_basis
    }

    /// Image of an element of `k`.
    pub fn embed(&self, x: &KElement) -> KElement {
        assert!(x.field() == &self.sub, "element does not belong to the subfield");
        if x.is_zero() {
            return KElement::zero(&self.target, x.prec());
        }
        let mut acc = KElement::zero(&self.target, self.target.work_prec());
        for (c, b) in x.raw_coords().iter().zip(&self.sub_basis) {
            if !c.is_zero() {
                acc = &acc + &b.mul_int(c.clone());
            }
        }
        acc.scale_p(x.shift()).reduce_prec(x.prec())
    }

    /// Coordinates of `x` on the relative basis, as elements of `k`.
    pub fn relative_coordinates(&self, x: &KElement) -> Result<Vec<KElement>> {
        assert!(x.field() == &self.target, "element does not belong to the target field");
        let d = self.target.degree();
        let matrix = (0..d).map(|row| self.columns.iter().map(|col| col[row].clone()).collect()).collect();
        let sol = solve(matrix, x.coords())?;
        let dk = self.sub.degree();
        sol.chunks(dk).map(|c| KElement::from_scalars(&self.sub, c)).collect()
    }

    /// `Tr_{K/k}(x)`.
    pub fn relative_trace(&self, x: &KElement) -> Result<KElement> {
        let mut acc: Option<KElement> = None;
        for (r, b) in self.rel_basis.iter().enumerate() {
            let c = self.relative_coordinates(&(x * b))?.swap_remove(r);
            acc = Some(match acc {
                None => c,
                Some(a) => &a + &c,
            });
        }
        Ok(acc.expect("nonempty basis"))
    }

    /// The element of `k` mapping to `x`, if `x` lies in the image.
    pub fn preimage(&self, x: &KElement) -> Result<KElement> {
        let mut coords = self.relative_coordinates(x)?;
        if coords[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::OutOfModeledDomain("element does not lie in the subfield".into()));
        }
        Ok(coords.swap_remove(0))
    }

    pub fn contains(&self, x: &KElement) -> bool {
        self.preimage(x).is_ok()
    }
}

/// `K_0` as a tower of its own together with its inclusion into `K`.
pub fn unramified_subfield(field: &Field) -> Result<(Field, SubfieldEmbedding)> {
    let p = field.p();
    let mut desc = FieldDesc {
        p,
        n: 0,
        unram_poly: field.unram_coeffs().to_vec(),
        eisenstein: vec![vec![-num_bigint::BigInt::from(p)], vec![1.into()]],
        precision: Some(field.work_prec()),
    };
    desc.eisenstein.iter_mut().for_each(|c| c.resize(field.f(), 0.into()));
    let k0 = make_field(desc)?;
    let emb = SubfieldEmbedding::new(&k0, field, field.int(p), field.unram_gen())?;
    Ok((k0, emb))
}

/// `k(pi_k^(1/m))` presented by `E(X^m)`, with `pi_k -> pi^m`.
pub fn radical_extension(sub: &Field, m: usize) -> Result<(Field, SubfieldEmbedding)> {
    let big = make_field(sub.desc().radical(m))?;
    let emb = SubfieldEmbedding::new(sub, &big, big.pi().pow_u(m as u64), big.unram_gen())?;
    Ok((big, emb))
}

/// Re-presents `K` with the prime element `new_pi`: returns the tower `K'`
/// defined by the Eisenstein polynomial of `new_pi` over `K_0`, and the
/// isomorphism `K' -> K` sending `pi'` to `new_pi`.
pub fn reprime(field: &Field, new_pi: &KElement) -> Result<(Field, SubfieldEmbedding)> {
    if new_pi.valuation_pi() != Some(1) {
        return Err(Error::InvalidField("new prime element must have v_pi = 1".into()));
    }
    let (k0, _) = unramified_subfield(field)?;
    let k0_in_k = SubfieldEmbedding::with_generator(&k0, field, field.int(field.p()), field.unram_gen(), new_pi.clone())?;
    let e = field.e();
    let coords = k0_in_k.relative_coordinates(&new_pi.pow_u(e as u64))?;
    let f = field.f();
    // new_pi^e = sum a_i new_pi^i, so the polynomial is X^e - sum a_i X^i
    let mut eisenstein = coords.iter().map(|a| (-a).integer_coords()).collect::<Result<Vec<_>>>()?;
    let mut lead = vec![num_bigint::BigInt::zero(); f];
    lead[0] = 1.into();
    eisenstein.push(lead);
    let desc = FieldDesc {
        p: field.p(),
        n: field.level(),
        unram_poly: field.unram_coeffs().to_vec(),
        eisenstein,
        precision: Some(field.work_prec()),
    };
    let k2 = make_field(desc)?;
    let emb = SubfieldEmbedding::new(&k2, field, new_pi.clone(), field.unram_gen())?;
    Ok((k2, emb))
}
