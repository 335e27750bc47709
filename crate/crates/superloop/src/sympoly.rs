//! Sparse polynomials in commuting symbols with Grassmann-algebra
//! coefficients.
//!
//! This is the shared engine behind the Gaussian integration oracle and the
//! change-of-variables (Berezinian) checks: matrix entries become either
//! bosonic symbols (commuting, even) or Grassmann generators (anticommuting),
//! and whole expressions such as str((x − BM)⁻¹C) are expanded into elements
//! of this ring before being integrated or differentiated.

use crate::grassmann::{GrassmannElement, GrassmannError};
use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;

/// Commutative monomial: ascending (symbol, exponent) pairs.
pub type BosMono = Vec<(u32, u32)>;

fn mono_mul(a: &BosMono, b: &BosMono) -> BosMono {
    let mut out: BosMono = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[derive(Clone, PartialEq)]
pub struct SymPoly<C: Scalar> {
    gens: u32,
    terms: BTreeMap<BosMono, GrassmannElement<C>>,
}

impl<C: Scalar> SymPoly<C> {
    pub fn zero(gens: u32) -> Self {
        Self {
            gens,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(gens: u32) -> Self {
        Self::from_grassmann(GrassmannElement::one(gens))
    }

    pub fn scalar(gens: u32, c: C) -> Self {
        Self::from_grassmann(GrassmannElement::scalar(gens, c))
    }

    pub fn from_grassmann(g: GrassmannElement<C>) -> Self {
        let gens = g.generator_count();
        let mut out = Self::zero(gens);
        if !g.is_zero() {
            out.terms.insert(Vec::new(), g);
        }
        out
    }

    /// A single bosonic symbol.
    pub fn symbol(gens: u32, sym: u32) -> Self {
        let mut out = Self::zero(gens);
        out.terms
            .insert(vec![(sym, 1)], GrassmannElement::one(gens));
        out
    }

    /// A single fermionic generator.
    pub fn generator(gens: u32, i: usize) -> Result<Self, GrassmannError> {
        Ok(Self::from_grassmann(GrassmannElement::generator(gens, i)?))
    }

    pub fn generator_count(&self) -> u32 {
        self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BosMono, &GrassmannElement<C>)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient of the empty bosonic monomial.
    pub fn constant_part(&self) -> GrassmannElement<C> {
        self.terms
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(|| GrassmannElement::zero(self.gens))
    }

    /// The value when the polynomial contains no bosonic symbols at all.
    pub fn as_grassmann(&self) -> Option<GrassmannElement<C>> {
        if self.terms.keys().all(|m| m.is_empty()) {
            Some(self.constant_part())
        } else {
            None
        }
    }

    fn insert(&mut self, mono: BosMono, g: GrassmannElement<C>) {
        if g.is_zero() {
            return;
        }
        match self.terms.get_mut(&mono) {
            Some(existing) => {
                let sum = existing.add(&g);
                if sum.is_zero() {
                    self.terms.remove(&mono);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(mono, g);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, g) in &other.terms {
            out.insert(m.clone(), g.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.gens);
        for (m, g) in &self.terms {
            out.terms.insert(m.clone(), g.neg());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.gens);
        if c.is_zero() {
            return out;
        }
        for (m, g) in &self.terms {
            let s = g.scale(c);
            if !s.is_zero() {
                out.terms.insert(m.clone(), s);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.gens);
        for (m1, g1) in &self.terms {
            for (m2, g2) in &other.terms {
                let g = g1.mul(g2).expect("generator counts agree");
                if !g.is_zero() {
                    out.insert(mono_mul(m1, m2), g);
                }
            }
        }
        out
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut out = Self::one(self.gens);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to a bosonic symbol.
    pub fn derivative_symbol(&self, sym: u32) -> Self {
        let mut out = Self::zero(self.gens);
        for (m, g) in &self.terms {
            if let Some(pos) = m.iter().position(|&(s, _)| s == sym) {
                let e = m[pos].1;
                let mut m2 = m.clone();
                if e == 1 {
                    m2.remove(pos);
                } else {
                    m2[pos].1 = e - 1;
                }
                out.insert(m2, g.scale(&C::from_int(e as i64)));
            }
        }
        out
    }

    /// Graded left derivative with respect to a fermionic generator.
    pub fn derivative_generator(&self, gen: usize) -> Result<Self, GrassmannError> {
        let mut out = Self::zero(self.gens);
        for (m, g) in &self.terms {
            let d = g.left_derivative(gen)?;
            if !d.is_zero() {
                out.insert(m.clone(), d);
            }
        }
        Ok(out)
    }
}

impl<C: Scalar> fmt::Debug for SymPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, g) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{:?}]", g)?;
            for &(s, e) in m {
                write!(f, "·s{}^{}", s, e)?;
            }
        }
        Ok(())
    }
}

/// Square matrix over the symbolic ring.
pub type Mat<C> = Vec<Vec<SymPoly<C>>>;

pub fn mat_zero<C: Scalar>(gens: u32, dim: usize) -> Mat<C> {
    vec![vec![SymPoly::zero(gens); dim]; dim]
}

pub fn mat_identity<C: Scalar>(gens: u32, dim: usize) -> Mat<C> {
    let mut m = mat_zero(gens, dim);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = SymPoly::one(gens);
    }
    m
}

pub fn mat_add<C: Scalar>(a: &Mat<C>, b: &Mat<C>) -> Mat<C> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

pub fn mat_sub<C: Scalar>(a: &Mat<C>, b: &Mat<C>) -> Mat<C> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
        .collect()
}

pub fn mat_mul<C: Scalar>(a: &Mat<C>, b: &Mat<C>) -> Mat<C> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let gens = a[0][0].generator_count();
    let mut out = mat_zero(gens, n);
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                if b[k][j].is_zero() {
                    continue;
                }
                out[i][j] = out[i][j].add(&aik.mul(&b[k][j]));
            }
        }
    }
    out
}

pub fn mat_scale_poly<C: Scalar>(a: &Mat<C>, s: &SymPoly<C>) -> Mat<C> {
    a.iter()
        .map(|row| row.iter().map(|x| x.mul(s)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cq, CQ};

    #[test]
    fn symbol_arithmetic() {
        let x = SymPoly::<CQ>::symbol(0, 1);
        let y = SymPoly::<CQ>::symbol(0, 2);
        let p = x.add(&y).pow(2);
        // x² + 2xy + y²
        assert_eq!(p.num_terms(), 3);
        let dx = p.derivative_symbol(1);
        let expected = x.scale(&cq(2, 1)).add(&y.scale(&cq(2, 1)));
        assert_eq!(dx, expected);
    }

    #[test]
    fn mixed_fermionic_terms() {
        let x = SymPoly::<CQ>::symbol(2, 1);
        let th0 = SymPoly::<CQ>::generator(2, 0).unwrap();
        let th1 = SymPoly::<CQ>::generator(2, 1).unwrap();
        let p = x.mul(&th0).add(&th1);
        let q = th0.mul(&th1);
        // θ0θ1 · (xθ0 + θ1) = 0
        assert!(q.mul(&p).is_zero());
        // ∂_{θ0}(xθ0θ1) = xθ1
        let d = x.mul(&q).derivative_generator(0).unwrap();
        assert_eq!(d, x.mul(&th1));
    }
}
