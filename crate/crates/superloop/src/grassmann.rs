//! Exact arithmetic in a finite Grassmann algebra.
//!
//! Elements live in the algebra generated by up to 64 anticommuting
//! generators over a [`Scalar`] field. Monomials are stored as bitsets in
//! canonical ascending-generator order; every sign in the crate is computed
//! relative to that order. All operations are pure and values are immutable
//! after construction.

use crate::scalar::Scalar;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

pub const MAX_GENERATORS: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrassmannError {
    #[error("generator count mismatch: {0} vs {1}")]
    GeneratorCountMismatch(u32, u32),
    #[error("generator index {index} out of range (count {count})")]
    IndexOutOfRange { index: usize, count: u32 },
    #[error("repeated index {0} in Berezin integral")]
    RepeatedIndex(usize),
    #[error("generator {0} has no declared conjugate partner")]
    MissingConjugatePartner(usize),
    #[error("exponential of element with nonzero body")]
    NonzeroBody,
    #[error("exponential of element with an odd-degree monomial")]
    OddMonomial,
    #[error("element has no inverse (zero body)")]
    NonInvertible,
    #[error("too many generators: {0} (max {MAX_GENERATORS})")]
    TooManyGenerators(u32),
}

/// Parity of the permutation that sorts the concatenation of two disjoint
/// ascending monomials: for each generator of `b`, count the generators of
/// `a` above it.
fn merge_sign(a: u64, b: u64) -> i32 {
    let mut parity = 0u32;
    let mut rest = b;
    while rest != 0 {
        let i = rest.trailing_zeros();
        rest &= rest - 1;
        if i + 1 < 64 {
            parity ^= (a >> (i + 1)).count_ones() & 1;
        }
    }
    if parity & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Element of the Grassmann algebra on `gens` generators, stored as a sparse
/// map from generator subsets (ascending bitsets) to nonzero coefficients.
#[derive(Clone, PartialEq)]
pub struct GrassmannElement<C: Scalar> {
    gens: u32,
    terms: BTreeMap<u64, C>,
}

impl<C: Scalar> GrassmannElement<C> {
    pub fn zero(gens: u32) -> Self {
        assert!(gens <= MAX_GENERATORS);
        Self {
            gens,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(gens: u32) -> Self {
        Self::scalar(gens, C::one())
    }

    pub fn scalar(gens: u32, c: C) -> Self {
        let mut e = Self::zero(gens);
        if !c.is_zero() {
            e.terms.insert(0, c);
        }
        e
    }

    /// The single generator θ_i.
    pub fn generator(gens: u32, i: usize) -> Result<Self, GrassmannError> {
        if i as u32 >= gens {
            return Err(GrassmannError::IndexOutOfRange {
                index: i,
                count: gens,
            });
        }
        let mut e = Self::zero(gens);
        e.terms.insert(1u64 << i, C::one());
        Ok(e)
    }

    /// Monomial c·θ_{i1}···θ_{ik} for ascending distinct indices.
    pub fn monomial(gens: u32, indices: &[usize], c: C) -> Result<Self, GrassmannError> {
        let mut bits = 0u64;
        let mut sign = 1i32;
        for &i in indices {
            if i as u32 >= gens {
                return Err(GrassmannError::IndexOutOfRange {
                    index: i,
                    count: gens,
                });
            }
            let b = 1u64 << i;
            if bits & b != 0 {
                // θ_i² = 0
                return Ok(Self::zero(gens));
            }
            sign *= merge_sign(bits, b);
            bits |= b;
        }
        let mut e = Self::zero(gens);
        let coeff = if sign == 1 { c } else { -c };
        if !coeff.is_zero() {
            e.terms.insert(bits, coeff);
        }
        Ok(e)
    }

    pub fn generator_count(&self) -> u32 {
        self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the empty monomial.
    pub fn body(&self) -> C {
        self.terms.get(&0).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeff(&self, bits: u64) -> C {
        self.terms.get(&bits).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &C)> {
        self.terms.iter().map(|(&b, c)| (b, c))
    }

    /// True when every monomial has even degree.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|b| b.count_ones() % 2 == 0)
    }

    /// True when every monomial has odd degree.
    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|b| b.count_ones() % 2 == 1)
    }

    /// Degree parity when the element is homogeneous, `None` otherwise.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|b| (b.count_ones() % 2) as u8);
        let first = it.next()?;
        if it.all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    fn insert_term(&mut self, bits: u64, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&bits) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&bits);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(bits, c);
            }
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<(), GrassmannError> {
        if self.gens != other.gens {
            Err(GrassmannError::GeneratorCountMismatch(self.gens, other.gens))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other).expect("generator counts differ");
        let mut out = self.clone();
        for (&b, c) in &other.terms {
            out.insert_term(b, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.gens);
        for (&b, c) in &self.terms {
            out.terms.insert(b, -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.gens);
        if c.is_zero() {
            return out;
        }
        for (&b, x) in &self.terms {
            let v = x.clone() * c.clone();
            if !v.is_zero() {
                out.terms.insert(b, v);
            }
        }
        out
    }

    /// Graded-commutative product; monomials with a repeated generator vanish.
    pub fn mul(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.gens);
        for (&b1, c1) in &self.terms {
            for (&b2, c2) in &other.terms {
                if b1 & b2 != 0 {
                    continue;
                }
                let sign = merge_sign(b1, b2);
                let mut c = c1.clone() * c2.clone();
                if sign < 0 {
                    c = -c;
                }
                out.insert_term(b1 | b2, c);
            }
        }
        Ok(out)
    }

    /// Left derivative ∂/∂θ_i: removes θ_i from each monomial with the sign
    /// of the generators preceding it; monomials lacking θ_i map to zero.
    pub fn left_derivative(&self, i: usize) -> Result<Self, GrassmannError> {
        if i as u32 >= self.gens {
            return Err(GrassmannError::IndexOutOfRange {
                index: i,
                count: self.gens,
            });
        }
        let bit = 1u64 << i;
        let below = bit - 1;
        let mut out = Self::zero(self.gens);
        for (&b, c) in &self.terms {
            if b & bit == 0 {
                continue;
            }
            let sign_neg = (b & below).count_ones() % 2 == 1;
            let coeff = if sign_neg { -c.clone() } else { c.clone() };
            out.insert_term(b & !bit, coeff);
        }
        Ok(out)
    }

    /// Iterated Berezin integral ∫dθ_{i1}…dθ_{ik}, the innermost (last
    /// listed) differential applied first; ∫dθ_i θ_j = δ_ij, ∫dθ_i 1 = 0.
    pub fn berezin_integral(&self, indices: &[usize]) -> Result<Self, GrassmannError> {
        let mut seen = 0u64;
        for &i in indices {
            if i as u32 >= self.gens {
                return Err(GrassmannError::IndexOutOfRange {
                    index: i,
                    count: self.gens,
                });
            }
            let b = 1u64 << i;
            if seen & b != 0 {
                return Err(GrassmannError::RepeatedIndex(i));
            }
            seen |= b;
        }
        let mut out = self.clone();
        for &i in indices.iter().rev() {
            out = out.left_derivative(i)?;
        }
        Ok(out)
    }

    /// Complex conjugation with (cθ)* = c*θ*, (θ_iθ_j)* = θ_j*θ_i*.
    pub fn conjugate(&self, table: &ConjugationTable) -> Result<Self, GrassmannError> {
        let mut out = Self::zero(self.gens);
        for (&b, c) in &self.terms {
            // Monomial θ_{a1}…θ_{ak} (ascending) maps to θ*_{ak}…θ*_{a1};
            // re-sort the image sequence and track the permutation parity.
            let mut seq: Vec<usize> = Vec::new();
            let mut rest = b;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                seq.push(table.partner(i, self.gens)?);
            }
            seq.reverse();
            let mut parity = 0usize;
            for a in 0..seq.len() {
                for b2 in (a + 1)..seq.len() {
                    if seq[a] > seq[b2] {
                        parity ^= 1;
                    }
                }
            }
            let mut bits = 0u64;
            for &i in &seq {
                bits |= 1u64 << i;
            }
            let mut coeff = c.conj();
            if parity == 1 {
                coeff = -coeff;
            }
            out.insert_term(bits, coeff);
        }
        Ok(out)
    }

    /// Terminating exponential of a body-free even element.
    pub fn exp_nilpotent(&self) -> Result<Self, GrassmannError> {
        if !self.body().is_zero() {
            return Err(GrassmannError::NonzeroBody);
        }
        if !self.is_even() {
            return Err(GrassmannError::OddMonomial);
        }
        let mut out = Self::one(self.gens);
        let mut power = Self::one(self.gens);
        let mut k = 1i64;
        loop {
            power = power.mul(self)?;
            if power.is_zero() {
                break;
            }
            let fact_inv = C::from_int(k).try_inv().expect("k! invertible");
            out = out.add(&power.scale(&fact_inv));
            power = power.scale(&fact_inv);
            k += 1;
        }
        Ok(out)
    }

    /// Re-embeds the element into an algebra with `new_gens` generators,
    /// shifting every generator index up by `offset`.
    pub fn shift_generators(&self, offset: u32, new_gens: u32) -> Result<Self, GrassmannError> {
        if new_gens > MAX_GENERATORS {
            return Err(GrassmannError::TooManyGenerators(new_gens));
        }
        let mut out = Self::zero(new_gens);
        for (&bits, c) in &self.terms {
            let hi = 64 - bits.leading_zeros();
            if hi + offset > new_gens {
                return Err(GrassmannError::IndexOutOfRange {
                    index: (hi + offset) as usize - 1,
                    count: new_gens,
                });
            }
            out.terms.insert(bits << offset, c.clone());
        }
        Ok(out)
    }

    /// Inverse of an even element with invertible body, via the terminating
    /// Neumann series on the nilpotent part.
    pub fn inverse(&self) -> Result<Self, GrassmannError> {
        let b = self.body();
        let binv = b.try_inv().ok_or(GrassmannError::NonInvertible)?;
        // self = b(1 + n), n nilpotent
        let n = self.scale(&binv).sub(&Self::one(self.gens));
        let mut out = Self::one(self.gens);
        let mut power = Self::one(self.gens);
        loop {
            power = power.mul(&n)?.neg();
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        Ok(out.scale(&binv))
    }
}

impl<C: Scalar> fmt::Debug for GrassmannElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&b, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            let mut rest = b;
            while rest != 0 {
                let i = rest.trailing_zeros();
                rest &= rest - 1;
                write!(f, "·θ{}", i)?;
            }
        }
        Ok(())
    }
}

/// Declares the conjugation pairing θ_i ↔ θ_{partner(i)} (an involution).
#[derive(Clone, Debug)]
pub struct ConjugationTable {
    partner: Vec<Option<usize>>,
}

impl ConjugationTable {
    pub fn new(gens: u32) -> Self {
        Self {
            partner: vec![None; gens as usize],
        }
    }

    /// Pairs generators i and j as mutual conjugates.
    pub fn pair(mut self, i: usize, j: usize) -> Self {
        self.partner[i] = Some(j);
        self.partner[j] = Some(i);
        self
    }

    /// The layout used throughout the crate: consecutive (θ, θ*) pairs.
    pub fn interleaved(gens: u32) -> Self {
        let mut t = Self::new(gens);
        let mut i = 0;
        while i + 1 < gens as usize {
            t = t.pair(i, i + 1);
            i += 2;
        }
        t
    }

    fn partner(&self, i: usize, gens: u32) -> Result<usize, GrassmannError> {
        if i as u32 >= gens || i >= self.partner.len() {
            return Err(GrassmannError::IndexOutOfRange {
                index: i,
                count: gens,
            });
        }
        self.partner[i].ok_or(GrassmannError::MissingConjugatePartner(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cq, cqi, CQ};
    use num_traits::{One, Zero};

    type Ga = GrassmannElement<CQ>;

    fn theta(gens: u32, i: usize) -> Ga {
        Ga::generator(gens, i).unwrap()
    }

    #[test]
    fn anticommutation_and_nilpotency() {
        let t1 = theta(2, 0);
        let t2 = theta(2, 1);
        let ab = t1.mul(&t2).unwrap();
        let ba = t2.mul(&t1).unwrap();
        assert!(ab.add(&ba).is_zero());
        assert!(t1.mul(&t1).unwrap().is_zero());
    }

    #[test]
    fn product_expansion() {
        // (1 + 2θ1)(3 + θ1θ2) = 3 + 6θ1 + θ1θ2
        let gens = 2;
        let a = Ga::one(gens).add(&theta(gens, 0).scale(&cq(2, 1)));
        let b = Ga::scalar(gens, cq(3, 1)).add(&Ga::monomial(gens, &[0, 1], CQ::one()).unwrap());
        let prod = a.mul(&b).unwrap();
        let expected = Ga::scalar(gens, cq(3, 1))
            .add(&theta(gens, 0).scale(&cq(6, 1)))
            .add(&Ga::monomial(gens, &[0, 1], CQ::one()).unwrap());
        assert_eq!(prod, expected);
    }

    #[test]
    fn left_derivative_signs() {
        let gens = 2;
        let t12 = Ga::monomial(gens, &[0, 1], CQ::one()).unwrap();
        assert_eq!(t12.left_derivative(0).unwrap(), theta(gens, 1));
        // θ2θ1 = −θ1θ2, so ∂_{θ1}(θ2θ1) = −θ2
        let t21 = theta(gens, 1).mul(&theta(gens, 0)).unwrap();
        assert_eq!(t21.left_derivative(0).unwrap(), theta(gens, 1).neg());
        assert!(theta(gens, 0).left_derivative(1).unwrap().is_zero());
    }

    #[test]
    fn berezin_basics() {
        let gens = 1;
        let t = theta(gens, 0);
        assert_eq!(t.berezin_integral(&[0]).unwrap(), Ga::one(gens));
        assert!(Ga::one(gens).berezin_integral(&[0]).unwrap().is_zero());
        assert_eq!(
            Ga::one(1).berezin_integral(&[0, 0]),
            Err(GrassmannError::RepeatedIndex(0))
        );
    }

    #[test]
    fn berezin_gaussian_pair() {
        // ∫dθ dθ* exp(θ*θ + θ*η + η*θ) = 1 + ηη*
        // generators: θ=0, θ*=1, η=2, η*=3
        let gens = 4;
        let th = theta(gens, 0);
        let ths = theta(gens, 1);
        let eta = theta(gens, 2);
        let etas = theta(gens, 3);
        let exponent = ths
            .mul(&th)
            .unwrap()
            .add(&ths.mul(&eta).unwrap())
            .add(&etas.mul(&th).unwrap());
        let e = exponent.exp_nilpotent().unwrap();
        let val = e.berezin_integral(&[0, 1]).unwrap();
        let expected = Ga::one(gens).add(&eta.mul(&etas).unwrap());
        assert_eq!(val, expected);
    }

    #[test]
    fn conjugation_rules() {
        // pairs: θ1=0 ↔ θ1*=1, θ2=2 ↔ θ2*=3
        let gens = 4;
        let table = ConjugationTable::interleaved(gens);
        // ((2+i)θ1)* = (2−i)θ1*
        let a = theta(gens, 0).scale(&cqi(2, 1, 1, 1));
        assert_eq!(
            a.conjugate(&table).unwrap(),
            theta(gens, 1).scale(&cqi(2, 1, -1, 1))
        );
        // (θ1θ2)* = θ2*θ1*
        let t12 = theta(gens, 0).mul(&theta(gens, 2)).unwrap();
        let expected = theta(gens, 3).mul(&theta(gens, 1)).unwrap();
        assert_eq!(t12.conjugate(&table).unwrap(), expected);
        // involution on a mixed element
        let x = t12.scale(&cqi(1, 2, -3, 5)).add(&theta(gens, 1).scale(&cq(7, 3)));
        assert_eq!(
            x.conjugate(&table).unwrap().conjugate(&table).unwrap(),
            x
        );
        let noconj = ConjugationTable::new(2);
        assert!(theta(2, 0).conjugate(&noconj).is_err());
    }

    #[test]
    fn exp_nilpotent_cases() {
        let gens = 4;
        let t12 = Ga::monomial(gens, &[0, 1], CQ::one()).unwrap();
        let t34 = Ga::monomial(gens, &[2, 3], CQ::one()).unwrap();
        assert_eq!(
            t12.exp_nilpotent().unwrap(),
            Ga::one(gens).add(&t12)
        );
        assert_eq!(Ga::zero(gens).exp_nilpotent().unwrap(), Ga::one(gens));
        let s = t12.add(&t34);
        let quartic = t12.mul(&t34).unwrap();
        assert_eq!(
            s.exp_nilpotent().unwrap(),
            Ga::one(gens).add(&t12).add(&t34).add(&quartic)
        );
        assert_eq!(
            Ga::one(gens).exp_nilpotent(),
            Err(GrassmannError::NonzeroBody)
        );
        assert_eq!(
            theta(gens, 0).exp_nilpotent(),
            Err(GrassmannError::OddMonomial)
        );
    }

    #[test]
    fn graded_commutativity() {
        // homogeneous a, b: ab = (−1)^{deg a deg b} ba
        let gens = 4;
        let odd = theta(gens, 0).add(&theta(gens, 2).scale(&cq(3, 2)));
        let odd2 = theta(gens, 1).add(&theta(gens, 3).scale(&cqi(0, 1, 5, 7)));
        let even = Ga::monomial(gens, &[0, 3], cq(2, 5)).unwrap();
        let anti = odd.mul(&odd2).unwrap().add(&odd2.mul(&odd).unwrap());
        assert!(anti.is_zero());
        let comm = odd.mul(&even).unwrap().sub(&even.mul(&odd).unwrap());
        assert!(comm.is_zero());
    }

    #[test]
    fn leibniz_rule_graded() {
        // ∂_i(ab) = (∂_i a)b + (−1)^{deg a} a(∂_i b) for homogeneous a
        let gens = 4;
        let a = theta(gens, 1)
            .mul(&theta(gens, 0))
            .unwrap()
            .add(&Ga::monomial(gens, &[2, 3], cq(4, 3)).unwrap());
        let b = theta(gens, 0).add(&theta(gens, 3).scale(&cq(-2, 1)));
        for i in 0..4usize {
            let lhs = a.mul(&b).unwrap().left_derivative(i).unwrap();
            let sign = CQ::one(); // a is even
            let rhs = a
                .left_derivative(i)
                .unwrap()
                .mul(&b)
                .unwrap()
                .add(&a.mul(&b.left_derivative(i).unwrap()).unwrap().scale(&sign));
            assert_eq!(lhs, rhs, "Leibniz failed for i={}", i);
        }
        // odd a flips the sign of the second term
        let a = theta(gens, 1).add(&theta(gens, 2));
        for i in 0..4usize {
            let lhs = a.mul(&b).unwrap().left_derivative(i).unwrap();
            let rhs = a.left_derivative(i).unwrap().mul(&b).unwrap().sub(
                &a.mul(&b.left_derivative(i).unwrap()).unwrap(),
            );
            assert_eq!(lhs, rhs, "graded Leibniz failed for i={}", i);
        }
    }

    /// Independent cofactor-expansion determinant used as the oracle for the
    /// fermionic determinant representation.
    fn cofactor_det(m: &[Vec<CQ>]) -> CQ {
        let n = m.len();
        if n == 0 {
            return CQ::one();
        }
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = CQ::zero();
        for j in 0..n {
            let minor: Vec<Vec<CQ>> = (1..n)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| m[r][c].clone())
                        .collect()
                })
                .collect();
            let term = m[0][j].clone() * cofactor_det(&minor);
            if j % 2 == 0 {
                acc = acc + term;
            } else {
                acc = acc - term;
            }
        }
        acc
    }

    #[test]
    fn determinant_representation() {
        // det X = ∫ Π_i (dθ*_i dθ_i) exp(−θ† X θ), innermost differential first.
        // Layout: θ_i = generator 2i, θ*_i = generator 2i+1.
        for n in 1..=4usize {
            let gens = (2 * n) as u32;
            let mut x: Vec<Vec<CQ>> = vec![vec![CQ::zero(); n]; n];
            // deterministic test matrix with nonzero pattern
            for i in 0..n {
                for j in 0..n {
                    x[i][j] = cqi(
                        (3 * i + j + 1) as i64,
                        (i + 2) as i64,
                        (i as i64) - (j as i64),
                        3,
                    );
                }
            }
            let mut exponent = Ga::zero(gens);
            for i in 0..n {
                for j in 0..n {
                    let tsi = theta(gens, 2 * i + 1);
                    let tj = theta(gens, 2 * j);
                    exponent = exponent.add(&tsi.mul(&tj).unwrap().scale(&(-x[i][j].clone())));
                }
            }
            let e = exponent.exp_nilpotent().unwrap();
            // integral order: dθ*_1 dθ_1 dθ*_2 dθ_2 …, θ_n innermost
            let mut order: Vec<usize> = Vec::new();
            for i in 0..n {
                order.push(2 * i + 1);
                order.push(2 * i);
            }
            let val = e.berezin_integral(&order).unwrap();
            assert_eq!(val, Ga::scalar(gens, cofactor_det(&x)), "n = {}", n);
        }
    }
}
