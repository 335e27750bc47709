//! Truncated multivariate formal series used by the partition-function
//! oracle and the loop-equation checks.
//!
//! A series holds coefficients indexed by an exponent vector (one slot per
//! variable, each capped at the truncation order). Coefficients are either
//! symbolic polynomials awaiting Gaussian integration or exact scalars.

use crate::scalar::Scalar;
use crate::sympoly::SymPoly;
use std::collections::BTreeMap;

/// Series with [`SymPoly`] coefficients over `nvars` variables, every
/// exponent capped at `trunc`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySeries<C: Scalar> {
    gens: u32,
    nvars: usize,
    trunc: usize,
    terms: BTreeMap<Vec<u16>, SymPoly<C>>,
}

impl<C: Scalar> PolySeries<C> {
    pub fn zero(gens: u32, nvars: usize, trunc: usize) -> Self {
        Self {
            gens,
            nvars,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(gens: u32, nvars: usize, trunc: usize, value: SymPoly<C>) -> Self {
        let mut s = Self::zero(gens, nvars, trunc);
        if !value.is_zero() {
            s.terms.insert(vec![0; nvars], value);
        }
        s
    }

    pub fn one(gens: u32, nvars: usize, trunc: usize) -> Self {
        Self::constant(gens, nvars, trunc, SymPoly::one(gens))
    }

    /// Single term value·Π var_i^{exps_i}.
    pub fn term(
        gens: u32,
        nvars: usize,
        trunc: usize,
        exps: Vec<u16>,
        value: SymPoly<C>,
    ) -> Self {
        let mut s = Self::zero(gens, nvars, trunc);
        if !value.is_zero() && exps.iter().all(|&e| (e as usize) <= trunc) {
            s.terms.insert(exps, value);
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn truncation(&self) -> usize {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &SymPoly<C>)> {
        self.terms.iter()
    }

    fn insert(&mut self, key: Vec<u16>, value: SymPoly<C>) {
        if value.is_zero() || key.iter().any(|&e| (e as usize) > self.trunc) {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.add(&value);
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, value);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.insert(k.clone(), v.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.gens, self.nvars, self.trunc);
        for (k, v) in &self.terms {
            out.terms.insert(k.clone(), v.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.gens, self.nvars, self.trunc);
        for (k1, v1) in &self.terms {
            'terms: for (k2, v2) in &other.terms {
                let mut key = k1.clone();
                for (a, b) in key.iter_mut().zip(k2) {
                    let sum = *a as usize + *b as usize;
                    if sum > self.trunc {
                        continue 'terms;
                    }
                    *a = sum as u16;
                }
                out.insert(key, v1.mul(v2));
            }
        }
        out
    }

    pub fn scale_poly(&self, s: &SymPoly<C>) -> Self {
        let mut out = Self::zero(self.gens, self.nvars, self.trunc);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.mul(s));
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.gens, self.nvars, self.trunc);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.scale(c));
        }
        out
    }

    /// exp of a series with no constant term; terminates because every
    /// product raises the total exponent.
    pub fn exp(&self) -> Self {
        assert!(
            !self.terms.contains_key(&vec![0; self.nvars]),
            "exp requires zero constant term"
        );
        let mut out = Self::one(self.gens, self.nvars, self.trunc);
        let mut power = Self::one(self.gens, self.nvars, self.trunc);
        let mut k = 1i64;
        loop {
            power = power.mul(self);
            if power.is_zero() {
                return out;
            }
            let inv = C::from_int(k).try_inv().expect("k! invertible");
            power = power.scale(&inv);
            out = out.add(&power);
            k += 1;
        }
    }

    /// Applies a map to every coefficient (e.g. Gaussian integration),
    /// producing a scalar-valued series.
    pub fn map_coefficients<F: FnMut(&SymPoly<C>) -> C>(&self, mut f: F) -> ScalarSeries<C> {
        let mut out = ScalarSeries::zero(self.nvars, self.trunc);
        for (k, v) in &self.terms {
            out.insert(k.clone(), f(v));
        }
        out
    }
}

/// Series with plain scalar coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarSeries<C: Scalar> {
    nvars: usize,
    trunc: usize,
    terms: BTreeMap<Vec<u16>, C>,
}

impl<C: Scalar> ScalarSeries<C> {
    pub fn zero(nvars: usize, trunc: usize) -> Self {
        Self {
            nvars,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn truncation(&self) -> usize {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert(&mut self, key: Vec<u16>, value: C) {
        if value.is_zero() || key.iter().any(|&e| (e as usize) > self.trunc) {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = existing.clone() + value;
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, value);
            }
        }
    }

    pub fn coeff(&self, key: &[u16]) -> C {
        self.terms.get(key).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &C)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.insert(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.insert(k.clone(), -v.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars, self.trunc);
        for (k1, v1) in &self.terms {
            'terms: for (k2, v2) in &other.terms {
                let mut key = k1.clone();
                for (a, b) in key.iter_mut().zip(k2) {
                    let sum = *a as usize + *b as usize;
                    if sum > self.trunc {
                        continue 'terms;
                    }
                    *a = sum as u16;
                }
                out.insert(key, v1.clone() * v2.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.nvars, self.trunc);
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Largest exponent used in each variable.
    pub fn max_orders(&self) -> Vec<u16> {
        let mut m = vec![0u16; self.nvars];
        for k in self.terms.keys() {
            for (a, &b) in m.iter_mut().zip(k) {
                *a = (*a).max(b);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cq, CQ};
    use num_traits::Zero;

    #[test]
    fn exp_and_mul_truncate() {
        // exp(u) truncated at order 3: 1 + u + u²/2 + u³/6
        let gens = 0;
        let u = PolySeries::<CQ>::term(gens, 1, 3, vec![1], SymPoly::one(gens));
        let e = u.exp();
        let s = e.map_coefficients(|p| p.as_grassmann().unwrap().body());
        assert_eq!(s.coeff(&[0]), cq(1, 1));
        assert_eq!(s.coeff(&[1]), cq(1, 1));
        assert_eq!(s.coeff(&[2]), cq(1, 2));
        assert_eq!(s.coeff(&[3]), cq(1, 6));
        // exp(u)·exp(−u) = 1 within truncation
        let prod = u.exp().mul(&u.neg().exp());
        let ps = prod.map_coefficients(|p| p.as_grassmann().unwrap().body());
        assert_eq!(ps.coeff(&[0]), cq(1, 1));
        for k in 1..=3u16 {
            assert!(ps.coeff(&[k]).is_zero());
        }
    }
}


