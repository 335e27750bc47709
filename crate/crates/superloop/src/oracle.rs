//! Exact Gaussian integration over H(p|q): the tiny-size oracle.
//!
//! The measure weight exp(−str(IM)²/2ħ) factorizes over independent real
//! scalar Gaussians (diagonal entries and real/imaginary parts of the
//! off-diagonal bosonic entries, all from the A and D blocks) and fermion
//! pairs (the B block and its adjoint). Moments are evaluated entry by
//! entry: E[x^{2k}] = (2k−1)!! s^k per real scalar, and a Berezin integral
//! against the fermionic density per pair. Nothing here knows about Wick
//! pairings or fatgraphs, which is what makes it an independent oracle for
//! the combinatorial expansion.

use crate::grassmann::GrassmannElement;
use crate::scalar::Scalar;
use crate::supermatrix::{Grading, SuperMatrixError};
use crate::sympoly::{mat_identity, mat_mul, BosMono, Mat, SymPoly};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Bosonic symbol ids below this bound encode matrix entries (i·dim + j);
/// ids at or above it are external parameters untouched by integration.
pub const EXT_SYMBOL_BASE: u32 = 1 << 20;

/// Where a raw matrix entry lives in the symbolic ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryKind {
    Bosonic(u32),
    Fermionic(usize),
}

/// Size cap for the oracle.
pub const ORACLE_DIM_CAP: usize = 4;

fn binomial(n: u32, k: u32) -> i64 {
    let mut acc = 1i64;
    for j in 0..k.min(n - k) {
        acc = acc * (n - j) as i64 / (j + 1) as i64;
    }
    acc
}

/// (2m−1)!! with the convention (−1)!! = 1.
fn double_factorial_odd(m: u32) -> i64 {
    let mut acc = 1i64;
    let mut k = 1i64;
    for _ in 0..m {
        acc *= 2 * k - 1;
        k += 1;
    }
    acc
}

fn factorial_inv<C: Scalar>(k: i64) -> C {
    let mut acc = C::one();
    for j in 1..=k {
        acc = acc * C::from_int(j);
    }
    acc.try_inv().expect("factorial invertible")
}

/// The normalization constant z_{p,q}(ħ) = 2^{(p+q)/2} i^{pq} π^{(p²+q²)/2}
/// ħ^{(p−q)²/2}, kept symbolically: exponents are stored as halves and the
/// constant is never evaluated numerically. Normalized expectations divide
/// it out exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationConstant {
    /// exponent of 2, times 2
    pub two_exp_halves: i64,
    /// exponent of the imaginary unit
    pub i_exp: i64,
    /// exponent of π, times 2
    pub pi_exp_halves: i64,
    /// exponent of ħ, times 2
    pub hbar_exp_halves: i64,
}

pub fn z_norm(grading: Grading) -> NormalizationConstant {
    let p = grading.p as i64;
    let q = grading.q as i64;
    NormalizationConstant {
        two_exp_halves: p + q,
        i_exp: p * q,
        pi_exp_halves: p * p + q * q,
        hbar_exp_halves: (p - q) * (p - q),
    }
}

/// Gaussian ensemble on H(p|q) with weight exp(−str(IM)²/2ħ).
///
/// `extra_gens` reserves Grassmann generators beyond the 2pq measure
/// generators for external odd parameters; expectations leave those intact.
pub struct GaussianEnsemble<C: Scalar> {
    grading: Grading,
    hbar: C,
    measure_gens: u32,
    gens: u32,
    density: GrassmannElement<C>,
    density_norm_inv: C,
    berezin_order: Vec<usize>,
}

impl<C: Scalar> GaussianEnsemble<C> {
    pub fn new(grading: Grading, hbar: C) -> Result<Self, SuperMatrixError> {
        Self::with_extra_generators(grading, hbar, 0)
    }

    pub fn with_extra_generators(
        grading: Grading,
        hbar: C,
        extra_gens: u32,
    ) -> Result<Self, SuperMatrixError> {
        if grading.dim() > ORACLE_DIM_CAP {
            return Err(SuperMatrixError::SizeCap(grading.dim(), ORACLE_DIM_CAP));
        }
        let measure_gens = (2 * grading.p * grading.q) as u32;
        let gens = measure_gens + extra_gens;
        // density Π (1 − (i/ħ) θ θ*) = exp(−(i/ħ) Σ θ_{kl} θ*_{kl})
        let minus_i_over_h = -(C::i() * hbar.clone().try_inv().expect("hbar nonzero"));
        let mut density = GrassmannElement::one(gens);
        for pair in 0..(measure_gens / 2) as usize {
            let th = GrassmannElement::generator(gens, 2 * pair).expect("in range");
            let ths = GrassmannElement::generator(gens, 2 * pair + 1).expect("in range");
            let factor = GrassmannElement::one(gens)
                .add(&th.mul(&ths).expect("ok").scale(&minus_i_over_h));
            density = density.mul(&factor).expect("ok");
        }
        let berezin_order: Vec<usize> = (0..measure_gens as usize).collect();
        let norm = density
            .berezin_integral(&berezin_order)
            .expect("density integrable")
            .body();
        let density_norm_inv = if measure_gens == 0 {
            C::one()
        } else {
            norm.try_inv().expect("fermionic normalization nonzero")
        };
        Ok(Self {
            grading,
            hbar,
            measure_gens,
            gens,
            density,
            density_norm_inv,
            berezin_order,
        })
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn hbar(&self) -> &C {
        &self.hbar
    }

    pub fn generator_count(&self) -> u32 {
        self.gens
    }

    fn dim(&self) -> usize {
        self.grading.dim()
    }

    fn entry_symbol(&self, i: usize, j: usize) -> u32 {
        (i * self.dim() + j) as u32
    }

    /// Fermionic generator index for the B-block entry (row k < p, col l < q);
    /// `star` selects the conjugate partner housed in the C block.
    fn ferm_gen(&self, k: usize, l: usize, star: bool) -> usize {
        2 * (k * self.grading.q + l) + usize::from(star)
    }

    /// Entry of the raw integration variable M (Hermitian layout).
    pub fn raw_entry(&self, i: usize, j: usize) -> SymPoly<C> {
        let p = self.grading.p;
        match (i < p, j < p) {
            (true, true) | (false, false) => SymPoly::symbol(self.gens, self.entry_symbol(i, j)),
            (true, false) => {
                SymPoly::generator(self.gens, self.ferm_gen(i, j - p, false)).expect("in range")
            }
            (false, true) => {
                SymPoly::generator(self.gens, self.ferm_gen(j, i - p, true)).expect("in range")
            }
        }
    }

    /// Entry of the observable matrix IM; insertions inside expectation
    /// values are made at IM.
    pub fn obs_entry(&self, i: usize, j: usize) -> SymPoly<C> {
        let e = self.raw_entry(i, j);
        if i < self.grading.p {
            e
        } else {
            e.scale(&C::i())
        }
    }

    pub fn raw_matrix(&self) -> Mat<C> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.raw_entry(i, j)).collect())
            .collect()
    }

    pub fn obs_matrix(&self) -> Mat<C> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.obs_entry(i, j)).collect())
            .collect()
    }

    /// Supertrace of a symbolic matrix.
    pub fn str_of(&self, m: &Mat<C>) -> SymPoly<C> {
        let mut acc = SymPoly::zero(self.gens);
        for i in 0..self.dim() {
            if self.grading.sigma(i) == 1 {
                acc = acc.add(&m[i][i]);
            } else {
                acc = acc.sub(&m[i][i]);
            }
        }
        acc
    }

    /// Moment of one bosonic matrix-entry group: E[z^a z̄^b] for an
    /// off-diagonal pair with z = x + iy, x,y ~ N(0, ħ/2).
    fn offdiag_moment(&self, a: u32, b: u32) -> C {
        if (a + b) % 2 == 1 {
            return C::zero();
        }
        let s = self.hbar.clone() * C::from_ratio(1, 2);
        let mut acc = C::zero();
        for k in 0..=a {
            for l in 0..=b {
                let xs = a + b - k - l;
                let ys = k + l;
                if xs % 2 == 1 || ys % 2 == 1 {
                    continue;
                }
                let mut term = C::from_int(binomial(a, k) * binomial(b, l));
                term = term
                    * C::from_int(double_factorial_odd(xs / 2))
                    * C::from_int(double_factorial_odd(ys / 2));
                // i^k (−i)^l
                let mut unit = C::one();
                for _ in 0..k {
                    unit = unit * C::i();
                }
                for _ in 0..l {
                    unit = unit * (-C::i());
                }
                let mut spow = C::one();
                for _ in 0..((xs + ys) / 2) {
                    spow = spow.clone() * s.clone();
                }
                acc = acc + term * unit * spow;
            }
        }
        acc
    }

    fn diag_moment(&self, e: u32) -> C {
        if e % 2 == 1 {
            return C::zero();
        }
        let mut acc = C::from_int(double_factorial_odd(e / 2));
        for _ in 0..(e / 2) {
            acc = acc * self.hbar.clone();
        }
        acc
    }

    /// Moment of a bosonic monomial in matrix-entry symbols. External
    /// symbols are split off and returned as the residual monomial.
    fn bosonic_moment(&self, mono: &BosMono) -> (C, BosMono) {
        let d = self.dim() as u32;
        let mut external: BosMono = Vec::new();
        let mut exps: BTreeMap<u32, u32> = BTreeMap::new();
        for &(sym, e) in mono {
            if sym >= EXT_SYMBOL_BASE {
                external.push((sym, e));
            } else {
                *exps.entry(sym).or_insert(0) += e;
            }
        }
        let mut acc = C::one();
        let mut done: Vec<u32> = Vec::new();
        for (&sym, &e) in &exps {
            if done.contains(&sym) {
                continue;
            }
            let i = sym / d;
            let j = sym % d;
            if i == j {
                acc = acc * self.diag_moment(e);
            } else {
                let partner = j * d + i;
                let pe = exps.get(&partner).copied().unwrap_or(0);
                done.push(partner);
                acc = acc * self.offdiag_moment(e, pe);
            }
            if acc.is_zero() {
                return (C::zero(), external);
            }
        }
        (acc, external)
    }

    /// Fermionic expectation: Berezin integral against the pair density,
    /// normalized. External generators pass through.
    fn fermionic_moment(&self, g: &GrassmannElement<C>) -> GrassmannElement<C> {
        if self.measure_gens == 0 {
            return g.clone();
        }
        let weighted = g.mul(&self.density).expect("compatible");
        weighted
            .berezin_integral(&self.berezin_order)
            .expect("valid order")
            .scale(&self.density_norm_inv)
    }

    /// Normalized Gaussian expectation of a symbolic polynomial. Matrix-entry
    /// symbols and measure generators are integrated out; external symbols
    /// and generators remain.
    pub fn expect(&self, poly: &SymPoly<C>) -> SymPoly<C> {
        let mut out = SymPoly::zero(self.gens);
        for (mono, g) in poly.terms() {
            let (bos, external) = self.bosonic_moment(mono);
            if bos.is_zero() {
                continue;
            }
            let ferm = self.fermionic_moment(g);
            if ferm.is_zero() {
                continue;
            }
            let mut term = SymPoly::from_grassmann(ferm.scale(&bos));
            for &(sym, e) in &external {
                for _ in 0..e {
                    term = term.mul(&SymPoly::symbol(self.gens, sym));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Expectation of a product of observable entries ⟨M_{i1j1}···M_{injn}⟩.
    pub fn expect_entry_product(&self, pairs: &[(usize, usize)]) -> C {
        let mut poly = SymPoly::one(self.gens);
        for &(i, j) in pairs {
            poly = poly.mul(&self.obs_entry(i, j));
        }
        self.expect(&poly)
            .as_grassmann()
            .expect("no external symbols")
            .body()
    }

    /// ⟨Π_k (1/ħ) str M^{n_k} · e^{(1/ħ) str M Ȳ}⟩ · e^{−p₂/2ħ²} for a
    /// diagonal external field Ȳ — the quantity the star-fatgraph expansion
    /// computes. Evaluated here purely by Gaussian integration so it can
    /// arbitrate the combinatorics.
    pub fn trace_moment(&self, valencies: &[usize], y_bar: &[C]) -> C {
        assert_eq!(y_bar.len(), self.dim());
        let total: usize = valencies.iter().sum();
        let d = valencies.len();
        let hbar_inv = self.hbar.try_inv().expect("hbar nonzero");
        // Y_w = Ȳ/ħ
        let y_w: Vec<C> = y_bar.iter().map(|y| y.clone() * hbar_inv.clone()).collect();
        let obs = self.obs_matrix();
        let max_n = valencies.iter().copied().max().unwrap_or(0);
        let mut powers: Vec<Mat<C>> = vec![mat_identity(self.gens, self.dim())];
        for _ in 0..max_n {
            powers.push(mat_mul(powers.last().unwrap(), &obs));
        }
        let mut product = SymPoly::one(self.gens);
        for &n in valencies {
            product = product.mul(&self.str_of(&powers[n]));
        }
        // S1 = str(M Y_w) with M ↦ IM; diagonal Y picks diagonal entries.
        let mut s1 = SymPoly::zero(self.gens);
        for i in 0..self.dim() {
            let term = self.obs_entry(i, i).scale(&y_w[i]);
            if self.grading.sigma(i) == 1 {
                s1 = s1.add(&term);
            } else {
                s1 = s1.sub(&term);
            }
        }
        // str Y_w²
        let mut str_yw2 = C::zero();
        for i in 0..self.dim() {
            let sq = y_w[i].clone() * y_w[i].clone();
            str_yw2 = if self.grading.sigma(i) == 1 {
                str_yw2 + sq
            } else {
                str_yw2 - sq
            };
        }
        // T = Σ_{s+2u ≤ N} (S1^s/s!) (−ħ strY_w²/2)^u/u!
        let damp = -(self.hbar.clone() * str_yw2 * C::from_ratio(1, 2));
        let mut t = SymPoly::zero(self.gens);
        let mut s1_pow = SymPoly::one(self.gens);
        for s in 0..=total {
            let mut damp_pow = C::one();
            let mut term = SymPoly::zero(self.gens);
            let mut u = 0i64;
            while s + 2 * (u as usize) <= total {
                term = term.add(
                    &s1_pow.scale(&(damp_pow.clone() * factorial_inv::<C>(u))),
                );
                damp_pow = damp_pow * damp.clone();
                u += 1;
            }
            t = t.add(&term.scale(&factorial_inv::<C>(s as i64)));
            if s < total {
                s1_pow = s1_pow.mul(&s1);
            }
        }
        let value = self
            .expect(&product.mul(&t))
            .as_grassmann()
            .expect("no external symbols")
            .body();
        let mut norm = C::one();
        for _ in 0..d {
            norm = norm * hbar_inv.clone();
        }
        value * norm
    }

    /// Kind of symbol or generator housing a raw matrix entry.
    pub fn entry_kind(&self, i: usize, j: usize) -> EntryKind {
        let p = self.grading.p;
        match (i < p, j < p) {
            (true, true) | (false, false) => EntryKind::Bosonic(self.entry_symbol(i, j)),
            (true, false) => EntryKind::Fermionic(self.ferm_gen(i, j - p, false)),
            (false, true) => EntryKind::Fermionic(self.ferm_gen(j, i - p, true)),
        }
    }

    /// The τ-order-r contribution to the damped trace moment, for checking
    /// that orders beyond Σ n_k vanish identically.
    pub fn trace_moment_order(&self, valencies: &[usize], y_bar: &[C], order: usize) -> C {
        let d = valencies.len();
        let hbar_inv = self.hbar.try_inv().expect("hbar nonzero");
        let y_w: Vec<C> = y_bar.iter().map(|y| y.clone() * hbar_inv.clone()).collect();
        let obs = self.obs_matrix();
        let max_n = valencies.iter().copied().max().unwrap_or(0);
        let mut powers: Vec<Mat<C>> = vec![mat_identity(self.gens, self.dim())];
        for _ in 0..max_n {
            powers.push(mat_mul(powers.last().unwrap(), &obs));
        }
        let mut product = SymPoly::one(self.gens);
        for &n in valencies {
            product = product.mul(&self.str_of(&powers[n]));
        }
        let mut s1 = SymPoly::zero(self.gens);
        for i in 0..self.dim() {
            let term = self.obs_entry(i, i).scale(&y_w[i]);
            if self.grading.sigma(i) == 1 {
                s1 = s1.add(&term);
            } else {
                s1 = s1.sub(&term);
            }
        }
        let mut str_yw2 = C::zero();
        for i in 0..self.dim() {
            let sq = y_w[i].clone() * y_w[i].clone();
            str_yw2 = if self.grading.sigma(i) == 1 {
                str_yw2 + sq
            } else {
                str_yw2 - sq
            };
        }
        let damp = -(self.hbar.clone() * str_yw2 * C::from_ratio(1, 2));
        let mut acc = C::zero();
        let mut s = order % 2;
        // s + 2u = order
        while s <= order {
            let u = ((order - s) / 2) as i64;
            let mut damp_pow = C::one();
            for _ in 0..u {
                damp_pow = damp_pow * damp.clone();
            }
            let term = product
                .mul(&s1.pow(s))
                .scale(&(factorial_inv::<C>(s as i64) * factorial_inv::<C>(u) * damp_pow));
            acc = acc
                + self
                    .expect(&term)
                    .as_grassmann()
                    .expect("no externals")
                    .body();
            s += 2;
        }
        let mut norm = C::one();
        for _ in 0..d {
            norm = norm * hbar_inv.clone();
        }
        acc * norm
    }
}

/// Verifies ⟨e^{str MY}⟩ = e^{(ħ/2) str Y²} as a symbolic identity in a
/// diagonal external Y, order by order in the Y-grade up to `order`:
/// ⟨(str MY)^r⟩/r! must equal ((ħ/2) str Y²)^{r/2}/(r/2)! for even r and
/// vanish for odd r, as polynomials in the Y entries.
pub fn exp_source_identity_holds<C: Scalar>(grading: Grading, hbar: C, order: usize) -> bool {
    let ens = match GaussianEnsemble::new(grading, hbar.clone()) {
        Ok(e) => e,
        Err(_) => return false,
    };
    let gens = ens.generator_count();
    let d = grading.dim();
    // external symbols Y_i
    let y_sym: Vec<SymPoly<C>> =
        (0..d).map(|i| SymPoly::symbol(gens, EXT_SYMBOL_BASE + i as u32)).collect();
    let mut smy = SymPoly::zero(gens);
    let mut str_y2 = SymPoly::zero(gens);
    for i in 0..d {
        let t = ens.obs_entry(i, i).mul(&y_sym[i]);
        let sq = y_sym[i].mul(&y_sym[i]);
        if grading.sigma(i) == 1 {
            smy = smy.add(&t);
            str_y2 = str_y2.add(&sq);
        } else {
            smy = smy.sub(&t);
            str_y2 = str_y2.sub(&sq);
        }
    }
    let half_h = hbar.clone() * C::from_ratio(1, 2);
    let mut smy_pow = SymPoly::one(gens);
    let mut fact = C::one();
    for r in 0..=order {
        if r > 0 {
            smy_pow = smy_pow.mul(&smy);
            fact = fact * C::from_int(r as i64);
        }
        let lhs = ens
            .expect(&smy_pow)
            .scale(&fact.try_inv().expect("r! invertible"));
        let rhs = if r % 2 == 0 {
            let u = r / 2;
            let mut acc = SymPoly::one(gens);
            let mut ufact = C::one();
            for j in 0..u {
                acc = acc.mul(&str_y2).scale(&half_h);
                ufact = ufact * C::from_int((j + 1) as i64);
            }
            acc.scale(&ufact.try_inv().expect("u! invertible"))
        } else {
            SymPoly::zero(gens)
        };
        if lhs != rhs {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cq, CQ};
    use num_traits::{One, Zero};

    fn ensemble(p: usize, q: usize, hbar: CQ) -> GaussianEnsemble<CQ> {
        GaussianEnsemble::new(Grading::new(p, q), hbar).unwrap()
    }

    #[test]
    fn second_moments_h11() {
        let e = ensemble(1, 1, CQ::one());
        // ⟨M11 M11⟩ = ħ
        assert_eq!(e.expect_entry_product(&[(0, 0), (0, 0)]), cq(1, 1));
        // ⟨M12 M21⟩ = ħσ(2) = −ħ
        assert_eq!(e.expect_entry_product(&[(0, 1), (1, 0)]), cq(-1, 1));
        // ⟨M21 M12⟩ = ħσ(1) = +ħ
        assert_eq!(e.expect_entry_product(&[(1, 0), (0, 1)]), cq(1, 1));
        // ⟨M22 M22⟩ = ħσ(2) = −ħ
        assert_eq!(e.expect_entry_product(&[(1, 1), (1, 1)]), cq(-1, 1));
        // odd moment vanishes
        assert!(e.expect_entry_product(&[(0, 0)]).is_zero());
        assert!(e.expect_entry_product(&[(0, 1)]).is_zero());
    }

    #[test]
    fn wick_two_point_general() {
        // ⟨M_ab M_cd⟩ = ħ σ(b) δ_{ad} δ_{bc}
        let hbar = cq(1, 3);
        for (p, q) in [(1, 1), (2, 1), (1, 2)] {
            let e = ensemble(p, q, hbar.clone());
            let g = e.grading();
            let d = g.dim();
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        for dd in 0..d {
                            let got = e.expect_entry_product(&[(a, b), (c, dd)]);
                            let expected = if a == dd && b == c {
                                hbar.clone() * CQ::from_int(g.sigma(b))
                            } else {
                                CQ::zero()
                            };
                            assert_eq!(got, expected, "p={p} q={q} ({a}{b})({c}{dd})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fourth_moment_matches_wick_sum() {
        // ⟨M11⁴⟩ on H(1|1) = 3ħ² (three pairings of a real scalar)
        let e = ensemble(1, 1, cq(1, 2));
        assert_eq!(
            e.expect_entry_product(&[(0, 0); 4]),
            cq(3, 4)
        );
    }

    #[test]
    fn exp_source_identity_symbolic() {
        // ⟨e^{str MY}⟩ = e^{(ħ/2) str Y²} through Y-order 6 on H(1|1), H(2|1)
        assert!(exp_source_identity_holds(
            Grading::new(1, 1),
            cq(1, 2),
            6
        ));
        assert!(exp_source_identity_holds(
            Grading::new(2, 1),
            cq(2, 3),
            6
        ));
    }

    #[test]
    fn str_m2_expectation() {
        // ⟨str M²⟩ = ħ(p−q)²
        for (p, q) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let e = ensemble(p, q, cq(2, 3));
            let obs = e.obs_matrix();
            let m2 = mat_mul(&obs, &obs);
            let v = e
                .expect(&e.str_of(&m2))
                .as_grassmann()
                .unwrap()
                .body();
            let n = (p as i64) - (q as i64);
            assert_eq!(v, cq(2, 3) * CQ::from_int(n * n), "p={p} q={q}");
        }
    }
}
