//! Graded (p|q) matrices over the Grassmann algebra: supertrace,
//! superdeterminant, adjoint, and the convergence matrix I.

use crate::grassmann::{ConjugationTable, GrassmannElement, GrassmannError};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SuperMatrixError {
    #[error("grassmann error: {0}")]
    Grassmann(#[from] GrassmannError),
    #[error("entry ({i},{j}) violates block parity")]
    BlockParity { i: usize, j: usize },
    #[error("dimension mismatch")]
    Dimension,
    #[error("singular body block in superdeterminant")]
    SingularBlock,
    #[error("size cap exceeded: p+q = {0} > {1}")]
    SizeCap(usize, usize),
}

/// The (p|q) grading: σ(i) = +1 for the first p indices, −1 for the last q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    pub p: usize,
    pub q: usize,
}

impl Grading {
    pub fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn sigma(&self, i: usize) -> i64 {
        if i < self.p {
            1
        } else {
            -1
        }
    }

    pub fn eps(&self, i: usize) -> u8 {
        if i < self.p {
            0
        } else {
            1
        }
    }

    /// str 1 = p − q.
    pub fn str_identity(&self) -> i64 {
        self.p as i64 - self.q as i64
    }
}

/// Square supermatrix with GrassmannElement entries satisfying the block
/// parity constraint: entry (i,j) only carries monomials of degree
/// ε(i)+ε(j) mod 2.
#[derive(Clone, PartialEq, Debug)]
pub struct SuperMatrix<C: Scalar> {
    grading: Grading,
    gens: u32,
    entries: Vec<GrassmannElement<C>>,
}

impl<C: Scalar> SuperMatrix<C> {
    pub fn zero(grading: Grading, gens: u32) -> Self {
        let d = grading.dim();
        Self {
            grading,
            gens,
            entries: vec![GrassmannElement::zero(gens); d * d],
        }
    }

    pub fn identity(grading: Grading, gens: u32) -> Self {
        let mut m = Self::zero(grading, gens);
        for i in 0..grading.dim() {
            m.entries[i * grading.dim() + i] = GrassmannElement::one(gens);
        }
        m
    }

    /// Builds a matrix and validates block parity.
    pub fn from_entries(
        grading: Grading,
        gens: u32,
        entries: Vec<GrassmannElement<C>>,
    ) -> Result<Self, SuperMatrixError> {
        let d = grading.dim();
        if entries.len() != d * d {
            return Err(SuperMatrixError::Dimension);
        }
        for i in 0..d {
            for j in 0..d {
                let want = (grading.eps(i) + grading.eps(j)) % 2;
                let e = &entries[i * d + j];
                for (bits, _) in e.terms() {
                    if (bits.count_ones() % 2) as u8 != want {
                        return Err(SuperMatrixError::BlockParity { i, j });
                    }
                }
            }
        }
        Ok(Self {
            grading,
            gens,
            entries,
        })
    }

    pub fn diagonal(grading: Grading, gens: u32, values: &[C]) -> Self {
        let d = grading.dim();
        assert_eq!(values.len(), d);
        let mut m = Self::zero(grading, gens);
        for i in 0..d {
            m.entries[i * d + i] = GrassmannElement::scalar(gens, values[i].clone());
        }
        m
    }

    /// The convergence matrix I = diag(1,…,1, i,…,i), an element of U(p|q).
    pub fn convergence_matrix(grading: Grading, gens: u32) -> Self {
        let d = grading.dim();
        let values: Vec<C> = (0..d)
            .map(|i| if i < grading.p { C::one() } else { C::i() })
            .collect();
        Self::diagonal(grading, gens, &values)
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn generator_count(&self) -> u32 {
        self.gens
    }

    pub fn entry(&self, i: usize, j: usize) -> &GrassmannElement<C> {
        &self.entries[i * self.grading.dim() + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: GrassmannElement<C>) {
        let d = self.grading.dim();
        self.entries[i * d + j] = v;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.add(b);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = a.sub(b);
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = a.scale(c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.grading.dim();
        let mut out = Self::zero(self.grading, self.gens);
        for i in 0..d {
            for k in 0..d {
                let aik = self.entry(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = other.entry(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = aik.mul(b).expect("compatible algebras");
                    out.entries[i * d + j] = out.entries[i * d + j].add(&prod);
                }
            }
        }
        out
    }

    /// Supertrace Σ σ(i) M_ii = tr A − tr D.
    pub fn supertrace(&self) -> GrassmannElement<C> {
        let d = self.grading.dim();
        let mut acc = GrassmannElement::zero(self.gens);
        for i in 0..d {
            let t = self.entry(i, i);
            acc = if self.grading.sigma(i) == 1 {
                acc.add(t)
            } else {
                acc.sub(t)
            };
        }
        acc
    }

    /// Determinant of a sub-block with even entries (Leibniz expansion; even
    /// elements commute, so the ordinary formula applies).
    fn block_det(block: &[Vec<GrassmannElement<C>>]) -> GrassmannElement<C> {
        let n = block.len();
        let gens = if n == 0 {
            0
        } else {
            block[0][0].generator_count()
        };
        if n == 0 {
            return GrassmannElement::one(gens);
        }
        // permutation expansion via Heap's algorithm on indices
        let mut perm: Vec<usize> = (0..n).collect();
        let mut acc = GrassmannElement::zero(gens);
        loop {
            // sign of perm
            let mut sign = 1i32;
            let mut seen = vec![false; n];
            for s in 0..n {
                if seen[s] {
                    continue;
                }
                let mut len = 0;
                let mut t = s;
                while !seen[t] {
                    seen[t] = true;
                    t = perm[t];
                    len += 1;
                }
                if len % 2 == 0 {
                    sign = -sign;
                }
            }
            let mut prod = GrassmannElement::one(gens);
            for (i, &pi) in perm.iter().enumerate() {
                prod = prod.mul(&block[i][pi]).expect("compatible");
                if prod.is_zero() {
                    break;
                }
            }
            if sign < 0 {
                prod = prod.neg();
            }
            acc = acc.add(&prod);
            // next permutation in lexicographic order
            let mut i = n as i64 - 2;
            while i >= 0 && perm[i as usize] >= perm[i as usize + 1] {
                i -= 1;
            }
            if i < 0 {
                break;
            }
            let i = i as usize;
            let mut j = n - 1;
            while perm[j] <= perm[i] {
                j -= 1;
            }
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        acc
    }

    fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Vec<Vec<GrassmannElement<C>>> {
        rows.map(|i| cols.clone().map(|j| self.entry(i, j).clone()).collect())
            .collect()
    }

    /// Inverse of an even-entry square block with invertible body, computed
    /// as body inverse times a terminating Neumann series on the nilpotent
    /// correction.
    fn block_inverse(
        block: &[Vec<GrassmannElement<C>>],
        gens: u32,
    ) -> Result<Vec<Vec<GrassmannElement<C>>>, SuperMatrixError> {
        let n = block.len();
        if n == 0 {
            return Ok(Vec::new());
        }
        // body inverse by exact Gauss-Jordan over C
        let mut a: Vec<Vec<C>> = block
            .iter()
            .map(|row| row.iter().map(|e| e.body()).collect())
            .collect();
        let mut inv: Vec<Vec<C>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { C::one() } else { C::zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero());
            let pivot = pivot.ok_or(SuperMatrixError::SingularBlock)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let pinv = a[col][col]
                .try_inv()
                .ok_or(SuperMatrixError::SingularBlock)?;
            for j in 0..n {
                a[col][j] = a[col][j].clone() * pinv.clone();
                inv[col][j] = inv[col][j].clone() * pinv.clone();
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = a[r][j].clone() - factor.clone() * a[col][j].clone();
                    inv[r][j] = inv[r][j].clone() - factor.clone() * inv[col][j].clone();
                }
            }
        }
        let body_inv: Vec<Vec<GrassmannElement<C>>> = inv
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| GrassmannElement::scalar(gens, c.clone()))
                    .collect()
            })
            .collect();
        // block = body(1 + K) with K nilpotent; inverse = Σ (−K)^j body⁻¹
        let k = mul_blocks(&body_inv, block, gens); // body⁻¹·block = 1 + K
        let n_mat = sub_blocks(&k, &identity_block(n, gens));
        let mut acc = identity_block(n, gens);
        let mut power = identity_block(n, gens);
        loop {
            power = mul_blocks(&power, &n_mat, gens);
            for row in power.iter_mut() {
                for e in row.iter_mut() {
                    *e = e.neg();
                }
            }
            if power.iter().all(|r| r.iter().all(|e| e.is_zero())) {
                break;
            }
            acc = add_blocks(&acc, &power);
        }
        Ok(mul_blocks(&acc, &body_inv, gens))
    }

    /// Superdeterminant det(A − B D⁻¹ C)/det D.
    pub fn superdeterminant(&self) -> Result<GrassmannElement<C>, SuperMatrixError> {
        let p = self.grading.p;
        let d = self.grading.dim();
        let a = self.block(0..p, 0..p);
        let b = self.block(0..p, p..d);
        let c = self.block(p..d, 0..p);
        let dd = self.block(p..d, p..d);
        let det_d = Self::block_det(&dd);
        if det_d.body().is_zero() && !dd.is_empty() {
            return Err(SuperMatrixError::SingularBlock);
        }
        let schur = if dd.is_empty() {
            a
        } else {
            let dinv = Self::block_inverse(&dd, self.gens)?;
            let bdc = mul_blocks(&mul_blocks(&b, &dinv, self.gens), &c, self.gens);
            sub_blocks(&a, &bdc)
        };
        let det_top = Self::block_det(&schur);
        if dd.is_empty() {
            return Ok(det_top);
        }
        let det_d_inv = det_d.inverse().map_err(|_| SuperMatrixError::SingularBlock)?;
        Ok(det_top.mul(&det_d_inv)?)
    }

    /// Adjoint: (X†)_{ij} = conj(X_{ji}), with the Grassmann reversal built
    /// into the conjugation. Satisfies (X†)† = X and (XY)† = Y†X†.
    pub fn adjoint(&self, table: &ConjugationTable) -> Result<Self, SuperMatrixError> {
        let dim = self.grading.dim();
        let mut out = Self::zero(self.grading, self.gens);
        for i in 0..dim {
            for j in 0..dim {
                out.entries[i * dim + j] = self.entry(j, i).conjugate(table)?;
            }
        }
        Ok(out)
    }

    pub fn is_hermitian(&self, table: &ConjugationTable) -> Result<bool, SuperMatrixError> {
        Ok(self.adjoint(table)? == *self)
    }

    /// The matrix with every entry's body (constant term) removed.
    pub fn nilpotent_part(&self) -> Self {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            let body = GrassmannElement::scalar(self.gens, e.body());
            *e = e.sub(&body);
        }
        out
    }

    /// Terminating matrix exponential for matrices with body-free entries.
    pub fn exp_nilpotent(&self) -> Result<Self, SuperMatrixError> {
        for e in &self.entries {
            if !e.body().is_zero() {
                return Err(SuperMatrixError::Grassmann(GrassmannError::NonzeroBody));
            }
        }
        let mut out = Self::identity(self.grading, self.gens);
        let mut power = Self::identity(self.grading, self.gens);
        let mut k = 1i64;
        loop {
            power = power.mul(self);
            if power.entries.iter().all(|e| e.is_zero()) {
                break;
            }
            let inv = C::from_int(k).try_inv().expect("k! invertible");
            power = power.scale(&inv);
            out = out.add(&power);
            k += 1;
        }
        Ok(out)
    }
}

fn identity_block<C: Scalar>(n: usize, gens: u32) -> Vec<Vec<GrassmannElement<C>>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        GrassmannElement::one(gens)
                    } else {
                        GrassmannElement::zero(gens)
                    }
                })
                .collect()
        })
        .collect()
}

fn mul_blocks<C: Scalar>(
    a: &[Vec<GrassmannElement<C>>],
    b: &[Vec<GrassmannElement<C>>],
    gens: u32,
) -> Vec<Vec<GrassmannElement<C>>> {
    let n = a.len();
    let m = if n == 0 { 0 } else { b[0].len() };
    let inner = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = GrassmannElement::zero(gens);
                    for k in 0..inner {
                        acc = acc.add(&a[i][k].mul(&b[k][j]).expect("compatible"));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn add_blocks<C: Scalar>(
    a: &[Vec<GrassmannElement<C>>],
    b: &[Vec<GrassmannElement<C>>],
) -> Vec<Vec<GrassmannElement<C>>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

fn sub_blocks<C: Scalar>(
    a: &[Vec<GrassmannElement<C>>],
    b: &[Vec<GrassmannElement<C>>],
) -> Vec<Vec<GrassmannElement<C>>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
        .collect()
}
