//! Change-of-variables calculus at matrix-entry level: the splitting and
//! merging rules for the first-order Berezinian K(M) = str(∂g/∂M), and the
//! Schwinger–Dyson identity for the Gaussian potential with source,
//! verified order by order as exact truncated series.

use crate::oracle::{EntryKind, GaussianEnsemble};
use crate::scalar::Scalar;
use crate::series::{PolySeries, ScalarSeries};
use crate::supermatrix::{Grading, SuperMatrix, SuperMatrixError};
use crate::sympoly::{mat_identity, mat_mul, mat_scale_poly, Mat, SymPoly};

use thiserror::Error;

pub const SD_DIM_CAP: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoopCheckError {
    #[error("matrix size does not match the grading")]
    SizeMismatch,
    #[error("size cap exceeded: p+q = {0} > {1}")]
    SizeCap(usize, usize),
    #[error(transparent)]
    SuperMatrix(#[from] SuperMatrixError),
}

/// K(M) = str(∂g/∂M) = Σ_{ij} σ(i)σ(j) ∂[g]_{ij}/∂M_{ij}, with graded left
/// derivatives in the fermionic directions.
pub fn berezinian_first_order<C: Scalar>(
    ens: &GaussianEnsemble<C>,
    g_mat: &Mat<C>,
) -> SymPoly<C> {
    let grading = ens.grading();
    let d = grading.dim();
    let mut acc = SymPoly::zero(ens.generator_count());
    for i in 0..d {
        for j in 0..d {
            let deriv = match ens.entry_kind(i, j) {
                EntryKind::Bosonic(sym) => g_mat[i][j].derivative_symbol(sym),
                EntryKind::Fermionic(gen) => g_mat[i][j]
                    .derivative_generator(gen)
                    .expect("generator in range"),
            };
            if deriv.is_zero() {
                continue;
            }
            let weight = C::from_int(grading.sigma(i) * grading.sigma(j));
            acc = acc.add(&deriv.scale(&weight));
        }
    }
    acc
}

/// str(X·Y) without forming the full product: Σ_i σ(i) Σ_k X_{ik} Y_{ki}.
fn str_product<C: Scalar>(grading: Grading, x: &Mat<C>, y: &Mat<C>) -> SymPoly<C> {
    let d = grading.dim();
    let gens = x[0][0].generator_count();
    let mut acc = SymPoly::zero(gens);
    for i in 0..d {
        for k in 0..d {
            if x[i][k].is_zero() || y[k][i].is_zero() {
                continue;
            }
            let prod = x[i][k].mul(&y[k][i]);
            acc = if grading.sigma(i) == 1 {
                acc.add(&prod)
            } else {
                acc.sub(&prod)
            };
        }
    }
    acc
}

fn lift_matrix<C: Scalar>(
    m: &SuperMatrix<C>,
    offset: u32,
    gens: u32,
) -> Result<Mat<C>, LoopCheckError> {
    let d = m.grading().dim();
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let mut row = Vec::with_capacity(d);
        for j in 0..d {
            let shifted = m
                .entry(i, j)
                .shift_generators(offset, gens)
                .map_err(SuperMatrixError::from)?;
            row.push(SymPoly::from_grassmann(shifted));
        }
        out.push(row);
    }
    Ok(out)
}

/// Residual series of the splitting rule for g(M) = A (x − BM)⁻¹ C:
/// coefficient of x^{−r} of K(M) − str(A(x−BM)⁻¹B)·str((x−BM)⁻¹C) for
/// r = 0..=T+2. The rule holds identically, so every entry must be the zero
/// polynomial in the symbolic M entries.
pub fn split_rule_residual<C: Scalar>(
    a: &SuperMatrix<C>,
    b: &SuperMatrix<C>,
    c: &SuperMatrix<C>,
    truncation: usize,
) -> Result<Vec<SymPoly<C>>, LoopCheckError> {
    let grading = a.grading();
    if b.grading() != grading || c.grading() != grading {
        return Err(LoopCheckError::SizeMismatch);
    }
    let param_gens = a.generator_count();
    let m_gens = (2 * grading.p * grading.q) as u32;
    let gens = m_gens + param_gens;
    let ens = GaussianEnsemble::<C>::with_extra_generators(grading, C::one(), param_gens)?;
    let a_m = lift_matrix(a, m_gens, gens)?;
    let b_m = lift_matrix(b, m_gens, gens)?;
    let c_m = lift_matrix(c, m_gens, gens)?;
    let m = ens.raw_matrix();
    let bm = mat_mul(&b_m, &m);
    // P_k = (BM)^k and AP_k = A(BM)^k, computed once
    let mut powers: Vec<Mat<C>> = vec![mat_identity(gens, grading.dim())];
    for _ in 0..truncation {
        powers.push(mat_mul(powers.last().unwrap(), &bm));
    }
    let ap: Vec<Mat<C>> = powers.iter().map(|p| mat_mul(&a_m, p)).collect();
    let left: Vec<SymPoly<C>> = ap
        .iter()
        .map(|x| str_product(grading, x, &b_m))
        .collect();
    let right: Vec<SymPoly<C>> = powers
        .iter()
        .map(|p| str_product(grading, p, &c_m))
        .collect();
    // orders 0..=T+1 are complete with powers up to (BM)^T
    let mut residual = Vec::with_capacity(truncation + 2);
    for r in 0..=(truncation + 1) {
        // LHS coefficient: K of g_{r−1} = A (BM)^{r−1} C
        let lhs = if r >= 1 {
            let g_mat = mat_mul(&ap[r - 1], &c_m);
            berezinian_first_order(&ens, &g_mat)
        } else {
            SymPoly::zero(gens)
        };
        // RHS coefficient: Σ_{s+t=r−2} str(A P_s B) str(P_t C)
        let mut rhs = SymPoly::zero(gens);
        if r >= 2 {
            for s in 0..=(r - 2) {
                rhs = rhs.add(&left[s].mul(&right[r - 2 - s]));
            }
        }
        residual.push(lhs.sub(&rhs));
    }
    Ok(residual)
}

/// Residual series of the merging rule for g(M) = A·str((x − BM)⁻¹ C):
/// coefficient of x^{−r} of K(M) − str(A(x−BM)⁻¹C(x−BM)⁻¹B).
pub fn merge_rule_residual<C: Scalar>(
    a: &SuperMatrix<C>,
    b: &SuperMatrix<C>,
    c: &SuperMatrix<C>,
    truncation: usize,
) -> Result<Vec<SymPoly<C>>, LoopCheckError> {
    let grading = a.grading();
    if b.grading() != grading || c.grading() != grading {
        return Err(LoopCheckError::SizeMismatch);
    }
    let param_gens = a.generator_count();
    let m_gens = (2 * grading.p * grading.q) as u32;
    let gens = m_gens + param_gens;
    let ens = GaussianEnsemble::<C>::with_extra_generators(grading, C::one(), param_gens)?;
    let a_m = lift_matrix(a, m_gens, gens)?;
    let b_m = lift_matrix(b, m_gens, gens)?;
    let c_m = lift_matrix(c, m_gens, gens)?;
    let m = ens.raw_matrix();
    let bm = mat_mul(&b_m, &m);
    let mut powers: Vec<Mat<C>> = vec![mat_identity(gens, grading.dim())];
    for _ in 0..truncation {
        powers.push(mat_mul(powers.last().unwrap(), &bm));
    }
    let ap: Vec<Mat<C>> = powers.iter().map(|p| mat_mul(&a_m, p)).collect();
    // W_t = C P_t B
    let w: Vec<Mat<C>> = powers
        .iter()
        .map(|p| mat_mul(&c_m, &mat_mul(p, &b_m)))
        .collect();
    let strs: Vec<SymPoly<C>> = powers
        .iter()
        .map(|p| str_product(grading, p, &c_m))
        .collect();
    let mut residual = Vec::with_capacity(truncation + 2);
    for r in 0..=(truncation + 1) {
        let lhs = if r >= 1 {
            let g_mat = mat_scale_poly(&a_m, &strs[r - 1]);
            berezinian_first_order(&ens, &g_mat)
        } else {
            SymPoly::zero(gens)
        };
        let mut rhs = SymPoly::zero(gens);
        if r >= 2 {
            for s in 0..=(r - 2) {
                // str(A P_s · C P_{r−2−s} B)
                rhs = rhs.add(&str_product(grading, &ap[s], &w[r - 2 - s]));
            }
        }
        residual.push(lhs.sub(&rhs));
    }
    Ok(residual)
}

/// Schwinger–Dyson residual for V(M) = M²/2 − MY on H(p|q) with
/// g(M) = I†(x − IM)⁻¹ (optionally times str((x − IM)⁻¹)):
/// ⟨K(M)⟩ − (1/ħ)⟨str(I g(M)(IM − Y))⟩ under the weight
/// exp(−str(IM)²/2ħ + str(IM)Y/ħ), as an exact series in (1/x, τ) with τ
/// grading the explicit Y insertions. The lemma makes every coefficient
/// vanish.
pub fn sd_residual<C: Scalar>(
    grading: Grading,
    hbar: &C,
    y: &[C],
    extra_str_factor: bool,
    truncation: usize,
) -> Result<ScalarSeries<C>, LoopCheckError> {
    if grading.dim() > SD_DIM_CAP {
        return Err(LoopCheckError::SizeCap(grading.dim(), SD_DIM_CAP));
    }
    assert_eq!(y.len(), grading.dim());
    let ens = GaussianEnsemble::<C>::new(grading, hbar.clone())?;
    let gens = ens.generator_count();
    let d = grading.dim();
    let im = ens.obs_matrix();
    // powers of IM
    let mut powers: Vec<Mat<C>> = vec![mat_identity(gens, d)];
    for _ in 0..truncation {
        powers.push(mat_mul(powers.last().unwrap(), &im));
    }
    // I and I†
    let i_diag: Vec<C> = (0..d)
        .map(|i| if i < grading.p { C::one() } else { C::i() })
        .collect();
    let idag_diag: Vec<C> = i_diag.iter().map(Scalar::conj).collect();
    // matrix series of g = I†(x−IM)⁻¹ [· str((x−IM)⁻¹)]: per u-order o ≥ 1
    // the base coefficient is I†(IM)^{o−1}
    let mut g_orders: Vec<Mat<C>> = Vec::with_capacity(truncation + 2);
    for o in 0..=(truncation + 1) {
        if o == 0 || o - 1 > truncation {
            g_orders.push(crate::sympoly::mat_zero(gens, d));
            continue;
        }
        let mut base = powers[o - 1].clone();
        for (i, row) in base.iter_mut().enumerate() {
            for e in row.iter_mut() {
                *e = e.scale(&idag_diag[i]);
            }
        }
        g_orders.push(base);
    }
    if extra_str_factor {
        // convolve with Σ_l u^{l+1} str((IM)^l)
        let strs: Vec<SymPoly<C>> = (0..=truncation).map(|l| ens.str_of(&powers[l])).collect();
        let mut conv: Vec<Mat<C>> = Vec::with_capacity(g_orders.len());
        for o in 0..g_orders.len() {
            let mut acc = crate::sympoly::mat_zero(gens, d);
            for l in 0..=truncation {
                let part = l + 1;
                if part > o {
                    break;
                }
                let piece = mat_scale_poly(&g_orders[o - part], &strs[l]);
                acc = crate::sympoly::mat_add(&acc, &piece);
            }
            conv.push(acc);
        }
        g_orders = conv;
    }
    // series variables: [u = 1/x, τ]
    let nvars = 2;
    let trunc = truncation + 1;
    let mut k_series = PolySeries::zero(gens, nvars, trunc);
    let mut rhs_series = PolySeries::zero(gens, nvars, trunc);
    for (o, g_mat) in g_orders.iter().enumerate() {
        let k = berezinian_first_order(&ens, g_mat);
        k_series = k_series.add(&PolySeries::term(
            gens,
            nvars,
            trunc,
            vec![o as u16, 0],
            k,
        ));
        // str(I g (IM − τY)) = str(I g IM) − τ str(I g Y)
        let ig: Mat<C> = {
            let mut m = g_mat.clone();
            for (i, row) in m.iter_mut().enumerate() {
                for e in row.iter_mut() {
                    *e = e.scale(&i_diag[i]);
                }
            }
            m
        };
        let with_im = ens.str_of(&mat_mul(&ig, &im));
        let y_mat: Mat<C> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        if i == j {
                            SymPoly::scalar(gens, y[i].clone())
                        } else {
                            SymPoly::zero(gens)
                        }
                    })
                    .collect()
            })
            .collect();
        let with_y = ens.str_of(&mat_mul(&ig, &y_mat));
        rhs_series = rhs_series.add(&PolySeries::term(
            gens,
            nvars,
            trunc,
            vec![o as u16, 0],
            with_im,
        ));
        rhs_series = rhs_series.add(&PolySeries::term(
            gens,
            nvars,
            trunc,
            vec![o as u16, 1],
            with_y.neg(),
        ));
    }
    // measure tilt exp(τ str(IM)Y/ħ)
    let mut smy = SymPoly::zero(gens);
    for i in 0..d {
        let t = ens.obs_entry(i, i).scale(&y[i]);
        smy = if grading.sigma(i) == 1 {
            smy.add(&t)
        } else {
            smy.sub(&t)
        };
    }
    let hbar_inv = hbar.try_inv().expect("hbar nonzero");
    let tilt = PolySeries::term(gens, nvars, trunc, vec![0, 1], smy.scale(&hbar_inv)).exp();
    let lhs_int = k_series.mul(&tilt);
    let rhs_int = rhs_series.mul(&tilt).scale(&hbar_inv);
    let residual = lhs_int.sub(&rhs_int);
    Ok(residual.map_coefficients(|poly| {
        ens.expect(poly)
            .as_grassmann()
            .expect("no external symbols")
            .body()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cq, CQ};
    use crate::testutil::random_graded_matrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ensemble_for(grading: Grading, param_gens: u32) -> GaussianEnsemble<CQ> {
        GaussianEnsemble::with_extra_generators(grading, CQ::from_int(1), param_gens).unwrap()
    }

    #[test]
    fn k_of_amb_is_stra_strb() {
        // g(M) = AMB gives K = str A · str B
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grading = Grading::new(1, 1);
        let param_gens = 4u32;
        let m_gens = 2u32;
        let gens = m_gens + param_gens;
        for _ in 0..10 {
            let a = random_graded_matrix::<CQ, _>(grading, param_gens, &mut rng, false);
            let b = random_graded_matrix::<CQ, _>(grading, param_gens, &mut rng, false);
            let ens = ensemble_for(grading, param_gens);
            let a_m = lift_matrix(&a, m_gens, gens).unwrap();
            let b_m = lift_matrix(&b, m_gens, gens).unwrap();
            let m = ens.raw_matrix();
            let g_mat = mat_mul(&mat_mul(&a_m, &m), &b_m);
            let k = berezinian_first_order(&ens, &g_mat);
            let expected = SymPoly::from_grassmann(
                a.supertrace().shift_generators(m_gens, gens).unwrap(),
            )
            .mul(&SymPoly::from_grassmann(
                b.supertrace().shift_generators(m_gens, gens).unwrap(),
            ));
            assert_eq!(k, expected);
        }
    }

    #[test]
    fn k_of_a_str_mb_is_str_ab() {
        // g(M) = A·str(MB) gives K = str(AB)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grading = Grading::new(1, 1);
        let param_gens = 4u32;
        let m_gens = 2u32;
        let gens = m_gens + param_gens;
        for _ in 0..10 {
            let a = random_graded_matrix::<CQ, _>(grading, param_gens, &mut rng, false);
            let b = random_graded_matrix::<CQ, _>(grading, param_gens, &mut rng, false);
            let ens = ensemble_for(grading, param_gens);
            let a_m = lift_matrix(&a, m_gens, gens).unwrap();
            let b_m = lift_matrix(&b, m_gens, gens).unwrap();
            let m = ens.raw_matrix();
            let scalar = ens.str_of(&mat_mul(&m, &b_m));
            let g_mat = mat_scale_poly(&a_m, &scalar);
            let k = berezinian_first_order(&ens, &g_mat);
            let expected = SymPoly::from_grassmann(
                a.mul(&b)
                    .supertrace()
                    .shift_generators(m_gens, gens)
                    .unwrap(),
            );
            assert_eq!(k, expected);
        }
    }

    #[test]
    fn split_rule_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for grading in [Grading::new(1, 1), Grading::new(2, 1)] {
            for _ in 0..3 {
                let a = random_graded_matrix::<CQ, _>(grading, 4, &mut rng, false);
                let b = random_graded_matrix::<CQ, _>(grading, 4, &mut rng, false);
                let c = random_graded_matrix::<CQ, _>(grading, 4, &mut rng, false);
                let res = split_rule_residual(&a, &b, &c, 4).unwrap();
                for (r, coeff) in res.iter().enumerate() {
                    assert!(coeff.is_zero(), "split residual at order {r} nonzero");
                }
            }
        }
    }

    #[test]
    fn merge_rule_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for grading in [Grading::new(1, 1), Grading::new(2, 1)] {
            for _ in 0..3 {
                let a = random_graded_matrix::<CQ, _>(grading, 4, &mut rng, false);
                let b = random_graded_matrix::<CQ, _>(grading, 4, &mut rng, false);
                let c = random_graded_matrix::<CQ, _>(grading, 4, &mut rng, false);
                let res = merge_rule_residual(&a, &b, &c, 4).unwrap();
                for (r, coeff) in res.iter().enumerate() {
                    assert!(coeff.is_zero(), "merge residual at order {r} nonzero");
                }
            }
        }
    }

    #[test]
    fn split_rule_degenerate_cases() {
        // B = 0: g is constant in M beyond order 0 and both sides vanish
        let grading = Grading::new(1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let a = random_graded_matrix::<CQ, _>(grading, 4, &mut rng, false);
        let zero = SuperMatrix::zero(grading, 4);
        let c = random_graded_matrix::<CQ, _>(grading, 4, &mut rng, false);
        let res = split_rule_residual(&a, &zero, &c, 4).unwrap();
        assert!(res.iter().all(|p| p.is_zero()));
        // C = 0 in the merge rule: K = 0 on both sides
        let res = merge_rule_residual(&a, &c, &zero, 4).unwrap();
        assert!(res.iter().all(|p| p.is_zero()));
    }

    #[test]
    fn sd_residual_vanishes() {
        // Y = 0 and Y ≠ 0, with and without the extra supertrace factor
        for grading in [Grading::new(1, 1), Grading::new(2, 1)] {
            let zero_y = vec![CQ::from_int(0); grading.dim()];
            let res = sd_residual(grading, &cq(1, 2), &zero_y, false, 4).unwrap();
            assert!(res.is_zero(), "sd residual (Y=0) nonzero: {:?}", res);
            let y: Vec<CQ> = (0..grading.dim()).map(|i| cq(i as i64 + 1, 3)).collect();
            let res = sd_residual(grading, &cq(1, 2), &y, false, 4).unwrap();
            assert!(res.is_zero(), "sd residual (Y≠0) nonzero");
            let res = sd_residual(grading, &cq(2, 3), &y, true, 3).unwrap();
            assert!(res.is_zero(), "sd residual with str factor nonzero");
        }
    }
}
