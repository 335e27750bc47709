//! Random generators for the property runs (library tests and the
//! `invariants` CLI subcommand share these).

use crate::grassmann::{ConjugationTable, GrassmannElement};
use crate::scalar::Scalar;
use crate::supermatrix::{Grading, SuperMatrix};


use rand::Rng;

/// Small exact scalar, occasionally with an imaginary part.
pub fn random_scalar<C: Scalar, R: Rng>(rng: &mut R) -> C {
    let num = rng.gen_range(-6i64..=6);
    let den = rng.gen_range(1i64..=4);
    let re = C::from_ratio(num, den);
    if rng.gen_bool(0.3) {
        let inum = rng.gen_range(-4i64..=4);
        re + C::i() * C::from_ratio(inum, den)
    } else {
        re
    }
}

fn random_nonzero<C: Scalar, R: Rng>(rng: &mut R) -> C {
    loop {
        let c = random_scalar::<C, R>(rng);
        if !c.is_zero() {
            return c;
        }
    }
}

fn random_even_part<C: Scalar, R: Rng>(gens: u32, rng: &mut R) -> GrassmannElement<C> {
    // occasional two-generator even monomial keeps products tractable
    if gens >= 2 && rng.gen_bool(0.5) {
        let a = rng.gen_range(0..gens as usize);
        let mut b = rng.gen_range(0..gens as usize);
        while b == a {
            b = rng.gen_range(0..gens as usize);
        }
        let (a, b) = (a.min(b), a.max(b));
        GrassmannElement::monomial(gens, &[a, b], random_scalar::<C, R>(rng)).unwrap()
    } else {
        GrassmannElement::zero(gens)
    }
}

fn random_odd_entry<C: Scalar, R: Rng>(gens: u32, rng: &mut R) -> GrassmannElement<C> {
    let a = rng.gen_range(0..gens as usize);
    let mut e = GrassmannElement::generator(gens, a)
        .unwrap()
        .scale(&random_scalar::<C, R>(rng));
    if rng.gen_bool(0.4) {
        let b = rng.gen_range(0..gens as usize);
        e = e.add(
            &GrassmannElement::generator(gens, b)
                .unwrap()
                .scale(&random_scalar::<C, R>(rng)),
        );
    }
    e
}

/// Random even supermatrix respecting block parity. With `invertible_body`
/// the diagonal blocks get unit-dominant bodies so sdet exists.
pub fn random_graded_matrix<C: Scalar, R: Rng>(
    grading: Grading,
    gens: u32,
    rng: &mut R,
    invertible_body: bool,
) -> SuperMatrix<C> {
    let d = grading.dim();
    let mut m = SuperMatrix::zero(grading, gens);
    for i in 0..d {
        for j in 0..d {
            let parity = (grading.eps(i) + grading.eps(j)) % 2;
            let entry = if parity == 0 {
                let mut scalar = if i == j && invertible_body {
                    random_nonzero::<C, R>(rng) + C::from_int(4)
                } else {
                    random_scalar::<C, R>(rng)
                };
                if i != j && invertible_body {
                    // keep off-diagonal bodies small relative to the diagonal
                    scalar = scalar * C::from_ratio(1, 8);
                }
                GrassmannElement::scalar(gens, scalar).add(&random_even_part::<C, R>(gens, rng))
            } else {
                random_odd_entry::<C, R>(gens, rng)
            };
            m.set_entry(i, j, entry);
        }
    }
    m
}

/// Random graded matrix with scalar even entries and single-generator odd
/// entries; the cheap workhorse for bulk property runs.
pub fn random_graded_matrix_light<C: Scalar, R: Rng>(
    grading: Grading,
    gens: u32,
    rng: &mut R,
) -> SuperMatrix<C> {
    let d = grading.dim();
    let mut m = SuperMatrix::zero(grading, gens);
    for i in 0..d {
        for j in 0..d {
            let parity = (grading.eps(i) + grading.eps(j)) % 2;
            let entry = if parity == 0 {
                GrassmannElement::scalar(gens, random_scalar::<C, R>(rng))
            } else {
                let a = rng.gen_range(0..gens as usize);
                GrassmannElement::generator(gens, a)
                    .unwrap()
                    .scale(&random_scalar::<C, R>(rng))
            };
            m.set_entry(i, j, entry);
        }
    }
    m
}

/// Random Hermitian supermatrix (X† = X) under the interleaved conjugation
/// pairing θ_{2k} ↔ θ_{2k+1}.
pub fn random_hermitian_matrix<C: Scalar, R: Rng>(
    grading: Grading,
    gens: u32,
    rng: &mut R,
) -> SuperMatrix<C> {
    let table = ConjugationTable::interleaved(gens);
    let d = grading.dim();
    let mut m = SuperMatrix::zero(grading, gens);
    for i in 0..d {
        // real scalar plus a self-conjugate pair monomial
        let mut diag =
            GrassmannElement::scalar(gens, C::from_ratio(rng.gen_range(-5i64..=5), 2));
        if gens >= 2 {
            let k = rng.gen_range(0..(gens / 2) as usize);
            diag = diag.add(
                &GrassmannElement::monomial(gens, &[2 * k, 2 * k + 1], C::one())
                    .unwrap()
                    .scale(&C::from_ratio(rng.gen_range(-3i64..=3), 1)),
            );
        }
        m.set_entry(i, i, diag);
        for j in (i + 1)..d {
            let parity = (grading.eps(i) + grading.eps(j)) % 2;
            let e = if parity == 0 {
                GrassmannElement::scalar(gens, random_scalar::<C, R>(rng))
                    .add(&random_even_part::<C, R>(gens, rng))
            } else {
                random_odd_entry::<C, R>(gens, rng)
            };
            m.set_entry(j, i, e.conjugate(&table).unwrap());
            m.set_entry(i, j, e);
        }
    }
    m
}
