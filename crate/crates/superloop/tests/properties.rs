//! Property tests over randomly generated algebra elements.

use proptest::prelude::*;
use superloop::grassmann::{ConjugationTable, GrassmannElement};
use superloop::scalar::{Scalar, CR128};
use superloop::supermatrix::Grading;

const GENS: u32 = 6;

fn arb_scalar() -> impl Strategy<Value = CR128> {
    (-6i64..=6, 1i64..=4, -4i64..=4).prop_map(|(n, d, i)| {
        CR128::from_ratio(n, d) + CR128::i() * CR128::from_ratio(i, d)
    })
}

fn arb_monomial() -> impl Strategy<Value = (Vec<usize>, CR128)> {
    (
        proptest::collection::btree_set(0usize..GENS as usize, 0..4),
        arb_scalar(),
    )
        .prop_map(|(set, c)| (set.into_iter().collect(), c))
}

fn arb_element() -> impl Strategy<Value = GrassmannElement<CR128>> {
    proptest::collection::vec(arb_monomial(), 1..5).prop_map(|monos| {
        let mut acc = GrassmannElement::zero(GENS);
        for (indices, c) in monos {
            acc = acc.add(&GrassmannElement::monomial(GENS, &indices, c).unwrap());
        }
        acc
    })
}

fn arb_homogeneous(parity: u8) -> impl Strategy<Value = GrassmannElement<CR128>> {
    proptest::collection::vec(arb_monomial(), 1..5).prop_map(move |monos| {
        let mut acc = GrassmannElement::zero(GENS);
        for (indices, c) in monos {
            if indices.len() % 2 == parity as usize % 2 {
                acc = acc.add(&GrassmannElement::monomial(GENS, &indices, c).unwrap());
            }
        }
        acc
    })
}

proptest! {
    #[test]
    fn mul_is_associative(a in arb_element(), b in arb_element(), c in arb_element()) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn graded_commutativity(
        (pa, a) in (0u8..2).prop_flat_map(|p| (Just(p), arb_homogeneous(p))),
        (pb, b) in (0u8..2).prop_flat_map(|p| (Just(p), arb_homogeneous(p))),
    ) {
        let ab = a.mul(&b).unwrap();
        let ba = b.mul(&a).unwrap();
        let expected = if pa == 1 && pb == 1 { ba.neg() } else { ba };
        prop_assert_eq!(ab, expected);
    }

    #[test]
    fn conjugation_is_involutive(a in arb_element()) {
        let table = ConjugationTable::interleaved(GENS);
        let twice = a.conjugate(&table).unwrap().conjugate(&table).unwrap();
        prop_assert_eq!(twice, a);
    }

    #[test]
    fn specialized_moments_are_grading_stable(
        y1 in -4i64..=4, y2 in -4i64..=4, extra in -4i64..=4, hn in 1i64..=5
    ) {
        // appending a matched numerator/denominator pair to Y never changes
        // a specialized moment
        use superloop::fatgraph::moment_polynomial;
        let g21 = Grading::new(2, 1);
        let g32 = Grading::new(3, 2);
        let hbar = CR128::from_ratio(hn, 3);
        let ya = [
            CR128::from_ratio(y1, 2),
            CR128::from_ratio(y2, 3),
            CR128::from_ratio(y1 - y2, 5),
        ];
        let c = CR128::from_ratio(extra, 2);
        let yb = [ya[0], ya[1], c, ya[2], c];
        for val in [vec![2usize], vec![4], vec![2, 2]] {
            let poly = moment_polynomial(&val).unwrap();
            prop_assert_eq!(
                poly.specialize(g21, &ya, &hbar),
                poly.specialize(g32, &yb, &hbar)
            );
        }
    }
}
