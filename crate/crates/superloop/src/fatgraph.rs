//! Graded Wick engine: star fatgraphs, their faces and genus, graded pairing
//! signs, and the topological moment polynomial for products of supertraces.
//!
//! A star has one multivalent trace vertex per supertrace factor plus one
//! univalent vertex per unpaired half-edge. Edge and vertex bookkeeping:
//! E = (#paired half-edges)/2 + (#unpaired), V = d + (#unpaired), faces are
//! traced through the dotted closures, and χ = V + F − E = 2 − 2g holds per
//! connected component.

use crate::scalar::Scalar;
use crate::supermatrix::Grading;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Desk cap on the total valency for enumeration.
pub const ENUMERATION_CAP: usize = 12;
/// Desk caps for the direct index summation.
pub const INDEXSUM_VALENCY_CAP: usize = 8;
pub const INDEXSUM_DIM_CAP: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FatgraphError {
    #[error("total valency {0} exceeds cap {1}")]
    CapExceeded(usize, usize),
    #[error("dimension {0} exceeds cap {1}")]
    DimCap(usize, usize),
    #[error("valencies must be positive")]
    ZeroValency,
    #[error("pairing is not a fixpoint-free partial involution")]
    BadPairing,
    #[error("non-integer genus: component has Euler characteristic {0}")]
    NonIntegerGenus(i64),
}

/// A fatgraph star: trace-vertex valencies plus a partial pairing of the
/// global half-edge slots, with derived face and genus data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FatgraphStar {
    valencies: Vec<usize>,
    pairing: Vec<Option<usize>>,
    faces: Vec<Vec<usize>>,
    face_unpaired: Vec<usize>,
    vertices: usize,
    edges: usize,
    genus: usize,
}

impl FatgraphStar {
    /// Builds a star from trace valencies and a slot pairing, tracing faces
    /// and computing the genus of every connected component.
    pub fn new(valencies: Vec<usize>, pairing: Vec<Option<usize>>) -> Result<Self, FatgraphError> {
        if valencies.iter().any(|&n| n == 0) {
            return Err(FatgraphError::ZeroValency);
        }
        let total: usize = valencies.iter().sum();
        if pairing.len() != total {
            return Err(FatgraphError::BadPairing);
        }
        for (s, p) in pairing.iter().enumerate() {
            if let Some(t) = *p {
                if t == s || t >= total || pairing[t] != Some(s) {
                    return Err(FatgraphError::BadPairing);
                }
            }
        }
        // vertex of each slot and cyclic successor position
        let mut vertex_of = vec![0usize; total];
        let mut succ = vec![0usize; total];
        let mut base = 0;
        for (k, &n) in valencies.iter().enumerate() {
            for t in 0..n {
                vertex_of[base + t] = k;
                succ[base + t] = base + (t + 1) % n;
            }
            base += n;
        }
        // face tracing: from position t, an unpaired slot walks to succ(t),
        // an edge jumps to succ(partner)
        let mut seen = vec![false; total];
        let mut faces: Vec<Vec<usize>> = Vec::new();
        let mut face_unpaired: Vec<usize> = Vec::new();
        for start in 0..total {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut m_count = 0usize;
            let mut t = start;
            loop {
                seen[t] = true;
                cycle.push(t);
                t = match pairing[t] {
                    None => {
                        m_count += 1;
                        succ[t]
                    }
                    Some(u) => succ[u],
                };
                if t == start {
                    break;
                }
            }
            faces.push(cycle);
            face_unpaired.push(m_count);
        }
        let unpaired = pairing.iter().filter(|p| p.is_none()).count();
        let vertices = valencies.len() + unpaired;
        let edges = (total - unpaired) / 2 + unpaired;
        // connected components over trace vertices (joined by edges), for
        // per-component Euler characteristics
        let d = valencies.len();
        let mut comp: Vec<usize> = (0..d).collect();
        fn find(comp: &mut Vec<usize>, mut i: usize) -> usize {
            while comp[i] != i {
                comp[i] = comp[comp[i]];
                i = comp[i];
            }
            i
        }
        for (s, p) in pairing.iter().enumerate() {
            if let Some(t) = *p {
                let (a, b) = (
                    find(&mut comp, vertex_of[s]),
                    find(&mut comp, vertex_of[t]),
                );
                if a != b {
                    comp[a] = b;
                }
            }
        }
        let mut genus_total = 0usize;
        let roots: Vec<usize> = (0..d).map(|i| find(&mut comp, i)).collect();
        let mut uniq = roots.clone();
        uniq.sort_unstable();
        uniq.dedup();
        for &root in &uniq {
            let mut v_c = 0usize;
            let mut e_c = 0usize;
            for k in 0..d {
                if roots[k] == root {
                    v_c += 1;
                }
            }
            let mut f_c = 0usize;
            for cycle in &faces {
                if roots[vertex_of[cycle[0]]] == root {
                    f_c += 1;
                }
            }
            for (s, p) in pairing.iter().enumerate() {
                if roots[vertex_of[s]] != root {
                    continue;
                }
                match *p {
                    None => {
                        v_c += 1;
                        e_c += 1;
                    }
                    Some(t) => {
                        if t > s {
                            e_c += 1;
                        }
                    }
                }
            }
            let chi = v_c as i64 + f_c as i64 - e_c as i64;
            if chi % 2 != 0 || chi > 2 {
                return Err(FatgraphError::NonIntegerGenus(chi));
            }
            genus_total += ((2 - chi) / 2) as usize;
        }
        Ok(Self {
            valencies,
            pairing,
            faces,
            face_unpaired,
            vertices,
            edges,
            genus: genus_total,
        })
    }

    pub fn valencies(&self) -> &[usize] {
        &self.valencies
    }

    pub fn pairing(&self) -> &[Option<usize>] {
        &self.pairing
    }

    pub fn total_slots(&self) -> usize {
        self.pairing.len()
    }

    pub fn unpaired_count(&self) -> usize {
        self.pairing.iter().filter(|p| p.is_none()).count()
    }

    /// (V, E, F, g).
    pub fn euler_data(&self) -> (usize, usize, usize, usize) {
        (self.vertices, self.edges, self.faces.len(), self.genus)
    }

    /// Number of unpaired half-edges per face.
    pub fn face_unpaired(&self) -> &[usize] {
        &self.face_unpaired
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// The ħ-exponent E − V − F of this star's contribution.
    pub fn hbar_exponent(&self) -> i64 {
        self.edges as i64 - self.vertices as i64 - self.faces.len() as i64
    }
}

/// Enumerates all partial pairings (or only perfect pairings) of the slots
/// of the given trace valencies, each star exactly once.
pub fn enumerate_stars(
    valencies: &[usize],
    allow_unpaired: bool,
) -> Result<Vec<FatgraphStar>, FatgraphError> {
    let total: usize = valencies.iter().sum();
    if total > ENUMERATION_CAP {
        return Err(FatgraphError::CapExceeded(total, ENUMERATION_CAP));
    }
    if valencies.iter().any(|&n| n == 0) {
        return Err(FatgraphError::ZeroValency);
    }
    let mut out = Vec::new();
    let mut pairing: Vec<Option<usize>> = vec![None; total];
    let mut decided = vec![false; total];
    fn recurse(
        valencies: &[usize],
        pairing: &mut Vec<Option<usize>>,
        decided: &mut Vec<bool>,
        allow_unpaired: bool,
        out: &mut Vec<FatgraphStar>,
    ) {
        let slot = match decided.iter().position(|d| !d) {
            None => {
                out.push(
                    FatgraphStar::new(valencies.to_vec(), pairing.clone())
                        .expect("enumerated pairing is valid"),
                );
                return;
            }
            Some(s) => s,
        };
        decided[slot] = true;
        if allow_unpaired {
            recurse(valencies, pairing, decided, allow_unpaired, out);
        }
        for partner in (slot + 1)..pairing.len() {
            if decided[partner] {
                continue;
            }
            decided[partner] = true;
            pairing[slot] = Some(partner);
            pairing[partner] = Some(slot);
            recurse(valencies, pairing, decided, allow_unpaired, out);
            pairing[slot] = None;
            pairing[partner] = None;
            decided[partner] = false;
        }
        decided[slot] = false;
    }
    recurse(valencies, &mut pairing, &mut decided, allow_unpaired, &mut out);
    Ok(out)
}

/// Graded sign of the permutation that sorts paired half-edge factors
/// adjacently (pairs ordered by their first slot, unpaired slots trailing):
/// each transposition of two odd-degree half-edges contributes −1.
///
/// `labels` gives the (i, j) index pair carried by each slot; a slot's
/// degree is ε(i)+ε(j) mod 2.
pub fn pairing_sign(labels: &[(usize, usize)], star: &FatgraphStar, grading: Grading) -> i64 {
    let degrees: Vec<u8> = labels
        .iter()
        .map(|&(i, j)| (grading.eps(i) + grading.eps(j)) % 2)
        .collect();
    sign_from_degrees(&degrees, star.pairing())
}

fn sign_from_degrees(degrees: &[u8], pairing: &[Option<usize>]) -> i64 {
    let total = degrees.len();
    let mut target: Vec<usize> = Vec::with_capacity(total);
    for s in 0..total {
        match pairing[s] {
            Some(t) if t > s => {
                target.push(s);
                target.push(t);
            }
            _ => {}
        }
    }
    for (s, p) in pairing.iter().enumerate() {
        if p.is_none() {
            target.push(s);
        }
    }
    let mut pos = vec![0usize; total];
    for (idx, &s) in target.iter().enumerate() {
        pos[s] = idx;
    }
    let mut parity = 0u32;
    for s in 0..total {
        for t in (s + 1)..total {
            if pos[s] > pos[t] && degrees[s] == 1 && degrees[t] == 1 {
                parity ^= 1;
            }
        }
    }
    if parity == 0 {
        1
    } else {
        -1
    }
}

/// Weight of a fully labeled graph: graded sign × ħσ(j_a) per edge (with the
/// edge deltas) × ħ·Y[i][j] per unpaired half-edge. `y` is the full matrix
/// of external-field entries.
pub fn labeled_weight<C: Scalar>(
    labels: &[(usize, usize)],
    star: &FatgraphStar,
    grading: Grading,
    y: &[Vec<C>],
    hbar: &C,
) -> C {
    let mut acc = C::from_int(pairing_sign(labels, star, grading));
    for (s, p) in star.pairing().iter().enumerate() {
        match *p {
            Some(t) if t > s => {
                let (ia, ja) = labels[s];
                let (ib, jb) = labels[t];
                if ia != jb || ja != ib {
                    return C::zero();
                }
                acc = acc * hbar.clone() * C::from_int(grading.sigma(ja));
            }
            Some(_) => {}
            None => {
                let (i, j) = labels[s];
                acc = acc * hbar.clone() * y[i][j].clone();
            }
        }
    }
    acc
}

/// Direct index summation Σ σ(i¹₁)···σ(i^d₁) W(Γ) over all index
/// assignments of a trace-type star, with the weight rules ħσ(j) per edge
/// and ħY per unpaired half-edge. `y` is diagonal.
pub fn star_indexsum<C: Scalar>(
    star: &FatgraphStar,
    grading: Grading,
    y: &[C],
    hbar: &C,
) -> Result<C, FatgraphError> {
    let half: Vec<C> = y.iter().map(|v| hbar.clone() * v.clone()).collect();
    indexsum_core(star, grading, &half, hbar)
}

/// Normalized full index sum over all partial pairings: equals
/// specialize(moment_polynomial(valencies)) at the same (Y, ħ).
pub fn moment_indexsum<C: Scalar>(
    valencies: &[usize],
    grading: Grading,
    y: &[C],
    hbar: &C,
) -> Result<C, FatgraphError> {
    let total: usize = valencies.iter().sum();
    if total > INDEXSUM_VALENCY_CAP {
        return Err(FatgraphError::CapExceeded(total, INDEXSUM_VALENCY_CAP));
    }
    if grading.dim() > INDEXSUM_DIM_CAP {
        return Err(FatgraphError::DimCap(grading.dim(), INDEXSUM_DIM_CAP));
    }
    let mut acc = C::zero();
    for star in enumerate_stars(valencies, true)? {
        acc = acc + indexsum_core(&star, grading, y, hbar)?;
    }
    let hbar_inv = hbar.try_inv().expect("hbar nonzero");
    for _ in 0..valencies.len() {
        acc = acc * hbar_inv.clone();
    }
    Ok(acc)
}

/// Core index sum with an explicit per-index unpaired half-edge factor.
/// The edge deltas i_a = j_b, j_a = i_b are enforced by merging index
/// positions, so only the free index classes are enumerated.
fn indexsum_core<C: Scalar>(
    star: &FatgraphStar,
    grading: Grading,
    halfedge: &[C],
    hbar: &C,
) -> Result<C, FatgraphError> {
    let total = star.total_slots();
    if total > INDEXSUM_VALENCY_CAP {
        return Err(FatgraphError::CapExceeded(total, INDEXSUM_VALENCY_CAP));
    }
    let dim = grading.dim();
    if dim > INDEXSUM_DIM_CAP {
        return Err(FatgraphError::DimCap(dim, INDEXSUM_DIM_CAP));
    }
    // positions and cyclic successors
    let mut succ = vec![0usize; total];
    let mut first_pos = Vec::new();
    let mut base = 0;
    for &n in star.valencies() {
        first_pos.push(base);
        for t in 0..n {
            succ[base + t] = base + (t + 1) % n;
        }
        base += n;
    }
    // union-find over index positions, merging along edges
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    fn union(parent: &mut Vec<usize>, a: usize, b: usize) {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    for (s, p) in star.pairing().iter().enumerate() {
        if let Some(t) = *p {
            if t > s {
                union(&mut parent, s, succ[t]);
                union(&mut parent, succ[s], t);
            }
        }
    }
    let mut class_of = vec![0usize; total];
    let mut classes: Vec<usize> = Vec::new();
    for pos in 0..total {
        let root = find(&mut parent, pos);
        let id = match classes.iter().position(|&r| r == root) {
            Some(id) => id,
            None => {
                classes.push(root);
                classes.len() - 1
            }
        };
        class_of[pos] = id;
    }
    let nclasses = classes.len();
    let mut assignment = vec![0usize; nclasses];
    let mut acc = C::zero();
    loop {
        // labels per slot from the class assignment
        let labels: Vec<(usize, usize)> = (0..total)
            .map(|s| (assignment[class_of[s]], assignment[class_of[succ[s]]]))
            .collect();
        let mut term = C::from_int(sign_from_degrees(
            &labels
                .iter()
                .map(|&(i, j)| (grading.eps(i) + grading.eps(j)) % 2)
                .collect::<Vec<_>>(),
            star.pairing(),
        ));
        for &fp in &first_pos {
            term = term * C::from_int(grading.sigma(assignment[class_of[fp]]));
        }
        for (s, p) in star.pairing().iter().enumerate() {
            match *p {
                Some(t) if t > s => {
                    let ja = labels[s].1;
                    term = term * hbar.clone() * C::from_int(grading.sigma(ja));
                }
                Some(_) => {}
                None => {
                    let (i, j) = labels[s];
                    if i != j {
                        term = C::zero();
                        break;
                    }
                    term = term * halfedge[i].clone();
                }
            }
        }
        acc = acc + term;
        // next assignment
        let mut k = 0;
        loop {
            if k == nclasses {
                return Ok(acc);
            }
            assignment[k] += 1;
            if assignment[k] < dim {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
    }
}

/// Laurent polynomial in ħ over monomials in the formal variables p_k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentPolynomial {
    /// (ħ exponent, sorted face multiset of p-indices) → integer count
    pub terms: BTreeMap<(i64, Vec<usize>), i64>,
}

impl MomentPolynomial {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    /// Substitutes p_k = ħ(Σ_{i≤p} y_i^k − Σ_{i>p} y_i^k), p_0 = ħ(p−q).
    pub fn specialize<C: Scalar>(&self, grading: Grading, y: &[C], hbar: &C) -> C {
        let hbar_inv = hbar.try_inv().expect("hbar nonzero");
        let mut acc = C::zero();
        for (key, &count) in self.terms.iter() {
            let (e, faces) = (key.0, &key.1);
            let mut term = C::from_int(count);
            if e >= 0 {
                for _ in 0..e {
                    term = term * hbar.clone();
                }
            } else {
                for _ in 0..(-e) {
                    term = term * hbar_inv.clone();
                }
            }
            for &m in faces.iter() {
                term = term * p_value(grading, y, hbar, m);
            }
            acc = acc + term;
        }
        acc
    }
}

/// p_m = ħ str Y^m for diagonal Y, with p_0 = ħ(p−q).
pub fn p_value<C: Scalar>(grading: Grading, y: &[C], hbar: &C, m: usize) -> C {
    let mut acc = C::zero();
    for i in 0..grading.dim() {
        let mut pw = C::one();
        for _ in 0..m {
            pw = pw * y[i].clone();
        }
        acc = if grading.sigma(i) == 1 {
            acc + pw
        } else {
            acc - pw
        };
    }
    hbar.clone() * acc
}

/// The star-fatgraph expansion Σ_Γ ħ^{E−V−F} Π_i p_{m_i} over all partial
/// pairings of the given trace valencies, with p_0 kept formal.
pub fn moment_polynomial(valencies: &[usize]) -> Result<MomentPolynomial, FatgraphError> {
    let mut poly = MomentPolynomial::zero();
    for star in enumerate_stars(valencies, true)? {
        let mut faces: Vec<usize> = star.face_unpaired().to_vec();
        faces.sort_unstable();
        let key = (star.hbar_exponent(), faces);
        *poly.terms.entry(key).or_insert(0) += 1;
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cq, CQ, Scalar};
    use num_traits::{One, Zero};

    fn star(valencies: &[usize], pairs: &[(usize, usize)]) -> FatgraphStar {
        let total: usize = valencies.iter().sum();
        let mut pairing = vec![None; total];
        for &(a, b) in pairs {
            pairing[a] = Some(b);
            pairing[b] = Some(a);
        }
        FatgraphStar::new(valencies.to_vec(), pairing).unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_stars(&[2], false).unwrap().len(), 1);
        assert_eq!(enumerate_stars(&[2], true).unwrap().len(), 2);
        assert_eq!(enumerate_stars(&[4], false).unwrap().len(), 3);
        // involution numbers: I(4) = 10, I(6) = 76
        assert_eq!(enumerate_stars(&[4], true).unwrap().len(), 10);
        assert_eq!(enumerate_stars(&[3, 3], true).unwrap().len(), 76);
        assert!(matches!(
            enumerate_stars(&[13], true),
            Err(FatgraphError::CapExceeded(13, _))
        ));
    }

    #[test]
    fn euler_data_examples() {
        // [2] paired: sphere
        assert_eq!(star(&[2], &[(0, 1)]).euler_data(), (1, 1, 2, 0));
        // [4] crossing pairing: torus
        assert_eq!(star(&[4], &[(0, 2), (1, 3)]).euler_data(), (1, 2, 1, 1));
        // [4] planar pairing: sphere
        assert_eq!(star(&[4], &[(0, 1), (2, 3)]).euler_data(), (1, 2, 3, 0));
        // the 8-valent star with edges {1,5},{2,7},{3,6}: V=3, E=5, F=2, g=1
        let s = star(&[8], &[(0, 4), (1, 6), (2, 5)]);
        assert_eq!(s.euler_data(), (3, 5, 2, 1));
        let mut mi = s.face_unpaired().to_vec();
        mi.sort_unstable();
        assert_eq!(mi, vec![0, 2]);
        // disconnected: two self-paired 2-stars, genus adds
        let s2 = star(&[2, 2], &[(0, 1), (2, 3)]);
        assert_eq!(s2.euler_data(), (2, 2, 4, 0));
        // two crossing 4-stars: total genus 2
        let s3 = star(&[4, 4], &[(0, 2), (1, 3), (4, 6), (5, 7)]);
        assert_eq!(s3.euler_data(), (2, 4, 2, 2));
    }

    #[test]
    fn pairing_sign_examples() {
        let g22 = Grading::new(2, 2);
        // all-bosonic labels give +1
        let s = star(&[6], &[(0, 2), (1, 4)]);
        let bosonic = vec![(0, 1); 6];
        assert_eq!(pairing_sign(&bosonic, &s, g22), 1);
        // the 6-half-edge example with edges {1,3},{2,5} and labels
        // (1,3)(2,4)(3,1)(4,4)(1,3)(2,3) [1-based] has sign −1
        let labels: Vec<(usize, usize)> = [(1, 3), (2, 4), (3, 1), (4, 4), (1, 3), (2, 3)]
            .iter()
            .map(|&(i, j)| (i - 1, j - 1))
            .collect();
        assert_eq!(pairing_sign(&labels, &s, g22), -1);
        // exchanging two odd ribbons flips the sign: degrees (odd, odd)
        let s2 = star(&[4], &[(0, 2), (1, 3)]);
        let odd_labels = vec![(0, 2), (1, 3), (2, 0), (3, 1)];
        let planar = star(&[4], &[(0, 1), (2, 3)]);
        let sign_crossing = pairing_sign(&odd_labels, &s2, g22);
        let sign_planar = pairing_sign(&odd_labels, &planar, g22);
        assert_eq!(sign_crossing * sign_planar, -1);
    }

    #[test]
    fn labeled_weight_figure_example() {
        // edges {1,3},{2,5}, unpaired {4,6}; delta-consistent labels force
        // (i5,j5) = (j2,i2); the weight is −ħ⁴ Y_{44} Y_{23}.
        let g = Grading::new(2, 2);
        let s = star(&[6], &[(0, 2), (1, 4)]);
        let labels: Vec<(usize, usize)> = [(1, 3), (2, 4), (3, 1), (4, 4), (4, 2), (2, 3)]
            .iter()
            .map(|&(i, j)| (i - 1, j - 1))
            .collect();
        let hbar = cq(1, 3);
        let mut y = vec![vec![CQ::zero(); 4]; 4];
        for (i, row) in y.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = cq((2 * i + 3 * j + 1) as i64, 2);
            }
        }
        let w = labeled_weight(&labels, &s, g, &y, &hbar);
        let h4 = hbar.clone() * hbar.clone() * hbar.clone() * hbar.clone();
        let expected = -h4 * y[3][3].clone() * y[1][2].clone();
        assert_eq!(w, expected);
        // with the delta-inconsistent label copy the deltas kill the weight
        let bad: Vec<(usize, usize)> = [(1, 3), (2, 4), (3, 1), (4, 4), (1, 3), (2, 3)]
            .iter()
            .map(|&(i, j)| (i - 1, j - 1))
            .collect();
        assert!(labeled_weight(&bad, &s, g, &y, &hbar).is_zero());
    }

    /// f(m) = str (ħY)^m with f(0) = p−q, for diagonal Y.
    fn str_pow(grading: Grading, y: &[CQ], hbar: &CQ, m: usize) -> CQ {
        let mut acc = CQ::zero();
        for i in 0..grading.dim() {
            let mut pw = CQ::one();
            for _ in 0..m {
                pw = pw * hbar.clone() * y[i].clone();
            }
            acc = if grading.sigma(i) == 1 {
                acc + pw
            } else {
                acc - pw
            };
        }
        acc
    }

    #[test]
    fn star_indexsum_three_edge_graph() {
        // T_{15,27,36} on str M⁸: Σ σ(i₁) W = ħ³(p−q)·str(ħY)²
        let s = star(&[8], &[(0, 4), (1, 6), (2, 5)]);
        for (p, q) in [(1, 1), (2, 1), (1, 2)] {
            let g = Grading::new(p, q);
            let y: Vec<CQ> = (0..g.dim()).map(|i| cq(i as i64 + 1, 2)).collect();
            let hbar = cq(2, 5);
            let got = star_indexsum(&s, g, &y, &hbar).unwrap();
            let h3 = hbar.clone() * hbar.clone() * hbar.clone();
            let expected =
                h3 * CQ::from_int(g.str_identity()) * str_pow(g, &y, &hbar, 2);
            assert_eq!(got, expected, "p={p} q={q}");
        }
    }

    #[test]
    fn star_indexsum_one_edge_graph() {
        // T_{kℓ} on str M^n: ħ·str(ħY)^{n+k−ℓ−1}·str(ħY)^{ℓ−k−1}
        let n = 6;
        for (k, l) in [(1usize, 2usize), (1, 4), (2, 5), (3, 4)] {
            let s = star(&[n], &[(k - 1, l - 1)]);
            for (p, q) in [(2, 1), (1, 2)] {
                let g = Grading::new(p, q);
                let y: Vec<CQ> = (0..g.dim()).map(|i| cq(2 * i as i64 - 1, 3)).collect();
                let hbar = cq(1, 2);
                let got = star_indexsum(&s, g, &y, &hbar).unwrap();
                let expected = hbar.clone()
                    * str_pow(g, &y, &hbar, n + k - l - 1)
                    * str_pow(g, &y, &hbar, l - k - 1);
                assert_eq!(got, expected, "k={k} l={l} p={p} q={q}");
            }
        }
    }

    #[test]
    fn star_indexsum_perfect_two() {
        // str M² with the single edge, Y = 0: ħ(p−q)²
        let s = star(&[2], &[(0, 1)]);
        for (p, q) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let g = Grading::new(p, q);
            let y = vec![CQ::zero(); g.dim()];
            let hbar = cq(3, 7);
            let got = star_indexsum(&s, g, &y, &hbar).unwrap();
            let n = g.str_identity();
            assert_eq!(got, hbar.clone() * CQ::from_int(n * n));
        }
    }

    #[test]
    fn moment_polynomial_examples() {
        // [1] → ħ^{−2} p₁
        let p1 = moment_polynomial(&[1]).unwrap();
        assert_eq!(p1.terms.len(), 1);
        assert_eq!(p1.terms[&(-2, vec![1])], 1);
        // [2] → ħ^{−2}(p₂ + p₀²)
        let p2 = moment_polynomial(&[2]).unwrap();
        assert_eq!(p2.terms.len(), 2);
        assert_eq!(p2.terms[&(-2, vec![2])], 1);
        assert_eq!(p2.terms[&(-2, vec![0, 0])], 1);
        // [4] perfect pairings only: 2ħ^{−2}p₀³ + p₀
        let p4 = moment_polynomial(&[4]).unwrap();
        assert_eq!(p4.terms[&(-2, vec![0, 0, 0])], 2);
        assert_eq!(p4.terms[&(0, vec![0])], 1);
    }

    #[test]
    fn specialize_cases() {
        let p4 = moment_polynomial(&[4]).unwrap();
        // ħ = (p−q)^{-1}, Y = 0 → 2(p−q)² + 1
        for (p, q) in [(2, 1), (3, 1), (1, 2)] {
            let g = Grading::new(p, q);
            let n = g.str_identity();
            let hbar = CQ::one() / CQ::from_int(n);
            let y = vec![CQ::zero(); g.dim()];
            let v = p4.specialize(g, &y, &hbar);
            assert_eq!(v, CQ::from_int(2 * n * n + 1), "p={p} q={q}");
        }
        // Y = diag(y; y) in (1|1): p_k = 0 for k ≥ 1
        let g11 = Grading::new(1, 1);
        let y = vec![cq(3, 2), cq(3, 2)];
        for m in 1..5 {
            assert!(p_value(g11, &y, &cq(1, 2), m).is_zero());
        }
        // matched-pair extension leaves specialized moments unchanged
        let g21 = Grading::new(2, 1);
        let g32 = Grading::new(3, 2);
        let y21 = vec![cq(1, 2), cq(-2, 3), cq(1, 5)];
        let c = cq(7, 4);
        let y32 = vec![
            cq(1, 2),
            cq(-2, 3),
            c.clone(),
            cq(1, 5),
            c.clone(),
        ];
        let hbar = cq(2, 7);
        for val in [vec![2usize], vec![4], vec![2, 2], vec![3, 1]] {
            let poly = moment_polynomial(&val).unwrap();
            assert_eq!(
                poly.specialize(g21, &y21, &hbar),
                poly.specialize(g32, &y32, &hbar),
                "valencies {:?}",
                val
            );
        }
    }

    #[test]
    fn odd_total_degree_vanishes() {
        for val in [vec![1usize], vec![3], vec![2, 1], vec![5], vec![3, 2]] {
            let poly = moment_polynomial(&val).unwrap();
            // no perfect pairing exists; every term carries some p_{m>0}
            // so Y = 0 kills the whole polynomial
            let g = Grading::new(2, 1);
            let y = vec![CQ::zero(); 3];
            assert!(poly.specialize(g, &y, &cq(1, 3)).is_zero());
            // and the index sums vanish identically by parity
            let yr = vec![cq(1, 2), cq(-1, 3), cq(2, 5)];
            let odd_y: Vec<CQ> = yr.iter().map(|v| -v.clone()).collect();
            let a = moment_indexsum(&val, g, &yr, &cq(1, 3)).unwrap();
            let b = moment_indexsum(&val, g, &odd_y, &cq(1, 3)).unwrap();
            // M → −M symmetry: odd moments change sign under Y → −Y
            assert_eq!(a, -b);
        }
    }

    #[test]
    fn three_way_small() {
        use crate::oracle::GaussianEnsemble;
        let hbar = cq(1, 2);
        for (p, q) in [(1, 1), (2, 1), (1, 2)] {
            let g = Grading::new(p, q);
            let y: Vec<CQ> = (0..g.dim()).map(|i| cq(i as i64 + 1, 3)).collect();
            let ens = GaussianEnsemble::new(g, hbar.clone()).unwrap();
            for val in [vec![2usize], vec![1, 1], vec![4], vec![2, 2], vec![3, 1]] {
                let a = moment_polynomial(&val)
                    .unwrap()
                    .specialize(g, &y, &hbar);
                let b = moment_indexsum(&val, g, &y, &hbar).unwrap();
                let c = ens.trace_moment(&val, &y);
                assert_eq!(a, b, "poly vs indexsum {:?} p={p} q={q}", val);
                assert_eq!(a, c, "poly vs oracle {:?} p={p} q={q}", val);
            }
        }
    }
}
