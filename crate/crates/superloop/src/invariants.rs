//! Named property suites: seeded randomized runs of the crate's invariants,
//! shared by the test targets and the `invariants` CLI subcommand.

use crate::curve::{solve_rational_curve, verify_residue_data, CurveError};
use crate::fatgraph::{moment_indexsum, moment_polynomial};
use crate::grassmann::{ConjugationTable, GrassmannElement};
use crate::loopcheck::{merge_rule_residual, sd_residual, split_rule_residual};
use crate::oracle::{exp_source_identity_holds, GaussianEnsemble};
use crate::partition::oracle_duality_ratio;
use crate::scalar::{Scalar, CQ, CR128};
use crate::supermatrix::{Grading, SuperMatrix};
use crate::testutil::{random_graded_matrix, random_graded_matrix_light, random_hermitian_matrix};
use crate::toprec::{duality_report, random_duality_spec, Recursion};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: usize,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            suite: name.to_string(),
            cases: 0,
            failures: 0,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, label: &str) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            self.notes.push(format!("FAIL {label}"));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

pub const SUITES: &[&str] = &[
    "grassmann",
    "supermatrix",
    "moments",
    "loopcheck",
    "curve",
    "toprec",
    "duality",
];

pub fn run_suite(name: &str, seed: u64, jobs: usize) -> Option<SuiteReport> {
    match name {
        "grassmann" => Some(grassmann_suite(seed)),
        "supermatrix" => Some(supermatrix_suite(seed)),
        "moments" => Some(moments_suite(seed)),
        "loopcheck" => Some(loopcheck_suite(seed)),
        "curve" => Some(curve_suite(seed)),
        "toprec" => Some(toprec_suite()),
        "duality" => Some(duality_suite(seed, jobs)),
        _ => None,
    }
}

fn random_rational<R: Rng, C: Scalar>(rng: &mut R) -> C {
    C::from_ratio(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=4))
}

fn grassmann_suite(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("grassmann");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // graded commutativity and conjugation involution on random elements
    let gens = 6u32;
    let table = ConjugationTable::interleaved(gens);
    for case in 0..40 {
        let mut a = GrassmannElement::<CQ>::zero(gens);
        for _ in 0..4 {
            let i = rng.gen_range(0..gens as usize);
            let j = rng.gen_range(0..gens as usize);
            if i != j {
                a = a.add(
                    &GrassmannElement::monomial(gens, &[i.min(j), i.max(j)], random_rational(&mut rng))
                        .unwrap(),
                );
            }
        }
        let odd = GrassmannElement::<CQ>::generator(gens, rng.gen_range(0..gens as usize))
            .unwrap()
            .scale(&random_rational(&mut rng));
        // even·odd commute, odd·odd anticommute
        let c1 = a.mul(&odd).unwrap().sub(&odd.mul(&a).unwrap());
        rep.check(c1.is_zero(), &format!("commutation case {case}"));
        let conj2 = a
            .conjugate(&table)
            .unwrap()
            .conjugate(&table)
            .unwrap();
        rep.check(conj2 == a, &format!("conjugation involution case {case}"));
    }
    rep
}

fn supermatrix_suite(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("supermatrix");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = 6u32;
    let table = ConjugationTable::interleaved(gens);
    for (p, q) in [(1usize, 1usize), (2, 1)] {
        let g = Grading::new(p, q);
        for case in 0..50 {
            let x = random_graded_matrix::<CQ, _>(g, gens, &mut rng, true);
            let y = random_graded_matrix::<CQ, _>(g, gens, &mut rng, true);
            // supertrace cyclicity
            rep.check(
                x.mul(&y).supertrace() == y.mul(&x).supertrace(),
                &format!("str cyclicity ({p}|{q}) case {case}"),
            );
            // sdet multiplicativity
            let lhs = x.mul(&y).superdeterminant().unwrap();
            let rhs = x
                .superdeterminant()
                .unwrap()
                .mul(&y.superdeterminant().unwrap())
                .unwrap();
            rep.check(lhs == rhs, &format!("sdet multiplicative ({p}|{q}) case {case}"));
            // sdet(exp N) = exp(str N) on the nilpotent part
            let n = x.nilpotent_part();
            let l2 = n.exp_nilpotent().unwrap().superdeterminant().unwrap();
            let r2 = n.supertrace().exp_nilpotent().unwrap();
            rep.check(l2 == r2, &format!("sdet∘exp ({p}|{q}) case {case}"));
        }
        // hermiticity preserved under conjugation by the convergence matrix
        for case in 0..10 {
            let h = random_hermitian_matrix::<CQ, _>(g, gens, &mut rng);
            let i_mat = SuperMatrix::<CQ>::convergence_matrix(g, gens);
            let idag = i_mat.adjoint(&table).unwrap();
            let conj = i_mat.mul(&h).mul(&idag);
            rep.check(
                conj.is_hermitian(&table).unwrap(),
                &format!("hermiticity ({p}|{q}) case {case}"),
            );
        }
    }
    // ⟨e^{str MY}⟩ = e^{(ħ/2) str Y²} as a symbolic series through order 6
    rep.check(
        exp_source_identity_holds(Grading::new(1, 1), CQ::from_ratio(1, 2), 6),
        "exp source identity (1|1)",
    );
    rep.check(
        exp_source_identity_holds(Grading::new(2, 1), CQ::from_ratio(2, 3), 6),
        "exp source identity (2|1)",
    );
    rep
}

/// All valency lists with Σ n_k ≤ 6 (unordered).
pub fn valency_lists_up_to(total: usize) -> Vec<Vec<usize>> {
    fn partitions(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            partitions(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for s in 1..=total {
        partitions(s, s, &mut Vec::new(), &mut out);
    }
    out
}

fn moments_suite(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("moments");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (p, q) in [(1usize, 1usize), (2, 1), (1, 2)] {
        let g = Grading::new(p, q);
        let hbar: CR128 = random_rational::<_, CR128>(&mut rng) + CR128::from_int(1);
        let y: Vec<CR128> = (0..g.dim()).map(|_| random_rational(&mut rng)).collect();
        let ens = GaussianEnsemble::new(g, hbar).unwrap();
        for val in valency_lists_up_to(6) {
            let a = moment_polynomial(&val).unwrap().specialize(g, &y, &hbar);
            let b = moment_indexsum(&val, g, &y, &hbar).unwrap();
            let c = ens.trace_moment(&val, &y);
            rep.check(
                a == b && a == c,
                &format!("three-way {:?} ({p}|{q})", val),
            );
        }
    }
    rep
}

fn loopcheck_suite(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("loopcheck");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for grading in [Grading::new(1, 1), Grading::new(2, 1)] {
        for case in 0..50 {
            let a = random_graded_matrix_light::<CR128, _>(grading, 3, &mut rng);
            let b = random_graded_matrix_light::<CR128, _>(grading, 3, &mut rng);
            let c = random_graded_matrix_light::<CR128, _>(grading, 3, &mut rng);
            let split_ok = split_rule_residual(&a, &b, &c, 6)
                .unwrap()
                .iter()
                .all(|p| p.is_zero());
            let merge_ok = merge_rule_residual(&a, &b, &c, 6)
                .unwrap()
                .iter()
                .all(|p| p.is_zero());
            rep.check(
                split_ok,
                &format!("split ({}|{}) case {case}", grading.p, grading.q),
            );
            rep.check(
                merge_ok,
                &format!("merge ({}|{}) case {case}", grading.p, grading.q),
            );
        }
        // Schwinger–Dyson residual, with and without external field
        let zero_y = vec![CR128::zero(); grading.dim()];
        let y: Vec<CR128> = (0..grading.dim())
            .map(|i| CR128::from_ratio(i as i64 + 1, 3))
            .collect();
        let hb = CR128::from_ratio(1, 2);
        rep.check(
            sd_residual(grading, &hb, &zero_y, false, 4).unwrap().is_zero(),
            &format!("sd residual Y=0 ({}|{})", grading.p, grading.q),
        );
        rep.check(
            sd_residual(grading, &hb, &y, false, 4).unwrap().is_zero(),
            &format!("sd residual Y≠0 ({}|{})", grading.p, grading.q),
        );
        rep.check(
            sd_residual(grading, &hb, &y, true, 3).unwrap().is_zero(),
            &format!("sd residual with str factor ({}|{})", grading.p, grading.q),
        );
    }
    rep
}

fn curve_suite(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("curve");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut solved = 0usize;
    let mut attempts = 0usize;
    while solved < 20 && attempts < 400 {
        attempts += 1;
        let ns = rng.gen_range(0..=3usize);
        let nf = rng.gen_range(1..=3usize);
        let spec = crate::curve::CurveSpec {
            hbar: rng.gen_range(0.02..0.2),
            sources: (0..ns)
                .map(|k| crate::curve::SourcePole {
                    x: [
                        2.0 * (k as f64 + 1.0) + rng.gen_range(-0.3..0.3),
                        rng.gen_range(-0.4..0.4),
                    ],
                    a: *[-2i64, -1, 1, 2].get(rng.gen_range(0..4)).unwrap(),
                })
                .collect(),
            fields: (0..nf)
                .map(|k| crate::curve::FieldPole {
                    y: [
                        -2.0 * (k as f64 + 1.0) + rng.gen_range(-0.3..0.3),
                        rng.gen_range(-0.4..0.4),
                    ],
                    b: *[-2i64, -1, 1, 2].get(rng.gen_range(0..4)).unwrap(),
                })
                .collect(),
        };
        match solve_rational_curve(&spec, 1e-12, 200) {
            Ok(curve) => {
                solved += 1;
                let res = verify_residue_data(&curve, 1e-10);
                rep.check(res.pass, &format!("residues spec {attempts}"));
                match crate::curve::assemble_eext(&curve, 100) {
                    Ok(e) => {
                        rep.check(
                            e.max_on_curve < 1e-9,
                            &format!("|E| on curve spec {attempts} ({:.2e})", e.max_on_curve),
                        );
                        rep.check(
                            e.x_degree as usize <= spec.sources.len() + 1
                                && e.y_degree as usize <= spec.fields.len() + 1,
                            &format!("E degrees spec {attempts}"),
                        );
                    }
                    Err(err) => rep.check(false, &format!("E assembly spec {attempts}: {err}")),
                }
            }
            Err(CurveError::NewtonDiverged(_))
            | Err(CurveError::NonSimpleBranchPoint)
            | Err(CurveError::DegenerateCurve(_)) => {}
            Err(e) => rep.check(false, &format!("unexpected curve error {e}")),
        }
    }
    rep.check(solved >= 20, "enough random curves solved");
    rep
}

fn toprec_suite() -> SuiteReport {
    let mut rep = SuiteReport::new("toprec");
    // Gaussian anchors
    let gaussian = |t: f64| {
        let spec = crate::curve::CurveSpec {
            hbar: t / 2.0,
            sources: vec![],
            fields: vec![crate::curve::FieldPole {
                y: [0.0, 0.0],
                b: 2,
            }],
        };
        solve_rational_curve(&spec, 1e-13, 200).unwrap()
    };
    let mut rec = Recursion::new(&gaussian(1.0)).unwrap();
    let f2 = rec.free_energy(2).unwrap();
    rep.check(
        (f2 - num_complex::Complex64::new(-1.0 / 240.0, 0.0)).norm() < 1e-10,
        "F2 anchor −1/240",
    );
    let f3 = rec.free_energy(3).unwrap();
    rep.check(
        (f3 - num_complex::Complex64::new(1.0 / 1008.0, 0.0)).norm() < 1e-9,
        "F3 anchor 1/1008",
    );
    for &t in &[0.5f64, 2.0] {
        let mut rt = Recursion::new(&gaussian(t)).unwrap();
        for g in 2..=3usize {
            let fg = rt.free_energy(g).unwrap();
            let expected = match g {
                2 => f2,
                _ => f3,
            } * t.powi(2 - 2 * g as i32);
            rep.check(
                (fg - expected).norm() < 1e-8 * expected.norm().max(1e-3),
                &format!("F{g} scaling t={t}"),
            );
        }
    }
    // ω symmetry and residue-free ω_{g,1}
    let spec = crate::curve::CurveSpec {
        hbar: 0.1,
        sources: vec![crate::curve::SourcePole {
            x: [2.1, 0.3],
            a: 1,
        }],
        fields: vec![crate::curve::FieldPole {
            y: [-1.9, 0.0],
            b: 1,
        }],
    };
    let curve = solve_rational_curve(&spec, 1e-12, 200).unwrap();
    let mut rec = Recursion::new(&curve).unwrap();
    for (g, n) in [(0usize, 3usize), (0, 4), (1, 2), (2, 2)] {
        let w = rec.omega(g, n).unwrap();
        rep.check(
            w.symmetry_defect() < 1e-7,
            &format!("omega({g},{n}) symmetry"),
        );
    }
    for g in 1..=3usize {
        let w = rec.omega(g, 1).unwrap();
        let scale = w
            .terms
            .values()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let ok = w
            .slot_residues(curve.branch_points.len())
            .iter()
            .all(|r| r.norm() < 1e-8 * scale);
        rep.check(ok, &format!("omega({g},1) residue-free"));
    }
    rep
}

fn duality_suite(seed: u64, jobs: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("duality");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut specs = Vec::new();
    let mut attempts = 0;
    while specs.len() < 10 && attempts < 200 {
        attempts += 1;
        let spec = random_duality_spec(&mut rng);
        if solve_rational_curve(&spec, 1e-12, 200).is_ok() {
            specs.push(spec);
        }
    }
    rep.check(specs.len() >= 10, "enough duality specs sampled");
    let jobs = jobs.max(1);
    let chunks: Vec<Vec<crate::curve::CurveSpec>> = specs
        .chunks(specs.len().div_ceil(jobs))
        .map(|c| c.to_vec())
        .collect();
    let results: Vec<(bool, String)> = std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    for (i, spec) in chunk.iter().enumerate() {
                        match duality_report(spec, 3, 1e-8) {
                            Ok(dual) => out.push((dual.pass, format!("duality spec {i}"))),
                            Err(e) => out.push((false, format!("duality spec {i}: {e}"))),
                        }
                    }
                    out
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    for (ok, label) in results {
        rep.check(ok, &label);
    }
    // exact oracle comparisons at terminating sizes
    let hbar = CQ::from_ratio(1, 2);
    let r11 = oracle_duality_ratio(1, 1, &hbar, 4).unwrap();
    rep.check(
        r11.ratio_same_hbar == Some(crate::partition::cq_to_ser(&(-CQ::one()))),
        "oracle ratio (1|0)/(1|0) = −1",
    );
    let r02 = oracle_duality_ratio(0, 2, &hbar, 3).unwrap();
    rep.check(
        r02.ratio_same_hbar == Some(crate::partition::cq_to_ser(&CQ::one())),
        "oracle ratio (0|0)/(2|0) = 1",
    );
    let r21 = oracle_duality_ratio(2, 1, &hbar, 4).unwrap();
    rep.check(
        r21.ratio_negated_hbar == Some(crate::partition::cq_to_ser(&CQ::one())),
        "oracle ratio (2|0)/(1|0) = 1 at negated ħ",
    );
    rep
}
