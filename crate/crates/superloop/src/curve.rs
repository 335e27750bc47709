//! Genus-0 spectral curves of the Gaussian model with sources and external
//! field: rational parametrization solved by damped Newton, residue
//! verification from partial-fraction data, branch points, and the bivariate
//! algebraic equation obtained by eliminating the uniformizing variable.
//!
//! The parametrization is
//!   x(z) = z + Σ_j r_j/(z − η_j),   y(z) = z + Σ_i s_i/(z − ξ_i),
//! with unknowns (ξ_i, s_i, η_j, r_j) fixed by x(ξ_i) = x_i, y(η_j) = y_j,
//! s_i x′(ξ_i) = −ħ a_i and r_j y′(η_j) = ħ b_j.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("curve spec invalid: {0}")]
    BadSpec(String),
    #[error("Newton iteration failed to converge ({0})")]
    NewtonDiverged(String),
    #[error("degenerate curve: poles collide ({0})")]
    DegenerateCurve(String),
    #[error("branch point is not simple (x'' vanishes)")]
    NonSimpleBranchPoint,
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("elimination failed: {0}")]
    Elimination(String),
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One source point with signed multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourcePole {
    /// complex coordinate as [re, im]
    pub x: [f64; 2],
    /// signed multiplicity (positive: numerator, negative: denominator)
    pub a: i64,
}

/// One external-field point with signed multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldPole {
    pub y: [f64; 2],
    pub b: i64,
}

/// Input data of a curve: ħ plus the two signed divisors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub hbar: f64,
    #[serde(default)]
    pub sources: Vec<SourcePole>,
    #[serde(default)]
    pub fields: Vec<FieldPole>,
}

impl CurveSpec {
    pub fn validate(&self) -> Result<(), CurveError> {
        if !(self.hbar > 0.0) {
            return Err(CurveError::BadSpec("hbar must be positive".into()));
        }
        for s in &self.sources {
            if s.a == 0 {
                return Err(CurveError::BadSpec("source multiplicity a = 0".into()));
            }
        }
        for f in &self.fields {
            if f.b == 0 {
                return Err(CurveError::BadSpec("field multiplicity b = 0".into()));
            }
        }
        for (i, s) in self.sources.iter().enumerate() {
            for t in &self.sources[i + 1..] {
                if (c64(s.x[0], s.x[1]) - c64(t.x[0], t.x[1])).norm() < 1e-12 {
                    return Err(CurveError::BadSpec(
                        "coinciding sources must be merged into one signed multiplicity".into(),
                    ));
                }
            }
        }
        for (j, s) in self.fields.iter().enumerate() {
            for t in &self.fields[j + 1..] {
                if (c64(s.y[0], s.y[1]) - c64(t.y[0], t.y[1])).norm() < 1e-12 {
                    return Err(CurveError::BadSpec(
                        "coinciding fields must be merged into one signed multiplicity".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn source_points(&self) -> Vec<Complex64> {
        self.sources.iter().map(|s| c64(s.x[0], s.x[1])).collect()
    }

    pub fn field_points(&self) -> Vec<Complex64> {
        self.fields.iter().map(|f| c64(f.y[0], f.y[1])).collect()
    }

    /// m − n = Σ a_i.
    pub fn source_weight(&self) -> i64 {
        self.sources.iter().map(|s| s.a).sum()
    }

    /// p − q = Σ b_j.
    pub fn field_weight(&self) -> i64 {
        self.fields.iter().map(|f| f.b).sum()
    }
}

/// One of the two meromorphic coordinate functions: z plus simple poles.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalCoordinate {
    /// (pole position, residue)
    pub poles: Vec<(Complex64, Complex64)>,
}

impl RationalCoordinate {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = z;
        for &(p, r) in &self.poles {
            acc += r / (z - p);
        }
        acc
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        let mut acc = c64(1.0, 0.0);
        for &(p, r) in &self.poles {
            let d = z - p;
            acc -= r / (d * d);
        }
        acc
    }

    pub fn second_deriv(&self, z: Complex64) -> Complex64 {
        let mut acc = c64(0.0, 0.0);
        for &(p, r) in &self.poles {
            let d = z - p;
            acc += 2.0 * r / (d * d * d);
        }
        acc
    }

    /// Numerator polynomial of the derivative: Π(z−p_k)² − Σ_j r_j Π_{k≠j}(z−p_k)².
    pub fn deriv_numerator(&self) -> Vec<Complex64> {
        let mut all = vec![c64(1.0, 0.0)];
        for &(p, _) in &self.poles {
            let lin = vec![-p, c64(1.0, 0.0)];
            all = poly_mul(&all, &poly_mul(&lin, &lin));
        }
        let mut acc = all;
        for (j, &(_, r)) in self.poles.iter().enumerate() {
            let mut partial = vec![c64(1.0, 0.0)];
            for (k, &(p, _)) in self.poles.iter().enumerate() {
                if k == j {
                    continue;
                }
                let lin = vec![-p, c64(1.0, 0.0)];
                partial = poly_mul(&partial, &poly_mul(&lin, &lin));
            }
            acc = poly_sub(&acc, &poly_scale(&partial, r));
        }
        acc
    }

    /// Numerator / denominator of the coordinate itself.
    pub fn as_fraction(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut den = vec![c64(1.0, 0.0)];
        for &(p, _) in &self.poles {
            den = poly_mul(&den, &[-p, c64(1.0, 0.0)]);
        }
        // z·den + Σ_j r_j Π_{k≠j}(z−p_k)
        let mut num = poly_mul(&den, &[c64(0.0, 0.0), c64(1.0, 0.0)]);
        for (j, &(_, r)) in self.poles.iter().enumerate() {
            let mut partial = vec![c64(1.0, 0.0)];
            for (k, &(p, _)) in self.poles.iter().enumerate() {
                if k == j {
                    continue;
                }
                partial = poly_mul(&partial, &[-p, c64(1.0, 0.0)]);
            }
            num = poly_add(&num, &poly_scale(&partial, r));
        }
        (num, den)
    }
}

/// A solved genus-0 curve.
#[derive(Clone, Debug)]
pub struct SpectralCurve {
    pub spec: CurveSpec,
    /// points with x(ξ_i) = x_i
    pub xi: Vec<Complex64>,
    /// residues of y at ξ_i
    pub s_res: Vec<Complex64>,
    /// points with y(η_j) = y_j
    pub eta: Vec<Complex64>,
    /// residues of x at η_j
    pub r_res: Vec<Complex64>,
    /// zeros of x′(z)
    pub branch_points: Vec<Complex64>,
    pub newton_iterations: usize,
    pub newton_residual: f64,
}

impl SpectralCurve {
    pub fn x_fn(&self) -> RationalCoordinate {
        RationalCoordinate {
            poles: self
                .eta
                .iter()
                .cloned()
                .zip(self.r_res.iter().cloned())
                .collect(),
        }
    }

    pub fn y_fn(&self) -> RationalCoordinate {
        RationalCoordinate {
            poles: self
                .xi
                .iter()
                .cloned()
                .zip(self.s_res.iter().cloned())
                .collect(),
        }
    }

    /// The same curve with the roles of x and y exchanged: sources become
    /// fields and vice versa, ξ ↔ η. Branch points are recomputed as the
    /// zeros of the new x′ = old y′.
    pub fn swapped(&self) -> Result<SpectralCurve, CurveError> {
        let spec = CurveSpec {
            hbar: self.spec.hbar,
            sources: self
                .spec
                .fields
                .iter()
                .map(|f| SourcePole { x: f.y, a: f.b })
                .collect(),
            fields: self
                .spec
                .sources
                .iter()
                .map(|s| FieldPole { y: s.x, b: s.a })
                .collect(),
        };
        let x_fn = RationalCoordinate {
            poles: self
                .xi
                .iter()
                .cloned()
                .zip(self.s_res.iter().cloned())
                .collect(),
        };
        let branch_points = coordinate_branch_points(&x_fn)?;
        Ok(SpectralCurve {
            spec,
            xi: self.eta.clone(),
            s_res: self.r_res.clone(),
            eta: self.xi.clone(),
            r_res: self.s_res.clone(),
            branch_points,
            newton_iterations: self.newton_iterations,
            newton_residual: self.newton_residual,
        })
    }
}

// ---------------------------------------------------------------------------
// dense polynomial helpers over Complex64 (ascending coefficients)

pub fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![c64(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    let mut out = vec![c64(0.0, 0.0); n];
    for (i, &x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, &y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

pub fn poly_sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    poly_add(a, &poly_scale(b, c64(-1.0, 0.0)))
}

pub fn poly_scale(a: &[Complex64], s: Complex64) -> Vec<Complex64> {
    a.iter().map(|&x| x * s).collect()
}

pub fn poly_eval(a: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = c64(0.0, 0.0);
    for &c in a.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

pub fn poly_deriv(a: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * i as f64)
        .collect()
}

fn poly_trim(a: &[Complex64], tol: f64) -> Vec<Complex64> {
    let mut end = a.len();
    while end > 0 && a[end - 1].norm() < tol {
        end -= 1;
    }
    a[..end].to_vec()
}

/// All complex roots by the Durand–Kerner iteration with Newton polish.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, CurveError> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
    let p = poly_trim(coeffs, scale * 1e-14);
    if p.len() <= 1 {
        return Ok(Vec::new());
    }
    let n = p.len() - 1;
    let lead = p[n];
    let monic: Vec<Complex64> = p.iter().map(|&c| c / lead).collect();
    let radius = 1.0
        + monic
            .iter()
            .take(n)
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            radius * c64(angle.cos(), angle.sin())
        })
        .collect();
    let dp = poly_deriv(&monic);
    for _ in 0..600 {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let mut denom = c64(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    denom *= roots[k] - roots[j];
                }
            }
            if denom.norm() < 1e-300 {
                denom = c64(1e-300, 0.0);
            }
            let step = poly_eval(&monic, roots[k]) / denom;
            roots[k] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-13 * radius.max(1.0) {
            break;
        }
    }
    // Newton polish
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let d = poly_eval(&dp, *r);
            if d.norm() < 1e-14 {
                break;
            }
            *r -= poly_eval(&monic, *r) / d;
        }
        if !r.re.is_finite() || !r.im.is_finite() {
            return Err(CurveError::RootFinding("non-finite root".into()));
        }
    }
    Ok(roots)
}

fn coordinate_branch_points(x: &RationalCoordinate) -> Result<Vec<Complex64>, CurveError> {
    let num = x.deriv_numerator();
    let roots = poly_roots(&num)?;
    // simple ramification: x'' must not vanish and roots must be separated
    for (i, &a) in roots.iter().enumerate() {
        if x.second_deriv(a).norm() < 1e-8 {
            return Err(CurveError::NonSimpleBranchPoint);
        }
        for &b in &roots[i + 1..] {
            if (a - b).norm() < 1e-8 {
                return Err(CurveError::NonSimpleBranchPoint);
            }
        }
    }
    Ok(roots)
}

// ---------------------------------------------------------------------------
// Newton solve

fn lu_solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let (pivot, pv) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
        if pv < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
            let bc = b[col];
            b[r] -= f * bc;
        }
    }
    let mut x = vec![c64(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in (r + 1)..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}

struct NewtonState {
    xi: Vec<Complex64>,
    s: Vec<Complex64>,
    eta: Vec<Complex64>,
    r: Vec<Complex64>,
}

impl NewtonState {
    fn unpack(u: &[Complex64], ns: usize, nf: usize) -> Self {
        Self {
            xi: u[0..ns].to_vec(),
            s: u[ns..2 * ns].to_vec(),
            eta: u[2 * ns..2 * ns + nf].to_vec(),
            r: u[2 * ns + nf..2 * ns + 2 * nf].to_vec(),
        }
    }

    fn x_fn(&self) -> RationalCoordinate {
        RationalCoordinate {
            poles: self.eta.iter().cloned().zip(self.r.iter().cloned()).collect(),
        }
    }

    fn y_fn(&self) -> RationalCoordinate {
        RationalCoordinate {
            poles: self.xi.iter().cloned().zip(self.s.iter().cloned()).collect(),
        }
    }
}

/// Solves the coupled system for (ξ, s, η, r) by damped Newton from the
/// decoupled ħ→0 guess ξ_i = x_i, η_j = y_j, s_i = −ħa_i, r_j = ħb_j.
pub fn solve_rational_curve(
    spec: &CurveSpec,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralCurve, CurveError> {
    spec.validate()?;
    let ns = spec.sources.len();
    let nf = spec.fields.len();
    let xs = spec.source_points();
    let ys = spec.field_points();
    let hb = spec.hbar;
    let mut u: Vec<Complex64> = Vec::with_capacity(2 * ns + 2 * nf);
    u.extend(xs.iter().cloned());
    u.extend(spec.sources.iter().map(|s| c64(-hb * s.a as f64, 0.0)));
    u.extend(ys.iter().cloned());
    u.extend(spec.fields.iter().map(|f| c64(hb * f.b as f64, 0.0)));

    let residual = |u: &[Complex64]| -> Vec<Complex64> {
        let st = NewtonState::unpack(u, ns, nf);
        let xf = st.x_fn();
        let yf = st.y_fn();
        let mut f = Vec::with_capacity(2 * ns + 2 * nf);
        for i in 0..ns {
            f.push(xf.eval(st.xi[i]) - xs[i]);
        }
        for i in 0..ns {
            f.push(st.s[i] * xf.deriv(st.xi[i]) + hb * spec.sources[i].a as f64);
        }
        for j in 0..nf {
            f.push(yf.eval(st.eta[j]) - ys[j]);
        }
        for j in 0..nf {
            f.push(st.r[j] * yf.deriv(st.eta[j]) - hb * spec.fields[j].b as f64);
        }
        f
    };

    let jacobian = |u: &[Complex64]| -> Vec<Vec<Complex64>> {
        let st = NewtonState::unpack(u, ns, nf);
        let xf = st.x_fn();
        let yf = st.y_fn();
        let dim = 2 * ns + 2 * nf;
        let mut jac = vec![vec![c64(0.0, 0.0); dim]; dim];
        // variable layout: [ξ (0..ns) | s (ns..2ns) | η (..+nf) | r (..+2nf)]
        let eta0 = 2 * ns;
        let r0 = 2 * ns + nf;
        for i in 0..ns {
            // F1_i = x(ξ_i) − x_i
            jac[i][i] = xf.deriv(st.xi[i]);
            for j in 0..nf {
                let d = st.xi[i] - st.eta[j];
                jac[i][r0 + j] = 1.0 / d;
                jac[i][eta0 + j] = st.r[j] / (d * d);
            }
            // F2_i = s_i x′(ξ_i) + ħ a_i
            let row = ns + i;
            jac[row][ns + i] = xf.deriv(st.xi[i]);
            jac[row][i] = st.s[i] * xf.second_deriv(st.xi[i]);
            for j in 0..nf {
                let d = st.xi[i] - st.eta[j];
                jac[row][r0 + j] = -st.s[i] / (d * d);
                jac[row][eta0 + j] = -2.0 * st.s[i] * st.r[j] / (d * d * d);
            }
        }
        for j in 0..nf {
            // F3_j = y(η_j) − y_j
            let row = eta0 + j;
            jac[row][eta0 + j] = yf.deriv(st.eta[j]);
            for i in 0..ns {
                let d = st.eta[j] - st.xi[i];
                jac[row][ns + i] = 1.0 / d;
                jac[row][i] = st.s[i] / (d * d);
            }
            // F4_j = r_j y′(η_j) − ħ b_j
            let row = r0 + j;
            jac[row][r0 + j] = yf.deriv(st.eta[j]);
            jac[row][eta0 + j] = st.r[j] * yf.second_deriv(st.eta[j]);
            for i in 0..ns {
                let d = st.eta[j] - st.xi[i];
                jac[row][ns + i] = -st.r[j] / (d * d);
                jac[row][i] = -2.0 * st.r[j] * st.s[i] / (d * d * d);
            }
        }
        jac
    };

    let norm = |f: &[Complex64]| f.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut fval = residual(&u);
    let mut fnorm = norm(&fval);
    let mut iterations = 0usize;
    while fnorm > tol {
        if iterations >= max_iter {
            return Err(CurveError::NewtonDiverged(format!(
                "residual {fnorm:.3e} after {iterations} iterations"
            )));
        }
        let jac = jacobian(&u);
        let rhs: Vec<Complex64> = fval.iter().map(|&c| -c).collect();
        let step = lu_solve(jac, rhs)
            .ok_or_else(|| CurveError::NewtonDiverged("singular Jacobian".into()))?;
        // damped update with backtracking (halving)
        let mut lambda = 1.0f64;
        loop {
            let trial: Vec<Complex64> = u
                .iter()
                .zip(&step)
                .map(|(&a, &d)| a + lambda * d)
                .collect();
            let tf = residual(&trial);
            let tn = norm(&tf);
            if tn.is_finite() && tn < fnorm * (1.0 - 0.25 * lambda) {
                u = trial;
                fval = tf;
                fnorm = tn;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-8 {
                return Err(CurveError::NewtonDiverged(format!(
                    "line search stalled at residual {fnorm:.3e}"
                )));
            }
        }
        iterations += 1;
    }
    let st = NewtonState::unpack(&u, ns, nf);
    // pole collisions make the parametrization degenerate
    let mut all_poles: Vec<Complex64> = st.xi.clone();
    all_poles.extend(st.eta.iter().cloned());
    for (i, &a) in all_poles.iter().enumerate() {
        for &b in &all_poles[i + 1..] {
            if (a - b).norm() < 1e-9 {
                return Err(CurveError::DegenerateCurve(format!(
                    "pole separation {:.3e}",
                    (a - b).norm()
                )));
            }
        }
    }
    let branch_points = coordinate_branch_points(&st.x_fn())?;
    Ok(SpectralCurve {
        spec: spec.clone(),
        xi: st.xi,
        s_res: st.s,
        eta: st.eta,
        r_res: st.r,
        branch_points,
        newton_iterations: iterations,
        newton_residual: fnorm,
    })
}

// ---------------------------------------------------------------------------
// residue verification

/// One residue check: label, expected and computed values, deviation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidueEntry {
    pub label: String,
    pub expected: [f64; 2],
    pub computed: [f64; 2],
    pub deviation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResidueReport {
    pub tolerance: f64,
    pub entries: Vec<ResidueEntry>,
    pub pass: bool,
}

/// Verifies the four residue families from the partial-fraction data:
/// Res_∞ y dx = ħ(m−n+p−q) = −Res_∞ x dy, Res_{ξ_i} y dx = −ħa_i,
/// Res_{η_j} x dy = ħb_j. No quadrature is involved.
pub fn verify_residue_data(curve: &SpectralCurve, tol: f64) -> ResidueReport {
    let hb = curve.spec.hbar;
    let total = hb * (curve.spec.source_weight() + curve.spec.field_weight()) as f64;
    let xf = curve.x_fn();
    let yf = curve.y_fn();
    let mut entries = Vec::new();
    let mut push = |label: String, expected: Complex64, computed: Complex64| {
        let dev = (expected - computed).norm();
        entries.push(ResidueEntry {
            label,
            expected: [expected.re, expected.im],
            computed: [computed.re, computed.im],
            deviation: dev,
            pass: dev <= tol,
        });
    };
    // Res_∞ y dx = Σ r_j − Σ s_i (coefficient extraction at infinity)
    let sum_r: Complex64 = curve.r_res.iter().sum();
    let sum_s: Complex64 = curve.s_res.iter().sum();
    push("Res_inf y dx".into(), c64(total, 0.0), sum_r - sum_s);
    push("Res_inf x dy".into(), c64(-total, 0.0), sum_s - sum_r);
    for (i, (&xi, &s)) in curve.xi.iter().zip(&curve.s_res).enumerate() {
        let expected = c64(-hb * curve.spec.sources[i].a as f64, 0.0);
        push(format!("Res_xi[{i}] y dx"), expected, s * xf.deriv(xi));
    }
    for (j, (&eta, &r)) in curve.eta.iter().zip(&curve.r_res).enumerate() {
        let expected = c64(hb * curve.spec.fields[j].b as f64, 0.0);
        push(format!("Res_eta[{j}] x dy"), expected, r * yf.deriv(eta));
    }
    let pass = entries.iter().all(|e| e.pass);
    ResidueReport {
        tolerance: tol,
        entries,
        pass,
    }
}

// ---------------------------------------------------------------------------
// elimination: the algebraic equation E(x, y) = 0

/// Bivariate polynomial with complex coefficients, indexed by (x-deg, y-deg).
#[derive(Clone, Debug, Default)]
pub struct BivariatePoly {
    pub coeffs: BTreeMap<(u32, u32), Complex64>,
}

impl BivariatePoly {
    fn insert(&mut self, key: (u32, u32), v: Complex64) {
        if v.norm() == 0.0 {
            return;
        }
        *self.coeffs.entry(key).or_insert_with(|| c64(0.0, 0.0)) += v;
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, &v) in &other.coeffs {
            out.insert(k, v);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (&(a, b), &v) in &self.coeffs {
            for (&(cdeg, ddeg), &w) in &other.coeffs {
                out.insert((a + cdeg, b + ddeg), v * w);
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&k, &v)| (k, v * s))
                .collect(),
        }
    }

    pub fn eval(&self, x: Complex64, y: Complex64) -> Complex64 {
        let mut acc = c64(0.0, 0.0);
        for (&(a, b), &v) in &self.coeffs {
            acc += v * x.powu(a) * y.powu(b);
        }
        acc
    }

    pub fn x_degree(&self) -> u32 {
        self.coeffs.keys().map(|&(a, _)| a).max().unwrap_or(0)
    }

    pub fn y_degree(&self) -> u32 {
        self.coeffs.keys().map(|&(_, b)| b).max().unwrap_or(0)
    }

    pub fn coeff(&self, a: u32, b: u32) -> Complex64 {
        self.coeffs.get(&(a, b)).copied().unwrap_or_else(|| c64(0.0, 0.0))
    }

    fn max_norm(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Determinant of a square matrix of bivariate polynomials by expansion
/// along rows with memoization over column subsets.
fn poly_det(m: &[Vec<BivariatePoly>]) -> BivariatePoly {
    use std::collections::HashMap;
    let n = m.len();
    fn go(
        m: &[Vec<BivariatePoly>],
        row: usize,
        mask: u32,
        memo: &mut HashMap<u32, BivariatePoly>,
    ) -> BivariatePoly {
        let n = m.len();
        if row == n {
            let mut one = BivariatePoly::default();
            one.insert((0, 0), c64(1.0, 0.0));
            return one;
        }
        if let Some(hit) = memo.get(&mask) {
            return hit.clone();
        }
        let mut acc = BivariatePoly::default();
        let mut parity = 0u32;
        for col in 0..n {
            let bit = 1u32 << col;
            if mask & bit != 0 {
                continue;
            }
            let sub = go(m, row + 1, mask | bit, memo);
            let term = m[row][col].mul(&sub);
            acc = if parity % 2 == 0 {
                acc.add(&term)
            } else {
                acc.add(&term.scale(c64(-1.0, 0.0)))
            };
            parity += 1;
        }
        memo.insert(mask, acc.clone());
        acc
    }
    let mut memo = HashMap::new();
    let _ = n;
    go(m, 0, 0, &mut memo)
}

/// Report of the curve-equation assembly.
#[derive(Clone, Debug)]
pub struct EextReport {
    /// normalized so the coefficient of x^{I+1} y^{J} is 1
    pub polynomial: BivariatePoly,
    pub x_degree: u32,
    pub y_degree: u32,
    /// max |E(x(z), y(z))| over the sample set
    pub max_on_curve: f64,
    /// the resolvent-type coefficients attached to each (source, field) pair,
    /// produced as outputs of the elimination
    pub pair_coefficients: Vec<Vec<[f64; 2]>>,
}

/// Eliminates z from (x(z), y(z)) via the Sylvester resultant, checks the
/// degree bounds deg_y ≤ p′+q′+1 and deg_x ≤ m′+n′+1, and evaluates the
/// result along the curve on `samples` points.
pub fn assemble_eext(curve: &SpectralCurve, samples: usize) -> Result<EextReport, CurveError> {
    let xf = curve.x_fn();
    let yf = curve.y_fn();
    let (px, qx) = xf.as_fraction();
    let (py, qy) = yf.as_fraction();
    // A(z) = px − x·qx (degree J+1), B(z) = py − y·qy (degree I+1)
    let da = px.len() - 1;
    let db = py.len() - 1;
    let n = da + db;
    if n == 0 {
        return Err(CurveError::Elimination("curve has no poles".into()));
    }
    let var_x = 0u8;
    let var_y = 1u8;
    let lift = |p: &[Complex64], q: &[Complex64], var: u8, deg: usize| -> Vec<BivariatePoly> {
        (0..=deg)
            .map(|k| {
                let mut b = BivariatePoly::default();
                if k < p.len() {
                    b.insert((0, 0), p[k]);
                }
                if k < q.len() {
                    let key = if var == 0 { (1, 0) } else { (0, 1) };
                    b.insert(key, -q[k]);
                }
                b
            })
            .collect()
    };
    let a_coeffs = lift(&px, &qx, var_x, da);
    let b_coeffs = lift(&py, &qy, var_y, db);
    // Sylvester matrix: db rows of A shifted, da rows of B shifted
    let mut syl: Vec<Vec<BivariatePoly>> = vec![vec![BivariatePoly::default(); n]; n];
    for r in 0..db {
        for (k, c) in a_coeffs.iter().enumerate() {
            syl[r][r + (da - k)] = c.clone();
        }
    }
    for r in 0..da {
        for (k, c) in b_coeffs.iter().enumerate() {
            syl[db + r][r + (db - k)] = c.clone();
        }
    }
    let raw = poly_det(&syl);
    // normalize to the template: coefficient of x^{I+1} y^{J} equals 1
    let i_count = curve.spec.sources.len() as u32;
    let j_count = curve.spec.fields.len() as u32;
    let anchor = raw.coeff(i_count + 1, j_count);
    if anchor.norm() < 1e-12 * raw.max_norm().max(1e-300) {
        return Err(CurveError::Elimination(
            "vanishing leading coefficient".into(),
        ));
    }
    let e = raw.scale(1.0 / anchor);
    // degree bounds
    if e.x_degree() > i_count + 1 || e.y_degree() > j_count + 1 {
        return Err(CurveError::Elimination(format!(
            "degree bounds violated: ({}, {}) vs ({}, {})",
            e.x_degree(),
            e.y_degree(),
            i_count + 1,
            j_count + 1
        )));
    }
    // evaluate on-curve
    let mut max_err = 0.0f64;
    let mut count = 0usize;
    let mut k = 0usize;
    while count < samples && k < 20 * samples {
        k += 1;
        let angle = 2.399963 * k as f64; // golden-angle sweep
        let radius = 1.7 + 0.9 * ((k * 7919) % 100) as f64 / 100.0;
        let z = radius * c64(angle.cos(), angle.sin());
        // stay away from poles
        let near_pole = curve
            .xi
            .iter()
            .chain(curve.eta.iter())
            .any(|&p| (z - p).norm() < 0.35);
        if near_pole {
            continue;
        }
        let xv = xf.eval(z);
        let yv = yf.eval(z);
        if xv.norm() > 1e4 || yv.norm() > 1e4 {
            continue;
        }
        max_err = max_err.max(e.eval(xv, yv).norm());
        count += 1;
    }
    if count < samples {
        return Err(CurveError::Elimination("not enough sample points".into()));
    }
    // pair coefficients: c_{ij} = E(x_i, y_j)/(ħ² a_i b_j Π'(x_i−x_{i'}) Π'(y_j−y_{j'}))
    let hb = curve.spec.hbar;
    let xs = curve.spec.source_points();
    let ys = curve.spec.field_points();
    let mut pair = Vec::new();
    for (i, &xi_val) in xs.iter().enumerate() {
        let mut row = Vec::new();
        for (j, &yj_val) in ys.iter().enumerate() {
            let mut denom = c64(hb * hb, 0.0)
                * c64(curve.spec.sources[i].a as f64, 0.0)
                * c64(curve.spec.fields[j].b as f64, 0.0);
            for (i2, &x2) in xs.iter().enumerate() {
                if i2 != i {
                    denom *= xi_val - x2;
                }
            }
            for (j2, &y2) in ys.iter().enumerate() {
                if j2 != j {
                    denom *= yj_val - y2;
                }
            }
            let val = e.eval(xi_val, yj_val) / denom;
            row.push([val.re, val.im]);
        }
        pair.push(row);
    }
    Ok(EextReport {
        x_degree: e.x_degree(),
        y_degree: e.y_degree(),
        polynomial: e,
        max_on_curve: max_err,
        pair_coefficients: pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_spec(t_over_h: i64, hbar: f64) -> CurveSpec {
        CurveSpec {
            hbar,
            sources: vec![],
            fields: vec![FieldPole {
                y: [0.0, 0.0],
                b: t_over_h,
            }],
        }
    }

    #[test]
    fn gaussian_curve_closed_form() {
        // single field at 0 with weight p−q: η = 0, y(z) = z, x(z) = z + t/z
        let spec = gaussian_spec(2, 0.5); // t = 1
        let curve = solve_rational_curve(&spec, 1e-12, 200).unwrap();
        assert_eq!(curve.eta.len(), 1);
        assert!(curve.eta[0].norm() < 1e-12);
        assert!((curve.r_res[0] - c64(1.0, 0.0)).norm() < 1e-12);
        assert!(curve.xi.is_empty());
        // branch points at ±√t = ±1
        let mut bps: Vec<f64> = curve.branch_points.iter().map(|b| b.re).collect();
        bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(curve.branch_points.len(), 2);
        assert!((bps[0] + 1.0).abs() < 1e-10 && (bps[1] - 1.0).abs() < 1e-10);
        // residue report
        let rep = verify_residue_data(&curve, 1e-10);
        assert!(rep.pass, "{:?}", rep);
    }

    #[test]
    fn decoupled_limit() {
        // tiny ħ: ξ ≈ x, η ≈ y
        let spec = CurveSpec {
            hbar: 1e-8,
            sources: vec![SourcePole { x: [2.0, 0.0], a: 1 }],
            fields: vec![FieldPole { y: [-1.0, 0.5], b: 1 }],
        };
        let curve = solve_rational_curve(&spec, 1e-13, 200).unwrap();
        assert!((curve.xi[0] - c64(2.0, 0.0)).norm() < 1e-6);
        assert!((curve.eta[0] - c64(-1.0, 0.5)).norm() < 1e-6);
    }

    #[test]
    fn one_source_one_field_self_consistency() {
        let spec = CurveSpec {
            hbar: 0.1,
            sources: vec![SourcePole { x: [2.0, 0.0], a: 1 }],
            fields: vec![FieldPole { y: [0.0, 0.0], b: 1 }],
        };
        let curve = solve_rational_curve(&spec, 1e-12, 200).unwrap();
        let xf = curve.x_fn();
        let yf = curve.y_fn();
        assert!((xf.eval(curve.xi[0]) - c64(2.0, 0.0)).norm() < 1e-12);
        assert!(yf.eval(curve.eta[0]).norm() < 1e-12);
        let rep = verify_residue_data(&curve, 1e-10);
        assert!(rep.pass);
    }

    #[test]
    fn branch_point_count_and_empty() {
        // no poles in x: no branch points
        let spec = CurveSpec {
            hbar: 0.05,
            sources: vec![SourcePole { x: [1.5, 0.0], a: 1 }],
            fields: vec![],
        };
        let curve = solve_rational_curve(&spec, 1e-12, 200).unwrap();
        assert!(curve.branch_points.is_empty());
        // J fields: numerator of x′ has degree 2J
        let spec = CurveSpec {
            hbar: 0.07,
            sources: vec![],
            fields: vec![
                FieldPole { y: [0.4, 0.0], b: 1 },
                FieldPole { y: [-0.8, 0.3], b: -1 },
            ],
        };
        let curve = solve_rational_curve(&spec, 1e-12, 200).unwrap();
        assert_eq!(curve.branch_points.len(), 4);
    }

    #[test]
    fn residue_families_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let mut solved = 0;
        let mut attempts = 0;
        while solved < 12 && attempts < 200 {
            attempts += 1;
            let ns = rng.gen_range(0..=3usize);
            let nf = rng.gen_range(1..=3usize);
            let hbar = rng.gen_range(0.02..0.2);
            let spec = CurveSpec {
                hbar,
                sources: (0..ns)
                    .map(|k| SourcePole {
                        x: [
                            2.0 * (k as f64 + 1.0) + rng.gen_range(-0.3..0.3),
                            rng.gen_range(-0.4..0.4),
                        ],
                        a: *[-2i64, -1, 1, 2].get(rng.gen_range(0..4)).unwrap(),
                    })
                    .collect(),
                fields: (0..nf)
                    .map(|k| FieldPole {
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
                    let rep = verify_residue_data(&curve, 1e-10);
                    assert!(rep.pass, "residues failed: {:?}", rep);
                    solved += 1;
                }
                Err(CurveError::NonSimpleBranchPoint) | Err(CurveError::NewtonDiverged(_)) => {}
                Err(e) => panic!("unexpected error {e:?}"),
            }
        }
        assert!(solved >= 12, "only {solved} random curves solved");
    }

    #[test]
    fn eext_gaussian() {
        // E ∝ y² − xy + t up to normalization (here: coeff of x y is +1
        // after normalizing, so E = xy − y² − t)
        let spec = gaussian_spec(1, 1.0); // t = 1
        let curve = solve_rational_curve(&spec, 1e-12, 200).unwrap();
        let rep = assemble_eext(&curve, 100).unwrap();
        assert!(rep.max_on_curve < 1e-9, "max err {}", rep.max_on_curve);
        assert!(rep.x_degree <= 1 && rep.y_degree <= 2);
        let e = &rep.polynomial;
        assert!((e.coeff(1, 1) - c64(1.0, 0.0)).norm() < 1e-10);
        assert!((e.coeff(0, 2) + c64(1.0, 0.0)).norm() < 1e-10);
        assert!((e.coeff(0, 0) + c64(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn eext_generic_on_curve() {
        let spec = CurveSpec {
            hbar: 0.08,
            sources: vec![
                SourcePole { x: [2.0, 0.1], a: 1 },
                SourcePole { x: [-2.2, 0.0], a: -1 },
            ],
            fields: vec![
                FieldPole { y: [0.9, -0.2], b: 2 },
                FieldPole { y: [-1.1, 0.4], b: 1 },
            ],
        };
        let curve = solve_rational_curve(&spec, 1e-12, 200).unwrap();
        let rep = assemble_eext(&curve, 100).unwrap();
        assert!(rep.max_on_curve < 1e-9, "max err {}", rep.max_on_curve);
        assert!(rep.x_degree <= 3 && rep.y_degree <= 3);
    }

    #[test]
    fn large_z_expansion() {
        // y ~ x − ħ(m−n+p−q)/x + O(1/x²) on the physical sheet
        let spec = CurveSpec {
            hbar: 0.12,
            sources: vec![SourcePole { x: [1.7, 0.0], a: 2 }],
            fields: vec![FieldPole { y: [-0.6, 0.0], b: 1 }],
        };
        let curve = solve_rational_curve(&spec, 1e-12, 200).unwrap();
        let xf = curve.x_fn();
        let yf = curve.y_fn();
        let c = curve.spec.hbar * (curve.spec.source_weight() + curve.spec.field_weight()) as f64;
        for &radius in &[1e3, 1e4] {
            let z = c64(radius, radius * 0.3);
            let x = xf.eval(z);
            let y = yf.eval(z);
            let err = (y - (x - c / x)).norm();
            assert!(
                err < 10.0 / (radius * radius),
                "radius {radius}: err {err:.3e}"
            );
        }
    }

    #[test]
    fn spec_validation() {
        let bad = CurveSpec {
            hbar: 0.1,
            sources: vec![SourcePole { x: [1.0, 0.0], a: 0 }],
            fields: vec![],
        };
        assert!(matches!(bad.validate(), Err(CurveError::BadSpec(_))));
        let dup = CurveSpec {
            hbar: 0.1,
            sources: vec![
                SourcePole { x: [1.0, 0.0], a: 1 },
                SourcePole { x: [1.0, 0.0], a: 1 },
            ],
            fields: vec![],
        };
        assert!(matches!(dup.validate(), Err(CurveError::BadSpec(_))));
    }

    #[test]
    fn swap_is_involutive() {
        let spec = CurveSpec {
            hbar: 0.1,
            sources: vec![SourcePole { x: [2.0, 0.0], a: 1 }],
            fields: vec![FieldPole { y: [-1.0, 0.0], b: 1 }],
        };
        let curve = solve_rational_curve(&spec, 1e-12, 200).unwrap();
        let swapped = curve.swapped().unwrap();
        assert_eq!(swapped.spec.sources.len(), 1);
        assert!((swapped.spec.sources[0].x[0] + 1.0).abs() < 1e-12);
        let back = swapped.swapped().unwrap();
        assert_eq!(back.spec, curve.spec);
        assert_eq!(back.xi, curve.xi);
        assert_eq!(back.eta, curve.eta);
    }
}
