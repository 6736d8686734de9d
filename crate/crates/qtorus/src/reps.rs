//! Finite-dimensional realization of the torus at rational theta = p/q via
//! q x q clock/shift matrices, matrix-valued symbols on the 2-torus, and
//! Schatten-norm quadrature for the non-commutative L^1 / L^2 / operator
//! norms. Also hosts the operator-inequality property checks used as
//! independent oracles.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::algebra::TorusPolynomial;
use crate::error::{Error, Result};

/// q x q clock/shift pair realizing the rational rotation relation
/// `S C = e^{2 pi i p/q} C S` under `U -> e^{2 pi i x} S`,
/// `V -> e^{2 pi i y} C`.
#[derive(Clone, Debug)]
pub struct ClockShiftRep {
    p: i64,
    q: i64,
}

impl ClockShiftRep {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q < 1 {
            return Err(Error::InvalidModulus(q));
        }
        let p_red = p.mod_floor(&q);
        if p_red.gcd(&q) != 1 {
            return Err(Error::NotCoprime { p, q });
        }
        Ok(Self { p: p_red, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.q as usize
    }

    pub fn theta_label(&self) -> String {
        format!("{}/{}", self.p, self.q)
    }

    /// e^{2 pi i p n / q} from the reduced residue.
    fn root(&self, n: i64) -> Complex64 {
        let r = (n.mod_floor(&self.q) * self.p).mod_floor(&self.q);
        Complex64::from_polar(1.0, TAU * r as f64 / self.q as f64)
    }

    /// The diagonal clock matrix C = diag(1, w, ..., w^{q-1}).
    pub fn clock(&self) -> DMatrix<Complex64> {
        let q = self.dim();
        DMatrix::from_fn(q, q, |r, c| {
            if r == c {
                self.root(r as i64)
            } else {
                Complex64::zero()
            }
        })
    }

    /// The cyclic shift S with S e_j = e_{j-1 mod q}.
    pub fn shift(&self) -> DMatrix<Complex64> {
        let q = self.dim();
        DMatrix::from_fn(q, q, |r, c| {
            if (c + q - 1) % q == r {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::zero()
            }
        })
    }
}

/// Precomputed symbol form of a d = 2 polynomial in a clock/shift
/// representation. `eval` assembles
/// `T(x,y) = sum_alpha c_alpha e^{2 pi i (a1 x + a2 y)} S^{a1} C^{a2}`.
pub struct SymbolEvaluator<'a> {
    rep: &'a ClockShiftRep,
    // (alpha, coeff, per-column clock phases of S^{a1} C^{a2})
    terms: Vec<(i64, i64, Complex64, Vec<Complex64>)>,
}

impl<'a> SymbolEvaluator<'a> {
    pub fn new(a: &TorusPolynomial, rep: &'a ClockShiftRep) -> Result<Self> {
        if a.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: a.dim(),
            });
        }
        let q = rep.dim();
        let terms = a
            .terms()
            .map(|(alpha, c)| {
                // (S^{a1} C^{a2}) e_j = w^{a2 j} e_{j - a1 mod q}
                let phases = (0..q)
                    .map(|j| rep.root(alpha[1] * j as i64))
                    .collect::<Vec<_>>();
                (alpha[0], alpha[1], *c, phases)
            })
            .collect();
        Ok(Self { rep, terms })
    }

    pub fn eval(&self, x: f64, y: f64) -> DMatrix<Complex64> {
        let q = self.rep.dim();
        let mut m = DMatrix::from_element(q, q, Complex64::zero());
        for (a1, a2, c, phases) in &self.terms {
            let scalar = c * Complex64::from_polar(1.0, TAU * (*a1 as f64 * x + *a2 as f64 * y));
            for (j, w) in phases.iter().enumerate() {
                let row = (j as i64 - a1).mod_floor(&(q as i64)) as usize;
                m[(row, j)] += scalar * w;
            }
        }
        m
    }
}

/// One-shot symbol evaluation T(x, y).
pub fn symbol_matrix(
    a: &TorusPolynomial,
    x: f64,
    y: f64,
    rep: &ClockShiftRep,
) -> Result<DMatrix<Complex64>> {
    Ok(SymbolEvaluator::new(a, rep)?.eval(x, y))
}

/// Fixed-order pairwise (cascade) summation; deterministic for any
/// partitioning of the outer loops.
pub fn cascade_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    cascade_sum(&xs[..mid]) + cascade_sum(&xs[mid..])
}

/// Ascending singular values of T via the Hermitian eigendecomposition of
/// T* T.
pub fn singular_values(t: &DMatrix<Complex64>) -> Vec<f64> {
    if t.nrows() == 1 {
        return vec![t[(0, 0)].norm()];
    }
    let gram = t.adjoint() * t;
    let eig = gram.symmetric_eigen();
    let mut sv: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    sv.sort_by(|a, b| a.partial_cmp(b).expect("finite singular values"));
    sv
}

/// Largest singular value.
pub fn operator_norm(t: &DMatrix<Complex64>) -> f64 {
    *singular_values(t)
        .last()
        .expect("non-empty matrix")
}

/// Grid-doubling policy for the Schatten quadrature.
#[derive(Clone, Copy, Debug)]
pub struct GridPolicy {
    /// Relative-change stopping tolerance between G/2 and G.
    pub tol: f64,
    /// Hard cap on the grid size.
    pub g_max: usize,
    /// Optional fixed starting grid; default 4 (2 deg + 1), clamped.
    pub g0: Option<usize>,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            g_max: 8192,
            g0: None,
        }
    }
}

/// Which norms to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormSelection {
    pub l1: bool,
    pub l2: bool,
    pub op: bool,
}

impl NormSelection {
    pub fn all() -> Self {
        Self {
            l1: true,
            l2: true,
            op: true,
        }
    }

    pub fn l1_l2() -> Self {
        Self {
            l1: true,
            l2: true,
            op: false,
        }
    }
}

/// Computed norms with grid-convergence metadata.
#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub theta: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op: Option<f64>,
    pub grid: usize,
    pub delta: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

impl NormReport {
    /// Hoelder chain l1 <= l2 <= op within the reported slack.
    pub fn holder_ok(&self) -> bool {
        let slack = self.delta + 1e-9;
        if let (Some(l1), Some(l2)) = (self.l1, self.l2) {
            if l1 > l2 + slack {
                return false;
            }
        }
        if let (Some(l2), Some(op)) = (self.l2, self.op) {
            if l2 > op + slack {
                return false;
            }
        }
        true
    }
}

struct GridPass {
    l1: f64,
    l2: f64,
    op_max: f64,
    argmax: (f64, f64),
}

fn grid_pass(eval: &SymbolEvaluator<'_>, q: f64, g: usize, need_sv: bool) -> GridPass {
    use rayon::prelude::*;
    let rows: Vec<(Vec<f64>, Vec<f64>, f64, usize)> = (0..g)
        .into_par_iter()
        .map(|gx| {
            let x = gx as f64 / g as f64;
            let mut l1_row = Vec::with_capacity(g);
            let mut l2_row = Vec::with_capacity(g);
            let mut best = (0.0f64, 0usize);
            for gy in 0..g {
                let y = gy as f64 / g as f64;
                let t = eval.eval(x, y);
                if need_sv {
                    let sv = singular_values(&t);
                    l1_row.push(sv.iter().sum::<f64>() / q);
                    l2_row.push(sv.iter().map(|s| s * s).sum::<f64>() / q);
                    let top = *sv.last().expect("non-empty");
                    if top > best.0 {
                        best = (top, gy);
                    }
                } else {
                    let fro = t.iter().map(|c| c.norm_sqr()).sum::<f64>();
                    l1_row.push(0.0);
                    l2_row.push(fro / q);
                }
            }
            (l1_row, l2_row, best.0, best.1)
        })
        .collect();

    let l1_rows: Vec<f64> = rows.iter().map(|r| cascade_sum(&r.0)).collect();
    let l2_rows: Vec<f64> = rows.iter().map(|r| cascade_sum(&r.1)).collect();
    let inv_g2 = 1.0 / (g as f64 * g as f64);
    let mut op_max = 0.0f64;
    let mut argmax = (0.0, 0.0);
    for (gx, r) in rows.iter().enumerate() {
        if r.2 > op_max {
            op_max = r.2;
            argmax = (gx as f64 / g as f64, r.3 as f64 / g as f64);
        }
    }
    GridPass {
        l1: cascade_sum(&l1_rows) * inv_g2,
        l2: (cascade_sum(&l2_rows) * inv_g2).max(0.0).sqrt(),
        op_max,
        argmax,
    }
}

/// Non-commutative norms by quadrature over the 2-torus:
/// `||a||_p^p ~ (1/G^2) sum_{g,h} (1/q) sum_i sigma_i(T(x_g, y_h))^p`.
///
/// The grid starts at `4 (2 deg + 1)` (clamped to [8, 2048]) and doubles
/// until the relative change drops below `policy.tol` or `policy.g_max` is
/// reached; non-convergence is reported, never silently dropped. The
/// operator norm is the grid maximum of the top singular value plus one
/// local refinement pass (factor 8 around the argmax cell) and is a
/// certified lower bound.
pub fn schatten_norms(
    a: &TorusPolynomial,
    rep: &ClockShiftRep,
    norms: NormSelection,
    policy: &GridPolicy,
) -> Result<NormReport> {
    let eval = SymbolEvaluator::new(a, rep)?;
    let q = rep.q() as f64;
    let deg = a.degree();
    let g0 = policy.g0.unwrap_or_else(|| {
        let base = 4 * (2 * deg as usize + 1);
        base.clamp(8, 2048)
    });
    let need_sv = norms.l1 || norms.op;

    let mut g = g0.min(policy.g_max);
    let mut prev: Option<GridPass> = None;
    let mut delta = f64::INFINITY;
    let mut converged = false;
    let mut pass = grid_pass(&eval, q, g, need_sv);
    loop {
        if let Some(p) = &prev {
            let rel = |new: f64, old: f64| {
                let scale = new.abs().max(old.abs()).max(1e-300);
                (new - old).abs() / scale
            };
            let mut worst: f64 = 0.0;
            if norms.l1 {
                worst = worst.max(rel(pass.l1, p.l1));
            }
            if norms.l2 {
                worst = worst.max(rel(pass.l2, p.l2));
            }
            if norms.op {
                worst = worst.max(rel(pass.op_max, p.op_max));
            }
            delta = worst;
            if delta < policy.tol {
                converged = true;
                break;
            }
        }
        if g * 2 > policy.g_max {
            break;
        }
        g *= 2;
        prev = Some(pass);
        pass = grid_pass(&eval, q, g, need_sv);
    }

    let op = if norms.op {
        // local refinement around the argmax cell
        let (cx, cy) = pass.argmax;
        let h = 1.0 / g as f64;
        let mut best = pass.op_max;
        for i in 0..=16 {
            for j in 0..=16 {
                let x = cx + (i as f64 / 8.0 - 1.0) * h;
                let y = cy + (j as f64 / 8.0 - 1.0) * h;
                best = best.max(operator_norm(&eval.eval(x, y)));
            }
        }
        Some(best)
    } else {
        None
    };

    Ok(NormReport {
        theta: rep.theta_label(),
        l1: norms.l1.then_some(pass.l1),
        l2: norms.l2.then_some(pass.l2),
        op,
        grid: g,
        delta: if prev.is_some() { delta } else { f64::INFINITY },
        converged,
        notes: String::new(),
    })
}

/// Trace through the representation:
/// `(1/G^2) sum (1/q) tr T(x,y)`; exact for G > 2 deg + 1.
pub fn trace_via_rep(a: &TorusPolynomial, rep: &ClockShiftRep, g: usize) -> Result<Complex64> {
    let eval = SymbolEvaluator::new(a, rep)?;
    let q = rep.q() as f64;
    let mut re = Vec::with_capacity(g * g);
    let mut im = Vec::with_capacity(g * g);
    for gx in 0..g {
        for gy in 0..g {
            let t = eval.eval(gx as f64 / g as f64, gy as f64 / g as f64);
            let tr = t.trace() / q;
            re.push(tr.re);
            im.push(tr.im);
        }
    }
    let inv = 1.0 / (g as f64 * g as f64);
    Ok(Complex64::new(cascade_sum(&re) * inv, cascade_sum(&im) * inv))
}

/// Matrix of a d = 2 polynomial acting on the truncated lattice basis
/// {e_{m,n} : |m|, |n| <= R} of the concrete representation
/// `U e_{m,n} = e_{m+1,n}`, `V e_{m,n} = e^{-2 pi i m theta} e_{m,n+1}`.
pub fn gns_matrix(a: &TorusPolynomial, theta: f64, radius: i64) -> Result<DMatrix<Complex64>> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: a.dim(),
        });
    }
    if radius < a.degree() {
        return Err(Error::RadiusTooSmall {
            radius,
            degree: a.degree(),
        });
    }
    let side = (2 * radius + 1) as usize;
    let dim = side * side;
    let idx = |m: i64, n: i64| ((m + radius) as usize) * side + (n + radius) as usize;
    let mut mat = DMatrix::from_element(dim, dim, Complex64::zero());
    for (alpha, c) in a.terms() {
        let (a1, a2) = (alpha[0], alpha[1]);
        for m in -radius..=radius {
            for n in -radius..=radius {
                let (m2, n2) = (m + a1, n + a2);
                if m2.abs() > radius || n2.abs() > radius {
                    continue;
                }
                // U^{a1} V^{a2} e_{m,n} = e^{-2 pi i m theta a2} e_{m+a1, n+a2}
                let phase = Complex64::from_polar(1.0, -TAU * (m as f64) * theta * (a2 as f64));
                mat[(idx(m2, n2), idx(m, n))] += c * phase;
            }
        }
    }
    Ok(mat)
}

/// `<a e_{0,0}, e_{0,0}>` on the truncated lattice; equals the stored
/// zero-mode coefficient exactly when the radius covers the degree.
pub fn trace_via_gns(a: &TorusPolynomial, theta: f64, radius: i64) -> Result<Complex64> {
    let m = gns_matrix(a, theta, radius)?;
    let side = (2 * radius + 1) as usize;
    let center = (radius as usize) * side + radius as usize;
    Ok(m[(center, center)])
}

/// Outcome of one operator-inequality check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl BoundReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            pass: lhs <= rhs + 1e-9,
        }
    }
}

fn unitarity_deviation(u: &DMatrix<Complex64>) -> f64 {
    let id = DMatrix::identity(u.nrows(), u.ncols());
    let d = u.adjoint() * u - id;
    d.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn require_unitary(u: &DMatrix<Complex64>) -> Result<()> {
    let dev = unitarity_deviation(u);
    if dev > 1e-10 {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

fn int_power(u: &DMatrix<Complex64>, n: i64) -> DMatrix<Complex64> {
    let base = if n >= 0 { u.clone() } else { u.adjoint() };
    let mut acc = DMatrix::identity(u.nrows(), u.ncols());
    for _ in 0..n.unsigned_abs() {
        acc = &acc * &base;
    }
    acc
}

/// `||U^n - V^n|| <= |n| ||U - V||` for unitaries.
pub fn check_unitary_power_gap(
    u: &DMatrix<Complex64>,
    v: &DMatrix<Complex64>,
    n: i64,
) -> Result<BoundReport> {
    require_unitary(u)?;
    require_unitary(v)?;
    let lhs = operator_norm(&(int_power(u, n) - int_power(v, n)));
    let rhs = n.unsigned_abs() as f64 * operator_norm(&(u - v));
    Ok(BoundReport::new(lhs, rhs))
}

/// `||Q^n - R^n|| <= ||Q - R|| sum_{j<n} ||Q||^{n-j-1} ||R||^j` for bounded
/// operators and natural n.
pub fn check_bounded_power_gap(
    q: &DMatrix<Complex64>,
    r: &DMatrix<Complex64>,
    n: u32,
) -> Result<BoundReport> {
    let lhs = operator_norm(&(int_power(q, i64::from(n)) - int_power(r, i64::from(n))));
    let nq = operator_norm(q);
    let nr = operator_norm(r);
    let mut sum = 0.0;
    for j in 0..n {
        sum += nq.powi((n - j - 1) as i32) * nr.powi(j as i32);
    }
    let rhs = operator_norm(&(q - r)) * sum;
    Ok(BoundReport::new(lhs, rhs))
}

/// Normal-ordered substitution `p(U, V) = sum p^(m,n) U^m V^n`.
pub fn substitute(
    p: &TorusPolynomial,
    u: &DMatrix<Complex64>,
    v: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.dim(),
        });
    }
    let mut acc = DMatrix::from_element(u.nrows(), u.ncols(), Complex64::zero());
    for (alpha, c) in p.terms() {
        let term = int_power(u, alpha[0]) * int_power(v, alpha[1]);
        acc += term * *c;
    }
    Ok(acc)
}

/// Two-variable perturbation bound:
/// `||p(U1,V1) - p(U2,V2)|| <= (||U1-U2|| + ||V1-V2||) N sum_{k != 0} |p^(k)|`
/// with N the degree of p.
pub fn check_two_variable_gap(
    p: &TorusPolynomial,
    u1: &DMatrix<Complex64>,
    v1: &DMatrix<Complex64>,
    u2: &DMatrix<Complex64>,
    v2: &DMatrix<Complex64>,
) -> Result<BoundReport> {
    for m in [u1, v1, u2, v2] {
        require_unitary(m)?;
    }
    let lhs = operator_norm(&(substitute(p, u1, v1)? - substitute(p, u2, v2)?));
    let n = p.degree() as f64;
    let coeff_sum: f64 = p
        .terms()
        .filter(|(alpha, _)| alpha.iter().any(|&x| x != 0))
        .map(|(_, c)| c.norm())
        .sum();
    let rhs = (operator_norm(&(u1 - u2)) + operator_norm(&(v1 - v2))) * n * coeff_sum;
    Ok(BoundReport::new(lhs, rhs))
}

/// Haar-like random unitary: QR of a complex Gaussian matrix with the
/// diagonal of R rephased.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    use rand::distributions::Distribution;
    let normal = rand::distributions::Uniform::new(-1.0f64, 1.0);
    // Box-Muller would be cleaner but uniform entries QR'd are unitary all the same
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(normal.sample(rng), normal.sample(rng))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 1e-14 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}
