//! Desk-scale experiment orchestration: the Ornstein norm sweep, the
//! theta -> 0 convergence table, the positivity scan, Weyl rescaling, and
//! the d-dimensional anisotropic construction.

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::algebra::{derive, DeformationMatrix, MultiIndex, TorusPolynomial};
use crate::error::{Error, Result};
use crate::reps::{
    schatten_norms, ClockShiftRep, GridPolicy, NormReport, NormSelection, SymbolEvaluator,
};
use crate::riesz::{
    modified_w, polys_beg, riesz_product, riesz_product_d, spectrum_sets, FrequencySchedule,
};
use crate::theta::FixedTheta;

/// A rotation angle pinned to a rational surrogate p/q for representation
/// purposes, with the label used in reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaPoint {
    pub p: i64,
    pub q: i64,
    pub label: String,
}

impl ThetaPoint {
    pub fn rational(p: i64, q: i64) -> Self {
        Self {
            p,
            q,
            label: format!("{p}/{q}"),
        }
    }

    /// Irrational input approached by its best convergent with q <= q_max;
    /// the convergent used is part of the label.
    pub fn from_fixed(theta: &FixedTheta, q_max: i64, label: &str) -> Self {
        let (p, q) = theta.convergent(q_max);
        Self {
            p,
            q,
            label: format!("{label}~{p}/{q}"),
        }
    }

    pub fn deformation(&self) -> Result<DeformationMatrix> {
        DeformationMatrix::rational(self.p, self.q)
    }

    pub fn rep(&self) -> Result<ClockShiftRep> {
        ClockShiftRep::new(self.p, self.q)
    }
}

/// Configuration of the Ornstein sweep.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub ratio: i64,
    pub n_max: usize,
    pub thetas: Vec<ThetaPoint>,
    pub grid: GridPolicy,
}

/// One row of the Ornstein sweep: L^1 norms of the mixed and pure second
/// derivatives of W plus the component polynomials.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentRecord {
    pub theta: String,
    pub n: usize,
    pub norm_d1d1: f64,
    pub norm_d2d2: f64,
    pub norm_d1d2: f64,
    pub norm_b: f64,
    pub norm_e: f64,
    pub norm_g: f64,
    pub norm_p: f64,
    pub grid: usize,
    pub delta: f64,
    pub converged: bool,
}

fn l1(
    a: &TorusPolynomial,
    rep: &ClockShiftRep,
    policy: &GridPolicy,
) -> Result<NormReport> {
    schatten_norms(a, rep, NormSelection { l1: true, l2: false, op: false }, policy)
}

/// Builds P, W, B, E, G for one (theta, N) cell and computes the seven
/// L^1 norms of the record.
pub fn sweep_cell(
    schedule: &FrequencySchedule,
    n: usize,
    theta: &ThetaPoint,
    policy: &GridPolicy,
) -> Result<ExperimentRecord> {
    let dm = theta.deformation()?;
    let rep = theta.rep()?;
    let p = riesz_product(schedule, n, &dm, None)?;
    let spectrum = spectrum_sets(schedule, n)?;
    let w = modified_w(&p, &spectrum)?;
    let (b, e, g) = polys_beg(&p, &spectrum)?;
    let d11 = derive(&derive(&w, 0)?, 0)?;
    let d22 = derive(&derive(&w, 1)?, 1)?;
    let d12 = derive(&derive(&w, 0)?, 1)?;

    let reports = [
        l1(&d11, &rep, policy)?,
        l1(&d22, &rep, policy)?,
        l1(&d12, &rep, policy)?,
        l1(&b, &rep, policy)?,
        l1(&e, &rep, policy)?,
        l1(&g, &rep, policy)?,
        l1(&p, &rep, policy)?,
    ];
    let grid = reports.iter().map(|r| r.grid).max().unwrap_or(0);
    let delta = reports.iter().map(|r| r.delta).fold(0.0f64, f64::max);
    let converged = reports.iter().all(|r| r.converged);
    Ok(ExperimentRecord {
        theta: theta.label.clone(),
        n,
        norm_d1d1: reports[0].l1.unwrap(),
        norm_d2d2: reports[1].l1.unwrap(),
        norm_d1d2: reports[2].l1.unwrap(),
        norm_b: reports[3].l1.unwrap(),
        norm_e: reports[4].l1.unwrap(),
        norm_g: reports[5].l1.unwrap(),
        norm_p: reports[6].l1.unwrap(),
        grid,
        delta,
        converged,
    })
}

/// Runs every (theta, N <= N_max) cell; records are sorted by (theta, N)
/// and non-converged cells are flagged, never dropped.
pub fn ornstein_sweep(config: &SweepConfig) -> Result<Vec<ExperimentRecord>> {
    let schedule = FrequencySchedule::geometric(config.ratio, config.n_max)?;
    let mut records = Vec::new();
    for theta in &config.thetas {
        for n in 1..=config.n_max {
            records.push(sweep_cell(&schedule, n, theta, &config.grid)?);
        }
    }
    records.sort_by(|a, b| a.theta.cmp(&b.theta).then(a.n.cmp(&b.n)));
    Ok(records)
}

/// Fixed-header CSV for the sweep; byte-deterministic for a given input.
pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out =
        String::from("theta,N,norm_d1d1,norm_d2d2,norm_d1d2,norm_B,norm_E,norm_G,norm_P,grid,delta,converged\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{},{:.6e},{}\n",
            r.theta,
            r.n,
            r.norm_d1d1,
            r.norm_d2d2,
            r.norm_d1d2,
            r.norm_b,
            r.norm_e,
            r.norm_g,
            r.norm_p,
            r.grid,
            r.delta,
            r.converged
        ));
    }
    out
}

/// One row of the theta -> 0 convergence table: gaps between the rational
/// surrogate norms at theta = 1/q and the commutative baseline.
#[derive(Clone, Debug, Serialize)]
pub struct ThetaTrendRow {
    pub q: i64,
    pub gap_p: f64,
    pub gap_d1d1: f64,
    pub gap_d2d2: f64,
    pub gap_d1d2: f64,
}

/// Gaps `| ||X_{1/q,N}||_{1,1/q} - ||X_N||_1 |` for X among P and the
/// three second derivatives of W, one row per q.
pub fn theta_convergence(
    schedule: &FrequencySchedule,
    n: usize,
    q_list: &[i64],
    policy: &GridPolicy,
) -> Result<Vec<ThetaTrendRow>> {
    let base = sweep_cell(schedule, n, &ThetaPoint::rational(0, 1), policy)?;
    let mut rows = Vec::new();
    for &q in q_list {
        let cell = sweep_cell(schedule, n, &ThetaPoint::rational(1, q), policy)?;
        rows.push(ThetaTrendRow {
            q,
            gap_p: (cell.norm_p - base.norm_p).abs(),
            gap_d1d1: (cell.norm_d1d1 - base.norm_d1d1).abs(),
            gap_d2d2: (cell.norm_d2d2 - base.norm_d2d2).abs(),
            gap_d1d2: (cell.norm_d1d2 - base.norm_d1d2).abs(),
        });
    }
    Ok(rows)
}

/// Result of the positivity scan.
#[derive(Clone, Debug, Serialize)]
pub struct PositivityReport {
    pub min_eigenvalue: f64,
    pub witness: (f64, f64),
    /// true when the input was not self-adjoint and its Hermitian part was
    /// scanned instead.
    pub hermitized: bool,
}

/// Minimum over the grid of the smallest eigenvalue of the Hermitian part
/// of T(x, y), with the witness point.
pub fn positivity_scan(
    a: &TorusPolynomial,
    rep: &ClockShiftRep,
    grid: usize,
) -> Result<PositivityReport> {
    use crate::algebra::adjoint;
    let dm = DeformationMatrix::rational(rep.p(), rep.q())?;
    let hermitized = a.max_coeff_distance(&adjoint(a, &dm)?) > 1e-12;
    let eval = SymbolEvaluator::new(a, rep)?;
    let mut min_eig = f64::INFINITY;
    let mut witness = (0.0, 0.0);
    for gx in 0..grid {
        let x = gx as f64 / grid as f64;
        for gy in 0..grid {
            let y = gy as f64 / grid as f64;
            let t = eval.eval(x, y);
            let herm = (&t + t.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = herm.symmetric_eigen();
            let low = eig
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if low < min_eig {
                min_eig = low;
                witness = (x, y);
            }
        }
    }
    Ok(PositivityReport {
        min_eigenvalue: min_eig,
        witness,
        hermitized,
    })
}

/// Outcome of the equidistribution rescaling search.
#[derive(Clone, Debug, Serialize)]
pub struct WeylReport {
    /// Smallest natural M with dist(M^2 theta, Z) < theta0.
    pub m0: u64,
    /// Signed representative of M0^2 theta mod 1.
    pub theta_tilde: f64,
    /// Rescaled generator exponents: U~ = U^{M0}, V~ = V^{M0}.
    pub generator_exponent: u64,
    /// Set when the input angle was exactly rational (degenerate case).
    pub rational_warning: bool,
}

/// Finds the smallest natural M0 with dist(M0^2 theta, Z) < theta0.
///
/// The walk keeps `M^2 theta mod 1` and `(2M+1) theta mod 1` in exact
/// 96-bit fixed point, so no precision is lost as M grows.
pub fn weyl_rescale(theta: &FixedTheta, theta0: f64, cap: u64) -> Result<WeylReport> {
    if !(0.0 < theta0 && theta0 < 0.5) {
        return Err(Error::InvalidConfig(format!(
            "theta0 must lie in (0, 1/2), got {theta0}"
        )));
    }
    let step2 = theta.wrapping_mul_int(2);
    let mut sq = *theta; // M^2 theta, starting at M = 1
    let mut odd = theta.wrapping_mul_int(3); // (2M+1) theta
    let mut m: u64 = 1;
    loop {
        if sq.dist_to_int() < theta0 {
            let report = WeylReport {
                m0: m,
                theta_tilde: sq.signed(),
                generator_exponent: m,
                rational_warning: theta.is_exactly_rational(),
            };
            // postcondition re-verified from scratch
            debug_assert!(theta.wrapping_mul_int(m * m).dist_to_int() < theta0);
            return Ok(report);
        }
        if m >= cap {
            return Err(Error::SearchCapExceeded(cap));
        }
        sq = sq.wrapping_add(&odd);
        odd = odd.wrapping_add(&step2);
        m += 1;
    }
}

/// Multi-index data of the anisotropic construction: derivative orders
/// alpha_1..alpha_n and beta, the weight vector Lambda and the parity
/// vector xi.
#[derive(Clone, Debug)]
pub struct AnisotropicSpec {
    pub d: usize,
    pub alphas: Vec<MultiIndex>,
    pub beta: MultiIndex,
    pub lambda: Vec<i64>,
    pub xi: Vec<u8>,
    pub theta: DeformationMatrix,
}

impl AnisotropicSpec {
    /// Checks the homogeneity and parity conditions.
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 || self.theta.dim() != self.d {
            return Err(Error::AnisotropicSpec(format!(
                "dimension mismatch: d = {}, Theta dim = {}",
                self.d,
                self.theta.dim()
            )));
        }
        for v in self.alphas.iter().chain(std::iter::once(&self.beta)) {
            if v.len() != self.d || v.iter().any(|&x| x < 0) {
                return Err(Error::AnisotropicSpec(format!(
                    "multi-indices must be non-negative of length {}: {v:?}",
                    self.d
                )));
            }
        }
        if self.lambda.len() != self.d || self.xi.len() != self.d {
            return Err(Error::AnisotropicSpec(
                "Lambda and xi must have length d".into(),
            ));
        }
        if self.lambda.iter().any(|&x| x < 1) {
            return Err(Error::AnisotropicSpec("Lambda must be strictly positive".into()));
        }
        if self.xi.iter().any(|&x| x > 1) {
            return Err(Error::AnisotropicSpec("xi entries must be 0 or 1".into()));
        }
        if self.alphas.is_empty() {
            return Err(Error::AnisotropicSpec("need at least one alpha_j".into()));
        }
        let dot = |a: &[i64], b: &[i64]| -> i64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        let dot_xi = |a: &[i64]| -> i64 {
            a.iter()
                .zip(&self.xi)
                .map(|(x, &y)| x * i64::from(y))
                .sum()
        };
        let target = dot(&self.beta, &self.lambda);
        for alpha in &self.alphas {
            if dot(alpha, &self.lambda) != target {
                return Err(Error::AnisotropicSpec(format!(
                    "<alpha, Lambda> = {} != <beta, Lambda> = {target} for alpha = {alpha:?}",
                    dot(alpha, &self.lambda)
                )));
            }
        }
        let a1_parity = dot_xi(&self.alphas[0]).mod_floor(&2);
        if dot_xi(&self.beta).mod_floor(&2) == a1_parity {
            return Err(Error::AnisotropicSpec(
                "<beta, xi> must differ from <alpha_1, xi> mod 2".into(),
            ));
        }
        for alpha in &self.alphas[1..] {
            if dot_xi(alpha).mod_floor(&2) != a1_parity {
                return Err(Error::AnisotropicSpec(format!(
                    "<alpha_j, xi> parity mismatch for alpha = {alpha:?}"
                )));
            }
        }
        Ok(())
    }
}

/// One coefficient table of the anisotropic report.
#[derive(Clone, Debug, Serialize)]
pub struct CoeffTable {
    pub order: MultiIndex,
    pub terms: serde_json::Value,
    /// Coefficient ell^1 norm: an upper bound for the L^1 norm.
    pub coeff_l1: f64,
}

/// Output of the anisotropic build.
#[derive(Clone, Debug, Serialize)]
pub struct AnisotropicReport {
    pub product: serde_json::Value,
    pub f: serde_json::Value,
    pub derivative_tables: Vec<CoeffTable>,
    pub beta_table: CoeffTable,
    /// Numerical L^1 norms (d = 2 with scalar rational theta only);
    /// otherwise the coefficient bounds above are the deliverable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerical_l1: Option<Vec<(String, f64)>>,
}

fn coeff_l1(a: &TorusPolynomial) -> f64 {
    a.terms().map(|(_, c)| c.norm()).sum()
}

/// Builds the d-dimensional Riesz product on frequency vectors
/// `m_k = m_k ((-1)^{k-1}, 1, ..., 1)` and the normalized polynomial f_N
/// with `f^(kappa) = P^(kappa) / prod_j (2 pi i kappa_j)^{alpha_{1,j}}`,
/// rescaled so that the coefficient bounds of the D^{alpha_j} f sum to 1.
pub fn anisotropic_build(
    spec: &AnisotropicSpec,
    schedule: &FrequencySchedule,
    n: usize,
) -> Result<AnisotropicReport> {
    use crate::algebra::derive_multi;
    spec.validate()?;
    let freqs: Vec<MultiIndex> = (1..=n)
        .map(|k| {
            let m = schedule.freq(k);
            let mut v = vec![m; spec.d];
            if k % 2 == 0 {
                v[0] = -m;
            }
            v
        })
        .collect();
    let p = riesz_product_d(&freqs, &spec.theta, None)?;

    // divide each coefficient by prod_j (2 pi i kappa_j)^{alpha_{1,j}}
    let alpha1 = &spec.alphas[0];
    let mut f = TorusPolynomial::zero(spec.d);
    for (kappa, c) in p.terms() {
        if kappa.iter().all(|&x| x == 0) {
            continue;
        }
        let mut div = Complex64::new(1.0, 0.0);
        for (j, &oj) in alpha1.iter().enumerate() {
            if oj == 0 {
                continue;
            }
            if kappa[j] == 0 {
                return Err(Error::AnisotropicSpec(format!(
                    "kappa = {kappa:?} has a zero component on the support of alpha_1"
                )));
            }
            for _ in 0..oj {
                div *= Complex64::new(0.0, std::f64::consts::TAU * kappa[j] as f64);
            }
        }
        f.add_term(kappa.clone(), c / div);
    }
    // normalize by the sum of the coefficient bounds of D^{alpha_j} f
    let mut denom = 0.0;
    for alpha in &spec.alphas {
        denom += coeff_l1(&derive_multi(&f, alpha)?);
    }
    if denom > 0.0 {
        f = f.scaled(Complex64::new(1.0 / denom, 0.0));
    }

    let mut derivative_tables = Vec::new();
    for alpha in &spec.alphas {
        let da = derive_multi(&f, alpha)?;
        derivative_tables.push(CoeffTable {
            order: alpha.clone(),
            terms: da.to_json(),
            coeff_l1: coeff_l1(&da),
        });
    }
    let db = derive_multi(&f, &spec.beta)?;
    let beta_table = CoeffTable {
        order: spec.beta.clone(),
        terms: db.to_json(),
        coeff_l1: coeff_l1(&db),
    };

    let numerical_l1 = if spec.d == 2 {
        if let crate::algebra::ThetaValue::Rational(r) = spec.theta.scalar_theta() {
            let rep = ClockShiftRep::new(*r.numer(), *r.denom())?;
            let policy = GridPolicy::default();
            let mut rows = Vec::new();
            for (alpha, table) in spec.alphas.iter().zip(&derivative_tables) {
                let da = TorusPolynomial::from_json(&table.terms)?;
                let _ = alpha;
                rows.push((
                    format!("D^{:?} f", table.order),
                    l1(&da, &rep, &policy)?.l1.unwrap(),
                ));
            }
            let dbp = TorusPolynomial::from_json(&beta_table.terms)?;
            rows.push((
                format!("D^{:?} f", beta_table.order),
                l1(&dbp, &rep, &policy)?.l1.unwrap(),
            ));
            Some(rows)
        } else {
            None
        }
    } else {
        None
    };

    Ok(AnisotropicReport {
        product: p.to_json(),
        f: f.to_json(),
        derivative_tables,
        beta_table,
        numerical_l1,
    })
}

/// Commutative scalar path evaluated directly on the grid; used as the
/// bit-compatibility oracle for the q = 1 representation.
pub fn commutative_l1_direct(a: &TorusPolynomial, g: usize) -> Result<f64> {
    use crate::reps::cascade_sum;
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: a.dim(),
        });
    }
    let rep = ClockShiftRep::new(0, 1)?;
    let eval = SymbolEvaluator::new(a, &rep)?;
    let mut rows = Vec::with_capacity(g);
    for gx in 0..g {
        let x = gx as f64 / g as f64;
        let vals: Vec<f64> = (0..g)
            .map(|gy| eval.eval(x, gy as f64 / g as f64)[(0, 0)].norm())
            .collect();
        rows.push(cascade_sum(&vals));
    }
    Ok(cascade_sum(&rows) / (g as f64 * g as f64))
}
