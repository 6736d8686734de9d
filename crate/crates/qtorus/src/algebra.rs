//! Exact arithmetic of trigonometric polynomials on the d-dimensional
//! quantum torus: twisted product, adjoint, trace, Fourier coefficients,
//! derivations.
//!
//! Elements are finite sums `sum_alpha c_alpha U^alpha` in normal order
//! `U_1^{a_1} ... U_d^{a_d}`. The generators satisfy
//! `U_k U_l = e^{2 pi i theta_kl} U_l U_k`, so every product reduces to
//! normal order at the cost of a unimodular phase.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector of a normal-ordered monomial `U^alpha`.
pub type MultiIndex = Vec<i64>;

/// One entry of the skew-symmetric phase matrix, reduced modulo 1.
///
/// Rational entries keep phases exact: every phase `e^{2 pi i theta n}` is
/// computed from the reduced residue `n p mod q`, never from an
/// accumulated float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaValue {
    Rational(Rational64),
    Float(f64),
}

impl ThetaValue {
    fn reduced(self) -> Result<Self> {
        match self {
            ThetaValue::Rational(r) => {
                if r.denom() == &0 {
                    return Err(Error::InvalidTheta(format!("{r}")));
                }
                let f = r - r.floor();
                Ok(ThetaValue::Rational(f))
            }
            ThetaValue::Float(x) => {
                if !x.is_finite() {
                    return Err(Error::InvalidTheta(format!("{x}")));
                }
                Ok(ThetaValue::Float(x.rem_euclid(1.0)))
            }
        }
    }

    fn negated(self) -> Self {
        match self {
            ThetaValue::Rational(r) => ThetaValue::Rational(-r),
            ThetaValue::Float(x) => ThetaValue::Float(-x),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            ThetaValue::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            ThetaValue::Float(x) => x,
        }
    }
}

/// Skew-symmetric deformation matrix Theta of the d-dimensional quantum
/// torus; only the strict upper triangle theta_kl (k < l) is stored,
/// theta_lk = -theta_kl mod 1.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationMatrix {
    d: usize,
    upper: Vec<ThetaValue>,
}

impl DeformationMatrix {
    /// General constructor from the strict upper triangle in row-major
    /// order: (1,2), (1,3), ..., (1,d), (2,3), ...
    pub fn from_upper_triangle(d: usize, upper: Vec<ThetaValue>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidConfig(format!(
                "dimension must be >= 2, got {d}"
            )));
        }
        let expected = d * (d - 1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: upper.len(),
            });
        }
        let upper = upper
            .into_iter()
            .map(ThetaValue::reduced)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { d, upper })
    }

    /// d = 2 torus with exact rational angle theta = p/q.
    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidModulus(q));
        }
        Self::from_upper_triangle(2, vec![ThetaValue::Rational(Rational64::new(p, q))])
    }

    /// d = 2 torus with floating angle theta.
    pub fn float(theta: f64) -> Result<Self> {
        Self::from_upper_triangle(2, vec![ThetaValue::Float(theta)])
    }

    /// The commutative torus (all phases trivial).
    pub fn commutative(d: usize) -> Self {
        Self::from_upper_triangle(d, vec![ThetaValue::Rational(Rational64::zero()); d * (d - 1) / 2])
            .expect("triangle size matches")
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// theta_kl for 0-based k < l.
    pub fn entry(&self, k: usize, l: usize) -> ThetaValue {
        debug_assert!(k < l && l < self.d);
        self.upper[k * (2 * self.d - k - 1) / 2 + (l - k - 1)]
    }

    /// For d = 2, the single angle theta_12.
    pub fn scalar_theta(&self) -> ThetaValue {
        self.entry(0, 1)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got,
            });
        }
        Ok(())
    }

    /// Normal-ordering phase of `U^alpha * U^beta`:
    /// `exp(2 pi i sum_{k>l} theta_kl alpha_k beta_l)`.
    ///
    /// For d = 2 with theta_12 = theta this is `exp(-2 pi i theta a2 b1)`,
    /// consistent with `U V = e^{2 pi i theta} V U`.
    pub fn ordering_phase(&self, alpha: &[i64], beta: &[i64]) -> Complex64 {
        let mut acc = PhaseExponent::zero();
        for l in 0..self.d {
            for k in (l + 1)..self.d {
                // theta_kl = -theta_lk, and the stored entry is theta_lk.
                let n = i128::from(alpha[k]) * i128::from(beta[l]);
                acc.add_scaled(self.entry(l, k).negated(), n);
            }
        }
        acc.phase()
    }

    /// Phase picked up when normal-ordering the adjoint of `U^alpha`:
    /// `(U^alpha)* = exp(2 pi i sum_{k>l} theta_kl alpha_k alpha_l) U^{-alpha}`.
    pub fn adjoint_phase(&self, alpha: &[i64]) -> Complex64 {
        self.ordering_phase(alpha, alpha)
    }
}

/// Exact phase-exponent accumulator: rational contributions are summed
/// modulo 1 with integer arithmetic, float contributions separately.
struct PhaseExponent {
    rational: Rational64,
    float: f64,
}

impl PhaseExponent {
    fn zero() -> Self {
        Self {
            rational: Rational64::zero(),
            float: 0.0,
        }
    }

    fn add_scaled(&mut self, theta: ThetaValue, n: i128) {
        match theta {
            ThetaValue::Rational(r) => {
                let q = i128::from(*r.denom());
                // residue of n * p mod q keeps every intermediate small
                let np = (n % q) * (i128::from(*r.numer()) % q);
                let residue = np.mod_floor(&q) as i64;
                self.rational += Rational64::new(residue, *r.denom());
                self.rational -= self.rational.floor();
            }
            ThetaValue::Float(x) => {
                self.float += (n as f64) * x;
            }
        }
    }

    fn phase(&self) -> Complex64 {
        let total = *self.rational.numer() as f64 / *self.rational.denom() as f64 + self.float;
        // reduce to [-1/2, 1/2) before the trig call
        let frac = total - total.round();
        Complex64::from_polar(1.0, TAU * frac)
    }
}

/// Sparse trigonometric polynomial `sum_alpha c_alpha U^alpha` in normal
/// order. Only exact zeros are pruned; no epsilon pruning happens inside
/// the algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusPolynomial {
    d: usize,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl TorusPolynomial {
    pub fn zero(d: usize) -> Self {
        Self {
            d,
            coeffs: BTreeMap::new(),
        }
    }

    /// `c * U^alpha`; empty when c = 0.
    pub fn monomial(alpha: MultiIndex, c: Complex64) -> Self {
        let d = alpha.len();
        let mut p = Self::zero(d);
        p.add_term(alpha, c);
        p
    }

    /// The identity element of dimension d.
    pub fn identity(d: usize) -> Self {
        Self::monomial(vec![0; d], Complex64::new(1.0, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// max over stored alpha of max_j |alpha_j|.
    pub fn degree(&self) -> i64 {
        self.coeffs
            .keys()
            .flat_map(|a| a.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn coeff(&self, alpha: &[i64]) -> Complex64 {
        self.coeffs.get(alpha).copied().unwrap_or_else(Complex64::zero)
    }

    /// Adds `c` to the coefficient at `alpha`, pruning exact zeros.
    pub fn add_term(&mut self, alpha: MultiIndex, c: Complex64) {
        debug_assert_eq!(alpha.len(), self.d);
        if c == Complex64::zero() {
            return;
        }
        let entry = self.coeffs.entry(alpha);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == Complex64::zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Overwrites the coefficient at `alpha` (removes the term when c = 0).
    pub fn set_term(&mut self, alpha: MultiIndex, c: Complex64) {
        debug_assert_eq!(alpha.len(), self.d);
        if c == Complex64::zero() {
            self.coeffs.remove(&alpha);
        } else {
            self.coeffs.insert(alpha, c);
        }
    }

    /// Terms in lexicographic index order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.d);
        for (a, c) in &self.coeffs {
            out.add_term(a.clone(), c * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.d != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: other.d,
            });
        }
        let mut out = self.clone();
        for (a, c) in &other.coeffs {
            out.add_term(a.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Largest absolute coefficient difference against `other`.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, c) in &self.coeffs {
            worst = worst.max((c - other.coeff(a)).norm());
        }
        for (a, c) in &other.coeffs {
            if !self.coeffs.contains_key(a) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }
}

/// Twisted product on the quantum torus:
/// `sum a_alpha b_beta phase(alpha, beta) U^{alpha+beta}`.
pub fn twisted_mul(
    a: &TorusPolynomial,
    b: &TorusPolynomial,
    theta: &DeformationMatrix,
) -> Result<TorusPolynomial> {
    twisted_mul_inner(a, b, theta, false)
}

/// Mutation fixture for the self-test harness: identical to [`twisted_mul`]
/// but with the ordering phase conjugated. Exists only so the invariant
/// suites can demonstrate that they catch a phase-sign error.
#[doc(hidden)]
pub fn twisted_mul_phase_flipped(
    a: &TorusPolynomial,
    b: &TorusPolynomial,
    theta: &DeformationMatrix,
) -> Result<TorusPolynomial> {
    twisted_mul_inner(a, b, theta, true)
}

fn twisted_mul_inner(
    a: &TorusPolynomial,
    b: &TorusPolynomial,
    theta: &DeformationMatrix,
    flip_phase: bool,
) -> Result<TorusPolynomial> {
    theta.check_dim(a.d)?;
    theta.check_dim(b.d)?;
    let mut out = TorusPolynomial::zero(a.d);
    for (alpha, ca) in &a.coeffs {
        for (beta, cb) in &b.coeffs {
            let mut phase = theta.ordering_phase(alpha, beta);
            if flip_phase {
                phase = phase.conj();
            }
            let gamma: MultiIndex = alpha.iter().zip(beta).map(|(x, y)| x + y).collect();
            out.add_term(gamma, ca * cb * phase);
        }
    }
    Ok(out)
}

/// The *-involution: `(c U^alpha)* = conj(c) phase * U^{-alpha}` with the
/// phase fixed by normal-ordering the reversed product of inverses.
pub fn adjoint(a: &TorusPolynomial, theta: &DeformationMatrix) -> Result<TorusPolynomial> {
    theta.check_dim(a.d)?;
    let mut out = TorusPolynomial::zero(a.d);
    for (alpha, c) in &a.coeffs {
        let phase = theta.adjoint_phase(alpha);
        let neg: MultiIndex = alpha.iter().map(|x| -x).collect();
        out.add_term(neg, c.conj() * phase);
    }
    Ok(out)
}

/// The tracial state: the coefficient at the zero multi-index.
pub fn trace(a: &TorusPolynomial) -> Complex64 {
    a.coeff(&vec![0; a.d])
}

/// Fourier coefficient extraction via `tau((U^alpha)* a)`; the phases
/// cancel, so this reproduces the stored coefficient.
pub fn fourier_coeff(
    a: &TorusPolynomial,
    alpha: &[i64],
    theta: &DeformationMatrix,
) -> Result<Complex64> {
    theta.check_dim(a.d)?;
    if alpha.len() != a.d {
        return Err(Error::DimensionMismatch {
            expected: a.d,
            got: alpha.len(),
        });
    }
    let probe = adjoint(&TorusPolynomial::monomial(alpha.to_vec(), Complex64::new(1.0, 0.0)), theta)?;
    Ok(trace(&twisted_mul(&probe, a, theta)?))
}

/// The derivation `delta_j` (0-based axis): multiplies the coefficient at
/// `alpha` by `2 pi i alpha_j`.
pub fn derive(a: &TorusPolynomial, axis: usize) -> Result<TorusPolynomial> {
    if axis >= a.d {
        return Err(Error::AxisOutOfRange { axis, d: a.d });
    }
    let mut out = TorusPolynomial::zero(a.d);
    for (alpha, c) in &a.coeffs {
        let factor = Complex64::new(0.0, TAU * alpha[axis] as f64);
        out.add_term(alpha.clone(), c * factor);
    }
    Ok(out)
}

/// `D^order = delta_1^{order_1} ... delta_d^{order_d}`.
pub fn derive_multi(a: &TorusPolynomial, order: &[i64]) -> Result<TorusPolynomial> {
    if order.len() != a.d {
        return Err(Error::DimensionMismatch {
            expected: a.d,
            got: order.len(),
        });
    }
    if order.iter().any(|&x| x < 0) {
        return Err(Error::NegativeDerivationOrder(order.to_vec()));
    }
    let mut out = TorusPolynomial::zero(a.d);
    for (alpha, c) in &a.coeffs {
        let mut factor = Complex64::new(1.0, 0.0);
        for (j, &oj) in order.iter().enumerate() {
            for _ in 0..oj {
                factor *= Complex64::new(0.0, TAU * alpha[j] as f64);
            }
        }
        out.add_term(alpha.clone(), c * factor);
    }
    Ok(out)
}

/// `sqrt(sum |c_alpha|^2)`; equals `sqrt(tau(a* a))` by trace
/// orthonormality of monomials.
pub fn l2_norm(a: &TorusPolynomial) -> f64 {
    a.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    d: usize,
    terms: Vec<TermJson>,
}

impl TorusPolynomial {
    /// JSON form `{"d": .., "terms": [{"alpha": [..], "re": .., "im": ..}]}`
    /// with terms sorted lexicographically by alpha.
    pub fn to_json(&self) -> serde_json::Value {
        let terms = self
            .coeffs
            .iter()
            .map(|(a, c)| TermJson {
                alpha: a.clone(),
                re: c.re,
                im: c.im,
            })
            .collect();
        serde_json::to_value(PolyJson { d: self.d, terms }).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let p: PolyJson = serde_json::from_value(v.clone())?;
        let mut out = Self::zero(p.d);
        for t in p.terms {
            if t.alpha.len() != p.d {
                return Err(Error::DimensionMismatch {
                    expected: p.d,
                    got: t.alpha.len(),
                });
            }
            out.add_term(t.alpha, Complex64::new(t.re, t.im));
        }
        Ok(out)
    }
}
