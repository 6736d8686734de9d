//! Frequency schedules, the combinatorial Riesz spectra M_j with weights
//! ||k||_0, non-commutative Riesz products, the modified products W, and
//! the derived polynomials B, E, G.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

use crate::algebra::{adjoint, twisted_mul, DeformationMatrix, MultiIndex, TorusPolynomial};
use crate::error::{Error, Result};

/// How a schedule was generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    /// m_j = ratio^{j-1}
    Geometric { ratio: i64 },
    /// m_1 = 1, m_{j+1} = 3^{2N} m_j
    ProofFaithful { n: usize },
    /// Explicit list, validated for lacunarity.
    Explicit,
}

/// Strictly increasing lacunary frequencies m_1 < m_2 < ... with
/// m_{j+1}/m_j >= 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencySchedule {
    kind: ScheduleKind,
    m: Vec<i64>,
}

impl FrequencySchedule {
    pub fn geometric(ratio: i64, n: usize) -> Result<Self> {
        if ratio < 3 {
            return Err(Error::RatioTooSmall(ratio));
        }
        if n == 0 {
            return Err(Error::EmptySchedule);
        }
        let mut m = Vec::with_capacity(n);
        let mut cur: i64 = 1;
        for j in 0..n {
            m.push(cur);
            if j + 1 < n {
                cur = cur.checked_mul(ratio).ok_or_else(|| {
                    Error::FrequencyOverflow(format!("ratio {ratio}, length {n}"))
                })?;
            }
        }
        Ok(Self {
            kind: ScheduleKind::Geometric { ratio },
            m,
        })
    }

    /// m_1 = 1 and m_{j+1} = 3^{2N} m_j, so m_j / m_{j+1} <= 3^{-2N}.
    pub fn proof_faithful(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySchedule);
        }
        let step = 3i64
            .checked_pow(
                u32::try_from(2 * n)
                    .map_err(|_| Error::FrequencyOverflow(format!("N = {n}")))?,
            )
            .ok_or_else(|| Error::FrequencyOverflow(format!("3^(2*{n})")))?;
        let mut m = Vec::with_capacity(n);
        let mut cur: i64 = 1;
        for j in 0..n {
            m.push(cur);
            if j + 1 < n {
                cur = cur
                    .checked_mul(step)
                    .ok_or_else(|| Error::FrequencyOverflow(format!("m_{} * 3^(2*{n})", j + 2)))?;
            }
        }
        Ok(Self {
            kind: ScheduleKind::ProofFaithful { n },
            m,
        })
    }

    /// Explicit frequencies; rejects non-lacunary lists.
    pub fn from_list(m: Vec<i64>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::EmptySchedule);
        }
        if m[0] < 1 {
            return Err(Error::InvalidConfig(format!("frequencies must be >= 1, got {}", m[0])));
        }
        for j in 1..m.len() {
            if m[j] < m[j - 1].saturating_mul(3) {
                return Err(Error::NotLacunary(j, j - 1));
            }
        }
        Ok(Self {
            kind: ScheduleKind::Explicit,
            m,
        })
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn frequencies(&self) -> &[i64] {
        &self.m
    }

    /// m_j, 1-based level.
    pub fn freq(&self, level: usize) -> i64 {
        self.m[level - 1]
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level == 0 || level > self.m.len() {
            return Err(Error::LevelOutOfRange {
                level,
                len: self.m.len(),
            });
        }
        Ok(())
    }
}

/// (-1)^{j-1} for 1-based level j.
fn level_sign(level: usize) -> i64 {
    if level % 2 == 1 {
        1
    } else {
        -1
    }
}

/// One element of M_j: the sign vector xi, the resulting frequency pair k
/// and its weight ||k||_0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumEntry {
    /// 1-based level j.
    pub level: usize,
    /// xi in {-1,0,1}^{j-1}.
    pub xi: Vec<i8>,
    /// k = ((-1)^{j-1} m_j, m_j) + sum_l xi_l ((-1)^{l-1} m_l, m_l).
    pub k: (i64, i64),
    /// ||k||_0 = 1 + sum |xi_l|.
    pub weight: u32,
}

/// All sets M_j for j = 1..n, with uniqueness of k verified.
#[derive(Clone, Debug)]
pub struct RieszSpectrum {
    schedule: FrequencySchedule,
    levels: usize,
    entries: Vec<SpectrumEntry>,
}

impl RieszSpectrum {
    pub fn schedule(&self) -> &FrequencySchedule {
        &self.schedule
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn entries_at_level(&self, level: usize) -> impl Iterator<Item = &SpectrumEntry> {
        self.entries.iter().filter(move |e| e.level == level)
    }

    /// Entry whose k equals `k` or `-k`, together with the sign.
    pub fn find(&self, k: (i64, i64)) -> Option<(&SpectrumEntry, i64)> {
        self.entries.iter().find_map(|e| {
            if e.k == k {
                Some((e, 1))
            } else if (-e.k.0, -e.k.1) == k {
                Some((e, -1))
            } else {
                None
            }
        })
    }

    /// CSV dump with header `j,xi,k1,k2,weight`; xi is rendered with one
    /// character per sign: '-' for -1, '0' for 0, '+' for 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,xi,k1,k2,weight\n");
        for e in &self.entries {
            let xi: String = e
                .xi
                .iter()
                .map(|&s| match s {
                    -1 => '-',
                    0 => '0',
                    _ => '+',
                })
                .collect();
            out.push_str(&format!("{},{},{},{},{}\n", e.level, xi, e.k.0, e.k.1, e.weight));
        }
        out
    }
}

/// Enumerates M_1, ..., M_n and verifies that distinct (j, xi) give
/// distinct k and that k_2 > 0 throughout.
pub fn spectrum_sets(schedule: &FrequencySchedule, n: usize) -> Result<RieszSpectrum> {
    schedule.check_level(n)?;
    let mut entries = Vec::new();
    for j in 1..=n {
        let mj = schedule.freq(j);
        let base = (level_sign(j) * mj, mj);
        let count = 3usize.pow(u32::try_from(j - 1).expect("small level"));
        for code in 0..count {
            let mut xi = Vec::with_capacity(j - 1);
            let mut rest = code;
            let mut k = base;
            for l in 1..j {
                let digit = (rest % 3) as i8 - 1;
                rest /= 3;
                xi.push(digit);
                let ml = schedule.freq(l);
                k.0 += i64::from(digit) * level_sign(l) * ml;
                k.1 += i64::from(digit) * ml;
            }
            let weight = 1 + xi.iter().map(|x| u32::from(x.unsigned_abs())).sum::<u32>();
            if k.1 <= 0 {
                return Err(Error::DuplicateSpectralIndex(k.0, k.1));
            }
            entries.push(SpectrumEntry {
                level: j,
                xi,
                k,
                weight,
            });
        }
    }
    // uniqueness of +-k across the whole spectrum
    let mut seen = std::collections::BTreeSet::new();
    for e in &entries {
        if !seen.insert(e.k) || seen.contains(&(-e.k.0, -e.k.1)) {
            return Err(Error::DuplicateSpectralIndex(e.k.0, e.k.1));
        }
    }
    Ok(RieszSpectrum {
        schedule: schedule.clone(),
        levels: n,
        entries,
    })
}

/// The factor `p_{theta,j} = I + (a/2)(U^{s m_j} V^{m_j} + V^{-m_j} U^{-s m_j})`
/// with s = (-1)^{j-1}, expressed in normal order.
pub fn riesz_factor(
    level: usize,
    schedule: &FrequencySchedule,
    theta: &DeformationMatrix,
    amplitude: f64,
) -> Result<TorusPolynomial> {
    schedule.check_level(level)?;
    let m = schedule.freq(level);
    let s = level_sign(level);
    riesz_factor_general(s * m, m, theta, amplitude)
}

/// General-definition factor `I + (a/2)(U^m V^n + V^{-n} U^{-m})`.
pub fn riesz_factor_general(
    m: i64,
    n: i64,
    theta: &DeformationMatrix,
    amplitude: f64,
) -> Result<TorusPolynomial> {
    if amplitude.abs() > 1.0 {
        return Err(Error::AmplitudeOutOfRange(amplitude));
    }
    let half = Complex64::new(amplitude / 2.0, 0.0);
    let mut p = TorusPolynomial::identity(2);
    p = p.add(&TorusPolynomial::monomial(vec![m, n], half))?;
    // V^{-n} U^{-m} picks up its normal-ordering phase from the algebra
    let v_neg = TorusPolynomial::monomial(vec![0, -n], half);
    let u_neg = TorusPolynomial::monomial(vec![-m, 0], Complex64::new(1.0, 0.0));
    p = p.add(&twisted_mul(&v_neg, &u_neg, theta)?)?;
    Ok(p)
}

/// `P_{theta,n} = p_{theta,n} p_{theta,n-1} ... p_{theta,1}` with each new
/// factor multiplied on the left.
pub fn riesz_product(
    schedule: &FrequencySchedule,
    n: usize,
    theta: &DeformationMatrix,
    amplitudes: Option<&[f64]>,
) -> Result<TorusPolynomial> {
    schedule.check_level(n)?;
    if let Some(a) = amplitudes {
        if a.len() < n {
            return Err(Error::InvalidConfig(format!(
                "need {n} amplitudes, got {}",
                a.len()
            )));
        }
    }
    let mut p = TorusPolynomial::identity(2);
    for j in 1..=n {
        let a = amplitudes.map_or(1.0, |a| a[j - 1]);
        let factor = riesz_factor(j, schedule, theta, a)?;
        p = twisted_mul(&factor, &p, theta)?;
    }
    Ok(p)
}

/// Right-multiplied variant `p_1 p_2 ... p_n`; kept as a regression guard
/// for the factor ordering.
pub fn riesz_product_right(
    schedule: &FrequencySchedule,
    n: usize,
    theta: &DeformationMatrix,
) -> Result<TorusPolynomial> {
    schedule.check_level(n)?;
    let mut p = TorusPolynomial::identity(2);
    for j in 1..=n {
        let factor = riesz_factor(j, schedule, theta, 1.0)?;
        p = twisted_mul(&p, &factor, theta)?;
    }
    Ok(p)
}

/// d-dimensional Riesz product over frequency vectors m_1, ..., m_n:
/// factors `I + (a_k/2)(U^{m_k} + (U^{m_k})^{-1})`, new factors on the left.
pub fn riesz_product_d(
    freqs: &[MultiIndex],
    theta: &DeformationMatrix,
    amplitudes: Option<&[f64]>,
) -> Result<TorusPolynomial> {
    let d = theta.dim();
    let mut p = TorusPolynomial::identity(d);
    for (idx, m) in freqs.iter().enumerate() {
        if m.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m.len(),
            });
        }
        let a = amplitudes.map_or(1.0, |a| a[idx]);
        if a.abs() > 1.0 {
            return Err(Error::AmplitudeOutOfRange(a));
        }
        let half = Complex64::new(a / 2.0, 0.0);
        let mono = TorusPolynomial::monomial(m.clone(), half);
        let inv = adjoint(&mono, theta)?;
        let factor = TorusPolynomial::identity(d).add(&mono)?.add(&inv)?;
        p = twisted_mul(&factor, &p, theta)?;
    }
    Ok(p)
}

const W_SCALE: f64 = 1.0 / (4.0 * PI * PI);

/// The modified product W: coefficient `-(1/4 pi^2) k_2^{-2} P^(+-k)` at
/// +-k for every k in the spectrum, zero at the origin.
///
/// Errors when P has support outside {0} union +-M_j.
pub fn modified_w(p: &TorusPolynomial, spectrum: &RieszSpectrum) -> Result<TorusPolynomial> {
    check_support(p, spectrum)?;
    let mut w = TorusPolynomial::zero(2);
    for e in spectrum.entries() {
        let (k1, k2) = e.k;
        assert!(k2 > 0);
        let scale = Complex64::new(-W_SCALE / ((k2 * k2) as f64), 0.0);
        let plus = p.coeff(&[k1, k2]);
        let minus = p.coeff(&[-k1, -k2]);
        w.add_term(vec![k1, k2], scale * plus);
        w.add_term(vec![-k1, -k2], scale * minus);
    }
    Ok(w)
}

/// The auxiliary polynomials of the derivative identities:
/// `B^(k) = ((k1/k2)^2 - 1) P^(k)`, `E^(k) = (k1/k2 - (-1)^{j-1}) P^(k)`,
/// `G^(k) = (-1)^{j-1} P^(k)` for k in +-M_j.
pub fn polys_beg(
    p: &TorusPolynomial,
    spectrum: &RieszSpectrum,
) -> Result<(TorusPolynomial, TorusPolynomial, TorusPolynomial)> {
    check_support(p, spectrum)?;
    let mut b = TorusPolynomial::zero(2);
    let mut e_poly = TorusPolynomial::zero(2);
    let mut g = TorusPolynomial::zero(2);
    for e in spectrum.entries() {
        let (k1, k2) = e.k;
        assert!(k2 != 0);
        let ratio = k1 as f64 / k2 as f64;
        let sign = level_sign(e.level) as f64;
        for s in [1i64, -1] {
            let idx = vec![s * k1, s * k2];
            let phat = p.coeff(&idx);
            if phat == Complex64::zero() {
                continue;
            }
            b.add_term(idx.clone(), phat * (ratio * ratio - 1.0));
            e_poly.add_term(idx.clone(), phat * (ratio - sign));
            g.add_term(idx, phat * sign);
        }
    }
    Ok((b, e_poly, g))
}

fn check_support(p: &TorusPolynomial, spectrum: &RieszSpectrum) -> Result<()> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.dim(),
        });
    }
    for (alpha, _) in p.terms() {
        if alpha.iter().all(|&x| x == 0) {
            continue;
        }
        if spectrum.find((alpha[0], alpha[1])).is_none() {
            return Err(Error::SpectrumMismatch(alpha.clone()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{derive, trace};
    use std::f64::consts::TAU;

    #[test]
    fn schedules() {
        let g = FrequencySchedule::geometric(3, 5).unwrap();
        assert_eq!(g.frequencies(), &[1, 3, 9, 27, 81]);
        let pf = FrequencySchedule::proof_faithful(2).unwrap();
        assert_eq!(pf.frequencies(), &[1, 81]);
        assert!(matches!(
            FrequencySchedule::geometric(2, 4),
            Err(Error::RatioTooSmall(2))
        ));
        assert!(matches!(
            FrequencySchedule::proof_faithful(5),
            Err(Error::FrequencyOverflow(_))
        ));
        assert!(FrequencySchedule::from_list(vec![1, 2]).is_err());
        assert!(FrequencySchedule::from_list(vec![1, 4]).is_ok());
    }

    #[test]
    fn spectrum_small_examples() {
        // m = (1,3), level 2: (-3,3) + xi (1,1)
        let s = spectrum_sets(&FrequencySchedule::geometric(3, 2).unwrap(), 2).unwrap();
        let lvl1: Vec<_> = s.entries_at_level(1).collect();
        assert_eq!(lvl1.len(), 1);
        assert_eq!(lvl1[0].k, (1, 1));
        assert_eq!(lvl1[0].weight, 1);
        let mut lvl2: Vec<_> = s.entries_at_level(2).map(|e| (e.k, e.weight)).collect();
        lvl2.sort();
        assert_eq!(lvl2, vec![((-4, 2), 2), ((-3, 3), 1), ((-2, 4), 2)]);
        assert_eq!(s.entries().len(), (3usize.pow(2) - 1) / 2);
    }

    #[test]
    fn spectrum_weight_three_example() {
        // m = (1,3,9): k = (9,9) + (-1)(-3,3) + (1)(1,1) = (13,7), weight 3
        let s = spectrum_sets(&FrequencySchedule::geometric(3, 3).unwrap(), 3).unwrap();
        let hit = s
            .entries_at_level(3)
            .find(|e| e.xi == vec![1, -1])
            .unwrap();
        assert_eq!(hit.k, (13, 7));
        assert_eq!(hit.weight, 3);
        for j in 1..=3 {
            assert_eq!(s.entries_at_level(j).count(), 3usize.pow(j as u32 - 1));
        }
    }

    #[test]
    fn factor_commutative() {
        let th = DeformationMatrix::commutative(2);
        let sched = FrequencySchedule::geometric(3, 1).unwrap();
        let p = riesz_factor(1, &sched, &th, 1.0).unwrap();
        assert_eq!(p.coeff(&[0, 0]), Complex64::new(1.0, 0.0));
        assert_eq!(p.coeff(&[1, 1]), Complex64::new(0.5, 0.0));
        assert_eq!(p.coeff(&[-1, -1]), Complex64::new(0.5, 0.0));
        assert!(riesz_factor(1, &sched, &th, 1.5).is_err());
    }

    #[test]
    fn factor_phase_quarter() {
        // theta = 1/4: coefficient at (-1,-1) is (1/2) e^{-2 pi i theta}
        let th = DeformationMatrix::rational(1, 4).unwrap();
        let sched = FrequencySchedule::geometric(3, 1).unwrap();
        let p = riesz_factor(1, &sched, &th, 1.0).unwrap();
        let expect = Complex64::from_polar(0.5, -TAU / 4.0);
        assert!((p.coeff(&[-1, -1]) - expect).norm() < 1e-15);
    }

    #[test]
    fn factor_self_adjoint() {
        for (p, q) in [(1, 3), (2, 7), (0, 1)] {
            let th = DeformationMatrix::rational(p, q).unwrap();
            let sched = FrequencySchedule::geometric(3, 4).unwrap();
            for j in 1..=4 {
                let f = riesz_factor(j, &sched, &th, 1.0).unwrap();
                let fs = adjoint(&f, &th).unwrap();
                assert!(f.max_coeff_distance(&fs) < 1e-14, "j={j} theta={p}/{q}");
            }
        }
    }

    #[test]
    fn product_matches_commutative_law() {
        let th = DeformationMatrix::commutative(2);
        let sched = FrequencySchedule::geometric(3, 3).unwrap();
        let p = riesz_product(&sched, 3, &th, None).unwrap();
        let spec = spectrum_sets(&sched, 3).unwrap();
        assert!((trace(&p) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        for e in spec.entries() {
            for s in [1i64, -1] {
                let c = p.coeff(&[s * e.k.0, s * e.k.1]);
                let expect = 2f64.powi(-(e.weight as i32));
                assert!(
                    (c - Complex64::new(expect, 0.0)).norm() < 1e-13,
                    "k={:?} c={c}",
                    e.k
                );
            }
        }
        assert_eq!(p.num_terms(), spec.entries().len() * 2 + 1);
    }

    #[test]
    fn magnitude_law_nonzero_theta() {
        let th = DeformationMatrix::rational(1, 5).unwrap();
        let sched = FrequencySchedule::geometric(3, 3).unwrap();
        let p = riesz_product(&sched, 3, &th, None).unwrap();
        let spec = spectrum_sets(&sched, 3).unwrap();
        for e in spec.entries() {
            for s in [1i64, -1] {
                let c = p.coeff(&[s * e.k.0, s * e.k.1]);
                let expect = 2f64.powi(-(e.weight as i32));
                assert!((c.norm() - expect).abs() < 1e-13, "k={:?}", e.k);
            }
        }
    }

    #[test]
    fn left_order_differs_from_right() {
        let th = DeformationMatrix::rational(1, 5).unwrap();
        let sched = FrequencySchedule::geometric(3, 2).unwrap();
        let left = riesz_product(&sched, 2, &th, None).unwrap();
        let right = riesz_product_right(&sched, 2, &th).unwrap();
        assert!(left.max_coeff_distance(&right) > 1e-6);
    }

    #[test]
    fn w_level_one_hand_value() {
        // theta = 0, N = 1, m1 = 1: W^(1,1) = -1/(8 pi^2)
        let th = DeformationMatrix::commutative(2);
        let sched = FrequencySchedule::geometric(3, 1).unwrap();
        let p = riesz_product(&sched, 1, &th, None).unwrap();
        let spec = spectrum_sets(&sched, 1).unwrap();
        let w = modified_w(&p, &spec).unwrap();
        let expect = -1.0 / (8.0 * PI * PI);
        assert!((w.coeff(&[1, 1]) - Complex64::new(expect, 0.0)).norm() < 1e-15);
        assert_eq!(trace(&w), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn derivative_identities() {
        for theta in [
            DeformationMatrix::commutative(2),
            DeformationMatrix::rational(1, 3).unwrap(),
            DeformationMatrix::rational(1, 5).unwrap(),
            DeformationMatrix::float(0.41421356237309515).unwrap(),
        ] {
            for n in 1..=3 {
                let sched = FrequencySchedule::geometric(3, n).unwrap();
                let p = riesz_product(&sched, n, &theta, None).unwrap();
                let spec = spectrum_sets(&sched, n).unwrap();
                let w = modified_w(&p, &spec).unwrap();
                let (b, e, g) = polys_beg(&p, &spec).unwrap();
                let id = TorusPolynomial::identity(2);

                let d22 = derive(&derive(&w, 1).unwrap(), 1).unwrap();
                let p_minus_i = p.sub(&id).unwrap();
                assert!(d22.max_coeff_distance(&p_minus_i) < 1e-12, "n={n}");

                let d11 = derive(&derive(&w, 0).unwrap(), 0).unwrap();
                let rhs = b.add(&p_minus_i).unwrap();
                assert!(d11.max_coeff_distance(&rhs) < 1e-12, "n={n}");

                let d12 = derive(&derive(&w, 0).unwrap(), 1).unwrap();
                let rhs = e.add(&g).unwrap();
                assert!(d12.max_coeff_distance(&rhs) < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn beg_level_one_trivial() {
        let th = DeformationMatrix::rational(1, 7).unwrap();
        let sched = FrequencySchedule::geometric(3, 1).unwrap();
        let p = riesz_product(&sched, 1, &th, None).unwrap();
        let spec = spectrum_sets(&sched, 1).unwrap();
        let (b, e, g) = polys_beg(&p, &spec).unwrap();
        assert!(b.is_zero());
        assert!(e.is_zero());
        assert!((g.coeff(&[1, 1]) - p.coeff(&[1, 1])).norm() < 1e-15);
    }

    #[test]
    fn support_mismatch_detected() {
        let th = DeformationMatrix::commutative(2);
        let sched = FrequencySchedule::geometric(3, 2).unwrap();
        let spec = spectrum_sets(&sched, 2).unwrap();
        let mut p = riesz_product(&sched, 2, &th, None).unwrap();
        p.add_term(vec![7, 7], Complex64::new(0.1, 0.0));
        assert!(matches!(modified_w(&p, &spec), Err(Error::SpectrumMismatch(_))));
    }

    #[test]
    fn spectrum_csv_shape() {
        let s = spectrum_sets(&FrequencySchedule::geometric(3, 2).unwrap(), 2).unwrap();
        let csv = s.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "j,xi,k1,k2,weight");
        assert_eq!(csv.lines().count(), 1 + 4);
    }

    #[test]
    fn d_dimensional_product_magnitude_law() {
        // d = 3 with generic rational phases; weights follow 2^{-||k||_0}
        let th = DeformationMatrix::from_upper_triangle(
            3,
            vec![
                crate::algebra::ThetaValue::Rational(num_rational::Rational64::new(1, 5)),
                crate::algebra::ThetaValue::Rational(num_rational::Rational64::new(1, 7)),
                crate::algebra::ThetaValue::Rational(num_rational::Rational64::new(2, 9)),
            ],
        )
        .unwrap();
        let freqs = vec![vec![1, 1, 1], vec![3, 4, 3], vec![9, 13, 9]];
        let p = riesz_product_d(&freqs, &th, None).unwrap();
        assert!((trace(&p) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        // (3^3 - 1)/2 signed pairs plus the constant term
        assert_eq!(p.num_terms(), 27);
        for (alpha, c) in p.terms() {
            if alpha.iter().all(|&x| x == 0) {
                continue;
            }
            let norm = c.norm();
            let w = norm.log2().round();
            assert!((norm - 2f64.powi(w as i32)).abs() < 1e-13, "{alpha:?}");
            assert!((-3.0..=-1.0).contains(&w), "{alpha:?} {norm}");
        }
    }
}
