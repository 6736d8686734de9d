//! High-precision rotation angles: 96-bit binary fixed point for the
//! equidistribution search, decimal parsing, named constants, and
//! continued-fraction convergents.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const FRAC_BITS: u32 = 96;
const MODULUS_MASK: u128 = (1u128 << FRAC_BITS) - 1;

/// 50-digit decimal expansion of sqrt(2) - 1.
pub const SQRT2_MINUS_1: &str = "0.41421356237309504880168872420969807856967187537694";
/// 50-digit decimal expansion of (sqrt(5) - 1)/2.
pub const GOLDEN_CONJUGATE: &str = "0.61803398874989484820458683436563811772030917980576";

/// Fractional part of a rotation angle as an unsigned 96-bit binary fixed
/// point value; arithmetic modulo 1 is exact wrapping arithmetic modulo
/// 2^96.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FixedTheta {
    value: u128,
    exactly_rational: bool,
}

impl FixedTheta {
    pub fn from_bits(value: u128) -> Self {
        Self {
            value: value & MODULUS_MASK,
            exactly_rational: false,
        }
    }

    pub fn bits(&self) -> u128 {
        self.value
    }

    /// Parses a decimal like "0.4142135623..."; the integer part is
    /// discarded modulo 1. Finite decimals are rational by construction.
    pub fn from_decimal_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (_int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if !body.chars().all(|c| c.is_ascii_digit() || c == '.')
            || body.is_empty()
            || body.matches('.').count() > 1
        {
            return Err(Error::ThetaParse(s.to_string()));
        }
        // frac * 2^96 / 10^k, truncated
        let digits = if frac_part.is_empty() { "0" } else { frac_part };
        let numer = BigUint::parse_bytes(digits.as_bytes(), 10)
            .ok_or_else(|| Error::ThetaParse(s.to_string()))?;
        let denom = BigUint::from(10u32).pow(digits.len() as u32);
        let scaled = (numer << FRAC_BITS) / denom;
        let mut value = (scaled & BigUint::from(MODULUS_MASK))
            .to_u128()
            .expect("masked to 96 bits");
        if sign && value != 0 {
            value = (MODULUS_MASK + 1) - value;
        }
        Ok(Self {
            value,
            exactly_rational: true,
        })
    }

    pub fn from_rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidModulus(q));
        }
        let q = q.unsigned_abs() as u128;
        let p = (p as i128).mod_floor(&(q as i128)) as u128;
        let value = (((p << FRAC_BITS) as u128) / q) & MODULUS_MASK;
        // round-to-nearest for a faithful fraction
        let rem = (p << FRAC_BITS) % q;
        let value = if 2 * rem >= q { (value + 1) & MODULUS_MASK } else { value };
        Ok(Self {
            value,
            exactly_rational: true,
        })
    }

    /// Named constants evaluated to 50 decimal digits.
    pub fn named(name: &str) -> Result<Self> {
        let s = match name {
            "sqrt2m1" => SQRT2_MINUS_1,
            "golden" => GOLDEN_CONJUGATE,
            _ => return Err(Error::ThetaParse(name.to_string())),
        };
        let mut t = Self::from_decimal_str(s)?;
        t.exactly_rational = false;
        Ok(t)
    }

    pub fn is_exactly_rational(&self) -> bool {
        self.exactly_rational
    }

    pub fn to_f64(&self) -> f64 {
        self.value as f64 / (MODULUS_MASK as f64 + 1.0)
    }

    /// Signed representative in (-1/2, 1/2].
    pub fn signed(&self) -> f64 {
        let half = 1u128 << (FRAC_BITS - 1);
        if self.value > half {
            -(((MODULUS_MASK + 1) - self.value) as f64) / (MODULUS_MASK as f64 + 1.0)
        } else {
            self.to_f64()
        }
    }

    /// Distance to the nearest integer.
    pub fn dist_to_int(&self) -> f64 {
        self.signed().abs()
    }

    pub fn wrapping_add(&self, other: &Self) -> Self {
        Self {
            value: (self.value + other.value) & MODULUS_MASK,
            exactly_rational: self.exactly_rational && other.exactly_rational,
        }
    }

    pub fn wrapping_mul_int(&self, n: u64) -> Self {
        // split to avoid overflow of value * n in u128
        let lo = self.value & 0xFFFF_FFFF_FFFF_FFFF;
        let hi = self.value >> 64;
        let n = n as u128;
        let prod = (lo * n + ((hi * n) << 64)) & MODULUS_MASK;
        Self {
            value: prod,
            exactly_rational: self.exactly_rational,
        }
    }

    /// Best continued-fraction convergent p/q with q <= q_max.
    pub fn convergent(&self, q_max: i64) -> (i64, i64) {
        if self.value == 0 {
            return (0, 1);
        }
        let mut num = BigUint::from(self.value);
        let mut den = BigUint::one() << FRAC_BITS;
        let (mut p_prev, mut q_prev) = (BigUint::zero(), BigUint::one());
        let (mut p_cur, mut q_cur) = (BigUint::one(), BigUint::zero());
        let q_max_big = BigUint::from(q_max.unsigned_abs());
        loop {
            if den.is_zero() {
                break;
            }
            let (a, rem) = num.div_rem(&den);
            let p_next = &a * &p_cur + &p_prev;
            let q_next = &a * &q_cur + &q_prev;
            if q_next > q_max_big {
                break;
            }
            p_prev = std::mem::replace(&mut p_cur, p_next);
            q_prev = std::mem::replace(&mut q_cur, q_next);
            num = std::mem::replace(&mut den, rem);
        }
        (
            p_cur.to_i64().expect("convergent numerator fits"),
            q_cur.to_i64().expect("convergent denominator fits"),
        )
    }
}
