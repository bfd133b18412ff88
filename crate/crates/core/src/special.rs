//! Scalar building blocks: exact half-integers, Pochhammer symbols, digamma
//! at half-integer arguments, log-factorials and the principal-branch complex
//! square root and logarithm with the branch combinations the resolvent
//! formulas require.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant to full double precision.
pub const EULER_GAMMA: f64 = 0.57721566490153286;

/// A number of the form k/2, k ∈ Z, stored exactly as twice its value.
///
/// This is the parameter domain of every hypergeometric series in this crate;
/// keeping it exact lets terminating series be detected without any floating
/// comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    /// The value `twice / 2`.
    pub const fn new(twice: i64) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(k: i64) -> Self {
        HalfInt { twice: 2 * k }
    }

    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };
    pub const THREE_HALVES: HalfInt = HalfInt { twice: 3 };

    pub const fn twice(self) -> i64 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    pub fn integer_value(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.twice / 2)
        } else {
            None
        }
    }

    pub const fn is_nonpositive_integer(self) -> bool {
        self.twice % 2 == 0 && self.twice <= 0
    }

    pub fn as_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.twice), BigInt::from(2))
    }
}

impl Add<i64> for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: i64) -> HalfInt {
        HalfInt::new(self.twice + 2 * rhs)
    }
}

impl Sub<i64> for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: i64) -> HalfInt {
        HalfInt::new(self.twice - 2 * rhs)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt::new(self.twice + rhs.twice)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt::new(self.twice - rhs.twice)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::new(-self.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Rising factorial (q)_j = q(q+1)⋯(q+j−1), exactly.
pub fn pochhammer(q: HalfInt, j: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut cur = q.to_rational();
    let one = BigRational::one();
    for _ in 0..j {
        acc *= &cur;
        cur += &one;
    }
    acc
}

/// Floating rising factorial; errors when the product leaves the
/// representable range.
pub fn pochhammer_f(q: Complex64, j: u32) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..j {
        acc *= q + i as f64;
    }
    if acc.re.is_finite() && acc.im.is_finite() {
        Ok(acc)
    } else {
        Err(Error::Overflow)
    }
}

/// Sign and log-magnitude of (q)_j for real half-integer q; `None` when the
/// product contains a zero factor.
pub(crate) fn ln_pochhammer(q: HalfInt, j: u32) -> Option<(f64, f64)> {
    let mut sign = 1.0_f64;
    let mut ln = 0.0_f64;
    for i in 0..j {
        let factor = (q + i as i64).as_f64();
        if factor == 0.0 {
            return None;
        }
        if factor < 0.0 {
            sign = -sign;
        }
        ln += factor.abs().ln();
    }
    Some((sign, ln))
}

/// Digamma ψ(x) at half-integer x, built from the closed formulas
/// ψ(1+m) = −γ + Σ 1/k and ψ(½+m) = −γ − 2 log 2 + 2 Σ 1/(2k−1), extended to
/// the remaining half-odd arguments through ψ(x+1) = ψ(x) + 1/x.
pub fn digamma(x: HalfInt) -> Result<f64> {
    if x.is_nonpositive_integer() {
        return Err(Error::DigammaPole(x));
    }
    if let Some(m) = x.integer_value() {
        // m >= 1 here
        let mut v = -EULER_GAMMA;
        for k in 1..m {
            v += 1.0 / k as f64;
        }
        Ok(v)
    } else {
        let psi_half = -EULER_GAMMA - 2.0 * std::f64::consts::LN_2;
        let twice = x.twice();
        if twice >= 1 {
            // x = 1/2 + m
            let m = (twice - 1) / 2;
            let mut v = psi_half;
            for k in 1..=m {
                v += 2.0 / (2 * k - 1) as f64;
            }
            Ok(v)
        } else {
            // negative half-odd argument: walk up to 1/2
            let mut v = psi_half;
            let mut t = x.as_f64();
            while t < 0.5 {
                v -= 1.0 / t;
                t += 1.0;
            }
            Ok(v)
        }
    }
}

/// Principal square root, Re √w > 0 off the cut; arguments on the cut
/// (−∞, 0) are rejected.
pub fn principal_sqrt(w: Complex64) -> Result<Complex64> {
    if w.im == 0.0 && w.re < 0.0 {
        return Err(Error::BranchCut(w));
    }
    Ok(w.sqrt())
}

/// Principal logarithm, −π < Im log w < π; the cut (−∞, 0] is rejected.
pub fn principal_log(w: Complex64) -> Result<Complex64> {
    if w.im == 0.0 && w.re <= 0.0 {
        return Err(Error::BranchCut(w));
    }
    Ok(w.ln())
}

/// S(z) = √(−z)·√(4−z) with both factors principal.
///
/// Analytic on C∖[0,4], positive for z < 0 and continuous across (4, ∞)
/// where it equals −√(z(z−4)); 1/S matches the one-dimensional resolvent
/// decay. The naive principal √(z(4−z)) has neither property.
pub fn resolvent_sqrt_1d(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 {
        if (0.0..=4.0).contains(&z.re) {
            return Err(Error::region("resolvent square root requires z off [0, 4]"));
        }
        if z.re > 4.0 {
            // common limit from either side of the real axis
            return Ok(Complex64::new(-(z.re * (z.re - 4.0)).sqrt(), 0.0));
        }
    }
    Ok(principal_sqrt(-z)? * principal_sqrt(Complex64::new(4.0, 0.0) - z)?)
}

const LN_FACT_LEN: usize = 1 << 15;

static LN_FACT: OnceLock<Vec<f64>> = OnceLock::new();

/// log(k!) to double precision.
pub fn ln_factorial(k: u32) -> f64 {
    let table = LN_FACT.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_LEN);
        t.push(0.0);
        for i in 1..LN_FACT_LEN {
            t.push(t[i - 1] + (i as f64).ln());
        }
        t
    });
    table[k as usize]
}

/// k! as an exact big integer.
pub fn factorial_big(k: u32) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 2..=k as u64 {
        acc *= i;
    }
    acc
}

pub(crate) fn neg_one_pow(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}
