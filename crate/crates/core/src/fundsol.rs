//! Exact fundamental solutions on Z² at the distinguished spectral points.
//!
//! Four lattice operators admit closed-form fundamental solutions whose
//! values live in the Q-module spanned by 1, 1/π, i/π and i·log2/π:
//!
//! * `fundsol_h0`: E with H₀E = δ₀ (the potential-kernel normalization,
//!   E[n] = −a(n)/4 where a is the recurrent potential kernel),
//! * `fundsol_embedded`: E₁ with (H₀ − 4)E₁ = δ₀, the constant term of the
//!   kernel expansion at the interior spectral point,
//! * `fundsol_dalembertian`: the discrete-wave fundamental solution
//!   (−1)^{n₁} E₁[n],
//! * `fundsol_h0_minus8`: −(−1)^{n₁+n₂} E[n] solving (H₀ − 8)F = δ₀.
//!
//! All values are exact `BigRational` linear combinations; every
//! hypergeometric sum involved terminates and is evaluated in exact
//! arithmetic.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hyper::pfq_unit_exact;
use crate::special::{neg_one_pow, HalfInt};

/// An exact value r + p/π + i(q + s·log 2)/π with r, p, q, s ∈ Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactValue {
    /// rational part
    pub rational: BigRational,
    /// real coefficient of 1/π
    pub inv_pi: BigRational,
    /// imaginary coefficient of 1/π
    pub imag_inv_pi: BigRational,
    /// imaginary coefficient of log(2)/π
    pub imag_log2_inv_pi: BigRational,
}

impl ExactValue {
    pub fn zero() -> Self {
        ExactValue {
            rational: BigRational::zero(),
            inv_pi: BigRational::zero(),
            imag_inv_pi: BigRational::zero(),
            imag_log2_inv_pi: BigRational::zero(),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        ExactValue {
            rational: r,
            ..ExactValue::zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
            && self.inv_pi.is_zero()
            && self.imag_inv_pi.is_zero()
            && self.imag_log2_inv_pi.is_zero()
    }

    /// Floating-point value of the four-channel combination.
    pub fn to_complex(&self) -> Complex64 {
        let f = |r: &BigRational| -> f64 {
            let num = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
            let den = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
            num / den
        };
        let pi = std::f64::consts::PI;
        Complex64::new(
            f(&self.rational) + f(&self.inv_pi) / pi,
            (f(&self.imag_inv_pi) + f(&self.imag_log2_inv_pi) * std::f64::consts::LN_2) / pi,
        )
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        ExactValue {
            rational: &self.rational * &k,
            inv_pi: &self.inv_pi * &k,
            imag_inv_pi: &self.imag_inv_pi * &k,
            imag_log2_inv_pi: &self.imag_log2_inv_pi * &k,
        }
    }
}

impl std::ops::Add for ExactValue {
    type Output = ExactValue;
    fn add(self, rhs: ExactValue) -> ExactValue {
        ExactValue {
            rational: self.rational + rhs.rational,
            inv_pi: self.inv_pi + rhs.inv_pi,
            imag_inv_pi: self.imag_inv_pi + rhs.imag_inv_pi,
            imag_log2_inv_pi: self.imag_log2_inv_pi + rhs.imag_log2_inv_pi,
        }
    }
}

impl std::ops::Sub for ExactValue {
    type Output = ExactValue;
    fn sub(self, rhs: ExactValue) -> ExactValue {
        ExactValue {
            rational: self.rational - rhs.rational,
            inv_pi: self.inv_pi - rhs.inv_pi,
            imag_inv_pi: self.imag_inv_pi - rhs.imag_inv_pi,
            imag_log2_inv_pi: self.imag_log2_inv_pi - rhs.imag_log2_inv_pi,
        }
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn hi(k: i64) -> HalfInt {
    HalfInt::from_int(k)
}

fn check_dim2(n: &[i64]) -> Result<(i64, i64)> {
    if n.len() != 2 {
        return Err(Error::InvalidParams("expected a two-dimensional lattice point".into()));
    }
    let mut a = n[0].abs();
    let mut b = n[1].abs();
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    Ok((a, b))
}

/// Partial sum Σ_{j=1}^{m} 1/(2j−1) of reciprocal odd numbers.
fn odd_harmonic(m: i64) -> BigRational {
    (1..=m).map(|j| rat(1, 2 * j - 1)).sum()
}

/// Fundamental solution of H₀ on Z²: the unique function with H₀E = δ₀,
/// E(0,0) = 0 and E[n] + log|n|/(2π) bounded. Related to the potential
/// kernel by E[n] = −a(n)/4. Values are rational plus a rational multiple
/// of 1/π; every sum below terminates and is evaluated exactly.
pub fn fundsol_h0(n: &[i64]) -> Result<ExactValue> {
    let (n1, n2) = check_dim2(n)?;
    let one = hi(1);
    let half = HalfInt::HALF;
    let three_halves = HalfInt::THREE_HALVES;
    let mut out = ExactValue::zero();
    if (n1 + n2) % 2 == 0 {
        let s = (n1 + n2) / 2;
        let t = (n1 - n2) / 2;
        let sgn = neg_one_pow(n1);
        if s > 0 && t > 0 {
            let f = pfq_unit_exact(
                &[hi(1 + s), hi(1 - s), hi(1 + t), hi(1 - t)],
                &[one, three_halves, three_halves],
            )?;
            out.rational = -rat(sgn * s * t, 1) * f;
        }
        let mut pi_acc = BigRational::zero();
        for mu in 1..=s {
            // 2·(1 + 1/3 + … + 1/(2μ−3)) + 1/(2μ−1)
            let c = rat(2, 1) * odd_harmonic(mu - 1) + rat(1, 2 * mu - 1);
            let f = pfq_unit_exact(&[hi(s + 1 - mu), hi(mu - s), hi(t), hi(-t)], &[one, half, half])?;
            pi_acc += rat(neg_one_pow(mu), 1) * c * f;
        }
        for nu in 1..=t {
            let c = rat(2, 1) * odd_harmonic(nu - 1) + rat(1, 2 * nu - 1);
            let f = pfq_unit_exact(&[hi(t + 1 - nu), hi(nu - t), hi(s), hi(-s)], &[one, half, half])?;
            pi_acc += rat(neg_one_pow(nu), 1) * c * f;
        }
        out.inv_pi = -rat(sgn, 1) * pi_acc;
    } else {
        let s = n1 + n2; // odd
        let t = n1 - n2; // odd
        let sgn = neg_one_pow(n1);
        let f = pfq_unit_exact(
            &[
                HalfInt::new(1 + s),
                HalfInt::new(1 + t),
                HalfInt::new(1 - t),
                HalfInt::new(1 - s),
            ],
            &[one, half, half],
        )?;
        out.rational = rat(sgn, 4) * f;
        let mut pi_acc = BigRational::zero();
        // symmetric μ-range folds onto 2Σ_{μ≥1}; the μ = 0 term carries an
        // empty harmonic sum and drops out
        for mu in 1..=(s - 1) / 2 {
            let f = pfq_unit_exact(
                &[
                    HalfInt::new(1 + s) - mu,
                    HalfInt::new(1 - s) + mu,
                    HalfInt::new(1 + t),
                    HalfInt::new(1 - t),
                ],
                &[one, half, three_halves],
            )?;
            pi_acc += rat(2 * neg_one_pow(mu) * t, 1) * odd_harmonic(mu) * f;
        }
        for nu in 1..=(t - 1) / 2 {
            let f = pfq_unit_exact(
                &[
                    HalfInt::new(1 + t) - nu,
                    HalfInt::new(1 - t) + nu,
                    HalfInt::new(1 + s),
                    HalfInt::new(1 - s),
                ],
                &[one, half, three_halves],
            )?;
            pi_acc += rat(2 * neg_one_pow(nu) * s, 1) * odd_harmonic(nu) * f;
        }
        out.inv_pi = rat(sgn, 1) * pi_acc;
    }
    Ok(out)
}

/// Constant term E₁ of the kernel expansion at the interior spectral point
/// z = 4, satisfying (H₀ − 4)E₁ = δ₀:
/// E₁[n] = ((−1)^{max} − (−1)^{min})/8
///        + i((−1)^{n₁} + (−1)^{n₂})/(2π)·(log 2 − Σ_{k≤|n₁+n₂|/2} 1/(2k−1)
///                                               − Σ_{k≤|n₁−n₂|/2} 1/(2k−1)).
pub fn fundsol_embedded(n: &[i64]) -> Result<ExactValue> {
    let (n1, n2) = check_dim2(n)?;
    let mut out = ExactValue::zero();
    if (n1 + n2) % 2 != 0 {
        // opposite parities: the imaginary weight vanishes
        out.rational = rat(neg_one_pow(n1) - neg_one_pow(n2), 8);
    } else {
        // equal parities: the real part vanishes
        let weight = rat(neg_one_pow(n1) + neg_one_pow(n2), 2); // = ±1
        out.imag_log2_inv_pi = weight.clone();
        out.imag_inv_pi = -weight * (odd_harmonic((n1 + n2) / 2) + odd_harmonic((n1 - n2) / 2));
    }
    Ok(out)
}

/// Fundamental solution of the discrete wave operator
/// (□u)[n] = u[n+e₁] + u[n−e₁] − u[n+e₂] − u[n−e₂]: (−1)^{n₁} E₁[n].
pub fn fundsol_dalembertian(n: &[i64]) -> Result<ExactValue> {
    if n.len() != 2 {
        return Err(Error::InvalidParams("expected a two-dimensional lattice point".into()));
    }
    Ok(fundsol_embedded(n)?.scale_int(neg_one_pow(n[0])))
}

/// Fundamental solution of H₀ − 8 (the upper spectral endpoint):
/// F[n] = −(−1)^{n₁+n₂} E[n].
pub fn fundsol_h0_minus8(n: &[i64]) -> Result<ExactValue> {
    if n.len() != 2 {
        return Err(Error::InvalidParams("expected a two-dimensional lattice point".into()));
    }
    Ok(fundsol_h0(n)?.scale_int(-neg_one_pow(n[0] + n[1])))
}

/// The four lattice operators with exact fundamental solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOp {
    /// H₀ = 4 − shifts (positive discrete Laplacian)
    H0,
    /// H₀ − 4
    H0Minus4,
    /// discrete wave operator u ↦ u(·+e₁) + u(·−e₁) − u(·+e₂) − u(·−e₂)
    DAlembertian,
    /// H₀ − 8
    H0Minus8,
}

impl LatticeOp {
    /// The fundamental solution paired with this operator.
    pub fn fundamental_solution(self, n: &[i64]) -> Result<ExactValue> {
        match self {
            LatticeOp::H0 => fundsol_h0(n),
            LatticeOp::H0Minus4 => fundsol_embedded(n),
            LatticeOp::DAlembertian => fundsol_dalembertian(n),
            LatticeOp::H0Minus8 => fundsol_h0_minus8(n),
        }
    }
}

/// Applies the operator's five-point stencil exactly to `eval` at n.
pub fn apply_stencil_exact(
    op: LatticeOp,
    n: &[i64; 2],
    mut eval: impl FnMut(&[i64]) -> Result<ExactValue>,
) -> Result<ExactValue> {
    let shift = |n: &[i64; 2], d1: i64, d2: i64| [n[0] + d1, n[1] + d2];
    let center_weight: i64 = match op {
        LatticeOp::H0 => 4,
        LatticeOp::H0Minus4 => 0,
        LatticeOp::DAlembertian => 0,
        LatticeOp::H0Minus8 => -4,
    };
    let mut acc = eval(n)?.scale_int(center_weight);
    let neighbor_weights: [(i64, i64, i64); 4] = match op {
        LatticeOp::DAlembertian => [(1, 0, 1), (-1, 0, 1), (0, 1, -1), (0, -1, -1)],
        _ => [(1, 0, -1), (-1, 0, -1), (0, 1, -1), (0, -1, -1)],
    };
    for (d1, d2, w) in neighbor_weights {
        acc = acc + eval(&shift(n, d1, d2))?.scale_int(w);
    }
    Ok(acc)
}

/// Exact residual (op F)[n] − δ₀[n] of the operator's fundamental solution;
/// the zero value certifies the identity at n.
pub fn stencil_residual_exact(op: LatticeOp, n: &[i64; 2]) -> Result<ExactValue> {
    let mut r = apply_stencil_exact(op, n, |p| op.fundamental_solution(p))?;
    if n[0] == 0 && n[1] == 0 {
        r.rational -= BigRational::one();
    }
    Ok(r)
}
