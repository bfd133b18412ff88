//! Representations of the resolvent kernel G(z, n) of the discrete Laplacian
//! H₀ on Z^d, i.e. the convolution kernel of (H₀ − z)⁻¹:
//!
//! * a Laurent-type expansion outside the disk |2d − z| > 2d (any d), with a
//!   faster single-sum reduction for d = 2,
//! * the elementary closed form and the two threshold expansions for d = 1,
//! * series around the interior spectral point z = 4 for d = 2,
//! * finite hypergeometric formulas around the spectral endpoints 0, 8 for
//!   d = 2, plus an independent recurrence-based evaluation of the same
//!   quantities,
//! * a region-aware dispatcher tying these together.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hyper::{eval_pfq, PfqParams};
use crate::special::{
    digamma, ln_factorial, neg_one_pow, pochhammer, principal_log, principal_sqrt,
    resolvent_sqrt_1d, HalfInt,
};

/// Which formula produced a kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Laurent,
    Laurent2d,
    Closed1d,
    Threshold0_1d,
    Threshold4_1d,
    Embedded2d,
    Endpoint2d,
    Recurrence2d,
}

/// A kernel value together with provenance and accuracy bookkeeping.
#[derive(Debug, Clone, Copy)]
pub struct GreenValue {
    pub value: Complex64,
    pub representation: Representation,
    pub terms_used: usize,
    pub err_estimate: f64,
}

/// Default relative tolerance for series summation.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_TERMS: usize = 2_000_000;

/// Canonical representative of the symmetry orbit of n: coordinatewise
/// absolute values, sorted descending. G(z, ·) is constant on each orbit.
pub fn reduce_symmetry(n: &[i64]) -> Vec<i64> {
    let mut m: Vec<i64> = n.iter().map(|x| x.abs()).collect();
    m.sort_unstable_by(|a, b| b.cmp(a));
    m
}

/// Laurent-type expansion valid for |2d − z| > 2d:
/// G(z,n) = Σ_α (2|α|+|n|)! / (α! ∏(α_j+|n_j|)!) (2d−z)^{−2|α|−|n|−1},
/// summed by total-degree shells with log-domain coefficients.
pub fn green_laurent(d: usize, z: Complex64, n: &[i64], tol: f64) -> Result<GreenValue> {
    if n.len() != d || d == 0 {
        return Err(Error::InvalidParams("dimension mismatch".into()));
    }
    let u = Complex64::new(2.0 * d as f64, 0.0) - z;
    if u.norm() <= 2.0 * d as f64 {
        return Err(Error::region(format!(
            "series requires |{} − z| > {}, got |{} − z| = {}",
            2 * d,
            2 * d,
            2 * d,
            u.norm()
        )));
    }
    let n_abs: Vec<u32> = n.iter().map(|x| x.unsigned_abs() as u32).collect();
    let n_sum: u32 = n_abs.iter().sum();
    let u_inv = u.inv();
    let u_inv2 = u_inv * u_inv;
    // power factor for shell s, updated incrementally
    let mut power = u_inv.powi(n_sum as i32 + 1);
    let mut sum = Complex64::zero();
    let mut terms = 0usize;
    let mut streak = 0usize;
    let mut s = 0u32;
    loop {
        let ln_front = ln_factorial(2 * s + n_sum);
        let mut shell = 0.0f64;
        let mut n_terms = 0usize;
        for_each_alpha(s, d, &mut |alpha| {
            let mut ln = ln_front;
            for (j, &aj) in alpha.iter().enumerate() {
                ln -= ln_factorial(aj) + ln_factorial(aj + n_abs[j]);
            }
            shell += ln.exp();
            n_terms += 1;
        });
        let contrib = power * shell;
        sum += contrib;
        terms += n_terms;
        if contrib.norm() <= tol * sum.norm() {
            streak += 1;
            if streak >= 3 {
                return Ok(GreenValue {
                    value: sum,
                    representation: Representation::Laurent,
                    terms_used: terms,
                    err_estimate: contrib.norm(),
                });
            }
        } else {
            streak = 0;
        }
        if terms >= MAX_TERMS {
            return Err(Error::NoConvergence {
                terms,
                last: contrib.norm(),
            });
        }
        power *= u_inv2;
        s += 1;
    }
}

fn for_each_alpha(total: u32, d: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(total: u32, idx: usize, alpha: &mut [u32], f: &mut impl FnMut(&[u32])) {
        if idx == alpha.len() - 1 {
            alpha[idx] = total;
            f(alpha);
            return;
        }
        for v in 0..=total {
            alpha[idx] = v;
            rec(total - v, idx + 1, alpha, f);
        }
    }
    let mut alpha = vec![0u32; d];
    rec(total, 0, &mut alpha, f);
}

/// Single-sum reduction of the d = 2 expansion (|4 − z| > 4):
/// G(z,n) = Σ_k ((2k+|n|)!)² / ((k+|n₁|)!(k+|n₂|)!(|n|+k)!k!) (4−z)^{−2k−|n|−1},
/// evaluated by the term-ratio recurrence.
pub fn green_laurent_2d(z: Complex64, n: &[i64], tol: f64) -> Result<GreenValue> {
    if n.len() != 2 {
        return Err(Error::InvalidParams("expected a two-dimensional lattice point".into()));
    }
    let u = Complex64::new(4.0, 0.0) - z;
    if u.norm() <= 4.0 {
        return Err(Error::region(format!(
            "series requires |4 − z| > 4, got {}",
            u.norm()
        )));
    }
    let n1 = n[0].unsigned_abs() as f64;
    let n2 = n[1].unsigned_abs() as f64;
    let na = n1 + n2;
    let u_inv = u.inv();
    let u_inv2 = u_inv * u_inv;
    // k = 0 term: (|n|!)² / (|n₁|!|n₂|!|n|!·1) u^{−|n|−1} = |n|!/(|n₁|!|n₂|!)·u^{−|n|−1}
    let ln_t0 = ln_factorial(na as u32) - ln_factorial(n1 as u32) - ln_factorial(n2 as u32);
    let mut term = ln_t0.exp() * u_inv.powi(na as i32 + 1);
    let mut sum = term;
    let mut streak = 0usize;
    let mut k = 0u32;
    loop {
        let kf = k as f64;
        let ratio = ((2.0 * kf + na + 1.0) * (2.0 * kf + na + 2.0)).powi(2)
            / ((kf + 1.0 + n1) * (kf + 1.0 + n2) * (na + kf + 1.0) * (kf + 1.0));
        term = term * ratio * u_inv2;
        sum += term;
        k += 1;
        if term.norm() <= tol * sum.norm() {
            streak += 1;
            if streak >= 3 {
                return Ok(GreenValue {
                    value: sum,
                    representation: Representation::Laurent2d,
                    terms_used: (k + 1) as usize,
                    err_estimate: term.norm(),
                });
            }
        } else {
            streak = 0;
        }
        if k as usize >= MAX_TERMS {
            return Err(Error::NoConvergence {
                terms: k as usize,
                last: term.norm(),
            });
        }
    }
}

/// Elementary closed form for d = 1, z ∉ [0, 4]:
/// G(z,n) = ((−z + 2 − S(z)) / 2)^{|n|} / S(z) with S(z) = √(−z)√(4−z).
pub fn green_1d(z: Complex64, n: i64) -> Result<GreenValue> {
    let s = resolvent_sqrt_1d(z)?;
    let base = (Complex64::new(2.0, 0.0) - z - s) / 2.0;
    let value = base.powi(n.unsigned_abs() as i32) / s;
    Ok(GreenValue {
        value,
        representation: Representation::Closed1d,
        terms_used: 1,
        err_estimate: f64::EPSILON * value.norm(),
    })
}

fn hi(k: i64) -> HalfInt {
    HalfInt::from_int(k)
}

/// d = 1 expansion around the lower spectral endpoint (z ∉ [0,∞), |z| < 4):
/// a terminating polynomial part plus the 1/(2√(−z)) singular series.
pub fn green_1d_threshold0(z: Complex64, n: i64, tol: f64) -> Result<GreenValue> {
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::region("expansion requires z off [0, ∞)"));
    }
    if z.norm() >= 4.0 {
        return Err(Error::region("expansion requires |z| < 4"));
    }
    let na = n.abs();
    let w = z / 4.0;
    let mut terms = 1usize;
    let mut analytic = Complex64::zero();
    if na > 0 {
        let p = PfqParams::new(vec![hi(1 + na), hi(1 - na)], vec![HalfInt::THREE_HALVES])?;
        let v = eval_pfq(&p, w, tol, MAX_TERMS)?;
        analytic = -(na as f64 / 2.0) * v.value;
        terms += v.terms_used;
    }
    let p = PfqParams::new(
        vec![HalfInt::HALF + na, HalfInt::HALF - na],
        vec![HalfInt::HALF],
    )?;
    let v = eval_pfq(&p, w, tol, MAX_TERMS)?;
    terms += v.terms_used;
    let singular = v.value / (2.0 * principal_sqrt(-z)?);
    let value = analytic + singular;
    Ok(GreenValue {
        value,
        representation: Representation::Threshold0_1d,
        terms_used: terms,
        err_estimate: v.err_estimate / (2.0 * z.norm().sqrt()),
    })
}

/// d = 1 expansion around the upper spectral endpoint
/// (z ∉ (−∞, 4], |z − 4| < 4), with the alternating sign (−1)^{n+1}.
pub fn green_1d_threshold4(z: Complex64, n: i64, tol: f64) -> Result<GreenValue> {
    if z.im == 0.0 && z.re <= 4.0 {
        return Err(Error::region("expansion requires z off (−∞, 4]"));
    }
    if (z - 4.0).norm() >= 4.0 {
        return Err(Error::region("expansion requires |z − 4| < 4"));
    }
    let na = n.abs();
    let sign = neg_one_pow(na + 1) as f64;
    let w = (Complex64::new(4.0, 0.0) - z) / 4.0;
    let mut terms = 1usize;
    let mut analytic = Complex64::zero();
    if na > 0 {
        let p = PfqParams::new(vec![hi(1 + na), hi(1 - na)], vec![HalfInt::THREE_HALVES])?;
        let v = eval_pfq(&p, w, tol, MAX_TERMS)?;
        analytic = -sign * (na as f64 / 2.0) * v.value;
        terms += v.terms_used;
    }
    let p = PfqParams::new(
        vec![HalfInt::HALF + na, HalfInt::HALF - na],
        vec![HalfInt::HALF],
    )?;
    let v = eval_pfq(&p, w, tol, MAX_TERMS)?;
    terms += v.terms_used;
    let singular = sign * v.value / (2.0 * principal_sqrt(z - 4.0)?);
    Ok(GreenValue {
        value: analytic + singular,
        representation: Representation::Threshold4_1d,
        terms_used: terms,
        err_estimate: v.err_estimate,
    })
}

/// Log-coefficient series Σ_k c_k f^{2k} (bracket_k − L) shared by the
/// interior-threshold and diagonal expansions. `a` are the four (or two)
/// Pochhammer bases; `lower_extra` is the repeated lower base (½ or 3/2);
/// `psi_pos` are digamma arguments entering with +1 weight beyond ψ(1+k).
struct LogSeries {
    /// Pochhammer bases of the numerator coefficients
    num_bases: Vec<HalfInt>,
    /// repeated lower base (appears with multiplicity `lower_pow` along with k!²)
    lower_base: HalfInt,
    /// multiplicity of the lower base in the denominator (0 or 2)
    lower_pow: i32,
    /// digamma arguments with weight +2 (beyond 2ψ(1+k)); usually the lower base
    psi_plus: Vec<HalfInt>,
    /// digamma arguments with weight −1; usually the numerator bases
    psi_minus: Vec<HalfInt>,
}

impl LogSeries {
    /// Sums Σ_k c_k ratio^k (bracket_k − l_value) where
    /// c_k = Π (num)_k / (k!² (lower)_k²) and
    /// bracket_k = 2ψ(1+k) + 2Σψ(plus+k) − Σψ(minus+k).
    fn sum(&self, ratio: Complex64, l_value: Complex64, tol: f64) -> Result<(Complex64, usize)> {
        let mut coeff = 1.0f64;
        let mut factor = Complex64::new(1.0, 0.0);
        let mut psi_one = digamma(HalfInt::ONE)?;
        let mut psi_plus: Vec<f64> = self
            .psi_plus
            .iter()
            .map(|&x| digamma(x))
            .collect::<Result<_>>()?;
        let mut psi_minus: Vec<f64> = self
            .psi_minus
            .iter()
            .map(|&x| digamma(x))
            .collect::<Result<_>>()?;
        let mut sum = Complex64::zero();
        let mut streak = 0usize;
        let mut k = 0u32;
        loop {
            let mut bracket = 2.0 * psi_one;
            for &p in &psi_plus {
                bracket += 2.0 * p;
            }
            for &m in &psi_minus {
                bracket -= m;
            }
            let term = factor * coeff * (Complex64::new(bracket, 0.0) - l_value);
            sum += term;
            if term.norm() <= tol * sum.norm().max(1e-300) {
                streak += 1;
                if streak >= 3 {
                    return Ok((sum, (k + 1) as usize));
                }
            } else {
                streak = 0;
            }
            if k as usize >= MAX_TERMS {
                return Err(Error::NoConvergence {
                    terms: k as usize,
                    last: term.norm(),
                });
            }
            // advance k → k+1: coefficient ratio, power factor, digammas
            let kf = k as f64;
            let mut r = 1.0;
            for &b in &self.num_bases {
                r *= b.as_f64() + kf;
            }
            r /= (kf + 1.0).powi(2) * (self.lower_base.as_f64() + kf).powi(self.lower_pow);
            coeff *= r;
            factor *= ratio;
            psi_one += 1.0 / (kf + 1.0);
            for (i, p) in psi_plus.iter_mut().enumerate() {
                *p += 1.0 / (self.psi_plus[i].as_f64() + kf);
            }
            for (i, m) in psi_minus.iter_mut().enumerate() {
                *m += 1.0 / (self.psi_minus[i].as_f64() + kf);
            }
            k += 1;
        }
    }
}

/// The logarithm factor log(−(z−4)²/16) of the interior-threshold series,
/// or its boundary value from Im z → 0⁺ when `boundary` is set (then z must
/// be real, in (0,8) ∖ {4}).
fn interior_log_factor(z: Complex64, boundary: bool) -> Result<Complex64> {
    if boundary {
        let x = z.re;
        if z.im != 0.0 || !(0.0..8.0).contains(&x) || x == 4.0 {
            return Err(Error::region(
                "boundary evaluation requires real z in (0, 8) excluding 4",
            ));
        }
        let sign = if x < 4.0 { 1.0 } else { -1.0 };
        Ok(Complex64::new(((x - 4.0) * (x - 4.0) / 16.0).ln(), sign * std::f64::consts::PI))
    } else {
        let w = z - 4.0;
        principal_log(-w * w / 16.0)
    }
}

fn green_2d_embedded_impl(
    z: Complex64,
    n: &[i64],
    tol: f64,
    boundary: bool,
) -> Result<GreenValue> {
    if n.len() != 2 {
        return Err(Error::InvalidParams("expected a two-dimensional lattice point".into()));
    }
    if (z - 4.0).norm() >= 4.0 {
        return Err(Error::region("series requires |z − 4| < 4"));
    }
    if !boundary && z.im == 0.0 {
        return Err(Error::region(
            "series requires Im z ≠ 0 (use the boundary-limit mode for real z)",
        ));
    }
    if !boundary && z.im < 0.0 {
        // Schwarz reflection onto the upper half-plane
        let upper = green_2d_embedded_impl(z.conj(), n, tol, false)?;
        return Ok(GreenValue {
            value: upper.value.conj(),
            ..upper
        });
    }
    let m = reduce_symmetry(n);
    let (n1, n2) = (m[0], m[1]);
    let sgn = neg_one_pow(n1) as f64; // (−1)^{max{|n₁|,|n₂|}}
    let w4 = (z - 4.0) / 4.0;
    let ratio = w4 * w4;
    let l_value = interior_log_factor(z, boundary)?;
    let mut terms = 0usize;
    let value = if (n1 + n2) % 2 == 0 {
        // even |n|: terminating part weighted by |n₁+n₂||n₁−n₂|/4, plus the
        // (i/4π)-weighted digamma/log series with half-odd parameters
        let mut analytic = Complex64::zero();
        if n1 + n2 > 0 && n1 - n2 > 0 {
            let p = PfqParams::new(
                vec![
                    HalfInt::new(2 + n1 + n2),
                    HalfInt::new(2 - n1 - n2),
                    HalfInt::new(2 + n1 - n2),
                    HalfInt::new(2 - n1 + n2),
                ],
                vec![hi(1), HalfInt::THREE_HALVES, HalfInt::THREE_HALVES],
            )?;
            let v = eval_pfq(&p, ratio, tol, MAX_TERMS)?;
            terms += v.terms_used;
            analytic = sgn
                * ((n1 + n2) as f64 / 2.0)
                * ((n1 - n2) as f64 / 2.0)
                * w4
                * v.value;
        }
        let series = LogSeries {
            num_bases: vec![
                HalfInt::new(1 + n1 + n2),
                HalfInt::new(1 + n1 - n2),
                HalfInt::new(1 - n1 + n2),
                HalfInt::new(1 - n1 - n2),
            ],
            lower_base: HalfInt::HALF,
            lower_pow: 2,
            psi_plus: vec![HalfInt::HALF],
            psi_minus: vec![
                HalfInt::new(1 + n1 + n2),
                HalfInt::new(1 + n1 - n2),
                HalfInt::new(1 - n1 + n2),
                HalfInt::new(1 - n1 - n2),
            ],
        };
        let (s, used) = series.sum(ratio, l_value, tol)?;
        terms += used;
        analytic + Complex64::new(0.0, sgn / (4.0 * std::f64::consts::PI)) * s
    } else {
        // odd |n|: terminating part with weight ¼, plus the (i/π)-weighted
        // digamma/log series carrying the extra (z−4)/4 factor
        let p = PfqParams::new(
            vec![
                HalfInt::new(1 + n1 + n2),
                HalfInt::new(1 + n1 - n2),
                HalfInt::new(1 - n1 + n2),
                HalfInt::new(1 - n1 - n2),
            ],
            vec![hi(1), HalfInt::HALF, HalfInt::HALF],
        )?;
        let v = eval_pfq(&p, ratio, tol, MAX_TERMS)?;
        terms += v.terms_used;
        let analytic = sgn / 4.0 * v.value;
        let series = LogSeries {
            num_bases: vec![
                HalfInt::new(2 + n1 + n2),
                HalfInt::new(2 + n1 - n2),
                HalfInt::new(2 - n1 + n2),
                HalfInt::new(2 - n1 - n2),
            ],
            lower_base: HalfInt::THREE_HALVES,
            lower_pow: 2,
            psi_plus: vec![HalfInt::THREE_HALVES],
            psi_minus: vec![
                HalfInt::new(2 + n1 + n2),
                HalfInt::new(2 + n1 - n2),
                HalfInt::new(2 - n1 + n2),
                HalfInt::new(2 - n1 - n2),
            ],
        };
        let (s, used) = series.sum(ratio, l_value, tol)?;
        terms += used;
        let weight = ((n1 + n2) as f64 / 2.0) * ((n1 - n2) as f64 / 2.0);
        analytic + Complex64::new(0.0, sgn / std::f64::consts::PI) * weight * w4 * s
    };
    Ok(GreenValue {
        value,
        representation: Representation::Embedded2d,
        terms_used: terms,
        err_estimate: tol * value.norm(),
    })
}

/// d = 2 series around the interior spectral point z = 4
/// (|z − 4| < 4, Im z ≠ 0; the lower half-plane is reached by reflection).
pub fn green_2d_embedded(z: Complex64, n: &[i64], tol: f64) -> Result<GreenValue> {
    green_2d_embedded_impl(z, n, tol, false)
}

/// Boundary values G(x + i0, n) on the open interval (0, 8) ∖ {4}: the same
/// series with the log factor replaced by its upper-boundary limit
/// log((x−4)²/16) + iπ·sign(4−x).
pub fn green_2d_embedded_boundary(x: f64, n: &[i64], tol: f64) -> Result<GreenValue> {
    green_2d_embedded_impl(Complex64::new(x, 0.0), n, tol, true)
}

/// Which diagonal series to use in [`diag_p0`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagForm {
    /// expansion around the interior point 4 (|z−4| < 4, Im z ≠ 0)
    Interior,
    /// simultaneous expansion around the endpoints 0 and 8
    /// (|z(8−z)| < 16, Re z ≠ 4)
    Endpoint,
}

fn diag_series(
    m: i64,
    ratio: Complex64,
    l_value: Complex64,
    tol: f64,
) -> Result<(Complex64, usize)> {
    let series = LogSeries {
        num_bases: vec![HalfInt::HALF + m, HalfInt::HALF - m],
        lower_base: hi(1),
        lower_pow: 0, // denominator is k!² alone: c_k = (½+m)_k(½−m)_k / k!²
        psi_plus: vec![],
        psi_minus: vec![HalfInt::HALF + m, HalfInt::HALF - m],
    };
    series.sum(ratio, l_value, tol)
}

/// Signed diagonal value P₀(m) = (−1)^m G(z, m, m) by the requested series.
pub fn diag_p0(z: Complex64, m: i64, form: DiagForm, tol: f64) -> Result<Complex64> {
    match form {
        DiagForm::Interior => {
            if (z - 4.0).norm() >= 4.0 {
                return Err(Error::region("diagonal series requires |z − 4| < 4"));
            }
            if z.im == 0.0 {
                return Err(Error::region("diagonal series requires Im z ≠ 0"));
            }
            if z.im < 0.0 {
                return Ok(diag_p0(z.conj(), m, form, tol)?.conj());
            }
            let w4 = (z - 4.0) / 4.0;
            let l_value = principal_log(-w4 * w4 * Complex64::new(1.0, 0.0))?;
            let (s, _) = diag_series(m, w4 * w4, l_value, tol)?;
            Ok(Complex64::new(0.0, 1.0 / (4.0 * std::f64::consts::PI)) * s)
        }
        DiagForm::Endpoint => {
            let arg = z * (8.0 - z) / 16.0;
            if arg.norm() >= 1.0 {
                return Err(Error::region("diagonal series requires |z(8 − z)| < 16"));
            }
            if z.re == 4.0 {
                return Err(Error::region("diagonal series requires Re z ≠ 4"));
            }
            let sign = if 4.0 - z.re > 0.0 { 1.0 } else { -1.0 };
            let l_value = principal_log(z * (z - 8.0) / 16.0)?;
            let (s, _) = diag_series(m, arg, l_value, tol)?;
            Ok(sign * neg_one_pow(m) as f64 / (4.0 * std::f64::consts::PI) * s)
        }
    }
}

/// Negative-control variant of the interior diagonal series with the
/// expansion variable scaled by 1/16 instead of 1/4. Retained only so the
/// regression tests can demonstrate that this scaling disagrees with every
/// other representation; never used by the dispatcher.
pub fn diag_p0_interior_misscaled(z: Complex64, m: i64, tol: f64) -> Result<Complex64> {
    if (z - 4.0).norm() >= 4.0 || z.im == 0.0 {
        return Err(Error::region("diagonal series requires |z − 4| < 4, Im z ≠ 0"));
    }
    if z.im < 0.0 {
        return Ok(diag_p0_interior_misscaled(z.conj(), m, tol)?.conj());
    }
    let w4 = (z - 4.0) / 4.0;
    let w16 = (z - 4.0) / 16.0;
    let l_value = principal_log(-w4 * w4)?;
    let (s, _) = diag_series(m, w16 * w16, l_value, tol)?;
    Ok(Complex64::new(0.0, 1.0 / (4.0 * std::f64::consts::PI)) * s)
}

/// P₀(m) by whichever diagonal representation covers z, preferring the
/// endpoint form, then the interior form, then the wide-disk single sum.
pub fn diag_p0_any(z: Complex64, m: i64, tol: f64) -> Result<Complex64> {
    let on_spectrum = z.im == 0.0 && (0.0..=8.0).contains(&z.re);
    if on_spectrum {
        return Err(Error::region("z lies on the spectrum [0, 8]"));
    }
    if (z * (8.0 - z)).norm() < 16.0 && z.re != 4.0 {
        return diag_p0(z, m, DiagForm::Endpoint, tol);
    }
    if (z - 4.0).norm() < 4.0 && z.im != 0.0 {
        return diag_p0(z, m, DiagForm::Interior, tol);
    }
    if (Complex64::new(4.0, 0.0) - z).norm() > 4.0 {
        let g = green_laurent_2d(z, &[m.abs(), m.abs()], tol)?;
        return Ok(neg_one_pow(m) as f64 * g.value);
    }
    Err(Error::UnsupportedRegion { dim: 2, z })
}

fn pfq4_int(a: [i64; 4], lower: [HalfInt; 3], w: Complex64, tol: f64) -> Result<Complex64> {
    let p = PfqParams::new(a.iter().map(|&x| hi(x)).collect(), lower.to_vec())?;
    Ok(eval_pfq(&p, w, tol, MAX_TERMS)?.value)
}

/// Rotated-frame quantities for the endpoint formulas: for |n| even,
/// G = (−1)^{m+l} P(m,l) with (m,l) = ((n₁+n₂)/2, (n₁−n₂)/2); for |n| odd,
/// G = (−1)^{m+l} Q(m,l) with (m,l) = ((n₁+n₂−1)/2, (n₁−n₂−1)/2), indices
/// taken after symmetry reduction so that (m,l) ∈ N₀².
fn endpoint_coordinates(n: &[i64]) -> (i64, i64, bool) {
    let m = reduce_symmetry(n);
    let (n1, n2) = (m[0], m[1]);
    if (n1 + n2) % 2 == 0 {
        ((n1 + n2) / 2, (n1 - n2) / 2, true)
    } else {
        ((n1 + n2 - 1) / 2, (n1 - n2 - 1) / 2, false)
    }
}

fn p_value_hyper(
    z: Complex64,
    m: i64,
    l: i64,
    p0: &[Complex64],
    tol: f64,
) -> Result<Complex64> {
    let w = (z - 4.0) * (z - 4.0) / 16.0;
    let half = HalfInt::HALF;
    let three_halves = HalfInt::THREE_HALVES;
    let one = hi(1);
    let mut total = Complex64::zero();
    if m > 0 && l > 0 {
        total += (z - 4.0) / 4.0
            * (m * l) as f64
            * pfq4_int([1 + m, 1 - m, 1 + l, 1 - l], [one, three_halves, three_halves], w, tol)?;
    }
    total += p0[0] * pfq4_int([m, -m, l, -l], [one, half, half], w, tol)?;
    for mu in 1..=m {
        total += (p0[mu as usize] - p0[mu as usize - 1])
            * pfq4_int([1 + m - mu, mu - m, l, -l], [one, half, half], w, tol)?;
    }
    for nu in 1..=l {
        total += (p0[nu as usize] - p0[nu as usize - 1])
            * pfq4_int([m, -m, 1 + l - nu, nu - l], [one, half, half], w, tol)?;
    }
    Ok(total)
}

fn q_value_hyper(
    z: Complex64,
    m: i64,
    l: i64,
    p0: &[Complex64],
    tol: f64,
) -> Result<Complex64> {
    let w = (z - 4.0) * (z - 4.0) / 16.0;
    let half = HalfInt::HALF;
    let three_halves = HalfInt::THREE_HALVES;
    let one = hi(1);
    let zf = (z - 4.0) / 4.0;
    let mut total = Complex64::new(-0.25, 0.0)
        * pfq4_int([1 + m, -m, 1 + l, -l], [one, half, half], w, tol)?;
    total += zf
        * ((2 * m + 1) * (2 * l + 1)) as f64
        * p0[0]
        * pfq4_int([1 + m, -m, 1 + l, -l], [one, three_halves, three_halves], w, tol)?;
    for mu in -m..=m {
        let amu = mu.unsigned_abs() as usize;
        total -= zf
            * (2 * l + 1) as f64
            * p0[amu]
            * pfq4_int(
                [1 + m - amu as i64, amu as i64 - m, 1 + l, -l],
                [one, half, three_halves],
                w,
                tol,
            )?;
    }
    for nu in -l..=l {
        let anu = nu.unsigned_abs() as usize;
        total -= zf
            * (2 * m + 1) as f64
            * p0[anu]
            * pfq4_int(
                [1 + m, -m, 1 + l - anu as i64, anu as i64 - l],
                [one, half, three_halves],
                w,
                tol,
            )?;
    }
    Ok(total)
}

fn endpoint_diag_values(z: Complex64, up_to: i64, tol: f64) -> Result<Vec<Complex64>> {
    (0..=up_to).map(|m| diag_p0_any(z, m, tol)).collect()
}

/// Finite-hypergeometric evaluation around the spectral endpoints, valid on
/// all of C ∖ [0, 8]: every series terminates, and the diagonal inputs P₀ are
/// supplied by whichever diagonal representation covers z.
pub fn green_2d_endpoint(z: Complex64, n: &[i64], tol: f64) -> Result<GreenValue> {
    if n.len() != 2 {
        return Err(Error::InvalidParams("expected a two-dimensional lattice point".into()));
    }
    if z.im == 0.0 && (0.0..=8.0).contains(&z.re) {
        return Err(Error::region("evaluation requires z off [0, 8]"));
    }
    let (m, l, even) = endpoint_coordinates(n);
    let p0 = endpoint_diag_values(z, m.max(l), tol)?;
    let v = if even {
        p_value_hyper(z, m, l, &p0, tol)?
    } else {
        q_value_hyper(z, m, l, &p0, tol)?
    };
    let value = neg_one_pow(m + l) as f64 * v;
    Ok(GreenValue {
        value,
        representation: Representation::Endpoint2d,
        terms_used: 0,
        err_estimate: tol * value.norm(),
    })
}

/// Independent evaluation of the same rotated-frame quantities by dynamic
/// programming on the five-point recurrence: the double-sum weights
/// (m−|μ|)(l−|ν|) vanish on the boundary, so
/// P(m,l) = ¼ml(z−4) − P₀(0) + P₀(m) + P₀(l) + ¼(z−4)² Σ Σ (m−|μ|)(l−|ν|) P(μ,ν)
/// is an explicit recursion, and
/// Q(m,l) = −¼ − ((z−4)/4) Σ_{|μ|≤m} Σ_{|ν|≤l} P(μ,ν).
pub fn green_2d_recurrence(z: Complex64, n: &[i64], tol: f64) -> Result<GreenValue> {
    if n.len() != 2 {
        return Err(Error::InvalidParams("expected a two-dimensional lattice point".into()));
    }
    if z.im == 0.0 && (0.0..=8.0).contains(&z.re) {
        return Err(Error::region("evaluation requires z off [0, 8]"));
    }
    let (m, l, even) = endpoint_coordinates(n);
    let pm = m.max(l); // build a square table; cheap at this scale
    let p0 = endpoint_diag_values(z, pm, tol)?;
    let dim = (pm + 1) as usize;
    let mut table = vec![vec![Complex64::zero(); dim]; dim];
    let quarter_z = (z - 4.0) / 4.0;
    let z_sq = (z - 4.0) * (z - 4.0) / 4.0;
    for i in 0..dim {
        table[i][0] = p0[i];
        table[0][i] = p0[i];
    }
    for i in 1..dim {
        for j in 1..=i {
            // fold the symmetric sums over |μ| ≤ i−1, |ν| ≤ j−1
            let mut inner = Complex64::zero();
            for mu in 0..i {
                let wmu = (i - mu) as f64 * if mu == 0 { 1.0 } else { 2.0 };
                for nu in 0..j {
                    let wnu = (j - nu) as f64 * if nu == 0 { 1.0 } else { 2.0 };
                    inner += wmu * wnu * table[mu.max(nu)][mu.min(nu)];
                }
            }
            let val = 0.25 * (i * j) as f64 * (z - 4.0) - p0[0]
                + p0[i]
                + p0[j]
                + z_sq * inner;
            table[i][j] = val;
        }
    }
    let p_at = |a: usize, b: usize| table[a.max(b)][a.min(b)];
    let value = if even {
        neg_one_pow(m + l) as f64 * p_at(m as usize, l as usize)
    } else {
        let mut sum = Complex64::zero();
        for mu in 0..=m as usize {
            let wmu = if mu == 0 { 1.0 } else { 2.0 };
            for nu in 0..=l as usize {
                let wnu = if nu == 0 { 1.0 } else { 2.0 };
                sum += wmu * wnu * p_at(mu, nu);
            }
        }
        let q = Complex64::new(-0.25, 0.0) - quarter_z * sum;
        neg_one_pow(m + l) as f64 * q
    };
    Ok(GreenValue {
        value,
        representation: Representation::Recurrence2d,
        terms_used: dim * dim,
        err_estimate: tol * value.norm(),
    })
}

/// Exact telescoped Pochhammer sum Σ_{j=p}^q (j+r)_k =
/// ((q+r)_{k+1} − (p+r−1)_{k+1}) / (k+1).
pub fn pochhammer_telescoping(p: i64, q: i64, r: HalfInt, k: u32) -> BigRational {
    assert!(p <= q, "requires p ≤ q");
    let upper = pochhammer(r + q, k + 1);
    let lower = pochhammer(r + (p - 1), k + 1);
    (upper - lower) / BigRational::from_integer((k as i64 + 1).into())
}

/// Region-aware dispatcher.
///
/// d = 1 always uses the closed form; d = 2 prefers the wide-disk single sum
/// (|4−z| > 4), then the endpoint formulas (|z(8−z)| < 16, Re z ≠ 4), then
/// the interior-threshold series (|z−4| < 4, Im z ≠ 0); d ≥ 3 has only the
/// wide-disk expansion.
pub fn green_auto(d: usize, z: Complex64, n: &[i64], tol: f64) -> Result<GreenValue> {
    if n.len() != d || d == 0 {
        return Err(Error::InvalidParams("dimension mismatch".into()));
    }
    if z.im == 0.0 && (0.0..=4.0 * d as f64).contains(&z.re) {
        return Err(Error::region(format!("z = {} lies on the spectrum [0, {}]", z, 4 * d)));
    }
    match d {
        1 => green_1d(z, n[0]),
        2 => {
            if (Complex64::new(4.0, 0.0) - z).norm() > 4.0 {
                green_laurent_2d(z, n, tol)
            } else if (z * (8.0 - z)).norm() < 16.0 && z.re != 4.0 {
                green_2d_endpoint(z, n, tol)
            } else if (z - 4.0).norm() < 4.0 && z.im != 0.0 {
                green_2d_embedded(z, n, tol)
            } else {
                Err(Error::UnsupportedRegion { dim: 2, z })
            }
        }
        _ => {
            if (Complex64::new(2.0 * d as f64, 0.0) - z).norm() > 2.0 * d as f64 {
                green_laurent(d, z, n, tol)
            } else {
                Err(Error::UnsupportedRegion { dim: d, z })
            }
        }
    }
}

/// Residual of the lattice Helmholtz identity at n: for d = 2,
/// (4−z)G(n) − G(n±e₁) − G(n±e₂), which must equal δ₀[n]; for d = 1 the
/// three-point analogue (2−z)G(n) − G(n+1) − G(n−1).
pub fn helmholtz_residual(
    d: usize,
    z: Complex64,
    n: &[i64],
    mut eval: impl FnMut(&[i64]) -> Result<Complex64>,
) -> Result<Complex64> {
    let center = eval(n)?;
    let mut acc = (Complex64::new(2.0 * d as f64, 0.0) - z) * center;
    for j in 0..d {
        for step in [-1i64, 1] {
            let mut shifted = n.to_vec();
            shifted[j] += step;
            acc -= eval(&shifted)?;
        }
    }
    Ok(acc)
}
