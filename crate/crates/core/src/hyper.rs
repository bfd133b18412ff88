//! Series evaluators for the generalized hypergeometric function ₚF_q and the
//! Appell–Lauricella functions of type B and C, with exact termination
//! detection through half-integer parameters.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::special::{ln_factorial, ln_pochhammer, HalfInt};

/// Number of consecutive sub-tolerance terms (or degree shells) required
/// before a series sum is accepted; guards against accidental zeros of
/// alternating series.
const QUIET_STREAK: usize = 3;

/// Parameters of ₚF_q(a₁..a_p; b₁..b_q; w).
#[derive(Debug, Clone)]
pub struct PfqParams {
    pub upper: Vec<HalfInt>,
    pub lower: Vec<HalfInt>,
}

impl PfqParams {
    pub fn new(upper: Vec<HalfInt>, lower: Vec<HalfInt>) -> Result<Self> {
        if let Some(b) = lower.iter().find(|b| b.is_nonpositive_integer()) {
            return Err(Error::InvalidParams(format!(
                "lower parameter {b} is a nonpositive integer"
            )));
        }
        Ok(PfqParams { upper, lower })
    }

    /// Truncation degree when some upper parameter is a nonpositive integer:
    /// the series has exactly `degree + 1` nonzero terms.
    pub fn termination_degree(&self) -> Option<u32> {
        self.upper
            .iter()
            .filter(|a| a.is_nonpositive_integer())
            .map(|a| (-a.twice() / 2) as u32)
            .min()
    }
}

/// Result of a series summation.
#[derive(Debug, Clone, Copy)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms_used: usize,
    pub err_estimate: f64,
    pub converged: bool,
}

/// Sums ₚF_q by the term-ratio recurrence.
///
/// Terminating series are summed exactly (degree + 1 terms) for any w;
/// otherwise convergence requires |w| < 1 when p = q + 1 and the sum stops
/// after three consecutive terms below `tol` relative to the partial sum.
pub fn eval_pfq(p: &PfqParams, w: Complex64, tol: f64, max_terms: usize) -> Result<SeriesValue> {
    let degree = p.termination_degree();
    if degree.is_none() {
        if p.upper.len() > p.lower.len() + 1 && w != Complex64::zero() {
            return Err(Error::Divergent(format!(
                "{}F{} has zero radius of convergence",
                p.upper.len(),
                p.lower.len()
            )));
        }
        if p.upper.len() == p.lower.len() + 1 && w.norm() >= 1.0 {
            return Err(Error::Divergent(format!(
                "non-terminating {}F{} requires |w| < 1, got |w| = {}",
                p.upper.len(),
                p.lower.len(),
                w.norm()
            )));
        }
    }

    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut streak = 0usize;
    let mut k = 0u32;
    loop {
        if let Some(d) = degree {
            if k >= d {
                return Ok(SeriesValue {
                    value: sum,
                    terms_used: (d + 1) as usize,
                    err_estimate: f64::EPSILON * sum.norm(),
                    converged: true,
                });
            }
        }
        if k as usize >= max_terms {
            return Err(Error::NoConvergence {
                terms: max_terms,
                last: term.norm(),
            });
        }
        let mut ratio = w / (k as f64 + 1.0);
        for a in &p.upper {
            ratio *= a.as_f64() + k as f64;
        }
        for b in &p.lower {
            ratio /= b.as_f64() + k as f64;
        }
        term *= ratio;
        sum += term;
        k += 1;
        if degree.is_none() {
            if term.norm() <= tol * sum.norm() {
                streak += 1;
                if streak >= QUIET_STREAK {
                    return Ok(SeriesValue {
                        value: sum,
                        terms_used: (k + 1) as usize,
                        err_estimate: term.norm(),
                        converged: true,
                    });
                }
            } else {
                streak = 0;
            }
        }
    }
}

/// Exact evaluation of a *terminating* ₚF_q at rational argument.
pub fn pfq_terminating_exact(
    upper: &[HalfInt],
    lower: &[HalfInt],
    w: &BigRational,
) -> Result<BigRational> {
    let params = PfqParams::new(upper.to_vec(), lower.to_vec())?;
    let degree = params.termination_degree().ok_or_else(|| {
        Error::InvalidParams("series does not terminate: no nonpositive-integer upper parameter".into())
    })?;
    let mut sum = BigRational::one();
    let mut term = BigRational::one();
    for k in 0..degree {
        let mut num = w.clone();
        for a in upper {
            num *= (*a + k as i64).to_rational();
        }
        let mut den = BigRational::from_integer((k as i64 + 1).into());
        for b in lower {
            den *= (*b + k as i64).to_rational();
        }
        term *= num / den;
        sum += &term;
    }
    Ok(sum)
}

/// Terminating ₚF_q at unit argument, exactly.
pub fn pfq_unit_exact(upper: &[HalfInt], lower: &[HalfInt]) -> Result<BigRational> {
    pfq_terminating_exact(upper, lower, &BigRational::one())
}

/// Parameters of the type-B Appell–Lauricella function
/// F_B^{(d)}(a₁..a_d; b₁..b_d; c; w₁..w_d).
#[derive(Debug, Clone)]
pub struct LauricellaB {
    pub a: Vec<HalfInt>,
    pub b: Vec<HalfInt>,
    pub c: HalfInt,
}

impl LauricellaB {
    pub fn new(a: Vec<HalfInt>, b: Vec<HalfInt>, c: HalfInt) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidParams("a and b sequences must have equal length".into()));
        }
        if c.is_nonpositive_integer() {
            return Err(Error::InvalidParams(format!("c = {c} is a nonpositive integer")));
        }
        Ok(LauricellaB { a, b, c })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Per-index truncation bound when a_j or b_j is a nonpositive integer.
    fn index_bound(&self, j: usize) -> Option<u32> {
        [self.a[j], self.b[j]]
            .iter()
            .filter(|q| q.is_nonpositive_integer())
            .map(|q| (-q.twice() / 2) as u32)
            .min()
    }
}

/// Parameters of the type-C Appell–Lauricella function
/// F_C^{(d)}(a, b; c₁..c_d; w₁..w_d).
#[derive(Debug, Clone)]
pub struct LauricellaC {
    pub a: HalfInt,
    pub b: HalfInt,
    pub c: Vec<HalfInt>,
}

impl LauricellaC {
    pub fn new(a: HalfInt, b: HalfInt, c: Vec<HalfInt>) -> Result<Self> {
        if let Some(cj) = c.iter().find(|cj| cj.is_nonpositive_integer()) {
            return Err(Error::InvalidParams(format!("c parameter {cj} is a nonpositive integer")));
        }
        Ok(LauricellaC { a, b, c })
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    fn total_degree_bound(&self) -> Option<u32> {
        [self.a, self.b]
            .iter()
            .filter(|q| q.is_nonpositive_integer())
            .map(|q| (-q.twice() / 2) as u32)
            .min()
    }
}

fn for_each_composition(total: u32, parts: usize, f: &mut impl FnMut(&[u32])) {
    let mut alpha = vec![0u32; parts];
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
    rec(total, 0, &mut alpha, f);
}

fn powers(w: Complex64, alpha: u32) -> Complex64 {
    if alpha == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        w.powi(alpha as i32)
    }
}

/// Shared shell-summation driver: `shell(s)` returns the total contribution
/// of multi-indices with |α| = s, plus the number of nonzero terms.
fn sum_shells(
    tol: f64,
    max_total_degree: u32,
    exact_bound: Option<u32>,
    mut shell: impl FnMut(u32) -> (Complex64, usize),
) -> Result<SeriesValue> {
    let mut sum = Complex64::zero();
    let mut terms = 0usize;
    let mut streak = 0usize;
    let mut last_mass = 0.0f64;
    let mut s = 0u32;
    loop {
        if let Some(bound) = exact_bound {
            if s > bound {
                return Ok(SeriesValue {
                    value: sum,
                    terms_used: terms,
                    err_estimate: f64::EPSILON * sum.norm(),
                    converged: true,
                });
            }
        }
        if s > max_total_degree {
            return Err(Error::NoConvergence { terms, last: last_mass });
        }
        let (contrib, n) = shell(s);
        sum += contrib;
        terms += n;
        last_mass = contrib.norm();
        if exact_bound.is_none() {
            if last_mass <= tol * sum.norm() {
                streak += 1;
                if streak >= QUIET_STREAK {
                    return Ok(SeriesValue {
                        value: sum,
                        terms_used: terms,
                        err_estimate: last_mass,
                        converged: true,
                    });
                }
            } else {
                streak = 0;
            }
        }
        s += 1;
    }
}

/// Sums F_B^{(d)} over multi-indices grouped by total degree.
pub fn eval_lauricella_fb(
    p: &LauricellaB,
    w: &[Complex64],
    tol: f64,
    max_total_degree: u32,
) -> Result<SeriesValue> {
    let d = p.dim();
    if w.len() != d {
        return Err(Error::InvalidParams(format!(
            "argument length {} does not match dimension {d}",
            w.len()
        )));
    }
    let bounds: Vec<Option<u32>> = (0..d).map(|j| p.index_bound(j)).collect();
    for j in 0..d {
        if bounds[j].is_none() && w[j].norm() >= 1.0 {
            return Err(Error::Divergent(format!(
                "type-B series requires |w_{j}| < 1, got {}",
                w[j].norm()
            )));
        }
    }
    let exact_bound = bounds
        .iter()
        .map(|b| *b)
        .collect::<Option<Vec<u32>>>()
        .map(|bs| bs.iter().sum());

    sum_shells(tol, max_total_degree, exact_bound, |s| {
        let mut contrib = Complex64::zero();
        let mut n_terms = 0usize;
        let ln_poch_c = ln_pochhammer(p.c, s);
        for_each_composition(s, d, &mut |alpha| {
            let mut sign = 1.0f64;
            let mut ln = 0.0f64;
            for j in 0..d {
                if let Some(bound) = bounds[j] {
                    if alpha[j] > bound {
                        return;
                    }
                }
                match (ln_pochhammer(p.a[j], alpha[j]), ln_pochhammer(p.b[j], alpha[j])) {
                    (Some((sa, la)), Some((sb, lb))) => {
                        sign *= sa * sb;
                        ln += la + lb - ln_factorial(alpha[j]);
                    }
                    _ => return,
                }
            }
            let (sc, lc) = ln_poch_c.expect("(c)_s nonzero: c is not a nonpositive integer");
            sign /= sc;
            ln -= lc;
            let mut term = Complex64::new(sign * ln.exp(), 0.0);
            for j in 0..d {
                term *= powers(w[j], alpha[j]);
            }
            contrib += term;
            n_terms += 1;
        });
        (contrib, n_terms)
    })
}

/// Sums F_C^{(d)} over multi-indices grouped by total degree.
///
/// The convergence domain is enforced conservatively through the sufficient
/// condition Σ_j √|w_j| < 1 unless the series terminates.
pub fn eval_lauricella_fc(
    p: &LauricellaC,
    w: &[Complex64],
    tol: f64,
    max_total_degree: u32,
) -> Result<SeriesValue> {
    let d = p.dim();
    if w.len() != d {
        return Err(Error::InvalidParams(format!(
            "argument length {} does not match dimension {d}",
            w.len()
        )));
    }
    let exact_bound = p.total_degree_bound();
    if exact_bound.is_none() {
        let sqrt_sum: f64 = w.iter().map(|wj| wj.norm().sqrt()).sum();
        if sqrt_sum >= 1.0 {
            return Err(Error::Divergent(format!(
                "type-C series requires Σ √|w_j| < 1, got {sqrt_sum}"
            )));
        }
    }

    sum_shells(tol, max_total_degree, exact_bound, |s| {
        let mut contrib = Complex64::zero();
        let mut n_terms = 0usize;
        let front = match (ln_pochhammer(p.a, s), ln_pochhammer(p.b, s)) {
            (Some((sa, la)), Some((sb, lb))) => Some((sa * sb, la + lb)),
            _ => None,
        };
        let Some((front_sign, front_ln)) = front else {
            return (contrib, 0);
        };
        for_each_composition(s, d, &mut |alpha| {
            let mut sign = front_sign;
            let mut ln = front_ln;
            for j in 0..d {
                let (sc, lc) = ln_pochhammer(p.c[j], alpha[j])
                    .expect("(c_j)_k nonzero: c_j is not a nonpositive integer");
                sign /= sc;
                ln -= lc + ln_factorial(alpha[j]);
            }
            let mut term = Complex64::new(sign * ln.exp(), 0.0);
            for j in 0..d {
                term *= powers(w[j], alpha[j]);
            }
            contrib += term;
            n_terms += 1;
        });
        (contrib, n_terms)
    })
}
