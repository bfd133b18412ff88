//! Cross-checks tying the representations together:
//!
//! * exact shell identities equating diagonal Pochhammer sums with products
//!   of half-integer Pochhammer symbols (the coefficient-level statement that
//!   two singular-part expansions agree),
//! * numeric reduction identities expressing a two-variable type-B
//!   Appell–Lauricella function on the diagonal through ₂F₁·₄F₃ sums,
//! * the one-step convolution identity of simple-random-walk probabilities,
//! * cut-cancellation checks: the jump of the kernel across the spectrum
//!   near a threshold is carried entirely by an explicit log/sqrt singular
//!   part, so subtracting it must shrink the two-sided difference.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hyper::{eval_lauricella_fb, eval_pfq, LauricellaB, PfqParams};
use crate::oracles::walk_prob_exact;
use crate::resolvent::{
    green_1d, green_2d_embedded, green_2d_embedded_boundary, green_2d_endpoint,
};
use crate::special::{
    factorial_big, neg_one_pow, pochhammer, principal_log, principal_sqrt, HalfInt,
};

const MAX_TERMS: usize = 2_000_000;

fn rat_int(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// Exact value of the alternating diagonal shell sum
/// Σ_{α₁+α₂=j} (−1)^{α₁}/(α₁!α₂!) (½+n₁)_{α₁}(½−n₁)_{α₁}(½+n₂)_{α₂}(½−n₂)_{α₂}.
pub fn shell_sum_exact(n1: i64, n2: i64, j: u32) -> BigRational {
    let mut acc = BigRational::zero();
    for a1 in 0..=j {
        let a2 = j - a1;
        let term = pochhammer(HalfInt::HALF + n1, a1)
            * pochhammer(HalfInt::HALF - n1, a1)
            * pochhammer(HalfInt::HALF + n2, a2)
            * pochhammer(HalfInt::HALF - n2, a2)
            / BigRational::from_integer(factorial_big(a1) * factorial_big(a2));
        if a1 % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Closed product form of the even shell sum:
/// 4^{2k}/(2k)! ((1+n₁+n₂)/2)_k ((1+n₁−n₂)/2)_k ((1−n₁+n₂)/2)_k ((1−n₁−n₂)/2)_k.
pub fn shell_product_even(n1: i64, n2: i64, k: u32) -> BigRational {
    rat_int(4).pow(2 * k as i32) / BigRational::from_integer(factorial_big(2 * k))
        * pochhammer(HalfInt::new(1 + n1 + n2), k)
        * pochhammer(HalfInt::new(1 + n1 - n2), k)
        * pochhammer(HalfInt::new(1 - n1 + n2), k)
        * pochhammer(HalfInt::new(1 - n1 - n2), k)
}

/// Closed product form of the odd shell sum:
/// 4^{2k+1}/(2k+1)! ((n₁+n₂)/2)_{k+1} ((n₁−n₂)/2)_{k+1} ((2−n₁+n₂)/2)_k ((2−n₁−n₂)/2)_k.
pub fn shell_product_odd(n1: i64, n2: i64, k: u32) -> BigRational {
    rat_int(4).pow(2 * k as i32 + 1) / BigRational::from_integer(factorial_big(2 * k + 1))
        * pochhammer(HalfInt::new(n1 + n2), k + 1)
        * pochhammer(HalfInt::new(n1 - n2), k + 1)
        * pochhammer(HalfInt::new(2 - n1 + n2), k)
        * pochhammer(HalfInt::new(2 - n1 - n2), k)
}

/// Exact check of both shell identities at (n₁, n₂) for shell parameter k.
pub fn check_shell_identities_exact(n1: i64, n2: i64, k: u32) -> bool {
    shell_sum_exact(n1, n2, 2 * k) == shell_product_even(n1, n2, k)
        && shell_sum_exact(n1, n2, 2 * k + 1) == shell_product_odd(n1, n2, k)
}

/// Exact check of the one-step convolution identity of the simple random
/// walk: P(X_{k+1} = n) = (2d)⁻¹ Σ_j [P(X_k = n−e_j) + P(X_k = n+e_j)],
/// verified for every site reachable in k+1 steps.
pub fn check_walk_convolution_exact(d: usize, k: u32) -> bool {
    let range = k as i64 + 1;
    let mut sites: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..d {
        sites = sites
            .iter()
            .flat_map(|s| {
                (-range..=range).map(move |v| {
                    let mut t = s.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    let two_d = rat_int(2 * d as i64);
    for n in sites {
        if n.iter().map(|x| x.abs()).sum::<i64>() > range {
            continue;
        }
        let lhs = walk_prob_exact(d, k + 1, &n) * &two_d;
        let mut rhs = BigRational::zero();
        for j in 0..d {
            for step in [-1i64, 1] {
                let mut m = n.clone();
                m[j] += step;
                rhs += walk_prob_exact(d, k, &m);
            }
        }
        if lhs != rhs {
            return false;
        }
    }
    true
}

fn f21(a: HalfInt, b: HalfInt, c: HalfInt, w: Complex64, tol: f64) -> Result<Complex64> {
    let p = PfqParams::new(vec![a, b], vec![c])?;
    Ok(eval_pfq(&p, w, tol, MAX_TERMS)?.value)
}

fn f43_int(a: [i64; 4], lower: [HalfInt; 3], w: Complex64, tol: f64) -> Result<Complex64> {
    let p = PfqParams::new(
        a.iter().map(|&x| HalfInt::from_int(x)).collect(),
        lower.to_vec(),
    )?;
    Ok(eval_pfq(&p, w, tol, MAX_TERMS)?.value)
}

/// Both sides of the first diagonal reduction identity
/// (−1)^{m+l} F_B(½+m+l, ½+m−l; ½−m−l, ½−m+l; 1; w, w)
///   = ₂F₁(½,½;1;w(2−w)) ₄F₃(m,−m,l,−l;1,½,½;(w−1)²) + correction sums,
/// for real w with |w| < 1 and w(2−w) inside the unit disk.
pub fn fb_reduction_first(m: i64, l: i64, w: f64, tol: f64) -> Result<(Complex64, Complex64)> {
    let (m, l) = (m.abs(), l.abs());
    let wc = Complex64::new(w, 0.0);
    let x = wc * (2.0 - wc);
    let y = (wc - 1.0) * (wc - 1.0);
    let half = HalfInt::HALF;
    let one = HalfInt::from_int(1);
    let fb = LauricellaB::new(
        vec![half + (m + l), half + (m - l)],
        vec![half - (m + l), half - (m - l)],
        one,
    )?;
    let lhs = neg_one_pow(m + l) as f64
        * eval_lauricella_fb(&fb, &[wc, wc], tol, 100_000)?.value;
    let mut rhs = f21(half, half, one, x, tol)? * f43_int([m, -m, l, -l], [one, half, half], y, tol)?;
    for mu in 1..=m {
        let bracket = f21(half + mu, half - mu, one, x, tol)?
            + f21(half + (mu - 1), half - (mu - 1), one, x, tol)?;
        rhs += neg_one_pow(mu) as f64
            * bracket
            * f43_int([1 + m - mu, mu - m, l, -l], [one, half, half], y, tol)?;
    }
    for nu in 1..=l {
        let bracket = f21(half + nu, half - nu, one, x, tol)?
            + f21(half + (nu - 1), half - (nu - 1), one, x, tol)?;
        rhs += neg_one_pow(nu) as f64
            * bracket
            * f43_int([m, -m, 1 + l - nu, nu - l], [one, half, half], y, tol)?;
    }
    Ok((lhs, rhs))
}

/// Both sides of the second diagonal reduction identity
/// (−1)^{m+l} F_B(3/2+m+l, ½+m−l; −½−m−l, ½−m+l; 1; w, w)
///   = (2m+1)(2l+1)(w−1) ₂F₁(½,½;1;w(2−w)) ₄F₃(1+m,−m,1+l,−l;1,3/2,3/2;(w−1)²)
///     − signed ₂F₁·₄F₃ sums over |μ| ≤ m and |ν| ≤ l.
pub fn fb_reduction_second(m: i64, l: i64, w: f64, tol: f64) -> Result<(Complex64, Complex64)> {
    let (m, l) = (m.abs(), l.abs());
    let wc = Complex64::new(w, 0.0);
    let x = wc * (2.0 - wc);
    let y = (wc - 1.0) * (wc - 1.0);
    let half = HalfInt::HALF;
    let one = HalfInt::from_int(1);
    let three_halves = HalfInt::THREE_HALVES;
    let fb = LauricellaB::new(
        vec![three_halves + (m + l), half + (m - l)],
        vec![-half - (m + l), half - (m - l)],
        one,
    )?;
    let lhs = neg_one_pow(m + l) as f64
        * eval_lauricella_fb(&fb, &[wc, wc], tol, 100_000)?.value;
    let mut rhs = ((2 * m + 1) * (2 * l + 1)) as f64
        * (wc - 1.0)
        * f21(half, half, one, x, tol)?
        * f43_int([1 + m, -m, 1 + l, -l], [one, three_halves, three_halves], y, tol)?;
    for mu in -m..=m {
        let amu = mu.abs();
        rhs -= (2 * l + 1) as f64
            * (wc - 1.0)
            * neg_one_pow(mu) as f64
            * f21(half + mu, half - mu, one, x, tol)?
            * f43_int([1 + m - amu, amu - m, 1 + l, -l], [one, half, three_halves], y, tol)?;
    }
    for nu in -l..=l {
        let anu = nu.abs();
        rhs -= (2 * m + 1) as f64
            * (wc - 1.0)
            * neg_one_pow(nu) as f64
            * f21(half + nu, half - nu, one, x, tol)?
            * f43_int([1 + m, -m, 1 + l - anu, anu - l], [one, half, three_halves], y, tol)?;
    }
    Ok((lhs, rhs))
}

/// Explicit singular part of the d = 2 kernel near threshold 4q (q = 0, 1, 2):
/// a log factor times convergent type-B Lauricella series.
pub fn singular_part_2d(q: u8, z: Complex64, n: &[i64], tol: f64) -> Result<Complex64> {
    if n.len() != 2 {
        return Err(Error::InvalidParams("expected a two-dimensional lattice point".into()));
    }
    let (n1, n2) = (n[0], n[1]);
    let half = HalfInt::HALF;
    let one = HalfInt::from_int(1);
    let fb = LauricellaB::new(
        vec![half + n1, half + n2],
        vec![half - n1, half - n2],
        one,
    )?;
    let pi = std::f64::consts::PI;
    match q {
        0 => {
            let w = z / 4.0;
            let f = eval_lauricella_fb(&fb, &[w, w], tol, 100_000)?.value;
            Ok(-principal_log(-z)? / (4.0 * pi) * f)
        }
        1 => {
            // valid for Im z > 0 only (the decomposition at the interior
            // threshold is one-sided); z.im == 0 uses the boundary limit of
            // the log from above
            if z.im < 0.0 {
                return Err(Error::region(
                    "interior singular part is defined for Im z ≥ 0 (boundary limit at Im z = 0)",
                ));
            }
            let w = (z - 4.0) / 4.0;
            let f_a = eval_lauricella_fb(&fb, &[w, -w], tol, 100_000)?.value;
            let f_b = eval_lauricella_fb(&fb, &[-w, w], tol, 100_000)?.value;
            let log = if z.im == 0.0 {
                let x = z.re;
                let sign = if x < 4.0 { 1.0 } else { -1.0 };
                Complex64::new(((x - 4.0) * (x - 4.0) / 16.0).ln(), sign * pi)
            } else {
                principal_log(-w * w)?
            };
            Ok(-Complex64::new(0.0, 1.0) / (8.0 * pi)
                * log
                * (neg_one_pow(n2) as f64 * f_a + neg_one_pow(n1) as f64 * f_b))
        }
        2 => {
            let w = (Complex64::new(8.0, 0.0) - z) / 4.0;
            let f = eval_lauricella_fb(&fb, &[w, w], tol, 100_000)?.value;
            Ok(neg_one_pow(n1 + n2) as f64 / (4.0 * pi) * principal_log(z - 8.0)? * f)
        }
        _ => Err(Error::InvalidParams("q must be 0, 1 or 2".into())),
    }
}

/// Explicit singular part of the d = 1 kernel near threshold 4q (q = 0, 1):
/// an inverse square-root factor times a convergent type-B Lauricella series.
pub fn singular_part_1d(q: u8, z: Complex64, n: i64, tol: f64) -> Result<Complex64> {
    let half = HalfInt::HALF;
    let fb = LauricellaB::new(vec![half + n], vec![half - n], half)?;
    match q {
        0 => {
            let f = eval_lauricella_fb(&fb, &[z / 4.0], tol, 100_000)?.value;
            Ok(f / (2.0 * principal_sqrt(-z)?))
        }
        1 => {
            let w = (Complex64::new(4.0, 0.0) - z) / 4.0;
            let f = eval_lauricella_fb(&fb, &[w], tol, 100_000)?.value;
            Ok(neg_one_pow(n + 1) as f64 * f / (2.0 * principal_sqrt(z - 4.0)?))
        }
        _ => Err(Error::InvalidParams("q must be 0 or 1".into())),
    }
}

/// Cut-cancellation residual for d = 2 at x near threshold 4q. For the
/// endpoint thresholds q ∈ {0, 2} this is the two-sided quantity
/// [G(x+iδ) − G(x−iδ)] − [S(x+iδ) − S(x−iδ)] with S the explicit singular
/// part: G − S extends continuously across the cut, so the residual must
/// vanish as δ → 0. The interior decomposition (q = 1) holds only for
/// Im z ≥ 0, so there the residual compares G − S at x + iδ with its
/// boundary limit at x; analyticity of the regular part again forces decay
/// linear in δ.
pub fn cut_cancellation_residual_2d(
    q: u8,
    x: f64,
    n: &[i64],
    delta: f64,
    tol: f64,
) -> Result<Complex64> {
    let z_up = Complex64::new(x, delta);
    if q == 1 {
        let a_up = green_2d_embedded(z_up, n, tol)?.value - singular_part_2d(q, z_up, n, tol)?;
        let a_boundary = green_2d_embedded_boundary(x, n, tol)?.value
            - singular_part_2d(q, Complex64::new(x, 0.0), n, tol)?;
        return Ok(a_up - a_boundary);
    }
    let z_dn = Complex64::new(x, -delta);
    let g_jump = green_2d_endpoint(z_up, n, tol)?.value - green_2d_endpoint(z_dn, n, tol)?.value;
    let s_jump = singular_part_2d(q, z_up, n, tol)? - singular_part_2d(q, z_dn, n, tol)?;
    Ok(g_jump - s_jump)
}

/// Two-sided cut-cancellation residual for d = 1 at x near threshold 4q,
/// with the closed-form kernel on both sides.
pub fn cut_cancellation_residual_1d(
    q: u8,
    x: f64,
    n: i64,
    delta: f64,
    tol: f64,
) -> Result<Complex64> {
    let z_up = Complex64::new(x, delta);
    let z_dn = Complex64::new(x, -delta);
    let g_jump = green_1d(z_up, n)?.value - green_1d(z_dn, n)?.value;
    let s_jump = singular_part_1d(q, z_up, n, tol)? - singular_part_1d(q, z_dn, n, tol)?;
    Ok(g_jump - s_jump)
}
