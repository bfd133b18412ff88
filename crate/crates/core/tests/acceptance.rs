//! Acceptance suite: nine end-to-end criteria, each printed as a single
//! pass/fail line. The process exits nonzero if any criterion fails.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use lattice_green::fundsol::{fundsol_h0, stencil_residual_exact, LatticeOp};
use lattice_green::identities::{
    check_shell_identities_exact, check_walk_convolution_exact, cut_cancellation_residual_2d,
    fb_reduction_first, fb_reduction_second,
};
use lattice_green::oracles::{
    laplace_bessel, laplace_bessel_closed, quadrature_torus, walk_expectation, walk_prob_exact,
    WalkConfig,
};
use lattice_green::resolvent::{
    diag_p0, diag_p0_interior_misscaled, green_1d, green_1d_threshold0, green_1d_threshold4,
    green_2d_embedded, green_2d_endpoint, green_2d_recurrence, green_auto, green_laurent,
    green_laurent_2d, helmholtz_residual, DiagForm,
};

const TOL: f64 = 1e-13;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

struct Report {
    failures: usize,
}

impl Report {
    fn criterion(&mut self, idx: usize, label: &str, outcome: Result<String, String>) {
        match outcome {
            Ok(detail) => println!("[PASS] criterion {idx}: {label} — {detail}"),
            Err(detail) => {
                self.failures += 1;
                println!("[FAIL] criterion {idx}: {label} — {detail}");
            }
        }
    }
}

/// Lattice points of Z² with |n₁| ≤ bound and |n₂| ≤ bound.
fn box_2d(bound: i64) -> Vec<[i64; 2]> {
    let mut v = Vec::new();
    for n1 in -bound..=bound {
        for n2 in -bound..=bound {
            v.push([n1, n2]);
        }
    }
    v
}

/// Which d = 2 series apply at z (off the spectrum).
struct Regions2d {
    wide_disk: bool,
    endpoint: bool,
    interior: bool,
}

fn regions_2d(z: Complex64) -> Regions2d {
    let off_cut = !(z.im == 0.0 && (0.0..=8.0).contains(&z.re));
    Regions2d {
        wide_disk: (c(4.0, 0.0) - z).norm() > 4.0,
        endpoint: off_cut && (z * (8.0 - z)).norm() < 16.0 && z.re != 4.0,
        interior: (z - 4.0).norm() < 4.0 && z.im != 0.0,
    }
}

/// Criterion 1: at 20 spectral parameters spanning every region (7 for
/// d = 1, 13 for d = 2), each applicable representation agrees with torus
/// quadrature to 1e−9 relative, |n_j| ≤ 4.
fn quadrature_equivalence() -> Result<String, String> {
    let tol = 1e-9;
    let mut max_dev = 0.0f64;
    let mut checked = 0usize;
    let mut check = |g: Complex64, q: Complex64, what: String| -> Result<(), String> {
        let dev = (g - q).norm() / q.norm().max(1.0);
        max_dev = max_dev.max(dev);
        checked += 1;
        if dev <= tol {
            Ok(())
        } else {
            Err(format!("{what}: deviation {dev:.3e} > {tol:.0e}"))
        }
    };
    let z1: [Complex64; 7] = [
        c(-2.0, 0.0),
        c(-0.5, 0.0),
        c(6.0, 0.0),
        c(4.5, 0.0),
        c(-1.0, 2.0),
        c(2.0, 3.0),
        c(5.0, 1.0),
    ];
    for z in z1 {
        for n in [0i64, 1, 2, 4] {
            let q = quadrature_torus(1, z, &[n], 4096)
                .map_err(|e| e.to_string())?
                .value;
            check(
                green_1d(z, n).map_err(|e| e.to_string())?.value,
                q,
                format!("d=1 closed z={z} n={n}"),
            )?;
            if z.norm() < 4.0 && !(z.im == 0.0 && z.re >= 0.0) {
                check(
                    green_1d_threshold0(z, n, TOL).map_err(|e| e.to_string())?.value,
                    q,
                    format!("d=1 lower-threshold z={z} n={n}"),
                )?;
            }
            if (z - 4.0).norm() < 4.0 && !(z.im == 0.0 && z.re <= 4.0) {
                check(
                    green_1d_threshold4(z, n, TOL).map_err(|e| e.to_string())?.value,
                    q,
                    format!("d=1 upper-threshold z={z} n={n}"),
                )?;
            }
        }
    }
    let z2: [Complex64; 13] = [
        c(-4.0, 0.0),
        c(-1.0, 3.0),
        c(9.0, 0.0),
        c(8.5, 0.5),
        c(-12.0, 0.0),
        c(-0.5, 0.0),
        c(0.2, 0.1),
        c(7.8, 0.1),
        c(-0.3, -0.2),
        c(8.4, 0.0),
        c(4.0, 0.5),
        c(3.0, 1.0),
        c(4.0, -0.5),
    ];
    for z in z2 {
        let regions = regions_2d(z);
        for n in [[0i64, 0], [1, 0], [1, 1], [2, 1], [4, 3]] {
            let q = quadrature_torus(2, z, &n, 1024)
                .map_err(|e| e.to_string())?
                .value;
            if regions.wide_disk {
                check(
                    green_laurent_2d(z, &n, TOL).map_err(|e| e.to_string())?.value,
                    q,
                    format!("d=2 single-sum z={z} n={n:?}"),
                )?;
                check(
                    green_laurent(2, z, &n, TOL).map_err(|e| e.to_string())?.value,
                    q,
                    format!("d=2 multi-index z={z} n={n:?}"),
                )?;
            }
            if regions.endpoint {
                check(
                    green_2d_endpoint(z, &n, TOL).map_err(|e| e.to_string())?.value,
                    q,
                    format!("d=2 endpoint z={z} n={n:?}"),
                )?;
                check(
                    green_2d_recurrence(z, &n, TOL).map_err(|e| e.to_string())?.value,
                    q,
                    format!("d=2 recurrence z={z} n={n:?}"),
                )?;
            }
            if regions.interior {
                check(
                    green_2d_embedded(z, &n, TOL).map_err(|e| e.to_string())?.value,
                    q,
                    format!("d=2 interior z={z} n={n:?}"),
                )?;
            }
        }
    }
    Ok(format!(
        "{checked} comparisons, max relative deviation {max_dev:.3e} ≤ {tol:.0e}"
    ))
}

/// Criterion 2: the stencil identity (2d − z)G(n) − Σ G(n ± e_j) = δ₀[n]
/// holds to 1e−9 over |n_j| ≤ 6 for every representation in its region.
fn helmholtz_identity() -> Result<String, String> {
    let tol = 1e-9;
    let mut max_dev = 0.0f64;
    type Eval2 = (&'static str, Complex64, fn(Complex64, &[i64]) -> Result<Complex64, String>);
    let cases: [Eval2; 4] = [
        ("single-sum", c(-4.0, 0.0), |z, p| {
            Ok(green_laurent_2d(z, p, TOL).map_err(|e| e.to_string())?.value)
        }),
        ("endpoint", c(-0.5, 0.0), |z, p| {
            Ok(green_2d_endpoint(z, p, TOL).map_err(|e| e.to_string())?.value)
        }),
        ("recurrence", c(0.2, 0.1), |z, p| {
            Ok(green_2d_recurrence(z, p, TOL).map_err(|e| e.to_string())?.value)
        }),
        ("interior", c(4.0, 0.5), |z, p| {
            Ok(green_2d_embedded(z, p, TOL).map_err(|e| e.to_string())?.value)
        }),
    ];
    for (name, z, eval) in cases {
        for n in box_2d(6) {
            let mut err = None;
            let r = helmholtz_residual(2, z, &n, |p| {
                eval(z, p).map_err(|e| {
                    err = Some(e);
                    lattice_green::Error::Overflow
                })
            })
            .map_err(|e| err.clone().unwrap_or_else(|| e.to_string()))?;
            let expected = if n == [0, 0] { 1.0 } else { 0.0 };
            let dev = (r - c(expected, 0.0)).norm();
            max_dev = max_dev.max(dev);
            if dev > tol {
                return Err(format!("{name} z={z}, n={n:?}: residual deviation {dev:.3e}"));
            }
        }
    }
    for n in -6..=6i64 {
        let z = c(-2.0, 0.5);
        let r = helmholtz_residual(1, z, &[n], |p| Ok(green_1d(z, p[0])?.value))
            .map_err(|e| e.to_string())?;
        let expected = if n == 0 { 1.0 } else { 0.0 };
        let dev = (r - c(expected, 0.0)).norm();
        max_dev = max_dev.max(dev);
        if dev > tol {
            return Err(format!("d=1 n={n}: residual deviation {dev:.3e}"));
        }
    }
    Ok(format!("max residual deviation {max_dev:.3e} ≤ {tol:.0e}"))
}

/// Criterion 3: exact fundamental solutions. H₀E = δ₀ holds with zero
/// tolerance (all channels) on |n_j| ≤ 10; the anchor values E(0,0) = 0,
/// E(1,0) = −1/4, E(1,1) = −1/π are reproduced exactly; (H₀ − 4)E₁ = δ₀
/// holds exactly on |n_j| ≤ 6.
fn exact_fundamental_solutions() -> Result<String, String> {
    let e = fundsol_h0(&[0, 0]).map_err(|e| e.to_string())?;
    if !e.is_zero() {
        return Err("E(0,0) ≠ 0".into());
    }
    let e = fundsol_h0(&[1, 0]).map_err(|e| e.to_string())?;
    if e.rational != rat(-1, 4) || !e.inv_pi.is_zero() {
        return Err("E(1,0) ≠ −1/4".into());
    }
    let e = fundsol_h0(&[1, 1]).map_err(|e| e.to_string())?;
    if !e.rational.is_zero() || e.inv_pi != rat(-1, 1) {
        return Err("E(1,1) ≠ −1/π".into());
    }
    let mut count = 3usize;
    for n in box_2d(10) {
        let r = stencil_residual_exact(LatticeOp::H0, &n).map_err(|e| e.to_string())?;
        if !r.is_zero() {
            return Err(format!("H₀ residual nonzero at {n:?}"));
        }
        count += 1;
    }
    for n in box_2d(6) {
        let r = stencil_residual_exact(LatticeOp::H0Minus4, &n).map_err(|e| e.to_string())?;
        if !r.is_zero() {
            return Err(format!("(H₀−4) residual nonzero at {n:?}"));
        }
        count += 1;
    }
    Ok(format!("{count} exact identities verified (zero tolerance)"))
}

/// Criterion 4: coefficient identities. The diagonal shell sums equal their
/// closed Pochhammer products exactly for |n_j| ≤ 8, k ≤ 8 (zero
/// tolerance); the two diagonal Lauricella reduction identities hold to
/// 1e−9 on a (w, m, l) grid; the walk convolution identity holds exactly
/// through step 10.
fn identity_checks() -> Result<String, String> {
    for n in box_2d(8) {
        for k in 0..=8u32 {
            if !check_shell_identities_exact(n[0], n[1], k) {
                return Err(format!("shell identity fails at n={n:?}, k={k}"));
            }
        }
    }
    let mut max_dev = 0.0f64;
    for (m, l) in [(0i64, 0i64), (1, 0), (1, 1), (2, 1), (2, 2), (3, 1)] {
        for w in [0.3, 0.6, -0.2] {
            let (lhs, rhs) = fb_reduction_first(m, l, w, TOL).map_err(|e| e.to_string())?;
            let dev = (lhs - rhs).norm() / lhs.norm().max(1.0);
            max_dev = max_dev.max(dev);
            if dev > 1e-9 {
                return Err(format!("first reduction (m,l)=({m},{l}), w={w}: {dev:.3e}"));
            }
            let (lhs, rhs) = fb_reduction_second(m, l, w, TOL).map_err(|e| e.to_string())?;
            let dev = (lhs - rhs).norm() / lhs.norm().max(1.0);
            max_dev = max_dev.max(dev);
            if dev > 1e-9 {
                return Err(format!("second reduction (m,l)=({m},{l}), w={w}: {dev:.3e}"));
            }
        }
    }
    for d in 1..=3usize {
        for k in 0..=9u32 {
            if !check_walk_convolution_exact(d, k) {
                return Err(format!("walk convolution fails at d={d}, step {k}→{}", k + 1));
            }
        }
    }
    Ok(format!(
        "shell sums exact, reductions max dev {max_dev:.3e} ≤ 1e-9, convolution exact to step 10"
    ))
}

/// Criterion 5: killed-walk consistency. E(ε,n) = (2d/(1−ε)) G(−2dε/(1−ε), n)
/// to 1e−10 with a certified truncation tail, for ε ∈ {0.25, 0.5, 0.75},
/// d ∈ {1, 2}, |n_j| ≤ 3; and Σ_n P(X_k = n) = 1 exactly for k ≤ 12.
fn walk_consistency() -> Result<String, String> {
    let mut max_dev = 0.0f64;
    let mut points: Vec<(usize, Vec<i64>)> = (0..=3i64).map(|n| (1usize, vec![n])).collect();
    for n1 in 0..=3i64 {
        for n2 in 0..=n1 {
            points.push((2, vec![n1, n2]));
        }
    }
    for (d, n) in points {
        for eps in [0.25, 0.5, 0.75] {
            let cfg = WalkConfig::with_tail_bound(d, eps, 1e-13).map_err(|e| e.to_string())?;
            if cfg.tail_bound() > 1e-11 {
                return Err(format!("tail bound {:.3e} not certified below 1e-11", cfg.tail_bound()));
            }
            let e = walk_expectation(cfg, &n).map_err(|e| e.to_string())?;
            let z = c(-2.0 * d as f64 * eps / (1.0 - eps), 0.0);
            let g = green_auto(d, z, &n, TOL).map_err(|e| e.to_string())?.value.re;
            let rhs = 2.0 * d as f64 / (1.0 - eps) * g;
            let dev = (e - rhs).abs() / rhs.abs().max(1.0);
            max_dev = max_dev.max(dev);
            if dev > 1e-10 {
                return Err(format!("d={d} n={n:?} ε={eps}: deviation {dev:.3e}"));
            }
        }
    }
    for k in 0..=12u32 {
        let mut total = BigRational::zero();
        for n in box_2d(k as i64) {
            total += walk_prob_exact(2, k, &n);
        }
        if !total.is_one() {
            return Err(format!("step-{k} distribution sums to {total} ≠ 1"));
        }
    }
    Ok(format!(
        "expectation max dev {max_dev:.3e} ≤ 1e-10, normalization exact to step 12"
    ))
}

/// Criterion 6: representation overlaps to 1e−10. At z = −0.5 the wide-disk
/// single sum, the endpoint formulas and the recurrence all agree over
/// |n_j| ≤ 6; for d = 1 the closed form agrees with both threshold
/// expansions.
fn representation_overlaps() -> Result<String, String> {
    let tol = 1e-10;
    let mut max_dev = 0.0f64;
    let mut check = |a: Complex64, b: Complex64, what: String| -> Result<(), String> {
        let dev = (a - b).norm() / a.norm().max(1.0);
        max_dev = max_dev.max(dev);
        if dev <= tol {
            Ok(())
        } else {
            Err(format!("{what}: deviation {dev:.3e}"))
        }
    };
    let z = c(-0.5, 0.0);
    for n in box_2d(6) {
        let laurent = green_laurent_2d(z, &n, TOL).map_err(|e| e.to_string())?.value;
        let endpoint = green_2d_endpoint(z, &n, TOL).map_err(|e| e.to_string())?.value;
        let recurrence = green_2d_recurrence(z, &n, TOL).map_err(|e| e.to_string())?.value;
        check(laurent, endpoint, format!("single-sum vs endpoint n={n:?}"))?;
        check(endpoint, recurrence, format!("endpoint vs recurrence n={n:?}"))?;
    }
    for n in -6..=6i64 {
        let z = c(-1.0, 0.4);
        check(
            green_1d(z, n).map_err(|e| e.to_string())?.value,
            green_1d_threshold0(z, n, TOL).map_err(|e| e.to_string())?.value,
            format!("d=1 lower-threshold n={n}"),
        )?;
        let z = c(5.0, 0.4);
        check(
            green_1d(z, n).map_err(|e| e.to_string())?.value,
            green_1d_threshold4(z, n, TOL).map_err(|e| e.to_string())?.value,
            format!("d=1 upper-threshold n={n}"),
        )?;
    }
    Ok(format!("max relative deviation {max_dev:.3e} ≤ {tol:.0e}"))
}

/// Criterion 7: near the endpoint thresholds (q = 0 at x = 0.5, q = 2 at
/// x = 7.5) subtracting the explicit singular part reduces the across-cut
/// jump at least tenfold at δ = 1e−2 and δ = 1e−3, and the subtracted
/// residual itself decays linearly (ratio ≈ 10) as δ: 1e−2 → 1e−3.
fn cut_cancellation() -> Result<String, String> {
    let mut min_reduction = f64::INFINITY;
    let mut min_decay = f64::INFINITY;
    for (q, x) in [(0u8, 0.5f64), (2, 7.5)] {
        for n in [[0i64, 0], [1, 1], [2, 1]] {
            let raw_jump = |delta: f64| -> Result<f64, String> {
                let up = green_2d_endpoint(c(x, delta), &n, TOL)
                    .map_err(|e| e.to_string())?
                    .value;
                let dn = green_2d_endpoint(c(x, -delta), &n, TOL)
                    .map_err(|e| e.to_string())?
                    .value;
                Ok((up - dn).norm())
            };
            let mut residuals = [0.0f64; 2];
            for (i, delta) in [1e-2, 1e-3].into_iter().enumerate() {
                let raw = raw_jump(delta)?;
                let sub = cut_cancellation_residual_2d(q, x, &n, delta, TOL)
                    .map_err(|e| e.to_string())?
                    .norm();
                residuals[i] = sub;
                let reduction = raw / sub;
                min_reduction = min_reduction.min(reduction);
                if reduction < 10.0 {
                    return Err(format!(
                        "q={q}, n={n:?}, δ={delta}: reduction {reduction:.2} < 10"
                    ));
                }
            }
            let decay = residuals[0] / residuals[1];
            min_decay = min_decay.min(decay);
            if decay < 9.99 {
                return Err(format!("q={q}, n={n:?}: residual decay {decay:.4} not linear"));
            }
        }
    }
    Ok(format!(
        "min jump reduction {min_reduction:.1}× ≥ 10, residual decay ratios ≥ {min_decay:.4}"
    ))
}

/// Criterion 8: the Bessel-integral oracle matches quadrature to 1e−8 at
/// 10 points with Re z < 0 (d ∈ {1, 2}), and the d = 1 building block
/// matches the closed Laplace transform of the modified Bessel function to
/// 1e−10.
fn bessel_laplace_oracle() -> Result<String, String> {
    let mut max_dev = 0.0f64;
    let zs = [-0.5f64, -1.5, -2.5, -4.0, -8.0];
    for (i, &x) in zs.iter().enumerate() {
        let z = c(x, 0.0);
        let n1 = [i as i64 % 3];
        let l = laplace_bessel(1, z, &n1, 1e-10).map_err(|e| e.to_string())?;
        let q = quadrature_torus(1, z, &n1, 4096).map_err(|e| e.to_string())?.value;
        let dev = (l - q).norm() / q.norm().max(1.0);
        max_dev = max_dev.max(dev);
        if dev > 1e-8 {
            return Err(format!("d=1 z={x} n={n1:?}: deviation {dev:.3e}"));
        }
        let n2 = [[0i64, 0], [1, 0], [1, 1], [2, 1], [2, 2]][i];
        let l = laplace_bessel(2, z, &n2, 1e-10).map_err(|e| e.to_string())?;
        let q = quadrature_torus(2, z, &n2, 1024).map_err(|e| e.to_string())?.value;
        let dev = (l - q).norm() / q.norm().max(1.0);
        max_dev = max_dev.max(dev);
        if dev > 1e-8 {
            return Err(format!("d=2 z={x} n={n2:?}: deviation {dev:.3e}"));
        }
    }
    let mut max_closed = 0.0f64;
    for n in [0i64, 1, 2, 5] {
        for z in [c(-2.5, 0.0), c(-1.0, 0.0), c(-4.0, 0.0)] {
            let numeric = laplace_bessel(1, z, &[n], 1e-12).map_err(|e| e.to_string())?;
            let closed = laplace_bessel_closed(c(2.0, 0.0) - z, 2.0, n.unsigned_abs() as u32)
                .map_err(|e| e.to_string())?;
            let dev = (numeric - closed).norm() / closed.norm().max(1.0);
            max_closed = max_closed.max(dev);
            if dev > 1e-10 {
                return Err(format!("closed transform n={n}, z={z}: deviation {dev:.3e}"));
            }
        }
    }
    Ok(format!(
        "vs quadrature max dev {max_dev:.3e} ≤ 1e-8, vs closed transform {max_closed:.3e} ≤ 1e-10"
    ))
}

/// Criterion 9: the diagonal interior series with expansion variable
/// ((z−4)/4)^{2k} matches the interior representation on the diagonal to
/// 1e−9; the variant with the literal ((z−4)/16)^{2k} demonstrably fails
/// (retained negative control).
fn diagonal_scaling_pinned() -> Result<String, String> {
    let z = c(4.0, 0.5);
    let mut max_dev = 0.0f64;
    let mut min_bad = f64::INFINITY;
    for m in 0..=4i64 {
        let reference = {
            let g = green_2d_embedded(z, &[m, m], TOL).map_err(|e| e.to_string())?.value;
            if m % 2 == 0 {
                g
            } else {
                -g
            }
        };
        let good = diag_p0(z, m, DiagForm::Interior, TOL).map_err(|e| e.to_string())?;
        let dev = (good - reference).norm() / reference.norm().max(1.0);
        max_dev = max_dev.max(dev);
        if dev > 1e-9 {
            return Err(format!("correct scaling deviates at m={m}: {dev:.3e}"));
        }
        let bad = diag_p0_interior_misscaled(z, m, TOL).map_err(|e| e.to_string())?;
        let bad_dev = (bad - reference).norm() / reference.norm().max(1.0);
        min_bad = min_bad.min(bad_dev);
    }
    if min_bad < 1e-3 {
        return Err(format!(
            "negative control too close to reference: min deviation {min_bad:.3e}"
        ));
    }
    Ok(format!(
        "correct scaling max dev {max_dev:.3e} ≤ 1e-9; misscaled variant deviates ≥ {min_bad:.3e}"
    ))
}

fn main() {
    let mut report = Report { failures: 0 };
    report.criterion(1, "representations vs torus quadrature", quadrature_equivalence());
    report.criterion(2, "five-point resolvent identity", helmholtz_identity());
    report.criterion(3, "exact fundamental-solution stencils", exact_fundamental_solutions());
    report.criterion(4, "shell / reduction / convolution identities", identity_checks());
    report.criterion(5, "killed-walk expectation and normalization", walk_consistency());
    report.criterion(6, "representation overlaps", representation_overlaps());
    report.criterion(7, "cut cancellation at endpoint thresholds", cut_cancellation());
    report.criterion(8, "Bessel-integral oracle", bessel_laplace_oracle());
    report.criterion(9, "diagonal expansion-variable scaling", diagonal_scaling_pinned());
    if report.failures > 0 {
        println!("acceptance: {} criterion(s) failed", report.failures);
        std::process::exit(1);
    }
    println!("acceptance: all 9 criteria passed");
}
