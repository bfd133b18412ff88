//! `lgf`: command-line front end for the lattice resolvent kernel library.
//!
//! Subcommands: `eval` (kernel values by any representation), `fundsol`
//! (exact fundamental-solution tables), `verify` (verification suites with
//! per-case residuals), `walk` (killed random-walk expectations).
//!
//! Exit codes: 0 success, 2 region/method error, 3 tolerance failure,
//! 4 parse error.

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_traits::{One, Zero};

use lattice_green::fundsol::{stencil_residual_exact, ExactValue, LatticeOp};
use lattice_green::identities::{
    check_shell_identities_exact, check_walk_convolution_exact, fb_reduction_first,
    fb_reduction_second,
};
use lattice_green::oracles::{quadrature_auto, walk_expectation, walk_prob_exact, WalkConfig};
use lattice_green::resolvent::{
    green_1d, green_1d_threshold0, green_1d_threshold4, green_2d_embedded, green_2d_endpoint,
    green_2d_recurrence, green_auto, green_laurent, green_laurent_2d, helmholtz_residual,
    GreenValue, Representation,
};
use lattice_green::Error as LgError;

const EXIT_REGION: i32 = 2;
const EXIT_TOLERANCE: i32 = 3;
const EXIT_PARSE: i32 = 4;

#[derive(Parser)]
#[command(
    name = "lgf",
    about = "Resolvent kernel of the discrete Laplacian on Z^d: evaluation, exact fundamental solutions, verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Laurent,
    #[value(name = "closed1d")]
    Closed1d,
    #[value(name = "thresh0-1d")]
    Thresh0_1d,
    #[value(name = "thresh4-1d")]
    Thresh4_1d,
    #[value(name = "embedded2d")]
    Embedded2d,
    #[value(name = "endpoint2d")]
    Endpoint2d,
    #[value(name = "recurrence2d")]
    Recurrence2d,
    Quadrature,
    #[value(name = "bessel-laplace")]
    BesselLaplace,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Operator {
    #[value(name = "h0")]
    H0,
    #[value(name = "h0-4")]
    H0Minus4,
    #[value(name = "h0-8")]
    H0Minus8,
    Dalembertian,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Helmholtz,
    Oracle,
    Overlap,
    Identities,
    Walk,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the kernel G(z, n)
    Eval {
        #[arg(long)]
        dim: usize,
        /// spectral parameter, e.g. `-2` or `4+0.5i`
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// lattice point, comma-separated, e.g. `2,1`
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Tabulate an exact fundamental solution on a grid
    Fundsol {
        #[arg(long, value_enum)]
        op: Operator,
        /// grid half-width: all |n₁|, |n₂| ≤ range (≤ 64)
        #[arg(long)]
        range: i64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// verify the defining stencil identity exactly over the grid
        #[arg(long)]
        check: bool,
    },
    /// Run a verification suite
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Killed random-walk expectation E(ε, n) and its kernel counterpart
    Walk {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, allow_hyphen_values = true)]
        n: String,
        /// series cutoff; default chooses one from a certified tail bound
        #[arg(long)]
        kmax: Option<u32>,
    },
}

fn fail(code: i32, msg: &str) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(code);
}

fn exit_code_for(e: &LgError) -> i32 {
    match e {
        LgError::Region(_)
        | LgError::UnsupportedRegion { .. }
        | LgError::BranchCut(_)
        | LgError::DigammaPole(_) => EXIT_REGION,
        LgError::NoConvergence { .. }
        | LgError::QuadratureAccuracy { .. }
        | LgError::Divergent(_)
        | LgError::Overflow => EXIT_TOLERANCE,
        LgError::InvalidParams(_) => EXIT_PARSE,
    }
}

fn or_die<T>(r: Result<T, LgError>) -> T {
    match r {
        Ok(v) => v,
        Err(e) => fail(exit_code_for(&e), &e.to_string()),
    }
}

/// Parses `a`, `bi`, or `a±bi` (no spaces, exponents allowed).
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    let parse_f = |x: &str| -> Result<f64, String> {
        let x = if x.is_empty() || x == "+" {
            "1"
        } else if x == "-" {
            "-1"
        } else {
            x
        };
        x.parse::<f64>().map_err(|_| format!("invalid number `{x}`"))
    };
    if let Some(body) = t.strip_suffix('i') {
        // find the split between real and imaginary parts: the last +/-
        // that is neither leading nor an exponent sign
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => Ok(Complex64::new(parse_f(&body[..i])?, parse_f(&body[i..])?)),
            None => Ok(Complex64::new(0.0, parse_f(body)?)),
        }
    } else {
        Ok(Complex64::new(parse_f(t)?, 0.0))
    }
}

fn parse_lattice(s: &str, dim: usize) -> Result<Vec<i64>, String> {
    let v: Result<Vec<i64>, _> = s
        .trim()
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect();
    let v = v.map_err(|_| format!("invalid lattice point `{s}`"))?;
    if v.len() != dim {
        return Err(format!("lattice point has {} coordinates, expected {dim}", v.len()));
    }
    Ok(v)
}

/// JSON number with 17 significant digits (round-trips f64 exactly).
fn jf(x: f64) -> String {
    format!("{x:.16e}")
}

fn jc(z: Complex64) -> String {
    format!("[{},{}]", jf(z.re), jf(z.im))
}

fn representation_name(r: Representation) -> &'static str {
    match r {
        Representation::Laurent => "laurent",
        Representation::Laurent2d => "laurent",
        Representation::Closed1d => "closed1d",
        Representation::Threshold0_1d => "thresh0-1d",
        Representation::Threshold4_1d => "thresh4-1d",
        Representation::Embedded2d => "embedded2d",
        Representation::Endpoint2d => "endpoint2d",
        Representation::Recurrence2d => "recurrence2d",
    }
}

fn cmd_eval(dim: usize, z_str: &str, n_str: &str, method: Method, tol: f64) {
    let z = parse_complex(z_str).unwrap_or_else(|e| fail(EXIT_PARSE, &e));
    let n = parse_lattice(n_str, dim).unwrap_or_else(|e| fail(EXIT_PARSE, &e));
    let (value, method_used, terms, err_estimate) = match method {
        Method::Auto => {
            let g = or_die(green_auto(dim, z, &n, tol));
            (g.value, representation_name(g.representation), g.terms_used, g.err_estimate)
        }
        Method::Laurent => {
            let g = or_die(if dim == 2 {
                green_laurent_2d(z, &n, tol)
            } else {
                green_laurent(dim, z, &n, tol)
            });
            (g.value, "laurent", g.terms_used, g.err_estimate)
        }
        Method::Closed1d | Method::Thresh0_1d | Method::Thresh4_1d => {
            if dim != 1 {
                fail(EXIT_REGION, "this method requires --dim 1");
            }
            let g: GreenValue = or_die(match method {
                Method::Closed1d => green_1d(z, n[0]),
                Method::Thresh0_1d => green_1d_threshold0(z, n[0], tol),
                _ => green_1d_threshold4(z, n[0], tol),
            });
            (g.value, representation_name(g.representation), g.terms_used, g.err_estimate)
        }
        Method::Embedded2d | Method::Endpoint2d | Method::Recurrence2d => {
            if dim != 2 {
                fail(EXIT_REGION, "this method requires --dim 2");
            }
            let g = or_die(match method {
                Method::Embedded2d => green_2d_embedded(z, &n, tol),
                Method::Endpoint2d => green_2d_endpoint(z, &n, tol),
                _ => green_2d_recurrence(z, &n, tol),
            });
            (g.value, representation_name(g.representation), g.terms_used, g.err_estimate)
        }
        Method::Quadrature => {
            let q = or_die(quadrature_auto(dim, z, &n, tol));
            (q.value, "quadrature", q.n_per_dim.pow(dim as u32), q.err_estimate)
        }
        Method::BesselLaplace => {
            let v = or_die(lattice_green::oracles::laplace_bessel(dim, z, &n, tol));
            (v, "bessel-laplace", 0, tol * v.norm())
        }
    };
    let n_json = n.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    println!(
        "{{\"dim\":{dim},\"z\":{},\"n\":[{n_json}],\"value\":{},\"method_used\":\"{method_used}\",\"terms\":{terms},\"err_estimate\":{}}}",
        jc(z),
        jc(value),
        jf(err_estimate)
    );
}

/// Formats a rational channel as a reduced fraction, `0` when zero.
fn frac(r: &num_rational::BigRational) -> String {
    if r.is_zero() {
        "0".to_string()
    } else if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn float_total(v: &ExactValue) -> String {
    let z = v.to_complex();
    if z.im == 0.0 {
        format!("{:.17}", z.re)
    } else {
        format!("{:.17}{}{:.17}i", z.re, if z.im >= 0.0 { "+" } else { "" }, z.im)
    }
}

/// The 1/π and log(2)/π coefficients of an exact value; each operator
/// populates either the real or the imaginary channel, never both.
fn pi_channels(v: &ExactValue) -> (String, String) {
    let inv_pi = if v.imag_inv_pi.is_zero() {
        frac(&v.inv_pi)
    } else {
        frac(&v.imag_inv_pi)
    };
    (inv_pi, frac(&v.imag_log2_inv_pi))
}

fn cmd_fundsol(op: Operator, range: i64, format: Format, check: bool) {
    if !(0..=64).contains(&range) {
        fail(EXIT_PARSE, "range must lie in 0..=64");
    }
    let lattice_op = match op {
        Operator::H0 => LatticeOp::H0,
        Operator::H0Minus4 => LatticeOp::H0Minus4,
        Operator::H0Minus8 => LatticeOp::H0Minus8,
        Operator::Dalembertian => LatticeOp::DAlembertian,
    };
    if check {
        let mut checked = 0usize;
        for n1 in -range..=range {
            for n2 in -range..=range {
                let r = or_die(stencil_residual_exact(lattice_op, &[n1, n2]));
                if !r.is_zero() {
                    println!("{{\"check\":\"stencil\",\"pass\":false,\"n\":[{n1},{n2}]}}");
                    std::process::exit(EXIT_TOLERANCE);
                }
                checked += 1;
            }
        }
        println!("{{\"check\":\"stencil\",\"pass\":true,\"points\":{checked}}}");
        return;
    }
    let mut rows = Vec::new();
    for n1 in -range..=range {
        for n2 in -range..=range {
            let v = or_die(lattice_op.fundamental_solution(&[n1, n2]));
            rows.push((n1, n2, v));
        }
    }
    match format {
        Format::Csv => {
            println!("n1,n2,rational,inv_pi,log2_inv_pi,float_total");
            for (n1, n2, v) in &rows {
                let (inv_pi, log2_inv_pi) = pi_channels(v);
                println!("{n1},{n2},{},{inv_pi},{log2_inv_pi},{}", frac(&v.rational), float_total(v));
            }
        }
        Format::Json => {
            let items: Vec<String> = rows
                .iter()
                .map(|(n1, n2, v)| {
                    let (inv_pi, log2_inv_pi) = pi_channels(v);
                    format!(
                        "{{\"n\":[{n1},{n2}],\"rational\":\"{}\",\"inv_pi\":\"{inv_pi}\",\"log2_inv_pi\":\"{log2_inv_pi}\",\"float\":{}}}",
                        frac(&v.rational),
                        jc(v.to_complex())
                    )
                })
                .collect();
            println!("[{}]", items.join(","));
        }
    }
}

struct SuiteReport {
    cases: Vec<(String, f64, bool)>,
}

impl SuiteReport {
    fn case(&mut self, name: String, residual: f64, tol: f64) {
        self.cases.push((name, residual, residual <= tol));
    }

    fn exact(&mut self, name: String, pass: bool) {
        self.cases.push((name, if pass { 0.0 } else { f64::NAN }, pass));
    }

    fn finish(self, suite: &str) -> ! {
        let all = self.cases.iter().all(|(_, _, p)| *p);
        let body: Vec<String> = self
            .cases
            .iter()
            .map(|(name, r, p)| {
                format!("{{\"case\":\"{name}\",\"residual\":{},\"pass\":{p}}}", jf(*r))
            })
            .collect();
        println!(
            "{{\"suite\":\"{suite}\",\"pass\":{all},\"cases\":[{}]}}",
            body.join(",")
        );
        std::process::exit(if all { 0 } else { EXIT_TOLERANCE });
    }
}

fn cmd_verify(suite: Suite, tol: f64) {
    let tol_inner = 1e-13;
    let c = Complex64::new;
    let mut report = SuiteReport { cases: Vec::new() };
    match suite {
        Suite::Helmholtz => {
            for (dim, z) in [(1usize, c(-2.0, 0.5)), (2, c(-4.0, 0.0)), (2, c(4.0, 0.5))] {
                let mut max_dev = 0.0f64;
                let bound = 6i64;
                let points: Vec<Vec<i64>> = if dim == 1 {
                    (-bound..=bound).map(|n| vec![n]).collect()
                } else {
                    let mut v = Vec::new();
                    for a in -bound..=bound {
                        for b in -bound..=bound {
                            v.push(vec![a, b]);
                        }
                    }
                    v
                };
                for n in points {
                    let r = or_die(helmholtz_residual(dim, z, &n, |p| {
                        Ok(green_auto(dim, z, p, tol_inner)?.value)
                    }));
                    let expected = if n.iter().all(|&x| x == 0) { 1.0 } else { 0.0 };
                    max_dev = max_dev.max((r - c(expected, 0.0)).norm());
                }
                report.case(format!("dim={dim} z={z}"), max_dev, tol);
            }
        }
        Suite::Oracle => {
            let cases: [(usize, Complex64, Vec<i64>); 6] = [
                (1, c(-2.0, 0.0), vec![1]),
                (1, c(5.0, 1.0), vec![2]),
                (2, c(-4.0, 0.0), vec![1, 1]),
                (2, c(-0.5, 0.0), vec![2, 1]),
                (2, c(4.0, 0.5), vec![1, 0]),
                (2, c(8.4, 0.0), vec![2, 2]),
            ];
            for (dim, z, n) in cases {
                let g = or_die(green_auto(dim, z, &n, tol_inner)).value;
                let q = or_die(quadrature_auto(dim, z, &n, 1e-10)).value;
                let dev = (g - q).norm() / q.norm().max(1.0);
                report.case(format!("dim={dim} z={z} n={n:?}"), dev, tol);
            }
        }
        Suite::Overlap => {
            let z = c(-0.5, 0.0);
            for n in [[0i64, 0], [1, 0], [1, 1], [2, 1], [3, 2], [4, 4]] {
                let a = or_die(green_laurent_2d(z, &n, tol_inner)).value;
                let b = or_die(green_2d_endpoint(z, &n, tol_inner)).value;
                let r = or_die(green_2d_recurrence(z, &n, tol_inner)).value;
                report.case(
                    format!("wide-disk vs endpoint n={n:?}"),
                    (a - b).norm() / a.norm().max(1.0),
                    tol,
                );
                report.case(
                    format!("endpoint vs recurrence n={n:?}"),
                    (b - r).norm() / b.norm().max(1.0),
                    tol,
                );
            }
        }
        Suite::Identities => {
            let mut shells = true;
            for n1 in -6..=6i64 {
                for n2 in -6..=6i64 {
                    for k in 0..=6u32 {
                        shells &= check_shell_identities_exact(n1, n2, k);
                    }
                }
            }
            report.exact("diagonal shell sums (exact)".into(), shells);
            for (m, l) in [(1i64, 0i64), (2, 1)] {
                let (lhs, rhs) = or_die(fb_reduction_first(m, l, 0.3, tol_inner));
                report.case(
                    format!("first reduction (m,l)=({m},{l})"),
                    (lhs - rhs).norm() / lhs.norm().max(1.0),
                    tol,
                );
                let (lhs, rhs) = or_die(fb_reduction_second(m, l, 0.3, tol_inner));
                report.case(
                    format!("second reduction (m,l)=({m},{l})"),
                    (lhs - rhs).norm() / lhs.norm().max(1.0),
                    tol,
                );
            }
            let mut conv = true;
            for d in 1..=2usize {
                for k in 0..=7u32 {
                    conv &= check_walk_convolution_exact(d, k);
                }
            }
            report.exact("walk convolution (exact)".into(), conv);
        }
        Suite::Walk => {
            for dim in 1..=2usize {
                for eps in [0.25, 0.5, 0.75] {
                    let n = vec![1i64; dim];
                    let cfg = or_die(WalkConfig::with_tail_bound(dim, eps, 1e-13));
                    let e = or_die(walk_expectation(cfg, &n));
                    let z = c(-2.0 * dim as f64 * eps / (1.0 - eps), 0.0);
                    let g = or_die(green_auto(dim, z, &n, tol_inner)).value.re;
                    let rhs = 2.0 * dim as f64 / (1.0 - eps) * g;
                    report.case(
                        format!("dim={dim} ε={eps}"),
                        (e - rhs).abs() / rhs.abs().max(1.0),
                        tol.max(1e-10),
                    );
                }
            }
            let mut norm = true;
            for k in 0..=10u32 {
                let mut total = num_rational::BigRational::zero();
                for a in -(k as i64)..=k as i64 {
                    for b in -(k as i64)..=k as i64 {
                        total += walk_prob_exact(2, k, &[a, b]);
                    }
                }
                norm &= total.is_one();
            }
            report.exact("step-distribution normalization (exact)".into(), norm);
        }
    }
    let name = match suite {
        Suite::Helmholtz => "helmholtz",
        Suite::Oracle => "oracle",
        Suite::Overlap => "overlap",
        Suite::Identities => "identities",
        Suite::Walk => "walk",
    };
    report.finish(name);
}

fn cmd_walk(dim: usize, eps: f64, n_str: &str, kmax: Option<u32>) {
    let n = parse_lattice(n_str, dim).unwrap_or_else(|e| fail(EXIT_PARSE, &e));
    let cfg = match kmax {
        Some(k) => WalkConfig { dim, eps, kmax: k },
        None => or_die(WalkConfig::with_tail_bound(dim, eps, 1e-13)),
    };
    let kmax_used = cfg.kmax;
    let tail = cfg.tail_bound();
    let e = or_die(walk_expectation(cfg, &n));
    let z = Complex64::new(-2.0 * dim as f64 * eps / (1.0 - eps), 0.0);
    let kernel = or_die(green_auto(dim, z, &n, 1e-13));
    let rhs = 2.0 * dim as f64 / (1.0 - eps) * kernel.value.re;
    let n_json = n.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    println!(
        "{{\"dim\":{dim},\"eps\":{},\"n\":[{n_json}],\"kmax\":{kmax_used},\"tail_bound\":{},\"expectation\":{},\"kernel_value\":{},\"deviation\":{}}}",
        jf(eps),
        jf(tail),
        jf(e),
        jf(rhs),
        jf((e - rhs).abs())
    );
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(0);
            }
            eprint!("{e}");
            std::process::exit(EXIT_PARSE);
        }
    };
    match cli.command {
        Command::Eval { dim, z, n, method, tol } => cmd_eval(dim, &z, &n, method, tol),
        Command::Fundsol { op, range, format, check } => cmd_fundsol(op, range, format, check),
        Command::Verify { suite, tol } => cmd_verify(suite, tol),
        Command::Walk { dim, eps, n, kmax } => cmd_walk(dim, eps, &n, kmax),
    }
}
