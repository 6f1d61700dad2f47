//! Phase distributions assembled analytically from harmonic coefficients.
//!
//! Every distribution here is a finite trigonometric sum
//! P(φ) = 1/2π + prefactor·Σ_{k≥1} A_k cos(kφ + sign·θ_k), with
//! C_k = A_k e^{iθ_k} a weighted sum of density-matrix elements over the
//! excitation subset S_k. Weights depend on the quasi-probability
//! construction: r_w (Wigner radial integral, by adaptive quadrature),
//! r_q (Husimi radial integral, closed form), t_q (spin Husimi polar
//! integral, closed form), or 1 (phase states). Nothing is ever integrated
//! over phase space at assembly time.

use crate::error::{Error, Result};
use crate::hilbert::{check_state, C64, CompositeSpace, Operator, PairType, SystemSpec};
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Wigner,
    Husimi,
    PhaseStates,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Wigner => "wigner",
            Method::Husimi => "husimi",
            Method::PhaseStates => "phase_states",
        })
    }
}

/// P(φ) = 1/2π + prefactor·Σ_k A_k cos(kφ + sign·θ_k), sampled on a uniform
/// grid over [0, 2π). `coefficients[k-1]` holds C_k; sign is −1 where the
/// underlying formula reads cos(kφ−θ_k) (oscillator pairs, hybrid) and +1
/// for the spin convention cos(kφ+θ_k).
#[derive(Debug, Clone)]
pub struct PhaseDistribution {
    pub method: Method,
    pub prefactor: f64,
    pub sign: f64,
    pub coefficients: Vec<C64>,
    pub phi: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseDistribution {
    pub fn a(&self, k: usize) -> f64 {
        assert!(k >= 1);
        self.coefficients.get(k - 1).map_or(0.0, |c| c.norm())
    }

    pub fn theta(&self, k: usize) -> f64 {
        assert!(k >= 1);
        self.coefficients.get(k - 1).map_or(0.0, |c| c.arg())
    }

    pub fn k_max(&self) -> usize {
        self.coefficients.len()
    }

    /// Trapezoid integral over the periodic grid (mean value times 2π).
    pub fn grid_integral(&self) -> f64 {
        let m = self.p.len() as f64;
        self.p.iter().sum::<f64>() / m * 2.0 * PI
    }
}

// ---------------------------------------------------------------------------
// Quadrature machinery for the Wigner radial weight.

fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let pk = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights of the 32-point Gauss–Legendre rule on [−1, 1],
/// computed once by Newton iteration on P₃₂.
fn gl_nodes() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 32;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_eval(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_eval(n, x);
            out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        out
    })
}

fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (b + a);
    let h = 0.5 * (b - a);
    gl_nodes().iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

fn adaptive_gl<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> Result<f64> {
    let whole = gl_panel(f, a, b);
    let mid = 0.5 * (a + b);
    let halves = gl_panel(f, a, mid) + gl_panel(f, mid, b);
    // The requested tolerance halves with each split; floor it at roundoff
    // level so deep recursion cannot chase noise below f64 resolution.
    if (whole - halves).abs() <= tol.max(1e-15 * (1.0 + halves.abs())) {
        return Ok(halves);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "no convergence on [{a:.3}, {b:.3}]: panel disagreement {:.3e}",
            (whole - halves).abs()
        )));
    }
    Ok(adaptive_gl(f, a, mid, tol / 2.0, depth - 1)? + adaptive_gl(f, mid, b, tol / 2.0, depth - 1)?)
}

/// Generalized Laguerre L_n^{(α)}(x) by the three-term recurrence.
fn laguerre(n: usize, alpha: usize, x: f64) -> f64 {
    let a = alpha as f64;
    let mut l0 = 1.0;
    if n == 0 {
        return l0;
    }
    let mut l1 = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + a - x) * l1 - (kf + a) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

fn rw_cache() -> &'static Mutex<HashMap<(usize, usize), f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Wigner radial weight
/// r_w(m,n) = 2(−1)ⁿ √(n!/m!) ∫₀^∞ r (√2 r)^{m−n} L_n^{(m−n)}(2r²) e^{−r²} dr,
/// symmetric in (m, n); r_w(m,m) = 1.
pub fn radial_weight_wigner(m: usize, n: usize) -> Result<f64> {
    let (m, n) = if m >= n { (m, n) } else { (n, m) };
    if let Some(&v) = rw_cache().lock().unwrap_or_else(|p| p.into_inner()).get(&(m, n)) {
        return Ok(v);
    }
    let k = m - n;
    // Upper limit where the integrand envelope e^{−R²}R^{m+n+2} is < 1e-16.
    let mut upper = 4.0f64;
    while (-upper * upper).exp() * upper.powi((m + n + 2) as i32) >= 1e-16 {
        upper += 0.5;
    }
    let prefactor = 2.0
        * if n % 2 == 0 { 1.0 } else { -1.0 }
        * (0.5 * (ln_gamma(n as f64 + 1.0) - ln_gamma(m as f64 + 1.0))).exp();
    let integrand = move |r: f64| {
        r * (std::f64::consts::SQRT_2 * r).powi(k as i32)
            * laguerre(n, k, 2.0 * r * r)
            * (-r * r).exp()
    };
    let integral = adaptive_gl(&integrand, 0.0, upper, 1e-12, 48)?;
    let v = prefactor * integral;
    rw_cache().lock().unwrap_or_else(|p| p.into_inner()).insert((m, n), v);
    Ok(v)
}

/// Husimi radial weight r_q(m,n) = Γ((m+n)/2 + 1)/√(m! n!), via log-Gamma.
pub fn radial_weight_husimi(m: usize, n: usize) -> f64 {
    (ln_gamma((m + n) as f64 / 2.0 + 1.0)
        - 0.5 * (ln_gamma(m as f64 + 1.0) + ln_gamma(n as f64 + 1.0)))
    .exp()
}

fn check_half_integer_pair(s: f64, m: f64) -> Result<()> {
    if (2.0 * s).fract() != 0.0 || (s - m).fract() != 0.0 || m.abs() > s {
        return Err(Error::InvalidSpec(format!(
            "spin label m = {m} invalid for s = {s}"
        )));
    }
    Ok(())
}

/// Spin Husimi polar weight, closed form
/// t_q(m,n) = √(C(2s,s+m)C(2s,s+n)) · 2B(s − (m+n)/2 + 1, s + (m+n)/2 + 1);
/// symmetric, with t_q(m,m) = 2/(2s+1).
pub fn theta_weight_spin(s: f64, m: f64, n: f64) -> Result<f64> {
    check_half_integer_pair(s, m)?;
    check_half_integer_pair(s, n)?;
    let ln_binom = |k: f64| ln_gamma(2.0 * s + 1.0) - ln_gamma(s + k + 1.0) - ln_gamma(s - k + 1.0);
    let half_sum = 0.5 * (m + n);
    let v = (0.5 * (ln_binom(m) + ln_binom(n))).exp()
        * 2.0
        * ln_beta(s - half_sum + 1.0, s + half_sum + 1.0).exp();
    Ok(v)
}

/// Hybrid weight I_q = r_q(m_o, n_o) · t_q(m_s, n_s).
pub fn hybrid_weight(m_o: usize, n_o: usize, s: f64, m_s: f64, n_s: f64) -> Result<f64> {
    Ok(radial_weight_husimi(m_o, n_o) * theta_weight_spin(s, m_s, n_s)?)
}

// ---------------------------------------------------------------------------
// Distribution assembly.

pub(crate) fn method_weight(
    method: Method,
    spec: &SystemSpec,
    row_idx: usize,
    col_idx: usize,
) -> Result<f64> {
    match method {
        Method::PhaseStates => Ok(1.0),
        Method::Wigner => match spec {
            SystemSpec::Cv { .. } | SystemSpec::Qubit { .. } => {
                radial_weight_wigner(row_idx, col_idx)
            }
            SystemSpec::Spin { .. } => Err(Error::MethodUnsupported {
                method: "wigner".into(),
                pair: "spin subsystem".into(),
            }),
        },
        Method::Husimi => match *spec {
            SystemSpec::Cv { .. } | SystemSpec::Qubit { .. } => {
                Ok(radial_weight_husimi(row_idx, col_idx))
            }
            SystemSpec::Spin { s, .. } => {
                theta_weight_spin(s, s - row_idx as f64, s - col_idx as f64)
            }
        },
    }
}

fn pair_conventions(method: Method, space: &CompositeSpace) -> Result<(f64, f64)> {
    match (space.pair_type(), method) {
        (PairType::CvCv, _) => Ok((1.0 / PI, -1.0)),
        (PairType::SpinSpin, Method::Husimi) => {
            let d1 = space.first.dim() as f64;
            let d2 = space.second.dim() as f64;
            Ok((d1 * d2 / (4.0 * PI), 1.0))
        }
        (PairType::SpinSpin, Method::PhaseStates) => Ok((1.0 / PI, 1.0)),
        (PairType::Hybrid, Method::Husimi) => {
            let d2 = space.second.dim() as f64;
            Ok((d2 / (2.0 * PI), -1.0))
        }
        (PairType::Hybrid, Method::PhaseStates) => Ok((1.0 / PI, -1.0)),
        (pt, Method::Wigner) => Err(Error::MethodUnsupported {
            method: "wigner".into(),
            pair: pt.to_string(),
        }),
    }
}

fn sample_grid(
    method: Method,
    prefactor: f64,
    sign: f64,
    coefficients: Vec<C64>,
    grid_points: usize,
) -> Result<PhaseDistribution> {
    if grid_points < 4 {
        return Err(Error::InvalidSpec(format!(
            "grid needs at least 4 points, got {grid_points}"
        )));
    }
    let mut phi = Vec::with_capacity(grid_points);
    let mut p = Vec::with_capacity(grid_points);
    for j in 0..grid_points {
        let x = 2.0 * PI * j as f64 / grid_points as f64;
        let mut val = 1.0 / (2.0 * PI);
        for (idx, c) in coefficients.iter().enumerate() {
            let k = (idx + 1) as f64;
            val += prefactor * c.norm() * (k * x + sign * c.arg()).cos();
        }
        phi.push(x);
        p.push(val);
    }
    Ok(PhaseDistribution { method, prefactor, sign, coefficients, phi, p })
}

/// Largest harmonic index the truncated pair can carry.
pub(crate) fn pair_k_max(space: &CompositeSpace) -> usize {
    space.first.dim().min(space.second.dim()) - 1
}

/// C_k over the joint subset S_k: elements (row, col) whose first-subsystem
/// label rises by k under the pair's excitation relation, weighted by the
/// product of per-subsystem weights.
fn pair_coefficient(
    rho: &Operator,
    space: &CompositeSpace,
    method: Method,
    k: i64,
) -> Result<C64> {
    let mut c = C64::new(0.0, 0.0);
    for row in 0..space.dim() {
        for col in 0..space.dim() {
            if space.subset_offset(row, col) != Some(k) {
                continue;
            }
            let v = rho[[row, col]];
            if v == C64::new(0.0, 0.0) {
                continue;
            }
            let (r1, r2) = space.unflat(row);
            let (c1, c2) = space.unflat(col);
            let w = method_weight(method, &space.first, r1, c1)?
                * method_weight(method, &space.second, r2, c2)?;
            c += v * w;
        }
    }
    Ok(c)
}

/// Relative-phase distribution P(φ), φ = φ₁ − φ₂ (oscillator−spin for
/// hybrid pairs), from the excitation-subset harmonics of ρ.
pub fn relative_phase_distribution(
    rho: &Operator,
    space: &CompositeSpace,
    method: Method,
    grid_points: usize,
) -> Result<PhaseDistribution> {
    check_state(rho, space.dim())?;
    let (prefactor, sign) = pair_conventions(method, space)?;
    let k_max = pair_k_max(space);
    let mut coefficients = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        coefficients.push(pair_coefficient(rho, space, method, k as i64)?);
    }
    sample_grid(method, prefactor, sign, coefficients, grid_points)
}

fn single_conventions(method: Method, spec: &SystemSpec) -> Result<(f64, f64)> {
    match (spec, method) {
        (SystemSpec::Cv { .. } | SystemSpec::Qubit { .. }, _) => Ok((1.0 / PI, -1.0)),
        (SystemSpec::Spin { .. }, Method::Husimi) => {
            Ok((spec.dim() as f64 / (2.0 * PI), 1.0))
        }
        (SystemSpec::Spin { .. }, Method::PhaseStates) => Ok((1.0 / PI, 1.0)),
        (SystemSpec::Spin { .. }, Method::Wigner) => Err(Error::MethodUnsupported {
            method: "wigner".into(),
            pair: "single spin".into(),
        }),
    }
}

/// Single-system phase distribution: C_k = Σ ⟨m+k|ρ|m⟩·weight(m+k, m) over
/// basis labels m (Fock numbers or S_z values).
pub fn single_phase_distribution(
    rho: &Operator,
    spec: &SystemSpec,
    method: Method,
    grid_points: usize,
) -> Result<PhaseDistribution> {
    spec.validate()?;
    check_state(rho, spec.dim())?;
    let (prefactor, sign) = single_conventions(method, spec)?;
    let d = spec.dim();
    let mut coefficients = Vec::with_capacity(d - 1);
    for k in 1..d {
        let mut c = C64::new(0.0, 0.0);
        for row in 0..d {
            for col in 0..d {
                if spec.label2(row) - spec.label2(col) != 2 * k as i64 {
                    continue;
                }
                let v = rho[[row, col]];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                c += v * method_weight(method, spec, row, col)?;
            }
        }
        coefficients.push(c);
    }
    sample_grid(method, prefactor, sign, coefficients, grid_points)
}
