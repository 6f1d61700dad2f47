//! Truncated Fock and spin operator algebras, composite (tensor-product)
//! spaces, and the two basis orderings used everywhere else: plain
//! lexicographic and excitation-grouped.
//!
//! Conventions fixed here once:
//! * cv (oscillator) basis is |0⟩..|n_max⟩;
//! * spin basis index 0 ↦ m_s = s, descending, so the larger S_z label
//!   comes first;
//! * composite flat index of (m₁, m₂) is m₁·dim₂ + m₂;
//! * spin labels are kept in doubled form (2m) internally so half-integer
//!   spins stay exact integer arithmetic.

use crate::error::{Error, Result};
use crate::linalg;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub type C64 = num_complex::Complex64;
pub type Operator = Array2<C64>;

/// One subsystem: an oscillator truncated at `n_max`, a spin-s system, or a
/// two-level system with independent raising/lowering rates (the dissipative
/// limit of an oscillator with linear gain and two-photon loss, where the
/// rates lock to γ₊ = γ, γ₋ = 2γ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Cv { n_max: usize, omega: f64, gamma_g: f64, gamma_l: f64 },
    Spin { s: f64, omega: f64, gamma_g: f64, gamma_l: f64 },
    Qubit { omega: f64, gamma_g: f64, gamma_l: f64 },
}

impl SystemSpec {
    pub fn validate(&self) -> Result<()> {
        let check_rates = |omega: f64, g: f64, l: f64| -> Result<()> {
            if !omega.is_finite() {
                return Err(Error::InvalidSpec("omega must be finite".into()));
            }
            if !(g >= 0.0 && g.is_finite() && l >= 0.0 && l.is_finite()) {
                return Err(Error::InvalidSpec("rates must be finite and ≥ 0".into()));
            }
            Ok(())
        };
        match *self {
            SystemSpec::Cv { n_max, omega, gamma_g, gamma_l } => {
                if n_max < 1 {
                    return Err(Error::InvalidSpec("cv needs n_max ≥ 1".into()));
                }
                check_rates(omega, gamma_g, gamma_l)
            }
            SystemSpec::Spin { s, omega, gamma_g, gamma_l } => {
                let two_s = 2.0 * s;
                if !(s > 0.0 && two_s.fract() == 0.0 && two_s <= 2.0 * 64.0) {
                    return Err(Error::InvalidSpec(format!(
                        "spin s must be a positive half-integer, got {s}"
                    )));
                }
                check_rates(omega, gamma_g, gamma_l)
            }
            SystemSpec::Qubit { omega, gamma_g, gamma_l } => check_rates(omega, gamma_g, gamma_l),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            SystemSpec::Cv { n_max, .. } => n_max + 1,
            SystemSpec::Spin { s, .. } => (2.0 * s) as usize + 1,
            SystemSpec::Qubit { .. } => 2,
        }
    }

    /// Oscillator-like systems carry Fock labels; spins carry S_z labels.
    pub fn is_cv_like(&self) -> bool {
        matches!(self, SystemSpec::Cv { .. } | SystemSpec::Qubit { .. })
    }

    pub fn two_s(&self) -> Option<i64> {
        match *self {
            SystemSpec::Spin { s, .. } => Some((2.0 * s) as i64),
            _ => None,
        }
    }

    /// Doubled basis label of basis index `idx`: 2m for Fock states,
    /// 2m_s for spins (descending, so idx 0 ↦ m_s = s).
    pub fn label2(&self, idx: usize) -> i64 {
        match *self {
            SystemSpec::Cv { .. } | SystemSpec::Qubit { .. } => 2 * idx as i64,
            SystemSpec::Spin { s, .. } => (2.0 * s) as i64 - 2 * idx as i64,
        }
    }

    pub fn omega(&self) -> f64 {
        match *self {
            SystemSpec::Cv { omega, .. }
            | SystemSpec::Spin { omega, .. }
            | SystemSpec::Qubit { omega, .. } => omega,
        }
    }

    pub fn gamma_g(&self) -> f64 {
        match *self {
            SystemSpec::Cv { gamma_g, .. }
            | SystemSpec::Spin { gamma_g, .. }
            | SystemSpec::Qubit { gamma_g, .. } => gamma_g,
        }
    }

    pub fn gamma_l(&self) -> f64 {
        match *self {
            SystemSpec::Cv { gamma_l, .. }
            | SystemSpec::Spin { gamma_l, .. }
            | SystemSpec::Qubit { gamma_l, .. } => gamma_l,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairType {
    CvCv,
    SpinSpin,
    Hybrid,
}

impl std::fmt::Display for PairType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PairType::CvCv => "cv_cv",
            PairType::SpinSpin => "spin_spin",
            PairType::Hybrid => "hybrid",
        })
    }
}

/// An ordered pair of subsystems. Hybrid pairs are (oscillator, spin);
/// the reverse order is rejected so the excitation-difference convention
/// m_o − m_s stays unambiguous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeSpace {
    pub first: SystemSpec,
    pub second: SystemSpec,
}

impl CompositeSpace {
    pub fn new(first: SystemSpec, second: SystemSpec) -> Result<Self> {
        first.validate()?;
        second.validate()?;
        if !first.is_cv_like() && second.is_cv_like() {
            return Err(Error::IncompatiblePair(
                "hybrid pairs must be ordered (oscillator, spin)".into(),
            ));
        }
        Ok(CompositeSpace { first, second })
    }

    pub fn pair_type(&self) -> PairType {
        match (self.first.is_cv_like(), self.second.is_cv_like()) {
            (true, true) => PairType::CvCv,
            (false, false) => PairType::SpinSpin,
            (true, false) => PairType::Hybrid,
            (false, true) => unreachable!("rejected in CompositeSpace::new"),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.first.dim(), self.second.dim())
    }

    pub fn dim(&self) -> usize {
        self.first.dim() * self.second.dim()
    }

    pub fn flat(&self, i1: usize, i2: usize) -> usize {
        i1 * self.second.dim() + i2
    }

    pub fn unflat(&self, idx: usize) -> (usize, usize) {
        let d2 = self.second.dim();
        (idx / d2, idx % d2)
    }

    /// Doubled grouping key of a basis state: total excitation 2(m₁+m₂) for
    /// cv–cv and spin–spin, excitation difference 2(m_o − m_s) for hybrid.
    pub fn group_key2(&self, idx: usize) -> i64 {
        let (i1, i2) = self.unflat(idx);
        let (l1, l2) = (self.first.label2(i1), self.second.label2(i2));
        match self.pair_type() {
            PairType::CvCv | PairType::SpinSpin => l1 + l2,
            PairType::Hybrid => l1 - l2,
        }
    }

    /// Subset offset k of the element ⟨row|ρ|col⟩ when the pair's excitation
    /// relation holds, `None` otherwise. For cv–cv and spin–spin the relation
    /// is m₁+m₂ = n₁+n₂ with k = m₁−n₁; for hybrid it is m_o−m_s = n_o−n_s
    /// with k = m_o−n_o.
    pub fn subset_offset(&self, row: usize, col: usize) -> Option<i64> {
        if self.group_key2(row) != self.group_key2(col) {
            return None;
        }
        let (r1, _) = self.unflat(row);
        let (c1, _) = self.unflat(col);
        let dl2 = self.first.label2(r1) - self.first.label2(c1);
        debug_assert!(dl2 % 2 == 0);
        Some(dl2 / 2)
    }
}

/// Annihilation operator and its adjoint on |0⟩..|n_max⟩.
pub fn fock_ladder(n_max: usize) -> Result<(Operator, Operator)> {
    if n_max == 0 {
        return Err(Error::InvalidSpec(
            "n_max = 0 leaves a one-dimensional space with no dynamics".into(),
        ));
    }
    let dim = n_max + 1;
    let mut a = Operator::zeros((dim, dim));
    for m in 1..dim {
        a[[m - 1, m]] = C64::new((m as f64).sqrt(), 0.0);
    }
    let a_dag = dagger(&a);
    Ok((a, a_dag))
}

/// S₊, S₋, S_z for spin s in the descending-m basis (index 0 ↦ m = s).
/// Ladder elements are ⟨s,m±1|S±|s,m⟩ = √(s(s+1) − m(m±1)).
pub fn spin_operators(s: f64) -> Result<(Operator, Operator, Operator)> {
    let spec = SystemSpec::Spin { s, omega: 0.0, gamma_g: 0.0, gamma_l: 0.0 };
    spec.validate()?;
    let two_s = (2.0 * s) as i64;
    let dim = (two_s + 1) as usize;
    let mut s_plus = Operator::zeros((dim, dim));
    let mut s_z = Operator::zeros((dim, dim));
    for idx in 0..dim {
        let two_m = two_s - 2 * idx as i64;
        let m = two_m as f64 / 2.0;
        s_z[[idx, idx]] = C64::new(m, 0.0);
        if idx > 0 {
            // S₊ |s,m⟩ = √(s(s+1) − m(m+1)) |s,m+1⟩; m+1 sits at idx−1.
            let c = (s * (s + 1.0) - m * (m + 1.0)).sqrt();
            s_plus[[idx - 1, idx]] = C64::new(c, 0.0);
        }
    }
    let s_minus = dagger(&s_plus);
    Ok((s_plus, s_minus, s_z))
}

/// Kronecker product consistent with the lexicographic composite index
/// (first factor is the slow index).
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    ndarray::linalg::kron(a, b)
}

pub fn identity(dim: usize) -> Operator {
    Operator::eye(dim)
}

pub fn dagger(a: &Operator) -> Operator {
    a.t().mapv(|z| z.conj())
}

pub fn trace(a: &Operator) -> C64 {
    a.diag().sum()
}

pub fn hermiticity_error(a: &Operator) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

/// Stable permutation exposing the excitation-grouped block structure:
/// position p in grouped order holds lexicographic index `perm[p]`.
/// Sorted by grouping key ascending; ties keep the first subsystem's basis
/// index ascending (for spins that means the larger S_z label first, same as
/// the lexicographic convention).
pub fn grouping_permutation(space: &CompositeSpace) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..space.dim()).collect();
    perm.sort_by_key(|&idx| (space.group_key2(idx), space.unflat(idx).0));
    perm
}

pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; perm.len()];
    for (pos, &idx) in perm.iter().enumerate() {
        inv[idx] = pos;
    }
    inv
}

/// ρ₁ = Tr₂ ρ.
pub fn partial_trace_second(rho: &Operator, dims: (usize, usize)) -> Operator {
    let (d1, d2) = dims;
    let mut out = Operator::zeros((d1, d1));
    for i in 0..d1 {
        for j in 0..d1 {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..d2 {
                acc += rho[[i * d2 + m, j * d2 + m]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// ρ₂ = Tr₁ ρ.
pub fn partial_trace_first(rho: &Operator, dims: (usize, usize)) -> Operator {
    let (d1, d2) = dims;
    let mut out = Operator::zeros((d2, d2));
    for i in 0..d2 {
        for j in 0..d2 {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..d1 {
                acc += rho[[m * d2 + i, m * d2 + j]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// Hermiticity and unit-trace check; the cheap validation used on every
/// phase/subset entry point. Positivity is deliberately not enforced here
/// (coherence-sector surgery used in analysis can leave a Hermitian,
/// unit-trace matrix slightly indefinite).
pub(crate) fn check_state(rho: &Operator, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "state is {}×{}, space dimension is {dim}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let herm = hermiticity_error(rho);
    if herm > 1e-8 {
        return Err(Error::NonHermitian(herm));
    }
    let t = trace(rho);
    if (t - C64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::NotDensity(format!("trace = {t}")));
    }
    Ok(())
}

/// Full density-matrix validation: Hermitian, unit trace, and spectrum
/// bounded below by −1e-8.
pub fn is_density(rho: &Operator) -> Result<()> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::DimensionMismatch("density matrix must be square".into()));
    }
    check_state(rho, rho.nrows())?;
    let eigs = linalg::hermitian_eigenvalues(rho)?;
    let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-8 {
        return Err(Error::NotDensity(format!("minimum eigenvalue {min:.3e}")));
    }
    Ok(())
}
