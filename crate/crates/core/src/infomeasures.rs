//! Correlation and coherence quantifiers on steady states: von Neumann
//! entropy, relative entropy of coherence, mutual information, negativity
//! from the partial transpose, and two-qubit X-state quantum discord.
//! All entropies are in nats.

use crate::error::{Error, Result};
use crate::hilbert::{
    hermiticity_error, partial_trace_first, partial_trace_second, C64, Operator,
};
use crate::linalg::{hermitian_eigenvalues, singular_values};
use std::f64::consts::PI;

/// Bipartite cut of a D-dimensional space into d₁·d₂ = D.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteSplit {
    pub dims: (usize, usize),
}

impl BipartiteSplit {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidSpec(format!(
                "bipartite split needs positive dimensions, got ({d1}, {d2})"
            )));
        }
        Ok(Self { dims: (d1, d2) })
    }

    fn check(&self, dim: usize) -> Result<()> {
        let (d1, d2) = self.dims;
        if d1 * d2 != dim {
            return Err(Error::DimensionMismatch(format!(
                "split ({d1}, {d2}) does not factor dimension {dim}"
            )));
        }
        Ok(())
    }
}

fn check_hermitian(rho: &Operator) -> Result<()> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let herm = hermiticity_error(rho);
    if herm > 1e-8 {
        return Err(Error::NonHermitian(herm));
    }
    Ok(())
}

/// Entropy of a probability vector; entries at or below 1e-14 contribute
/// nothing (covers the 0·ln 0 convention and solver-level negative dust).
fn entropy_of_eigenvalues(lambda: &[f64]) -> f64 {
    -lambda
        .iter()
        .filter(|&&v| v > 1e-14)
        .map(|&v| v * v.ln())
        .sum::<f64>()
}

/// S(ρ) = −Tr ρ ln ρ.
pub fn von_neumann_entropy(rho: &Operator) -> Result<f64> {
    check_hermitian(rho)?;
    let lambda = hermitian_eigenvalues(rho)?;
    Ok(entropy_of_eigenvalues(&lambda))
}

/// S_coh(ρ) = S(ρ_dia) − S(ρ): relative entropy of coherence in the basis
/// the matrix is written in.
pub fn relative_entropy_of_coherence(rho: &Operator) -> Result<f64> {
    check_hermitian(rho)?;
    let dia: Vec<f64> = rho.diag().iter().map(|z| z.re).collect();
    let s_full = von_neumann_entropy(rho)?;
    Ok((entropy_of_eigenvalues(&dia) - s_full).max(0.0))
}

/// I(ρ) = S(ρ₁) + S(ρ₂) − S(ρ) across the split.
pub fn mutual_information(rho: &Operator, split: BipartiteSplit) -> Result<f64> {
    check_hermitian(rho)?;
    split.check(rho.nrows())?;
    let s1 = von_neumann_entropy(&partial_trace_second(rho, split.dims))?;
    let s2 = von_neumann_entropy(&partial_trace_first(rho, split.dims))?;
    let s = von_neumann_entropy(rho)?;
    Ok(s1 + s2 - s)
}

/// ρ^{T₁}: transpose of the first subsystem's indices only.
pub fn partial_transpose_first(rho: &Operator, split: BipartiteSplit) -> Result<Operator> {
    split.check(rho.nrows())?;
    let (d1, d2) = split.dims;
    let mut out = Operator::zeros(rho.raw_dim());
    for i1 in 0..d1 {
        for j1 in 0..d1 {
            for i2 in 0..d2 {
                for j2 in 0..d2 {
                    out[[i1 * d2 + i2, j1 * d2 + j2]] = rho[[j1 * d2 + i2, i1 * d2 + j2]];
                }
            }
        }
    }
    Ok(out)
}

/// N = (‖ρ^{T₁}‖₁ − 1)/2, trace norm from the singular values.
pub fn negativity(rho: &Operator, split: BipartiteSplit) -> Result<f64> {
    check_hermitian(rho)?;
    let pt = partial_transpose_first(rho, split)?;
    let trace_norm: f64 = singular_values(&pt)?.iter().sum();
    Ok(((trace_norm - 1.0) / 2.0).max(0.0))
}

/// Eigenvalues of a Hermitian 2×2 matrix, closed form.
fn eig2(m: &Operator) -> (f64, f64) {
    let a = m[[0, 0]].re;
    let d = m[[1, 1]].re;
    let b = m[[0, 1]];
    let mid = (a + d) / 2.0;
    let rad = ((a - d) / 2.0).hypot(b.norm());
    (mid - rad, mid + rad)
}

/// Average conditional entropy of qubit 1 after the rank-1 projective
/// measurement {|v⟩⟨v|, |v⊥⟩⟨v⊥|} on qubit 2.
fn conditional_entropy(rho: &Operator, theta: f64, phi: f64) -> f64 {
    let half = theta / 2.0;
    let e = C64::new(0.0, phi).exp();
    // |v⟩ along the (θ, φ) axis and its orthogonal partner.
    let vs = [
        [C64::new(half.cos(), 0.0), e * half.sin()],
        [C64::new(half.sin(), 0.0), -e * half.cos()],
    ];
    let mut avg = 0.0;
    for v in vs {
        // Unnormalized qubit-1 state ⟨v|ρ^{(i1,j1)}|v⟩ over the 2×2 blocks.
        let mut m = Operator::zeros((2, 2));
        for i1 in 0..2 {
            for j1 in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for i2 in 0..2 {
                    for j2 in 0..2 {
                        acc += v[i2].conj() * rho[[i1 * 2 + i2, j1 * 2 + j2]] * v[j2];
                    }
                }
                m[[i1, j1]] = acc;
            }
        }
        let p = m[[0, 0]].re + m[[1, 1]].re;
        if p <= 1e-14 {
            continue;
        }
        let (l0, l1) = eig2(&m);
        avg += p * entropy_of_eigenvalues(&[l0 / p, l1 / p]);
    }
    avg
}

fn is_x_shaped(rho: &Operator) -> bool {
    let x_positions = [
        (0, 0),
        (1, 1),
        (2, 2),
        (3, 3),
        (0, 3),
        (3, 0),
        (1, 2),
        (2, 1),
    ];
    for i in 0..4 {
        for j in 0..4 {
            if !x_positions.contains(&(i, j)) && rho[[i, j]].norm() > 1e-10 {
                return false;
            }
        }
    }
    true
}

fn discord_with_measured_side(rho: &Operator, measure_first: bool) -> Result<(f64, f64, f64)> {
    check_hermitian(rho)?;
    if rho.nrows() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "discord needs a two-qubit state, got dimension {}",
            rho.nrows()
        )));
    }
    if !is_x_shaped(rho) {
        return Err(Error::InvalidSpec(
            "discord input is not X-shaped: entries off the diagonal and anti-diagonal exceed 1e-10"
                .into(),
        ));
    }
    let split = BipartiteSplit::new(2, 2)?;
    // Measuring qubit 1 instead is the same computation on the swapped
    // state, kept for symmetry checks.
    let swapped;
    let (rho, unmeasured) = if measure_first {
        let mut s = Operator::zeros((4, 4));
        for i1 in 0..2 {
            for i2 in 0..2 {
                for j1 in 0..2 {
                    for j2 in 0..2 {
                        s[[i2 * 2 + i1, j2 * 2 + j1]] = rho[[i1 * 2 + i2, j1 * 2 + j2]];
                    }
                }
            }
        }
        swapped = s;
        let unmeasured = partial_trace_second(&swapped, split.dims);
        (&swapped, unmeasured)
    } else {
        (rho, partial_trace_second(rho, split.dims))
    };

    let total = mutual_information(rho, split)?;
    let s1 = von_neumann_entropy(&unmeasured)?;

    // Dense scan over the measurement axis, then shrinking local grids.
    let n = 181;
    let mut best = f64::INFINITY;
    let (mut best_t, mut best_p) = (0.0, 0.0);
    for i in 0..n {
        let theta = (PI / 2.0) * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let phi = PI * j as f64 / n as f64;
            let v = conditional_entropy(rho, theta, phi);
            if v < best {
                best = v;
                best_t = theta;
                best_p = phi;
            }
        }
    }
    let mut half_t = (PI / 2.0) / (n - 1) as f64;
    let mut half_p = PI / n as f64;
    for _ in 0..3 {
        let (ct, cp) = (best_t, best_p);
        for i in 0..21 {
            let theta = (ct - half_t + 2.0 * half_t * i as f64 / 20.0).clamp(0.0, PI / 2.0);
            for j in 0..21 {
                let phi = (cp - half_p + 2.0 * half_p * j as f64 / 20.0).rem_euclid(PI);
                let v = conditional_entropy(rho, theta, phi);
                if v < best {
                    best = v;
                    best_t = theta;
                    best_p = phi;
                }
            }
        }
        half_t /= 10.0;
        half_p /= 10.0;
    }

    let classical = s1 - best;
    let discord = total - classical;
    if discord < -1e-8 {
        return Err(Error::SolverFailure(format!(
            "discord minimization produced D = {discord:.3e} < 0"
        )));
    }
    Ok((total, classical, discord))
}

/// (I, J, D) for a two-qubit X state, measuring qubit 2: total correlations,
/// classical correlations from the best projective measurement, and their
/// difference D = I − J.
pub fn x_state_discord(rho: &Operator) -> Result<(f64, f64, f64)> {
    discord_with_measured_side(rho, false)
}

/// Same quantities with the measurement on qubit 1; used for symmetry
/// checks, not part of the reporting path.
pub fn x_state_discord_measuring_first(rho: &Operator) -> Result<(f64, f64, f64)> {
    discord_with_measured_side(rho, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::dagger;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn bell() -> Operator {
        let mut rho = Operator::zeros((4, 4));
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            rho[[i, j]] = c(0.5, 0.0);
        }
        rho
    }

    #[test]
    fn entropy_reference_values() {
        let pure = array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-10);

        for d in [2usize, 3, 5, 8] {
            let mixed = Operator::eye(d).mapv(|z| z / d as f64);
            let s = von_neumann_entropy(&mixed).unwrap();
            assert!((s - (d as f64).ln()).abs() < 1e-10);
        }

        let split = BipartiteSplit::new(2, 2).unwrap();
        let reduced = partial_trace_second(&bell(), split.dims);
        let s = von_neumann_entropy(&reduced).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn entropy_rejects_non_hermitian() {
        let m = array![[c(1.0, 0.0), c(0.5, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(
            von_neumann_entropy(&m),
            Err(Error::NonHermitian(_))
        ));
    }

    #[test]
    fn coherence_reference_values() {
        let diag = array![[c(0.7, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.3, 0.0)]];
        assert!(relative_entropy_of_coherence(&diag).unwrap().abs() < 1e-12);

        let plus = array![[c(0.5, 0.0), c(0.5, 0.0)], [c(0.5, 0.0), c(0.5, 0.0)]];
        let s = relative_entropy_of_coherence(&plus).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn coherence_invariant_under_diagonal_unitaries() {
        let rho = bell();
        let phases = [0.3, 1.1, 2.7, 0.9];
        let mut u = Operator::zeros((4, 4));
        for (i, &p) in phases.iter().enumerate() {
            u[[i, i]] = C64::new(0.0, p).exp();
        }
        let rotated = u.dot(&rho).dot(&dagger(&u));
        let a = relative_entropy_of_coherence(&rho).unwrap();
        let b = relative_entropy_of_coherence(&rotated).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn mutual_information_reference_values() {
        let split = BipartiteSplit::new(2, 2).unwrap();
        // Product state ρ₁ ⊗ ρ₂.
        let r1 = array![[c(0.6, 0.0), c(0.2, 0.1)], [c(0.2, -0.1), c(0.4, 0.0)]];
        let r2 = array![[c(0.8, 0.0), c(0.1, 0.0)], [c(0.1, 0.0), c(0.2, 0.0)]];
        let prod = crate::hilbert::tensor(&r1, &r2);
        assert!(mutual_information(&prod, split).unwrap().abs() < 1e-10);

        let i_bell = mutual_information(&bell(), split).unwrap();
        assert!((i_bell - 2.0 * 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn partial_transpose_is_involution() {
        let split = BipartiteSplit::new(2, 3).unwrap();
        let mut rho = Operator::zeros((6, 6));
        let mut seed = 0.37f64;
        for i in 0..6 {
            for j in 0..6 {
                seed = (seed * 997.13).fract();
                rho[[i, j]] = c(seed, (seed * 3.0).fract());
            }
        }
        let twice =
            partial_transpose_first(&partial_transpose_first(&rho, split).unwrap(), split)
                .unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(rho[[i, j]], twice[[i, j]]);
            }
        }
    }

    #[test]
    fn negativity_reference_values() {
        let split = BipartiteSplit::new(2, 2).unwrap();
        let r1 = array![[c(0.9, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.1, 0.0)]];
        let r2 = array![[c(0.5, 0.0), c(0.3, 0.0)], [c(0.3, 0.0), c(0.5, 0.0)]];
        let prod = crate::hilbert::tensor(&r1, &r2);
        assert!(negativity(&prod, split).unwrap() < 1e-10);

        let n = negativity(&bell(), split).unwrap();
        assert!((n - 0.5).abs() < 1e-10);
    }

    #[test]
    fn discord_product_diagonal_state() {
        let mut rho = Operator::zeros((4, 4));
        for (i, w) in [(0, 0.4 * 0.7), (1, 0.4 * 0.3), (2, 0.6 * 0.7), (3, 0.6 * 0.3)] {
            rho[[i, i]] = c(w, 0.0);
        }
        let (i, j, d) = x_state_discord(&rho).unwrap();
        assert!(i.abs() < 1e-8);
        assert!(j.abs() < 1e-8);
        assert!(d.abs() < 1e-8);
    }

    #[test]
    fn discord_classically_correlated_state() {
        let mut rho = Operator::zeros((4, 4));
        rho[[0, 0]] = c(0.5, 0.0);
        rho[[3, 3]] = c(0.5, 0.0);
        let (i, j, d) = x_state_discord(&rho).unwrap();
        assert!((i - 2f64.ln()).abs() < 1e-6);
        assert!((j - 2f64.ln()).abs() < 1e-6);
        assert!(d.abs() < 1e-6);
    }

    #[test]
    fn discord_bell_state() {
        let (i, j, d) = x_state_discord(&bell()).unwrap();
        assert!((i - 2.0 * 2f64.ln()).abs() < 1e-6);
        assert!((j - 2f64.ln()).abs() < 1e-6);
        assert!((d - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn discord_rejects_non_x_input() {
        let mut rho = Operator::eye(4).mapv(|z| z / 4.0);
        rho[[0, 1]] = c(0.05, 0.0);
        rho[[1, 0]] = c(0.05, 0.0);
        assert!(x_state_discord(&rho).is_err());
    }

    fn random_x_state(seed: &mut u64) -> Operator {
        let mut next = || {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64) / ((1u64 << 53) as f64)
        };
        let mut p = [next(), next(), next(), next()];
        let t: f64 = p.iter().sum();
        for v in &mut p {
            *v /= t;
        }
        // Coherence magnitudes capped so ρ stays positive: |ρ₀₃| ≤ √(p₀p₃).
        let m03 = next() * (p[0] * p[3]).sqrt();
        let m12 = next() * (p[1] * p[2]).sqrt();
        let a03 = next() * 2.0 * PI;
        let a12 = next() * 2.0 * PI;
        let mut rho = Operator::zeros((4, 4));
        for (i, v) in p.iter().enumerate() {
            rho[[i, i]] = c(*v, 0.0);
        }
        rho[[0, 3]] = C64::from_polar(m03, a03);
        rho[[3, 0]] = rho[[0, 3]].conj();
        rho[[1, 2]] = C64::from_polar(m12, a12);
        rho[[2, 1]] = rho[[1, 2]].conj();
        rho
    }

    #[test]
    fn discord_bounds_on_random_x_states() {
        let mut seed = 0x5151u64;
        for _ in 0..8 {
            let rho = random_x_state(&mut seed);
            let (i, j, d) = x_state_discord(&rho).unwrap();
            assert!(d >= -1e-8, "D = {d}");
            assert!(j >= -1e-8, "J = {j}");
            assert!(d <= i + 1e-8, "D = {d} exceeds I = {i}");
            assert!(j <= i + 1e-8, "J = {j} exceeds I = {i}");
        }
    }

    #[test]
    fn discord_symmetric_under_swap_for_symmetric_state() {
        // Werner state: swap-symmetric, so both measurement sides agree.
        let mut rho = Operator::eye(4).mapv(|z| z * 0.25 * 0.4);
        let b = bell();
        rho = rho + b.mapv(|z| z * 0.6);
        let (i2, j2, d2) = x_state_discord(&rho).unwrap();
        let (i1, j1, d1) = x_state_discord_measuring_first(&rho).unwrap();
        assert!((i1 - i2).abs() < 1e-10);
        assert!((j1 - j2).abs() < 1e-6);
        assert!((d1 - d2).abs() < 1e-6);
    }
}
