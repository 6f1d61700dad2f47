//! Perturbative steady-state expansion around an uncoupled Liouvillian L₀:
//! ρ(ε) = ρ⁰ + ε ρ¹ + ε² ρ² + … with ρⁿ = −L₀⁺ L_I ρ^{n−1}, where L₀⁺ is
//! the Moore-Penrose pseudoinverse. Also the subset-closure diagnostic that
//! shows why uncoupled dynamics cannot move coherence between the S_k.

use crate::error::{Error, Result};
use crate::hilbert::{dagger, trace, CompositeSpace, C64, Operator};
use crate::linalg::svd_full;
use crate::lindblad::{steady_state, vec_index, Superoperator};
use crate::subsets::member_indices;
use std::collections::HashMap;

/// Hilbert-space dimension above which the dense-SVD pseudoinverse is
/// refused (the superoperator is D²×D²).
pub const DENSE_PSEUDOINVERSE_LIMIT: usize = 100;

/// Cached SVD of a Liouvillian, exposing minimum-norm least-squares solves.
/// Singular values below 1e-10·σ_max are treated as exact zeros, which is
/// what removes the steady-state kernel direction from the solve.
pub struct PseudoInverse {
    dim: usize,
    u: faer::Mat<C64>,
    s: Vec<f64>,
    v: faer::Mat<C64>,
    cutoff: f64,
}

impl PseudoInverse {
    pub fn new(l0: &Superoperator) -> Result<Self> {
        Self::with_limit(l0, DENSE_PSEUDOINVERSE_LIMIT)
    }

    pub fn with_limit(l0: &Superoperator, max_hilbert_dim: usize) -> Result<Self> {
        let d = l0.hilbert_dim();
        if d > max_hilbert_dim {
            return Err(Error::CapacityExceeded(format!(
                "dense pseudoinverse limited to Hilbert dimension {max_hilbert_dim} \
                 ({}x{} superoperator), got {d}",
                max_hilbert_dim * max_hilbert_dim,
                max_hilbert_dim * max_hilbert_dim
            )));
        }
        let (u, s, v) = svd_full(&l0.to_dense())?;
        let cutoff = 1e-10 * s.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
        Ok(PseudoInverse { dim: d, u, s, v, cutoff })
    }

    pub fn hilbert_dim(&self) -> usize {
        self.dim
    }

    /// x = L₀⁺ b: V·diag(1/σ over σ above cutoff)·U†·b.
    pub fn apply_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim * self.dim;
        assert_eq!(b.len(), n);
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (j, &sj) in self.s.iter().enumerate() {
            if sj <= self.cutoff {
                continue;
            }
            let mut proj = C64::new(0.0, 0.0);
            for i in 0..n {
                proj += self.u[(i, j)].conj() * b[i];
            }
            let scale = proj / sj;
            for i in 0..n {
                out[i] += self.v[(i, j)] * scale;
            }
        }
        out
    }

    /// unvec(L₀⁺ vec(X)).
    pub fn apply(&self, x: &Operator) -> Operator {
        let d = self.dim;
        assert_eq!(x.nrows(), d);
        assert_eq!(x.ncols(), d);
        let mut b = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in 0..d {
                b[vec_index(r, c, d)] = x[[r, c]];
            }
        }
        let y = self.apply_vec(&b);
        let mut out = Operator::zeros((d, d));
        for r in 0..d {
            for c in 0..d {
                out[[r, c]] = y[vec_index(r, c, d)];
            }
        }
        out
    }
}

/// One-shot minimum-norm solve; build a [`PseudoInverse`] instead when
/// applying the same L₀ repeatedly.
pub fn pseudoinverse_apply(l0: &Superoperator, x: &Operator) -> Result<Operator> {
    Ok(PseudoInverse::new(l0)?.apply(x))
}

/// ρ(ε) = base + Σₙ εⁿ corrections[n−1]; epsilon is the formal strength the
/// series was built for (1.0 when the interaction carries its own scale).
#[derive(Debug, Clone)]
pub struct PerturbationSeries {
    pub epsilon: f64,
    pub base: Operator,
    pub corrections: Vec<Operator>,
}

impl PerturbationSeries {
    pub fn order(&self) -> usize {
        self.corrections.len()
    }

    pub fn evaluate(&self) -> Operator {
        self.evaluate_at(self.epsilon)
    }

    pub fn evaluate_at(&self, epsilon: f64) -> Operator {
        let mut acc = self.base.clone();
        let mut scale = 1.0;
        for corr in &self.corrections {
            scale *= epsilon;
            acc = acc + corr.mapv(|z| z * scale);
        }
        acc
    }
}

/// Iterates ρⁿ = −L₀⁺ L_I ρ^{n−1} from ρ⁰ = steady_state(L₀), Hermitian-
/// symmetrizing and trace-projecting every correction (the kernel direction
/// ρ⁰ absorbs any residual trace).
pub fn perturbative_steady_state(
    l0: &Superoperator,
    l_int: &Superoperator,
    order: usize,
) -> Result<PerturbationSeries> {
    if order < 1 {
        return Err(Error::InvalidSpec("perturbation order must be ≥ 1".into()));
    }
    if l0.hilbert_dim() != l_int.hilbert_dim() {
        return Err(Error::DimensionMismatch(format!(
            "L₀ dimension {} vs interaction dimension {}",
            l0.hilbert_dim(),
            l_int.hilbert_dim()
        )));
    }
    let base = steady_state(l0)?;
    let pinv = PseudoInverse::new(l0)?;
    let mut corrections: Vec<Operator> = Vec::with_capacity(order);
    let mut prev = base.clone();
    for _ in 0..order {
        let driven = l_int.apply(&prev);
        let raw = pinv.apply(&driven).mapv(|z| -z);
        let sym = (&raw + &dagger(&raw)).mapv(|z| z / 2.0);
        let t = trace(&sym).re;
        let corr = sym - base.mapv(|z| z * t);
        prev = corr.clone();
        corrections.push(corr);
    }
    Ok(PerturbationSeries { epsilon: 1.0, base, corrections })
}

/// Worst off-subset leakage of L₀ over the S_k basis operators: for each
/// X = |row⟩⟨col| with subset offset k, the L1 mass of unvec(L₀ vec X) on
/// positions whose offset differs from k. Uncoupled limit-cycle Liouvillians
/// keep this at rounding noise, which is what makes the subsets closed
/// families under the dynamics.
pub fn subset_closure_check(l0: &Superoperator, space: &CompositeSpace, k: i64) -> f64 {
    let d = space.dim();
    assert_eq!(l0.hilbert_dim(), d, "superoperator and space dimensions differ");
    let members = member_indices(space, k);
    if members.is_empty() {
        return 0.0;
    }
    let mut wanted = vec![false; d * d];
    for &(row, col) in &members {
        wanted[vec_index(row, col, d)] = true;
    }
    // Accumulate the wanted columns of L₀ (triplets may repeat positions).
    let mut columns: HashMap<usize, HashMap<usize, C64>> = HashMap::new();
    for &(r, c, v) in l0.triplets() {
        if wanted[c] {
            *columns.entry(c).or_default().entry(r).or_insert(C64::new(0.0, 0.0)) += v;
        }
    }
    let mut worst = 0.0f64;
    for &(row, col) in &members {
        let Some(column) = columns.get(&vec_index(row, col, d)) else {
            continue;
        };
        let mut mass = 0.0;
        for (&p, &v) in column {
            let (rr, cc) = (p % d, p / d);
            if space.subset_offset(rr, cc) != Some(k) {
                mass += v.norm();
            }
        }
        worst = worst.max(mass);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{fock_ladder, identity, tensor, SystemSpec};
    use crate::lindblad::{build_liouvillian, Dissipator};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Two uncoupled VdP oscillators with distinct rates.
    fn vdp_pair(n_max: usize) -> (CompositeSpace, Superoperator) {
        let spec1 = SystemSpec::Cv { n_max, omega: 1.0, gamma_g: 1.0, gamma_l: 0.2 };
        let spec2 = SystemSpec::Cv { n_max, omega: 1.0, gamma_g: 0.8, gamma_l: 0.3 };
        let space = CompositeSpace::new(spec1, spec2).unwrap();
        let d = n_max + 1;
        let (a, ad) = fock_ladder(n_max).unwrap();
        let eye = identity(d);
        let n_op = ad.dot(&a);
        let h = tensor(&n_op, &eye) + tensor(&eye, &n_op);
        let l = build_liouvillian(
            &h,
            &[
                Dissipator::new("gain_1", tensor(&ad, &eye), 1.0),
                Dissipator::new("loss2_1", tensor(&a.dot(&a), &eye), 0.2),
                Dissipator::new("gain_2", tensor(&eye, &ad), 0.8),
                Dissipator::new("loss2_2", tensor(&eye, &a.dot(&a)), 0.3),
            ],
        )
        .unwrap();
        (space, l)
    }

    /// −i[V, ·] for the excitation-conserving exchange V = a₁†a₂ + a₁a₂†.
    fn exchange_liouvillian(n_max: usize, g: f64) -> Superoperator {
        let d = n_max + 1;
        let (a, ad) = fock_ladder(n_max).unwrap();
        let eye = identity(d);
        let v = (tensor(&ad, &eye).dot(&tensor(&eye, &a))
            + tensor(&a, &eye).dot(&tensor(&eye, &ad)))
        .mapv(|z| z * g);
        let big = identity(d * d);
        let mut l = Superoperator::empty(d * d);
        l.add_term(c(0.0, -1.0), &v, &big);
        l.add_term(c(0.0, 1.0), &big, &v);
        l
    }

    /// −i[V, ·] for two-mode squeezing V = i g_s (a₁a₂ − a₁†a₂†).
    fn squeeze_liouvillian(n_max: usize, g_s: f64) -> Superoperator {
        let d = n_max + 1;
        let (a, ad) = fock_ladder(n_max).unwrap();
        let eye = identity(d);
        let v = (tensor(&a, &eye).dot(&tensor(&eye, &a))
            - tensor(&ad, &eye).dot(&tensor(&eye, &ad)))
        .mapv(|z| z * c(0.0, g_s));
        let big = identity(d * d);
        let mut l = Superoperator::empty(d * d);
        l.add_term(c(0.0, -1.0), &v, &big);
        l.add_term(c(0.0, 1.0), &big, &v);
        l
    }

    fn random_operator(d: usize, seed: &mut u64) -> Operator {
        let mut next = || {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let mut x = Operator::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                x[[i, j]] = c(next(), next());
            }
        }
        x
    }

    #[test]
    fn pseudoinverse_defining_identity() {
        let (_, l0) = vdp_pair(2);
        let pinv = PseudoInverse::new(&l0).unwrap();
        let mut seed = 7u64;
        for _ in 0..3 {
            let x = random_operator(9, &mut seed);
            let lx = l0.apply(&x);
            let l_pinv_lx = l0.apply(&pinv.apply(&lx));
            let err = (&l_pinv_lx - &lx).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-8, "defining identity violated by {err:.3e}");
        }
    }

    #[test]
    fn pseudoinverse_projects_out_kernel() {
        let (_, l0) = vdp_pair(2);
        let rho0 = steady_state(&l0).unwrap();
        let pinv = PseudoInverse::new(&l0).unwrap();
        let norm2: f64 = rho0.iter().map(|z| z.norm_sqr()).sum();
        let mut seed = 11u64;
        let x = random_operator(9, &mut seed);
        // L₀⁺L₀ projects onto the complement of span{vec(ρ⁰)}.
        let projected = pinv.apply(&l0.apply(&x));
        let overlap: C64 = rho0.iter().zip(x.iter()).map(|(r, v)| r.conj() * v).sum();
        let expected = &x - &rho0.mapv(|z| z * (overlap / norm2));
        let err = (&projected - &expected).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "kernel projection off by {err:.3e}");
    }

    #[test]
    fn pseudoinverse_stays_inside_subset() {
        let (space, l0) = vdp_pair(2);
        let d = space.dim();
        for k in 0..=2i64 {
            for (row, col) in member_indices(&space, k) {
                let mut x = Operator::zeros((d, d));
                x[[row, col]] = c(1.0, 0.0);
                let y = pinv_image(&l0, &x);
                let mut leak = 0.0;
                for r in 0..d {
                    for cc in 0..d {
                        if space.subset_offset(r, cc) != Some(k) {
                            leak += y[[r, cc]].norm();
                        }
                    }
                }
                assert!(leak < 1e-10, "S_{k} basis op leaked {leak:.3e}");
            }
        }
    }

    fn pinv_image(l0: &Superoperator, x: &Operator) -> Operator {
        PseudoInverse::new(l0).unwrap().apply(x)
    }

    #[test]
    fn capacity_limit_enforced() {
        let l = Superoperator::empty(101);
        assert!(matches!(
            PseudoInverse::new(&l),
            Err(Error::CapacityExceeded(_))
        ));
    }

    #[test]
    fn first_order_lives_in_s1() {
        let (space, l0) = vdp_pair(3);
        let l_int = exchange_liouvillian(3, 1.0);
        let series = perturbative_steady_state(&l0, &l_int, 2).unwrap();
        let d = space.dim();

        assert!((trace(&series.base).re - 1.0).abs() < 1e-10);
        for corr in &series.corrections {
            assert!(trace(corr).norm() < 1e-10);
            assert!(crate::hilbert::hermiticity_error(corr) < 1e-10);
        }

        let rho1 = &series.corrections[0];
        let mut off = 0.0f64;
        for r in 0..d {
            for cc in 0..d {
                if !matches!(space.subset_offset(r, cc), Some(1) | Some(-1)) {
                    off = off.max(rho1[[r, cc]].norm());
                }
            }
        }
        assert!(off < 1e-10, "first order leaks outside S₁ ∪ S₋₁: {off:.3e}");

        let rho2 = &series.corrections[1];
        let mut off2 = 0.0f64;
        for r in 0..d {
            for cc in 0..d {
                if !matches!(space.subset_offset(r, cc), Some(0) | Some(2) | Some(-2)) {
                    off2 = off2.max(rho2[[r, cc]].norm());
                }
            }
        }
        assert!(off2 < 1e-10, "second order leaks outside S₀ ∪ S₂ ∪ S₋₂: {off2:.3e}");
    }

    #[test]
    fn richardson_error_ratio_near_four() {
        let (_, l0) = vdp_pair(3);
        let l_int = exchange_liouvillian(3, 1.0);
        let series = perturbative_steady_state(&l0, &l_int, 1).unwrap();
        let err_at = |eps: f64| -> f64 {
            let l_full = l0.add(&l_int.scaled(c(eps, 0.0))).unwrap();
            let exact = steady_state(&l_full).unwrap();
            let approx = series.evaluate_at(eps);
            (&exact - &approx).iter().map(|z| z.norm()).fold(0.0, f64::max)
        };
        let e1 = err_at(1e-2);
        let e2 = err_at(5e-3);
        let ratio = e1 / e2;
        assert!(
            (3.0..=5.0).contains(&ratio),
            "expected O(ε²) remainder, got ratio {ratio:.3} (errors {e1:.3e}, {e2:.3e})"
        );
    }

    #[test]
    fn closure_holds_for_uncoupled_vdp() {
        let (space, l0) = vdp_pair(6);
        for k in 0..=3i64 {
            let leak = subset_closure_check(&l0, &space, k);
            assert!(leak <= 1e-12, "S_{k} closure broken by {leak:.3e}");
        }
    }

    #[test]
    fn squeezing_breaks_closure() {
        let (space, l0) = vdp_pair(3);
        let l = l0.add(&squeeze_liouvillian(3, 0.5)).unwrap();
        let leak = subset_closure_check(&l, &space, 0);
        assert!(leak > 1e-3, "squeezing should leak strongly, got {leak:.3e}");
    }

    #[test]
    fn exchange_shifts_subset_index_by_one() {
        let n_max = 3;
        let (space, _) = vdp_pair(n_max);
        let d = space.dim();
        let l_int = exchange_liouvillian(n_max, 1.0);
        for k in 0..=2i64 {
            for (row, col) in member_indices(&space, k) {
                let mut x = Operator::zeros((d, d));
                x[[row, col]] = c(1.0, 0.0);
                let y = l_int.apply(&x);
                let row_key = space.group_key2(row);
                let col_key = space.group_key2(col);
                for r in 0..d {
                    for cc in 0..d {
                        let v = y[[r, cc]].norm();
                        if v <= 1e-12 {
                            continue;
                        }
                        // Exchange conserves total excitation on both sides
                        // and moves the subset index to k ± 1.
                        assert_eq!(space.group_key2(r), row_key);
                        assert_eq!(space.group_key2(cc), col_key);
                        let off = space.subset_offset(r, cc).unwrap();
                        assert!(
                            off == k + 1 || off == k - 1,
                            "image of S_{k} op landed at offset {off}"
                        );
                    }
                }
            }
        }
    }
}
