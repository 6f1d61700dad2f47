//! Excitation-subset decomposition: the S_k families of density-matrix
//! elements allowed by the pair's excitation relation, their harmonic sums
//! C_k = A_k e^{iθ_k}, the interference diagnostic L_k (weighted sum of
//! absolute values), the dominant mode k_d, peak positions, and the
//! synchronization measure S_m = max(P − 1/2π).

use crate::error::{Error, Result};
use crate::hilbert::{
    check_state, grouping_permutation, inverse_permutation, C64, CompositeSpace, Operator,
    PairType,
};
use crate::phase::{method_weight, pair_k_max, relative_phase_distribution, Method,
    PhaseDistribution};
use std::f64::consts::PI;

/// One element of a subset S_k, carried with its basis labels (Fock numbers
/// or S_z values), its lexicographic matrix position, and its position in
/// the excitation-grouped ordering.
#[derive(Debug, Clone)]
pub struct SubsetMember {
    pub m1: f64,
    pub m2: f64,
    pub n1: f64,
    pub n2: f64,
    pub row: usize,
    pub col: usize,
    pub grouped_row: usize,
    pub grouped_col: usize,
    pub value: C64,
}

#[derive(Debug, Clone)]
pub struct SubsetEntry {
    pub k: usize,
    pub members: Vec<SubsetMember>,
    pub c: C64,
    pub a: f64,
    pub theta: f64,
    pub l: f64,
}

/// Full subset decomposition for one method, including the assembled
/// distribution it feeds.
#[derive(Debug, Clone)]
pub struct SubsetReport {
    pub pair_type: PairType,
    pub method: Method,
    pub entries: Vec<SubsetEntry>,
    pub k_d: usize,
    pub s_m: f64,
    pub distribution: PhaseDistribution,
}

/// (row, col) pairs of the subset S_k in lexicographic order; k may be
/// negative (S_{−k} holds the conjugate positions).
pub(crate) fn member_indices(space: &CompositeSpace, k: i64) -> Vec<(usize, usize)> {
    let d = space.dim();
    let mut out = Vec::new();
    for row in 0..d {
        for col in 0..d {
            if space.subset_offset(row, col) == Some(k) {
                out.push((row, col));
            }
        }
    }
    out
}

fn build_members(
    rho: &Operator,
    space: &CompositeSpace,
    k: i64,
    grouped_pos: &[usize],
) -> Vec<SubsetMember> {
    member_indices(space, k)
        .into_iter()
        .map(|(row, col)| {
            let (r1, r2) = space.unflat(row);
            let (c1, c2) = space.unflat(col);
            SubsetMember {
                m1: space.first.label2(r1) as f64 / 2.0,
                m2: space.second.label2(r2) as f64 / 2.0,
                n1: space.first.label2(c1) as f64 / 2.0,
                n2: space.second.label2(c2) as f64 / 2.0,
                row,
                col,
                grouped_row: grouped_pos[row],
                grouped_col: grouped_pos[col],
                value: rho[[row, col]],
            }
        })
        .collect()
}

/// All elements of S_k with their labels and values; k = 0 is the diagonal.
pub fn subset_members(
    rho: &Operator,
    space: &CompositeSpace,
    k: i64,
) -> Result<Vec<SubsetMember>> {
    if k < 0 {
        return Err(Error::InvalidSpec(format!(
            "subset index k must be ≥ 0 (S_{{−k}} holds the conjugates), got {k}"
        )));
    }
    check_state(rho, space.dim())?;
    let grouped_pos = inverse_permutation(&grouping_permutation(space));
    Ok(build_members(rho, space, k, &grouped_pos))
}

/// C_k and the weighted absolute sum L_k over S_k for one method.
fn weighted_sums(
    rho: &Operator,
    space: &CompositeSpace,
    method: Method,
    k: i64,
) -> Result<(C64, f64)> {
    let mut c = C64::new(0.0, 0.0);
    let mut l = 0.0f64;
    for (row, col) in member_indices(space, k) {
        let (r1, r2) = space.unflat(row);
        let (c1, c2) = space.unflat(col);
        let w = method_weight(method, &space.first, r1, c1)?
            * method_weight(method, &space.second, r2, c2)?;
        let term = rho[[row, col]] * w;
        c += term;
        l += term.norm();
    }
    Ok((c, l))
}

/// Full harmonic decomposition with the default 512-point grid.
pub fn harmonic_report(
    rho: &Operator,
    space: &CompositeSpace,
    method: Method,
) -> Result<SubsetReport> {
    harmonic_report_with_grid(rho, space, method, 512)
}

pub fn harmonic_report_with_grid(
    rho: &Operator,
    space: &CompositeSpace,
    method: Method,
    grid_points: usize,
) -> Result<SubsetReport> {
    let distribution = relative_phase_distribution(rho, space, method, grid_points)?;
    let grouped_pos = inverse_permutation(&grouping_permutation(space));
    let mut entries = Vec::with_capacity(pair_k_max(space) + 1);
    for k in 0..=pair_k_max(space) {
        let members = build_members(rho, space, k as i64, &grouped_pos);
        let (c, l) = weighted_sums(rho, space, method, k as i64)?;
        entries.push(SubsetEntry { k, members, c, a: c.norm(), theta: c.arg(), l });
    }
    // Dominant mode: argmax of A_k over k ≥ 1, smallest k on ties (within
    // 1e-12) for deterministic reports.
    let mut k_d = 1;
    let mut best = entries.get(1).map_or(0.0, |e| e.a);
    for e in entries.iter().skip(2) {
        if e.a > best + 1e-12 {
            best = e.a;
            k_d = e.k;
        }
    }
    let s_m = sync_measure(&distribution);
    Ok(SubsetReport {
        pair_type: space.pair_type(),
        method,
        entries,
        k_d,
        s_m,
        distribution,
    })
}

/// Synchronization measure S_m: maximum over the grid of P(φ) − 1/2π.
pub fn sync_measure(dist: &PhaseDistribution) -> f64 {
    dist.p
        .iter()
        .map(|p| p - 1.0 / (2.0 * PI))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The k_d peak angles in [0, 2π): analytic predictions from θ_{k_d}
/// refined to local maxima of the sampled grid (other modes of comparable
/// amplitude can shift peaks off the single-mode positions). Empty when
/// A_{k_d} carries no weight.
pub fn peak_positions(report: &SubsetReport) -> Vec<f64> {
    let kd = report.k_d;
    let entry = match report.entries.get(kd) {
        Some(e) if kd >= 1 && e.a > 1e-12 => e,
        _ => return Vec::new(),
    };
    let dist = &report.distribution;
    let m = dist.p.len();
    let step = 2.0 * PI / m as f64;
    let mut peaks = Vec::with_capacity(kd);
    let mut seen = vec![false; m];
    for n in 0..kd {
        // Maxima of cos(kφ + sign·θ) sit at φ = (−sign·θ + 2πn)/k.
        let predicted = (-dist.sign * entry.theta + 2.0 * PI * n as f64) / kd as f64;
        let mut idx =
            (predicted.rem_euclid(2.0 * PI) / step).round() as usize % m;
        // Hill-climb to the nearest local maximum of the sampled grid.
        loop {
            let up = (idx + 1) % m;
            let down = (idx + m - 1) % m;
            if dist.p[up] > dist.p[idx] {
                idx = up;
            } else if dist.p[down] > dist.p[idx] {
                idx = down;
            } else {
                break;
            }
        }
        if !seen[idx] {
            seen[idx] = true;
            peaks.push(dist.phi[idx]);
        }
    }
    peaks.sort_by(f64::total_cmp);
    peaks
}

/// Sum of |ρ(row,col)| over all elements that violate the excitation
/// relation (always off-diagonal).
pub fn mass_outside_relation(rho: &Operator, space: &CompositeSpace) -> f64 {
    let d = space.dim();
    let mut mass = 0.0;
    for row in 0..d {
        for col in 0..d {
            if space.subset_offset(row, col).is_none() {
                mass += rho[[row, col]].norm();
            }
        }
    }
    mass
}

/// Copy of ρ with every off-diagonal element inside the excitation relation
/// set to zero (the diagonal S₀ is kept). Hermiticity survives because S_k
/// and S_{−k} positions are mirror images.
pub fn zero_inside_relation(rho: &Operator, space: &CompositeSpace) -> Operator {
    let d = space.dim();
    let mut out = rho.clone();
    for row in 0..d {
        for col in 0..d {
            if row != col && space.subset_offset(row, col).is_some() {
                out[[row, col]] = C64::new(0.0, 0.0);
            }
        }
    }
    out
}

/// Copy of ρ with every element outside the excitation relation set to zero.
pub fn zero_outside_relation(rho: &Operator, space: &CompositeSpace) -> Operator {
    let d = space.dim();
    let mut out = rho.clone();
    for row in 0..d {
        for col in 0..d {
            if space.subset_offset(row, col).is_none() {
                out[[row, col]] = C64::new(0.0, 0.0);
            }
        }
    }
    out
}

/// Copy of ρ with the members of S_k and S_{−k} zeroed (both signs, so the
/// result stays Hermitian).
pub fn zero_subset(rho: &Operator, space: &CompositeSpace, k: usize) -> Operator {
    let d = space.dim();
    let mut out = rho.clone();
    for row in 0..d {
        for col in 0..d {
            if let Some(off) = space.subset_offset(row, col) {
                if off.unsigned_abs() as usize == k && k > 0 {
                    out[[row, col]] = C64::new(0.0, 0.0);
                }
            }
        }
    }
    out
}

fn fmt_float(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.14e}")
}

impl SubsetReport {
    /// JSON rendering with 15-significant-digit floats, suitable for
    /// byte-identical artifact comparison.
    pub fn to_json_string(&self, indent: &str) -> String {
        let pad = |n: usize| indent.repeat(n);
        let mut s = String::new();
        s.push_str(&format!("{}{{\n", pad(0)));
        s.push_str(&format!("{}\"pair_type\": \"{}\",\n", pad(1), self.pair_type));
        s.push_str(&format!("{}\"method\": \"{}\",\n", pad(1), self.method));
        s.push_str(&format!("{}\"k_d\": {},\n", pad(1), self.k_d));
        s.push_str(&format!("{}\"S_m\": {},\n", pad(1), fmt_float(self.s_m)));
        s.push_str(&format!("{}\"entries\": [\n", pad(1)));
        for (ei, e) in self.entries.iter().enumerate() {
            s.push_str(&format!("{}{{\n", pad(2)));
            s.push_str(&format!("{}\"k\": {},\n", pad(3), e.k));
            s.push_str(&format!("{}\"C_re\": {},\n", pad(3), fmt_float(e.c.re)));
            s.push_str(&format!("{}\"C_im\": {},\n", pad(3), fmt_float(e.c.im)));
            s.push_str(&format!("{}\"A\": {},\n", pad(3), fmt_float(e.a)));
            s.push_str(&format!("{}\"theta\": {},\n", pad(3), fmt_float(e.theta)));
            s.push_str(&format!("{}\"L\": {},\n", pad(3), fmt_float(e.l)));
            s.push_str(&format!("{}\"members\": [\n", pad(3)));
            for (mi, m) in e.members.iter().enumerate() {
                s.push_str(&format!(
                    "{}{{\"m1\": {}, \"m2\": {}, \"n1\": {}, \"n2\": {}, \"row\": {}, \"col\": {}, \"grouped_row\": {}, \"grouped_col\": {}, \"re\": {}, \"im\": {}}}{}\n",
                    pad(4),
                    fmt_float(m.m1),
                    fmt_float(m.m2),
                    fmt_float(m.n1),
                    fmt_float(m.n2),
                    m.row,
                    m.col,
                    m.grouped_row,
                    m.grouped_col,
                    fmt_float(m.value.re),
                    fmt_float(m.value.im),
                    if mi + 1 < e.members.len() { "," } else { "" }
                ));
            }
            s.push_str(&format!("{}],\n", pad(3)));
            s.push_str(&format!(
                "{}\"member_count\": {}\n",
                pad(3),
                e.members.len()
            ));
            s.push_str(&format!(
                "{}}}{}\n",
                pad(2),
                if ei + 1 < self.entries.len() { "," } else { "" }
            ));
        }
        s.push_str(&format!("{}]\n", pad(1)));
        s.push_str(&format!("{}}}", pad(0)));
        s
    }
}
