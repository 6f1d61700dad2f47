//! Single-scenario pipeline: build, solve, gate on truncation, analyze,
//! write artifacts.
//!
//! Artifact floats are printed with 15 significant digits and -0 normalized
//! to 0, so running the same config twice reproduces byte-identical files.

use crate::config::{OutputKind, RunConfig};
use qsync_core::hilbert::{grouping_permutation, inverse_permutation};
use qsync_core::infomeasures::{
    mutual_information, negativity, relative_entropy_of_coherence, x_state_discord, BipartiteSplit,
};
use qsync_core::lindblad::{steady_state, truncation_check};
use qsync_core::scenarios::build_scenario;
use qsync_core::subsets::harmonic_report_with_grid;
use qsync_core::{CompositeSpace, Method, Operator, SubsetReport, SystemSpec};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// A run whose reduced-state population in the top `TAIL_LEVELS` Fock
/// levels exceeds this is reported as under-truncated instead of producing
/// silently wrong artifacts.
pub const TAIL_THRESHOLD: f64 = 1e-6;
pub const TAIL_LEVELS: usize = 2;

#[derive(Debug)]
pub enum Failure {
    Schema(String),
    Runtime(String),
    Truncation(f64),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Schema(_) => 2,
            Failure::Runtime(_) => 3,
            Failure::Truncation(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Schema(msg) => format!("invalid config: {msg}"),
            Failure::Runtime(msg) => msg.clone(),
            Failure::Truncation(tail) => {
                format!("truncation check failed: tail mass {}", fmt_f(*tail))
            }
        }
    }

    /// Tag written into the status column of a sweep row.
    pub fn marker(&self) -> &'static str {
        match self {
            Failure::Schema(_) => "schema_violation",
            Failure::Runtime(_) => "solver_failure",
            Failure::Truncation(_) => "truncation",
        }
    }
}

fn runtime(e: qsync_core::Error) -> Failure {
    Failure::Runtime(e.to_string())
}

/// Steady state of one parameter point plus everything the artifact
/// writers need.
pub struct Solution {
    pub space: CompositeSpace,
    pub rho: Operator,
    pub tail: f64,
    pub reports: Vec<SubsetReport>,
    pub s_coh: f64,
    pub mutual_information: f64,
    pub negativity: f64,
    pub discord: Option<f64>,
}

/// Requested methods in the fixed column order wigner, husimi, phase_states.
pub fn canonical_methods(requested: &[Method]) -> Vec<Method> {
    [Method::Wigner, Method::Husimi, Method::PhaseStates]
        .into_iter()
        .filter(|m| requested.contains(m))
        .collect()
}

pub fn discord_applies(config: &RunConfig) -> bool {
    matches!(config.systems.0, SystemSpec::Qubit { .. })
        && matches!(config.systems.1, SystemSpec::Qubit { .. })
}

pub fn solve_point(config: &RunConfig) -> Result<Solution, Failure> {
    config.validate().map_err(Failure::Schema)?;
    let scenario =
        build_scenario(config.systems.0, config.systems.1, config.interaction).map_err(runtime)?;
    let rho = steady_state(&scenario.l_total).map_err(runtime)?;
    let tail = truncation_check(&rho, &scenario.space, TAIL_LEVELS);
    if tail > TAIL_THRESHOLD {
        return Err(Failure::Truncation(tail));
    }
    let mut reports = Vec::new();
    for method in canonical_methods(&config.methods) {
        reports.push(
            harmonic_report_with_grid(&rho, &scenario.space, method, config.grid_points)
                .map_err(runtime)?,
        );
    }
    let (d1, d2) = scenario.space.dims();
    let split = BipartiteSplit::new(d1, d2).map_err(runtime)?;
    let s_coh = relative_entropy_of_coherence(&rho).map_err(runtime)?;
    let mi = mutual_information(&rho, split).map_err(runtime)?;
    let neg = negativity(&rho, split).map_err(runtime)?;
    // Discord is evaluated only for qubit pairs, where the optimal local
    // measurement search is exact for X-shaped states; a non-X state is
    // "not applicable", not an error.
    let discord = if discord_applies(config) {
        x_state_discord(&rho).ok().map(|(_, _, d)| d)
    } else {
        None
    };
    Ok(Solution {
        space: scenario.space,
        rho,
        tail,
        reports,
        s_coh,
        mutual_information: mi,
        negativity: neg,
        discord,
    })
}

pub fn run_scenario(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    if config.sweep.is_some() {
        return Err(Failure::Schema(
            "config has a sweep section; use `qsync sweep`".into(),
        ));
    }
    let solution = solve_point(config)?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut written = Vec::new();
    for output in &config.outputs {
        let text = match output {
            OutputKind::PhaseDist => phase_dist_csv(&solution),
            OutputKind::SubsetReport => subset_report_json(&solution),
            OutputKind::DensityMatrix => density_matrix_json(&solution),
            OutputKind::Measures => measures_json(&solution),
        };
        let path = out_dir.join(output.file_name());
        std::fs::write(&path, text)
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

/// 15 significant digits, -0 normalized so equal values print identically.
pub fn fmt_f(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.14e}")
}

fn phase_dist_csv(s: &Solution) -> String {
    let mut out = String::from("phi");
    for report in &s.reports {
        write!(out, ",P_{}", report.method).unwrap();
    }
    out.push('\n');
    let phi = &s.reports[0].distribution.phi;
    for i in 0..phi.len() {
        out.push_str(&fmt_f(phi[i]));
        for report in &s.reports {
            out.push(',');
            out.push_str(&fmt_f(report.distribution.p[i]));
        }
        out.push('\n');
    }
    out
}

fn subset_report_json(s: &Solution) -> String {
    let mut out = String::from("{\n  \"reports\": [\n");
    for (i, report) in s.reports.iter().enumerate() {
        let body = report.to_json_string("  ");
        let mut first = true;
        for line in body.lines() {
            if !first {
                out.push('\n');
            }
            out.push_str("    ");
            out.push_str(line);
            first = false;
        }
        if i + 1 < s.reports.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}

fn measures_json(s: &Solution) -> String {
    let mut out = String::from("{\n");
    writeln!(out, "  \"pair_type\": \"{}\",", s.space.pair_type()).unwrap();
    writeln!(out, "  \"tail_mass\": {},", fmt_f(s.tail)).unwrap();
    let method_map = |f: &mut dyn FnMut(&SubsetReport) -> String| {
        s.reports
            .iter()
            .map(|r| format!("\"{}\": {}", r.method, f(r)))
            .collect::<Vec<_>>()
            .join(", ")
    };
    writeln!(out, "  \"S_m\": {{{}}},", method_map(&mut |r| fmt_f(r.s_m))).unwrap();
    writeln!(out, "  \"k_d\": {{{}}},", method_map(&mut |r| r.k_d.to_string())).unwrap();
    let a_table = method_map(&mut |r| {
        let values: Vec<String> = r.entries.iter().map(|e| fmt_f(e.a)).collect();
        format!("[{}]", values.join(", "))
    });
    writeln!(out, "  \"A_k\": {{{a_table}}},").unwrap();
    writeln!(out, "  \"S_coh\": {},", fmt_f(s.s_coh)).unwrap();
    writeln!(out, "  \"mutual_information\": {},", fmt_f(s.mutual_information)).unwrap();
    if let Some(d) = s.discord {
        writeln!(out, "  \"negativity\": {},", fmt_f(s.negativity)).unwrap();
        writeln!(out, "  \"discord\": {}", fmt_f(d)).unwrap();
    } else {
        writeln!(out, "  \"negativity\": {}", fmt_f(s.negativity)).unwrap();
    }
    out.push_str("}\n");
    out
}

fn density_matrix_json(s: &Solution) -> String {
    let dim = s.space.dim();
    let (d1, d2) = s.space.dims();
    let grouped_pos = inverse_permutation(&grouping_permutation(&s.space));
    let mut out = String::from("{\n");
    writeln!(out, "  \"dim\": {dim},").unwrap();
    writeln!(out, "  \"dims\": [{d1}, {d2}],").unwrap();
    out.push_str("  \"entries\": [\n");
    for row in 0..dim {
        for col in 0..dim {
            let v = s.rho[[row, col]];
            write!(
                out,
                "    {{\"row\": {row}, \"col\": {col}, \"grouped_row\": {}, \"grouped_col\": {}, \"re\": {}, \"im\": {}}}",
                grouped_pos[row],
                grouped_pos[col],
                fmt_f(v.re),
                fmt_f(v.im)
            )
            .unwrap();
            if row + 1 < dim || col + 1 < dim {
                out.push(',');
            }
            out.push('\n');
        }
    }
    out.push_str("  ]\n}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use qsync_core::InteractionKind;
    use qsync_core::InteractionSpec;

    fn qubit_config() -> RunConfig {
        RunConfig {
            systems: (
                SystemSpec::Qubit { omega: 1.0, gamma_g: 1.0, gamma_l: 2.0 },
                SystemSpec::Qubit { omega: 1.0, gamma_g: 1.0, gamma_l: 2.0 },
            ),
            interaction: InteractionSpec {
                kind: InteractionKind::DissipativeSum,
                strength: 0.5,
            },
            methods: vec![Method::Husimi, Method::PhaseStates],
            grid_points: 64,
            outputs: vec![OutputKind::Measures],
            sweep: None,
        }
    }

    #[test]
    fn fmt_f_gives_15_digits_and_kills_negative_zero() {
        assert_eq!(fmt_f(1.0), "1.00000000000000e0");
        assert_eq!(fmt_f(-0.0), "0.00000000000000e0");
        assert_eq!(fmt_f(0.1), "1.00000000000000e-1");
    }

    #[test]
    fn canonical_method_order_is_fixed() {
        let requested = [Method::PhaseStates, Method::Wigner];
        assert_eq!(
            canonical_methods(&requested),
            vec![Method::Wigner, Method::PhaseStates]
        );
    }

    #[test]
    fn solve_point_produces_consistent_artifacts() {
        let config = qubit_config();
        let solution = solve_point(&config).unwrap();
        assert!(solution.tail <= TAIL_THRESHOLD);
        assert_eq!(solution.reports.len(), 2);
        assert!(solution.discord.is_some());

        let csv = phase_dist_csv(&solution);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("phi,P_husimi,P_phase_states"));
        assert_eq!(lines.count(), 64);

        let measures = measures_json(&solution);
        assert!(measures.contains("\"S_m\""));
        assert!(measures.contains("\"discord\""));
        let parsed: serde_json::Value = serde_json::from_str(&measures).unwrap();
        assert_eq!(parsed["pair_type"], "cv_cv");

        let report: serde_json::Value =
            serde_json::from_str(&subset_report_json(&solution)).unwrap();
        assert_eq!(report["reports"].as_array().unwrap().len(), 2);

        let dm: serde_json::Value = serde_json::from_str(&density_matrix_json(&solution)).unwrap();
        assert_eq!(dm["entries"].as_array().unwrap().len(), 16);
    }

    #[test]
    fn truncation_gate_reports_tail_mass() {
        let mut config = qubit_config();
        // A gain-dominated oscillator at n_max=3 piles population on the
        // truncation edge.
        config.systems = (
            SystemSpec::Cv { n_max: 3, omega: 1.0, gamma_g: 1.0, gamma_l: 0.01 },
            SystemSpec::Cv { n_max: 3, omega: 1.0, gamma_g: 1.0, gamma_l: 0.01 },
        );
        match solve_point(&config) {
            Err(Failure::Truncation(tail)) => assert!(tail > TAIL_THRESHOLD),
            _ => unreachable!("expected truncation failure"),
        }
    }
}
