//! Parameter-sweep engine: expands up to two axes into a grid, solves the
//! points independently in a fixed-size thread pool, and writes one CSV row
//! per point in lexicographic axis order.
//!
//! Points fail independently: a bad point contributes a marker row (its
//! measure cells are `nan`, the status column names the failure) and the
//! sweep continues. Output is written once, after all points finish, so
//! the file bytes never depend on scheduling.

use crate::config::RunConfig;
use crate::runner::{canonical_methods, discord_applies, fmt_f, solve_point, Failure, Solution};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

struct Scalars {
    tail: f64,
    s_m: Vec<f64>,
    k_d: Vec<usize>,
    s_coh: f64,
    mutual_information: f64,
    negativity: f64,
    discord: Option<f64>,
}

impl Scalars {
    fn of(solution: &Solution) -> Self {
        Scalars {
            tail: solution.tail,
            s_m: solution.reports.iter().map(|r| r.s_m).collect(),
            k_d: solution.reports.iter().map(|r| r.k_d).collect(),
            s_coh: solution.s_coh,
            mutual_information: solution.mutual_information,
            negativity: solution.negativity,
            discord: solution.discord,
        }
    }
}

pub fn run_sweep(config: &RunConfig, out_dir: &Path, workers: usize) -> Result<PathBuf, Failure> {
    config.validate().map_err(Failure::Schema)?;
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Failure::Schema("config has no sweep section; use `qsync run`".into()))?;

    let grids: Vec<Vec<f64>> = sweep.ranges.iter().map(|r| r.values()).collect();
    let points: Vec<Vec<f64>> = match grids.as_slice() {
        [only] => only.iter().map(|&a| vec![a]).collect(),
        [outer, inner] => outer
            .iter()
            .flat_map(|&a| inner.iter().map(move |&b| vec![a, b]))
            .collect(),
        _ => unreachable!("validate caps axes at 2"),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    let results: Vec<Result<Scalars, Failure>> = pool.install(|| {
        points
            .par_iter()
            .map(|values| {
                let mut point = config.clone();
                point.sweep = None;
                for (axis, &value) in sweep.axes.iter().zip(values) {
                    point.apply_path(axis, value).map_err(Failure::Schema)?;
                }
                solve_point(&point).map(|s| Scalars::of(&s))
            })
            .collect()
    });

    let methods = canonical_methods(&config.methods);
    let discord_column = discord_applies(config);
    let mut csv = String::new();
    csv.push_str(&sweep.axes.join(","));
    csv.push_str(",tail_mass");
    for m in &methods {
        write!(csv, ",S_m_{m}").unwrap();
    }
    for m in &methods {
        write!(csv, ",k_d_{m}").unwrap();
    }
    csv.push_str(",S_coh,mutual_information,negativity");
    if discord_column {
        csv.push_str(",discord");
    }
    csv.push_str(",status\n");

    for (values, result) in points.iter().zip(&results) {
        let cells: Vec<String> = values.iter().map(|&v| fmt_f(v)).collect();
        csv.push_str(&cells.join(","));
        match result {
            Ok(s) => {
                write!(csv, ",{}", fmt_f(s.tail)).unwrap();
                for v in &s.s_m {
                    write!(csv, ",{}", fmt_f(*v)).unwrap();
                }
                for k in &s.k_d {
                    write!(csv, ",{k}").unwrap();
                }
                write!(csv, ",{}", fmt_f(s.s_coh)).unwrap();
                write!(csv, ",{}", fmt_f(s.mutual_information)).unwrap();
                write!(csv, ",{}", fmt_f(s.negativity)).unwrap();
                if discord_column {
                    match s.discord {
                        Some(d) => write!(csv, ",{}", fmt_f(d)).unwrap(),
                        None => csv.push_str(",nan"),
                    }
                }
                csv.push_str(",ok\n");
            }
            Err(failure) => {
                let measure_cells = 1 + 2 * methods.len() + 3 + usize::from(discord_column);
                for _ in 0..measure_cells {
                    csv.push_str(",nan");
                }
                writeln!(csv, ",{}", failure.marker()).unwrap();
            }
        }
    }

    std::fs::create_dir_all(out_dir)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let path = out_dir.join("sweep.csv");
    std::fs::write(&path, csv)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{AxisRange, OutputKind, SweepSpec};
    use qsync_core::{InteractionKind, InteractionSpec, Method, SystemSpec};

    fn sweep_config(axes: Vec<String>, ranges: Vec<AxisRange>) -> RunConfig {
        RunConfig {
            systems: (
                SystemSpec::Qubit { omega: 1.0, gamma_g: 1.0, gamma_l: 2.0 },
                SystemSpec::Qubit { omega: 1.0, gamma_g: 1.0, gamma_l: 2.0 },
            ),
            interaction: InteractionSpec {
                kind: InteractionKind::DissipativeSum,
                strength: 0.5,
            },
            methods: vec![Method::Husimi],
            grid_points: 64,
            outputs: vec![OutputKind::Measures],
            sweep: Some(SweepSpec { axes, ranges }),
        }
    }

    #[test]
    fn rows_follow_lexicographic_axis_order() {
        let config = sweep_config(
            vec!["interaction.strength".into(), "systems.2.omega".into()],
            vec![
                AxisRange { min: 0.5, max: 1.0, count: 2 },
                AxisRange { min: 0.0, max: 1.0, count: 2 },
            ],
        );
        let dir = tempfile::tempdir().unwrap();
        let path = run_sweep(&config, dir.path(), 2).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "interaction.strength,systems.2.omega,tail_mass,S_m_husimi,k_d_husimi,S_coh,mutual_information,negativity,discord,status"
        );
        assert_eq!(lines.len(), 5);
        let first_cols: Vec<Vec<&str>> = lines[1..]
            .iter()
            .map(|l| l.split(',').take(2).collect())
            .collect();
        assert_eq!(first_cols[0], vec![fmt_f(0.5).as_str(), fmt_f(0.0).as_str()]);
        assert_eq!(first_cols[1], vec![fmt_f(0.5).as_str(), fmt_f(1.0).as_str()]);
        assert_eq!(first_cols[2], vec![fmt_f(1.0).as_str(), fmt_f(0.0).as_str()]);
        assert_eq!(first_cols[3], vec![fmt_f(1.0).as_str(), fmt_f(1.0).as_str()]);
        for line in &lines[1..] {
            assert!(line.ends_with(",ok"), "{line}");
        }
    }

    #[test]
    fn failing_point_leaves_marker_row_and_continues() {
        let config = sweep_config(
            vec!["systems.1.gamma_g".into()],
            vec![AxisRange { min: -1.0, max: 1.0, count: 2 }],
        );
        let dir = tempfile::tempdir().unwrap();
        let path = run_sweep(&config, dir.path(), 1).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].ends_with(",schema_violation"), "{}", lines[1]);
        assert!(lines[1].contains(",nan,"), "{}", lines[1]);
        assert!(lines[2].ends_with(",ok"), "{}", lines[2]);
    }
}
