//! Config schema for the `qsync` binary: one JSON document per scenario,
//! naming the subsystem pair, the coupling, the analysis methods, and
//! optionally a one- or two-axis parameter sweep.
//!
//! Unknown fields are rejected so a typo in a reproduction recipe fails
//! loudly instead of silently running defaults.

use qsync_core::{CompositeSpace, InteractionSpec, Method, SystemSpec};
use serde::{Deserialize, Serialize};

pub const DEFAULT_GRID_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    PhaseDist,
    SubsetReport,
    DensityMatrix,
    Measures,
}

impl OutputKind {
    pub fn file_name(self) -> &'static str {
        match self {
            OutputKind::PhaseDist => "phase_dist.csv",
            OutputKind::SubsetReport => "subset_report.json",
            OutputKind::DensityMatrix => "density_matrix.json",
            OutputKind::Measures => "measures.json",
        }
    }
}

/// One swept axis: `count` evenly spaced values from `min` to `max`
/// inclusive. `count == 1` degenerates to the single value `min`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn values(&self) -> Vec<f64> {
        if self.count <= 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.min + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Parameter paths: `interaction.strength` or `systems.{1,2}.{omega,gamma_g,gamma_l}`.
    pub axes: Vec<String>,
    pub ranges: Vec<AxisRange>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub systems: (SystemSpec, SystemSpec),
    pub interaction: InteractionSpec,
    pub methods: Vec<Method>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    pub outputs: Vec<OutputKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        config.validate()?;
        Ok(config)
    }

    /// Everything checkable without solving: specs, pair/interaction and
    /// pair/method compatibility, output and sweep shape.
    pub fn validate(&self) -> Result<(), String> {
        let space =
            CompositeSpace::new(self.systems.0, self.systems.1).map_err(|e| e.to_string())?;
        self.interaction.validate().map_err(|e| e.to_string())?;
        if self.interaction.kind.required_pair() != space.pair_type() {
            return Err(format!(
                "interaction {} needs a {} pair, got {}",
                self.interaction.kind,
                self.interaction.kind.required_pair(),
                space.pair_type()
            ));
        }
        if self.methods.is_empty() {
            return Err("at least one method is required".into());
        }
        let cv_only_pair = self.systems.0.is_cv_like() && self.systems.1.is_cv_like();
        if !cv_only_pair && self.methods.contains(&Method::Wigner) {
            return Err("wigner weights are undefined for spin subsystems".into());
        }
        for (i, method) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(method) {
                return Err(format!("duplicate method {method}"));
            }
        }
        if self.outputs.is_empty() {
            return Err("at least one output is required".into());
        }
        for (i, output) in self.outputs.iter().enumerate() {
            if self.outputs[..i].contains(output) {
                return Err(format!("duplicate output {}", output.file_name()));
            }
        }
        if self.grid_points < 2 {
            return Err("grid_points must be at least 2".into());
        }
        if let Some(sweep) = &self.sweep {
            if sweep.axes.is_empty() || sweep.axes.len() > 2 {
                return Err("sweep needs one or two axes".into());
            }
            if sweep.axes.len() != sweep.ranges.len() {
                return Err(format!(
                    "sweep has {} axes but {} ranges",
                    sweep.axes.len(),
                    sweep.ranges.len()
                ));
            }
            if sweep.axes.len() == 2 && sweep.axes[0] == sweep.axes[1] {
                return Err("sweep axes must be distinct".into());
            }
            for range in &sweep.ranges {
                if range.count == 0 {
                    return Err("axis count must be at least 1".into());
                }
                if !(range.min.is_finite() && range.max.is_finite()) {
                    return Err("axis bounds must be finite".into());
                }
            }
            let mut probe = self.clone();
            for axis in &sweep.axes {
                slot(&mut probe, axis)?;
            }
        }
        Ok(())
    }

    pub fn apply_path(&mut self, path: &str, value: f64) -> Result<(), String> {
        *slot(self, path)? = value;
        Ok(())
    }
}

fn slot<'a>(config: &'a mut RunConfig, path: &str) -> Result<&'a mut f64, String> {
    let unresolvable = || format!("unresolvable parameter path '{path}'");
    let parts: Vec<&str> = path.split('.').collect();
    match parts.as_slice() {
        ["interaction", "strength"] => Ok(&mut config.interaction.strength),
        ["systems", index, field] => {
            let spec = match *index {
                "1" => &mut config.systems.0,
                "2" => &mut config.systems.1,
                _ => return Err(unresolvable()),
            };
            system_slot(spec, field).ok_or_else(unresolvable)
        }
        _ => Err(unresolvable()),
    }
}

fn system_slot<'a>(spec: &'a mut SystemSpec, field: &str) -> Option<&'a mut f64> {
    use SystemSpec::{Cv, Qubit, Spin};
    let (omega, gamma_g, gamma_l) = match spec {
        Cv { omega, gamma_g, gamma_l, .. }
        | Spin { omega, gamma_g, gamma_l, .. }
        | Qubit { omega, gamma_g, gamma_l } => (omega, gamma_g, gamma_l),
    };
    match field {
        "omega" => Some(omega),
        "gamma_g" => Some(gamma_g),
        "gamma_l" => Some(gamma_l),
        _ => None,
    }
}
