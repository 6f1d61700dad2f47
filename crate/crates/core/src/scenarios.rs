//! Named constructors for the supported system/interaction combinations:
//! each config names a physical coupling, and this module turns the names
//! into an uncoupled Liouvillian L₀, an interaction part L_int, and their
//! sum. Detuning enters only through the second subsystem's ω (Δ = ω₂ − ω₁);
//! no rotating frame is applied.

use crate::error::{Error, Result};
use crate::hilbert::{
    fock_ladder, identity, spin_operators, tensor, CompositeSpace, C64, Operator, PairType,
    SystemSpec,
};
use crate::lindblad::{build_liouvillian, Dissipator, Superoperator};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    CoherentExchange,
    DissipativeSum,
    DissipativeSqSum,
    DissipativeCubeSum,
    TwoModeSqueeze,
    MixedLossA1A2sq,
    DissipativeAdag1A2,
    SpinExchangeAntisym,
    JaynesCummings,
    AntiJaynesCummings,
}

impl InteractionKind {
    pub fn is_dissipative(self) -> bool {
        matches!(
            self,
            InteractionKind::DissipativeSum
                | InteractionKind::DissipativeSqSum
                | InteractionKind::DissipativeCubeSum
                | InteractionKind::MixedLossA1A2sq
                | InteractionKind::DissipativeAdag1A2
        )
    }

    pub fn required_pair(self) -> PairType {
        match self {
            InteractionKind::SpinExchangeAntisym => PairType::SpinSpin,
            InteractionKind::JaynesCummings | InteractionKind::AntiJaynesCummings => {
                PairType::Hybrid
            }
            _ => PairType::CvCv,
        }
    }
}

impl std::fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InteractionKind::CoherentExchange => "coherent_exchange",
            InteractionKind::DissipativeSum => "dissipative_sum",
            InteractionKind::DissipativeSqSum => "dissipative_sq_sum",
            InteractionKind::DissipativeCubeSum => "dissipative_cube_sum",
            InteractionKind::TwoModeSqueeze => "two_mode_squeeze",
            InteractionKind::MixedLossA1A2sq => "mixed_loss_a1_a2sq",
            InteractionKind::DissipativeAdag1A2 => "dissipative_adag1_a2",
            InteractionKind::SpinExchangeAntisym => "spin_exchange_antisym",
            InteractionKind::JaynesCummings => "jaynes_cummings",
            InteractionKind::AntiJaynesCummings => "anti_jaynes_cummings",
        })
    }
}

/// A coupling name plus its scalar strength (g for coherent kinds, the rate
/// γ for dissipative kinds, g_s for squeezing).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionSpec {
    pub kind: InteractionKind,
    pub strength: f64,
}

impl InteractionSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.strength.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "interaction strength must be finite, got {}",
                self.strength
            )));
        }
        if self.kind.is_dissipative() && self.strength < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "dissipative coupling rate must be ≥ 0, got {}",
                self.strength
            )));
        }
        Ok(())
    }
}

/// Ready-to-solve pieces of one named configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub space: CompositeSpace,
    pub l0: Superoperator,
    pub l_int: Superoperator,
    pub l_total: Superoperator,
}

/// Free Hamiltonian and limit-cycle dissipators of a single subsystem.
fn local_terms(spec: &SystemSpec) -> Result<(Operator, Vec<(&'static str, Operator, f64)>)> {
    match *spec {
        SystemSpec::Cv { n_max, omega, gamma_g, gamma_l } => {
            let (a, ad) = fock_ladder(n_max)?;
            let h = ad.dot(&a).mapv(|z| z * omega);
            Ok((h, vec![
                ("gain", ad, gamma_g),
                ("two_photon_loss", a.dot(&a), gamma_l),
            ]))
        }
        SystemSpec::Qubit { omega, gamma_g, gamma_l } => {
            let (a, ad) = fock_ladder(1)?;
            let h = ad.dot(&a).mapv(|z| z * omega);
            Ok((h, vec![("gain", ad, gamma_g), ("loss", a, gamma_l)]))
        }
        SystemSpec::Spin { s, omega, gamma_g, gamma_l } => {
            let (sp, sm, sz) = spin_operators(s)?;
            let h = sz.mapv(|z| z * omega);
            // Equatorial limit cycle: both jumps vanish on |m = 0⟩.
            Ok((h, vec![
                ("limit_cycle_up", sp.dot(&sz), gamma_g),
                ("limit_cycle_down", sm.dot(&sz), gamma_l),
            ]))
        }
    }
}

/// Annihilation-like ladder of a cv or two-level subsystem.
fn cv_ladder(spec: &SystemSpec) -> Result<(Operator, Operator)> {
    match *spec {
        SystemSpec::Cv { n_max, .. } => fock_ladder(n_max),
        SystemSpec::Qubit { .. } => fock_ladder(1),
        SystemSpec::Spin { .. } => Err(Error::InvalidSpec(
            "spin subsystems have no bosonic ladder".into(),
        )),
    }
}

fn spin_s(spec: &SystemSpec) -> Result<f64> {
    match *spec {
        SystemSpec::Spin { s, .. } => Ok(s),
        _ => Err(Error::InvalidSpec("expected a spin subsystem".into())),
    }
}

fn commutator_liouvillian(v: &Operator) -> Result<Superoperator> {
    let herm = crate::hilbert::hermiticity_error(v);
    if herm > 1e-10 {
        return Err(Error::NonHermitian(herm));
    }
    let d = v.nrows();
    let eye = identity(d);
    let mut l = Superoperator::empty(d);
    l.add_term(C64::new(0.0, -1.0), v, &eye);
    l.add_term(C64::new(0.0, 1.0), &eye, v);
    Ok(l)
}

fn dissipator_liouvillian(label: &str, op: Operator, rate: f64, dim: usize) -> Result<Superoperator> {
    build_liouvillian(&Operator::zeros((dim, dim)), &[Dissipator::new(label, op, rate)])
}

/// Builds (L₀, L_int, L_total) for a named pair configuration.
pub fn build_scenario(
    first: SystemSpec,
    second: SystemSpec,
    interaction: InteractionSpec,
) -> Result<Scenario> {
    interaction.validate()?;
    let space = CompositeSpace::new(first, second)?;
    let needed = interaction.kind.required_pair();
    if space.pair_type() != needed {
        return Err(Error::IncompatibleInteraction {
            kind: interaction.kind.to_string(),
            pair: space.pair_type().to_string(),
        });
    }

    let (d1, d2) = space.dims();
    let (eye1, eye2) = (identity(d1), identity(d2));
    let (h1, diss1) = local_terms(&space.first)?;
    let (h2, diss2) = local_terms(&space.second)?;
    let h0 = tensor(&h1, &eye2) + tensor(&eye1, &h2);
    let mut dissipators = Vec::new();
    for (label, op, rate) in diss1 {
        dissipators.push(Dissipator::new(format!("{label}_1"), tensor(&op, &eye2), rate));
    }
    for (label, op, rate) in diss2 {
        dissipators.push(Dissipator::new(format!("{label}_2"), tensor(&eye1, &op), rate));
    }
    let l0 = build_liouvillian(&h0, &dissipators)?;

    let g = interaction.strength;
    let dim = space.dim();
    let l_int = match interaction.kind {
        InteractionKind::CoherentExchange => {
            let (a1, ad1) = cv_ladder(&space.first)?;
            let (a2, ad2) = cv_ladder(&space.second)?;
            let v = (tensor(&ad1, &a2) + tensor(&a1, &ad2)).mapv(|z| z * g);
            commutator_liouvillian(&v)?
        }
        InteractionKind::TwoModeSqueeze => {
            let (a1, ad1) = cv_ladder(&space.first)?;
            let (a2, ad2) = cv_ladder(&space.second)?;
            let v = (tensor(&a1, &a2) - tensor(&ad1, &ad2)).mapv(|z| z * C64::new(0.0, g));
            commutator_liouvillian(&v)?
        }
        InteractionKind::SpinExchangeAntisym => {
            let (sp1, sm1, _) = spin_operators(spin_s(&space.first)?)?;
            let (sp2, sm2, _) = spin_operators(spin_s(&space.second)?)?;
            let v = (tensor(&sp1, &sm2) - tensor(&sm1, &sp2)).mapv(|z| z * C64::new(0.0, g));
            commutator_liouvillian(&v)?
        }
        InteractionKind::JaynesCummings => {
            let (a, ad) = cv_ladder(&space.first)?;
            let (sp, sm, _) = spin_operators(spin_s(&space.second)?)?;
            let v = (tensor(&a, &sp) + tensor(&ad, &sm)).mapv(|z| z * g);
            commutator_liouvillian(&v)?
        }
        InteractionKind::AntiJaynesCummings => {
            let (a, ad) = cv_ladder(&space.first)?;
            let (sp, sm, _) = spin_operators(spin_s(&space.second)?)?;
            let v = (tensor(&ad, &sp) + tensor(&a, &sm)).mapv(|z| z * g);
            commutator_liouvillian(&v)?
        }
        InteractionKind::DissipativeSum => {
            let (a1, _) = cv_ladder(&space.first)?;
            let (a2, _) = cv_ladder(&space.second)?;
            let op = tensor(&a1, &eye2) + tensor(&eye1, &a2);
            dissipator_liouvillian("sum_loss", op, g, dim)?
        }
        InteractionKind::DissipativeSqSum => {
            let (a1, _) = cv_ladder(&space.first)?;
            let (a2, _) = cv_ladder(&space.second)?;
            let op = tensor(&a1.dot(&a1), &eye2) + tensor(&eye1, &a2.dot(&a2));
            dissipator_liouvillian("sq_sum_loss", op, g, dim)?
        }
        InteractionKind::DissipativeCubeSum => {
            let (a1, _) = cv_ladder(&space.first)?;
            let (a2, _) = cv_ladder(&space.second)?;
            let cube = |a: &Operator| a.dot(a).dot(a);
            let op = tensor(&cube(&a1), &eye2) + tensor(&eye1, &cube(&a2));
            dissipator_liouvillian("cube_sum_loss", op, g, dim)?
        }
        InteractionKind::MixedLossA1A2sq => {
            let (a1, _) = cv_ladder(&space.first)?;
            let (a2, _) = cv_ladder(&space.second)?;
            let op = tensor(&a1, &eye2) + tensor(&eye1, &a2.dot(&a2));
            dissipator_liouvillian("mixed_loss", op, g, dim)?
        }
        InteractionKind::DissipativeAdag1A2 => {
            let (_, ad1) = cv_ladder(&space.first)?;
            let (a2, _) = cv_ladder(&space.second)?;
            let op = tensor(&ad1, &eye2) + tensor(&eye1, &a2);
            dissipator_liouvillian("gain1_loss2", op, g, dim)?
        }
    };

    let l_total = l0.add(&l_int)?;
    Ok(Scenario { space, l0, l_int, l_total })
}
