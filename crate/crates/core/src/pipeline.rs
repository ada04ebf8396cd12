//! End-to-end runs over a declared bihamiltonian system.

use symkern::{Expr, SymMatrix, ZeroTestConfig};

use crate::geometry::{check_dubrovin_conditions, check_flat_pencil, is_flat, Coords, DubrovinCertificate, Frame};
use crate::hydro::{
    check_bihamiltonian, check_commuting, check_semisimple, translation_hamiltonians, BihamiltonianStructure,
    TranslationData, TranslationHamiltonians,
};
use crate::reciprocal::{
    closedness_certificate, composition_check, new_dependent_variables, pavlov_transformed_hamiltonian,
    pullback_structure, transform_flows, verify_potential, verify_theorem1, verify_theorem2_3, Candidates,
    CommutingFlow, InverseMap, LinearReciprocalTransform, PotentialRole, PulledBackStructure, SourceDensities,
    TransformedFlows, VariableChange,
};
use crate::report::{Check, Report};
use crate::Result;

/// A further flow `J₁∇h₁ = J₂∇f₁` of the hierarchy.
#[derive(Debug, Clone)]
pub struct FlowDefinition {
    pub h: Expr,
    pub f: Expr,
    pub candidates: Candidates,
}

#[derive(Debug, Clone)]
pub struct TransformDefinition {
    pub lr: LinearReciprocalTransform,
    pub v_coords: Coords,
    pub inverse: Option<InverseMap>,
    pub candidates: Candidates,
}

#[derive(Debug, Clone)]
pub struct SystemDefinition {
    pub name: String,
    pub coords: Coords,
    pub eta: SymMatrix,
    pub g: SymMatrix,
    pub h: Expr,
    pub f: Expr,
    pub flows: Vec<FlowDefinition>,
    pub translation: Option<TranslationData>,
    pub dubrovin: Option<DubrovinCertificate>,
    pub transform: Option<TransformDefinition>,
}

/// Everything computed by [`run_check`].
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub report: Report,
    pub structure: BihamiltonianStructure,
    pub v: SymMatrix,
    pub commuting: Vec<SymMatrix>,
    pub translation: TranslationHamiltonians,
}

fn prefixed(prefix: &str, checks: Vec<Check>) -> Vec<Check> {
    checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{prefix}.{}", c.name);
            c
        })
        .collect()
}

/// Structural checks of the system: both Hamiltonian representations, flatness,
/// the flat pencil, semisimplicity, the translation flow and every further flow.
pub fn run_check(def: &SystemDefinition, cfg: &ZeroTestConfig) -> Result<CheckOutcome> {
    let structure = BihamiltonianStructure::new(def.coords.clone(), def.eta.clone(), def.g.clone(), cfg)?;
    let mut report = Report::new();
    let (v, checks) = check_bihamiltonian(&structure, &def.h, &def.f, cfg)?;
    report.extend(checks);
    let mut flat = is_flat(&structure.g, cfg)?;
    flat.name = "flat-g".into();
    report.push(flat);
    let pencil = check_flat_pencil("flat-pencil", &def.eta, &def.g, Frame::Coordinate(&def.coords), cfg)?;
    report.extend(pencil.checks);
    report.summarize("flat-pencil", "flat-pencil.", "g - λη is flat for every λ");
    report.push(check_semisimple(&structure, cfg)?);
    if let Some(cert) = &def.dubrovin {
        report.extend(check_dubrovin_conditions(&def.eta, &structure.g, cert, cfg)?);
    }
    let translation = translation_hamiltonians(&structure, def.translation.as_ref(), cfg)?;
    report.extend(translation.checks.iter().cloned());
    let mut commuting = Vec::new();
    for (idx, flow) in def.flows.iter().enumerate() {
        let prefix = format!("t{}", idx + 1);
        let (a, checks) = check_bihamiltonian(&structure, &flow.h, &flow.f, cfg)?;
        report.extend(prefixed(&prefix, checks));
        let mut c = check_commuting("commuting", &v, &a, cfg)?;
        c.name = format!("{prefix}.commuting");
        report.push(c);
        commuting.push(a);
    }
    Ok(CheckOutcome { report, structure, v, commuting, translation })
}

/// Everything computed by [`run_transform`].
#[derive(Debug, Clone)]
pub struct TransformOutcome {
    pub check: CheckOutcome,
    pub lr: LinearReciprocalTransform,
    pub vc: VariableChange,
    pub flows: TransformedFlows,
    pub pulled: PulledBackStructure,
    /// Pavlov's closed form of `h̄`, as a function of `u`.
    pub hbar: Expr,
    pub report: Report,
}

/// The structural checks followed by the transformation and the verification
/// of the transformed structures.
pub fn run_transform(def: &SystemDefinition, cfg: &ZeroTestConfig) -> Result<Option<TransformOutcome>> {
    let Some(td) = &def.transform else {
        return Ok(None);
    };
    let check = run_check(def, cfg)?;
    let b = &check.structure;
    let mut report = check.report.clone();
    let lr = td.lr.clone();
    let (vc, checks) = new_dependent_variables(b, &def.h, &lr, td.v_coords.clone(), td.inverse.clone(), cfg)?;
    report.extend(checks);
    let (flows, c) = transform_flows(&check.v, &check.commuting, &lr, &vc.w, cfg)?;
    report.push(c);
    report.push(composition_check(&check.v, &lr, cfg)?);
    let (pulled, checks) = pullback_structure(b, &vc, cfg)?;
    report.extend(checks);
    let (hbar, c) = pavlov_transformed_hamiltonian(b, &def.h, &lr, &vc, cfg)?;
    report.push(c);

    let src = SourceDensities {
        h: def.h.clone(),
        f: def.f.clone(),
        h0: check.translation.h0.clone(),
        f0: check.translation.f0.clone(),
    };
    if let Some(hb) = &td.candidates.hbar {
        report.push(verify_potential("potential.hbar", PotentialRole::Hbar, hb, &vc, &lr, &src, None, cfg)?);
    }
    if let Some(hb) = vc.in_v(&hbar) {
        report.push(verify_potential("potential.hbar-pavlov", PotentialRole::Hbar, &hb, &vc, &lr, &src, None, cfg)?);
    }
    if let Some(fb) = &td.candidates.fbar {
        report.push(verify_potential("potential.fbar", PotentialRole::Fbar, fb, &vc, &lr, &src, None, cfg)?);
    }
    let mut commuting = Vec::new();
    for (idx, (flow, a)) in def.flows.iter().zip(&check.commuting).enumerate() {
        let t = format!("t{}", idx + 1);
        if let Some(c) = &flow.candidates.hbar {
            let name = format!("potential.{t}.h1bar");
            report.push(verify_potential(&name, PotentialRole::H1bar, c, &vc, &lr, &src, Some(&flow.h), cfg)?);
        }
        if let Some(c) = &flow.candidates.fbar {
            let name = format!("potential.{t}.f1bar");
            report.push(verify_potential(&name, PotentialRole::F1bar, c, &vc, &lr, &src, Some(&flow.f), cfg)?);
        }
        report.push(closedness_certificate(&format!("closedness.{t}.h1"), &flow.h, &vc.w, &def.coords, cfg)?);
        report.push(closedness_certificate(&format!("closedness.{t}.f1"), &flow.f, &vc.w, &def.coords, cfg)?);
        commuting.push(CommutingFlow {
            a: a.clone(),
            h1: flow.h.clone(),
            f1: flow.f.clone(),
            candidates: flow.candidates.clone(),
        });
    }
    report.extend(verify_theorem1(b, &vc, &pulled, cfg)?.checks);
    report.extend(verify_theorem2_3(b, &vc, &lr, &src, &pulled, &flows, &td.candidates, &commuting, cfg)?.checks);
    Ok(Some(TransformOutcome { check, lr, vc, flows, pulled, hbar, report }))
}

/// The same system under the identity transformation `(1, 0, 0, 1)`, with the
/// original coordinates renamed. Candidate densities are dropped.
pub fn with_identity_transform(def: &SystemDefinition) -> Result<SystemDefinition> {
    let names: Vec<String> = def.coords.names().iter().map(|s| format!("{s}_id")).collect();
    let v_coords = Coords::new(names.clone())?;
    let mut out = def.clone();
    for flow in &mut out.flows {
        flow.candidates = Candidates::default();
    }
    out.transform = Some(TransformDefinition {
        lr: LinearReciprocalTransform::identity(),
        v_coords,
        inverse: Some(InverseMap { u_of_v: names.iter().map(|s| Expr::sym(s)).collect() }),
        candidates: Candidates::default(),
    });
    Ok(out)
}
