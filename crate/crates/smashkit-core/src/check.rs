//! Named coherence checks: each bundles a diagram (or a pair of sibling
//! diagrams), picks the induction flavor its domain shape calls for,
//! generates the square obligations, and discharges them by normalization.
//!
//! The roster is fixed. Refl homotopies suffice everywhere except the
//! triangle, whose sides genuinely disagree on points and need the explicit
//! unit-collapse homotopy; the unitor roundtrips have leaf domains, so the
//! only obligation left is pointedness.

use std::time::Instant;

use serde::Serialize;

use crate::induction::{
    discharge, obligations_binary, obligations_quadruple, obligations_triple,
    pointedness_obligation, triangle_homotopy, Homotopy, Obligation, ObligationReport,
};
use crate::maps::{diagram, DiagramSides};
use crate::{Error, Result};

/// Result of one named check, shaped for direct JSON serialization.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: String,
    pub obligations: Vec<ObligationReport>,
    pub wall_time_ms: u64,
}

impl CheckOutcome {
    pub fn pass(&self) -> bool {
        self.status == "pass"
    }
}

/// The checks `run_check` knows, in reporting order.
pub fn check_names() -> &'static [&'static str] {
    &[
        "pentagon",
        "hexagon",
        "triangle",
        "involution",
        "naturality-alpha",
        "naturality-beta",
        "unit-naturality",
        "unitors",
    ]
}

/// The diagrams a check draws its sides from (two for the merged checks).
pub fn check_diagrams(name: &str) -> Result<Vec<DiagramSides>> {
    let names: &[&str] = match name {
        "pentagon" => &["pentagon"],
        "hexagon" => &["hexagon"],
        "triangle" => &["triangle"],
        "involution" => &["involution"],
        "naturality-alpha" => &["naturality-alpha"],
        "naturality-beta" => &["naturality-beta"],
        "unit-naturality" => &["unit-naturality-lambda", "unit-naturality-rho"],
        "unitors" => &["unitor-roundtrip-lambda", "unitor-roundtrip-rho"],
        other => return Err(Error::UnknownDiagram(other.to_string())),
    };
    names.iter().map(|n| diagram(n)).collect()
}

enum Flavor {
    /// Binary smash domain: two constancy walls.
    Binary,
    /// Left-nested ternary domain: items (i)-(v).
    Triple,
    /// Left-nested quaternary domain: items (i)-(vii).
    Quadruple,
    /// Leaf domain: nothing to induct over beyond the basepoint.
    PointOnly,
}

fn flavor_obligations(h: &Homotopy, flavor: &Flavor) -> Result<Vec<Obligation>> {
    let mut obls = match flavor {
        Flavor::Binary => obligations_binary(h)?,
        Flavor::Triple => obligations_triple(h)?,
        Flavor::Quadruple => obligations_quadruple(h)?,
        Flavor::PointOnly => Vec::new(),
    };
    obls.push(pointedness_obligation(h)?);
    Ok(obls)
}

fn diagram_obligations(name: &str, flavor: &Flavor) -> Result<Vec<Obligation>> {
    let d = diagram(name)?;
    let h = Homotopy::refl(&d.lhs_map(), &d.rhs_map())?;
    flavor_obligations(&h, flavor)
}

fn prefixed(prefix: &str, mut obls: Vec<Obligation>) -> Vec<Obligation> {
    for o in &mut obls {
        o.tag = format!("{}{}", prefix, o.tag);
    }
    obls
}

/// Run one named check: build the homotopy, generate its square family,
/// discharge every square by normalization, and time the whole thing.
pub fn run_check(name: &str) -> Result<CheckOutcome> {
    let start = Instant::now();
    let obligations = match name {
        "pentagon" => diagram_obligations("pentagon", &Flavor::Quadruple)?,
        "hexagon" => diagram_obligations("hexagon", &Flavor::Triple)?,
        "involution" => diagram_obligations("involution", &Flavor::Binary)?,
        "naturality-alpha" => diagram_obligations("naturality-alpha", &Flavor::Triple)?,
        "naturality-beta" => diagram_obligations("naturality-beta", &Flavor::Binary)?,
        "triangle" => {
            let h = triangle_homotopy()?;
            flavor_obligations(&h, &Flavor::Binary)?
        }
        "unit-naturality" => {
            let mut obls = prefixed(
                "lambda:",
                diagram_obligations("unit-naturality-lambda", &Flavor::Binary)?,
            );
            obls.extend(prefixed(
                "rho:",
                diagram_obligations("unit-naturality-rho", &Flavor::Binary)?,
            ));
            obls
        }
        "unitors" => {
            let mut obls = prefixed(
                "lambda:",
                diagram_obligations("unitor-roundtrip-lambda", &Flavor::PointOnly)?,
            );
            obls.extend(prefixed(
                "rho:",
                diagram_obligations("unitor-roundtrip-rho", &Flavor::PointOnly)?,
            ));
            obls
        }
        other => return Err(Error::UnknownDiagram(other.to_string())),
    };
    let report = discharge(&obligations);
    let status = if report.pass() { "pass" } else { "fail" };
    Ok(CheckOutcome {
        name: name.to_string(),
        status: status.to_string(),
        obligations: report.entries,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// Run the full roster in order.
pub fn run_all() -> Result<Vec<CheckOutcome>> {
    check_names().iter().map(|n| run_check(n)).collect()
}
