//! End-to-end translations: from a tête-à-tête graph to Seifert data with the
//! horizontal class, and from plumbing data back to a metric graph.

use thiserror::Error;

use crate::horizontal::{horizontal_class, HorizontalClass, HorizontalError};
use crate::inverse::{realize_tat, InverseError, Realization};
use crate::quotient::{branch_points, orbit_graph, BranchPoint, OrbitGraph, QuotientError};
use crate::ribbon::{GraphError, RibbonGraph};
use crate::seifert::{
    euler_b, pair_from_rotation, plumbing_from_fibering, PlumbingGraph, SeifertError,
    SeifertFibering, SeifertPair,
};
use crate::tat::{boundary_rotation, tat_map, BoundaryOrbit, GraphAutomorphism, TatError};

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tat(#[from] TatError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Horizontal(#[from] HorizontalError),
    #[error(transparent)]
    Seifert(#[from] SeifertError),
    #[error(transparent)]
    Inverse(#[from] InverseError),
}

/// Everything the forward algorithm produces from one tête-à-tête graph.
pub struct ForwardRun {
    pub auto: GraphAutomorphism,
    pub orbit: OrbitGraph,
    pub branch: Vec<BranchPoint>,
    /// Normalized pairs of the interior special fibers, in branch order.
    pub pairs: Vec<SeifertPair>,
    /// Pairs obtained by capping the boundary orbits (trivial ones omitted).
    pub boundary_pairs: Vec<SeifertPair>,
    pub orbits: Vec<BoundaryOrbit>,
    pub euler: i64,
    pub fibering: SeifertFibering,
    pub plumbing: PlumbingGraph,
    pub class: HorizontalClass,
}

/// Runs the forward algorithm: quotient, branch data, normalized Seifert
/// pairs, Euler term via the capped boundary, plumbing graph and horizontal
/// class.
pub fn tat_to_seifert(g: &RibbonGraph) -> Result<ForwardRun, TranslateError> {
    let auto = tat_map(g)?;
    let orbit = orbit_graph(&auto)?;
    let branch = branch_points(&auto)?;
    let mut pairs = Vec::new();
    for b in &branch {
        pairs.push(pair_from_rotation(b.isotropy, b.rotation)?);
    }
    let orbits = boundary_rotation(&auto)?;
    let mut boundary_pairs = Vec::new();
    for o in &orbits {
        if o.rotation.is_integer() {
            continue; // trivial cap, no special fiber
        }
        let k = i64::try_from(o.rotation.denom().clone())
            .expect("rotation denominator fits i64");
        let p = i64::try_from(o.rotation.numer().clone()).expect("rotation numerator fits i64");
        boundary_pairs.push(pair_from_rotation(k, p)?);
    }
    let all: Vec<SeifertPair> = pairs.iter().chain(&boundary_pairs).copied().collect();
    let euler = euler_b(&all)?;
    let fibering = SeifertFibering::new(orbit.genus, orbit.boundary, pairs.clone(), Some(euler));
    let plumbing = plumbing_from_fibering(&fibering)?;
    let class = horizontal_class(&auto, &branch, &orbit)?;
    Ok(ForwardRun {
        auto,
        orbit,
        branch,
        pairs,
        boundary_pairs,
        orbits,
        euler,
        fibering,
        plumbing,
        class,
    })
}

/// Runs the inverse algorithm from plumbing data: reads the fibering off the
/// star-shaped graph and realizes a metric tête-à-tête graph for the class.
pub fn seifert_to_tat(
    plumbing: &PlumbingGraph,
    p: &[i64],
    q: i64,
) -> Result<Realization, TranslateError> {
    let fibering = crate::seifert::fibering_from_plumbing(plumbing)?;
    Ok(realize_tat(&fibering, p, q)?)
}
