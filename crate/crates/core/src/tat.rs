//! Safe walks, the tête-à-tête decision procedure, extraction of the induced
//! periodic graph automorphism, and boundary rotation numbers.
//!
//! A safe walk is a unit-speed path of total length π (stored as 1). Arriving
//! at a vertex of valency ≥ 2 along a directed edge it departs along the
//! cyclic successor of the reversed edge; at a marked univalent vertex it
//! continues outward from the σ-image vertex. Walks therefore follow fixed
//! cycles of directed edges, which makes the tête-à-tête property decidable
//! by exact breakpoint refinement over the rational edge lengths.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Zero};
use thiserror::Error;

use crate::rational::{mod_one, signed_mod_one, Rational};
use crate::ribbon::{GraphError, RibbonGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TatError {
    #[error("walk must start in an edge interior")]
    StartAtVertex,
    #[error("graph is not tête-à-tête (witness half-edge {half_edge}, offset {offset})")]
    NotTat { half_edge: usize, offset: Rational },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// A point of the graph: distance `offset` from the tail of `half_edge`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphPoint {
    pub half_edge: usize,
    pub offset: Rational,
}

/// Location normal form: vertices are identified across incident edges,
/// interior points use the smaller half-edge of their edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonicalPoint {
    Vertex(usize),
    Interior { half_edge: usize, offset: Rational },
}

pub fn canonical_point(g: &RibbonGraph, half_edge: usize, offset: &Rational) -> CanonicalPoint {
    let len = g.length(half_edge);
    if offset.is_zero() {
        return CanonicalPoint::Vertex(g.vertex_id(half_edge));
    }
    if offset == len {
        return CanonicalPoint::Vertex(g.head(half_edge));
    }
    let partner = g.opposite(half_edge);
    if half_edge <= partner {
        CanonicalPoint::Interior { half_edge, offset: offset.clone() }
    } else {
        CanonicalPoint::Interior { half_edge: partner, offset: len - offset }
    }
}

/// Directed edge the walk takes after finishing `h`.
pub fn walk_successor(g: &RibbonGraph, h: usize) -> usize {
    let back = g.opposite(h);
    let head = g.vertex_id(back);
    if g.is_boundary_vertex(head) {
        // jump: continue outward from the σ-image vertex (its unique edge)
        g.sigma(head)
    } else {
        g.next(back)
    }
}

/// The cycles of the walk-successor permutation, with cumulative arclength
/// positions. Every directed edge lies on exactly one cycle.
#[derive(Debug, Clone)]
pub struct WalkCycles {
    pub cycles: Vec<WalkCycle>,
    pub cycle_of: Vec<usize>,
    pub index_in: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct WalkCycle {
    pub edges: Vec<usize>,
    /// Arclength position of the start of each edge; `starts[0] == 0`.
    pub starts: Vec<Rational>,
    pub total: Rational,
}

pub fn walk_cycles(g: &RibbonGraph) -> WalkCycles {
    let n = g.half_edge_count();
    let mut cycle_of = vec![usize::MAX; n];
    let mut index_in = vec![0usize; n];
    let mut cycles = Vec::new();
    for h0 in 0..n {
        if cycle_of[h0] != usize::MAX {
            continue;
        }
        let mut edges = Vec::new();
        let mut starts = Vec::new();
        let mut pos = Rational::zero();
        let mut h = h0;
        loop {
            cycle_of[h] = cycles.len();
            index_in[h] = edges.len();
            edges.push(h);
            starts.push(pos.clone());
            pos += g.length(h).clone();
            h = walk_successor(g, h);
            if h == h0 {
                break;
            }
        }
        cycles.push(WalkCycle { edges, starts, total: pos });
    }
    WalkCycles { cycles, cycle_of, index_in }
}

/// Endpoint of a walk of length `dist` from `(h, offset)`, with the directed
/// edge along which the walk would continue when the endpoint is a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkEnd {
    pub point: CanonicalPoint,
    pub continuation: usize,
}

pub fn walk_endpoint(
    g: &RibbonGraph,
    wc: &WalkCycles,
    h: usize,
    offset: &Rational,
    dist: &Rational,
) -> WalkEnd {
    let c = &wc.cycles[wc.cycle_of[h]];
    let i = wc.index_in[h];
    let raw = c.starts[i].clone() + offset + dist;
    let wraps = (raw.clone() / c.total.clone()).floor();
    let target = raw - wraps * c.total.clone();
    // locate the segment: largest k with starts[k] <= target
    let mut lo = 0usize;
    let mut hi = c.edges.len();
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if c.starts[mid] <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = lo;
    if c.starts[k] == target {
        // landed exactly on the start of edges[k]: the walk reached the end
        // of the previous edge; the point is that edge's head vertex (before
        // any σ-jump).
        let prev = c.edges[(k + c.edges.len() - 1) % c.edges.len()];
        WalkEnd {
            point: CanonicalPoint::Vertex(g.head(prev)),
            continuation: c.edges[k],
        }
    } else {
        let off = target - c.starts[k].clone();
        WalkEnd {
            point: canonical_point(g, c.edges[k], &off),
            continuation: c.edges[k],
        }
    }
}

/// Itinerary-level result of one safe walk of length π.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkResult {
    pub endpoint: CanonicalPoint,
    /// Every directed edge entered, in order (first and last may be partial).
    pub itinerary: Vec<usize>,
    /// Marked vertices visited (σ-jumps taken), in order.
    pub sigma_jumps: Vec<usize>,
}

/// Unit-length safe walk from an edge-interior point in the direction of
/// `start.half_edge`.
pub fn safe_walk(g: &RibbonGraph, start: &GraphPoint) -> Result<WalkResult, TatError> {
    let len0 = g.length(start.half_edge).clone();
    if !start.offset.is_positive() || start.offset >= len0 {
        return Err(TatError::StartAtVertex);
    }
    let mut itinerary = vec![start.half_edge];
    let mut sigma_jumps = Vec::new();
    let mut h = start.half_edge;
    let mut remaining = Rational::one();
    let mut avail = len0 - start.offset.clone();
    loop {
        if remaining < avail {
            let off = g.length(h).clone() - avail + remaining;
            return Ok(WalkResult {
                endpoint: canonical_point(g, h, &off),
                itinerary,
                sigma_jumps,
            });
        }
        remaining -= avail;
        let head = g.head(h);
        if remaining.is_zero() {
            return Ok(WalkResult {
                endpoint: CanonicalPoint::Vertex(head),
                itinerary,
                sigma_jumps,
            });
        }
        if g.is_boundary_vertex(head) {
            sigma_jumps.push(head);
        }
        h = walk_successor(g, h);
        itinerary.push(h);
        avail = g.length(h).clone();
    }
}

/// Offsets in `(0, len)` where the walk along `h` changes itinerary (the
/// endpoint crosses a vertex).
fn breakpoints(g: &RibbonGraph, wc: &WalkCycles, h: usize) -> Vec<Rational> {
    let len = g.length(h).clone();
    let c = &wc.cycles[wc.cycle_of[h]];
    let base = c.starts[wc.index_in[h]].clone() + Rational::one();
    let mut out = Vec::new();
    for sp in &c.starts {
        // τ ≡ sp − base (mod total), τ ∈ (0, len)
        let diff = sp.clone() - base.clone();
        let mut tau = mod_one(&(diff.clone() / c.total.clone())) * c.total.clone();
        if tau.is_zero() {
            tau = c.total.clone();
        }
        while tau < len {
            out.push(tau.clone());
            tau += c.total.clone();
        }
    }
    out
}

/// Decides the tête-à-tête property: whether both unit safe walks from every
/// edge-interior point end at the same point. Returns a witness on failure.
pub fn check_tat(g: &RibbonGraph) -> Result<(), TatError> {
    g.validate()?;
    let wc = walk_cycles(g);
    for h in 0..g.half_edge_count() {
        let hb = g.opposite(h);
        if hb < h {
            continue;
        }
        let len = g.length(h).clone();
        let mut taus: BTreeSet<Rational> = BTreeSet::new();
        for t in breakpoints(g, &wc, h) {
            taus.insert(t);
        }
        for t in breakpoints(g, &wc, hb) {
            taus.insert(len.clone() - t);
        }
        let bps: Vec<Rational> = taus.into_iter().collect();
        let mut samples: Vec<Rational> = Vec::with_capacity(2 * bps.len() + 1);
        let mut prev = Rational::zero();
        for b in &bps {
            samples.push((prev + b.clone()) / 2);
            samples.push(b.clone());
            prev = b.clone();
        }
        samples.push((prev + len.clone()) / 2);
        for tau in samples {
            let fwd = walk_endpoint(g, &wc, h, &tau, &Rational::one());
            let rev_off = len.clone() - tau.clone();
            let bwd = walk_endpoint(g, &wc, hb, &rev_off, &Rational::one());
            if fwd.point != bwd.point {
                return Err(TatError::NotTat { half_edge: h, offset: tau });
            }
        }
    }
    Ok(())
}

/// A finite-order isometric automorphism of a (possibly subdivided) metric
/// ribbon graph, as a permutation of directed edges.
#[derive(Debug, Clone)]
pub struct GraphAutomorphism {
    pub graph: RibbonGraph,
    pub perm: Vec<usize>,
    pub order: i64,
}

impl GraphAutomorphism {
    pub fn new(graph: RibbonGraph, perm: Vec<usize>) -> Result<Self, TatError> {
        verify_automorphism(&graph, &perm)?;
        let order = perm_order(&perm);
        Ok(GraphAutomorphism { graph, perm, order })
    }

    pub fn apply(&self, h: usize) -> usize {
        self.perm[h]
    }

    /// The permutation of `a^k` (k may exceed the order).
    pub fn power(&self, k: i64) -> Vec<usize> {
        let k = k.rem_euclid(self.order) as usize;
        let mut out: Vec<usize> = (0..self.perm.len()).collect();
        for _ in 0..k {
            out = out.iter().map(|&h| self.perm[h]).collect();
        }
        out
    }

    /// Image of a vertex (canonical id).
    pub fn apply_vertex(&self, v: usize) -> usize {
        self.graph.vertex_id(self.perm[v])
    }
}

pub fn perm_order(perm: &[usize]) -> i64 {
    let mut seen = vec![false; perm.len()];
    let mut order = 1i64;
    for h0 in 0..perm.len() {
        if seen[h0] {
            continue;
        }
        let mut len = 0i64;
        let mut h = h0;
        while !seen[h] {
            seen[h] = true;
            h = perm[h];
            len += 1;
        }
        order = crate::rational::lcm_i64(order, len);
    }
    order
}

fn verify_automorphism(g: &RibbonGraph, perm: &[usize]) -> Result<(), TatError> {
    let n = g.half_edge_count();
    if perm.len() != n {
        return Err(TatError::Internal("permutation size mismatch".into()));
    }
    let mut seen = vec![false; n];
    for &x in perm {
        if x >= n || seen[x] {
            return Err(TatError::Internal("not a permutation of directed edges".into()));
        }
        seen[x] = true;
    }
    for h in 0..n {
        if perm[g.opposite(h)] != g.opposite(perm[h]) {
            return Err(TatError::Internal(format!(
                "does not commute with the edge involution at {h}"
            )));
        }
        if perm[g.next(h)] != g.next(perm[h]) {
            return Err(TatError::Internal(format!(
                "does not commute with the vertex rotation at {h}"
            )));
        }
        if g.length(h) != g.length(perm[h]) {
            return Err(TatError::Internal(format!("does not preserve the length of {h}")));
        }
    }
    Ok(())
}

/// Extracts the periodic automorphism induced by the walks of a tête-à-tête
/// graph: subdivides until the endpoint map is simplicial and returns the
/// directed-edge permutation on the subdivided graph.
pub fn tat_map(g: &RibbonGraph) -> Result<GraphAutomorphism, TatError> {
    check_tat(g)?;
    let mut g = g.clone();
    // Subdivide until vertex images are vertices.
    let mut rounds = 0;
    loop {
        rounds += 1;
        if rounds > 10_000 {
            return Err(TatError::Internal("subdivision closure did not stabilize".into()));
        }
        let wc = walk_cycles(&g);
        let mut cuts: BTreeMap<usize, BTreeSet<Rational>> = BTreeMap::new();
        for h in 0..g.half_edge_count() {
            let end = walk_endpoint(&g, &wc, h, &Rational::zero(), &Rational::one());
            if let CanonicalPoint::Interior { half_edge, offset } = end.point {
                cuts.entry(half_edge).or_default().insert(offset);
            }
        }
        if cuts.is_empty() {
            break;
        }
        g = g.subdivide_all(&cuts)?;
    }
    loop {
        let wc = walk_cycles(&g);
        let mut perm = vec![0usize; g.half_edge_count()];
        for (h, slot) in perm.iter_mut().enumerate() {
            let end = walk_endpoint(&g, &wc, h, &Rational::zero(), &Rational::one());
            match end.point {
                CanonicalPoint::Vertex(_) => *slot = end.continuation,
                CanonicalPoint::Interior { .. } => {
                    return Err(TatError::Internal("closure left an interior image".into()))
                }
            }
        }
        // σ-consistency at the marked vertices.
        for &v in g.boundary_vertices() {
            if g.vertex_id(perm[v]) != g.sigma(v) {
                return Err(TatError::Internal(format!(
                    "walk image of marked vertex {v} differs from sigma"
                )));
            }
        }
        let order = perm_order(&perm);
        // Edges inverted by the half-order power get a midpoint vertex so
        // that fixed points of powers are vertices.
        if order % 2 == 0 {
            let mut pow = perm.clone();
            let mut k = 1i64;
            while k < order / 2 {
                pow = pow.iter().map(|&h| perm[h]).collect();
                k += 1;
            }
            let mut cuts: BTreeMap<usize, BTreeSet<Rational>> = BTreeMap::new();
            for h in 0..g.half_edge_count() {
                if pow[h] == g.opposite(h) && h < g.opposite(h) {
                    let mid = g.length(h).clone() / 2;
                    cuts.entry(h).or_default().insert(mid);
                }
            }
            if !cuts.is_empty() {
                g = g.subdivide_all(&cuts)?;
                continue;
            }
        }
        return GraphAutomorphism::new(g, perm);
    }
}

/// One orbit of boundary components (faces of the erased graph) under the
/// automorphism, with the rotation number of the return power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryOrbit {
    /// Indices into `graph.faces()`, in orbit order starting at the smallest.
    pub faces: Vec<usize>,
    pub size: i64,
    /// Rotation number of a^size on a face of the orbit, in `[0, 1)`,
    /// measured against the face direction.
    pub rotation: Rational,
    /// The same rotation as a representative in `(-1/2, 1/2]`.
    pub signed: Rational,
}

/// Rotation data of the automorphism on the boundary of the thickening.
pub fn boundary_rotation(a: &GraphAutomorphism) -> Result<Vec<BoundaryOrbit>, TatError> {
    let g = &a.graph;
    let faces = g.faces();
    let mut face_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, f) in faces.iter().enumerate() {
        for &h in &f.half_edges {
            face_of.insert(h, i);
        }
    }
    let image = |f: usize| -> usize { face_of[&a.apply(faces[f].half_edges[0])] };
    let mut seen = vec![false; faces.len()];
    let mut orbits = Vec::new();
    for f0 in 0..faces.len() {
        if seen[f0] {
            continue;
        }
        let mut orbit = vec![f0];
        seen[f0] = true;
        let mut f = image(f0);
        while f != f0 {
            seen[f] = true;
            orbit.push(f);
            f = image(f);
        }
        let s = orbit.len() as i64;
        // Forward arclength shift of a^s on the starting face.
        let face = &faces[f0];
        let h0 = face.half_edges[0];
        let mut h1 = h0;
        for _ in 0..s {
            h1 = a.apply(h1);
        }
        let pos = |h: usize| -> Rational {
            let mut p = Rational::zero();
            for &x in &face.half_edges {
                if x == h {
                    return p;
                }
                p += g.length(x).clone();
            }
            unreachable!("a^s image left its face orbit");
        };
        let delta_fwd = pos(h1) - pos(h0);
        let rotation = mod_one(&(-delta_fwd / face.total_length.clone()));
        let signed = signed_mod_one(&rotation);
        orbits.push(BoundaryOrbit { faces: orbit, size: s, rotation, signed });
    }
    Ok(orbits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{rat, rat_int};

    #[test]
    fn circle_walk_wraps_once() {
        let g = fixtures::circle_graph(rat_int(1));
        let w = safe_walk(&g, &GraphPoint { half_edge: 0, offset: rat(1, 4) }).unwrap();
        assert_eq!(w.itinerary, vec![0, 0]);
        assert_eq!(
            w.endpoint,
            CanonicalPoint::Interior { half_edge: 0, offset: rat(1, 4) }
        );
        assert!(w.sigma_jumps.is_empty());
    }

    #[test]
    fn circle_is_tat_with_identity_map() {
        let g = fixtures::circle_graph(rat_int(1));
        check_tat(&g).unwrap();
        let a = tat_map(&g).unwrap();
        assert_eq!(a.order, 1);
        assert!(a.perm.iter().enumerate().all(|(h, &x)| h == x));
        let orbits = boundary_rotation(&a).unwrap();
        assert_eq!(orbits.len(), 2);
        for o in orbits {
            assert_eq!(o.size, 1);
            assert!(o.rotation.is_zero());
        }
    }

    #[test]
    fn bounce_walk_follows_sigma() {
        let g = fixtures::bounce_example();
        // Edge 0/1: 0 at the marked vertex u, 1 at w. Walk from the midpoint
        // toward u: bounce at u, back along the edge, then into the loop.
        let w = safe_walk(&g, &GraphPoint { half_edge: 1, offset: rat(1, 4) }).unwrap();
        assert_eq!(w.itinerary, vec![1, 0, 2]);
        assert_eq!(w.sigma_jumps, vec![g.vertex_id(0)]);
        assert_eq!(
            w.endpoint,
            CanonicalPoint::Interior { half_edge: 2, offset: rat(1, 4) }
        );
    }

    #[test]
    fn k411_walks_agree_from_both_directions() {
        let g = fixtures::k411();
        for (h, tau) in [(0usize, rat(1, 5)), (17, rat(3, 7)), (80, rat(1, 2))] {
            let len = g.length(h).clone();
            let fwd = safe_walk(&g, &GraphPoint { half_edge: h, offset: tau.clone() }).unwrap();
            let bwd = safe_walk(
                &g,
                &GraphPoint { half_edge: g.opposite(h), offset: len - tau },
            )
            .unwrap();
            assert_eq!(fwd.endpoint, bwd.endpoint);
        }
    }

    #[test]
    fn k411_is_tat_of_order_44() {
        let g = fixtures::k411();
        check_tat(&g).unwrap();
        let a = tat_map(&g).unwrap();
        assert_eq!(a.order, 44);
        // No subdivision was necessary: vertex images are vertices.
        assert_eq!(a.graph.half_edge_count(), g.half_edge_count());
    }

    #[test]
    fn k411_boundary_rotation_is_minus_one_over_44() {
        let a = tat_map(&fixtures::k411()).unwrap();
        let orbits = boundary_rotation(&a).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].size, 1);
        assert_eq!(orbits[0].rotation, rat(43, 44));
        assert_eq!(orbits[0].signed, rat(-1, 44));
    }

    #[test]
    fn perturbed_k411_is_rejected_with_a_witness() {
        let g = fixtures::k411_perturbed();
        let err = check_tat(&g).unwrap_err();
        match err {
            TatError::NotTat { half_edge, offset } => {
                // Sampling oracle: the two safe walks from the witness really
                // do end at different points.
                let len = g.length(half_edge).clone();
                let fwd =
                    safe_walk(&g, &GraphPoint { half_edge, offset: offset.clone() }).unwrap();
                let bwd = safe_walk(
                    &g,
                    &GraphPoint { half_edge: g.opposite(half_edge), offset: len - offset },
                )
                .unwrap();
                assert_ne!(fwd.endpoint, bwd.endpoint);
            }
            other => panic!("expected NotTat, got {other:?}"),
        }
    }

    #[test]
    fn k23_order_is_lcm_of_isotropies() {
        let g = fixtures::complete_bipartite(2, 3, rat(1, 2));
        check_tat(&g).unwrap();
        let a = tat_map(&g).unwrap();
        assert_eq!(a.order, 6);
    }

    #[test]
    fn walk_start_must_be_interior() {
        let g = fixtures::circle_graph(rat_int(1));
        assert!(matches!(
            safe_walk(&g, &GraphPoint { half_edge: 0, offset: rat_int(0) }),
            Err(TatError::StartAtVertex)
        ));
        assert!(matches!(
            safe_walk(&g, &GraphPoint { half_edge: 0, offset: rat_int(1) }),
            Err(TatError::StartAtVertex)
        ));
    }

    #[test]
    fn endpoint_continuity_within_a_breakpoint_interval() {
        let g = fixtures::k411();
        let wc = walk_cycles(&g);
        let h = 6usize;
        let bps = breakpoints(&g, &wc, h);
        // pick two offsets strictly inside the first interval
        let upper = bps.iter().min().cloned().unwrap_or_else(|| g.length(h).clone());
        let t1 = upper.clone() / 4;
        let t2 = upper / 3;
        let e1 = walk_endpoint(&g, &wc, h, &t1, &Rational::one());
        let e2 = walk_endpoint(&g, &wc, h, &t2, &Rational::one());
        match (e1.point, e2.point) {
            (
                CanonicalPoint::Interior { half_edge: a, offset: o1 },
                CanonicalPoint::Interior { half_edge: b, offset: o2 },
            ) => {
                assert_eq!(a, b);
                let diff = if a == e1.continuation || a == g.opposite(e1.continuation) {
                    o2 - o1
                } else {
                    o1 - o2
                };
                assert_eq!(diff.abs(), (t2 - t1).abs());
            }
            other => panic!("expected interior endpoints, got {other:?}"),
        }
    }
}
