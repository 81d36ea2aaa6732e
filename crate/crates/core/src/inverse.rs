//! From a Seifert fibering plus a horizontal class to the lifted spine with
//! its monodromy, and on to a metric tête-à-tête graph realizing it.
//!
//! The lifted graph is a voltage-graph derived cover of a quotient spine
//! (wedge of circles, one pendant segment per special fiber ending in a
//! star center, and pendant cut stubs where the monodromy permutes boundary
//! components). The deck translation by one sheet is the monodromy. Edge
//! lengths come from an exact rational feasibility system stating that every
//! walk cycle's shift equals π.

use std::collections::BTreeMap;

use num::Zero;
use thiserror::Error;

use crate::feasibility::solve_strictly_positive;
use crate::horizontal::{fundamental_cycles, HorizontalError};
use crate::quotient::QuotientError;
use crate::rational::{gcd_i64, lcm_i64, rat, rat_int, Rational};
use crate::ribbon::{GraphError, RibbonGraph};
use crate::seifert::{torus_type, SeifertError, SeifertFibering, SeifertPair};
use crate::tat::{
    boundary_rotation, walk_cycles, walk_endpoint, BoundaryOrbit, CanonicalPoint,
    GraphAutomorphism, TatError,
};

#[derive(Debug, Error)]
pub enum InverseError {
    #[error("the fibering has empty boundary")]
    ClosedManifold,
    #[error("class is reducible: the horizontal surface has {components} components")]
    ReducibleClass { components: i64 },
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("no tête-à-tête metric found; failing system:\n{system}")]
    Infeasible { system: String },
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
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// Combinatorial record of the fixed model of a Seifert fibering: one arc per
/// special fiber cut from a single chosen boundary component, with the
/// solid-torus type of each fiber neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandyModel {
    pub genus: i64,
    pub boundary: i64,
    /// Rank of the first homology of the base (wedge size).
    pub mu: i64,
    pub branches: Vec<BranchImage>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchImage {
    pub pair: SeifertPair,
    /// (p, α): the fiber neighborhood is the solid torus of that type.
    pub torus: (i64, i64),
    /// Position of the cutting arc along the chosen boundary.
    pub arc: usize,
}

pub fn handy_model(f: &SeifertFibering) -> Result<HandyModel, InverseError> {
    if f.boundary < 1 {
        return Err(InverseError::ClosedManifold);
    }
    if f.genus < 0 {
        return Err(InverseError::BadInput("negative genus".into()));
    }
    let mut branches = Vec::new();
    for (i, pair) in f.pairs.iter().enumerate() {
        if !pair.is_normalized() || pair.alpha < 2 {
            return Err(InverseError::BadInput(format!(
                "pair ({}, {}) is not a normalized special-fiber pair",
                pair.alpha, pair.beta
            )));
        }
        branches.push(BranchImage { pair: *pair, torus: torus_type(pair)?, arc: i });
    }
    Ok(HandyModel {
        genus: f.genus,
        boundary: f.boundary,
        mu: 2 * f.genus + f.boundary - 1,
        branches,
    })
}

// ---------------------------------------------------------------------------
// quotient spine and its derived cover

#[derive(Debug, Clone)]
enum SpineNode {
    /// Ordinary vertex; counterclockwise order of spine half-edges.
    Regular { order: Vec<usize> },
    /// Branch center: head of exactly one edge; the derived cover replaces it
    /// by n/alpha star centers whose arm order steps the sheet by coset_step.
    Center { alpha: i64, coset_step: i64 },
    /// Cut stub tip: head of exactly one edge; its lifts are the marked
    /// vertices, permuted by the deck translation.
    StubTip,
}

#[derive(Debug, Clone)]
struct SpineEdge {
    tail: usize,
    head: usize,
    voltage: i64,
}

/// Quotient-level combinatorial data. Spine half-edges are `2e` (at the tail
/// of edge `e`) and `2e+1` (at the head).
#[derive(Debug, Clone)]
struct Spine {
    nodes: Vec<SpineNode>,
    edges: Vec<SpineEdge>,
}

impl Spine {
    fn new() -> Self {
        Spine { nodes: Vec::new(), edges: Vec::new() }
    }

    fn add_regular(&mut self) -> usize {
        self.nodes.push(SpineNode::Regular { order: Vec::new() });
        self.nodes.len() - 1
    }

    fn add_edge(&mut self, tail: usize, head: usize, voltage: i64) -> usize {
        self.edges.push(SpineEdge { tail, head, voltage });
        self.edges.len() - 1
    }

    fn order_mut(&mut self, node: usize) -> &mut Vec<usize> {
        match &mut self.nodes[node] {
            SpineNode::Regular { order } => order,
            _ => panic!("not a regular node"),
        }
    }

    /// The spine itself as a ribbon graph (the derived cover with one sheet),
    /// with unit lengths. Half-edge ids coincide with spine half ids.
    fn as_ribbon(&self) -> Result<RibbonGraph, InverseError> {
        let d = derive(self, 1, &vec![rat_int(1); self.edges.len()])?;
        Ok(d.auto.graph)
    }

    /// Splits edge `e` into `cuts + 1` segments joined at new regular feet,
    /// each foot carrying one stub to a fresh tip, inserted on the side
    /// walked in the direction of half `2e` if `forward` (else the other).
    /// The first segment keeps slot `e` and the original voltage.
    fn insert_stubs(&mut self, e: usize, forward: bool, cuts: usize) {
        let head = self.edges[e].head;
        let mut last_edge = e;
        for _ in 0..cuts {
            let foot = self.add_regular();
            // reroute the previous segment into the foot
            let old_head = self.edges[last_edge].head;
            self.edges[last_edge].head = foot;
            let h_prev = 2 * last_edge + 1;
            let seg = self.add_edge(foot, old_head, 0);
            let tip = {
                self.nodes.push(SpineNode::StubTip);
                self.nodes.len() - 1
            };
            let stub = self.add_edge(foot, tip, 0);
            let h_next = 2 * seg;
            let h_stub = 2 * stub;
            let order = if forward {
                vec![h_prev, h_stub, h_next]
            } else {
                vec![h_next, h_stub, h_prev]
            };
            *self.order_mut(foot) = order;
            last_edge = seg;
        }
        // fix the half id stored in the head node's order: the half arriving
        // at `head` is now the last segment's head half
        if cuts > 0 {
            let new_half = 2 * last_edge + 1;
            if let SpineNode::Regular { order } = &mut self.nodes[head] {
                for x in order.iter_mut() {
                    if *x == 2 * e + 1 {
                        *x = new_half;
                    }
                }
            }
        }
    }
}

struct Derived {
    auto: GraphAutomorphism,
    /// Derived half-edge → spine half id.
    spine_half: Vec<usize>,
}

/// The ℤ_n derived cover of a voltage spine: sheet `t` of spine half `sh` is
/// half-edge `sh·n + t`; the deck translation adds one to the sheet.
fn derive(spine: &Spine, n: i64, lengths: &[Rational]) -> Result<Derived, InverseError> {
    let nu = n as usize;
    let e_count = spine.edges.len();
    if lengths.len() != e_count {
        return Err(InverseError::Internal("length vector size mismatch".into()));
    }
    let total = 2 * e_count * nu;
    let id = |sh: usize, t: i64| -> usize { sh * nu + t.rem_euclid(n) as usize };
    let mut opposite = vec![0usize; total];
    let mut next = vec![usize::MAX; total];
    let mut lens = vec![Rational::zero(); total];
    let mut spine_half = vec![0usize; total];
    for (e, edge) in spine.edges.iter().enumerate() {
        for t in 0..n {
            let a = id(2 * e, t);
            let b = id(2 * e + 1, t + edge.voltage);
            opposite[a] = b;
            opposite[b] = a;
            lens[a] = lengths[e].clone();
            lens[b] = lengths[e].clone();
            spine_half[a] = 2 * e;
            spine_half[b] = 2 * e + 1;
        }
    }
    let mut boundary = Vec::new();
    let mut sigma = Vec::new();
    for (v, node) in spine.nodes.iter().enumerate() {
        match node {
            SpineNode::Regular { order } => {
                if order.is_empty() {
                    return Err(InverseError::Internal(format!("regular node {v} has no edges")));
                }
                for t in 0..n {
                    for (i, &sh) in order.iter().enumerate() {
                        let nxt = order[(i + 1) % order.len()];
                        next[id(sh, t)] = id(nxt, t);
                    }
                }
            }
            SpineNode::Center { alpha, coset_step } => {
                let e = spine
                    .edges
                    .iter()
                    .position(|ed| ed.head == v)
                    .ok_or_else(|| InverseError::Internal(format!("center {v} has no leg")))?;
                if n % alpha != 0 {
                    return Err(InverseError::Internal("alpha does not divide the order".into()));
                }
                let m = n / alpha;
                if coset_step % m != 0 || gcd_i64(coset_step / m, *alpha) != 1 {
                    return Err(InverseError::Internal("bad center step".into()));
                }
                for t in 0..n {
                    next[id(2 * e + 1, t)] = id(2 * e + 1, t + coset_step);
                }
            }
            SpineNode::StubTip => {
                let e = spine
                    .edges
                    .iter()
                    .position(|ed| ed.head == v)
                    .ok_or_else(|| InverseError::Internal(format!("tip {v} has no stub")))?;
                for t in 0..n {
                    let h = id(2 * e + 1, t);
                    next[h] = h;
                    boundary.push(h);
                    sigma.push((h, id(2 * e + 1, t + 1)));
                }
            }
        }
    }
    if next.iter().any(|&x| x == usize::MAX) {
        return Err(InverseError::Internal("a spine half is not on any node".into()));
    }
    let graph = RibbonGraph::from_parts(opposite, next, lens, boundary, sigma)?;
    let perm: Vec<usize> = (0..total)
        .map(|h| {
            let sh = spine_half[h];
            let t = (h - sh * nu) as i64;
            id(sh, t + 1)
        })
        .collect();
    let auto = GraphAutomorphism::new(graph, perm)?;
    Ok(Derived { auto, spine_half })
}

// ---------------------------------------------------------------------------
// the lifted spine Λ

/// The lifted spine with its monodromy and the data needed downstream.
pub struct Lambda {
    pub auto: GraphAutomorphism,
    /// Derived half-edge → quotient spine half id (= half-edge id of the
    /// orbit graph).
    pub spine_half: Vec<usize>,
    pub order: i64,
    pub fiber_lcm: i64,
    pub q: i64,
    spine: Spine,
}

/// Builds the wedge-plus-legs quotient spine of the fibering, assigns class
/// voltages on the canonical basis cycles, and lifts to the derived cover with
/// the deck translation as monodromy. All edges get length 1/2.
pub fn build_lambda(f: &SeifertFibering, p: &[i64], q: i64) -> Result<Lambda, InverseError> {
    let model = handy_model(f)?;
    if q < 1 {
        return Err(InverseError::BadInput("q must be positive".into()));
    }
    if p.len() as i64 != model.mu {
        return Err(InverseError::BadInput(format!(
            "class has {} coordinates, base homology rank is {}",
            p.len(),
            model.mu
        )));
    }
    let p: Vec<i64> = p.iter().map(|x| x.rem_euclid(q)).collect();
    let mut d = q;
    for &x in &p {
        d = gcd_i64(d, x);
    }
    if d > 1 {
        return Err(InverseError::ReducibleClass { components: d });
    }
    let mut m = 1i64;
    for pair in &f.pairs {
        m = lcm_i64(m, pair.alpha);
    }
    let n = q * m;
    if model.mu == 0 && f.pairs.is_empty() {
        // disk base without special fibers: the degenerate spine; realized as
        // the unit loop with the identity deck translation
        let mut spine = Spine::new();
        let c = spine.add_regular();
        let e = spine.add_edge(c, c, 0);
        *spine.order_mut(c) = vec![2 * e, 2 * e + 1];
        let derived = derive(&spine, 1, &[rat_int(1)])?;
        return Ok(Lambda {
            auto: derived.auto,
            spine_half: derived.spine_half,
            order: 1,
            fiber_lcm: 1,
            q: 1,
            spine,
        });
    }
    if model.mu == 0 && f.pairs.len() == 1 {
        return Err(InverseError::BadInput(
            "disk base with a single special fiber: its horizontal surfaces are disks, \
             which have no spine"
                .into(),
        ));
    }
    let mut spine = Spine::new();
    let c = spine.add_regular();
    let mut order = Vec::new();
    for _ in 0..f.genus {
        let a = spine.add_edge(c, c, 0);
        let b = spine.add_edge(c, c, 0);
        order.extend([2 * a, 2 * b, 2 * a + 1, 2 * b + 1]);
    }
    for _ in 0..f.boundary - 1 {
        let t = spine.add_edge(c, c, 0);
        order.extend([2 * t, 2 * t + 1]);
    }
    for branch in &model.branches {
        let alpha = branch.pair.alpha;
        let center = {
            spine.nodes.push(SpineNode::Center {
                alpha,
                coset_step: (-branch.pair.beta).rem_euclid(alpha) * (n / alpha),
            });
            spine.nodes.len() - 1
        };
        let leg = spine.add_edge(c, center, 0);
        order.push(2 * leg);
    }
    *spine.order_mut(c) = order;
    // class voltages on the canonical basis cycles
    let skeleton = spine.as_ribbon()?;
    let basis = fundamental_cycles(&skeleton)?;
    if basis.len() as i64 != model.mu {
        return Err(InverseError::Internal("spine homology rank mismatch".into()));
    }
    for (i, cycle) in basis.iter().enumerate() {
        // each basis cycle of the wedge is a single loop, entered along its
        // even half; the voltage is the canonical lift of the class residue
        let h = cycle[0];
        debug_assert!(h % 2 == 0 && cycle.len() == 1);
        spine.edges[h / 2].voltage = p[i];
    }
    let lengths = vec![rat(1, 2); spine.edges.len()];
    let derived = derive(&spine, n, &lengths)?;
    if !derived.auto.graph.is_connected() {
        return Err(InverseError::Internal("derived cover is disconnected".into()));
    }
    Ok(Lambda {
        auto: derived.auto,
        spine_half: derived.spine_half,
        order: n,
        fiber_lcm: m,
        q,
        spine,
    })
}

/// Surface invariants of the lifted spine plus the boundary orbit/rotation
/// data of its monodromy.
#[derive(Debug, Clone)]
pub struct MonodromyReport {
    pub genus: i64,
    pub boundary_count: i64,
    pub orbits: Vec<BoundaryOrbit>,
}

pub fn monodromy_report(a: &GraphAutomorphism) -> Result<MonodromyReport, InverseError> {
    let si = a.graph.surface_invariants()?;
    let orbits = boundary_rotation(a)?;
    Ok(MonodromyReport {
        genus: si.genus,
        boundary_count: si.boundary_count,
        orbits,
    })
}

// ---------------------------------------------------------------------------
// metric realization

pub struct Realization {
    pub graph: RibbonGraph,
    pub auto: GraphAutomorphism,
    pub report: MonodromyReport,
    /// Lengths per quotient-spine edge, for diagnostics.
    pub spine_lengths: Vec<Rational>,
}

/// Face holonomies of the spine: for every face of the erased spine, the
/// deck translation picked up per face period (signed voltages plus one
/// center step per passage), with one representative spine half per face.
fn spine_face_holonomies(spine: &Spine, skeleton: &RibbonGraph) -> Vec<(usize, i64)> {
    let faces = skeleton.faces();
    let mut out = Vec::new();
    for f in &faces {
        let mut hol = 0i64;
        for (i, &sh) in f.half_edges.iter().enumerate() {
            let e = sh / 2;
            hol += if sh % 2 == 0 { spine.edges[e].voltage } else { -spine.edges[e].voltage };
            // a passage around a center tip appears as the head half followed
            // by its own tail... the erased face walk only contains full
            // edges; center turns happen when consecutive steps are the two
            // directions of one leg, the first into the center.
            let next_sh = f.half_edges[(i + 1) % f.half_edges.len()];
            if next_sh == sh + 1 && sh % 2 == 0 {
                if let SpineNode::Center { coset_step, .. } = spine.nodes[spine.edges[e].head] {
                    hol += coset_step;
                }
            }
        }
        out.push((f.half_edges[0], hol));
    }
    out
}

/// Builds a metric tête-à-tête graph realizing the monodromy of the fibering
/// and class: the lifted spine, extended by cut stubs when the monodromy
/// permutes boundary components, with lengths from the walk-shift system.
pub fn realize_tat(f: &SeifertFibering, p: &[i64], q: i64) -> Result<Realization, InverseError> {
    let lambda = build_lambda(f, p, q)?;
    let n = lambda.order;
    let mut spine = lambda.spine.clone();

    // Boundary orbits of the lifted spine; a face whose holonomy is not a
    // unit lifts to an orbit of gcd(n, hol) > 1 permuted boundary components
    // and gets cut stubs. Stale half ids after an insertion still denote a
    // segment of the original edge on the same side, which is all the next
    // insertion needs.
    let skeleton = spine.as_ribbon()?;
    let holonomies = spine_face_holonomies(&spine, &skeleton);
    for (rep_half, hol) in &holonomies {
        let orbit_size = gcd_i64(n, *hol);
        if orbit_size <= 1 {
            continue;
        }
        // stitch: κ jumps per period make the walk holonomy a unit
        let mut kappa = 1i64;
        while gcd_i64(hol + kappa, n) != 1 {
            kappa += 1;
        }
        spine.insert_stubs(*rep_half / 2, rep_half % 2 == 0, kappa as usize);
    }

    // Metric search with a bounded wrap-vector schedule, then one spine
    // refinement round.
    for refinement in 0..2 {
        if refinement == 1 {
            let loops: Vec<usize> = (0..spine.edges.len())
                .filter(|&e| spine.edges[e].tail == spine.edges[e].head)
                .collect();
            for e in loops {
                let head = spine.edges[e].head;
                let mid = spine.add_regular();
                spine.edges[e].head = mid;
                let seg = spine.add_edge(mid, head, 0);
                *spine.order_mut(mid) = vec![2 * e + 1, 2 * seg];
                if let SpineNode::Regular { order } = &mut spine.nodes[head] {
                    for x in order.iter_mut() {
                        if *x == 2 * e + 1 {
                            *x = 2 * seg + 1;
                        }
                    }
                }
            }
        }
        match solve_metric(&spine, n)? {
            Some(lengths) => {
                let derived = derive(&spine, n, &lengths)?;
                let graph = derived.auto.graph.clone();
                graph.validate()?;
                verify_walks_realize(&graph, &derived.auto)?;
                let report = monodromy_report(&derived.auto)?;
                return Ok(Realization {
                    graph,
                    auto: derived.auto,
                    report,
                    spine_lengths: lengths,
                });
            }
            None => continue,
        }
    }
    Err(InverseError::Infeasible { system: describe_system(&spine, n)? })
}

/// One linear constraint per walk-cycle orbit: (r + t)·L(ℓ) = 1 with r the
/// combinatorial rotation of the deck translation on the cycle and t a
/// nonnegative integer wrap count. Returns spine-edge lengths when feasible.
fn solve_metric(spine: &Spine, n: i64) -> Result<Option<Vec<Rational>>, InverseError> {
    let probe = derive(spine, n, &vec![rat_int(1); spine.edges.len()])?;
    let g = &probe.auto.graph;
    let wc = walk_cycles(g);
    // group cycles into deck orbits and check invariance
    let mut cycle_rep: Vec<Option<usize>> = vec![None; wc.cycles.len()];
    let mut reps = Vec::new();
    for (ci, c) in wc.cycles.iter().enumerate() {
        if cycle_rep[ci].is_some() {
            continue;
        }
        let h0 = c.edges[0];
        if wc.cycle_of[probe.auto.apply(h0)] != ci {
            return Err(InverseError::Internal(
                "walk cycle is not deck-invariant after stitching".into(),
            ));
        }
        cycle_rep[ci] = Some(reps.len());
        reps.push(ci);
    }
    let e_count = spine.edges.len();
    let mut rows: Vec<Vec<i64>> = Vec::new(); // traversal counts per spine edge
    let mut rots: Vec<Rational> = Vec::new();
    for &ci in &reps {
        let c = &wc.cycles[ci];
        let mut cnt = vec![0i64; e_count];
        for &h in &c.edges {
            cnt[probe.spine_half[h] / 2] += 1;
        }
        let h0 = c.edges[0];
        let h1 = probe.auto.apply(h0);
        let d = (wc.index_in[h1] + c.edges.len() - wc.index_in[h0]) % c.edges.len();
        rots.push(rat(d as i64, c.edges.len() as i64));
        rows.push(cnt);
    }
    // search wrap vectors t by increasing bound
    let k = rows.len();
    for bound in [2i64, 6, 14] {
        let mut t = vec![0i64; k];
        loop {
            let ok_targets: Option<Vec<Rational>> = (0..k)
                .map(|i| {
                    let denom = rots[i].clone() + rat_int(t[i]);
                    if denom.is_zero() {
                        None
                    } else {
                        Some(denom.recip())
                    }
                })
                .collect();
            if let Some(targets) = ok_targets {
                if monotone_plausible(&rows, &targets) {
                    let a: Vec<Vec<Rational>> = rows
                        .iter()
                        .map(|r| r.iter().map(|&x| rat_int(x)).collect())
                        .collect();
                    if let Some(sol) = solve_strictly_positive(&a, &targets) {
                        return Ok(Some(sol));
                    }
                }
            }
            // next vector
            let mut i = 0;
            loop {
                if i == k {
                    break;
                }
                t[i] += 1;
                if t[i] <= bound {
                    break;
                }
                t[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
    Ok(None)
}

/// Cheap necessary condition: a cycle whose traversal counts dominate
/// another's must have the longer target length.
fn monotone_plausible(rows: &[Vec<i64>], targets: &[Rational]) -> bool {
    for i in 0..rows.len() {
        for j in 0..rows.len() {
            if i == j {
                continue;
            }
            let dominates = rows[i].iter().zip(&rows[j]).all(|(a, b)| a >= b);
            let strictly = rows[i].iter().zip(&rows[j]).any(|(a, b)| a > b);
            if dominates && strictly && targets[i] <= targets[j] {
                return false;
            }
            if dominates && !strictly && targets[i] != targets[j] {
                return false;
            }
        }
    }
    true
}

fn describe_system(spine: &Spine, n: i64) -> Result<String, InverseError> {
    let probe = derive(spine, n, &vec![rat_int(1); spine.edges.len()])?;
    let wc = walk_cycles(&probe.auto.graph);
    let mut s = format!(
        "order {n}, {} spine edges, {} walk cycles; per-cycle (length in edges, rotation):\n",
        spine.edges.len(),
        wc.cycles.len()
    );
    for c in &wc.cycles {
        let h0 = c.edges[0];
        let h1 = probe.auto.apply(h0);
        let d = (wc.index_in[h1] + c.edges.len() - wc.index_in[h0]) % c.edges.len();
        s.push_str(&format!("  ({}, {}/{})\n", c.edges.len(), d, c.edges.len()));
    }
    Ok(s)
}

/// The unit walk from the start of every directed edge must land on its deck
/// image: the constructed metric makes the deck translation the walk map.
fn verify_walks_realize(g: &RibbonGraph, a: &GraphAutomorphism) -> Result<(), InverseError> {
    let wc = walk_cycles(g);
    let one: Rational = num::One::one();
    for h in 0..g.half_edge_count() {
        let end = walk_endpoint(g, &wc, h, &Rational::zero(), &one);
        match end.point {
            CanonicalPoint::Vertex(_) if end.continuation == a.apply(h) => {}
            _ => {
                return Err(InverseError::Internal(format!(
                    "solved metric does not realize the deck translation at half-edge {h}"
                )))
            }
        }
    }
    Ok(())
}
