//! Combinatorial-map representation of metric ribbon graphs with marked
//! univalent boundary vertices, and surface invariants of their thickenings.
//!
//! A graph is a set of half-edges `0..n` with a fixed-point-free involution
//! `opposite` pairing the two halves of each edge and a permutation `next`
//! whose cycles are the vertices; the cycle order is the counterclockwise
//! order of half-edges around each vertex. A half-edge is read as a directed
//! edge based at its tail vertex. Lengths are positive rationals in units
//! of π, equal on the two halves of an edge.

use std::collections::{BTreeMap, BTreeSet};

use num::Zero;
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("array sizes disagree")]
    SizeMismatch,
    #[error("half-edge id {0} out of range")]
    IdOutOfRange(usize),
    #[error("opposite is not a fixed-point-free involution (witness half-edge {0})")]
    BadInvolution(usize),
    #[error("next_at_vertex is not a permutation (witness half-edge {0})")]
    BadPermutation(usize),
    #[error("edge {0} has a nonpositive length")]
    NonPositiveLength(usize),
    #[error("half-edges of edge {0} carry different lengths")]
    LengthMismatch(usize),
    #[error("univalent vertex {0} is not marked as a boundary vertex")]
    UnmarkedUnivalent(usize),
    #[error("boundary vertex {0} is not univalent")]
    BoundaryNotUnivalent(usize),
    #[error("vertex {0}: half-edges {1} and its cyclic successor both lead to boundary vertices")]
    ConsecutiveBoundary(usize, usize),
    #[error("sigma is not a bijection of the boundary vertex set (witness vertex {0})")]
    BadSigma(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("subdivision offset out of range")]
    OffsetOutOfRange,
    #[error("graph is empty")]
    Empty,
}

/// One boundary component of the thickening of the erased graph: the cyclic
/// sequence of directed edges traversed with the surface on the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceCycle {
    /// Directed edges in face order, rotated so the minimal one is first.
    pub half_edges: Vec<usize>,
    pub total_length: Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceInvariants {
    pub genus: i64,
    pub boundary_count: i64,
    pub euler_characteristic: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RibbonGraph {
    opposite: Vec<usize>,
    next: Vec<usize>,
    /// Length per half-edge; both halves of an edge carry the same value.
    lengths: Vec<Rational>,
    /// Canonical ids (minimal half-edge of the vertex cycle) of the marked
    /// univalent vertices.
    boundary: BTreeSet<usize>,
    /// Permutation of the boundary vertex set.
    sigma: BTreeMap<usize, usize>,
    /// Cached: canonical vertex id per half-edge.
    vertex_of: Vec<usize>,
}

impl RibbonGraph {
    /// Builds a graph from raw permutation data. `lengths` is per half-edge.
    /// Checks only structural well-formedness; semantic invariants are the
    /// business of [`RibbonGraph::validate`].
    pub fn from_parts(
        opposite: Vec<usize>,
        next: Vec<usize>,
        lengths: Vec<Rational>,
        boundary: Vec<usize>,
        sigma: Vec<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        let n = opposite.len();
        if next.len() != n || lengths.len() != n {
            return Err(GraphError::SizeMismatch);
        }
        if n == 0 {
            return Err(GraphError::Empty);
        }
        for h in 0..n {
            if opposite[h] >= n {
                return Err(GraphError::IdOutOfRange(h));
            }
            if opposite[h] == h || opposite[opposite[h]] != h {
                return Err(GraphError::BadInvolution(h));
            }
            if next[h] >= n {
                return Err(GraphError::IdOutOfRange(h));
            }
        }
        let mut seen = vec![false; n];
        for h in 0..n {
            if seen[next[h]] {
                return Err(GraphError::BadPermutation(next[h]));
            }
            seen[next[h]] = true;
        }
        let vertex_of = vertex_ids(&next);
        let boundary_set: BTreeSet<usize> = boundary
            .iter()
            .map(|&v| {
                if v < n {
                    Ok(vertex_of[v])
                } else {
                    Err(GraphError::IdOutOfRange(v))
                }
            })
            .collect::<Result<_, _>>()?;
        let mut sigma_map = BTreeMap::new();
        for (a, b) in sigma {
            if a >= n || b >= n {
                return Err(GraphError::IdOutOfRange(a.max(b)));
            }
            sigma_map.insert(vertex_of[a], vertex_of[b]);
        }
        Ok(RibbonGraph {
            opposite,
            next,
            lengths,
            boundary: boundary_set,
            sigma: sigma_map,
            vertex_of,
        })
    }

    pub fn half_edge_count(&self) -> usize {
        self.opposite.len()
    }

    pub fn edge_count(&self) -> usize {
        self.opposite.len() / 2
    }

    pub fn opposite(&self, h: usize) -> usize {
        self.opposite[h]
    }

    pub fn next(&self, h: usize) -> usize {
        self.next[h]
    }

    pub fn length(&self, h: usize) -> &Rational {
        &self.lengths[h]
    }

    /// Canonical vertex id (minimal half-edge in the vertex cycle) of the
    /// tail of `h`.
    pub fn vertex_id(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    /// Canonical id of the head vertex of the directed edge `h`.
    pub fn head(&self, h: usize) -> usize {
        self.vertex_of[self.opposite[h]]
    }

    /// Canonical edge id: the smaller of the two half-edges.
    pub fn edge_id(&self, h: usize) -> usize {
        h.min(self.opposite[h])
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary.contains(&self.vertex_of[v])
    }

    pub fn boundary_vertices(&self) -> &BTreeSet<usize> {
        &self.boundary
    }

    pub fn sigma(&self, v: usize) -> usize {
        let v = self.vertex_of[v];
        *self.sigma.get(&v).unwrap_or(&v)
    }

    pub fn sigma_map(&self) -> &BTreeMap<usize, usize> {
        &self.sigma
    }

    /// Half-edges around the tail vertex of `h`, in cyclic order starting at `h`.
    pub fn star(&self, h: usize) -> Vec<usize> {
        let mut out = vec![h];
        let mut x = self.next[h];
        while x != h {
            out.push(x);
            x = self.next[x];
        }
        out
    }

    pub fn valency(&self, h: usize) -> usize {
        self.star(h).len()
    }

    /// Canonical vertex ids, sorted.
    pub fn vertices(&self) -> Vec<usize> {
        let mut vs: BTreeSet<usize> = self.vertex_of.iter().copied().collect();
        std::mem::take(&mut vs).into_iter().collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.half_edge_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(h) = stack.pop() {
            for x in [self.opposite[h], self.next[h]] {
                if !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Full invariant check. On failure, names the violated invariant and a
    /// witness vertex or half-edge.
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.half_edge_count();
        for h in 0..n {
            if !self.lengths[h].is_positive() {
                return Err(GraphError::NonPositiveLength(self.edge_id(h)));
            }
            if self.lengths[h] != self.lengths[self.opposite[h]] {
                return Err(GraphError::LengthMismatch(self.edge_id(h)));
            }
        }
        for &v in &self.boundary {
            if self.valency(v) != 1 {
                return Err(GraphError::BoundaryNotUnivalent(v));
            }
        }
        for v in self.vertices() {
            let star = self.star(v);
            if star.len() == 1 && !self.boundary.contains(&v) {
                return Err(GraphError::UnmarkedUnivalent(v));
            }
            if star.len() >= 2 {
                for (i, &h) in star.iter().enumerate() {
                    let succ = star[(i + 1) % star.len()];
                    let to_boundary =
                        |x: usize| self.boundary.contains(&self.vertex_of[self.opposite[x]]);
                    if to_boundary(h) && to_boundary(succ) {
                        return Err(GraphError::ConsecutiveBoundary(v, h));
                    }
                }
            }
        }
        let image: BTreeSet<usize> = self.sigma.values().copied().collect();
        for (&a, &b) in &self.sigma {
            if !self.boundary.contains(&a) || !self.boundary.contains(&b) {
                return Err(GraphError::BadSigma(a));
            }
        }
        for &v in &self.boundary {
            if !self.sigma.contains_key(&v) || !image.contains(&v) {
                return Err(GraphError::BadSigma(v));
            }
        }
        Ok(())
    }

    /// True if the edge of `h` survives erasing the boundary vertices and
    /// their edges.
    pub fn is_erased_alive(&self, h: usize) -> bool {
        !self.is_boundary_vertex(h) && !self.is_boundary_vertex(self.opposite[h])
    }

    /// Face step in the erased graph: the next directed edge of the boundary
    /// walk with the surface on the left. `h` must be alive.
    pub fn face_next(&self, h: usize) -> usize {
        let mut x = self.next[self.opposite[h]];
        while !self.is_erased_alive(x) {
            x = self.next[x];
        }
        x
    }

    /// Boundary components of the thickening of the erased graph, each a
    /// cyclic directed-edge sequence, sorted by minimal half-edge.
    pub fn faces(&self) -> Vec<FaceCycle> {
        let n = self.half_edge_count();
        let mut seen = vec![false; n];
        let mut faces = Vec::new();
        for h0 in 0..n {
            if seen[h0] || !self.is_erased_alive(h0) {
                continue;
            }
            let mut cyc = Vec::new();
            let mut total = Rational::zero();
            let mut h = h0;
            loop {
                seen[h] = true;
                cyc.push(h);
                total += self.lengths[h].clone();
                h = self.face_next(h);
                if h == h0 {
                    break;
                }
            }
            let min_pos = cyc
                .iter()
                .enumerate()
                .min_by_key(|(_, &x)| x)
                .map(|(i, _)| i)
                .unwrap();
            cyc.rotate_left(min_pos);
            faces.push(FaceCycle {
                half_edges: cyc,
                total_length: total,
            });
        }
        faces.sort_by_key(|f| f.half_edges[0]);
        faces
    }

    /// Genus, boundary count and Euler characteristic of the thickening.
    /// χ is computed on the full graph (boundary vertices included), the
    /// boundary count from the faces of the erased graph.
    pub fn surface_invariants(&self) -> Result<SurfaceInvariants, GraphError> {
        if !self.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let chi = self.vertices().len() as i64 - self.edge_count() as i64;
        let r = self.faces().len() as i64;
        let two_genus = 2 - r - chi;
        debug_assert!(two_genus % 2 == 0);
        Ok(SurfaceInvariants {
            genus: two_genus / 2,
            boundary_count: r,
            euler_characteristic: chi,
        })
    }

    /// Splits the edge of `h` at distance `offset` from the tail of `h` with
    /// a new valency-2 vertex. Existing half-edge ids are preserved; the two
    /// new half-edges get the next free ids (the new id pair, based at the new
    /// vertex, is returned along with the graph: `.1` pairs with `h`, `.2`
    /// with `opposite(h)`).
    pub fn subdivide(&self, h: usize, offset: &Rational) -> Result<(Self, usize, usize), GraphError> {
        let len = self.lengths[h].clone();
        if !offset.is_positive() || *offset >= len {
            return Err(GraphError::OffsetOutOfRange);
        }
        let n = self.half_edge_count();
        let hb = self.opposite[h];
        let x = n; // pairs with h, based at the new vertex
        let y = n + 1; // pairs with hb, based at the new vertex
        let mut opposite = self.opposite.clone();
        let mut next = self.next.clone();
        let mut lengths = self.lengths.clone();
        opposite[h] = x;
        opposite.push(h);
        opposite.push(hb);
        opposite[hb] = y;
        // new vertex cycle (x y)
        next.push(y);
        next.push(x);
        lengths[h] = offset.clone();
        lengths.push(offset.clone());
        lengths.push(len.clone() - offset);
        lengths[hb] = len - offset;
        let boundary: Vec<usize> = self.boundary.iter().copied().collect();
        let sigma: Vec<(usize, usize)> = self.sigma.iter().map(|(&a, &b)| (a, b)).collect();
        let g = RibbonGraph::from_parts(opposite, next, lengths, boundary, sigma)?;
        Ok((g, x, y))
    }

    /// Subdivides several edges at several interior offsets in one pass.
    /// `cuts` maps a half-edge to offsets measured from its tail.
    pub fn subdivide_all(&self, cuts: &BTreeMap<usize, BTreeSet<Rational>>) -> Result<Self, GraphError> {
        let mut g = self.clone();
        // Translate all cuts into (canonical half, offset-from-that-tail).
        let mut per_edge: BTreeMap<usize, BTreeSet<Rational>> = BTreeMap::new();
        for (&h, offs) in cuts {
            let e = self.edge_id(h);
            for o in offs {
                let from_min = if h == e {
                    o.clone()
                } else {
                    self.lengths[h].clone() - o
                };
                per_edge.entry(e).or_default().insert(from_min);
            }
        }
        for (e, offs) in per_edge {
            // Walk the successive segments; `cur` is the half-edge whose tail
            // begins the still-uncut remainder.
            let mut cur = e;
            let mut consumed = Rational::zero();
            for o in offs {
                let local = o.clone() - consumed.clone();
                let (g2, x, _) = g.subdivide(cur, &local)?;
                g = g2;
                // remainder starts at the new vertex: half pairing with the
                // far side is next(x) in the new 2-cycle = the new id `y`,
                // which is opposite(original far half). Its tail is the new
                // vertex; it is id x+1.
                cur = x + 1;
                consumed = o;
            }
        }
        Ok(g)
    }
}

fn vertex_ids(next: &[usize]) -> Vec<usize> {
    let n = next.len();
    let mut vid = vec![usize::MAX; n];
    for h in 0..n {
        if vid[h] != usize::MAX {
            continue;
        }
        let mut cycle = vec![h];
        let mut x = next[h];
        while x != h {
            cycle.push(x);
            x = next[x];
        }
        let id = *cycle.iter().min().unwrap();
        for c in cycle {
            vid[c] = id;
        }
    }
    vid
}

/// Incremental construction: edges are created in pairs, then vertices are
/// declared as cyclic orders over half-edges.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    lengths: Vec<Rational>,
    vertex_cycles: Vec<Vec<usize>>,
    boundary: Vec<usize>,
    sigma: Vec<(usize, usize)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Creates an edge and returns its two half-edge ids `(2k, 2k+1)`.
    pub fn add_edge(&mut self, length: Rational) -> (usize, usize) {
        let h = self.lengths.len();
        self.lengths.push(length.clone());
        self.lengths.push(length);
        (h, h + 1)
    }

    /// Declares a vertex with the given counterclockwise half-edge order.
    pub fn add_vertex(&mut self, cycle: &[usize]) {
        self.vertex_cycles.push(cycle.to_vec());
    }

    /// Marks the vertex containing `h` as a boundary vertex.
    pub fn mark_boundary(&mut self, h: usize) {
        self.boundary.push(h);
    }

    /// Declares sigma to map the vertex of `a` to the vertex of `b`.
    pub fn set_sigma(&mut self, a: usize, b: usize) {
        self.sigma.push((a, b));
    }

    pub fn build(self) -> Result<RibbonGraph, GraphError> {
        let n = self.lengths.len();
        let mut opposite = vec![0usize; n];
        for h in (0..n).step_by(2) {
            opposite[h] = h + 1;
            opposite[h + 1] = h;
        }
        let mut next = vec![usize::MAX; n];
        for cyc in &self.vertex_cycles {
            for (i, &h) in cyc.iter().enumerate() {
                if h >= n || next[h] != usize::MAX {
                    return Err(GraphError::BadPermutation(h.min(n.saturating_sub(1))));
                }
                next[h] = cyc[(i + 1) % cyc.len()];
            }
        }
        if let Some(h) = next.iter().position(|&x| x == usize::MAX) {
            return Err(GraphError::BadPermutation(h));
        }
        RibbonGraph::from_parts(opposite, next, self.lengths, self.boundary, self.sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{rat, rat_int};

    /// Independent face-count oracle: counts cycles of the permutation
    /// `h ↦ next(opposite(h))` on alive half-edges without any of the
    /// FaceCycle machinery.
    fn face_count_oracle(g: &RibbonGraph) -> usize {
        let n = g.half_edge_count();
        let alive: Vec<bool> = (0..n).map(|h| g.is_erased_alive(h)).collect();
        let mut seen = vec![false; n];
        let mut count = 0;
        for h0 in 0..n {
            if !alive[h0] || seen[h0] {
                continue;
            }
            count += 1;
            let mut h = h0;
            while !seen[h] {
                seen[h] = true;
                let mut x = g.next(g.opposite(h));
                while !alive[x] {
                    x = g.next(x);
                }
                h = x;
            }
        }
        count
    }

    #[test]
    fn circle_graph_is_an_annulus() {
        let g = fixtures::circle_graph(rat_int(1));
        g.validate().unwrap();
        let faces = g.faces();
        assert_eq!(faces.len(), 2);
        for f in &faces {
            assert_eq!(f.total_length, rat_int(1));
        }
        let si = g.surface_invariants().unwrap();
        assert_eq!((si.genus, si.boundary_count, si.euler_characteristic), (0, 2, 0));
    }

    #[test]
    fn theta_graph_faces_and_invariants() {
        let g = fixtures::theta_graph();
        g.validate().unwrap();
        assert_eq!(g.faces().len(), 3);
        assert_eq!(face_count_oracle(&g), 3);
        let si = g.surface_invariants().unwrap();
        assert_eq!((si.genus, si.boundary_count, si.euler_characteristic), (0, 3, -1));
    }

    #[test]
    fn k411_validates_and_has_one_long_face() {
        let g = fixtures::k411();
        g.validate().unwrap();
        let faces = g.faces();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].half_edges.len(), 88);
        assert_eq!(faces[0].total_length, rat_int(44));
        let si = g.surface_invariants().unwrap();
        assert_eq!((si.genus, si.boundary_count, si.euler_characteristic), (15, 1, -29));
    }

    #[test]
    fn p_condition_violation_is_reported() {
        // Star with two consecutive edges to boundary vertices.
        let mut b = GraphBuilder::new();
        let (a0, a1) = b.add_edge(rat(1, 2));
        let (c0, c1) = b.add_edge(rat(1, 2));
        let (d0, d1) = b.add_edge(rat(1, 2));
        b.add_vertex(&[a0, c0, d0]);
        b.add_vertex(&[a1]);
        b.add_vertex(&[c1]);
        b.add_vertex(&[d1]);
        b.mark_boundary(a1);
        b.mark_boundary(c1);
        b.set_sigma(a1, c1);
        b.set_sigma(c1, a1);
        // d1 univalent but unmarked -> also a violation; mark it to isolate
        // the consecutive-boundary check.
        b.mark_boundary(d1);
        b.set_sigma(d1, d1);
        let g = b.build().unwrap();
        match g.validate() {
            Err(GraphError::ConsecutiveBoundary(_, _)) => {}
            other => panic!("expected P-condition violation, got {other:?}"),
        }
    }

    #[test]
    fn unmarked_univalent_vertex_is_rejected() {
        let mut b = GraphBuilder::new();
        let (a0, a1) = b.add_edge(rat(1, 2));
        let (l0, l1) = b.add_edge(rat(1, 2));
        b.add_vertex(&[a0, l0, l1]);
        b.add_vertex(&[a1]);
        let g = b.build().unwrap();
        assert!(matches!(g.validate(), Err(GraphError::UnmarkedUnivalent(_))));
    }

    #[test]
    fn subdivide_preserves_invariants() {
        let g = fixtures::circle_graph(rat_int(1));
        let (g2, _, _) = g.subdivide(0, &rat(1, 2)).unwrap();
        g2.validate().unwrap();
        assert_eq!(g2.vertices().len(), 2);
        assert_eq!(g2.edge_count(), 2);
        for h in 0..4 {
            assert_eq!(*g2.length(h), rat(1, 2));
        }
        let si = g2.surface_invariants().unwrap();
        assert_eq!((si.genus, si.boundary_count, si.euler_characteristic), (0, 2, 0));

        let k = fixtures::k411();
        let (k2, _, _) = k.subdivide(0, &rat(1, 4)).unwrap();
        let si = k2.surface_invariants().unwrap();
        assert_eq!(si.euler_characteristic, -29);

        let th = fixtures::theta_graph();
        let faces_before: Vec<Rational> =
            th.faces().into_iter().map(|f| f.total_length).collect();
        let (th2, _, _) = th.subdivide(2, &rat(1, 3)).unwrap();
        assert_eq!(th2.faces().len(), 3);
        let mut faces_after: Vec<Rational> =
            th2.faces().into_iter().map(|f| f.total_length).collect();
        let mut faces_before = faces_before;
        faces_before.sort();
        faces_after.sort();
        assert_eq!(faces_before, faces_after);
    }

    #[test]
    fn subdivide_all_handles_multiple_cuts_per_edge() {
        let g = fixtures::circle_graph(rat_int(1));
        let mut cuts: BTreeMap<usize, BTreeSet<Rational>> = BTreeMap::new();
        cuts.entry(0).or_default().extend([rat(1, 4), rat(1, 2), rat(3, 4)]);
        let g4 = g.subdivide_all(&cuts).unwrap();
        assert_eq!(g4.edge_count(), 4);
        assert_eq!(g4.vertices().len(), 4);
        for h in 0..8 {
            assert_eq!(*g4.length(h), rat(1, 4));
        }
        let si = g4.surface_invariants().unwrap();
        assert_eq!((si.genus, si.boundary_count), (0, 2));
    }

    #[test]
    fn face_partition_covers_alive_half_edges_once() {
        for g in [fixtures::k411(), fixtures::theta_graph(), fixtures::circle_graph(rat_int(1))] {
            let total: usize = g.faces().iter().map(|f| f.half_edges.len()).sum();
            let alive = (0..g.half_edge_count()).filter(|&h| g.is_erased_alive(h)).count();
            assert_eq!(total, alive);
        }
    }
}
