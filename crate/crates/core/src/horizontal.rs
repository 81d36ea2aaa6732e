//! The horizontal-surface cohomology class of a tête-à-tête graph inside its
//! mapping torus, computed as covering holonomy on the residual free cover.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::quotient::{quotient_by_power, BranchPoint, OrbitGraph, QuotientError};
use crate::rational::{gcd_i64, lcm_i64};
use crate::ribbon::RibbonGraph;
use crate::tat::GraphAutomorphism;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HorizontalError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("lcm of isotropy orders does not divide the automorphism order")]
    OrderMismatch,
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// The tuple (p₁,…,p_μ mod q; q) classifying the horizontal surface, together
/// with the basis of fundamental cycles it refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HorizontalClass {
    pub q: i64,
    /// Residues in `[0, q)`, one per basis cycle.
    pub p: Vec<i64>,
    /// Closed directed-edge paths in the orbit graph.
    pub basis: Vec<Vec<usize>>,
}

/// Number of connected components of the horizontal surface of the class.
pub fn component_count(c: &HorizontalClass) -> i64 {
    let mut g = c.q;
    for &p in &c.p {
        g = gcd_i64(g, p);
    }
    g
}

/// Spanning-tree fundamental cycles of a connected graph, deterministically
/// ordered by the id of their non-tree edge; each cycle starts with that edge
/// directed along its even half.
pub fn fundamental_cycles(g: &RibbonGraph) -> Result<Vec<Vec<usize>>, HorizontalError> {
    fundamental_cycles_by(g, &|e| e)
}

/// As [`fundamental_cycles`] with a custom edge priority for the spanning
/// tree (used to vary the tree; the class must be invariant mod q).
pub fn fundamental_cycles_by(
    g: &RibbonGraph,
    priority: &dyn Fn(usize) -> usize,
) -> Result<Vec<Vec<usize>>, HorizontalError> {
    if !g.is_connected() {
        return Err(HorizontalError::Disconnected);
    }
    let vertices = g.vertices();
    let vindex: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf: Vec<usize> = (0..vertices.len()).collect();
    fn find(uf: &mut Vec<usize>, x: usize) -> usize {
        if uf[x] != x {
            let r = find(uf, uf[x]);
            uf[x] = r;
        }
        uf[x]
    }
    let mut edge_ids: Vec<usize> =
        (0..g.half_edge_count()).filter(|&h| h < g.opposite(h)).collect();
    edge_ids.sort_by_key(|&e| (priority(e), e));
    let mut tree_edges = Vec::new();
    let mut rest = Vec::new();
    for e in edge_ids {
        let a = find(&mut uf, vindex[&g.vertex_id(e)]);
        let b = find(&mut uf, vindex[&g.head(e)]);
        if a != b {
            uf[a] = b;
            tree_edges.push(e);
        } else {
            rest.push(e);
        }
    }
    rest.sort();
    // parent structure on the tree, rooted at the minimal vertex
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &e in &tree_edges {
        adj.entry(g.vertex_id(e)).or_default().push(e);
        adj.entry(g.head(e)).or_default().push(g.opposite(e));
    }
    let root = vertices[0];
    let mut parent_edge: BTreeMap<usize, usize> = BTreeMap::new(); // vertex -> directed half into it from its parent
    let mut order = vec![root];
    let mut seen: BTreeMap<usize, bool> = vertices.iter().map(|&v| (v, false)).collect();
    seen.insert(root, true);
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        i += 1;
        for &h in adj.get(&v).into_iter().flatten() {
            let w = g.head(h);
            if !seen[&w] {
                seen.insert(w, true);
                parent_edge.insert(w, h);
                order.push(w);
            }
        }
    }
    let path_to_root = |mut v: usize| -> Vec<usize> {
        let mut path = Vec::new(); // directed halves from v up to root
        while let Some(&h) = parent_edge.get(&v) {
            path.push(g.opposite(h));
            v = g.vertex_id(h);
        }
        path
    };
    let mut cycles = Vec::new();
    for e in rest {
        // cycle: e (tail → head), then tree path head → tail
        let up_from_head = path_to_root(g.head(e));
        let up_from_tail = path_to_root(g.vertex_id(e));
        // strip the common suffix (above the meeting vertex)
        let mut a = up_from_head;
        let mut b = up_from_tail;
        while let (Some(x), Some(y)) = (a.last(), b.last()) {
            if g.edge_id(*x) == g.edge_id(*y) {
                a.pop();
                b.pop();
            } else {
                break;
            }
        }
        let mut cycle = vec![e];
        cycle.extend(a.iter().copied());
        cycle.extend(b.iter().rev().map(|&h| g.opposite(h)));
        cycles.push(cycle);
    }
    Ok(cycles)
}

/// Computes the horizontal class of the automorphism: q = order / lcm of
/// branch isotropies, and p_i = holonomy of the i-th basis cycle in the free
/// residual cover.
pub fn horizontal_class(
    a: &GraphAutomorphism,
    branch: &[BranchPoint],
    orbit: &OrbitGraph,
) -> Result<HorizontalClass, HorizontalError> {
    let basis = fundamental_cycles(&orbit.graph)?;
    horizontal_class_in_basis(a, branch, orbit, basis)
}

pub fn horizontal_class_in_basis(
    a: &GraphAutomorphism,
    branch: &[BranchPoint],
    orbit: &OrbitGraph,
    basis: Vec<Vec<usize>>,
) -> Result<HorizontalClass, HorizontalError> {
    let n = a.order;
    let mut m = 1i64;
    for b in branch {
        m = lcm_i64(m, b.isotropy);
    }
    if n % m != 0 {
        return Err(HorizontalError::OrderMismatch);
    }
    let q = n / m;
    let quot = quotient_by_power(a, q)?;
    let ghat = &quot.graph;
    // project the residual cover onto the orbit graph
    let mut to_orbit = vec![usize::MAX; ghat.half_edge_count()];
    for h in 0..a.graph.half_edge_count() {
        let qh = quot.project[h];
        let oh = orbit.project[h];
        if to_orbit[qh] != usize::MAX && to_orbit[qh] != oh {
            return Err(HorizontalError::Internal("projections disagree".into()));
        }
        to_orbit[qh] = oh;
    }
    // the residual action must be free: unique lift of each orbit edge at
    // each cover vertex
    let mut lift: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for qh in 0..ghat.half_edge_count() {
        let key = (ghat.vertex_id(qh), to_orbit[qh]);
        if lift.insert(key, qh).is_some() {
            return Err(HorizontalError::Internal(
                "residual cover is not free: ambiguous path lifting".into(),
            ));
        }
    }
    let residual_vertex = |v: usize| ghat.vertex_id(quot.residual[v]);
    let mut p = Vec::with_capacity(basis.len());
    for cycle in &basis {
        let first = *cycle.first().ok_or(HorizontalError::Internal("empty cycle".into()))?;
        let start = (0..ghat.half_edge_count())
            .find(|&qh| to_orbit[qh] == first)
            .map(|qh| ghat.vertex_id(qh))
            .ok_or(HorizontalError::Internal("cycle edge has no lift".into()))?;
        let mut v = start;
        for &e in cycle {
            let qh = *lift
                .get(&(v, e))
                .ok_or(HorizontalError::Internal("path lifting failed".into()))?;
            v = ghat.head(qh);
        }
        let mut t = 0i64;
        let mut w = start;
        while w != v {
            w = residual_vertex(w);
            t += 1;
            if t > q {
                return Err(HorizontalError::Internal("holonomy outside the deck group".into()));
            }
        }
        p.push(t.rem_euclid(q));
    }
    Ok(HorizontalClass { q, p, basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::quotient::{branch_points, orbit_graph};
    use crate::rational::{rat, rat_int};
    use crate::ribbon::GraphBuilder;
    use crate::tat::tat_map;

    #[test]
    fn tree_has_no_cycles() {
        // a path graph with two edges
        let mut b = GraphBuilder::new();
        let (a0, a1) = b.add_edge(rat(1, 2));
        let (c0, c1) = b.add_edge(rat(1, 2));
        b.add_vertex(&[a0]);
        b.add_vertex(&[a1, c0]);
        b.add_vertex(&[c1]);
        b.mark_boundary(a0);
        b.mark_boundary(c1);
        b.set_sigma(a0, c1);
        b.set_sigma(c1, a0);
        let g = b.build().unwrap();
        assert!(fundamental_cycles(&g).unwrap().is_empty());
    }

    #[test]
    fn wedge_of_two_circles_has_two_cycles() {
        let mut b = GraphBuilder::new();
        let (a0, a1) = b.add_edge(rat_int(1));
        let (c0, c1) = b.add_edge(rat_int(1));
        b.add_vertex(&[a0, a1, c0, c1]);
        let g = b.build().unwrap();
        let cycles = fundamental_cycles(&g).unwrap();
        assert_eq!(cycles.len(), 2);
        assert_eq!(cycles[0], vec![0]);
        assert_eq!(cycles[1], vec![2]);
    }

    #[test]
    fn k411_class_is_trivial() {
        let a = tat_map(&fixtures::k411()).unwrap();
        let orbit = orbit_graph(&a).unwrap();
        let branch = branch_points(&a).unwrap();
        let c = horizontal_class(&a, &branch, &orbit).unwrap();
        assert_eq!(c.q, 1);
        assert!(c.p.is_empty());
        assert_eq!(component_count(&c), 1);
    }

    #[test]
    fn circle_identity_class() {
        let a = tat_map(&fixtures::circle_graph(rat_int(1))).unwrap();
        let orbit = orbit_graph(&a).unwrap();
        let branch = branch_points(&a).unwrap();
        let c = horizontal_class(&a, &branch, &orbit).unwrap();
        assert_eq!(c.q, 1);
        assert_eq!(c.p, vec![0]);
    }

    #[test]
    fn component_counts() {
        let c = HorizontalClass { q: 2, p: vec![1], basis: vec![vec![0]] };
        assert_eq!(component_count(&c), 1);
        let c = HorizontalClass { q: 3, p: vec![0], basis: vec![vec![0]] };
        assert_eq!(component_count(&c), 3);
        let c = HorizontalClass { q: 6, p: vec![2, 4], basis: vec![vec![0], vec![2]] };
        assert_eq!(component_count(&c), 2);
    }
}
