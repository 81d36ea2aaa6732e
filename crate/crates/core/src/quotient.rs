//! Quotient (orbit) ribbon graphs of a periodic automorphism, and branch
//! points with their isotropy orders and local rotation numbers.

use num::Zero;
use thiserror::Error;

use crate::rational::{gcd_i64, Rational};
use crate::ribbon::{GraphError, RibbonGraph};
use crate::tat::GraphAutomorphism;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("not an automorphism quotient: {0}")]
    NotAutomorphism(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Quotient of a graph by the subgroup generated by a fixed power of an
/// automorphism, with the projection and the residual action.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub graph: RibbonGraph,
    /// Source half-edge → quotient half-edge.
    pub project: Vec<usize>,
    /// Induced permutation of the full automorphism on the quotient.
    pub residual: Vec<usize>,
    pub subgroup_order: i64,
}

/// Quotient by ⟨a^power⟩. Requires that no subgroup element inverts an edge
/// (arranged upstream by midpoint subdivision).
pub fn quotient_by_power(a: &GraphAutomorphism, power: i64) -> Result<Quotient, QuotientError> {
    let g = &a.graph;
    let n = g.half_edge_count();
    let step = a.power(power);
    let mut orbit_id = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for h0 in 0..n {
        if orbit_id[h0] != usize::MAX {
            continue;
        }
        let id = reps.len();
        let mut h = h0;
        loop {
            if g.opposite(h) == h0 && h != h0 {
                // h0 and its opposite lie in one orbit: an inverted edge
                return Err(QuotientError::NotAutomorphism(format!(
                    "edge of half-edge {h0} is inverted by the subgroup"
                )));
            }
            orbit_id[h] = id;
            h = step[h];
            if h == h0 {
                break;
            }
        }
        reps.push(h0);
    }
    let m = reps.len();
    let mut qopp = vec![0usize; m];
    let mut qnext = vec![0usize; m];
    let mut qlen = vec![Rational::zero(); m];
    for (qh, &rep) in reps.iter().enumerate() {
        qopp[qh] = orbit_id[g.opposite(rep)];
        qnext[qh] = orbit_id[g.next(rep)];
        qlen[qh] = g.length(rep).clone();
    }
    for h in 0..n {
        if orbit_id[g.next(h)] != qnext[orbit_id[h]] || orbit_id[g.opposite(h)] != qopp[orbit_id[h]]
        {
            return Err(QuotientError::NotAutomorphism(
                "orbit structure does not descend to the quotient".into(),
            ));
        }
        if g.length(h) != &qlen[orbit_id[h]] {
            return Err(QuotientError::NotAutomorphism(
                "lengths are not constant on orbits".into(),
            ));
        }
    }
    let boundary: Vec<usize> = g.boundary_vertices().iter().map(|&v| orbit_id[v]).collect();
    let sigma: Vec<(usize, usize)> = g
        .boundary_vertices()
        .iter()
        .map(|&v| (orbit_id[v], orbit_id[g.sigma(v)]))
        .collect();
    let graph = RibbonGraph::from_parts(qopp, qnext, qlen, boundary, sigma)?;
    let mut residual = vec![0usize; m];
    for (qh, &rep) in reps.iter().enumerate() {
        residual[qh] = orbit_id[a.apply(rep)];
    }
    let subgroup_order = {
        let mut k = 1i64;
        let mut p = power.rem_euclid(a.order);
        while p != 0 {
            p = (p + power).rem_euclid(a.order);
            k += 1;
        }
        k
    };
    Ok(Quotient { graph, project: orbit_id, residual, subgroup_order })
}

/// The orbit ribbon graph of the full cyclic action, with the surface
/// invariants of its thickening (the base surface).
#[derive(Debug, Clone)]
pub struct OrbitGraph {
    pub graph: RibbonGraph,
    pub project: Vec<usize>,
    pub genus: i64,
    pub boundary: i64,
}

pub fn orbit_graph(a: &GraphAutomorphism) -> Result<OrbitGraph, QuotientError> {
    let q = quotient_by_power(a, 1)?;
    let si = q.graph.surface_invariants()?;
    Ok(OrbitGraph {
        graph: q.graph,
        project: q.project,
        genus: si.genus,
        boundary: si.boundary_count,
    })
}

/// A vertex orbit with nontrivial isotropy: the isotropy order k, the power
/// s = n/k generating the stabilizer, and the local rotation numerator p
/// (the stabilizer generator advances the vertex star by p/k of a turn).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BranchPoint {
    pub vertex: usize,
    pub isotropy: i64,
    pub power: i64,
    pub rotation: i64,
}

pub fn branch_points(a: &GraphAutomorphism) -> Result<Vec<BranchPoint>, QuotientError> {
    let g = &a.graph;
    let n = a.order;
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for v in g.vertices() {
        if seen.contains(&v) {
            continue;
        }
        let mut orbit = vec![v];
        seen.insert(v);
        let mut w = a.apply_vertex(v);
        while w != v {
            seen.insert(w);
            orbit.push(w);
            w = a.apply_vertex(w);
        }
        let s = orbit.len() as i64;
        if s == n {
            continue;
        }
        if n % s != 0 {
            return Err(QuotientError::NotAutomorphism(format!(
                "vertex orbit of {v} has size {s} not dividing the order {n}"
            )));
        }
        let k = n / s;
        let pow = a.power(s);
        let star = g.star(v);
        let d = star.len();
        let h1 = pow[v];
        let j = star
            .iter()
            .position(|&x| x == h1)
            .ok_or_else(|| QuotientError::NotAutomorphism(format!(
                "return power does not fix the vertex {v}"
            )))?;
        let gcd = gcd_i64(j as i64, d as i64);
        let (p, k2) = ((j as i64) / gcd, (d as i64) / gcd);
        if k2 != k {
            return Err(QuotientError::NotAutomorphism(format!(
                "star rotation order {k2} at vertex {v} disagrees with isotropy {k}"
            )));
        }
        out.push(BranchPoint { vertex: v, isotropy: k, power: s, rotation: p });
    }
    out.sort();
    Ok(out)
}

/// χ(cover) = n·χ(base) − Σ (n − n/k) over branch points.
pub fn riemann_hurwitz_holds(
    a: &GraphAutomorphism,
    orbit: &OrbitGraph,
    branch: &[BranchPoint],
) -> bool {
    let g = &a.graph;
    let chi = g.vertices().len() as i64 - g.edge_count() as i64;
    let chi_base = orbit.graph.vertices().len() as i64 - orbit.graph.edge_count() as i64;
    let deficiency: i64 = branch.iter().map(|b| a.order - a.order / b.isotropy).sum();
    chi == a.order * chi_base - deficiency
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::rat_int;
    use crate::tat::tat_map;

    #[test]
    fn k411_orbit_graph_is_a_segment() {
        let a = tat_map(&fixtures::k411()).unwrap();
        let orbit = orbit_graph(&a).unwrap();
        assert_eq!(orbit.graph.edge_count(), 1);
        assert_eq!(orbit.graph.vertices().len(), 2);
        assert_eq!((orbit.genus, orbit.boundary), (0, 1));
    }

    #[test]
    fn k411_branch_points() {
        let a = tat_map(&fixtures::k411()).unwrap();
        let branch = branch_points(&a).unwrap();
        let mut data: Vec<(i64, i64)> = branch.iter().map(|b| (b.isotropy, b.rotation)).collect();
        data.sort();
        assert_eq!(data, vec![(4, 3), (11, 4)]);
        for b in &branch {
            assert_eq!(b.power * b.isotropy, 44);
        }
    }

    #[test]
    fn identity_has_no_branch_points_and_trivial_quotient() {
        let g = fixtures::circle_graph(rat_int(1));
        let a = tat_map(&g).unwrap();
        assert!(branch_points(&a).unwrap().is_empty());
        let orbit = orbit_graph(&a).unwrap();
        assert_eq!(orbit.graph.edge_count(), g.edge_count());
        assert_eq!((orbit.genus, orbit.boundary), (0, 2));
    }

    #[test]
    fn riemann_hurwitz_on_fixtures() {
        for g in [fixtures::k411(), fixtures::complete_bipartite(2, 3, crate::rational::rat(1, 2))]
        {
            let a = tat_map(&g).unwrap();
            let orbit = orbit_graph(&a).unwrap();
            let branch = branch_points(&a).unwrap();
            assert!(riemann_hurwitz_holds(&a, &orbit, &branch));
        }
    }

    #[test]
    fn edge_orbit_counting() {
        let a = tat_map(&fixtures::k411()).unwrap();
        let orbit = orbit_graph(&a).unwrap();
        // free on edges here: 44 edges over 1 orbit edge
        assert_eq!(a.graph.edge_count(), 44 * orbit.graph.edge_count());
    }

    #[test]
    fn galois_property_all_orbit_vertices_share_isotropy() {
        let a = tat_map(&fixtures::k411()).unwrap();
        let g = &a.graph;
        // all valency-11 vertices are one orbit with the same local data
        let branch = branch_points(&a).unwrap();
        for b in &branch {
            let mut v = b.vertex;
            for _ in 0..b.power {
                v = a.apply_vertex(v);
                assert_eq!(g.valency(v) as i64 % b.isotropy, 0);
            }
        }
    }
}
