//! Small example graphs used across tests and by the CLI fixture generator.

use crate::rational::{rat, Rational};
use crate::ribbon::{GraphBuilder, RibbonGraph};
use crate::seifert::{PlumbingGraph, SeifertPair};

/// One vertex, one loop of the given length.
pub fn circle_graph(length: Rational) -> RibbonGraph {
    let mut b = GraphBuilder::new();
    let (h0, h1) = b.add_edge(length);
    b.add_vertex(&[h0, h1]);
    b.build().unwrap()
}

/// Two vertices joined by three parallel edges, planar cyclic order.
pub fn theta_graph() -> RibbonGraph {
    let mut b = GraphBuilder::new();
    let (a0, a1) = b.add_edge(rat(1, 2));
    let (c0, c1) = b.add_edge(rat(1, 2));
    let (d0, d1) = b.add_edge(rat(1, 2));
    b.add_vertex(&[a0, c0, d0]);
    b.add_vertex(&[d1, c1, a1]);
    b.build().unwrap()
}

/// Complete bipartite graph on parts of sizes `p` and `q` with the cyclic
/// ordering induced by placing the parts on two horizontal lines, every edge
/// of the given length. Half-edges `2(q·i + j)` at `u_i`, odd partners at `w_j`.
pub fn complete_bipartite(p: usize, q: usize, length: Rational) -> RibbonGraph {
    let mut b = GraphBuilder::new();
    let mut at_u = vec![Vec::new(); p];
    let mut at_w = vec![Vec::new(); q];
    for i in 0..p {
        for j in 0..q {
            let (hu, hw) = b.add_edge(length.clone());
            at_u[i].push(hu);
            at_w[j].push(hw);
        }
    }
    for cycle in &at_u {
        b.add_vertex(cycle);
    }
    for cycle in &mut at_w {
        cycle.reverse();
        b.add_vertex(cycle);
    }
    b.build().unwrap()
}

/// K_{4,11} with every edge of length 1/2 (π/2).
pub fn k411() -> RibbonGraph {
    complete_bipartite(4, 11, rat(1, 2))
}

/// K_{4,11} with one edge length changed to 1/3: no longer tête-à-tête.
pub fn k411_perturbed() -> RibbonGraph {
    let mut b = GraphBuilder::new();
    let mut at_u = vec![Vec::new(); 4];
    let mut at_w = vec![Vec::new(); 11];
    for i in 0..4 {
        for j in 0..11 {
            let len = if i == 0 && j == 0 { rat(1, 3) } else { rat(1, 2) };
            let (hu, hw) = b.add_edge(len);
            at_u[i].push(hu);
            at_w[j].push(hw);
        }
    }
    for cycle in &at_u {
        b.add_vertex(cycle);
    }
    for cycle in &mut at_w {
        cycle.reverse();
        b.add_vertex(cycle);
    }
    b.build().unwrap()
}

/// Two-vertex graph with a marked univalent vertex `u`, σ = id: a single edge
/// of length 1/2 from `u` to `w` plus a loop at `w`. Walks bounce at `u`.
pub fn bounce_example() -> RibbonGraph {
    let mut b = GraphBuilder::new();
    let (eu, ew) = b.add_edge(rat(1, 2));
    let (l0, l1) = b.add_edge(rat(1, 2));
    b.add_vertex(&[eu]);
    b.add_vertex(&[ew, l0, l1]);
    b.mark_boundary(eu);
    b.set_sigma(eu, eu);
    b.build().unwrap()
}

/// The star-shaped plumbing of the K_{4,11} mapping torus.
pub fn k411_plumbing() -> PlumbingGraph {
    PlumbingGraph {
        euler: -1,
        genus: 0,
        bamboos: vec![vec![2, 2, 3, 2], vec![4]],
        arrows: 1,
    }
}

/// The two-bamboo plumbing with base genus 0 and two boundary components
/// (Seifert pairs (3,2) and (2,1)).
pub fn two_bamboo_plumbing() -> PlumbingGraph {
    PlumbingGraph {
        euler: -3,
        genus: 0,
        bamboos: vec![vec![2, 2], vec![2]],
        arrows: 2,
    }
}

/// Seifert pairs of [`two_bamboo_plumbing`].
pub fn two_bamboo_pairs() -> Vec<SeifertPair> {
    vec![SeifertPair::new(3, 2), SeifertPair::new(2, 1)]
}
