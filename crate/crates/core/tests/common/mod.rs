#![allow(dead_code)]

use frugal_core::{DiGraph, UGraph};
use proptest::prelude::*;

/// Layered s-t network: `layers` layers of `width` vertices, every source
/// and sink edge present, a straight edge between consecutive layers for
/// each position (so `width` disjoint paths exist) and optional cross edges.
pub fn layered(layers: usize, width: usize, cross: &[bool]) -> DiGraph {
    let n = 2 + layers * width;
    let t = n - 1;
    let id = |l: usize, j: usize| 1 + l * width + j;
    let mut edges = Vec::new();
    for j in 0..width {
        edges.push((0, id(0, j)));
    }
    let mut c = cross.iter().copied().cycle();
    for l in 0..layers.saturating_sub(1) {
        for i in 0..width {
            for j in 0..width {
                if i == j || c.next().unwrap_or(false) {
                    edges.push((id(l, i), id(l + 1, j)));
                }
            }
        }
    }
    for j in 0..width {
        edges.push((id(layers - 1, j), t));
    }
    DiGraph::new(n, edges, 0, t).unwrap()
}

/// A layered network supporting `k + 1` disjoint paths, with integer costs.
pub fn kpath_instance(max_k: usize) -> impl Strategy<Value = (DiGraph, usize, Vec<f64>)> {
    (
        1..=max_k,
        1..=2usize,
        0..=1usize,
        proptest::collection::vec(prop::bool::weighted(0.3), 16),
    )
        .prop_flat_map(|(k, layers, extra_width, cross)| {
            let g = layered(layers, k + 1 + extra_width, &cross);
            let m = g.n_edges();
            (
                Just(g),
                Just(k),
                proptest::collection::vec((0u8..10).prop_map(f64::from), m),
            )
        })
}

/// Random graph on `n` vertices from a bit per vertex pair.
pub fn gnp(n: usize, bits: &[bool]) -> UGraph {
    let mut edges = Vec::new();
    let mut b = bits.iter().copied().cycle();
    for u in 0..n {
        for v in u + 1..n {
            if b.next().unwrap_or(false) {
                edges.push((u, v));
            }
        }
    }
    UGraph::new(n, edges).unwrap()
}

/// A graph with at least one edge and integer vertex costs.
pub fn cover_instance(max_n: usize) -> impl Strategy<Value = (UGraph, Vec<f64>)> {
    (
        2..=max_n,
        proptest::collection::vec(prop::bool::weighted(0.45), 45),
    )
        .prop_filter_map("needs an edge", |(n, bits)| {
            let g = gnp(n, &bits);
            (g.n_edges() > 0).then_some(g)
        })
        .prop_flat_map(|g| {
            let n = g.n_vertices();
            (
                Just(g),
                proptest::collection::vec((0u8..10).prop_map(f64::from), n),
            )
        })
}

/// Groups of sizes 1..=3 over consecutive agent ids, `r` with at least
/// `r + 1` groups, and integer member bids.
pub fn groups_instance(
    max_groups: usize,
) -> impl Strategy<Value = (Vec<Vec<usize>>, usize, Vec<f64>)> {
    proptest::collection::vec(1..=3usize, 2..=max_groups).prop_flat_map(|sizes| {
        let mut groups = Vec::new();
        let mut next = 0;
        for s in &sizes {
            groups.push((next..next + s).collect::<Vec<_>>());
            next += s;
        }
        let k = sizes.len();
        (
            Just(groups),
            1..k,
            proptest::collection::vec((0u8..10).prop_map(f64::from), next),
        )
    })
}
