use std::collections::{BTreeMap, BTreeSet, VecDeque};

use dnv_core::enumeration::{bfs, ClassFilter, IsoClassKey};
use dnv_core::morifan::{build_flop_graph, cone_census, orbit_length, secondary_fan};
use dnv_core::state::{State, StateClass};

#[test]
fn reference_orbit_lengths() {
    // The triangle is fully symmetric, the tetrahedron keeps only the swap
    // of its two smooth components.
    assert_eq!(orbit_length(&State::build_yp()), 1);
    assert_eq!(orbit_length(&State::build_yt()), 3);
}

#[test]
fn census_agrees_with_the_labelled_graph() {
    let census = cone_census();
    let graph = build_flop_graph();
    let p_nodes = graph
        .nodes
        .iter()
        .filter(|n| n.class == StateClass::P)
        .count();
    assert_eq!(census.class_p, p_nodes);
    assert_eq!(census.class_t, graph.nodes.len() - p_nodes);
    assert_eq!(census.total(), graph.nodes.len());
}

#[test]
fn labelled_multiplicity_of_each_class_is_its_orbit_length() {
    let classes = bfs(ClassFilter::Both, true);
    let graph = build_flop_graph();
    let mut tally: BTreeMap<&IsoClassKey, usize> = BTreeMap::new();
    for node in &graph.nodes {
        *tally.entry(&node.iso).or_insert(0) += 1;
    }
    assert_eq!(tally.len(), classes.len());
    for (key, st) in &classes {
        assert_eq!(tally.get(key), Some(&orbit_length(st)), "class {key:?}");
    }
}

#[test]
fn edge_types_respect_the_class_tags() {
    let graph = build_flop_graph();
    for e in &graph.edges {
        let (a, b) = (graph.nodes[e.a].class, graph.nodes[e.b].class);
        if e.type_ii {
            assert_ne!(a, b, "a type II facet joins opposite tags");
        } else {
            assert_eq!(a, b, "a type I facet stays within a tag");
        }
    }
}

#[test]
fn the_flop_graph_is_connected() {
    let graph = build_flop_graph();
    let n = graph.nodes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &graph.edges {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    assert_eq!(count, n);
}

#[test]
fn secondary_fan_components_partition_the_graph() {
    let graph = build_flop_graph();
    let components = secondary_fan(&graph);
    let mut all: BTreeSet<usize> = BTreeSet::new();
    for c in &components {
        for &v in c {
            assert!(all.insert(v), "node {v} in two components");
        }
    }
    assert_eq!(all.len(), graph.nodes.len());
    // One component of triangles, three congruent components of tetrahedra.
    assert_eq!(components.len(), 4);
    assert!(components[0].contains(&0));
    for c in &components[0] {
        assert_eq!(graph.nodes[*c].class, StateClass::P);
    }
    for c in &components[1..] {
        assert_eq!(c.len(), components[1].len());
        for &v in c {
            assert_eq!(graph.nodes[v].class, StateClass::T);
        }
    }
}
