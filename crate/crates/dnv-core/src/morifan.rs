//! The labelled-state graph whose nodes are the maximal cones of the Mori
//! fan and whose edges are the interior facets between them: each node is a
//! marked model (a state with its component positions fixed, up to the
//! state's own automorphisms), each edge a flop. Also the orbit-length
//! census over isomorphism classes and the secondary fan obtained by
//! deleting the type II facets.

use std::collections::{BTreeMap, VecDeque};

use crate::enumeration::{
    bfs, component_stabilizer, is_projective, labelled_key, ClassFilter, IsoClassKey, LabelledKey,
};
use crate::state::{State, StateClass};

/// Orbit length of an isomorphism class under component relabeling: the
/// number of marked models (Mori-fan cones) it accounts for.
pub fn orbit_length(st: &State) -> usize {
    6 / component_stabilizer(st).len()
}

/// The cone census: cones counted per class tag by summing orbit lengths
/// over the projective isomorphism classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeCensus {
    pub class_p: usize,
    pub class_t: usize,
}

impl ConeCensus {
    pub fn total(&self) -> usize {
        self.class_p + self.class_t
    }
}

/// Count the maximal cones of the Mori fan as the sum of orbit lengths over
/// the projective isomorphism classes.
pub fn cone_census() -> ConeCensus {
    let mut census = ConeCensus { class_p: 0, class_t: 0 };
    for st in bfs(ClassFilter::Both, true).values() {
        let n = orbit_length(st);
        match st.class {
            StateClass::P => census.class_p += n,
            StateClass::T => census.class_t += n,
        }
    }
    census
}

/// A node of the flop graph: one marked model.
#[derive(Clone, Debug)]
pub struct FlopNode {
    pub key: LabelledKey,
    pub class: StateClass,
    /// The isomorphism class the marked model belongs to.
    pub iso: IsoClassKey,
}

/// An edge of the flop graph: a shared facet, crossed by a flop. Stored
/// once per unordered node pair and flop type with a sample move descriptor.
#[derive(Clone, Debug)]
pub struct FlopEdge {
    pub a: usize,
    pub b: usize,
    pub type_ii: bool,
    pub descriptor: String,
}

/// The labelled flop graph.
#[derive(Clone, Debug, Default)]
pub struct FlopGraph {
    pub nodes: Vec<FlopNode>,
    pub edges: Vec<FlopEdge>,
}

/// Breadth-first closure over the marked (labelled) projective states. The
/// node count independently recomputes the cone census.
pub fn build_flop_graph() -> FlopGraph {
    let mut index: BTreeMap<LabelledKey, usize> = BTreeMap::new();
    let mut nodes: Vec<FlopNode> = Vec::new();
    let mut edges: BTreeMap<(usize, usize, bool), String> = BTreeMap::new();
    let mut queue: VecDeque<(State, usize)> = VecDeque::new();
    for st in [State::build_yp(), State::build_yt()] {
        let key = labelled_key(&st);
        if !index.contains_key(&key) {
            let i = nodes.len();
            index.insert(key.clone(), i);
            nodes.push(FlopNode {
                key,
                class: st.class,
                iso: crate::enumeration::iso_key(&st),
            });
            queue.push_back((st, i));
        }
    }
    while let Some((st, here)) = queue.pop_front() {
        let mut moves: Vec<(State, bool, String)> = Vec::new();
        for f in st.available_type_i() {
            let next = st.apply_type_i(&f).expect("available flop applies");
            moves.push((next, false, format!("I:{}", f.curve)));
        }
        for gi in st.available_type_ii() {
            let next = st.apply_type_ii(gi).expect("available flop applies");
            moves.push((next, true, format!("II:g{gi}")));
        }
        for (next, type_ii, descriptor) in moves {
            if !is_projective(&next) {
                continue;
            }
            let key = labelled_key(&next);
            let there = match index.get(&key) {
                Some(&i) => i,
                None => {
                    let i = nodes.len();
                    index.insert(key.clone(), i);
                    nodes.push(FlopNode {
                        key,
                        class: next.class,
                        iso: crate::enumeration::iso_key(&next),
                    });
                    queue.push_back((next, i));
                    i
                }
            };
            let (a, b) = (here.min(there), here.max(there));
            edges.entry((a, b, type_ii)).or_insert(descriptor);
        }
    }
    FlopGraph {
        nodes,
        edges: edges
            .into_iter()
            .map(|((a, b, type_ii), descriptor)| FlopEdge { a, b, type_ii, descriptor })
            .collect(),
    }
}

/// The connected components of the graph with the type II edges deleted:
/// the maximal cones of the secondary fan. The component of the marked
/// reference triangle comes first; the rest follow in order of their
/// smallest node index.
pub fn secondary_fan(graph: &FlopGraph) -> Vec<Vec<usize>> {
    let n = graph.nodes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &graph.edges {
        if !e.type_ii {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if comp[u] == usize::MAX {
                    comp[u] = id;
                    members.push(u);
                    queue.push_back(u);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}
