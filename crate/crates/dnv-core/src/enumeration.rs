//! Exhaustive enumeration of models: breadth-first closure under flops,
//! isomorphism-class deduplication by canonical keys, the triple calculus
//! for all-regular class-`P` models as an independent oracle, and
//! symmetric-model detection.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::curve::{canonical_key, classify, extract};
use crate::lattice::Int;
use crate::projectivity::{component_status, decide, lp_feasible, Status};
use crate::state::{State, StateClass};

/// Canonical key of a state up to isomorphism: the canonical form of the
/// decorated incidence graph with the three components unlabelled.
///
/// Two states get equal keys exactly when there are isomorphisms of their
/// decorated curve structures for some permutation of the components
/// matching the gluings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct IsoClassKey(pub Vec<i64>);

/// Canonical key of a state with the component positions fixed: invariant
/// under internal isomorphisms of the components only. States differing by a
/// nontrivial component relabeling get distinct keys unless the relabeling
/// is induced by an automorphism.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LabelledKey(pub Vec<i64>);

/// The decorated incidence graph of a state, canonicalized.
///
/// Vertices: one hub per component (color `labels[i]`), one vertex per
/// boundary side (square and nodality), one vertex per tracked curve (its
/// square). Edges: membership (hub to its sides and curves), curve pairings,
/// curve-to-side decorations combining the boundary degree with the anchor
/// multiplicity, shared triple points between sides of one component, and a
/// marker on each glued pair of sides.
fn state_key(st: &State, labels: [i64; 3]) -> Vec<i64> {
    let mut colors: Vec<Vec<i64>> = Vec::new();
    let mut hub = [0usize; 3];
    let mut side_at: BTreeMap<(usize, String), usize> = BTreeMap::new();
    let mut curve_at: Vec<(usize, usize)> = Vec::new();
    for i in 0..st.comps.len() {
        hub[i] = colors.len();
        colors.push(vec![0, labels[i], 0]);
    }
    for (i, p) in st.comps.iter().enumerate() {
        for s in &p.boundary {
            side_at.insert((i, s.name.clone()), colors.len());
            let nodal = (s.nodes.len() == 2 && s.nodes[0] == s.nodes[1]) as i64;
            colors.push(vec![1, p.pairing(&s.class, &s.class), nodal]);
        }
    }
    let mut ids: Vec<Vec<String>> = Vec::new();
    for (i, p) in st.comps.iter().enumerate() {
        let comp_ids: Vec<String> = p.curves.keys().cloned().collect();
        for id in &comp_ids {
            let c = p.curve_class(id);
            curve_at.push((i, colors.len()));
            colors.push(vec![2, p.pairing(c, c), 0]);
        }
        ids.push(comp_ids);
    }
    let n = colors.len();
    let mut adj = vec![vec![0i64; n]; n];
    fn set(adj: &mut [Vec<i64>], a: usize, b: usize, w: i64) {
        adj[a][b] += w;
        adj[b][a] += w;
    }
    for (i, p) in st.comps.iter().enumerate() {
        for s in &p.boundary {
            set(&mut adj, hub[i], side_at[&(i, s.name.clone())], 1);
        }
        // Shared triple-point slots between distinct sides of one component.
        for (a, sa) in p.boundary.iter().enumerate() {
            for sb in p.boundary.iter().skip(a + 1) {
                let shared = sa
                    .nodes
                    .iter()
                    .filter(|x| sb.nodes.contains(x))
                    .count() as i64;
                if shared > 0 {
                    set(
                        &mut adj,
                        side_at[&(i, sa.name.clone())],
                        side_at[&(i, sb.name.clone())],
                        10_000 * shared,
                    );
                }
            }
        }
    }
    let mut base = 0;
    for (i, p) in st.comps.iter().enumerate() {
        for (a, id_a) in ids[i].iter().enumerate() {
            let v = curve_at[base + a].1;
            set(&mut adj, hub[i], v, 1);
            let ca = p.curve_class(id_a);
            for (b, id_b) in ids[i].iter().enumerate().skip(a + 1) {
                let w = curve_at[base + b].1;
                let m = p.pairing(ca, p.curve_class(id_b)) as i64;
                if m != 0 {
                    set(&mut adj, v, w, m);
                }
            }
            for s in &p.boundary {
                let deg = p.pairing(ca, &s.class) as i64;
                let anchor = s.anchor.get(id_a).copied().unwrap_or(0) as i64;
                if deg != 0 || anchor != 0 {
                    set(&mut adj, v, side_at[&(i, s.name.clone())], 64 * deg + anchor);
                }
            }
        }
        base += ids[i].len();
    }
    for g in &st.gluings {
        let a = side_at[&(g.a.0, g.a.1.clone())];
        let b = side_at[&(g.b.0, g.b.1.clone())];
        set(&mut adj, a, b, 1_000_000);
    }
    canonical_key(&refine(&colors, &adj), &adj)
}

/// Rank each entry among the sorted distinct entries.
fn ranks(items: &[Vec<i64>]) -> Vec<i64> {
    let mut sorted: Vec<&Vec<i64>> = items.iter().collect();
    sorted.sort();
    sorted.dedup();
    items
        .iter()
        .map(|x| sorted.binary_search(&x).expect("entry is present") as i64)
        .collect()
}

/// Iterated neighborhood color refinement: replaces each vertex color by its
/// class under repeated splitting by the multiset of (edge weight, neighbor
/// class) pairs. Isomorphism-invariant, and collapses most of the search
/// ties between the many identically-colored chain vertices.
fn refine(colors: &[Vec<i64>], adj: &[Vec<Int>]) -> Vec<Vec<i64>> {
    let n = colors.len();
    let mut class = ranks(colors);
    loop {
        let sigs: Vec<Vec<i64>> = (0..n)
            .map(|v| {
                let mut nb: Vec<(i64, i64)> = (0..n)
                    .filter(|&u| adj[v][u] != 0)
                    .map(|u| (adj[v][u], class[u]))
                    .collect();
                nb.sort_unstable();
                let mut s = vec![class[v]];
                for (w, c) in nb {
                    s.push(w);
                    s.push(c);
                }
                s
            })
            .collect();
        let next = ranks(&sigs);
        if next == class {
            break;
        }
        class = next;
    }
    class.into_iter().map(|c| vec![c]).collect()
}

/// Canonical key up to isomorphism.
pub fn iso_key(st: &State) -> IsoClassKey {
    IsoClassKey(state_key(st, [0, 0, 0]))
}

/// Canonical key with component positions fixed.
pub fn labelled_key(st: &State) -> LabelledKey {
    LabelledKey(state_key(st, [1, 2, 3]))
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// The component permutations induced by automorphisms of the state: those
/// relabelings under which the labelled canonical form is unchanged.
pub fn component_stabilizer(st: &State) -> Vec<[usize; 3]> {
    let base = state_key(st, [1, 2, 3]);
    PERMS
        .iter()
        .filter(|s| {
            let labels = [s[0] as i64 + 1, s[1] as i64 + 1, s[2] as i64 + 1];
            state_key(st, labels) == base
        })
        .cloned()
        .collect()
}

/// Whether the state admits an automorphism exchanging two components.
///
/// This asks for a transposition in the stabilizer. A state can have a
/// purely cyclic stabilizer instead; such a state is not symmetric even
/// though its component-permutation orbit is still shorter than six.
pub fn is_symmetric(st: &State) -> bool {
    component_stabilizer(st)
        .iter()
        .any(|s| matches!(s, [0, 2, 1] | [1, 0, 2] | [2, 1, 0]))
}

/// Which reference states to start from and which classes to report.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClassFilter {
    P,
    T,
    Both,
}

impl ClassFilter {
    fn admits(self, c: StateClass) -> bool {
        match self {
            ClassFilter::P => c == StateClass::P,
            ClassFilter::T => c == StateClass::T,
            ClassFilter::Both => true,
        }
    }
}

/// Projectivity of a state, with the linear-programming oracle adjudicating
/// any configuration the closed criteria leave open.
pub fn is_projective(st: &State) -> bool {
    decide(st).unwrap_or_else(|_| lp_feasible(st).is_some())
}

/// All states reachable by one flop, in deterministic order.
pub fn neighbors(st: &State) -> Vec<State> {
    let mut out = Vec::new();
    for f in st.available_type_i() {
        out.push(st.apply_type_i(&f).expect("available flop applies"));
    }
    for gi in st.available_type_ii() {
        out.push(st.apply_type_ii(gi).expect("available flop applies"));
    }
    out
}

/// Breadth-first closure from the reference states under flops, deduplicated
/// by isomorphism class; `projective_only` restricts the traversal to
/// projective states. Returns the classes of the requested class tag with
/// one representative each.
pub fn bfs(filter: ClassFilter, projective_only: bool) -> BTreeMap<IsoClassKey, State> {
    let roots = match filter {
        ClassFilter::P => vec![State::build_yp()],
        ClassFilter::T => vec![State::build_yt()],
        ClassFilter::Both => vec![State::build_yp(), State::build_yt()],
    };
    let mut seen: BTreeMap<IsoClassKey, State> = BTreeMap::new();
    let mut queue: VecDeque<State> = VecDeque::new();
    for st in roots {
        if projective_only && !is_projective(&st) {
            continue;
        }
        let k = iso_key(&st);
        if !seen.contains_key(&k) {
            seen.insert(k, st.clone());
            queue.push_back(st);
        }
    }
    while let Some(st) = queue.pop_front() {
        for next in neighbors(&st) {
            if projective_only && !is_projective(&next) {
                continue;
            }
            let k = iso_key(&next);
            if !seen.contains_key(&k) {
                seen.insert(k, next.clone());
                queue.push_back(next);
            }
        }
    }
    seen.retain(|_, st| filter.admits(st.class));
    seen
}

/// A triple of net flop counts around the class-`P` cycle.
pub type Triple = [Int; 3];

/// Cyclic shift.
pub fn shift(t: Triple) -> Triple {
    [t[2], t[0], t[1]]
}

/// Involution.
pub fn involution(t: Triple) -> Triple {
    [-t[1], -t[0], -t[2]]
}

/// The orbit of a triple under the group generated by shifts and the
/// involution (at most six triples).
pub fn triple_orbit(t: Triple) -> BTreeSet<Triple> {
    let mut orbit = BTreeSet::new();
    let mut queue = vec![t];
    while let Some(x) = queue.pop() {
        if orbit.insert(x) {
            queue.push(shift(x));
            queue.push(involution(x));
        }
    }
    orbit
}

/// The least element of the orbit: a canonical class representative.
pub fn canonical_triple(t: Triple) -> Triple {
    *triple_orbit(t).iter().next().expect("orbit is nonempty")
}

/// Whether two triples are related by shifts and involutions.
pub fn triple_equivalent(a: Triple, b: Triple) -> bool {
    canonical_triple(a) == canonical_triple(b)
}

/// The triple of a class-`P` state whose curve structures are all regular;
/// none-value otherwise (triples only classify the all-regular case).
pub fn triple_of(st: &State) -> Option<Triple> {
    if st.class != StateClass::P {
        return None;
    }
    for p in &st.comps {
        let g = extract(p).ok()?;
        if !classify(&g).regular {
            return None;
        }
    }
    Some(st.triple())
}

/// The all-regular class-`P` triples, listed stratum by stratum.
pub struct RegularTriples {
    /// All three curve structures non-degenerate (27 classes).
    pub non_degenerate: BTreeSet<Triple>,
    /// Exactly one degenerate curve structure (103 classes).
    pub one_degenerate: BTreeSet<Triple>,
    /// Two degenerate curve structures (225 classes).
    pub two_degenerate: BTreeSet<Triple>,
}

impl RegularTriples {
    pub fn all(&self) -> BTreeSet<Triple> {
        self.non_degenerate
            .iter()
            .chain(&self.one_degenerate)
            .chain(&self.two_degenerate)
            .cloned()
            .collect()
    }
}

fn canon_set(list: impl IntoIterator<Item = Triple>) -> BTreeSet<Triple> {
    list.into_iter().map(canonical_triple).collect()
}

/// The 353 all-regular class-`P` classes by direct enumeration: an
/// independent oracle against the breadth-first closure.
pub fn enumerate_regular_triples() -> RegularTriples {
    let mut nd: Vec<Triple> = vec![
        [0, 1, -1],
        [0, 1, 2],
        [0, 1, -2],
        [0, 2, 1],
        [0, 2, -2],
        [0, -1, 2],
        [0, -1, 1],
        [0, -2, 2],
        [1, 2, -1],
        [1, 2, -2],
        [1, -1, 2],
        [1, -2, 2],
        [0, 1, 1],
        [0, 2, 2],
    ];
    for x in [1, 2] {
        for y in -2..=2 {
            if y != x {
                nd.push([x, y, y]);
            }
        }
    }
    for x in -2..=2 {
        nd.push([x, x, x]);
    }

    let mut one: Vec<Triple> = (0..=2).map(|y| [3, y, -3]).collect();
    for x in -2..=2 {
        for y in -2..=2 {
            for z in y - 6..=-3 {
                one.push([x, z, y]);
            }
        }
    }

    let mut two: Vec<Triple> = (3..=9).map(|x| [x, -3, 3]).collect();
    for (y, lo, hi) in [(0, -6, 6), (-1, -7, 5), (-2, -8, 4)] {
        for x in lo..=-3 {
            for z in 3..=hi {
                two.push([x, y, z]);
            }
        }
    }
    for (z, lo) in [(-2, -8), (-1, -7), (0, -6), (1, -5), (2, -4)] {
        for y in lo..=-3 {
            for x in y - 6..=-3 {
                two.push([x, y, z]);
            }
        }
    }

    RegularTriples {
        non_degenerate: canon_set(nd),
        one_degenerate: canon_set(one),
        two_degenerate: canon_set(two),
    }
}

/// The class-`T` coordinates `(n1, n2)`, largest first: the squares of the
/// two cross-glued boundary sides on the special component. The reference
/// state reads `(-1, -1)`; every curve flopped in from a smooth component
/// drops its coordinate by one.
pub fn t_coordinates(st: &State) -> [Int; 2] {
    assert_eq!(st.class, StateClass::T);
    let k = st.special();
    let mut v: Vec<Int> = st
        .gluings
        .iter()
        .filter(|g| !g.is_self())
        .map(|g| {
            let end = if g.a.0 == k { &g.a } else { &g.b };
            st.side_square(end)
        })
        .collect();
    v.sort_unstable_by(|a, b| b.cmp(a));
    let [a, b] = v[..] else { panic!("class T has two cross gluings") };
    [a, b]
}

/// The stratum of a class-`P` model by the regularity pattern of its three
/// curve structures.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum PStratum {
    /// All structures non-degenerate.
    AllNonDegenerate,
    /// All regular, one degenerate.
    OneDegenerate,
    /// All regular, two degenerate.
    TwoDegenerate,
    /// One non-regular, one non-degenerate, one degenerate regular.
    NonRegularMixed,
    /// Two non-regular flanking a non-degenerate structure.
    TwoNonRegular,
    /// One non-regular, two non-degenerate.
    NonRegularPlain,
}

/// Classify a class-`P` state into its counting stratum.
pub fn p_stratum(st: &State) -> Result<PStratum, String> {
    assert_eq!(st.class, StateClass::P);
    let mut tally = BTreeMap::new();
    for p in &st.comps {
        let s = component_status(&classify(&extract(p)?));
        *tally.entry(s).or_insert(0usize) += 1;
    }
    let count = |s: Status| tally.get(&s).copied().unwrap_or(0);
    let pattern = (
        count(Status::NonDegenerate),
        count(Status::DegenerateRegular),
        count(Status::NonRegular),
    );
    match pattern {
        (3, 0, 0) => Ok(PStratum::AllNonDegenerate),
        (2, 1, 0) => Ok(PStratum::OneDegenerate),
        (1, 2, 0) => Ok(PStratum::TwoDegenerate),
        (1, 1, 1) => Ok(PStratum::NonRegularMixed),
        (1, 0, 2) => Ok(PStratum::TwoNonRegular),
        (2, 0, 1) => Ok(PStratum::NonRegularPlain),
        _ => Err(format!("unexpected regularity pattern {pattern:?}")),
    }
}
