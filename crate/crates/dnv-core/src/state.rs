//! Central fibre states: three glued components and the two flop rewrites.
//!
//! A state is a triangle of anticanonical pairs glued along boundary sides.
//! Type I flops move a (-1)-curve across a double curve; type II flops
//! contract a double curve, exchanging the triangle class `P` (three
//! two-sided components) with the class `T` (two nodal components and one
//! special component whose boundary contains a self-glued pair).

use std::collections::BTreeMap;

use crate::lattice::{Class, Int};
use crate::pairs::{build_y1, build_y2, build_y4, BaseTag, Curve, Latent, Pair, Role};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StateClass {
    P,
    T,
}

/// A gluing identifies side `a.1` of component `a.0` with side `b.1` of
/// component `b.0` (possibly of the same component).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub a: (usize, String),
    pub b: (usize, String),
}

impl Gluing {
    pub fn is_self(&self) -> bool {
        self.a.0 == self.b.0
    }

    pub fn ends(&self) -> [&(usize, String); 2] {
        [&self.a, &self.b]
    }
}

/// A central fibre state.
#[derive(Clone, Debug)]
pub struct State {
    pub comps: Vec<Pair>,
    pub gluings: Vec<Gluing>,
    pub class: StateClass,
    counter: u64,
}

/// An available type I flop: move the named (-1)-curve of the donor end of a
/// gluing to the other end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlopI {
    pub gluing: usize,
    pub donor_is_a: bool,
    pub curve: String,
}

fn fresh(counter: &mut u64, prefix: &str) -> String {
    *counter += 1;
    format!("{prefix}{counter}")
}

fn base_for_boundary(len: usize) -> BaseTag {
    match len {
        1 => BaseTag::Y1,
        2 => BaseTag::Y2,
        4 => BaseTag::Y4,
        _ => panic!("no reference type with {len} boundary sides"),
    }
}

/// Contract a (-1) boundary side. The single anchor resident is demoted to a
/// latent at the fresh node `u` (the image of the side); latents whose home
/// node lay on the side retire.
fn demote_side(p: &mut Pair, side_name: &str, u: &str) -> Result<(), String> {
    let si = p
        .boundary
        .iter()
        .position(|s| s.name == side_name)
        .ok_or_else(|| format!("no side {side_name}"))?;
    let s_class = p.boundary[si].class.clone();
    let s_nodes = p.boundary[si].nodes.clone();
    if p.pairing(&s_class, &s_class) != -1 {
        return Err(format!("side {side_name} is not a (-1)-curve"));
    }
    let anchor = p.boundary[si].anchor.clone();
    let (x_id, x_mult) = match anchor.iter().collect::<Vec<_>>()[..] {
        [(id, m)] => (id.clone(), *m),
        _ => {
            return Err(format!(
                "side {side_name} does not carry a single anchor curve"
            ))
        }
    };
    if x_mult != 1 {
        return Err(format!("anchor of {side_name} has multiplicity {x_mult}"));
    }
    if !p.retired.is_empty() {
        return Err("contracting a side of a component with retired classes".into());
    }
    let x_class = p.curves[&x_id].class.clone();
    if p.pairing(&x_class, &s_class) != 1 {
        return Err(format!("anchor of {side_name} is tangent to the side"));
    }
    // Point data of the demoted curve on the surviving sides: multiplicities
    // from the anchor records, contact orders from the pairings.
    let x_cross: BTreeMap<String, Int> = p
        .boundary
        .iter()
        .filter(|s| s.name != side_name)
        .filter_map(|s| s.anchor.get(&x_id).map(|&m| (s.name.clone(), m)))
        .collect();
    let x_contact: BTreeMap<String, Int> = p
        .boundary
        .iter()
        .filter(|s| s.name != side_name)
        .filter_map(|s| {
            let c = p.pairing(&x_class, &s.class);
            (c > 0).then(|| (s.name.clone(), c))
        })
        .collect();
    // Node multiplicities at u of the latents that retire.
    let latent_s_mult: Vec<Int> = p
        .latents
        .iter()
        .map(|v| p.pairing(&v.class, &s_class))
        .collect();

    let (lat, push) = p.lattice.blow_down(&s_class);
    p.curves.remove(&x_id);
    for cv in p.curves.values_mut() {
        cv.class = push.push(&cv.class);
    }
    p.boundary.remove(si);
    for s in p.boundary.iter_mut() {
        s.class = push.push(&s.class);
        s.anchor.remove(&x_id);
        for slot in s.nodes.iter_mut() {
            if s_nodes.contains(slot) {
                *slot = u.to_string();
            }
        }
    }
    p.canonical = push.push(&p.canonical);
    let mut kept = Vec::new();
    for (v, m_s) in std::mem::take(&mut p.latents).into_iter().zip(latent_s_mult) {
        let mut v = v;
        v.class = push.push(&v.class);
        let on_side = v.crossings.remove(side_name).unwrap_or(0);
        v.contact.remove(side_name);
        if s_nodes.contains(&v.node) {
            // The point data at the contracted side is absorbed into the
            // node multiplicity at its image.
            v.node = u.to_string();
            v.node_mult = m_s;
            p.retired.push(v);
        } else {
            if on_side != 0 {
                return Err("latent has anchor crossings on a contracted side".into());
            }
            kept.push(v);
        }
    }
    p.latents = kept;
    p.latents.push(Latent {
        node: u.to_string(),
        class: push.push(&x_class),
        node_mult: 1,
        crossings: x_cross,
        contact: x_contact,
    });
    p.lattice = lat;
    Ok(())
}

/// Blow up a triple-point slot. Sides pass through the node once per slot;
/// latents and retired classes at the node pass with their node
/// multiplicity. Active latents at the node are promoted to tracked curves;
/// retired classes at the node are resurrected as the latents of the fresh
/// slots. Returns the name of the new boundary side.
fn blow_up_at_node(p: &mut Pair, node: &str, counter: &mut u64) -> Result<String, String> {
    let side_mult: Vec<Int> = p
        .boundary
        .iter()
        .map(|s| s.nodes.iter().filter(|x| *x == node).count() as Int)
        .collect();
    if side_mult.iter().sum::<Int>() != 2 {
        return Err(format!("node {node} does not lie on two boundary branches"));
    }
    let (lat, _, e) = p.lattice.blow_up(&[]);
    let tr = |x: &Class, m: Int| x.embedded().sub(&e.scaled(m));
    for cv in p.curves.values_mut() {
        cv.class = tr(&cv.class, 0);
    }
    for (s, m) in p.boundary.iter_mut().zip(&side_mult) {
        s.class = tr(&s.class, *m);
    }
    p.canonical = tr(&p.canonical, -1);
    // Fresh triple-point slots: one per branch of the old node, shared
    // between the branch's side and the new exceptional side.
    let mut new_slots = Vec::new();
    for s in p.boundary.iter_mut() {
        for slot in s.nodes.iter_mut() {
            if slot == node {
                let w = fresh(counter, "n");
                *slot = w.clone();
                new_slots.push(w);
            }
        }
    }
    let side_name = fresh(counter, "B");
    p.boundary.push(crate::pairs::BoundarySide {
        name: side_name.clone(),
        class: e.clone(),
        anchor: BTreeMap::new(),
        nodes: new_slots.clone(),
    });
    let mut promoted = Vec::new();
    let mut resurrected = Vec::new();
    let mut kept = Vec::new();
    for v in std::mem::take(&mut p.latents) {
        if v.node == node {
            promoted.push((tr(&v.class, v.node_mult), v.node_mult, v.crossings));
        } else {
            kept.push(Latent { class: tr(&v.class, 0), ..v });
        }
    }
    for v in std::mem::take(&mut p.retired) {
        if v.node == node {
            resurrected.push(Latent {
                node: String::new(),
                class: tr(&v.class, v.node_mult),
                node_mult: 1,
                crossings: v.crossings,
                contact: v.contact,
            });
        } else {
            p.retired.push(Latent { class: tr(&v.class, 0), ..v });
        }
    }
    if !resurrected.is_empty() && resurrected.len() != new_slots.len() {
        return Err("retired classes do not match the fresh slots".into());
    }
    for (mut v, w) in resurrected.into_iter().zip(&new_slots) {
        v.node = w.clone();
        kept.push(v);
    }
    p.latents = kept;
    for (cls, node_mult, crossings) in promoted {
        let id = fresh(counter, "X");
        p.curves.insert(id.clone(), Curve { class: cls, role: Role::Interior });
        // The promoted curve sits on the fresh side over its node and keeps
        // its recorded multiplicities at the other anchor points.
        for s in p.boundary.iter_mut() {
            if s.name == side_name {
                s.anchor.insert(id.clone(), node_mult);
            } else if let Some(&m) = crossings.get(&s.name) {
                s.anchor.insert(id.clone(), m);
            }
        }
    }
    p.lattice = lat;
    Ok(side_name)
}

impl State {
    /// Assemble a state from its parts, validating the result. The
    /// fresh-name counter is re-seeded past every numeric suffix in use so
    /// that later rewrites never collide with existing names.
    pub fn from_parts(
        comps: Vec<Pair>,
        gluings: Vec<Gluing>,
        class: StateClass,
    ) -> Result<State, String> {
        let mut counter = 0u64;
        let mut feed = |name: &str| {
            let digits: String = name
                .chars()
                .skip_while(|c| !c.is_ascii_digit())
                .collect();
            if let Ok(n) = digits.parse::<u64>() {
                counter = counter.max(n);
            }
        };
        for p in &comps {
            for id in p.curves.keys() {
                feed(id);
            }
            for s in &p.boundary {
                feed(&s.name);
                for n in &s.nodes {
                    feed(n);
                }
            }
            for w in p.latents.iter().chain(p.retired.iter()) {
                feed(&w.node);
            }
        }
        let st = State { comps, gluings, class, counter };
        st.validate()?;
        Ok(st)
    }

    /// The maximally degenerate triangle of three two-sided components.
    pub fn build_yp() -> State {
        let comps = vec![build_y2(), build_y2(), build_y2()];
        let gluings = (0..3)
            .map(|i| Gluing {
                a: (i, "D2".to_string()),
                b: ((i + 1) % 3, "D1".to_string()),
            })
            .collect();
        State { comps, gluings, class: StateClass::P, counter: 0 }
    }

    /// The reference state of class `T`: two nodal components glued to the
    /// special component, whose remaining boundary is self-glued.
    pub fn build_yt() -> State {
        let comps = vec![build_y1(), build_y1(), build_y4()];
        let gluings = vec![
            Gluing { a: (0, "D".to_string()), b: (2, "D2".to_string()) },
            Gluing { a: (1, "D".to_string()), b: (2, "D4".to_string()) },
            Gluing { a: (2, "D1".to_string()), b: (2, "D3".to_string()) },
        ];
        State { comps, gluings, class: StateClass::T, counter: 0 }
    }

    pub fn side_square(&self, end: &(usize, String)) -> Int {
        let s = self.comps[end.0].side(&end.1);
        self.comps[end.0].pairing(&s.class, &s.class)
    }

    /// The triple (n1, n2, n3) of a class-`P` state: for each cyclic gluing,
    /// the square of the side on the lower-index* component plus one, read
    /// around the cycle 0 -> 1 -> 2 -> 0 (*component i for gluing i -> i+1).
    pub fn triple(&self) -> [Int; 3] {
        assert_eq!(self.class, StateClass::P);
        let mut t = [0; 3];
        for i in 0..3 {
            let j = (i + 1) % 3;
            let g = self
                .gluings
                .iter()
                .find(|g| {
                    (g.a.0 == i && g.b.0 == j) || (g.a.0 == j && g.b.0 == i)
                })
                .expect("triangle gluing");
            let end = if g.a.0 == i { &g.a } else { &g.b };
            t[i] = self.side_square(end) + 1;
        }
        t
    }

    /// The index of the special (four-sided) component of a class-`T` state.
    pub fn special(&self) -> usize {
        assert_eq!(self.class, StateClass::T);
        self.gluings
            .iter()
            .find(|g| g.is_self())
            .expect("class T has a self-gluing")
            .a
            .0
    }

    /// Validate all component and gluing invariants.
    pub fn validate(&self) -> Result<(), String> {
        if self.comps.len() != 3 {
            return Err("state must have three components".into());
        }
        for (i, p) in self.comps.iter().enumerate() {
            p.validate().map_err(|e| format!("component {i}: {e}"))?;
        }
        let rank: usize = self.comps.iter().map(|p| p.rank()).sum();
        if rank != 24 {
            return Err(format!("component ranks sum to {rank}, not 24"));
        }
        if self.gluings.len() != 3 {
            return Err("state must have three gluings".into());
        }
        let mut used: Vec<(usize, &str)> = Vec::new();
        for g in &self.gluings {
            for end in g.ends() {
                if end.0 >= 3 {
                    return Err("gluing references a missing component".into());
                }
                if used.contains(&(end.0, end.1.as_str())) {
                    return Err(format!("side {} glued twice", end.1));
                }
                used.push((end.0, end.1.as_str()));
                self.comps[end.0].side(&end.1);
            }
            // Triple point formula: a gluing along a curve that is nodal on
            // one side carries its two triple points at the node.
            let nodal_ends = g
                .ends()
                .iter()
                .filter(|end| {
                    let nodes = &self.comps[end.0].side(&end.1).nodes;
                    nodes.len() == 2 && nodes[0] == nodes[1]
                })
                .count() as i64;
            if self.side_square(&g.a) + self.side_square(&g.b) != -2 + 2 * nodal_ends {
                return Err(format!(
                    "gluing {}-{} violates d-semistability",
                    g.a.1, g.b.1
                ));
            }
        }
        let sides: usize = self.comps.iter().map(|p| p.boundary.len()).sum();
        if sides != 6 {
            return Err(format!("{sides} boundary sides, expected 6"));
        }
        let selfs = self.gluings.iter().filter(|g| g.is_self()).count();
        match self.class {
            StateClass::P => {
                if selfs != 0 {
                    return Err("class P state with a self-gluing".into());
                }
                for p in &self.comps {
                    if p.boundary.len() != 2 {
                        return Err("class P component without two sides".into());
                    }
                }
            }
            StateClass::T => {
                if selfs != 1 {
                    return Err("class T state needs one self-gluing".into());
                }
                let k = self.special();
                if self.comps[k].boundary.len() != 4 {
                    return Err("special component must have four sides".into());
                }
                for (i, p) in self.comps.iter().enumerate() {
                    if i != k && p.boundary.len() != 1 {
                        return Err("smooth class T component must be nodal".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// All available type I flops. Self-glued sides never admit them.
    pub fn available_type_i(&self) -> Vec<FlopI> {
        let mut out = Vec::new();
        for (gi, g) in self.gluings.iter().enumerate() {
            if g.is_self() {
                continue;
            }
            for (donor_is_a, end) in [(true, &g.a), (false, &g.b)] {
                let p = &self.comps[end.0];
                for (id, c) in &p.curves {
                    if p.pairing(&c.class, &c.class) != -1 {
                        continue;
                    }
                    let ok = p.boundary.iter().all(|s| {
                        let want = if s.name == end.1 { 1 } else { 0 };
                        p.pairing(&c.class, &s.class) == want
                    });
                    if ok {
                        out.push(FlopI { gluing: gi, donor_is_a, curve: id.clone() });
                    }
                }
            }
        }
        out
    }

    /// Apply a type I flop.
    pub fn apply_type_i(&self, f: &FlopI) -> Result<State, String> {
        let mut st = self.clone();
        let g = &st.gluings[f.gluing];
        if g.is_self() {
            return Err("type I flops are blocked on self-glued sides".into());
        }
        let (donor, recv) = if f.donor_is_a {
            (g.a.clone(), g.b.clone())
        } else {
            (g.b.clone(), g.a.clone())
        };
        // Donor: contract the curve; its image lands at the anchor point of
        // the donor side.
        {
            let p = &mut st.comps[donor.0];
            let c = p
                .curves
                .get(&f.curve)
                .ok_or_else(|| format!("no curve {}", f.curve))?
                .class
                .clone();
            if p.pairing(&c, &c) != -1 {
                return Err(format!("{} is not a (-1)-curve", f.curve));
            }
            for s in &p.boundary {
                let want = if s.name == donor.1 { 1 } else { 0 };
                if p.pairing(&c, &s.class) != want {
                    return Err(format!("{} does not meet only the gluing side", f.curve));
                }
            }
            // The contraction maps every curve meeting C through the image
            // point with multiplicity equal to its pairing with C; this
            // replaces the previous anchor data of the side (the old contact
            // persists only as tangency, which the pairing itself records).
            let curve_cross: Vec<(String, Int)> = p
                .curves
                .iter()
                .filter(|(id, _)| **id != f.curve)
                .map(|(id, cv)| (id.clone(), p.pairing(&cv.class, &c)))
                .collect();
            let cross: Vec<Int> = p
                .latents
                .iter()
                .chain(p.retired.iter())
                .map(|w| p.pairing(&w.class, &c))
                .collect();
            let (lat, push) = p.lattice.blow_down(&c);
            p.curves.remove(&f.curve);
            for cv in p.curves.values_mut() {
                cv.class = push.push(&cv.class);
            }
            for s in p.boundary.iter_mut() {
                s.class = push.push(&s.class);
                if s.name == donor.1 {
                    s.anchor = curve_cross
                        .iter()
                        .filter(|(_, m)| *m > 0)
                        .cloned()
                        .collect();
                } else {
                    s.anchor.remove(&f.curve);
                }
            }
            p.canonical = push.push(&p.canonical);
            for (w, m) in p
                .latents
                .iter_mut()
                .chain(p.retired.iter_mut())
                .zip(cross)
            {
                w.class = push.push(&w.class);
                let old = w.contact.remove(&donor.1).unwrap_or(0);
                w.crossings.remove(&donor.1);
                if m > 0 {
                    w.crossings.insert(donor.1.clone(), m);
                    w.contact.insert(donor.1.clone(), old + m);
                } else if old > 0 {
                    return Err("latent stranded at a contraction point".into());
                }
            }
            p.lattice = lat;
        }
        // Receiver: blow up the anchor point of the receiving side; the new
        // exceptional is the flopped curve. Each resident loses its point
        // multiplicity; a smooth resident tangent to the side stays at the
        // new anchor point with multiplicity one.
        {
            let p = &mut st.comps[recv.0];
            let anchor = p.side(&recv.1).anchor.clone();
            let (lat, _, e) = p.lattice.blow_up(&[]);
            let tr = |x: &Class, m: Int| x.embedded().sub(&e.scaled(m));
            let mut new_anchor: BTreeMap<String, Int> = BTreeMap::new();
            for (id, cv) in p.curves.iter_mut() {
                let m = anchor.get(id).copied().unwrap_or(0);
                cv.class = tr(&cv.class, m);
            }
            for s in p.boundary.iter_mut() {
                let m = if s.name == recv.1 { 1 } else { 0 };
                s.class = tr(&s.class, m);
            }
            p.canonical = tr(&p.canonical, -1);
            for w in p.latents.iter_mut().chain(p.retired.iter_mut()) {
                let m = w.crossings.remove(&recv.1).unwrap_or(0);
                let c = w.contact.remove(&recv.1).unwrap_or(0);
                if m == 0 && c > 0 {
                    return Err("latent contact without multiplicity".into());
                }
                w.class = tr(&w.class, m);
                let residual = c - m;
                if residual > 0 {
                    if m != 1 {
                        return Err("ambiguous tangency at a blown-up point".into());
                    }
                    w.crossings.insert(recv.1.clone(), 1);
                    w.contact.insert(recv.1.clone(), residual);
                }
            }
            p.lattice = lat;
            // Residual contact of the former residents with the side.
            let side_class = p.side(&recv.1).class.clone();
            for (id, cv) in p.curves.iter() {
                let m = anchor.get(id).copied().unwrap_or(0);
                let residual = p.lattice.pairing(&cv.class, &side_class);
                if residual < 0 {
                    return Err(format!("curve {id} pairs negatively with the side"));
                }
                if residual > 0 {
                    if m == 0 {
                        return Err(format!("curve {id} meets the side off the anchor"));
                    }
                    if m != 1 {
                        return Err("ambiguous tangency at a blown-up point".into());
                    }
                    new_anchor.insert(id.clone(), 1);
                }
            }
            let id = fresh(&mut st.counter, "X");
            new_anchor.insert(id.clone(), 1);
            let p = &mut st.comps[recv.0];
            p.curves.insert(id, Curve { class: e, role: Role::Exceptional });
            for s in p.boundary.iter_mut() {
                if s.name == recv.1 {
                    s.anchor = new_anchor;
                    break;
                }
            }
        }
        Ok(st)
    }

    /// Gluings along which a type II flop is available: both sides square -1
    /// with a single transverse anchor curve on each non-self end.
    pub fn available_type_ii(&self) -> Vec<usize> {
        self.gluings
            .iter()
            .enumerate()
            .filter(|(_, g)| {
                self.side_square(&g.a) == -1
                    && self.side_square(&g.b) == -1
                    && g.ends().iter().all(|end| {
                        let p = &self.comps[end.0];
                        let s = p.side(&end.1);
                        match s.anchor.iter().collect::<Vec<_>>()[..] {
                            [(id, 1)] => {
                                p.pairing(&p.curves[id].class, &s.class) == 1
                            }
                            _ => false,
                        }
                    })
            })
            .map(|(gi, _)| gi)
            .collect()
    }

    /// Apply a type II flop along the given gluing.
    pub fn apply_type_ii(&self, gi: usize) -> Result<State, String> {
        if self.gluings[gi].is_self() {
            self.apply_type_ii_t()
        } else {
            self.apply_type_ii_p(gi)
        }
    }

    /// Contract a double curve between two distinct components; the third is
    /// blown up in both of its triple points and its boundary grows the
    /// self-glued pair. `P -> T`.
    fn apply_type_ii_p(&self, gi: usize) -> Result<State, String> {
        if self.class != StateClass::P {
            return Err("cross-component type II flop requires class P".into());
        }
        let mut st = self.clone();
        let g = st.gluings[gi].clone();
        let (i, j) = (g.a.0, g.b.0);
        let k = 3 - i - j;
        for end in g.ends() {
            let u = fresh(&mut st.counter, "u");
            demote_side(&mut st.comps[end.0], &end.1, &u)?;
        }
        let nodes: Vec<String> = st.comps[k].latents.iter().map(|v| v.node.clone()).collect();
        let [n1, n2] = &nodes[..] else {
            return Err("third component does not have two latent nodes".into())
        };
        let (n1, n2) = (n1.clone(), n2.clone());
        let s1 = blow_up_at_node(&mut st.comps[k], &n1, &mut st.counter)?;
        let s2 = blow_up_at_node(&mut st.comps[k], &n2, &mut st.counter)?;
        st.gluings.remove(gi);
        st.gluings.push(Gluing { a: (k, s1), b: (k, s2) });
        st.class = StateClass::T;
        for p in st.comps.iter_mut() {
            p.base = base_for_boundary(p.boundary.len());
        }
        Ok(st)
    }

    /// Contract the self-glued pair of the special component; the two nodal
    /// components are blown up in their nodes and glued along the fresh
    /// exceptionals. `T -> P`.
    fn apply_type_ii_t(&self) -> Result<State, String> {
        if self.class != StateClass::T {
            return Err("self-gluing type II flop requires class T".into());
        }
        let mut st = self.clone();
        let k = st.special();
        let g = st
            .gluings
            .iter()
            .position(|g| g.is_self())
            .expect("class T has a self-gluing");
        let sg = st.gluings[g].clone();
        for end in sg.ends() {
            let u = fresh(&mut st.counter, "u");
            demote_side(&mut st.comps[end.0], &end.1, &u)?;
        }
        let mut new_sides = Vec::new();
        for i in 0..3 {
            if i == k {
                continue;
            }
            let node = st.comps[i].latents[0].node.clone();
            let side = blow_up_at_node(&mut st.comps[i], &node, &mut st.counter)?;
            new_sides.push((i, side));
        }
        st.gluings.remove(g);
        let [a, b] = &new_sides[..] else { unreachable!() };
        st.gluings.push(Gluing { a: a.clone(), b: b.clone() });
        st.class = StateClass::P;
        for p in st.comps.iter_mut() {
            p.base = base_for_boundary(p.boundary.len());
        }
        Ok(st)
    }
}
