//! Anticanonical pairs: the three reference components and their invariants.
//!
//! Each component of a central fibre is a smooth rational surface together
//! with its boundary (the double locus), a distinguished set of tracked
//! interior curves, and bookkeeping for the curves through the triple points.
//! The three reference surfaces are produced by scripted blow-up sequences
//! from `P^2` and `P^1 x P^1`; no Gram matrix is entered by hand.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::lattice::{Class, Int, Lattice, QClass};
use crate::lp::{feasible_point, rat, Constraint, Rel};

/// Provenance of a tracked curve.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Role {
    /// A (-2)-curve of the defining root system at build time.
    Root,
    /// An exceptional (-1)-curve meeting the boundary at build time.
    Exceptional,
    /// A curve that joined the tracked set later (promoted through a flop).
    Interior,
}

/// A tracked interior curve.
#[derive(Clone, Debug)]
pub struct Curve {
    pub class: Class,
    pub role: Role,
}

/// One component of the boundary cycle, with its gluing bookkeeping.
#[derive(Clone, Debug)]
pub struct BoundarySide {
    pub name: String,
    pub class: Class,
    /// Which tracked curves meet this side, with multiplicities. The anchor
    /// accounts for *all* intersection of tracked curves with the side.
    pub anchor: BTreeMap<String, Int>,
    /// Triple-point slots on this side (a nodal side lists its node twice).
    pub nodes: Vec<String>,
}

/// Reference type of a component, determined by its boundary shape.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BaseTag {
    /// One nodal boundary component.
    Y1,
    /// Two smooth boundary components meeting twice.
    Y2,
    /// A cycle of four smooth boundary components.
    Y4,
}

/// A curve through a triple-point slot that is not part of the tracked set.
///
/// Besides its class we remember its point multiplicity at its home node and
/// its behaviour at the anchor points of the boundary sides (acquired when
/// flopped-out curves meeting it land there): `crossings` records the point
/// multiplicity at a side's anchor point, which is what a blow-up there
/// subtracts, and `contact` the local intersection number with the side at
/// that point, which exceeds the multiplicity when the curve is tangent to
/// the side.
#[derive(Clone, Debug)]
pub struct Latent {
    pub node: String,
    pub class: Class,
    pub node_mult: Int,
    pub crossings: BTreeMap<String, Int>,
    pub contact: BTreeMap<String, Int>,
}

impl Latent {
    pub fn new(node: &str, class: Class) -> Self {
        Latent {
            node: node.to_string(),
            class,
            node_mult: 1,
            crossings: BTreeMap::new(),
            contact: BTreeMap::new(),
        }
    }
}

/// An anticanonical pair: a component of the central fibre.
#[derive(Clone, Debug)]
pub struct Pair {
    pub lattice: Lattice,
    pub base: BaseTag,
    pub curves: BTreeMap<String, Curve>,
    pub boundary: Vec<BoundarySide>,
    /// The canonical class; the boundary sums to its negative.
    pub canonical: Class,
    /// Curves through the current triple-point slots (one per node).
    pub latents: Vec<Latent>,
    /// On a nodal component: the curves through the node that become the
    /// latents of the two-component boundary after a type II flop.
    pub retired: Vec<Latent>,
}

impl Pair {
    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn pairing(&self, a: &Class, b: &Class) -> Int {
        self.lattice.pairing(a, b)
    }

    pub fn curve_class(&self, id: &str) -> &Class {
        &self.curves.get(id).unwrap_or_else(|| panic!("no curve {id}")).class
    }

    pub fn side(&self, name: &str) -> &BoundarySide {
        self.boundary
            .iter()
            .find(|s| s.name == name)
            .unwrap_or_else(|| panic!("no boundary side {name}"))
    }

    /// Check every structural invariant. Returns a description of the first
    /// violation, if any.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.rank();
        if !self.lattice.is_unimodular() {
            return Err("lattice is not unimodular".into());
        }
        if self.lattice.signature() != (1, n - 1, 0) {
            return Err(format!("signature is not (1, {})", n - 1));
        }
        if self.curves.len() != n {
            return Err(format!("{} tracked curves in rank {}", self.curves.len(), n));
        }
        let classes: Vec<&Class> = self.curves.values().map(|c| &c.class).collect();
        let gram: Vec<Vec<Int>> = classes
            .iter()
            .map(|a| classes.iter().map(|b| self.pairing(a, b)).collect())
            .collect();
        if Lattice::new(gram).det() == 0 {
            return Err("tracked curves are not a basis of Pic ⊗ Q".into());
        }
        for (i, a) in classes.iter().enumerate() {
            for b in classes.iter().skip(i + 1) {
                if self.pairing(a, b) < 0 {
                    return Err("distinct tracked curves pair negatively".into());
                }
            }
        }
        let mut sum = Class::zero(n);
        for s in &self.boundary {
            sum = sum.add(&s.class);
        }
        if sum != self.canonical.scaled(-1) {
            return Err("boundary does not sum to -K".into());
        }
        for s in &self.boundary {
            // Tracked curves meet boundary sides only at the anchor points,
            // so a curve is anchored exactly when it pairs positively, with a
            // point multiplicity between 1 and the local intersection number.
            for (id, c) in &self.curves {
                let m = self.pairing(&c.class, &s.class);
                let a = s.anchor.get(id).copied().unwrap_or(0);
                if (m > 0) != (a > 0) || a > m || a < 0 {
                    return Err(format!(
                        "anchor of {id} on {} records {a} but pairing is {m}",
                        s.name
                    ));
                }
            }
            for id in s.anchor.keys() {
                if !self.curves.contains_key(id) {
                    return Err(format!("anchor {id} on {} is not a curve", s.name));
                }
            }
        }
        for w in self.latents.iter().chain(self.retired.iter()) {
            for (name, &m) in &w.crossings {
                let c = w.contact.get(name).copied().unwrap_or(0);
                if m < 1 || m > c {
                    return Err(format!(
                        "latent at {} has multiplicity {m} but contact {c} on {name}",
                        w.node
                    ));
                }
            }
            if w.contact.keys().any(|k| !w.crossings.contains_key(k)) {
                return Err(format!("latent at {} has contact without crossing", w.node));
            }
        }
        for (i, a) in self.boundary.iter().enumerate() {
            for b in self.boundary.iter().skip(i + 1) {
                let shared = a
                    .nodes
                    .iter()
                    .filter(|x| b.nodes.contains(x))
                    .count() as Int;
                if self.pairing(&a.class, &b.class) != shared {
                    return Err(format!(
                        "sides {} and {} pair to {} but share {} nodes",
                        a.name,
                        b.name,
                        self.pairing(&a.class, &b.class),
                        shared
                    ));
                }
            }
        }
        let (want_latents, want_retired) = match self.boundary.len() {
            1 => (1, 2),
            2 => (2, 0),
            4 => (0, 0),
            k => return Err(format!("unexpected boundary length {k}")),
        };
        if self.latents.len() != want_latents {
            return Err(format!("expected {want_latents} latent classes"));
        }
        if self.retired.len() != want_retired {
            return Err(format!("expected {want_retired} retired classes"));
        }
        Ok(())
    }
}

/// A working chart during a builder: a lattice with named divisor classes and
/// the canonical class, updated through blow-ups and blow-downs.
pub(crate) struct Chart {
    pub lattice: Lattice,
    pub classes: BTreeMap<String, Class>,
    pub k: Class,
}

impl Chart {
    pub fn new(gram: Vec<Vec<Int>>, named: &[(&str, Vec<Int>)], k: Vec<Int>) -> Self {
        let lattice = Lattice::new(gram);
        let classes = named
            .iter()
            .map(|(n, v)| (n.to_string(), Class(v.clone())))
            .collect();
        Chart { lattice, classes, k: Class(k) }
    }

    pub fn cls(&self, name: &str) -> Class {
        self.classes
            .get(name)
            .unwrap_or_else(|| panic!("no chart class {name}"))
            .clone()
    }

    /// Blow up a point lying on the listed classes with the given
    /// multiplicities; all named classes become their transforms and the
    /// exceptional joins under `e_name`.
    pub fn blow_up(&mut self, through: &[(&str, Int)], e_name: &str) {
        let listed: Vec<(Class, Int)> = through
            .iter()
            .map(|(n, m)| (self.cls(n), *m))
            .collect();
        let (lat, transforms, e) = self.lattice.blow_up(&listed);
        for c in self.classes.values_mut() {
            *c = c.embedded();
        }
        for ((name, _), t) in through.iter().zip(transforms) {
            self.classes.insert(name.to_string(), t);
        }
        let prev = self.classes.insert(e_name.to_string(), e.clone());
        assert!(prev.is_none(), "chart name {e_name} reused");
        self.k = self.k.embedded().add(&e);
        self.lattice = lat;
    }

    /// Contract the named (-1)-class; every other class and K push forward.
    pub fn blow_down(&mut self, name: &str) {
        let e = self.cls(name);
        let (lat, push) = self.lattice.blow_down(&e);
        self.classes.remove(name);
        for c in self.classes.values_mut() {
            *c = push.push(c);
        }
        self.k = push.push(&self.k);
        self.lattice = lat;
    }
}

fn side(name: &str, class: Class, anchor: &[(&str, Int)], nodes: &[&str]) -> BoundarySide {
    BoundarySide {
        name: name.to_string(),
        class,
        anchor: anchor.iter().map(|(n, m)| (n.to_string(), *m)).collect(),
        nodes: nodes.iter().map(|s| s.to_string()).collect(),
    }
}

fn curve(chart: &Chart, pair: &mut BTreeMap<String, Curve>, id: &str, from: &str, role: Role) {
    pair.insert(id.to_string(), Curve { class: chart.cls(from), role });
}

/// The two-boundary reference pair: `P^2` blown up in two (3)-towers and one
/// (2)-tower over three collinear points on the toric lines, with the third
/// line contracted. Its roots form an E6 diagram.
pub fn build_y2() -> Pair {
    let mut ch = Chart::new(
        vec![vec![1]],
        &[
            ("Lx", vec![1]),
            ("Ly", vec![1]),
            ("Lz", vec![1]),
            ("M", vec![1]),
            ("N2", vec![1]),
        ],
        vec![-3],
    );
    // Towers over p on Lx and q on Ly: each step blows up the intersection of
    // the last exceptional with the strict transform of the line.
    ch.blow_up(&[("Lx", 1), ("M", 1)], "Ep1");
    ch.blow_up(&[("Lx", 1), ("Ep1", 1)], "Ep2");
    ch.blow_up(&[("Lx", 1), ("Ep2", 1)], "Ep3");
    ch.blow_up(&[("Ly", 1), ("M", 1)], "Eq1");
    ch.blow_up(&[("Ly", 1), ("Eq1", 1)], "Eq2");
    ch.blow_up(&[("Ly", 1), ("Eq2", 1)], "Eq3");
    // Short tower over r on Lz; N2 is the line through r and the corner
    // Lx ∩ Ly, transverse to Lz.
    ch.blow_up(&[("Lz", 1), ("M", 1), ("N2", 1)], "Er1");
    ch.blow_up(&[("Lz", 1), ("Er1", 1)], "Er2");
    // The strict transform of Lz is a (-1)-curve; contract it.
    ch.blow_down("Lz");

    let mut curves = BTreeMap::new();
    curve(&ch, &mut curves, "M", "M", Role::Root);
    curve(&ch, &mut curves, "P1", "Ep1", Role::Root);
    curve(&ch, &mut curves, "P2", "Ep2", Role::Root);
    curve(&ch, &mut curves, "Q1", "Eq1", Role::Root);
    curve(&ch, &mut curves, "Q2", "Eq2", Role::Root);
    curve(&ch, &mut curves, "R", "Er1", Role::Root);
    curve(&ch, &mut curves, "E1", "Ep3", Role::Exceptional);
    curve(&ch, &mut curves, "E2", "Eq3", Role::Exceptional);
    let boundary = vec![
        side("D1", ch.cls("Lx"), &[("E1", 1)], &["t1", "t2"]),
        side("D2", ch.cls("Ly"), &[("E2", 1)], &["t1", "t2"]),
    ];
    let latents = vec![
        // The curve through the node t1 (the image of the contracted line)
        // and through t2 (the surviving corner of the boundary).
        Latent::new("t1", ch.cls("Er2")),
        Latent::new("t2", ch.cls("N2")),
    ];
    Pair {
        lattice: ch.lattice,
        base: BaseTag::Y2,
        curves,
        boundary,
        canonical: ch.k,
        latents,
        retired: vec![],
    }
}

/// The nodal-boundary reference pair: `P^1 x P^1` blown up in towers of
/// lengths (1, 5, 1, 3) over four points of the toric boundary, two fibres
/// and one boundary strand contracted. Its roots form an E8 diagram.
pub fn build_y1() -> Pair {
    let mut ch = Chart::new(
        vec![vec![0, 1], vec![1, 0]],
        &[
            ("D1t", vec![1, 0]),
            ("D3t", vec![1, 0]),
            ("D2t", vec![0, 1]),
            ("D4t", vec![0, 1]),
            ("F13", vec![0, 1]),
            ("F24", vec![1, 0]),
        ],
        vec![-2, -2],
    );
    // p1 on D1 and p3 on D3 share the fibre F13; p2 on D2 and p4 on D4 share
    // F24.
    ch.blow_up(&[("D1t", 1), ("F13", 1)], "E1");
    ch.blow_up(&[("D3t", 1), ("F13", 1)], "E3");
    ch.blow_up(&[("D2t", 1), ("F24", 1)], "E21");
    ch.blow_up(&[("D2t", 1), ("E21", 1)], "E22");
    ch.blow_up(&[("D2t", 1), ("E22", 1)], "E23");
    ch.blow_up(&[("D2t", 1), ("E23", 1)], "E24");
    ch.blow_up(&[("D2t", 1), ("E24", 1)], "E25");
    ch.blow_up(&[("D4t", 1), ("F24", 1)], "E41");
    ch.blow_up(&[("D4t", 1), ("E41", 1)], "E42");
    ch.blow_up(&[("D4t", 1), ("E42", 1)], "E43");
    // Contract the strict transforms of the two fibres through p1 and p3 and
    // of the fourth boundary strand; the remaining strand becomes nodal.
    ch.blow_down("D1t");
    ch.blow_down("D3t");
    ch.blow_down("D4t");

    let mut curves = BTreeMap::new();
    curve(&ch, &mut curves, "F24", "F24", Role::Root);
    curve(&ch, &mut curves, "F13", "F13", Role::Root);
    curve(&ch, &mut curves, "C21", "E21", Role::Root);
    curve(&ch, &mut curves, "C22", "E22", Role::Root);
    curve(&ch, &mut curves, "C23", "E23", Role::Root);
    curve(&ch, &mut curves, "C24", "E24", Role::Root);
    curve(&ch, &mut curves, "C41", "E41", Role::Root);
    curve(&ch, &mut curves, "C42", "E42", Role::Root);
    curve(&ch, &mut curves, "E", "E25", Role::Exceptional);
    let boundary = vec![side("D", ch.cls("D2t"), &[("E", 1)], &["u", "u"])];
    let latents = vec![Latent::new("u", ch.cls("E43"))];
    // The images of the contracted fibres pass through the node with square
    // 1; they become the latents of a two-component boundary under a type II
    // flop.
    let retired = vec![Latent::new("u", ch.cls("E1")), Latent::new("u", ch.cls("E3"))];
    Pair {
        lattice: ch.lattice,
        base: BaseTag::Y1,
        curves,
        boundary,
        canonical: ch.k,
        latents,
        retired,
    }
}

/// The cyclic-boundary reference pair: `P^1 x P^1` blown up once on each
/// toric boundary strand, the four points pairwise on two common fibres. Its
/// roots form an A2 diagram (the two fibre classes).
pub fn build_y4() -> Pair {
    let mut ch = Chart::new(
        vec![vec![0, 1], vec![1, 0]],
        &[
            ("D1t", vec![1, 0]),
            ("D3t", vec![1, 0]),
            ("D2t", vec![0, 1]),
            ("D4t", vec![0, 1]),
            ("F13", vec![0, 1]),
            ("F24", vec![1, 0]),
        ],
        vec![-2, -2],
    );
    ch.blow_up(&[("D1t", 1), ("F13", 1)], "E1");
    ch.blow_up(&[("D2t", 1), ("F24", 1)], "E2");
    ch.blow_up(&[("D3t", 1), ("F13", 1)], "E3");
    ch.blow_up(&[("D4t", 1), ("F24", 1)], "E4");

    let mut curves = BTreeMap::new();
    curve(&ch, &mut curves, "R1", "F13", Role::Root);
    curve(&ch, &mut curves, "R2", "F24", Role::Root);
    curve(&ch, &mut curves, "E1", "E1", Role::Exceptional);
    curve(&ch, &mut curves, "E2", "E2", Role::Exceptional);
    curve(&ch, &mut curves, "E3", "E3", Role::Exceptional);
    curve(&ch, &mut curves, "E4", "E4", Role::Exceptional);
    let boundary = vec![
        side("D1", ch.cls("D1t"), &[("E1", 1)], &["n41", "n12"]),
        side("D2", ch.cls("D2t"), &[("E2", 1)], &["n12", "n23"]),
        side("D3", ch.cls("D3t"), &[("E3", 1)], &["n23", "n34"]),
        side("D4", ch.cls("D4t"), &[("E4", 1)], &["n34", "n41"]),
    ];
    Pair {
        lattice: ch.lattice,
        base: BaseTag::Y4,
        curves,
        boundary,
        canonical: ch.k,
        latents: vec![],
        retired: vec![],
    }
}

/// Dynkin type of a set of (-2)-classes, as a string like "A2", "E6", "E8".
/// Returns `None` if the classes do not form a simply laced tree.
pub fn dynkin_type(lat: &Lattice, roots: &[Class]) -> Option<String> {
    let n = roots.len();
    if n == 0 {
        return None;
    }
    let mut adj = vec![vec![]; n];
    let mut edges = 0;
    for i in 0..n {
        if lat.pairing(&roots[i], &roots[i]) != -2 {
            return None;
        }
        for j in i + 1..n {
            match lat.pairing(&roots[i], &roots[j]) {
                0 => {}
                1 => {
                    adj[i].push(j);
                    adj[j].push(i);
                    edges += 1;
                }
                _ => return None,
            }
        }
    }
    // Connected tree?
    if edges != n - 1 {
        return None;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        return None;
    }
    let forks: Vec<usize> = (0..n).filter(|&v| adj[v].len() >= 3).collect();
    match forks.len() {
        0 => Some(format!("A{n}")),
        1 => {
            let f = forks[0];
            if adj[f].len() != 3 {
                return None;
            }
            let mut lens: Vec<usize> = adj[f]
                .iter()
                .map(|&s| {
                    let (mut prev, mut cur, mut len) = (f, s, 1);
                    loop {
                        let next: Vec<usize> =
                            adj[cur].iter().copied().filter(|&x| x != prev).collect();
                        match next[..] {
                            [] => break len,
                            [x] => {
                                prev = cur;
                                cur = x;
                                len += 1;
                            }
                            _ => break usize::MAX,
                        }
                    }
                })
                .collect();
            if lens.contains(&usize::MAX) {
                return None;
            }
            lens.sort_unstable();
            match (lens[0], lens[1], lens[2]) {
                (1, 1, _) => Some(format!("D{n}")),
                (1, 2, 2) => Some("E6".into()),
                (1, 2, 3) => Some("E7".into()),
                (1, 2, 4) => Some("E8".into()),
                _ => None,
            }
        }
        _ => None,
    }
}

/// An explicit ample class for a reference pair, as a rational class.
///
/// The two- and four-boundary pairs use fixed positive combinations of their
/// tracked curves; the nodal pair derives one by exact linear programming
/// (deterministic). The result is verified by pairing before it is returned.
pub fn paper_ample_certificate(pair: &Pair) -> QClass {
    let n = pair.rank();
    let combo = |terms: &[(&str, Int)]| -> QClass {
        let mut acc = Class::zero(n);
        for (id, m) in terms {
            acc = acc.add(&pair.curve_class(id).scaled(*m));
        }
        acc.to_q()
    };
    let a: QClass = match pair.base {
        BaseTag::Y2 => combo(&[
            ("M", 16),
            ("P1", 13),
            ("P2", 11),
            ("Q1", 13),
            ("Q2", 11),
            ("R", 7),
            ("E1", 10),
            ("E2", 10),
        ]),
        BaseTag::Y4 => combo(&[
            ("R1", 3),
            ("R2", 3),
            ("E1", 2),
            ("E2", 2),
            ("E3", 2),
            ("E4", 2),
        ]),
        BaseTag::Y1 => {
            // Solve for positive degrees on every curve and the boundary over
            // the curve basis.
            let ids: Vec<&String> = pair.curves.keys().collect();
            let mut cons = Vec::new();
            let mut targets: Vec<Class> =
                pair.curves.values().map(|c| c.class.clone()).collect();
            targets.extend(pair.boundary.iter().map(|s| s.class.clone()));
            for t in &targets {
                cons.push(Constraint {
                    coeffs: ids
                        .iter()
                        .map(|id| rat(pair.pairing(pair.curve_class(id), t)))
                        .collect(),
                    rel: Rel::Ge,
                    rhs: rat(1),
                });
            }
            let x = feasible_point(ids.len(), &cons)
                .expect("the nodal reference pair admits an ample class");
            let mut acc = vec![BigRational::zero(); n];
            for (id, xi) in ids.iter().zip(&x) {
                for (k, c) in pair.curve_class(id).to_q().iter().enumerate() {
                    acc[k] += xi * c;
                }
            }
            acc
        }
    };
    assert!(certificate_is_positive(pair, &a), "certificate fails positivity");
    a
}

/// Strict positivity of a rational class against every tracked curve and
/// every boundary side.
pub fn certificate_is_positive(pair: &Pair, a: &QClass) -> bool {
    pair.curves
        .values()
        .all(|c| pair.lattice.q_pairing_int(a, &c.class) > BigRational::zero())
        && pair
            .boundary
            .iter()
            .all(|s| pair.lattice.q_pairing_int(a, &s.class) > BigRational::zero())
}
