//! Projectivity of central fibre states, decided three independent ways:
//! combinatorial criteria on the curve structures, explicit constructed
//! ample divisors with prescribed boundary degrees, and an exact rational
//! feasibility oracle. Agreement of the three is a core correctness check.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::curve::{classify, extract, Classification, CurveGraph};
use crate::lattice::{Int, QClass};
use crate::lp::{feasible_point, rat, Constraint, Rel};
use crate::pairs::Pair;
use crate::state::{Gluing, State, StateClass};

/// Regularity pattern of a component's curve structure.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Status {
    NonDegenerate,
    DegenerateRegular,
    NonRegular,
}

pub fn component_status(c: &Classification) -> Status {
    if !c.degenerate {
        Status::NonDegenerate
    } else if c.regular {
        Status::DegenerateRegular
    } else {
        Status::NonRegular
    }
}

/// Target boundary degrees for a constructed ample divisor on a two-sided
/// component.
#[derive(Clone, Debug)]
pub struct DegreeSpec {
    pub a: (String, BigRational),
    pub b: (String, BigRational),
}

/// An ample class on a state: per-component rational coefficients over the
/// tracked-curve basis, plus the least positivity margin as a witness.
#[derive(Clone, Debug)]
pub struct AmpleCertificate {
    pub coeffs: Vec<BTreeMap<String, BigRational>>,
    pub witness: BigRational,
}

fn qzero() -> BigRational {
    BigRational::zero()
}

fn ambient(p: &Pair, f: &BTreeMap<String, BigRational>) -> QClass {
    let mut acc = vec![qzero(); p.rank()];
    for (id, c) in f {
        for (k, x) in p.curve_class(id).to_q().iter().enumerate() {
            acc[k] += c * x;
        }
    }
    acc
}

/// Solve `a x = b` exactly by Gaussian elimination; `None` if singular.
fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        b[col] /= &p;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..n {
                    let s = &f * &a[col][k];
                    a[r][k] -= s;
                }
                let s = &f * &b[col];
                b[r] -= s;
            }
        }
    }
    Some(b)
}

/// Express an ambient rational class in coefficients over the tracked-curve
/// basis of the component.
fn basis_coefficients(p: &Pair, target: &QClass) -> BTreeMap<String, BigRational> {
    let ids: Vec<&String> = p.curves.keys().collect();
    let gram: Vec<Vec<BigRational>> = ids
        .iter()
        .map(|a| {
            ids.iter()
                .map(|b| rat(p.pairing(p.curve_class(a), p.curve_class(b))))
                .collect()
        })
        .collect();
    let rhs: Vec<BigRational> = ids
        .iter()
        .map(|id| p.lattice.q_pairing_int(target, p.curve_class(id)))
        .collect();
    let x = solve_exact(gram, rhs).expect("tracked curves form a rational basis");
    ids.into_iter().cloned().zip(x).collect()
}

/// The classes a certificate must pair positively with on one component:
/// every tracked curve and boundary side, extended by the square-zero
/// provenance classes on components of small rank.
fn positivity_targets(p: &Pair) -> Vec<crate::lattice::Class> {
    let mut out: Vec<crate::lattice::Class> =
        p.curves.values().map(|c| c.class.clone()).collect();
    out.extend(p.boundary.iter().map(|s| s.class.clone()));
    if p.rank() <= 2 {
        for w in p.latents.iter().chain(p.retired.iter()) {
            if p.pairing(&w.class, &w.class) == 0 {
                out.push(w.class.clone());
            }
        }
    }
    out
}

/// Check the certificate invariants: strict positivity on every generator of
/// every component and equal degrees across each gluing. Returns the least
/// positivity margin.
fn certificate_margin(
    state: &State,
    coeffs: &[BTreeMap<String, BigRational>],
) -> Result<BigRational, String> {
    let amb: Vec<QClass> = state
        .comps
        .iter()
        .zip(coeffs)
        .map(|(p, f)| ambient(p, f))
        .collect();
    let mut margin: Option<BigRational> = None;
    for (p, a) in state.comps.iter().zip(&amb) {
        for t in positivity_targets(p) {
            let d = p.lattice.q_pairing_int(a, &t);
            if margin.as_ref().map_or(true, |m| d < *m) {
                margin = Some(d);
            }
        }
    }
    for g in &state.gluings {
        let deg = |end: &(usize, String)| {
            let p = &state.comps[end.0];
            p.lattice.q_pairing_int(&amb[end.0], &p.side(&end.1).class)
        };
        if deg(&g.a) != deg(&g.b) {
            return Err(format!("unequal degrees across gluing {}-{}", g.a.1, g.b.1));
        }
    }
    Ok(margin.expect("state has generators"))
}

fn make_certificate(
    state: &State,
    coeffs: Vec<BTreeMap<String, BigRational>>,
) -> Option<AmpleCertificate> {
    let witness = certificate_margin(state, &coeffs).ok()?;
    if witness <= qzero() {
        return None;
    }
    Some(AmpleCertificate { coeffs, witness })
}

/// Verify a certificate against a state: positivity at or above the recorded
/// witness and degree matching across all gluings.
pub fn verify_certificate(state: &State, cert: &AmpleCertificate) -> Result<(), String> {
    if cert.witness <= qzero() {
        return Err("witness is not positive".into());
    }
    let margin = certificate_margin(state, &cert.coeffs)?;
    if margin < cert.witness {
        return Err(format!("margin {margin} below witness {}", cert.witness));
    }
    Ok(())
}

/// Projectivity of a class `T` state: both preimages of the self-glued curve
/// on the special component square to -1.
pub fn criterion_t(state: &State) -> Result<bool, String> {
    if state.class != StateClass::T {
        return Err("criterion_t requires a class T state".into());
    }
    let g = state
        .gluings
        .iter()
        .find(|g| g.is_self())
        .expect("class T has a self-gluing");
    Ok(state.side_square(&g.a) == -1 && state.side_square(&g.b) == -1)
}

fn cross_gluing<'a>(state: &'a State, i: usize, j: usize) -> &'a Gluing {
    state
        .gluings
        .iter()
        .find(|g| (g.a.0 == i && g.b.0 == j) || (g.a.0 == j && g.b.0 == i))
        .unwrap_or_else(|| panic!("no gluing between components {i} and {j}"))
}

fn side_toward(state: &State, i: usize, j: usize) -> String {
    let g = cross_gluing(state, i, j);
    if g.a.0 == i { g.a.1.clone() } else { g.b.1.clone() }
}

fn d_square(state: &State, i: usize, j: usize) -> Int {
    state.side_square(&(i, side_toward(state, i, j)))
}

/// Total boundary degree of the curve structure of component `i` on its side
/// toward component `j`.
fn structure_side_degree(state: &State, views: &[(CurveGraph, Classification)], i: usize, j: usize) -> Int {
    let name = side_toward(state, i, j);
    let idx = state.comps[i]
        .boundary
        .iter()
        .position(|s| s.name == name)
        .expect("side exists");
    let g = &views[i].0;
    (0..g.len()).map(|v| g.bdeg[v][idx]).sum()
}

fn component_views(state: &State) -> Result<Vec<(CurveGraph, Classification)>, String> {
    state
        .comps
        .iter()
        .map(|p| {
            let g = extract(p)?;
            let c = classify(&g);
            Ok((g, c))
        })
        .collect()
}

/// Projectivity of a class `P` state by exact case dispatch over the
/// regularity patterns of the three curve structures.
pub fn criterion_p(state: &State) -> Result<bool, String> {
    if state.class != StateClass::P {
        return Err("criterion_p requires a class P state".into());
    }
    let views = component_views(state)?;
    let status: Vec<Status> = views.iter().map(|(_, c)| component_status(c)).collect();
    if status.iter().all(|&s| s != Status::NonDegenerate) {
        // All three structures are degenerate.
        return Ok(false);
    }
    if status.iter().all(|&s| s != Status::NonRegular) {
        // Some structure is non-degenerate and all are regular.
        return Ok(true);
    }
    let nd: Vec<usize> = (0..3).filter(|&i| status[i] == Status::NonDegenerate).collect();
    let dr: Vec<usize> = (0..3).filter(|&i| status[i] == Status::DegenerateRegular).collect();
    let nr: Vec<usize> = (0..3).filter(|&i| status[i] == Status::NonRegular).collect();
    match (nd.len(), dr.len(), nr.len()) {
        // One non-regular structure flanked by two non-degenerate ones: the
        // non-regular component has a boundary side of structure degree two,
        // so after relabelling the criterion applies with verdict projective.
        (2, 0, 1) => {
            let y1 = nr[0];
            let degs: Vec<Int> = nd
                .iter()
                .map(|&j| structure_side_degree(state, &views, y1, j))
                .collect();
            if degs.contains(&2) {
                Ok(true)
            } else {
                Err(format!(
                    "uncovered case: non-regular component with side degrees {degs:?}"
                ))
            }
        }
        // Non-degenerate, non-regular, degenerate-regular.
        (1, 1, 1) => {
            let (y1, y2, y3) = (nd[0], nr[0], dr[0]);
            match structure_side_degree(state, &views, y2, y1) {
                1 => Ok(d_square(state, y1, y2) <= 0),
                2 => Ok(d_square(state, y1, y3) <= 0),
                d => Err(format!("uncovered case: v.D = {d} on a non-regular side")),
            }
        }
        // One non-degenerate structure and two non-regular ones.
        (1, 0, 2) => {
            let y1 = nd[0];
            let (y2, y3) = (nr[0], nr[1]);
            let d2 = structure_side_degree(state, &views, y2, y1);
            let d3 = structure_side_degree(state, &views, y3, y1);
            match (d2, d3) {
                (2, 2) => Ok(true),
                (1, 2) => Ok(d_square(state, y1, y2) <= 0),
                (2, 1) => Ok(d_square(state, y1, y3) <= 0),
                _ => Err(format!(
                    "uncovered case: non-regular side degrees ({d2}, {d3})"
                )),
            }
        }
        _ => Err("uncovered case: unexpected status pattern".into()),
    }
}

/// Projectivity by the criterion matching the state's class.
pub fn decide(state: &State) -> Result<bool, String> {
    match state.class {
        StateClass::P => criterion_p(state),
        StateClass::T => criterion_t(state),
    }
}

/// Numerical reformulation of non-degeneracy: a structure is non-degenerate
/// exactly when both boundary squares of its component are at most one.
/// Checked per component; used as a cross-validation property.
pub fn remark_squares_consistent(state: &State) -> Result<bool, String> {
    if state.class != StateClass::P {
        return Err("the reformulation concerns class P states".into());
    }
    let views = component_views(state)?;
    for (p, (_, c)) in state.comps.iter().zip(&views) {
        let small = p
            .boundary
            .iter()
            .all(|s| p.pairing(&s.class, &s.class) <= 1);
        if small != !c.degenerate {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Constructed ample divisors with prescribed boundary degrees.
// ---------------------------------------------------------------------------

/// The non-degenerate shape: two legs meeting in a fork, one extra vertex.
struct NdShape {
    legs: [Vec<usize>; 2],
    y: usize,
    /// Boundary side index met by each leg's exceptional vertex.
    side_of: [usize; 2],
}

fn single_side(g: &CurveGraph, v: usize) -> Option<usize> {
    let met: Vec<usize> = (0..g.side_nodal.len())
        .filter(|&s| g.bdeg[v][s] != 0)
        .collect();
    match met[..] {
        [s] => Some(s),
        _ => None,
    }
}

fn nd_shape(g: &CurveGraph, cls: &Classification) -> Option<NdShape> {
    let [l1, l2] = &cls.legs[..] else { return None };
    let (p1, p2) = (l1.path.clone(), l2.path.clone());
    let c = *p1.last()?;
    if *p2.last()? != c {
        return None;
    }
    let mut seen = vec![0usize; g.len()];
    for &v in p1.iter().chain(p2.iter()) {
        seen[v] += 1;
    }
    if seen[c] != 2 {
        return None;
    }
    seen[c] = 1;
    if seen.iter().any(|&x| x > 1) {
        return None;
    }
    let rest: Vec<usize> = (0..g.len()).filter(|&v| seen[v] == 0).collect();
    let [y] = rest[..] else { return None };
    let s1 = single_side(g, p1[0])?;
    let s2 = single_side(g, p2[0])?;
    if s1 == s2 {
        return None;
    }
    Some(NdShape { legs: [p1, p2], y, side_of: [s1, s2] })
}

fn half(x: &BigRational) -> BigRational {
    x / rat(2)
}

fn tri(i: usize) -> BigRational {
    rat((i as i64) * (i as i64 + 1) / 2)
}

/// The direct non-degenerate construction: degree `deg[k]` on the side met
/// by leg `k`, achieved by strictly increasing leg coefficients.
fn nd_plain(g: &CurveGraph, shape: &NdShape, deg: [&BigRational; 2]) -> BTreeMap<String, BigRational> {
    let mut f: BTreeMap<String, BigRational> = BTreeMap::new();
    let e = deg[0].min(deg[1]).clone();
    let mut leg_tops = Vec::new();
    let mut leg_lens = Vec::new();
    for (k, path) in shape.legs.iter().enumerate() {
        // Interior leg vertices; the shared fork is set afterwards.
        let n = path.len() - 2;
        for (i, &v) in path[..path.len() - 1].iter().enumerate() {
            f.insert(g.ids[v].clone(), deg[k] + tri(i));
        }
        leg_tops.push(deg[k] + tri(n));
        leg_lens.push(n);
    }
    let fork = *shape.legs[0].last().unwrap();
    let span = rat(*leg_lens.iter().max().unwrap() as i64 + 1);
    f.insert(
        g.ids[fork].clone(),
        leg_tops.iter().max().unwrap().clone() + span,
    );
    f.insert(g.ids[shape.y].clone(), half(&e) - rat(1));
    f
}

/// The steep non-degenerate construction for a square-one low side whose leg
/// is a single exceptional vertex: degrees `(da, db)` with `db` up to just
/// short of twice `da`.
fn nd_steep(
    g: &CurveGraph,
    shape: &NdShape,
    low_leg: usize,
    da: &BigRational,
    db: &BigRational,
) -> Option<BTreeMap<String, BigRational>> {
    let short = &shape.legs[low_leg];
    if short.len() != 2 {
        return None;
    }
    let long = &shape.legs[1 - low_leg];
    let n = long.len() - 2;
    let k = db - half(&(rat(3) * da));
    if k < qzero() {
        return None;
    }
    let mut f = BTreeMap::new();
    f.insert(g.ids[short[0]].clone(), da.clone());
    for (i, &v) in long[..long.len() - 1].iter().enumerate() {
        f.insert(g.ids[v].clone(), half(&(rat(3) * da)) + &k + tri(i));
    }
    let fork = *long.last().unwrap();
    f.insert(
        g.ids[fork].clone(),
        half(&(rat(3) * da)) + &k + tri(n) + rat(n as i64 + 1),
    );
    f.insert(
        g.ids[shape.y].clone(),
        half(da) + tri(n) + rat(2 * n as i64 + 3) + &k,
    );
    Some(f)
}

/// The rigid degree offset of a degenerate structure, with the index of its
/// low boundary side: a degenerate-regular structure carries degrees
/// `(e, e + m)`, a non-regular one `(e, 2e + m)`.
fn rigid_offset(g: &CurveGraph, cls: &Classification) -> Option<(usize, Int)> {
    match component_status(cls) {
        Status::NonDegenerate => None,
        Status::DegenerateRegular => {
            let [l] = &cls.legs[..] else { return None };
            let low = single_side(g, l.path[0])?;
            let n = l.path.len() - 1;
            let mut rest: Vec<usize> = (0..g.len()).filter(|v| !l.path.contains(v)).collect();
            let [w] = rest.drain(..).collect::<Vec<_>>()[..] else { return None };
            let high = 1 - low;
            let m = g.bdeg[w][high] * (n as Int + 1) + (n as Int) * (n as Int + 1) / 2;
            (m > 0).then_some((low, m))
        }
        Status::NonRegular => {
            if g.len() == 1 {
                let low = (0..2).find(|&s| g.bdeg[0][s] == 1)?;
                if g.bdeg[0][1 - low] != 2 {
                    return None;
                }
                Some((low, 0))
            } else {
                let [l] = &cls.legs[..] else { return None };
                if l.path.len() != g.len() {
                    return None;
                }
                let low = single_side(g, l.path[0])?;
                let n = l.path.len() as Int - 1;
                Some((low, n * (n + 1)))
            }
        }
    }
}

/// The degenerate-regular construction: degrees exactly `(e, e + m)`.
fn dr_map(g: &CurveGraph, cls: &Classification, e: &BigRational) -> Option<BTreeMap<String, BigRational>> {
    let [l] = &cls.legs[..] else { return None };
    let n = l.path.len() - 1;
    let rest: Vec<usize> = (0..g.len()).filter(|v| !l.path.contains(v)).collect();
    let [w] = rest[..] else { return None };
    let mut f = BTreeMap::new();
    for (i, &v) in l.path.iter().enumerate() {
        f.insert(g.ids[v].clone(), e + tri(i));
    }
    f.insert(g.ids[w].clone(), rat(n as i64 + 1));
    Some(f)
}

/// The non-regular construction: degrees `(e, 2e + m + 2t)` for any rational
/// slack `t >= 0` added on the square-zero leg end (a nef class).
fn nr_map(
    g: &CurveGraph,
    cls: &Classification,
    e: &BigRational,
    t: &BigRational,
) -> Option<BTreeMap<String, BigRational>> {
    if g.len() == 1 {
        if !t.is_zero() {
            return None;
        }
        return Some(BTreeMap::from([(g.ids[0].clone(), e.clone())]));
    }
    let [l] = &cls.legs[..] else { return None };
    if l.path.len() != g.len() {
        return None;
    }
    let mut f = BTreeMap::new();
    for (i, &v) in l.path.iter().enumerate() {
        f.insert(g.ids[v].clone(), e + tri(i));
    }
    let end = *l.path.last().unwrap();
    if g.square[end] != 0 {
        return None;
    }
    *f.get_mut(&g.ids[end]).unwrap() += t;
    Some(f)
}

/// Exact coefficients for a structure without exceptional vertex: impose the
/// two degree equations and strict positivity on every tracked curve.
fn legless_map(p: &Pair, targets: &[(String, BigRational)]) -> Option<BTreeMap<String, BigRational>> {
    let ids: Vec<&String> = p.curves.keys().collect();
    let mut cons: Vec<Constraint> = Vec::new();
    for t in positivity_targets(p) {
        cons.push(Constraint {
            coeffs: ids
                .iter()
                .map(|id| rat(p.pairing(p.curve_class(id), &t)))
                .collect(),
            rel: Rel::Ge,
            rhs: rat(1),
        });
    }
    for (name, d) in targets {
        cons.push(Constraint {
            coeffs: ids
                .iter()
                .map(|id| rat(p.pairing(p.curve_class(id), &p.side(name).class)))
                .collect(),
            rel: Rel::Eq,
            rhs: d.clone(),
        });
    }
    let x = feasible_point(ids.len(), &cons)?;
    Some(ids.into_iter().cloned().zip(x).collect())
}

fn side_index(p: &Pair, name: &str) -> usize {
    p.boundary
        .iter()
        .position(|s| s.name == name)
        .unwrap_or_else(|| panic!("no boundary side {name}"))
}

fn check_construction(
    p: &Pair,
    f: &BTreeMap<String, BigRational>,
    targets: &[(String, BigRational)],
) -> bool {
    let a = ambient(p, f);
    for t in positivity_targets(p) {
        if p.lattice.q_pairing_int(&a, &t) <= qzero() {
            return false;
        }
    }
    targets.iter().all(|(name, d)| {
        p.lattice.q_pairing_int(&a, &p.side(name).class) == *d
    })
}

/// Construct an ample coefficient map over the curve structure with the
/// prescribed boundary degrees, dispatching on the structure's shape. The
/// result is verified strictly positive and of exact degree before it is
/// returned; `None` if the hypotheses of every construction fail.
pub fn construct_ample(
    p: &Pair,
    spec: &DegreeSpec,
) -> Option<BTreeMap<String, BigRational>> {
    if p.boundary.len() != 2 {
        return None;
    }
    let g = extract(p).ok()?;
    let cls = classify(&g);
    let targets = [spec.a.clone(), spec.b.clone()];
    let by_index = |idx: usize| -> Option<&BigRational> {
        targets
            .iter()
            .find(|(n, _)| side_index(p, n) == idx)
            .map(|(_, d)| d)
    };
    let done = |f: BTreeMap<String, BigRational>| {
        check_construction(p, &f, &targets).then_some(f)
    };
    match component_status(&cls) {
        Status::NonDegenerate => {
            let shape = nd_shape(&g, &cls)?;
            let d0 = by_index(shape.side_of[0])?.clone();
            let d1 = by_index(shape.side_of[1])?.clone();
            if let Some(f) = done(nd_plain(&g, &shape, [&d0, &d1])) {
                return Some(f);
            }
            // Wide degree gaps: lift a balanced divisor by a nef class
            // vanishing on the low side, or use the steep construction when
            // the low side has square one.
            let (low_leg, da, db) = if d0 <= d1 { (0, d0, d1) } else { (1, d1, d0) };
            let low_idx = shape.side_of[low_leg];
            let low = &p.boundary[low_idx];
            let low_sq = p.pairing(&low.class, &low.class);
            if low_sq <= 0 {
                let base = nd_plain(&g, &shape, [&da, &da]);
                let base_amb = ambient(p, &base);
                if !check_construction(
                    p,
                    &base,
                    &[(low.name.clone(), da.clone()), {
                        let other = &p.boundary[1 - low_idx];
                        (other.name.clone(), da.clone())
                    }],
                ) {
                    return None;
                }
                // M pairs to zero with the low side and positively elsewhere.
                let m_amb: QClass = if low_sq < 0 {
                    let l_low = p.lattice.q_pairing_int(&base_amb, &low.class);
                    low.class
                        .to_q()
                        .iter()
                        .zip(&base_amb)
                        .map(|(d, l)| rat(-low_sq) * l + &l_low * d)
                        .collect()
                } else {
                    low.class.to_q()
                };
                let other = &p.boundary[1 - low_idx];
                let alpha = p.lattice.q_pairing_int(&m_amb, &other.class);
                if alpha <= qzero() {
                    return None;
                }
                let t = (&db - &da) / alpha;
                let m_coeffs = basis_coefficients(p, &m_amb);
                let mut f = base;
                for (id, c) in m_coeffs {
                    *f.entry(id).or_insert_with(qzero) += &t * c;
                }
                return done(f);
            }
            if low_sq == 1 {
                return done(nd_steep(&g, &shape, low_leg, &da, &db)?);
            }
            None
        }
        Status::DegenerateRegular => {
            if cls.legs.is_empty() {
                // No exceptional vertex: the structure is one of the small
                // legless shapes, and the coefficients are pinned down by the
                // degree equations; solve them exactly.
                return done(legless_map(p, &targets)?);
            }
            let (low, m) = rigid_offset(&g, &cls)?;
            let e = by_index(low)?.clone();
            if by_index(1 - low)? != &(&e + rat(m)) {
                return None;
            }
            done(dr_map(&g, &cls, &e)?)
        }
        Status::NonRegular => {
            let (low, m) = rigid_offset(&g, &cls)?;
            let e = by_index(low)?.clone();
            let base_high = rat(2) * &e + rat(m);
            let t = half(&(by_index(1 - low)?.clone() - base_high));
            if t < qzero() {
                return None;
            }
            done(nr_map(&g, &cls, &e, &t)?)
        }
    }
}

// ---------------------------------------------------------------------------
// Exact rational feasibility oracle.
// ---------------------------------------------------------------------------

/// Decide projectivity from first principles: solve the strict system
/// "positive degree on every generator of every component, equal degrees
/// across every gluing" in exact rational arithmetic over the tracked-curve
/// bases. Infeasibility is a definite verdict, not an error.
pub fn lp_feasible(state: &State) -> Option<AmpleCertificate> {
    let ranks: Vec<usize> = state.comps.iter().map(|p| p.rank()).collect();
    let offsets: Vec<usize> = ranks
        .iter()
        .scan(0, |acc, r| {
            let o = *acc;
            *acc += r;
            Some(o)
        })
        .collect();
    let total: usize = ranks.iter().sum();
    let mut cons = Vec::new();
    // Row of pairing coefficients of the component-i variables against a
    // fixed class, embedded in the full variable vector.
    let row = |i: usize, target: &crate::lattice::Class| -> Vec<BigRational> {
        let p = &state.comps[i];
        let mut r = vec![qzero(); total];
        for (j, c) in p.curves.values().enumerate() {
            r[offsets[i] + j] = rat(p.pairing(&c.class, target));
        }
        r
    };
    for (i, p) in state.comps.iter().enumerate() {
        for t in positivity_targets(p) {
            cons.push(Constraint { coeffs: row(i, &t), rel: Rel::Ge, rhs: rat(1) });
        }
    }
    for g in &state.gluings {
        let ra = row(g.a.0, &state.comps[g.a.0].side(&g.a.1).class);
        let rb = row(g.b.0, &state.comps[g.b.0].side(&g.b.1).class);
        let coeffs = ra.iter().zip(&rb).map(|(a, b)| a - b).collect();
        cons.push(Constraint { coeffs, rel: Rel::Eq, rhs: qzero() });
    }
    let x = feasible_point(total, &cons)?;
    let coeffs: Vec<BTreeMap<String, BigRational>> = state
        .comps
        .iter()
        .enumerate()
        .map(|(i, p)| {
            p.curves
                .keys()
                .cloned()
                .zip(x[offsets[i]..offsets[i] + ranks[i]].iter().cloned())
                .collect()
        })
        .collect();
    make_certificate(state, coeffs)
}

// ---------------------------------------------------------------------------
// Certificate assembly along the proofs of the criteria.
// ---------------------------------------------------------------------------

/// A per-component positive seed: any class of positive degree on every
/// generator, found by exact feasibility over the curve basis.
fn component_seed(p: &Pair) -> Option<BTreeMap<String, BigRational>> {
    let ids: Vec<&String> = p.curves.keys().collect();
    let cons: Vec<Constraint> = positivity_targets(p)
        .iter()
        .map(|t| Constraint {
            coeffs: ids
                .iter()
                .map(|id| rat(p.pairing(p.curve_class(id), t)))
                .collect(),
            rel: Rel::Ge,
            rhs: rat(1),
        })
        .collect();
    let x = feasible_point(ids.len(), &cons)?;
    Some(ids.into_iter().cloned().zip(x).collect())
}

/// Given one boundary degree of a component, complete its certificate and
/// report the degree induced on the other side.
fn solve_out(
    p: &Pair,
    g: &CurveGraph,
    cls: &Classification,
    side_in: &str,
    deg_in: &BigRational,
    side_out: &str,
) -> Option<(BTreeMap<String, BigRational>, BigRational)> {
    let pair_spec = |d_in: BigRational, d_out: BigRational| DegreeSpec {
        a: (side_in.to_string(), d_in),
        b: (side_out.to_string(), d_out),
    };
    let (d_in, d_out) = match component_status(cls) {
        Status::NonDegenerate => (deg_in.clone(), deg_in.clone()),
        Status::DegenerateRegular if cls.legs.is_empty() => {
            // Legless shapes can force a degree gap of their own; pin only
            // the incoming degree and read the induced one off the solution.
            let f = legless_map(p, &[(side_in.to_string(), deg_in.clone())])?;
            let amb = ambient(p, &f);
            let d_out = p.lattice.q_pairing_int(&amb, &p.side(side_out).class);
            return Some((f, d_out));
        }
        Status::DegenerateRegular | Status::NonRegular => {
            let (low, m) = rigid_offset(g, cls)?;
            let factor = if component_status(cls) == Status::NonRegular { 2 } else { 1 };
            if side_index(p, side_in) == low {
                (deg_in.clone(), rat(factor) * deg_in + rat(m))
            } else {
                (deg_in.clone(), (deg_in - rat(m)) / rat(factor))
            }
        }
    };
    let f = construct_ample(p, &pair_spec(d_in, d_out.clone()))?;
    Some((f, d_out))
}

/// Thread certificates around the class `P` cycle: equal base degree on the
/// gluing between `y2` and `y3`, induced degrees absorbed by the
/// non-degenerate component `y1`.
fn thread_cycle(
    state: &State,
    views: &[(CurveGraph, Classification)],
    order: [usize; 3],
    e: &BigRational,
) -> Option<AmpleCertificate> {
    let [y1, y2, y3] = order;
    let (f2, out2) = solve_out(
        &state.comps[y2],
        &views[y2].0,
        &views[y2].1,
        &side_toward(state, y2, y3),
        e,
        &side_toward(state, y2, y1),
    )?;
    let (f3, out3) = solve_out(
        &state.comps[y3],
        &views[y3].0,
        &views[y3].1,
        &side_toward(state, y3, y2),
        e,
        &side_toward(state, y3, y1),
    )?;
    let f1 = construct_ample(
        &state.comps[y1],
        &DegreeSpec {
            a: (side_toward(state, y1, y2), out2),
            b: (side_toward(state, y1, y3), out3),
        },
    )?;
    let mut coeffs = vec![BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
    coeffs[y1] = f1;
    coeffs[y2] = f2;
    coeffs[y3] = f3;
    make_certificate(state, coeffs)
}

/// The special assembly for a non-regular component between two
/// non-degenerate ones whose outer sides both square to one: steep
/// constructions on the flanks bridged by nef slack on the middle.
fn thread_steep(
    state: &State,
    views: &[(CurveGraph, Classification)],
    yn: usize,
    ya: usize,
    yb: usize,
    e: &BigRational,
) -> Option<AmpleCertificate> {
    let (low, m) = rigid_offset(&views[yn].0, &views[yn].1)?;
    if side_index(&state.comps[yn], &side_toward(state, yn, ya)) != low {
        return None;
    }
    let high = rat(9) * e / rat(4) + rat(m);
    let fa = construct_ample(
        &state.comps[ya],
        &DegreeSpec {
            a: (side_toward(state, ya, yn), e.clone()),
            b: (side_toward(state, ya, yb), rat(3) * e / rat(2)),
        },
    )?;
    let fn_ = construct_ample(
        &state.comps[yn],
        &DegreeSpec {
            a: (side_toward(state, yn, ya), e.clone()),
            b: (side_toward(state, yn, yb), high.clone()),
        },
    )?;
    let fb = construct_ample(
        &state.comps[yb],
        &DegreeSpec {
            a: (side_toward(state, yb, ya), rat(3) * e / rat(2)),
            b: (side_toward(state, yb, yn), high),
        },
    )?;
    let mut coeffs = vec![BTreeMap::new(), BTreeMap::new(), BTreeMap::new()];
    coeffs[yn] = fn_;
    coeffs[ya] = fa;
    coeffs[yb] = fb;
    make_certificate(state, coeffs)
}

fn glue_p(state: &State) -> Result<AmpleCertificate, String> {
    let views = component_views(state)?;
    let status: Vec<Status> = views.iter().map(|(_, c)| component_status(c)).collect();
    let nd: Vec<usize> = (0..3).filter(|&i| status[i] == Status::NonDegenerate).collect();
    let mut e = rat(12);
    for _ in 0..14 {
        for &y1 in &nd {
            let rest: Vec<usize> = (0..3).filter(|&i| i != y1).collect();
            for (y2, y3) in [(rest[0], rest[1]), (rest[1], rest[0])] {
                if let Some(c) = thread_cycle(state, &views, [y1, y2, y3], &e) {
                    return Ok(c);
                }
            }
        }
        if nd.len() == 2 {
            let yn = (0..3).find(|i| !nd.contains(i)).unwrap();
            for (ya, yb) in [(nd[0], nd[1]), (nd[1], nd[0])] {
                if let Some(c) = thread_steep(state, &views, yn, ya, yb, &e) {
                    return Ok(c);
                }
            }
        }
        e = e * rat(2);
    }
    Err("certificate assembly failed for a state the criterion accepts".into())
}

fn glue_t(state: &State) -> Result<AmpleCertificate, String> {
    let k = state.special();
    let sg = state
        .gluings
        .iter()
        .find(|g| g.is_self())
        .expect("class T has a self-gluing");
    let mut coeffs: Vec<BTreeMap<String, BigRational>> = Vec::new();
    for p in &state.comps {
        coeffs.push(component_seed(p).ok_or("component seed infeasible")?);
    }
    // Equalise the self-glued degrees on the special component: add a nef
    // class pairing to zero with the larger-degree preimage.
    let p = &state.comps[k];
    let seed_amb = ambient(p, &coeffs[k]);
    let deg = |name: &str| p.lattice.q_pairing_int(&seed_amb, &p.side(name).class);
    let (mut hi, mut lo) = (sg.a.1.clone(), sg.b.1.clone());
    if deg(&hi) < deg(&lo) {
        std::mem::swap(&mut hi, &mut lo);
    }
    let (l1, l2) = (deg(&hi), deg(&lo));
    let d1 = &p.side(&hi).class;
    if p.pairing(d1, d1) != -1 {
        return Err("self-glued preimage does not square to -1".into());
    }
    let n = &l1 - &l2;
    // (l2 + n) * seed + n * l1 * D1.
    let d1_coeffs = basis_coefficients(p, &d1.to_q());
    let mut fk: BTreeMap<String, BigRational> = coeffs[k]
        .iter()
        .map(|(id, c)| (id.clone(), (&l2 + &n) * c))
        .collect();
    for (id, c) in d1_coeffs {
        *fk.entry(id).or_insert_with(qzero) += &n * &l1 * c;
    }
    coeffs[k] = fk;
    // Scale the nodal components to match the cross gluings.
    let amb_k = ambient(p, &coeffs[k]);
    for g in &state.gluings {
        if g.is_self() {
            continue;
        }
        let (side_k, other) = if g.a.0 == k { (&g.a.1, &g.b) } else { (&g.b.1, &g.a) };
        let target = p.lattice.q_pairing_int(&amb_k, &p.side(side_k).class);
        let q = &state.comps[other.0];
        let amb_o = ambient(q, &coeffs[other.0]);
        let cur = q.lattice.q_pairing_int(&amb_o, &q.side(&other.1).class);
        if cur <= qzero() {
            return Err("seed is not positive on a glued side".into());
        }
        let scale = target / cur;
        for c in coeffs[other.0].values_mut() {
            *c *= &scale;
        }
    }
    make_certificate(state, coeffs)
        .ok_or_else(|| "assembled class T certificate fails verification".into())
}

/// Assemble a full certificate constructively, following the gluing recipes
/// of the projectivity proofs. Requires the criterion to accept the state; a
/// failure past that point is an internal inconsistency.
pub fn glue_certificates(state: &State) -> Result<AmpleCertificate, String> {
    if !decide(state)? {
        return Err("glue_certificates requires a state the criterion accepts".into());
    }
    match state.class {
        StateClass::P => glue_p(state),
        StateClass::T => glue_t(state),
    }
}
