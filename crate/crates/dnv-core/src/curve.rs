//! Curve structures: the weighted graph of tracked curves on a component,
//! its classification (exceptional vertices, legs, degenerate/regular), and
//! canonical forms for isomorphism testing.

use crate::lattice::Int;
use crate::pairs::Pair;

/// The curve structure of a component: tracked curves with their squares,
/// mutual pairings, and degrees on each boundary side.
#[derive(Clone, Debug)]
pub struct CurveGraph {
    pub ids: Vec<String>,
    pub square: Vec<Int>,
    /// Symmetric pairing matrix with zero diagonal.
    pub adj: Vec<Vec<Int>>,
    /// `bdeg[v][s]` = degree of curve v on boundary side s (in `Pair` order).
    pub bdeg: Vec<Vec<Int>>,
    /// Whether each boundary side is nodal.
    pub side_nodal: Vec<bool>,
}

/// Extract the curve structure of a component. Distinct tracked curves are
/// required to meet transversally in at most one point.
pub fn extract(pair: &Pair) -> Result<CurveGraph, String> {
    let ids: Vec<String> = pair.curves.keys().cloned().collect();
    let n = ids.len();
    let mut square = Vec::with_capacity(n);
    let mut adj = vec![vec![0; n]; n];
    for (i, a) in ids.iter().enumerate() {
        let ca = pair.curve_class(a);
        square.push(pair.pairing(ca, ca));
        for (j, b) in ids.iter().enumerate().skip(i + 1) {
            let m = pair.pairing(ca, pair.curve_class(b));
            if m < 0 || m > 1 {
                return Err(format!("curves {a} and {b} pair to {m}"));
            }
            adj[i][j] = m;
            adj[j][i] = m;
        }
    }
    let bdeg = ids
        .iter()
        .map(|id| {
            pair.boundary
                .iter()
                .map(|s| pair.pairing(pair.curve_class(id), &s.class))
                .collect()
        })
        .collect();
    let side_nodal = pair
        .boundary
        .iter()
        .map(|s| s.nodes.len() == 2 && s.nodes[0] == s.nodes[1])
        .collect();
    Ok(CurveGraph { ids, square, adj, bdeg, side_nodal })
}

/// An exceptional vertex together with its leg (starting at the vertex).
#[derive(Clone, Debug)]
pub struct Leg {
    pub vertex: usize,
    pub path: Vec<usize>,
}

/// Classification of a curve structure.
#[derive(Clone, Debug)]
pub struct Classification {
    pub legs: Vec<Leg>,
    pub degenerate: bool,
    pub regular: bool,
}

impl CurveGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.len()).filter(|&w| self.adj[v][w] != 0).collect()
    }

    fn total_bdeg(&self, v: usize) -> Int {
        self.bdeg[v].iter().sum()
    }
}

/// Find the exceptional vertices: square -1, meeting exactly one boundary
/// side, being the only vertex on that side, with exactly one neighbor.
pub fn exceptional_vertices(g: &CurveGraph) -> Vec<usize> {
    let sides = g.side_nodal.len();
    (0..g.len())
        .filter(|&v| {
            if g.square[v] != -1 || g.neighbors(v).len() != 1 {
                return false;
            }
            let met: Vec<usize> = (0..sides).filter(|&s| g.bdeg[v][s] != 0).collect();
            let [s0] = met[..] else { return false };
            (0..g.len()).all(|w| w == v || g.bdeg[w][s0] == 0)
        })
        .collect()
}

/// The leg of an exceptional vertex: starts with the vertex and its unique
/// neighbor, and extends while the current end is interior (zero boundary
/// degree) with a unique unvisited neighbor.
pub fn leg(g: &CurveGraph, v: usize) -> Leg {
    let mut path = vec![v, g.neighbors(v)[0]];
    loop {
        let end = *path.last().unwrap();
        if g.total_bdeg(end) != 0 {
            break;
        }
        let next: Vec<usize> = g
            .neighbors(end)
            .into_iter()
            .filter(|w| !path.contains(w))
            .collect();
        match next[..] {
            [w] => path.push(w),
            _ => break,
        }
    }
    Leg { vertex: v, path }
}

/// Classify a curve structure.
///
/// Regular: more than one vertex and no leg ends in a square-zero vertex.
/// Degenerate: no exceptional vertex, or some leg ends in a vertex meeting a
/// smooth boundary side exactly once, or the structure is not regular.
pub fn classify(g: &CurveGraph) -> Classification {
    let exc = exceptional_vertices(g);
    let legs: Vec<Leg> = exc.iter().map(|&v| leg(g, v)).collect();
    let regular = g.len() > 1
        && legs
            .iter()
            .all(|l| g.square[*l.path.last().unwrap()] != 0);
    let smooth_end = legs.iter().any(|l| {
        let end = *l.path.last().unwrap();
        g.bdeg[end]
            .iter()
            .zip(&g.side_nodal)
            .any(|(&d, &nodal)| d == 1 && !nodal)
    });
    let degenerate = legs.is_empty() || smooth_end || !regular;
    Classification { legs, degenerate, regular }
}

/// Canonical key of a vertex-colored weighted graph: the lexicographically
/// least encoding over all vertex orders. Each placed vertex contributes its
/// color tuple followed by its pairings with the already placed vertices.
///
/// Exhaustive with backtracking over ties; the graphs here are small
/// near-trees whose colors break most symmetry.
pub fn canonical_key(colors: &[Vec<i64>], adj: &[Vec<Int>]) -> Vec<i64> {
    let n = colors.len();
    assert_eq!(adj.len(), n);
    if n == 0 {
        return vec![0];
    }
    let width = colors[0].len();
    assert!(colors.iter().all(|c| c.len() == width));
    let mut best: Option<Vec<i64>> = None;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut prefix: Vec<i64> = vec![n as i64, width as i64];
    search(colors, adj, &mut order, &mut prefix, &mut best);
    best.expect("nonempty graph has a key")
}

fn step_key(colors: &[Vec<i64>], adj: &[Vec<Int>], order: &[usize], v: usize) -> Vec<i64> {
    let mut k = colors[v].clone();
    k.extend(order.iter().map(|&u| adj[v][u]));
    k
}

fn search(
    colors: &[Vec<i64>],
    adj: &[Vec<Int>],
    order: &mut Vec<usize>,
    prefix: &mut Vec<i64>,
    best: &mut Option<Vec<i64>>,
) {
    let n = colors.len();
    if order.len() == n {
        if best.as_ref().map_or(true, |b| &*prefix < b) {
            *best = Some(prefix.clone());
        }
        return;
    }
    // Candidates: unplaced vertices whose step key is minimal.
    let mut min_key: Option<Vec<i64>> = None;
    let mut ties: Vec<usize> = Vec::new();
    for v in 0..n {
        if order.contains(&v) {
            continue;
        }
        let k = step_key(colors, adj, order, v);
        match &min_key {
            Some(m) if k > *m => {}
            Some(m) if k == *m => ties.push(v),
            _ => {
                min_key = Some(k);
                ties = vec![v];
            }
        }
    }
    let key = min_key.expect("some vertex is unplaced");
    // Prune: a longer prefix can only tie or exceed a strictly smaller best.
    let len = prefix.len();
    prefix.extend(&key);
    let viable = match best {
        Some(b) => prefix[..] <= b[..prefix.len().min(b.len())],
        None => true,
    };
    if viable {
        for v in ties {
            order.push(v);
            search(colors, adj, order, prefix, best);
            order.pop();
        }
    }
    prefix.truncate(len);
}
