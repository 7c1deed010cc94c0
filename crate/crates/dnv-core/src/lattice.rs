//! Exact integer arithmetic for unimodular intersection lattices.
//!
//! A [`Lattice`] is the Picard lattice of the normalisation of a component:
//! a symmetric unimodular bilinear form of signature (1, rank-1). Divisor
//! classes are integer coordinate vectors over the current basis. Blow-up
//! appends an exceptional direction; blow-down re-expresses everything in an
//! integral basis of the contracted class's orthogonal complement.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Coordinate integer type. All accumulation is done in `i128` and narrowed
/// with overflow checks, so wraparound is impossible rather than just unlikely.
pub type Int = i64;

/// A divisor class: integer coordinates over the owning lattice's basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Class(pub Vec<Int>);

impl Class {
    pub fn zero(rank: usize) -> Self {
        Class(vec![0; rank])
    }

    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        Class(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, o: &Class) -> Class {
        assert_eq!(self.rank(), o.rank());
        Class(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Class) -> Class {
        assert_eq!(self.rank(), o.rank());
        Class(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn scaled(&self, k: Int) -> Class {
        Class(self.0.iter().map(|a| a * k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// The verbatim embedding into a rank+1 lattice (new coordinate 0).
    pub fn embedded(&self) -> Class {
        let mut v = self.0.clone();
        v.push(0);
        Class(v)
    }
}

fn narrow(x: i128) -> Int {
    Int::try_from(x).expect("lattice arithmetic overflowed i64")
}

/// A unimodular intersection lattice of signature (1, rank-1).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Lattice {
    gram: Vec<Vec<Int>>,
}

impl Lattice {
    /// Build a lattice from a symmetric Gram matrix.
    pub fn new(gram: Vec<Vec<Int>>) -> Self {
        let n = gram.len();
        for row in &gram {
            assert_eq!(row.len(), n, "gram matrix must be square");
        }
        for i in 0..n {
            for j in 0..n {
                assert_eq!(gram[i][j], gram[j][i], "gram matrix must be symmetric");
            }
        }
        Lattice { gram }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &Vec<Vec<Int>> {
        &self.gram
    }

    /// The intersection pairing a^T * gram * b.
    pub fn pairing(&self, a: &Class, b: &Class) -> Int {
        assert_eq!(a.rank(), self.rank(), "class/lattice rank mismatch");
        assert_eq!(b.rank(), self.rank(), "class/lattice rank mismatch");
        let mut acc: i128 = 0;
        for (i, &ai) in a.0.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let mut row: i128 = 0;
            for (j, &bj) in b.0.iter().enumerate() {
                row += self.gram[i][j] as i128 * bj as i128;
            }
            acc += ai as i128 * row;
        }
        narrow(acc)
    }

    /// Blow up at a point. Returns the extended lattice, the transforms of the
    /// listed classes (F maps to F - m*E), and the exceptional class E.
    /// Unlisted classes embed verbatim via [`Class::embedded`].
    pub fn blow_up(&self, through_point: &[(Class, Int)]) -> (Lattice, Vec<Class>, Class) {
        let n = self.rank();
        let mut gram = self.gram.clone();
        for row in gram.iter_mut() {
            row.push(0);
        }
        let mut last = vec![0; n + 1];
        last[n] = -1;
        gram.push(last);
        let e = Class::basis(n + 1, n);
        let transforms = through_point
            .iter()
            .map(|(f, m)| {
                assert!(*m >= 0, "through-point multiplicity must be nonnegative");
                f.embedded().sub(&e.scaled(*m))
            })
            .collect();
        (Lattice::new(gram), transforms, e)
    }

    /// Blow down a (-1)-class. Returns the contracted lattice and the
    /// pushforward map satisfying push(a)·push(b) = a·b + (a·E)(b·E).
    pub fn blow_down(&self, e: &Class) -> (Lattice, Pushforward) {
        assert_eq!(self.pairing(e, e), -1, "can only contract a (-1)-class");
        let n = self.rank();
        // w is the linear form x -> e·x in coordinates; its kernel is e^⊥.
        let w0: Vec<i128> = (0..n)
            .map(|i| {
                let mut acc: i128 = 0;
                for j in 0..n {
                    acc += self.gram[i][j] as i128 * e.0[j] as i128;
                }
                acc
            })
            .collect();
        // Column-reduce w to (1, 0, ..., 0) with a unimodular U, tracking U^-1.
        let mut w = w0;
        let mut u = vec![vec![0i128; n]; n];
        let mut uinv = vec![vec![0i128; n]; n];
        for i in 0..n {
            u[i][i] = 1;
            uinv[i][i] = 1;
        }
        loop {
            let nz: Vec<usize> = (0..n).filter(|&i| w[i] != 0).collect();
            assert!(!nz.is_empty(), "e pairs to -1 with itself, w cannot vanish");
            if nz.len() == 1 {
                let p = nz[0];
                if p != 0 {
                    w.swap(0, p);
                    for row in u.iter_mut() {
                        row.swap(0, p);
                    }
                    uinv.swap(0, p);
                }
                if w[0] < 0 {
                    w[0] = -w[0];
                    for row in u.iter_mut() {
                        row[0] = -row[0];
                    }
                    for x in uinv[0].iter_mut() {
                        *x = -*x;
                    }
                }
                assert_eq!(w[0], 1, "gcd of the pairing form must be 1 (w·e = -1)");
                break;
            }
            let p = *nz
                .iter()
                .min_by_key(|&&i| (w[i].abs(), i))
                .expect("nonempty");
            for j in 0..n {
                if j == p || w[j] == 0 {
                    continue;
                }
                let k = w[j].div_euclid(w[p]);
                if k == 0 {
                    continue;
                }
                // column_j -= k * column_p on U; row_p += k * row_j on U^-1.
                w[j] -= k * w[p];
                for row in u.iter_mut() {
                    row[j] -= k * row[p];
                }
                for col in 0..n {
                    let add = k * uinv[j][col];
                    uinv[p][col] += add;
                }
            }
        }
        // Kernel basis = columns 1..n of U; new gram = B^T G B.
        let cols: Vec<Class> = (1..n)
            .map(|j| Class((0..n).map(|i| narrow(u[i][j])).collect()))
            .collect();
        let mut gram = vec![vec![0; n - 1]; n - 1];
        for a in 0..n - 1 {
            for b in a..n - 1 {
                let v = self.pairing(&cols[a], &cols[b]);
                gram[a][b] = v;
                gram[b][a] = v;
            }
        }
        let uinv: Vec<Vec<Int>> = uinv
            .into_iter()
            .map(|row| row.into_iter().map(narrow).collect())
            .collect();
        let push = Pushforward {
            e: e.clone(),
            w: (0..n)
                .map(|i| {
                    let mut acc: i128 = 0;
                    for j in 0..n {
                        acc += self.gram[i][j] as i128 * e.0[j] as i128;
                    }
                    narrow(acc)
                })
                .collect(),
            uinv,
        };
        (Lattice::new(gram), push)
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> Int {
        let n = self.rank();
        if n == 0 {
            return 1;
        }
        let mut m: Vec<Vec<i128>> = self
            .gram
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let mut sign: i128 = 1;
        let mut prev: i128 = 1;
        for k in 0..n - 1 {
            if m[k][k] == 0 {
                let swap = (k + 1..n).find(|&i| m[i][k] != 0);
                match swap {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
                m[i][k] = 0;
            }
            prev = m[k][k];
        }
        narrow(sign * m[n - 1][n - 1])
    }

    /// Signature (positive, negative, zero) via rational congruence
    /// diagonalisation.
    pub fn signature(&self) -> (usize, usize, usize) {
        let n = self.rank();
        let mut m: Vec<Vec<BigRational>> = self
            .gram
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from(BigInt::from(x))).collect())
            .collect();
        let (mut pos, mut neg, mut zero) = (0, 0, 0);
        for k in 0..n {
            if m[k][k].is_zero() {
                if let Some(j) = (k + 1..n).find(|&j| !m[j][j].is_zero()) {
                    // Swap basis vectors k and j.
                    m.swap(k, j);
                    for row in m.iter_mut() {
                        row.swap(k, j);
                    }
                } else if let Some(j) = (k + 1..n).find(|&j| !m[k][j].is_zero()) {
                    // Add basis vector j to k: diagonal becomes 2*m[k][j].
                    for col in 0..n {
                        let add = m[j][col].clone();
                        m[k][col] += add;
                    }
                    for row in m.iter_mut() {
                        let add = row[j].clone();
                        row[k] += add;
                    }
                } else {
                    zero += 1;
                    continue;
                }
            }
            let p = m[k][k].clone();
            if p.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let f = &m[i][k] / &p;
                for col in 0..n {
                    let sub = &f * &m[k][col];
                    m[i][col] -= sub;
                }
                for row in 0..n {
                    let sub = &f * &m[row][k];
                    m[row][i] -= sub;
                }
            }
        }
        (pos, neg, zero)
    }

    /// Unimodularity check.
    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == 1
    }

    /// The pairing extended to rational classes.
    pub fn q_pairing(&self, a: &[BigRational], b: &[BigRational]) -> BigRational {
        assert_eq!(a.len(), self.rank());
        assert_eq!(b.len(), self.rank());
        let mut acc = BigRational::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            let mut row = BigRational::zero();
            for (j, bj) in b.iter().enumerate() {
                if self.gram[i][j] != 0 && !bj.is_zero() {
                    row += BigRational::from(BigInt::from(self.gram[i][j])) * bj;
                }
            }
            acc += ai * row;
        }
        acc
    }

    /// Pairing of a rational class with an integral one.
    pub fn q_pairing_int(&self, a: &[BigRational], b: &Class) -> BigRational {
        let qb: QClass = b.to_q();
        self.q_pairing(a, &qb)
    }
}

/// A rational divisor class over the same basis.
pub type QClass = Vec<BigRational>;

impl Class {
    pub fn to_q(&self) -> QClass {
        self.0
            .iter()
            .map(|&c| BigRational::from(BigInt::from(c)))
            .collect()
    }
}

/// The pushforward map of a blow-down.
pub struct Pushforward {
    e: Class,
    /// w_i = (G e)_i, so a·E = w·a.
    w: Vec<Int>,
    /// Inverse of the reduction basis matrix; rows 1.. extract complement
    /// coordinates.
    uinv: Vec<Vec<Int>>,
}

impl Pushforward {
    /// Pairing of a class with the contracted E.
    pub fn dot_e(&self, c: &Class) -> Int {
        let acc: i128 = c
            .0
            .iter()
            .zip(&self.w)
            .map(|(&a, &b)| a as i128 * b as i128)
            .sum();
        narrow(acc)
    }

    /// push(C) = C + (C·E)E in complement coordinates.
    pub fn push(&self, c: &Class) -> Class {
        let n = c.rank();
        let m = self.dot_e(c);
        let u: Vec<i128> = (0..n)
            .map(|i| c.0[i] as i128 + m as i128 * self.e.0[i] as i128)
            .collect();
        let x: Vec<i128> = (0..n)
            .map(|i| {
                self.uinv[i]
                    .iter()
                    .zip(&u)
                    .map(|(&a, &b)| a as i128 * b)
                    .sum()
            })
            .collect();
        assert_eq!(x[0], 0, "projected class must lie in the complement");
        Class(x[1..].iter().map(|&v| narrow(v)).collect())
    }
}
