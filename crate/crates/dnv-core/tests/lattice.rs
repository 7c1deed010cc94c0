use dnv_core::lattice::{Class, Int, Lattice};
use dnv_core::lp::{feasible_point, rat, Constraint, Rel};

/// Deterministic splittable RNG (splitmix64), so failures reproduce exactly.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn int(&mut self, lo: Int, hi: Int) -> Int {
        lo + (self.next() % (hi - lo + 1) as u64) as Int
    }

    fn class(&mut self, rank: usize) -> Class {
        Class((0..rank).map(|_| self.int(-5, 5)).collect())
    }
}

fn p2() -> Lattice {
    Lattice::new(vec![vec![1]])
}

#[test]
fn tower_blow_up_gives_the_expected_chain() {
    // Blow up a point on a line three times, each time at the intersection of
    // the previous exceptional with the strict transform of the line.
    let lat = p2();
    let line = Class(vec![1]);
    let (lat, t, e1) = lat.blow_up(&[(line, 1)]);
    let (lat, t, e2) = lat.blow_up(&[(t[0].clone(), 1), (e1, 1)]);
    let line = t[0].clone();
    let e1 = t[1].clone();
    let (lat, t, e3) = lat.blow_up(&[(line, 1), (e2, 1)]);
    let line = t[0].clone();
    let e2 = t[1].clone();
    let e1 = e1.embedded();
    // Chain E1', E2', E3 has squares -2, -2, -1 and consecutive pairings 1.
    assert_eq!(lat.pairing(&e1, &e1), -2);
    assert_eq!(lat.pairing(&e2, &e2), -2);
    assert_eq!(lat.pairing(&e3, &e3), -1);
    assert_eq!(lat.pairing(&e1, &e2), 1);
    assert_eq!(lat.pairing(&e2, &e3), 1);
    assert_eq!(lat.pairing(&e1, &e3), 0);
    // The strict transform of the line meets only the last exceptional.
    assert_eq!(lat.pairing(&line, &line), -2);
    assert_eq!(lat.pairing(&line, &e1), 0);
    assert_eq!(lat.pairing(&line, &e3), 1);
    assert!(lat.is_unimodular());
    assert_eq!(lat.signature(), (1, 3, 0));
}

#[test]
fn blow_down_satisfies_the_pushforward_pairing_identity() {
    let mut rng = Rng(7);
    for _ in 0..200 {
        // Random blow-up history over P^2, then contract the last exceptional.
        let mut lat = p2();
        let steps = rng.int(1, 6);
        let mut e = Class(vec![0]);
        for _ in 0..steps {
            let (l2, _, en) = lat.blow_up(&[]);
            lat = l2;
            e = en;
        }
        let n = lat.rank();
        let (down, push) = lat.blow_down(&e);
        assert_eq!(down.rank(), n - 1);
        assert!(down.is_unimodular());
        assert_eq!(down.signature(), (1, n - 2, 0));
        for _ in 0..10 {
            let a = rng.class(n);
            let b = rng.class(n);
            let lhs = down.pairing(&push.push(&a), &push.push(&b));
            let rhs = lat.pairing(&a, &b) + push.dot_e(&a) * push.dot_e(&b);
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn blow_down_contracts_nontrivial_minus_one_classes() {
    // Contract the strict transform of a line through two blown-up points:
    // l - e1 - e2 has square -1 but is not a basis vector.
    let lat = p2();
    let (lat, _, e1) = lat.blow_up(&[]);
    let (lat, _, e2) = lat.blow_up(&[]);
    let e1 = e1.embedded();
    let c = Class(vec![1, -1, -1]);
    assert_eq!(lat.pairing(&c, &c), -1);
    let (down, push) = lat.blow_down(&c);
    assert!(down.is_unimodular());
    assert_eq!(down.signature(), (1, 1, 0));
    // The two exceptionals become a pair of 0-classes meeting once: F1, F2 on
    // P^1 x P^1.
    let f1 = push.push(&e1);
    let f2 = push.push(&e2);
    assert_eq!(down.pairing(&f1, &f1), 0);
    assert_eq!(down.pairing(&f2, &f2), 0);
    assert_eq!(down.pairing(&f1, &f2), 1);
}

#[test]
fn blow_up_then_down_round_trips_pairings() {
    let mut rng = Rng(99);
    let base = Lattice::new(vec![vec![0, 1], vec![1, 0]]);
    for _ in 0..100 {
        let a = rng.class(2);
        let b = rng.class(2);
        let (up, t, e) = base.blow_up(&[(a.clone(), 2), (b.clone(), 1)]);
        assert_eq!(up.pairing(&t[0], &e), 2);
        assert_eq!(up.pairing(&t[1], &e), 1);
        assert_eq!(up.pairing(&t[0], &t[1]), base.pairing(&a, &b) - 2);
        let (down, push) = up.blow_down(&e);
        assert_eq!(down.pairing(&push.push(&t[0]), &push.push(&t[1])), base.pairing(&a, &b));
        // The contraction inverts the blow-up up to a basis change: pairings
        // of embedded classes are restored exactly.
        let c = rng.class(2);
        let d = rng.class(2);
        assert_eq!(
            down.pairing(&push.push(&c.embedded()), &push.push(&d.embedded())),
            base.pairing(&c, &d)
        );
    }
}

#[test]
fn lp_distinguishes_feasible_from_infeasible() {
    // x >= 1, y >= 1, x + y = 5 is feasible.
    let cons = vec![
        Constraint { coeffs: vec![rat(1), rat(0)], rel: Rel::Ge, rhs: rat(1) },
        Constraint { coeffs: vec![rat(0), rat(1)], rel: Rel::Ge, rhs: rat(1) },
        Constraint { coeffs: vec![rat(1), rat(1)], rel: Rel::Eq, rhs: rat(5) },
    ];
    let x = feasible_point(2, &cons).expect("feasible system");
    assert_eq!(&x[0] + &x[1], rat(5));
    assert!(x[0] >= rat(1) && x[1] >= rat(1));
    // x >= 3, y >= 3, x + y = 5 is not.
    let cons = vec![
        Constraint { coeffs: vec![rat(1), rat(0)], rel: Rel::Ge, rhs: rat(3) },
        Constraint { coeffs: vec![rat(0), rat(1)], rel: Rel::Ge, rhs: rat(3) },
        Constraint { coeffs: vec![rat(1), rat(1)], rel: Rel::Eq, rhs: rat(5) },
    ];
    assert!(feasible_point(2, &cons).is_none());
    // Unrestricted variables may go negative: x + y = -2, x - y >= 10.
    let cons = vec![
        Constraint { coeffs: vec![rat(1), rat(1)], rel: Rel::Eq, rhs: rat(-2) },
        Constraint { coeffs: vec![rat(1), rat(-1)], rel: Rel::Ge, rhs: rat(10) },
    ];
    let x = feasible_point(2, &cons).expect("feasible with negative values");
    assert_eq!(&x[0] + &x[1], rat(-2));
    assert!(&x[0] - &x[1] >= rat(10));
}
