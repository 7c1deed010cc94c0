use dnv_core::lattice::Class;
use dnv_core::pairs::{
    build_y1, build_y2, build_y4, certificate_is_positive, dynkin_type, paper_ample_certificate,
    BaseTag, Pair, Role,
};

fn roots(pair: &Pair) -> Vec<Class> {
    pair.curves
        .values()
        .filter(|c| c.role == Role::Root)
        .map(|c| c.class.clone())
        .collect()
}

#[test]
fn y2_has_the_expected_structure() {
    let y = build_y2();
    y.validate().unwrap();
    assert_eq!(y.rank(), 8);
    assert_eq!(y.base, BaseTag::Y2);
    assert_eq!(dynkin_type(&y.lattice, &roots(&y)).as_deref(), Some("E6"));
    for c in y.curves.values() {
        let sq = y.pairing(&c.class, &c.class);
        match c.role {
            Role::Root => assert_eq!(sq, -2),
            Role::Exceptional => assert_eq!(sq, -1),
            Role::Interior => panic!("no interior curves at build time"),
        }
    }
    let d1 = &y.side("D1").class;
    let d2 = &y.side("D2").class;
    assert_eq!(y.pairing(d1, d1), -1);
    assert_eq!(y.pairing(d2, d2), -1);
    assert_eq!(y.pairing(d1, d2), 2);
    // The latents are the curves through the two triple-point slots: square
    // 0, meeting each boundary side once.
    for l in &y.latents {
        assert_eq!(y.pairing(&l.class, &l.class), 0);
        assert_eq!(y.pairing(&l.class, d1), 1);
        assert_eq!(y.pairing(&l.class, d2), 1);
    }
}

#[test]
fn y1_has_the_expected_structure() {
    let y = build_y1();
    y.validate().unwrap();
    assert_eq!(y.rank(), 9);
    assert_eq!(y.base, BaseTag::Y1);
    assert_eq!(dynkin_type(&y.lattice, &roots(&y)).as_deref(), Some("E8"));
    let d = &y.side("D").class;
    assert_eq!(y.pairing(d, d), 1);
    // One latent through the node (degree 2 on the nodal boundary) and two
    // retired square-1 classes.
    let l = &y.latents[0].class;
    assert_eq!(y.pairing(l, l), 0);
    assert_eq!(y.pairing(l, d), 2);
    for r in &y.retired {
        assert_eq!(y.pairing(&r.class, &r.class), 1);
        assert_eq!(y.pairing(&r.class, d), 3);
    }
}

#[test]
fn y4_has_the_expected_structure() {
    let y = build_y4();
    y.validate().unwrap();
    assert_eq!(y.rank(), 6);
    assert_eq!(y.base, BaseTag::Y4);
    assert_eq!(dynkin_type(&y.lattice, &roots(&y)).as_deref(), Some("A2"));
    for name in ["D1", "D2", "D3", "D4"] {
        let d = &y.side(name).class;
        assert_eq!(y.pairing(d, d), -1);
    }
    // Cycle adjacency.
    let cls = |n: &str| y.side(n).class.clone();
    assert_eq!(y.pairing(&cls("D1"), &cls("D2")), 1);
    assert_eq!(y.pairing(&cls("D2"), &cls("D3")), 1);
    assert_eq!(y.pairing(&cls("D3"), &cls("D4")), 1);
    assert_eq!(y.pairing(&cls("D4"), &cls("D1")), 1);
    assert_eq!(y.pairing(&cls("D1"), &cls("D3")), 0);
    assert_eq!(y.pairing(&cls("D2"), &cls("D4")), 0);
}

#[test]
fn reference_certificates_are_strictly_positive() {
    for y in [build_y1(), build_y2(), build_y4()] {
        let a = paper_ample_certificate(&y);
        assert!(certificate_is_positive(&y, &a));
    }
    // The two-sided pair has equal degree 10 on both boundary components.
    let y = build_y2();
    let a = paper_ample_certificate(&y);
    for name in ["D1", "D2"] {
        let deg = y.lattice.q_pairing_int(&a, &y.side(name).class);
        assert_eq!(deg, dnv_core::lp::rat(10));
    }
}

#[test]
fn dynkin_recognition_handles_chains_and_forks() {
    // Build a rank-5 chain inside the blow-up of P^2 at 5 points.
    let y = build_y2();
    // E6 minus the fork leaf is A5? Removing M leaves two A-chains; removing a
    // leaf of a long branch leaves D5 or A5 depending on which.
    let all = roots(&y);
    let sub: Vec<Class> = all
        .iter()
        .filter(|c| y.pairing(c, y.curve_class("M")) == 0 || y.pairing(c, c) != -2)
        .cloned()
        .collect();
    // Dropping the fork disconnects the diagram.
    assert_eq!(dynkin_type(&y.lattice, &sub), None);
}
