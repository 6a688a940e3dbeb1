use super::*;
use proptest::prelude::*;

fn el(spec: &GroupSpec, text: &str) -> GroupElement {
    spec.parse_element(text).unwrap()
}

#[test]
fn identities() {
    assert_eq!(GroupSpec::Z2.identity(), GroupElement::Z2(0));
    assert_eq!(GroupSpec::regular_tree(3).unwrap().identity(), GroupElement::Word(vec![]));
    assert_eq!(GroupSpec::S3xZ.format_element(&GroupSpec::S3xZ.identity()), "(Id,0)");
}

#[test]
fn small_products() {
    let z2 = GroupSpec::Z2;
    assert_eq!(z2.multiply(&GroupElement::Z2(1), &GroupElement::Z2(1)).unwrap(), GroupElement::Z2(0));

    let f2 = GroupSpec::free_group(2).unwrap();
    let a = el(&f2, "a");
    let a_inv = el(&f2, "a^-1");
    let b = el(&f2, "b");
    let ab = f2.multiply(&f2.multiply(&a, &a_inv).unwrap(), &b).unwrap();
    assert_eq!(f2.format_element(&ab), "b");
    assert_eq!(el(&f2, "a a^-1 b"), b);

    let s = GroupSpec::S3xZ;
    let p = s.multiply(&el(&s, "((12),0)"), &el(&s, "((13),0)")).unwrap();
    assert_eq!(s.format_element(&p), "((123),0)");
}

#[test]
fn inverses() {
    let z5 = GroupSpec::cycle(5).unwrap();
    assert_eq!(z5.inverse(&GroupElement::Cycle(2)).unwrap(), GroupElement::Cycle(3));

    let f2 = GroupSpec::free_group(2).unwrap();
    assert_eq!(f2.format_element(&f2.inverse(&el(&f2, "ab")).unwrap()), "b^-1 a^-1");

    let lg = GroupSpec::Lamplighter;
    let x = el(&lg, "({0},1)");
    let inv = lg.inverse(&x).unwrap();
    assert_eq!(lg.format_element(&inv), "({-1},-1)");
    assert!(lg.is_identity(&lg.multiply(&x, &inv).unwrap()));
    assert!(lg.is_identity(&lg.multiply(&inv, &x).unwrap()));
}

#[test]
fn wreath_product_by_hand() {
    // (A, m)(B, k) = (A Δ (B + m), m + k)
    let lg = GroupSpec::Lamplighter;
    let x = el(&lg, "({0,2},1)");
    let y = el(&lg, "({0,1},-3)");
    assert_eq!(lg.format_element(&lg.multiply(&x, &y).unwrap()), "({0,1},-2)");
}

#[test]
fn cycle_two_routes_to_z2() {
    assert_eq!(GroupSpec::cycle(2).unwrap(), GroupSpec::Z2);
    assert!(GroupSpec::Cycle(2).validate().is_err());
    assert_eq!("cycle:2".parse::<GroupSpec>().unwrap(), GroupSpec::Z2);
}

#[test]
fn canonical_keys() {
    let z2d = GroupSpec::Lattice(2);
    let k1 = el(&z2d, "(1,-2)").canonical_key();
    let k2 = el(&z2d, "(1,-2)").canonical_key();
    assert_eq!(k1, k2);
    assert_eq!(k1.to_string(), "(1,-2)");

    let r2 = GroupSpec::Euclidean(2);
    let x = el(&r2, "(0.3,0.3)");
    assert_eq!(x.canonical_key_binned(0.5), CanonicalKey::Bin(vec![0, 0]));
    let y = el(&r2, "(-0.3,0.6)");
    assert_eq!(y.canonical_key_binned(0.5), CanonicalKey::Bin(vec![-1, 1]));
}

#[test]
fn closed_form_distances() {
    let t3 = GroupSpec::regular_tree(3).unwrap();
    // tree:3 has letters a, a^-1 and the involution b
    assert_eq!(word_distance(&t3, &el(&t3, "aba")).unwrap(), 3);
    assert_eq!(word_distance(&GroupSpec::Cycle(6), &GroupElement::Cycle(4)).unwrap(), 2);
    assert_eq!(word_distance(&GroupSpec::Lattice(3), &el(&GroupSpec::Lattice(3), "(1,-2,0)")).unwrap(), 3);
}

#[test]
fn bfs_agrees_with_closed_forms() {
    let lg = GroupSpec::Lamplighter;
    let ball = cayley_ball(&lg, 8).unwrap();
    for (x, d) in ball.elements() {
        assert_eq!(word_distance(&lg, x).unwrap(), d, "{}", lg.format_element(x));
    }
    let s = GroupSpec::S3xZ;
    let ball = cayley_ball(&s, DEFAULT_BFS_RADIUS).unwrap();
    assert_eq!(ball.len(), 12 * DEFAULT_BFS_RADIUS as usize - 8);
    for (x, d) in ball.elements() {
        let GroupElement::S3Z(p, z) = x else { unreachable!() };
        assert_eq!(p.transposition_length() + z.unsigned_abs() as u32, d);
    }
    let far = GroupElement::S3Z(Perm3::transposition(1, 2), 30);
    assert_eq!(word_distance(&s, &far), Err(GroupError::OutOfBall { radius: DEFAULT_BFS_RADIUS }));
}

#[test]
fn lazy_and_uniform_builders() {
    let z3 = GroupSpec::Lattice(3);
    let mu = StepDistribution::lazy(&z3, 0.5).unwrap();
    assert_eq!(mu.lazy_mass(&z3), 0.5);
    assert!((mu.min_weight() - 1.0 / 12.0).abs() < 1e-15);

    let s = GroupSpec::S3xZ;
    let uni = StepDistribution::uniform(&s).unwrap();
    assert_eq!(uni.as_discrete().unwrap().len(), 5);
    assert_eq!(uni.lazy_mass(&s), 0.0);
}

#[test]
fn distribution_validation() {
    let z2 = GroupSpec::Z2;
    let bad_sum = StepDistribution::discrete(&z2, vec![(GroupElement::Z2(0), 0.5), (GroupElement::Z2(1), 0.4)]);
    assert!(matches!(bad_sum, Err(GroupError::InvalidDistribution(_))));
    let dup = StepDistribution::discrete(&z2, vec![(GroupElement::Z2(1), 0.5), (GroupElement::Z2(1), 0.5)]);
    assert!(dup.is_err());
    let zero = StepDistribution::discrete(&z2, vec![(GroupElement::Z2(1), 1.0), (GroupElement::Z2(0), 0.0)]);
    assert!(zero.is_err());
}

#[test]
fn mu_literals() {
    let t3: GroupSpec = "tree:3".parse().unwrap();
    let mu = parse_mu(&t3, r#"[["a",0.5],["a^-1",0.5]]"#).unwrap();
    assert_eq!(mu.mass_of(&GroupElement::Word(vec![1])), 0.5);

    let z2d = GroupSpec::Lattice(2);
    let mu = parse_mu(&z2d, "[[[1,0],0.25],[[-1,0],0.25],[\"(0,1)\",0.5]]").unwrap();
    assert_eq!(mu.mass_of(&el(&z2d, "(0,1)")), 0.5);

    assert!(parse_mu(&GroupSpec::Euclidean(3), "gaussian").is_ok());
    assert!(parse_mu(&GroupSpec::Z2, "gaussian").is_err());
    assert!(parse_mu(&GroupSpec::Z2, "[[\"x\",1]]").is_err());
}

#[test]
fn class_functions() {
    let z2d = GroupSpec::Lattice(2);
    let mu = StepDistribution::lazy(&z2d, 0.3).unwrap();
    assert!(z2d.is_class_function(&mu).unwrap().holds());

    let s = GroupSpec::S3xZ;
    assert!(s.is_class_function(&StepDistribution::uniform(&s).unwrap()).unwrap().holds());

    let mu = parse_mu(&s, r#"[["((12),0)",0.5],["((13),0)",0.5]]"#).unwrap();
    match s.is_class_function(&mu).unwrap() {
        ClassFunctionCheck::Violated { element, conjugator, conjugate, masses } => {
            // (12) conjugated by (13) is (23), which carries no mass.
            assert_eq!(s.format_element(&element), "((12),0)");
            assert_eq!(s.format_element(&conjugator), "((13),0)");
            assert_eq!(s.format_element(&conjugate), "((23),0)");
            assert_eq!(masses, (0.5, 0.0));
        }
        ClassFunctionCheck::Holds => panic!("expected a violation"),
    }
}

#[test]
fn format_parse_roundtrip() {
    let cases = [
        ("z2", "1"),
        ("cycle:7", "5"),
        ("zd:3", "(1,-2,0)"),
        ("tree:5", "a^-1 c b"),
        ("free:3", "c^-1 a"),
        ("lamplighter", "({-3,0,4},2)"),
        ("s3xz", "((132),-4)"),
    ];
    for (g, x) in cases {
        let spec: GroupSpec = g.parse().unwrap();
        let e = el(&spec, x);
        assert_eq!(spec.format_element(&e), x);
        assert_eq!(spec.to_string().parse::<GroupSpec>().unwrap(), spec);
    }
}

#[test]
fn malformed_literals() {
    assert!("tree:1".parse::<GroupSpec>().is_err());
    assert!("torus".parse::<GroupSpec>().is_err());
    assert!(GroupSpec::Lattice(2).parse_element("(1,2,3)").is_err());
    assert!(GroupSpec::S3xZ.parse_element("((14),0)").is_err());
}

// --- property tests -------------------------------------------------------

fn arb_element(spec: GroupSpec) -> BoxedStrategy<GroupElement> {
    match spec {
        GroupSpec::Z2 => (0u8..2).prop_map(GroupElement::Z2).boxed(),
        GroupSpec::Cycle(l) => (0..l).prop_map(GroupElement::Cycle).boxed(),
        GroupSpec::Lattice(d) => prop::collection::vec(-50i64..50, d).prop_map(GroupElement::Lattice).boxed(),
        GroupSpec::Euclidean(d) => {
            // Dyadic coordinates keep real addition exact.
            prop::collection::vec((-4096i32..4096).prop_map(|x| x as f64 / 64.0), d)
                .prop_map(GroupElement::Real)
                .boxed()
        }
        spec @ GroupSpec::FreeProduct { .. } => {
            let letters = spec.letter_count() as u8;
            prop::collection::vec(0..letters, 0..12)
                .prop_map(move |raw| {
                    let mut w = spec.identity();
                    for l in raw {
                        spec.mul_right(&mut w, &GroupElement::Word(vec![l]));
                    }
                    w
                })
                .boxed()
        }
        GroupSpec::Lamplighter => (prop::collection::btree_set(-8i64..8, 0..6), -8i64..8)
            .prop_map(|(lit, marker)| GroupElement::Lamp(Lamps { lit, marker }))
            .boxed(),
        GroupSpec::S3xZ => (0usize..6, -12i64..13)
            .prop_map(|(i, z)| GroupElement::S3Z(Perm3::all()[i], z))
            .boxed(),
    }
}

fn all_variants() -> Vec<GroupSpec> {
    vec![
        GroupSpec::Z2,
        GroupSpec::Cycle(7),
        GroupSpec::Lattice(3),
        GroupSpec::Euclidean(2),
        GroupSpec::regular_tree(3).unwrap(),
        GroupSpec::free_group(2).unwrap(),
        GroupSpec::Lamplighter,
        GroupSpec::S3xZ,
    ]
}

fn arb_triple() -> impl Strategy<Value = (GroupSpec, GroupElement, GroupElement, GroupElement)> {
    prop::sample::select(all_variants()).prop_flat_map(|spec| {
        let s = spec.clone();
        (Just(spec), arb_element(s.clone()), arb_element(s.clone()), arb_element(s))
    })
}

proptest! {
    // 8 variants, so about 1.25e4 triples per variant.
    #![proptest_config(ProptestConfig::with_cases(100_000))]

    #[test]
    fn group_axioms((spec, a, b, c) in arb_triple()) {
        let ab_c = spec.multiply(&spec.multiply(&a, &b).unwrap(), &c).unwrap();
        let a_bc = spec.multiply(&a, &spec.multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(&ab_c, &a_bc);
        let e = spec.identity();
        prop_assert_eq!(spec.multiply(&e, &a).unwrap(), a.clone());
        prop_assert_eq!(spec.multiply(&a, &e).unwrap(), a.clone());
        let inv = spec.inverse(&a).unwrap();
        prop_assert!(spec.is_identity(&spec.multiply(&a, &inv).unwrap()));
        prop_assert!(spec.check(&ab_c).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5_000))]

    #[test]
    fn metric_properties((spec, a, b, _c) in arb_triple().prop_filter("discrete", |t| t.0.is_discrete())) {
        let inv_a = spec.inverse(&a).unwrap();
        let da = word_distance(&spec, &a).unwrap();
        prop_assert_eq!(da, word_distance(&spec, &inv_a).unwrap());
        // d(a, b) = |a^-1 b|, so the triangle inequality reads |a^-1 b| <= |a| + |b|.
        let a_inv_b = spec.multiply(&inv_a, &b).unwrap();
        let db = word_distance(&spec, &b).unwrap();
        prop_assert!(word_distance(&spec, &a_inv_b).unwrap() <= da + db);
        prop_assert_eq!(da == 0, spec.is_identity(&a));
    }

    #[test]
    fn word_reduction(raw in prop::collection::vec(0u8..5, 0..40)) {
        let spec = GroupSpec::regular_tree(5).unwrap();
        let mut w = spec.identity();
        for &l in &raw {
            spec.mul_right(&mut w, &GroupElement::Word(vec![l]));
        }
        let GroupElement::Word(letters) = &w else { unreachable!() };
        for pair in letters.windows(2) {
            prop_assert_ne!(pair[1], spec.inverse_letter(pair[0]));
        }
        // Re-reducing an already reduced word changes nothing.
        let again = spec.multiply(&spec.identity(), &w).unwrap();
        prop_assert_eq!(&again, &w);
        let text = spec.format_element(&w);
        prop_assert_eq!(spec.parse_element(&text).unwrap(), w);
    }
}
