use grouptk::thompson::{
    build_j0, build_j1, characters, commutator, compose, embed_i0, embed_i1, in_Npq, in_commutator_subgroup, inverse,
    power, standard_a, standard_b, standard_sigma, CharacterPair, Dyadic, DyadicPL, ThompsonError,
};
use proptest::prelude::*;

fn element() -> impl Strategy<Value = DyadicPL> {
    prop::collection::vec((0usize..2, any::<bool>()), 0..7).prop_map(|letters| {
        let gens = [standard_a(), standard_b()];
        letters.into_iter().fold(DyadicPL::identity(), |acc, (g, inv)| {
            let g = if inv { inverse(&gens[g]) } else { gens[g].clone() };
            compose(&acc, &g)
        })
    })
}

fn point() -> impl Strategy<Value = Dyadic> {
    (0u32..10).prop_flat_map(|e| (0i64..=(1 << e)).prop_map(move |n| Dyadic::new(n, e)))
}

fn pq() -> impl Strategy<Value = (i64, i64)> {
    prop::sample::select(vec![(1i64, 1i64), (2, 3), (1, -1), (3, -2), (-5, 2), (4, 1)])
}

proptest! {
    #[test]
    fn composition_is_pointwise(f in element(), g in element(), x in point()) {
        prop_assert_eq!(compose(&f, &g).evaluate(&x), f.evaluate(&g.evaluate(&x)));
        prop_assert_eq!(inverse(&f).evaluate(&f.evaluate(&x)), x.clone());
        prop_assert_eq!(f.preimage(&f.evaluate(&x)), x);
    }

    #[test]
    fn group_axioms(f in element(), g in element(), h in element()) {
        prop_assert_eq!(compose(&f, &compose(&g, &h)), compose(&compose(&f, &g), &h));
        prop_assert_eq!(compose(&f, &DyadicPL::identity()), f.clone());
        prop_assert_eq!(compose(&DyadicPL::identity(), &f), f.clone());
        prop_assert!(compose(&inverse(&f), &f).is_identity());
        prop_assert_eq!(power(&f, 3), compose(&f, &compose(&f, &f)));
        prop_assert_eq!(power(&f, -2), inverse(&compose(&f, &f)));
    }

    #[test]
    fn characters_are_additive(f in element(), g in element()) {
        prop_assert_eq!(characters(&compose(&f, &g)), characters(&f) + characters(&g));
        prop_assert!(in_commutator_subgroup(&commutator(&f, &g)));
    }

    #[test]
    fn npq_is_a_normal_subgroup((p, q) in pq(), f in element(), g in element(), h in element(), k in -2i64..3) {
        // f·g·f⁻¹·g⁻¹ · σ^{(p+q)k'} A^{(p−q)k'} lies in N_{p,q}.
        let k = k * if (p + q) % 2 == 0 { 1 } else { 2 };
        let tail = compose(&power(&standard_a(), (p - q) * k / 2), &power(&standard_sigma(), (p + q) * k / 2));
        let n1 = compose(&commutator(&f, &g), &tail);
        let n2 = compose(&commutator(&g, &h), &inverse(&tail));
        for n in [&n1, &n2] {
            prop_assert!(in_Npq(n, p, q).unwrap());
        }
        prop_assert!(in_Npq(&compose(&n1, &n2), p, q).unwrap());
        prop_assert!(in_Npq(&inverse(&n1), p, q).unwrap());
        prop_assert!(in_Npq(&compose(&compose(&h, &n1), &inverse(&h)), p, q).unwrap());
    }

    #[test]
    fn j_maps_fix_the_midpoint((p, q) in pq(), f in element()) {
        let sigma = standard_sigma();
        for j in [build_j0(&f, p, q, &sigma), build_j1(&f, p, q, &sigma)] {
            match j {
                Ok(j) => {
                    prop_assert!(j.fixes(&Dyadic::half()));
                    prop_assert!(in_Npq(&j, p, q).unwrap());
                }
                Err(e) => prop_assert!(matches!(e, ThompsonError::NotDivisible { .. }), "{}", e),
            }
        }
    }

    #[test]
    fn embeddings_are_commuting_homomorphisms(f in element(), g in element()) {
        for embed in [embed_i0, embed_i1] {
            prop_assert_eq!(embed(&compose(&f, &g)), compose(&embed(&f), &embed(&g)));
            prop_assert!(embed(&f).fixes(&Dyadic::half()));
        }
        prop_assert_eq!(compose(&embed_i0(&f), &embed_i1(&g)), compose(&embed_i1(&g), &embed_i0(&f)));
    }
}

#[test]
fn standard_generators() {
    assert_eq!(characters(&standard_a()), CharacterPair { chi0: -1, chi1: 1 });
    assert_eq!(characters(&standard_b()), CharacterPair { chi0: 0, chi1: 1 });
    assert_eq!(characters(&standard_sigma()), CharacterPair { chi0: 1, chi1: 1 });
    // The characters of A and B form a basis of Z²: det = −1.
    let (a, b) = (characters(&standard_a()), characters(&standard_b()));
    assert_eq!(a.chi0 * b.chi1 - a.chi1 * b.chi0, -1);
    // The two defining relations of F, in composition order:
    // A B⁻¹ commutes with A⁻ᵏ B Aᵏ for k = 1, 2.
    let (x0, x1) = (standard_a(), standard_b());
    let left = compose(&x0, &inverse(&x1));
    for k in 1..=2 {
        let xk = compose(&compose(&power(&x0, -k), &x1), &power(&x0, k));
        assert!(commutator(&left, &xk).is_identity(), "relation {k}");
    }
    assert!(!commutator(&x0, &x1).is_identity());
}

#[test]
fn parameter_checks() {
    let f = standard_a();
    let sigma = standard_sigma();
    assert!(matches!(in_Npq(&f, 0, 1), Err(ThompsonError::ZeroParameter)));
    assert!(matches!(in_Npq(&f, 2, 4), Err(ThompsonError::NotCoprime)));
    assert!(matches!(build_j0(&f, 1, 1, &standard_a()), Err(ThompsonError::BadSigma)));
    assert!(matches!(build_j0(&f, 2, 3, &sigma), Err(ThompsonError::NotDivisible { chi: -1, by: 3 })));
    let j = build_j1(&f, 1, 1, &sigma).unwrap();
    assert_eq!(characters(&j), CharacterPair { chi0: 1, chi1: 1 });
}

#[test]
fn dyadic_parsing() {
    assert_eq!("3/8".parse::<Dyadic>().unwrap(), Dyadic::new(3, 3));
    assert_eq!("6/2^4".parse::<Dyadic>().unwrap(), Dyadic::new(3, 3));
    assert_eq!("-2".parse::<Dyadic>().unwrap(), Dyadic::int(-2));
    assert!("1/3".parse::<Dyadic>().is_err());
    assert!("x".parse::<Dyadic>().is_err());
    assert_eq!(Dyadic::new(12, 5).to_string(), "3/8");
}

#[test]
fn breakpoint_validation() {
    let pts = |v: &[(i64, u32, i64, u32)]| v.iter().map(|&(a, b, c, d)| (Dyadic::new(a, b), Dyadic::new(c, d))).collect();
    assert_eq!(DyadicPL::new(pts(&[(0, 0, 0, 0), (1, 1, 1, 2), (3, 2, 1, 1), (1, 0, 1, 0)])).unwrap(), standard_a());
    // slope 3/2 on the second piece
    assert!(DyadicPL::new(pts(&[(0, 0, 0, 0), (1, 1, 1, 2), (1, 0, 1, 0)])).is_err());
    assert!(DyadicPL::new(pts(&[(0, 0, 0, 0), (1, 1, 1, 1), (1, 0, 1, 0)])).unwrap().is_identity());
    assert!(DyadicPL::new(pts(&[(0, 0, 1, 2), (1, 0, 1, 0)])).is_err());
    assert!(DyadicPL::new(pts(&[(0, 0, 0, 0), (1, 1, 3, 3), (1, 0, 1, 0)])).is_err());
    assert!(DyadicPL::new(pts(&[(0, 0, 0, 0), (1, 1, 0, 0), (1, 0, 1, 0)])).is_err());
}
