use proptest::prelude::*;

use polyaut::degeneration::triangular_witness;
use polyaut::endo::Point;
use polyaut::groups::{nagata, random_affine, random_tame_word_bounded, Word};
use polyaut::rational::{int, ratio};
use polyaut::{parse_endo, parse_poly, AffineMap, Endo, Monomial, Poly, Rational};

const N: usize = 3;

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(p, q)| ratio(p, q))
}

/// Up to six terms, total degree at most `max_deg`, in `n` variables.
fn poly_in(n: usize, max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (prop::collection::vec(0..n, 0..=max_deg), rational()),
        0..6,
    )
    .prop_map(move |terms| {
        terms.into_iter().fold(Poly::zero(n), |acc, (vars, c)| {
            let mut exps = vec![0u32; n];
            for v in vars {
                exps[v] += 1;
            }
            acc + Poly::term(n, Monomial::new(&exps, 0), c)
        })
    })
}

fn poly() -> impl Strategy<Value = Poly> {
    poly_in(N, 8)
}

fn point(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), n)
}

fn endo(n: usize, max_deg: usize) -> impl Strategy<Value = Endo> {
    prop::collection::vec(poly_in(n, max_deg), n).prop_map(|c| Endo::new(c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&p * &Poly::one(N), p.clone());
        prop_assert!((&p + &(-&p)).is_empty());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(p in poly(), q in poly(), r in poly(), a in point(N)) {
        let lhs = (&(&p * &q) + &r).evaluate(&a, None).unwrap();
        let rhs = p.evaluate(&a, None).unwrap() * q.evaluate(&a, None).unwrap()
            + r.evaluate(&a, None).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitute_then_evaluate(p in poly_in(N, 4), g in prop::collection::vec(poly_in(N, 3), N), a in point(N)) {
        let lhs = p.substitute(&g).unwrap().evaluate(&a, None).unwrap();
        let ga: Vec<Rational> = g.iter().map(|gi| gi.evaluate(&a, None).unwrap()).collect();
        prop_assert_eq!(lhs, p.evaluate(&ga, None).unwrap());
    }

    #[test]
    fn homogeneous_decomposition(p in poly(), subset in prop::sample::subsequence(vec![1usize, 2, 3], 1..=3)) {
        prop_assume!(!p.is_zero());
        let mut sum = Poly::zero(N);
        let mut lowest = None;
        for w in 0..=8 {
            let part = p.homogeneous_component(&subset, w).unwrap();
            if lowest.is_none() && !part.is_zero() {
                lowest = Some(w);
            }
            sum = sum + part;
        }
        prop_assert_eq!(sum, p.clone());
        prop_assert_eq!(Some(p.valuation_in(&subset).unwrap()), lowest);
    }

    #[test]
    fn format_parse_round_trip(p in poly()) {
        prop_assert_eq!(parse_poly(&p.to_string(), N).unwrap(), p);
    }

    #[test]
    fn degree_of_a_product_adds(p in poly(), q in poly()) {
        prop_assert_eq!((&p * &q).total_degree(), p.total_degree() + q.total_degree());
    }

    #[test]
    fn composition_laws(s in endo(2, 3), t in endo(2, 3), u in endo(2, 2), a in point(2)) {
        let st = s.compose(&t).unwrap();
        prop_assert_eq!(st.compose(&u).unwrap(), s.compose(&t.compose(&u).unwrap()).unwrap());
        let id = Endo::identity(2);
        prop_assert_eq!(&id.compose(&s).unwrap(), &s);
        prop_assert_eq!(&s.compose(&id).unwrap(), &s);
        if let (Ok(ds), Ok(dt), Ok(dst)) = (s.degree(), t.degree(), st.degree()) {
            prop_assert!(dst <= ds * dt);
        }
        let p = Point(a);
        let ta = t.eval(&p).unwrap();
        prop_assert_eq!(st.eval(&p).unwrap(), s.eval(&ta).unwrap());
        prop_assert_eq!(
            st.jacobian_det().evaluate(&p.0, None).unwrap(),
            s.jacobian_det().evaluate(&ta.0, None).unwrap() * t.jacobian_det().evaluate(&p.0, None).unwrap()
        );
        prop_assert_eq!(st.jacobian_det_at(&p).unwrap(), st.jacobian_det().evaluate(&p.0, None).unwrap());
    }

    #[test]
    fn coefficient_vector_round_trip(s in endo(3, 4)) {
        let d = s.degree().unwrap_or(0);
        let v = s.coeff_vector(d).unwrap();
        prop_assert_eq!(Endo::from_coeff_vector(&v).unwrap(), s);
    }

    #[test]
    fn linear_conjugation_keeps_the_degree(s in endo(3, 3), seed in any::<u64>()) {
        let a = random_affine(3, seed);
        let linear = AffineMap::new(a.linear().clone(), vec![int(0); 3]).unwrap();
        let conj = linear.inverse().to_endo().compose(&s).unwrap().compose(&linear.to_endo()).unwrap();
        prop_assert_eq!(conj.degree().ok(), s.degree().ok());
    }

    #[test]
    fn endo_format_round_trip(s in endo(3, 4)) {
        prop_assert_eq!(parse_endo(&s.to_string()).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tame_words_have_unit_jacobian_and_invert(seed in any::<u64>(), n in 2usize..=3, length in 1usize..=4) {
        let w = random_tame_word_bounded(n, seed, length, 3, 12).unwrap();
        let e = w.to_endo().unwrap();
        let jac = e.jacobian_det().as_constant();
        prop_assert!(jac.is_some_and(|c| c != int(0)));
        let inv = w.inverse().to_endo().unwrap();
        prop_assert_eq!(e.compose(&inv).unwrap(), Endo::identity(n));
        let round = polyaut::groups::parse_word(&w.to_string()).unwrap();
        prop_assert_eq!(round.to_endo().unwrap(), e);
    }

    #[test]
    fn generators_have_their_shape(seed in any::<u64>(), n in 2usize..=4) {
        prop_assert!(random_affine(n, seed).to_endo().is_affine());
        let b = polyaut::groups::random_triangular(n, seed, 3);
        prop_assert!(b.to_endo().is_triangular());
        prop_assert_eq!(b.to_endo().compose(&b.inverse().to_endo()).unwrap(), Endo::identity(n));
    }

    #[test]
    fn triangular_witness_is_triangular_and_not_affine(seed in any::<u64>(), n in 2usize..=3, length in 1usize..=4) {
        let w: Word = random_tame_word_bounded(n, seed, length, 3, 12).unwrap();
        let e = w.to_endo().unwrap();
        prop_assume!(!e.is_affine());
        let t = triangular_witness(&e).unwrap();
        prop_assert!(t.is_triangular() && !t.is_affine());
        prop_assert_eq!(triangular_witness(&t).unwrap(), t);
    }
}

#[test]
fn nagata_preserves_delta() {
    let (n, inv) = nagata();
    let delta = parse_poly("x2^2 + x1*x3", 3).unwrap();
    assert_eq!(delta.substitute(n.components()).unwrap(), delta);
    assert_eq!(delta.substitute(inv.components()).unwrap(), delta);
    assert_eq!(n.jacobian_det(), Poly::one(3));
}
