//! The degeneration pipeline against an oracle that shares no code with the
//! library's polynomial arithmetic: a plain exponent map, where the diagonal
//! torus substitution is just a reweighting of monomials.

use std::collections::BTreeMap;

use num_traits::Zero;

use polyaut::degeneration::{
    closure_witness, degenerate, degeneration_data, normalize, torus_conjugate,
    triangular_witness, verify_limit,
};
use polyaut::groups::{nagata, random_tame_word_bounded};
use polyaut::rational::{int, ratio};
use polyaut::{Endo, Monomial, Poly, Rational};

type Dict = BTreeMap<Vec<u32>, Rational>;

fn var(n: usize, i: usize) -> Dict {
    let mut e = vec![0; n];
    e[i - 1] = 1;
    Dict::from([(e, int(1))])
}

fn konst(n: usize, c: i64) -> Dict {
    Dict::from([(vec![0; n], int(c))])
}

fn add(a: &Dict, b: &Dict) -> Dict {
    let mut out = a.clone();
    for (k, v) in b {
        *out.entry(k.clone()).or_insert_with(Rational::zero) += v;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn mul(a: &Dict, b: &Dict) -> Dict {
    let mut out = Dict::new();
    for (ka, va) in a {
        for (kb, vb) in b {
            let k: Vec<u32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            *out.entry(k).or_insert_with(Rational::zero) += va * vb;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn dict(p: &Poly) -> Dict {
    p.terms().map(|(m, c)| (m.x_exps().to_vec(), c.clone())).collect()
}

fn poly(n: usize, d: &Dict) -> Poly {
    d.iter().fold(Poly::zero(n), |acc, (e, c)| {
        acc + Poly::term(n, Monomial::new(e, 0), c.clone())
    })
}

/// `t^-shift f(t^w x1, t x2, ..., t xn)` at `t = 0`; `None` when a negative
/// power of `t` would survive.
fn diagonal_limit(f: &Dict, w: u32, shift: u32) -> Option<Dict> {
    let mut out = Dict::new();
    for (e, c) in f {
        let weight = w * e[0] + e[1..].iter().sum::<u32>();
        if weight < shift {
            return None;
        }
        if weight == shift {
            out.insert(e.clone(), c.clone());
        }
    }
    Some(out)
}

/// `(g0, w, h)` read off the exponent map.
fn oracle_data(f1: &Dict) -> (Dict, u32, Dict) {
    let g0: Dict = f1
        .iter()
        .filter(|(e, _)| e[0] == 0)
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    let w = g0.keys().map(|e| e.iter().sum::<u32>()).min().expect("g0 != 0");
    let h = g0
        .iter()
        .filter(|(e, _)| e.iter().sum::<u32>() == w)
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();
    (g0, w, h)
}

fn oracle_limit(psi: &Endo) -> Endo {
    let n = psi.n();
    let (_, w, _) = oracle_data(&dict(psi.component(1)));
    let comps = psi
        .components()
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let shift = if k == 0 { w } else { 1 };
            poly(n, &diagonal_limit(&dict(f), w, shift).expect("clears"))
        })
        .collect();
    Endo::new(comps).unwrap()
}

fn nagata_by_hand() -> [Dict; 3] {
    let (x1, x2, x3) = (var(3, 1), var(3, 2), var(3, 3));
    let delta = add(&mul(&x2, &x2), &mul(&x1, &x3));
    let f1 = add(
        &add(&x1, &mul(&konst(3, -2), &mul(&x2, &delta))),
        &mul(&konst(3, -1), &mul(&x3, &mul(&delta, &delta))),
    );
    let f2 = add(&x2, &mul(&x3, &delta));
    [f1, f2, x3]
}

#[test]
fn nagata_matches_the_formula() {
    let (n, _) = nagata();
    let hand = nagata_by_hand();
    for (i, f) in hand.iter().enumerate() {
        assert_eq!(&dict(n.component(i + 1)), f);
    }
}

#[test]
fn nagata_degeneration_agrees_with_the_oracle() {
    let (n, _) = nagata();
    let hand = nagata_by_hand();
    let (g0, w, h) = oracle_data(&hand[0]);
    assert_eq!(w, 3);

    let data = degeneration_data(&n).unwrap();
    assert_eq!(dict(&data.g0), g0);
    assert_eq!(data.w, w);
    assert_eq!(dict(&data.h), h);

    let want: Vec<Dict> = hand
        .iter()
        .enumerate()
        .map(|(k, f)| diagonal_limit(f, w, if k == 0 { w } else { 1 }).unwrap())
        .collect();
    let got = triangular_witness(&n).unwrap();
    for (k, d) in want.iter().enumerate() {
        assert_eq!(&dict(got.component(k + 1)), d);
    }
    // the shear the oracle produces is x1 + h
    assert_eq!(want[0], add(&var(3, 1), &h));
}

#[test]
fn a_wrong_weight_leaves_negative_powers() {
    let (n, _) = nagata();
    let hand = nagata_by_hand();
    assert!(diagonal_limit(&hand[0], 4, 4).is_none());
    assert!(torus_conjugate(&n, 4).is_err());
    // w = 2 clears (every weight is at least 2) but reaches a different limit
    let c = torus_conjugate(&n, 2).unwrap();
    let want = diagonal_limit(&hand[0], 2, 2).unwrap();
    assert_eq!(dict(c.specialize(&int(0)).component(1)), want);
    assert_ne!(c.specialize(&int(0)), triangular_witness(&n).unwrap());
}

#[test]
fn random_tame_maps_degenerate_like_the_oracle() {
    let mut checked = 0;
    for seed in 0..60u64 {
        let n = 2 + (seed % 3) as usize;
        let length = 1 + (seed / 3 % 5) as usize;
        let w = random_tame_word_bounded(n, seed, length, 3, [27, 18, 12][n - 2]).unwrap();
        let phi = w.to_endo().unwrap();
        if phi.is_affine() {
            continue;
        }
        let psi = normalize(&phi).unwrap().result;
        let (g0, w, h) = oracle_data(&dict(psi.component(1)));
        let data = degeneration_data(&psi).unwrap();
        assert_eq!((dict(&data.g0), data.w, dict(&data.h)), (g0, w, h), "seed {seed}");
        assert_eq!(degenerate(&psi).unwrap(), oracle_limit(&psi), "seed {seed}");
        let c = torus_conjugate(&psi, data.w).unwrap();
        assert!(verify_limit(&c, &oracle_limit(&psi)).unwrap().pass);
        checked += 1;
    }
    assert!(checked >= 40, "only {checked} non-affine draws");
}

#[test]
fn curve_points_are_conjugates_by_the_torus() {
    let (n, _) = nagata();
    let c = torus_conjugate(&n, 3).unwrap();
    let a = [int(2), ratio(-1, 3), int(5)];
    for t0 in [int(1), int(-1), int(2), ratio(1, 2), ratio(-3, 7)] {
        // evaluate N at (t^3 a1, t a2, t a3) and divide by (t^3, t, t)
        let scaled = vec![&a[0] * &t0 * &t0 * &t0, &a[1] * &t0, &a[2] * &t0];
        let image = n.eval(&polyaut::Point(scaled)).unwrap().0;
        let want = [
            &image[0] / (&t0 * &t0 * &t0),
            &image[1] / &t0,
            &image[2] / &t0,
        ];
        let got = c.specialize(&t0).eval(&polyaut::Point(a.to_vec())).unwrap().0;
        assert_eq!(got, want);
    }
}

#[test]
fn closure_words_multiply_out() {
    let (n, _) = nagata();
    let samples = [int(1), int(-1), int(2), ratio(1, 2)];
    for pt in closure_witness(&n, &samples).unwrap() {
        assert_eq!(pt.word.to_endo().unwrap(), pt.map);
        assert_eq!(pt.map.degree().unwrap(), 5);
        assert_eq!(pt.map.jacobian_det(), Poly::one(3));
    }
}

#[test]
fn non_coordinates_are_rejected_with_the_first_component() {
    let bad = polyaut::parse_endo("[x1 + x1*x2^2, x2]").unwrap();
    match degeneration_data(&bad) {
        Err(polyaut::Error::NotACoordinate { f1 }) => assert_eq!(&f1, bad.component(1)),
        other => panic!("{other:?}"),
    }
}
