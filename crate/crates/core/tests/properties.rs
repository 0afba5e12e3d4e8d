//! Randomized properties: structural checks on random braid closures,
//! homology under braid moves, Smith normal form against determinantal
//! divisors, exterior algebra identities and text round-trips.

mod common;

use common::{braid_closure, odd, odd_reduced};
use num_integer::Integer;
use oddkh::algebra::{degree, ExteriorElement};
use oddkh::complex::{Bidegree, SparseMatrix};
use oddkh::homology::{jones_state_sum, rank_mod_p, smith, LaurentPoly, Poly2};
use oddkh::linkdiag::{orient, parse_pd};
use oddkh::pipeline::RunConfig;
use oddkh::verify::{verify_subject, Check, Subject};
use proptest::prelude::*;

fn word(strands: usize, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    let g = (1..strands as i32, any::<bool>()).prop_map(|(i, pos)| if pos { i } else { -i });
    prop::collection::vec(g, 0..=max_len)
}

fn braid() -> impl Strategy<Value = (Vec<i32>, usize)> {
    (2usize..=4).prop_flat_map(|n| (word(n, 7), Just(n)))
}

/// Permutation induced on strand positions; the component count of the
/// closure is its number of cycles.
fn cycles(word: &[i32], strands: usize) -> usize {
    let mut perm: Vec<usize> = (0..strands).collect();
    for &g in word {
        let i = g.unsigned_abs() as usize - 1;
        perm.swap(i, i + 1);
    }
    let mut seen = vec![false; strands];
    let mut n = 0;
    for s in 0..strands {
        if !seen[s] {
            n += 1;
            let mut t = s;
            while !seen[t] {
                seen[t] = true;
                t = perm[t];
            }
        }
    }
    n
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn random_closures_pass_structural_checks((w, n) in braid()) {
        let pd = braid_closure(&w, n);
        let subject = Subject::from_pd("braid", pd.clone());
        let failure = verify_subject(&subject, &Check::DEFAULT, &RunConfig::default()).unwrap();
        prop_assert!(failure.is_none(), "{pd}: {failure:?}");
        prop_assert_eq!(orient(&pd, None).unwrap().num_components(), cycles(&w, n));
    }

    #[test]
    fn homology_survives_braid_moves((w, n) in braid(), at in 0usize..8, i in 1usize..4, pos in any::<bool>()) {
        prop_assume!(i < n);
        let h = odd(&braid_closure(&w, n));
        let at = at.min(w.len());
        let g = if pos { i as i32 } else { -(i as i32) };

        // RII: insert g g⁻¹
        let mut rii = w.clone();
        rii.splice(at..at, [g, -g]);
        if cycles(&rii, n) == cycles(&w, n) {
            prop_assert_eq!(odd(&braid_closure(&rii, n)), h.clone(), "RII {:?}", rii);
        }

        // conjugation by g
        let mut conj = vec![g];
        conj.extend(&w);
        conj.push(-g);
        if cycles(&conj, n) == cycles(&w, n) {
            prop_assert_eq!(odd(&braid_closure(&conj, n)), h.clone(), "conjugate {:?}", conj);
        }

        // Markov stabilization onto a new strand, either sign
        if n < 4 {
            let mut stab = w.clone();
            stab.push(if pos { n as i32 } else { -(n as i32) });
            prop_assert_eq!(odd(&braid_closure(&stab, n + 1)), h.clone(), "stabilized {:?}", stab);
        }
    }

    #[test]
    fn braid_relation_preserves_homology((w, n) in braid(), at in 0usize..8) {
        prop_assume!(n >= 3);
        let at = at.min(w.len());
        let mut a = w.clone();
        a.splice(at..at, [1, 2, 1]);
        let mut b = w.clone();
        b.splice(at..at, [2, 1, 2]);
        prop_assert_eq!(odd(&braid_closure(&a, n)), odd(&braid_closure(&b, n)));
    }

    #[test]
    fn reduced_homology_ignores_basepoint((w, n) in word(3, 6).prop_map(|w| (w, 3usize))) {
        prop_assume!(cycles(&w, n) == 1 && !w.is_empty());
        let pd = braid_closure(&w, n);
        let r = odd_reduced(&pd, 1);
        for p in 2..=pd.num_arcs() as u32 {
            prop_assert_eq!(odd_reduced(&pd, p), r.clone(), "{} at {}", pd, p);
        }
    }

    #[test]
    fn jones_skein_on_braids((w, n) in braid(), at in 0usize..7) {
        prop_assume!(!w.is_empty());
        let at = at % w.len();
        let g = w[at].abs();
        let with = |x: Option<i32>| {
            let mut v = w.clone();
            match x {
                Some(x) => v[at] = x,
                None => { v.remove(at); }
            }
            jones_state_sum(&braid_closure(&v, n))
        };
        let lhs = with(Some(g)).shift(-2).add(&with(Some(-g)).shift(2).scale(-1));
        let rhs = with(None).mul(&LaurentPoly::from_terms([(-1, 1), (1, -1)]));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pd_text_round_trips((w, n) in braid()) {
        let pd = braid_closure(&w, n);
        prop_assert_eq!(parse_pd(&pd.to_string()).unwrap(), pd.clone());
        // a component that only passes over has no orientation in the code,
        // so mirroring twice may reverse it; knots always come back intact
        if cycles(&w, n) == 1 {
            prop_assert_eq!(pd.mirror().mirror(), pd);
        }
    }
}

fn det(m: &[Vec<i128>]) -> i128 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i128>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|s| s.count_ones() as usize == k)
        .map(|s| (0..n).filter(|&i| s >> i & 1 == 1).collect())
        .collect()
}

/// Invariant factors from gcds of k×k minors: d_k / d_{k-1}.
fn divisor_oracle(a: &[Vec<i64>]) -> (usize, Vec<u64>) {
    let (r, c) = (a.len(), a.first().map_or(0, |x| x.len()));
    let mut prev: i128 = 1;
    let mut factors = vec![];
    for k in 1..=r.min(c) {
        let mut g: i128 = 0;
        for rows in subsets(r, k) {
            for cols in subsets(c, k) {
                let minor: Vec<Vec<i128>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| a[i][j] as i128).collect()).collect();
                g = g.gcd(&det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        factors.push((g / prev) as u64);
        prev = g;
    }
    let rank = factors.len();
    (rank, factors.into_iter().filter(|&f| f != 1).collect())
}

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
        let entry = prop_oneof![4 => Just(0i64), 3 => -3i64..=3, 1 => -40i64..=40];
        prop::collection::vec(prop::collection::vec(entry, c), r)
    })
}

fn rank_over_fp(a: &[Vec<i64>], p: i64) -> usize {
    let mut m: Vec<Vec<i64>> = a.iter().map(|r| r.iter().map(|x| x.rem_euclid(p)).collect()).collect();
    let cols = m.first().map_or(0, |x| x.len());
    let mut rank = 0;
    for j in 0..cols {
        let Some(i) = (rank..m.len()).find(|&i| m[i][j] != 0) else { continue };
        m.swap(rank, i);
        let inv = (1..p).find(|x| x * m[rank][j] % p == 1).unwrap();
        for k in 0..m.len() {
            if k != rank && m[k][j] != 0 {
                let f = m[k][j] * inv % p;
                let pivot = m[rank].clone();
                for (x, y) in m[k].iter_mut().zip(pivot) {
                    *x = (*x - f * y).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, ..ProptestConfig::default() })]

    #[test]
    fn smith_matches_determinantal_divisors(a in matrix()) {
        let s = smith(&SparseMatrix::from_dense(&a)).unwrap();
        let (rank, torsion) = divisor_oracle(&a);
        prop_assert_eq!(s.rank, rank);
        prop_assert_eq!(s.torsion, torsion);
    }

    #[test]
    fn smith_ignores_row_and_column_order(a in matrix(), seed in any::<u64>()) {
        let mut rows: Vec<usize> = (0..a.len()).collect();
        let mut cols: Vec<usize> = (0..a[0].len()).collect();
        let mut x = seed | 1;
        let mut next = |n: usize| { x ^= x << 13; x ^= x >> 7; x ^= x << 17; (x % n as u64) as usize };
        for i in (1..rows.len()).rev() { let j = next(i + 1); rows.swap(i, j); }
        for i in (1..cols.len()).rev() { let j = next(i + 1); cols.swap(i, j); }
        let b: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| a[i][j]).collect()).collect();
        let t: Vec<Vec<i64>> = (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect();
        let s = smith(&SparseMatrix::from_dense(&a)).unwrap();
        prop_assert_eq!(smith(&SparseMatrix::from_dense(&b)).unwrap(), s.clone());
        prop_assert_eq!(smith(&SparseMatrix::from_dense(&t)).unwrap(), s);
    }

    #[test]
    fn rank_mod_p_matches_gaussian_elimination(a in matrix(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assert_eq!(rank_mod_p(&SparseMatrix::from_dense(&a), p), rank_over_fp(&a, p as i64));
    }
}

fn element(dim: usize) -> impl Strategy<Value = ExteriorElement> {
    prop::collection::vec((0u32..1 << dim, -3i64..=3), 0..6).prop_map(move |t| ExteriorElement::from_terms(dim, t))
}

fn homogeneous(dim: usize) -> impl Strategy<Value = ExteriorElement> {
    (0..=dim as u32, prop::collection::vec((0u32..1 << dim, -3i64..=3), 0..6))
        .prop_map(move |(k, t)| ExteriorElement::from_terms(dim, t.into_iter().filter(|&(m, _)| degree(m) == k)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn wedge_is_associative_and_bilinear(a in element(5), b in element(5), c in element(5)) {
        prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
        prop_assert_eq!(a.add(&b).wedge(&c), a.wedge(&c).add(&b.wedge(&c)));
        prop_assert_eq!(ExteriorElement::one(5).wedge(&a), a.clone());
    }

    #[test]
    fn wedge_is_graded_commutative(a in homogeneous(5), b in homogeneous(5)) {
        let deg = |x: &ExteriorElement| x.terms().next().map_or(0, |(m, _)| degree(m));
        let sign = if deg(&a) * deg(&b) % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale(sign));
    }

    #[test]
    fn generators_square_to_zero(i in 0usize..5, a in element(5)) {
        let g = ExteriorElement::generator(5, i);
        prop_assert!(g.wedge(&g).wedge(&a).is_zero());
        prop_assert!(a.contract(i).contract(i).is_zero());
    }

    #[test]
    fn contraction_is_an_odd_derivation(i in 0usize..5, a in homogeneous(5), b in element(5)) {
        let k = a.terms().next().map_or(0, |(m, _)| degree(m));
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let lhs = a.wedge(&b).contract(i);
        let rhs = a.contract(i).wedge(&b).add(&a.wedge(&b.contract(i)).scale(sign));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn laurent_text_round_trips(t in prop::collection::vec((-12i32..=12, -9i64..=9), 0..8)) {
        let p = LaurentPoly::from_terms(t);
        prop_assert_eq!(p.to_string().parse::<LaurentPoly>().unwrap(), p);
    }

    #[test]
    fn poly2_text_round_trips(t in prop::collection::vec(((-6i32..=6, -20i32..=20), 1i64..=5), 0..8)) {
        let p = Poly2::from_terms(t.into_iter().map(|((m, s), c)| (Bidegree::new(m, s), c)));
        prop_assert_eq!(p.to_string().parse::<Poly2>().unwrap(), p);
    }
}
