use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crlab::analyze::{decompose_max, normalize, st_invariants};
use crlab::construct::{nt_space, tilde, wedge};
use crlab::verify::{constant_rank, fa_check};
use crlab::{spacefile, AffineMatrixSpace, Elem, EquivalenceWitness, Field, Limits, Matrix};

fn gf(q: u32) -> Field {
    Field::with_order(q).unwrap()
}

fn matrix_from(f: &Field, rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rows * cols).map(|_| rng.gen_range(0..f.order()) as Elem).collect();
    Matrix::from_vec(f, rows, cols, data).unwrap()
}

fn invertible_from(f: &Field, n: usize, seed: u64) -> Matrix {
    (0u64..)
        .map(|i| matrix_from(f, n, n, seed.wrapping_add(i << 32)))
        .find(Matrix::is_invertible)
        .unwrap()
}

fn witness(f: &Field, n: usize, p: usize, a: u64, b: u64) -> EquivalenceWitness {
    EquivalenceWitness::new(invertible_from(f, n, a), invertible_from(f, p, b)).unwrap()
}

fn field_order() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 4, 5, 7, 8, 9])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_is_a_group_action(q in field_order(), n in 1usize..4, p in 1usize..4,
                                   s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), s4 in any::<u64>(), sb in any::<u64>()) {
        let f = gf(q);
        let s = AffineMatrixSpace::new(matrix_from(&f, n, p, sb), &[matrix_from(&f, n, p, s1)]).unwrap();
        let w1 = witness(&f, n, p, s1, s2);
        let w2 = witness(&f, n, p, s3, s4);
        let stepwise = s.transform(&w1).unwrap().transform(&w2).unwrap();
        let composed = s.transform(&w1.then(&w2).unwrap()).unwrap();
        prop_assert!(stepwise.same_set(&composed));
        let back = s.transform(&w1).unwrap().transform(&w1.inverse().unwrap()).unwrap();
        prop_assert!(back.same_set(&s));
        prop_assert_eq!(s.transform(&w1).unwrap().dim(), s.dim());
    }

    #[test]
    fn constant_rank_is_invariant(q in prop::sample::select(vec![3u32, 4, 5]), r in 1usize..3,
                                  extra_n in 0usize..2, extra_p in 0usize..2, a in any::<u64>(), b in any::<u64>()) {
        let f = gf(q);
        let (n, p) = (r + extra_n + extra_p, r + extra_p);
        let s = tilde(&nt_space(&f, r), n, p).unwrap();
        let moved = s.transform(&witness(&f, n, p, a, b)).unwrap();
        prop_assert!(constant_rank(&moved, r, &Limits::default()).unwrap().holds());
        if q as usize > r + 1 {
            let (norm, _) = normalize(&moved, r, &Limits::default()).unwrap();
            prop_assert!(fa_check(&norm, r, &Limits::default()).unwrap().holds());
        }
    }

    #[test]
    fn wedge_signature_survives_transforms(q in prop::sample::select(vec![3u32, 4]), s in 0usize..3,
                                           a in any::<u64>(), b in any::<u64>()) {
        let f = gf(q);
        let t = 2 - s;
        let m = (t > 0).then(|| nt_space(&f, t));
        let nn = (s > 0).then(|| nt_space(&f, s));
        let w = wedge(m.as_ref(), nn.as_ref(), 3, 3, &Limits::default()).unwrap();
        let moved = w.transform(&witness(&f, 3, 3, a, b)).unwrap();
        let sig = st_invariants(&moved, 2, &Limits::default()).unwrap();
        prop_assert_eq!((sig.s, sig.t), (s, t));
        let d = decompose_max(&moved, 2, &Limits::default()).unwrap();
        prop_assert_eq!((d.s, d.t), (s, t));
        let rebuilt = wedge(d.m_space.as_ref(), d.n_space.as_ref(), 3, 3, &Limits::default()).unwrap();
        prop_assert!(moved.transform(&d.witness).unwrap().same_set(&rebuilt));
    }

    #[test]
    fn spacefile_text_is_stable(q in field_order(), n in 1usize..4, p in 1usize..4, k in 0usize..4,
                                sb in any::<u64>(), sd in any::<u64>()) {
        let f = gf(q);
        let basis: Vec<Matrix> = (0..k).map(|i| matrix_from(&f, n, p, sd.wrapping_add(i as u64))).collect();
        let s = AffineMatrixSpace::new(matrix_from(&f, n, p, sb), &basis).unwrap();
        let text = spacefile::to_string(&s);
        let back = spacefile::parse(&text).unwrap().space;
        prop_assert!(back.same_set(&s));
        prop_assert_eq!(spacefile::to_string(&back), text);
    }
}

#[test]
fn tilde_dimensions_follow_the_formula() {
    for q in [3u32, 4, 5] {
        let f = gf(q);
        for r in 1..=3 {
            for n in r..=4 {
                for p in r..=n {
                    let s = tilde(&nt_space(&f, r), n, p).unwrap();
                    assert_eq!(s.dim(), r * (r - 1) / 2 + r * (n - r), "q={q} n={n} p={p} r={r}");
                }
            }
        }
    }
}
