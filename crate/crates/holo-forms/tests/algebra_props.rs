use holo_forms::{AntiholoGenerator, MultiPointForm};
use num_complex::Complex64;
use proptest::prelude::*;

const POINTS: usize = 3;
const N: usize = 2;

fn arb_form() -> impl Strategy<Value = MultiPointForm> {
    prop::collection::vec((0u32..(1 << (POINTS * N)), -3i32..=3, -3i32..=3), 0..5).prop_map(|terms| {
        let mut f = MultiPointForm::zero();
        for (mask, re, im) in terms {
            let gens: Vec<_> = (0..POINTS * N)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| AntiholoGenerator::new(b / N, b % N))
                .collect();
            f = f.add(&MultiPointForm::monomial(Complex64::new(re as f64, im as f64), &gens));
        }
        f
    })
}

fn arb_gen() -> impl Strategy<Value = AntiholoGenerator> {
    (0..POINTS, 0..N).prop_map(|(p, i)| AntiholoGenerator::new(p, i))
}

fn homogeneous_part(f: &MultiPointForm, d: usize) -> MultiPointForm {
    let mut out = MultiPointForm::zero();
    for (m, c) in f.terms() {
        if m.len() == d {
            out.add_term(m.clone(), *c);
        }
    }
    out
}

proptest! {
    #[test]
    fn wedge_is_associative(a in arb_form(), b in arb_form(), c in arb_form()) {
        prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
    }

    #[test]
    fn wedge_is_bilinear(a in arb_form(), b in arb_form(), c in arb_form(), s in -4i32..4) {
        let s = Complex64::new(s as f64, 1.0);
        prop_assert_eq!(a.add(&b.scale(s)).wedge(&c), a.wedge(&c).add(&b.wedge(&c).scale(s)));
    }

    #[test]
    fn wedge_is_graded_commutative(a in arb_form(), b in arb_form(), da in 0usize..4, db in 0usize..4) {
        let (a, b) = (homogeneous_part(&a, da), homogeneous_part(&b, db));
        let sign = if (da * db) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale(Complex64::new(sign, 0.0)));
    }

    #[test]
    fn contraction_is_a_graded_derivation(a in arb_form(), b in arb_form(), da in 0usize..4, g in arb_gen()) {
        let a = homogeneous_part(&a, da);
        let sign = if da % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = a.wedge(&b).contract(g);
        let rhs = a.contract(g).wedge(&b).add(&a.wedge(&b.contract(g)).scale(Complex64::new(sign, 0.0)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn contraction_squares_to_zero(a in arb_form(), g in arb_gen(), h in arb_gen()) {
        prop_assert!(a.contract(g).contract(g).is_zero());
        prop_assert_eq!(a.contract(g).contract(h), a.contract(h).contract(g).scale(Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn top_density_is_linear(a in arb_form(), b in arb_form(), s in -5i32..5) {
        let s = Complex64::new(s as f64, -0.5);
        let lhs = a.add(&b.scale(s)).top_density(POINTS, N);
        let rhs = a.top_density(POINTS, N) + b.top_density(POINTS, N) * s;
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn relabelling_points_multiplies_top_density_by_sign_power(a in arb_form(), perm in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let inversions = (0..POINTS).flat_map(|i| (i + 1..POINTS).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        let sgn = if (inversions * N) % 2 == 0 { 1.0 } else { -1.0 };
        let moved = a.map_points(|p| perm[p]);
        let want = a.top_density(POINTS, N) * sgn;
        prop_assert!((moved.top_density(POINTS, N) - want).norm() < 1e-9);
    }
}
