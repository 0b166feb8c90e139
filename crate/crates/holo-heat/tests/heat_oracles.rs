use holo_heat::{HeatKernelEval, HeatMethod};
use holo_lattice::Lattice;
use num_complex::Complex64;
use proptest::prelude::*;

fn skew() -> Lattice {
    Lattice::new(vec![vec![1.0, 0.0], vec![0.31, 0.87]]).unwrap()
}

#[test]
fn image_and_spectral_agree_on_square_torus() {
    let h = HeatKernelEval::new(Lattice::square(1, 1.0));
    let pts = [[0.13, 0.71], [0.5, 0.5], [0.02, -0.3], [0.9, 0.1], [0.0, 0.0]];
    for t in [0.05, 0.2, 1.0, 5.0] {
        for u in pts {
            let a = h.scalar_real(&u, t, HeatMethod::Image).unwrap();
            let b = h.scalar_real(&u, t, HeatMethod::Spectral).unwrap();
            assert!((a.value - b.value).abs() <= 1e-12 * a.value.abs().max(1.0), "t={t} u={u:?}: {} vs {}", a.value, b.value);
            assert!(a.bound <= 1e-14 && b.bound <= 1e-14);
        }
    }
}

#[test]
fn adjoint_image_and_spectral_agree() {
    for (l, pts) in [
        (Lattice::square(1, 1.0), vec![vec![0.13, 0.71], vec![0.4, -0.2]]),
        (skew(), vec![vec![0.3, 0.2], vec![-0.45, 0.05]]),
        (Lattice::square(2, 1.0), vec![vec![0.1, 0.2, -0.3, 0.4], vec![0.45, 0.05, 0.2, 0.25]]),
    ] {
        let h = HeatKernelEval::new(l);
        for t in [0.05, 0.3, 1.0] {
            for u in &pts {
                let a = h.dbar_star_real(u, t, HeatMethod::Image).unwrap();
                let b = h.dbar_star_real(u, t, HeatMethod::Spectral).unwrap();
                for (x, y) in a.value.iter().zip(&b.value) {
                    assert!((x - y).norm() <= 1e-11, "t={t}: {x} vs {y}");
                }
            }
        }
    }
}

#[test]
fn adjoint_value_is_weighted_image_sum() {
    // n = 1: c(u) = (2πt)^{-1} Σ_λ ((u − λ)‾ / t) e^{−|u−λ|²/2t}, summed directly over a wide box.
    let h = HeatKernelEval::new(Lattice::square(1, 1.0));
    let (u, t) = ([0.21, -0.37], 0.4);
    let mut want = Complex64::new(0.0, 0.0);
    for a in -12i32..=12 {
        for b in -12i32..=12 {
            let y = [u[0] - a as f64, u[1] - b as f64];
            let g = (-(y[0] * y[0] + y[1] * y[1]) / (2.0 * t)).exp();
            want += Complex64::new(y[0], -y[1]) / t * g;
        }
    }
    want /= 2.0 * std::f64::consts::PI * t;
    let got = h.dbar_star_real(&u, t, HeatMethod::Auto).unwrap().value[0];
    assert!((got - want).norm() < 1e-13);
}

#[test]
fn adjoint_vanishes_on_the_diagonal_for_small_time() {
    let h = HeatKernelEval::new(Lattice::square(1, 1.0));
    for t in [0.01, 0.03, 0.05] {
        let c = h.dbar_star_real(&[0.0, 0.0], t, HeatMethod::Image).unwrap();
        assert!(c.value[0].norm() <= 1e-13);
    }
}

#[test]
fn heat_mass_is_one() {
    for l in [Lattice::square(1, 1.0), skew()] {
        let h = HeatKernelEval::new(l.clone());
        for t in [0.1, 0.5, 1.0] {
            // The periodic trapezoid rule is spectrally accurate for the smooth periodic coefficient.
            let m = 48;
            let mut s = 0.0;
            for i in 0..m {
                for j in 0..m {
                    let x = l.basis().from_cell(&[i as f64 / m as f64, j as f64 / m as f64]);
                    s += h.scalar_real(&x, t, HeatMethod::Auto).unwrap().value;
                }
            }
            let mass = s * l.covolume() / (m * m) as f64;
            assert!((mass - 1.0).abs() <= 1e-8, "t={t}: {mass}");
        }
    }
}

#[test]
fn leading_image_term_dominates_at_small_time() {
    // On 2Z + 2iZ the nearest non-trivial image of u = 0.3 sits at distance 1.7.
    let h = HeatKernelEval::new(Lattice::square(1, 2.0));
    let (t, u) = (0.05, [0.3, 0.0]);
    let s = h.scalar_real(&u, t, HeatMethod::Image).unwrap().value;
    let r = 2.0 * std::f64::consts::PI * t * (0.09 / (2.0 * t)).exp() * s;
    assert!((r - 1.0).abs() <= 1e-10, "{r}");
}

#[test]
fn leading_image_term_on_unit_square_torus_carries_neighbour_correction() {
    // On Z + iZ the image at λ = 1 contributes e^{−(0.49 − 0.09)/0.1} = e^{−4},
    // the pair λ = ±i contributes 2e^{−10}.
    let h = HeatKernelEval::new(Lattice::square(1, 1.0));
    let (t, u) = (0.05, [0.3, 0.0]);
    let s = h.scalar_real(&u, t, HeatMethod::Image).unwrap().value;
    let r = 2.0 * std::f64::consts::PI * t * (0.09 / (2.0 * t)).exp() * s;
    assert!((r - 1.0 - (-4.0f64).exp() - 2.0 * (-10.0f64).exp()).abs() < 5e-6, "{r}");
}

#[test]
fn spectral_semigroup_is_termwise_exact() {
    let h = HeatKernelEval::new(skew());
    let (t, s) = (0.3, 0.45);
    let a = h.spectral_modes(t).unwrap().value;
    let b = h.spectral_modes(s).unwrap().value;
    let c = h.spectral_modes(t + s).unwrap().value;
    let covol = h.lattice().covolume();
    for (mu, ct) in &c {
        let at = a.iter().find(|(m, _)| m == mu).map_or(0.0, |x| x.1);
        let bt = b.iter().find(|(m, _)| m == mu).map_or(0.0, |x| x.1);
        assert!((ct - covol * at * bt).abs() <= 1e-15 * ct.abs().max(1e-300) + 1e-14);
    }
}

#[test]
fn swapping_points_relabels_the_form() {
    let h = HeatKernelEval::new(Lattice::square(2, 1.0));
    let z = [Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.05)];
    let w = [Complex64::new(0.4, -0.1), Complex64::new(0.2, 0.3)];
    let a = h.heat_eval(&z, &w, 0.2, HeatMethod::Auto).unwrap().value;
    let b = h.heat_eval(&w, &z, 0.2, HeatMethod::Auto).unwrap().value.relabel(1, 0);
    // ∧(dz̄ − dw̄) picks up (−1)^n under the swap, the scalar is even.
    let diff = a.form.sub(&b.form);
    assert!(diff.max_abs_coefficient() < 1e-14);
}

#[test]
fn tighter_truncation_moves_values_within_certified_bound() {
    let loose = HeatKernelEval::new(Lattice::square(1, 1.0)).with_tolerance(1e-10);
    let tight = HeatKernelEval::new(Lattice::square(1, 1.0)).with_tolerance(1e-15);
    for t in [0.05, 0.7, 3.0] {
        for m in [HeatMethod::Image, HeatMethod::Spectral] {
            let a = loose.scalar_real(&[0.3, 0.1], t, m).unwrap();
            let b = tight.scalar_real(&[0.3, 0.1], t, m).unwrap();
            assert!(b.terms >= a.terms);
            assert!((a.value - b.value).abs() <= a.bound + 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn dual_representations_agree(x in -1.0f64..1.0, y in -1.0f64..1.0, t in 0.05f64..5.0) {
        let h = HeatKernelEval::new(skew());
        let a = h.scalar_real(&[x, y], t, HeatMethod::Image).unwrap().value;
        let b = h.scalar_real(&[x, y], t, HeatMethod::Spectral).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn scalar_is_periodic_and_even(x in -1.0f64..1.0, y in -1.0f64..1.0, t in 0.05f64..2.0) {
        let l = skew();
        let h = HeatKernelEval::new(l.clone());
        let b = &l.basis().rows()[1];
        let a = h.scalar_real(&[x, y], t, HeatMethod::Auto).unwrap().value;
        let shifted = h.scalar_real(&[x + b[0], y + b[1]], t, HeatMethod::Auto).unwrap().value;
        let neg = h.scalar_real(&[-x, -y], t, HeatMethod::Auto).unwrap().value;
        prop_assert!((a - shifted).abs() <= 1e-12 * a.abs().max(1.0));
        prop_assert!((a - neg).abs() <= 1e-12 * a.abs().max(1.0));
    }
}
