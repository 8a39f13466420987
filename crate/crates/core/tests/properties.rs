use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use weakdecay::decay::{BathEigen, BathSpec};
use weakdecay::spin::{self, spin_propagator};
use weakdecay::weak::{self, random, Operator, Propagator, StateVector, WeakValueQuery};
use weakdecay::C64;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn weak_of(
    pre: &StateVector,
    post: &StateVector,
    a: &Operator,
    u_mid: &Propagator,
    u_late: &Propagator,
) -> C64 {
    let t = u_mid.duration();
    let q = WeakValueQuery::new(
        pre.clone(),
        post.clone(),
        a.clone(),
        0.0,
        t,
        t + u_late.duration(),
    )
    .unwrap();
    weak::weak_value(&q, u_mid, u_late).unwrap()
}

/// Random pre/post with a post-selection overlap safely above the floor.
fn setup(dim: usize, seed: u64) -> (StateVector, StateVector, Propagator, Propagator) {
    let mut r = rng(seed);
    loop {
        let pre = random::state(dim, &mut r);
        let post = random::state(dim, &mut r);
        let u_mid = random::unitary_propagator(dim, 0.4, &mut r);
        let u_late = random::unitary_propagator(dim, 0.6, &mut r);
        let overlap = post.inner(&u_late.apply(&u_mid.apply(pre.amplitudes())));
        if overlap.norm() > 0.05 {
            return (pre, post, u_mid, u_late);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weak_value_is_linear(seed in any::<u64>(), dim in 2usize..7, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let (pre, post, u_mid, u_late) = setup(dim, seed);
        let mut r = rng(seed ^ 0x5eed);
        let a = random::hermitian(dim, &mut r);
        let b = random::hermitian(dim, &mut r);
        let combo = &a.scale(C64::new(alpha, 0.0)) + &b.scale(C64::new(beta, 0.0));
        let lhs = weak_of(&pre, &post, &combo, &u_mid, &u_late);
        let rhs = weak_of(&pre, &post, &a, &u_mid, &u_late) * alpha + weak_of(&pre, &post, &b, &u_mid, &u_late) * beta;
        let scale = 1.0 + lhs.norm();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn complement_rule(seed in any::<u64>(), dim in 2usize..7) {
        let (pre, post, u_mid, u_late) = setup(dim, seed);
        let mut r = rng(seed ^ 0xc0);
        let p = weak::projector_from_state(&random::state(dim, &mut r)).unwrap();
        let rest = &Operator::identity(dim) - &p;
        let sum = weak_of(&pre, &post, &p, &u_mid, &u_late) + weak_of(&pre, &post, &rest, &u_mid, &u_late);
        prop_assert!((sum - 1.0).norm() <= 1e-10);
    }

    #[test]
    fn identity_has_weak_value_one(seed in any::<u64>(), dim in 1usize..7) {
        let (pre, post, u_mid, u_late) = setup(dim, seed);
        let w = weak_of(&pre, &post, &Operator::identity(dim), &u_mid, &u_late);
        prop_assert!((w - 1.0).norm() <= 1e-12);
    }

    #[test]
    fn evolved_post_selection_gives_expectation(seed in any::<u64>(), dim in 2usize..7) {
        let mut r = rng(seed);
        let pre = random::state(dim, &mut r);
        let a = random::hermitian(dim, &mut r);
        let u_mid = random::unitary_propagator(dim, 0.3, &mut r);
        let u_late = random::unitary_propagator(dim, 0.5, &mut r);
        let total = u_late.compose(&u_mid).unwrap();
        let post = StateVector::normalized(total.apply(pre.amplitudes()).iter().copied().collect()).unwrap();
        let w = weak_of(&pre, &post, &a, &u_mid, &u_late);
        let strong = weak::strong_expectation(&pre, &a, &u_mid).unwrap();
        prop_assert!((w - strong).norm() <= 1e-10);
    }

    #[test]
    fn decomposition_recovers_expectation(seed in any::<u64>(), dim in 2usize..9) {
        let mut r = rng(seed);
        let pre = random::state(dim, &mut r);
        let a = random::hermitian(dim, &mut r);
        let u = random::unitary_propagator(dim, 1.0, &mut r);
        let basis = random::orthonormal_basis(dim, &mut r);
        let d = weak::decompose_expectation(&pre, &a, &u, &basis).unwrap();
        prop_assert!(d.residual <= 1e-10);
        let total: f64 = d.terms.iter().map(|t| t.probability).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn spin_propagators_compose(omega in -6.0f64..6.0, s in -4.0f64..4.0, t in -4.0f64..4.0) {
        let u = spin_propagator(omega, s).compose(&spin_propagator(omega, t)).unwrap();
        prop_assert!(u.max_diff(&spin_propagator(omega, s + t)) <= 1e-12);
        prop_assert!(u.unitarity_defect() <= 1e-12);
        prop_assert!(spin_propagator(omega, s).adjoint().max_diff(&spin_propagator(omega, -s)) <= 1e-12);
    }

    #[test]
    fn spin_closed_forms_track_kernel(omega in 0.1f64..5.0, t_i in -2.0f64..2.0, span in 0.05f64..3.0, frac in 0.0f64..=1.0) {
        let p = spin::SpinParams::new(omega, t_i, t_i + span).unwrap();
        let t = t_i + frac * span;
        for choice in [spin::PostChoice::XPlus, spin::PostChoice::XMinus, spin::PostChoice::YPlus] {
            // Near-singular windows are either rejected or agree; both are fine.
            if let (Ok(c), Ok(k)) = (spin::spin_weak_closed(&choice, &p, t), spin::spin_weak_numeric(&choice, &p, t, &spin::p_x_plus())) {
                if k.norm() < 1e6 {
                    prop_assert!((c - k).norm() <= 1e-9 * (1.0 + k.norm()), "{choice:?}: {c} vs {k}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bath_propagator_is_unitary_and_composes(n_half in 1usize..25, gamma in 0.1f64..2.0, s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let bath = BathSpec::with_gamma(n_half, gamma, 0.1).unwrap();
        let e = BathEigen::new(&bath).unwrap();
        let us = e.propagator(s).unwrap();
        let ut = e.propagator(t).unwrap();
        prop_assert!(us.unitarity_defect() <= 1e-12);
        prop_assert!(us.compose(&ut).unwrap().max_diff(&e.propagator(s + t).unwrap()) <= 1e-12);
        let col = e.column(0, t);
        let dense = e.propagator(t).unwrap();
        for row in 0..bath.dim() {
            prop_assert!((col[row] - dense.matrix()[(row, 0)]).norm() <= 1e-12);
        }
    }

    #[test]
    fn bath_decomposition_on_small_bath(seed in any::<u64>(), t in 0.0f64..5.0) {
        let bath = BathSpec::with_gamma(10, 1.0, 0.1).unwrap();
        let e = BathEigen::new(&bath).unwrap();
        let mut r = rng(seed);
        let pre = StateVector::basis(bath.dim(), 0).unwrap();
        let a = random::hermitian(bath.dim(), &mut r);
        let basis = random::orthonormal_basis(bath.dim(), &mut r);
        let d = weak::decompose_expectation(&pre, &a, &e.propagator(t).unwrap(), &basis).unwrap();
        prop_assert!(d.residual <= 1e-8);
    }
}
