use std::f64::consts::TAU;

use ll_spectrum::stats::{delta3_closed_form, lsd_histogram, ratio_statistic, synthetic_poisson_levels, unfold, UnfoldedSequence};
use ll_spectrum::{
    bethe_jacobian, bethe_residual, limit_rapidities, nu_shift, solve_state, CouplingLimit, ModelParams64, QuantumNumbers,
    SolverOptions64,
};
use proptest::prelude::*;
use proptest::sample::subsequence;

/// Odd N with distinct integer quantum numbers in (-8, 8).
fn quantum_numbers() -> impl Strategy<Value = Vec<i64>> {
    prop_oneof![Just(1usize), Just(3), Just(5), Just(7)].prop_flat_map(|n| subsequence((-7i64..=7).collect::<Vec<_>>(), n))
}

fn coupling() -> impl Strategy<Value = f64> {
    (-2.0f64..2.0).prop_map(|e| 10f64.powf(e))
}

fn solve(m: &[i64], c: f64) -> (QuantumNumbers, ll_spectrum::BetheState64) {
    let qn = QuantumNumbers::with_minimal_cutoff(m).unwrap();
    let p = ModelParams64::new(m.len(), TAU, c).unwrap();
    let s = solve_state(&qn, &p, &SolverOptions64::default()).unwrap();
    (qn, s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobian_matches_finite_differences(m in quantum_numbers(), c in coupling(), l in 1.0f64..20.0) {
        let qn = QuantumNumbers::with_minimal_cutoff(&m).unwrap();
        let p = ModelParams64::new(m.len(), l, c).unwrap();
        let lambda: Vec<f64> = qn.values::<f64>().iter().map(|x| x * TAU / l + 0.1 * x.sin()).collect();
        let jac = bethe_jacobian(&lambda, &p).unwrap();
        let h = 1e-6;
        for j in 0..m.len() {
            let (mut up, mut down) = (lambda.clone(), lambda.clone());
            up[j] += h;
            down[j] -= h;
            let fu = bethe_residual(&up, &qn, &p).unwrap();
            let fd = bethe_residual(&down, &qn, &p).unwrap();
            for i in 0..m.len() {
                let numeric = (fu[i] - fd[i]) / (2.0 * h);
                prop_assert!((numeric - jac.get(i, j)).abs() < 1e-6, "J[{i}][{j}] = {} vs {numeric}", jac.get(i, j));
            }
        }
    }

    #[test]
    fn jacobian_is_symmetric(m in quantum_numbers(), c in coupling()) {
        let (_, s) = solve(&m, c);
        let p = ModelParams64::new(m.len(), TAU, c).unwrap();
        let jac = bethe_jacobian(&s.rapidities, &p).unwrap();
        for i in 0..m.len() {
            for j in 0..m.len() {
                prop_assert_eq!(jac.get(i, j), jac.get(j, i));
            }
        }
    }

    #[test]
    fn reflection_negates_rapidities(m in quantum_numbers(), c in coupling()) {
        let (_, s) = solve(&m, c);
        let neg: Vec<i64> = m.iter().map(|x| -x).collect();
        let (_, r) = solve(&neg, c);
        for (a, b) in s.rapidities.iter().zip(r.rapidities.iter().rev()) {
            prop_assert!((a + b).abs() < 1e-12);
        }
        prop_assert!((s.energy - r.energy).abs() <= 1e-12 * s.energy.max(1.0));
    }

    #[test]
    fn input_order_is_irrelevant(m in quantum_numbers(), c in coupling(), seed in any::<u64>()) {
        let mut shuffled = m.clone();
        // deterministic shuffle driven by the seed
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % (i + 1));
        }
        let (qa, a) = solve(&m, c);
        let (qb, b) = solve(&shuffled, c);
        prop_assert_eq!(qa, qb);
        prop_assert_eq!(a.rapidities, b.rapidities);
    }

    #[test]
    fn strong_coupling_deviation_halves(m in quantum_numbers(), e in 4.0f64..5.0) {
        prop_assume!(m.len() > 1);
        let c = 10f64.powf(e);
        let dev = |c: f64| {
            let (qn, s) = solve(&m, c);
            let p = ModelParams64::new(m.len(), TAU, c).unwrap();
            let tg = limit_rapidities(&qn, &p, CouplingLimit::Infinite);
            s.rapidities.iter().zip(&tg).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let ratio = dev(c) / dev(2.0 * c);
        prop_assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn energy_rises_with_coupling(m in quantum_numbers(), c in coupling(), f in 1.1f64..10.0) {
        let (qn, lo) = solve(&m, c);
        let (_, hi) = solve(&m, c * f);
        let p = ModelParams64::new(m.len(), TAU, c).unwrap();
        let free: f64 = limit_rapidities(&qn, &p, CouplingLimit::Zero).iter().map(|x| x * x).sum();
        let tg: f64 = limit_rapidities(&qn, &p, CouplingLimit::Infinite).iter().map(|x| x * x).sum();
        let slack = 1e-9 * tg.max(1.0);
        prop_assert!(free - slack <= lo.energy);
        prop_assert!(lo.energy <= hi.energy + slack);
        prop_assert!(hi.energy <= tg + slack);
    }

    #[test]
    fn shift_law(m in quantum_numbers(), c in coupling(), k in -3i64..=3) {
        let (qn, s) = solve(&m, c);
        let shifted: Vec<i64> = m.iter().map(|x| x + k).collect();
        let (qs, t) = solve(&shifted, c);
        let n = m.len() as i64;
        let tol = 10.0 * SolverOptions64::default().effective_tolerance(&t.rapidities);
        for (a, b) in s.rapidities.iter().zip(&t.rapidities) {
            prop_assert!((b - a - k as f64).abs() <= tol);
        }
        prop_assert_eq!(qs.total_momentum(), qn.total_momentum() + k * n);
        let nu = nu_shift(qn.total_momentum(), k, m.len()) as f64;
        prop_assert!((t.energy - s.energy - nu).abs() <= 1e-10 * t.energy.max(1.0));
    }

    #[test]
    fn ratio_statistic_is_affine_invariant(seed in any::<u64>(), a in 0.01f64..100.0, b in -1e3f64..1e3) {
        let e: Vec<f64> = synthetic_poisson_levels(300, seed);
        let moved: Vec<f64> = e.iter().map(|x| a * x + b).collect();
        let r0 = ratio_statistic(&e, 50).unwrap();
        let r1 = ratio_statistic(&moved, 50).unwrap();
        for (x, y) in r0.chi.iter().zip(&r1.chi) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn delta3_is_translation_invariant(seed in any::<u64>(), shift in -500.0f64..500.0, s in 1.0f64..150.0, w in 0.5f64..40.0) {
        let v: Vec<f64> = synthetic_poisson_levels(200, seed);
        prop_assume!(s + w < *v.last().unwrap() && s > v[0]);
        let moved: Vec<f64> = v.iter().map(|x| x + shift).collect();
        let d0 = delta3_closed_form(&UnfoldedSequence::from_unfolded(v).unwrap(), s, w).unwrap();
        let d1 = delta3_closed_form(&UnfoldedSequence::from_unfolded(moved).unwrap(), s + shift, w).unwrap();
        prop_assert!((d0 - d1).abs() < 1e-9 * d0.max(1.0), "{d0} vs {d1}");
        prop_assert!(d0 >= 0.0);
    }

    #[test]
    fn lsd_mass_accounts_for_overflow(seed in any::<u64>(), bins in 5usize..60, s_max in 0.5f64..8.0) {
        let u = unfold(&synthetic_poisson_levels::<f64>(500, seed), 1).unwrap();
        let h = lsd_histogram(&u, bins, s_max).unwrap();
        prop_assert!((h.mass() + h.overflow_mass() - 1.0).abs() < 1e-12);
        prop_assert!(h.mass() <= 1.0 + 1e-12);
    }

    #[test]
    fn linear_unfolding_is_idempotent(seed in any::<u64>()) {
        let once = unfold(&synthetic_poisson_levels::<f64>(400, seed), 1).unwrap();
        let twice = unfold(once.values(), 1).unwrap();
        for (a, b) in once.values().iter().zip(twice.values()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
