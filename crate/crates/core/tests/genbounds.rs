use approx::assert_abs_diff_eq;
use fedmm::datagen::StreamRng;
use fedmm::genbounds::{
    estimate_rademacher, fixed_y_bound, vc_rademacher_bound, worst_case_bound, BoundInputs,
    FiniteHypothesisSample,
};
use proptest::prelude::*;

fn inputs(m: usize, n: usize, m_i: Vec<f64>) -> BoundInputs<f64> {
    BoundInputs {
        m,
        n,
        m_i,
        m_i_profiles: Vec::new(),
        cover_size: 1.0,
        delta: (-1.0f64).exp(),
        epsilon: 0.1,
        l_y: 0.0,
        rademacher: 0.0,
    }
}

#[test]
fn slack_vanishes_without_bounds() {
    let b = inputs(4, 50, vec![0.0; 4]);
    let t = fixed_y_bound(&b, 0.37).unwrap();
    assert_eq!(t.total, 0.37);
    assert_eq!(t.concentration, 0.0);
}

#[test]
fn single_agent_hand_value() {
    // √(1/(2·100) · log(1/e⁻¹)) = √0.005
    let b = inputs(1, 100, vec![1.0]);
    let t = fixed_y_bound(&b, 0.25).unwrap();
    assert_abs_diff_eq!(t.concentration, 0.07071067811865475, epsilon = 1e-12);
    assert_abs_diff_eq!(t.total, 0.25 + 0.07071067811865475, epsilon = 1e-12);
}

#[test]
fn all_terms_hand_value() {
    // m = 2, n = 10, M = (1, 3): Σ M² = 10, 10/(2·4·10) = 0.125;
    // log(8/0.05) = log 160.
    let mut b = inputs(2, 10, vec![1.0, 3.0]);
    b.cover_size = 8.0;
    b.delta = 0.05;
    b.epsilon = 0.2;
    b.l_y = 1.5;
    b.rademacher = 0.04;
    let t = fixed_y_bound(&b, 1.0).unwrap();
    let conc = (0.125 * 160f64.ln()).sqrt();
    assert_abs_diff_eq!(t.complexity, 0.08, epsilon = 1e-15);
    assert_abs_diff_eq!(t.discretization, 0.6, epsilon = 1e-15);
    assert_abs_diff_eq!(t.concentration, conc, epsilon = 1e-12);
    assert_abs_diff_eq!(t.total, 1.0 + 0.08 + conc + 0.6, epsilon = 1e-12);
}

#[test]
fn doubling_samples_scales_concentration() {
    let mut b = inputs(3, 40, vec![0.5, 2.0, 1.0]);
    b.cover_size = 5.0;
    let a = fixed_y_bound(&b, 0.0).unwrap().concentration;
    b.n = 80;
    let c = fixed_y_bound(&b, 0.0).unwrap().concentration;
    assert_abs_diff_eq!(c, a / 2f64.sqrt(), epsilon = 1e-15);
}

#[test]
fn invalid_inputs_are_rejected() {
    let mut b = inputs(1, 10, vec![1.0]);
    b.delta = 1.0;
    assert!(fixed_y_bound(&b, 0.0).is_err());
    let mut b = inputs(1, 10, vec![1.0]);
    b.cover_size = 0.5;
    assert!(fixed_y_bound(&b, 0.0).is_err());
    assert!(worst_case_bound(&b, 0.0).is_err());
    assert!(fixed_y_bound(&inputs(2, 10, vec![1.0]), 0.0).is_err());
    assert!(fixed_y_bound(&inputs(1, 10, vec![-1.0]), 0.0).is_err());
}

#[test]
fn worst_case_bound_uses_the_largest_profile() {
    let mut b = inputs(2, 10, vec![1.0, 1.0]);
    b.cover_size = 3.0;
    // Same M_i at every y: identical to the fixed-y bound with g for f.
    b.m_i_profiles = vec![vec![1.0, 1.0]];
    assert_eq!(
        worst_case_bound(&b, 0.9).unwrap(),
        fixed_y_bound(&b, 0.9).unwrap()
    );
    b.m_i_profiles.push(vec![0.0, 3.0]);
    let worst = worst_case_bound(&b, 0.9).unwrap();
    let mut reference = b.clone();
    reference.m_i = vec![0.0, 3.0];
    reference.m_i_profiles.clear();
    assert_eq!(worst, fixed_y_bound(&reference, 0.9).unwrap());
    assert!(worst.total >= 0.9);
}

#[test]
fn agnostic_mixture_special_case() {
    // M_i(y) = m·y_i·M on the simplex turns the concentration term into
    // √(M² Σ y_i² / (2n) · log(|𝒴_ε|/δ)).
    let (m, n, big_m) = (4, 25, 2.5);
    let y = [0.1, 0.2, 0.3, 0.4];
    let mut b = inputs(m, n, y.iter().map(|&yi| m as f64 * yi * big_m).collect());
    b.cover_size = 12.0;
    b.delta = 0.1;
    let t = fixed_y_bound(&b, 0.0).unwrap();
    let sum_y2: f64 = y.iter().map(|v| v * v).sum();
    let expected = (big_m * big_m * sum_y2 / (2.0 * n as f64) * (12.0f64 / 0.1).ln()).sqrt();
    assert_abs_diff_eq!(t.concentration, expected, epsilon = 1e-12);
}

#[test]
fn vc_bound_hand_values() {
    assert_abs_diff_eq!(
        vc_rademacher_bound(10, 100, 5, 10.0).unwrap(),
        0.2509644868611501,
        epsilon = 1e-12
    );
    // d = mn: the log term is 1.
    let (m, n) = (3usize, 7usize);
    assert_abs_diff_eq!(
        vc_rademacher_bound(m, n, m * n, 6.0).unwrap(),
        (2.0 * 6.0 / (9.0 * 7.0) * 21.0f64).sqrt(),
        epsilon = 1e-12
    );
    let base = vc_rademacher_bound(5, 20, 4, 3.0).unwrap();
    // Scaling every M_i by c scales Σ M_i² by c².
    assert_abs_diff_eq!(
        vc_rademacher_bound(5, 20, 4, 3.0 * 9.0).unwrap(),
        3.0 * base,
        epsilon = 1e-12
    );
    assert!(vc_rademacher_bound(2, 2, 5, 1.0).is_err());
    assert!(vc_rademacher_bound(2, 2, 0, 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn bounds_are_monotone(
        m_i in proptest::collection::vec(0.0f64..5.0, 1..6),
        n in 1usize..500,
        cover in 1.0f64..1e4,
        delta in 0.001f64..0.99,
        eps in 1e-4f64..2.0,
        l_y in 0.0f64..10.0,
        rad in 0.0f64..1.0,
        bump in 1.0f64..3.0,
        which in 0usize..7,
    ) {
        let m = m_i.len();
        let b = BoundInputs {
            m, n, m_i, m_i_profiles: Vec::new(), cover_size: cover, delta,
            epsilon: eps, l_y, rademacher: rad,
        };
        let mut c = b.clone();
        match which {
            0 => c.m_i[0] *= bump,
            1 => c.cover_size *= bump,
            2 => c.l_y = c.l_y * bump + 0.1,
            3 => c.epsilon *= bump,
            4 => c.delta /= bump,
            5 => c.n = ((c.n as f64) / bump).floor().max(1.0) as usize,
            _ => c.rademacher += bump,
        }
        let before = fixed_y_bound(&b, 0.3).unwrap().total;
        let after = fixed_y_bound(&c, 0.3).unwrap().total;
        prop_assert!(after >= before, "{which}: {after} < {before}");
        let before = worst_case_bound(&b, 0.3).unwrap().total;
        let after = worst_case_bound(&c, 0.3).unwrap().total;
        prop_assert!(after >= before);
    }
}

#[test]
fn single_candidate_has_zero_complexity() {
    let mut rng = StreamRng::new(17, 0, 1);
    let row = rng.normals(40, 1.0, 2.0);
    let s = FiniteHypothesisSample::new(4, 10, vec![row]).unwrap();
    let e = estimate_rademacher(&s, 10_000, 3).unwrap();
    assert!(e.mean.abs() <= 4.0 * e.std_error, "{e:?}");
}

#[test]
fn sign_pair_has_unit_complexity() {
    let s = FiniteHypothesisSample::new(1, 1, vec![vec![1.0], vec![-1.0]]).unwrap();
    let e = estimate_rademacher(&s, 10_000, 0).unwrap();
    assert_eq!(e.mean, 1.0);
    assert_eq!(e.std_error, 0.0);
}

/// Exact expectation by enumerating all 2^(mn) sign patterns.
fn exact_rademacher(s: &FiniteHypothesisSample<f64>) -> f64 {
    let k = s.num_samples();
    let mut total = 0.0;
    for mask in 0u32..(1 << k) {
        let sup = (0..s.num_candidates())
            .map(|r| {
                s.row(r)
                    .iter()
                    .enumerate()
                    .map(|(j, &l)| if mask >> j & 1 == 1 { l } else { -l })
                    .sum::<f64>()
                    / k as f64
            })
            .fold(f64::NEG_INFINITY, f64::max);
        total += sup;
    }
    total / f64::from(1u32 << k)
}

#[test]
fn estimator_matches_enumeration_and_massart() {
    for seed in 0..20u64 {
        let mut rng = StreamRng::new(seed, 0, 2);
        let rows = 2 + (seed as usize % 5);
        let table: Vec<Vec<f64>> = (0..rows).map(|_| rng.normals(10, 0.0, 1.0)).collect();
        let s = FiniteHypothesisSample::new(2, 5, table.clone()).unwrap();
        let e = estimate_rademacher(&s, 10_000, seed).unwrap();
        let exact = exact_rademacher(&s);
        assert!(
            (e.mean - exact).abs() <= 4.0 * e.std_error + 1e-12,
            "seed {seed}: {} vs {exact}",
            e.mean
        );
        assert!(e.mean <= s.massart_cap() + 4.0 * e.std_error, "seed {seed}");

        // Closing the set under sign flips makes every per-draw supremum ≥ 0.
        let mut closed = table.clone();
        closed.extend(
            table
                .iter()
                .map(|r| r.iter().map(|v| -v).collect::<Vec<_>>()),
        );
        let s = FiniteHypothesisSample::new(2, 5, closed).unwrap();
        let e = estimate_rademacher(&s, 10_000, seed).unwrap();
        assert!(e.mean >= 0.0);
        assert!(e.mean <= s.massart_cap() + 4.0 * e.std_error);
    }
}

#[test]
fn estimator_is_deterministic_and_validates() {
    let s =
        FiniteHypothesisSample::new(1, 3, vec![vec![0.1, 0.5, -0.2], vec![1.0, 0.0, 0.3]]).unwrap();
    assert_eq!(
        estimate_rademacher(&s, 500, 11).unwrap(),
        estimate_rademacher(&s, 500, 11).unwrap()
    );
    assert!(estimate_rademacher(&s, 0, 11).is_err());
    assert!(FiniteHypothesisSample::<f64>::new(1, 3, vec![]).is_err());
    assert!(FiniteHypothesisSample::new(1, 3, vec![vec![1.0, 2.0]]).is_err());
    assert!(FiniteHypothesisSample::new(1, 1, vec![vec![f64::NAN]]).is_err());
}
