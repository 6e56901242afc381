mod common;

use common::{
    close, hermitian_eigenvalues_oracle, joint_oracle, partial_trace_oracle, rate_oracle,
    suite_attack,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqkd::entropy::{binary_entropy, block_diag_entropy, shannon_entropy, von_neumann_entropy};
use sqkd::keyrate::{
    cap_cal_b, cross_overlap_lower_bound, joint_distribution, key_rate_bound, lambda_tilde, s_bec,
    s_ec_upper,
};
use sqkd::linalg::{
    hermitian_eigenvalues, partial_trace, ComplexOperator, ComplexVector, Subsystem, C64,
};
use sqkd::random::{haar_unitary, random_hermitian};
use sqkd::scenario::{symmetric_stats, Scenario, ScenarioParams};
use sqkd::{ChannelStatistics, CollectiveAttack, Error};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `U diag(w) U^†` with random weights summing to one.
fn random_density(dim: usize, seed: u64) -> ComplexOperator {
    let mut r = rng(seed);
    let u = haar_unitary(dim, &mut r);
    let raw: Vec<f64> = (0..dim)
        .map(|n| ((seed as f64 + 1.3) * (n as f64 + 0.7)).sin().abs() + 1e-3)
        .collect();
    let total: f64 = raw.iter().sum();
    let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    &(&u * &ComplexOperator::from_diagonal(&w)) * &u.adjoint()
}

fn random_vector(dim: usize, seed: u64) -> ComplexVector {
    let entries = (0..dim)
        .map(|n| {
            let x = (seed as f64 * 0.37 + n as f64 * 1.91).sin();
            let y = (seed as f64 * 0.73 + n as f64 * 0.53).cos();
            C64::new(x, y)
        })
        .collect();
    ComplexVector::from_vec(entries)
}

fn stats_strategy() -> impl Strategy<Value = ChannelStatistics> {
    (
        prop::array::uniform4(0.0f64..1.0),
        prop::array::uniform4(0.0f64..1.0),
        0.0f64..0.5,
        0.0f64..0.5,
    )
        .prop_filter_map("empty block", |(a, b, pm, mp)| {
            let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
            if sa < 1e-6 || sb < 1e-6 {
                return None;
            }
            let z = [
                [[a[0] / sa, a[1] / sa], [a[2] / sa, a[3] / sa]],
                [[b[0] / sb, b[1] / sb], [b[2] / sb, b[3] / sb]],
            ];
            ChannelStatistics::new(z, pm, mp).ok()
        })
}

#[test]
fn eigenvalue_oracle_agrees_on_known_matrix() {
    // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
    let m = ComplexOperator::from_row_slice(
        2,
        &[
            C64::new(2.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, -1.0),
            C64::new(2.0, 0.0),
        ],
    )
    .unwrap();
    let oracle = hermitian_eigenvalues_oracle(&m);
    assert!(close(oracle[0], 3.0, 1e-12) && close(oracle[1], 1.0, 1e-12));
    let lib = hermitian_eigenvalues(&m).unwrap();
    assert!(close(lib[0], 3.0, 1e-12) && close(lib[1], 1.0, 1e-12));
}

#[test]
fn eigenvalues_match_jacobi_oracle() {
    let mut r = rng(11);
    for dim in 1..=8 {
        for _ in 0..20 {
            let h = random_hermitian(dim, &mut r);
            let lib = hermitian_eigenvalues(&h).unwrap();
            let oracle = hermitian_eigenvalues_oracle(&h);
            for (a, b) in lib.iter().zip(&oracle) {
                assert!(close(*a, *b, 1e-10), "dim {dim}: {lib:?} vs {oracle:?}");
            }
            let sum: f64 = lib.iter().sum();
            assert!(close(sum, h.trace().re, 1e-9));
        }
    }
}

#[test]
fn non_hermitian_is_rejected() {
    let m = ComplexOperator::from_row_slice(
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
    .unwrap();
    assert!(matches!(
        hermitian_eigenvalues(&m),
        Err(Error::NotHermitian { .. })
    ));
}

#[test]
fn partial_trace_matches_index_sums() {
    for (da, db) in [(1, 3), (2, 2), (2, 4), (3, 2), (4, 3)] {
        let rho = random_density(da * db, (da * 10 + db) as u64);
        for (keep, first) in [(Subsystem::First, true), (Subsystem::Second, false)] {
            let lib = partial_trace(&rho, (da, db), keep).unwrap();
            let oracle = partial_trace_oracle(&rho, da, db, first);
            for (i, row) in oracle.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    assert!((lib.get(i, j) - z).norm() < 1e-12);
                }
            }
            assert!(close(lib.trace().re, 1.0, 1e-10));
            let nothing = partial_trace(&lib, (1, lib.dim()), Subsystem::Second).unwrap();
            assert!(close(nothing.trace().re, 1.0, 1e-10));
        }
    }
    assert!(partial_trace(&ComplexOperator::identity(6), (4, 2), Subsystem::First).is_err());
}

#[test]
fn tensor_product_acts_factorwise() {
    let mut r = rng(5);
    for (da, db) in [(2, 2), (2, 3), (3, 4)] {
        let a = haar_unitary(da, &mut r);
        let b = random_hermitian(db, &mut r);
        let x = random_vector(da, 1);
        let y = random_vector(db, 2);
        let lhs = a.tensor(&b).apply(&x.tensor(&y));
        let rhs = a.apply(&x).tensor(&b.apply(&y));
        assert!((&lhs - &rhs).norm_sqr().sqrt() < 1e-12);
    }
}

#[test]
fn entropy_reference_values() {
    assert!(close(
        binary_entropy(0.25).unwrap(),
        0.8112781244591328,
        1e-15
    ));
    assert!(close(
        shannon_entropy(&[0.5, 0.25, 0.125, 0.125]).unwrap(),
        1.75,
        1e-15
    ));
    assert!(shannon_entropy(&[0.5, 0.6]).is_err());
}

#[test]
fn von_neumann_within_bounds() {
    for n in 0..200u64 {
        let dim = 1 + (n as usize % 8);
        let s = von_neumann_entropy(&random_density(dim, n)).unwrap();
        assert!(
            s >= -1e-12 && s <= (dim as f64).log2() + 1e-9,
            "dim {dim}: {s}"
        );
    }
    let mixed = ComplexOperator::identity(4).scale(0.25);
    assert!(close(von_neumann_entropy(&mixed).unwrap(), 2.0, 1e-12));
}

#[test]
fn block_entropy_matches_assembled_operator() {
    let mut count = 0;
    for n in 0..1000u64 {
        let blocks_n = 1 + (n as usize % 4);
        let dims: Vec<usize> = (0..blocks_n)
            .map(|b| 1 + ((n as usize * 7 + b * 3) % 8))
            .collect();
        let raw: Vec<f64> = (0..blocks_n)
            .map(|b| ((n + b as u64) as f64 * 0.917).sin().abs() + 0.01)
            .collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let blocks: Vec<ComplexOperator> = dims
            .iter()
            .enumerate()
            .map(|(b, &d)| random_density(d, n * 8 + b as u64))
            .collect();
        let scaled: Vec<ComplexOperator> = blocks
            .iter()
            .zip(&weights)
            .map(|(s, w)| s.scale(*w))
            .collect();
        let direct = von_neumann_entropy(&ComplexOperator::block_diagonal(&scaled)).unwrap();
        let split = block_diag_entropy(&weights, &blocks).unwrap();
        assert!(
            close(direct, split, 1e-9),
            "instance {n}: {direct} vs {split}"
        );
        count += 1;
    }
    assert_eq!(count, 1000);
}

#[test]
fn frozen_key_rate_values() {
    // Independent floating-point evaluation of the full chain.
    let s = symmetric_stats(ScenarioParams::new(0.03, 0.03, 0.03).unwrap());
    assert!(close(
        key_rate_bound(&s).unwrap().rate,
        0.3242022300704286,
        1e-12
    ));
    // Hand arithmetic: 0.9 - 0.0475 - 0.0025 - 0.0475 - 4 * 0.0475.
    let s = symmetric_stats(ScenarioParams::new(0.05, 0.05, 0.05).unwrap());
    assert!(close(cross_overlap_lower_bound(&s), 0.6125, 1e-12));
}

#[test]
fn frozen_exact_rates() {
    // Independent dense simulation of Alice, Eve and Bob step by step.
    let cases = [
        (
            CollectiveAttack::symmetric(0.05, 0.05).unwrap(),
            0.7136030428840436,
        ),
        (
            CollectiveAttack::symmetric(0.03, 0.07).unwrap(),
            0.6340763490997766,
        ),
        (CollectiveAttack::z_measure(), 0.0),
        (CollectiveAttack::identity(1), 1.0),
    ];
    for (attack, want) in cases {
        assert!(close(attack.exact_collective_rate().unwrap(), want, 1e-9));
    }
}

#[test]
fn symmetric_attack_realizes_symmetric_statistics() {
    let attack = CollectiveAttack::symmetric(0.04, 0.06).unwrap();
    let got = attack.statistics();
    let want = symmetric_stats(ScenarioParams::new(0.04, 0.06, 0.0).unwrap());
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                assert!(close(got.p(i, j, k), want.p(i, j, k), 1e-12));
            }
        }
    }
}

#[test]
fn plus_minus_two_paths() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = ComplexVector::from_real(&[s, s]);
    let minus = ComplexVector::from_real(&[s, -s]);
    for n in 0..60 {
        let attack = suite_attack(n);
        let d = attack.ancilla_dim();
        let zero = ComplexVector::basis(d, 0);
        let stats = attack.statistics();
        for (sent, seen, want) in [
            (&plus, &minus, stats.p_plus_minus()),
            (&minus, &plus, stats.p_minus_plus()),
        ] {
            let out = attack
                .reverse()
                .apply(&attack.forward().apply(&sent.tensor(&zero)));
            let projector = ComplexOperator::projector(seen).tensor(&ComplexOperator::identity(d));
            let born = projector.apply(&out).norm_sqr();
            assert!(close(born, want, 1e-10), "attack {n}: {born} vs {want}");
        }
    }
}

#[test]
fn attack_statistics_are_distributions() {
    for n in 0..60 {
        let s = suite_attack(n).statistics();
        for v in s.to_array() {
            assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        }
        for i in 0..2 {
            assert!(close(s.block_sum(i), 1.0, 1e-9));
        }
    }
}

#[test]
fn s_bec_closed_form_matches_state() {
    for n in 0..60 {
        let attack = suite_attack(n);
        let direct = von_neumann_entropy(&attack.rho_bec()).unwrap();
        assert!(
            close(direct, s_bec(&attack.statistics()), 1e-9),
            "attack {n}"
        );
    }
}

#[test]
fn s_ec_bound_is_an_upper_bound() {
    for n in 0..120 {
        let attack = suite_attack(n);
        let stats = attack.statistics();
        let d = attack.ancilla_dim();
        let rho_ec = partial_trace(&attack.rho_bec(), (2, 4 * d), Subsystem::Second).unwrap();
        let exact = von_neumann_entropy(&rho_ec).unwrap();
        let cal_b = cap_cal_b(cross_overlap_lower_bound(&stats));
        let Ok(lam) = lambda_tilde(stats.p(0, 0, 0), stats.p(1, 1, 1), cal_b) else {
            continue;
        };
        assert!(s_ec_upper(&stats, lam.value) >= exact - 1e-9, "attack {n}");
    }
}

#[test]
fn overlap_bound_and_soundness_on_suite() {
    for n in 0..150 {
        let attack = suite_attack(n);
        let stats = attack.statistics();
        assert!(attack.overlap_e000_e131().re >= cross_overlap_lower_bound(&stats) - 1e-9);
        if let Ok(r) = key_rate_bound(&stats) {
            assert!(
                r.rate <= attack.exact_collective_rate().unwrap() + 1e-9,
                "attack {n}"
            );
        }
        assert!(attack.identity_residuals().max() < 1e-9);
    }
}

#[test]
fn bound_is_tight_for_identity_and_cnot() {
    let id = CollectiveAttack::identity(2);
    assert!(close(
        key_rate_bound(&id.statistics()).unwrap().rate,
        id.exact_collective_rate().unwrap(),
        1e-12
    ));
    // Copying the bit leaves p_+- = p_-+ = 1/2: no overlap information and no key.
    let cnot = CollectiveAttack::z_measure();
    let s = cnot.statistics();
    assert!(close(s.p_plus_minus(), 0.5, 1e-12));
    assert!(close(key_rate_bound(&s).unwrap().rate, 0.0, 1e-12));
}

#[test]
fn rate_decreases_with_x_noise() {
    for sc in Scenario::ALL {
        for n in 1..=40 {
            let q = n as f64 * 0.002;
            let r: Vec<f64> = [0.5, 1.0, 2.0]
                .iter()
                .map(|&x| sc.rate_at(q, x).unwrap())
                .collect();
            assert!(r[0] >= r[1] && r[1] >= r[2], "{sc} at {q}: {r:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rate_matches_oracle(s in stats_strategy()) {
        match (key_rate_bound(&s), rate_oracle(&s)) {
            (Ok(r), Some(o)) => prop_assert!(close(r.rate, o, 1e-10), "{} vs {}", r.rate, o),
            (Err(Error::TooMuchNoise { .. }), None) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }

    #[test]
    fn joint_matches_enumeration(s in stats_strategy()) {
        let lib = joint_distribution(&s);
        let o = joint_oracle(&s);
        let flat = [o[0][0], o[0][1], o[1][0], o[1][1]];
        for (a, b) in lib.iter().zip(flat) {
            prop_assert!(close(*a, b, 1e-15));
        }
    }

    #[test]
    fn shrinking_overlap_bound_raises_s_ec(s in stats_strategy(), hi in 0.0f64..1.0, frac in 0.0f64..1.0) {
        let lo = hi * frac;
        let (p000, p111) = (s.p(0, 0, 0), s.p(1, 1, 1));
        prop_assume!(p000 > 0.0);
        let l_hi = lambda_tilde(p000, p111, hi).unwrap().value;
        let l_lo = lambda_tilde(p000, p111, lo).unwrap().value;
        prop_assert!(s_ec_upper(&s, l_lo) >= s_ec_upper(&s, l_hi) - 1e-12);
    }

    #[test]
    fn random_attacks_satisfy_identities(seed in any::<u64>(), d_index in 0usize..3, weak in any::<bool>()) {
        let d = [1, 2, 4][d_index];
        let mut r = rng(seed);
        let attack = if weak {
            CollectiveAttack::weak_random(d, 0.3, &mut r).unwrap()
        } else {
            CollectiveAttack::haar_random(d, &mut r).unwrap()
        };
        prop_assert!(attack.identity_residuals().max() < 1e-9);
        let h = attack.state_hygiene().unwrap();
        prop_assert!(h.min_eigenvalue >= -1e-10 && h.trace_deviation <= 1e-10);
        if let Ok(rep) = key_rate_bound(&attack.statistics()) {
            prop_assert!(rep.rate <= attack.exact_collective_rate().unwrap() + 1e-9);
        }
    }

    #[test]
    fn haar_unitaries_are_unitary(seed in any::<u64>(), dim in 1usize..10) {
        prop_assert!(haar_unitary(dim, &mut rng(seed)).unitarity_defect() < 1e-10);
    }
}
