use num_rational::BigRational;
use proptest::prelude::*;
use qcluster::{
    duplicate_seed, explore, explore_seeds, lambda_from_bcd, recover_lambda, ExploreOptions, IntMatrix, QuantumSeed,
    RationalMatrix, SeedFile, Violation,
};

// b_ij = d_j k and b_ji = -d_i k keeps DB skew-symmetric.
fn principal(n: usize, d: &[i64], ks: &[i64]) -> QuantumSeed {
    let mut b = IntMatrix::zeros(n, n);
    let mut it = ks.iter();
    for i in 0..n {
        for j in i + 1..n {
            let k = *it.next().unwrap();
            b.set(i, j, d[j] * k);
            b.set(j, i, -d[i] * k);
        }
    }
    let dr: Vec<BigRational> = d.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    let lambda = lambda_from_bcd(&b.to_rational(), &RationalMatrix::identity(n), &dr).unwrap();
    QuantumSeed::from_matrices(b.vstack(&IntMatrix::identity(n)).unwrap(), lambda.to_integer().unwrap()).unwrap()
}

fn seed_strategy() -> impl Strategy<Value = QuantumSeed> {
    (2usize..=3)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(1i64..=2, n), prop::collection::vec(-1i64..=1, n * (n - 1) / 2)))
        .prop_map(|(n, d, ks)| principal(n, &d, &ks))
}

fn word_strategy(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..3, 0..=max_len)
}

fn clip(word: &[usize], n: usize) -> Vec<usize> {
    word.iter().map(|&k| k % n).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mutation_is_an_involution(seed in seed_strategy(), word in word_strategy(3), k in 0usize..3) {
        let s = seed.mutate_word(&clip(&word, seed.n())).unwrap();
        let k = k % s.n();
        prop_assert_eq!(s.mutate(k).unwrap().mutate(k).unwrap(), s);
    }

    #[test]
    fn commutation_matrix_is_recovered(seed in seed_strategy(), word in word_strategy(4)) {
        let s = seed.mutate_word(&clip(&word, seed.n())).unwrap();
        prop_assert_eq!(&recover_lambda(s.vars()).unwrap(), s.lambda());
        prop_assert_eq!(s.d(), seed.d());
    }

    #[test]
    fn principal_seeds_stay_integrable(seed in seed_strategy(), word in word_strategy(4)) {
        let s = seed.mutate_word(&clip(&word, seed.n())).unwrap();
        prop_assert!(s.is_integrable());
        prop_assert!(s.sign_coherence().is_ok());
    }

    #[test]
    fn seed_files_round_trip(seed in seed_strategy(), word in word_strategy(3)) {
        let s = seed.mutate_word(&clip(&word, seed.n())).unwrap();
        let text = SeedFile::from_seed(&s).to_json();
        prop_assert_eq!(SeedFile::parse(&text).unwrap().to_seed().unwrap(), s);
    }

    #[test]
    fn duplicates_are_principal_and_integrable(seed in seed_strategy(), word in word_strategy(2)) {
        let s = seed.mutate_word(&clip(&word, seed.n())).unwrap();
        let dup = duplicate_seed(&s).unwrap();
        prop_assert_eq!(dup.seed().m(), 2 * s.n());
        prop_assert_eq!(dup.original_rank(), s.m());
        prop_assert!(qcluster::is_principal(dup.seed().b()));
        prop_assert!(dup.seed().is_integrable());
    }
}

#[test]
fn report_counts_are_consistent() {
    let seeds = [
        principal(2, &[1, 1], &[1]),
        principal(2, &[1, 2], &[1]),
        principal(3, &[1, 1, 1], &[1, 0, 1]),
    ];
    for seed in &seeds {
        let ex = explore_seeds(seed, &ExploreOptions::new(4)).unwrap();
        let r = &ex.report;
        assert!(r.nodes_visited >= r.distinct_seeds);
        assert_eq!(ex.seeds.len(), r.distinct_seeds);
        let flagged = r.counterexamples.iter().any(|c| c.violation == Violation::NotIntegrable);
        assert_eq!(r.all_integrable, Some(!flagged));
        for (word, s) in &ex.seeds {
            assert_eq!(&seed.mutate_word(word.letters()).unwrap(), s);
        }
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let seed = principal(3, &[1, 1, 1], &[1, 1, 0]);
    let base = explore(&seed, &ExploreOptions::new(5).jobs(1)).unwrap().to_json();
    for jobs in [2, 3, 8] {
        assert_eq!(explore(&seed, &ExploreOptions::new(5).jobs(jobs)).unwrap().to_json(), base);
    }
}
