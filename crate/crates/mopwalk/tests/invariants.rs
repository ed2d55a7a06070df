use mopwalk::arith::rat;
use mopwalk::jp::{jacobi_band, type_ii_seq};
use mopwalk::markov::{jp_stochastic_i, jp_stochastic_ii};
use mopwalk::oracle::{build_moment_matrix, build_scaled_moment_matrix, gauss_borel, oracle_jacobi, oracle_type_ii};
use mopwalk::params::JPParams;
use mopwalk::spectral::{first_passage_fn, ChainType, KmEngine};
use mopwalk::stepline::{decompose, index_of, Composition};
use proptest::prelude::*;
use rug::{Float, Rational};

fn small_rational(lo: i64, hi: i64) -> impl Strategy<Value = Rational> {
    (lo..hi, 1i64..9).prop_map(|(p, q)| rat(p, q))
}

/// Triples inside the nonnegativity region.
fn positive_params() -> impl Strategy<Value = JPParams> {
    (small_rational(-7, 24), small_rational(-7, 8), small_rational(-7, 24))
        .prop_map(|(a, d, g)| (Rational::from(&a - &d), a, g))
        .prop_filter_map("admissible", |(b, a, g)| {
            JPParams::new(a, b, g).ok().filter(JPParams::in_positivity_region)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stepline_index_round_trips(parts in prop::collection::vec(1u64..5, 1..5), i in 0u64..500) {
        let comp = Composition::new(parts).unwrap();
        let d = decompose(i, &comp);
        prop_assert_eq!(index_of(d.k, d.a, &comp), i);
        prop_assert_eq!(d.nu.iter().sum::<u64>(), i);
    }

    #[test]
    fn jacobi_band_nonnegative_in_region(p in positive_params()) {
        let j = jacobi_band(16, &p).unwrap();
        prop_assert_eq!(j.first_negative(), None);
    }

    #[test]
    fn type_ii_rows_are_stochastic(p in positive_params()) {
        let m = jp_stochastic_ii(14, &p).unwrap();
        prop_assert_eq!(m.first_negative(), None);
        for n in 0..m.valid_rows() {
            prop_assert_eq!(m.row_sum(n), 1);
        }
    }

    #[test]
    fn type_ii_zeros_lie_in_unit_interval(p in positive_params(), l in 1usize..10) {
        let b = type_ii_seq(l, &p).unwrap();
        prop_assert_eq!(b.degree(), Some(l));
        prop_assert!(b.is_squarefree());
        prop_assert_eq!(b.count_roots_in(&rat(0, 1), &rat(1, 1)), l);
    }

    #[test]
    fn weight_scaling_leaves_polynomials_fixed(
        p in positive_params(),
        c1 in (1i64..20, 1i64..20).prop_map(|(a, b)| rat(a, b)),
        c2 in (1i64..20, 1i64..20).prop_map(|(a, b)| rat(a, b)),
    ) {
        let base = gauss_borel(&build_moment_matrix(9, &p)).unwrap();
        let scaled = gauss_borel(&build_scaled_moment_matrix(9, &p, &c1, &c2)).unwrap();
        for l in 0..9 {
            prop_assert_eq!(oracle_type_ii(&base, l), oracle_type_ii(&scaled, l));
        }
        let (ja, jb) = (oracle_jacobi(&base).unwrap(), oracle_jacobi(&scaled).unwrap());
        for i in 0..6 {
            for k in ja.row_range(i) {
                prop_assert_eq!(ja.get(i, k), jb.get(i, k));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn type_i_rows_sum_to_one(p in positive_params()) {
        let m = jp_stochastic_i(12, &p, 192).unwrap();
        for n in 0..m.valid_rows() {
            let d = Float::with_val(192, m.row_sum(n) - 1u32).abs();
            prop_assert!(d < 1e-40, "row {} off by {}", n, d);
        }
    }

    #[test]
    fn multi_step_probabilities_are_bounded(p in positive_params(), r in 0usize..5) {
        let e = KmEngine::new(&p, 5, 4, 128).unwrap();
        for chain in [ChainType::TypeII, ChainType::TypeI] {
            for n in 0..=5 {
                let mut total = Float::with_val(128, 0);
                for m in 0..=5 {
                    let v = e.transition(chain, n, m, r);
                    prop_assert!(v >= -1e-20 && Float::with_val(128, &v - 1u32) <= 1e-20, "P^{}[{}][{}] = {}", r, n, m, v);
                    total += v;
                }
                prop_assert!(total - 1u32 <= 1e-20);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn first_passage_grows_with_s(s1 in 0.05f64..0.9, ds in 0.01f64..0.09, n in 0usize..3) {
        let p = JPParams::recurrent_example();
        let lo = first_passage_fn(ChainType::TypeII, n, n, &Float::with_val(96, s1), &p, 96).unwrap();
        let hi = first_passage_fn(ChainType::TypeII, n, n, &Float::with_val(96, s1 + ds), &p, 96).unwrap();
        prop_assert!(lo >= 0 && lo < hi && hi <= 1);
    }
}
