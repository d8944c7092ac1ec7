mod common;

use common::*;
use cutlab::cuts::waves_to_sequential;
use cutlab::geometry::{signature_sequential, signature_single};
use cutlab::learn::{sample_size_raw, pdim_bound, PdimBoundSpec, PdimFamily};
use cutlab::lp::{solve_relaxation, LpStatus, Row};
use cutlab::rational::{int, l1_norm, ratio, Rational};
use cutlab::search::{run_branch_and_cut, CutConfig, ScoringWeights};
use cutlab::{cg_cut, random_packing, sequential_cuts, wave_cuts, CutParameters};
use num::BigInt;
use proptest::prelude::*;

fn unit(den: i64) -> impl Strategy<Value = Rational> {
    (0..=den).prop_map(move |k| ratio(k, den))
}

fn units(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(unit(24), len)
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 96,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn cg_cut_is_valid(seed in 0u64..10_000, u in units(2)) {
        let ip = random_packing(seed, 3, 2, 4).unwrap();
        let cut = cg_cut(ip.a(), ip.b(), &u).unwrap();
        for p in integer_points(&ip, &[4, 4, 4]) {
            let lhs = p.iter().zip(&cut.alpha).fold(int(0), |a, (x, c)| a + c * int(*x));
            prop_assert!(lhs <= cut.beta);
        }
    }

    #[test]
    fn waves_equal_padded_sequence(seed in 0u64..10_000, a in units(2), b in units(2), c in units(4)) {
        let ip = random_packing(seed, 3, 2, 5).unwrap();
        let waves = vec![vec![a, b], vec![c.clone(), c]];
        let w = wave_cuts(&ip, &waves).unwrap();
        let s = sequential_cuts(&ip, &waves_to_sequential(&waves)).unwrap();
        let rows = |e: &cutlab::cuts::ExtendedInstance| {
            e.cuts().iter().map(|c| (c.alpha.clone(), c.beta.clone())).collect::<Vec<_>>()
        };
        prop_assert_eq!(rows(&w), rows(&s));
    }

    #[test]
    fn sequential_floors_stay_in_range(seed in 0u64..10_000, u1 in units(3), u2 in units(4), u3 in units(5)) {
        let ip = random_packing(seed, 3, 3, 5).unwrap();
        let us = vec![u1, u2, u3];
        let sig = signature_sequential(&ip, &us).unwrap();
        let n = ip.n();
        for (w, chunk) in sig.0.chunks(n + 1).enumerate() {
            let scale = BigInt::from(1u64 << w);
            for i in 0..n {
                let bound = &scale * l1_norm(&ip.column(i)).ceil().to_integer();
                prop_assert!(num::Signed::abs(&chunk[i]) <= bound);
            }
        }
    }

    #[test]
    fn equal_signatures_give_equal_cuts(seed in 0u64..10_000, u in units(2), v in units(2)) {
        let ip = random_packing(seed, 3, 2, 3).unwrap();
        let same = signature_single(ip.a(), ip.b(), &u).unwrap() == signature_single(ip.a(), ip.b(), &v).unwrap();
        let cu = cg_cut(ip.a(), ip.b(), &u).unwrap();
        let cv = cg_cut(ip.a(), ip.b(), &v).unwrap();
        prop_assert_eq!(same, cu.alpha == cv.alpha && cu.beta == cv.beta);
    }

    #[test]
    fn adding_a_row_never_raises_the_bound(seed in 0u64..10_000, coeffs in proptest::collection::vec(-4i64..=4, 3), rhs in -2i64..=10) {
        let ip = random_packing(seed, 3, 2, 4).unwrap();
        let base = solve_relaxation(&ip, &[]).unwrap();
        let row = Row::new(coeffs.iter().map(|&c| int(c)).collect(), int(rhs));
        let cut = solve_relaxation(&ip, &[row]).unwrap();
        if cut.status == LpStatus::Optimal {
            prop_assert!(cut.objective.unwrap() <= base.objective.unwrap());
        }
    }

    #[test]
    fn a_valid_cut_never_loses_the_optimum(seed in 0u64..10_000, u in units(2)) {
        let ip = random_packing(seed, 3, 2, 3).unwrap();
        let w = ScoringWeights::default();
        let plain = run_branch_and_cut(&ip, &w, &CutConfig::none(), 4096).unwrap();
        let cut = run_branch_and_cut(&ip, &w, &CutConfig::fixed(CutParameters::Single(u)), 4096).unwrap();
        prop_assert!(!plain.hit_cap && !cut.hit_cap);
        prop_assert_eq!(
            plain.final_incumbent.map(|i| i.value),
            cut.final_incumbent.map(|i| i.value)
        );
    }

    #[test]
    fn sample_size_is_monotone(eps in 0.01f64..0.99, delta in 0.01f64..0.99, pdim in 0.5f64..50.0, kappa in 1.0f64..500.0) {
        let base = sample_size_raw(eps, delta, pdim, kappa, 1.0).unwrap();
        prop_assert!(sample_size_raw(eps * 0.9, delta, pdim, kappa, 1.0).unwrap() > base);
        prop_assert!(sample_size_raw(eps, delta * 0.9, pdim, kappa, 1.0).unwrap() > base);
        prop_assert!(sample_size_raw(eps, delta, pdim + 1.0, kappa, 1.0).unwrap() > base);
        prop_assert!(sample_size_raw(eps, delta, pdim, kappa + 1.0, 1.0).unwrap() > base);
    }

    #[test]
    fn pdim_bounds_grow_with_sizes(m in 1u64..20, n in 1u64..20, w in 1u64..5, k in 1u64..5, alpha in 0.0f64..100.0, beta in 0.0f64..100.0) {
        let f = |m, n, w, k, a, b| pdim_bound(&PdimBoundSpec::new(PdimFamily::Waves { w, k }, m, n, a, b), 1.0).unwrap();
        let base = f(m, n, w, k, alpha, beta);
        prop_assert!(f(m + 1, n, w, k, alpha, beta) > base);
        prop_assert!(f(m, n + 1, w, k, alpha, beta) > base);
        prop_assert!(f(m, n, w + 1, k, alpha, beta) > base);
        prop_assert!(f(m, n, w, k + 1, alpha, beta) > base);
        prop_assert!(f(m, n, w, k, alpha + 1.0, beta) > base);
        prop_assert!(f(m, n, w, k, alpha, beta + 1.0) > base);
    }
}
