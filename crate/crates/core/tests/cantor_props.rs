use std::collections::HashSet;

use metrifract::cantor::{build_system, measure_account, random_code_pairs, verify_modulus, CantorSystem};
use metrifract::metric::CodePoint;
use metrifract::schedule::{GSpec, SlowSchedule};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn system() -> impl Strategy<Value = CantorSystem> {
    (
        prop::collection::vec(0usize..=3, 1..=4),
        1i64..=9,
        1usize..=10,
    )
        .prop_filter_map("needs a coordinate", |(g, tenths, depth)| {
            let spec: GSpec = format!("list:{}", g.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
                .parse()
                .ok()?;
            let sched = SlowSchedule::new(spec, g.len() - 1).ok()?;
            let eps = BigRational::new(BigInt::from(tenths), BigInt::from(10));
            build_system(eps, sched, depth).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn children_and_gap_tile_the_parent(sys in system(), bits in prop::collection::vec(any::<bool>(), 10), k_seed in any::<usize>()) {
        let k = k_seed % sys.schedule().coords();
        for p in 0..sys.p_max() {
            let s = &bits[..p];
            let (lo, hi) = sys.interval(k, s).unwrap();
            let mut left = s.to_vec();
            left.push(false);
            let mut right = s.to_vec();
            right.push(true);
            let (l_lo, l_hi) = sys.interval(k, &left).unwrap();
            let (r_lo, r_hi) = sys.interval(k, &right).unwrap();
            prop_assert_eq!(&l_lo, &lo);
            prop_assert_eq!(&r_hi, &hi);
            prop_assert_eq!(r_lo - l_hi, sys.gap_at(k, p));
        }
        let (lo, hi) = sys.interval(k, &[]).unwrap();
        prop_assert_eq!(lo, BigRational::from_integer(0.into()));
        prop_assert_eq!(hi, BigRational::from_integer(1.into()) - sys.b(k));
    }

    #[test]
    fn accounting_is_exact(sys in system()) {
        let acc = measure_account(&sys);
        for block in &acc.blocks {
            prop_assert!(block.omitted_matches_closed_form);
            prop_assert!(block.gaps_within_b);
            prop_assert!(block.level_gap_mass_ok);
        }
        prop_assert!(acc.product_bound_ok && acc.sum_bound_ok);
        prop_assert!(acc.sum_b <= acc.sum_b_closed_form);
    }

    #[test]
    fn encode_is_injective(sys in system(), seed in any::<u64>()) {
        let pairs = random_code_pairs(&sys, 64, seed);
        let codes: Vec<&CodePoint> = pairs.iter().flat_map(|(a, b)| [a, b]).collect();
        let distinct: HashSet<&CodePoint> = codes.iter().copied().collect();
        let images: HashSet<Vec<BigInt>> = distinct
            .iter()
            .map(|c| sys.encode_exact(c).unwrap().nums)
            .collect();
        prop_assert_eq!(images.len(), distinct.len());
    }

    #[test]
    fn modulus_bounds_hold(sys in system(), seed in any::<u64>()) {
        let pairs = random_code_pairs(&sys, 200, seed);
        let report = verify_modulus(&sys, &pairs).unwrap();
        prop_assert_eq!(report.violations, 0);
        prop_assert_eq!(report.uniform_envelope_exceeded, 0);
    }
}
