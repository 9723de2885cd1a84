//! Closed-form laws against exhaustive path enumeration.

use halfnormal_stein::srw_laws::{
    brute_force_pmf, pmf_for, pmf_halfmax, pmf_max, ENUMERATION_LIMIT,
};
use halfnormal_stein::{Error, Statistic};

#[test]
fn formulas_match_enumeration() {
    for stat in Statistic::ALL {
        for m in 1..=8u64 {
            let n = stat.n_for_m(m);
            let formula = pmf_for(stat, n).unwrap();
            let enumerated = brute_force_pmf(stat, n as u32).unwrap();
            assert_eq!(formula, enumerated, "{stat} n={n}");
        }
    }
}

#[test]
fn halfmax_is_pushforward_of_max() {
    for m in 1..=30u64 {
        let pushed = pmf_max(2 * m).unwrap().push_forward(|r| (r + 1) / 2);
        assert_eq!(pushed, pmf_halfmax(m).unwrap(), "m={m}");
    }
}

#[test]
fn enumeration_is_capped() {
    assert!(matches!(
        brute_force_pmf(Statistic::Max, ENUMERATION_LIMIT + 1),
        Err(Error::EnumerationTooLarge { .. })
    ));
}
