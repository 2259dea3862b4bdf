mod common;

use common::oracle;
use num_traits::One;
use schreier_core::census::{
    census_sizes, collapse_ceiling, collapse_probability, enumerate_census, parenthesized_fraction,
    CensusTable, WordCensus,
};

fn with_x2_prime(c: &WordCensus) -> num_bigint::BigUint {
    c.x2.clone() + c.x2_prime.clone().unwrap_or_default()
}

#[test]
fn recursion_matches_enumeration() {
    for m in 1..=3 {
        for d in 1..=3 {
            for signed in [true, false] {
                assert_eq!(census_sizes(m, d, signed).unwrap(), enumerate_census(m, d, signed).unwrap());
            }
        }
    }
}

#[test]
fn partition_identities() {
    let mut signed = CensusTable::new(true);
    for m in 1..=6 {
        for d in 1..=6 {
            let s = census_sizes(m, d, true).unwrap();
            assert_eq!(s.total(), s.expected_total());
            assert_eq!(with_x2_prime(&s), signed.count(2, 1, 2 * m, d));
            let u = census_sizes(m, d, false).unwrap();
            assert_eq!(u.total(), u.expected_total());
        }
    }
}

#[test]
fn single_letter_signed_words() {
    let c = census_sizes(1, 1, true).unwrap();
    assert_eq!(c.x1, 0u32.into());
    assert_eq!(c.x2, 2u32.into());
    assert_eq!(c.x2_prime, Some(2u32.into()));
}

#[test]
fn parenthesized_fraction_by_enumeration() {
    for i in 1..=4 {
        assert_eq!(parenthesized_fraction(i).unwrap(), oracle::parenthesized_by_enumeration(i));
    }
}

#[test]
fn collapse_probability_by_reduction() {
    for m in 1..=3 {
        for d in 1..=3 {
            assert_eq!(collapse_probability(m, d).unwrap(), oracle::collapse_by_enumeration(m, d));
        }
    }
}

#[test]
fn collapse_probability_below_ceiling() {
    for m in 1..=12 {
        for d in 1..=12 {
            let p = collapse_probability(m, d).unwrap();
            assert!(p <= collapse_ceiling(m, d).unwrap());
            assert!(p <= num_rational::BigRational::one());
        }
    }
}
