use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use shafkit::arith::{factor, factor_over, padic_valuation, radical, PrimeSet};

fn s23() -> PrimeSet {
    PrimeSet::new([2, 3]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn factor_over_round_trip(n in 1u64..=u64::MAX, negative in any::<bool>()) {
        let mut v = BigInt::from(n);
        if negative {
            v = -v;
        }
        let f = factor_over(&v, &s23(), true).unwrap();
        prop_assert_eq!(f.value(), v.clone());
        prop_assert!(f.cofactor.is_one());
        let partial = factor_over(&v, &s23(), false).unwrap();
        prop_assert_eq!(partial.value(), v);
        prop_assert!(!(&partial.cofactor % 2u32).is_zero());
        prop_assert!(!(&partial.cofactor % 3u32).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn valuation_strips_the_prime(n in 1i64..i64::MAX, pi in 0usize..6) {
        let p = [2u64, 3, 5, 7, 11, 13][pi];
        let v = padic_valuation(&BigInt::from(n), p).unwrap();
        prop_assert!(v >= 0);
        let rest = BigInt::from(n) / BigInt::from(p).pow(v as u32);
        prop_assert!(!(rest % p).is_zero());
    }

    #[test]
    fn radical_divides_and_is_squarefree(n in 1i64..10_000_000_000i64) {
        let n = BigInt::from(n);
        let r = radical(&n).unwrap();
        prop_assert!((&n % &r).is_zero());
        let f = factor(&r).unwrap();
        prop_assert!(f.pairs().iter().all(|(_, e)| *e == 1));
        prop_assert!(r.is_positive());
    }

    #[test]
    fn rational_valuation_is_difference(a in 1i64..1_000_000, b in 1i64..1_000_000) {
        let q = num_rational::BigRational::new(BigInt::from(a), BigInt::from(b));
        let g = a.gcd(&b);
        let expected = padic_valuation(&BigInt::from(a / g), 2).unwrap()
            - padic_valuation(&BigInt::from(b / g), 2).unwrap();
        prop_assert_eq!(padic_valuation(&q, 2).unwrap(), expected);
    }
}

#[test]
fn valuation_of_zero_is_an_error() {
    assert!(padic_valuation(&BigInt::zero(), 2).is_err());
}
