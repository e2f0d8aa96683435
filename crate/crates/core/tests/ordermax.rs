use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use nftab::ordermax::{
    dedekind_maximal, field_discriminant, maximize_at, q_maximal_order, residue_degrees, residue_degrees_fast,
    residue_degrees_slow,
};
use nftab::polyarith::{factor_over_z, poly_discriminant, IntPolynomial};

fn irreducible(max_deg: usize, c: i64) -> impl Strategy<Value = IntPolynomial> {
    (2..=max_deg)
        .prop_flat_map(move |n| prop::collection::vec(-c..=c, n))
        .prop_map(|a| IntPolynomial::from_i64(&a))
        .prop_filter("irreducible", |p| !p.a(p.degree()).is_zero() && factor_over_z(p).len() == 1)
}

/// Irreducible polynomials with a square factor of a small prime in the
/// discriminant: `x -> q x` substitutions force a non-maximal equation order.
fn non_maximal(max_deg: usize) -> impl Strategy<Value = (IntPolynomial, u64)> {
    (irreducible(max_deg, 4), prop::sample::select(vec![2u64, 3, 5])).prop_map(|(p, q)| {
        let n = p.degree();
        let a: Vec<BigInt> = (1..=n).map(|k| p.a(k) * BigInt::from(q).pow(k as u32)).collect();
        (IntPolynomial::new(a).unwrap(), q)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn splitting_degrees_sum_to_n(p in irreducible(6, 6), q in prop::sample::select(vec![2u64, 3, 5])) {
        prop_assert_eq!(residue_degrees(&p, q).degree() as usize, p.degree());
    }

    #[test]
    fn fast_and_slow_agree_when_dedekind_holds(p in irreducible(6, 6), q in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assume!(dedekind_maximal(&p, q));
        prop_assert_eq!(residue_degrees_fast(&p, q), residue_degrees_slow(&p, q));
    }

    #[test]
    fn slow_path_on_scaled_roots((p, q) in non_maximal(5)) {
        prop_assert!(!dedekind_maximal(&p, q));
        let split = residue_degrees_slow(&p, q);
        prop_assert_eq!(split.degree() as usize, p.degree());
    }

    #[test]
    fn discriminant_factorization(p in irreducible(6, 8)) {
        let (d, index) = field_discriminant(&p).unwrap();
        prop_assert_eq!(&d * &index * &index, poly_discriminant(&p));
        // Stickelberger
        prop_assert!(matches!(d.mod_floor(&BigInt::from(4)).to_string().as_str(), "0" | "1"));
        let (_, r2) = nftab::polyarith::sturm_signature(&p).unwrap();
        prop_assert_eq!(d.is_negative(), r2 % 2 == 1);
    }

    #[test]
    fn scaling_preserves_field_discriminant((p, q) in non_maximal(4)) {
        let n = p.degree();
        let orig: Vec<BigInt> = (1..=n).map(|k| p.a(k) / BigInt::from(q).pow(k as u32)).collect();
        let orig = IntPolynomial::new(orig).unwrap();
        prop_assert_eq!(field_discriminant(&p).unwrap().0, field_discriminant(&orig).unwrap().0);
    }

    #[test]
    fn q_maximal_order_is_a_fixed_ring((p, q) in non_maximal(5)) {
        let (order, v) = q_maximal_order(&p, q);
        prop_assert!(v >= 1);
        prop_assert!(order.is_closed_under_multiplication(&p));
        prop_assert!(order.contains_equation_order());
        let again = maximize_at(&p, order.clone(), q);
        prop_assert_eq!(again, order.clone());
        let idx = order.index();
        prop_assert!((poly_discriminant(&p) % (&idx * &idx)).is_zero());
    }
}
