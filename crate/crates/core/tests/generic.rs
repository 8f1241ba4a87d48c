use betawalk_core::{
    composition_product_sum, float_master_sides, Accumulator, CompensatedSum64, Integer, MasterSides32,
    Rational,
};

fn binomial_rows<T: Clone>(one: T, parts: usize, len: usize) -> Vec<Vec<T>> {
    vec![vec![one; len]; parts]
}

#[test]
fn composition_sums_agree_across_scalars() {
    // with all-ones rows the sum counts weak compositions: C(6 + 2, 2) = 28
    let f = composition_product_sum(6, &binomial_rows(1.0f64, 3, 7), 1).unwrap();
    let g = composition_product_sum(6, &binomial_rows(1.0f32, 3, 7), 2).unwrap();
    let i = composition_product_sum(6, &binomial_rows(Integer::from(1), 3, 7), 1).unwrap();
    let q = composition_product_sum(6, &binomial_rows(Rational::from_integer(1.into()), 3, 7), 3).unwrap();
    assert_eq!(f.total(), 28.0);
    assert_eq!(g.total(), 28.0);
    assert_eq!(i.total(), Integer::from(28));
    assert_eq!(q.total(), Rational::from_integer(28.into()));
}

#[test]
fn compensated_sum_alias_tracks_mass() {
    let mut s = CompensatedSum64::zero();
    for t in [1e16, 1.0, -1e16, 1.0] {
        s.add(t);
    }
    assert_eq!(s.value(), 2.0);
    assert!(s.condition_number() > 1e15);
}

#[test]
fn single_precision_master_sides() {
    let sides: MasterSides32 = float_master_sides(1, &[1.0f32], 1.0).unwrap();
    assert!((sides.rhs_value() - 1.0 / 3.0).abs() < 1e-6);
    assert!((sides.lhs_value() - 1.0 / 3.0).abs() < 1e-5);
}
