use assocfree::redmethod::{
    basis_action, basis_from_reduced, delta_action_holds, det_mod_p, idempotent_check, identity,
    mat_inv, mat_mul, reduce, reduce_full, same_lattice, Matrix, Q,
};
use assocfree::{ActionMatrix, MaximalModel, RedError};
use proptest::prelude::*;

fn q(x: i64) -> Q {
    Q::from_integer(x.into())
}

fn model_strategy() -> impl Strategy<Value = MaximalModel> {
    prop::sample::select(vec![3u64, 5, 7, 11])
        .prop_flat_map(|p| {
            let units: Vec<i64> = (1..p as i64).collect();
            (
                Just(p),
                Just(units).prop_shuffle(),
                proptest::collection::vec(-3i64..=3, p as usize - 1),
            )
        })
        .prop_map(|(p, units, lifts)| {
            let lambdas = std::iter::once(0)
                .chain(units.iter().zip(&lifts).map(|(u, l)| u + l * p as i64))
                .collect();
            MaximalModel::new(p, lambdas).unwrap()
        })
}

fn small_matrix(n: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(proptest::collection::vec(-9i64..=9, n), n).prop_map(|rows| {
        rows.into_iter()
            .map(|r| r.into_iter().map(q).collect())
            .collect()
    })
}

#[test]
fn frozen_model_at_five() {
    let mm = MaximalModel::new(5, vec![0, 1, 2, 3, 4]).unwrap();
    let rp = reduce(&mm.action_matrix()).unwrap();
    assert_eq!(rp.d(), mm.lambda_matrix());
    let basis = basis_from_reduced(&rp).unwrap();
    for (i, v) in basis.iter().enumerate() {
        let col: Vec<Q> = (0..5).map(|l| mm.omega()[l][i].clone()).collect();
        assert_eq!(*v, col);
    }
    assert!(idempotent_check(&mm));
}

#[test]
fn bad_shapes_are_rejected() {
    assert!(matches!(
        ActionMatrix::new(5, vec![identity(2)]),
        Err(RedError::Shape(_))
    ));
    assert!(MaximalModel::new(4, vec![0, 1, 2, 3]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn models_reduce_to_orthogonal_idempotents(mm in model_strategy()) {
        let m = mm.action_matrix();
        let rp = reduce(&m).unwrap();
        prop_assert!(rp.certificate_holds(&m));
        let basis = basis_from_reduced(&rp).unwrap();
        prop_assert!(delta_action_holds(&basis_action(&m, &basis).unwrap()));
        prop_assert!(idempotent_check(&mm));
        let full = reduce_full(&m).unwrap();
        prop_assert!(full.certificate_holds(&m));
        prop_assert!(same_lattice(&basis, &basis_from_reduced(&full).unwrap(), mm.p()));
    }

    #[test]
    fn inverse_is_two_sided(x in small_matrix(4)) {
        if let Ok(inv) = mat_inv(&x) {
            prop_assert_eq!(mat_mul(&x, &inv), identity(4));
            prop_assert_eq!(mat_mul(&inv, &x), identity(4));
        } else {
            prop_assert_eq!(det_mod_p(&x, 5), 0);
        }
    }
}
