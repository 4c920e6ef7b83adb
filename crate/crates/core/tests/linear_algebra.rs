use proptest::prelude::*;
use sheafwork::rational::{format_rational, int, parse_rational, ratio};
use sheafwork::{Rational, RationalMatrix};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec((-4i64..=4, 1i64..=3), rows * cols).prop_map(move |v| {
        let entries = v.into_iter().map(|(n, d)| ratio(n, d)).collect();
        RationalMatrix::from_entries(rows, cols, entries).unwrap()
    })
}

fn any_matrix() -> impl Strategy<Value = RationalMatrix> {
    (0usize..5, 0usize..5).prop_flat_map(|(r, c)| matrix(r, c))
}

proptest! {
    #[test]
    fn matmul_is_associative(
        (a, b, c) in (1usize..4, 1usize..4, 1usize..4, 1usize..4)
            .prop_flat_map(|(m, n, p, q)| (matrix(m, n), matrix(n, p), matrix(p, q)))
    ) {
        let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
        let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn decompose_is_rank_nullity(a in any_matrix()) {
        let d = a.decompose();
        prop_assert_eq!(d.rank + d.kernel_basis.len(), a.cols());
        prop_assert_eq!(d.image_basis.len(), d.rank);
        for k in &d.kernel_basis {
            prop_assert!(a.apply(k).unwrap().iter().all(|x| *x == int(0)));
        }
        if !d.kernel_basis.is_empty() {
            let stacked = RationalMatrix::from_rows(d.kernel_basis.clone(), a.cols()).unwrap();
            prop_assert_eq!(stacked.rank(), d.kernel_basis.len());
        }
        prop_assert_eq!(a.transpose().rank(), d.rank);
    }

    #[test]
    fn image_basis_spans_the_columns(a in any_matrix()) {
        let d = a.decompose();
        if a.rows() > 0 && d.rank > 0 {
            let basis = RationalMatrix::from_rows(d.image_basis.clone(), a.rows()).unwrap().transpose();
            for c in 0..a.cols() {
                let col: Vec<Rational> = (0..a.rows()).map(|r| a.get(r, c).clone()).collect();
                prop_assert!(basis.solve(&col).unwrap().is_some());
            }
        }
    }

    #[test]
    fn solve_recovers_consistent_systems(
        (a, x) in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            (matrix(r, c), prop::collection::vec(-5i64..=5, c))
        })
    ) {
        let x: Vec<Rational> = x.into_iter().map(int).collect();
        let b = a.apply(&x).unwrap();
        let y = a.solve(&b).unwrap().expect("b is in the image");
        prop_assert_eq!(a.apply(&y).unwrap(), b);
    }

    #[test]
    fn rationals_round_trip_through_text(n in -10_000i64..10_000, d in 1i64..500) {
        let q = ratio(n, d);
        prop_assert_eq!(parse_rational(&format_rational(&q)).unwrap(), q);
    }

    #[test]
    fn decimals_equal_fractions(whole in 0i64..1000, tenths in 0i64..10) {
        let text = format!("{whole}.{tenths}");
        prop_assert_eq!(parse_rational(&text).unwrap(), ratio(whole * 10 + tenths, 10));
    }
}

#[test]
fn literal_examples() {
    assert_eq!(parse_rational("7.5").unwrap(), ratio(15, 2));
    assert_eq!(parse_rational("1/3").unwrap(), ratio(1, 3));
    assert_eq!(parse_rational("0.5").unwrap(), parse_rational("1/2").unwrap());
    assert!(parse_rational("1/0").is_err());
    assert!(parse_rational("").is_err());
}
