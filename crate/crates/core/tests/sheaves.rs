mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheafwork::cellsheaf::{Assignment, CellularSheaf, Extension};
use sheafwork::cohomology::{cochain_complex, cohomology_dims};
use sheafwork::complex::SimplicialComplex;
use sheafwork::rational::int;
use sheafwork::{Rational, RationalMatrix};

fn graph_complex(rng: &mut ChaCha8Rng) -> SimplicialComplex {
    loop {
        let c = common::random_complex(rng, 5, 12);
        if c.dim().unwrap_or(0) <= 1 {
            return c;
        }
    }
}

/// A valid random sheaf: arbitrary maps on a graph, or a projection sheaf
/// on a complex that may have 2-faces.
fn random_sheaf(seed: u64) -> CellularSheaf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rng.gen_bool(0.5) {
        let c = graph_complex(&mut rng);
        common::random_graph_sheaf(&mut rng, &c)
    } else {
        let c = common::random_complex(&mut rng, 5, 14);
        common::random_projection_sheaf(&mut rng, &c)
    }
}

fn combine(basis: &[Assignment], coeffs: &[i64], s: &CellularSheaf) -> Assignment {
    let base = s.base();
    let mut a = Assignment::new();
    for f in base.all_faces() {
        let name = base.face_name(f);
        let mut v = vec![int(0); s.stalk_dim(f)];
        for (b, &c) in basis.iter().zip(coeffs) {
            for (x, y) in v.iter_mut().zip(b.get(&name).unwrap()) {
                *x += y * int(c);
            }
        }
        a = a.with(&name, v);
    }
    a
}

/// Whether some global section restricts to `seed`, decided from the
/// section basis alone.
fn seed_extends(basis: &[Assignment], seed: &Assignment) -> bool {
    let mut rhs: Vec<Rational> = Vec::new();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for (face, values) in &seed.values {
        for (i, x) in values.iter().enumerate() {
            rhs.push(x.clone());
            rows.push(basis.iter().map(|b| b.get(face).unwrap()[i].clone()).collect());
        }
    }
    if basis.is_empty() {
        return rhs.iter().all(|x| *x == int(0));
    }
    let m = RationalMatrix::from_rows(rows, basis.len()).unwrap();
    m.solve(&rhs).unwrap().is_some()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn boundary_squares_to_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::random_complex(&mut rng, 6, 40);
        let top = c.dim().unwrap_or(0);
        for k in 1..top {
            prop_assert!(c.boundary_matrix(k).matmul(&c.boundary_matrix(k + 1)).unwrap().is_zero());
        }
        let euler: i64 = (0..=top).map(|k| if k % 2 == 0 { 1 } else { -1 } * c.count(k) as i64).sum();
        let betti: i64 = c.homology_dims().iter().enumerate().map(|(k, &h)| if k % 2 == 0 { h as i64 } else { -(h as i64) }).sum();
        prop_assert_eq!(euler, betti);
        prop_assert_eq!(c.homology_dims().first().copied().unwrap_or(0), c.components());
    }

    #[test]
    fn coboundary_squares_to_zero_and_h0_is_sections(seed in any::<u64>()) {
        let s = random_sheaf(seed);
        prop_assert!(s.validate().valid);
        let cc = cochain_complex(&s).unwrap();
        prop_assert!(cc.squares_to_zero());
        let dims = cohomology_dims(&s).unwrap();
        let space = s.global_section_space();
        prop_assert_eq!(dims.first().copied().unwrap_or(0), space.dimension);
        for b in &space.basis {
            prop_assert!(s.is_global_section(b).unwrap().is_section);
        }
        let chi_cochains: i64 = cc.dims.iter().enumerate().map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) }).sum();
        let chi_cohomology: i64 = dims.iter().enumerate().map(|(k, &d)| if k % 2 == 0 { d as i64 } else { -(d as i64) }).sum();
        prop_assert_eq!(chi_cochains, chi_cohomology);
    }

    #[test]
    fn constant_sheaf_cohomology_is_homology(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::random_complex(&mut rng, 5, 20);
        prop_assert_eq!(cohomology_dims(&CellularSheaf::constant(&c, 1)).unwrap(), c.homology_dims());
    }

    #[test]
    fn restricted_sections_extend(seed in any::<u64>()) {
        let s = random_sheaf(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let space = s.global_section_space();
        let coeffs: Vec<i64> = (0..space.dimension).map(|_| rng.gen_range(-3..=3)).collect();
        let section = combine(&space.basis, &coeffs, &s);
        let mut seed_values = Assignment::new();
        for (face, v) in &section.values {
            if rng.gen_bool(0.3) {
                seed_values = seed_values.with(face, v.clone());
            }
        }
        match s.extend(&seed_values).unwrap() {
            Extension::Extended(a) => {
                prop_assert!(s.is_global_section(&a).unwrap().is_section);
                for (face, v) in &seed_values.values {
                    prop_assert_eq!(a.get(face).unwrap(), v);
                }
            }
            Extension::Obstructed { obstruction, .. } => {
                prop_assert!(false, "restriction of a section obstructed at {}", obstruction);
            }
        }
    }

    #[test]
    fn extend_agrees_with_the_section_space(seed in any::<u64>()) {
        let s = random_sheaf(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xe7e7);
        let base = s.base();
        let mut seed_values = Assignment::new();
        for f in base.all_faces() {
            if rng.gen_bool(0.25) {
                let v = (0..s.stalk_dim(f)).map(|_| int(rng.gen_range(-2..=2))).collect();
                seed_values = seed_values.with(&base.face_name(f), v);
            }
        }
        let space = s.global_section_space();
        let expected = seed_extends(&space.basis, &seed_values);
        match s.extend(&seed_values).unwrap() {
            Extension::Extended(a) => {
                prop_assert!(expected);
                prop_assert!(s.is_global_section(&a).unwrap().is_section);
                for (face, v) in &seed_values.values {
                    prop_assert_eq!(a.get(face).unwrap(), v);
                }
            }
            Extension::Obstructed { obstruction, .. } => {
                prop_assert!(!expected, "obstructed at {} but a section exists", obstruction);
                prop_assert!(base.parse_face(&obstruction).is_ok());
            }
        }
    }

    #[test]
    fn transpose_twice_is_identity(seed in any::<u64>()) {
        let s = random_sheaf(seed);
        prop_assert_eq!(s.transpose().transpose(), s);
    }
}
