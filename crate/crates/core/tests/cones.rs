use proptest::prelude::*;
use superpot::exactmath::{
    determinant, dual_cone, extremal_rays, nonneg_combination, rank, smith_invariant_factors, snf_rank,
};
use superpot::{LatticeVector, PolyCone};

// Vectors with positive last coordinate generate pointed cones.
fn upper_vectors(dim: usize) -> impl Strategy<Value = Vec<LatticeVector>> {
    let v = (prop::collection::vec(-3i64..=3, dim - 1), 1i64..=3).prop_map(|(mut xs, z)| {
        xs.push(z);
        LatticeVector::new(xs)
    });
    prop::collection::vec(v, dim..=dim + 4)
}

fn full_dimensional(gens: &[LatticeVector], dim: usize) -> bool {
    rank(&gens.iter().map(|g| g.0.iter().map(|&x| x as i128).collect()).collect::<Vec<_>>()) == dim
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i128>>> {
    prop::collection::vec(prop::collection::vec(-4i128..=4, cols), rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_of_dual_is_identity(gens in upper_vectors(3)) {
        prop_assume!(full_dimensional(&gens, 3));
        let cone = PolyCone::new(extremal_rays(&gens).unwrap(), 3).unwrap();
        prop_assert_eq!(dual_cone(&dual_cone(&cone)), cone);
    }

    #[test]
    fn dual_of_dual_in_dimension_four(gens in upper_vectors(4)) {
        prop_assume!(full_dimensional(&gens, 4));
        let cone = PolyCone::new(extremal_rays(&gens).unwrap(), 4).unwrap();
        prop_assert_eq!(dual_cone(&dual_cone(&cone)), cone);
    }

    #[test]
    fn extremal_rays_are_minimal(gens in upper_vectors(3)) {
        let rays = extremal_rays(&gens).unwrap();
        for (i, r) in rays.iter().enumerate() {
            let others: Vec<LatticeVector> =
                rays.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x.clone()).collect();
            prop_assert!(nonneg_combination(r, &others).is_none(), "{r} is redundant");
        }
        for g in &gens {
            prop_assert!(nonneg_combination(g, &rays).is_some(), "{g} escapes the ray cone");
        }
    }

    #[test]
    fn membership_agrees_with_combination(
        gens in upper_vectors(3),
        probes in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 100),
    ) {
        prop_assume!(full_dimensional(&gens, 3));
        let cone = PolyCone::new(gens.clone(), 3).unwrap();
        for p in probes {
            let v = LatticeVector::new(p);
            prop_assert_eq!(cone.contains(&v), nonneg_combination(&v, cone.generators()).is_some(), "{}", v);
        }
    }

    #[test]
    fn snf_rank_matches_rational_rank(m in matrix(4, 5)) {
        prop_assert_eq!(snf_rank(&m), rank(&m));
    }

    #[test]
    fn invariant_factors_multiply_to_determinant(m in matrix(4, 4)) {
        let f = smith_invariant_factors(&m);
        let rows: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        let det = determinant(&rows).abs();
        if f.len() < 4 {
            prop_assert_eq!(det, 0);
        } else {
            prop_assert_eq!(f.iter().product::<i128>(), det);
            for w in f.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
        }
    }

    #[test]
    fn primitive_vectors_have_unit_content(v in prop::collection::vec(-50i64..=50, 1..6)) {
        let v = LatticeVector::new(v);
        match v.primitive() {
            None => prop_assert!(v.is_zero()),
            Some(p) => {
                prop_assert_eq!(p.content(), 1);
                prop_assert_eq!(p.scale(v.content()), v);
            }
        }
    }
}

#[test]
fn non_pointed_generators_are_rejected() {
    let gens = vec![LatticeVector::new(vec![1, 0]), LatticeVector::new(vec![-1, 0]), LatticeVector::new(vec![0, 1])];
    assert!(extremal_rays(&gens).is_err());
}

#[test]
fn positive_orthant_is_self_dual() {
    let gens: Vec<LatticeVector> = (0..3).map(|i| LatticeVector::unit(3, i)).collect();
    let c = PolyCone::new(gens, 3).unwrap();
    assert_eq!(dual_cone(&c), c);
}

#[test]
fn dual_of_a_ray_contains_its_orthogonal_plane() {
    let c = PolyCone::new(vec![LatticeVector::new(vec![0, 0, 1])], 3).unwrap();
    let d = dual_cone(&c);
    for v in [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [3, -2, 5]] {
        assert!(d.contains(&LatticeVector::new(v.to_vec())));
    }
    assert!(!d.contains(&LatticeVector::new(vec![0, 0, -1])));
}
