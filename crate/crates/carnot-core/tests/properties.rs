//! Property suites: structural invariants exercised on random inputs, plus
//! the dual-route checks pairing the main algorithms with independent naive
//! oracles.

mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;

use carnot_core::algebra::{self, AlgebraSpec, BracketEntry};
use carnot_core::exterior::{self, Form};
use carnot_core::ratio::{from_i64, Ratio};
use carnot_core::{bounds, cohomology, isotropic, rumin};

fn random_form(alg: &carnot_core::CarnotAlgebra, degree: usize, coeffs: &[i64]) -> Form {
    let space = exterior::FormSpace::new(alg).unwrap();
    let mut form = Form::zero(degree);
    for (pos, &c) in coeffs.iter().enumerate().take(space.dim(degree)) {
        if c != 0 {
            form = form.add(&Form::term(&space.basis(degree)[pos].clone(), from_i64(c)));
        }
    }
    form
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // d is an antiderivation: d(a ^ b) = da ^ b + (-1)^deg(a) a ^ db.
    #[test]
    fn differential_is_an_antiderivation(
        ca in proptest::collection::vec(-4i64..=4, 10),
        cb in proptest::collection::vec(-4i64..=4, 10),
        p in 0usize..=2,
        q in 0usize..=2,
    ) {
        let alg = algebra::free_rank2_step3();
        let maps = exterior::ce_differential(&alg).unwrap();
        let a = random_form(&alg, p, &ca);
        let b = random_form(&alg, q, &cb);
        let lhs = maps.apply_d(&exterior::wedge(&a, &b));
        let da_b = exterior::wedge(&maps.apply_d(&a), &b);
        let sign = if p % 2 == 0 { from_i64(1) } else { from_i64(-1) };
        let a_db = exterior::wedge(&a, &maps.apply_d(&b)).scale(&sign);
        prop_assert_eq!(lhs, da_b.add(&a_db));
    }

    // Wedge is associative and graded anticommutative.
    #[test]
    fn wedge_algebra_laws(
        ca in proptest::collection::vec(-3i64..=3, 5),
        cb in proptest::collection::vec(-3i64..=3, 10),
        cc in proptest::collection::vec(-3i64..=3, 10),
        p in 1usize..=2,
        q in 1usize..=2,
    ) {
        let alg = algebra::quaternionic_heisenberg(1).unwrap();
        let a = random_form(&alg, 1, &ca);
        let b = random_form(&alg, p, &cb);
        let c = random_form(&alg, q, &cc);
        prop_assert_eq!(
            exterior::wedge(&exterior::wedge(&a, &b), &c),
            exterior::wedge(&a, &exterior::wedge(&b, &c))
        );
        let sign = if p % 2 == 0 { from_i64(1) } else { from_i64(-1) };
        prop_assert_eq!(
            exterior::wedge(&a, &b),
            exterior::wedge(&b, &a).scale(&sign)
        );
    }

    // The Hodge star is a weight-flipping bijection: checked via the
    // involution identity on random forms.
    #[test]
    fn hodge_star_involution_on_forms(
        coeffs in proptest::collection::vec(-3i64..=3, 10),
        q in 0usize..=4,
    ) {
        let alg = algebra::heisenberg(2).unwrap();
        let space = exterior::FormSpace::new(&alg).unwrap();
        let f = random_form(&alg, q, &coeffs);
        let twice = exterior::hodge_star(&space, &exterior::hodge_star(&space, &f));
        let sign = if (q * (alg.n - q)).is_multiple_of(2) { from_i64(1) } else { from_i64(-1) };
        prop_assert_eq!(twice, f.scale(&sign));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Random valid step-2 algebras: duality, Euler characteristic, splitting
    // identities and the serialization round trip all hold exactly.
    #[test]
    fn random_step2_pipeline(seed in 0u64..10_000) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let alg = common::random_step2(&mut rng);
        let table = cohomology::compute_cohomology(&alg).unwrap();
        prop_assert!(cohomology::verify_duality(&table, &alg).all_matched());
        prop_assert_eq!(table.euler_characteristic(), 0);
        let data = rumin::build_rumin(&alg).unwrap();
        let report = rumin::verify_rumin_identities(&data, &alg, &table);
        prop_assert!(report.all_ok(), "failures: {:?}", report.failures());
        let text = algebra::serialize_spec(&alg.to_spec());
        let back = algebra::validate(&algebra::parse_spec(&text).unwrap()).unwrap();
        prop_assert_eq!(back, alg);
    }

    // d0 . d0 = 0 exactly when the Jacobi identity holds, also on raw tables
    // that respect antisymmetry but nothing else.
    #[test]
    fn complex_property_iff_jacobi(
        entries in proptest::collection::vec(
            (0usize..5, 0usize..5, 0usize..5, -2i64..=2), 0..6),
    ) {
        let mut by_pair: BTreeMap<(usize, usize), BTreeMap<usize, Ratio>> = BTreeMap::new();
        for (i, j, k, c) in entries {
            if i >= j || c == 0 {
                continue;
            }
            *by_pair.entry((i, j)).or_default().entry(k).or_insert_with(carnot_core::ratio::zero) += from_i64(c);
        }
        let spec = AlgebraSpec {
            name: "raw".into(),
            strata_dims: vec![5],
            labels: None,
            brackets: by_pair
                .into_iter()
                .map(|((i, j), coeffs)| BracketEntry { i, j, coeffs })
                .collect(),
        };
        let jacobi_ok = !matches!(
            algebra::validate(&spec),
            Err(carnot_core::Error::JacobiViolation { .. })
        );
        let raw = algebra::CarnotAlgebra::from_spec_unchecked(&spec);
        let complex = exterior::ce_differential_unchecked(&raw).unwrap().is_complex();
        prop_assert_eq!(jacobi_ok, complex);
    }

    // Isotropy and regularity verdicts do not depend on the chosen basis of
    // the subspace.
    #[test]
    fn predicate_basis_independence(
        seed in 0u64..10_000,
        change in proptest::array::uniform4(-3i64..=3),
    ) {
        let alg = algebra::quaternionic_heisenberg(1).unwrap();
        let theta = isotropic::ThetaData::new(&alg);
        let det = change[0] * change[3] - change[1] * change[2];
        prop_assume!(det != 0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let basis = carnot_core::linalg::Mat::from_fn(4, 2, |_, _| from_i64(rng.gen_range(-5..=5)));
        prop_assume!(basis.rank() == 2);
        let s = isotropic::HorizontalSubspace::new(basis.clone()).unwrap();
        let m = carnot_core::linalg::Mat::from_rows(vec![
            vec![from_i64(change[0]), from_i64(change[1])],
            vec![from_i64(change[2]), from_i64(change[3])],
        ]);
        let s2 = isotropic::HorizontalSubspace::new(basis.mul(&m)).unwrap();
        prop_assert_eq!(isotropic::is_isotropic(&theta, &s), isotropic::is_isotropic(&theta, &s2));
        prop_assert_eq!(isotropic::is_regular(&theta, &s), isotropic::is_regular(&theta, &s2));
    }
}

// The main rank route (fraction-free Bareiss) agrees with a naive
// cross-multiplication elimination on every builtin's cohomology table.
#[test]
fn dims_agree_with_naive_oracle() {
    for alg in algebra::all_builtins() {
        let table = cohomology::compute_cohomology(&alg).unwrap();
        let naive = common::naive_block_dims(&alg);
        assert_eq!(table.dims, naive, "oracle mismatch for {}", alg.name);
    }
}

// Permuting basis vectors within strata changes nothing observable: the
// dimension table, Betti numbers and the full bounds report are identical.
#[test]
fn bounds_report_is_basis_permutation_invariant() {
    let cases: Vec<(carnot_core::CarnotAlgebra, Vec<usize>)> = vec![
        (algebra::heisenberg(2).unwrap(), vec![2, 3, 0, 1, 4]),
        (algebra::free_rank2_step3(), vec![1, 0, 2, 4, 3]),
        (
            algebra::quaternionic_heisenberg(1).unwrap(),
            vec![3, 1, 0, 2, 5, 6, 4],
        ),
    ];
    for (alg, perm) in cases {
        let permuted = algebra::validate(&common::permute_within_strata(&alg, &perm)).unwrap();
        let table = cohomology::compute_cohomology(&alg).unwrap();
        let table_p = cohomology::compute_cohomology(&permuted).unwrap();
        assert_eq!(table.dims, table_p.dims, "{}", alg.name);
        assert_eq!(table.betti, table_p.betti, "{}", alg.name);
        let report = bounds::holder_report(&alg, &table, &[]);
        let report_p = bounds::holder_report(&permuted, &table_p, &[]);
        assert_eq!(report.lower, report_p.lower);
        assert_eq!(report.best_upper, report_p.best_upper);
        assert_eq!(report.w_alg, report_p.w_alg);
        let values: Vec<_> = report.uppers.iter().map(|u| u.value.clone()).collect();
        let values_p: Vec<_> = report_p.uppers.iter().map(|u| u.value.clone()).collect();
        assert_eq!(values, values_p);
    }
}

// Ball-box consistency: the optimizer's distance bound stays above a fixed
// positive multiple of the box gauge on a spread of targets. The constant is
// an empirical observation (frozen here), not a theoretical value.
#[test]
fn cc_upper_bound_dominates_box_gauge() {
    let alg = algebra::heisenberg(1).unwrap();
    let targets = [
        [1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0],
        [1.0, 1.0, 0.5],
        [-0.5, 2.0, -1.0],
        [0.3, -0.4, 0.2],
        [2.0, 0.0, -4.0],
    ];
    for t in targets {
        let target = carnot_core::GroupElement::from_coords(&t);
        let upper = carnot_core::cc_distance_upper(&alg, &target, 16, 4, 1).unwrap();
        let gauge = carnot_core::box_gauge(&alg, &target);
        assert!(
            upper.length >= 0.95 * gauge,
            "target {t:?}: length {} vs gauge {gauge}",
            upper.length
        );
    }
}

// Monte Carlo reproducibility: same seed and sample count, same bits.
#[test]
fn monte_carlo_is_reproducible() {
    let alg = algebra::heisenberg(1).unwrap();
    let v1 = carnot_core::volume_scaling_experiment(&alg, &[0.5, 1.0, 2.0], 40_000, 5).unwrap();
    let v2 = carnot_core::volume_scaling_experiment(&alg, &[0.5, 1.0, 2.0], 40_000, 5).unwrap();
    assert_eq!(v1, v2);
    let t1 = carnot_core::tube_experiment(&alg, 0.1, 1.0, 40_000, 5).unwrap();
    let t2 = carnot_core::tube_experiment(&alg, 0.1, 1.0, 40_000, 5).unwrap();
    assert_eq!(t1, t2);
}
