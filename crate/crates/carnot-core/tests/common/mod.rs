#![allow(dead_code)]

//! Shared helpers for the integration suites: a naive rank oracle kept
//! deliberately independent of the library's Bareiss path, a within-strata
//! basis permutation, and a seeded generator of random valid step-2 algebras.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::{Integer, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use carnot_core::algebra::{AlgebraSpec, BracketEntry, CarnotAlgebra};
use carnot_core::linalg::Mat;
use carnot_core::ratio::from_i64;

/// Naive fraction-free elimination: clear denominators, then eliminate by
/// plain cross-multiplication with no Bareiss division. Entries blow up, but
/// the tests only run it on small blocks, and it shares no code with
/// Mat::rank.
pub fn naive_rank(m: &Mat) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|r| {
            let mut lcm = BigInt::from(1);
            for c in 0..cols {
                lcm = lcm.lcm(m.at(r, c).denom());
            }
            (0..cols)
                .map(|c| m.at(r, c).numer() * (&lcm / m.at(r, c).denom()))
                .collect()
        })
        .collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(p, rank);
        for r in rank + 1..rows {
            if a[r][col].is_zero() {
                continue;
            }
            let (piv, lead) = (a[rank][col].clone(), a[r][col].clone());
            let pivot_row = a[rank].clone();
            for (c, entry) in a[r].iter_mut().enumerate().skip(col) {
                *entry = &*entry * &piv - &pivot_row[c] * &lead;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Cohomology dimensions recomputed from scratch with the naive rank only.
pub fn naive_block_dims(alg: &CarnotAlgebra) -> BTreeMap<(usize, u32), usize> {
    let maps = carnot_core::exterior::ce_differential(alg).unwrap();
    let space = &maps.space;
    let mut dims = BTreeMap::new();
    for q in 0..=alg.n {
        for (&w, cols) in space.blocks(q) {
            let out_rows: Vec<usize> = if q < alg.n {
                space.blocks(q + 1).get(&w).cloned().unwrap_or_default()
            } else {
                Vec::new()
            };
            let a = maps.d(q).select(&out_rows, cols);
            let in_cols: Vec<usize> = if q > 0 {
                space.blocks(q - 1).get(&w).cloned().unwrap_or_default()
            } else {
                Vec::new()
            };
            let b = if q > 0 {
                maps.d(q - 1).select(cols, &in_cols)
            } else {
                Mat::zeros(cols.len(), 0)
            };
            let dim = cols.len() - naive_rank(&a) - naive_rank(&b);
            if dim > 0 {
                dims.insert((q, w), dim);
            }
        }
    }
    dims
}

/// Permute basis indices within each stratum (identity across strata) and
/// rebuild the spec. `perm[i]` is the new index of old index `i` and must
/// preserve weights.
pub fn permute_within_strata(alg: &CarnotAlgebra, perm: &[usize]) -> AlgebraSpec {
    assert_eq!(perm.len(), alg.n);
    for (i, &p) in perm.iter().enumerate() {
        assert_eq!(
            alg.weights[i], alg.weights[p],
            "permutation must preserve strata"
        );
    }
    let mut by_pair: BTreeMap<(usize, usize), BTreeMap<usize, carnot_core::ratio::Ratio>> =
        BTreeMap::new();
    for (i, j, k, c) in alg.table.triples() {
        let (pi, pj, pk) = (perm[i], perm[j], perm[k]);
        let (a, b, coeff) = if pi < pj { (pi, pj, c) } else { (pj, pi, -c) };
        *by_pair
            .entry((a, b))
            .or_default()
            .entry(pk)
            .or_insert_with(carnot_core::ratio::zero) += coeff;
    }
    AlgebraSpec {
        name: format!("{}_permuted", alg.name),
        strata_dims: alg.strata_dims.clone(),
        labels: None,
        brackets: by_pair
            .into_iter()
            .map(|((i, j), coeffs)| BracketEntry { i, j, coeffs })
            .collect(),
    }
}

/// Random valid step-2 algebra: strata `(d1, d2)` with integer structure
/// constants in [-3, 3], resampled until brackets of the first stratum span
/// the second (the Jacobi identity is automatic in step 2).
pub fn random_step2(rng: &mut ChaCha8Rng) -> CarnotAlgebra {
    loop {
        let d1: usize = rng.gen_range(2..=4);
        let max_d2 = (d1 * (d1 - 1) / 2).min(3);
        let d2: usize = rng.gen_range(1..=max_d2);
        let mut brackets = Vec::new();
        for i in 0..d1 {
            for j in i + 1..d1 {
                let coeffs: BTreeMap<usize, carnot_core::ratio::Ratio> = (0..d2)
                    .filter_map(|k| {
                        let c: i64 = rng.gen_range(-3..=3);
                        (c != 0).then(|| (d1 + k, from_i64(c)))
                    })
                    .collect();
                if !coeffs.is_empty() {
                    brackets.push(BracketEntry { i, j, coeffs });
                }
            }
        }
        let spec = AlgebraSpec {
            name: "random_step2".into(),
            strata_dims: vec![d1 as u32, d2 as u32],
            labels: None,
            brackets,
        };
        if let Ok(alg) = carnot_core::algebra::validate(&spec) {
            return alg;
        }
    }
}
