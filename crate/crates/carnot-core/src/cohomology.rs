//! Bigraded cohomology of the weight-preserving differential.
//!
//! The differential preserves both degree and weight, so the cohomology of a
//! Carnot algebra splits into blocks `H^{q,w}`. Per block,
//! `dim H^{q,w} = dim ker(d|_{q,w}) - rank(d|_{q-1,w})`, computed exactly;
//! harmonic representatives are the joint kernel of the differential and its
//! adjoint in the block, which has the same dimension by finite Hodge theory
//! (this is asserted, as an internal cross-check of the two routes).
//!
//! Blocks are independent, so they are computed in parallel; the assembled
//! table is deterministic regardless of scheduling.

use std::collections::BTreeMap;

use crate::algebra::CarnotAlgebra;
use crate::error::Result;
use crate::exterior::{ce_differential, DifferentialMaps, Form, FormSpace};
use crate::linalg::Mat;
use crate::parallel;

/// Dimensions and harmonic bases of every `(q, w)` block.
#[derive(Debug, Clone)]
pub struct CohomologyTable {
    pub n: usize,
    pub total_weight: u32,
    /// Nonzero block dimensions only.
    pub dims: BTreeMap<(usize, u32), usize>,
    pub betti: Vec<usize>,
    /// Canonical harmonic representatives per nonzero block (reduced row
    /// echelon rows of the joint kernel, pivot-first order).
    pub harmonic: BTreeMap<(usize, u32), Vec<Form>>,
}

impl CohomologyTable {
    pub fn dim(&self, q: usize, w: u32) -> usize {
        self.dims.get(&(q, w)).copied().unwrap_or(0)
    }

    pub fn betti(&self, q: usize) -> usize {
        self.betti.get(q).copied().unwrap_or(0)
    }

    /// Smallest weight carrying a nonzero class in degree `q`.
    pub fn min_weight(&self, q: usize) -> Option<u32> {
        self.dims
            .iter()
            .filter(|((qq, _), _)| *qq == q)
            .map(|((_, w), _)| *w)
            .min()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(q, &b)| if q % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }
}

struct BlockOut {
    q: usize,
    w: u32,
    dim: usize,
    harmonic: Vec<Vec<crate::ratio::Ratio>>,
}

fn compute_block(maps: &DifferentialMaps, q: usize, w: u32) -> BlockOut {
    let space = &maps.space;
    let n = space.n;
    let cols: &[usize] = &space.blocks(q)[&w];
    let out_rows: Vec<usize> = if q < n {
        space.blocks(q + 1).get(&w).cloned().unwrap_or_default()
    } else {
        Vec::new()
    };
    let a = maps.d(q).select(&out_rows, cols);
    let kernel_dim = cols.len() - a.rank();
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
    let dim = kernel_dim - b.rank();

    // Harmonic route: joint kernel of the block differential and its adjoint.
    let joint = a.vstack(&b.transpose());
    let kernel = joint.kernel_basis();
    let canonical = kernel.transpose().row_space_canonical();
    assert_eq!(
        canonical.rows(),
        dim,
        "harmonic and rank routes disagree in block ({q},{w})"
    );
    let harmonic = (0..canonical.rows())
        .map(|r| {
            (0..canonical.cols())
                .map(|c| canonical.at(r, c).clone())
                .collect()
        })
        .collect();
    BlockOut {
        q,
        w,
        dim,
        harmonic,
    }
}

fn assemble(maps: &DifferentialMaps, outs: Vec<BlockOut>) -> CohomologyTable {
    let space = &maps.space;
    let n = space.n;
    let mut dims = BTreeMap::new();
    let mut harmonic = BTreeMap::new();
    let mut betti = vec![0usize; n + 1];
    for out in outs {
        if out.dim == 0 {
            continue;
        }
        betti[out.q] += out.dim;
        dims.insert((out.q, out.w), out.dim);
        let cols = &space.blocks(out.q)[&out.w];
        let forms: Vec<Form> = out
            .harmonic
            .iter()
            .map(|block_vec| {
                let mut full = vec![crate::ratio::zero(); space.dim(out.q)];
                for (i, &pos) in cols.iter().enumerate() {
                    full[pos] = block_vec[i].clone();
                }
                space.vec_to_form(out.q, &full)
            })
            .collect();
        harmonic.insert((out.q, out.w), forms);
    }
    CohomologyTable {
        n,
        total_weight: space.total_weight,
        dims,
        betti,
        harmonic,
    }
}

fn block_keys(space: &FormSpace) -> Vec<(usize, u32)> {
    let mut keys = Vec::new();
    for q in 0..=space.n {
        for &w in space.blocks(q).keys() {
            keys.push((q, w));
        }
    }
    keys
}

pub fn compute_cohomology(alg: &CarnotAlgebra) -> Result<CohomologyTable> {
    let maps = ce_differential(alg)?;
    let keys = block_keys(&maps.space);
    let outs = parallel::map_collect(keys, |(q, w)| compute_block(&maps, q, w));
    Ok(assemble(&maps, outs))
}

/// Single-threaded variant (determinism cross-checks, benches).
pub fn compute_cohomology_seq(alg: &CarnotAlgebra) -> Result<CohomologyTable> {
    let maps = ce_differential(alg)?;
    let keys = block_keys(&maps.space);
    let outs = parallel::map_collect_seq(keys, |(q, w)| compute_block(&maps, q, w));
    Ok(assemble(&maps, outs))
}

/// One row of the duality comparison `H^{q,w} vs H^{n-q,Q-w}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityEntry {
    pub q: usize,
    pub w: u32,
    pub dim: usize,
    pub dual_dim: usize,
    pub matched: bool,
}

#[derive(Debug, Clone)]
pub struct DualityReport {
    pub entries: Vec<DualityEntry>,
}

impl DualityReport {
    pub fn all_matched(&self) -> bool {
        self.entries.iter().all(|e| e.matched)
    }

    pub fn mismatches(&self) -> Vec<&DualityEntry> {
        self.entries.iter().filter(|e| !e.matched).collect()
    }
}

/// Compare every attainable block with its dual block. A mismatch signals an
/// implementation bug: it is reported, not raised.
pub fn verify_duality(table: &CohomologyTable, alg: &CarnotAlgebra) -> DualityReport {
    let space = FormSpace::new(alg).expect("table exists, so the space fits");
    let q_total = alg.hausdorff_dim;
    let mut entries = Vec::new();
    for q in 0..=alg.n {
        for &w in space.blocks(q).keys() {
            let dim = table.dim(q, w);
            let dual_dim = table.dim(alg.n - q, q_total - w);
            entries.push(DualityEntry {
                q,
                w,
                dim,
                dual_dim,
                matched: dim == dual_dim,
            });
        }
    }
    DualityReport { entries }
}

/// Basis of the closed 1-forms. For every Carnot algebra this equals the span
/// of the weight-1 dual generators (the generation property makes the
/// differential injective on duals of higher strata).
pub fn closed_one_forms(alg: &CarnotAlgebra) -> Result<Vec<Form>> {
    let maps = ce_differential(alg)?;
    let kernel = maps.d(1).kernel_basis();
    let canonical = kernel.transpose().row_space_canonical();
    Ok((0..canonical.rows())
        .map(|r| {
            let v: Vec<_> = (0..canonical.cols())
                .map(|c| canonical.at(r, c).clone())
                .collect();
            maps.space.vec_to_form(1, &v)
        })
        .collect())
}
