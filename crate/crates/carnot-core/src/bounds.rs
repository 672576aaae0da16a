//! Aggregation of every Holder-exponent bound into one provenance-tagged
//! report.
//!
//! The lower bound is `1/r` (step of the group). Upper bounds, each tagged
//! with the rule that produced it: the dimension ratio `n/Q`, the
//! isoperimetric ratio `(n-1)/(Q-1)`, the weight bounds `q / W_q` with `W_q`
//! replaced by its algebraic lower-bound certificate (the smallest weight
//! carrying a nonzero class in degree `q`), and `(n-k)/(Q-k)` for every `k`
//! with a machine-verified regular isotropic k-plane. Richness bounds are
//! never emitted on genericity grounds alone.

use std::collections::BTreeMap;

use crate::algebra::CarnotAlgebra;
use crate::cohomology::CohomologyTable;
use crate::ratio::{from_i64, Ratio};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundRule {
    TrivialDim,
    Isoperimetric,
    Weight(usize),
    Richness(usize),
}

impl std::fmt::Display for BoundRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundRule::TrivialDim => write!(f, "trivial_dim"),
            BoundRule::Isoperimetric => write!(f, "isoperimetric"),
            BoundRule::Weight(q) => write!(f, "weight({q})"),
            BoundRule::Richness(k) => write!(f, "richness({k})"),
        }
    }
}

impl BoundRule {
    pub fn citation(&self) -> &'static str {
        match self {
            BoundRule::TrivialDim => "Rem 1.10",
            BoundRule::Isoperimetric => "Cor 2.2",
            BoundRule::Weight(_) => "Cor 8.10",
            BoundRule::Richness(_) => "Cor 3.5",
        }
    }
}

#[derive(Debug, Clone)]
pub struct UpperBound {
    pub value: Ratio,
    pub rule: BoundRule,
    pub cite: &'static str,
}

#[derive(Debug, Clone)]
pub struct BoundsReport {
    pub n: usize,
    pub hausdorff_dim: u32,
    pub step: u32,
    pub lower: Ratio,
    pub uppers: Vec<UpperBound>,
    pub best_upper: Ratio,
    /// Algebraic lower-bound certificate for the weight invariant, per degree
    /// `1..n-1`; absent when the Betti number vanishes.
    pub w_alg: BTreeMap<usize, u32>,
}

impl BoundsReport {
    pub fn best(&self) -> &UpperBound {
        self.uppers
            .iter()
            .min_by(|a, b| a.value.cmp(&b.value))
            .expect("report always carries the dimension bound")
    }
}

/// `W_q^alg`: the smallest weight with a nonzero class in degree `q`. This
/// certifies that every class of degree `q` has a representative of weight at
/// least `W_q^alg`, hence the exponent bound `q / W_q^alg`. Returns `None`
/// when there are no classes at all in degree `q`.
pub fn weight_invariant_lower(table: &CohomologyTable, q: usize) -> Option<u32> {
    table.min_weight(q)
}

/// Assemble the full report. `verified_ks` lists the plane dimensions for
/// which a regular isotropic plane has actually been exhibited.
pub fn holder_report(
    alg: &CarnotAlgebra,
    table: &CohomologyTable,
    verified_ks: &[usize],
) -> BoundsReport {
    let n = alg.n;
    let q_hausdorff = alg.hausdorff_dim;
    let ratio = |num: i64, den: i64| -> Ratio { from_i64(num) / from_i64(den) };
    let mut uppers = Vec::new();
    uppers.push(UpperBound {
        value: ratio(n as i64, q_hausdorff as i64),
        rule: BoundRule::TrivialDim,
        cite: BoundRule::TrivialDim.citation(),
    });
    if n >= 2 {
        uppers.push(UpperBound {
            value: ratio(n as i64 - 1, q_hausdorff as i64 - 1),
            rule: BoundRule::Isoperimetric,
            cite: BoundRule::Isoperimetric.citation(),
        });
    }
    let mut w_alg = BTreeMap::new();
    for q in 1..n {
        if let Some(w) = weight_invariant_lower(table, q) {
            w_alg.insert(q, w);
            uppers.push(UpperBound {
                value: ratio(q as i64, w as i64),
                rule: BoundRule::Weight(q),
                cite: BoundRule::Weight(q).citation(),
            });
        }
    }
    for &k in verified_ks {
        uppers.push(UpperBound {
            value: ratio(n as i64 - k as i64, q_hausdorff as i64 - k as i64),
            rule: BoundRule::Richness(k),
            cite: BoundRule::Richness(k).citation(),
        });
    }
    let best_upper = uppers
        .iter()
        .map(|u| u.value.clone())
        .min()
        .expect("nonempty");
    BoundsReport {
        n,
        hausdorff_dim: q_hausdorff,
        step: alg.step,
        lower: from_i64(1) / from_i64(alg.step as i64),
        uppers,
        best_upper,
        w_alg,
    }
}
