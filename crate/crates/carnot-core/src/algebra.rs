//! Parsing, validation and construction of stratified nilpotent Lie algebras.
//!
//! This is the single entry point producing a trusted [`CarnotAlgebra`]: every
//! other module consumes only validated algebras. A description consists of
//! stratum dimensions `(d_1, ..., d_r)` and bracket coefficients
//! `[e_i, e_j] = sum_k c_ij^k e_k` stored for `i < j`; validation checks the
//! Jacobi identity, the grading constraint `c_ij^k != 0 => w(k) = w(i) + w(j)`
//! and that each stratum is generated by brackets with the first one.
//!
//! Basis convention: stratum 1 first, then stratum 2, and so on; the weight of
//! a basis index is the stratum it falls in. Indices are 1-based on the wire
//! and 0-based in memory.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::ratio::{format_ratio, parse_ratio, Ratio};
use num::Zero;

/// Validated spec, still in "user input" form (sparse `i < j` entries).
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraSpec {
    pub name: String,
    pub strata_dims: Vec<u32>,
    pub labels: Option<Vec<String>>,
    /// `(i, j, coeffs)` with `i < j`, all 0-based.
    pub brackets: Vec<BracketEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coeffs: BTreeMap<usize, Ratio>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireSpec {
    name: String,
    strata: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    brackets: Vec<WireBracket>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireBracket {
    i: i64,
    j: i64,
    coeffs: BTreeMap<String, String>,
}

/// Antisymmetric bracket table, stored sparsely for `i < j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BracketTable {
    entries: BTreeMap<(usize, usize), BTreeMap<usize, Ratio>>,
}

impl BracketTable {
    pub fn from_entries(brackets: &[BracketEntry]) -> Self {
        let mut entries = BTreeMap::new();
        for b in brackets {
            let coeffs: BTreeMap<usize, Ratio> = b
                .coeffs
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (*k, c.clone()))
                .collect();
            if !coeffs.is_empty() {
                entries.insert((b.i, b.j), coeffs);
            }
        }
        BracketTable { entries }
    }

    /// Structure constant `c_ij^k` with the antisymmetric closure applied.
    pub fn coeff(&self, i: usize, j: usize, k: usize) -> Ratio {
        if i == j {
            return Ratio::zero();
        }
        let (a, b, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
        let c = self
            .entries
            .get(&(a, b))
            .and_then(|m| m.get(&k))
            .cloned()
            .unwrap_or_else(Ratio::zero);
        if sign < 0 {
            -c
        } else {
            c
        }
    }

    /// `[e_i, e_j]` as a sparse coefficient map.
    pub fn bracket_basis(&self, i: usize, j: usize) -> BTreeMap<usize, Ratio> {
        if i == j {
            return BTreeMap::new();
        }
        let (a, b, neg) = if i < j { (i, j, false) } else { (j, i, true) };
        match self.entries.get(&(a, b)) {
            None => BTreeMap::new(),
            Some(m) => m
                .iter()
                .map(|(k, c)| (*k, if neg { -c.clone() } else { c.clone() }))
                .collect(),
        }
    }

    /// Bilinear extension of the bracket to coefficient vectors.
    pub fn bracket_vec(&self, x: &[Ratio], y: &[Ratio], n: usize) -> Vec<Ratio> {
        let mut out = vec![Ratio::zero(); n];
        for ((i, j), coeffs) in &self.entries {
            let cross = &x[*i] * &y[*j] - &x[*j] * &y[*i];
            if cross.is_zero() {
                continue;
            }
            for (k, c) in coeffs {
                out[*k] += &cross * c;
            }
        }
        out
    }

    /// All stored `(i, j, k, c)` with `i < j` and `c != 0`.
    pub fn triples(&self) -> Vec<(usize, usize, usize, Ratio)> {
        let mut out = Vec::new();
        for ((i, j), coeffs) in &self.entries {
            for (k, c) in coeffs {
                out.push((*i, *j, *k, c.clone()));
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A validated Carnot (stratified nilpotent) Lie algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct CarnotAlgebra {
    pub name: String,
    /// Total dimension.
    pub n: usize,
    /// Step: number of strata.
    pub step: u32,
    pub strata_dims: Vec<u32>,
    /// Weight of each basis index (the stratum it lies in, starting at 1).
    pub weights: Vec<u32>,
    /// Hausdorff dimension `Q = sum_i i * d_i`.
    pub hausdorff_dim: u32,
    pub labels: Option<Vec<String>>,
    pub table: BracketTable,
}

impl CarnotAlgebra {
    pub fn weight(&self, index: usize) -> u32 {
        self.weights[index]
    }

    /// Dimension of the first stratum (the horizontal space).
    pub fn horizontal_dim(&self) -> usize {
        self.strata_dims[0] as usize
    }

    pub fn label(&self, index: usize) -> String {
        match &self.labels {
            Some(l) => l[index].clone(),
            None => format!("e{}", index + 1),
        }
    }

    /// Offset of the first basis index of the given stratum (1-based stratum).
    pub fn stratum_offset(&self, stratum: u32) -> usize {
        self.strata_dims[..(stratum as usize - 1)]
            .iter()
            .map(|&d| d as usize)
            .sum()
    }

    /// Rebuild the sparse input form (used for serialization round trips).
    pub fn to_spec(&self) -> AlgebraSpec {
        let mut by_pair: BTreeMap<(usize, usize), BTreeMap<usize, Ratio>> = BTreeMap::new();
        for (i, j, k, c) in self.table.triples() {
            by_pair.entry((i, j)).or_default().insert(k, c);
        }
        AlgebraSpec {
            name: self.name.clone(),
            strata_dims: self.strata_dims.clone(),
            labels: self.labels.clone(),
            brackets: by_pair
                .into_iter()
                .map(|((i, j), coeffs)| BracketEntry { i, j, coeffs })
                .collect(),
        }
    }

    /// Build the algebra record without running any validation.
    ///
    /// Only meant for constructing deliberately broken bracket tables (for
    /// example to observe `d0 . d0 != 0` on a Jacobi-violating table); every
    /// normal code path must go through [`validate`].
    pub fn from_spec_unchecked(spec: &AlgebraSpec) -> CarnotAlgebra {
        let weights = weights_of(&spec.strata_dims);
        let n = weights.len();
        let hausdorff_dim = spec
            .strata_dims
            .iter()
            .enumerate()
            .map(|(s, d)| (s as u32 + 1) * d)
            .sum();
        CarnotAlgebra {
            name: spec.name.clone(),
            n,
            step: spec.strata_dims.len() as u32,
            strata_dims: spec.strata_dims.clone(),
            weights,
            hausdorff_dim,
            labels: spec.labels.clone(),
            table: BracketTable::from_entries(&spec.brackets),
        }
    }
}

fn weights_of(strata_dims: &[u32]) -> Vec<u32> {
    let mut w = Vec::new();
    for (s, d) in strata_dims.iter().enumerate() {
        for _ in 0..*d {
            w.push(s as u32 + 1);
        }
    }
    w
}

/// Parse a JSON algebra description into an [`AlgebraSpec`].
///
/// The document is an object with keys `name` (string), `strata` (array of
/// positive ints), optional `labels` (array of `n` strings) and `brackets`
/// (array of `{"i": int, "j": int, "coeffs": {"k": "p/q", ...}}`), all indices
/// 1-based. Rationals are exact `"p/q"` or integer strings.
pub fn parse_spec(text: &str) -> Result<AlgebraSpec> {
    let wire: WireSpec = serde_json::from_str(text)?;
    if wire.strata.is_empty() || wire.strata.contains(&0) {
        return Err(Error::EmptyStratum);
    }
    let n: usize = wire.strata.iter().map(|&d| d as usize).sum();
    if let Some(labels) = &wire.labels {
        if labels.len() != n {
            return Err(Error::LabelCount {
                got: labels.len(),
                expected: n,
            });
        }
    }
    let check_index = |v: i64| -> Result<usize> {
        if v < 1 || v as usize > n {
            Err(Error::IndexOutOfRange { index: v, n })
        } else {
            Ok(v as usize - 1)
        }
    };
    let mut seen = std::collections::BTreeSet::new();
    let mut brackets = Vec::new();
    for wb in &wire.brackets {
        let i = check_index(wb.i)?;
        let j = check_index(wb.j)?;
        if i >= j {
            return Err(Error::BracketOrder { i: i + 1, j: j + 1 });
        }
        if !seen.insert((i, j)) {
            return Err(Error::DuplicateBracket { i: i + 1, j: j + 1 });
        }
        let mut coeffs = BTreeMap::new();
        for (k_str, c_str) in &wb.coeffs {
            let k_raw: i64 = k_str.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("coefficient key {k_str:?} is not an index"))
            })?;
            let k = check_index(k_raw)?;
            coeffs.insert(k, parse_ratio(c_str)?);
        }
        brackets.push(BracketEntry { i, j, coeffs });
    }
    Ok(AlgebraSpec {
        name: wire.name,
        strata_dims: wire.strata,
        labels: wire.labels,
        brackets,
    })
}

/// Serialize a spec back to the JSON wire format (1-based indices).
pub fn serialize_spec(spec: &AlgebraSpec) -> String {
    let wire = WireSpec {
        name: spec.name.clone(),
        strata: spec.strata_dims.clone(),
        labels: spec.labels.clone(),
        brackets: spec
            .brackets
            .iter()
            .map(|b| WireBracket {
                i: b.i as i64 + 1,
                j: b.j as i64 + 1,
                coeffs: b
                    .coeffs
                    .iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| ((k + 1).to_string(), format_ratio(c)))
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string(&wire).expect("spec serialization cannot fail")
}

/// Validate a spec and build the full [`CarnotAlgebra`].
///
/// Checks, in order: the Jacobi identity (reporting the first failing basis
/// triple), the grading constraint, and generation of each stratum by
/// brackets `[V^1, V^{i-1}]`. Antisymmetry holds by construction since only
/// `i < j` entries are stored.
pub fn validate(spec: &AlgebraSpec) -> Result<CarnotAlgebra> {
    let alg = CarnotAlgebra::from_spec_unchecked(spec);
    let n = alg.n;

    // Jacobi on basis triples; the Jacobiator is alternating, so i < j < k
    // covers all cases.
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !jacobiator_is_zero(&alg.table, n, i, j, k) {
                    return Err(Error::JacobiViolation {
                        i: i + 1,
                        j: j + 1,
                        k: k + 1,
                    });
                }
            }
        }
    }

    for (i, j, k, _c) in alg.table.triples() {
        let (wi, wj, wk) = (alg.weights[i], alg.weights[j], alg.weights[k]);
        if wk != wi + wj {
            return Err(Error::GradingViolation {
                i: i + 1,
                j: j + 1,
                k: k + 1,
                wi,
                wj,
                wk,
            });
        }
    }

    // Generation: brackets of V^1 with V^{s-1} must span V^s.
    for s in 2..=alg.step {
        let ds = alg.strata_dims[s as usize - 1] as usize;
        let offset = alg.stratum_offset(s);
        let mut rows: Vec<Vec<Ratio>> = Vec::new();
        for i in 0..n {
            if alg.weights[i] != 1 {
                continue;
            }
            for j in 0..n {
                if alg.weights[j] != s - 1 || i == j {
                    continue;
                }
                let br = alg.table.bracket_basis(i, j);
                let mut row = vec![Ratio::zero(); ds];
                let mut nonzero = false;
                for (k, c) in br {
                    // Grading already verified: components lie in stratum s.
                    if (offset..offset + ds).contains(&k) {
                        row[k - offset] = c;
                        nonzero = true;
                    }
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
        let rank = if rows.is_empty() {
            0
        } else {
            Mat::from_rows(rows).rank()
        };
        if rank < ds {
            return Err(Error::NotGenerated { stratum: s });
        }
    }

    Ok(alg)
}

fn jacobiator_is_zero(table: &BracketTable, n: usize, i: usize, j: usize, k: usize) -> bool {
    let basis = |idx: usize| {
        let mut v = vec![Ratio::zero(); n];
        v[idx] = crate::ratio::one();
        v
    };
    let (ei, ej, ek) = (basis(i), basis(j), basis(k));
    let mut total = vec![Ratio::zero(); n];
    for (x, y, z) in [(&ei, &ej, &ek), (&ej, &ek, &ei), (&ek, &ei, &ej)] {
        let inner = table.bracket_vec(x, y, n);
        let outer = table.bracket_vec(&inner, z, n);
        for (t, v) in total.iter_mut().zip(outer) {
            *t += v;
        }
    }
    total.iter().all(Ratio::is_zero)
}

/// Hausdorff dimension of the associated Carnot-Caratheodory metric.
pub fn hausdorff_dimension(alg: &CarnotAlgebra) -> u32 {
    alg.hausdorff_dim
}

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

/// `(i, j, [(k, c), ...])` rows with integer coefficients.
type IntBrackets = Vec<(usize, usize, Vec<(usize, i64)>)>;

fn build(
    name: &str,
    strata: Vec<u32>,
    labels: Option<Vec<String>>,
    entries: IntBrackets,
) -> CarnotAlgebra {
    let brackets = entries
        .into_iter()
        .map(|(i, j, coeffs)| BracketEntry {
            i,
            j,
            coeffs: coeffs
                .into_iter()
                .map(|(k, c)| (k, crate::ratio::from_i64(c)))
                .collect(),
        })
        .collect();
    let spec = AlgebraSpec {
        name: name.to_string(),
        strata_dims: strata,
        labels,
        brackets,
    };
    validate(&spec).expect("builtin algebra must validate")
}

/// The abelian algebra `R^n` (single stratum, zero bracket).
pub fn abelian(n: u32) -> Result<CarnotAlgebra> {
    if n < 1 {
        return Err(Error::InvalidParameter("abelian requires n >= 1".into()));
    }
    Ok(build(&format!("abelian{n}"), vec![n], None, vec![]))
}

/// The Heisenberg algebra of dimension `2m + 1`: `[X_i, Y_i] = Z`.
pub fn heisenberg(m: u32) -> Result<CarnotAlgebra> {
    if m < 1 {
        return Err(Error::InvalidParameter("heisenberg requires m >= 1".into()));
    }
    let mut labels: Vec<String> = Vec::new();
    let mut entries = Vec::new();
    for i in 0..m as usize {
        labels.push(format!("X{}", i + 1));
        labels.push(format!("Y{}", i + 1));
        entries.push((2 * i, 2 * i + 1, vec![(2 * m as usize, 1)]));
    }
    labels.push("Z".to_string());
    Ok(build(
        &format!("heisenberg{m}"),
        vec![2 * m, 1],
        Some(labels),
        entries,
    ))
}

/// The quaternionic Heisenberg algebra of dimension `4m + 3`.
///
/// First stratum `H^m` with basis `(1, i, j, k)` per quaternionic coordinate,
/// second stratum the imaginary quaternions; the bracket of two horizontal
/// vectors is the imaginary part of the hermitian product `conj(x) y`.
pub fn quaternionic_heisenberg(m: u32) -> Result<CarnotAlgebra> {
    if m < 1 {
        return Err(Error::InvalidParameter(
            "quaternionic_heisenberg requires m >= 1".into(),
        ));
    }
    // Quaternion product on integer 4-tuples (1, i, j, k).
    fn qmul(a: [i64; 4], b: [i64; 4]) -> [i64; 4] {
        [
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ]
    }
    fn qconj(a: [i64; 4]) -> [i64; 4] {
        [a[0], -a[1], -a[2], -a[3]]
    }
    let units: [[i64; 4]; 4] = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
    let n1 = 4 * m as usize;
    let mut entries = Vec::new();
    for i in 0..n1 {
        for j in i + 1..n1 {
            if i / 4 != j / 4 {
                continue; // hermitian product is coordinatewise
            }
            let prod = qmul(qconj(units[i % 4]), units[j % 4]);
            let coeffs: Vec<(usize, i64)> = (0..3)
                .filter(|&c| prod[c + 1] != 0)
                .map(|c| (n1 + c, prod[c + 1]))
                .collect();
            if !coeffs.is_empty() {
                entries.push((i, j, coeffs));
            }
        }
    }
    let mut labels = Vec::new();
    for c in 1..=m {
        for unit in ["1", "i", "j", "k"] {
            labels.push(format!("Q{c}{unit}"));
        }
    }
    for unit in ["i", "j", "k"] {
        labels.push(format!("Z{unit}"));
    }
    Ok(build(
        &format!("quaternionic_heisenberg{m}"),
        vec![4 * m, 3],
        Some(labels),
        entries,
    ))
}

/// The Engel algebra: strata (2,1,1), `[e1,e2] = e3`, `[e1,e3] = e4`.
pub fn engel() -> CarnotAlgebra {
    build(
        "engel",
        vec![2, 1, 1],
        None,
        vec![(0, 1, vec![(2, 1)]), (0, 2, vec![(3, 1)])],
    )
}

/// The free nilpotent algebra of rank 2 and step 3: strata (2,1,2).
pub fn free_rank2_step3() -> CarnotAlgebra {
    build(
        "free_rank2_step3",
        vec![2, 1, 2],
        None,
        vec![
            (0, 1, vec![(2, 1)]),
            (0, 2, vec![(3, 1)]),
            (1, 2, vec![(4, 1)]),
        ],
    )
}

/// Named builtin dispatch. `m` is required for the parametrized families and
/// rejected for the fixed ones.
pub fn builtin(name: &str, m: Option<u32>) -> Result<CarnotAlgebra> {
    let need_m = || -> Result<u32> {
        m.ok_or_else(|| Error::InvalidParameter(format!("builtin {name:?} requires a parameter m")))
    };
    let reject_m = || -> Result<()> {
        if m.is_some() {
            Err(Error::InvalidParameter(format!(
                "builtin {name:?} takes no parameter"
            )))
        } else {
            Ok(())
        }
    };
    match name {
        "abelian" => abelian(need_m()?),
        "heisenberg" => heisenberg(need_m()?),
        "quaternionic_heisenberg" => quaternionic_heisenberg(need_m()?),
        "engel" => {
            reject_m()?;
            Ok(engel())
        }
        "free_rank2_step3" => {
            reject_m()?;
            Ok(free_rank2_step3())
        }
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

/// Every builtin, at small parameters, for exhaustive test sweeps.
pub fn all_builtins() -> Vec<CarnotAlgebra> {
    vec![
        abelian(1).unwrap(),
        abelian(3).unwrap(),
        heisenberg(1).unwrap(),
        heisenberg(2).unwrap(),
        heisenberg(3).unwrap(),
        quaternionic_heisenberg(1).unwrap(),
        engel(),
        free_rank2_step3(),
    ]
}
