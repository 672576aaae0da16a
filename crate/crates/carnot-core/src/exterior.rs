//! Exact exterior algebra over the dual of a Carnot algebra.
//!
//! Monomials `theta^{i_1} ^ ... ^ theta^{i_q}` (strictly increasing indices)
//! are enumerated lexicographically within each degree and graded by weight
//! `w = sum of stratum weights`. The monomial basis is declared orthonormal
//! (equivalently: the Lie algebra basis is orthonormal with orthogonal
//! strata), so the adjoint of the differential is a plain matrix transpose.
//!
//! Sign convention: `d theta^k = - sum_{i<j} c_ij^k theta^i ^ theta^j`, i.e.
//! `d theta (X, Y) = - theta([X, Y])`, extended to higher degrees as an
//! antiderivation. Cohomology dimensions do not depend on this choice, but
//! golden outputs do, so it is fixed here once.

use std::collections::BTreeMap;

use num::Zero;

use crate::algebra::CarnotAlgebra;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::ratio::Ratio;

/// Hard cap on the algebra dimension for dense exact-rational matrices.
/// `C(12,6) = 924` keeps every pipeline comfortably in memory; larger inputs
/// are rejected with a capacity error instead of degrading silently.
pub const MAX_DIMENSION: usize = 12;

/// A single basis monomial of `Lambda^q`, with its weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormBasisIndex {
    pub degree: usize,
    /// Strictly increasing 0-based generator indices.
    pub indices: Vec<u8>,
    pub weight: u32,
}

/// Enumerated monomial bases of all degrees for one algebra.
#[derive(Debug, Clone)]
pub struct FormSpace {
    pub n: usize,
    pub weights: Vec<u32>,
    pub total_weight: u32,
    bases: Vec<Vec<Vec<u8>>>,
    lookup: Vec<BTreeMap<Vec<u8>, usize>>,
    weight_by_pos: Vec<Vec<u32>>,
    blocks: Vec<BTreeMap<u32, Vec<usize>>>,
}

impl FormSpace {
    pub fn new(alg: &CarnotAlgebra) -> Result<FormSpace> {
        let n = alg.n;
        if n > MAX_DIMENSION {
            return Err(Error::CapacityExceeded {
                n,
                max: MAX_DIMENSION,
            });
        }
        let mut bases = Vec::with_capacity(n + 1);
        let mut lookup = Vec::with_capacity(n + 1);
        let mut weight_by_pos = Vec::with_capacity(n + 1);
        let mut blocks = Vec::with_capacity(n + 1);
        for q in 0..=n {
            let monos = combinations(n, q);
            let mut map = BTreeMap::new();
            let mut wts = Vec::with_capacity(monos.len());
            let mut blk: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for (pos, m) in monos.iter().enumerate() {
                map.insert(m.clone(), pos);
                let w: u32 = m.iter().map(|&i| alg.weights[i as usize]).sum();
                wts.push(w);
                blk.entry(w).or_default().push(pos);
            }
            bases.push(monos);
            lookup.push(map);
            weight_by_pos.push(wts);
            blocks.push(blk);
        }
        Ok(FormSpace {
            n,
            weights: alg.weights.clone(),
            total_weight: alg.hausdorff_dim,
            bases,
            lookup,
            weight_by_pos,
            blocks,
        })
    }

    pub fn dim(&self, q: usize) -> usize {
        self.bases.get(q).map_or(0, Vec::len)
    }

    pub fn basis(&self, q: usize) -> &[Vec<u8>] {
        &self.bases[q]
    }

    pub fn basis_index(&self, q: usize, pos: usize) -> FormBasisIndex {
        FormBasisIndex {
            degree: q,
            indices: self.bases[q][pos].clone(),
            weight: self.weight_by_pos[q][pos],
        }
    }

    pub fn position(&self, q: usize, indices: &[u8]) -> usize {
        self.lookup[q][indices]
    }

    pub fn weight_at(&self, q: usize, pos: usize) -> u32 {
        self.weight_by_pos[q][pos]
    }

    /// Weight blocks of `Lambda^q`: weight -> basis positions.
    pub fn blocks(&self, q: usize) -> &BTreeMap<u32, Vec<usize>> {
        &self.blocks[q]
    }

    pub fn form_to_vec(&self, form: &Form) -> Vec<Ratio> {
        let mut v = vec![Ratio::zero(); self.dim(form.degree)];
        for (mono, c) in &form.coeffs {
            v[self.position(form.degree, mono)] = c.clone();
        }
        v
    }

    pub fn vec_to_form(&self, q: usize, v: &[Ratio]) -> Form {
        assert_eq!(v.len(), self.dim(q));
        let mut coeffs = BTreeMap::new();
        for (pos, c) in v.iter().enumerate() {
            if !c.is_zero() {
                coeffs.insert(self.bases[q][pos].clone(), c.clone());
            }
        }
        Form { degree: q, coeffs }
    }
}

fn combinations(n: usize, q: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut current: Vec<u8> = Vec::with_capacity(q);
    fn rec(n: usize, q: usize, start: usize, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if current.len() == q {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i as u8);
            rec(n, q, i + 1, current, out);
            current.pop();
        }
    }
    rec(n, q, 0, &mut current, &mut out);
    out
}

/// A form with exact rational coefficients; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    degree: usize,
    coeffs: BTreeMap<Vec<u8>, Ratio>,
}

impl Form {
    pub fn zero(degree: usize) -> Form {
        Form {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis monomial with the given strictly increasing 0-based indices.
    pub fn monomial(indices: &[u8]) -> Form {
        assert!(
            indices.windows(2).all(|w| w[0] < w[1]),
            "indices must increase"
        );
        Form {
            degree: indices.len(),
            coeffs: [(indices.to_vec(), crate::ratio::one())]
                .into_iter()
                .collect(),
        }
    }

    pub fn term(indices: &[u8], coeff: Ratio) -> Form {
        let mut f = Form::zero(indices.len());
        f.add_term(indices.to_vec(), coeff);
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, indices: &[u8]) -> Ratio {
        self.coeffs
            .get(indices)
            .cloned()
            .unwrap_or_else(Ratio::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &Ratio)> {
        self.coeffs.iter()
    }

    fn add_term(&mut self, indices: Vec<u8>, coeff: Ratio) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(indices);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &Form) -> Form {
        assert_eq!(self.degree, rhs.degree);
        let mut out = self.clone();
        for (m, c) in &rhs.coeffs {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Ratio) -> Form {
        let mut out = Form::zero(self.degree);
        for (m, c) in &self.coeffs {
            out.add_term(m.clone(), c * factor);
        }
        out
    }

    /// Render with 1-based indices, e.g. `t(1,2) - 1/2 t(3,4)`.
    pub fn display(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (m, c) in &self.coeffs {
            let coeff = crate::ratio::format_ratio(c);
            let idx: Vec<String> = m.iter().map(|i| (i + 1).to_string()).collect();
            let mono = if m.is_empty() {
                "1".to_string()
            } else {
                format!("t({})", idx.join(","))
            };
            if out.is_empty() {
                out = format!("{coeff} {mono}");
            } else if let Some(tail) = coeff.strip_prefix('-') {
                out.push_str(&format!(" - {tail} {mono}"));
            } else {
                out.push_str(&format!(" + {coeff} {mono}"));
            }
        }
        out
    }
}

/// Merge two strictly increasing index tuples, counting the shuffle sign.
/// Returns `None` when an index repeats.
fn merge_indices(a: &[u8], b: &[u8]) -> Option<(i32, Vec<u8>)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut sign = 1;
    let (mut ia, mut ib) = (0, 0);
    while ia < a.len() && ib < b.len() {
        if a[ia] == b[ib] {
            return None;
        }
        if a[ia] < b[ib] {
            out.push(a[ia]);
            ia += 1;
        } else {
            if (a.len() - ia) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[ib]);
            ib += 1;
        }
    }
    out.extend_from_slice(&a[ia..]);
    out.extend_from_slice(&b[ib..]);
    Some((sign, out))
}

/// Graded-anticommutative wedge product.
pub fn wedge(a: &Form, b: &Form) -> Form {
    let mut out = Form::zero(a.degree + b.degree);
    for (ma, ca) in &a.coeffs {
        for (mb, cb) in &b.coeffs {
            if let Some((sign, merged)) = merge_indices(ma, mb) {
                let mut c = ca * cb;
                if sign < 0 {
                    c = -c;
                }
                out.add_term(merged, c);
            }
        }
    }
    out
}

/// Hodge star for the orthonormal monomial basis: the image of a monomial is
/// the signed complementary monomial; a `(q, w)` monomial lands in
/// `(n - q, Q - w)`.
pub fn hodge_star(space: &FormSpace, form: &Form) -> Form {
    let n = space.n as u8;
    let mut out = Form::zero(space.n - form.degree);
    for (m, c) in &form.coeffs {
        let complement: Vec<u8> = (0..n).filter(|i| !m.contains(i)).collect();
        // Inversions of the concatenation (m, complement) as a permutation.
        let mut inversions = 0usize;
        for &x in m {
            inversions += complement.iter().filter(|&&y| y < x).count();
        }
        let mut coeff = c.clone();
        if inversions % 2 == 1 {
            coeff = -coeff;
        }
        out.add_term(complement, coeff);
    }
    out
}

/// The differential and its adjoint in the enumerated monomial bases.
#[derive(Debug, Clone)]
pub struct DifferentialMaps {
    pub space: FormSpace,
    /// `d[q]: Lambda^q -> Lambda^{q+1}` acting on coefficient columns.
    d: Vec<Mat>,
    /// `delta[q]: Lambda^q -> Lambda^{q-1}`, the transpose of `d[q-1]`.
    delta: Vec<Mat>,
}

impl DifferentialMaps {
    pub fn d(&self, q: usize) -> &Mat {
        &self.d[q]
    }

    pub fn delta(&self, q: usize) -> &Mat {
        &self.delta[q]
    }

    pub fn apply_d(&self, form: &Form) -> Form {
        let q = form.degree();
        if q >= self.space.n {
            // There are no (q+1)-forms.
            return Form::zero(q + 1);
        }
        let v = self.space.form_to_vec(form);
        self.space.vec_to_form(q + 1, &self.d[q].mul_vec(&v))
    }

    /// Is `d . d = 0` as stored matrices? Always true for validated algebras;
    /// false exactly when the bracket table violates the Jacobi identity.
    pub fn is_complex(&self) -> bool {
        (0..self.space.n).all(|q| self.d[q + 1].mul(&self.d[q]).is_zero())
    }
}

/// Differential of the dual generator `theta^k` as a 2-form.
fn d_generator(alg: &CarnotAlgebra, k: usize) -> Form {
    let mut out = Form::zero(2);
    for (i, j, kk, c) in alg.table.triples() {
        if kk == k {
            out.add_term(vec![i as u8, j as u8], -c);
        }
    }
    out
}

fn build_maps(alg: &CarnotAlgebra) -> Result<DifferentialMaps> {
    let space = FormSpace::new(alg)?;
    let n = space.n;
    let dgen: Vec<Form> = (0..n).map(|k| d_generator(alg, k)).collect();
    let mut d = Vec::with_capacity(n + 1);
    for q in 0..=n {
        let rows = if q < n { space.dim(q + 1) } else { 0 };
        let mut mat = Mat::zeros(rows, space.dim(q));
        if q < n {
            for (col, mono) in space.basis(q).iter().enumerate() {
                let mut image = Form::zero(q + 1);
                for (pos, &gen) in mono.iter().enumerate() {
                    let mut rest = mono.clone();
                    rest.remove(pos);
                    let mut term = wedge(&dgen[gen as usize], &Form::monomial(&rest));
                    if pos % 2 == 1 {
                        term = term.scale(&-crate::ratio::one());
                    }
                    image = image.add(&term);
                }
                for (m, c) in image.terms() {
                    *mat.at_mut(space.position(q + 1, m), col) = c.clone();
                }
            }
        }
        d.push(mat);
    }
    let mut delta = Vec::with_capacity(n + 1);
    delta.push(Mat::zeros(0, 1)); // delta on Lambda^0
    for q in 1..=n {
        delta.push(d[q - 1].transpose());
    }
    Ok(DifferentialMaps { space, d, delta })
}

/// Build the differential for a validated algebra.
///
/// Asserts the complex property on generators (`d(d theta^k) = 0`, which is
/// equivalent to the Jacobi identity) and weight homogeneity of every matrix;
/// a failure here means a validation bug upstream.
pub fn ce_differential(alg: &CarnotAlgebra) -> Result<DifferentialMaps> {
    let maps = build_maps(alg)?;
    for k in 0..alg.n {
        let dg = d_generator(alg, k);
        assert!(
            maps.apply_d(&dg).is_zero(),
            "d.d != 0 on generator {k}: bracket table violates Jacobi"
        );
    }
    for q in 0..alg.n {
        let space = &maps.space;
        assert!(
            maps.d[q].support_within(|r, c| space.weight_at(q + 1, r) == space.weight_at(q, c)),
            "differential is not weight homogeneous in degree {q}"
        );
    }
    Ok(maps)
}

/// Same construction without the complex-property assertion, for raw bracket
/// tables that may violate Jacobi.
pub fn ce_differential_unchecked(alg: &CarnotAlgebra) -> Result<DifferentialMaps> {
    build_maps(alg)
}
