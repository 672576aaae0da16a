//! The invariant-level splitting `Lambda^* = E + im d0 + F` and its projector.
//!
//! `E` is the harmonic complement (joint kernel of the differential and its
//! adjoint) of `im d0` inside `ker d0`, and `F` the orthogonal complement of
//! `ker d0`, i.e. the image of the adjoint. The partial inverse `(d0)^{-1}`
//! kills `E + F` and maps `im d0` back into `F`; the retraction
//! `R = 1 - d0 (d0)^{-1} - (d0)^{-1} d0` is iterated until stationary, which
//! on invariant forms happens immediately (`R^2 = R`), since the differential
//! coincides with its weight-preserving part there. The iteration is still
//! run as written so the stabilization count is observed, not assumed.

use crate::algebra::CarnotAlgebra;
use crate::cohomology::CohomologyTable;
use crate::error::{Error, Result};
use crate::exterior::{ce_differential, FormSpace};
use crate::linalg::{is_direct_sum_basis, Mat};
use crate::parallel;

/// Per-degree data of the splitting.
#[derive(Debug, Clone)]
pub struct RuminDegree {
    pub q: usize,
    /// Columns spanning `E` (harmonic complement).
    pub harmonic_basis: Mat,
    /// Columns spanning `im d0`.
    pub image_basis: Mat,
    /// Columns spanning `F`.
    pub complement_basis: Mat,
    /// `(d0)^{-1}: Lambda^q -> Lambda^{q-1}`.
    pub pseudo_inverse: Mat,
    /// `R = 1 - d0 (d0)^{-1} - (d0)^{-1} d0` on `Lambda^q`.
    pub retraction: Mat,
    /// Stabilized projector `p`.
    pub projector: Mat,
    /// Projector onto `E` along `im d0 + F`.
    pub pi: Mat,
    /// Independent computation of the image subcomplex
    /// `ker((d0)^{-1}) ^ ker((d0)^{-1} d0)`, canonical columns.
    pub subcomplex_basis: Mat,
    /// Iterations until the retraction powers became stationary.
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct RuminData {
    pub space: FormSpace,
    pub degrees: Vec<RuminDegree>,
}

impl RuminData {
    pub fn degree(&self, q: usize) -> &RuminDegree {
        &self.degrees[q]
    }

    pub fn harmonic_dims(&self) -> Vec<usize> {
        self.degrees
            .iter()
            .map(|d| d.harmonic_basis.cols())
            .collect()
    }
}

/// Cap on retraction iterations before reporting non-stabilization. One step
/// suffices on invariant forms; a few extra rounds cover nothing being special
/// about the first.
const MAX_STABILIZATION_STEPS: usize = 8;

pub fn build_rumin(alg: &CarnotAlgebra) -> Result<RuminData> {
    let maps = ce_differential(alg)?;
    let space = maps.space.clone();
    let n = space.n;

    // Phase 1: harmonic complement and orthogonal complement of the kernel.
    let harmonic: Vec<Mat> = parallel::map_collect((0..=n).collect(), |q| {
        let joint = maps.d(q).vstack(&maps.delta(q).clone());
        joint.kernel_basis().column_space_canonical()
    });
    let complement: Vec<Mat> = parallel::map_collect((0..=n).collect(), |q| {
        maps.d(q).row_space_canonical().transpose()
    });

    // Phase 2: image bases and pseudo-inverses. The image basis in degree q
    // is d0 applied to the F-basis one degree down, so the pseudo-inverse is
    // read off the same block decomposition.
    let mut image: Vec<Mat> = Vec::with_capacity(n + 1);
    for q in 0..=n {
        if q == 0 {
            image.push(Mat::zeros(space.dim(0), 0));
        } else {
            image.push(maps.d(q - 1).mul(&complement[q - 1]));
        }
    }
    let pseudo_inverse: Vec<Mat> = parallel::map_collect((0..=n).collect(), |q| {
        let dim = space.dim(q);
        if q == 0 {
            return Mat::zeros(0, dim);
        }
        let e = &harmonic[q];
        let im = &image[q];
        let f = &complement[q];
        assert!(
            is_direct_sum_basis(&[e, im, f], dim),
            "E + im d0 + F is not a direct sum in degree {q}"
        );
        let basis = e.hstack(im).hstack(f);
        let basis_inv = basis.inverse().expect("direct sum basis is invertible");
        // Send the image basis vectors to their F-preimages, kill E and F.
        let mut target = Mat::zeros(space.dim(q - 1), dim);
        let f_prev = &complement[q - 1];
        let offset = e.cols();
        for c in 0..im.cols() {
            for r in 0..space.dim(q - 1) {
                *target.at_mut(r, offset + c) = f_prev.at(r, c).clone();
            }
        }
        target.mul(&basis_inv)
    });

    // Phase 3: retraction, stabilized projector, and the two projections.
    let degrees = parallel::map_collect((0..=n).collect(), |q| -> Result<RuminDegree> {
        let dim = space.dim(q);
        let low = if q == 0 {
            Mat::zeros(dim, dim)
        } else {
            maps.d(q - 1).mul(&pseudo_inverse[q])
        };
        let high = if q == n {
            Mat::zeros(dim, dim)
        } else {
            pseudo_inverse[q + 1].mul(maps.d(q))
        };
        let retraction = Mat::identity(dim).sub(&low).sub(&high);
        let mut projector = retraction.clone();
        let mut iterations = 1;
        loop {
            let next = projector.mul(&retraction);
            if next == projector {
                break;
            }
            projector = next;
            iterations += 1;
            if iterations > MAX_STABILIZATION_STEPS {
                return Err(Error::NonStabilization {
                    degree: q,
                    iterations,
                });
            }
        }
        let e = &harmonic[q];
        let basis = e.hstack(&image[q]).hstack(&complement[q]);
        let basis_inv = basis.inverse().expect("direct sum basis is invertible");
        let mut e_padded = Mat::zeros(dim, dim);
        for c in 0..e.cols() {
            for r in 0..dim {
                *e_padded.at_mut(r, c) = e.at(r, c).clone();
            }
        }
        let pi = e_padded.mul(&basis_inv);
        let dinv_d = if q == n {
            Mat::zeros(0, dim)
        } else {
            pseudo_inverse[q + 1].mul(maps.d(q))
        };
        let subcomplex = pseudo_inverse[q]
            .vstack(&dinv_d)
            .kernel_basis()
            .column_space_canonical();
        Ok(RuminDegree {
            q,
            harmonic_basis: harmonic[q].clone(),
            image_basis: image[q].clone(),
            complement_basis: complement[q].clone(),
            pseudo_inverse: pseudo_inverse[q].clone(),
            retraction,
            projector,
            pi,
            subcomplex_basis: subcomplex,
            iterations,
        })
    });
    let degrees = degrees.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(RuminData { space, degrees })
}

#[derive(Debug, Clone)]
pub struct RuminCheck {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct RuminReport {
    pub checks: Vec<RuminCheck>,
}

impl RuminReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> Vec<&RuminCheck> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }
}

/// Exact verification of the structural identities of the splitting.
///
/// All checks are matrix identities over the rationals; failures are reported
/// per identity rather than raised, since each one is a theorem and a failure
/// can only mean an implementation bug.
pub fn verify_rumin_identities(
    data: &RuminData,
    alg: &CarnotAlgebra,
    table: &CohomologyTable,
) -> RuminReport {
    let maps = ce_differential(alg).expect("data was built, so the space fits");
    let space = &data.space;
    let n = space.n;

    // Each identity collects the degrees where it fails.
    struct Identity {
        name: &'static str,
        bad_degrees: Vec<usize>,
    }
    let mut identities = [
        Identity {
            name: "p is idempotent",
            bad_degrees: vec![],
        },
        Identity {
            name: "im p equals ker((d0)^-1) ^ ker((d0)^-1 d0)",
            bad_degrees: vec![],
        },
        Identity {
            name: "p . pi = identity on the subcomplex",
            bad_degrees: vec![],
        },
        Identity {
            name: "subcomplex dimensions equal Betti numbers",
            bad_degrees: vec![],
        },
        Identity {
            name: "p preserves the weight filtration",
            bad_degrees: vec![],
        },
        Identity {
            name: "retraction fixes E and kills im d0 and F",
            bad_degrees: vec![],
        },
        Identity {
            name: "pseudo-inverse identity",
            bad_degrees: vec![],
        },
        Identity {
            name: "d0 vanishes on the subcomplex",
            bad_degrees: vec![],
        },
    ];

    for q in 0..=n {
        let deg = &data.degrees[q];
        let p = &deg.projector;
        let e_cols = &deg.subcomplex_basis;
        let r = &deg.retraction;
        let results = [
            p.mul(p) == *p,
            p.column_space_canonical() == *e_cols,
            p.mul(&deg.pi).mul(e_cols) == *e_cols,
            e_cols.cols() == table.betti(q),
            p.support_within(|row, col| space.weight_at(q, row) >= space.weight_at(q, col)),
            r.mul(&deg.harmonic_basis) == deg.harmonic_basis
                && r.mul(&deg.image_basis).is_zero()
                && r.mul(&deg.complement_basis).is_zero(),
            q == 0 || {
                let inv = &deg.pseudo_inverse;
                inv.mul(&maps.d(q - 1).mul(inv)) == *inv
            },
            maps.d(q).mul(e_cols).is_zero(),
        ];
        for (identity, ok) in identities.iter_mut().zip(results) {
            if !ok {
                identity.bad_degrees.push(q);
            }
        }
    }

    let checks = identities
        .into_iter()
        .map(|identity| RuminCheck {
            name: identity.name,
            ok: identity.bad_degrees.is_empty(),
            detail: if identity.bad_degrees.is_empty() {
                "ok".to_string()
            } else {
                format!("fails in degrees {:?}", identity.bad_degrees)
            },
        })
        .collect();
    RuminReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra;
    use crate::cohomology::compute_cohomology;
    use crate::exterior::Form;

    #[test]
    fn abelian_splitting_is_trivial() {
        let alg = algebra::abelian(3).unwrap();
        let data = build_rumin(&alg).unwrap();
        for q in 0..=3usize {
            let deg = data.degree(q);
            assert_eq!(deg.harmonic_basis.cols(), data.space.dim(q));
            assert_eq!(deg.complement_basis.cols(), 0);
            assert_eq!(deg.image_basis.cols(), 0);
            assert_eq!(deg.retraction, Mat::identity(data.space.dim(q)));
            assert_eq!(deg.projector, Mat::identity(data.space.dim(q)));
            assert_eq!(deg.iterations, 1);
        }
    }

    #[test]
    fn heisenberg_dims_and_projector() {
        let alg = algebra::heisenberg(1).unwrap();
        let data = build_rumin(&alg).unwrap();
        assert_eq!(data.harmonic_dims(), vec![1, 2, 2, 1]);
        // The degree-1 subcomplex is exactly the span of the two horizontal
        // duals, and p . pi fixes it.
        let deg1 = data.degree(1);
        let expected = Mat::from_fn(3, 2, |r, c| {
            if r == c {
                crate::ratio::one()
            } else {
                crate::ratio::zero()
            }
        });
        assert_eq!(deg1.subcomplex_basis, expected);
        assert_eq!(
            deg1.projector.mul(&deg1.pi).mul(&deg1.subcomplex_basis),
            deg1.subcomplex_basis
        );
        // In degree 2, theta^1 ^ theta^2 = d0(-theta^3) is exact: p kills it.
        let deg = data.degree(2);
        let v = data.space.form_to_vec(&Form::monomial(&[0, 1]));
        assert!(deg.projector.mul_vec(&v).iter().all(num::Zero::is_zero));
        // The image of p in degree 2 consists of weight-3 forms.
        let im_p = deg.projector.column_space_canonical();
        assert!(im_p.support_within(|r, _| data.space.weight_at(2, r) == 3));
        assert_eq!(deg.iterations, 1);
    }

    #[test]
    fn engel_subcomplex_dims() {
        let alg = algebra::engel();
        let data = build_rumin(&alg).unwrap();
        let dims: Vec<usize> = data
            .degrees
            .iter()
            .map(|d| d.subcomplex_basis.cols())
            .collect();
        assert_eq!(dims, vec![1, 2, 2, 2, 1]);
    }

    #[test]
    fn identities_hold_for_small_builtins() {
        for alg in [algebra::heisenberg(1).unwrap(), algebra::engel()] {
            let data = build_rumin(&alg).unwrap();
            let table = compute_cohomology(&alg).unwrap();
            let report = verify_rumin_identities(&data, &alg, &table);
            assert!(report.all_ok(), "failures: {:?}", report.failures());
        }
    }
}
