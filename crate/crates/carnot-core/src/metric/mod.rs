//! Floating-point lab for the metric statements on step-2 groups: the exact
//! group law (the degree-2 series terminates, so `x y = x + y + [x, y]/2` is
//! not a truncation), dilations, the box gauge, and Monte Carlo scaling
//! experiments. Everything randomized is chunk-seeded, so results are
//! bit-for-bit reproducible for a given `(seed, samples)` and identical
//! between the parallel and sequential paths.

pub mod ccdist;
pub mod tube;
pub mod volume;

use crate::algebra::CarnotAlgebra;
use crate::error::{Error, Result};

/// A group point in exponential coordinates, ordered by strata.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement(pub Vec<f64>);

impl GroupElement {
    pub fn origin(n: usize) -> GroupElement {
        GroupElement(vec![0.0; n])
    }

    pub fn from_coords(coords: &[f64]) -> GroupElement {
        GroupElement(coords.to_vec())
    }
}

/// Structure constants flattened to floats for the hot loops.
#[derive(Debug, Clone)]
pub(crate) struct Step2Law {
    pub n: usize,
    pub weights: Vec<u32>,
    /// `(i, j, k, c)` with `i < j`.
    pub triples: Vec<(usize, usize, usize, f64)>,
}

impl Step2Law {
    pub fn new(alg: &CarnotAlgebra) -> Result<Step2Law> {
        if alg.step > 2 {
            return Err(Error::StepUnsupported {
                step: alg.step,
                max: 2,
            });
        }
        Ok(Step2Law {
            n: alg.n,
            weights: alg.weights.clone(),
            triples: alg
                .table
                .triples()
                .into_iter()
                .map(|(i, j, k, c)| (i, j, k, crate::ratio::to_f64(&c)))
                .collect(),
        })
    }

    pub fn multiply(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        for &(i, j, k, c) in &self.triples {
            out[k] += 0.5 * c * (x[i] * y[j] - x[j] * y[i]);
        }
        out
    }
}

/// Exact product for step <= 2 groups: `x y = x + y + [x, y] / 2`.
pub fn group_multiply(
    alg: &CarnotAlgebra,
    x: &GroupElement,
    y: &GroupElement,
) -> Result<GroupElement> {
    let law = Step2Law::new(alg)?;
    Ok(GroupElement(law.multiply(&x.0, &y.0)))
}

pub fn group_inverse(alg: &CarnotAlgebra, x: &GroupElement) -> Result<GroupElement> {
    if alg.step > 2 {
        return Err(Error::StepUnsupported {
            step: alg.step,
            max: 2,
        });
    }
    Ok(GroupElement(x.0.iter().map(|v| -v).collect()))
}

/// The dilation `delta_eps`: coordinate `i` scales by `eps^{weight(i)}`.
pub fn dilate(alg: &CarnotAlgebra, eps: f64, x: &GroupElement) -> GroupElement {
    assert!(eps > 0.0, "dilations are defined for eps > 0");
    GroupElement(
        x.0.iter()
            .enumerate()
            .map(|(i, v)| v * eps.powi(alg.weights[i] as i32))
            .collect(),
    )
}

/// The homogeneous box gauge `max_i |x_i|^{1/weight(i)}`. Its sublevel sets
/// are the anisotropic boxes `{|x_i| <= eps^{w(i)}}`.
pub fn box_gauge(alg: &CarnotAlgebra, x: &GroupElement) -> f64 {
    x.0.iter()
        .enumerate()
        .map(|(i, v)| v.abs().powf(1.0 / alg.weights[i] as f64))
        .fold(0.0, f64::max)
}
