//! Upper bounds on the Carnot-Caratheodory distance in the 3-dimensional
//! Heisenberg group by constrained polygon optimization.
//!
//! A horizontal path is determined by its planar trace: with the contact form
//! `dz - x dy` the vertical coordinate accumulates `int x dy` along the
//! trace. In the exponential coordinates used by the group law the lift is
//! the symmetrized integral `(1/2) int (x dy - y dx)`; for a polygon both are
//! exact segment-by-segment (shoelace sums) and differ by the boundary term
//! `x y / 2` at the endpoint. We optimize the exponential-coordinate lift.
//!
//! The optimizer minimizes the polygon length under the lift constraint via
//! a quadratic penalty ramped by a factor of ten over six outer rounds, with
//! coordinate descent over the interior vertices and seeded random restarts.
//! The problem is solved in dilation-normalized coordinates (planar scale
//! `s`, vertical scale `s^2`), which makes the returned bound exactly
//! homogeneous under dilations of the target. Because the lift is affine in
//! each single vertex, a final one-vertex shift restores the constraint
//! exactly, so the reported value is the length of a genuinely feasible path.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::CarnotAlgebra;
use crate::error::{Error, Result};
use crate::metric::GroupElement;
use crate::parallel;
use num::One;

/// A polygonal horizontal path from the origin, as its planar trace.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalPath {
    pub target: GroupElement,
    pub vertices: Vec<[f64; 2]>,
}

impl HorizontalPath {
    pub fn length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum()
    }

    /// Lift in exponential coordinates: `(1/2) sum (x_i y_{i+1} - y_i x_{i+1})`.
    pub fn lift_z_exp(&self) -> f64 {
        0.5 * self
            .vertices
            .windows(2)
            .map(|w| w[0][0] * w[1][1] - w[0][1] * w[1][0])
            .sum::<f64>()
    }

    /// Lift in the `dz - x dy` convention: `int x dy`, exact per segment.
    /// Relates to the exponential lift by `z_exp = z_paper - x_end y_end / 2`.
    pub fn lift_z_paper(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| 0.5 * (w[0][0] + w[1][0]) * (w[1][1] - w[0][1]))
            .sum::<f64>()
    }
}

#[derive(Debug, Clone)]
pub struct CcUpperBound {
    pub length: f64,
    /// |lift - target z| of the returned path (exponential coordinates).
    pub constraint_violation: f64,
    pub path: HorizontalPath,
    pub segments: usize,
    pub restarts: usize,
    pub seed: u64,
}

const OUTER_ROUNDS: usize = 6;
const PENALTY_GROWTH: f64 = 10.0;
const SWEEPS_PER_ROUND: usize = 40;
const STEPS_PER_VERTEX: usize = 6;
const NORMALIZED_TOLERANCE: f64 = 1e-6;

fn require_heisenberg1(alg: &CarnotAlgebra) -> Result<()> {
    let triples = alg.table.triples();
    let ok = alg.n == 3
        && alg.step == 2
        && triples.len() == 1
        && triples[0].0 == 0
        && triples[0].1 == 1
        && triples[0].2 == 2
        && triples[0].3.is_one();
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter(
            "cc distance optimizer is specific to the 3-dimensional Heisenberg group".into(),
        ))
    }
}

struct Objective {
    target_xy: [f64; 2],
    target_z: f64,
}

impl Objective {
    fn lift(vertices: &[[f64; 2]]) -> f64 {
        0.5 * vertices
            .windows(2)
            .map(|w| w[0][0] * w[1][1] - w[0][1] * w[1][0])
            .sum::<f64>()
    }

    /// Gradient of the lift with respect to vertex `i`.
    fn lift_grad(vertices: &[[f64; 2]], i: usize) -> [f64; 2] {
        let prev = vertices[i - 1];
        let next = vertices[i + 1];
        [0.5 * (next[1] - prev[1]), 0.5 * (prev[0] - next[0])]
    }

    fn optimize_vertex(&self, vertices: &mut [[f64; 2]], i: usize, lambda: f64) {
        let a = vertices[i - 1];
        let b = vertices[i + 1];
        let grad_z = Self::lift_grad(vertices, i);
        // The lift is affine in vertex i: z = base + grad_z . v.
        let z_now = Self::lift(vertices);
        let v0 = vertices[i];
        let base = z_now - grad_z[0] * v0[0] - grad_z[1] * v0[1];
        let f = |v: [f64; 2]| -> f64 {
            let g = base + grad_z[0] * v[0] + grad_z[1] * v[1] - self.target_z;
            (v[0] - a[0]).hypot(v[1] - a[1]) + (v[0] - b[0]).hypot(v[1] - b[1]) + lambda * g * g
        };
        let mut v = v0;
        for _ in 0..STEPS_PER_VERTEX {
            let da = ((v[0] - a[0]).hypot(v[1] - a[1])).max(1e-12);
            let db = ((v[0] - b[0]).hypot(v[1] - b[1])).max(1e-12);
            let g = base + grad_z[0] * v[0] + grad_z[1] * v[1] - self.target_z;
            let grad = [
                (v[0] - a[0]) / da + (v[0] - b[0]) / db + 2.0 * lambda * g * grad_z[0],
                (v[1] - a[1]) / da + (v[1] - b[1]) / db + 2.0 * lambda * g * grad_z[1],
            ];
            let norm2 = grad[0] * grad[0] + grad[1] * grad[1];
            if norm2 < 1e-24 {
                break;
            }
            let f_now = f(v);
            let mut step = 0.25;
            let mut improved = false;
            for _ in 0..30 {
                let cand = [v[0] - step * grad[0], v[1] - step * grad[1]];
                if f(cand) <= f_now - 0.3 * step * norm2 {
                    v = cand;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        vertices[i] = v;
    }

    fn run_restart(&self, segments: usize, rng: &mut ChaCha8Rng) -> Option<(f64, Vec<[f64; 2]>)> {
        let k = segments;
        let amp = 0.35 + 0.25 * (rng.gen_range(0..4) as f64);
        let mut vertices: Vec<[f64; 2]> = (0..=k)
            .map(|i| {
                let t = i as f64 / k as f64;
                let mut v = [t * self.target_xy[0], t * self.target_xy[1]];
                if i != 0 && i != k {
                    v[0] += amp * rng.gen_range(-1.0..1.0);
                    v[1] += amp * rng.gen_range(-1.0..1.0);
                }
                v
            })
            .collect();
        let mut lambda = 1.0;
        for _ in 0..OUTER_ROUNDS {
            for _ in 0..SWEEPS_PER_ROUND {
                for i in 1..k {
                    self.optimize_vertex(&mut vertices, i, lambda);
                }
            }
            lambda *= PENALTY_GROWTH;
        }
        // Exact constraint restoration: shift the vertex with the largest
        // lift gradient; the lift is affine in it.
        let mut best: Option<(usize, [f64; 2], f64)> = None;
        for i in 1..k {
            let g = Self::lift_grad(&vertices, i);
            let n2 = g[0] * g[0] + g[1] * g[1];
            if best.as_ref().is_none_or(|(_, _, bn)| n2 > *bn) {
                best = Some((i, g, n2));
            }
        }
        let (i, g, n2) = best?;
        if n2 < 1e-18 {
            return None; // fully degenerate trace, cannot correct
        }
        let residual = self.target_z - Self::lift(&vertices);
        vertices[i][0] += residual * g[0] / n2;
        vertices[i][1] += residual * g[1] / n2;
        let violation = (Self::lift(&vertices) - self.target_z).abs();
        if violation > NORMALIZED_TOLERANCE {
            return None;
        }
        let length = vertices
            .windows(2)
            .map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]))
            .sum();
        Some((length, vertices))
    }
}

fn run(
    alg: &CarnotAlgebra,
    target: &GroupElement,
    segments: usize,
    restarts: usize,
    seed: u64,
    sequential: bool,
) -> Result<CcUpperBound> {
    require_heisenberg1(alg)?;
    if segments < 8 {
        return Err(Error::InvalidParameter(
            "segments must be at least 8".into(),
        ));
    }
    if restarts < 1 {
        return Err(Error::InvalidParameter(
            "restarts must be at least 1".into(),
        ));
    }
    if target.0.len() != 3 || !target.0.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter(
            "target must be three finite coordinates".into(),
        ));
    }
    let [x_t, y_t, z_t] = [target.0[0], target.0[1], target.0[2]];
    let scale = x_t.hypot(y_t).max(z_t.abs().sqrt());
    if scale == 0.0 {
        let path = HorizontalPath {
            target: target.clone(),
            vertices: vec![[0.0, 0.0]; segments + 1],
        };
        return Ok(CcUpperBound {
            length: 0.0,
            constraint_violation: 0.0,
            path,
            segments,
            restarts,
            seed,
        });
    }
    let objective = Objective {
        target_xy: [x_t / scale, y_t / scale],
        target_z: z_t / (scale * scale),
    };

    let outcomes = {
        let worker = |r: usize| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            objective.run_restart(segments, &mut rng)
        };
        let idx: Vec<usize> = (0..restarts).collect();
        if sequential {
            parallel::map_collect_seq(idx, worker)
        } else {
            parallel::map_collect(idx, worker)
        }
    };
    let best = outcomes
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.partial_cmp(&b.0).expect("lengths are finite"));
    let Some((norm_length, norm_vertices)) = best else {
        return Err(Error::NonConvergence {
            violation: f64::NAN,
            tolerance: NORMALIZED_TOLERANCE,
        });
    };
    let vertices: Vec<[f64; 2]> = norm_vertices
        .iter()
        .map(|v| [v[0] * scale, v[1] * scale])
        .collect();
    let path = HorizontalPath {
        target: target.clone(),
        vertices,
    };
    let violation = (path.lift_z_exp() - z_t).abs();
    Ok(CcUpperBound {
        length: norm_length * scale,
        constraint_violation: violation,
        path,
        segments,
        restarts,
        seed,
    })
}

/// Best found length of a horizontal polygon from the origin to `target`;
/// an upper bound for the Carnot-Caratheodory distance.
pub fn cc_distance_upper(
    alg: &CarnotAlgebra,
    target: &GroupElement,
    segments: usize,
    restarts: usize,
    seed: u64,
) -> Result<CcUpperBound> {
    run(alg, target, segments, restarts, seed, false)
}

/// Single-threaded variant; produces identical results.
pub fn cc_distance_upper_seq(
    alg: &CarnotAlgebra,
    target: &GroupElement,
    segments: usize,
    restarts: usize,
    seed: u64,
) -> Result<CcUpperBound> {
    run(alg, target, segments, restarts, seed, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra;

    fn heis() -> CarnotAlgebra {
        algebra::heisenberg(1).unwrap()
    }

    #[test]
    fn straight_horizontal_target() {
        let result = cc_distance_upper(
            &heis(),
            &GroupElement::from_coords(&[1.0, 0.0, 0.0]),
            16,
            4,
            0,
        )
        .unwrap();
        assert!(
            (result.length - 1.0).abs() < 0.005,
            "length {}",
            result.length
        );
        assert!(result.constraint_violation < 1e-9);
    }

    #[test]
    fn vertical_target_matches_isoperimetric_optimum() {
        // Minimal closed planar curve enclosing unit area: length 2 sqrt(pi).
        let result = cc_distance_upper(
            &heis(),
            &GroupElement::from_coords(&[0.0, 0.0, 1.0]),
            24,
            6,
            0,
        )
        .unwrap();
        let dido = 2.0 * std::f64::consts::PI.sqrt();
        assert!(
            result.length >= dido - 1e-6 && result.length <= 1.05 * dido,
            "length {} vs {dido}",
            result.length
        );
    }

    #[test]
    fn dilation_homogeneity() {
        let base = cc_distance_upper(
            &heis(),
            &GroupElement::from_coords(&[0.0, 0.0, 1.0]),
            24,
            6,
            0,
        )
        .unwrap();
        for eps in [0.5f64, 2.0] {
            let scaled = cc_distance_upper(
                &heis(),
                &GroupElement::from_coords(&[0.0, 0.0, eps * eps]),
                24,
                6,
                0,
            )
            .unwrap();
            let ratio = scaled.length / base.length;
            assert!((ratio / eps - 1.0).abs() < 0.02, "eps {eps}: ratio {ratio}");
        }
    }

    #[test]
    fn lift_conventions_are_reconciled() {
        let path = HorizontalPath {
            target: GroupElement::origin(3),
            vertices: vec![[0.0, 0.0], [1.0, 0.5], [2.0, -0.5], [1.5, 2.0]],
        };
        let [x_end, y_end] = *path.vertices.last().unwrap();
        let expected = path.lift_z_paper() - x_end * y_end / 2.0;
        assert!((path.lift_z_exp() - expected).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_seq_parallel_agree() {
        let target = GroupElement::from_coords(&[0.5, -0.25, 0.4]);
        let a = cc_distance_upper(&heis(), &target, 16, 4, 3).unwrap();
        let b = cc_distance_upper(&heis(), &target, 16, 4, 3).unwrap();
        let c = cc_distance_upper_seq(&heis(), &target, 16, 4, 3).unwrap();
        assert_eq!(a.length, b.length);
        assert_eq!(a.length, c.length);
        assert!(a.constraint_violation < 1e-6);
    }

    #[test]
    fn rejects_other_algebras_and_bad_parameters() {
        let engel = algebra::engel();
        assert!(cc_distance_upper(&engel, &GroupElement::origin(4), 16, 2, 0).is_err());
        assert!(cc_distance_upper(&heis(), &GroupElement::origin(3), 4, 2, 0).is_err());
        assert!(cc_distance_upper(&heis(), &GroupElement::origin(3), 16, 0, 0).is_err());
        let nan = GroupElement::from_coords(&[f64::NAN, 0.0, 0.0]);
        assert!(cc_distance_upper(&heis(), &nan, 16, 2, 0).is_err());
    }
}
