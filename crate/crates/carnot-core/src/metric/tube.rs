//! Monte Carlo check of the flow-tube volume estimate: the set swept by a
//! gauge box of radius `eps` under the horizontal flow `exp(t e_1)`,
//! `0 <= t <= tau`, has volume bounded by a constant times `(tau/eps) vol(B)`.
//!
//! A sample point `p` lies in the tube iff some `t` in `[0, tau]` brings
//! `p . exp(-t e_1)` back into the box. For a step-2 law each box condition
//! is linear in `t`, so membership reduces to intersecting closed intervals,
//! which makes the hit test exact up to float rounding.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::CarnotAlgebra;
use crate::error::{Error, Result};
use crate::metric::Step2Law;
use crate::parallel;

const CHUNKS: u64 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct TubeExperiment {
    pub eps: f64,
    pub tau: f64,
    pub samples: u64,
    pub seed: u64,
    pub tube_volume: f64,
    pub stderr: f64,
    /// `vol(Tube) / ((tau/eps) vol(B))`.
    pub ratio: f64,
}

struct TubeGeometry {
    law: Step2Law,
    eps: f64,
    tau: f64,
    /// drift coefficient per coordinate: `s_k = sum_j c_{1j}^k p_j`.
    drift_cols: Vec<Vec<(usize, f64)>>,
    bounds: Vec<f64>,
}

impl TubeGeometry {
    fn new(alg: &CarnotAlgebra, eps: f64, tau: f64) -> Result<TubeGeometry> {
        let law = Step2Law::new(alg)?;
        // Flowing p backwards: (p . exp(-t e_1))_k = p_k + (t/2) s_k(p) on
        // stratum 2, p_1 - t on the flow coordinate, p_i elsewhere.
        let mut drift_cols = vec![Vec::new(); law.n];
        for &(i, j, k, c) in &law.triples {
            if i == 0 {
                drift_cols[k].push((j, c));
            } else if j == 0 {
                drift_cols[k].push((i, -c));
            }
        }
        // Bounding box of the tube, per coordinate.
        let mut bounds = Vec::with_capacity(law.n);
        for (k, drifts) in drift_cols.iter().enumerate() {
            let side = eps.powi(law.weights[k] as i32);
            let drift: f64 = drifts
                .iter()
                .map(|&(j, c)| c.abs() * eps.powi(law.weights[j] as i32))
                .sum();
            bounds.push(side + 0.5 * tau * drift);
        }
        Ok(TubeGeometry {
            law,
            eps,
            tau,
            drift_cols,
            bounds,
        })
    }

    /// Is `p` inside the swept set?
    fn hit(&self, p: &[f64]) -> bool {
        let mut lo = 0.0f64;
        let mut hi = self.tau;
        // Flow coordinate: |p_1 - t| <= eps.
        lo = lo.max(p[0] - self.eps);
        hi = hi.min(p[0] + self.eps);
        if lo > hi {
            return false;
        }
        for k in 0..self.law.n {
            if k == 0 {
                continue;
            }
            let side = self.eps.powi(self.law.weights[k] as i32);
            let s: f64 = self.drift_cols[k].iter().map(|&(j, c)| c * p[j]).sum();
            if s.abs() < 1e-300 {
                if p[k].abs() > side {
                    return false;
                }
                continue;
            }
            // -side <= p_k + (t/2) s <= side
            let a = (-side - p[k]) * 2.0 / s;
            let b = (side - p[k]) * 2.0 / s;
            let (tlo, thi) = if a <= b { (a, b) } else { (b, a) };
            lo = lo.max(tlo);
            hi = hi.min(thi);
            if lo > hi {
                return false;
            }
        }
        true
    }
}

fn run(
    alg: &CarnotAlgebra,
    eps: f64,
    tau: f64,
    samples: u64,
    seed: u64,
    sequential: bool,
) -> Result<TubeExperiment> {
    if eps <= 0.0 || tau <= 0.0 || samples == 0 {
        return Err(Error::InvalidParameter(
            "tube experiment needs eps > 0, tau > 0, samples > 0".into(),
        ));
    }
    let geom = TubeGeometry::new(alg, eps, tau)?;
    let mut sampling_volume = 1.0;
    for (k, &b) in geom.bounds.iter().enumerate() {
        if k == 0 {
            sampling_volume *= tau + 2.0 * eps;
        } else {
            sampling_volume *= 2.0 * b;
        }
    }

    let base = samples / CHUNKS;
    let extra = samples % CHUNKS;
    let chunks: Vec<(u64, u64)> = (0..CHUNKS)
        .map(|c| (c, base + u64::from(c < extra)))
        .filter(|&(_, len)| len > 0)
        .collect();
    let worker = |(chunk, len): (u64, u64)| -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let mut hits = 0u64;
        let mut p = vec![0.0f64; geom.law.n];
        for _ in 0..len {
            for (k, b) in geom.bounds.iter().enumerate() {
                if k == 0 {
                    p[k] = rng.gen_range(-eps..=tau + eps);
                } else {
                    p[k] = rng.gen_range(-b..=*b);
                }
            }
            if geom.hit(&p) {
                hits += 1;
            }
        }
        hits
    };
    let hits: u64 = if sequential {
        parallel::map_collect_seq(chunks, worker).into_iter().sum()
    } else {
        parallel::map_collect(chunks, worker).into_iter().sum()
    };

    let p_hat = hits as f64 / samples as f64;
    let tube_volume = p_hat * sampling_volume;
    let stderr = sampling_volume * (p_hat * (1.0 - p_hat) / samples as f64).sqrt();
    let box_volume: f64 = geom
        .law
        .weights
        .iter()
        .map(|&w| 2.0 * eps.powi(w as i32))
        .product();
    let reference = (tau / eps) * box_volume;
    Ok(TubeExperiment {
        eps,
        tau,
        samples,
        seed,
        tube_volume,
        stderr,
        ratio: tube_volume / reference,
    })
}

pub fn tube_experiment(
    alg: &CarnotAlgebra,
    eps: f64,
    tau: f64,
    samples: u64,
    seed: u64,
) -> Result<TubeExperiment> {
    run(alg, eps, tau, samples, seed, false)
}

/// Single-threaded variant; produces bit-identical results.
pub fn tube_experiment_seq(
    alg: &CarnotAlgebra,
    eps: f64,
    tau: f64,
    samples: u64,
    seed: u64,
) -> Result<TubeExperiment> {
    run(alg, eps, tau, samples, seed, true)
}
