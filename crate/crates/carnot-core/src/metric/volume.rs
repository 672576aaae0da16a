//! Monte Carlo verification of the volume scaling law: the Lebesgue volume of
//! the gauge ball of radius `eps` scales like `eps^Q`.
//!
//! Points are sampled uniformly in the gauge box of the largest requested
//! radius; each sample's gauge is compared against every radius at once. The
//! sample stream is split into fixed chunks, one RNG stream per chunk, so the
//! counts are independent of thread scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::CarnotAlgebra;
use crate::error::{Error, Result};
use crate::metric::Step2Law;
use crate::parallel;

const CHUNKS: u64 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct VolumePoint {
    pub eps: f64,
    pub volume: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VolumeScaling {
    pub points: Vec<VolumePoint>,
    /// Least-squares slope of `log volume` against `log eps`; approximates
    /// the Hausdorff dimension.
    pub slope: f64,
    pub samples: u64,
    pub seed: u64,
}

fn chunk_ranges(samples: u64) -> Vec<(u64, u64)> {
    let base = samples / CHUNKS;
    let extra = samples % CHUNKS;
    (0..CHUNKS)
        .map(|c| (c, base + u64::from(c < extra)))
        .filter(|&(_, len)| len > 0)
        .collect()
}

fn run(
    alg: &CarnotAlgebra,
    eps_list: &[f64],
    samples: u64,
    seed: u64,
    sequential: bool,
) -> Result<VolumeScaling> {
    // The experiment itself only needs weights, but it belongs to the step-2
    // lab and rejects higher step like the rest of it.
    let law = Step2Law::new(alg)?;
    if eps_list.len() < 2 || eps_list.iter().any(|&e| e <= 0.0) || samples == 0 {
        return Err(Error::InvalidParameter(
            "volume scaling needs at least two positive radii and samples > 0".into(),
        ));
    }
    let mut eps_sorted = eps_list.to_vec();
    eps_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let eps_max = *eps_sorted.last().unwrap();
    let half_sides: Vec<f64> = law
        .weights
        .iter()
        .map(|&w| eps_max.powi(w as i32))
        .collect();
    let box_volume: f64 = half_sides.iter().map(|h| 2.0 * h).product();

    let worker = |(chunk, len): (u64, u64)| -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk);
        let mut counts = vec![0u64; eps_sorted.len()];
        let mut point = vec![0.0f64; law.n];
        for _ in 0..len {
            for (i, h) in half_sides.iter().enumerate() {
                point[i] = rng.gen_range(-h..=*h);
            }
            let gauge = point
                .iter()
                .enumerate()
                .map(|(i, v)| v.abs().powf(1.0 / law.weights[i] as f64))
                .fold(0.0, f64::max);
            for (e, &eps) in eps_sorted.iter().enumerate() {
                if gauge <= eps {
                    counts[e] += 1;
                }
            }
        }
        counts
    };
    let chunks = chunk_ranges(samples);
    let per_chunk = if sequential {
        parallel::map_collect_seq(chunks, worker)
    } else {
        parallel::map_collect(chunks, worker)
    };
    let mut counts = vec![0u64; eps_sorted.len()];
    for chunk in per_chunk {
        for (total, c) in counts.iter_mut().zip(chunk) {
            *total += c;
        }
    }

    let points: Vec<VolumePoint> = eps_sorted
        .iter()
        .zip(&counts)
        .map(|(&eps, &count)| {
            let p = count as f64 / samples as f64;
            VolumePoint {
                eps,
                volume: p * box_volume,
                stderr: box_volume * (p * (1.0 - p) / samples as f64).sqrt(),
            }
        })
        .collect();

    // Least squares on (ln eps, ln volume).
    let pairs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.volume > 0.0)
        .map(|p| (p.eps.ln(), p.volume.ln()))
        .collect();
    if pairs.len() < 2 {
        return Err(Error::InvalidParameter(
            "not enough nonzero volume estimates for a slope; raise samples".into(),
        ));
    }
    let m = pairs.len() as f64;
    let (sx, sy): (f64, f64) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let sxx: f64 = pairs.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pairs.iter().map(|(x, y)| x * y).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);

    Ok(VolumeScaling {
        points,
        slope,
        samples,
        seed,
    })
}

pub fn volume_scaling_experiment(
    alg: &CarnotAlgebra,
    eps_list: &[f64],
    samples: u64,
    seed: u64,
) -> Result<VolumeScaling> {
    run(alg, eps_list, samples, seed, false)
}

/// Single-threaded variant; produces bit-identical results.
pub fn volume_scaling_experiment_seq(
    alg: &CarnotAlgebra,
    eps_list: &[f64],
    samples: u64,
    seed: u64,
) -> Result<VolumeScaling> {
    run(alg, eps_list, samples, seed, true)
}
