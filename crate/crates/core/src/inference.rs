//! Sampling-based pose inference: draw candidates from the pairwise
//! distributions, score them jointly and refine around the best ones.

use std::cmp::Ordering;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::decanonicalize_pose;
use crate::placement::{PlacementModel, Scorer};
use crate::scene::SceneState;
use crate::se3::{so3_exp, so3_log, Pose};

const VARIANCE_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferenceParams {
    pub initial_samples: usize,
    pub refine_samples: usize,
    pub top_k: usize,
    /// Upper bound on scoring rounds, the initial round included.
    pub max_rounds: usize,
    pub rel_improvement_stop: f64,
    pub seed: u64,
}

impl Default for InferenceParams {
    fn default() -> Self {
        Self {
            initial_samples: 100_000,
            refine_samples: 1_000,
            top_k: 10,
            max_rounds: 20,
            rel_improvement_stop: 1e-4,
            seed: 0,
        }
    }
}

impl InferenceParams {
    pub fn validate(&self) -> Result<()> {
        let counts = [self.initial_samples, self.refine_samples, self.top_k, self.max_rounds];
        if counts.contains(&0) {
            return Err(Error::InvalidInput("inference counts must be at least 1".into()));
        }
        if self.top_k > self.refine_samples || self.refine_samples > self.initial_samples {
            return Err(Error::InvalidInput(
                "need top_k <= refine_samples <= initial_samples".into(),
            ));
        }
        if !(self.rel_improvement_stop >= 0.0) {
            return Err(Error::InvalidInput("rel_improvement_stop must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferenceResult {
    pub pose: Pose,
    pub log_score: f64,
    pub rounds_used: usize,
    /// Best log score of each round.
    pub score_trace: Vec<f64>,
}

/// Draws `n` world-pose candidates, each from the forward distribution of a
/// uniformly chosen active reference.
pub fn draw_candidates<R: Rng + ?Sized>(
    model: &PlacementModel,
    scene: &SceneState,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Pose>> {
    let scorer = model.scorer(scene)?;
    Ok(draw_from_scorer(&scorer, n, rng))
}

fn draw_from_scorer<R: Rng + ?Sized>(scorer: &Scorer<'_>, n: usize, rng: &mut R) -> Vec<Pose> {
    let terms = &scorer.terms;
    (0..n)
        .map(|_| {
            let t = &terms[rng.random_range(0..terms.len())];
            let rel = decanonicalize_pose(&t.ref_map, &t.forward.sample(rng));
            t.ref_pose.compose(&rel)
        })
        .collect()
}

fn score_all(scorer: &Scorer<'_>, candidates: &[Pose]) -> Vec<f64> {
    candidates
        .iter()
        .map(|c| {
            let s = scorer.score(c);
            if s.is_nan() {
                f64::NEG_INFINITY
            } else {
                s
            }
        })
        .collect()
}

/// Indices of the `k` best scores, best first; ties go to the lower index.
fn top_indices(scores: &[f64], k: usize) -> Vec<usize> {
    let cmp = |a: &usize, b: &usize| scores[*b].total_cmp(&scores[*a]).then(a.cmp(b));
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    let k = k.min(idx.len());
    if k < idx.len() {
        idx.select_nth_unstable_by(k, cmp);
        idx.truncate(k);
    }
    idx.sort_by(cmp);
    idx
}

/// Mean and per-coordinate variance of poses as (position, rotation vector in the
/// tangent space at `anchor`).
pub(crate) fn tangent_statistics(poses: &[Pose], anchor: &Pose) -> (Pose, [f64; 6], [f64; 6]) {
    let inv_rot = anchor.rotation().inverse();
    let coords: Vec<[f64; 6]> = poses
        .iter()
        .map(|p| {
            let t = p.translation();
            let w = so3_log(&(inv_rot * p.rotation()));
            [t.x, t.y, t.z, w.x, w.y, w.z]
        })
        .collect();
    let n = coords.len() as f64;
    let mut mean = [0.0; 6];
    for c in &coords {
        for i in 0..6 {
            mean[i] += c[i] / n;
        }
    }
    let mut var = [0.0; 6];
    if coords.len() > 1 {
        for c in &coords {
            for i in 0..6 {
                var[i] += (c[i] - mean[i]).powi(2) / (n - 1.0);
            }
        }
    }
    let pose = Pose::new(
        anchor.rotation() * so3_exp(&Vector3::new(mean[3], mean[4], mean[5])),
        Vector3::new(mean[0], mean[1], mean[2]),
    );
    (pose, mean, var)
}

/// Infers the world pose of the model's placed object in `scene`.
pub fn infer_pose(model: &PlacementModel, scene: &SceneState, params: &InferenceParams) -> Result<InferenceResult> {
    params.validate()?;
    let scorer = model.scorer(scene)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut candidates = draw_from_scorer(&scorer, params.initial_samples, &mut rng);
    let mut best_seen = (candidates[0], f64::NEG_INFINITY);
    let mut trace = Vec::new();
    let mut final_mean = (candidates[0], f64::NEG_INFINITY);

    for round in 0..params.max_rounds {
        let scores = score_all(&scorer, &candidates);
        let top = top_indices(&scores, params.top_k);
        let best = candidates[top[0]];
        let elite: Vec<Pose> = top.iter().map(|&i| candidates[i]).collect();
        let (mean_pose, mean, var) = tangent_statistics(&elite, &best);
        let mean_score = scorer.score(&mean_pose);
        final_mean = (mean_pose, mean_score);
        for (pose, score) in [(best, scores[top[0]]), final_mean] {
            if score > best_seen.1 {
                best_seen = (pose, score);
            }
        }
        let round_best = scores[top[0]].max(mean_score);
        let previous = trace.last().copied();
        trace.push(round_best);

        if let Some(prev) = previous {
            let rel = (round_best - prev) / f64::max(prev.abs(), 1.0);
            if !(rel >= params.rel_improvement_stop) {
                break;
            }
        }
        if round + 1 == params.max_rounds {
            break;
        }

        rng.set_stream(round as u64 + 1);
        let sd: Vec<f64> = var.iter().map(|v| v.max(VARIANCE_FLOOR).sqrt()).collect();
        candidates = (0..params.refine_samples)
            .map(|_| {
                let mut x = [0.0; 6];
                for i in 0..6 {
                    let z: f64 = rng.sample(StandardNormal);
                    x[i] = mean[i] + sd[i] * z;
                }
                Pose::new(
                    best.rotation() * so3_exp(&Vector3::new(x[3], x[4], x[5])),
                    Vector3::new(x[0], x[1], x[2]),
                )
            })
            .collect();
    }

    let (pose, log_score) = if final_mean.1 >= best_seen.1 {
        final_mean
    } else {
        best_seen
    };
    Ok(InferenceResult {
        pose,
        log_score,
        rounds_used: trace.len(),
        score_trace: trace,
    })
}

/// Whether the tangent-space mean of the `k` best of `n` drawn candidates scores at
/// least as well as each of them.
pub fn top_k_mean_property_check_with<R: Rng + ?Sized>(
    model: &PlacementModel,
    scene: &SceneState,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<bool> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let scorer = model.scorer(scene)?;
    let candidates = draw_from_scorer(&scorer, n, rng);
    let scores = score_all(&scorer, &candidates);
    let top = top_indices(&scores, k);
    let elite: Vec<Pose> = top.iter().map(|&i| candidates[i]).collect();
    let (mean_pose, _, _) = tangent_statistics(&elite, &elite[0]);
    Ok(scorer.score(&mean_pose).partial_cmp(&scores[top[0]]) != Some(Ordering::Less))
}

/// [`top_k_mean_property_check_with`] at 10^5 samples and the top 10.
pub fn top_k_mean_property_check<R: Rng + ?Sized>(
    model: &PlacementModel,
    scene: &SceneState,
    rng: &mut R,
) -> Result<bool> {
    top_k_mean_property_check_with(model, scene, 100_000, 10, rng)
}
