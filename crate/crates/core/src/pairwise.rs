//! Gaussian distributions over canonicalized relative poses between two objects.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{fit_gaussian_with, CovarianceEstimator, GaussianModel, MAX_DIM};
use crate::maps::canonicalize_relative_pose;
use crate::scene::SceneState;
use crate::se3::{decode_slice, encode, encode_into, geodesic_angle_deg, EncodingKind, Pose};

/// Entropies per dimension closer than this are treated as equal.
const ENTROPY_TIE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Pose of the placed object in the reference frame, canonicalized with the reference's map.
    ReferenceToPlaced,
    /// Pose of the reference in the placed object's frame, canonicalized with the placed object's map.
    PlacedToReference,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativePoseDistribution {
    pub reference_category: String,
    pub placed_category: String,
    pub direction: Direction,
    pub encoding: EncodingKind,
    #[serde(flatten)]
    pub gaussian: GaussianModel,
    pub sample_count: usize,
}

/// Canonicalized relative pose of a (reference, placed) pair in one scene.
pub fn relative_pose(scene: &SceneState, reference: &str, placed: &str, direction: Direction) -> Result<Pose> {
    let r = scene.object(reference)?;
    let p = scene.object(placed)?;
    Ok(match direction {
        Direction::ReferenceToPlaced => canonicalize_relative_pose(&r.map, &r.pose.inverse().compose(&p.pose)),
        Direction::PlacedToReference => canonicalize_relative_pose(&p.map, &p.pose.inverse().compose(&r.pose)),
    })
}

/// Moves the rotation block of an encoded pose onto the branch closest to `anchor`.
/// Quaternions pick the hemisphere; rotation vectors near pi pick between `r` and
/// `r - 2 pi r/|r|`.
fn align_to(kind: EncodingKind, v: &mut [f64; MAX_DIM], anchor: &[f64]) {
    match kind {
        EncodingKind::Quat => {
            let dot: f64 = (3..7).map(|i| v[i] * anchor[i]).sum();
            if dot < 0.0 {
                v[3..7].iter_mut().for_each(|x| *x = -*x);
            }
        }
        EncodingKind::AxisAngle => {
            let n = (v[3] * v[3] + v[4] * v[4] + v[5] * v[5]).sqrt();
            if n <= FRAC_PI_2 {
                return;
            }
            let f = (n - 2.0 * PI) / n;
            let alt = [v[3] * f, v[4] * f, v[5] * f];
            let d0: f64 = (0..3).map(|i| (v[3 + i] - anchor[3 + i]).powi(2)).sum();
            let d1: f64 = (0..3).map(|i| (alt[i] - anchor[3 + i]).powi(2)).sum();
            if d1 < d0 {
                v[3..6].copy_from_slice(&alt);
            }
        }
        _ => {}
    }
}

/// Encodes `poses` under a concrete encoding, aligned to the branch of the
/// rotational medoid so the result does not depend on sample order.
fn encode_samples(poses: &[Pose], kind: EncodingKind) -> Result<Vec<[f64; MAX_DIM]>> {
    let k = kind
        .dim()
        .ok_or(Error::InvalidInput("mix is not a concrete encoding".into()))?;
    let mut out = Vec::with_capacity(poses.len());
    for p in poses {
        let mut v = [0.0; MAX_DIM];
        v[..k].copy_from_slice(encode(p, kind)?.as_slice());
        out.push(v);
    }
    let spread = |i: usize| -> f64 { poses.iter().map(|q| geodesic_angle_deg(&poses[i], q)).sum() };
    let anchor = (0..poses.len())
        .map(|i| (spread(i), i))
        .min_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| out[a.1].partial_cmp(&out[b.1]).unwrap_or(Ordering::Equal))
        })
        .map(|(_, i)| out[i]);
    if let Some(anchor) = anchor {
        for v in &mut out {
            align_to(kind, v, &anchor);
        }
    }
    Ok(out)
}

fn fit_encoded(poses: &[Pose], kind: EncodingKind, estimator: CovarianceEstimator) -> Result<GaussianModel> {
    let k = kind
        .dim()
        .ok_or(Error::InvalidInput("mix is not a concrete encoding".into()))?;
    let encoded = encode_samples(poses, kind)?;
    let rows: Vec<&[f64]> = encoded.iter().map(|v| &v[..k]).collect();
    fit_gaussian_with(&rows, estimator)
}

/// Picks the candidate encoding whose fitted Gaussian has the lowest entropy per
/// dimension. Candidates hitting gimbal lock are skipped; ties go to the earlier
/// entry of [`EncodingKind::CONCRETE`].
pub fn select_encoding(
    rel_poses: &[Pose],
    candidates: &[EncodingKind],
    estimator: CovarianceEstimator,
) -> Result<EncodingKind> {
    if rel_poses.len() < 2 {
        return Err(Error::InvalidInput("need at least 2 poses".into()));
    }
    if candidates.contains(&EncodingKind::Mix) {
        return Err(Error::InvalidInput("mix cannot be a candidate".into()));
    }
    let mut best: Option<(EncodingKind, f64)> = None;
    for kind in EncodingKind::CONCRETE.into_iter().filter(|k| candidates.contains(k)) {
        let g = match fit_encoded(rel_poses, kind, estimator) {
            Ok(g) => g,
            Err(Error::GimbalLock { .. }) => continue,
            Err(e) => return Err(e),
        };
        let h = g.entropy_per_dim();
        if best.is_none_or(|(_, b)| h < b - ENTROPY_TIE) {
            best = Some((kind, h));
        }
    }
    best.map(|(k, _)| k).ok_or(Error::NoViableEncoding)
}

/// Fits the distribution of the canonicalized relative pose between `reference` and
/// `placed` over `scenes`. `Mix` is resolved here.
pub fn fit_pairwise(
    scenes: &[SceneState],
    reference: &str,
    placed: &str,
    direction: Direction,
    encoding: EncodingKind,
    estimator: CovarianceEstimator,
) -> Result<RelativePoseDistribution> {
    if scenes.len() < 2 {
        return Err(Error::InsufficientScenes {
            needed: 2,
            found: scenes.len(),
        });
    }
    let rels = scenes
        .iter()
        .map(|s| relative_pose(s, reference, placed, direction))
        .collect::<Result<Vec<_>>>()?;
    let encoding = match encoding {
        EncodingKind::Mix => select_encoding(&rels, &EncodingKind::CONCRETE, estimator)?,
        e => e,
    };
    let gaussian = fit_encoded(&rels, encoding, estimator)?;
    Ok(RelativePoseDistribution {
        reference_category: scenes[0].object(reference)?.category.clone(),
        placed_category: scenes[0].object(placed)?.category.clone(),
        direction,
        encoding,
        gaussian,
        sample_count: scenes.len(),
    })
}

impl RelativePoseDistribution {
    pub fn validate(&self) -> Result<()> {
        let k = self.encoding.dim().ok_or(Error::InvalidInput(
            "stored distribution has unresolved mix encoding".into(),
        ))?;
        if self.gaussian.dim() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: self.gaussian.dim(),
            });
        }
        if self.sample_count < 2 {
            return Err(Error::InvalidInput("sample_count below 2".into()));
        }
        Ok(())
    }

    /// Log-density of a canonicalized relative pose.
    pub fn log_density(&self, canonical_rel: &Pose) -> f64 {
        let mut v = [0.0; MAX_DIM];
        encode_into(canonical_rel, self.encoding, &mut v);
        align_to(self.encoding, &mut v, self.gaussian.mean());
        self.gaussian.log_density_unchecked(&v[..self.gaussian.dim()])
    }

    /// Decoded mean, a canonicalized relative pose.
    pub fn mean_pose(&self) -> Pose {
        decode_or_identity(self.encoding, self.gaussian.mean())
    }

    /// Draws one canonicalized relative pose.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pose {
        let mut v = [0.0; MAX_DIM];
        self.gaussian.sample_into(rng, &mut v);
        decode_or_identity(self.encoding, &v[..self.gaussian.dim()])
    }

    pub fn entropy(&self) -> f64 {
        self.gaussian.entropy()
    }
}

/// Decodes a vector, substituting the identity rotation for a zero quaternion.
fn decode_or_identity(kind: EncodingKind, v: &[f64]) -> Pose {
    decode_slice(kind, v).unwrap_or_else(|_| Pose::from_translation(v[0], v[1], v[2]))
}
