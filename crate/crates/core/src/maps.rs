//! Category maps: diagonal scalings that take an observed object instance to its
//! category's canonical frame.
//!
//! A map's `scales` convert observed extents to canonical extents, so an instance
//! that is twice as large as its category prototype has scales `0.5`. Observed
//! feature points relate to canonical ones as `p = T * (p_hat / s)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments;
use crate::se3::Pose;

pub const MIN_SCALE: f64 = 1e-4;
pub const MAX_SCALE: f64 = 1e4;

/// Rotational symmetry declared for a category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    #[default]
    None,
    /// Invariant under rotations about the local z axis.
    RevolutionZ,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeaturePoint {
    pub id: u32,
    pub position: [f64; 3],
}

impl FeaturePoint {
    pub fn vector(&self) -> Vector3<f64> {
        Vector3::from(self.position)
    }
}

/// A named object category with id-tagged feature points in its canonical frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectCategory {
    pub name: String,
    #[serde(default)]
    pub symmetry: Symmetry,
    pub points: Vec<FeaturePoint>,
}

impl ObjectCategory {
    pub fn new(name: impl Into<String>, points: Vec<FeaturePoint>) -> Result<Self> {
        let cat = Self {
            name: name.into(),
            symmetry: Symmetry::None,
            points,
        };
        cat.validate()?;
        Ok(cat)
    }

    /// Twelve points on a box of the given full extents: the eight corners plus the
    /// centers of the +x, -x, +y and +z faces.
    pub fn box_category(name: impl Into<String>, extent: [f64; 3], symmetry: Symmetry) -> Self {
        let h = Vector3::from(extent) * 0.5;
        let mut points = Vec::with_capacity(12);
        for i in 0..8u32 {
            let sx = if i & 1 == 0 { -1.0 } else { 1.0 };
            let sy = if i & 2 == 0 { -1.0 } else { 1.0 };
            let sz = if i & 4 == 0 { -1.0 } else { 1.0 };
            points.push([sx * h.x, sy * h.y, sz * h.z]);
        }
        points.push([h.x, 0.0, 0.0]);
        points.push([-h.x, 0.0, 0.0]);
        points.push([0.0, h.y, 0.0]);
        points.push([0.0, 0.0, h.z]);
        Self {
            name: name.into(),
            symmetry,
            points: points
                .into_iter()
                .enumerate()
                .map(|(i, position)| FeaturePoint { id: i as u32, position })
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids: Vec<u32> = self.points.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "category `{}` has duplicate feature ids",
                self.name
            )));
        }
        Ok(())
    }

    pub fn point(&self, id: u32) -> Option<Vector3<f64>> {
        self.points.iter().find(|p| p.id == id).map(FeaturePoint::vector)
    }

    /// The observed cloud of an instance with map `scales` placed at `pose`.
    pub fn instance_cloud(&self, pose: &Pose, map: &CategoryMap) -> FeatureCloud {
        FeatureCloud {
            category: self.name.clone(),
            points: self
                .points
                .iter()
                .map(|fp| {
                    let local = fp.vector().component_div(&map.scales());
                    let world = pose.transform_point(&local);
                    FeaturePoint {
                        id: fp.id,
                        position: [world.x, world.y, world.z],
                    }
                })
                .collect(),
        }
    }
}

/// Observed world-space feature points of one instance, id-matched to its category.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureCloud {
    pub category: String,
    pub points: Vec<FeaturePoint>,
}

impl FeatureCloud {
    /// `(observed, canonical)` pairs for every id present in both.
    pub fn matched(&self, category: &ObjectCategory) -> Result<Vec<(Vector3<f64>, Vector3<f64>)>> {
        self.points
            .iter()
            .map(|fp| {
                category.point(fp.id).map(|c| (fp.vector(), c)).ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "feature id {} is not defined for category `{}`",
                        fp.id, category.name
                    ))
                })
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Identity,
    Uniform,
    Orthogonal,
}

impl MapKind {
    pub fn tag(self) -> &'static str {
        match self {
            MapKind::Identity => "identity",
            MapKind::Uniform => "uniform",
            MapKind::Orthogonal => "ortho",
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "i" => Ok(MapKind::Identity),
            "uniform" | "u" => Ok(MapKind::Uniform),
            "ortho" | "orthogonal" | "o" => Ok(MapKind::Orthogonal),
            other => Err(Error::InvalidInput(format!("unknown map kind `{other}`"))),
        }
    }
}

/// Diagonal scaling from an observed instance to its canonical category frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryMap {
    pub kind: MapKind,
    scales: [f64; 3],
}

impl Default for CategoryMap {
    fn default() -> Self {
        Self::identity()
    }
}

impl CategoryMap {
    pub fn identity() -> Self {
        Self {
            kind: MapKind::Identity,
            scales: [1.0; 3],
        }
    }

    pub fn uniform(s: f64) -> Result<Self> {
        check_scale(s)?;
        Ok(Self {
            kind: MapKind::Uniform,
            scales: [s; 3],
        })
    }

    pub fn orthogonal(scales: [f64; 3]) -> Result<Self> {
        for s in scales {
            check_scale(s)?;
        }
        Ok(Self {
            kind: MapKind::Orthogonal,
            scales,
        })
    }

    pub fn scales(&self) -> Vector3<f64> {
        Vector3::from(self.scales)
    }

    pub fn scale_array(&self) -> [f64; 3] {
        self.scales
    }

    pub fn inverse(&self) -> Self {
        Self {
            kind: self.kind,
            scales: self.scales.map(f64::recip),
        }
    }
}

fn check_scale(s: f64) -> Result<()> {
    if s > MIN_SCALE && s < MAX_SCALE {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "scale {s} outside ({MIN_SCALE}, {MAX_SCALE})"
        )))
    }
}

/// Maps a relative pose owned by the map's object into canonical space. Only the
/// translation is scaled; the rotation is left untouched so the result stays rigid.
pub fn canonicalize_relative_pose(map: &CategoryMap, rel: &Pose) -> Pose {
    if map.kind == MapKind::Identity {
        return *rel;
    }
    rel.with_translation(rel.translation().component_mul(&map.scales()))
}

/// Inverse of [`canonicalize_relative_pose`].
pub fn decanonicalize_pose(map: &CategoryMap, canonical_rel: &Pose) -> Pose {
    if map.kind == MapKind::Identity {
        return *canonical_rel;
    }
    canonical_rel.with_translation(canonical_rel.translation().component_div(&map.scales()))
}

/// Uniform scale from the mean ratio of canonical to observed pairwise distances.
///
/// The mean runs over ordered pairs `i != j`. Pairs whose observed distance is below
/// `1e-9` are skipped.
pub fn fit_uniform(observed: &FeatureCloud, category: &ObjectCategory) -> Result<CategoryMap> {
    let pairs = observed.matched(category)?;
    if pairs.len() < 2 {
        return Err(Error::DegenerateCloud(format!(
            "uniform map needs 2 matched points, got {}",
            pairs.len()
        )));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, (pi, ci)) in pairs.iter().enumerate() {
        for (j, (pj, cj)) in pairs.iter().enumerate() {
            if i == j {
                continue;
            }
            let d_obs = (pi - pj).norm();
            if d_obs < 1e-9 {
                continue;
            }
            sum += (ci - cj).norm() / d_obs;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::DegenerateCloud(
            "all observed pairwise distances are below 1e-9".into(),
        ));
    }
    let s = (sum / count as f64).clamp(MIN_SCALE * 1.0001, MAX_SCALE * 0.9999);
    CategoryMap::uniform(s)
}

/// Result of the joint pose and per-axis scale fit.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalFit {
    pub pose: Pose,
    pub map: CategoryMap,
    /// Final sum of squared residuals.
    pub objective: f64,
    /// Objective after each completed iteration, starting with the initial value.
    pub trace: Vec<f64>,
    /// False when the step limit was reached while the objective was still
    /// decreasing, or when a scale had to be clamped.
    pub converged: bool,
}

pub const ORTHO_MAX_ITERATIONS: usize = 100;
const ORTHO_TOLERANCE: f64 = 1e-10;

/// Joint fit of pose and per-axis scales by alternating closed-form steps:
/// rigid alignment of the scaled canonical points with scales fixed, then the
/// per-axis least-squares scale with the pose fixed.
pub fn fit_orthogonal(observed: &FeatureCloud, category: &ObjectCategory, init: &Pose) -> Result<OrthogonalFit> {
    let pairs = observed.matched(category)?;
    check_non_coplanar(&pairs)?;
    let init_scales = fit_uniform(observed, category)?.scale_array();
    Ok(alternate(&pairs, *init, Vector3::from(init_scales)))
}

/// [`fit_orthogonal`] seeded from the moments estimator; if that start does not
/// reach an exact fit, the 24 axis-aligned reorientations of the seed are tried
/// and the best result is returned.
pub fn fit_orthogonal_auto(observed: &FeatureCloud, category: &ObjectCategory) -> Result<OrthogonalFit> {
    let pairs = observed.matched(category)?;
    check_non_coplanar(&pairs)?;
    let uniform = fit_uniform(observed, category)?;
    let seed = match moments::estimate_pose_and_scale(observed, category) {
        Ok(est) => est.pose,
        Err(_) => Pose::from_translation(
            centroid(pairs.iter().map(|p| p.0)).x,
            centroid(pairs.iter().map(|p| p.0)).y,
            centroid(pairs.iter().map(|p| p.0)).z,
        ),
    };
    let scales = uniform.scales();
    let scale_of_problem: f64 = pairs.iter().map(|(p, _)| p.norm_squared()).sum::<f64>().max(1e-300);
    let mut best = alternate(&pairs, seed, scales);
    if best.objective <= 1e-20 * scale_of_problem {
        return Ok(best);
    }
    for r in axis_rotations() {
        let start = Pose::new(seed.rotation() * r, *seed.translation());
        let fit = alternate(&pairs, start, scales);
        if fit.objective < best.objective {
            best = fit;
        }
    }
    Ok(best)
}

fn axis_rotations() -> Vec<nalgebra::UnitQuaternion<f64>> {
    let axes = [Vector3::x(), Vector3::y(), Vector3::z()];
    let mut out = Vec::with_capacity(24);
    for (i, a) in axes.iter().enumerate() {
        for (j, b) in axes.iter().enumerate() {
            if i == j {
                continue;
            }
            for sa in [1.0, -1.0] {
                for sb in [1.0, -1.0] {
                    let x = a * sa;
                    let y = b * sb;
                    let z = x.cross(&y);
                    let m = Matrix3::from_columns(&[x, y, z]);
                    let rot = nalgebra::Rotation3::from_matrix_unchecked(m);
                    out.push(nalgebra::UnitQuaternion::from_rotation_matrix(&rot));
                }
            }
        }
    }
    out
}

fn centroid(points: impl Iterator<Item = Vector3<f64>>) -> Vector3<f64> {
    let mut sum = Vector3::zeros();
    let mut n = 0usize;
    for p in points {
        sum += p;
        n += 1;
    }
    sum / n.max(1) as f64
}

fn check_non_coplanar(pairs: &[(Vector3<f64>, Vector3<f64>)]) -> Result<()> {
    if pairs.len() < 4 {
        return Err(Error::DegenerateCloud(format!(
            "orthogonal map needs 4 matched points, got {}",
            pairs.len()
        )));
    }
    for cloud in [0, 1] {
        let pts: Vec<Vector3<f64>> = pairs.iter().map(|p| if cloud == 0 { p.0 } else { p.1 }).collect();
        let c = centroid(pts.iter().copied());
        let mut cov = Matrix3::zeros();
        for p in &pts {
            let d = p - c;
            cov += d * d.transpose();
        }
        let eig = SymmetricEigen::new(cov).eigenvalues;
        let max = eig.max();
        let min = eig.min();
        if !(max > 0.0) || min <= 1e-12 * max {
            return Err(Error::DegenerateCloud("feature points are coplanar".into()));
        }
    }
    Ok(())
}

fn objective(pairs: &[(Vector3<f64>, Vector3<f64>)], pose: &Pose, scales: &Vector3<f64>) -> f64 {
    pairs
        .iter()
        .map(|(p, c)| (p - pose.transform_point(&c.component_div(scales))).norm_squared())
        .sum()
}

fn alternate(pairs: &[(Vector3<f64>, Vector3<f64>)], init: Pose, init_scales: Vector3<f64>) -> OrthogonalFit {
    let mut pose = init;
    let mut scales = init_scales;
    let initial = objective(pairs, &pose, &scales);
    let mut trace = vec![initial];
    let mut current = initial;
    let mut clamped = false;
    let mut converged = false;
    let floor = 1e-28 * pairs.iter().map(|(p, _)| p.norm_squared()).sum::<f64>();

    for _ in 0..ORTHO_MAX_ITERATIONS {
        // Rigid step.
        let source: Vec<Vector3<f64>> = pairs.iter().map(|(_, c)| c.component_div(&scales)).collect();
        let target: Vec<Vector3<f64>> = pairs.iter().map(|(p, _)| *p).collect();
        let rigid = rigid_fit(&source, &target);
        let rigid_obj = objective(pairs, &rigid, &scales);
        if rigid_obj <= current {
            pose = rigid;
        }

        // Scale step: with the rotation fixed, fit u = 1/s and the local translation
        // jointly per axis: r_i = t + u .* c_i in least squares.
        let rot_inv = pose.rotation().inverse();
        let local: Vec<(Vector3<f64>, Vector3<f64>)> = pairs.iter().map(|(p, c)| (rot_inv * p, *c)).collect();
        let r_mean = centroid(local.iter().map(|l| l.0));
        let c_mean = centroid(local.iter().map(|l| l.1));
        let mut num = Vector3::zeros();
        let mut den = Vector3::zeros();
        for (r, c) in &local {
            num += (r - r_mean).component_mul(&(c - c_mean));
            den += (c - c_mean).component_mul(&(c - c_mean));
        }
        let mut candidate = scales;
        let mut u_fit = scales.map(|x| 1.0 / x);
        for a in 0..3 {
            if den[a] > 0.0 {
                let u = num[a] / den[a];
                let s = if u > 0.0 { 1.0 / u } else { MAX_SCALE };
                let bounded = s.clamp(MIN_SCALE * 1.0001, MAX_SCALE * 0.9999);
                if bounded != s {
                    clamped = true;
                }
                candidate[a] = bounded;
                u_fit[a] = 1.0 / bounded;
            }
        }
        let t_local = r_mean - u_fit.component_mul(&c_mean);
        let shifted = Pose::new(*pose.rotation(), pose.rotation() * t_local);
        let base_obj = objective(pairs, &pose, &scales);
        let scale_obj = objective(pairs, &shifted, &candidate);
        let next = if scale_obj <= base_obj {
            scales = candidate;
            pose = shifted;
            scale_obj
        } else {
            base_obj
        };
        let decrease = current - next;
        current = next.min(current);
        trace.push(current);
        // Stop on a plateau, or once the residual is at rounding level.
        if decrease <= ORTHO_TOLERANCE * current || current <= floor {
            converged = true;
            break;
        }
    }
    if !converged {
        let n = trace.len();
        let last_decrease = trace[n - 2] - trace[n - 1];
        converged = last_decrease <= 1e-6 * initial;
    }
    OrthogonalFit {
        pose,
        map: CategoryMap {
            kind: MapKind::Orthogonal,
            scales: [scales.x, scales.y, scales.z],
        },
        objective: current,
        trace,
        converged: converged && !clamped,
    }
}

/// Least-squares rigid transform taking `source` onto `target` (SVD, det forced to +1).
pub fn rigid_fit(source: &[Vector3<f64>], target: &[Vector3<f64>]) -> Pose {
    let cs = centroid(source.iter().copied());
    let ct = centroid(target.iter().copied());
    let mut h = Matrix3::zeros();
    for (s, t) in source.iter().zip(target) {
        h += (s - cs) * (t - ct).transpose();
    }
    let svd = h.svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let d = (v_t.transpose() * u.transpose()).determinant().signum();
    let r = v_t.transpose() * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose();
    let rot = nalgebra::UnitQuaternion::from_matrix(&r);
    Pose::new(rot, ct - rot * cs)
}
