//! Synthetic scene sets: templates, the generator and the on-disk format.

use std::path::Path;

use nalgebra::{UnitQuaternion, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{fit_orthogonal_auto, fit_uniform, CategoryMap, MapKind, ObjectCategory, Symmetry};
use crate::scene::{SceneObject, SceneState};
use crate::se3::{rotation_from_euler, so3_exp, Pose};

pub const DATASET_SCHEMA_VERSION: u32 = 1;
pub const MAX_DISTRACTORS: usize = 5;
/// Per-axis growth of the distractor volume over the scene's bounding box.
pub const DISTRACTOR_MARGIN: f64 = 0.5;
const SCALE_BOUNDS: (f64, f64) = (0.2, 5.0);

/// Where a category's local origin sits on its box.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    #[default]
    Center,
    /// Center of the bottom face, the usual convention for objects that rest on a support.
    Base,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategorySpec {
    pub name: String,
    /// Nominal full box extents in meters.
    pub extent: [f64; 3],
    #[serde(default)]
    pub symmetry: Symmetry,
    #[serde(default)]
    pub origin: Origin,
}

impl CategorySpec {
    /// Box center relative to the origin, in meters at unit size.
    fn center(&self) -> Vector3<f64> {
        match self.origin {
            Origin::Center => Vector3::zeros(),
            Origin::Base => Vector3::new(0.0, 0.0, 0.5 * self.extent[2]),
        }
    }

    /// Position of a point given in box units (the box spans -0.5..0.5 on each axis)
    /// relative to the origin of an instance with per-axis `size`.
    pub fn local_point(&self, size: [f64; 3], p: [f64; 3]) -> Vector3<f64> {
        let ext = Vector3::from(self.extent);
        Vector3::from(size).component_mul(&(ext.component_mul(&Vector3::from(p)) + self.center()))
    }

    pub fn object_category(&self) -> ObjectCategory {
        let mut cat = ObjectCategory::box_category(self.name.clone(), self.extent, self.symmetry);
        let c = self.center();
        for p in &mut cat.points {
            for a in 0..3 {
                p.position[a] += c[a];
            }
        }
        cat
    }
}

/// One object of a template. Roles without a parent are static anchors placed at
/// `offset`; the others are placed relative to their parent:
/// `T = T_parent * Trans(p_parent(anchor_point) + offset) * Rot(rotation)
///      * Trans(-p_own(child_point)) * jitter`
/// where `p(.)` maps box units to the instance's local frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoleSpec {
    pub id: String,
    pub category: String,
    #[serde(default)]
    pub parent: Option<String>,
    /// Attachment point on the parent in units of its extent (box spans -0.5..0.5).
    #[serde(default)]
    pub anchor_point: [f64; 3],
    /// Attachment point on this object in units of its extent.
    #[serde(default)]
    pub child_point: [f64; 3],
    /// Metric offset in the parent frame.
    #[serde(default)]
    pub offset: [f64; 3],
    /// Roll, pitch, yaw relative to the parent (intrinsic XYZ).
    #[serde(default)]
    pub rotation: [f64; 3],
    /// Gaussian jitter std-devs, meters, in the object's own frame.
    #[serde(default)]
    pub position_jitter: [f64; 3],
    /// Gaussian rotation-vector jitter std-devs, radians.
    #[serde(default)]
    pub rotation_jitter: [f64; 3],
    /// Per-axis `[min, max]` size factors.
    pub scale_range: [[f64; 2]; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneTemplate {
    pub name: String,
    pub categories: Vec<CategorySpec>,
    /// Static anchors first, then placed roles in placement order.
    pub roles: Vec<RoleSpec>,
    /// Per-axis size factor range for distractors.
    pub scale_range: [f64; 2],
}

impl SceneTemplate {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidTemplate(format!("{}: {msg}", self.name)));
        let in_bounds = |r: [f64; 2]| r[0] > SCALE_BOUNDS.0 && r[1] < SCALE_BOUNDS.1 && r[0] <= r[1];
        if !in_bounds(self.scale_range) {
            return bad(format!("scale range {:?} outside {:?}", self.scale_range, SCALE_BOUNDS));
        }
        for c in &self.categories {
            if c.extent.iter().any(|e| !(*e > 0.0)) {
                return bad(format!("category {} has a non-positive extent", c.name));
            }
        }
        let mut seen: Vec<&str> = Vec::new();
        let mut placed_any = false;
        for r in &self.roles {
            if seen.contains(&r.id.as_str()) {
                return bad(format!("duplicate role {}", r.id));
            }
            if !self.categories.iter().any(|c| c.name == r.category) {
                return bad(format!("role {} uses unknown category {}", r.id, r.category));
            }
            if r.scale_range.iter().any(|s| !in_bounds(*s)) {
                return bad(format!("role {} has a scale range outside {:?}", r.id, SCALE_BOUNDS));
            }
            if r.position_jitter.iter().chain(&r.rotation_jitter).any(|j| !(*j >= 0.0)) {
                return bad(format!("role {} has a negative jitter", r.id));
            }
            match &r.parent {
                None if placed_any => return bad(format!("static role {} listed after placed roles", r.id)),
                None => {}
                Some(p) if !seen.contains(&p.as_str()) => {
                    return bad(format!("role {} must follow its parent {p}", r.id));
                }
                Some(_) => placed_any = true,
            }
            seen.push(&r.id);
        }
        if !self.roles.iter().any(|r| r.parent.is_none()) {
            return bad("no static anchor".into());
        }
        if !placed_any {
            return bad("no placed roles".into());
        }
        Ok(())
    }

    pub fn placement_order(&self) -> Vec<String> {
        self.roles
            .iter()
            .filter(|r| r.parent.is_some())
            .map(|r| r.id.clone())
            .collect()
    }

    pub fn category(&self, name: &str) -> Result<&CategorySpec> {
        self.categories
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::InvalidTemplate(format!("unknown category {name}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let t: SceneTemplate = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        t.validate()?;
        Ok(t)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// How instance sizes vary across variations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleVariation {
    #[default]
    PerAxis,
    /// One factor per instance, drawn from the role's x range.
    Isotropic,
    /// Every size factor is 1.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorOptions {
    pub scale_variation: ScaleVariation,
    /// Multiplies every jitter std-dev.
    pub jitter_scale: f64,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        Self {
            scale_variation: ScaleVariation::PerAxis,
            jitter_scale: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratedObject {
    pub id: String,
    pub category: String,
    pub pose: Pose,
    /// Per-axis size factors relative to the category's canonical shape. The ground-truth
    /// category map has scales `1 / size`.
    pub size: [f64; 3],
    pub causal_parents: Vec<String>,
    pub distractor: bool,
}

impl GeneratedObject {
    pub fn ground_truth_map(&self) -> Result<CategoryMap> {
        CategoryMap::orthogonal([1.0 / self.size[0], 1.0 / self.size[1], 1.0 / self.size[2]])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratedScene {
    pub objects: Vec<GeneratedObject>,
}

impl GeneratedScene {
    pub fn object(&self, id: &str) -> Result<&GeneratedObject> {
        self.objects
            .iter()
            .find(|o| o.id == id)
            .ok_or_else(|| Error::MissingObject(id.to_string()))
    }

    /// Max pairwise distance between the origins of non-distractor objects.
    pub fn extent(&self) -> f64 {
        let origins: Vec<Vector3<f64>> = self
            .objects
            .iter()
            .filter(|o| !o.distractor)
            .map(|o| *o.pose.translation())
            .collect();
        let mut best = 0.0f64;
        for (i, a) in origins.iter().enumerate() {
            for b in &origins[i + 1..] {
                best = best.max((a - b).norm());
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneSet {
    pub schema_version: u32,
    pub template: String,
    pub seed: u64,
    pub distractors: usize,
    pub categories: Vec<ObjectCategory>,
    pub placement_order: Vec<String>,
    pub scenes: Vec<GeneratedScene>,
    pub split: Split,
}

fn gaussian3<R: Rng + ?Sized>(rng: &mut R, sd: [f64; 3], scale: f64) -> Vector3<f64> {
    let mut v = Vector3::zeros();
    for i in 0..3 {
        if sd[i] > 0.0 && scale > 0.0 {
            v[i] = rng.sample::<f64, _>(StandardNormal) * sd[i] * scale;
        }
    }
    v
}

fn uniform_rotation<R: Rng + ?Sized>(rng: &mut R) -> UnitQuaternion<f64> {
    loop {
        let v = Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-6 {
            return UnitQuaternion::from_quaternion(nalgebra::Quaternion::from(v / n));
        }
    }
}

fn sample_range<R: Rng + ?Sized>(rng: &mut R, r: [f64; 2]) -> f64 {
    if r[1] > r[0] {
        rng.random_range(r[0]..=r[1])
    } else {
        r[0]
    }
}

fn sample_size<R: Rng + ?Sized>(rng: &mut R, ranges: &[[f64; 2]; 3], variation: ScaleVariation) -> [f64; 3] {
    match variation {
        ScaleVariation::PerAxis => [
            sample_range(rng, ranges[0]),
            sample_range(rng, ranges[1]),
            sample_range(rng, ranges[2]),
        ],
        ScaleVariation::Isotropic => [sample_range(rng, ranges[0]); 3],
        ScaleVariation::None => [1.0; 3],
    }
}

/// Generates `n_variations` scenes of `template` with `d` distractors each.
pub fn generate_dataset(template: &SceneTemplate, n_variations: usize, d: usize, seed: u64) -> Result<SceneSet> {
    generate_dataset_with(template, n_variations, d, seed, GeneratorOptions::default())
}

pub fn generate_dataset_with(
    template: &SceneTemplate,
    n_variations: usize,
    d: usize,
    seed: u64,
    options: GeneratorOptions,
) -> Result<SceneSet> {
    template.validate()?;
    if n_variations < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least 2 variations, got {n_variations}"
        )));
    }
    if d > MAX_DISTRACTORS {
        return Err(Error::InvalidInput(format!(
            "at most {MAX_DISTRACTORS} distractors, got {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let distractor_categories: Vec<&str> = template
        .roles
        .iter()
        .filter(|r| r.parent.is_some())
        .map(|r| r.category.as_str())
        .fold(Vec::new(), |mut acc, c| {
            if !acc.contains(&c) {
                acc.push(c);
            }
            acc
        });

    let mut scenes = Vec::with_capacity(n_variations);
    for _ in 0..n_variations {
        let mut objects: Vec<GeneratedObject> = Vec::with_capacity(template.roles.len() + d);
        for role in &template.roles {
            let cat = template.category(&role.category)?;
            let size = sample_size(&mut rng, &role.scale_range, options.scale_variation);
            let jitter = Pose::new(
                so3_exp(&gaussian3(&mut rng, role.rotation_jitter, options.jitter_scale)),
                gaussian3(&mut rng, role.position_jitter, options.jitter_scale),
            );
            let rotation = Pose::from_rotation(rotation_from_euler(
                role.rotation[0],
                role.rotation[1],
                role.rotation[2],
            ));
            let attach_child = Pose::identity().with_translation(-cat.local_point(size, role.child_point));
            let (base, parents) = match &role.parent {
                None => (
                    Pose::from_translation(role.offset[0], role.offset[1], role.offset[2]),
                    Vec::new(),
                ),
                Some(pid) => {
                    let parent = objects
                        .iter()
                        .find(|o| &o.id == pid)
                        .ok_or_else(|| Error::InvalidTemplate(format!("unknown parent {pid}")))?;
                    let pcat = template.category(&parent.category)?;
                    let anchor = pcat.local_point(parent.size, role.anchor_point) + Vector3::from(role.offset);
                    (
                        parent
                            .pose
                            .compose(&Pose::from_translation(anchor.x, anchor.y, anchor.z)),
                        vec![pid.clone()],
                    )
                }
            };
            let pose = base.compose(&rotation).compose(&attach_child).compose(&jitter);
            objects.push(GeneratedObject {
                id: role.id.clone(),
                category: role.category.clone(),
                pose,
                size,
                causal_parents: parents,
                distractor: false,
            });
        }

        let (lo, hi) = bounding_box(&objects);
        let center = (lo + hi) * 0.5;
        let half = (hi - lo) * 0.5 * (1.0 + DISTRACTOR_MARGIN);
        for i in 0..d {
            let mut t = Vector3::zeros();
            for a in 0..3 {
                t[a] = if half[a] > 0.0 {
                    rng.random_range(center[a] - half[a]..=center[a] + half[a])
                } else {
                    center[a]
                };
            }
            let rot = uniform_rotation(&mut rng);
            let range = template.scale_range;
            let size = [
                sample_range(&mut rng, range),
                sample_range(&mut rng, range),
                sample_range(&mut rng, range),
            ];
            objects.push(GeneratedObject {
                id: format!("distractor_{i}"),
                category: distractor_categories[i % distractor_categories.len()].to_string(),
                pose: Pose::new(rot, t),
                size,
                causal_parents: Vec::new(),
                distractor: true,
            });
        }
        scenes.push(GeneratedScene { objects });
    }

    let n_train = (n_variations / 2).max(2).min(n_variations - 1);
    Ok(SceneSet {
        schema_version: DATASET_SCHEMA_VERSION,
        template: template.name.clone(),
        seed,
        distractors: d,
        categories: template.categories.iter().map(CategorySpec::object_category).collect(),
        placement_order: template.placement_order(),
        scenes,
        split: Split {
            train: (0..n_train).collect(),
            test: (n_train..n_variations).collect(),
        },
    })
}

fn bounding_box(objects: &[GeneratedObject]) -> (Vector3<f64>, Vector3<f64>) {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for o in objects.iter().filter(|o| !o.distractor) {
        lo = lo.inf(o.pose.translation());
        hi = hi.sup(o.pose.translation());
    }
    (lo, hi)
}

impl SceneSet {
    pub fn category(&self, name: &str) -> Result<&ObjectCategory> {
        self.categories
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown category {name}")))
    }

    /// Scene `idx` as a [`SceneState`], with maps of `kind` estimated from each
    /// instance's noiseless feature cloud.
    pub fn scene_state(&self, idx: usize, kind: MapKind) -> Result<SceneState> {
        let scene = self
            .scenes
            .get(idx)
            .ok_or_else(|| Error::InvalidInput(format!("scene index {idx} out of range")))?;
        let objects = scene
            .objects
            .iter()
            .map(|o| {
                let map = match kind {
                    MapKind::Identity => CategoryMap::identity(),
                    _ => {
                        let cat = self.category(&o.category)?;
                        let cloud = cat.instance_cloud(&o.pose, &o.ground_truth_map()?);
                        match kind {
                            MapKind::Uniform => fit_uniform(&cloud, cat)?,
                            _ => fit_orthogonal_auto(&cloud, cat)?.map,
                        }
                    }
                };
                Ok(SceneObject {
                    id: o.id.clone(),
                    category: o.category.clone(),
                    pose: o.pose,
                    map,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SceneState::new(objects, self.placement_order.clone())
    }

    pub fn train_states(&self, kind: MapKind) -> Result<Vec<SceneState>> {
        self.split.train.iter().map(|&i| self.scene_state(i, kind)).collect()
    }

    pub fn test_states(&self, kind: MapKind) -> Result<Vec<SceneState>> {
        self.split.test.iter().map(|&i| self.scene_state(i, kind)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if found != DATASET_SCHEMA_VERSION {
            return Err(Error::SchemaVersionMismatch {
                expected: DATASET_SCHEMA_VERSION,
                found,
            });
        }
        Ok(serde_json::from_value(value)?)
    }
}

pub fn save_dataset(set: &SceneSet, path: &Path) -> Result<()> {
    std::fs::write(path, set.to_json()?)?;
    Ok(())
}

pub fn load_dataset(path: &Path) -> Result<SceneSet> {
    SceneSet::from_json(&std::fs::read_to_string(path)?)
}

pub const TEMPLATE_NAMES: [&str; 5] = ["dinner", "bread", "desk", "living_room", "tv"];

/// One of the built-in templates.
pub fn builtin_template(name: &str) -> Result<SceneTemplate> {
    let t = match name {
        "dinner" => dinner(),
        "bread" => bread(),
        "desk" => desk(),
        "living_room" => living_room(),
        "tv" => tv(),
        _ => return Err(Error::InvalidTemplate(format!("no built-in template named {name:?}"))),
    };
    t.validate()?;
    Ok(t)
}

pub fn builtin_templates() -> Vec<SceneTemplate> {
    TEMPLATE_NAMES
        .iter()
        .map(|n| builtin_template(n).expect("built-in templates are valid"))
        .collect()
}

fn cat(name: &str, extent: [f64; 3]) -> CategorySpec {
    CategorySpec {
        name: name.into(),
        extent,
        symmetry: Symmetry::None,
        origin: Origin::Base,
    }
}

fn round_cat(name: &str, extent: [f64; 3]) -> CategorySpec {
    CategorySpec {
        symmetry: Symmetry::RevolutionZ,
        ..cat(name, extent)
    }
}

const SIZE: [[f64; 2]; 3] = [[0.6, 1.7], [0.6, 1.7], [0.6, 1.7]];
const ANCHOR_SIZE: [[f64; 2]; 3] = [[0.6, 1.7], [0.6, 1.7], [0.8, 1.25]];

fn anchor(id: &str, category: &str) -> RoleSpec {
    RoleSpec {
        id: id.into(),
        category: category.into(),
        parent: None,
        anchor_point: [0.0; 3],
        child_point: ON_TOP,
        offset: [0.0; 3],
        rotation: [0.0; 3],
        position_jitter: [0.3, 0.3, 0.0],
        rotation_jitter: [0.0, 0.0, 0.5],
        scale_range: ANCHOR_SIZE,
    }
}

/// A placed role resting on or beside its parent.
fn placed(
    id: &str,
    category: &str,
    parent: &str,
    anchor_point: [f64; 3],
    child_point: [f64; 3],
    offset: [f64; 3],
    yaw: f64,
) -> RoleSpec {
    RoleSpec {
        id: id.into(),
        category: category.into(),
        parent: Some(parent.into()),
        anchor_point,
        child_point,
        offset,
        rotation: [0.0, 0.0, yaw],
        position_jitter: [0.01, 0.01, 0.0],
        rotation_jitter: [0.0, 0.0, 0.04],
        scale_range: SIZE,
    }
}

const ON_TOP: [f64; 3] = [0.0, 0.0, -0.5];

fn dinner() -> SceneTemplate {
    SceneTemplate {
        name: "dinner".into(),
        categories: vec![
            cat("table", [1.6, 0.9, 0.75]),
            round_cat("plate", [0.26, 0.26, 0.03]),
            cat("fork", [0.03, 0.19, 0.01]),
            cat("knife", [0.02, 0.22, 0.01]),
            round_cat("glass", [0.08, 0.08, 0.14]),
            cat("napkin", [0.15, 0.15, 0.01]),
            round_cat("bowl", [0.16, 0.16, 0.06]),
            cat("spoon", [0.03, 0.16, 0.01]),
        ],
        roles: vec![
            anchor("table", "table"),
            placed("plate", "plate", "table", [0.0, -0.3, 0.5], ON_TOP, [0.0; 3], 0.0),
            placed(
                "fork",
                "fork",
                "plate",
                [-0.5, 0.0, -0.5],
                [0.5, 0.0, -0.5],
                [-0.03, 0.0, 0.0],
                0.0,
            ),
            placed(
                "knife",
                "knife",
                "plate",
                [0.5, 0.0, -0.5],
                [-0.5, 0.0, -0.5],
                [0.03, 0.0, 0.0],
                0.0,
            ),
            placed(
                "glass",
                "glass",
                "plate",
                [0.5, 0.5, -0.5],
                [0.0, -0.5, -0.5],
                [0.06, 0.05, 0.0],
                0.0,
            ),
            placed(
                "napkin",
                "napkin",
                "fork",
                [-0.5, 0.0, -0.5],
                [0.5, 0.0, -0.5],
                [-0.03, 0.0, 0.0],
                0.2,
            ),
            placed("bowl", "bowl", "plate", [0.0, 0.0, 0.5], ON_TOP, [0.0; 3], 0.0),
            placed(
                "spoon",
                "spoon",
                "knife",
                [0.5, 0.0, -0.5],
                [-0.5, 0.0, -0.5],
                [0.03, 0.0, 0.0],
                0.0,
            ),
        ],
        scale_range: [0.5, 1.6],
    }
}

fn bread() -> SceneTemplate {
    SceneTemplate {
        name: "bread".into(),
        categories: vec![
            cat("counter", [2.0, 0.6, 0.9]),
            cat("board", [0.4, 0.28, 0.02]),
            cat("loaf", [0.3, 0.12, 0.1]),
            cat("bread_knife", [0.03, 0.3, 0.015]),
            cat("butter_dish", [0.14, 0.09, 0.05]),
            round_cat("plate", [0.22, 0.22, 0.02]),
            round_cat("jam_jar", [0.07, 0.07, 0.1]),
            cat("mug", [0.11, 0.08, 0.1]),
        ],
        roles: vec![
            anchor("counter", "counter"),
            placed("board", "board", "counter", [-0.2, 0.0, 0.5], ON_TOP, [0.0; 3], 0.3),
            placed("loaf", "loaf", "board", [0.0, 0.0, 0.5], ON_TOP, [0.0; 3], 0.1),
            placed(
                "bread_knife",
                "bread_knife",
                "board",
                [0.0, -0.5, -0.5],
                [0.5, 0.0, -0.5],
                [0.0, -0.04, 0.0],
                1.4,
            ),
            placed(
                "butter",
                "butter_dish",
                "board",
                [0.5, 0.3, -0.5],
                [-0.5, 0.0, -0.5],
                [0.05, 0.0, 0.0],
                0.0,
            ),
            placed(
                "plate",
                "plate",
                "board",
                [0.5, -0.3, -0.5],
                [-0.5, 0.0, -0.5],
                [0.08, 0.0, 0.0],
                0.0,
            ),
            placed(
                "jam",
                "jam_jar",
                "butter",
                [0.0, 0.5, -0.5],
                [0.0, -0.5, -0.5],
                [0.0, 0.04, 0.0],
                0.0,
            ),
            placed(
                "mug",
                "mug",
                "plate",
                [0.5, 0.0, -0.5],
                [-0.5, 0.0, -0.5],
                [0.05, 0.1, 0.0],
                -0.5,
            ),
        ],
        scale_range: [0.5, 1.6],
    }
}

fn desk() -> SceneTemplate {
    SceneTemplate {
        name: "desk".into(),
        categories: vec![
            cat("desk", [1.4, 0.7, 0.75]),
            cat("monitor", [0.6, 0.2, 0.45]),
            cat("keyboard", [0.44, 0.14, 0.03]),
            cat("mouse", [0.06, 0.11, 0.04]),
            cat("lamp", [0.15, 0.15, 0.45]),
            cat("mug", [0.11, 0.08, 0.1]),
            cat("notebook", [0.21, 0.3, 0.015]),
            cat("pen", [0.01, 0.14, 0.01]),
        ],
        roles: vec![
            anchor("desk", "desk"),
            placed("monitor", "monitor", "desk", [0.0, 0.3, 0.5], ON_TOP, [0.0; 3], 0.0),
            placed(
                "keyboard",
                "keyboard",
                "monitor",
                [0.0, -0.5, -0.5],
                [0.0, 0.5, -0.5],
                [0.0, -0.15, 0.0],
                0.0,
            ),
            placed(
                "mouse",
                "mouse",
                "keyboard",
                [0.5, 0.0, -0.5],
                [-0.5, 0.0, -0.5],
                [0.08, 0.0, 0.0],
                0.0,
            ),
            placed(
                "lamp",
                "lamp",
                "desk",
                [-0.5, 0.5, 0.5],
                ON_TOP,
                [0.15, -0.15, 0.0],
                0.0,
            ),
            placed(
                "mug",
                "mug",
                "keyboard",
                [-0.5, 0.0, -0.5],
                [0.5, 0.0, -0.5],
                [-0.1, 0.05, 0.0],
                0.3,
            ),
            placed(
                "notebook",
                "notebook",
                "lamp",
                [0.5, -0.5, -0.5],
                [-0.5, 0.5, -0.5],
                [0.05, -0.05, 0.0],
                0.4,
            ),
            placed(
                "pen",
                "pen",
                "notebook",
                [0.5, 0.0, 0.5],
                ON_TOP,
                [-0.02, 0.0, 0.0],
                1.2,
            ),
        ],
        scale_range: [0.5, 1.6],
    }
}

fn living_room() -> SceneTemplate {
    let mut cushion = placed("cushion", "cushion", "sofa", [0.3, 0.1, 0.2], ON_TOP, [0.0; 3], 0.0);
    cushion.rotation = [-0.3, 0.0, 0.0];
    SceneTemplate {
        name: "living_room".into(),
        categories: vec![
            cat("rug", [2.5, 1.8, 0.01]),
            cat("sofa", [2.0, 0.9, 0.85]),
            cat("coffee_table", [1.0, 0.6, 0.45]),
            cat("armchair", [0.8, 0.8, 0.9]),
            round_cat("floor_lamp", [0.35, 0.35, 1.6]),
            cat("book", [0.15, 0.22, 0.03]),
            round_cat("vase", [0.12, 0.12, 0.3]),
            cat("cushion", [0.45, 0.15, 0.45]),
        ],
        roles: vec![
            anchor("rug", "rug"),
            placed("sofa", "sofa", "rug", [0.0, 0.5, 0.5], [0.0, 0.5, -0.5], [0.0; 3], 0.0),
            placed(
                "coffee_table",
                "coffee_table",
                "rug",
                [0.0, -0.1, 0.5],
                ON_TOP,
                [0.0; 3],
                0.0,
            ),
            placed(
                "armchair",
                "armchair",
                "sofa",
                [0.5, 0.0, -0.5],
                [-0.5, 0.0, -0.5],
                [0.3, -0.5, 0.0],
                -0.9,
            ),
            placed(
                "floor_lamp",
                "floor_lamp",
                "sofa",
                [-0.5, 0.5, -0.5],
                [0.5, -0.5, -0.5],
                [-0.1, 0.0, 0.0],
                0.0,
            ),
            placed("book", "book", "coffee_table", [0.25, 0.0, 0.5], ON_TOP, [0.0; 3], 0.3),
            placed("vase", "vase", "coffee_table", [-0.25, 0.1, 0.5], ON_TOP, [0.0; 3], 0.0),
            cushion,
        ],
        scale_range: [0.5, 1.6],
    }
}

fn tv() -> SceneTemplate {
    SceneTemplate {
        name: "tv".into(),
        categories: vec![
            cat("tv_stand", [1.6, 0.45, 0.5]),
            cat("tv", [1.2, 0.08, 0.7]),
            cat("soundbar", [0.9, 0.1, 0.07]),
            cat("console", [0.3, 0.25, 0.06]),
            cat("sofa", [2.0, 0.9, 0.85]),
            cat("coffee_table", [1.0, 0.6, 0.45]),
            cat("remote", [0.05, 0.18, 0.02]),
            round_cat("plant", [0.4, 0.4, 0.9]),
        ],
        roles: vec![
            anchor("stand", "tv_stand"),
            placed("tv", "tv", "stand", [0.0, 0.0, 0.5], ON_TOP, [0.0; 3], 0.0),
            placed("soundbar", "soundbar", "stand", [0.0, -0.3, 0.5], ON_TOP, [0.0; 3], 0.0),
            placed(
                "console",
                "console",
                "stand",
                [0.3, 0.0, 0.0],
                ON_TOP,
                [0.0, 0.0, -0.1],
                0.0,
            ),
            placed(
                "sofa",
                "sofa",
                "stand",
                [0.0, -0.5, -0.5],
                [0.0, 0.5, -0.5],
                [0.0, -2.5, 0.0],
                2.9,
            ),
            placed(
                "coffee_table",
                "coffee_table",
                "sofa",
                [0.0, -0.5, -0.5],
                [0.0, 0.5, -0.5],
                [0.0, -0.5, 0.0],
                0.0,
            ),
            placed("remote", "remote", "sofa", [0.3, 0.0, 0.1], ON_TOP, [0.0; 3], 0.2),
            placed(
                "plant",
                "plant",
                "stand",
                [0.5, 0.0, -0.5],
                [-0.5, 0.0, -0.5],
                [0.2, 0.0, 0.0],
                0.0,
            ),
        ],
        scale_range: [0.5, 1.6],
    }
}
