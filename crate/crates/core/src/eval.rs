//! n-step inference evaluation, error metrics and sweep reports.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::SceneSet;
use crate::error::{Error, Result};
use crate::gaussian::CovarianceEstimator;
use crate::inference::{infer_pose, InferenceParams};
use crate::maps::{MapKind, Symmetry};
use crate::minimize::{minimize_model_set, MinimizationParams};
use crate::placement::{FitConfig, ModelSet, ModelVariant};
use crate::scene::SceneState;
use crate::se3::{geodesic_angle_deg, EncodingKind, Pose};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
/// Prefix lengths reported for per-step traces.
pub const PREFIXES: [usize; 3] = [5, 10, 15];

/// `100 * |t_pred - t_gt| / extent`.
pub fn position_error_pct(pred: &Pose, gt: &Pose, extent: f64) -> f64 {
    100.0 * (pred.translation() - gt.translation()).norm() / extent
}

/// Geodesic angle in degrees. For z-revolution symmetric objects the twist about the
/// local z axis is discarded and only the swing angle is reported.
pub fn angular_error_deg(pred: &Pose, gt: &Pose, symmetry: Symmetry) -> f64 {
    match symmetry {
        Symmetry::None => geodesic_angle_deg(pred, gt),
        Symmetry::RevolutionZ => {
            let q = gt.rotation().inverse() * pred.rotation();
            let twist = (q.w * q.w + q.k * q.k).sqrt();
            let swing = (q.i * q.i + q.j * q.j).sqrt();
            (2.0 * swing.atan2(twist)).to_degrees()
        }
    }
}

/// Places the last `n + 1` objects of `scene`'s placement order in turn, each with
/// the previous predictions in place. Returns `(id, predicted pose)` in order.
/// Step `i` uses inference seed `params.seed + step index`.
pub fn n_step_inference(
    models: &ModelSet,
    scene: &SceneState,
    n: usize,
    params: &InferenceParams,
) -> Result<Vec<(String, Pose)>> {
    let total = scene.placement_order.len();
    if n + 1 > total {
        return Err(Error::InvalidInput(format!(
            "{} steps requested but the task has {total}",
            n + 1
        )));
    }
    let start = total - n - 1;
    let mut state = scene.clone();
    let mut out = Vec::with_capacity(n + 1);
    for step in start..total {
        let id = scene.placement_order[step].clone();
        let model = models.model(&id)?;
        let p = InferenceParams {
            seed: params.seed.wrapping_add(step as u64),
            ..*params
        };
        let result = infer_pose(model, &state, &p)?;
        state.set_pose(&id, result.pose)?;
        out.push((id, result.pose));
    }
    Ok(out)
}

/// The scene as it stands when the object at `step` is placed: placed objects after
/// `step` are removed.
pub fn truncate_scene(scene: &SceneState, step: usize) -> SceneState {
    let keep = scene.placement_order[..=step.min(scene.placement_order.len().saturating_sub(1))].to_vec();
    let dropped: Vec<&String> = scene.placement_order.iter().filter(|id| !keep.contains(id)).collect();
    SceneState {
        objects: scene
            .objects
            .iter()
            .filter(|o| !dropped.contains(&&o.id))
            .cloned()
            .collect(),
        placement_order: keep,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Truncation length: every object is predicted after its `n_steps`
    /// predecessors were predicted too (fewer at the start of the task).
    pub n_steps: usize,
    pub encodings: Vec<EncodingKind>,
    pub maps: Vec<MapKind>,
    pub variants: Vec<ModelVariant>,
    pub minimized: Vec<bool>,
    /// Numbers of training scenes, taken from the front of the train split.
    pub train_counts: Vec<usize>,
    pub estimator: CovarianceEstimator,
    pub inference: InferenceParams,
    pub minimization: MinimizationParams,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            n_steps: 0,
            encodings: vec![EncodingKind::AxisAngle],
            maps: vec![MapKind::Orthogonal],
            variants: vec![ModelVariant::Bidirectional],
            minimized: vec![false],
            train_counts: vec![5],
            estimator: CovarianceEstimator::default(),
            inference: InferenceParams::default(),
            minimization: MinimizationParams::default(),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.encodings.is_empty()
            || self.maps.is_empty()
            || self.variants.is_empty()
            || self.minimized.is_empty()
            || self.train_counts.is_empty()
        {
            return Err(Error::InvalidInput("every grid axis needs at least one value".into()));
        }
        if self.train_counts.iter().any(|&k| k < 2) {
            return Err(Error::InvalidInput("training counts must be at least 2".into()));
        }
        self.inference.validate()?;
        self.minimization.validate()
    }
}

/// One grid cell of a sweep.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition {
    pub template: String,
    pub dataset_seed: u64,
    pub distractors: usize,
    pub map: String,
    pub encoding: String,
    pub variant: String,
    pub minimized: bool,
    pub train_count: usize,
    pub n_steps: usize,
}

/// One condition evaluated on one test scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    #[serde(flatten)]
    pub condition: Condition,
    pub scene: usize,
    pub extent: f64,
    pub position_error_pct: f64,
    pub angular_error_deg: f64,
    /// Per placement step, in placement order.
    pub position_trace: Vec<f64>,
    pub angular_trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    #[serde(flatten)]
    pub condition: Condition,
    pub scenes: usize,
    pub position_error_pct: f64,
    pub angular_error_deg: f64,
    /// Mean position error over steps `t < p` for each entry of [`PREFIXES`].
    pub position_prefix_means: Vec<f64>,
    pub angular_prefix_means: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub rows: Vec<EvalRow>,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Mean over the first `p` entries (all of them when fewer exist).
pub fn prefix_mean(trace: &[f64], p: usize) -> f64 {
    mean(&trace[..p.min(trace.len())])
}

/// Mean over `rows` of per-scene trace prefix means.
fn prefix_means(rows: &[&EvalRow], trace: impl Fn(&EvalRow) -> &[f64]) -> Vec<f64> {
    PREFIXES
        .iter()
        .map(|&p| mean(&rows.iter().map(|r| prefix_mean(trace(r), p)).collect::<Vec<_>>()))
        .collect()
}

impl EvalReport {
    pub fn new(rows: Vec<EvalRow>) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            rows,
        }
    }

    pub fn extend(&mut self, other: EvalReport) {
        self.rows.extend(other.rows);
    }

    /// Rows matching `filter`.
    pub fn select(&self, filter: impl Fn(&Condition) -> bool) -> Vec<&EvalRow> {
        self.rows.iter().filter(|r| filter(&r.condition)).collect()
    }

    pub fn mean_position_error(&self, filter: impl Fn(&Condition) -> bool) -> f64 {
        mean(
            &self
                .select(filter)
                .iter()
                .map(|r| r.position_error_pct)
                .collect::<Vec<_>>(),
        )
    }

    pub fn mean_angular_error(&self, filter: impl Fn(&Condition) -> bool) -> f64 {
        mean(
            &self
                .select(filter)
                .iter()
                .map(|r| r.angular_error_deg)
                .collect::<Vec<_>>(),
        )
    }

    /// Mean position error over steps `t < p`, averaged over matching rows.
    pub fn position_prefix_mean(&self, p: usize, filter: impl Fn(&Condition) -> bool) -> f64 {
        mean(
            &self
                .select(filter)
                .iter()
                .map(|r| prefix_mean(&r.position_trace, p))
                .collect::<Vec<_>>(),
        )
    }

    /// Per-condition means, ordered by condition.
    pub fn summary(&self) -> Vec<ConditionSummary> {
        let mut groups: BTreeMap<&Condition, Vec<&EvalRow>> = BTreeMap::new();
        for r in &self.rows {
            groups.entry(&r.condition).or_default().push(r);
        }
        groups
            .into_iter()
            .map(|(c, rows)| ConditionSummary {
                condition: c.clone(),
                scenes: rows.len(),
                position_error_pct: mean(&rows.iter().map(|r| r.position_error_pct).collect::<Vec<_>>()),
                angular_error_deg: mean(&rows.iter().map(|r| r.angular_error_deg).collect::<Vec<_>>()),
                position_prefix_means: prefix_means(&rows, |r| &r.position_trace),
                angular_prefix_means: prefix_means(&rows, |r| &r.angular_trace),
            })
            .collect()
    }

    /// One CSV record per row; traces are `;`-joined.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "template",
            "dataset_seed",
            "distractors",
            "map",
            "encoding",
            "variant",
            "minimized",
            "train_count",
            "n_steps",
            "scene",
            "extent",
            "position_error_pct",
            "angular_error_deg",
            "position_trace",
            "angular_trace",
        ])
        .map_err(csv_error)?;
        let join = |xs: &[f64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        for r in &self.rows {
            let c = &r.condition;
            w.write_record([
                c.template.clone(),
                c.dataset_seed.to_string(),
                c.distractors.to_string(),
                c.map.clone(),
                c.encoding.clone(),
                c.variant.clone(),
                c.minimized.to_string(),
                c.train_count.to_string(),
                c.n_steps.to_string(),
                r.scene.to_string(),
                r.extent.to_string(),
                r.position_error_pct.to_string(),
                r.angular_error_deg.to_string(),
                join(&r.position_trace),
                join(&r.angular_trace),
            ])
            .map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    /// JSON document with the schema version, the rows and the per-condition summary.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            schema_version: u32,
            summary: Vec<ConditionSummary>,
            rows: &'a [EvalRow],
        }
        Ok(serde_json::to_string_pretty(&Doc {
            schema_version: self.schema_version,
            summary: self.summary(),
            rows: &self.rows,
        })?)
    }

    pub fn write(&self, csv_path: &Path, json_path: &Path) -> Result<()> {
        std::fs::write(csv_path, self.to_csv()?)?;
        std::fs::write(json_path, self.to_json()?)?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// Per-step errors of one test scene under `models`.
pub fn evaluate_scene(
    models: &ModelSet,
    dataset: &SceneSet,
    scene_index: usize,
    n_steps: usize,
    params: &InferenceParams,
) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let generated = dataset
        .scenes
        .get(scene_index)
        .ok_or_else(|| Error::InvalidInput(format!("scene index {scene_index} out of range")))?;
    let extent = generated.extent();
    if !(extent > 0.0) {
        return Err(Error::InvalidInput(format!("scene {scene_index} has zero extent")));
    }
    let state = dataset.scene_state(scene_index, models.map_kind)?;
    let total = state.placement_order.len();
    let mut predictions: Vec<Option<Pose>> = vec![None; total];
    if n_steps + 1 >= total {
        for (step, (_, pose)) in n_step_inference(models, &state, total - 1, params)?
            .into_iter()
            .enumerate()
        {
            predictions[step] = Some(pose);
        }
    } else {
        for step in 0..total {
            let truncated = truncate_scene(&state, step);
            let n = n_steps.min(step);
            let placed = n_step_inference(models, &truncated, n, params)?;
            predictions[step] = placed.last().map(|p| p.1);
        }
    }
    let mut pos = Vec::with_capacity(total);
    let mut ang = Vec::with_capacity(total);
    for (step, id) in state.placement_order.iter().enumerate() {
        let pred = predictions[step].expect("every step predicted");
        let gt = generated.object(id)?;
        let symmetry = dataset.category(&gt.category)?.symmetry;
        pos.push(position_error_pct(&pred, &gt.pose, extent));
        ang.push(angular_error_deg(&pred, &gt.pose, symmetry));
    }
    Ok((extent, pos, ang))
}

/// Evaluates an already fitted model set on the test split of `dataset`.
/// `train_count` is only recorded in the condition.
pub fn evaluate_model_set(
    models: &ModelSet,
    dataset: &SceneSet,
    train_count: usize,
    n_steps: usize,
    params: &InferenceParams,
) -> Result<EvalReport> {
    let condition = Condition {
        template: dataset.template.clone(),
        dataset_seed: dataset.seed,
        distractors: dataset.distractors,
        map: models.map_kind.tag().to_string(),
        encoding: models.config.encoding.tag().to_string(),
        variant: models.config.variant.tag().to_string(),
        minimized: models.models.iter().any(|m| m.minimized),
        train_count,
        n_steps,
    };
    let mut rows = Vec::with_capacity(dataset.split.test.len());
    for &scene in &dataset.split.test {
        let (extent, pos, ang) = evaluate_scene(models, dataset, scene, n_steps, params)?;
        rows.push(EvalRow {
            condition: condition.clone(),
            scene,
            extent,
            position_error_pct: mean(&pos),
            angular_error_deg: mean(&ang),
            position_trace: pos,
            angular_trace: ang,
        });
    }
    Ok(EvalReport::new(rows))
}

/// Fits, optionally minimizes and evaluates every grid condition on the test
/// split of `dataset`. Rows are ordered by condition, then test scene.
pub fn run_sweep(config: &EvalConfig, dataset: &SceneSet) -> Result<EvalReport> {
    config.validate()?;
    if dataset.split.test.is_empty() {
        return Err(Error::InvalidInput("dataset has no test scenes".into()));
    }
    let mut rows = Vec::new();
    for &map in &config.maps {
        let all_train = dataset.train_states(map)?;
        for &k in &config.train_counts {
            if k > all_train.len() {
                return Err(Error::InsufficientScenes {
                    needed: k,
                    found: all_train.len(),
                });
            }
            let train = &all_train[..k];
            for &encoding in &config.encodings {
                for &variant in &config.variants {
                    let fit = FitConfig {
                        variant,
                        encoding,
                        estimator: config.estimator,
                    };
                    let full = ModelSet::fit(train, map, fit)?;
                    for &minimized in &config.minimized {
                        let models = if minimized {
                            minimize_model_set(&full, train, &config.minimization)?
                        } else {
                            full.clone()
                        };
                        let report = evaluate_model_set(&models, dataset, k, config.n_steps, &config.inference)?;
                        rows.extend(report.rows);
                    }
                }
            }
        }
    }
    Ok(EvalReport::new(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{builtin_template, generate_dataset, generate_dataset_with, GeneratorOptions, ScaleVariation};
    use crate::se3::rotation_from_euler;
    use crate::se3::testing::random_pose;
    use nalgebra::Vector3;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fast() -> InferenceParams {
        InferenceParams {
            initial_samples: 2_000,
            refine_samples: 200,
            ..Default::default()
        }
    }

    /// Nearly deterministic layout: tiny jitter, fixed sizes.
    fn delta_set() -> SceneSet {
        let opts = GeneratorOptions {
            scale_variation: ScaleVariation::None,
            jitter_scale: 1e-3,
        };
        generate_dataset_with(&builtin_template("desk").unwrap(), 10, 0, 4, opts).unwrap()
    }

    #[test]
    fn position_error_examples() {
        let gt = Pose::from_translation(1.0, 2.0, 3.0);
        assert_eq!(position_error_pct(&gt, &gt, 2.0), 0.0);
        let pred = Pose::from_translation(1.1, 2.0, 3.0);
        assert!((position_error_pct(&pred, &gt, 2.0) - 5.0).abs() < 1e-9);
    }

    #[test]
    fn angular_error_examples() {
        let gt = Pose::new(rotation_from_euler(0.1, 0.2, 0.3), Vector3::zeros());
        assert!(angular_error_deg(&gt, &gt, Symmetry::None).abs() < 1e-6);
        let tilt = gt.compose(&Pose::from_rotation(rotation_from_euler(
            std::f64::consts::FRAC_PI_2,
            0.0,
            0.0,
        )));
        assert!((angular_error_deg(&tilt, &gt, Symmetry::None) - 90.0).abs() < 1e-9);
        assert!((angular_error_deg(&tilt, &gt, Symmetry::RevolutionZ) - 90.0).abs() < 1e-9);
        let spun = gt.compose(&Pose::from_rotation(rotation_from_euler(0.0, 0.0, 2.0)));
        assert!(angular_error_deg(&spun, &gt, Symmetry::RevolutionZ).abs() < 1e-6);
        assert!((angular_error_deg(&spun, &gt, Symmetry::None) - 2f64.to_degrees()).abs() < 1e-9);
    }

    #[test]
    fn swing_angle_matches_brute_force_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_pose(&mut rng, 1.0);
            let b = random_pose(&mut rng, 1.0);
            let brute = (0..3600)
                .map(|i| {
                    let yaw = i as f64 * std::f64::consts::TAU / 3600.0;
                    let twisted = a.compose(&Pose::from_rotation(rotation_from_euler(0.0, 0.0, yaw)));
                    geodesic_angle_deg(&twisted, &b)
                })
                .fold(f64::INFINITY, f64::min);
            let closed = angular_error_deg(&a, &b, Symmetry::RevolutionZ);
            assert!(closed <= brute + 1e-9 && brute - closed < 0.06, "{closed} vs {brute}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn position_error_is_rigid_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (a, b, g) = (random_pose(&mut rng, 2.0), random_pose(&mut rng, 2.0), random_pose(&mut rng, 5.0));
            let e1 = position_error_pct(&a, &b, 1.7);
            let e2 = position_error_pct(&g.compose(&a), &g.compose(&b), 1.7);
            prop_assert!((e1 - e2).abs() < 1e-9);
            prop_assert!((angular_error_deg(&a, &b, Symmetry::RevolutionZ)
                - angular_error_deg(&g.compose(&a), &g.compose(&b), Symmetry::RevolutionZ)).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_step_on_delta_models_is_exact() {
        let set = delta_set();
        let train = set.train_states(MapKind::Orthogonal).unwrap();
        let models = ModelSet::fit(&train, MapKind::Orthogonal, FitConfig::default()).unwrap();
        let scene = set.scene_state(set.split.test[0], MapKind::Orthogonal).unwrap();
        let last = scene.placement_order.last().unwrap().clone();
        let pred = n_step_inference(&models, &scene, 0, &fast()).unwrap();
        assert_eq!(pred.len(), 1);
        assert_eq!(pred[0].0, last);
        let gt = scene.pose(&last).unwrap();
        assert!((pred[0].1.translation() - gt.translation()).norm() < 1e-3);
    }

    #[test]
    fn delta_errors_do_not_amplify() {
        let set = delta_set();
        let train = set.train_states(MapKind::Orthogonal).unwrap();
        let models = ModelSet::fit(&train, MapKind::Orthogonal, FitConfig::default()).unwrap();
        let scene = set.scene_state(set.split.test[1], MapKind::Orthogonal).unwrap();
        let pred = n_step_inference(&models, &scene, 2, &fast()).unwrap();
        assert_eq!(pred.len(), 3);
        for (id, pose) in pred {
            assert!(
                (pose.translation() - scene.pose(&id).unwrap().translation()).norm() < 2e-3,
                "{id}"
            );
        }
    }

    #[test]
    fn missing_models_are_reported() {
        let set = delta_set();
        let train = set.train_states(MapKind::Identity).unwrap();
        let mut models = ModelSet::fit(&train, MapKind::Identity, FitConfig::default()).unwrap();
        models.models.pop();
        let scene = set.scene_state(5, MapKind::Identity).unwrap();
        assert!(matches!(
            n_step_inference(&models, &scene, 0, &fast()),
            Err(Error::MissingModel(_))
        ));
    }

    #[test]
    fn truncation_drops_later_objects() {
        let set = delta_set();
        let scene = set.scene_state(0, MapKind::Identity).unwrap();
        let t = truncate_scene(&scene, 2);
        assert_eq!(t.placement_order, scene.placement_order[..3].to_vec());
        assert_eq!(t.objects.len(), scene.objects.len() - (scene.placement_order.len() - 3));
        t.validate().unwrap();
    }

    #[test]
    fn single_condition_sweep_on_delta_fixture() {
        let set = delta_set();
        let config = EvalConfig {
            inference: fast(),
            ..Default::default()
        };
        let report = run_sweep(&config, &set).unwrap();
        assert_eq!(report.rows.len(), set.split.test.len());
        assert_eq!(report.summary().len(), 1);
        for r in &report.rows {
            assert!(r.position_error_pct < 0.5, "{}", r.position_error_pct);
            assert!(r.angular_error_deg < 0.5);
            assert_eq!(r.position_trace.len(), 7);
        }
    }

    #[test]
    fn grid_rows_and_prefix_means() {
        let set = generate_dataset(&builtin_template("bread").unwrap(), 6, 1, 2).unwrap();
        let config = EvalConfig {
            n_steps: 10,
            maps: vec![MapKind::Identity, MapKind::Uniform],
            variants: vec![ModelVariant::Unidirectional, ModelVariant::Bidirectional],
            train_counts: vec![2, 3],
            inference: fast(),
            ..Default::default()
        };
        let report = run_sweep(&config, &set).unwrap();
        assert_eq!(report.rows.len(), 2 * 2 * 2 * set.split.test.len());
        for r in &report.rows {
            assert!(r
                .position_trace
                .iter()
                .chain(&r.angular_trace)
                .all(|x| x.is_finite() && *x >= 0.0));
            assert!((prefix_mean(&r.position_trace, 15) - r.position_error_pct).abs() < 1e-12);
            let manual: f64 = r.position_trace[..5].iter().sum::<f64>() / 5.0;
            assert!((prefix_mean(&r.position_trace, 5) - manual).abs() < 1e-12);
        }
        // Test-scene order does not change condition means.
        let mut shuffled = report.clone();
        shuffled.rows.reverse();
        for (a, b) in report.summary().iter().zip(shuffled.summary().iter()) {
            assert!((a.position_error_pct - b.position_error_pct).abs() < 1e-9);
        }
    }

    #[test]
    fn reports_are_reproducible_and_serializable() {
        let set = generate_dataset(&builtin_template("tv").unwrap(), 10, 2, 8).unwrap();
        let config = EvalConfig {
            minimized: vec![false, true],
            inference: fast(),
            ..Default::default()
        };
        let a = run_sweep(&config, &set).unwrap();
        let b = run_sweep(&config, &set).unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        let csv = a.to_csv().unwrap();
        assert_eq!(csv.lines().count(), a.rows.len() + 1);
        let doc: serde_json::Value = serde_json::from_str(&a.to_json().unwrap()).unwrap();
        assert_eq!(doc["schema_version"], 1);
        assert_eq!(doc["summary"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn invalid_configs() {
        let set = delta_set();
        let bad = EvalConfig {
            train_counts: vec![1],
            ..Default::default()
        };
        assert!(run_sweep(&bad, &set).is_err());
        let too_many = EvalConfig {
            train_counts: vec![6],
            inference: fast(),
            ..Default::default()
        };
        assert!(matches!(
            run_sweep(&too_many, &set),
            Err(Error::InsufficientScenes { .. })
        ));
    }
}
