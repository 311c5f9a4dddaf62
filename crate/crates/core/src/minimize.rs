//! Active-set minimization: find the few references a placement actually depends on
//! by transplanting observations between training scenes and checking which
//! references flag them as improbable.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{canonicalize_relative_pose, decanonicalize_pose};
use crate::pairwise::{relative_pose, Direction};
use crate::placement::{ModelSet, PlacementModel, Relation};
use crate::scene::SceneState;
use crate::se3::Pose;

/// Observation of the placed object moved from `source_scene` into `target_scene`
/// through the root relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentedSample {
    pub source_scene: usize,
    pub target_scene: usize,
    pub root: String,
    pub transplanted_pose: Pose,
    /// Forward log densities of every other reference at the transplanted pose.
    pub log_densities: BTreeMap<String, f64>,
}

impl AugmentedSample {
    pub fn density(&self, reference: &str) -> Option<f64> {
        self.log_densities.get(reference).map(|l| l.exp())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizationParams {
    pub alpha: f64,
    /// Drives the prefilter pool size; `None` means the number of training scenes.
    pub k: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for MinimizationParams {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            k: None,
            restarts: 16,
            seed: 0,
        }
    }
}

impl MinimizationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidInput("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Entropy-derived weights of a model's relations: forward entropy per dimension,
/// shifted so the lowest one weighs one nat. Positive, and affine in the entropy.
pub fn entropy_weights(model: &PlacementModel) -> Vec<f64> {
    let h: Vec<f64> = model
        .relations
        .iter()
        .map(|r| r.forward.gaussian.entropy_per_dim())
        .collect();
    let floor = h.iter().copied().fold(f64::INFINITY, f64::min);
    h.iter().map(|x| x - floor + 1.0).collect()
}

/// Transplants the placed object of every scene into every scene through the root
/// relation and evaluates all other references' forward densities there.
pub fn augment_observations(
    train_scenes: &[SceneState],
    model: &PlacementModel,
    root: &str,
) -> Result<Vec<AugmentedSample>> {
    model.relation(root)?;
    if train_scenes.len() < 2 {
        return Err(Error::InsufficientScenes {
            needed: 2,
            found: train_scenes.len(),
        });
    }
    let placed = &model.placed_object;
    let canonical = train_scenes
        .iter()
        .map(|s| relative_pose(s, root, placed, Direction::ReferenceToPlaced))
        .collect::<Result<Vec<_>>>()?;
    let others: Vec<&Relation> = model.relations.iter().filter(|r| r.reference != root).collect();

    let mut out = Vec::with_capacity(train_scenes.len().pow(2));
    for (i, rel) in canonical.iter().enumerate() {
        for (j, scene) in train_scenes.iter().enumerate() {
            let r = scene.object(root)?;
            let pose = r.pose.compose(&decanonicalize_pose(&r.map, rel));
            let mut log_densities = BTreeMap::new();
            for o in &others {
                let obj = scene.object(&o.reference)?;
                let local = canonicalize_relative_pose(&obj.map, &obj.pose.inverse().compose(&pose));
                log_densities.insert(o.reference.clone(), o.forward.log_density(&local));
            }
            out.push(AugmentedSample {
                source_scene: i,
                target_scene: j,
                root: root.to_string(),
                transplanted_pose: pose,
                log_densities,
            });
        }
    }
    Ok(out)
}

/// Scene pairs `(k, j)` whose transplanted observation `reference` scores below
/// `alpha` times the self-transplant of scene `k`. The ratio is taken in log space.
pub fn rejection_set(samples: &[AugmentedSample], reference: &str, alpha: f64) -> Result<BTreeSet<(usize, usize)>> {
    let mut own = HashMap::new();
    for s in samples.iter().filter(|s| s.source_scene == s.target_scene) {
        own.insert(s.source_scene, lookup(s, reference)?);
    }
    let threshold = alpha.ln();
    let mut out = BTreeSet::new();
    for s in samples {
        let base = own
            .get(&s.source_scene)
            .ok_or_else(|| Error::InvalidInput(format!("no self-transplant for scene {}", s.source_scene)))?;
        if lookup(s, reference)? - base < threshold {
            out.insert((s.source_scene, s.target_scene));
        }
    }
    Ok(out)
}

fn lookup(s: &AugmentedSample, reference: &str) -> Result<f64> {
    s.log_densities
        .get(reference)
        .copied()
        .ok_or_else(|| Error::MissingObject(reference.to_string()))
}

/// Outcome of [`assemble_active_set_detailed`].
#[derive(Clone, Debug)]
pub struct Assembly {
    pub model: PlacementModel,
    /// Active set and final-pick objective of every restart.
    pub restarts: Vec<(Vec<String>, f64)>,
}

/// Minimizes the active set of `model`. Relations are kept; only `active_set` shrinks.
pub fn assemble_active_set(
    model: &PlacementModel,
    train_scenes: &[SceneState],
    params: &MinimizationParams,
) -> Result<PlacementModel> {
    Ok(assemble_active_set_detailed(model, train_scenes, params)?.model)
}

pub fn assemble_active_set_detailed(
    model: &PlacementModel,
    train_scenes: &[SceneState],
    params: &MinimizationParams,
) -> Result<Assembly> {
    params.validate()?;
    if model.relations.is_empty() {
        return Err(Error::InvalidInput("model has no relations".into()));
    }
    let n_scenes = train_scenes.len();
    if n_scenes < 2 {
        return Err(Error::InsufficientScenes {
            needed: 2,
            found: n_scenes,
        });
    }
    let k_hat = (n_scenes * n_scenes - n_scenes) as f64;
    let pool_size = (3 * params.k.unwrap_or(n_scenes)).clamp(1, model.relations.len());
    let weights: Vec<f64> = entropy_weights(model);
    let entropies: Vec<f64> = model
        .relations
        .iter()
        .map(|r| r.forward.gaussian.entropy_per_dim())
        .collect();
    let mean_weight = |set: &[usize]| set.iter().map(|&i| weights[i]).sum::<f64>() / set.len() as f64;
    let mean_entropy = |set: &[usize]| set.iter().map(|&i| entropies[i]).sum::<f64>() / set.len() as f64;

    // Rejection sets per root, indexed by relation.
    let mut cache: HashMap<usize, Vec<BTreeSet<(usize, usize)>>> = HashMap::new();
    let mut restarts = Vec::with_capacity(params.restarts);
    let mut best: Option<(Vec<usize>, f64, f64)> = None;

    for restart in 0..params.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(restart as u64);

        let pool = weighted_subset(&weights, pool_size, &mut rng);
        let root = pool[weighted_index(&pool.iter().map(|&i| weights[i]).collect::<Vec<_>>(), &mut rng)];
        if let std::collections::hash_map::Entry::Vacant(e) = cache.entry(root) {
            let samples = augment_observations(train_scenes, model, &model.relations[root].reference)?;
            let sets = model
                .relations
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    if i == root {
                        Ok(BTreeSet::new())
                    } else {
                        rejection_set(&samples, &r.reference, params.alpha)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            e.insert(sets);
        }
        let rejections = &cache[&root];

        let mut chosen = vec![root];
        let mut covered: BTreeSet<(usize, usize)> = BTreeSet::new();
        loop {
            let candidates: Vec<usize> = pool.iter().copied().filter(|i| !chosen.contains(i)).collect();
            let gains: Vec<f64> = candidates
                .iter()
                .map(|&i| rejections[i].difference(&covered).count() as f64)
                .collect();
            if gains.iter().all(|&g| g == 0.0) {
                break;
            }
            let pick = candidates[weighted_index(&gains, &mut rng)];
            let gain = rejections[pick].difference(&covered).count() as f64;
            let h = mean_weight(&chosen);
            let mut grown = chosen.clone();
            grown.push(pick);
            let denom = (k_hat - covered.len() as f64) * (h - mean_weight(&grown));
            let score = if denom > 0.0 { gain * h / denom } else { 0.0 };
            let eps: f64 = rng.random();
            if score > eps {
                chosen = grown;
                covered.extend(rejections[pick].iter().copied());
            } else {
                break;
            }
        }
        let objective = (1.0 - covered.len() as f64 / k_hat) * mean_weight(&chosen);
        let spread = mean_entropy(&chosen);
        restarts.push((ids(model, &chosen), objective));
        // Equal objectives (typically 0 once every pair is covered) go to the lower
        // mean entropy in nats, then to the earlier restart.
        let better = best
            .as_ref()
            .is_none_or(|(_, b, bs)| objective.total_cmp(b).then(spread.total_cmp(bs)) == std::cmp::Ordering::Less);
        if better {
            best = Some((chosen, objective, spread));
        }
    }

    let (chosen, objective, _) = best.expect("at least one restart");
    let mut out = model.clone();
    out.active_set = model
        .relations
        .iter()
        .enumerate()
        .filter(|(i, _)| chosen.contains(i))
        .map(|(_, r)| r.reference.clone())
        .collect();
    out.minimized = true;
    out.objective = Some(objective);
    out.validate()?;
    Ok(Assembly { model: out, restarts })
}

fn ids(model: &PlacementModel, chosen: &[usize]) -> Vec<String> {
    chosen.iter().map(|&i| model.relations[i].reference.clone()).collect()
}

/// Index drawn with probability proportional to `weights`; uniform if all are zero.
fn weighted_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return rng.random_range(0..weights.len());
    }
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// `size` distinct indices drawn sequentially proportional to `weights`, in ascending order.
fn weighted_subset<R: Rng + ?Sized>(weights: &[f64], size: usize, rng: &mut R) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..weights.len()).collect();
    let mut out = Vec::with_capacity(size);
    while out.len() < size && !remaining.is_empty() {
        let w: Vec<f64> = remaining.iter().map(|&i| weights[i]).collect();
        out.push(remaining.remove(weighted_index(&w, rng)));
    }
    out.sort_unstable();
    out
}

/// Minimizes every model of a set. Each model gets its own seed derived from
/// `params.seed` and its step index, so the result does not depend on the thread count.
pub fn minimize_model_set(
    set: &ModelSet,
    train_scenes: &[SceneState],
    params: &MinimizationParams,
) -> Result<ModelSet> {
    let models = set
        .models
        .par_iter()
        .map(|m| {
            let p = MinimizationParams {
                seed: params
                    .seed
                    .wrapping_add((m.step_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
                ..*params
            };
            assemble_active_set(m, train_scenes, &p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelSet {
        schema_version: set.schema_version,
        map_kind: set.map_kind,
        config: set.config,
        models,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::CovarianceEstimator;
    use crate::maps::CategoryMap;
    use crate::placement::{fit_placement_model, FitConfig, ModelVariant};
    use crate::scene::testing::object;
    use crate::se3::testing::{pose_distance, random_pose};
    use crate::se3::{rotation_from_euler, so3_exp, EncodingKind};
    use nalgebra::Vector3;

    fn config() -> FitConfig {
        FitConfig {
            variant: ModelVariant::Bidirectional,
            encoding: EncodingKind::AxisAngle,
            estimator: CovarianceEstimator::Ridge,
        }
    }

    /// The placed object follows `a` with small jitter; `a2` (when requested) shares
    /// `a`'s pose; distractors are uniform over a box with random orientation.
    fn causal_scenes(rng: &mut ChaCha8Rng, n: usize, distractors: usize, twin: bool) -> Vec<SceneState> {
        let rel = Pose::new(rotation_from_euler(0.0, 0.0, 0.6), Vector3::new(0.3, -0.1, 0.05));
        (0..n)
            .map(|_| {
                let a = Pose::new(
                    rotation_from_euler(0.0, 0.0, rng.random_range(-3.0..3.0)),
                    Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 0.0),
                );
                let jitter = Pose::new(
                    so3_exp(&Vector3::new(0.0, 0.0, rng.random_range(-0.02..0.02))),
                    Vector3::new(rng.random_range(-0.01..0.01), rng.random_range(-0.01..0.01), 0.0),
                );
                let m = CategoryMap::identity();
                let mut objects = vec![object("a", "table", a, m)];
                if twin {
                    objects.push(object("a2", "table", a, m));
                }
                for d in 0..distractors {
                    let p = Pose::new(
                        crate::se3::testing::random_pose(rng, 1.0).rotation().to_owned(),
                        Vector3::new(
                            rng.random_range(-1.5..1.5),
                            rng.random_range(-1.5..1.5),
                            rng.random_range(0.0..1.0),
                        ),
                    );
                    objects.push(object(&format!("d{d}"), "box", p, m));
                }
                objects.push(object("p", "cup", a.compose(&rel).compose(&jitter), m));
                SceneState::new(objects, vec!["p".into()]).unwrap()
            })
            .collect()
    }

    #[test]
    fn self_transplant_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let scenes = causal_scenes(&mut rng, 5, 3, false);
        let m = fit_placement_model(&scenes, "p", config()).unwrap();
        let samples = augment_observations(&scenes, &m, "d0").unwrap();
        assert_eq!(samples.len(), 25);
        for s in samples.iter().filter(|s| s.source_scene == s.target_scene) {
            let gt = scenes[s.source_scene].pose("p").unwrap();
            let (dt, dr) = pose_distance(&s.transplanted_pose, &gt);
            assert!(dt < 1e-12 && dr < 1e-12, "{dt} {dr}");
            // Self-transplant densities are those of the training observation.
            let local = relative_pose(&scenes[s.source_scene], "a", "p", Direction::ReferenceToPlaced).unwrap();
            let direct = m.relation("a").unwrap().forward.log_density(&local);
            assert!((s.log_densities["a"] - direct).abs() < 1e-12);
            assert!(s.density("a").unwrap() >= 0.0);
        }
    }

    #[test]
    fn rigidly_related_scenes_have_unit_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = causal_scenes(&mut rng, 1, 2, false).remove(0);
        let scenes: Vec<SceneState> = (0..5).map(|_| base.transformed(&random_pose(&mut rng, 3.0))).collect();
        let m = fit_placement_model(&scenes, "p", config()).unwrap();
        let samples = augment_observations(&scenes, &m, "d1").unwrap();
        let own: HashMap<usize, &AugmentedSample> = samples
            .iter()
            .filter(|s| s.source_scene == s.target_scene)
            .map(|s| (s.source_scene, s))
            .collect();
        for s in &samples {
            for (id, l) in &s.log_densities {
                let ratio = (l - own[&s.source_scene].log_densities[id]).exp();
                assert!((ratio - 1.0).abs() < 1e-9, "{id}: {ratio}");
            }
        }
    }

    #[test]
    fn causal_reference_rejects_cross_transplants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let scenes = causal_scenes(&mut rng, 5, 1, true);
        let m = fit_placement_model(&scenes, "p", config()).unwrap();
        let samples = augment_observations(&scenes, &m, "d0").unwrap();
        let own: HashMap<usize, f64> = samples
            .iter()
            .filter(|s| s.source_scene == s.target_scene)
            .map(|s| (s.source_scene, s.log_densities["a"]))
            .collect();
        for s in samples.iter().filter(|s| s.source_scene != s.target_scene) {
            assert!(own[&s.source_scene] - s.log_densities["a"] > 10f64.ln());
        }
        let all_cross: BTreeSet<(usize, usize)> = (0..5)
            .flat_map(|i| (0..5).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        assert_eq!(rejection_set(&samples, "a", 0.1).unwrap(), all_cross);
        assert!(rejection_set(&samples, "a", 1e-300).unwrap().len() <= all_cross.len());

        // A reference carrying the same information as the root rejects nothing.
        let redundant = augment_observations(&scenes, &m, "a").unwrap();
        assert!(rejection_set(&redundant, "a2", 0.1).unwrap().is_empty());
        assert!(rejection_set(&samples, "a", 0.0).unwrap().is_empty());
        assert!(matches!(
            rejection_set(&samples, "zz", 0.1),
            Err(Error::MissingObject(_))
        ));
    }

    #[test]
    fn single_reference_is_kept() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let scenes = causal_scenes(&mut rng, 5, 0, false);
        let m = fit_placement_model(&scenes, "p", config()).unwrap();
        let out = assemble_active_set(&m, &scenes, &MinimizationParams::default()).unwrap();
        assert_eq!(out.active_set, vec!["a"]);
        assert!(out.minimized);
        assert_eq!(out.relations, m.relations);
    }

    #[test]
    fn causal_reference_survives_minimization() {
        let mut hits = 0;
        let mut total_size = 0;
        let trials = 50;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let scenes = causal_scenes(&mut rng, 5, 5, false);
            let m = fit_placement_model(&scenes, "p", config()).unwrap();
            let params = MinimizationParams {
                seed,
                ..MinimizationParams::default()
            };
            let out = assemble_active_set(&m, &scenes, &params).unwrap();
            hits += out.active_set.contains(&"a".to_string()) as usize;
            total_size += out.active_set.len();
        }
        assert!(hits * 10 >= trials as usize * 9, "{hits}/{trials}");
        assert!((total_size as f64 / trials as f64) < 6.0);
    }

    #[test]
    fn redundant_twins_keep_one() {
        let trials = 50;
        let mut exactly_one = 0;
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
            let scenes = causal_scenes(&mut rng, 5, 2, true);
            let m = fit_placement_model(&scenes, "p", config()).unwrap();
            let out = assemble_active_set(
                &m,
                &scenes,
                &MinimizationParams {
                    seed,
                    ..Default::default()
                },
            )
            .unwrap();
            let n = out.active_set.iter().filter(|id| id.starts_with('a')).count();
            exactly_one += (n == 1) as usize;
        }
        assert!(exactly_one * 10 >= trials as usize * 8, "{exactly_one}/{trials}");
    }

    #[test]
    fn returned_model_has_the_best_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let scenes = causal_scenes(&mut rng, 5, 4, false);
        let m = fit_placement_model(&scenes, "p", config()).unwrap();
        let a = assemble_active_set_detailed(
            &m,
            &scenes,
            &MinimizationParams {
                seed: 3,
                ..Default::default()
            },
        )
        .unwrap();
        let best = a.model.objective.unwrap();
        assert_eq!(a.restarts.len(), 16);
        assert!(a.restarts.iter().all(|(set, obj)| best <= *obj && !set.is_empty()));
        assert!(!a.model.active_set.is_empty());
        let again = assemble_active_set(
            &m,
            &scenes,
            &MinimizationParams {
                seed: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(again, a.model);
    }

    #[test]
    fn invalid_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let scenes = causal_scenes(&mut rng, 5, 1, false);
        let m = fit_placement_model(&scenes, "p", config()).unwrap();
        for p in [
            MinimizationParams {
                alpha: 0.0,
                ..Default::default()
            },
            MinimizationParams {
                alpha: 1.0,
                ..Default::default()
            },
            MinimizationParams {
                restarts: 0,
                ..Default::default()
            },
        ] {
            assert!(assemble_active_set(&m, &scenes, &p).is_err());
        }
        assert!(matches!(
            augment_observations(&scenes, &m, "nope"),
            Err(Error::MissingObject(_))
        ));
    }
}
