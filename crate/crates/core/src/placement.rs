//! Joint placement models combining pairwise distributions against every
//! reference object present at a placement step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::CovarianceEstimator;
use crate::maps::{canonicalize_relative_pose, CategoryMap, MapKind};
use crate::pairwise::{fit_pairwise, Direction, RelativePoseDistribution};
use crate::scene::SceneState;
use crate::se3::{EncodingKind, Pose};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelVariant {
    Unidirectional,
    #[default]
    Bidirectional,
}

impl ModelVariant {
    pub fn tag(self) -> &'static str {
        match self {
            ModelVariant::Unidirectional => "uni",
            ModelVariant::Bidirectional => "bi",
        }
    }
}

impl std::str::FromStr for ModelVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uni" | "unidirectional" => Ok(ModelVariant::Unidirectional),
            "bi" | "bidirectional" => Ok(ModelVariant::Bidirectional),
            _ => Err(Error::InvalidInput(format!("unknown model variant {s:?}"))),
        }
    }
}

impl std::fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub reference: String,
    pub forward: RelativePoseDistribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reverse: Option<RelativePoseDistribution>,
}

impl Relation {
    /// Entropy used to rank this relation: that of the forward distribution.
    pub fn entropy(&self) -> f64 {
        self.forward.entropy()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementModel {
    pub placed_object: String,
    pub placed_category: String,
    pub step_index: usize,
    pub variant: ModelVariant,
    pub relations: Vec<Relation>,
    pub minimized: bool,
    pub active_set: Vec<String>,
    /// Final-pick objective reached by minimization.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
}

/// Options shared by every model fitted from one dataset.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitConfig {
    pub variant: ModelVariant,
    pub encoding: EncodingKind,
    pub estimator: CovarianceEstimator,
}

/// Fits the placement model of `placed` against every object present at its step.
pub fn fit_placement_model(train_scenes: &[SceneState], placed: &str, config: FitConfig) -> Result<PlacementModel> {
    if train_scenes.len() < 2 {
        return Err(Error::InsufficientScenes {
            needed: 2,
            found: train_scenes.len(),
        });
    }
    let first = &train_scenes[0];
    let references = first.references_for(placed)?;
    if references.is_empty() {
        return Err(Error::InvalidInput(format!("{placed} has no reference objects")));
    }
    let mut relations = Vec::with_capacity(references.len());
    for reference in &references {
        let forward = fit_pairwise(
            train_scenes,
            reference,
            placed,
            Direction::ReferenceToPlaced,
            config.encoding,
            config.estimator,
        )?;
        let reverse = match config.variant {
            ModelVariant::Unidirectional => None,
            ModelVariant::Bidirectional => Some(fit_pairwise(
                train_scenes,
                reference,
                placed,
                Direction::PlacedToReference,
                config.encoding,
                config.estimator,
            )?),
        };
        relations.push(Relation {
            reference: reference.clone(),
            forward,
            reverse,
        });
    }
    Ok(PlacementModel {
        placed_object: placed.to_string(),
        placed_category: first.object(placed)?.category.clone(),
        step_index: first.step_of(placed).unwrap_or(0),
        variant: config.variant,
        relations,
        minimized: false,
        active_set: references,
        objective: None,
    })
}

impl PlacementModel {
    pub fn validate(&self) -> Result<()> {
        if self.active_set.is_empty() {
            return Err(Error::InvalidInput(format!("{}: empty active set", self.placed_object)));
        }
        for id in &self.active_set {
            self.relation(id)?;
        }
        for r in &self.relations {
            r.forward.validate()?;
            match (&r.reverse, self.variant) {
                (Some(rev), _) => rev.validate()?,
                (None, ModelVariant::Bidirectional) => {
                    return Err(Error::InvalidInput(format!(
                        "{}: bidirectional relation to {} lacks a reverse distribution",
                        self.placed_object, r.reference
                    )))
                }
                (None, ModelVariant::Unidirectional) => {}
            }
        }
        Ok(())
    }

    pub fn relation(&self, reference: &str) -> Result<&Relation> {
        self.relations
            .iter()
            .find(|r| r.reference == reference)
            .ok_or_else(|| Error::MissingObject(reference.to_string()))
    }

    pub fn reference_ids(&self) -> Vec<String> {
        self.relations.iter().map(|r| r.reference.clone()).collect()
    }

    /// Copy with a different active set.
    pub fn with_active_set(&self, active: Vec<String>) -> Result<Self> {
        let mut m = self.clone();
        m.active_set = active;
        m.validate()?;
        Ok(m)
    }

    pub fn scorer<'a>(&'a self, scene: &SceneState) -> Result<Scorer<'a>> {
        Scorer::new(self, scene)
    }
}

/// Sum of active-reference log densities of `candidate` as the placed object's world pose.
pub fn joint_log_score(model: &PlacementModel, scene: &SceneState, candidate: &Pose) -> Result<f64> {
    Ok(model.scorer(scene)?.score(candidate))
}

/// Per-term data resolved against one scene.
#[derive(Clone, Debug)]
pub(crate) struct Term<'a> {
    pub reference: &'a str,
    pub ref_pose: Pose,
    pub ref_inv: Pose,
    pub ref_map: CategoryMap,
    pub forward: &'a RelativePoseDistribution,
    pub reverse: Option<&'a RelativePoseDistribution>,
}

/// A placement model bound to the reference poses and maps of one scene.
#[derive(Clone, Debug)]
pub struct Scorer<'a> {
    pub(crate) terms: Vec<Term<'a>>,
    placed_map: CategoryMap,
}

impl<'a> Scorer<'a> {
    fn new(model: &'a PlacementModel, scene: &SceneState) -> Result<Self> {
        let placed_map = scene.object(&model.placed_object)?.map;
        let mut terms = Vec::with_capacity(model.active_set.len());
        for id in &model.active_set {
            let relation = model.relation(id)?;
            let obj = scene.object(id)?;
            terms.push(Term {
                reference: &relation.reference,
                ref_pose: obj.pose,
                ref_inv: obj.pose.inverse(),
                ref_map: obj.map,
                forward: &relation.forward,
                reverse: match model.variant {
                    ModelVariant::Bidirectional => relation.reverse.as_ref(),
                    ModelVariant::Unidirectional => None,
                },
            });
        }
        Ok(Self { terms, placed_map })
    }

    fn forward_term(&self, t: &Term<'_>, candidate: &Pose) -> f64 {
        let rel = t.ref_inv.compose(candidate);
        t.forward.log_density(&canonicalize_relative_pose(&t.ref_map, &rel))
    }

    fn reverse_term(&self, t: &Term<'_>, candidate: &Pose) -> Option<f64> {
        t.reverse.map(|rev| {
            let rel = candidate.inverse().compose(&t.ref_pose);
            rev.log_density(&canonicalize_relative_pose(&self.placed_map, &rel))
        })
    }

    pub fn score(&self, candidate: &Pose) -> f64 {
        self.terms
            .iter()
            .map(|t| self.forward_term(t, candidate) + self.reverse_term(t, candidate).unwrap_or(0.0))
            .sum()
    }

    /// `(reference, forward, reverse)` log densities per active reference.
    pub fn term_scores(&self, candidate: &Pose) -> Vec<(String, f64, Option<f64>)> {
        self.terms
            .iter()
            .map(|t| {
                (
                    t.reference.to_string(),
                    self.forward_term(t, candidate),
                    self.reverse_term(t, candidate),
                )
            })
            .collect()
    }
}

/// Per-object placement models fitted on one training split, in placement order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSet {
    pub schema_version: u32,
    pub map_kind: MapKind,
    pub config: FitConfig,
    pub models: Vec<PlacementModel>,
}

impl ModelSet {
    /// Fits one model per entry of the scenes' placement order.
    pub fn fit(train_scenes: &[SceneState], map_kind: MapKind, config: FitConfig) -> Result<Self> {
        let first = train_scenes
            .first()
            .ok_or(Error::InsufficientScenes { needed: 2, found: 0 })?;
        let models = first
            .placement_order
            .iter()
            .map(|placed| fit_placement_model(train_scenes, placed, config))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            schema_version: MODEL_SCHEMA_VERSION,
            map_kind,
            config,
            models,
        })
    }

    pub fn model(&self, placed: &str) -> Result<&PlacementModel> {
        self.models
            .iter()
            .find(|m| m.placed_object == placed)
            .ok_or_else(|| Error::MissingModel(placed.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::SchemaVersionMismatch {
                expected: MODEL_SCHEMA_VERSION,
                found: self.schema_version,
            });
        }
        self.models.iter().try_for_each(PlacementModel::validate)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let found = value.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if found != MODEL_SCHEMA_VERSION {
            return Err(Error::SchemaVersionMismatch {
                expected: MODEL_SCHEMA_VERSION,
                found,
            });
        }
        let set: ModelSet = serde_json::from_value(value)?;
        set.validate()?;
        Ok(set)
    }
}
