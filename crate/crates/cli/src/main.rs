//! Command line front end: generate datasets, fit and minimize placement models,
//! run inference and evaluation sweeps.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use relplace::dataset::{builtin_template, generate_dataset_with, GeneratorOptions, ScaleVariation, TEMPLATE_NAMES};
use relplace::eval::{evaluate_model_set, run_sweep, EvalConfig, EvalReport};
use relplace::{
    estimate_pose_and_scale, infer_pose, load_dataset, minimize_model_set, save_dataset, CovarianceEstimator,
    EncodingKind, FitConfig, InferenceParams, MapKind, MinimizationParams, ModelSet, ModelVariant, SceneTemplate,
};

#[derive(Parser)]
#[command(name = "relplace", version, about = "Few-shot relative object placement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Estimator {
    Shrinkage,
    Ridge,
}

impl From<Estimator> for CovarianceEstimator {
    fn from(e: Estimator) -> Self {
        match e {
            Estimator::Shrinkage => CovarianceEstimator::Shrinkage,
            Estimator::Ridge => CovarianceEstimator::Ridge,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Scaling {
    PerAxis,
    Isotropic,
    None,
}

#[derive(clap::Args)]
struct InferArgs {
    /// Initial candidate count.
    #[arg(long, default_value_t = InferenceParams::default().initial_samples)]
    samples: usize,
    /// Candidates drawn per refinement round.
    #[arg(long, default_value_t = InferenceParams::default().refine_samples)]
    refine_samples: usize,
    #[arg(long, default_value_t = InferenceParams::default().top_k)]
    top_k: usize,
    #[arg(long, default_value_t = InferenceParams::default().max_rounds)]
    max_rounds: usize,
    #[arg(long, default_value_t = 0)]
    infer_seed: u64,
}

impl InferArgs {
    fn params(&self) -> InferenceParams {
        InferenceParams {
            initial_samples: self.samples,
            refine_samples: self.refine_samples,
            top_k: self.top_k,
            max_rounds: self.max_rounds,
            seed: self.infer_seed,
            ..InferenceParams::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scene set from a template.
    Gen {
        /// Built-in template name, or a template JSON file.
        #[arg(long)]
        template: String,
        #[arg(long, default_value_t = 10)]
        variations: usize,
        #[arg(long, default_value_t = 0)]
        distractors: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "per-axis")]
        scaling: Scaling,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit one placement model per placed object on the training split.
    Fit {
        #[arg(long)]
        scenes: PathBuf,
        #[arg(long, default_value = "aa")]
        encoding: EncodingKind,
        #[arg(long, default_value = "ortho")]
        map: MapKind,
        #[arg(long, default_value = "bi")]
        model: ModelVariant,
        #[arg(long, value_enum, default_value = "shrinkage")]
        estimator: Estimator,
        /// Use only the first N training scenes.
        #[arg(long)]
        train_count: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prune each model's references to a small active set.
    Minimize {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        scenes: PathBuf,
        #[arg(long, default_value_t = MinimizationParams::default().alpha)]
        alpha: f64,
        #[arg(long, default_value_t = MinimizationParams::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        train_count: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict the pose of one object given everything placed before it.
    Infer {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        scenes: PathBuf,
        /// Scene index in the set.
        #[arg(long)]
        scene: usize,
        #[arg(long)]
        object: String,
        #[command(flatten)]
        inference: InferArgs,
    },
    /// Evaluate a saved model set, or fit and evaluate a grid of conditions.
    Eval {
        /// Scene sets; each contributes its own test split.
        #[arg(long, required = true, num_args = 1..)]
        scenes: Vec<PathBuf>,
        /// Saved model set. Without it the grid options below are swept.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        n_steps: usize,
        #[arg(long, value_delimiter = ',', default_value = "aa")]
        encodings: Vec<EncodingKind>,
        #[arg(long, value_delimiter = ',', default_value = "ortho")]
        maps: Vec<MapKind>,
        #[arg(long, value_delimiter = ',', default_value = "bi")]
        models: Vec<ModelVariant>,
        #[arg(long, value_delimiter = ',', default_value = "false")]
        minimized: Vec<bool>,
        #[arg(long, value_delimiter = ',', default_value = "5")]
        train_counts: Vec<usize>,
        #[arg(long, value_enum, default_value = "shrinkage")]
        estimator: Estimator,
        #[arg(long, default_value_t = 0)]
        minimize_seed: u64,
        #[command(flatten)]
        inference: InferArgs,
        /// Per-scene rows.
        #[arg(long)]
        csv: PathBuf,
        /// Per-condition summary plus rows.
        #[arg(long)]
        json: PathBuf,
    },
    /// Estimate pose and uniform scale of an object from its feature points by moments.
    EstimatePose {
        #[arg(long)]
        scenes: PathBuf,
        #[arg(long)]
        scene: usize,
        #[arg(long)]
        object: String,
    },
    /// List the built-in templates.
    Templates,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load_template(name: &str) -> Result<SceneTemplate> {
    if TEMPLATE_NAMES.contains(&name) {
        return Ok(builtin_template(name)?);
    }
    let path = Path::new(name);
    if !path.exists() {
        bail!(
            "`{name}` is neither a built-in template ({}) nor a file",
            TEMPLATE_NAMES.join(", ")
        );
    }
    SceneTemplate::load(path).with_context(|| format!("loading template {name}"))
}

fn load_models(path: &Path) -> Result<ModelSet> {
    ModelSet::load(path).with_context(|| format!("loading models {}", path.display()))
}

fn load_scenes(path: &Path) -> Result<relplace::SceneSet> {
    load_dataset(path).with_context(|| format!("loading scenes {}", path.display()))
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen {
            template,
            variations,
            distractors,
            seed,
            scaling,
            out,
        } => {
            let template = load_template(&template)?;
            let options = GeneratorOptions {
                scale_variation: match scaling {
                    Scaling::PerAxis => ScaleVariation::PerAxis,
                    Scaling::Isotropic => ScaleVariation::Isotropic,
                    Scaling::None => ScaleVariation::None,
                },
                ..GeneratorOptions::default()
            };
            let set = generate_dataset_with(&template, variations, distractors, seed, options)?;
            save_dataset(&set, &out)?;
            eprintln!(
                "wrote {} scenes ({} train / {} test) to {}",
                set.scenes.len(),
                set.split.train.len(),
                set.split.test.len(),
                out.display()
            );
        }
        Command::Fit {
            scenes,
            encoding,
            map,
            model,
            estimator,
            train_count,
            out,
        } => {
            let set = load_scenes(&scenes)?;
            let train = set.train_states(map)?;
            let k = train_count.unwrap_or(train.len());
            if k > train.len() {
                bail!("only {} training scenes available", train.len());
            }
            let config = FitConfig {
                variant: model,
                encoding,
                estimator: estimator.into(),
            };
            let models = ModelSet::fit(&train[..k], map, config)?;
            models.save(&out)?;
            eprintln!("wrote {} models to {}", models.models.len(), out.display());
        }
        Command::Minimize {
            model,
            scenes,
            alpha,
            restarts,
            seed,
            train_count,
            out,
        } => {
            let models = load_models(&model)?;
            let set = load_scenes(&scenes)?;
            let train = set.train_states(models.map_kind)?;
            let k = train_count.unwrap_or(train.len()).min(train.len());
            let params = MinimizationParams {
                alpha,
                restarts,
                seed,
                ..MinimizationParams::default()
            };
            let minimized = minimize_model_set(&models, &train[..k], &params)?;
            minimized.save(&out)?;
            for m in &minimized.models {
                eprintln!(
                    "{}: {} of {} references, objective {:.4}",
                    m.placed_object,
                    m.active_set.len(),
                    m.relations.len(),
                    m.objective.unwrap_or(f64::NAN)
                );
            }
        }
        Command::Infer {
            model,
            scenes,
            scene,
            object,
            inference,
        } => {
            let models = load_models(&model)?;
            let set = load_scenes(&scenes)?;
            let state = set.scene_state(scene, models.map_kind)?;
            let result = infer_pose(models.model(&object)?, &state, &inference.params())?;
            let truth = set
                .scenes
                .get(scene)
                .map(|s| s.object(&object))
                .transpose()?
                .map(|o| o.pose);
            print_json(&json!({
                "object": object,
                "pose": result.pose,
                "log_score": result.log_score,
                "rounds_used": result.rounds_used,
                "ground_truth": truth,
            }))?;
        }
        Command::Eval {
            scenes,
            model,
            n_steps,
            encodings,
            maps,
            models,
            minimized,
            train_counts,
            estimator,
            minimize_seed,
            inference,
            csv,
            json,
        } => {
            let mut report = EvalReport::new(Vec::new());
            let saved = model.as_deref().map(load_models).transpose()?;
            for path in &scenes {
                let set = load_scenes(path)?;
                let part = match &saved {
                    Some(m) => {
                        let k = train_counts.first().copied().unwrap_or(set.split.train.len());
                        evaluate_model_set(m, &set, k, n_steps, &inference.params())?
                    }
                    None => {
                        let config = EvalConfig {
                            n_steps,
                            encodings: encodings.clone(),
                            maps: maps.clone(),
                            variants: models.clone(),
                            minimized: minimized.clone(),
                            train_counts: train_counts.clone(),
                            estimator: estimator.into(),
                            inference: inference.params(),
                            minimization: MinimizationParams {
                                seed: minimize_seed,
                                ..MinimizationParams::default()
                            },
                        };
                        run_sweep(&config, &set)?
                    }
                };
                report.extend(part);
            }
            report.write(&csv, &json)?;
            for s in report.summary() {
                let c = &s.condition;
                eprintln!(
                    "{} d={} {}/{}/{} min={} k={} n={}: position {:.2} %, angle {:.2} deg over {} scenes",
                    c.template,
                    c.distractors,
                    c.map,
                    c.encoding,
                    c.variant,
                    c.minimized,
                    c.train_count,
                    c.n_steps,
                    s.position_error_pct,
                    s.angular_error_deg,
                    s.scenes
                );
            }
        }
        Command::EstimatePose { scenes, scene, object } => {
            let set = load_scenes(&scenes)?;
            let generated = set
                .scenes
                .get(scene)
                .with_context(|| format!("scene index {scene} out of range"))?;
            let obj = generated.object(&object)?;
            let category = set.category(&obj.category)?;
            let map = obj.ground_truth_map()?;
            let cloud = category.instance_cloud(&obj.pose, &map);
            let est = estimate_pose_and_scale(&cloud, category)?;
            print_json(&json!({
                "object": object,
                "pose": est.pose,
                "scales": est.map.scales().as_slice(),
                "flipped": est.flipped,
                "ground_truth_pose": obj.pose,
                "ground_truth_scales": map.scales().as_slice(),
            }))?;
        }
        Command::Templates => {
            for name in TEMPLATE_NAMES {
                let t = builtin_template(name)?;
                writeln!(std::io::stdout(), "{name}: {}", t.placement_order().join(" "))?;
            }
        }
    }
    Ok(())
}
