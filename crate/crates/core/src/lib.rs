pub mod dataset;
pub mod error;
pub mod eval;
pub mod gaussian;
pub mod inference;
pub mod maps;
pub mod minimize;
pub mod moments;
pub mod pairwise;
pub mod placement;
pub mod scene;
pub mod se3;

pub use dataset::{generate_dataset, load_dataset, save_dataset, GeneratedScene, SceneSet, SceneTemplate};
pub use error::{Error, Result};
pub use eval::{run_sweep, EvalConfig, EvalReport};
pub use gaussian::{fit_gaussian, CovarianceEstimator, GaussianModel};
pub use inference::{infer_pose, InferenceParams, InferenceResult};
pub use maps::{fit_orthogonal, fit_uniform, CategoryMap, FeatureCloud, MapKind, ObjectCategory, Symmetry};
pub use minimize::{assemble_active_set, minimize_model_set, MinimizationParams};
pub use moments::{estimate_pose_and_scale, MomentEstimate};
pub use pairwise::{fit_pairwise, relative_pose, RelativePoseDistribution};
pub use placement::{fit_placement_model, FitConfig, ModelSet, ModelVariant, PlacementModel};
pub use scene::{SceneObject, SceneState};
pub use se3::{compose, decode, encode, geodesic_angle_deg, invert, EncodingKind, Pose, PoseVector};
