//! Scene state: objects with world poses and category maps plus the placement order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::CategoryMap;
use crate::se3::Pose;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: String,
    pub category: String,
    pub pose: Pose,
    pub map: CategoryMap,
}

/// Objects of one scene. Objects not listed in `placement_order` are static and
/// always available as references.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneState {
    pub objects: Vec<SceneObject>,
    pub placement_order: Vec<String>,
}

impl SceneState {
    pub fn new(objects: Vec<SceneObject>, placement_order: Vec<String>) -> Result<Self> {
        let scene = Self {
            objects,
            placement_order,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, o) in self.objects.iter().enumerate() {
            if self.objects[..i].iter().any(|p| p.id == o.id) {
                return Err(Error::InvalidInput(format!("duplicate object id {}", o.id)));
            }
        }
        for (i, id) in self.placement_order.iter().enumerate() {
            self.object(id)?;
            if self.placement_order[..i].contains(id) {
                return Err(Error::InvalidInput(format!("{id} placed twice")));
            }
        }
        Ok(())
    }

    pub fn object(&self, id: &str) -> Result<&SceneObject> {
        self.objects
            .iter()
            .find(|o| o.id == id)
            .ok_or_else(|| Error::MissingObject(id.to_string()))
    }

    pub fn object_mut(&mut self, id: &str) -> Result<&mut SceneObject> {
        self.objects
            .iter_mut()
            .find(|o| o.id == id)
            .ok_or_else(|| Error::MissingObject(id.to_string()))
    }

    pub fn pose(&self, id: &str) -> Result<Pose> {
        Ok(self.object(id)?.pose)
    }

    pub fn set_pose(&mut self, id: &str, pose: Pose) -> Result<()> {
        self.object_mut(id)?.pose = pose;
        Ok(())
    }

    pub fn step_of(&self, id: &str) -> Option<usize> {
        self.placement_order.iter().position(|p| p == id)
    }

    /// Static objects in scene order.
    pub fn static_ids(&self) -> Vec<String> {
        self.objects
            .iter()
            .filter(|o| self.step_of(&o.id).is_none())
            .map(|o| o.id.clone())
            .collect()
    }

    /// Objects present when `placed` is placed: every static object, then the
    /// objects placed before it.
    pub fn references_for(&self, placed: &str) -> Result<Vec<String>> {
        self.object(placed)?;
        let step = self
            .step_of(placed)
            .ok_or_else(|| Error::InvalidInput(format!("{placed} is not in the placement order")))?;
        let mut refs = self.static_ids();
        refs.extend(self.placement_order[..step].iter().cloned());
        Ok(refs)
    }

    /// Applies `g` on the left of every object pose.
    pub fn transformed(&self, g: &Pose) -> Self {
        let mut out = self.clone();
        for o in &mut out.objects {
            o.pose = g.compose(&o.pose);
        }
        out
    }
}
