//! Object catalog and demonstration records.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::borrow::Borrow;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Token reserved for the empty-box state. It can never be an object id.
pub const START_TOKEN: &str = "<start>";

/// Short identifier of a packable object, e.g. `cracker_box`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ObjectId(String);

impl TryFrom<String> for ObjectId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        Self::new(s)
    }
}

impl From<ObjectId> for String {
    fn from(id: ObjectId) -> Self {
        id.0
    }
}

impl ObjectId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidCatalog("empty object id".into()));
        }
        if id == START_TOKEN {
            return Err(Error::InvalidCatalog(format!("`{START_TOKEN}` is reserved")));
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for ObjectId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for ObjectId {
    /// Panics on an empty or reserved id; use [`ObjectId::new`] for untrusted input.
    fn from(s: &str) -> Self {
        Self::new(s).expect("valid object id")
    }
}

/// Axis-aligned bounding box (width, depth, height) in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub width: f64,
    pub depth: f64,
    pub height: f64,
}

impl BBox {
    pub fn new(width: f64, depth: f64, height: f64) -> Self {
        Self { width, depth, height }
    }

    pub fn volume(&self) -> f64 {
        self.width * self.depth * self.height
    }

    fn is_positive(&self) -> bool {
        // NaN fails every comparison, so it is rejected too.
        self.width > 0.0 && self.depth > 0.0 && self.height > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectSpec {
    pub id: ObjectId,
    pub name: String,
    pub bbox: BBox,
}

impl ObjectSpec {
    pub fn volume(&self) -> f64 {
        self.bbox.volume()
    }
}

/// The universe of packable objects, kept sorted by id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ObjectCatalog {
    objects: Vec<ObjectSpec>,
}

impl ObjectCatalog {
    pub fn new(mut objects: Vec<ObjectSpec>) -> Result<Self> {
        objects.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in objects.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::InvalidCatalog(format!("duplicate object id `{}`", pair[0].id)));
            }
        }
        if let Some(bad) = objects.iter().find(|o| !o.bbox.is_positive()) {
            return Err(Error::InvalidCatalog(format!(
                "object `{}` has a non-positive bounding box dimension",
                bad.id
            )));
        }
        Ok(Self { objects })
    }

    pub fn objects(&self) -> &[ObjectSpec] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ObjectSpec> {
        self.objects
            .binary_search_by(|o| o.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.objects[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.get(id).is_some()
    }

    pub fn ids(&self) -> impl Iterator<Item = &ObjectId> {
        self.objects.iter().map(|o| &o.id)
    }

    /// Summed bounding-box volume of a set of objects. Unknown ids count as zero.
    pub fn total_volume<'a>(&self, ids: impl IntoIterator<Item = &'a ObjectId>) -> f64 {
        ids.into_iter().filter_map(|id| self.get(id.as_str())).map(ObjectSpec::volume).sum()
    }
}

/// Inner dimensions of the packing container.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContainerSpec {
    pub inner: BBox,
}

impl ContainerSpec {
    pub fn new(width: f64, depth: f64, height: f64) -> Result<Self> {
        let inner = BBox::new(width, depth, height);
        if !inner.is_positive() {
            return Err(Error::InvalidContainer("dimensions must be strictly positive".into()));
        }
        Ok(Self { inner })
    }

    pub fn volume(&self) -> f64 {
        self.inner.volume()
    }
}

/// Final pose of one packed object. `x`/`y` are normalized top-down box
/// coordinates, `z` is the height in meters and the Euler angles are degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub object_id: ObjectId,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    #[serde(default)]
    pub rx: f64,
    #[serde(default)]
    pub ry: f64,
    #[serde(default)]
    pub rz: f64,
}

/// One packed scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Demonstration {
    pub scene_id: String,
    pub participant_id: String,
    pub duration_s: f64,
    pub sequence: Vec<ObjectId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placements: Option<Vec<PlacementRecord>>,
}

impl Demonstration {
    /// Checks the record's own invariants and its references into `catalog`.
    pub fn validate(&self, catalog: &ObjectCatalog) -> Result<()> {
        let invalid = |reason: String| Error::InvalidDemonstration {
            scene: self.scene_id.clone(),
            reason,
        };
        if self.sequence.is_empty() {
            return Err(invalid("empty sequence".into()));
        }
        if !(self.duration_s >= 0.0) || !self.duration_s.is_finite() {
            return Err(invalid(format!("invalid duration {}", self.duration_s)));
        }
        let mut seen = BTreeSet::new();
        for id in &self.sequence {
            if !seen.insert(id) {
                return Err(invalid(format!("object `{id}` appears twice in the sequence")));
            }
            if !catalog.contains(id.as_str()) {
                return Err(Error::UnknownObject {
                    scene: self.scene_id.clone(),
                    object: id.to_string(),
                });
            }
        }
        if let Some(placements) = &self.placements {
            if placements.len() != self.sequence.len() {
                return Err(invalid(format!(
                    "{} placements for {} packed objects",
                    placements.len(),
                    self.sequence.len()
                )));
            }
            for (step, (p, id)) in placements.iter().zip(&self.sequence).enumerate() {
                if &p.object_id != id {
                    return Err(invalid(format!(
                        "placement {step} is for `{}` but step packs `{id}`",
                        p.object_id
                    )));
                }
                if !(0.0..=1.0).contains(&p.x) || !(0.0..=1.0).contains(&p.y) || !(p.z >= 0.0) {
                    return Err(invalid(format!("placement {step} outside the box")));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn object_set(&self) -> BTreeSet<ObjectId> {
        self.sequence.iter().cloned().collect()
    }
}

/// Validates every demonstration against the catalog, stopping at the first error.
pub fn validate_all(demos: &[Demonstration], catalog: &ObjectCatalog) -> Result<()> {
    demos.iter().try_for_each(|d| d.validate(catalog))
}

/// Counts how many demonstrations include each object.
pub fn object_frequencies(demos: &[Demonstration]) -> BTreeMap<ObjectId, usize> {
    let mut freq = BTreeMap::new();
    for id in demos.iter().flat_map(|d| &d.sequence) {
        *freq.entry(id.to_owned()).or_insert(0) += 1;
    }
    freq
}
