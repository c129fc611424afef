//! Built-in desk-scale suite and instance directories.
//!
//! An instance directory holds an `instance.toml` manifest plus one
//! transform-data file per task. The built-in constants ship in exactly this
//! layout under `data/suite-v1/` and are compiled into the library, so an
//! external instance directory is a drop-in replacement.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::transform::parse_transform_data;
use super::{BaseFunction, FrontShape, InstanceDefinition, ProblemError, TaskDefinition};
use crate::space::TaskSpace;

pub const SUITE_VERSION: &str = "suite-v1";

pub const BUILTIN_NAMES: [&str; 9] = [
    "CIHS", "CIMS", "CILS", "PIHS", "PIMS", "PILS", "NIHS", "NIMS", "NILS",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskManifest {
    pub base: String,
    pub shape: String,
    pub dimension: usize,
    pub tail_lower: f64,
    pub tail_upper: f64,
    pub transform: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceManifest {
    pub name: String,
    #[serde(default)]
    pub suite_version: Option<String>,
    pub intersection: String,
    pub similarity: String,
    pub tasks: Vec<TaskManifest>,
}

impl InstanceManifest {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ProblemError> {
        toml::from_str(text).map_err(|e| ProblemError::Manifest {
            path: origin.to_string(),
            message: e.to_string(),
        })
    }

    /// Builds the instance, fetching transform files through `read`.
    pub fn build<F>(&self, mut read: F) -> Result<InstanceDefinition, ProblemError>
    where
        F: FnMut(&str) -> Result<String, ProblemError>,
    {
        if self.tasks.len() < 2 {
            return Err(ProblemError::InvalidInstance(format!(
                "{}: an instance needs at least two tasks",
                self.name
            )));
        }
        let category = (self.intersection.parse()?, self.similarity.parse()?);
        let tasks = self
            .tasks
            .iter()
            .map(|t| {
                let transform = parse_transform_data(&read(&t.transform)?, t.dimension)?;
                let mut lower = vec![0.0];
                let mut upper = vec![1.0];
                lower.resize(t.dimension, t.tail_lower);
                upper.resize(t.dimension, t.tail_upper);
                TaskDefinition::new(
                    TaskSpace::new(lower, upper, 2)?,
                    t.shape.parse::<FrontShape>()?,
                    t.base.parse::<BaseFunction>()?,
                    transform.shift,
                    transform.rotation,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        InstanceDefinition::new(self.name.clone(), category, tasks)
    }
}

/// Loads an instance from a directory containing `instance.toml`.
pub fn load_instance_dir(dir: &Path) -> Result<InstanceDefinition, ProblemError> {
    let manifest_path = dir.join("instance.toml");
    let read_file = |p: &Path| {
        std::fs::read_to_string(p).map_err(|e| ProblemError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        })
    };
    let manifest = InstanceManifest::parse(
        &read_file(&manifest_path)?,
        &manifest_path.display().to_string(),
    )?;
    manifest.build(|file| read_file(&dir.join(file)))
}

macro_rules! builtin_files {
    ($($name:literal),* $(,)?) => {
        [$(
            (
                $name,
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/suite-v1/", $name, "/instance.toml")),
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/suite-v1/", $name, "/task1.txt")),
                include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/suite-v1/", $name, "/task2.txt")),
            ),
        )*]
    };
}

const BUILTIN_FILES: [(&str, &str, &str, &str); 9] = builtin_files!(
    "CIHS", "CIMS", "CILS", "PIHS", "PIMS", "PILS", "NIHS", "NIMS", "NILS",
);

pub fn builtin_instance(name: &str) -> Result<InstanceDefinition, ProblemError> {
    let (_, manifest, task1, task2) = BUILTIN_FILES
        .iter()
        .find(|(n, ..)| *n == name)
        .ok_or_else(|| ProblemError::UnknownInstance(name.to_string()))?;
    let files: HashMap<&str, &str> = [("task1.txt", *task1), ("task2.txt", *task2)].into();
    let origin = format!("{SUITE_VERSION}/{name}/instance.toml");
    InstanceManifest::parse(manifest, &origin)?.build(|file| {
        files
            .get(file)
            .map(|s| s.to_string())
            .ok_or_else(|| ProblemError::Io {
                path: format!("{SUITE_VERSION}/{name}/{file}"),
                message: "not bundled".into(),
            })
    })
}

/// The nine built-in instances, in canonical order.
pub fn build_builtin_suite() -> Vec<InstanceDefinition> {
    BUILTIN_NAMES
        .iter()
        .map(|name| builtin_instance(name).expect("bundled suite data is valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Intersection, Similarity};

    fn category_of(name: &str) -> Option<(Intersection, Similarity)> {
        Some((name[..2].parse().ok()?, name[2..].parse().ok()?))
    }

    #[test]
    fn suite_has_nine_uniquely_named_instances() {
        let suite = build_builtin_suite();
        let names: Vec<&str> = suite.iter().map(|i| i.name()).collect();
        assert_eq!(names, BUILTIN_NAMES);
        for inst in &suite {
            assert_eq!(inst.task_count(), 2);
            assert_eq!(inst.unified_dimension(), 10);
            assert_eq!(Some(inst.category()), category_of(inst.name()));
        }
    }

    #[test]
    fn unknown_builtin() {
        assert_eq!(
            builtin_instance("XXHS"),
            Err(ProblemError::UnknownInstance("XXHS".into()))
        );
    }

    #[test]
    fn manifest_rejects_unknown_keys() {
        let text = "name = \"X\"\nintersection = \"CI\"\nsimilarity = \"HS\"\ncolour = 1\ntasks = []\n";
        assert!(matches!(
            InstanceManifest::parse(text, "x"),
            Err(ProblemError::Manifest { .. })
        ));
    }

    #[test]
    fn directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let (_, manifest, t1, t2) = BUILTIN_FILES[4];
        std::fs::write(dir.path().join("instance.toml"), manifest).unwrap();
        std::fs::write(dir.path().join("task1.txt"), t1).unwrap();
        std::fs::write(dir.path().join("task2.txt"), t2).unwrap();
        let loaded = load_instance_dir(dir.path()).unwrap();
        assert_eq!(loaded, builtin_instance("PIMS").unwrap());
        std::fs::remove_file(dir.path().join("task2.txt")).unwrap();
        assert!(matches!(load_instance_dir(dir.path()), Err(ProblemError::Io { .. })));
    }
}
