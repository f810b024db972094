//! Scene file parsing.

use crate::error::CliError;
use enclosure::geometry::{Point2, Polygon, Scene};
use enclosure::Error;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// On-disk scene description. Unknown keys are rejected.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub obstacles: Vec<Vec<[f64; 2]>>,
    pub center: [f64; 2],
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    pub source: [f64; 2],
    pub k: f64,
}

fn point(p: [f64; 2]) -> Point2 {
    Point2::new(p[0], p[1])
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<SceneFile, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Config(format!("scene parse error at line {}, column {}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<SceneFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read scene file {}: {e}", path.display())))?;
        SceneFile::parse(&text)
    }

    /// Validated scene. A source on the measurement circle is reported as
    /// such before the generic geometry checks.
    pub fn to_scene(&self) -> Result<Scene, CliError> {
        let (center, source) = (point(self.center), point(self.source));
        let gap = (source.dist(center) - self.r).abs();
        if self.r > 0.0 && gap <= 1e-9 * self.r {
            return Err(Error::SourceOnCircle { distance: gap }.into());
        }
        let obstacles = self
            .obstacles
            .iter()
            .enumerate()
            .map(|(i, vs)| Polygon::new(vs.iter().copied().map(point).collect()).map_err(|e| e.context(&format!("obstacle {i}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Scene::new(obstacles, center, self.r, self.r1, source, self.k)?)
    }
}
