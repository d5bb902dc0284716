use std::collections::BTreeMap;
use std::fmt;

use tablebench_core::{SceneConfiguration, TaskObject};

use crate::error::SceneGenError;
use crate::geometry::{footprint_overlap_ratio, penetration_depth, Obb};

/// Rectangular table region; objects live between `z0` (the surface) and `z_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Workspace {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z0: f64,
    pub z_max: f64,
}

impl Workspace {
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        z0: f64,
        z_max: f64,
    ) -> Result<Self, SceneGenError> {
        let vals = [x_min, x_max, y_min, y_max, z0, z_max];
        if vals.iter().any(|v| !v.is_finite()) || x_max <= x_min || y_max <= y_min || z_max <= z0 {
            return Err(SceneGenError::BadWorkspace);
        }
        Ok(Workspace {
            x_min,
            x_max,
            y_min,
            y_max,
            z0,
            z_max,
        })
    }
}

/// Knobs for generation and validity checking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationConfig {
    pub seed: u64,
    pub max_rejections: u32,
    /// Boxes may interpenetrate up to this depth, cm.
    pub clearance_tol: f64,
    /// A bottom face within this distance of a surface counts as resting, cm.
    pub support_tol: f64,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            seed: 0,
            max_rejections: 64,
            clearance_tol: 0.1,
            support_tol: 0.5,
        }
    }
}

/// A supported object rests on the table or on exactly one named object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Support {
    Table,
    OnInstance(String),
}

/// One way a scene fails the validity rules.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Interpenetration {
        a: String,
        b: String,
        depth_cm: f64,
    },
    Unsupported {
        instance_id: String,
    },
    OutOfBounds {
        instance_id: String,
    },
    AdjacencyTooFar {
        parent: String,
        child: String,
        distance_cm: f64,
    },
    WrongSupporter {
        child: String,
        expected_parent: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Interpenetration { a, b, depth_cm } => {
                write!(f, "'{a}' and '{b}' interpenetrate by {depth_cm:.3} cm")
            }
            Violation::Unsupported { instance_id } => {
                write!(f, "'{instance_id}' is not resting on anything")
            }
            Violation::OutOfBounds { instance_id } => {
                write!(f, "'{instance_id}' extends outside the workspace")
            }
            Violation::AdjacencyTooFar {
                parent,
                child,
                distance_cm,
            } => write!(
                f,
                "'{child}' is {distance_cm:.3} cm from '{parent}', too far to be adjacent"
            ),
            Violation::WrongSupporter {
                child,
                expected_parent,
            } => write!(f, "'{child}' is not resting on '{expected_parent}'"),
        }
    }
}

/// Everything validity checking learned about one scene.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOutcome {
    pub violations: Vec<Violation>,
    /// What each supported object rests on.
    pub supporters: BTreeMap<String, Support>,
}

impl ValidationOutcome {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Objects must overlap a supporter's footprint by at least this fraction.
pub const SUPPORT_OVERLAP_MIN: f64 = 0.25;

/// Slack for the containment check, cm; resting contact sits exactly on a bound.
const BOUNDS_EPS: f64 = 1e-9;

/// Checks a full scene: pairwise interpenetration beyond `clearance_tol`,
/// support for every object, and containment in the workspace. All
/// violations are reported, not just the first.
pub fn validate_scene(
    config: &SceneConfiguration,
    objects: &[TaskObject],
    workspace: &Workspace,
    cfg: &GenerationConfig,
) -> Result<ValidationOutcome, SceneGenError> {
    let mut boxes: Vec<(&str, Obb)> = Vec::with_capacity(objects.len());
    for obj in objects {
        let pose = config
            .get(&obj.instance_id)
            .ok_or_else(|| SceneGenError::MissingPose(obj.instance_id.clone()))?;
        boxes.push((obj.instance_id.as_str(), Obb::from_pose(&obj.bbox, pose)));
    }
    boxes.sort_by(|a, b| a.0.cmp(b.0));

    let mut violations = Vec::new();
    let mut supporters = BTreeMap::new();

    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            if let Some(depth) = penetration_depth(&boxes[i].1, &boxes[j].1) {
                if depth > cfg.clearance_tol {
                    violations.push(Violation::Interpenetration {
                        a: boxes[i].0.to_string(),
                        b: boxes[j].0.to_string(),
                        depth_cm: depth,
                    });
                }
            }
        }
    }

    for (id, obb) in &boxes {
        match find_support(id, obb, &boxes, workspace, cfg) {
            Some(support) => {
                supporters.insert(id.to_string(), support);
            }
            None => violations.push(Violation::Unsupported {
                instance_id: id.to_string(),
            }),
        }
        let contained = obb.corners().iter().all(|c| {
            c.x >= workspace.x_min - BOUNDS_EPS
                && c.x <= workspace.x_max + BOUNDS_EPS
                && c.y >= workspace.y_min - BOUNDS_EPS
                && c.y <= workspace.y_max + BOUNDS_EPS
                && c.z >= workspace.z0 - BOUNDS_EPS
                && c.z <= workspace.z_max + BOUNDS_EPS
        });
        if !contained {
            violations.push(Violation::OutOfBounds {
                instance_id: id.to_string(),
            });
        }
    }

    Ok(ValidationOutcome {
        violations,
        supporters,
    })
}

/// Table support wins; otherwise the object with the largest footprint
/// overlap whose top is within `support_tol` of this object's bottom,
/// smallest id on ties.
fn find_support(
    id: &str,
    obb: &Obb,
    boxes: &[(&str, Obb)],
    workspace: &Workspace,
    cfg: &GenerationConfig,
) -> Option<Support> {
    let bottom = obb.min_z();
    if (bottom - workspace.z0).abs() <= cfg.support_tol {
        return Some(Support::Table);
    }
    let mut best: Option<(f64, &str)> = None;
    for (other_id, other) in boxes {
        if *other_id == id || (bottom - other.max_z()).abs() > cfg.support_tol {
            continue;
        }
        let ratio = footprint_overlap_ratio(obb, other);
        if ratio >= SUPPORT_OVERLAP_MIN && best.map_or(true, |(r, _)| ratio > r) {
            best = Some((ratio, other_id));
        }
    }
    best.map(|(_, supporter)| Support::OnInstance(supporter.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tablebench_core::{BoundingBox, Pose, Vec3};

    fn object(id: &str, l: f64, w: f64, h: f64) -> TaskObject {
        TaskObject {
            instance_id: id.to_string(),
            model_id: format!("m-{id}"),
            category: "box".to_string(),
            bbox: BoundingBox::new(l, w, h).unwrap(),
        }
    }

    fn workspace() -> Workspace {
        Workspace::new(0.0, 80.0, 0.0, 60.0, 0.0, 60.0).unwrap()
    }

    fn at(x: f64, y: f64, z: f64) -> Pose {
        Pose::from_translation(Vec3::new(x, y, z))
    }

    #[test]
    fn workspace_rejects_empty_extents() {
        assert!(Workspace::new(0.0, 0.0, 0.0, 1.0, 0.0, 1.0).is_err());
        assert!(Workspace::new(0.0, 1.0, 0.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn cube_on_the_table_is_valid() {
        let objects = vec![object("a", 4.0, 4.0, 4.0)];
        let mut config = SceneConfiguration::new();
        config.set("a", at(40.0, 30.0, 0.0));
        let outcome = validate_scene(
            &config,
            &objects,
            &workspace(),
            &GenerationConfig::default(),
        )
        .unwrap();
        assert!(outcome.is_valid(), "{:?}", outcome.violations);
        assert_eq!(outcome.supporters["a"], Support::Table);
    }

    #[test]
    fn coincident_cubes_interpenetrate() {
        let objects = vec![object("a", 4.0, 4.0, 4.0), object("b", 4.0, 4.0, 4.0)];
        let mut config = SceneConfiguration::new();
        config.set("a", at(40.0, 30.0, 0.0));
        config.set("b", at(40.0, 30.0, 0.0));
        let outcome = validate_scene(
            &config,
            &objects,
            &workspace(),
            &GenerationConfig::default(),
        )
        .unwrap();
        assert!(outcome.violations.iter().any(
            |v| matches!(v, Violation::Interpenetration { a, b, .. } if a == "a" && b == "b")
        ));
    }

    #[test]
    fn floating_cube_is_unsupported() {
        let objects = vec![object("a", 4.0, 4.0, 4.0)];
        let mut config = SceneConfiguration::new();
        config.set("a", at(40.0, 30.0, 5.0));
        let outcome = validate_scene(
            &config,
            &objects,
            &workspace(),
            &GenerationConfig::default(),
        )
        .unwrap();
        assert_eq!(
            outcome.violations,
            vec![Violation::Unsupported {
                instance_id: "a".to_string()
            }]
        );
    }

    #[test]
    fn stacked_cube_names_its_supporter() {
        let objects = vec![
            object("base", 10.0, 10.0, 5.0),
            object("top", 4.0, 4.0, 4.0),
        ];
        let mut config = SceneConfiguration::new();
        config.set("base", at(40.0, 30.0, 0.0));
        config.set("top", at(42.0, 30.0, 5.0));
        let outcome = validate_scene(
            &config,
            &objects,
            &workspace(),
            &GenerationConfig::default(),
        )
        .unwrap();
        assert!(outcome.is_valid(), "{:?}", outcome.violations);
        assert_eq!(
            outcome.supporters["top"],
            Support::OnInstance("base".to_string())
        );
    }

    #[test]
    fn sliver_overlap_does_not_count_as_support() {
        // Child hangs off the edge with under a quarter of its footprint over
        // the base: 4-wide child at x offset 3.5 overlaps 0.5 of 4.
        let objects = vec![
            object("base", 10.0, 10.0, 5.0),
            object("top", 4.0, 4.0, 4.0),
        ];
        let mut config = SceneConfiguration::new();
        config.set("base", at(40.0, 30.0, 0.0));
        config.set("top", at(46.5, 30.0, 5.0));
        let outcome = validate_scene(
            &config,
            &objects,
            &workspace(),
            &GenerationConfig::default(),
        )
        .unwrap();
        assert!(outcome
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Unsupported { instance_id } if instance_id == "top")));
    }

    #[test]
    fn quarter_overlap_is_just_enough() {
        // 4-wide child at x offset 3 overlaps 1 of 4 = 25%.
        let objects = vec![
            object("base", 10.0, 10.0, 5.0),
            object("top", 4.0, 4.0, 4.0),
        ];
        let mut config = SceneConfiguration::new();
        config.set("base", at(40.0, 30.0, 0.0));
        config.set("top", at(46.0, 30.0, 5.0));
        let outcome = validate_scene(
            &config,
            &objects,
            &workspace(),
            &GenerationConfig::default(),
        )
        .unwrap();
        assert_eq!(
            outcome.supporters["top"],
            Support::OnInstance("base".to_string())
        );
    }

    #[test]
    fn protruding_cube_is_out_of_bounds() {
        let objects = vec![object("a", 4.0, 4.0, 4.0)];
        let mut config = SceneConfiguration::new();
        config.set("a", at(79.0, 30.0, 0.0));
        let outcome = validate_scene(
            &config,
            &objects,
            &workspace(),
            &GenerationConfig::default(),
        )
        .unwrap();
        assert!(outcome
            .violations
            .iter()
            .any(|v| matches!(v, Violation::OutOfBounds { instance_id } if instance_id == "a")));
    }

    #[test]
    fn all_violations_are_reported_together() {
        let objects = vec![object("a", 4.0, 4.0, 4.0), object("b", 4.0, 4.0, 4.0)];
        let mut config = SceneConfiguration::new();
        config.set("a", at(79.0, 30.0, 3.0));
        config.set("b", at(79.0, 30.0, 3.0));
        let outcome = validate_scene(
            &config,
            &objects,
            &workspace(),
            &GenerationConfig::default(),
        )
        .unwrap();
        assert!(outcome.violations.len() >= 4, "{:?}", outcome.violations);
    }

    #[test]
    fn missing_pose_is_an_error() {
        let objects = vec![object("a", 4.0, 4.0, 4.0)];
        let config = SceneConfiguration::new();
        assert!(matches!(
            validate_scene(
                &config,
                &objects,
                &workspace(),
                &GenerationConfig::default()
            ),
            Err(SceneGenError::MissingPose(id)) if id == "a"
        ));
    }

    #[test]
    fn touching_neighbors_are_valid() {
        let objects = vec![object("a", 4.0, 4.0, 4.0), object("b", 4.0, 4.0, 4.0)];
        let mut config = SceneConfiguration::new();
        config.set("a", at(40.0, 30.0, 0.0));
        config.set("b", at(44.0, 30.0, 0.0));
        let outcome = validate_scene(
            &config,
            &objects,
            &workspace(),
            &GenerationConfig::default(),
        )
        .unwrap();
        assert!(outcome.is_valid(), "{:?}", outcome.violations);
    }
}
