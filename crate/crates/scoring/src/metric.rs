use tablebench_core::{cube_vertices, BoundingBox, Pose};

/// Mean displacement of the object's 8 error-cube vertices between two poses, in cm.
///
/// The cube edge is the mean bounding-box dimension and the cube is centered
/// on the model origin, so the result mixes translational and rotational
/// error at the scale of the object itself.
pub fn ede(bbox: &BoundingBox, target: &Pose, solution: &Pose) -> f64 {
    let sum: f64 = cube_vertices(bbox)
        .iter()
        .map(|&p| (target.apply(p) - solution.apply(p)).norm())
        .sum();
    sum / 8.0
}
