use tablebench_core::{BoundingBox, Pose, Vec3};

/// Oriented box in the table frame.
///
/// Model frames put the origin at the center of the bottom face, so a pose
/// with translation z = table height rests the object on the table whatever
/// its sampled size.
#[derive(Debug, Clone, Copy)]
pub struct Obb {
    pub center: Vec3,
    pub axes: [Vec3; 3],
    pub half: [f64; 3],
}

impl Obb {
    pub fn from_pose(bbox: &BoundingBox, pose: &Pose) -> Obb {
        let m = pose.rotation.matrix();
        let axes = [
            Vec3::new(m[(0, 0)], m[(1, 0)], m[(2, 0)]),
            Vec3::new(m[(0, 1)], m[(1, 1)], m[(2, 1)]),
            Vec3::new(m[(0, 2)], m[(1, 2)], m[(2, 2)]),
        ];
        let center = pose.apply(Vec3::new(0.0, 0.0, bbox.height / 2.0));
        Obb {
            center,
            axes,
            half: [bbox.length / 2.0, bbox.width / 2.0, bbox.height / 2.0],
        }
    }

    /// Half-extent of the box along a unit direction.
    pub fn support(&self, dir: Vec3) -> f64 {
        (0..3)
            .map(|i| self.axes[i].dot(&dir).abs() * self.half[i])
            .sum()
    }

    pub fn corners(&self) -> [Vec3; 8] {
        let mut out = [Vec3::zeros(); 8];
        for (i, corner) in out.iter_mut().enumerate() {
            let sx = if i & 4 == 0 { -1.0 } else { 1.0 };
            let sy = if i & 2 == 0 { -1.0 } else { 1.0 };
            let sz = if i & 1 == 0 { -1.0 } else { 1.0 };
            *corner = self.center
                + self.axes[0] * (sx * self.half[0])
                + self.axes[1] * (sy * self.half[1])
                + self.axes[2] * (sz * self.half[2]);
        }
        out
    }

    pub fn min_z(&self) -> f64 {
        self.center.z - self.support(Vec3::z())
    }

    pub fn max_z(&self) -> f64 {
        self.center.z + self.support(Vec3::z())
    }

    /// True if the point lies inside the box shrunk by `margin` on every side.
    pub fn contains_eroded(&self, p: Vec3, margin: f64) -> bool {
        let d = p - self.center;
        (0..3).all(|i| d.dot(&self.axes[i]).abs() <= self.half[i] - margin)
    }
}

/// All 15 separating-axis candidates for a box pair.
fn axis_candidates(a: &Obb, b: &Obb) -> [Vec3; 15] {
    let mut axes = [Vec3::zeros(); 15];
    axes[..3].copy_from_slice(&a.axes);
    axes[3..6].copy_from_slice(&b.axes);
    let mut k = 6;
    for i in 0..3 {
        for j in 0..3 {
            axes[k] = a.axes[i].cross(&b.axes[j]);
            k += 1;
        }
    }
    axes
}

/// Separating-axis overlap: None when some axis separates the boxes, else
/// the smallest overlap across all axes, which for boxes is the minimum
/// translation distance needed to separate them.
pub fn penetration_depth(a: &Obb, b: &Obb) -> Option<f64> {
    let delta = b.center - a.center;
    let mut depth = f64::INFINITY;
    for axis in axis_candidates(a, b) {
        let norm = axis.norm();
        if norm < 1e-9 {
            continue;
        }
        let u = axis / norm;
        let overlap = a.support(u) + b.support(u) - delta.dot(&u).abs();
        if overlap <= 0.0 {
            return None;
        }
        depth = depth.min(overlap);
    }
    Some(depth)
}

/// Gap between two boxes along their best separating axis; negative when
/// they overlap on every axis.
pub fn separation_distance(a: &Obb, b: &Obb) -> f64 {
    let delta = b.center - a.center;
    let mut best = f64::NEG_INFINITY;
    for axis in axis_candidates(a, b) {
        let norm = axis.norm();
        if norm < 1e-9 {
            continue;
        }
        let u = axis / norm;
        best = best.max(delta.dot(&u).abs() - a.support(u) - b.support(u));
    }
    best
}

/// Convex hull of 2D points, counter-clockwise (monotone chain).
pub fn convex_hull(mut points: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    points.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    points.dedup();
    if points.len() <= 2 {
        return points;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(points.len() + 1);
    for &p in &points {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in points.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Clips a polygon to a convex counter-clockwise region (Sutherland-Hodgman).
pub fn clip_polygon(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut output = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let inside =
            |p: [f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0.0;
        let intersect = |p: [f64; 2], q: [f64; 2]| {
            let d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
            let d2 = (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]);
            let t = d1 / (d1 - d2);
            [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
        };
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let current = input[j];
            let next = input[(j + 1) % input.len()];
            match (inside(current), inside(next)) {
                (true, true) => output.push(next),
                (true, false) => output.push(intersect(current, next)),
                (false, true) => {
                    output.push(intersect(current, next));
                    output.push(next);
                }
                (false, false) => {}
            }
        }
    }
    output
}

/// Unsigned polygon area (shoelace).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        twice += p[0] * q[1] - q[0] * p[1];
    }
    twice.abs() / 2.0
}

/// Convex hull of the box corners projected to the table plane.
pub fn footprint(obb: &Obb) -> Vec<[f64; 2]> {
    convex_hull(obb.corners().iter().map(|c| [c.x, c.y]).collect())
}

/// Fraction of the child's footprint area that lies over the supporter's.
pub fn footprint_overlap_ratio(child: &Obb, supporter: &Obb) -> f64 {
    let child_fp = footprint(child);
    let child_area = polygon_area(&child_fp);
    if child_area <= 0.0 {
        return 0.0;
    }
    let overlap = clip_polygon(&child_fp, &footprint(supporter));
    polygon_area(&overlap) / child_area
}
