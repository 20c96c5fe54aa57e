//! Planar intercept geometry.
//!
//! Circle/ray points of intersection, sector entry/exit windows, arrival
//! times, finite-difference velocity estimation, and constant-velocity
//! projectile lead solving. Distances are in km, times in seconds, angles
//! in radians.
//!
//! Lines are represented parametrically as origin + t * unit direction
//! rather than slope/intercept form, so north/south tracks need no special
//! casing; the slope form is recoverable as `m = dy/dx`,
//! `c = origin.y - m * origin.x` whenever `dx != 0`.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

/// Discriminant magnitude (km²) below which a circle/ray crossing is
/// treated as a tangency and reported as a single point.
pub const TANGENCY_TOL: f64 = 1e-12;

const PARALLEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    /// A direction vector of (near-)zero length cannot be normalized.
    #[error("direction vector has zero length")]
    ZeroDirection,
    /// Speed is zero or negative: the mover never arrives.
    #[error("target never closes on the point (speed <= 0)")]
    NonClosingTarget,
    /// Velocity estimation needs strictly increasing sample timestamps.
    #[error("track history timestamps must be strictly increasing")]
    InvalidHistory,
}

/// A point in the ground plane, km.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

/// A planar vector, km (or km/s when used as a velocity).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Vec2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, rhs: Vec2) -> f64 {
        self.x * rhs.x + self.y * rhs.y
    }

    /// z-component of the 3D cross product; positive when `rhs` lies
    /// counter-clockwise of `self`.
    pub fn cross(self, rhs: Vec2) -> f64 {
        self.x * rhs.y - self.y * rhs.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(self) -> Result<Vec2, GeometryError> {
        let n = self.norm();
        if n < PARALLEL_TOL {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(self / n)
    }

    /// Bearing of this vector, atan2 convention, normalized to [0, 2π).
    pub fn bearing(self) -> f64 {
        self.y.atan2(self.x).rem_euclid(TAU)
    }
}

impl Add<Vec2> for Point2 {
    type Output = Point2;
    fn add(self, v: Vec2) -> Point2 {
        Point2::new(self.x + v.x, self.y + v.y)
    }
}

impl Sub for Point2 {
    type Output = Vec2;
    fn sub(self, rhs: Point2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A defended-asset footprint or weapon range circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Self {
        debug_assert!(radius > 0.0, "circle radius must be positive");
        Self { center, radius }
    }

    pub fn contains(&self, p: Point2) -> bool {
        (p - self.center).norm_sq() <= self.radius * self.radius
    }
}

/// A half-line: origin plus unit direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    origin: Point2,
    direction: Vec2,
}

impl Ray {
    /// Builds a ray, normalizing `direction`. Fails on zero direction.
    pub fn new(origin: Point2, direction: Vec2) -> Result<Self, GeometryError> {
        Ok(Self {
            origin,
            direction: direction.normalized()?,
        })
    }

    pub fn from_points(from: Point2, toward: Point2) -> Result<Self, GeometryError> {
        Self::new(from, toward - from)
    }

    pub fn origin(&self) -> Point2 {
        self.origin
    }

    pub fn direction(&self) -> Vec2 {
        self.direction
    }

    /// Point a signed distance `t` km along the ray.
    pub fn point_at(&self, t: f64) -> Point2 {
        self.origin + self.direction * t
    }
}

/// An armed arc: range circle plus angular field of fire.
///
/// A bearing `b` (seen from the circle center) is inside the sector when
/// `(b - start_angle) mod 2π <= sweep_angle`. A sweep of 2π covers the
/// whole circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub circle: Circle,
    pub start_angle: f64,
    pub sweep_angle: f64,
}

impl Sector {
    pub fn new(circle: Circle, start_angle: f64, sweep_angle: f64) -> Self {
        debug_assert!(sweep_angle > 0.0 && sweep_angle <= TAU);
        Self {
            circle,
            start_angle: start_angle.rem_euclid(TAU),
            sweep_angle,
        }
    }

    pub fn full_circle(circle: Circle) -> Self {
        Self::new(circle, 0.0, TAU)
    }

    pub fn contains_bearing(&self, bearing: f64) -> bool {
        (bearing - self.start_angle).rem_euclid(TAU) <= self.sweep_angle
    }

    /// Membership test: inside the range circle and at an in-sector
    /// bearing. The center itself is considered contained.
    pub fn contains_point(&self, p: Point2) -> bool {
        let w = p - self.circle.center;
        if w.norm_sq() > self.circle.radius * self.circle.radius {
            return false;
        }
        if w.norm_sq() < PARALLEL_TOL {
            return true;
        }
        self.contains_bearing(w.bearing())
    }
}

/// One circle/ray intersection: signed distance along the ray plus the
/// point itself. Negative `ray_t` marks a point behind the ray origin;
/// threat-facing callers discard those to tell "already inside" from
/// "approaching".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub ray_t: f64,
    pub point: Point2,
}

/// Points of intersection between a circle and the full line carrying a
/// ray, sorted by signed distance along the ray. Zero, one (tangency), or
/// two hits; an empty result is a valid outcome, not an error.
pub fn circle_line_poi(circle: &Circle, ray: &Ray) -> Vec<RayHit> {
    let oc = ray.origin() - circle.center;
    // |oc + t d|^2 = r^2 with d unit: t^2 + 2 (d . oc) t + |oc|^2 - r^2 = 0
    let b = 2.0 * ray.direction().dot(oc);
    let c = oc.norm_sq() - circle.radius * circle.radius;
    let disc = b * b - 4.0 * c;

    if disc.abs() < TANGENCY_TOL {
        let t = -b / 2.0;
        return vec![RayHit {
            ray_t: t,
            point: ray.point_at(t),
        }];
    }
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // Stable form: compute the larger-magnitude root first.
    let q = if b >= 0.0 {
        -0.5 * (b + sq)
    } else {
        -0.5 * (b - sq)
    };
    let (t1, t2) = (q, c / q);
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    vec![
        RayHit {
            ray_t: lo,
            point: ray.point_at(lo),
        },
        RayHit {
            ray_t: hi,
            point: ray.point_at(hi),
        },
    ]
}

/// Straight-line distance between two points, km.
pub fn euclidean_distance(a: Point2, b: Point2) -> f64 {
    (a - b).norm()
}

/// Arrival time over `distance` at `speed`. Speed at or below zero means
/// the mover never arrives and callers must treat the pair as
/// non-threatening.
pub fn time_to_point(distance: f64, speed: f64) -> Result<f64, GeometryError> {
    if speed <= 0.0 {
        return Err(GeometryError::NonClosingTarget);
    }
    Ok(distance / speed)
}

/// Finite-difference velocity from the last two timestamped samples:
/// componentwise (p_t - p_{t-1}) / Δt, plus its norm as the speed.
pub fn estimate_velocity(
    earlier: (f64, Point2),
    later: (f64, Point2),
) -> Result<(Vec2, f64), GeometryError> {
    let dt = later.0 - earlier.0;
    if dt <= 0.0 {
        return Err(GeometryError::InvalidHistory);
    }
    let v = (later.1 - earlier.1) / dt;
    Ok((v, v.norm()))
}

/// The first forward window in which a ray-following target is inside a
/// sector. Times are seconds from the ray origin at `target_speed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorCrossing {
    pub entry: Point2,
    pub exit: Point2,
    pub entry_time: f64,
    pub exit_time: f64,
}

/// Clips the in-circle segment of `ray` to bearings inside the sector (as
/// seen from the sector center) and returns the first such window at or
/// after the ray origin, with entry/exit times per `time_to_point`.
///
/// Returns `None` when the clipped segment is empty or lies entirely
/// behind the ray origin. When the origin is already inside the sector the
/// entry is the origin itself (entry_time 0).
///
/// A chord can cross the sector's angular span in two disjoint runs when
/// the sweep exceeds π; only the first run is reported — it is the window
/// in which the target first becomes engageable.
pub fn sector_intercept(sector: &Sector, ray: &Ray, target_speed: f64) -> Option<SectorCrossing> {
    if target_speed <= 0.0 {
        return None;
    }
    let hits = circle_line_poi(&sector.circle, ray);
    let (chord_lo, chord_hi) = match hits.len() {
        2 => (hits[0].ray_t, hits[1].ray_t),
        1 => (hits[0].ray_t, hits[0].ray_t),
        _ => return None,
    };
    let lo = chord_lo.max(0.0);
    let hi = chord_hi;
    if hi < lo {
        return None;
    }

    // Candidate breakpoints: chord ends, the two angular boundaries, and
    // the closest approach to the center (where bearing flips if the line
    // passes through it). Membership is decided at midpoints, so spurious
    // candidates are harmless.
    let center = sector.circle.center;
    let oc = ray.origin() - center;
    let d = ray.direction();
    let mut cuts = vec![lo, hi];
    for angle in [
        sector.start_angle,
        sector.start_angle + sector.sweep_angle,
    ] {
        let u = Vec2::new(angle.cos(), angle.sin());
        let denom = d.cross(u);
        if denom.abs() > PARALLEL_TOL {
            // cross(oc + t d, u) = 0
            let t = -oc.cross(u) / denom;
            if t > lo && t < hi {
                cuts.push(t);
            }
        }
    }
    let t_closest = -oc.dot(d);
    if t_closest > lo && t_closest < hi {
        cuts.push(t_closest);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < PARALLEL_TOL);

    let in_sector = |t: f64| {
        let w = ray.point_at(t) - center;
        w.norm_sq() < PARALLEL_TOL || sector.contains_bearing(w.bearing())
    };

    if cuts.len() == 1 {
        // Degenerate window (tangency, or chord entirely behind origin
        // except its far end).
        let t = cuts[0];
        return in_sector(t).then(|| SectorCrossing {
            entry: ray.point_at(t),
            exit: ray.point_at(t),
            entry_time: t / target_speed,
            exit_time: t / target_speed,
        });
    }

    // Scan consecutive sub-intervals; take the first contiguous in-sector
    // run.
    let mut entry_t: Option<f64> = None;
    let mut exit_t = 0.0;
    for pair in cuts.windows(2) {
        let mid = 0.5 * (pair[0] + pair[1]);
        if in_sector(mid) {
            if entry_t.is_none() {
                entry_t = Some(pair[0]);
            }
            exit_t = pair[1];
        } else if entry_t.is_some() {
            break;
        }
    }
    let entry_t = entry_t?;
    Some(SectorCrossing {
        entry: ray.point_at(entry_t),
        exit: ray.point_at(exit_t),
        entry_time: entry_t / target_speed,
        exit_time: exit_t / target_speed,
    })
}

/// A solved constant-velocity lead: fire from `launch_point` at the
/// solution time of flight and the projectile meets the target at
/// `impact_point`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterceptSolution {
    pub time_of_flight: f64,
    pub launch_point: Point2,
    pub impact_point: Point2,
}

const MIN_TOF: f64 = 1e-9;

/// Smallest t > 0 with |target_pos + target_vel·t − shooter| =
/// projectile_speed·t, i.e. the quadratic
/// (|v|² − s²)·t² + 2(d·v)·t + |d|² = 0 with d = target_pos − shooter.
/// `None` when no positive root exists (the target outruns the shot).
pub fn solve_intercept(
    target_pos: Point2,
    target_vel: Vec2,
    shooter: Point2,
    projectile_speed: f64,
) -> Option<InterceptSolution> {
    if projectile_speed <= 0.0 {
        return None;
    }
    let d = target_pos - shooter;
    let a = target_vel.norm_sq() - projectile_speed * projectile_speed;
    let b = 2.0 * d.dot(target_vel);
    let c = d.norm_sq();

    let mut best: Option<f64> = None;
    let mut consider = |t: f64| {
        if t > MIN_TOF && best.is_none_or(|cur| t < cur) {
            best = Some(t);
        }
    };

    if a.abs() < PARALLEL_TOL {
        // Closing speed exactly matches the shot: a single linear root.
        if b.abs() > PARALLEL_TOL {
            consider(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let sq = disc.sqrt();
        let q = if b >= 0.0 {
            -0.5 * (b + sq)
        } else {
            -0.5 * (b - sq)
        };
        consider(q / a);
        if q.abs() > PARALLEL_TOL {
            consider(c / q);
        }
    }

    best.map(|t| InterceptSolution {
        time_of_flight: t,
        launch_point: shooter,
        impact_point: target_pos + target_vel * t,
    })
}

/// Elevation angle a shooter must raise to, from target altitude and
/// ground distance: atan2(altitude, ground_distance).
pub fn required_elevation(altitude: f64, ground_distance: f64) -> f64 {
    altitude.atan2(ground_distance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b} (tol {tol})");
    }

    /// Eq-form residual: every reported POI must lie on the circle.
    fn circle_residual(c: &Circle, p: Point2) -> f64 {
        ((p.x - c.center.x).powi(2) + (p.y - c.center.y).powi(2) - c.radius * c.radius).abs()
    }

    #[test]
    fn poi_unit_circle_along_x_axis() {
        let circle = Circle::new(Point2::new(0.0, 0.0), 1.0);
        let ray = Ray::new(Point2::new(-5.0, 0.0), Vec2::new(1.0, 0.0)).unwrap();
        let hits = circle_line_poi(&circle, &ray);
        assert_eq!(hits.len(), 2);
        assert_close(hits[0].point.x, -1.0, 1e-12);
        assert_close(hits[1].point.x, 1.0, 1e-12);
        assert!(hits[0].ray_t < hits[1].ray_t);
    }

    #[test]
    fn poi_misses_circle() {
        let circle = Circle::new(Point2::new(0.0, 0.0), 1.0);
        let ray = Ray::new(Point2::new(-5.0, 2.0), Vec2::new(1.0, 0.0)).unwrap();
        assert!(circle_line_poi(&circle, &ray).is_empty());
    }

    #[test]
    fn poi_hand_solved_diagonal() {
        // Circle center (2,1) r=5 against the line y=x reduces to
        // x^2 - 3x - 10 = 0, roots x = -2 and x = 5.
        let circle = Circle::new(Point2::new(2.0, 1.0), 5.0);
        let ray = Ray::new(Point2::new(0.0, 0.0), Vec2::new(1.0, 1.0)).unwrap();
        let hits = circle_line_poi(&circle, &ray);
        assert_eq!(hits.len(), 2);
        assert_close(hits[0].point.x, -2.0, 1e-9);
        assert_close(hits[0].point.y, -2.0, 1e-9);
        assert_close(hits[1].point.x, 5.0, 1e-9);
        assert_close(hits[1].point.y, 5.0, 1e-9);
        // The behind-the-origin point is flagged by its negative parameter.
        assert!(hits[0].ray_t < 0.0);
        for h in &hits {
            assert!(circle_residual(&circle, h.point) < 1e-9);
        }
    }

    #[test]
    fn poi_tangent_reports_single_point() {
        let circle = Circle::new(Point2::new(0.0, 0.0), 1.0);
        let ray = Ray::new(Point2::new(-5.0, 1.0), Vec2::new(1.0, 0.0)).unwrap();
        let hits = circle_line_poi(&circle, &ray);
        assert_eq!(hits.len(), 1);
        assert_close(hits[0].point.x, 0.0, 1e-6);
    }

    #[test]
    fn distance_identity_and_triple() {
        assert_eq!(euclidean_distance(Point2::new(0.0, 0.0), Point2::new(0.0, 0.0)), 0.0);
        assert_close(
            euclidean_distance(Point2::new(2.0, 1.0), Point2::new(5.0, 5.0)),
            5.0,
            1e-12,
        );
    }

    #[test]
    fn distance_matches_coordinatewise_oracle() {
        // Independent re-evaluation over each axis, against a seeded set.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 200.0 - 100.0
        };
        for _ in 0..100 {
            let a = Point2::new(next(), next());
            let b = Point2::new(next(), next());
            let oracle = {
                let coords_a = [a.x, a.y];
                let coords_b = [b.x, b.y];
                coords_a
                    .iter()
                    .zip(coords_b.iter())
                    .map(|(pa, pb)| (pa - pb) * (pa - pb))
                    .sum::<f64>()
                    .sqrt()
            };
            assert_close(euclidean_distance(a, b), oracle, 1e-12);
        }
    }

    #[test]
    fn time_to_point_cases() {
        assert_eq!(time_to_point(10.0, 2.0).unwrap(), 5.0);
        assert_eq!(time_to_point(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(
            time_to_point(10.0, 0.0),
            Err(GeometryError::NonClosingTarget)
        );
    }

    #[test]
    fn velocity_from_samples() {
        let (v, speed) =
            estimate_velocity((0.0, Point2::new(0.0, 0.0)), (1.0, Point2::new(3.0, 4.0))).unwrap();
        assert_eq!(v, Vec2::new(3.0, 4.0));
        assert_eq!(speed, 5.0);

        let (v, speed) =
            estimate_velocity((0.0, Point2::new(1.0, 1.0)), (2.0, Point2::new(1.0, 1.0))).unwrap();
        assert_eq!(v, Vec2::new(0.0, 0.0));
        assert_eq!(speed, 0.0);

        assert_eq!(
            estimate_velocity((0.0, Point2::new(1.0, 1.0)), (0.0, Point2::new(1.0, 1.0))),
            Err(GeometryError::InvalidHistory)
        );
    }

    #[test]
    fn full_circle_sector_reduces_to_circle_poi() {
        let circle = Circle::new(Point2::new(0.0, 0.0), 2.0);
        let sector = Sector::full_circle(circle);
        let ray = Ray::new(Point2::new(-10.0, 0.0), Vec2::new(1.0, 0.0)).unwrap();
        let crossing = sector_intercept(&sector, &ray, 2.0).unwrap();
        let hits = circle_line_poi(&circle, &ray);
        assert_close(crossing.entry.x, hits[0].point.x, 1e-12);
        assert_close(crossing.exit.x, hits[1].point.x, 1e-12);
        assert_close(crossing.entry_time, hits[0].ray_t / 2.0, 1e-12);
        assert_close(crossing.exit_time, hits[1].ray_t / 2.0, 1e-12);
    }

    #[test]
    fn half_plane_sector_rejects_lower_chord() {
        // Sector covers bearings [0, π]; a chord entirely below the x-axis
        // never enters it.
        let circle = Circle::new(Point2::new(0.0, 0.0), 1.0);
        let sector = Sector::new(circle, 0.0, PI);
        let ray = Ray::new(Point2::new(-5.0, -0.5), Vec2::new(1.0, 0.0)).unwrap();
        assert!(sector_intercept(&sector, &ray, 1.0).is_none());
    }

    #[test]
    fn sector_window_clips_at_boundary() {
        // Upper half-plane sector, ray along y = 0.5 crossing the unit
        // circle at x = ±sqrt(0.75): whole chord is at bearings in (0, π).
        let circle = Circle::new(Point2::new(0.0, 0.0), 1.0);
        let sector = Sector::new(circle, 0.0, PI);
        let ray = Ray::new(Point2::new(-5.0, 0.5), Vec2::new(1.0, 0.0)).unwrap();
        let c = sector_intercept(&sector, &ray, 1.0).unwrap();
        assert_close(c.entry.x, -(0.75f64).sqrt(), 1e-9);
        assert_close(c.exit.x, (0.75f64).sqrt(), 1e-9);
    }

    #[test]
    fn sector_entry_is_origin_when_starting_inside() {
        let circle = Circle::new(Point2::new(0.0, 0.0), 4.0);
        let sector = Sector::full_circle(circle);
        let ray = Ray::new(Point2::new(1.0, 0.0), Vec2::new(1.0, 0.0)).unwrap();
        let c = sector_intercept(&sector, &ray, 2.0).unwrap();
        assert_eq!(c.entry, Point2::new(1.0, 0.0));
        assert_eq!(c.entry_time, 0.0);
        assert_close(c.exit.x, 4.0, 1e-12);
    }

    #[test]
    fn sector_behind_origin_is_empty() {
        let circle = Circle::new(Point2::new(-10.0, 0.0), 1.0);
        let sector = Sector::full_circle(circle);
        let ray = Ray::new(Point2::new(0.0, 0.0), Vec2::new(1.0, 0.0)).unwrap();
        assert!(sector_intercept(&sector, &ray, 1.0).is_none());
    }

    #[test]
    fn quarter_sector_window_is_subset_of_chord() {
        // Sector spanning bearings [π/2, π] (upper-left quarter): a ray
        // along y = 0.5 only counts the x <= 0 part of its chord.
        let circle = Circle::new(Point2::new(0.0, 0.0), 1.0);
        let sector = Sector::new(circle, FRAC_PI_2, FRAC_PI_2);
        let ray = Ray::new(Point2::new(-5.0, 0.5), Vec2::new(1.0, 0.0)).unwrap();
        let c = sector_intercept(&sector, &ray, 1.0).unwrap();
        assert_close(c.entry.x, -(0.75f64).sqrt(), 1e-9);
        assert_close(c.exit.x, 0.0, 1e-9);
    }

    #[test]
    fn intercept_stationary_target() {
        let sol = solve_intercept(
            Point2::new(10.0, 0.0),
            Vec2::new(0.0, 0.0),
            Point2::new(0.0, 0.0),
            2.0,
        )
        .unwrap();
        assert_close(sol.time_of_flight, 5.0, 1e-12);
        assert_eq!(sol.impact_point, Point2::new(10.0, 0.0));
        assert_eq!(sol.launch_point, Point2::new(0.0, 0.0));
    }

    #[test]
    fn intercept_receding_at_shot_speed_has_no_solution() {
        let sol = solve_intercept(
            Point2::new(10.0, 0.0),
            Vec2::new(2.0, 0.0),
            Point2::new(0.0, 0.0),
            2.0,
        );
        assert!(sol.is_none());
    }

    #[test]
    fn intercept_crossing_target_forward_simulates() {
        let target = Point2::new(8.0, 3.0);
        let vel = Vec2::new(-0.4, 0.25);
        let shooter = Point2::new(0.0, 0.0);
        let sol = solve_intercept(target, vel, shooter, 1.2).unwrap();
        let t = sol.time_of_flight;
        let target_at = target + vel * t;
        let shot_dir = (sol.impact_point - shooter).normalized().unwrap();
        let shot_at = shooter + shot_dir * (1.2 * t);
        assert!(euclidean_distance(target_at, shot_at) < 1e-6);
        assert!(euclidean_distance(target_at, sol.impact_point) < 1e-9);
    }

    #[test]
    fn required_elevation_basics() {
        assert_eq!(required_elevation(0.0, 5.0), 0.0);
        assert_close(required_elevation(1.0, 1.0), PI / 4.0, 1e-12);
        assert_close(required_elevation(1.0, 0.0), FRAC_PI_2, 1e-12);
    }
}
