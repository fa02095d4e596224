//! Planar geometry primitives: points, rectangles, wall segments and the
//! segment-crossing test used by the propagation model.

/// A point in floor-plan coordinates, metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Axis-aligned rectangle, closed on all sides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Rect {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }
}

/// An attenuating wall segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallSegment {
    pub a: Point,
    pub b: Point,
    /// Penetration loss in dB, >= 0.
    pub loss_db: f64,
}

impl WallSegment {
    pub fn new(a: Point, b: Point, loss_db: f64) -> Self {
        WallSegment { a, b, loss_db }
    }
}

fn cross(ox: f64, oy: f64, ax: f64, ay: f64) -> f64 {
    ox * ay - oy * ax
}

/// Whether the open segment (a, b) crosses the closed wall segment.
///
/// The traversal parameter t is strict (a wall passing exactly through an
/// endpoint of the ray does not count), while a crossing that lands exactly
/// on a wall endpoint does count. Collinear overlap counts as no crossing.
pub fn segment_crosses_wall(a: Point, b: Point, wall: &WallSegment) -> bool {
    let rx = b.x - a.x;
    let ry = b.y - a.y;
    let sx = wall.b.x - wall.a.x;
    let sy = wall.b.y - wall.a.y;

    let denom = cross(rx, ry, sx, sy);
    if denom == 0.0 {
        return false;
    }

    let qpx = wall.a.x - a.x;
    let qpy = wall.a.y - a.y;
    let t = cross(qpx, qpy, sx, sy) / denom;
    let s = cross(qpx, qpy, rx, ry) / denom;

    t > 0.0 && t < 1.0 && (0.0..=1.0).contains(&s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wall(ax: f64, ay: f64, bx: f64, by: f64) -> WallSegment {
        WallSegment::new(Point::new(ax, ay), Point::new(bx, by), 10.0)
    }

    #[test]
    fn crossing_detected() {
        let w = wall(5.0, 0.0, 5.0, 10.0);
        assert!(segment_crosses_wall(
            Point::new(2.0, 5.0),
            Point::new(8.0, 5.0),
            &w
        ));
    }

    #[test]
    fn miss_detected() {
        let w = wall(5.0, 0.0, 5.0, 4.0);
        assert!(!segment_crosses_wall(
            Point::new(2.0, 5.0),
            Point::new(8.0, 5.0),
            &w
        ));
    }

    #[test]
    fn crossing_at_wall_endpoint_counts() {
        let w = wall(5.0, 0.0, 5.0, 5.0);
        // Ray passes exactly through the wall's upper endpoint (5, 5).
        assert!(segment_crosses_wall(
            Point::new(2.0, 5.0),
            Point::new(8.0, 5.0),
            &w
        ));
    }

    #[test]
    fn wall_through_ray_endpoint_does_not_count() {
        let w = wall(2.0, 0.0, 2.0, 10.0);
        // Wall passes through the ray's start point: t = 0 is excluded.
        assert!(!segment_crosses_wall(
            Point::new(2.0, 5.0),
            Point::new(8.0, 5.0),
            &w
        ));
    }

    #[test]
    fn parallel_and_collinear_do_not_count() {
        let w = wall(0.0, 5.0, 10.0, 5.0);
        assert!(!segment_crosses_wall(
            Point::new(2.0, 5.0),
            Point::new(8.0, 5.0),
            &w
        ));
        let w2 = wall(0.0, 4.0, 10.0, 4.0);
        assert!(!segment_crosses_wall(
            Point::new(2.0, 5.0),
            Point::new(8.0, 5.0),
            &w2
        ));
    }

    #[test]
    fn symmetric_in_ray_direction() {
        let w = wall(5.0, 0.0, 5.0, 10.0);
        let a = Point::new(1.0, 2.0);
        let b = Point::new(9.0, 7.0);
        assert_eq!(
            segment_crosses_wall(a, b, &w),
            segment_crosses_wall(b, a, &w)
        );
    }
}
