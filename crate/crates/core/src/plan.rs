//! Floor plan: rectangular layout, attenuating walls and the candidate
//! location grid that placements are drawn from.

use crate::error::{CoreError, Result};
use crate::geom::{segment_crosses_wall, Point, Rect, WallSegment};

/// Rectangular indoor layout with walls and a regular candidate grid.
#[derive(Debug, Clone)]
pub struct FloorPlan {
    pub width: f64,
    pub height: f64,
    pub walls: Vec<WallSegment>,
    /// Candidate grid pitch in metres.
    pub grid_step: f64,
    /// Optional sub-rectangle the candidate grid is restricted to
    /// (e.g. the managed apartment in a multi-apartment layout).
    pub candidate_region: Option<Rect>,
}

/// Wall crossings along a ray and their summed penetration loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallCrossing {
    pub count: usize,
    pub total_loss_db: f64,
}

impl FloorPlan {
    pub fn new(width: f64, height: f64, grid_step: f64, walls: Vec<WallSegment>) -> Result<Self> {
        if !(width > 0.0) || !(height > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "floor plan dimensions must be positive, got {width} x {height}"
            )));
        }
        if !(grid_step > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "grid step must be positive, got {grid_step}"
            )));
        }
        for w in &walls {
            if w.a == w.b {
                return Err(CoreError::InvalidParameter(
                    "wall segment endpoints coincide".into(),
                ));
            }
            if w.loss_db < 0.0 {
                return Err(CoreError::InvalidParameter(format!(
                    "wall loss must be >= 0 dB, got {}",
                    w.loss_db
                )));
            }
        }
        let plan = FloorPlan {
            width,
            height,
            walls,
            grid_step,
            candidate_region: None,
        };
        if plan.candidates().is_empty() {
            return Err(CoreError::InvalidParameter(
                "candidate grid is empty".into(),
            ));
        }
        Ok(plan)
    }

    /// Open rectangular plan without interior walls.
    pub fn open(width: f64, height: f64, grid_step: f64) -> Result<Self> {
        FloorPlan::new(width, height, grid_step, Vec::new())
    }

    pub fn with_candidate_region(mut self, region: Rect) -> Self {
        self.candidate_region = Some(region);
        self
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0.0, 0.0, self.width, self.height)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.bounds().contains(p)
    }

    /// Candidate locations in row-major order: y rows bottom-up, x within a
    /// row left to right. Index i = iy * ncols + ix is the canonical
    /// tie-break order used by the optimizer.
    pub fn candidates(&self) -> Vec<Point> {
        let eps = 1e-9;
        let nx = (self.width / self.grid_step + eps).floor() as usize;
        let ny = (self.height / self.grid_step + eps).floor() as usize;
        let mut out = Vec::with_capacity((nx + 1) * (ny + 1));
        for iy in 0..=ny {
            for ix in 0..=nx {
                let p = Point::new(ix as f64 * self.grid_step, iy as f64 * self.grid_step);
                if let Some(region) = &self.candidate_region {
                    if !region.contains(p) {
                        continue;
                    }
                }
                out.push(p);
            }
        }
        out
    }

    /// Number of wall segments the open segment (a, b) crosses, with the
    /// summed penetration loss. Symmetric in (a, b); (a, a) crosses nothing.
    pub fn wall_count(&self, a: Point, b: Point) -> WallCrossing {
        if a == b {
            return WallCrossing {
                count: 0,
                total_loss_db: 0.0,
            };
        }
        let mut count = 0;
        let mut total = 0.0;
        for w in &self.walls {
            if segment_crosses_wall(a, b, w) {
                count += 1;
                total += w.loss_db;
            }
        }
        WallCrossing {
            count,
            total_loss_db: total,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_segment_crosses_nothing() {
        let plan = FloorPlan::new(
            10.0,
            10.0,
            1.0,
            vec![WallSegment::new(
                Point::new(5.0, 0.0),
                Point::new(5.0, 10.0),
                10.0,
            )],
        )
        .unwrap();
        let p = Point::new(5.0, 5.0);
        assert_eq!(
            plan.wall_count(p, p),
            WallCrossing {
                count: 0,
                total_loss_db: 0.0
            }
        );
    }

    #[test]
    fn single_vertical_wall_crossed_once() {
        let plan = FloorPlan::new(
            10.0,
            10.0,
            1.0,
            vec![WallSegment::new(
                Point::new(5.0, 0.0),
                Point::new(5.0, 10.0),
                10.0,
            )],
        )
        .unwrap();
        let c = plan.wall_count(Point::new(2.0, 5.0), Point::new(8.0, 5.0));
        assert_eq!(c.count, 1);
        assert!((c.total_loss_db - 10.0).abs() < 1e-12);
    }

    #[test]
    fn two_walls_sum_their_losses() {
        let plan = FloorPlan::new(
            10.0,
            10.0,
            1.0,
            vec![
                WallSegment::new(Point::new(3.0, 0.0), Point::new(3.0, 10.0), 10.0),
                WallSegment::new(Point::new(6.0, 0.0), Point::new(6.0, 10.0), 10.0),
            ],
        )
        .unwrap();
        let c = plan.wall_count(Point::new(1.0, 5.0), Point::new(9.0, 5.0));
        assert_eq!(c.count, 2);
        assert!((c.total_loss_db - 20.0).abs() < 1e-12);
    }

    #[test]
    fn grid_is_inclusive_of_bounds() {
        let plan = FloorPlan::open(10.0, 10.0, 1.0).unwrap();
        let cands = plan.candidates();
        assert_eq!(cands.len(), 121);
        assert_eq!(cands[0], Point::new(0.0, 0.0));
        assert_eq!(*cands.last().unwrap(), Point::new(10.0, 10.0));
    }

    #[test]
    fn candidate_region_filters_grid() {
        let plan = FloorPlan::open(20.0, 10.0, 1.0)
            .unwrap()
            .with_candidate_region(Rect::new(0.0, 0.0, 9.5, 10.0));
        let cands = plan.candidates();
        assert_eq!(cands.len(), 10 * 11);
        assert!(cands.iter().all(|p| p.x <= 9.5));
    }

    #[test]
    fn row_major_ordering() {
        let plan = FloorPlan::open(2.0, 2.0, 1.0).unwrap();
        let cands = plan.candidates();
        assert_eq!(cands[0], Point::new(0.0, 0.0));
        assert_eq!(cands[1], Point::new(1.0, 0.0));
        assert_eq!(cands[3], Point::new(0.0, 1.0));
    }
}
