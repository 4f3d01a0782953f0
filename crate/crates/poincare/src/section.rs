use interval_core::{Interval, IntervalVector};
use jets::ExprDag;

use crate::PoincareError;

/// The hyperplane `{x_coord = level}` crossed with the sign `direction` of
/// `x_coord'`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Section {
    pub coord: usize,
    pub level: f64,
    pub direction: i8,
}

impl Section {
    pub fn new(coord: usize, level: f64, direction: i8) -> Self {
        assert!(direction != 0, "crossing direction must be nonzero");
        Section {
            coord,
            level,
            direction: direction.signum(),
        }
    }

    fn orient(&self, x: Interval) -> Interval {
        if self.direction > 0 {
            x
        } else {
            -x
        }
    }

    /// `(x_coord - level) * direction`: negative before the crossing,
    /// positive after it.
    pub fn signed(&self, x: &IntervalVector) -> Interval {
        self.orient(x[self.coord] - Interval::point(self.level))
    }

    pub fn strictly_before(&self, x: &IntervalVector) -> bool {
        self.signed(x).hi() < 0.0
    }

    pub fn strictly_after(&self, x: &IntervalVector) -> bool {
        self.signed(x).lo() > 0.0
    }

    /// Normal velocity `f_coord * direction` over `x`.
    pub fn normal_velocity(&self, f: &ExprDag, x: &IntervalVector) -> Result<Interval, PoincareError> {
        Ok(self.orient(f.eval_interval(x)?[self.coord]))
    }

    /// The same section crossed in the opposite direction.
    pub fn reversed(&self) -> Section {
        Section::new(self.coord, self.level, -self.direction)
    }
}
