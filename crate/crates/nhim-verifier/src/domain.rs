use interval_core::{split_grid, two_pi, Interval, IntervalBox, IntervalVector, Topology};

use crate::NhimError;

/// One coordinate of the center manifold.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterCoord {
    /// Index of the coordinate among the field's variables.
    pub var: usize,
    /// Range covered; for a periodic coordinate one full period.
    pub range: Interval,
    /// Period of an angle coordinate, `None` for a coordinate with boundary.
    pub period: Option<Interval>,
}

impl CenterCoord {
    pub fn interval(var: usize, range: Interval) -> Self {
        CenterCoord { var, range, period: None }
    }

    /// An angle over `[0, 2 pi]`.
    pub fn angle(var: usize) -> Self {
        let p = two_pi();
        CenterCoord {
            var,
            range: Interval::new(0.0, p.hi()),
            period: Some(p),
        }
    }
}

/// The domain `D = Lambda x B_u(R) x B_s(R_s)` with cone slope `L`.
///
/// Balls are enclosed by boxes. Rate constants are evaluated in normalized
/// coordinates in which every stable coordinate is divided by
/// `R_s / R`, so both balls have radius `R` there.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub center: Vec<CenterCoord>,
    pub unstable: Vec<usize>,
    pub stable: Vec<usize>,
    pub radius: f64,
    pub stable_radius: f64,
    pub chart_radius: f64,
    pub slope: f64,
    /// Subdivision count for every field variable.
    pub block_partition: Vec<usize>,
}

/// Coordinate role within the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Center,
    Unstable,
    Stable,
}

impl DomainSpec {
    pub fn dim(&self) -> usize {
        self.center.len() + self.unstable.len() + self.stable.len()
    }

    pub fn center_vars(&self) -> Vec<usize> {
        self.center.iter().map(|c| c.var).collect()
    }

    pub fn role(&self, var: usize) -> Option<Role> {
        if self.center.iter().any(|c| c.var == var) {
            Some(Role::Center)
        } else if self.unstable.contains(&var) {
            Some(Role::Unstable)
        } else if self.stable.contains(&var) {
            Some(Role::Stable)
        } else {
            None
        }
    }

    /// Ratio `R_s / R` relating original and normalized stable coordinates.
    pub fn stable_scale(&self) -> f64 {
        self.stable_radius / self.radius
    }

    /// Same domain with stable radius `s * R`.
    pub fn with_stable_scale(&self, s: f64) -> DomainSpec {
        DomainSpec {
            stable_radius: s * self.radius,
            ..self.clone()
        }
    }

    pub fn with_partition(&self, counts: Vec<usize>) -> DomainSpec {
        DomainSpec {
            block_partition: counts,
            ..self.clone()
        }
    }

    pub fn validate(&self, arity: usize) -> Result<(), NhimError> {
        let bad = |m: String| Err(NhimError::InvalidDomain(m));
        if self.dim() != arity {
            return bad(format!("domain has {} coordinates, field has {arity}", self.dim()));
        }
        for v in 0..arity {
            let n = self.center.iter().filter(|c| c.var == v).count()
                + self.unstable.iter().filter(|&&u| u == v).count()
                + self.stable.iter().filter(|&&s| s == v).count();
            if n != 1 {
                return bad(format!("variable {v} is assigned {n} roles"));
            }
        }
        if self.unstable.is_empty() || self.stable.is_empty() {
            return bad("unstable and stable blocks must be nonempty".into());
        }
        if self.block_partition.len() != arity || self.block_partition.contains(&0) {
            return bad("block_partition needs one positive count per variable".into());
        }
        if !(self.radius > 0.0 && self.stable_radius > 0.0 && self.chart_radius > 0.0) {
            return bad("radii must be positive".into());
        }
        if !(self.radius < self.chart_radius / 2.0) {
            return bad("R must be below R_Lambda / 2".into());
        }
        let lo = 2.0 * self.radius / self.chart_radius;
        if !(self.slope > lo && self.slope < 1.0) {
            return bad(format!("slope L must lie in ({lo:e}, 1)"));
        }
        Ok(())
    }

    fn range_of(&self, var: usize) -> Interval {
        match self.role(var) {
            Some(Role::Center) => self.center.iter().find(|c| c.var == var).unwrap().range,
            Some(Role::Unstable) => Interval::symmetric(self.radius),
            Some(Role::Stable) => Interval::symmetric(self.stable_radius),
            None => Interval::ZERO,
        }
    }

    fn topology(&self) -> Vec<Topology> {
        (0..self.dim())
            .map(|v| match self.center.iter().find(|c| c.var == v) {
                Some(CenterCoord { period: Some(p), .. }) => Topology::Periodic { period: *p },
                _ => Topology::Linear,
            })
            .collect()
    }

    /// Box enclosing `D` in original coordinates.
    pub fn full_box(&self) -> IntervalBox {
        let coords: IntervalVector = (0..self.dim()).map(|v| self.range_of(v)).collect();
        IntervalBox::new(coords, self.topology())
    }

    /// The cells of the block partition, in row-major order.
    pub fn cells(&self) -> Vec<IntervalBox> {
        split_grid(&self.full_box(), &self.block_partition)
    }

    /// Per-variable factor `c` with original = `c *` normalized.
    pub fn normalization(&self) -> Vec<f64> {
        let s = self.stable_scale();
        (0..self.dim())
            .map(|v| if self.stable.contains(&v) { s } else { 1.0 })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn saddle() -> DomainSpec {
        DomainSpec {
            center: vec![],
            unstable: vec![0],
            stable: vec![1],
            radius: 0.1,
            stable_radius: 0.05,
            chart_radius: 1.0,
            slope: 0.5,
            block_partition: vec![2, 3],
        }
    }

    #[test]
    fn validation() {
        assert!(saddle().validate(2).is_ok());
        assert!(saddle().validate(3).is_err());
        let mut d = saddle();
        d.slope = 0.1;
        assert!(d.validate(2).is_err());
        let mut d = saddle();
        d.stable = vec![0];
        assert!(d.validate(2).is_err());
    }

    #[test]
    fn box_and_cells() {
        let d = saddle();
        let b = d.full_box();
        assert_eq!(b.get(1), Interval::new(-0.05, 0.05));
        assert_eq!(d.cells().len(), 6);
        assert_eq!(d.normalization(), vec![1.0, 0.5]);
        assert_eq!(d.with_stable_scale(0.2).stable_radius, 0.1 * 0.2);
    }

    #[test]
    fn angle_coordinate_is_periodic() {
        let mut d = saddle();
        d.center = vec![CenterCoord::angle(2)];
        d.block_partition.push(4);
        assert!(d.validate(3).is_ok());
        let b = d.full_box();
        assert!(matches!(b.topology()[2], Topology::Periodic { .. }));
        assert!(b.get(2).contains(std::f64::consts::TAU));
    }
}
