use crate::interval::Interval;
use crate::vector::IntervalVector;

/// Topology of a single coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Topology {
    Linear,
    /// Circle coordinate identified modulo `period`.
    Periodic { period: Interval },
}

/// An interval vector with per-coordinate topology.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalBox {
    coords: IntervalVector,
    topology: Vec<Topology>,
}

impl IntervalBox {
    /// All coordinates linear.
    pub fn linear(coords: IntervalVector) -> Self {
        let topology = vec![Topology::Linear; coords.len()];
        IntervalBox { coords, topology }
    }

    /// Builds a box and normalizes periodic coordinates.
    pub fn new(coords: IntervalVector, topology: Vec<Topology>) -> Self {
        assert_eq!(coords.len(), topology.len(), "one topology tag per coordinate");
        let mut b = IntervalBox { coords, topology };
        b.normalize();
        b
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &IntervalVector {
        &self.coords
    }

    pub fn into_coords(self) -> IntervalVector {
        self.coords
    }

    pub fn topology(&self) -> &[Topology] {
        &self.topology
    }

    pub fn get(&self, i: usize) -> Interval {
        self.coords[i]
    }

    /// Replaces one coordinate (normalizing it when periodic).
    pub fn with(&self, i: usize, v: Interval) -> IntervalBox {
        let mut b = self.clone();
        b.coords[i] = v;
        b.normalize();
        b
    }

    /// Shifts every periodic coordinate so that its midpoint lies in one
    /// fundamental period `[0, P)`. A coordinate at least one period wide is
    /// replaced by the full circle `[0, P]`.
    pub fn normalize(&mut self) {
        for (i, t) in self.topology.iter().enumerate() {
            if let Topology::Periodic { period } = *t {
                let x = self.coords[i];
                if x.width() >= period.lo() {
                    self.coords[i] = Interval::new(0.0, period.hi());
                    continue;
                }
                let k = (x.mid() / period.mid()).floor();
                if k != 0.0 {
                    self.coords[i] = x - period * Interval::point(k);
                }
            }
        }
    }

    pub fn subset(&self, other: &IntervalBox) -> bool {
        self.coords.subset(&other.coords)
    }

    pub fn max_width(&self) -> f64 {
        self.coords.max_width()
    }
}

impl From<IntervalVector> for IntervalBox {
    fn from(v: IntervalVector) -> Self {
        IntervalBox::linear(v)
    }
}

/// Splits `b` into `n` parts along `axis`; neighbouring parts share endpoints.
pub fn split(b: &IntervalBox, axis: usize, n: usize) -> Vec<IntervalBox> {
    assert!(n >= 1, "split into at least one part");
    b.coords[axis]
        .split(n)
        .into_iter()
        .map(|piece| {
            let mut c = b.clone();
            c.coords[axis] = piece;
            c
        })
        .collect()
}

/// Splits every axis by the given counts (row-major order of cells).
pub fn split_grid(b: &IntervalBox, counts: &[usize]) -> Vec<IntervalBox> {
    assert_eq!(counts.len(), b.dim(), "one count per axis");
    let mut cells = vec![b.clone()];
    for (axis, &n) in counts.iter().enumerate() {
        if n <= 1 {
            continue;
        }
        cells = cells.iter().flat_map(|c| split(c, axis, n)).collect();
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcendental::two_pi;

    #[test]
    fn split_unit_interval() {
        let b = IntervalBox::linear(IntervalVector::new(vec![Interval::new(0.0, 1.0)]));
        let parts = split(&b, 0, 2);
        assert_eq!(parts[0].get(0), Interval::new(0.0, 0.5));
        assert_eq!(parts[1].get(0), Interval::new(0.5, 1.0));
    }

    #[test]
    fn periodic_quarters_cover_circle() {
        let p = two_pi();
        let b = IntervalBox::new(
            IntervalVector::new(vec![Interval::new(0.0, p.hi())]),
            vec![Topology::Periodic { period: p }],
        );
        let q = split(&b, 0, 4);
        assert_eq!(q.len(), 4);
        assert_eq!(q[0].get(0).lo(), 0.0);
        assert_eq!(q[3].get(0).hi(), p.hi());
        for w in q.windows(2) {
            assert_eq!(w[0].get(0).hi(), w[1].get(0).lo());
        }
    }

    #[test]
    fn normalization_shifts_into_period() {
        let p = two_pi();
        let b = IntervalBox::new(
            IntervalVector::new(vec![Interval::new(7.0, 7.1)]),
            vec![Topology::Periodic { period: p }],
        );
        let x = b.get(0);
        assert!(x.contains(7.05 - std::f64::consts::TAU));
        assert!(x.width() < 0.1 + 1e-14);
        let wide = b.with(0, Interval::new(-1.0, 9.0));
        assert_eq!(wide.get(0), Interval::new(0.0, p.hi()));
    }

    #[test]
    fn grid_counts() {
        let b = IntervalBox::linear(IntervalVector::new(vec![Interval::new(0.0, 1.0); 3]));
        let cells = split_grid(&b, &[2, 1, 3]);
        assert_eq!(cells.len(), 6);
    }
}
