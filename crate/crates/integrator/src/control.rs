use crate::IntegratorError;

/// Step-size and order settings of the Taylor integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    /// Taylor order `p`; the remainder is the order `p + 1` term.
    pub order: usize,
    pub h_min: f64,
    pub h_max: f64,
    /// Target size of the per-step truncation term.
    pub tolerance: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            order: 8,
            h_min: 1e-8,
            h_max: 0.5,
            tolerance: 1e-10,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<(), IntegratorError> {
        if self.order < 2 {
            return Err(IntegratorError::InvalidControl(format!("order {} < 2", self.order)));
        }
        if !(self.h_min > 0.0 && self.h_min <= self.h_max && self.h_max.is_finite()) {
            return Err(IntegratorError::InvalidControl(format!(
                "need 0 < h_min <= h_max, got {:e}, {:e}",
                self.h_min, self.h_max
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(IntegratorError::InvalidControl("tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Step suggested by the size of the last two Taylor coefficients.
    pub fn suggest(&self, mag_p: f64, mag_pm1: f64) -> f64 {
        let p = self.order as f64;
        let by = |m: f64, k: f64| if m > 0.0 { (self.tolerance / m).powf(1.0 / k) } else { f64::INFINITY };
        let h = by(mag_p, p).min(by(mag_pm1, p - 1.0)) * 0.9;
        h.clamp(self.h_min, self.h_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_settings() {
        let mut c = StepControl::default();
        assert!(c.validate().is_ok());
        c.order = 1;
        assert!(c.validate().is_err());
        c = StepControl { h_min: 1.0, h_max: 0.5, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn suggestion_is_clamped() {
        let c = StepControl::default();
        assert_eq!(c.suggest(0.0, 0.0), c.h_max);
        assert_eq!(c.suggest(1e300, 1e300), c.h_min);
        let h = c.suggest(1.0, 1.0);
        assert!(h > 0.0 && h < 1.0);
    }
}
