use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    Linear,
    /// Each value holds from its time until the next point.
    Step,
}

/// A boundary quantity as a function of time (seconds).
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Constant(f64),
    Table {
        /// `(time_s, value)`, strictly increasing in time.
        points: Vec<(f64, f64)>,
        interpolation: Interpolation,
    },
}

impl Schedule {
    pub fn table(points: Vec<(f64, f64)>, interpolation: Interpolation) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Config("schedule table is empty".into()));
        }
        if points.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::Config("schedule table contains non-finite entries".into()));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Config("schedule times must be strictly increasing".into()));
        }
        Ok(Schedule::Table { points, interpolation })
    }

    /// Piecewise-constant schedule: `value_i` from `time_i` on.
    pub fn steps(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::table(points, Interpolation::Step)
    }

    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            Schedule::Constant(v) => *v,
            Schedule::Table { points, interpolation } => {
                let idx = points.partition_point(|&(pt, _)| pt <= t);
                if idx == 0 {
                    return points[0].1;
                }
                let (t0, v0) = points[idx - 1];
                if idx == points.len() || *interpolation == Interpolation::Step {
                    return v0;
                }
                let (t1, v1) = points[idx];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// True when the schedule is defined on `[0, duration]`.
    pub fn covers(&self, duration: f64) -> bool {
        match self {
            Schedule::Constant(_) => true,
            Schedule::Table { points, interpolation } => {
                let first = points[0].0;
                let last = points[points.len() - 1].0;
                first <= 0.0
                    && match interpolation {
                        Interpolation::Linear => last >= duration,
                        Interpolation::Step => true,
                    }
            }
        }
    }

    pub fn min_value(&self) -> f64 {
        self.values().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values().fold(f64::NEG_INFINITY, f64::max)
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let (c, t): (Option<f64>, &[(f64, f64)]) = match self {
            Schedule::Constant(v) => (Some(*v), &[]),
            Schedule::Table { points, .. } => (None, points),
        };
        c.into_iter().chain(t.iter().map(|p| p.1))
    }
}

/// Top-face boundary conditions; the bottom and sides are adiabatic.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySchedule {
    /// °C
    pub ambient_temperature: Schedule,
    /// W/(m²·K)
    pub film_coefficient: Schedule,
    /// Absorbed heating flux, W/m².
    pub top_flux: Schedule,
}

/// Boundary values frozen at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryValues {
    pub ambient: f64,
    pub film_coefficient: f64,
    pub flux: f64,
}

impl BoundarySchedule {
    pub fn at(&self, t: f64) -> BoundaryValues {
        BoundaryValues {
            ambient: self.ambient_temperature.value_at(t),
            film_coefficient: self.film_coefficient.value_at(t),
            flux: self.top_flux.value_at(t),
        }
    }

    pub fn validate(&self, duration: f64) -> Result<()> {
        for (name, s) in [
            ("ambient temperature", &self.ambient_temperature),
            ("film coefficient", &self.film_coefficient),
            ("top flux", &self.top_flux),
        ] {
            if !s.covers(duration) {
                return Err(Error::Config(format!("{name} schedule does not cover 0..{duration} s")));
            }
            if !s.min_value().is_finite() {
                return Err(Error::Config(format!("{name} schedule has non-finite values")));
            }
        }
        if self.film_coefficient.min_value() < 0.0 {
            return Err(Error::Config("film coefficient must be nonnegative".into()));
        }
        if self.top_flux.min_value() < 0.0 {
            return Err(Error::Config("top flux must be nonnegative".into()));
        }
        Ok(())
    }
}
