use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::device::FluxConfig;
use crate::error::{bail, Result};

/// Time profile of the progress variable s(τ) ∈ [0, 1] inside one step; fluxes are linear in s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ramp {
    /// s = τ.
    #[default]
    Linear,
    /// s = 6τ⁵ - 15τ⁴ + 10τ³, with vanishing first and second derivatives at both ends.
    Smooth,
}

impl Ramp {
    pub fn progress(self, tau: f64) -> f64 {
        let t = tau.clamp(0.0, 1.0);
        match self {
            Ramp::Linear => t,
            Ramp::Smooth => t * t * t * (t * (6.0 * t - 15.0) + 10.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ramp::Linear => "linear",
            Ramp::Smooth => "smooth",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(Ramp::Linear),
            "smooth" => Some(Ramp::Smooth),
            _ => None,
        }
    }
}

/// One segment of a flux program: the fluxes move from `start` to `end` during [t_start, t_end].
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleStep {
    pub label: String,
    pub t_start: f64,
    pub t_end: f64,
    pub start: Vec<f64>,
    pub end: Vec<f64>,
}

impl ScheduleStep {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn is_braiding(&self) -> bool {
        self.label.starts_with("braid")
    }

    /// Indices whose flux changes during the step.
    pub fn ramping(&self) -> Vec<usize> {
        (0..self.start.len()).filter(|&k| self.start[k] != self.end[k]).collect()
    }

    fn at(&self, t: f64, ramp: Ramp) -> Vec<f64> {
        let d = self.duration();
        let s = if d > 0.0 { ramp.progress((t - self.t_start) / d) } else { 1.0 };
        self.start
            .iter()
            .zip(&self.end)
            .map(|(a, b)| a + s * (b - a))
            .collect()
    }
}

/// A piecewise flux program, the "source code" of a braiding device.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxSchedule {
    steps: Vec<ScheduleStep>,
    ramp: Ramp,
    width: usize,
}

impl FluxSchedule {
    /// An empty program over `width` fluxes.
    pub fn empty(width: usize) -> Self {
        Self {
            steps: Vec::new(),
            ramp: Ramp::default(),
            width,
        }
    }

    /// Builds a schedule from explicit steps and validates it.
    pub fn from_steps(steps: Vec<ScheduleStep>, ramp: Ramp) -> Result<Self> {
        let width = steps.first().map_or(0, |s| s.start.len());
        let s = Self { steps, ramp, width };
        s.validate()?;
        Ok(s)
    }

    /// Builds a schedule from an initial configuration and (label, end config, duration)
    /// triples, starting at t = 0.
    pub fn from_waypoints(start: &[f64], waypoints: &[(&str, Vec<f64>, f64)], ramp: Ramp) -> Result<Self> {
        let mut s = Self::empty(start.len());
        s.ramp = ramp;
        let mut current = start.to_vec();
        for (label, end, duration) in waypoints {
            s.push(label, current.clone(), end.clone(), *duration)?;
            current = end.clone();
        }
        s.validate()?;
        Ok(s)
    }

    /// Appends a step that starts where the schedule currently ends.
    pub fn push(&mut self, label: &str, start: Vec<f64>, end: Vec<f64>, duration: f64) -> Result<()> {
        if !(duration >= 0.0) || !duration.is_finite() {
            bail!(Argument, "step {label}: duration must be finite and non-negative, got {duration}");
        }
        if self.steps.is_empty() && self.width == 0 {
            self.width = start.len();
        }
        let t_start = self.duration();
        self.steps.push(ScheduleStep {
            label: label.into(),
            t_start,
            t_end: t_start + duration,
            start,
            end,
        });
        Ok(())
    }

    /// Checks continuity of fluxes and times, widths, |x| < π/2 on a sampled grid, and
    /// x_0 = 0 during braiding steps.
    pub fn validate(&self) -> Result<()> {
        let mut prev: Option<&ScheduleStep> = None;
        for (i, step) in self.steps.iter().enumerate() {
            if step.start.len() != self.width || step.end.len() != self.width {
                bail!(Consistency, "step {i} ({}) has the wrong number of fluxes", step.label);
            }
            if !(step.t_end >= step.t_start) {
                bail!(Consistency, "step {i} ({}) runs backwards in time", step.label);
            }
            if let Some(p) = prev {
                if p.end != step.start {
                    bail!(Consistency, "step {i} ({}) does not start where step {} ended", step.label, i - 1);
                }
                if p.t_end != step.t_start {
                    bail!(Consistency, "step {i} ({}) starts at t = {} but the previous ended at {}", step.label, step.t_start, p.t_end);
                }
            }
            for k in 0..=16 {
                let x = step.at(step.t_start + step.duration() * k as f64 / 16.0, self.ramp);
                if let Some(bad) = x.iter().find(|v| !v.is_finite() || v.abs() >= FRAC_PI_2) {
                    bail!(Consistency, "step {i} ({}) reaches flux {bad} outside (-π/2, π/2)", step.label);
                }
            }
            if step.is_braiding() && (step.start.first() != Some(&0.0) || step.end.first() != Some(&0.0)) {
                bail!(Consistency, "braiding step {i} ({}) has x0 ≠ 0", step.label);
            }
            prev = Some(step);
        }
        Ok(())
    }

    pub fn steps(&self) -> &[ScheduleStep] {
        &self.steps
    }

    pub fn ramp(&self) -> Ramp {
        self.ramp
    }

    pub fn with_ramp(mut self, ramp: Ramp) -> Self {
        self.ramp = ramp;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start_time(&self) -> f64 {
        self.steps.first().map_or(0.0, |s| s.t_start)
    }

    pub fn duration(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.t_end)
    }

    pub fn initial(&self) -> Option<&[f64]> {
        self.steps.first().map(|s| s.start.as_slice())
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.steps.last().map(|s| s.end.as_slice())
    }

    /// Step boundaries, including the start and end times.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.steps.iter().map(|s| s.t_start).collect();
        if let Some(s) = self.steps.last() {
            b.push(s.t_end);
        }
        b
    }

    /// Flux vector at time t (clamped to the schedule).
    pub fn config_at(&self, t: f64) -> Vec<f64> {
        let Some(first) = self.steps.first() else {
            return alloc::vec![0.0; self.width];
        };
        if t <= first.t_start {
            return first.start.clone();
        }
        for s in &self.steps {
            if t <= s.t_end {
                return s.at(t, self.ramp);
            }
        }
        self.steps.last().map(|s| s.end.clone()).unwrap_or_default()
    }

    pub fn flux_at(&self, t: f64) -> Result<FluxConfig> {
        FluxConfig::new(self.config_at(t))
    }

    /// Steps whose label starts with `prefix`, re-timed to start at t = 0.
    pub fn select(&self, prefix: &str) -> Self {
        let steps: Vec<_> = self.steps.iter().filter(|s| s.label.starts_with(prefix)).cloned().collect();
        let mut out = Self::empty(self.width);
        out.ramp = self.ramp;
        for s in steps {
            let d = s.duration();
            out.push(&s.label, s.start, s.end, d).ok();
        }
        out
    }

    /// The same program run backwards: step order reversed and each step's endpoints swapped.
    pub fn reversed(&self) -> Self {
        let mut out = Self::empty(self.width);
        out.ramp = self.ramp;
        for s in self.steps.iter().rev() {
            out.push(&s.label, s.end.clone(), s.start.clone(), s.duration()).ok();
        }
        out
    }

    /// All durations multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self::empty(self.width);
        out.ramp = self.ramp;
        for s in &self.steps {
            out.push(&s.label, s.start.clone(), s.end.clone(), s.duration() * factor).ok();
        }
        out
    }

    /// `self` followed by `other`, which must start where `self` ends.
    pub fn concat(&self, other: &FluxSchedule) -> Result<Self> {
        let mut out = self.clone();
        if out.width == 0 {
            out.width = other.width;
        }
        for s in &other.steps {
            out.push(&s.label, s.start.clone(), s.end.clone(), s.duration())?;
        }
        out.validate()?;
        Ok(out)
    }

    /// Renames step labels in order.
    pub fn relabel(mut self, labels: impl IntoIterator<Item = String>) -> Self {
        for (s, l) in self.steps.iter_mut().zip(labels) {
            s.label = l;
        }
        self
    }

    /// Largest |x| reached anywhere in the program.
    pub fn max_abs_flux(&self) -> f64 {
        self.steps
            .iter()
            .flat_map(|s| s.start.iter().chain(&s.end))
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn toy() -> FluxSchedule {
        FluxSchedule::from_waypoints(
            &[0.0, 0.0, 0.5],
            &[("a", vec![0.0, 0.5, 0.5], 1.0), ("braid-1", vec![0.0, 0.5, 0.0], 2.0)],
            Ramp::Linear,
        )
        .unwrap()
    }

    #[test]
    fn interpolation_and_breakpoints() {
        let s = toy();
        assert_eq!(s.breakpoints(), vec![0.0, 1.0, 3.0]);
        assert_eq!(s.config_at(0.5), vec![0.0, 0.25, 0.5]);
        assert_eq!(s.config_at(2.0), vec![0.0, 0.5, 0.25]);
        assert_eq!(s.config_at(10.0), vec![0.0, 0.5, 0.0]);
    }

    #[test]
    fn reversal_is_an_involution() {
        let s = toy();
        let r = s.reversed();
        assert_eq!(r.initial().unwrap(), s.last().unwrap());
        assert_eq!(r.reversed(), s);
    }

    #[test]
    fn rejects_discontinuity_and_range() {
        let mut s = toy();
        s.push("c", vec![0.1, 0.0, 0.0], vec![0.0; 3], 1.0).unwrap();
        assert!(s.validate().is_err());
        let bad = FluxSchedule::from_waypoints(&[0.0], &[("x", vec![1.6], 1.0)], Ramp::Linear);
        assert!(bad.is_err());
        let braid = FluxSchedule::from_waypoints(&[0.1, 0.0], &[("braid-3", vec![0.1, 0.2], 1.0)], Ramp::Linear);
        assert!(braid.is_err());
    }

    #[test]
    fn smooth_ramp_endpoints() {
        assert_eq!(Ramp::Smooth.progress(0.0), 0.0);
        assert_eq!(Ramp::Smooth.progress(1.0), 1.0);
        assert!((Ramp::Smooth.progress(0.5) - 0.5).abs() < 1e-15);
    }
}
