//! Line-oriented flux schedule files.
//!
//! ```text
//! @ramp linear
//! @start x0 x1 x2 x3
//! label t_start t_end x0 x1 x2 x3
//! ```
//!
//! Each step line gives the configuration reached at `t_end`; the configuration it starts from
//! is the previous line's (or `@start`). Numbers use the shortest round-trip decimal form, so
//! writing and reading a schedule is bit-exact. Blank lines and `#` comments are ignored.

use anyhow::{anyhow, bail, Context, Result};
use majorana_core::braid::{FluxSchedule, Ramp, ScheduleStep};

use crate::output::num;

fn join(x: &[f64]) -> String {
    x.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" ")
}

pub fn write_schedule(s: &FluxSchedule) -> Result<String> {
    let mut out = format!("@ramp {}\n", s.ramp().name());
    let Some(initial) = s.initial() else {
        return Ok(out);
    };
    out.push_str(&format!("@start {}\n", join(initial)));
    for step in s.steps() {
        if step.label.is_empty() || step.label.contains(char::is_whitespace) || step.label.starts_with(['#', '@']) {
            bail!("step label {:?} cannot be written", step.label);
        }
        out.push_str(&format!("{} {} {} {}\n", step.label, num(step.t_start), num(step.t_end), join(&step.end)));
    }
    Ok(out)
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().with_context(|| format!("line {line}: {tok:?} is not a number"))?;
    if !v.is_finite() {
        bail!("line {line}: {tok} is not finite");
    }
    Ok(v)
}

pub fn read_schedule(text: &str) -> Result<FluxSchedule> {
    let mut ramp = Ramp::default();
    let mut current: Option<Vec<f64>> = None;
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks[0] {
            "@ramp" => {
                let name = toks.get(1).ok_or_else(|| anyhow!("line {line}: @ramp needs a name"))?;
                ramp = Ramp::from_name(name).ok_or_else(|| anyhow!("line {line}: unknown ramp {name:?}"))?;
            }
            "@start" => {
                if current.is_some() {
                    bail!("line {line}: @start must precede every step");
                }
                current = Some(toks[1..].iter().map(|t| parse_f64(t, line)).collect::<Result<_>>()?);
            }
            d if d.starts_with('@') => bail!("line {line}: unknown directive {d}"),
            label => {
                let start = current.take().ok_or_else(|| anyhow!("line {line}: step before @start"))?;
                if toks.len() != 3 + start.len() {
                    bail!("line {line}: expected {} fluxes, found {}", start.len(), toks.len().saturating_sub(3));
                }
                let t_start = parse_f64(toks[1], line)?;
                let t_end = parse_f64(toks[2], line)?;
                let end: Vec<f64> = toks[3..].iter().map(|t| parse_f64(t, line)).collect::<Result<_>>()?;
                steps.push(ScheduleStep {
                    label: label.to_string(),
                    t_start,
                    t_end,
                    start,
                    end: end.clone(),
                });
                current = Some(end);
            }
        }
    }
    if steps.is_empty() {
        let width = current.map_or(0, |c| c.len());
        return Ok(FluxSchedule::empty(width).with_ramp(ramp));
    }
    FluxSchedule::from_steps(steps, ramp).map_err(|e| anyhow!("invalid schedule: {e}"))
}
