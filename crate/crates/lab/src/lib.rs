//! Command-line laboratory for `majorana-core`: experiment drivers, CSV/SVG/JSON artifacts,
//! the flux-schedule and logic-script formats, and the acceptance checks behind `verify`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod cli;
pub mod experiments;
pub mod output;
pub mod params;
pub mod schedule_text;
pub mod script;
pub mod svg;
