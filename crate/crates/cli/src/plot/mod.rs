//! Self-contained SVG rendering for violin and bar charts.

pub mod kde;
pub mod svg;

pub use kde::Violin;
pub use svg::{render_bars, render_violins, Bar, Panel};
