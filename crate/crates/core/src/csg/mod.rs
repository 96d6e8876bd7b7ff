//! The CSG language: syntax, rasters, evaluation, well-formedness and text.

pub mod eval;
pub mod expr;
pub mod scene;
pub mod text;

pub use eval::{apply_head, apply_repeat, eval, render_circle, render_rect, Evaluator};
pub use expr::{canonical_order, well_formed, Expr, Head, ParamDomain, COUNT_MAX};
pub use scene::{Canvas, Scene};
pub use text::{parse, serialize};
