//! Vector-field models: a small builtin catalogue plus user expressions with
//! exact Jacobians from forward-mode automatic differentiation.

mod dual;
mod expr;
mod model;
mod region;

pub use dual::Dual;
pub use expr::{BinOp, Expr, Func, Number};
pub use model::{
    BuiltinParams, FieldConfig, ModelConfig, ParamValue, Provenance, TrappingCheck, VectorFieldModel, BUILTIN_NAMES,
};
pub use region::{Region, RegionConfig};
