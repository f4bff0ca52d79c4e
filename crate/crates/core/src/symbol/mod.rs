//! Symbols `sigma(x, xi, eta)`: expressions, evaluation, built-in families and
//! measured class seminorms.

pub mod expr;
pub mod families;
pub mod parse;
pub mod seminorm;
pub mod separable;
pub mod smooth;
pub mod spec;
pub mod tape;

pub use expr::{differentiate, Bracket, SymbolExpr, Var};
pub use families::{builtin_family, frequency_cut, localize};
pub use parse::parse_expr;
pub use seminorm::{
    class_report, hormander_seminorm, radial_shell_sups, ClassParams, SeminormConfig,
    SeminormReport,
};
pub use separable::{SeparableSymbol, SeparableTerm};
pub use spec::{LoadedSymbol, SymbolSpec};
pub use tape::{CompiledSymbol, Point};
