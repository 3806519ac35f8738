//! The analyzed language: numeric variables, assignments, `if`, `while`,
//! `assert` and `assume`.

mod ast;
mod parser;
mod pretty;

pub use ast::{
    assign_locations, Block, CmpOp, Expr, Guard, Linear, Location, OpaqueOp, Program, Stmt,
    StmtKind, VarDecl,
};
pub use parser::{parse, parse_expr, parse_guard, ParseError};
pub use pretty::{pretty, render_expr, render_guard};
