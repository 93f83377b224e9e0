//! Front end for the graded star-algebra engine: the expression language,
//! JSON/CSV wire formats, and the verification suites behind `grstar verify`.

pub mod expr;
pub mod jsonio;
pub mod verify;
