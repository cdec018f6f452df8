//! Recurrence coefficients and the polynomial families they generate.

mod casorati;
mod coefficients;
mod connection;
mod difference;
mod family;
mod polynomial;

pub use casorati::{
    casorati, casorati_det_step, independence_test, product_formula, CasoratiMatrix, Independence,
    Sequence,
};
pub use coefficients::{Mode, RecurrenceCoefficients, Triple};
pub use connection::{
    associated_shift_relation_check, connection_coefficients, connection_coefficients_with,
    connection_residual, ConnectionCoefficients, ShiftRelationResidual,
};
pub use difference::solve_difference_equation;
pub use family::{
    defining_coefficients, family_values, generate_family, values, values_with_derivative,
    FamilyKind, FamilyTable,
};
pub use polynomial::MatrixPolynomial;
