use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::Result;
use crate::expr::Expr;

/// A smooth (or piecewise smooth) real function on R^d with its gradient.
///
/// Used for potentials V(x), coefficients a(x), initial densities and phases.
/// Implementations that cannot supply a Hessian return `None` and callers fall
/// back to [`hessian_or_fd`].
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn hessian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        None
    }
    fn describe(&self) -> String;
}

pub type Field = Arc<dyn ScalarField>;

impl fmt::Debug for dyn ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarField({})", self.describe())
    }
}

/// Variable names used for an `d`-dimensional position argument.
pub fn position_vars(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["x".to_string()]
    } else {
        (1..=dim).map(|i| format!("x{i}")).collect()
    }
}

/// Variable names used for an `d`-dimensional momentum argument.
pub fn momentum_vars(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["xi".to_string()]
    } else {
        (1..=dim).map(|i| format!("xi{i}")).collect()
    }
}

/// Scalar field defined by an expression string in `x` (d = 1) or `x1..xd`.
#[derive(Debug, Clone)]
pub struct ExprField {
    expr: Expr,
    dim: usize,
}

impl ExprField {
    pub fn parse(source: &str, dim: usize) -> Result<Self> {
        let names = position_vars(dim);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Ok(Self {
            expr: Expr::parse(source, &refs)?,
            dim,
        })
    }

    pub fn source(&self) -> &str {
        self.expr.source()
    }

    pub fn into_field(self) -> Field {
        Arc::new(self)
    }
}

impl ScalarField for ExprField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.expr.eval(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.expr.eval_jet(x).grad
    }

    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let jet = self.expr.eval_jet(x);
        Some(DMatrix::from_row_slice(self.dim, self.dim, &jet.hess))
    }

    fn describe(&self) -> String {
        self.expr.source().to_string()
    }
}

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// Scalar field backed by closures. The Hessian is left to finite differences.
pub struct FnField {
    dim: usize,
    label: String,
    value: Box<ValueFn>,
    gradient: Box<GradFn>,
}

impl FnField {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            label: label.into(),
            value: Box::new(value),
            gradient: Box::new(gradient),
        }
    }

    pub fn into_field(self) -> Field {
        Arc::new(self)
    }
}

impl ScalarField for FnField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// Identically zero field.
#[derive(Debug, Clone, Copy)]
pub struct ZeroField(pub usize);

impl ScalarField for ZeroField {
    fn dim(&self) -> usize {
        self.0
    }
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, _x: &[f64]) -> Vec<f64> {
        vec![0.0; self.0]
    }
    fn hessian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::zeros(self.0, self.0))
    }
    fn describe(&self) -> String {
        "0".into()
    }
}

/// Central-difference step for second derivatives at `x`.
pub(crate) fn fd_step(x: &[f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    1e-5 * (1.0 + norm)
}

/// Analytic Hessian when available, otherwise central differences of the gradient.
pub fn hessian_or_fd(field: &dyn ScalarField, x: &[f64]) -> DMatrix<f64> {
    if let Some(h) = field.hessian(x) {
        return h;
    }
    let d = field.dim();
    let h = fd_step(x);
    let mut out = DMatrix::zeros(d, d);
    let mut p = x.to_vec();
    for j in 0..d {
        p[j] = x[j] + h;
        let gp = field.gradient(&p);
        p[j] = x[j] - h;
        let gm = field.gradient(&p);
        p[j] = x[j];
        for i in 0..d {
            out[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    // symmetrize
    let t = out.transpose();
    (out + t) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_hessian_fallback_matches_expression_hessian() {
        let expr = ExprField::parse("x1^2*x2 + sin(x1*x2)", 2).unwrap();
        let f = FnField::new(
            2,
            "closure",
            |x| x[0] * x[0] * x[1] + (x[0] * x[1]).sin(),
            |x| {
                let c = (x[0] * x[1]).cos();
                vec![2.0 * x[0] * x[1] + x[1] * c, x[0] * x[0] + x[0] * c]
            },
        );
        let at = [0.3, -1.1];
        let exact = expr.hessian(&at).unwrap();
        let fd = hessian_or_fd(&f, &at);
        assert!((exact - fd).abs().max() < 1e-8);
    }

    #[test]
    fn variable_naming() {
        assert_eq!(position_vars(1), vec!["x"]);
        assert_eq!(momentum_vars(2), vec!["xi1", "xi2"]);
    }
}
