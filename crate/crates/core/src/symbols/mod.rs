//! Hamiltonian symbols H(x, ξ), scalar fields, and the scenario container.

mod builtin;
mod doc;
mod field;
mod scenario;
mod validate;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Expr;

pub use builtin::{builtin_symbol, SymbolParams, BUILTIN_NAMES};
pub use doc::{HamiltonianDoc, InitialDoc, RegionDoc, ScenarioDoc, TolerancesDoc};
pub use field::{
    hessian_or_fd, momentum_vars, position_vars, ExprField, Field, FnField, ScalarField, ZeroField,
};
pub use scenario::{AxisBox, InitialData, Region, Scenario, Tolerances};
pub use validate::{validate_scenario, CheckOutcome, DerivativeCheck, FlowProbe, ValidationReport};

/// Second partial derivatives of a symbol at one phase-space point.
///
/// `mixed[(i, j)]` is ∂²H/∂x_i∂ξ_j.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondDerivatives {
    pub hess_x: DMatrix<f64>,
    pub hess_mixed: DMatrix<f64>,
    pub hess_xi: DMatrix<f64>,
}

/// A classical symbol together with its derivatives.
///
/// Implementors supply the value and both gradients; the second derivatives
/// are optional and [`HamiltonianSymbol`] substitutes central differences when
/// they are missing.
pub trait Hamiltonian: Send + Sync {
    fn dim(&self) -> usize;
    fn label(&self) -> &str;
    fn value(&self, x: &[f64], xi: &[f64]) -> Result<f64>;
    fn grad_x(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>>;
    fn grad_xi(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>>;
    fn second(&self, _x: &[f64], _xi: &[f64]) -> Result<Option<SecondDerivatives>> {
        Ok(None)
    }
    /// True when H = ω(ξ) + V(x).
    fn is_separable(&self) -> bool {
        false
    }
    /// Radius of a ball around ξ = 0 where the symbol is not smooth.
    fn xi_exclusion_radius(&self) -> Option<f64> {
        None
    }
    /// Dispersion relation ω(ξ) when H = ω(ξ) + V(x), used by spectral solvers.
    fn dispersion(&self, _xi: f64) -> Option<f64> {
        None
    }
    /// V(x) for separable symbols.
    fn potential(&self, _x: &[f64]) -> Option<f64> {
        None
    }
}

/// Shared, immutable handle to a Hamiltonian symbol.
#[derive(Clone)]
pub struct HamiltonianSymbol {
    inner: Arc<dyn Hamiltonian>,
}

impl fmt::Debug for HamiltonianSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSymbol")
            .field("label", &self.label())
            .field("dim", &self.dim())
            .finish()
    }
}

impl HamiltonianSymbol {
    pub fn new(h: impl Hamiltonian + 'static) -> Self {
        Self { inner: Arc::new(h) }
    }

    pub fn from_arc(inner: Arc<dyn Hamiltonian>) -> Self {
        Self { inner }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn label(&self) -> &str {
        self.inner.label()
    }

    pub fn h(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        self.inner.value(x, xi)
    }

    pub fn grad_x(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        self.inner.grad_x(x, xi)
    }

    pub fn grad_xi(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        self.inner.grad_xi(x, xi)
    }

    pub fn is_separable(&self) -> bool {
        self.inner.is_separable()
    }

    pub fn xi_exclusion_radius(&self) -> Option<f64> {
        self.inner.xi_exclusion_radius()
    }

    pub fn dispersion(&self, xi: f64) -> Option<f64> {
        self.inner.dispersion(xi)
    }

    pub fn potential(&self, x: &[f64]) -> Option<f64> {
        self.inner.potential(x)
    }

    /// True when the symbol provides analytic second derivatives.
    pub fn has_analytic_hessians(&self, x: &[f64], xi: &[f64]) -> bool {
        matches!(self.inner.second(x, xi), Ok(Some(_)))
    }

    /// Second derivatives, falling back to central differences of the
    /// gradients with step 1e-5·(1+|ξ|) (and 1e-5·(1+|x|) in x).
    pub fn second_derivatives(&self, x: &[f64], xi: &[f64]) -> Result<SecondDerivatives> {
        if let Some(s) = self.inner.second(x, xi)? {
            return Ok(s);
        }
        self.fd_second_derivatives(x, xi)
    }

    pub fn fd_second_derivatives(&self, x: &[f64], xi: &[f64]) -> Result<SecondDerivatives> {
        let d = self.dim();
        let hx = field::fd_step(x);
        let hxi = field::fd_step(xi);
        let mut hess_x = DMatrix::zeros(d, d);
        let mut hess_mixed = DMatrix::zeros(d, d);
        let mut hess_xi = DMatrix::zeros(d, d);
        let mut xp = x.to_vec();
        for j in 0..d {
            xp[j] = x[j] + hx;
            let gxp = self.grad_x(&xp, xi)?;
            let gxip = self.grad_xi(&xp, xi)?;
            xp[j] = x[j] - hx;
            let gxm = self.grad_x(&xp, xi)?;
            let gxim = self.grad_xi(&xp, xi)?;
            xp[j] = x[j];
            for i in 0..d {
                hess_x[(i, j)] = (gxp[i] - gxm[i]) / (2.0 * hx);
                // ∂/∂x_j of ∂H/∂ξ_i
                hess_mixed[(j, i)] = (gxip[i] - gxim[i]) / (2.0 * hx);
            }
        }
        let mut xip = xi.to_vec();
        for j in 0..d {
            xip[j] = xi[j] + hxi;
            let gp = self.grad_xi(x, &xip)?;
            xip[j] = xi[j] - hxi;
            let gm = self.grad_xi(x, &xip)?;
            xip[j] = xi[j];
            for i in 0..d {
                hess_xi[(i, j)] = (gp[i] - gm[i]) / (2.0 * hxi);
            }
        }
        let sym = |m: DMatrix<f64>| {
            let t = m.transpose();
            (m + t) * 0.5
        };
        Ok(SecondDerivatives {
            hess_x: sym(hess_x),
            hess_mixed,
            hess_xi: sym(hess_xi),
        })
    }
}

/// Symbol given by an expression in `x`/`xi` (or `x1..xd`, `xi1..xid`).
#[derive(Debug, Clone)]
pub struct ExprHamiltonian {
    expr: Expr,
    dim: usize,
    label: String,
}

impl ExprHamiltonian {
    pub fn parse(source: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        let mut names = position_vars(dim);
        names.extend(momentum_vars(dim));
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Ok(Self {
            expr: Expr::parse(source, &refs)?,
            dim,
            label: format!("custom({source})"),
        })
    }

    pub fn source(&self) -> &str {
        self.expr.source()
    }

    fn args(&self, x: &[f64], xi: &[f64]) -> Vec<f64> {
        let mut a = Vec::with_capacity(2 * self.dim);
        a.extend_from_slice(x);
        a.extend_from_slice(xi);
        a
    }

    fn check(&self, v: f64) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(self.label.clone()))
        }
    }
}

impl Hamiltonian for ExprHamiltonian {
    fn dim(&self) -> usize {
        self.dim
    }

    fn label(&self) -> &str {
        &self.label
    }

    fn value(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        self.check(self.expr.eval(&self.args(x, xi)))
    }

    fn grad_x(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        let jet = self.expr.eval_jet(&self.args(x, xi));
        jet.grad[..self.dim]
            .iter()
            .map(|&g| self.check(g))
            .collect()
    }

    fn grad_xi(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        let jet = self.expr.eval_jet(&self.args(x, xi));
        jet.grad[self.dim..]
            .iter()
            .map(|&g| self.check(g))
            .collect()
    }

    fn second(&self, x: &[f64], xi: &[f64]) -> Result<Option<SecondDerivatives>> {
        let d = self.dim;
        let n = 2 * d;
        let jet = self.expr.eval_jet(&self.args(x, xi));
        let at = |i: usize, j: usize| jet.hess[i * n + j];
        Ok(Some(SecondDerivatives {
            hess_x: DMatrix::from_fn(d, d, |i, j| at(i, j)),
            hess_mixed: DMatrix::from_fn(d, d, |i, j| at(i, d + j)),
            hess_xi: DMatrix::from_fn(d, d, |i, j| at(d + i, d + j)),
        }))
    }
}
