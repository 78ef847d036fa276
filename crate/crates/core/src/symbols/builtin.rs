use nalgebra::DMatrix;

use super::field::{hessian_or_fd, Field, ZeroField};
use super::{Hamiltonian, HamiltonianSymbol, SecondDerivatives};
use crate::error::{Error, Result};

pub const BUILTIN_NAMES: &[&str] = &[
    "free_quadratic",
    "schrodinger_potential",
    "airy_cubic",
    "bethe_salpeter",
    "eikonal",
    "harmonic_oscillator",
    "airy_variable",
];

/// Named parameters for [`builtin_symbol`].
#[derive(Debug, Clone, Default)]
pub struct SymbolParams {
    pub dim: Option<usize>,
    /// V(x) for `schrodinger_potential` and `bethe_salpeter`.
    pub potential: Option<Field>,
    /// a(x) for `eikonal`.
    pub coefficient: Option<Field>,
}

impl SymbolParams {
    pub fn dim(dim: usize) -> Self {
        Self {
            dim: Some(dim),
            ..Self::default()
        }
    }

    pub fn with_potential(mut self, v: Field) -> Self {
        self.potential = Some(v);
        self
    }

    pub fn with_coefficient(mut self, a: Field) -> Self {
        self.coefficient = Some(a);
        self
    }
}

fn missing(symbol: &str, param: &str) -> Error {
    Error::MissingParameter {
        symbol: symbol.into(),
        param: param.into(),
    }
}

fn resolve_dim(name: &str, params: &SymbolParams, fields: &[&Option<Field>]) -> Result<usize> {
    let inferred = fields.iter().find_map(|f| f.as_ref().map(|f| f.dim()));
    let dim = params.dim.or(inferred).ok_or_else(|| missing(name, "d"))?;
    if dim == 0 {
        return Err(Error::Domain(format!("{name}: dimension must be positive")));
    }
    for f in fields.iter().filter_map(|f| f.as_ref()) {
        if f.dim() != dim {
            return Err(Error::Domain(format!(
                "{name}: field `{}` has dimension {} but d = {dim}",
                f.describe(),
                f.dim()
            )));
        }
    }
    Ok(dim)
}

fn one_dimensional(name: &str, params: &SymbolParams) -> Result<()> {
    match params.dim {
        None | Some(1) => Ok(()),
        Some(d) => Err(Error::Domain(format!(
            "{name} is defined for d = 1 only, got d = {d}"
        ))),
    }
}

/// Build one of the shipped symbols by name.
pub fn builtin_symbol(name: &str, params: &SymbolParams) -> Result<HamiltonianSymbol> {
    let sym = match name {
        "free_quadratic" => {
            let dim = resolve_dim(name, params, &[&params.potential])?;
            let v = params
                .potential
                .clone()
                .unwrap_or_else(|| std::sync::Arc::new(ZeroField(dim)));
            HamiltonianSymbol::new(Quadratic {
                dim,
                potential: v,
                label: name.into(),
            })
        }
        "schrodinger_potential" => {
            let v = params.potential.clone().ok_or_else(|| missing(name, "V"))?;
            let dim = resolve_dim(name, params, &[&params.potential])?;
            HamiltonianSymbol::new(Quadratic {
                dim,
                potential: v,
                label: name.into(),
            })
        }
        "airy_cubic" => {
            one_dimensional(name, params)?;
            HamiltonianSymbol::new(AiryCubic)
        }
        "bethe_salpeter" => {
            let dim = resolve_dim(name, params, &[&params.potential])?;
            let v = params
                .potential
                .clone()
                .unwrap_or_else(|| std::sync::Arc::new(ZeroField(dim)));
            HamiltonianSymbol::new(BetheSalpeter { dim, potential: v })
        }
        "eikonal" => {
            let a = params
                .coefficient
                .clone()
                .ok_or_else(|| missing(name, "a"))?;
            let dim = resolve_dim(name, params, &[&params.coefficient])?;
            HamiltonianSymbol::new(Eikonal { dim, speed: a })
        }
        "harmonic_oscillator" => {
            let dim = resolve_dim(name, params, &[])?;
            HamiltonianSymbol::new(Harmonic { dim })
        }
        "airy_variable" => {
            one_dimensional(name, params)?;
            HamiltonianSymbol::new(AiryVariable)
        }
        other => return Err(Error::UnknownSymbol(other.into())),
    };
    Ok(sym)
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

/// H = |ξ|²/2 + V(x).
struct Quadratic {
    dim: usize,
    potential: Field,
    label: String,
}

impl Hamiltonian for Quadratic {
    fn dim(&self) -> usize {
        self.dim
    }
    fn label(&self) -> &str {
        &self.label
    }
    fn value(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        Ok(0.5 * norm_sq(xi) + self.potential.value(x))
    }
    fn grad_x(&self, x: &[f64], _xi: &[f64]) -> Result<Vec<f64>> {
        Ok(self.potential.gradient(x))
    }
    fn grad_xi(&self, _x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        Ok(xi.to_vec())
    }
    fn second(&self, x: &[f64], _xi: &[f64]) -> Result<Option<SecondDerivatives>> {
        let d = self.dim;
        Ok(Some(SecondDerivatives {
            hess_x: hessian_or_fd(self.potential.as_ref(), x),
            hess_mixed: DMatrix::zeros(d, d),
            hess_xi: DMatrix::identity(d, d),
        }))
    }
    fn is_separable(&self) -> bool {
        true
    }
    fn dispersion(&self, xi: f64) -> Option<f64> {
        Some(0.5 * xi * xi)
    }
    fn potential(&self, x: &[f64]) -> Option<f64> {
        Some(self.potential.value(x))
    }
}

/// H = ξ³/3, d = 1.
struct AiryCubic;

impl Hamiltonian for AiryCubic {
    fn dim(&self) -> usize {
        1
    }
    fn label(&self) -> &str {
        "airy_cubic"
    }
    fn value(&self, _x: &[f64], xi: &[f64]) -> Result<f64> {
        Ok(xi[0].powi(3) / 3.0)
    }
    fn grad_x(&self, _x: &[f64], _xi: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![0.0])
    }
    fn grad_xi(&self, _x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![xi[0] * xi[0]])
    }
    fn second(&self, _x: &[f64], xi: &[f64]) -> Result<Option<SecondDerivatives>> {
        Ok(Some(SecondDerivatives {
            hess_x: DMatrix::zeros(1, 1),
            hess_mixed: DMatrix::zeros(1, 1),
            hess_xi: DMatrix::from_element(1, 1, 2.0 * xi[0]),
        }))
    }
    fn is_separable(&self) -> bool {
        true
    }
    fn dispersion(&self, xi: f64) -> Option<f64> {
        Some(xi.powi(3) / 3.0)
    }
    fn potential(&self, _x: &[f64]) -> Option<f64> {
        Some(0.0)
    }
}

/// H = √(|ξ|²/2 + 1) + V(x).
struct BetheSalpeter {
    dim: usize,
    potential: Field,
}

impl Hamiltonian for BetheSalpeter {
    fn dim(&self) -> usize {
        self.dim
    }
    fn label(&self) -> &str {
        "bethe_salpeter"
    }
    fn value(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        Ok((0.5 * norm_sq(xi) + 1.0).sqrt() + self.potential.value(x))
    }
    fn grad_x(&self, x: &[f64], _xi: &[f64]) -> Result<Vec<f64>> {
        Ok(self.potential.gradient(x))
    }
    fn grad_xi(&self, _x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        let r = (0.5 * norm_sq(xi) + 1.0).sqrt();
        Ok(xi.iter().map(|v| v / (2.0 * r)).collect())
    }
    fn second(&self, x: &[f64], xi: &[f64]) -> Result<Option<SecondDerivatives>> {
        let d = self.dim;
        let q = 0.5 * norm_sq(xi) + 1.0;
        let r = q.sqrt();
        let hess_xi = DMatrix::from_fn(d, d, |i, j| {
            let diag = if i == j { 1.0 / (2.0 * r) } else { 0.0 };
            diag - xi[i] * xi[j] / (4.0 * q * r)
        });
        Ok(Some(SecondDerivatives {
            hess_x: hessian_or_fd(self.potential.as_ref(), x),
            hess_mixed: DMatrix::zeros(d, d),
            hess_xi,
        }))
    }
    fn is_separable(&self) -> bool {
        true
    }
    fn dispersion(&self, xi: f64) -> Option<f64> {
        Some((0.5 * xi * xi + 1.0).sqrt())
    }
    fn potential(&self, x: &[f64]) -> Option<f64> {
        Some(self.potential.value(x))
    }
}

/// H = a(x)|ξ|. Not differentiable at ξ = 0.
struct Eikonal {
    dim: usize,
    speed: Field,
}

impl Eikonal {
    fn xi_norm(&self, xi: &[f64]) -> Result<f64> {
        let n = norm_sq(xi).sqrt();
        if n == 0.0 {
            Err(Error::Domain(
                "eikonal symbol a(x)|ξ| is not differentiable at ξ = 0".into(),
            ))
        } else {
            Ok(n)
        }
    }
}

impl Hamiltonian for Eikonal {
    fn dim(&self) -> usize {
        self.dim
    }
    fn label(&self) -> &str {
        "eikonal"
    }
    fn value(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        Ok(self.speed.value(x) * norm_sq(xi).sqrt())
    }
    fn grad_x(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        let n = self.xi_norm(xi)?;
        Ok(self.speed.gradient(x).into_iter().map(|g| g * n).collect())
    }
    fn grad_xi(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        let n = self.xi_norm(xi)?;
        let a = self.speed.value(x);
        Ok(xi.iter().map(|v| a * v / n).collect())
    }
    fn second(&self, x: &[f64], xi: &[f64]) -> Result<Option<SecondDerivatives>> {
        let d = self.dim;
        let n = self.xi_norm(xi)?;
        let a = self.speed.value(x);
        let ga = self.speed.gradient(x);
        let hess_xi = DMatrix::from_fn(d, d, |i, j| {
            let diag = if i == j { 1.0 / n } else { 0.0 };
            a * (diag - xi[i] * xi[j] / (n * n * n))
        });
        Ok(Some(SecondDerivatives {
            hess_x: hessian_or_fd(self.speed.as_ref(), x) * n,
            hess_mixed: DMatrix::from_fn(d, d, |i, j| ga[i] * xi[j] / n),
            hess_xi,
        }))
    }
    fn xi_exclusion_radius(&self) -> Option<f64> {
        Some(1e-8)
    }
}

/// H = (|x|² + |ξ|²)/2.
struct Harmonic {
    dim: usize,
}

impl Hamiltonian for Harmonic {
    fn dim(&self) -> usize {
        self.dim
    }
    fn label(&self) -> &str {
        "harmonic_oscillator"
    }
    fn value(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        Ok(0.5 * (norm_sq(x) + norm_sq(xi)))
    }
    fn grad_x(&self, x: &[f64], _xi: &[f64]) -> Result<Vec<f64>> {
        Ok(x.to_vec())
    }
    fn grad_xi(&self, _x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        Ok(xi.to_vec())
    }
    fn second(&self, _x: &[f64], _xi: &[f64]) -> Result<Option<SecondDerivatives>> {
        let d = self.dim;
        Ok(Some(SecondDerivatives {
            hess_x: DMatrix::identity(d, d),
            hess_mixed: DMatrix::zeros(d, d),
            hess_xi: DMatrix::identity(d, d),
        }))
    }
    fn is_separable(&self) -> bool {
        true
    }
    fn dispersion(&self, xi: f64) -> Option<f64> {
        Some(0.5 * xi * xi)
    }
    fn potential(&self, x: &[f64]) -> Option<f64> {
        Some(0.5 * norm_sq(x))
    }
}

/// H = −x ξ³, d = 1. Its flow exists only up to t = 1/(2ξ²).
struct AiryVariable;

impl Hamiltonian for AiryVariable {
    fn dim(&self) -> usize {
        1
    }
    fn label(&self) -> &str {
        "airy_variable"
    }
    fn value(&self, x: &[f64], xi: &[f64]) -> Result<f64> {
        Ok(-x[0] * xi[0].powi(3))
    }
    fn grad_x(&self, _x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![-xi[0].powi(3)])
    }
    fn grad_xi(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        Ok(vec![-3.0 * x[0] * xi[0] * xi[0]])
    }
    fn second(&self, x: &[f64], xi: &[f64]) -> Result<Option<SecondDerivatives>> {
        Ok(Some(SecondDerivatives {
            hess_x: DMatrix::zeros(1, 1),
            hess_mixed: DMatrix::from_element(1, 1, -3.0 * xi[0] * xi[0]),
            hess_xi: DMatrix::from_element(1, 1, -6.0 * x[0] * xi[0]),
        }))
    }
}
