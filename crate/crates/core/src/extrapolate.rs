//! Weighted least-squares fits of finite-size sequences to asymptotic
//! models `y ≈ c₀ + Σ cⱼ gⱼ(x)`, whose constant term is the extrapolated limit.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{tsvd_solve, Matrix};
use crate::scalar::Real;

/// Correction terms available to [`fit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Term {
    /// `1/x`
    Inverse,
    /// `log x / x`
    LogOverX,
    /// `1/x²`
    InverseSquare,
    /// `log x / x²`
    LogOverXSquare,
}

impl Term {
    pub fn eval<T: Real>(self, x: T) -> T {
        match self {
            Term::Inverse => x.recip(),
            Term::LogOverX => x.ln() / x,
            Term::InverseSquare => (x * x).recip(),
            Term::LogOverXSquare => x.ln() / (x * x),
        }
    }
}

/// Fitted model.
#[derive(Clone, Debug, Serialize)]
pub struct Fit<T> {
    pub limit: T,
    pub terms: Vec<Term>,
    pub coefficients: Vec<T>,
    /// Weighted residual norm (zero when the fit interpolates).
    pub residual: T,
}

impl<T: Real> Fit<T> {
    pub fn predict(&self, x: T) -> T {
        self.terms.iter().zip(&self.coefficients).fold(self.limit, |acc, (t, &c)| acc + c * t.eval(x))
    }
}

/// Fits `y ≈ c₀ + Σ cⱼ tⱼ(x)` with weights `w` (least squares on `√w`-scaled rows).
pub fn fit<T: Real>(xs: &[T], ys: &[T], weights: Option<&[T]>, terms: &[Term]) -> Result<Fit<T>> {
    if xs.len() != ys.len() || weights.is_some_and(|w| w.len() != xs.len()) {
        return Err(Error::InvalidArgument("fit inputs have different lengths".into()));
    }
    if xs.len() < terms.len() + 1 {
        return Err(Error::InvalidArgument(format!(
            "{} data points cannot determine {} coefficients",
            xs.len(),
            terms.len() + 1
        )));
    }
    if xs.iter().any(|&x| !(x > T::zero())) {
        return Err(Error::InvalidArgument("abscissae must be positive".into()));
    }
    let mut rows = Vec::with_capacity(xs.len());
    let mut rhs = Vec::with_capacity(xs.len());
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        let s = weights.map_or(T::one(), |w| w[i].sqrt());
        let mut row = vec![s];
        row.extend(terms.iter().map(|t| s * t.eval(x)));
        rows.push(row);
        rhs.push(s * y);
    }
    let ls = tsvd_solve(&Matrix::from_rows(&rows), &rhs, T::epsilon())?;
    if ls.rank < terms.len() + 1 {
        return Err(Error::RankDeficient("abscissae do not separate the model terms".into()));
    }
    Ok(Fit { limit: ls.solution[0], terms: terms.to_vec(), coefficients: ls.solution[1..].to_vec(), residual: ls.residual_norm })
}
