//! Dense multivariate polynomial systems with complex coefficients.
//!
//! Monomials carry a full exponent vector. The systems handled here are
//! small (at most a dozen variables, degree two), so evaluation walks every
//! monomial directly. Partial derivatives are formed symbolically once, at
//! construction, and evaluated alongside the system.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: Complex64,
    pub exponents: Vec<u32>,
}

impl Monomial {
    pub fn new(coeff: impl Into<Complex64>, exponents: Vec<u32>) -> Self {
        Self {
            coeff: coeff.into(),
            exponents,
        }
    }

    /// Constant term in `num_vars` variables.
    pub fn constant(coeff: impl Into<Complex64>, num_vars: usize) -> Self {
        Self::new(coeff, vec![0; num_vars])
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    #[inline]
    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        let mut v = self.coeff;
        for (xi, &e) in x.iter().zip(&self.exponents) {
            match e {
                0 => {}
                1 => v *= xi,
                2 => v *= xi * xi,
                _ => v *= xi.powu(e),
            }
        }
        v
    }

    /// Partial derivative with respect to variable `j`, or `None` if it vanishes.
    pub fn derivative(&self, j: usize) -> Option<Monomial> {
        let e = self.exponents[j];
        if e == 0 {
            return None;
        }
        let mut exponents = self.exponents.clone();
        exponents[j] -= 1;
        Some(Monomial {
            coeff: self.coeff * f64::from(e),
            exponents,
        })
    }
}

pub type Polynomial = Vec<Monomial>;

fn poly_eval(p: &[Monomial], x: &[Complex64]) -> Complex64 {
    p.iter().map(|m| m.eval(x)).sum()
}

fn poly_degree(p: &[Monomial]) -> u32 {
    p.iter().map(Monomial::degree).max().unwrap_or(0)
}

/// Merge monomials with equal exponent vectors and drop exact zeros.
pub fn normalize(p: Polynomial) -> Polynomial {
    let mut out: Polynomial = Vec::with_capacity(p.len());
    for m in p {
        if let Some(existing) = out.iter_mut().find(|o| o.exponents == m.exponents) {
            existing.coeff += m.coeff;
        } else {
            out.push(m);
        }
    }
    out.retain(|m| m.coeff != Complex64::new(0.0, 0.0));
    out
}

/// A list of polynomials in a common set of variables together with their
/// symbolic Jacobian. Need not be square; the homotopy builds non-square
/// homogenized maps from these.
#[derive(Clone, Debug)]
pub struct PolyMap {
    num_vars: usize,
    polys: Vec<Polynomial>,
    jac: Vec<Vec<Polynomial>>,
}

impl PolyMap {
    pub fn new(num_vars: usize, polys: Vec<Polynomial>) -> Result<Self> {
        for (i, p) in polys.iter().enumerate() {
            for m in p {
                if m.exponents.len() != num_vars {
                    return Err(Error::InvalidSystem(format!(
                        "polynomial {i}: exponent vector of length {} in a {num_vars}-variable system",
                        m.exponents.len()
                    )));
                }
                if !(m.coeff.re.is_finite() && m.coeff.im.is_finite()) {
                    return Err(Error::InvalidSystem(format!(
                        "polynomial {i}: non-finite coefficient"
                    )));
                }
            }
        }
        let jac = polys
            .iter()
            .map(|p| {
                (0..num_vars)
                    .map(|j| p.iter().filter_map(|m| m.derivative(j)).collect())
                    .collect()
            })
            .collect();
        Ok(Self {
            num_vars,
            polys,
            jac,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_polys(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.polys.iter().map(|p| poly_degree(p)).collect()
    }

    /// Unchecked evaluation into a caller buffer; the hot path for tracking.
    #[inline]
    pub fn eval_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.num_vars);
        for (o, p) in out.iter_mut().zip(&self.polys) {
            *o = poly_eval(p, x);
        }
    }

    /// `max_i |f_i(x)| / max(1, Σ_α |c_α x^α|)`: the residual relative to the
    /// size of the terms that cancel in each equation.
    pub fn scaled_residual(&self, x: &[Complex64]) -> f64 {
        self.polys
            .iter()
            .map(|p| {
                let (sum, scale) = p.iter().fold((Complex64::default(), 0.0), |(s, a), m| {
                    let v = m.eval(x);
                    (s + v, a + v.norm())
                });
                sum.norm() / scale.max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// Unchecked Jacobian into the top-left `num_polys × num_vars` block of `out`.
    #[inline]
    pub fn jacobian_into(&self, x: &[Complex64], out: &mut DMatrix<Complex64>) {
        debug_assert_eq!(x.len(), self.num_vars);
        for (i, row) in self.jac.iter().enumerate() {
            for (j, d) in row.iter().enumerate() {
                out[(i, j)] = poly_eval(d, x);
            }
        }
    }

    /// Prepend a homogenizing variable `x0`, raising each monomial of
    /// polynomial `i` to total degree `d_i`.
    pub fn homogenize(&self) -> PolyMap {
        let polys = self
            .polys
            .iter()
            .map(|p| {
                let d = poly_degree(p);
                p.iter()
                    .map(|m| {
                        let mut exponents = Vec::with_capacity(self.num_vars + 1);
                        exponents.push(d - m.degree());
                        exponents.extend_from_slice(&m.exponents);
                        Monomial {
                            coeff: m.coeff,
                            exponents,
                        }
                    })
                    .collect()
            })
            .collect();
        PolyMap::new(self.num_vars + 1, polys).expect("homogenization preserves validity")
    }
}

/// Square polynomial system `F: C^n -> C^n`.
#[derive(Clone, Debug)]
pub struct PolynomialSystem {
    map: PolyMap,
    var_names: Vec<String>,
}

impl PolynomialSystem {
    pub fn new(num_vars: usize, polys: Vec<Polynomial>, var_names: Vec<String>) -> Result<Self> {
        if polys.len() != num_vars {
            return Err(Error::InvalidSystem(format!(
                "{} polynomials in {num_vars} variables; system must be square",
                polys.len()
            )));
        }
        if var_names.len() != num_vars {
            return Err(Error::InvalidSystem(format!(
                "{} variable names for {num_vars} variables",
                var_names.len()
            )));
        }
        let polys: Vec<Polynomial> = polys.into_iter().map(normalize).collect();
        for (i, p) in polys.iter().enumerate() {
            if p.is_empty() {
                return Err(Error::InvalidSystem(format!("polynomial {i} is identically zero")));
            }
            if poly_degree(p) == 0 {
                return Err(Error::InvalidSystem(format!("polynomial {i} is a nonzero constant")));
            }
        }
        Ok(Self {
            map: PolyMap::new(num_vars, polys)?,
            var_names,
        })
    }

    /// Convenience constructor naming variables `x1..xn`.
    pub fn with_default_names(num_vars: usize, polys: Vec<Polynomial>) -> Result<Self> {
        let names = (1..=num_vars).map(|i| format!("x{i}")).collect();
        Self::new(num_vars, polys, names)
    }

    pub fn num_vars(&self) -> usize {
        self.map.num_vars
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.map.polys
    }

    pub fn map(&self) -> &PolyMap {
        &self.map
    }

    fn check_dim(&self, point: &[Complex64]) -> Result<()> {
        if point.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                got: point.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_dim(point)?;
        let mut out = vec![Complex64::default(); self.num_vars()];
        self.map.eval_into(point, &mut out);
        if out.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Overflow("non-finite polynomial value".into()));
        }
        Ok(out)
    }

    pub fn jacobian(&self, point: &[Complex64]) -> Result<DMatrix<Complex64>> {
        self.check_dim(point)?;
        let n = self.num_vars();
        let mut out = DMatrix::zeros(n, n);
        self.map.jacobian_into(point, &mut out);
        Ok(out)
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.map.degrees()
    }

    /// Bézout number: the product of the per-equation degrees.
    pub fn total_degree(&self) -> Result<u64> {
        self.degrees().iter().try_fold(1u64, |acc, &d| {
            acc.checked_mul(u64::from(d))
                .ok_or_else(|| Error::Overflow("total degree exceeds u64".into()))
        })
    }

    /// ∞-norm of the system value at `point`.
    pub fn residual_norm(&self, point: &[Complex64]) -> Result<f64> {
        Ok(inf_norm(&self.evaluate(point)?))
    }

    /// Whether every coefficient has zero imaginary part.
    pub fn has_real_coefficients(&self) -> bool {
        self.map
            .polys
            .iter()
            .flatten()
            .all(|m| m.coeff.im == 0.0)
    }
}

pub fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
