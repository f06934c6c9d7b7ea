use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// exp(-|u - v|^2 / (2 width^2))
    Rbf {
        width: f64,
    },
    Linear,
    /// (u.v + offset)^degree
    Polynomial {
        degree: u32,
        offset: f64,
    },
}

impl KernelSpec {
    pub fn rbf(width: f64) -> Result<KernelSpec> {
        let k = KernelSpec::Rbf { width };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Rbf { width } if !(width > 0.0 && width.is_finite()) => {
                Err(Error::invalid(format!("rbf width must be positive, got {width}")))
            }
            KernelSpec::Polynomial { degree: 0, .. } => Err(Error::invalid("polynomial degree must be >= 1")),
            _ => Ok(()),
        }
    }

    pub fn family(&self) -> KernelFamily {
        match self {
            KernelSpec::Rbf { .. } => KernelFamily::Rbf,
            KernelSpec::Linear => KernelFamily::Linear,
            KernelSpec::Polynomial { .. } => KernelFamily::Polynomial,
        }
    }

    pub fn eval(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), got: v.len() });
        }
        Ok(self.eval_unchecked(u, v))
    }

    fn eval_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        match *self {
            KernelSpec::Rbf { width } => {
                let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * width * width)).exp()
            }
            KernelSpec::Linear => dot(u, v),
            KernelSpec::Polynomial { degree, offset } => (dot(u, v) + offset).powi(degree as i32),
        }
    }

    /// Symmetric Gram matrix over the rows of `x`; each unordered pair is
    /// evaluated once and mirrored.
    pub fn gram(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let rows = rows_of(x);
        let n = rows.len();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let k = self.eval_unchecked(&rows[i], &rows[j]);
                g[(i, j)] = k;
                g[(j, i)] = k;
            }
        }
        g
    }

    /// `K[i][j] = k(a_i, b_j)`.
    pub fn cross(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if a.ncols() != b.ncols() {
            return Err(Error::DimensionMismatch { expected: a.ncols(), got: b.ncols() });
        }
        let ra = rows_of(a);
        let rb = rows_of(b);
        Ok(DMatrix::from_fn(ra.len(), rb.len(), |i, j| self.eval_unchecked(&ra[i], &rb[j])))
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Rbf { width } => write!(f, "rbf width={width:?}"),
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Polynomial { degree, offset } => {
                write!(f, "polynomial degree={degree} offset={offset:?}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Rbf,
    Linear,
    Polynomial,
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rbf" | "gaussian" => Ok(KernelFamily::Rbf),
            "linear" => Ok(KernelFamily::Linear),
            "polynomial" | "poly" => Ok(KernelFamily::Polynomial),
            _ => Err(Error::invalid(format!("unknown kernel `{s}`; expected rbf, linear or polynomial"))),
        }
    }
}

pub fn kernel_eval(spec: &KernelSpec, u: &[f64], v: &[f64]) -> Result<f64> {
    spec.eval(u, v)
}

pub fn gram(spec: &KernelSpec, x: &DMatrix<f64>) -> DMatrix<f64> {
    spec.gram(x)
}

/// H = I - (1/N) 11^T.
pub fn centering_matrix(n: usize) -> DMatrix<f64> {
    let c = 1.0 / n as f64;
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 - c } else { -c })
}

pub(crate) fn rows_of(x: &DMatrix<f64>) -> Vec<Vec<f64>> {
    x.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}
