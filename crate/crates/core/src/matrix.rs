//! Square matrices over the polynomial ring and over the ground field.

use std::fmt;

use crate::context::{same_ctx, Ctx};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::polynomial::Polynomial;

/// An `n x n` matrix of polynomials sharing one context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    ctx: Ctx,
    rows: Vec<Vec<Polynomial>>,
}

impl PolyMatrix {
    pub fn from_rows(ctx: &Ctx, rows: Vec<Vec<Polynomial>>) -> Result<PolyMatrix> {
        let n = rows.len();
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch("matrix is not square".into()));
            }
            if row.iter().any(|p| !same_ctx(p.ctx(), ctx)) {
                return Err(Error::ContextMismatch);
            }
        }
        Ok(PolyMatrix { ctx: ctx.clone(), rows })
    }

    pub fn zero(ctx: &Ctx, n: usize) -> PolyMatrix {
        PolyMatrix {
            ctx: ctx.clone(),
            rows: vec![vec![Polynomial::zero(ctx); n]; n],
        }
    }

    pub fn identity(ctx: &Ctx, n: usize) -> PolyMatrix {
        let mut m = PolyMatrix::zero(ctx, n);
        for i in 0..n {
            m.rows[i][i] = Polynomial::one(ctx);
        }
        m
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert!(same_ctx(p.ctx(), &self.ctx));
        self.rows[i][j] = p;
    }

    pub fn rows(&self) -> &[Vec<Polynomial>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Polynomial::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, p)| if i == j { p.is_one() } else { p.is_zero() })
        })
    }

    /// Largest entry degree, `None` for the zero matrix.
    pub fn degree(&self) -> Option<u32> {
        self.rows.iter().flatten().filter_map(Polynomial::degree).max()
    }

    pub fn map_entries<F>(&self, f: F) -> PolyMatrix
    where
        F: Fn(&Polynomial) -> Polynomial,
    {
        let rows: Vec<Vec<Polynomial>> =
            self.rows.iter().map(|r| r.iter().map(&f).collect()).collect();
        let ctx = rows
            .first()
            .and_then(|r| r.first())
            .map(|p| p.ctx().clone())
            .unwrap_or_else(|| self.ctx.clone());
        PolyMatrix { ctx, rows }
    }

    pub fn try_map_entries<F>(&self, f: F) -> Result<PolyMatrix>
    where
        F: Fn(&Polynomial) -> Result<Polynomial>,
    {
        let rows: Vec<Vec<Polynomial>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(&f).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let ctx = rows
            .first()
            .and_then(|r| r.first())
            .map(|p| p.ctx().clone())
            .unwrap_or_else(|| self.ctx.clone());
        PolyMatrix::from_rows(&ctx, rows)
    }

    pub fn scale(&self, c: &Scalar) -> PolyMatrix {
        self.map_entries(|p| p.scale(c))
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        self.zip(other, |a, b| a - b)
    }

    fn zip<F>(&self, other: &PolyMatrix, f: F) -> PolyMatrix
    where
        F: Fn(&Polynomial, &Polynomial) -> Polynomial,
    {
        assert_eq!(self.size(), other.size());
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(x, y)).collect())
            .collect();
        PolyMatrix { ctx: self.ctx.clone(), rows }
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        self.mul_truncated(other, None)
    }

    /// Matrix product with entry terms above `max_degree` dropped.
    pub fn mul_truncated(&self, other: &PolyMatrix, max_degree: Option<u32>) -> PolyMatrix {
        let n = self.size();
        assert_eq!(n, other.size());
        let mut out = PolyMatrix::zero(&self.ctx, n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.rows[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.rows[k][j];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul_truncated(b, max_degree);
                    out.rows[i][j] = &out.rows[i][j] + &prod;
                }
            }
        }
        out
    }

    pub fn homogeneous_part(&self, degree: u32) -> PolyMatrix {
        self.map_entries(|p| p.homogeneous_part(degree))
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Polynomial {
        let n = self.size();
        if n == 0 {
            return Polynomial::one(&self.ctx);
        }
        let mut m = self.rows.clone();
        let mut negate = false;
        let mut prev = Polynomial::one(&self.ctx);
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                let pivot = (k + 1..n)
                    .filter(|&i| !m[i][k].is_zero())
                    .min_by_key(|&i| m[i][k].num_terms());
                match pivot {
                    Some(i) => {
                        m.swap(k, i);
                        negate = !negate;
                    }
                    None => return Polynomial::zero(&self.ctx),
                }
            }
            let prev_const = (prev.degree() == Some(0)).then(|| prev.constant_term());
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&m[i][j] * &m[k][k]) - &(&m[i][k] * &m[k][j]);
                    m[i][j] = match &prev_const {
                        Some(c) => num.scale(&c.inv().expect("pivot is nonzero")),
                        None => num
                            .div_exact(&prev)
                            .expect("Bareiss quotients are exact"),
                    };
                }
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if negate {
            -d
        } else {
            d
        }
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// A dense matrix over the ground field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarMatrix {
    field: Field,
    rows: Vec<Vec<Scalar>>,
}

impl ScalarMatrix {
    pub fn new(field: Field, rows: Vec<Vec<Scalar>>) -> ScalarMatrix {
        ScalarMatrix { field, rows }
    }

    pub fn identity(field: Field, n: usize) -> ScalarMatrix {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| field.from_i64((i == j) as i64)).collect())
            .collect();
        ScalarMatrix { field, rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    pub fn is_identity(&self) -> bool {
        *self == ScalarMatrix::identity(self.field, self.size())
    }

    /// Inverse by Gauss-Jordan elimination, `None` when singular.
    pub fn inverse(&self) -> Option<ScalarMatrix> {
        let n = self.size();
        let mut a = self.rows.clone();
        let mut inv = ScalarMatrix::identity(self.field, n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].inv().expect("nonzero pivot");
            for j in 0..n {
                a[col][j] = &a[col][j] * &p;
                inv[col][j] = &inv[col][j] * &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = &a[r][j] - &(&f * &a[col][j]);
                    inv[r][j] = &inv[r][j] - &(&f * &inv[col][j]);
                }
            }
        }
        Some(ScalarMatrix { field: self.field, rows: inv })
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(self.field.zero(), |acc, (a, b)| &acc + &(a * b))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::VarContext;
    use crate::parse::parse_polynomial;

    fn mat(ctx: &Ctx, rows: &[&[&str]]) -> PolyMatrix {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_polynomial(s, ctx).unwrap()).collect())
            .collect();
        PolyMatrix::from_rows(ctx, rows).unwrap()
    }

    #[test]
    fn det_needs_pivoting() {
        let c = VarContext::new(&["x", "y"], Field::Rationals).unwrap();
        let m = mat(&c, &[&["0", "x", "1"], &["y", "0", "0"], &["1", "1", "x"]]);
        // expand along the second row: -y * (x*x - 1)
        assert_eq!(m.det().to_string(), "-x^2*y + y");
        assert!(PolyMatrix::identity(&c, 3).det().is_one());
        let singular = mat(&c, &[&["x", "y"], &["x^2", "x*y"]]);
        assert!(singular.det().is_zero());
    }

    #[test]
    fn scalar_inverse() {
        let f = Field::Rationals;
        let m = ScalarMatrix::new(
            f,
            vec![vec![f.from_i64(2), f.from_i64(1)], vec![f.from_i64(1), f.from_i64(1)]],
        );
        let inv = m.inverse().unwrap();
        assert_eq!(inv.rows()[0], vec![f.from_i64(1), f.from_i64(-1)]);
        let s = ScalarMatrix::new(
            f,
            vec![vec![f.from_i64(1), f.from_i64(2)], vec![f.from_i64(2), f.from_i64(4)]],
        );
        assert!(s.inverse().is_none());
    }
}
