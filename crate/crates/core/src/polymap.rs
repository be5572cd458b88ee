//! Polynomial endomorphisms of affine space.
//!
//! A [`PolyMap`] stores the image of every variable. Composition follows one
//! fixed convention: `compose(outer, inner)` sends `x_i` to `inner(x_i)` with
//! the images of `outer` substituted for the variables, i.e. `outer` acts on
//! `inner` as an algebra endomorphism. Read as maps of points this is
//! `inner ∘ outer`. Under this convention the cubic-reduction step
//! `compose(G1, compose(F, G2))` produces `x - yz - y*t1*t2 - z*t3*t4`.

use std::fmt;

use crate::context::{same_ctx, Ctx};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::matrix::{PolyMatrix, ScalarMatrix};
use crate::monomial::Monomial;
use crate::parse::parse_polynomial;
use crate::polynomial::Polynomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    ctx: Ctx,
    images: Vec<Polynomial>,
}

/// `v ↦ linear * v + translation` on points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub linear: ScalarMatrix,
    pub translation: Vec<Scalar>,
}

impl AffineMap {
    pub fn identity(ctx: &Ctx) -> AffineMap {
        let field = ctx.field();
        AffineMap {
            linear: ScalarMatrix::identity(field, ctx.len()),
            translation: vec![field.zero(); ctx.len()],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.linear.is_identity() && self.translation.iter().all(Scalar::is_zero)
    }

    pub fn is_invertible(&self) -> bool {
        self.linear.inverse().is_some()
    }

    pub fn to_polymap(&self, ctx: &Ctx) -> PolyMap {
        let n = ctx.len();
        let images = (0..n)
            .map(|i| {
                let mut p = Polynomial::constant(ctx, self.translation[i].clone());
                for k in 0..n {
                    p = &p + &Polynomial::var(ctx, k).scale(self.linear.get(i, k));
                }
                p
            })
            .collect();
        PolyMap { ctx: ctx.clone(), images }
    }
}

impl PolyMap {
    pub fn new(ctx: &Ctx, images: Vec<Polynomial>) -> Result<PolyMap> {
        if images.len() != ctx.len() || images.iter().any(|p| !same_ctx(p.ctx(), ctx)) {
            return Err(Error::ContextMismatch);
        }
        Ok(PolyMap { ctx: ctx.clone(), images })
    }

    /// Parses one image per variable, in context order.
    pub fn from_strings<S: AsRef<str>>(ctx: &Ctx, images: &[S]) -> Result<PolyMap> {
        let images = images
            .iter()
            .map(|s| parse_polynomial(s.as_ref(), ctx))
            .collect::<Result<Vec<_>>>()?;
        PolyMap::new(ctx, images)
    }

    pub fn identity(ctx: &Ctx) -> PolyMap {
        PolyMap {
            ctx: ctx.clone(),
            images: (0..ctx.len()).map(|i| Polynomial::var(ctx, i)).collect(),
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.ctx.len()
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Polynomial {
        &self.images[i]
    }

    pub fn into_images(self) -> Vec<Polynomial> {
        self.images
    }

    /// Largest image degree, `None` when every image is zero.
    pub fn degree(&self) -> Option<u32> {
        self.images.iter().filter_map(Polynomial::degree).max()
    }

    pub fn is_identity(&self) -> bool {
        *self == PolyMap::identity(&self.ctx)
    }

    /// Constant terms vanish and the linear part is the identity.
    pub fn is_normalized(&self) -> bool {
        let n = self.nvars();
        self.images.iter().enumerate().all(|(i, p)| {
            p.constant_term().is_zero()
                && (0..n).all(|k| {
                    let c = p.coefficient(&Monomial::var(n, k));
                    if i == k {
                        c.is_one()
                    } else {
                        c.is_zero()
                    }
                })
        })
    }

    /// Checks that every nonlinear monomial has degree exactly 3.
    pub fn is_cubic_homogeneous(&self) -> bool {
        self.is_normalized()
            && self
                .images
                .iter()
                .all(|p| p.terms().all(|(m, _)| m.degree() <= 1 || m.degree() == 3))
    }

    /// `μ[i][k]` is the coefficient of `x_k` in image `i`.
    pub fn linear_part(&self) -> ScalarMatrix {
        let n = self.nvars();
        let rows = self
            .images
            .iter()
            .map(|p| (0..n).map(|k| p.coefficient(&Monomial::var(n, k))).collect())
            .collect();
        ScalarMatrix::new(self.ctx.field(), rows)
    }

    pub fn constant_part(&self) -> Vec<Scalar> {
        self.images.iter().map(Polynomial::constant_term).collect()
    }

    pub fn compose(outer: &PolyMap, inner: &PolyMap) -> Result<PolyMap> {
        if !same_ctx(&outer.ctx, &inner.ctx) {
            return Err(Error::ContextMismatch);
        }
        let images = inner
            .images
            .iter()
            .map(|p| p.substitute(&outer.images))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap { ctx: outer.ctx.clone(), images })
    }

    /// `compose(self, inner)` keeping only terms of degree `<= max_degree`.
    pub fn compose_truncated(&self, inner: &PolyMap, max_degree: u32) -> Result<PolyMap> {
        if !same_ctx(&self.ctx, &inner.ctx) {
            return Err(Error::ContextMismatch);
        }
        let images = inner
            .images
            .iter()
            .map(|p| p.substitute_truncated(&self.images, Some(max_degree)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap { ctx: self.ctx.clone(), images })
    }

    /// Brings the map to the shape `x_i ↦ x_i + (terms of degree >= 2)`.
    ///
    /// Returns `(N, T, L)` with `T` the translation removing `F(0)` and `L`
    /// the inverse of the linear part, so that `N = L ∘ T ∘ F` on points.
    pub fn normalize(&self) -> Result<(PolyMap, AffineMap, AffineMap)> {
        let field = self.ctx.field();
        let n = self.nvars();
        let c = self.constant_part();
        let mu = self.linear_part();
        let mu_inv = mu.inverse().ok_or(Error::SingularLinearPart)?;
        let translate = AffineMap {
            linear: ScalarMatrix::identity(field, n),
            translation: c.iter().map(|v| -v).collect(),
        };
        let linear = AffineMap {
            linear: mu_inv.clone(),
            translation: vec![field.zero(); n],
        };
        let shifted: Vec<Polynomial> = self
            .images
            .iter()
            .zip(&c)
            .map(|(p, ci)| p - &Polynomial::constant(&self.ctx, ci.clone()))
            .collect();
        let images = (0..n)
            .map(|i| {
                let mut acc = Polynomial::zero(&self.ctx);
                for (k, s) in shifted.iter().enumerate() {
                    let a = mu_inv.get(i, k);
                    if !a.is_zero() {
                        acc = &acc + &s.scale(a);
                    }
                }
                acc
            })
            .collect();
        let normalized = PolyMap { ctx: self.ctx.clone(), images };
        debug_assert!(normalized.is_normalized());
        Ok((normalized, translate, linear))
    }

    /// Entry `(i, j)` is `∂ image_i / ∂ x_j`.
    pub fn jacobian(&self) -> PolyMatrix {
        let rows = self
            .images
            .iter()
            .map(|p| {
                (0..self.nvars())
                    .map(|j| p.partial_derivative(j).expect("index in range"))
                    .collect()
            })
            .collect();
        PolyMatrix::from_rows(&self.ctx, rows).expect("square by construction")
    }

    pub fn jacobian_det(&self) -> Polynomial {
        self.jacobian().det()
    }

    /// Extends the map to a larger context (which must contain every current
    /// variable name); new variables are fixed.
    pub fn lift(&self, ctx: &Ctx) -> Result<PolyMap> {
        let mut images: Vec<Polynomial> = (0..ctx.len()).map(|i| Polynomial::var(ctx, i)).collect();
        for (i, name) in self.ctx.names().iter().enumerate() {
            let j = ctx
                .index_of(name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            images[j] = self.images[i].lift(ctx)?;
        }
        PolyMap::new(ctx, images)
    }

    /// Replaces image `i`.
    pub fn with_image(&self, i: usize, p: Polynomial) -> Result<PolyMap> {
        if !same_ctx(p.ctx(), &self.ctx) {
            return Err(Error::ContextMismatch);
        }
        let mut images = self.images.clone();
        images[i] = p;
        Ok(PolyMap { ctx: self.ctx.clone(), images })
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, p) in self.ctx.names().iter().zip(&self.images) {
            writeln!(f, "{name} -> {p}")?;
        }
        Ok(())
    }
}
