//! Finite-dimensional operator algebras and their correspondence with
//! normalized polynomial maps.
//!
//! A normalized map `F = X - H` with `H = sum_l H_l` is encoded by one
//! symmetric `l`-linear operator per degree, `Psi_l`, chosen so that
//! `Psi_l(x, ..., x) = H_l(x)`.

mod term;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::One;

pub use term::{
    enumerate_shapes, enumerate_terms, evaluate_term, generic_realization, TermExpr, TermSums, TermTree,
};
pub(crate) use term::compositions as compositions_of;

use crate::context::{is_identifier, same_ctx, Ctx};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::PolyMatrix;
use crate::monomial::Monomial;
use crate::polymap::PolyMap;
use crate::polynomial::Polynomial;

/// Values a multilinear operator can be evaluated on.
pub trait Coordinate: Clone {
    fn zero_like(&self) -> Self;
    fn is_zero_value(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scaled(&self, c: &Scalar) -> Self;
}

impl Coordinate for Scalar {
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, c: &Scalar) -> Self {
        self * c
    }
}

impl Coordinate for Polynomial {
    fn zero_like(&self) -> Self {
        Polynomial::zero(self.ctx())
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, c: &Scalar) -> Self {
        self.scale(c)
    }
}

/// A vector of forms of one common degree, one per coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousFormVector {
    degree: u32,
    forms: Vec<Polynomial>,
}

impl HomogeneousFormVector {
    pub fn new(ctx: &Ctx, degree: u32, forms: Vec<Polynomial>) -> Result<Self> {
        if forms.len() != ctx.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} forms for {} variables",
                forms.len(),
                ctx.len()
            )));
        }
        for f in &forms {
            if !same_ctx(f.ctx(), ctx) {
                return Err(Error::ContextMismatch);
            }
            if !f.is_homogeneous_of(degree) {
                return Err(Error::NotHomogeneous(degree));
            }
        }
        Ok(HomogeneousFormVector { degree, forms })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn forms(&self) -> &[Polynomial] {
        &self.forms
    }

    pub fn ctx(&self) -> &Ctx {
        self.forms[0].ctx()
    }
}

/// Number of distinct orderings of a sorted index multiset.
pub(crate) fn multinomial(sorted: &[usize]) -> BigInt {
    let mut out = BigInt::one();
    let mut run = 0u64;
    for (k, w) in sorted.iter().enumerate() {
        run = if k > 0 && sorted[k - 1] == *w { run + 1 } else { 1 };
        out = out * BigInt::from(k as u64 + 1) / BigInt::from(run);
    }
    out
}

/// Calls `f` on every distinct permutation of a sorted slice.
fn for_each_distinct_permutation(sorted: &[usize], mut f: impl FnMut(&[usize])) {
    let mut p = sorted.to_vec();
    loop {
        f(&p);
        // next lexicographic permutation
        let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

fn exponent_multiset(m: &Monomial) -> Vec<usize> {
    m.exponents()
        .iter()
        .enumerate()
        .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
        .collect()
}

fn multiset_monomial(nvars: usize, indices: &[usize]) -> Monomial {
    let mut exps = vec![0u32; nvars];
    for &i in indices {
        exps[i] += 1;
    }
    Monomial::new(exps)
}

type ExpandedTuple = (Vec<usize>, Vec<(usize, Scalar)>);

/// An `arity`-linear operator on a `dim`-dimensional space, stored by
/// structure constants on basis vectors.
///
/// A symmetric operator keys its constants by sorted index multisets and
/// takes the same value on every reordering of its arguments. An ordered
/// operator keys them by index tuples.
#[derive(Clone, Debug)]
pub struct MultilinearOp {
    name: String,
    arity: usize,
    dim: usize,
    field: Field,
    symmetric: bool,
    coeffs: BTreeMap<(usize, Vec<usize>), Scalar>,
    // ordered argument tuples with their nonzero (output, constant) pairs,
    // built on first evaluation since high arities have many orderings
    expanded: OnceLock<Vec<ExpandedTuple>>,
}

impl PartialEq for MultilinearOp {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.arity == other.arity
            && self.dim == other.dim
            && self.field == other.field
            && self.symmetric == other.symmetric
            && self.coeffs == other.coeffs
    }
}

impl Eq for MultilinearOp {}

impl MultilinearOp {
    pub fn symmetric<I>(name: &str, arity: usize, dim: usize, field: Field, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Vec<usize>, Scalar)>,
    {
        Self::build(name, arity, dim, field, true, entries)
    }

    pub fn ordered<I>(name: &str, arity: usize, dim: usize, field: Field, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Vec<usize>, Scalar)>,
    {
        Self::build(name, arity, dim, field, false, entries)
    }

    fn build<I>(name: &str, arity: usize, dim: usize, field: Field, symmetric: bool, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Vec<usize>, Scalar)>,
    {
        if !is_identifier(name) {
            return Err(Error::InvalidContext(format!("bad operator name `{name}`")));
        }
        if arity < 2 {
            return Err(Error::ArityMismatch { expected: 2, got: arity });
        }
        if dim == 0 {
            return Err(Error::DimensionMismatch("operator on a zero space".into()));
        }
        let mut coeffs: BTreeMap<(usize, Vec<usize>), Scalar> = BTreeMap::new();
        for (out, mut idx, c) in entries {
            if idx.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, got: idx.len() });
            }
            for &i in idx.iter().chain([&out]) {
                if i >= dim {
                    return Err(Error::IndexOutOfRange { index: i, len: dim });
                }
            }
            if c.field() != field {
                return Err(Error::ContextMismatch);
            }
            if symmetric {
                idx.sort_unstable();
            }
            let slot = coeffs.entry((out, idx)).or_insert_with(|| field.zero());
            *slot = &*slot + &c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(MultilinearOp {
            name: name.to_string(),
            arity,
            dim,
            field,
            symmetric,
            coeffs,
            expanded: OnceLock::new(),
        })
    }

    fn expanded(&self) -> &[ExpandedTuple] {
        self.expanded.get_or_init(|| {
            let mut by_tuple: BTreeMap<Vec<usize>, Vec<(usize, Scalar)>> = BTreeMap::new();
            for ((out, idx), c) in &self.coeffs {
                if self.symmetric {
                    for_each_distinct_permutation(idx, |p| {
                        by_tuple.entry(p.to_vec()).or_default().push((*out, c.clone()))
                    });
                } else {
                    by_tuple.entry(idx.clone()).or_default().push((*out, c.clone()));
                }
            }
            by_tuple.into_iter().collect()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero structure constants as `((output, indices), value)`.
    pub fn coefficients(&self) -> impl Iterator<Item = (&(usize, Vec<usize>), &Scalar)> {
        self.coeffs.iter()
    }

    pub fn num_coefficients(&self) -> usize {
        self.coeffs.len()
    }

    /// Value of output coordinate `out` on the basis vectors `indices`.
    pub fn coefficient(&self, out: usize, indices: &[usize]) -> Scalar {
        let mut key = indices.to_vec();
        if self.symmetric {
            key.sort_unstable();
        }
        self.coeffs
            .get(&(out, key))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn with_name(&self, name: &str) -> Result<Self> {
        if !is_identifier(name) {
            return Err(Error::InvalidContext(format!("bad operator name `{name}`")));
        }
        let mut out = self.clone();
        out.name = name.to_string();
        Ok(out)
    }

    /// Applies the operator to `arity` coordinate vectors.
    pub fn evaluate<T: Coordinate>(&self, args: &[&[T]]) -> Result<Vec<T>> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: args.len() });
        }
        if let Some(bad) = args.iter().find(|a| a.len() != self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "argument of length {} for an operator on dimension {}",
                bad.len(),
                self.dim
            )));
        }
        let zero = args[0][0].zero_like();
        let mut out = vec![zero; self.dim];
        'tuples: for (tuple, outputs) in self.expanded() {
            let mut prod = args[0][tuple[0]].clone();
            if prod.is_zero_value() {
                continue;
            }
            for (k, &i) in tuple.iter().enumerate().skip(1) {
                let factor = &args[k][i];
                if factor.is_zero_value() {
                    continue 'tuples;
                }
                prod = prod.times(factor);
            }
            for (o, c) in outputs {
                out[*o] = out[*o].plus(&prod.scaled(c));
            }
        }
        Ok(out)
    }

    /// The forms `Psi(x, ..., x)` in the variables of `ctx`.
    pub fn restitute(&self, ctx: &Ctx) -> Result<Vec<Polynomial>> {
        self.check_ctx(ctx)?;
        let mut terms: Vec<Vec<(Monomial, Scalar)>> = vec![Vec::new(); self.dim];
        for ((out, idx), c) in &self.coeffs {
            let c = if self.symmetric {
                c * &self.field.from_bigint(&multinomial(idx))
            } else {
                c.clone()
            };
            terms[*out].push((multiset_monomial(self.dim, idx), c));
        }
        Ok(terms
            .into_iter()
            .map(|t| Polynomial::from_terms(ctx, t))
            .collect())
    }

    /// The matrix of `y -> Psi(y, x, ..., x)`; entry `(i, j)` is the
    /// coefficient of `y_j` in coordinate `i`.
    pub fn ad_matrix(&self, ctx: &Ctx) -> Result<PolyMatrix> {
        self.check_ctx(ctx)?;
        let n = self.dim;
        let mut terms: Vec<Vec<Vec<(Monomial, Scalar)>>> = vec![vec![Vec::new(); n]; n];
        for ((out, idx), c) in &self.coeffs {
            if self.symmetric {
                let mut seen = None;
                for (k, &j) in idx.iter().enumerate() {
                    if seen == Some(j) {
                        continue;
                    }
                    seen = Some(j);
                    let mut rest = idx.clone();
                    rest.remove(k);
                    let c = c * &self.field.from_bigint(&multinomial(&rest));
                    terms[*out][j].push((multiset_monomial(n, &rest), c));
                }
            } else {
                terms[*out][idx[0]].push((multiset_monomial(n, &idx[1..]), c.clone()));
            }
        }
        let rows = terms
            .into_iter()
            .map(|row| row.into_iter().map(|t| Polynomial::from_terms(ctx, t)).collect())
            .collect();
        PolyMatrix::from_rows(ctx, rows)
    }

    fn check_ctx(&self, ctx: &Ctx) -> Result<()> {
        if ctx.len() != self.dim || ctx.field() != self.field {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }
}

/// The unique symmetric multilinear operator whose diagonal is `form`.
///
/// Over `GF(p)` this needs every multinomial coefficient of a monomial that
/// actually occurs to be invertible.
pub fn polarize(form: &HomogeneousFormVector, name: &str) -> Result<MultilinearOp> {
    let ctx = form.ctx();
    let field = ctx.field();
    let arity = form.degree as usize;
    let mut entries = Vec::new();
    for (i, f) in form.forms.iter().enumerate() {
        for (m, c) in f.terms() {
            let idx = exponent_multiset(m);
            let weight = field.from_bigint(&multinomial(&idx));
            let inv = weight.inv().map_err(|_| Error::CharacteristicObstruction {
                characteristic: field.characteristic(),
                degree: form.degree,
            })?;
            entries.push((i, idx, c * &inv));
        }
    }
    MultilinearOp::symmetric(name, arity, ctx.len(), field, entries)
}

/// A basis-labelled vector space with a finite signature of operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorAlgebra {
    ctx: Ctx,
    ops: Vec<MultilinearOp>,
}

impl OperatorAlgebra {
    pub fn new(ctx: &Ctx, ops: Vec<MultilinearOp>) -> Result<Self> {
        for (k, op) in ops.iter().enumerate() {
            if op.dim != ctx.len() || op.field != ctx.field() {
                return Err(Error::ContextMismatch);
            }
            if ops[..k].iter().any(|o| o.name == op.name) {
                return Err(Error::InvalidContext(format!("operator `{}` declared twice", op.name)));
            }
        }
        Ok(OperatorAlgebra { ctx: ctx.clone(), ops })
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.len()
    }

    pub fn field(&self) -> Field {
        self.ctx.field()
    }

    pub fn ops(&self) -> &[MultilinearOp] {
        &self.ops
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    /// Arities of the operators in declaration order.
    pub fn signature(&self) -> Vec<usize> {
        self.ops.iter().map(|o| o.arity).collect()
    }

    pub fn max_arity(&self) -> usize {
        self.ops.iter().map(|o| o.arity).max().unwrap_or(1)
    }

    pub fn is_symmetric(&self) -> bool {
        self.ops.iter().all(|o| o.symmetric)
    }
}

/// The algebra of a normalized map: one operator `psi<l>` per degree `l`
/// occurring in `X - F`.
pub fn map_to_algebra(f: &PolyMap) -> Result<OperatorAlgebra> {
    if !f.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let ctx = f.ctx();
    let h: Vec<Polynomial> = f
        .images()
        .iter()
        .enumerate()
        .map(|(i, p)| &Polynomial::var(ctx, i) - p)
        .collect();
    let mut by_degree: BTreeMap<u32, Vec<Polynomial>> = BTreeMap::new();
    for (i, p) in h.iter().enumerate() {
        for (d, part) in p.homogeneous_components() {
            by_degree
                .entry(d)
                .or_insert_with(|| vec![Polynomial::zero(ctx); ctx.len()])[i] = part;
        }
    }
    let mut ops = Vec::new();
    for (d, forms) in by_degree {
        let form = HomogeneousFormVector::new(ctx, d, forms)?;
        ops.push(polarize(&form, &format!("psi{d}"))?);
    }
    OperatorAlgebra::new(ctx, ops)
}

/// The map `X - sum Psi(x, ..., x)` in the basis variables of `a`.
pub fn algebra_to_map(a: &OperatorAlgebra) -> Result<PolyMap> {
    let ctx = a.ctx();
    let mut images: Vec<Polynomial> = (0..ctx.len()).map(|i| Polynomial::var(ctx, i)).collect();
    for op in &a.ops {
        for (img, form) in images.iter_mut().zip(op.restitute(ctx)?) {
            *img = &*img - &form;
        }
    }
    PolyMap::new(ctx, images)
}
