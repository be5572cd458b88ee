//! Sparse multivariate polynomials with exact coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;

use crate::context::{same_ctx, Ctx};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::monomial::Monomial;

/// A polynomial in the variables of its context. Terms are kept in a sorted
/// map with no zero coefficients, so structural equality is equality of
/// polynomials.
#[derive(Clone, Debug)]
pub struct Polynomial {
    ctx: Ctx,
    terms: BTreeMap<Monomial, Scalar>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        same_ctx(&self.ctx, &other.ctx) && self.terms == other.terms
    }
}

impl Eq for Polynomial {}

fn accumulate(acc: &mut HashMap<Monomial, Scalar>, m: Monomial, c: Scalar) {
    match acc.entry(m) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            let v = e.get() + &c;
            *e.get_mut() = v;
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

impl Polynomial {
    pub fn zero(ctx: &Ctx) -> Polynomial {
        Polynomial { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &Ctx, c: Scalar) -> Polynomial {
        let mut p = Polynomial::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ctx.len()), c);
        }
        p
    }

    pub fn one(ctx: &Ctx) -> Polynomial {
        Polynomial::constant(ctx, ctx.field().one())
    }

    pub fn from_i64(ctx: &Ctx, v: i64) -> Polynomial {
        Polynomial::constant(ctx, ctx.field().from_i64(v))
    }

    /// The variable at `index`.
    pub fn var(ctx: &Ctx, index: usize) -> Polynomial {
        assert!(index < ctx.len(), "variable index out of range");
        Polynomial::monomial(ctx, Monomial::var(ctx.len(), index), ctx.field().one())
    }

    /// The variable called `name`.
    pub fn named(ctx: &Ctx, name: &str) -> Result<Polynomial> {
        let i = ctx
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(Polynomial::var(ctx, i))
    }

    pub fn monomial(ctx: &Ctx, m: Monomial, c: Scalar) -> Polynomial {
        debug_assert_eq!(m.nvars(), ctx.len());
        let mut p = Polynomial::zero(ctx);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms<I>(ctx: &Ctx, terms: I) -> Polynomial
    where
        I: IntoIterator<Item = (Monomial, Scalar)>,
    {
        let mut acc = HashMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), ctx.len());
            accumulate(&mut acc, m, c);
        }
        Polynomial::from_map(ctx, acc)
    }

    fn from_map(ctx: &Ctx, acc: HashMap<Monomial, Scalar>) -> Polynomial {
        Polynomial {
            ctx: ctx.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn field(&self) -> Field {
        self.ctx.field()
    }

    pub fn nvars(&self) -> usize {
        self.ctx.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Lowest degree of a term, `None` for the zero polynomial.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn degree_in(&self, index: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(index)).max()
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one(self.nvars()))
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn is_homogeneous_of(&self, degree: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.degree() {
            None => true,
            Some(d) => self.is_homogeneous_of(d),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn scale_i64(&self, k: i64) -> Polynomial {
        self.scale(&self.field().from_i64(k))
    }

    fn check_ctx(&self, other: &Polynomial) {
        assert!(
            same_ctx(&self.ctx, &other.ctx),
            "polynomial arithmetic across different contexts"
        );
    }

    fn add_impl(&self, other: &Polynomial, negate: bool) -> Polynomial {
        self.check_ctx(other);
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let c = if negate { -c } else { c.clone() };
            match terms.get_mut(m) {
                Some(v) => {
                    let s = &*v + &c;
                    if s.is_zero() {
                        terms.remove(m);
                    } else {
                        *v = s;
                    }
                }
                None => {
                    terms.insert(m.clone(), c);
                }
            }
        }
        Polynomial { ctx: self.ctx.clone(), terms }
    }

    /// Product with every term of degree above `max_degree` dropped.
    pub fn mul_truncated(&self, other: &Polynomial, max_degree: Option<u32>) -> Polynomial {
        self.check_ctx(other);
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(&self.ctx);
        }
        let mut acc: HashMap<Monomial, Scalar> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(d) = max_degree {
                    if ma.degree() + mb.degree() > d {
                        // `other` is sorted by degree, so the rest are larger too.
                        break;
                    }
                }
                accumulate(&mut acc, ma.mul(mb), ca * cb);
            }
        }
        Polynomial::from_map(&self.ctx, acc)
    }

    pub fn pow(&self, exp: u32) -> Polynomial {
        self.pow_truncated(exp, None)
    }

    pub fn pow_truncated(&self, mut exp: u32, max_degree: Option<u32>) -> Polynomial {
        let mut acc = Polynomial::one(&self.ctx);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_truncated(&base, max_degree);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul_truncated(&base, max_degree);
            }
        }
        acc
    }

    /// Drops every term of degree above `max_degree`.
    pub fn truncated(&self, max_degree: u32) -> Polynomial {
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= max_degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, degree: u32) -> Polynomial {
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Splits into homogeneous components keyed by degree. Only degrees
    /// actually present appear as keys.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Polynomial::zero(&self.ctx))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub fn partial_derivative(&self, index: usize) -> Result<Polynomial> {
        if index >= self.nvars() {
            return Err(Error::IndexOutOfRange { index, len: self.nvars() });
        }
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(index);
            if e == 0 {
                return None;
            }
            let mut exps = m.exponents().to_vec();
            exps[index] -= 1;
            Some((Monomial::new(exps), c.mul_u64(e as u64)))
        });
        Ok(Polynomial::from_terms(&self.ctx, terms))
    }

    /// Replaces variable `i` by `images[i]`, expanding fully. The images may
    /// live in a different (for instance larger) context than `self`.
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        self.substitute_truncated(images, None)
    }

    pub fn substitute_truncated(
        &self,
        images: &[Polynomial],
        max_degree: Option<u32>,
    ) -> Result<Polynomial> {
        if images.len() != self.nvars() {
            return Err(Error::ContextMismatch);
        }
        let target = match images.first() {
            Some(p) => p.ctx.clone(),
            None => return Err(Error::ContextMismatch),
        };
        if images.iter().any(|p| !same_ctx(&p.ctx, &target)) {
            return Err(Error::ContextMismatch);
        }
        if target.field() != self.field() {
            return Err(Error::ContextMismatch);
        }
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(&target), p.clone()])
            .collect();
        let mut result: HashMap<Monomial, Scalar> = HashMap::new();
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(&target, c.clone());
            for (j, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[j];
                while cache.len() <= e as usize {
                    let next = cache
                        .last()
                        .expect("non-empty")
                        .mul_truncated(&images[j], max_degree);
                    cache.push(next);
                }
                term = term.mul_truncated(&cache[e as usize], max_degree);
                if term.is_zero() {
                    break;
                }
            }
            for (tm, tc) in term.terms {
                accumulate(&mut result, tm, tc);
            }
        }
        Ok(Polynomial::from_map(&target, result))
    }

    /// Re-expresses the polynomial in `ctx`, which must contain every
    /// variable name of the current context.
    pub fn lift(&self, ctx: &Ctx) -> Result<Polynomial> {
        if ctx.field() != self.field() {
            return Err(Error::ContextMismatch);
        }
        let map: Vec<usize> = self
            .ctx
            .names()
            .iter()
            .map(|n| ctx.index_of(n).ok_or_else(|| Error::UnknownVariable(n.clone())))
            .collect::<Result<_>>()?;
        let terms = self.terms.iter().map(|(m, c)| {
            let mut exps = vec![0; ctx.len()];
            for (i, &e) in m.exponents().iter().enumerate() {
                exps[map[i]] += e;
            }
            (Monomial::new(exps), c.clone())
        });
        Ok(Polynomial::from_terms(ctx, terms))
    }

    /// Evaluates at a point of the ground field.
    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.nvars() {
            return Err(Error::ContextMismatch);
        }
        let mut acc = self.field().zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t = &t * &x.pow(e as u64);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Exact quotient `self / divisor`; fails unless the division leaves no
    /// remainder.
    pub fn div_exact(&self, divisor: &Polynomial) -> Result<Polynomial> {
        self.check_ctx(divisor);
        let (lm, lc) = divisor.leading_term().ok_or(Error::DivisionByZero)?;
        let lc_inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quotient = Vec::new();
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(lm).ok_or(Error::NotDivisible)?;
            let qc = c * &lc_inv;
            let step = Polynomial::monomial(&self.ctx, qm.clone(), qc.clone());
            rem = &rem - &(&step * divisor);
            quotient.push((qm, qc));
        }
        Ok(Polynomial::from_terms(&self.ctx, quotient))
    }

    /// Multiplies by an integer constant given as a big integer.
    pub fn scale_bigint(&self, k: &BigInt) -> Polynomial {
        self.scale(&self.field().from_bigint(k))
    }

    /// Canonical text form: descending graded-lex order, coefficient first.
    pub fn to_canonical_string(&self) -> String {
        self.to_string()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.add_impl(rhs, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.add_impl(rhs, true)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.mul_truncated(rhs, None)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(mut iter: I) -> Polynomial {
        let first = iter.next().expect("sum of an empty polynomial iterator needs a context");
        iter.fold(first, |acc, p| &acc + &p)
    }
}

pub(crate) fn write_monomial(f: &mut impl fmt::Write, ctx: &Ctx, m: &Monomial) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_char('*')?;
        }
        first = false;
        f.write_str(ctx.name(i))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write_monomial(f, &self.ctx, m)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::VarContext;
    use crate::parse::parse_polynomial;

    fn q2() -> Ctx {
        VarContext::new(&["x1", "x2"], Field::Rationals).unwrap()
    }

    #[test]
    fn cancellation_gives_zero() {
        let c = q2();
        let p = parse_polynomial("x1 - x1", &c).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
        assert_eq!(p.to_string(), "0");
    }

    #[test]
    fn printing_is_graded_lex_descending() {
        let c = q2();
        let p = parse_polynomial("x1 + 3/2*x2^2 - 1 + x1*x2", &c).unwrap();
        assert_eq!(p.to_string(), "x1*x2 + 3/2*x2^2 + x1 - 1");
    }

    #[test]
    fn homogeneous_components_group_by_degree() {
        let c = q2();
        let p = parse_polynomial("x1 + x1*x2 + x2^3", &c).unwrap();
        let comps = p.homogeneous_components();
        assert_eq!(comps.keys().copied().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(comps[&2].to_string(), "x1*x2");
        assert!(Polynomial::zero(&c).homogeneous_components().is_empty());
        let sq = parse_polynomial("x1^2 + 2*x1*x2 + x2^2", &c).unwrap();
        assert_eq!(sq.homogeneous_components().len(), 1);
    }

    #[test]
    fn derivatives() {
        let c = q2();
        let p = parse_polynomial("x1^2*x2", &c).unwrap();
        assert_eq!(p.partial_derivative(0).unwrap().to_string(), "2*x1*x2");
        assert!(Polynomial::from_i64(&c, 7).partial_derivative(1).unwrap().is_zero());
        assert_eq!(
            p.partial_derivative(2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        );
        let g5 = VarContext::new(&["x"], Field::Prime(5)).unwrap();
        let x5 = parse_polynomial("x^5", &g5).unwrap();
        assert!(x5.partial_derivative(0).unwrap().is_zero());
    }

    #[test]
    fn substitution() {
        let c1 = VarContext::new(&["x1"], Field::Rationals).unwrap();
        let c = q2();
        let p = parse_polynomial("x1^2", &c1).unwrap();
        let img = parse_polynomial("x1 + x2", &c).unwrap();
        assert_eq!(
            p.substitute(&[img]).unwrap().to_string(),
            "x1^2 + 2*x1*x2 + x2^2"
        );

        let g2 = VarContext::new(&["x1", "x2"], Field::Prime(2)).unwrap();
        let p = parse_polynomial("x1*x2", &g2).unwrap();
        let s = parse_polynomial("x1 + x2", &g2).unwrap();
        assert_eq!(p.substitute(&[s.clone(), s]).unwrap().to_string(), "x1^2 + x2^2");

        let wrong = VarContext::new(&["x1", "x2"], Field::Prime(3)).unwrap();
        let w = Polynomial::var(&wrong, 0);
        assert_eq!(p.substitute(&[w.clone(), w]), Err(Error::ContextMismatch));
    }

    #[test]
    fn identity_substitution() {
        let c = q2();
        let p = parse_polynomial("3*x1^3*x2 - x2 + 7", &c).unwrap();
        let id = [Polynomial::var(&c, 0), Polynomial::var(&c, 1)];
        assert_eq!(p.substitute(&id).unwrap(), p);
    }

    #[test]
    fn exact_division() {
        let c = q2();
        let a = parse_polynomial("x1^2 - x2^2", &c).unwrap();
        let b = parse_polynomial("x1 + x2", &c).unwrap();
        assert_eq!(a.div_exact(&b).unwrap().to_string(), "x1 - x2");
        let d = parse_polynomial("x1 + 1", &c).unwrap();
        assert_eq!(a.div_exact(&d), Err(Error::NotDivisible));
    }

    #[test]
    fn lifting_reorders_by_name() {
        let c = q2();
        let big = VarContext::new(&["x2", "y", "x1"], Field::Rationals).unwrap();
        let p = parse_polynomial("x1^2*x2 + x2", &c).unwrap();
        let l = p.lift(&big).unwrap();
        assert_eq!(l.to_string(), "x2*x1^2 + x2");
    }
}
