//! Formal terms over an operator signature.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::{Coordinate, OperatorAlgebra};
use crate::context::{Ctx, VarContext};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::parse::Cursor;
use crate::polymap::PolyMap;
use crate::polynomial::Polynomial;

/// A term: leaves carry variable labels, inner nodes an operator index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermTree {
    Leaf(usize),
    Node { op: usize, children: Vec<TermTree> },
}

impl TermTree {
    pub fn node(op: usize, children: Vec<TermTree>) -> TermTree {
        TermTree::Node { op, children }
    }

    /// Number of leaves.
    pub fn weight(&self) -> usize {
        match self {
            TermTree::Leaf(_) => 1,
            TermTree::Node { children, .. } => children.iter().map(TermTree::weight).sum(),
        }
    }

    /// Leaf labels from left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            TermTree::Leaf(l) => out.push(*l),
            TermTree::Node { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Replaces the leaf labels, left to right, by `labels`.
    pub fn with_leaves(&self, labels: &[usize]) -> TermTree {
        let mut it = labels.iter().copied();
        let t = self.relabel_from(&mut it);
        assert!(it.next().is_none(), "too many labels");
        t
    }

    fn relabel_from(&self, it: &mut impl Iterator<Item = usize>) -> TermTree {
        match self {
            TermTree::Leaf(_) => TermTree::Leaf(it.next().expect("too few labels")),
            TermTree::Node { op, children } => TermTree::Node {
                op: *op,
                children: children.iter().map(|c| c.relabel_from(it)).collect(),
            },
        }
    }

    /// Renders the term as `name(child, ...)` text.
    pub fn render(&self, op_names: &[&str], leaf_names: &[&str]) -> String {
        let mut s = String::new();
        self.render_into(&mut s, op_names, leaf_names);
        s
    }

    fn render_into(&self, s: &mut String, op_names: &[&str], leaf_names: &[&str]) {
        match self {
            TermTree::Leaf(l) => match leaf_names.get(*l) {
                Some(name) => s.push_str(name),
                None => {
                    let _ = write!(s, "#{l}");
                }
            },
            TermTree::Node { op, children } => {
                match op_names.get(*op) {
                    Some(name) => s.push_str(name),
                    None => {
                        let _ = write!(s, "op{op}");
                    }
                }
                s.push('(');
                for (k, c) in children.iter().enumerate() {
                    if k > 0 {
                        s.push_str(", ");
                    }
                    c.render_into(s, op_names, leaf_names);
                }
                s.push(')');
            }
        }
    }
}

/// Ordered ways of writing `total` as `parts` positive summands.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if total < parts {
        return vec![];
    }
    let mut out = Vec::new();
    for first in 1..=total - (parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn cartesian<T: Clone>(lists: &[&[T]]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for item in list.iter() {
                let mut v = prefix.clone();
                v.push(item.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// All term shapes with `weight` leaves, every leaf labelled 0.
///
/// Order: operators in signature order, then argument weight
/// compositions lexicographically, then children in recursive order.
pub fn enumerate_shapes(arities: &[usize], weight: usize) -> Vec<TermTree> {
    let mut table: Vec<Vec<TermTree>> = vec![Vec::new(), vec![TermTree::Leaf(0)]];
    for w in 2..=weight {
        let mut level = Vec::new();
        for (op, &arity) in arities.iter().enumerate() {
            for comp in compositions(w, arity) {
                let lists: Vec<&[TermTree]> = comp.iter().map(|&p| table[p].as_slice()).collect();
                for children in cartesian(&lists) {
                    level.push(TermTree::node(op, children));
                }
            }
        }
        table.push(level);
    }
    table.into_iter().nth(weight).unwrap_or_default()
}

/// All terms with `weight` leaves labelled from `0..labels`, shapes first
/// and label tuples lexicographically within a shape.
pub fn enumerate_terms(arities: &[usize], weight: usize, labels: usize) -> Vec<TermTree> {
    let label_set: Vec<usize> = (0..labels).collect();
    let tuples = cartesian(&vec![label_set.as_slice(); weight]);
    enumerate_shapes(arities, weight)
        .iter()
        .flat_map(|shape| tuples.iter().map(move |t| shape.with_leaves(t)))
        .collect()
}

/// Evaluates a term in `a`, substituting `args[l]` for the leaves labelled `l`.
pub fn evaluate_term<T: Coordinate>(t: &TermTree, a: &OperatorAlgebra, args: &[Vec<T>]) -> Result<Vec<T>> {
    match t {
        TermTree::Leaf(l) => args
            .get(*l)
            .cloned()
            .ok_or(Error::IndexOutOfRange { index: *l, len: args.len() }),
        TermTree::Node { op, children } => {
            let operator = a.ops().get(*op).ok_or_else(|| {
                Error::SignatureMismatch(format!("no operator with index {op}"))
            })?;
            if children.len() != operator.arity() {
                return Err(Error::ArityMismatch { expected: operator.arity(), got: children.len() });
            }
            let values = children
                .iter()
                .map(|c| evaluate_term(c, a, args))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&[T]> = values.iter().map(Vec::as_slice).collect();
            operator.evaluate(&refs)
        }
    }
}

/// A finite linear combination of terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermExpr {
    field: Field,
    terms: BTreeMap<TermTree, Scalar>,
}

impl TermExpr {
    pub fn zero(field: Field) -> TermExpr {
        TermExpr { field, terms: BTreeMap::new() }
    }

    pub fn from_terms<I>(field: Field, terms: I) -> TermExpr
    where
        I: IntoIterator<Item = (Scalar, TermTree)>,
    {
        let mut e = TermExpr::zero(field);
        for (c, t) in terms {
            e.add_term(c, t);
        }
        e
    }

    pub fn leaf(field: Field, label: usize) -> TermExpr {
        TermExpr::from_terms(field, [(field.one(), TermTree::Leaf(label))])
    }

    fn add_term(&mut self, c: Scalar, t: TermTree) {
        let slot = self.terms.entry(t).or_insert_with(|| self.field.zero());
        *slot = &*slot + &c;
        self.terms.retain(|_, v| !v.is_zero());
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermTree, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest leaf label used, if any.
    pub fn max_label(&self) -> Option<usize> {
        self.terms.keys().flat_map(TermTree::leaves).max()
    }

    pub fn evaluate<T: Coordinate>(&self, a: &OperatorAlgebra, args: &[Vec<T>]) -> Result<Vec<T>> {
        let zero = args
            .first()
            .and_then(|v| v.first())
            .map(Coordinate::zero_like)
            .ok_or_else(|| Error::DimensionMismatch("no arguments".into()))?;
        let mut out = vec![zero; a.dim()];
        for (t, c) in &self.terms {
            let v = evaluate_term(t, a, args)?;
            for (o, x) in out.iter_mut().zip(v) {
                *o = o.plus(&x.scaled(c));
            }
        }
        Ok(out)
    }

    /// Substitutes `images[l]` for every leaf labelled `l`, expanding
    /// multilinearly.
    pub fn substitute(&self, images: &[TermExpr]) -> Result<TermExpr> {
        let mut out = TermExpr::zero(self.field);
        for (t, c) in &self.terms {
            for (d, tree) in expand(t, images)? {
                out.add_term(c * &d, tree);
            }
        }
        Ok(out)
    }

    /// Parses `c*op(x, op(y, x)) - x` style text. Leaves are the names in
    /// `leaf_names`, operators the names of `a`.
    pub fn parse(text: &str, a: &OperatorAlgebra, leaf_names: &[String]) -> Result<TermExpr> {
        let mut cur = Cursor::new(text);
        let field = a.field();
        let mut out = TermExpr::zero(field);
        let mut negative = if cur.eat('-') {
            true
        } else {
            cur.eat('+');
            false
        };
        loop {
            let mut coeff = field.one();
            let mut tree = None;
            loop {
                match cur.peek() {
                    Some(c) if c.is_ascii_digit() => {
                        let num = cur.integer()?;
                        let v = if cur.eat('/') {
                            field.from_ratio(&num, &cur.integer()?)?
                        } else {
                            field.from_bigint(&num)
                        };
                        coeff = &coeff * &v;
                    }
                    Some(c) if c.is_ascii_alphabetic() => {
                        if tree.is_some() {
                            return Err(cur.error("a product may contain only one term"));
                        }
                        tree = Some(parse_tree(&mut cur, a, leaf_names)?);
                    }
                    _ => return Err(cur.error("expected a number or a term")),
                }
                if !cur.eat('*') {
                    break;
                }
            }
            let tree = tree.ok_or_else(|| cur.error("constants are not terms"))?;
            out.add_term(if negative { -coeff } else { coeff }, tree);
            if cur.eat('+') {
                negative = false;
            } else if cur.eat('-') {
                negative = true;
            } else {
                break;
            }
        }
        if !cur.at_end() {
            return Err(cur.error("unexpected trailing input"));
        }
        Ok(out)
    }

    pub fn render(&self, a: &OperatorAlgebra, leaf_names: &[&str]) -> String {
        let op_names: Vec<&str> = a.ops().iter().map(|o| o.name()).collect();
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (t, c)) in self.terms.iter().enumerate() {
            let body = t.render(&op_names, leaf_names);
            let (neg, mag) = if c.is_negative() { (true, -c.clone()) } else { (false, c.clone()) };
            match (k, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            if !mag.is_one() {
                let _ = write!(s, "{mag}*");
            }
            s.push_str(&body);
        }
        s
    }
}

fn parse_tree(cur: &mut Cursor<'_>, a: &OperatorAlgebra, leaf_names: &[String]) -> Result<TermTree> {
    let name = cur.identifier()?;
    if cur.eat('(') {
        let op = a
            .op_index(name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))?;
        let mut children = vec![parse_tree(cur, a, leaf_names)?];
        while cur.eat(',') {
            children.push(parse_tree(cur, a, leaf_names)?);
        }
        cur.expect(')')?;
        let arity = a.ops()[op].arity();
        if children.len() != arity {
            return Err(Error::ArityMismatch { expected: arity, got: children.len() });
        }
        Ok(TermTree::node(op, children))
    } else {
        leaf_names
            .iter()
            .position(|n| n == name)
            .map(TermTree::Leaf)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }
}

fn expand(t: &TermTree, images: &[TermExpr]) -> Result<Vec<(Scalar, TermTree)>> {
    match t {
        TermTree::Leaf(l) => {
            let img = images
                .get(*l)
                .ok_or(Error::IndexOutOfRange { index: *l, len: images.len() })?;
            Ok(img.terms.iter().map(|(t, c)| (c.clone(), t.clone())).collect())
        }
        TermTree::Node { op, children } => {
            let parts = children
                .iter()
                .map(|c| expand(c, images))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&[(Scalar, TermTree)]> = parts.iter().map(Vec::as_slice).collect();
            Ok(cartesian(&refs)
                .into_iter()
                .map(|choice| {
                    let mut coeff = choice[0].0.clone();
                    for (c, _) in &choice[1..] {
                        coeff = &coeff * c;
                    }
                    let kids = choice.into_iter().map(|(_, t)| t).collect();
                    (coeff, TermTree::node(*op, kids))
                })
                .collect())
        }
    }
}

/// The polynomial map induced on `exprs.len()` generic elements of `b`.
///
/// Variable `nu<s>_<i>` is coordinate `i` of generic element `s`; its
/// image is coordinate `i` of `exprs[s]` evaluated on the generic elements.
pub fn generic_realization(b: &OperatorAlgebra, exprs: &[TermExpr]) -> Result<PolyMap> {
    let n = exprs.len();
    let dim = b.dim();
    if let Some(l) = exprs.iter().filter_map(TermExpr::max_label).max() {
        if l >= n {
            return Err(Error::IndexOutOfRange { index: l, len: n });
        }
    }
    let names: Vec<String> = (1..=n)
        .flat_map(|s| (1..=dim).map(move |i| format!("nu{s}_{i}")))
        .collect();
    let ctx: Ctx = VarContext::new(&names, b.field())?;
    let generic: Vec<Vec<Polynomial>> = (0..n)
        .map(|s| (0..dim).map(|i| Polynomial::var(&ctx, s * dim + i)).collect())
        .collect();
    let mut images = Vec::with_capacity(n * dim);
    for e in exprs {
        if e.is_zero() {
            images.extend((0..dim).map(|_| Polynomial::zero(&ctx)));
        } else {
            images.extend(e.evaluate(b, &generic)?);
        }
    }
    PolyMap::new(&ctx, images)
}

/// Partitions of `total` into `parts` summands drawn from `allowed`
/// (descending), listed in non-increasing order.
fn partitions(total: usize, parts: usize, allowed: &[usize], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 0 {
        if total == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    for (k, &first) in allowed.iter().enumerate() {
        // the remaining summands are at most `first` and at least the smallest allowed
        if first > total || first * parts < total {
            continue;
        }
        let smallest = *allowed.last().expect("nonempty");
        if total - first < smallest * (parts - 1) {
            continue;
        }
        prefix.push(first);
        partitions(total - first, parts - 1, &allowed[k..], prefix, out);
        prefix.pop();
    }
}

/// The sums `S_q` of all weight-`q` terms evaluated on the generic element
/// `x` of an algebra, computed by `S_1 = x` and
/// `S_q = sum over operators and compositions of w(S_q1, ..., S_ql)`.
#[derive(Clone, Debug)]
pub struct TermSums<'a> {
    algebra: &'a OperatorAlgebra,
    sums: Vec<Vec<Polynomial>>,
}

impl<'a> TermSums<'a> {
    pub fn new(algebra: &'a OperatorAlgebra) -> Self {
        let ctx = algebra.ctx();
        let generic = (0..ctx.len()).map(|i| Polynomial::var(ctx, i)).collect();
        TermSums { algebra, sums: vec![Vec::new(), generic] }
    }

    /// Highest weight computed so far.
    pub fn computed(&self) -> usize {
        self.sums.len() - 1
    }

    /// `S_q`, computing intermediate weights as needed.
    pub fn get(&mut self, q: usize) -> Result<&[Polynomial]> {
        assert!(q >= 1, "weights start at one");
        while self.computed() < q {
            self.push_next()?;
        }
        Ok(&self.sums[q])
    }

    fn push_next(&mut self) -> Result<()> {
        let q = self.sums.len();
        let a = self.algebra;
        let field = a.field();
        // weights whose sum vanishes contribute nothing
        let allowed: Vec<usize> = (1..q).rev().filter(|&p| self.sums[p].iter().any(|x| !x.is_zero())).collect();
        let mut jobs: Vec<(usize, Vec<usize>, Scalar)> = Vec::new();
        for (k, op) in a.ops().iter().enumerate() {
            if op.is_zero() || allowed.is_empty() {
                continue;
            }
            if op.is_symmetric() {
                let mut parts = Vec::new();
                partitions(q, op.arity(), &allowed, &mut Vec::new(), &mut parts);
                for p in parts {
                    let mut sorted = p.clone();
                    sorted.sort_unstable();
                    let count = field.from_bigint(&super::multinomial(&sorted));
                    jobs.push((k, p, count));
                }
            } else {
                for p in compositions(q, op.arity()) {
                    if p.iter().all(|x| allowed.contains(x)) {
                        jobs.push((k, p, field.one()));
                    }
                }
            }
        }
        let sums = &self.sums;
        let values = jobs
            .par_iter()
            .map(|(k, parts, count)| {
                let args: Vec<&[Polynomial]> = parts.iter().map(|&p| sums[p].as_slice()).collect();
                let v = a.ops()[*k].evaluate(&args)?;
                Ok(v.into_iter().map(|p| p.scale(count)).collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()?;
        let ctx = a.ctx();
        let mut total = vec![Polynomial::zero(ctx); ctx.len()];
        for v in values {
            for (t, p) in total.iter_mut().zip(v) {
                *t = &*t + &p;
            }
        }
        self.sums.push(total);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultilinearOp;

    #[test]
    fn shape_counts() {
        assert_eq!(enumerate_shapes(&[2], 3).len(), 2);
        assert_eq!(enumerate_shapes(&[2, 3], 3).len(), 3);
        assert_eq!(enumerate_shapes(&[2], 5).len(), 14);
        assert_eq!(enumerate_terms(&[2], 2, 2).len(), 4);
        assert!(enumerate_shapes(&[3], 2).is_empty());
    }

    #[test]
    fn compositions_are_ordered() {
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert!(compositions(2, 3).is_empty());
    }

    fn dual_numbers() -> OperatorAlgebra {
        let f = Field::Rationals;
        let ctx = VarContext::numbered("e", 2, f).unwrap();
        let mul = MultilinearOp::symmetric(
            "mul",
            2,
            2,
            f,
            [(0, vec![0, 0], f.one()), (1, vec![0, 1], f.one())],
        )
        .unwrap();
        OperatorAlgebra::new(&ctx, vec![mul]).unwrap()
    }

    #[test]
    fn dual_number_square() {
        let b = dual_numbers();
        let x = vec!["x".to_string()];
        let e = TermExpr::parse("mul(x, x)", &b, &x).unwrap();
        let r = generic_realization(&b, &[e]).unwrap();
        let shown: Vec<String> = r.images().iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["nu1_1^2", "2*nu1_1*nu1_2"]);
    }

    #[test]
    fn parse_render_round_trip() {
        let b = dual_numbers();
        let names = vec!["x".to_string(), "y".to_string()];
        let e = TermExpr::parse("2*mul(x, mul(y,x)) - y + 1/3*x", &b, &names).unwrap();
        let text = e.render(&b, &["x", "y"]);
        assert_eq!(TermExpr::parse(&text, &b, &names).unwrap(), e);
        assert!(matches!(
            TermExpr::parse("mul(x)", &b, &names),
            Err(Error::ArityMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(TermExpr::parse("3", &b, &names), Err(Error::Syntax { .. })));
    }
}
