//! Checks of the polynomial identities that characterise algebras of
//! invertible maps: Engel type, Yagzhev nilpotence, `Ad_xx` nilpotence,
//! element nilpotence and the Capelli identities.

use std::collections::HashSet;

use crate::algebra::{enumerate_shapes, evaluate_term, OperatorAlgebra, TermSums, TermTree};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::matrix::PolyMatrix;
use crate::polynomial::Polynomial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngelReport {
    pub is_engel: bool,
    /// Start of the first window of vanishing `N_q` that forces all later
    /// ones to vanish.
    pub engel_type_s: Option<u32>,
    pub det_jacobian: Polynomial,
    pub bound_used: u32,
}

/// `E - sum_l l * Ad(Psi_l)`, the Jacobian matrix of the associated map.
pub fn jacobian_of_algebra(a: &OperatorAlgebra) -> Result<PolyMatrix> {
    let ctx = a.ctx();
    let mut j = PolyMatrix::identity(ctx, a.dim());
    for op in a.ops() {
        let ad = op.ad_matrix(ctx)?;
        j = j.sub(&ad.scale(&a.field().from_i64(op.arity() as i64)));
    }
    Ok(j)
}

/// Decides the Engel property through the homogeneous parts `N_q` of
/// `J^-1 = sum_q N_q`, where `J = E - G` and `G = sum_d G_d` is graded by
/// `d = arity - 1`.
///
/// Since `N_q = sum_d G_d N_(q-d)`, a run of `max_arity - 1` consecutive
/// vanishing `N_q` makes every later one vanish, so the inverse is a
/// polynomial matrix and `det J = 1`. The run has to start at most at
/// `bound`.
pub fn check_engel(a: &OperatorAlgebra, bound: u32) -> Result<EngelReport> {
    let ctx = a.ctx();
    let n = a.dim();
    let field = a.field();
    let jac = jacobian_of_algebra(a)?;
    let det_jacobian = jac.det();
    let width = a.max_arity().saturating_sub(1).max(1);
    let mut graded: Vec<PolyMatrix> = vec![PolyMatrix::zero(ctx, n); width + 1];
    for op in a.ops() {
        let d = op.arity() - 1;
        let ad = op.ad_matrix(ctx)?.scale(&field.from_i64(op.arity() as i64));
        graded[d] = graded[d].add(&ad);
    }
    let mut history: Vec<PolyMatrix> = vec![PolyMatrix::identity(ctx, n)];
    let mut run = 0usize;
    let mut engel_type_s = None;
    let last = bound as usize + width - 1;
    for q in 1..=last {
        let mut nq = PolyMatrix::zero(ctx, n);
        for (d, g) in graded.iter().enumerate().take(q.min(width) + 1).skip(1) {
            if g.is_zero() || history[q - d].is_zero() {
                continue;
            }
            nq = nq.add(&g.mul(&history[q - d]));
        }
        run = if nq.is_zero() { run + 1 } else { 0 };
        history.push(nq);
        if run == width {
            let s = q + 1 - width;
            if s <= bound as usize {
                engel_type_s = Some(s as u32);
            }
            break;
        }
    }
    Ok(EngelReport {
        is_engel: engel_type_s.is_some(),
        engel_type_s,
        det_jacobian,
        bound_used: bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YagzhevReport {
    pub is_yagzhev: bool,
    /// Smallest weight in the window whose term sum is nonzero.
    pub failing_degree: Option<u32>,
    /// Smallest `q` such that every weight from `q` to the bound has a
    /// vanishing term sum, when the check passes.
    pub order_q0: Option<u32>,
    pub bound: u32,
}

/// Checks that the sum of all terms of weight `q` vanishes on the generic
/// element for every `q` in `[q0, bound]`.
pub fn check_yagzhev(a: &OperatorAlgebra, q0: u32, bound: u32) -> Result<YagzhevReport> {
    if q0 == 0 {
        return Err(Error::MalformedParameters("q0 must be positive".into()));
    }
    let mut sums = TermSums::new(a);
    let mut zero_from: Option<u32> = None;
    for q in 1..=bound {
        let vanishes = sums.get(q as usize)?.iter().all(Polynomial::is_zero);
        if vanishes {
            zero_from.get_or_insert(q);
        } else {
            zero_from = None;
            if q >= q0 {
                return Ok(YagzhevReport {
                    is_yagzhev: false,
                    failing_degree: Some(q),
                    order_q0: None,
                    bound,
                });
            }
        }
    }
    Ok(YagzhevReport {
        is_yagzhev: true,
        failing_degree: None,
        order_q0: zero_from.or(Some(q0)),
        bound,
    })
}

/// Whether `Ad_xx^k = 0` for the single ternary operator of `a`, where
/// `Ad_xx(y) = Psi(x, x, y)`.
pub fn check_adxx_nilpotence(a: &OperatorAlgebra, k: u32) -> Result<bool> {
    if a.ops().len() != 1 || a.ops()[0].arity() != 3 {
        return Err(Error::SignatureMismatch(
            "expected exactly one ternary operator".into(),
        ));
    }
    if k == 0 {
        return Err(Error::MalformedParameters("power must be positive".into()));
    }
    let ad = a.ops()[0].ad_matrix(a.ctx())?;
    let mut power = ad.clone();
    for _ in 1..k {
        if power.is_zero() {
            break;
        }
        power = power.mul(&ad);
    }
    Ok(power.is_zero())
}

/// Smallest `m` in `[2, bound]` such that every term of weight in
/// `[m, bound]` vanishes when all leaves are `element`.
pub fn element_nilpotence(a: &OperatorAlgebra, element: &[Scalar], bound: u32) -> Result<Option<u32>> {
    if element.len() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "element of length {} in dimension {}",
            element.len(),
            a.dim()
        )));
    }
    if element.iter().any(|c| c.field() != a.field()) {
        return Err(Error::ContextMismatch);
    }
    // values[w] holds the distinct values of weight-w terms
    let mut values: Vec<Vec<Vec<Scalar>>> = vec![Vec::new(), vec![element.to_vec()]];
    for w in 2..=bound as usize {
        let mut seen: HashSet<Vec<Scalar>> = HashSet::new();
        let mut level = Vec::new();
        for op in a.ops() {
            for comp in crate::algebra::compositions_of(w, op.arity()) {
                let lists: Vec<&[Vec<Scalar>]> = comp.iter().map(|&p| values[p].as_slice()).collect();
                for_each_choice(&lists, &mut |args| {
                    let v = op.evaluate(args).expect("shapes agree");
                    if seen.insert(v.clone()) {
                        level.push(v);
                    }
                });
            }
        }
        values.push(level);
    }
    let is_zero = |vs: &Vec<Vec<Scalar>>| vs.iter().all(|v| v.iter().all(Scalar::is_zero));
    let mut answer = None;
    for w in (2..=bound as usize).rev() {
        if is_zero(&values[w]) {
            answer = Some(w as u32);
        } else {
            break;
        }
    }
    Ok(answer)
}

fn for_each_choice<T>(lists: &[&[Vec<T>]], f: &mut impl FnMut(&[&[T]])) {
    fn go<'a, T>(lists: &[&'a [Vec<T>]], chosen: &mut Vec<&'a [T]>, f: &mut impl FnMut(&[&[T]])) {
        match lists.split_first() {
            None => f(chosen),
            Some((first, rest)) => {
                for v in first.iter() {
                    chosen.push(v);
                    go(rest, chosen, f);
                    chosen.pop();
                }
            }
        }
    }
    go(lists, &mut Vec::new(), f)
}

/// A term and a basis substitution on which the Capelli sum is nonzero.
///
/// Leaves labelled `0..k` are the alternated variables, the rest are
/// free; `basis[l]` is the basis index substituted for label `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapelliWitness {
    pub term: TermTree,
    pub basis: Vec<usize>,
    pub value: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapelliReport {
    pub holds: bool,
    pub order: usize,
    pub degree_bound: usize,
    pub counterexample: Option<CapelliWitness>,
}

fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    heap_permute(k, &mut p, true, &mut out);
    out
}

// Heap's algorithm: every step is one transposition, so signs alternate.
fn heap_permute(k: usize, p: &mut Vec<usize>, even: bool, out: &mut Vec<(Vec<usize>, bool)>) -> bool {
    if k <= 1 {
        out.push((p.clone(), even));
        return even;
    }
    let mut parity = even;
    for i in 0..k {
        parity = heap_permute(k - 1, p, parity, out);
        if i + 1 < k {
            if k.is_multiple_of(2) {
                p.swap(i, k - 1);
            } else {
                p.swap(0, k - 1);
            }
            parity = !parity;
        }
    }
    parity
}

/// `sum over sigma of sign(sigma) * M(e_b(sigma 0), ..., e_b(sigma (k-1)), y)`
/// for the term `M` with the basis substitution `basis`.
pub fn capelli_sum(a: &OperatorAlgebra, term: &TermTree, k: usize, basis: &[usize]) -> Result<Vec<Scalar>> {
    let field = a.field();
    let unit = |i: usize| -> Vec<Scalar> {
        (0..a.dim()).map(|j| field.from_i64((i == j) as i64)).collect()
    };
    let mut total = vec![field.zero(); a.dim()];
    for (sigma, even) in permutations(k) {
        let args: Vec<Vec<Scalar>> = basis
            .iter()
            .enumerate()
            .map(|(l, _)| if l < k { unit(basis[sigma[l]]) } else { unit(basis[l]) })
            .collect();
        let v = evaluate_term(term, a, &args)?;
        for (t, x) in total.iter_mut().zip(v) {
            *t = if even { &*t + &x } else { &*t - &x };
        }
    }
    Ok(total)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Checks the Capelli identity of order `k` on every term with at most
/// `degree_bound` leaves that is linear in each alternated variable.
///
/// Terms are taken multilinear in the free variables too; repeated free
/// variables are specialisations of those. By multilinearity it suffices
/// to substitute basis vectors, and since the alternating sum vanishes
/// when two alternated variables take the same value and changes sign
/// under reordering, only strictly increasing choices for them are
/// tried.
pub fn check_capelli(a: &OperatorAlgebra, k: usize, degree_bound: usize) -> Result<CapelliReport> {
    if k == 0 {
        return Err(Error::MalformedParameters("order must be positive".into()));
    }
    let dim = a.dim();
    let signature = a.signature();
    for w in k..=degree_bound {
        for shape in enumerate_shapes(&signature, w) {
            for xs in combinations(w, k) {
                let mut labels = vec![0; w];
                let mut next_free = k;
                let mut next_x = 0;
                for (pos, label) in labels.iter_mut().enumerate() {
                    if xs.contains(&pos) {
                        *label = next_x;
                        next_x += 1;
                    } else {
                        *label = next_free;
                        next_free += 1;
                    }
                }
                let term = shape.with_leaves(&labels);
                for x_basis in combinations(dim, k) {
                    let free = w - k;
                    let mut free_basis = vec![0usize; free];
                    loop {
                        let basis: Vec<usize> = x_basis.iter().chain(&free_basis).copied().collect();
                        let value = capelli_sum(a, &term, k, &basis)?;
                        if value.iter().any(|c| !c.is_zero()) {
                            return Ok(CapelliReport {
                                holds: false,
                                order: k,
                                degree_bound,
                                counterexample: Some(CapelliWitness { term, basis, value }),
                            });
                        }
                        // odometer over the free basis choices
                        let Some(pos) = (0..free).rev().find(|&i| free_basis[i] + 1 < dim) else {
                            break;
                        };
                        free_basis[pos] += 1;
                        free_basis[pos + 1..].iter_mut().for_each(|b| *b = 0);
                    }
                }
            }
        }
    }
    Ok(CapelliReport { holds: true, order: k, degree_bound, counterexample: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_signs() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        for (p, even) in perms {
            let inversions = (0..3)
                .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            assert_eq!(even, inversions % 2 == 0, "{p:?}");
        }
        assert_eq!(combinations(4, 2).len(), 6);
    }
}
