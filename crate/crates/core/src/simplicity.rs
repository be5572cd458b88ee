//! Ideals of operator algebras and a simplicity test.
//!
//! An ideal is a subspace `I` with `w(a_1, …, a_l) ∈ I` whenever some
//! `a_k ∈ I`. It is the smallest subspace invariant under the linear maps
//! obtained by fixing all but one slot of an operator to basis vectors.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::OperatorAlgebra;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

/// A sparse linear map: `(output, input, value)` entries.
type SlotMap = Vec<(usize, usize, Scalar)>;

/// All maps `v -> w(e_a1, …, v, …, e_al)` with a nonzero matrix.
fn slot_maps(a: &OperatorAlgebra) -> Vec<SlotMap> {
    // keyed by operator, slot and the basis indices in the other slots
    type Slot = (usize, usize, Vec<usize>);
    let mut maps: BTreeMap<Slot, BTreeMap<(usize, usize), Scalar>> = BTreeMap::new();
    for (k, op) in a.ops().iter().enumerate() {
        for ((out, idx), c) in op.coefficients() {
            for pos in 0..idx.len() {
                if op.is_symmetric() && pos > 0 && idx[pos - 1] == idx[pos] {
                    continue;
                }
                let mut rest = idx.clone();
                let input = rest.remove(pos);
                let slot = if op.is_symmetric() { 0 } else { pos };
                maps.entry((k, slot, rest))
                    .or_default()
                    .insert((*out, input), c.clone());
            }
        }
    }
    maps.into_values()
        .map(|m| m.into_iter().map(|((o, i), c)| (o, i, c)).collect())
        .collect()
}

fn apply(map: &SlotMap, v: &[Scalar], field: Field) -> Vec<Scalar> {
    let mut out = vec![field.zero(); v.len()];
    for (o, i, c) in map {
        if !v[*i].is_zero() {
            out[*o] = &out[*o] + &(c * &v[*i]);
        }
    }
    out
}

/// Row-echelon basis of a subspace with unit pivots.
struct Echelon {
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl Echelon {
    fn reduce(&self, mut v: Vec<Scalar>) -> Vec<Scalar> {
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let f = v[*pivot].clone();
                for (x, r) in v.iter_mut().zip(row) {
                    *x = &*x - &(&f * r);
                }
            }
        }
        v
    }

    /// Adds `v` if it is independent, returning the normalized new row.
    fn insert(&mut self, v: Vec<Scalar>) -> Option<Vec<Scalar>> {
        let v = self.reduce(v);
        let pivot = v.iter().position(|x| !x.is_zero())?;
        let inv = v[pivot].inv().expect("nonzero pivot");
        let v: Vec<Scalar> = v.iter().map(|x| x * &inv).collect();
        // keep earlier rows reduced at the new pivot
        for (_, row) in self.rows.iter_mut() {
            if !row[pivot].is_zero() {
                let f = row[pivot].clone();
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = &*x - &(&f * r);
                }
            }
        }
        self.rows.push((pivot, v.clone()));
        Some(v)
    }
}

/// A basis of the smallest ideal containing `generator`.
pub fn ideal_closure(a: &OperatorAlgebra, generator: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
    closure_with(a, &slot_maps(a), generator)
}

fn closure_with(a: &OperatorAlgebra, maps: &[SlotMap], generator: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
    if generator.len() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} in dimension {}",
            generator.len(),
            a.dim()
        )));
    }
    let field = a.field();
    let mut basis = Echelon { rows: Vec::new() };
    let mut queue: Vec<Vec<Scalar>> = basis.insert(generator.to_vec()).into_iter().collect();
    while let Some(v) = queue.pop() {
        if basis.rows.len() == a.dim() {
            break;
        }
        for m in maps {
            if let Some(row) = basis.insert(apply(m, &v, field)) {
                queue.push(row);
            }
        }
    }
    Ok(basis.rows.into_iter().map(|(_, r)| r).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Simplicity {
    Simple,
    NotSimple,
    InconclusiveRandomized,
}

impl Simplicity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Simplicity::Simple => "Simple",
            Simplicity::NotSimple => "NotSimple",
            Simplicity::InconclusiveRandomized => "InconclusiveRandomized",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicityVerdict {
    pub verdict: Simplicity,
    /// A vector generating a proper nonzero ideal.
    pub witness_ideal_generator: Option<Vec<Scalar>>,
    pub witness_ideal_dim: Option<usize>,
    /// Every basis index is isolated by a single-entry slot map and every
    /// basis vector generates the whole algebra.
    pub criterion_matched: bool,
    pub trials: usize,
}

/// Tests simplicity.
///
/// Basis vectors and `trials` seeded random vectors are closed into
/// ideals; a proper nonzero closure proves `NotSimple`. `Simple` is
/// reported when, additionally, every basis index `b` has a slot map
/// `v -> c * v_b * e_o`: any nonzero ideal then contains some basis vector,
/// hence everything.
pub fn check_simplicity(a: &OperatorAlgebra, trials: usize, seed: u64) -> Result<SimplicityVerdict> {
    let field = a.field();
    let n = a.dim();
    let maps = slot_maps(a);
    let not_simple = |v: Vec<Scalar>, dim: usize| SimplicityVerdict {
        verdict: Simplicity::NotSimple,
        witness_ideal_generator: Some(v),
        witness_ideal_dim: Some(dim),
        criterion_matched: false,
        trials,
    };
    let unit = |i: usize| -> Vec<Scalar> { (0..n).map(|j| field.from_i64((i == j) as i64)).collect() };
    for i in 0..n {
        let dim = closure_with(a, &maps, &unit(i))?.len();
        if dim < n {
            return Ok(not_simple(unit(i), dim));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let v: Vec<Scalar> = (0..n).map(|_| field.from_i64(rng.gen_range(-3..=3))).collect();
        if v.iter().all(Scalar::is_zero) {
            continue;
        }
        let dim = closure_with(a, &maps, &v)?.len();
        if dim < n {
            return Ok(not_simple(v, dim));
        }
    }
    let mut isolated = vec![false; n];
    for m in &maps {
        if let [(_, input, _)] = m.as_slice() {
            isolated[*input] = true;
        }
    }
    let criterion_matched = isolated.iter().all(|&b| b);
    Ok(SimplicityVerdict {
        verdict: if criterion_matched { Simplicity::Simple } else { Simplicity::InconclusiveRandomized },
        witness_ideal_generator: None,
        witness_ideal_dim: None,
        criterion_matched,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultilinearOp;
    use crate::context::VarContext;

    #[test]
    fn componentwise_product_has_ideals() {
        let f = Field::Rationals;
        let ctx = VarContext::numbered("e", 2, f).unwrap();
        let op = MultilinearOp::symmetric("mul", 2, 2, f, [(0, vec![0, 0], f.one()), (1, vec![1, 1], f.one())])
            .unwrap();
        let a = OperatorAlgebra::new(&ctx, vec![op]).unwrap();
        let v = check_simplicity(&a, 5, 1).unwrap();
        assert_eq!(v.verdict, Simplicity::NotSimple);
        assert_eq!(v.witness_ideal_dim, Some(1));
    }

    #[test]
    fn matrix_algebra_closures_are_full() {
        let f = Field::Rationals;
        let ctx = VarContext::numbered("e", 4, f).unwrap();
        // E_ij with index 2*i + j; E_ij E_jk = E_ik
        let mut entries = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    entries.push((2 * i + k, vec![2 * i + j, 2 * j + k], f.one()));
                }
            }
        }
        let op = MultilinearOp::ordered("mul", 2, 4, f, entries).unwrap();
        let a = OperatorAlgebra::new(&ctx, vec![op]).unwrap();
        let v = check_simplicity(&a, 10, 7).unwrap();
        // simple, but every one-sided multiplication by E_ij copies a whole
        // row or column, so no slot map isolates a single coordinate
        assert!(!v.criterion_matched);
        assert_eq!(v.verdict, Simplicity::InconclusiveRandomized);
        for i in 0..4 {
            let e: Vec<Scalar> = (0..4).map(|j| f.from_i64((i == j) as i64)).collect();
            assert_eq!(ideal_closure(&a, &e).unwrap().len(), 4);
        }
    }
}
