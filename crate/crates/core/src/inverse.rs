//! Graded formal inversion of normalized maps and the invertibility decision.
//!
//! For a normalized map `F = X - H`, the formal inverse `G` solves
//! `G = X + H(G)`. Its degree-`q` component only depends on components of
//! degree `< q`, so the series is built one degree at a time. Every monomial
//! of `H` gets a node in a product DAG whose homogeneous components are
//! filled in by convolution, which keeps all work below the truncation
//! degree.
//!
//! The decision procedure runs the series up to the Gabber bound
//! `deg(F)^(n-1)`: a polynomial automorphism has an inverse of at most that
//! degree, and the formal inverse is unique, so the truncated series either
//! composes exactly to the identity or `F` is not invertible.

use std::collections::HashMap;

use crate::context::Ctx;
use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::polymap::PolyMap;
use crate::polynomial::Polynomial;

/// Homogeneous components `G_1, G_2, …` of a formal inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseSeries {
    ctx: Ctx,
    /// `components[q - 1]` is the degree-`q` part.
    components: Vec<Vec<Polynomial>>,
}

impl InverseSeries {
    pub fn truncation_degree(&self) -> u32 {
        self.components.len() as u32
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// The degree-`q` component, one homogeneous polynomial per variable.
    pub fn component(&self, q: u32) -> &[Polynomial] {
        &self.components[(q - 1) as usize]
    }

    pub fn component_is_zero(&self, q: u32) -> bool {
        self.component(q).iter().all(Polynomial::is_zero)
    }

    /// Degrees whose component is nonzero, ascending.
    pub fn nonzero_degrees(&self) -> Vec<u32> {
        (1..=self.truncation_degree())
            .filter(|&q| !self.component_is_zero(q))
            .collect()
    }

    /// `G_1 + … + G_q` as a polynomial map.
    pub fn partial_sum(&self, q: u32) -> PolyMap {
        let n = self.ctx.len();
        let images = (0..n)
            .map(|i| {
                (1..=q.min(self.truncation_degree()))
                    .map(|d| self.component(d)[i].clone())
                    .fold(Polynomial::zero(&self.ctx), |acc, p| &acc + &p)
            })
            .collect();
        PolyMap::new(&self.ctx, images).expect("shared context")
    }
}

/// A node of the monomial product DAG.
enum Node {
    Var(usize),
    /// `Var(var) * node(rest)`.
    Product { var: usize, rest: usize, min_degree: u32 },
}

struct ProductDag {
    nodes: Vec<Node>,
    by_monomial: HashMap<Monomial, usize>,
    /// `values[node][q]`: degree-`q` component (index 0 unused).
    values: Vec<Vec<Polynomial>>,
}

impl ProductDag {
    fn node_for(&mut self, m: &Monomial) -> usize {
        if let Some(&id) = self.by_monomial.get(m) {
            return id;
        }
        let first = (0..m.nvars())
            .find(|&j| m.exponent(j) > 0)
            .expect("monomial of positive degree");
        let id = if m.degree() == 1 {
            self.nodes.push(Node::Var(first));
            self.nodes.len() - 1
        } else {
            let rest = m.div(&Monomial::var(m.nvars(), first)).expect("divides");
            let rest_id = self.node_for(&rest);
            self.nodes.push(Node::Product { var: first, rest: rest_id, min_degree: m.degree() });
            self.nodes.len() - 1
        };
        self.by_monomial.insert(m.clone(), id);
        id
    }

    fn min_degree(&self, id: usize) -> u32 {
        match self.nodes[id] {
            Node::Var(_) => 1,
            Node::Product { min_degree, .. } => min_degree,
        }
    }
}

/// Graded formal inverse of a normalized map up to degree `max_degree`.
pub fn inverse_series(f: &PolyMap, max_degree: u32) -> Result<InverseSeries> {
    if !f.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let mut builder = SeriesBuilder::new(f);
    builder.extend_to(max_degree.max(1));
    let series = builder.series();
    let check = f.compose_truncated_on_series(&series)?;
    assert!(
        check.is_identity(),
        "formal inverse failed its truncated self-check"
    );
    Ok(series)
}

/// Computes the formal inverse one degree at a time.
struct SeriesBuilder {
    ctx: Ctx,
    dag: ProductDag,
    h_terms: Vec<Vec<(crate::field::Scalar, usize)>>,
    components: Vec<Vec<Polynomial>>,
}

impl SeriesBuilder {
    fn new(f: &PolyMap) -> SeriesBuilder {
        let ctx = f.ctx().clone();
        let n = ctx.len();
        let zero = Polynomial::zero(&ctx);
        // H = X - F, as (coefficient, node) lists per image.
        let mut dag = ProductDag { nodes: Vec::new(), by_monomial: HashMap::new(), values: Vec::new() };
        let mut h_terms: Vec<Vec<(crate::field::Scalar, usize)>> = vec![Vec::new(); n];
        for (i, image) in f.images().iter().enumerate() {
            for (m, c) in image.terms() {
                if m.degree() >= 2 {
                    let id = dag.node_for(m);
                    h_terms[i].push((-c, id));
                }
            }
        }
        let components: Vec<Vec<Polynomial>> = vec![(0..n).map(|i| Polynomial::var(&ctx, i)).collect()];
        dag.values = dag
            .nodes
            .iter()
            .map(|node| match node {
                Node::Var(j) => vec![zero.clone(), components[0][*j].clone()],
                Node::Product { .. } => vec![zero.clone(), zero.clone()],
            })
            .collect();
        SeriesBuilder { ctx, dag, h_terms, components }
    }

    fn degree(&self) -> u32 {
        self.components.len() as u32
    }

    fn extend_to(&mut self, max_degree: u32) {
        while self.degree() < max_degree {
            self.step();
        }
    }

    /// Computes the next component and returns whether it is zero.
    fn step(&mut self) -> bool {
        let q = self.degree() + 1;
        let zero = Polynomial::zero(&self.ctx);
        let components = &self.components;
        let dag = &self.dag;
        // Node values at degree q use only lower-degree data.
        let new_values: Vec<Option<Polynomial>> = dag
            .nodes
            .iter()
            .map(|node| match node {
                Node::Var(_) => None, // filled after G_q is known
                Node::Product { var, rest, .. } => {
                    let rest_min = dag.min_degree(*rest);
                    let mut acc = zero.clone();
                    if q > rest_min {
                        for a in 1..=(q - rest_min) {
                            let g = &components[(a - 1) as usize][*var];
                            let r = &dag.values[*rest][(q - a) as usize];
                            if g.is_zero() || r.is_zero() {
                                continue;
                            }
                            acc = &acc + &(g * r);
                        }
                    }
                    Some(acc)
                }
            })
            .collect();
        let comp: Vec<Polynomial> = self
            .h_terms
            .iter()
            .map(|terms| {
                let mut acc = zero.clone();
                for (c, id) in terms {
                    if let Some(v) = &new_values[*id] {
                        if !v.is_zero() {
                            acc = &acc + &v.scale(c);
                        }
                    }
                }
                acc
            })
            .collect();
        let is_zero = comp.iter().all(Polynomial::is_zero);
        self.components.push(comp);
        for (id, v) in new_values.into_iter().enumerate() {
            let v = match (&self.dag.nodes[id], v) {
                (Node::Var(j), _) => self.components[(q - 1) as usize][*j].clone(),
                (_, Some(v)) => v,
                (_, None) => unreachable!(),
            };
            self.dag.values[id].push(v);
        }
        is_zero
    }

    fn series(&self) -> InverseSeries {
        InverseSeries { ctx: self.ctx.clone(), components: self.components.clone() }
    }
}

impl PolyMap {
    /// `F(G_1 + … + G_D)` truncated at `D`, which must be `X` for a correct
    /// series.
    fn compose_truncated_on_series(&self, series: &InverseSeries) -> Result<PolyMap> {
        let g = series.partial_sum(series.truncation_degree());
        g.compose_truncated(self, series.truncation_degree())
    }
}

/// True iff `compose(F, G)` and `compose(G, F)` are both the identity.
pub fn verify_inverse(f: &PolyMap, g: &PolyMap) -> Result<bool> {
    Ok(PolyMap::compose(f, g)?.is_identity() && PolyMap::compose(g, f)?.is_identity())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Invertible,
    NotInvertible,
    Undecided,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Invertible => "Invertible",
            Verdict::NotInvertible => "NotInvertible",
            Verdict::Undecided => "Undecided",
        }
    }
}

/// What a definite verdict rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// An explicit inverse composed to the identity on both sides.
    InverseVerified,
    SingularLinearPart,
    /// `det J` is not a nonzero constant.
    JacobianNotConstant,
    /// The formal inverse has a nonzero component above the Gabber bound.
    ExceedsGabberBound,
}

impl Certificate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Certificate::InverseVerified => "inverse-verified",
            Certificate::SingularLinearPart => "singular-linear-part",
            Certificate::JacobianNotConstant => "jacobian-not-constant",
            Certificate::ExceedsGabberBound => "exceeds-gabber-bound",
        }
    }
}

#[derive(Clone, Debug)]
pub struct InvertibilityReport {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    /// `deg(F)^(n-1)`, saturating at `u64::MAX`.
    pub gabber_bound: u64,
    /// Certified inverse of the input map (not of its normalization).
    pub inverse: Option<PolyMap>,
    /// For `NotInvertible`: the lowest degree at which the candidate inverse
    /// `G_1 + … + G_c`, with `c = gabber_bound + deg(F)`, fails to compose
    /// to the identity (`F(G) - X`). A singular linear part reports 1.
    /// Absent when the Gabber bound was out of reach.
    pub witness_degree: Option<u32>,
    /// For `NotInvertible`: the smallest `q > gabber_bound` with a nonzero
    /// series component.
    pub first_excess_degree: Option<u32>,
    /// For `Invertible`: the largest degree with a nonzero series component,
    /// the minimal order of the weight-sum identities.
    pub q0: Option<u32>,
    /// Highest series degree actually computed.
    pub degree_reached: u32,
}

pub fn gabber_bound(degree: u32, nvars: usize) -> u64 {
    let exp = nvars.saturating_sub(1) as u32;
    (degree.max(1) as u64).checked_pow(exp).unwrap_or(u64::MAX)
}

/// Decides whether `F` is a polynomial automorphism.
///
/// The formal inverse is built degree by degree. Whenever `deg(F)`
/// consecutive components vanish, the partial sum is tried as an exact
/// inverse. Otherwise the series runs to the Gabber bound
/// `deg(F)^(n-1)`, or to `max_degree` if that is smaller, in which case
/// the verdict may be `Undecided`. A Jacobian determinant that is not a
/// nonzero constant rules out invertibility at any bound.
pub fn decide_invertibility(f: &PolyMap, max_degree: Option<u32>) -> Result<InvertibilityReport> {
    let n = f.nvars();
    let deg = f.degree().unwrap_or(0);
    let bound = gabber_bound(deg, n);
    let mut report = InvertibilityReport {
        verdict: Verdict::Undecided,
        certificate: None,
        gabber_bound: bound,
        inverse: None,
        witness_degree: None,
        first_excess_degree: None,
        q0: None,
        degree_reached: 0,
    };
    let (normalized, translate, linear) = match f.normalize() {
        Ok(t) => t,
        Err(Error::SingularLinearPart) => {
            report.verdict = Verdict::NotInvertible;
            report.certificate = Some(Certificate::SingularLinearPart);
            report.witness_degree = Some(1);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let accept = |candidate: PolyMap, series: &SeriesBuilder, mut report: InvertibilityReport| {
        // Undo the normalization: F^{-1} = N^{-1} ∘ L ∘ T on points.
        let affine = PolyMap::compose(&translate.to_polymap(f.ctx()), &linear.to_polymap(f.ctx()))?;
        let inverse = PolyMap::compose(&affine, &candidate)?;
        assert!(verify_inverse(f, &inverse)?, "de-normalized inverse failed verification");
        report.verdict = Verdict::Invertible;
        report.certificate = Some(Certificate::InverseVerified);
        report.inverse = Some(inverse);
        report.q0 = series.series().nonzero_degrees().last().copied();
        report.degree_reached = series.degree();
        Ok::<_, Error>(report)
    };

    let jacobian_constant = normalized.jacobian_det().degree() == Some(0);
    let reach = max_degree.map_or(u64::MAX, |m| m.max(1) as u64);
    if !jacobian_constant && bound.saturating_add(deg as u64) > reach {
        // no inverse can exist and the witness window is out of reach
        report.verdict = Verdict::NotInvertible;
        report.certificate = Some(Certificate::JacobianNotConstant);
        return Ok(report);
    }

    let limit: u64 = match max_degree {
        Some(m) => (m.max(1) as u64).min(bound),
        None => bound,
    };
    let window = deg.max(1);
    let mut builder = SeriesBuilder::new(&normalized);
    let mut zero_run = 0;
    while (builder.degree() as u64) < limit {
        if builder.step() {
            zero_run += 1;
        } else {
            zero_run = 0;
        }
        if zero_run == window {
            let candidate = builder.series().partial_sum(builder.degree());
            if verify_inverse(&normalized, &candidate)? {
                return accept(candidate, &builder, report);
            }
        }
    }
    let candidate = builder.series().partial_sum(builder.degree());
    if verify_inverse(&normalized, &candidate)? {
        return accept(candidate, &builder, report);
    }
    report.degree_reached = builder.degree();
    if !jacobian_constant {
        report.verdict = Verdict::NotInvertible;
        report.certificate = Some(Certificate::JacobianNotConstant);
    }
    if limit < bound {
        return Ok(report);
    }

    let target = builder.degree();
    let cap = target + deg;
    builder.extend_to(cap);
    let series = builder.series();
    let first_excess = (target + 1..=cap).find(|&q| !series.component_is_zero(q));
    let candidate = series.partial_sum(cap);
    let residual = PolyMap::compose(&candidate, &normalized)?;
    let witness = residual
        .images()
        .iter()
        .enumerate()
        .filter_map(|(i, p)| (p - &Polynomial::var(f.ctx(), i)).min_degree())
        .min();
    report.verdict = Verdict::NotInvertible;
    report.certificate.get_or_insert(Certificate::ExceedsGabberBound);
    report.witness_degree = witness;
    report.first_excess_degree = first_excess;
    report.degree_reached = cap;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::VarContext;
    use crate::field::Field;

    #[test]
    fn triangular_inverse() {
        let c = VarContext::new(&["x", "y"], Field::Rationals).unwrap();
        let f = PolyMap::from_strings(&c, &["x + y^2", "y"]).unwrap();
        let s = inverse_series(&f, 3).unwrap();
        assert_eq!(s.component(1)[0].to_string(), "x");
        assert_eq!(s.component(2)[0].to_string(), "-y^2");
        assert!(s.component(2)[1].is_zero());
        assert!(s.component_is_zero(3));
    }

    #[test]
    fn rejects_unnormalized() {
        let c = VarContext::new(&["x"], Field::Rationals).unwrap();
        let f = PolyMap::from_strings(&c, &["2*x + x^2"]).unwrap();
        assert_eq!(inverse_series(&f, 3).unwrap_err(), Error::NotNormalized);
    }

    #[test]
    fn verify_inverse_examples() {
        let c = VarContext::new(&["x", "y"], Field::Rationals).unwrap();
        let f = PolyMap::from_strings(&c, &["x + y^2", "y"]).unwrap();
        let g = PolyMap::from_strings(&c, &["x - y^2", "y"]).unwrap();
        let h = PolyMap::from_strings(&c, &["x - y^2", "y + x"]).unwrap();
        assert!(verify_inverse(&f, &g).unwrap());
        assert!(!verify_inverse(&f, &h).unwrap());
    }

    #[test]
    fn singular_linear_part_is_a_verdict() {
        let c = VarContext::new(&["x", "y"], Field::Rationals).unwrap();
        let f = PolyMap::from_strings(&c, &["x^2", "y"]).unwrap();
        let r = decide_invertibility(&f, None).unwrap();
        assert_eq!(r.verdict, Verdict::NotInvertible);
        assert_eq!(r.witness_degree, Some(1));
    }

    #[test]
    fn affine_maps_invert() {
        let c = VarContext::new(&["x", "y"], Field::Rationals).unwrap();
        let f = PolyMap::from_strings(&c, &["2*x + y + 1", "x + y"]).unwrap();
        let r = decide_invertibility(&f, None).unwrap();
        assert_eq!(r.verdict, Verdict::Invertible);
        assert!(verify_inverse(&f, r.inverse.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn non_normalized_invertible_map() {
        let c = VarContext::new(&["x", "y"], Field::Rationals).unwrap();
        let f = PolyMap::from_strings(&c, &["3 + 2*y + x^2", "x - 1"]).unwrap();
        let r = decide_invertibility(&f, None).unwrap();
        assert_eq!(r.verdict, Verdict::Invertible);
        assert_eq!(r.gabber_bound, 2);
    }

    #[test]
    fn truncation_below_bound_is_undecided() {
        let c = VarContext::new(&["x", "y"], Field::Prime(5)).unwrap();
        let f = PolyMap::from_strings(&c, &["x + x^5", "y"]).unwrap();
        let r = decide_invertibility(&f, Some(1)).unwrap();
        assert_eq!(r.verdict, Verdict::Undecided);
        assert_eq!(r.certificate, None);
        let r = decide_invertibility(&f, None).unwrap();
        assert_eq!(r.verdict, Verdict::NotInvertible);
        assert_eq!(r.certificate, Some(Certificate::ExceedsGabberBound));
    }

    #[test]
    fn jacobian_rules_out_inverse_below_bound() {
        let c = VarContext::new(&["x", "y"], Field::Rationals).unwrap();
        let f = PolyMap::from_strings(&c, &["x + x*y", "y"]).unwrap();
        let r = decide_invertibility(&f, Some(1)).unwrap();
        assert_eq!(r.verdict, Verdict::NotInvertible);
        assert_eq!(r.certificate, Some(Certificate::JacobianNotConstant));
        assert_eq!(r.witness_degree, None);
    }
}
