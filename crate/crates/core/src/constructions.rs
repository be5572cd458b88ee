//! Constructions on polynomial maps: reduction to degree three, the cubic
//! homogeneous blow-up, embeddings into prime and simple algebras, and a
//! small named corpus.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::context::VarContext;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::monomial::Monomial;
use crate::parse::parse_polynomial;
use crate::polymap::PolyMap;
use crate::polynomial::Polynomial;

/// One splitting step: `map = compose(left, compose(previous, right))`.
#[derive(Clone, Debug)]
pub struct ReductionRound {
    /// Image index whose monomial was split.
    pub image: usize,
    /// `y -> y + B`, `z -> z + A` on the two new variables.
    pub left: PolyMap,
    /// `x_image -> x_image - y*z`.
    pub right: PolyMap,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub map: PolyMap,
    pub rounds: Vec<ReductionRound>,
}

/// Rewrites a normalized map into one of degree at most three on more
/// variables, preserving invertibility and `det J = 1`.
pub fn reduce_degree(f: &PolyMap) -> Result<PolyMap> {
    Ok(reduce_degree_traced(f)?.map)
}

/// As [`reduce_degree`], keeping the elementary maps of every round.
///
/// Each round takes the highest-degree monomial `c*m` (lowest image index,
/// then leading in graded order), splits `m = m1*m2` with
/// `deg m1 = ceil(deg m / 2)`, adds variables `y, z` and replaces `F` by
/// `G1 ∘ F ∘ G2` where `G2: x_i -> x_i - y*z` and
/// `G1: y -> y + m2, z -> z + c*m1`. The product `(y + m2)(z + c*m1)`
/// cancels `c*m` and leaves terms of degree at most `ceil(deg m / 2) + 1`.
pub fn reduce_degree_traced(f: &PolyMap) -> Result<Reduction> {
    if !f.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let mut current = f.clone();
    let mut rounds = Vec::new();
    while let Some((image, m, c)) = select_high_monomial(&current) {
        let ctx = current.ctx().clone();
        let n = ctx.len();
        let k = rounds.len() + 1;
        let y = ctx.fresh_name(&format!("y{k}"), &[]);
        let z = ctx.fresh_name(&format!("z{k}"), std::slice::from_ref(&y));
        let big = ctx.extended(&[y, z])?;
        let d = m.degree();
        let (m1, m2) = m.split_at_degree(d.div_ceil(2));
        let a = Polynomial::monomial(&big, m1.padded(n + 2), c);
        let b = Polynomial::monomial(&big, m2.padded(n + 2), big.field().one());
        let yv = Polynomial::var(&big, n);
        let zv = Polynomial::var(&big, n + 1);
        let left = PolyMap::identity(&big)
            .with_image(n, &yv + &b)?
            .with_image(n + 1, &zv + &a)?;
        let right = PolyMap::identity(&big).with_image(image, &Polynomial::var(&big, image) - &(&yv * &zv))?;
        let lifted = current.lift(&big)?;
        let next = PolyMap::compose(&left, &PolyMap::compose(&lifted, &right)?)?;
        debug_assert!(next.image(image).coefficient(&m.padded(n + 2)).is_zero());
        rounds.push(ReductionRound { image, left, right });
        current = next;
    }
    Ok(Reduction { map: current, rounds })
}

fn select_high_monomial(f: &PolyMap) -> Option<(usize, Monomial, Scalar)> {
    let d = f.degree()?;
    if d < 4 {
        return None;
    }
    let (i, p) = f
        .images()
        .iter()
        .enumerate()
        .find(|(_, p)| p.degree() == Some(d))?;
    let (m, c) = p.leading_term()?;
    Some((i, m.clone(), c.clone()))
}

/// Inverts a map that only shifts some coordinates by polynomials in the
/// untouched ones: `x_i -> x_i + s_i` becomes `x_i -> x_i - s_i`.
fn invert_shift(g: &PolyMap) -> Result<PolyMap> {
    let ctx = g.ctx();
    let images = g
        .images()
        .iter()
        .enumerate()
        .map(|(i, p)| &Polynomial::var(ctx, i).scale_i64(2) - p)
        .collect();
    PolyMap::new(ctx, images)
}

impl Reduction {
    /// Given an inverse `g` of the original map, the inverse of the reduced
    /// one, built round by round as `G2^-1 ∘ g ∘ G1^-1`.
    pub fn transport_inverse(&self, g: &PolyMap) -> Result<PolyMap> {
        let mut inv = g.clone();
        for round in &self.rounds {
            let big = round.left.ctx();
            let lifted = inv.lift(big)?;
            inv = PolyMap::compose(&invert_shift(&round.right)?, &PolyMap::compose(&lifted, &invert_shift(&round.left)?)?)?;
        }
        Ok(inv)
    }
}

/// The inverse of `blowup_cubic(h)` from an inverse `g = X + G_2 + G_3 + …`
/// of `h`: with `y = x - T^2 w`, it sends `x -> y + sum_k T^(k-1) G_k(y)`,
/// `w -> w + H3(x')` where `x'` is the new `x`, and fixes `T`.
pub fn blowup_inverse(h: &PolyMap, g: &PolyMap) -> Result<PolyMap> {
    let b = blowup_cubic(h)?;
    let big = b.ctx().clone();
    let n = h.nvars();
    let t = Polynomial::var(&big, 2 * n);
    let t2 = &t * &t;
    let mut at_y: Vec<Polynomial> = (0..n)
        .map(|i| &Polynomial::var(&big, i) - &(&t2 * &Polynomial::var(&big, n + i)))
        .collect();
    at_y.extend((n..=2 * n).map(|i| Polynomial::var(&big, i)));
    let mut x_new = Vec::with_capacity(n);
    for i in 0..n {
        let gi = g.image(i).lift(&big)?;
        let mut acc = Polynomial::zero(&big);
        for (k, part) in gi.homogeneous_components() {
            if k == 0 {
                return Err(Error::NotNormalized);
            }
            acc = &acc + &(&t.pow(k - 1) * &part.substitute(&at_y)?);
        }
        x_new.push(acc);
    }
    let mut at_x = x_new.clone();
    at_x.extend((n..=2 * n).map(|i| Polynomial::var(&big, i)));
    let mut images = x_new;
    for i in 0..n {
        let h3 = h.image(i).lift(&big)?.homogeneous_part(3);
        images.push(&Polynomial::var(&big, n + i) + &h3.substitute(&at_x)?);
    }
    images.push(t);
    PolyMap::new(&big, images)
}

/// The cubic homogeneous blow-up of a normalized map `H = X + H2 + H3` of
/// degree at most three, on variables `x, w, T`:
///
/// ```text
/// x_i -> x_i + T^2 w_i + T H2_i(x)
/// w_i -> w_i - H3_i(x)
/// T   -> T
/// ```
///
/// On the slice `T = 1` this is `(x, w) -> (x + w + H2, w - H3)`, which is
/// `H` up to elementary changes of coordinates.
pub fn blowup_cubic(h: &PolyMap) -> Result<PolyMap> {
    if !h.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let deg = h.degree().unwrap_or(1);
    if deg > 3 {
        return Err(Error::DegreeTooHigh(deg));
    }
    let ctx = h.ctx();
    let n = ctx.len();
    let mut extra: Vec<String> = Vec::new();
    for i in 1..=n {
        let name = ctx.fresh_name(&format!("w{i}"), &extra);
        extra.push(name);
    }
    extra.push(ctx.fresh_name("T", &extra));
    let big = ctx.extended(&extra)?;
    let t = Polynomial::var(&big, 2 * n);
    let t2 = &t * &t;
    let mut images = Vec::with_capacity(2 * n + 1);
    let mut lower = Vec::with_capacity(n);
    for i in 0..n {
        let img = h.image(i).lift(&big)?;
        let p2 = img.homogeneous_part(2);
        let p3 = img.homogeneous_part(3);
        let w = Polynomial::var(&big, n + i);
        images.push(&(&Polynomial::var(&big, i) + &(&t2 * &w)) + &(&t * &p2));
        lower.push(&w - &p3);
    }
    images.extend(lower);
    images.push(t);
    PolyMap::new(&big, images)
}

/// `x -> x + x^p` over `GF(p)`: `det J = 1` but not invertible. With
/// `with_reduction` the map is reduced to degree three and blown up to a
/// cubic homogeneous map.
pub fn char_p_example(p: u64, with_reduction: bool) -> Result<PolyMap> {
    let field = Field::prime(p).map_err(|_| Error::NotPrime(p))?;
    if with_reduction && p <= 3 {
        return Err(Error::MalformedParameters(format!(
            "GF({p}) is too small for the cubic reduction"
        )));
    }
    let ctx = VarContext::new(&["x"], field)?;
    let f = PolyMap::from_strings(&ctx, &[format!("x + x^{p}")])?;
    if with_reduction {
        blowup_cubic(&reduce_degree(&f)?)
    } else {
        Ok(f)
    }
}

/// Adjoins `t0, t1, …, tn` and the images `t_i -> t_i + t0*x_i^2`,
/// `t0 -> t0`, which makes the algebra prime while keeping it cubic
/// homogeneous when `F` is. Setting `t0 = 0` recovers `F` on `x`.
pub fn embed_prime(f: &PolyMap) -> Result<PolyMap> {
    if !f.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let ctx = f.ctx();
    let n = ctx.len();
    let mut extra: Vec<String> = Vec::new();
    for i in 0..=n {
        let name = ctx.fresh_name(&format!("t{i}"), &extra);
        extra.push(name);
    }
    let big = ctx.extended(&extra)?;
    let t0 = Polynomial::var(&big, n);
    let mut g = PolyMap::identity(&big);
    for i in 0..n {
        let xi = Polynomial::var(&big, i);
        let image = &Polynomial::var(&big, n + 1 + i) + &(&t0 * &(&xi * &xi));
        g = g.with_image(n + 1 + i, image)?;
    }
    PolyMap::compose(&g, &f.lift(&big)?)
}

/// One elementary map of the simple embedding: `target -> target +
/// source^(k-1) * special`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingStep {
    pub degree: u32,
    pub target: usize,
    pub source: usize,
    pub special: usize,
}

/// The elementary maps used by [`embed_simple`] on `n` original variables,
/// with `t1 = n` and `t2 = n + 1`: first `t2 -> t2 + x_i^(k-1) t1`, then
/// `t1 -> t1 + x_i^(k-1) t2`, then `x_i -> x_i + s^(k-1) t1` for every
/// source `s` among the other `x_j` and `t2`.
pub fn embedding_steps(n: usize, schedule: &[u32]) -> Result<Vec<EmbeddingStep>> {
    let (t1, t2) = (n, n + 1);
    let mut shapes = Vec::new();
    shapes.extend((0..n).map(|i| (t2, i, t1)));
    shapes.extend((0..n).map(|i| (t1, i, t2)));
    for i in 0..n {
        shapes.extend((0..n).filter(|&j| j != i).map(|j| (i, j, t1)));
        shapes.push((i, t2, t1));
    }
    if schedule.len() != shapes.len() {
        return Err(Error::MalformedParameters(format!(
            "schedule needs {} degrees for {n} variables, got {}",
            shapes.len(),
            schedule.len()
        )));
    }
    Ok(shapes
        .into_iter()
        .zip(schedule)
        .map(|((target, source, special), &degree)| EmbeddingStep { degree, target, source, special })
        .collect())
}

/// Embeds the algebra of `F` into a simple one by adjoining `t1, t2` and
/// composing `F` with elementary maps whose degrees follow `schedule`.
///
/// Each scheduled degree must end up carrying exactly one monomial of the
/// composite, namely the one its elementary map introduced; otherwise the
/// schedule grows too slowly and `ScheduleTooSlow` is returned.
pub fn embed_simple(f: &PolyMap, schedule: &[u32]) -> Result<PolyMap> {
    if !f.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let ctx = f.ctx();
    let n = ctx.len();
    let steps = embedding_steps(n, schedule)?;
    let deg = f.degree().unwrap_or(1);
    if schedule[0] <= deg {
        return Err(Error::ScheduleTooSlow(format!(
            "first degree {} does not exceed deg F = {deg}",
            schedule[0]
        )));
    }
    if let Some(w) = schedule.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::ScheduleTooSlow(format!(
            "degrees {} and {} are not increasing",
            w[0], w[1]
        )));
    }
    let t1 = ctx.fresh_name("t1", &[]);
    let t2 = ctx.fresh_name("t2", std::slice::from_ref(&t1));
    let big = ctx.extended(&[t1, t2])?;
    let mut chain = PolyMap::identity(&big);
    let mut expected = Vec::new();
    for s in &steps {
        let mut exps = vec![0u32; n + 2];
        exps[s.source] += s.degree - 1;
        exps[s.special] += 1;
        let m = Monomial::new(exps);
        let term = Polynomial::monomial(&big, m.clone(), big.field().one());
        let g = PolyMap::identity(&big).with_image(s.target, &Polynomial::var(&big, s.target) + &term)?;
        chain = PolyMap::compose(&chain, &g)?;
        expected.push((s.degree, s.target, m));
    }
    let out = PolyMap::compose(&f.lift(&big)?, &chain)?;
    for (degree, target, m) in expected {
        let found: Vec<(usize, Monomial)> = out
            .images()
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                p.homogeneous_part(degree)
                    .terms()
                    .map(|(mm, _)| (i, mm.clone()))
                    .collect::<Vec<_>>()
            })
            .collect();
        if found != [(target, m)] {
            return Err(Error::ScheduleTooSlow(format!(
                "degree {degree} carries {} monomials after composition",
                found.len()
            )));
        }
    }
    Ok(out)
}

/// A pair of distinct points over `GF(p^2)` with the same image, which
/// rules out invertibility of a map over `GF(p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collision {
    pub field: Fp2,
    pub left: Vec<Fp2Elem>,
    pub right: Vec<Fp2Elem>,
}

/// `GF(p^2) = GF(p)[s] / (s^2 - nonresidue)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp2 {
    pub p: u64,
    pub nonresidue: u64,
}

/// `a + b*s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp2Elem {
    pub a: u64,
    pub b: u64,
}

impl Fp2 {
    pub fn new(p: u64) -> Result<Fp2> {
        Field::prime(p)?;
        if p == 2 || p >= 1 << 31 {
            return Err(Error::MalformedParameters(format!("GF({p}^2) is not supported")));
        }
        let nonresidue = (2..p)
            .find(|&r| Self::pow_mod(r, (p - 1) / 2, p) == p - 1)
            .expect("odd primes have non-residues");
        Ok(Fp2 { p, nonresidue })
    }

    fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1 % p;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub fn zero(&self) -> Fp2Elem {
        Fp2Elem { a: 0, b: 0 }
    }

    pub fn from_u64(&self, v: u64) -> Fp2Elem {
        Fp2Elem { a: v % self.p, b: 0 }
    }

    pub fn add(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        Fp2Elem { a: (x.a + y.a) % self.p, b: (x.b + y.b) % self.p }
    }

    pub fn neg(&self, x: Fp2Elem) -> Fp2Elem {
        Fp2Elem { a: (self.p - x.a) % self.p, b: (self.p - x.b) % self.p }
    }

    pub fn mul(&self, x: Fp2Elem, y: Fp2Elem) -> Fp2Elem {
        let p = self.p;
        Fp2Elem {
            a: (x.a * y.a % p + x.b * y.b % p * self.nonresidue) % p,
            b: (x.a * y.b + x.b * y.a) % p,
        }
    }

    pub fn pow(&self, mut x: Fp2Elem, mut e: u64) -> Fp2Elem {
        let mut r = self.from_u64(1);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        r
    }

    /// Evaluates a polynomial over `GF(p)` at a point of `GF(p^2)^n`.
    pub fn evaluate(&self, poly: &Polynomial, point: &[Fp2Elem]) -> Result<Fp2Elem> {
        if poly.field() != Field::Prime(self.p) {
            return Err(Error::ContextMismatch);
        }
        if point.len() != poly.nvars() {
            return Err(Error::DimensionMismatch("point has the wrong length".into()));
        }
        let mut acc = self.zero();
        for (m, c) in poly.terms() {
            let Scalar::Residue { value, .. } = c else { unreachable!() };
            let mut t = self.from_u64(*value);
            for (x, &e) in point.iter().zip(m.exponents()) {
                if e > 0 {
                    t = self.mul(t, self.pow(*x, e as u64));
                }
            }
            acc = self.add(acc, t);
        }
        Ok(acc)
    }

    pub fn evaluate_map(&self, f: &PolyMap, point: &[Fp2Elem]) -> Result<Vec<Fp2Elem>> {
        f.images().iter().map(|p| self.evaluate(p, point)).collect()
    }
}

impl Collision {
    /// `0` and a root of `a^(p-1) = -1` collide under `x -> x + x^p`.
    pub fn frobenius(p: u64) -> Result<Collision> {
        let field = Fp2::new(p)?;
        let minus_one = field.from_u64(p - 1);
        let a = (0..p)
            .flat_map(|a| (0..p).map(move |b| Fp2Elem { a, b }))
            .find(|&x| field.pow(x, p - 1) == minus_one)
            .expect("GF(p^2)* has elements of order 2(p-1)");
        Ok(Collision { field, left: vec![field.zero()], right: vec![a] })
    }

    /// True iff the points differ and `f` takes the same value on both.
    pub fn verify(&self, f: &PolyMap) -> Result<bool> {
        Ok(self.left != self.right
            && self.field.evaluate_map(f, &self.left)? == self.field.evaluate_map(f, &self.right)?)
    }

    /// Carries a collision of `F` to one of `G1 ∘ F ∘ G2` for every
    /// reduction round, pulling points back through `G1`.
    pub fn through_reduction(&self, reduction: &Reduction) -> Result<Collision> {
        let fp = self.field;
        let pull = |point: &[Fp2Elem], round: &ReductionRound| -> Result<Vec<Fp2Elem>> {
            let n = point.len();
            let mut q = point.to_vec();
            q.extend([fp.zero(), fp.zero()]);
            for k in [n, n + 1] {
                let shift = round.left.image(k) - &Polynomial::var(round.left.ctx(), k);
                let v = fp.evaluate(&shift, &q)?;
                q[k] = fp.neg(v);
            }
            Ok(q)
        };
        let mut out = self.clone();
        for round in &reduction.rounds {
            out.left = pull(&out.left, round)?;
            out.right = pull(&out.right, round)?;
        }
        Ok(out)
    }

    /// Carries a collision of `H` to its blow-up via `x -> (x, H3(x), 1)`.
    pub fn through_blowup(&self, h: &PolyMap) -> Result<Collision> {
        let fp = self.field;
        let lift = |point: &[Fp2Elem]| -> Result<Vec<Fp2Elem>> {
            let mut q = point.to_vec();
            for p in h.images() {
                q.push(fp.evaluate(&p.homogeneous_part(3), point)?);
            }
            q.push(fp.from_u64(1));
            Ok(q)
        };
        Ok(Collision { field: fp, left: lift(&self.left)?, right: lift(&self.right)? })
    }
}

/// Maps available by name: `nagata`, `druzkowski(a11,a12;a21,a22)`,
/// `elementary(i, f)`, `wang-triangular(seed)`, `charp(p)` and
/// `charp-cubic(p)`.
pub fn corpus(name: &str) -> Result<PolyMap> {
    let name = name.trim();
    let (head, args) = match name.find('(') {
        Some(open) => {
            let inner = name[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::MalformedParameters(format!("unbalanced parentheses in `{name}`")))?;
            (name[..open].trim(), Some(inner))
        }
        None => (name, None),
    };
    let params = args.ok_or_else(|| Error::MalformedParameters(format!("`{head}` needs parameters")));
    let int = |s: &str| -> Result<u64> {
        s.trim()
            .parse()
            .map_err(|_| Error::MalformedParameters(format!("`{s}` is not a nonnegative integer")))
    };
    match head {
        "nagata" if args.is_none() => nagata(),
        "druzkowski" => druzkowski(params.clone()?),
        "elementary" => {
            let (i, f) = params.clone()?
                .split_once(',')
                .ok_or_else(|| Error::MalformedParameters("elementary(i, f)".into()))?;
            elementary(int(i)? as usize, f)
        }
        "wang-triangular" => wang_triangular(int(params.clone()?)?),
        "charp" => char_p_example(int(params.clone()?)?, false),
        "charp-cubic" => char_p_example(int(params.clone()?)?, true),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

/// `(x - 2y(xz + y^2) - z(xz + y^2)^2, y + z(xz + y^2), z)`, expanded.
pub fn nagata() -> Result<PolyMap> {
    let ctx = VarContext::new(&["x", "y", "z"], Field::Rationals)?;
    PolyMap::from_strings(
        &ctx,
        &[
            "x - 2*x*y*z - 2*y^3 - x^2*z^3 - 2*x*y^2*z^2 - y^4*z",
            "y + x*z^2 + y^2*z",
            "z",
        ],
    )
}

fn druzkowski(matrix: &str) -> Result<PolyMap> {
    let rows: Vec<Vec<i64>> = matrix
        .split(';')
        .map(|r| {
            r.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::MalformedParameters(format!("bad matrix entry `{v}`")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::MalformedParameters("druzkowski needs a square matrix".into()));
    }
    let ctx = VarContext::numbered("x", n, Field::Rationals)?;
    let images = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let linear: Polynomial = row
                .iter()
                .enumerate()
                .map(|(j, &a)| Polynomial::var(&ctx, j).scale_i64(a))
                .sum();
            &Polynomial::var(&ctx, i) + &linear.pow(3)
        })
        .collect();
    PolyMap::new(&ctx, images)
}

/// `x_i -> x_i + f` on `x1..xn`, with `n` the largest index mentioned.
fn elementary(i: usize, f: &str) -> Result<PolyMap> {
    let mentioned = f
        .split(|c: char| !c.is_ascii_alphanumeric() && c != '_')
        .filter_map(|tok| tok.strip_prefix('x')?.parse::<usize>().ok())
        .max()
        .unwrap_or(0);
    let n = mentioned.max(i);
    if i == 0 {
        return Err(Error::MalformedParameters("variables are numbered from 1".into()));
    }
    let ctx = VarContext::numbered("x", n, Field::Rationals)?;
    let shift = parse_polynomial(f, &ctx)?;
    if shift.degree_in(i - 1).unwrap_or(0) > 0 {
        return Err(Error::MalformedParameters(format!("the shift of x{i} may not involve x{i}")));
    }
    PolyMap::identity(&ctx).with_image(i - 1, &Polynomial::var(&ctx, i - 1) + &shift)
}

/// `L1 ∘ T ∘ L2` with `T` upper triangular quadratic and `L1, L2` random
/// products of integer elementary matrices, so the map is quadratic with
/// `det J = 1`.
fn wang_triangular(seed: u64) -> Result<PolyMap> {
    let n = 3;
    let ctx = VarContext::numbered("x", n, Field::Rationals)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unimodular = |rng: &mut ChaCha8Rng| -> Result<PolyMap> {
        let mut m = PolyMap::identity(&ctx);
        for _ in 0..4 {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            let a = rng.gen_range(-2..=2i64);
            let e = PolyMap::identity(&ctx)
                .with_image(i, &Polynomial::var(&ctx, i) + &Polynomial::var(&ctx, j).scale_i64(a))?;
            m = PolyMap::compose(&m, &e)?;
        }
        Ok(m)
    };
    let l1 = unimodular(&mut rng)?;
    let l2 = unimodular(&mut rng)?;
    let mut t = PolyMap::identity(&ctx);
    for i in 0..n {
        let mut shift = Polynomial::zero(&ctx);
        for j in i + 1..n {
            for k in j..n {
                let a = rng.gen_range(-2..=2i64);
                shift = &shift + &(&Polynomial::var(&ctx, j) * &Polynomial::var(&ctx, k)).scale_i64(a);
            }
        }
        t = t.with_image(i, &Polynomial::var(&ctx, i) + &shift)?;
    }
    PolyMap::compose(&l1, &PolyMap::compose(&t, &l2)?)
}
