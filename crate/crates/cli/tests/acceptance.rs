//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use yagzhev::algebra::enumerate_shapes;
use yagzhev::inverse::gabber_bound;
use yagzhev::{
    blowup_cubic, blowup_inverse, check_capelli, check_engel, check_yagzhev, corpus,
    decide_invertibility, enumerate_terms, evaluate_term, generic_realization, inverse_series,
    map_to_algebra, parse_oalg, parse_pmap, polarize, reduce_degree_traced, verify_inverse,
    Collision, Field, HomogeneousFormVector, Monomial, MultilinearOp, OperatorAlgebra, PolyMap,
    PolyMatrix, Polynomial, Scalar, TermExpr, TermTree, VarContext, Verdict,
};

type Check = fn() -> Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q_map(names: &[&str], images: &[&str]) -> PolyMap {
    let ctx = VarContext::new(names, Field::Rationals).unwrap();
    PolyMap::from_strings(&ctx, images).unwrap()
}

fn load(path: &str) -> PolyMap {
    parse_pmap(&fs::read_to_string(common::root().join(path)).unwrap()).unwrap()
}

/// Exponent vectors of all monomials of `degree` in `n` variables.
fn monomials(n: usize, degree: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![degree]];
    }
    (0..=degree)
        .rev()
        .flat_map(|a| {
            monomials(n - 1, degree - a)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, a);
                    rest
                })
        })
        .collect()
}

/// `x + h` with `h` of degree 2..=3 and coefficients in -2..=2; when
/// `triangular`, the shift of `x_i` only involves later variables.
fn random_normalized(rng: &mut ChaCha8Rng, triangular: bool) -> PolyMap {
    let n = rng.gen_range(1..=3usize);
    let ctx = VarContext::numbered("x", n, Field::Rationals).unwrap();
    let images = (0..n)
        .map(|i| {
            let first = if triangular { i + 1 } else { 0 };
            let mut p = Polynomial::var(&ctx, i);
            if first == n {
                return p;
            }
            for d in 2..=3u32 {
                for m in monomials(n - first, d) {
                    if rng.gen_bool(0.35) {
                        let mut e = vec![0; first];
                        e.extend(m);
                        let c = ctx.field().from_i64(rng.gen_range(-2..=2));
                        p = &p + &Polynomial::monomial(&ctx, Monomial::new(e), c);
                    }
                }
            }
            p
        })
        .collect();
    PolyMap::new(&ctx, images).unwrap()
}

fn random_family() -> Vec<PolyMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..25)
        .map(|k| random_normalized(&mut rng, k % 2 == 0))
        .collect()
}

fn nagata() -> Result<(), String> {
    let f = load("corpus/nagata.pmap");
    ensure(f.jacobian_det().is_one(), || {
        format!("det J = {}", f.jacobian_det().to_canonical_string())
    })?;
    let r = decide_invertibility(&f, None).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Invertible, || {
        format!("verdict {:?}", r.verdict)
    })?;
    ensure(r.gabber_bound == 25, || {
        format!("gabber bound {}", r.gabber_bound)
    })?;
    let g = r.inverse.ok_or("no inverse")?;
    ensure(verify_inverse(&f, &g).unwrap(), || {
        "inverse fails verification".into()
    })
}

fn char_p() -> Result<(), String> {
    let f = load("corpus/charp5.pmap");
    ensure(f.jacobian_det().is_one(), || "raw det J is not 1".into())?;
    let r = decide_invertibility(&f, None).map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::NotInvertible, || {
        format!("verdict {:?}", r.verdict)
    })?;
    ensure(r.witness_degree == Some(25), || {
        format!("witness degree {:?}", r.witness_degree)
    })?;

    let cubic = corpus("charp-cubic(5)").map_err(|e| e.to_string())?;
    ensure(cubic.is_cubic_homogeneous(), || {
        "reduced map is not cubic homogeneous".into()
    })?;
    ensure(cubic == load("corpus/derived/charp5-cubic.pmap"), || {
        "pipeline differs from the checked-in map".into()
    })?;
    let collision = Collision::frobenius(5).unwrap();
    let reduction = reduce_degree_traced(&f).unwrap();
    let carried = collision
        .through_reduction(&reduction)
        .unwrap()
        .through_blowup(&reduction.map)
        .unwrap();
    ensure(carried.verify(&cubic).unwrap(), || {
        "collision does not survive".into()
    })?;

    let a = map_to_algebra(&cubic).map_err(|e| e.to_string())?;
    let n = a.dim() as u32;
    let e = check_engel(&a, (n - 1) * 2 + 1).map_err(|e| e.to_string())?;
    ensure(e.is_engel, || "reduced algebra is not Engel".into())?;
    let y = check_yagzhev(&a, 101, 130).map_err(|e| e.to_string())?;
    ensure(!y.is_yagzhev, || {
        "reduced algebra passes the weight-sum identities".into()
    })
}

/// c_1 = 1, c_q = sum over i + j = q of c_i c_j.
fn catalan_oracle(n: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::from(0); n + 1];
    c[1] = BigInt::from(1);
    for q in 2..=n {
        c[q] = (1..q).map(|i| &c[i] * &c[q - i]).sum();
    }
    c
}

fn catalan() -> Result<(), String> {
    let f = q_map(&["x"], &["x - x^2"]);
    let s = inverse_series(&f, 12).map_err(|e| e.to_string())?;
    let oracle = catalan_oracle(12);
    for q in 1..=12u32 {
        let expected = Polynomial::monomial(
            f.ctx(),
            Monomial::new(vec![q]),
            Field::Rationals.from_bigint(&oracle[q as usize]),
        );
        ensure(s.component(q) == [expected], || format!("component {q}"))?;
    }
    Ok(())
}

fn term_series() -> Result<(), String> {
    for (k, f) in random_family().iter().enumerate() {
        let a = map_to_algebra(f).map_err(|e| e.to_string())?;
        let s = inverse_series(f, 8).map_err(|e| e.to_string())?;
        let generic: Vec<Polynomial> = (0..a.dim()).map(|i| Polynomial::var(a.ctx(), i)).collect();
        for q in 1..=8 {
            let mut sum = vec![Polynomial::zero(a.ctx()); a.dim()];
            for t in enumerate_shapes(&a.signature(), q) {
                let v = evaluate_term(&t, &a, std::slice::from_ref(&generic)).unwrap();
                for (s, x) in sum.iter_mut().zip(v) {
                    *s = &*s + &x;
                }
            }
            ensure(s.component(q as u32) == sum.as_slice(), || {
                format!("map {k}, weight {q}")
            })?;
        }
    }
    Ok(())
}

fn engel() -> Result<(), String> {
    let mut with_det_one = 0;
    for (k, f) in random_family().iter().enumerate() {
        let n = f.nvars() as u32;
        let m = f.degree().unwrap_or(1).max(1);
        let a = map_to_algebra(f).map_err(|e| e.to_string())?;
        let e = check_engel(&a, (n - 1) * (m - 1) + 1).map_err(|e| e.to_string())?;
        let det_one = f.jacobian_det().is_one();
        with_det_one += det_one as usize;
        ensure(e.is_engel == det_one, || {
            format!("map {k}: engel {} but det J = 1 is {det_one}", e.is_engel)
        })?;
    }
    ensure(with_det_one > 0 && with_det_one < 25, || {
        "family does not exercise both sides".into()
    })
}

fn yagzhev_corpus() -> Result<(), String> {
    let mut maps: Vec<(String, PolyMap)> = Vec::new();
    let mut files: Vec<_> = fs::read_dir(common::root().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "pmap"))
        .collect();
    files.sort();
    for p in files {
        maps.push((
            p.display().to_string(),
            parse_pmap(&fs::read_to_string(&p).unwrap()).unwrap(),
        ));
    }
    for name in [
        "nagata",
        "druzkowski(1,1;-1,-1)",
        "druzkowski(2,1;-4,-2)",
        "elementary(2, x1^3 + x3^2)",
        "wang-triangular(0)",
        "wang-triangular(7)",
        "charp(5)",
        "charp(7)",
    ] {
        maps.push((name.into(), corpus(name).unwrap()));
    }
    for (name, f) in &maps {
        let r = decide_invertibility(f, None).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.verdict != Verdict::Undecided, || {
            format!("{name}: undecided")
        })?;
        let (normalized, _, _) = f.normalize().map_err(|e| format!("{name}: {e}"))?;
        let a = map_to_algebra(&normalized).unwrap();
        let b = gabber_bound(f.degree().unwrap_or(1), f.nvars()) as u32;
        let m = f.degree().unwrap_or(1).max(1);
        let y = check_yagzhev(&a, b + 1, b + m).map_err(|e| format!("{name}: {e}"))?;
        ensure(y.is_yagzhev == (r.verdict == Verdict::Invertible), || {
            format!(
                "{name}: verdict {:?}, weight sums vanish {}",
                r.verdict, y.is_yagzhev
            )
        })?;
    }
    Ok(())
}

fn polarization() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..100 {
        let n = rng.gen_range(1..=4usize);
        let l = rng.gen_range(2..=4u32);
        let ctx = VarContext::numbered("x", n, Field::Rationals).unwrap();
        let forms: Vec<Polynomial> = (0..n)
            .map(|_| {
                Polynomial::from_terms(
                    &ctx,
                    monomials(n, l).into_iter().map(|e| {
                        (
                            Monomial::new(e),
                            ctx.field().from_i64(rng.gen_range(-3..=3)),
                        )
                    }),
                )
            })
            .collect();
        let v = HomogeneousFormVector::new(&ctx, l, forms.clone()).unwrap();
        let op = polarize(&v, "psi").map_err(|e| e.to_string())?;
        ensure(op.restitute(&ctx).unwrap() == forms, || {
            format!("case {k}: restitution")
        })?;
        let images = (0..n)
            .map(|i| &Polynomial::var(&ctx, i) - &forms[i])
            .collect();
        let f = PolyMap::new(&ctx, images).unwrap();
        let expected = PolyMatrix::identity(&ctx, n).sub(
            &op.ad_matrix(&ctx)
                .unwrap()
                .scale(&ctx.field().from_i64(l as i64)),
        );
        ensure(f.jacobian() == expected, || format!("case {k}: jacobian"))?;
    }
    Ok(())
}

/// Permutations of `0..k` with their signs from the inversion count.
fn signed_permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut stack = vec![Vec::new()];
    while let Some(p) = stack.pop() {
        if p.len() == k {
            let inversions = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            out.push((p, inversions % 2 == 0));
            continue;
        }
        for v in 0..k {
            if !p.contains(&v) {
                let mut q = p.clone();
                q.push(v);
                stack.push(q);
            }
        }
    }
    out
}

/// The alternating sum over the first `k` labels, recomputed directly.
fn alternating_sum(a: &OperatorAlgebra, term: &TermTree, k: usize, basis: &[usize]) -> Vec<Scalar> {
    let field = a.field();
    let unit = |i: usize| -> Vec<Scalar> {
        (0..a.dim())
            .map(|j| field.from_i64((i == j) as i64))
            .collect()
    };
    let mut total = vec![field.zero(); a.dim()];
    for (sigma, even) in signed_permutations(k) {
        let args: Vec<Vec<Scalar>> = (0..basis.len())
            .map(|l| unit(if l < k { basis[sigma[l]] } else { basis[l] }))
            .collect();
        for (t, x) in total.iter_mut().zip(evaluate_term(term, a, &args).unwrap()) {
            *t = if even { &*t + &x } else { &*t - &x };
        }
    }
    total
}

/// Every multilinear term of weight `k..=max_weight`, every placement of
/// the alternated labels and every basis substitution.
fn capelli_brute_force(a: &OperatorAlgebra, k: usize, max_weight: usize) -> bool {
    let dim = a.dim();
    for w in k..=max_weight {
        for shape in enumerate_shapes(&a.signature(), w) {
            for positions in subsets(w, k) {
                let mut labels = vec![0; w];
                let (mut x, mut free) = (0, k);
                for (pos, label) in labels.iter_mut().enumerate() {
                    if positions.contains(&pos) {
                        *label = x;
                        x += 1;
                    } else {
                        *label = free;
                        free += 1;
                    }
                }
                let term = shape.with_leaves(&labels);
                for code in 0..dim.pow(w as u32) {
                    let basis: Vec<usize> =
                        (0..w).map(|l| code / dim.pow(l as u32) % dim).collect();
                    if alternating_sum(a, &term, k, &basis)
                        .iter()
                        .any(|c| !c.is_zero())
                    {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

fn random_algebra(rng: &mut ChaCha8Rng) -> OperatorAlgebra {
    let dim = rng.gen_range(1..=3usize);
    let field = Field::Rationals;
    let ctx = VarContext::numbered("e", dim, field).unwrap();
    let entries = |arity: usize, rng: &mut ChaCha8Rng| -> Vec<(usize, Vec<usize>, Scalar)> {
        let mut out = Vec::new();
        for code in 0..dim.pow(arity as u32 + 1) {
            if rng.gen_bool(0.4) {
                let idx: Vec<usize> = (0..=arity)
                    .map(|l| code / dim.pow(l as u32) % dim)
                    .collect();
                out.push((
                    idx[0],
                    idx[1..].to_vec(),
                    field.from_i64(rng.gen_range(-2..=2)),
                ));
            }
        }
        out
    };
    let mut ops = vec![MultilinearOp::ordered("mul", 2, dim, field, entries(2, rng)).unwrap()];
    if rng.gen_bool(0.5) {
        ops.push(MultilinearOp::symmetric("tri", 3, dim, field, entries(3, rng)).unwrap());
    }
    OperatorAlgebra::new(&ctx, ops).unwrap()
}

fn capelli() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..20 {
        let a = random_algebra(&mut rng);
        let n = a.dim();
        let r = check_capelli(&a, n + 1, 5).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("algebra {k} of dimension {n} fails"))?;
        let depth = if n == 3 { 4 } else { 5 };
        ensure(capelli_brute_force(&a, n + 1, depth), || {
            format!("algebra {k}: direct sum is nonzero")
        })?;
    }
    let a = parse_oalg(
        &fs::read_to_string(common::root().join("corpus/capelli-counterexample.oalg")).unwrap(),
    )
    .map_err(|e| e.to_string())?;
    let r = check_capelli(&a, 2, 3).map_err(|e| e.to_string())?;
    ensure(!r.holds, || "counterexample passes".into())?;
    let w = r.counterexample.ok_or("no witness")?;
    let value = alternating_sum(&a, &w.term, 2, &w.basis);
    ensure(
        value.iter().any(|c| !c.is_zero()) && value == w.value,
        || "witness does not re-verify".into(),
    )
}

fn preservation() -> Result<(), String> {
    let q = |names: &[&str], images: &[&str]| q_map(names, images);
    let maps: Vec<(&str, PolyMap)> = vec![
        ("x+x^4", q(&["x"], &["x + x^4"])),
        ("x+x^6", q(&["x"], &["x + x^6"])),
        ("charp(5)", corpus("charp(5)").unwrap()),
        (
            "druzkowski(1,1;-1,-1)",
            corpus("druzkowski(1,1;-1,-1)").unwrap(),
        ),
        (
            "druzkowski(1,0;0,1)",
            corpus("druzkowski(1,0;0,1)").unwrap(),
        ),
        (
            "wang-triangular(3)",
            corpus("wang-triangular(3)").unwrap().normalize().unwrap().0,
        ),
        ("x1+x2^4", q(&["x1", "x2"], &["x1 + x2^4", "x2"])),
        ("x-x^2", q(&["x"], &["x - x^2"])),
        ("x1+x2^5", q(&["x1", "x2"], &["x1 + x2^5", "x2"])),
        (
            "elementary cubic",
            q(&["x", "y", "z"], &["x + y^3 + z^2", "y + z^3", "z"]),
        ),
    ];
    for (name, f) in &maps {
        let r = decide_invertibility(f, Some(64)).map_err(|e| format!("{name}: {e}"))?;
        let reduction = reduce_degree_traced(f).map_err(|e| format!("{name}: {e}"))?;
        let reduced = &reduction.map;
        let blown = blowup_cubic(reduced).map_err(|e| format!("{name}: {e}"))?;
        ensure(blown.is_cubic_homogeneous(), || {
            format!("{name}: blow-up is not cubic homogeneous")
        })?;
        let det_one = f.jacobian_det().is_one();
        ensure(
            reduced.jacobian_det().is_one() == det_one && blown.jacobian_det().is_one() == det_one,
            || format!("{name}: det J = 1 not preserved"),
        )?;
        match r.verdict {
            Verdict::Invertible => {
                let g = reduction
                    .transport_inverse(r.inverse.as_ref().unwrap())
                    .unwrap();
                ensure(verify_inverse(reduced, &g).unwrap(), || {
                    format!("{name}: reduced inverse")
                })?;
                let gb = blowup_inverse(reduced, &g).unwrap();
                ensure(verify_inverse(&blown, &gb).unwrap(), || {
                    format!("{name}: blown-up inverse")
                })?;
            }
            Verdict::NotInvertible if f.ctx().field().characteristic() != 0 => {
                let c = Collision::frobenius(f.ctx().field().characteristic()).unwrap();
                ensure(c.verify(f).unwrap(), || format!("{name}: no collision"))?;
                let c = c.through_reduction(&reduction).unwrap();
                ensure(c.verify(reduced).unwrap(), || {
                    format!("{name}: reduced collision")
                })?;
                let c = c.through_blowup(reduced).unwrap();
                ensure(c.verify(&blown).unwrap(), || {
                    format!("{name}: blown-up collision")
                })?;
            }
            Verdict::NotInvertible => {
                for (stage, g) in [("reduced", reduced), ("blown-up", &blown)] {
                    let v = decide_invertibility(g, Some(64))
                        .map_err(|e| e.to_string())?
                        .verdict;
                    ensure(v == Verdict::NotInvertible, || {
                        format!("{name}: {stage} verdict {v:?}")
                    })?;
                }
            }
            Verdict::Undecided => return Err(format!("{name}: undecided")),
        }
    }
    Ok(())
}

fn wang() -> Result<(), String> {
    for seed in 0..50 {
        let f = corpus(&format!("wang-triangular({seed})")).unwrap();
        ensure(f.nvars() == 3 && f.degree() == Some(2), || {
            format!("seed {seed}: not a quadratic map in 3 variables")
        })?;
        ensure(f.jacobian_det().is_one(), || format!("seed {seed}: det J"))?;
        let v = decide_invertibility(&f, None)
            .map_err(|e| e.to_string())?
            .verdict;
        ensure(v == Verdict::Invertible, || format!("seed {seed}: {v:?}"))?;
    }
    Ok(())
}

fn random_expr(rng: &mut ChaCha8Rng, a: &OperatorAlgebra, field: Field) -> TermExpr {
    let mut terms = Vec::new();
    for w in 1..=3 {
        for t in enumerate_terms(&a.signature(), w, 2) {
            if rng.gen_bool(0.3) {
                terms.push((field.from_i64(rng.gen_range(-2..=2)), t));
            }
        }
    }
    TermExpr::from_terms(field, terms)
}

fn realization() -> Result<(), String> {
    let b =
        parse_oalg(&fs::read_to_string(common::root().join("corpus/dual-numbers.oalg")).unwrap())
            .unwrap();
    let field = b.field();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..10 {
        let e1: Vec<TermExpr> = (0..2).map(|_| random_expr(&mut rng, &b, field)).collect();
        let e2: Vec<TermExpr> = (0..2).map(|_| random_expr(&mut rng, &b, field)).collect();
        let composed: Vec<TermExpr> = e1.iter().map(|e| e.substitute(&e2).unwrap()).collect();
        let lhs = generic_realization(&b, &composed).map_err(|e| e.to_string())?;
        // e2 acts first
        let rhs = PolyMap::compose(
            &generic_realization(&b, &e2).unwrap(),
            &generic_realization(&b, &e1).unwrap(),
        )
        .unwrap();
        ensure(lhs == rhs, || format!("pair {k}"))?;
    }
    Ok(())
}

fn determinism() -> Result<(), String> {
    for (name, args) in common::cases() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = common::run(&args);
        let second = common::run(&args);
        ensure(first.status.success(), || {
            format!("{name}: {}", String::from_utf8_lossy(&first.stderr))
        })?;
        ensure(first.stdout == second.stdout, || {
            format!("{name}: runs differ")
        })?;
        let golden = fs::read(common::golden_path(&name)).map_err(|e| format!("{name}: {e}"))?;
        ensure(first.stdout == golden, || {
            format!("{name}: differs from golden file")
        })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 12] = [
        ("nagata map is invertible", nagata),
        (
            "characteristic p map is Engel but not weakly nilpotent",
            char_p,
        ),
        ("catalan oracle", catalan),
        ("term sums equal inverse components", term_series),
        ("engel type iff det J = 1", engel),
        (
            "weight sums agree with invertibility on the corpus",
            yagzhev_corpus,
        ),
        (
            "polarization round trip and jacobian identity",
            polarization,
        ),
        ("capelli identities", capelli),
        ("constructions preserve invertibility", preservation),
        ("wang family", wang),
        ("generic realization respects composition", realization),
        ("golden reports are deterministic", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.2}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
