//! The `verify` driver: named exact/numeric checks grouped into suites, each
//! deterministic for a given seed, reported as machine-readable rows.

use serde_json::json;

use grstar_core::cupalg::{
    alpha_model_check, coarse_check_v, coarse_check_v_grid, e123_decomposition, gram, include_up, predicted_cup_expansion,
    relative_commutant_check, tower_of, tower_trace, tower_unit, wedge_k, CupSide, EbFamily, EbKind,
    TowerElement,
};
use grstar_core::linalg::jacobi_eigenvalues;
use grstar_core::ncpoly::{
    alpha_j, left_mult_matrix, left_mult_norm_bound, times_j, vn_basis, z_vector, Context,
    GrElement, MatAlgebra2j, PairSide, Word,
};
use grstar_core::pairings::{catalan, dyck_paths, noncrossing_pairings};
use grstar_core::sample::{random_element, random_homogeneous, random_word, SplitMix64};
use grstar_core::scalars::{rat, rat_int, DeltaContext, FieldScalar, Rational};
use grstar_core::spectral::{
    chebyshev_p, default_zgrid, no_outlier_check, s_poly, semicircle_moments, spectral_measure,
    JacobiMatrix, MomentFunctional, Poly,
};
use grstar_core::tangle;

use crate::jsonio::CheckJson;

fn check(name: &str, params: serde_json::Value, result: Result<(), String>) -> CheckJson {
    match result {
        Ok(()) => CheckJson::new(name, params, true, None),
        Err(w) => CheckJson::new(name, params, false, Some(w)),
    }
}

fn ensure(cond: bool, witness: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(witness())
    }
}

// ---------------------------------------------------------------------------
// ncpoly suite
// ---------------------------------------------------------------------------

pub fn suite_ncpoly(seed: u64) -> Vec<CheckJson> {
    let ctx = Context::new(2);
    let mut out = Vec::new();

    out.push(check(
        "scalar-ring-axioms",
        json!({"cases": 1000, "l": 2}),
        (|| {
            let sc = ctx.scalars();
            let mut rng = SplitMix64::new(seed ^ 0x01);
            for i in 0..1000 {
                let r = |rng: &mut SplitMix64| {
                    FieldScalar::new(
                        sc,
                        [
                            rat(rng.below(19) as i64 - 9, rng.below(7) as i64 + 1),
                            rat(rng.below(19) as i64 - 9, rng.below(7) as i64 + 1),
                            rat(rng.below(19) as i64 - 9, rng.below(7) as i64 + 1),
                            rat(rng.below(19) as i64 - 9, rng.below(7) as i64 + 1),
                        ],
                    )
                };
                let (x, y, z) = (r(&mut rng), r(&mut rng), r(&mut rng));
                ensure(
                    &(&x * &y) * &z == &x * &(&y * &z)
                        && &x * &y == &y * &x
                        && &x * &(&y + &z) == &(&x * &y) + &(&x * &z),
                    || format!("axiom failed at case {i}"),
                )?;
                if !x.is_zero() {
                    ensure((&x * &x.inv().map_err(|e| e.to_string())?).is_one(), || {
                        format!("inverse failed at case {i}")
                    })?;
                }
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "star-associative-unital",
        json!({"cases": 500}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x02);
            let one = GrElement::one(&ctx);
            for i in 0..500 {
                let a = random_element(&mut rng, &ctx, 4, 3);
                let b = random_element(&mut rng, &ctx, 4, 3);
                let c = random_element(&mut rng, &ctx, 4, 3);
                ensure(a.star(&b).star(&c) == a.star(&b.star(&c)), || {
                    format!("associativity failed at case {i}")
                })?;
                ensure(one.star(&a) == a && a.star(&one) == a, || {
                    format!("unit failed at case {i}")
                })?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "bullet-associative-norm",
        json!({"cases": 300}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x03);
            for i in 0..300 {
                let a = random_element(&mut rng, &ctx, 3, 3);
                let b = random_element(&mut rng, &ctx, 3, 3);
                let c = random_element(&mut rng, &ctx, 3, 3);
                ensure(a.bullet(&b).bullet(&c) == a.bullet(&b.bullet(&c)), || {
                    format!("bullet associativity failed at case {i}")
                })?;
                let ah = random_homogeneous(&mut rng, &ctx, 2, 3);
                let bh = random_homogeneous(&mut rng, &ctx, 3, 3);
                ensure(
                    ah.bullet(&bh).norm_sq() == &ah.norm_sq() * &bh.norm_sq(),
                    || format!("bullet norm multiplicativity failed at case {i}"),
                )?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "involution-anti-automorphism",
        json!({"cases": 300}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x04);
            for i in 0..300 {
                let a = random_element(&mut rng, &ctx, 4, 3);
                let b = random_element(&mut rng, &ctx, 4, 3);
                ensure(
                    a.star(&b).involution() == b.involution().star(&a.involution())
                        && a.bullet(&b).involution() == b.involution().bullet(&a.involution())
                        && a.involution().involution() == a,
                    || format!("involution failed at case {i}"),
                )?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "trace-tracial-positive",
        json!({"cases": 500}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x05);
            for i in 0..500 {
                let a = random_element(&mut rng, &ctx, 4, 3);
                let b = random_element(&mut rng, &ctx, 4, 3);
                ensure(a.star(&b).trace() == b.star(&a).trace(), || {
                    format!("traciality failed at case {i}")
                })?;
                ensure(
                    a.star(&a.involution()).trace().sign() != std::cmp::Ordering::Less,
                    || format!("positivity failed at case {i}"),
                )?;
                ensure(a.inner(&b) == a.star(&b.involution()).trace(), || {
                    format!("inner/trace mismatch at case {i}")
                })?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "gradedness-parity",
        json!({"cases": 200}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x06);
            for i in 0..200 {
                let n = rng.below(4) as usize;
                let m = rng.below(4) as usize;
                let a = random_homogeneous(&mut rng, &ctx, n, 3);
                let b = random_homogeneous(&mut rng, &ctx, m, 3);
                for d in a.star(&b).degrees() {
                    ensure(d <= n + m && (n + m - d).is_multiple_of(2), || {
                        format!("star gradedness failed at case {i}: degree {d}")
                    })?;
                }
                ensure(
                    a.bullet(&b).homogeneous_degree().is_none_or(|d| d == n + m),
                    || format!("bullet gradedness failed at case {i}"),
                )?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "semicircular-moments-three-way",
        json!({"upto": 8}),
        (|| {
            let x1 = GrElement::letter(&ctx, 1).expect("letter");
            let mut power = GrElement::one(&ctx);
            for m in 0..=16usize {
                let tr = power.trace();
                let combinatorial = if m % 2 == 0 {
                    catalan(m / 2)
                } else {
                    0.into()
                };
                let pairing = noncrossing_pairings(&vec![1u8; m]);
                let walk = if m % 2 == 0 {
                    dyck_paths(m / 2)
                } else {
                    0.into()
                };
                let expect = FieldScalar::from_rational(
                    ctx.scalars(),
                    Rational::from_integer(combinatorial.clone()),
                );
                ensure(
                    tr == expect && pairing == combinatorial && walk == combinatorial,
                    || format!("moment {m}: trace {tr}, pairings {pairing}, walk {walk}"),
                )?;
                power = power.star(&x1);
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "mixed-moments-vs-pairings",
        json!({"cases": 200, "max_len": 10}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x07);
            for i in 0..200 {
                let len = rng.below(11) as usize;
                let w = random_word(&mut rng, 2, len);
                let mut prod = GrElement::one(&ctx);
                for &c in w.letters() {
                    prod = prod.star(&GrElement::word(&ctx, Word::letter(c)));
                }
                let tr = prod.trace();
                let count = noncrossing_pairings(w.letters());
                let expect =
                    FieldScalar::from_rational(ctx.scalars(), Rational::from_integer(count));
                ensure(tr == expect, || format!("case {i} word {w}: {tr} vs {expect}"))?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "cstar-identity",
        json!({"cases": 30, "tolerance": 1e-9}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x08);
            for i in 0..30 {
                let j = 1 + rng.below(2) as usize;
                let c = random_homogeneous(&mut rng, &ctx, 2 * j, 4);
                let cc = times_j(&c, &c.involution(), j).map_err(|e| e.to_string())?;
                let n1 = MatAlgebra2j::from_element(&cc, j)
                    .map_err(|e| e.to_string())?
                    .opnorm();
                let n2 = MatAlgebra2j::from_element(&c, j)
                    .map_err(|e| e.to_string())?
                    .opnorm();
                ensure((n1 - n2 * n2).abs() < 1e-9, || {
                    format!("case {i}: |c×c*| = {n1}, |c|² = {}", n2 * n2)
                })?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "alpha-positive-both-orientations",
        json!({"cases": 100, "tolerance": -1e-10}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x09);
            for i in 0..100 {
                let n = 1 + rng.below(4) as usize;
                let a = random_homogeneous(&mut rng, &ctx, n, 3);
                if a.is_zero() {
                    continue;
                }
                for side in [PairSide::Tail, PairSide::Head] {
                    for jj in 0..=n {
                        let alpha = alpha_j(&a, jj, side).map_err(|e| e.to_string())?;
                        let m = MatAlgebra2j::from_element(&alpha, jj).map_err(|e| e.to_string())?;
                        ensure(m.min_eigenvalue() >= -1e-10, || {
                            format!("case {i} side {side:?} j={jj}: min eig {}", m.min_eigenvalue())
                        })?;
                        ensure(alpha.involution() == alpha, || {
                            format!("case {i}: alpha_{jj} not self-adjoint")
                        })?;
                    }
                }
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "left-mult-norm-bound",
        json!({"cases": 50, "max_degree": 4, "truncation_degree": 12, "tolerance": 1e-9}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x0a);
            for i in 0..50 {
                let a = random_element(&mut rng, &ctx, 4, 5);
                if a.is_zero() {
                    continue;
                }
                let bound = left_mult_norm_bound(&a);
                let norm = left_mult_matrix(&a, 12).opnorm_lower(500, seed ^ i);
                ensure(norm <= bound + 1e-9, || {
                    format!("case {i}: compressed norm {norm} > bound {bound}")
                })?;
            }
            Ok(())
        })(),
    ));

    out
}

// ---------------------------------------------------------------------------
// cupalg suite
// ---------------------------------------------------------------------------

pub fn suite_cupalg(seed: u64) -> Vec<CheckJson> {
    let ctx = Context::new(2);
    let b = GrElement::letter(&ctx, 1).expect("letter");
    let mut out = Vec::new();

    out.push(check(
        "eb-gram-identity",
        json!({"l": 2, "degree_cap": 10}),
        (|| {
            let fam = EbFamily::new(&b).map_err(|e| e.to_string())?;
            let normalized: Vec<GrElement> = fam
                .basis(10)
                .iter()
                .map(|v| fam.normalized(v.kind))
                .collect();
            ensure(gram(&normalized).is_identity(), || {
                "normalized E_b Gram is not the identity".to_string()
            })
        })(),
    ));

    out.push(check(
        "z-vector-unit-norm-and-right-cap",
        json!({"l": 2}),
        (|| {
            let (zt, nsq) = z_vector(&b).map_err(|e| e.to_string())?;
            ensure(
                nsq == FieldScalar::from_rational(ctx.scalars(), rat(3, 2)),
                || format!("Z̃ norm² = {nsq}, expected 3/2"),
            )?;
            ensure(zt.cap_right().map_err(|e| e.to_string())?.is_zero(), || {
                "right cap of Z does not vanish".to_string()
            })?;
            let cup = GrElement::cup(&ctx);
            ensure(cup.bullet(&b).inner(&b.bullet(&cup)).is_one(), || {
                "⟨∪•b, b•∪⟩ ≠ 1".to_string()
            })
        })(),
    ));

    out.push(check(
        "cup-action-identity-families",
        json!({"k_max": 6, "r_max": 6}),
        (|| {
            let fam = EbFamily::new(&b).map_err(|e| e.to_string())?;
            let mut kinds: Vec<EbKind> = (0..=6).map(EbKind::BCup).collect();
            for k in 0..=6usize {
                for r in 0..=6usize {
                    kinds.push(EbKind::ZCup(k, r));
                }
            }
            for side in [CupSide::Left, CupSide::Right] {
                for &kind in &kinds {
                    let mut got = fam.cup_action_expand(side, kind).map_err(|e| e.to_string())?;
                    got.sort_by_key(|(k, _)| *k);
                    let want = predicted_cup_expansion(&ctx, side, kind);
                    ensure(got == want, || {
                        format!("{side:?} action on {kind} deviates from the closed-form family")
                    })?;
                }
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "alpha-model-grid",
        json!({"grid": "8x8"}),
        (|| {
            let r = alpha_model_check(&b, 7, 7).map_err(|e| e.to_string())?;
            ensure(r.pass, || r.witness.unwrap_or_default())
        })(),
    ));

    out.push(check(
        "coarse-correspondence-v2-v3",
        json!({"pads": 4}),
        (|| {
            let mut vs = vn_basis(&ctx, 2).map_err(|e| e.to_string())?;
            vs.extend(vn_basis(&ctx, 3).map_err(|e| e.to_string())?);
            let o = coarse_check_v_grid(&vs, 4).map_err(|e| e.to_string())?;
            ensure(o.pass, || o.witness.unwrap_or_default())?;
            // spot checks through the single-pair entry point
            let o2 = coarse_check_v(&vs[0], &vs[1], 1, 0, 0, 1).map_err(|e| e.to_string())?;
            ensure(o2.pass, || o2.witness.unwrap_or_default())
        })(),
    ));

    out.push(check(
        "e123-decomposition",
        json!({"n_max": 5}),
        (|| {
            for n in 0..=5usize {
                let r = e123_decomposition(&ctx, n).map_err(|e| e.to_string())?;
                ensure(r.pass(), || format!("degree {n}: {r:?}"))?;
            }
            let r2 = e123_decomposition(&ctx, 2).map_err(|e| e.to_string())?;
            ensure(
                (r2.cup_dim, r2.onebox_dim, r2.v_dim) == (1, 0, 3),
                || format!("degree 2 dims {:?}", (r2.cup_dim, r2.onebox_dim, r2.v_dim)),
            )
        })(),
    ));

    out.push(check(
        "wedge0-is-star",
        json!({"cases": 200}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x11);
            for i in 0..200 {
                let a = random_element(&mut rng, &ctx, 4, 3);
                let c = random_element(&mut rng, &ctx, 4, 3);
                let w = wedge_k(&tower_of(&a), &tower_of(&c)).map_err(|e| e.to_string())?;
                ensure(w.element() == &a.star(&c), || format!("case {i}"))?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "tower-associative-tracial",
        json!({"k_max": 2, "cases": 300}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x12);
            for k in 0..=2usize {
                for i in 0..100 {
                    let mk = |rng: &mut SplitMix64| {
                        let deg = 2 * k + rng.below(3) as usize;
                        TowerElement::new(k, random_homogeneous(rng, &ctx, deg, 3)).expect("valid")
                    };
                    let a = mk(&mut rng);
                    let c = mk(&mut rng);
                    let d = mk(&mut rng);
                    let ab_c = wedge_k(&wedge_k(&a, &c).map_err(|e| e.to_string())?, &d)
                        .map_err(|e| e.to_string())?;
                    let a_bc = wedge_k(&a, &wedge_k(&c, &d).map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?;
                    ensure(ab_c == a_bc, || format!("k={k} case {i}: associativity"))?;
                    let tac = tower_trace(&wedge_k(&a, &c).map_err(|e| e.to_string())?);
                    let tca = tower_trace(&wedge_k(&c, &a).map_err(|e| e.to_string())?);
                    ensure(tac == tca, || format!("k={k} case {i}: traciality"))?;
                    let unit = tower_unit(&ctx, k);
                    ensure(
                        wedge_k(&unit, &a).map_err(|e| e.to_string())? == a
                            && wedge_k(&a, &unit).map_err(|e| e.to_string())? == a,
                        || format!("k={k} case {i}: unit"),
                    )?;
                }
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "include-up-homomorphism",
        json!({"k_max": 2, "cases": 150}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x13);
            for k in 0..=2usize {
                ensure(include_up(&tower_unit(&ctx, k)) == tower_unit(&ctx, k + 1), || {
                    format!("k={k}: unit does not map to unit")
                })?;
                for i in 0..50 {
                    let mk = |rng: &mut SplitMix64| {
                        let deg = 2 * k + rng.below(3) as usize;
                        TowerElement::new(k, random_homogeneous(rng, &ctx, deg, 3)).expect("valid")
                    };
                    let a = mk(&mut rng);
                    let c = mk(&mut rng);
                    ensure(tower_trace(&include_up(&a)) == tower_trace(&a), || {
                        format!("k={k} case {i}: trace not preserved")
                    })?;
                    ensure(
                        include_up(&wedge_k(&a, &c).map_err(|e| e.to_string())?)
                            == wedge_k(&include_up(&a), &include_up(&c)).map_err(|e| e.to_string())?,
                        || format!("k={k} case {i}: not a homomorphism"),
                    )?;
                }
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "relative-commutant-table",
        json!({"k": 1, "degree_cap": 6}),
        (|| {
            let r = relative_commutant_check(&ctx, 1, 6).map_err(|e| e.to_string())?;
            ensure(r.pass, || r.witness.clone().unwrap_or_default())?;
            let r2 = relative_commutant_check(&ctx, 2, 3).map_err(|e| e.to_string())?;
            ensure(r2.pass, || r2.witness.unwrap_or_default())
        })(),
    ));

    out.push(check(
        "eb-span-completeness",
        json!({"degree_cap": 9}),
        (|| {
            let fam = EbFamily::new(&b).map_err(|e| e.to_string())?;
            for n in (1..=9usize).step_by(2) {
                let kinds = EbKind::of_degree(n);
                let vectors: Vec<GrElement> =
                    kinds.iter().map(|k| fam.vector(*k).element).collect();
                let mut m = grstar_core::linalg::Mat::filled(
                    vectors.len(),
                    2usize.pow(n as u32),
                    FieldScalar::zero(ctx.scalars()),
                );
                for (i, v) in vectors.iter().enumerate() {
                    for (c, x) in v.coords(n).map_err(|e| e.to_string())?.into_iter().enumerate() {
                        m.set(i, c, x);
                    }
                }
                ensure(m.rank() == kinds.len(), || {
                    format!("degree {n}: rank {} of {} vectors", m.rank(), kinds.len())
                })?;
            }
            Ok(())
        })(),
    ));

    out
}

// ---------------------------------------------------------------------------
// spectral suite
// ---------------------------------------------------------------------------

pub fn suite_spectral(seed: u64) -> Vec<CheckJson> {
    let mut out = Vec::new();
    let _ = seed;

    out.push(check(
        "chebyshev-orthonormality",
        json!({"n_max": 10}),
        (|| {
            for n in 0..=10usize {
                for m in 0..=10usize {
                    let val = MomentFunctional::apply(&chebyshev_p(n).mul(&chebyshev_p(m)));
                    let expect = if n == m { rat_int(1) } else { rat_int(0) };
                    ensure(val == expect, || format!("⟨P_{n}, P_{m}⟩ = {val}"))?;
                }
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "chebyshev-basis-vectors",
        json!({"n_max": 12}),
        (|| {
            let sc = DeltaContext::from_letters(2);
            let j = JacobiMatrix::free(&sc, 14).map_err(|e| e.to_string())?;
            for n in 0..=12usize {
                let p = chebyshev_p(n);
                let pf = Poly::new(
                    p.coeffs()
                        .iter()
                        .map(|c| FieldScalar::from_rational(&sc, c.clone()))
                        .collect(),
                );
                ensure(pf.apply_to_e0(&j) == j.basis_vector(n), || {
                    format!("P_{n}(s+s*)e₀ ≠ e_{n}")
                })?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "s-poly-cyclicity",
        json!({"n_max": 30, "delta": 2, "t": ["0", "1/2", "1", "2"]}),
        (|| {
            for t in [rat_int(0), rat(1, 2), rat_int(1), rat_int(2)] {
                let j = JacobiMatrix::ct(&t, &rat_int(2), 32).map_err(|e| e.to_string())?;
                for n in 0..=30usize {
                    let p = s_poly(j.ctx(), &t, n);
                    ensure(p.apply_to_e0(&j) == j.basis_vector(n), || {
                        format!("S_{n} at t={t} misses e_{n}")
                    })?;
                }
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "hankel-positive",
        json!({"sizes": 6}),
        (|| {
            for size in 1..=6usize {
                let det = MomentFunctional::hankel(size).det();
                ensure(det == rat_int(1), || format!("Hankel det at size {size}: {det}"))?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "semicircle-moment-table",
        json!({"n_max": 16}),
        (|| {
            for n in 0..=16usize {
                let m = semicircle_moments(n);
                let expect = if n % 2 == 0 {
                    Rational::from_integer(catalan(n / 2))
                } else {
                    rat_int(0)
                };
                ensure(m == expect, || format!("moment {n}: {m}"))?;
            }
            Ok(())
        })(),
    ));

    // Spectrum confinement and atom decay, parallel over the (δ, t) grid.
    let grid: Vec<(Rational, Rational)> = [rat_int(2), rat_int(3)]
        .into_iter()
        .flat_map(|d| {
            [rat_int(-2), rat_int(-1), rat_int(0), rat_int(1), rat_int(2)]
                .into_iter()
                .map(move |t| (d.clone(), t))
        })
        .collect();
    let ns = [250usize, 500, 1000, 2000];
    let results: Vec<Result<(), String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .iter()
            .map(|(d, t)| {
                scope.spawn(move || -> Result<(), String> {
                    let mut weights = Vec::new();
                    for &n in &ns {
                        let j = JacobiMatrix::ct(t, d, n).map_err(|e| e.to_string())?;
                        let m = spectral_measure(&j).map_err(|e| e.to_string())?;
                        ensure(
                            m.min_eig() >= -2.0 - 1e-9 && m.max_eig() <= 2.0 + 1e-9,
                            || {
                                format!(
                                    "t={t} δ={d} N={n}: spectrum [{}, {}]",
                                    m.min_eig(),
                                    m.max_eig()
                                )
                            },
                        )?;
                        ensure((m.total_mass() - 1.0).abs() < 1e-9, || {
                            format!("t={t} δ={d} N={n}: total mass {}", m.total_mass())
                        })?;
                        ensure(m.moment_error(&j, 12) < 1e-8, || {
                            format!("t={t} δ={d} N={n}: moment error {}", m.moment_error(&j, 12))
                        })?;
                        weights.push(m.max_weight());
                    }
                    ensure(*weights.last().expect("nonempty") <= 0.01, || {
                        format!("t={t} δ={d}: max atom weight {} at N=2000", weights[3])
                    })?;
                    for w in weights.windows(2) {
                        ensure(w[1] <= w[0] * 1.10, || {
                            format!("t={t} δ={d}: atom weights not decreasing: {weights:?}")
                        })?;
                    }
                    Ok(())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("no panic")).collect()
    });
    out.push(check(
        "spectrum-confinement-and-atom-decay",
        json!({"delta": [2, 3], "t": [-2, -1, 0, 1, 2], "n": ns, "eig_tolerance": 1e-9, "max_weight": 0.01}),
        results.into_iter().collect::<Result<Vec<()>, String>>().map(|_| ()),
    ));

    out.push(check(
        "outlier-bound-margin",
        json!({"grid_points": 100, "z_range": [2.0, 6.0]}),
        (|| {
            let zgrid = default_zgrid(6.0, 100);
            for d in [rat_int(2), rat_int(3)] {
                for t in [rat_int(-2), rat_int(-1), rat_int(0), rat_int(1), rat_int(2)] {
                    let r = no_outlier_check(&t, &d, &zgrid).map_err(|e| e.to_string())?;
                    ensure(r.pass && r.min_margin > 0.0, || {
                        format!("t={t} δ={d}: margin {}", r.min_margin)
                    })?;
                }
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "free-truncation-dyck-moments",
        json!({"n": 24, "m_max": 16}),
        (|| {
            let sc = DeltaContext::from_letters(2);
            let j = JacobiMatrix::free(&sc, 24).map_err(|e| e.to_string())?;
            let m = spectral_measure(&j).map_err(|e| e.to_string())?;
            for k in 0..=8usize {
                let numeric = m.moment(2 * k);
                let exact = catalan(k);
                let exact_f: f64 = num_traits::ToPrimitive::to_f64(&exact).expect("small");
                ensure((numeric - exact_f).abs() < 1e-8 * exact_f.max(1.0), || {
                    format!("⟨J^{}e₀,e₀⟩ = {numeric} vs Catalan {exact}", 2 * k)
                })?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "ql-agrees-with-sturm",
        json!({"n": 300}),
        (|| {
            let j = JacobiMatrix::ct(&rat_int(1), &rat_int(2), 300).map_err(|e| e.to_string())?;
            let m = spectral_measure(&j).map_err(|e| e.to_string())?;
            let sturm =
                grstar_core::linalg::sturm_eigenvalues(&j.diag_f64(), &j.offdiag_f64());
            for (a, b) in m.atoms.iter().map(|x| x.0).zip(&sturm) {
                ensure((a - b).abs() < 1e-8, || format!("QL {a} vs Sturm {b}"))?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "weyl-interlacing-rank-two",
        json!({"n": 160}),
        (|| {
            let n = 160usize;
            let jc = JacobiMatrix::ct(&rat_int(1), &rat_int(2), n).map_err(|e| e.to_string())?;
            let sc = DeltaContext::from_letters(2);
            let jf = JacobiMatrix::free(&sc, n).map_err(|e| e.to_string())?;
            let ec: Vec<f64> = spectral_measure(&jc)
                .map_err(|e| e.to_string())?
                .atoms
                .iter()
                .map(|a| a.0)
                .collect();
            let ef: Vec<f64> = spectral_measure(&jf)
                .map_err(|e| e.to_string())?
                .atoms
                .iter()
                .map(|a| a.0)
                .collect();
            for i in 0..n - 2 {
                ensure(ec[i] <= ef[i + 2] + 1e-9 && ef[i] <= ec[i + 2] + 1e-9, || {
                    format!("interlacing fails at index {i}")
                })?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "alpha-matrix-symmetric",
        json!({"grid": "6x6"}),
        (|| {
            let (m, dim) = grstar_core::spectral::alpha_matrix(&rat_int(2), 5, 5);
            for i in 0..dim {
                for j in 0..dim {
                    ensure((m[i * dim + j] - m[j * dim + i]).abs() < 1e-14, || {
                        format!("asymmetry at ({i},{j})")
                    })?;
                }
            }
            let eig = jacobi_eigenvalues(&m, dim);
            ensure(eig.iter().all(|x| x.is_finite()), || "non-finite eigenvalue".into())
        })(),
    ));

    out
}

// ---------------------------------------------------------------------------
// tangle suite
// ---------------------------------------------------------------------------

pub fn suite_tangle(seed: u64) -> Vec<CheckJson> {
    let ctx = Context::new(2);
    let mut out = Vec::new();

    out.push(check(
        "builders-validate",
        json!({}),
        (|| {
            let mut all = vec![
                tangle::cup_tangle(),
                tangle::pairing_tangle(3),
                tangle::trace_tangle(4),
                tangle::rotation_tangle(5),
                tangle::identity_tangle(3),
                tangle::cap_left_tangle(4),
                tangle::cap_right_tangle(4),
            ];
            for k in 0..=2 {
                all.push(tangle::star_tangle(3, 2, k));
            }
            for j in 0..=3 {
                all.push(tangle::alpha_tangle(3, j, PairSide::Tail));
                all.push(tangle::alpha_tangle(3, j, PairSide::Head));
            }
            for t in all {
                t.validate()?;
            }
            // and the crosswise matching is rejected with genus 1
            let bad = tangle::Tangle::new(
                tangle::Disk { points: 4, star: 0 },
                vec![],
                vec![
                    (tangle::ep(0, 0), tangle::ep(0, 2)),
                    (tangle::ep(0, 1), tangle::ep(0, 3)),
                ],
                0,
            );
            ensure(!bad.is_valid(), || "crosswise matching validated".into())
        })(),
    ));

    out.push(check(
        "star-cross-validation",
        json!({"cases": 100}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x21);
            for i in 0..100 {
                let n = rng.below(4) as usize;
                let m = rng.below(4) as usize;
                let a = random_homogeneous(&mut rng, &ctx, n, 2);
                let c = random_homogeneous(&mut rng, &ctx, m, 2);
                let via = tangle::star_by_tangles(&a, &c, &ctx).map_err(|e| e.to_string())?;
                ensure(via == a.star(&c), || format!("case {i}"))?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "bullet-cap-pairing-cross-validation",
        json!({"cases": 100}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x22);
            for i in 0..100 {
                let n = 2 + rng.below(3) as usize;
                let m = rng.below(3) as usize;
                let a = random_homogeneous(&mut rng, &ctx, n, 3);
                let c = random_homogeneous(&mut rng, &ctx, m, 3);
                let bt = tangle::evaluate(&tangle::bullet_tangle(n, m), &[a.clone(), c.clone()], &ctx)
                    .map_err(|e| e.to_string())?;
                ensure(bt == a.bullet(&c), || format!("bullet case {i}"))?;
                let cl = tangle::evaluate(&tangle::cap_left_tangle(n), std::slice::from_ref(&a), &ctx)
                    .map_err(|e| e.to_string())?;
                ensure(cl == a.cap_left().map_err(|e| e.to_string())?, || {
                    format!("cap_left case {i}")
                })?;
                let cr = tangle::evaluate(&tangle::cap_right_tangle(n), std::slice::from_ref(&a), &ctx)
                    .map_err(|e| e.to_string())?;
                ensure(cr == a.cap_right().map_err(|e| e.to_string())?, || {
                    format!("cap_right case {i}")
                })?;
                let d = random_homogeneous(&mut rng, &ctx, n, 3);
                let pt = tangle::evaluate(&tangle::pairing_tangle(n), &[a.clone(), d.involution()], &ctx)
                    .map_err(|e| e.to_string())?;
                ensure(pt == &GrElement::one(&ctx) * &a.inner(&d), || {
                    format!("pairing case {i}")
                })?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "composition-compatibility",
        json!({"cases": 50}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x23);
            for i in 0..50 {
                let p = 1 + rng.below(2) as usize;
                let q = 1 + rng.below(2) as usize;
                let ks = rng.below((p.min(q) + 1) as u64) as usize;
                let n = p + q - 2 * ks;
                let m = 1 + rng.below(3) as usize;
                let k = rng.below((n.min(m) + 1) as u64) as usize;
                let t = tangle::star_tangle(n, m, k);
                let s = tangle::star_tangle(p, q, ks);
                let glued = tangle::compose(&t, 1, &s).map_err(|e| e.to_string())?;
                let a = random_homogeneous(&mut rng, &ctx, p, 2);
                let c = random_homogeneous(&mut rng, &ctx, q, 2);
                let d = random_homogeneous(&mut rng, &ctx, m, 2);
                let inner_val =
                    tangle::evaluate(&s, &[a.clone(), c.clone()], &ctx).map_err(|e| e.to_string())?;
                let lhs = tangle::evaluate(&glued, &[a, c, d.clone()], &ctx).map_err(|e| e.to_string())?;
                let rhs = tangle::evaluate(&t, &[inner_val, d], &ctx).map_err(|e| e.to_string())?;
                ensure(lhs == rhs, || format!("case {i}"))?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "closed-loop-delta-factor",
        json!({}),
        (|| {
            // cap ∘ cup = a closed loop worth δ·1
            let closed = tangle::compose(&tangle::cap_left_tangle(2), 1, &tangle::cup_tangle())
                .map_err(|e| e.to_string())?;
            ensure(closed.loops == 1, || format!("loops = {}", closed.loops))?;
            let v = tangle::evaluate(&closed, &[], &ctx).map_err(|e| e.to_string())?;
            ensure(v == &GrElement::one(&ctx) * &ctx.delta_scalar(), || {
                format!("closed loop evaluates to {v}")
            })?;
            // an extra loop multiplies any evaluation by δ
            let mut rng = SplitMix64::new(seed ^ 0x24);
            let t = tangle::star_tangle(2, 2, 1);
            let a = random_homogeneous(&mut rng, &ctx, 2, 3);
            let c = random_homogeneous(&mut rng, &ctx, 2, 3);
            let plain = tangle::evaluate(&t, &[a.clone(), c.clone()], &ctx).map_err(|e| e.to_string())?;
            let looped = tangle::evaluate(&t.with_extra_loops(1), &[a, c], &ctx).map_err(|e| e.to_string())?;
            ensure(looped == &plain * &ctx.delta_scalar(), || "loop factor".into())
        })(),
    ));

    out.push(check(
        "reflection-involution",
        json!({"cases": 50}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x25);
            for i in 0..50 {
                let n = 1 + rng.below(3) as usize;
                let m = 1 + rng.below(3) as usize;
                let k = rng.below((n.min(m) + 1) as u64) as usize;
                let t = tangle::star_tangle(n, m, k);
                let a = random_homogeneous(&mut rng, &ctx, n, 2);
                let c = random_homogeneous(&mut rng, &ctx, m, 2);
                let lhs = tangle::evaluate(&t.reflect(), &[a.involution(), c.involution()], &ctx)
                    .map_err(|e| e.to_string())?;
                let rhs = tangle::evaluate(&t, &[a, c], &ctx)
                    .map_err(|e| e.to_string())?
                    .involution();
                ensure(lhs == rhs, || format!("case {i}"))?;
            }
            Ok(())
        })(),
    ));

    out.push(check(
        "rotation-encoding-independence",
        json!({}),
        (|| {
            let mut rng = SplitMix64::new(seed ^ 0x26);
            let mut t = tangle::star_tangle(2, 2, 1);
            let a = random_homogeneous(&mut rng, &ctx, 2, 3);
            let c = random_homogeneous(&mut rng, &ctx, 2, 3);
            let base = tangle::evaluate(&t, &[a.clone(), c.clone()], &ctx).map_err(|e| e.to_string())?;
            t.rotation = Some(vec![vec![1, 0], vec![1, 0], vec![1, 0]]);
            t.validate()?;
            let shifted = tangle::evaluate(&t, &[a, c], &ctx).map_err(|e| e.to_string())?;
            ensure(shifted == base, || "rotation encoding changed the value".into())
        })(),
    ));

    out
}

/// Runs the named suite(s); "all" runs every suite in a fixed order.
pub fn run_suites(which: &str, seed: u64) -> Result<Vec<CheckJson>, String> {
    let mut out = Vec::new();
    match which {
        "all" => {
            out.extend(suite_ncpoly(seed));
            out.extend(suite_cupalg(seed));
            out.extend(suite_spectral(seed));
            out.extend(suite_tangle(seed));
        }
        "ncpoly" => out.extend(suite_ncpoly(seed)),
        "cupalg" => out.extend(suite_cupalg(seed)),
        "spectral" => out.extend(suite_spectral(seed)),
        "tangle" => out.extend(suite_tangle(seed)),
        other => return Err(format!("unknown suite '{other}' (expected all|ncpoly|cupalg|spectral|tangle)")),
    }
    Ok(out)
}
