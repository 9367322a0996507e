//! Acceptance suite. Each criterion prints one PASS/FAIL line with its
//! measurement and runtime; the process exits non-zero if any fails.

use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_traits::ToPrimitive;

use toral_core::centralizer::{dirichlet_rank, find_units, GeneratorSet, UnitSearchConfig};
use toral_core::conjugacy::{
    exponent_relation_defect, fit_complex_form, fit_power_law_real, interpolation_error, linearize_germ,
    solve_franks_manning, solve_with_initial, torus_dist, verify_equivariance, ComplexSample, DiffMap, GermConfig,
    GermError, GridDisplacement, Orientation, Poly, PolyMap, PerturbedMap, SolverConfig, SpectralFrame, TrigTerm,
};
use toral_core::exact::{
    is_irreducible_over_z, is_periodic, periodic_count, periodic_points, IntMatrix, IntPolynomial, ToralMatrix,
};
use toral_core::hyperbolicity::{
    bunching_at_periodic, certify_uniform_contraction, linear_exponents, periodic_exponents, periodic_exponents_at,
    stable_bundle, transport_seed, uniform_negativity, CocycleMode, CocycleSpec, ExponentReport, Negativity,
    NegativityConfig, SubadditiveSequence,
};
use toral_core::hypothesis::{theorem_1_1_check, CheckConfig, Density};
use toral_core::lyapunov::{
    coarse_spaces, default_tolerance, exponent_functionals, weyl_chambers, zero_sum_defect, DEFAULT_MARGIN,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn companion(c: &[i64]) -> ToralMatrix {
    ToralMatrix::new(IntMatrix::companion(&IntPolynomial::from_i64(c)).unwrap()).unwrap()
}

fn cat() -> ToralMatrix {
    ToralMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap()
}

fn golden_log() -> f64 {
    ((3.0 + 5f64.sqrt()) / 2.0).ln()
}

fn f64_eigenvalues(a: &ToralMatrix) -> Vec<nalgebra::Complex<f64>> {
    a.to_nalgebra().complex_eigenvalues().iter().copied().collect()
}

// ---------------------------------------------------------------------------

fn criterion_1() -> Outcome {
    let rank_one: Vec<(&str, ToralMatrix)> = vec![
        ("[[2,1],[1,1]]", cat()),
        ("[[3,1],[2,1]]", ToralMatrix::from_rows(&[vec![3, 1], vec![2, 1]]).unwrap()),
        ("[[1,1],[1,0]]", ToralMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).unwrap()),
        ("[[5,2],[2,1]]", ToralMatrix::from_rows(&[vec![5, 2], vec![2, 1]]).unwrap()),
        ("[[3,2],[1,1]]", ToralMatrix::from_rows(&[vec![3, 2], vec![1, 1]]).unwrap()),
        ("x^3-x-1", companion(&[-1, -1, 0, 1])),
        ("x^3+x-1", companion(&[-1, 1, 0, 1])),
        ("x^3-x^2-1", companion(&[-1, 0, -1, 1])),
        ("x^3+2x-1", companion(&[-1, 2, 0, 1])),
        ("x^4-3x^3+5x^2-3x+1", companion(&[1, -3, 5, -3, 1])),
        ("x^4+x+1", companion(&[1, 1, 0, 0, 1])),
    ];
    let higher: Vec<(&str, ToralMatrix)> = vec![
        ("x^3-3x-1", companion(&[-1, -3, 0, 1])),
        ("x^3-x^2-2x+1", companion(&[1, -2, -1, 1])),
        ("x^3-4x-1", companion(&[-1, -4, 0, 1])),
        ("x^4-5x^2+1", companion(&[1, 0, -5, 0, 1])),
        ("x^4-4x^2+1", companion(&[1, 0, -4, 0, 1])),
    ];
    let mut ones = 0;
    let mut more = 0;
    for (name, a) in rank_one.iter().chain(&higher) {
        ensure(is_irreducible_over_z(&a.char_poly()).is_irreducible(), format!("{name} not irreducible"))?;
        // r₁ + r₂ − 1 from floating-point eigenvalues
        let ev = f64_eigenvalues(a);
        let r1 = ev.iter().filter(|z| z.im.abs() < 1e-9).count();
        let expected = r1 + (ev.len() - r1) / 2 - 1;
        let got = dirichlet_rank(a).map_err(|e| format!("{name}: {e}"))?;
        ensure(got == expected, format!("{name}: rank {got}, eigenvalue count gives {expected}"))?;
        if got == 1 {
            ones += 1;
        } else {
            more += 1;
        }
    }
    for (name, a) in &higher {
        ensure(dirichlet_rank(a).unwrap() >= 2, format!("{name} should have rank >= 2"))?;
    }
    ensure(ones >= 10 && more >= 5, format!("{ones} rank-one and {more} higher-rank cases"))?;
    Ok(format!("{ones} matrices of rank 1, {more} of rank >= 2"))
}

fn criterion_2() -> Outcome {
    let mats = vec![
        cat(),
        ToralMatrix::from_rows(&[vec![3, 1], vec![2, 1]]).unwrap(),
        ToralMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).unwrap(),
        companion(&[-1, -3, 0, 1]),
        companion(&[-1, -1, 0, 1]),
        companion(&[1, -3, 5, -3, 1]),
    ];
    let mut checked = 0;
    for a in &mats {
        let ev = f64_eigenvalues(a);
        for n in 1..=6 {
            let oracle = ev.iter().map(|z| (z.powi(n as i32) - 1.0).norm()).product::<f64>().round() as u64;
            let count = periodic_count(a, n).to_u64().unwrap();
            let orbits = periodic_points(a, n).map_err(|e| e.to_string())?;
            let mut pts: Vec<_> = orbits.iter().flat_map(|o| o.points.iter().cloned()).collect();
            ensure(pts.iter().all(|p| is_periodic(a, p, n)), "enumerated point is not periodic")?;
            ensure(orbits.iter().all(|o| n % o.period == 0 && o.points.len() == o.period), "bad orbit period")?;
            let total = pts.len() as u64;
            pts.sort();
            pts.dedup();
            ensure(pts.len() as u64 == total, "duplicate periodic points")?;
            ensure(
                count == oracle && total == oracle,
                format!("{a:?} n={n}: count {count}, enumerated {total}, eigenvalue product {oracle}"),
            )?;
            checked += 1;
        }
    }
    let c1 = periodic_points(&cat(), 1).unwrap().iter().map(|o| o.points.len()).sum::<usize>();
    let c2 = periodic_points(&cat(), 2).unwrap().iter().map(|o| o.points.len()).sum::<usize>();
    ensure(c1 == 1 && c2 == 5, format!("cat map: {c1} fixed, {c2} of period dividing 2"))?;
    Ok(format!("{} matrices x n<=6 ({checked} counts); cat map 1 fixed, 5 of period | 2", mats.len()))
}

/// `log|eigenvalue|` of each generator on each functional's eigenvector,
/// from Rayleigh quotients with the exact integer matrices.
fn generator_logs(gs: &GeneratorSet, vecs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, String> {
    vecs.iter()
        .map(|v| {
            let v = DVector::from_column_slice(v);
            gs.generators()
                .iter()
                .map(|g| {
                    let gv = g.to_nalgebra() * &v;
                    let mu = v.dot(&gv) / v.dot(&v);
                    ensure((gv - mu * &v).norm() < 1e-8 * v.norm(), "eigenspace vector is not an eigenvector")?;
                    Ok(mu.abs().ln())
                })
                .collect()
        })
        .collect()
}

fn criterion_3() -> Outcome {
    let cubics = [("x^3-3x-1", [-1, -3, 0, 1]), ("x^3-x^2-2x+1", [1, -2, -1, 1]), ("x^3-4x-1", [-1, -4, 0, 1])];
    let cfg = CheckConfig { precision_bits: 192, ..Default::default() };
    let mut lines = Vec::new();
    for (name, c) in cubics {
        let (gs, r) = theorem_1_1_check(&companion(&c), &cfg).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.verdict_i.is_pass(), format!("{name}: (i) {:?}", r.verdict_i))?;
        ensure(r.verdict_iii.is_pass(), format!("{name}: (iii) {:?}", r.verdict_iii))?;
        ensure(r.verdict_iv.is_pass(), format!("{name}: (iv) {:?}", r.verdict_iv))?;
        ensure(r.density.iter().all(|d| d.density == Density::Dense), format!("{name}: density {:?}", r.density))?;
        ensure(r.precision_bits == 192, "precision not recorded")?;

        let fs = exponent_functionals(&gs, 192).map_err(|e| e.to_string())?;
        let cs = coarse_spaces(&fs, default_tolerance(192)).map_err(|e| e.to_string())?;
        let ch = weyl_chambers(&cs, cfg.margin).map_err(|e| e.to_string())?;
        let vecs: Vec<Vec<f64>> = fs.iter().map(|f| f.eigenspace[0].clone()).collect();
        let logs = generator_logs(&gs, &vecs)?;
        let ell = |f: usize, m: &[i64]| -> f64 { logs[f].iter().zip(m).map(|(l, mj)| l * *mj as f64).sum() };
        // each ℓ_f(m) must appear among the log-moduli of the exact product
        let check_product = |m: &[i64]| -> Result<(), String> {
            let p = gs.power(m).map_err(|e| e.to_string())?;
            let lm: Vec<f64> = f64_eigenvalues(&p).iter().map(|z| z.norm().ln()).collect();
            for f in 0..fs.len() {
                let l = ell(f, m);
                ensure(lm.iter().any(|x| (x - l).abs() < 1e-6 * (1.0 + l.abs())), format!("ℓ_{f}({m:?}) = {l} not in spectrum"))?;
            }
            Ok(())
        };
        let stable_in = |ci: usize| -> Vec<usize> {
            (0..fs.len()).filter(|&f| ell(f, &ch[ci].representative) < 0.0).collect()
        };
        for w in &r.witnesses_iii {
            check_product(&w.m)?;
            for f in stable_in(w.chamber) {
                let s = ell(f, &w.m);
                let ok = if f == w.functional { s < 0.0 } else { s > 0.0 };
                ensure(ok, format!("{name}: separation witness {:?} wrong sign on {f}", w.m))?;
            }
        }
        ensure(r.witnesses_iv.len() == ch.len(), "missing bunching witnesses")?;
        for w in &r.witnesses_iv {
            check_product(&w.m)?;
            let st = stable_in(w.chamber);
            let un: Vec<usize> = (0..fs.len()).filter(|f| !st.contains(f)).collect();
            ensure(st.iter().all(|&f| ell(f, &w.m) < 0.0), "bunching witness outside its chamber")?;
            ensure(un.iter().all(|&f| ell(f, &w.m) > 0.0), "bunching witness outside its chamber")?;
            let s = st.iter().map(|&f| ell(f, &w.m)).fold(f64::NEG_INFINITY, f64::max);
            let s = if st.is_empty() { 0.0 } else { s };
            let up = un.iter().map(|&f| ell(f, &w.m)).fold(f64::NEG_INFINITY, f64::max);
            let um = un.iter().map(|&f| ell(f, &w.m)).fold(f64::INFINITY, f64::min);
            let q = s + if un.is_empty() { 0.0 } else { up - um };
            ensure(q < 0.0 && (q - w.quantity).abs() < 1e-6, format!("{name}: bunching {q} vs reported {}", w.quantity))?;
        }
        lines.push(format!("{name}: {} + {} witnesses", r.witnesses_iii.len(), r.witnesses_iv.len()));
    }
    Ok(lines.join("; "))
}

fn criterion_4() -> Outcome {
    let a = companion(&[-1, -3, 0, 1]);
    let gs = find_units(&a, &UnitSearchConfig::default()).map_err(|e| e.to_string())?;
    ensure(gs.k() == 2, format!("found rank {}", gs.k()))?;
    let fs = exponent_functionals(&gs, 128).map_err(|e| e.to_string())?;
    let defect = zero_sum_defect(&fs).iter().map(|d| d.abs().to_f64()).fold(0.0, f64::max);
    let cs = coarse_spaces(&fs, default_tolerance(128)).map_err(|e| e.to_string())?;
    let ch = weyl_chambers(&cs, DEFAULT_MARGIN).map_err(|e| e.to_string())?;
    ensure(ch.len() == 6, format!("{} chambers", ch.len()))?;
    for c in &ch {
        let neg: Vec<i8> = c.signs.iter().map(|s| -s).collect();
        ensure(ch.iter().any(|d| d.signs == neg), format!("chamber {:?} has no negative", c.signs))?;
        // the representative really lies in the chamber
        for (i, s) in c.signs.iter().enumerate() {
            ensure(cs.representative(i).eval(&c.representative) * *s as f64 > 0.0, "representative outside chamber")?;
        }
    }
    ensure(defect < 1e-30, format!("zero-sum defect {defect:e}"))?;
    Ok(format!("6 chambers closed under negation, zero-sum defect {defect:.1e}"))
}

fn criterion_5() -> Outcome {
    let res = 512;
    let mut parts = Vec::new();

    let zero = solve_franks_manning(&PerturbedMap::linear_only(cat()), &SolverConfig { resolution: res, ..Default::default() })
        .map_err(|e| e.to_string())?;
    ensure(zero.w.sup_norm() == 0.0, format!("u = 0 gave |w| = {:e}", zero.w.sup_norm()))?;
    parts.push("u=0 -> w=0".to_string());

    let psi = vec![TrigTerm::sin(&[1, 0], &[0.03, 0.0]), TrigTerm::cos(&[0, 1], &[0.0, 0.03])];
    let pm = PerturbedMap::conjugated(cat(), psi.clone());
    let cfg = SolverConfig { resolution: res, tol: 1e-12, max_iter: 300 };
    let r = solve_franks_manning(&pm, &cfg).map_err(|e| e.to_string())?;
    let exact = |x: &[f64]| -> Vec<f64> {
        let y = PerturbedMap::phi_inverse(&psi, x).unwrap();
        y.iter().zip(x).map(|(a, b)| a - b).collect()
    };
    let truth = GridDisplacement::from_fn(2, res, exact);
    let err = r.w.distance(&truth);
    let ie = interpolation_error(&truth, exact);
    ensure(err <= 5.0 * ie, format!("|w - (φ⁻¹ - id)| = {err:e} > 5 x interpolation {ie:e}"))?;
    let (ratio, bound) = (r.observed_ratio(), r.contraction_bound);
    ensure(ratio <= bound + 0.05, format!("observed ratio {ratio} > bound {bound} + 0.05"))?;
    // independent bound: the larger of 1/|λ_u| and |λ_s| in the eigenbasis
    let frame_bound = SpectralFrame::new(&cat()).map_err(|e| e.to_string())?.contraction_bound();
    ensure((frame_bound - (-golden_log()).exp()).abs() < 1e-9, format!("contraction bound {frame_bound}"))?;
    parts.push(format!("φ⁻¹ error {err:.1e} <= 5 x {ie:.1e}, ratio {ratio:.3} <= {bound:.3}+0.05"));

    let pm = PerturbedMap::trig(cat(), vec![TrigTerm::sin(&[1, 0], &[0.05, 0.0])]);
    let cfg = SolverConfig { resolution: res, tol: 1e-11, max_iter: 300 };
    let a = solve_franks_manning(&pm, &cfg).map_err(|e| e.to_string())?;
    ensure(a.residual < 1e-8, format!("ε=0.05 residual {:e}", a.residual))?;
    let init = GridDisplacement::from_fn(2, res, |x| vec![0.1 * (TAU * x[1]).sin(), -0.2 + 0.05 * (TAU * x[0]).cos()]);
    let b = solve_with_initial(&pm, &cfg, Some(&init)).map_err(|e| e.to_string())?;
    let d = a.w.distance(&b.w);
    ensure(d < 10.0 * cfg.tol, format!("two initializations differ by {d:e}"))?;
    parts.push(format!("ε=0.05 residual {:.1e}, initializations agree to {d:.1e}", a.residual));
    Ok(parts.join("; "))
}

fn criterion_6() -> Outcome {
    let a = companion(&[-1, -3, 0, 1]);
    let gs = find_units(&a, &UnitSearchConfig::default()).map_err(|e| e.to_string())?;
    let psi = vec![
        TrigTerm::sin(&[1, 0, 0], &[0.01, -0.005, 0.004]),
        TrigTerm::cos(&[0, 1, 1], &[0.003, 0.008, -0.006]),
    ];
    let maps: Vec<PerturbedMap> = gs.generators().iter().map(|g| PerturbedMap::conjugated(g.clone(), psi.clone())).collect();
    let anosov = gs
        .generators()
        .iter()
        .position(|g| SpectralFrame::new(g).is_ok())
        .ok_or("no hyperbolic generator")?;
    let g = &gs.generators()[anosov];
    let sol = solve_franks_manning(&maps[anosov], &SolverConfig { resolution: 32, tol: 1e-12, max_iter: 300 })
        .map_err(|e| e.to_string())?;
    let eq = verify_equivariance(&sol.w, &gs, &maps, anosov, 1e-9).map_err(|e| e.to_string())?;
    ensure(eq.commuting, format!("conjugated generators do not commute: {:?}", eq.commutator_norms))?;

    let reference = linear_exponents(g);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=4 {
        for orbit in periodic_points(g, n).map_err(|e| e.to_string())?.iter().filter(|o| o.period == n) {
            let p = &orbit.points_f64()[0];
            let seed = transport_seed(&sol.w, p);
            let rep = periodic_exponents_at(&maps[anosov], &seed, n, true).map_err(|e| format!("orbit {p:?}: {e}"))?;
            // the refined point is the image of p under φ
            let image = PerturbedMap::phi(&psi, p);
            let drift = rep.points.iter().map(|q| torus_dist(q, &image)).fold(f64::INFINITY, f64::min);
            ensure(drift < 1e-6, format!("refined orbit of {p:?} is {drift:e} from φ(p)"))?;
            worst = worst.max(rep.compare_with(&reference).max_gap().unwrap());
            count += 1;
        }
    }
    ensure(worst < 1e-6, format!("rank-2 gap {worst:e}"))?;

    let f = PerturbedMap::trig(cat(), vec![TrigTerm::sin(&[1, 0], &[0.05, 0.0])]);
    let cref = linear_exponents(&cat());
    let mut best: f64 = 0.0;
    for n in 1..=4 {
        for orbit in periodic_points(&cat(), n).unwrap().iter().filter(|o| o.period == n) {
            let rep = periodic_exponents(&f, orbit, true).map_err(|e| e.to_string())?;
            best = best.max(rep.compare_with(&cref).max_gap().unwrap());
        }
    }
    ensure(best > 1e-3, format!("rank-1 largest gap {best:e}"))?;
    Ok(format!("rank 2: {count} orbits, max gap {worst:.1e}; rank 1 perturbation: max gap {best:.3e}"))
}

fn criterion_7() -> Outcome {
    let (t, ap, am) = (1.7, 0.8, -1.3);
    let xs: Vec<f64> = (1..=40).map(|i| 0.01 * i as f64).flat_map(|x| [x, -x]).collect();
    let samples: Vec<(f64, f64)> =
        xs.iter().map(|&x| (x, if x > 0.0 { ap } else { am } * x.abs().powf(t))).collect();
    let fr = fit_power_law_real(&samples).map_err(|e| e.to_string())?;
    let real_err = (fr.t - t).abs().max((fr.alpha_plus.unwrap() - ap).abs()).max((fr.alpha_minus.unwrap() - am).abs());
    ensure(real_err < 1e-6 && fr.rms < 1e-6, format!("real fit {fr:?}"))?;

    let (t, a, alpha) = (1.3, 0.7, (0.0, 2.0));
    let form = |z: (f64, f64)| -> (f64, f64) {
        let r = z.0.hypot(z.1);
        let th = z.1.atan2(z.0) + a * r.ln();
        let m = r.powf(t);
        let w = (m * th.cos(), m * th.sin());
        (alpha.0 * w.0 - alpha.1 * w.1, alpha.0 * w.1 + alpha.1 * w.0)
    };
    let cs: Vec<ComplexSample> = (1..=60)
        .map(|i| {
            let r = 0.02 * i as f64;
            let th = 0.37 * i as f64;
            let z = (r * th.cos(), r * th.sin());
            ComplexSample { z, h: form(z) }
        })
        .collect();
    let fc = fit_complex_form(&cs, Some(Orientation::Preserving)).map_err(|e| e.to_string())?;
    let (fa, fal) = (fc.a.unwrap(), fc.alpha.unwrap());
    let complex_err = (fc.t - t).abs().max((fa - a).abs()).max((fal.0 - alpha.0).abs()).max((fal.1 - alpha.1).abs());
    ensure(complex_err < 1e-6 && fc.rms < 1e-6, format!("complex fit {fc:?}"))?;

    // ℤ² acting densely on ℝ⁺ by ρ(n) = 2^{n₁} 3^{n₂}, conjugated by h(x) = α xᵗ
    let (t, alpha) = (1.5, 0.6);
    let h = |x: f64| alpha * x.powf(t);
    let x0 = 0.9;
    let mut orbit = Vec::new();
    for n1 in -4i32..=4 {
        for n2 in -3i32..=3 {
            let rho = 2f64.powi(n1) * 3f64.powi(n2);
            if (0.05..20.0).contains(&(rho * x0)) {
                orbit.push((rho * x0, h(rho * x0)));
            }
        }
    }
    let fd = fit_power_law_real(&orbit).map_err(|e| e.to_string())?;
    // ρ*(eⱼ) read off from h ∘ ρ(eⱼ) ∘ h⁻¹ at the base point
    let pairs: Vec<(f64, f64)> = [2.0, 3.0].iter().map(|&r| (r, h(r * x0) / h(x0))).collect();
    let defect = exponent_relation_defect(&pairs, fd.t);
    ensure((fd.t - t).abs() < 1e-6 && defect < 1e-6, format!("dense action: t = {}, defect {defect:e}", fd.t))?;
    Ok(format!(
        "real err {real_err:.1e}, complex err {complex_err:.1e}, dense action t = {:.9} relation defect {defect:.1e}",
        fd.t
    ))
}

fn criterion_8() -> Outcome {
    let mono = |e: &[u32], c: f64| Poly::monomial(e.to_vec(), c);
    let lam = 0.5;
    let f = PolyMap::new(vec![mono(&[1, 0], lam * lam), mono(&[0, 1], lam)]);
    let g = PolyMap::new(vec![mono(&[1, 0], 1.0).add(&mono(&[0, 2], 1.0)), mono(&[0, 1], 1.0)]);
    for x in [[0.1, 0.2], [-0.3, 0.25]] {
        let (a, b) = (f.compose(&g, 4).eval(&x), g.compose(&f, 4).eval(&x));
        ensure((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15, "obstructed pair does not commute")?;
    }
    let obstruction = match linearize_germ(&[f, g], &GermConfig::default()) {
        Err(GermError::Obstruction { flag, map, degree, residual }) => {
            ensure(flag == 2, format!("obstruction on flag {flag}"))?;
            format!("obstruction on flag {flag} (map {map}, degree {degree}, residual {residual:.2e})")
        }
        other => return Err(format!("expected an obstruction, got {other:?}")),
    };

    let t = PolyMap::new(vec![mono(&[1, 0], 0.5), mono(&[0, 1], 0.6).add(&mono(&[2, 0], -0.35))]);
    let s = PolyMap::new(vec![mono(&[1, 0], 0.7), mono(&[0, 1], 0.8).add(&mono(&[2, 0], -0.31))]);
    let chart = linearize_germ(&[t, s], &GermConfig::default()).map_err(|e| e.to_string())?;
    let worst = chart.residuals.iter().copied().fold(0.0, f64::max);
    ensure(worst < 1e-8, format!("chart residuals {:?}", chart.residuals))?;
    // oracle: the chart is (x, y) ↦ (x, y − x²)
    let chart_err = (0..=10)
        .map(|i| {
            let p = [-0.3 + 0.06 * i as f64, 0.2 - 0.04 * i as f64];
            let y = chart.eval(&p);
            (y[0] - p[0]).abs().max((y[1] - (p[1] - p[0] * p[0])).abs())
        })
        .fold(0.0, f64::max);
    ensure(chart_err < 1e-8, format!("chart differs from φ⁻¹ by {chart_err:e}"))?;
    Ok(format!("{obstruction}; commuting pair residual {worst:.1e}, chart error {chart_err:.1e}"))
}

/// Additive cocycle over the doubling map, vanishing at the fixed point 0.
struct Indifferent;

impl SubadditiveSequence for Indifferent {
    fn dim(&self) -> usize {
        1
    }
    fn step(&self, x: &[f64]) -> Vec<f64> {
        vec![(2.0 * x[0]).rem_euclid(1.0)]
    }
    fn a(&self, n: usize, x: &[f64]) -> f64 {
        let mut y = x[0];
        let mut s = 0.0;
        for _ in 0..n {
            s -= (std::f64::consts::PI * y).sin().powi(2);
            y = (2.0 * y).rem_euclid(1.0);
        }
        s
    }
}

/// `log ‖Dfᴺ|E‖` recomputed from scratch along the orbit.
fn direct_a(f: &dyn DiffMap, e: &(dyn Fn(&[f64]) -> DMatrix<f64> + Sync), n: usize, x: &[f64]) -> f64 {
    let mut y = x.to_vec();
    let mut m = e(x);
    for _ in 0..n {
        m = f.jacobian(&y) * m;
        y = f.apply(&y);
    }
    m.norm().ln()
}

fn criterion_9() -> Outcome {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let lin = PerturbedMap::linear_only(cat());
    let v = DVector::from_vec(vec![1.0, -phi]).normalize();
    let e_lin = move |_: &[f64]| DMatrix::from_column_slice(2, 1, v.as_slice());
    let spec = CocycleSpec { map: &lin, bundle: &e_lin, mode: CocycleMode::Contraction };
    let cfg = NegativityConfig { resolution: 16, ..Default::default() };
    let c = certify_uniform_contraction(&spec, &cfg, 1e-9).map_err(|e| e.to_string())?;
    let c = c.certificate().ok_or("cat stable bundle not certified")?;
    ensure(c.n == 1 && (c.rate + golden_log()).abs() < 1e-12, format!("cat certificate {c:?}"))?;

    let grid = GridDisplacement::zeros(2, cfg.resolution);
    let recheck = |f: &dyn DiffMap, e: &(dyn Fn(&[f64]) -> DMatrix<f64> + Sync), n: usize| -> f64 {
        (0..grid.len()).map(|p| direct_a(f, e, n, &grid.point(p))).fold(f64::NEG_INFINITY, f64::max)
    };
    let lin_max = recheck(&lin, &e_lin, c.n);
    ensure(lin_max < 0.0, format!("cat recheck max a_N = {lin_max}"))?;

    let pert = PerturbedMap::trig(cat(), vec![TrigTerm::sin(&[1, 0], &[0.05, 0.0])]);
    let seed = DMatrix::from_column_slice(2, 1, &[1.0, -phi]);
    let e_pert = |x: &[f64]| stable_bundle(&pert, x, &seed, 30);
    let spec = CocycleSpec { map: &pert, bundle: &e_pert, mode: CocycleMode::Contraction };
    let cp = certify_uniform_contraction(&spec, &NegativityConfig { spot_checks: 200, ..cfg.clone() }, 1e-8)
        .map_err(|e| e.to_string())?;
    let cp = cp.certificate().ok_or("ε=0.05 stable bundle not certified")?.clone();
    let pert_max = recheck(&pert, &e_pert, cp.n);
    ensure(pert_max < 0.0, format!("perturbed recheck max a_N = {pert_max}"))?;
    ensure((pert_max - cp.max_a_n).abs() < 1e-9, format!("recheck {pert_max} vs certificate {}", cp.max_a_n))?;

    let ind = uniform_negativity(&Indifferent, &NegativityConfig { resolution: 64, ..Default::default() })
        .map_err(|e| e.to_string())?;
    let profile = match ind {
        Negativity::Counterexample(p) => p,
        Negativity::Certified(c) => return Err(format!("indifferent cocycle certified: {c:?}")),
    };
    ensure(profile.points.iter().any(|x| x[0] == 0.0), "counterexample misses the indifferent point")?;
    Ok(format!(
        "cat N = {} (max a_N {lin_max:.4}); ε=0.05 N = {} (max a_N {pert_max:.4}); indifferent cocycle refuted at {} points",
        c.n,
        cp.n,
        profile.points.len()
    ))
}

fn criterion_10() -> Outcome {
    let f = PerturbedMap::linear_only(cat());
    let reports: Vec<ExponentReport> = (1..=2)
        .flat_map(|n| periodic_points(&cat(), n).unwrap().into_iter().filter(move |o| o.period == n))
        .map(|o| periodic_exponents(&f, &o, false).unwrap())
        .collect();
    // closed form: (χ₂⁻ − χ₁⁺) / χ₂⁺ = (log μ + log μ) / log μ
    let closed = (golden_log() + golden_log()) / golden_log();
    let v = bunching_at_periodic(&reports, &[true, false], 1.0, 3.0);
    let r_star = v.threshold.ok_or("no threshold")?;
    ensure((r_star - closed).abs() < 1e-9, format!("r* = {r_star}, closed form {closed}"))?;
    let below = bunching_at_periodic(&reports, &[true, false], r_star - 1e-9, 3.0).pass;
    let above = bunching_at_periodic(&reports, &[true, false], r_star + 1e-9, 3.0).pass;
    ensure(below && !above, format!("verdict below {below}, above {above}"))?;
    Ok(format!("r* = {r_star:.12} (closed form {closed}), pass below, fail above"))
}

// ---------------------------------------------------------------------------

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        ("rank classification", criterion_1, Duration::from_secs(1)),
        ("periodic point counts", criterion_2, Duration::from_secs(1)),
        ("hypotheses on totally real cubics", criterion_3, Duration::from_secs(30)),
        ("Weyl chambers of the Cartan action", criterion_4, Duration::from_secs(5)),
        ("Franks-Manning conjugacy", criterion_5, Duration::from_secs(120)),
        ("periodic exponent rigidity contrast", criterion_6, Duration::from_secs(120)),
        ("power-law fits", criterion_7, Duration::from_secs(1)),
        ("germ linearization", criterion_8, Duration::from_secs(10)),
        ("hyperbolicity certificates", criterion_9, Duration::from_secs(30)),
        ("bunching threshold", criterion_10, Duration::from_secs(1)),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= *limit => (true, d),
            Ok(d) => (false, format!("{d}; too slow")),
            Err(e) => (false, e),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.2?} / limit {:?}]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed,
            limit
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
