//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (visible with `cargo test -- --nocapture`). Tolerances and budgets
//! are pinned here; nothing is deferred to later calibration.

use lipscale::axioms::{estimate_smoothing_constants, verify_convexity_bounds};
use lipscale::collection::{LipParams, WhitneyCollection};
use lipscale::element::Element;
use lipscale::exec::ExecMode;
use lipscale::extension::{
    derivative_consistency, extend_eval, proof_identity_check, taylor_difference_residual, Extender,
};
use lipscale::jet::Jet;
use lipscale::lipnorm::{lip_norm_finite, SampleBudget};
use lipscale::multi_index::{self, IndexTable};
use lipscale::nosmoothing::{
    diagonal_lower_bound_check, no_smoothing_growth_report, sign_correlation_sum, CMatrix,
    SmoothingFamily,
};
use lipscale::scale::{Scale, SobolevSmoothing};
use lipscale::whitney::{covering_bound, covering_cubes, dist_to_set, partition_jets, ClosedSet};
use lipscale_cli::verify::blow_up_stability;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::Instant;

fn verdict(criterion: &str, ok: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn sobolev(dim: usize, smoothing: SobolevSmoothing) -> Scale {
    Scale::SobolevTorus {
        dim,
        smoothing,
        a0: 0.0,
    }
}

/// Random collection on a small point set.
fn random_instance(
    scale: Scale,
    n: usize,
    k: usize,
    rho: f64,
    gamma: f64,
    sigma: f64,
    seed: u64,
) -> WhitneyCollection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = LipParams {
        k,
        rho,
        gamma,
        delta: 0.5,
        sigma,
    };
    let mut points: Vec<Vec<f64>> = vec![vec![0.0; n]];
    while points.len() < 3 {
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0f64..2.0)).collect();
        if points.iter().all(|q| *q != p) {
            points.push(p);
        }
    }
    let set = ClosedSet::new(points).unwrap();
    let table = IndexTable::get(n, k);
    let mut data = BTreeMap::new();
    for p in 0..set.len() {
        for j in table.indices() {
            let element = match &scale {
                Scale::Trivial { dim } => {
                    Element::Vector((0..*dim).map(|_| rng.random_range(-1.0f64..1.0)).collect())
                }
                _ => {
                    let d = scale.site_dim();
                    Element::from_modes((0..4).map(|_| {
                        (
                            (0..d).map(|_| rng.random_range(-8i64..=8)).collect(),
                            Complex64::new(
                                rng.random_range(-1.0..1.0),
                                rng.random_range(-1.0..1.0),
                            ),
                        )
                    }))
                }
            };
            data.insert((p, j.clone()), element);
        }
    }
    WhitneyCollection::new(params, scale, set, data).unwrap()
}

#[test]
fn criterion_01_sharp_bracket_constants() {
    let start = Instant::now();
    let scale = sobolev(1, SobolevSmoothing::BracketSharp);
    let pairs = [(0.0, 1.0), (0.5, 2.0), (1.0, 3.0)];
    let report =
        estimate_smoothing_constants(&scale, 1000, 42, &pairs, ExecMode::default()).unwrap();
    let worst_a = report.pairs.iter().map(|p| p.a_emp).fold(0.0, f64::max);
    let worst_b = report.pairs.iter().map(|p| p.b_emp).fold(0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    let ok = worst_a <= 1.0 + 1e-12 && worst_b <= 1.0 + 1e-12 && elapsed < 5.0;
    verdict(
        "1 (sharp-bracket constants)",
        ok,
        &format!("A_emp = {worst_a:.3e}, B_emp = {worst_b:.3e}, {elapsed:.2} s over 1000 elements"),
    );
}

#[test]
fn criterion_02_interpolation_and_difference_bounds() {
    let standard: &[(f64, f64, f64)] = &[(0.0, 1.0, 2.0), (0.5, 1.5, 3.0), (1.0, 1.0, 2.5)];
    let lp_triples: &[(f64, f64, f64)] = &[(0.0, 0.5, 1.0), (0.0, 0.25, 0.75), (0.5, 0.75, 1.0)];
    let ck_triples: &[(f64, f64, f64)] = &[(0.0, 1.0, 2.0), (1.0, 2.0, 3.0)];
    let theta_pairs: &[(f64, f64)] = &[(1.0, 4.0), (2.0, 2.0), (1.5, 16.0), (8.0, 64.0)];
    let mut total_checks = 0usize;
    let mut total_violations = 0usize;
    for (scale, triples, count) in [
        (sobolev(1, SobolevSmoothing::BracketSharp), standard, 100),
        (sobolev(2, SobolevSmoothing::BracketSharp), standard, 100),
        (sobolev(1, SobolevSmoothing::EuclidSharp), standard, 100),
        (sobolev(1, SobolevSmoothing::SmoothCutoff), standard, 100),
        (Scale::Trivial { dim: 3 }, standard, 100),
        (
            Scale::PolyDecay {
                dim: 1,
                site_scale: 1.0,
            },
            standard,
            100,
        ),
        (Scale::Lp, lp_triples, 100),
        (Scale::CkTorus1d, ck_triples, 40),
    ] {
        let report =
            verify_convexity_bounds(&scale, count, 42, triples, theta_pairs, ExecMode::default())
                .unwrap();
        total_checks += report.checks;
        total_violations += report.violations;
    }
    verdict(
        "2 (interpolation and difference bounds)",
        total_violations == 0 && total_checks > 0,
        &format!("{total_violations} violations over {total_checks} checks on 8 scales"),
    );
}

#[test]
fn criterion_03_whitney_invariants() {
    let start = Instant::now();
    let mode = ExecMode::default();
    let mut all_ok = true;
    let mut detail = String::new();
    for n in 1..=3usize {
        let sets_count = 50;
        let per_set = 10_000 / sets_count;
        let mut master = ChaCha8Rng::seed_from_u64(1000 + n as u64);
        let set_seeds: Vec<u64> = (0..sets_count).map(|_| master.random()).collect();
        let outcomes = lipscale::exec::map_collect(mode, &set_seeds, |&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let count = rng.random_range(1..=20usize);
            let mut points = std::collections::BTreeSet::new();
            while points.len() < count {
                let p: Vec<i64> = (0..n)
                    .map(|_| (rng.random_range(-4.0f64..4.0) * 64.0) as i64)
                    .collect();
                points.insert(p);
            }
            let f = ClosedSet::new(
                points
                    .into_iter()
                    .map(|p| p.iter().map(|&c| c as f64 / 64.0).collect())
                    .collect(),
            )
            .unwrap();
            let mut geometry_ok = true;
            let mut cover_ok = true;
            let mut worst_sum = 0.0f64;
            let mut worst_dsum = 0.0f64;
            let mut guarded = 0usize;
            let mut sampled = 0usize;
            while sampled < per_set {
                let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0f64..5.0)).collect();
                let d = dist_to_set(&x, &f);
                if d <= lipscale::whitney::MIN_DIST {
                    continue;
                }
                sampled += 1;
                let cubes = covering_cubes(&x, &f).unwrap();
                cover_ok &= !cubes.is_empty() && cubes.len() <= covering_bound(n);
                for cube in &cubes {
                    let q = cube.diam();
                    let lambda = cube.expansion_factor();
                    geometry_ok &= q <= lambda * q && lambda * q <= 2.0 * q;
                    let dqf = cube.dist_to_set(&f);
                    geometry_ok &= q <= dqf && dqf <= 4.0 * q;
                    geometry_ok &= 0.5 * q <= d && d <= 6.0 * q;
                    let anchor = lipscale::whitney::nearest_anchor(cube, &f);
                    let xp: f64 = x
                        .iter()
                        .zip(&anchor)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    geometry_ok &= 0.5 * q <= xp && xp <= 6.0 * q;
                    for y in f.points() {
                        let xy: f64 = x
                            .iter()
                            .zip(y)
                            .map(|(a, b)| (a - b) * (a - b))
                            .sum::<f64>()
                            .sqrt();
                        geometry_ok &= 0.5 * q <= xy;
                    }
                }
                let jets = partition_jets(&x, &f, 3).unwrap();
                let mut total = Jet::zero(n, 3);
                for (_, jet) in &jets {
                    total = total.add(jet).unwrap();
                }
                worst_sum = worst_sum.max((total.value() - 1.0).abs());
                if d >= 2.0 {
                    guarded += 1;
                    let table = IndexTable::get(n, 3);
                    for idx in table.indices() {
                        if !idx.iter().all(|&c| c == 0) {
                            worst_dsum = worst_dsum.max(total.derivative(idx).abs());
                        }
                    }
                }
            }
            (geometry_ok, cover_ok, worst_sum, worst_dsum, guarded)
        });
        let mut geometry_ok = true;
        let mut cover_ok = true;
        let mut worst_sum = 0.0f64;
        let mut worst_dsum = 0.0f64;
        let mut guarded = 0usize;
        for (g, c, s, ds, gu) in outcomes {
            geometry_ok &= g;
            cover_ok &= c;
            worst_sum = worst_sum.max(s);
            worst_dsum = worst_dsum.max(ds);
            guarded += gu;
        }
        let ok =
            geometry_ok && cover_ok && worst_sum <= 1e-10 && worst_dsum <= 1e-8 && guarded > 200;
        all_ok &= ok;
        detail.push_str(&format!(
            "[n={n}: geom {geometry_ok}, cover {cover_ok}, sum {worst_sum:.2e}, dsum {worst_dsum:.2e} ({guarded} guarded)] "
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    all_ok &= elapsed < 60.0;
    detail.push_str(&format!("{elapsed:.1} s"));
    verdict("3 (Whitney invariants)", all_ok, &detail);
}

#[test]
fn criterion_04_restriction_and_support() {
    let mut ok = true;
    for (scale, n, k) in [
        (Scale::Trivial { dim: 2 }, 1usize, 0usize),
        (sobolev(1, SobolevSmoothing::BracketSharp), 1, 1),
        (sobolev(2, SobolevSmoothing::BracketSharp), 2, 1),
    ] {
        let f = random_instance(scale, n, k, k as f64 + 0.75, 1.0, 2.0, 7000 + k as u64);
        let ext = Extender::new(&f).unwrap();
        let table = f.order_table();
        for p in 0..f.set().len() {
            let x = f.set().point(p).to_vec();
            for j in table.indices() {
                ok &= ext.eval(&x, j).unwrap() == *f.value(p, j);
            }
        }
        // far points: exactly zero
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(20.0f64..40.0)).collect();
            assert!(dist_to_set(&x, f.set()) > 6.0);
            for j in table.indices() {
                ok &= ext.eval(&x, j).unwrap().is_zero();
            }
        }
    }
    verdict(
        "4 (restriction and support)",
        ok,
        "stored values reproduced bit-identically; zero beyond radius 6",
    );
}

#[test]
fn criterion_05_proof_identities() {
    let mut worst = 0.0f64;
    let mut worst_taylor = 0.0f64;
    let instances = [
        random_instance(
            sobolev(1, SobolevSmoothing::BracketSharp),
            1,
            0,
            0.75,
            1.0,
            2.0,
            501,
        ),
        random_instance(
            sobolev(1, SobolevSmoothing::BracketSharp),
            1,
            1,
            1.75,
            1.0,
            2.0,
            502,
        ),
        random_instance(
            sobolev(1, SobolevSmoothing::BracketSharp),
            1,
            2,
            2.75,
            1.0,
            2.5,
            503,
        ),
        random_instance(Scale::Trivial { dim: 2 }, 1, 0, 1.0, 1.0, 2.0, 504),
        random_instance(
            sobolev(1, SobolevSmoothing::BracketSharp),
            2,
            1,
            1.75,
            1.0,
            2.0,
            505,
        ),
    ];
    for (idx, f) in instances.iter().enumerate() {
        let n = f.dim();
        let table = IndexTable::get(n, f.params().k + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(600 + idx as u64);
        let mut sampled = 0usize;
        while sampled < 500 {
            let y_idx = rng.random_range(0..f.set().len());
            let y = f.set().point(y_idx).to_vec();
            let radius = 10f64.powf(rng.random_range(-3.0..0.0)) * 0.49;
            let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0f64..1.0)).collect();
            let len = dir.iter().map(|c| c * c).sum::<f64>().sqrt().max(1e-9);
            let x: Vec<f64> = y
                .iter()
                .zip(&dir)
                .map(|(a, u)| a + u / len * radius)
                .collect();
            let d = dist_to_set(&x, f.set());
            if d <= lipscale::whitney::MIN_DIST || d >= 0.5 {
                continue;
            }
            let j = table.index(rng.random_range(0..table.len())).clone();
            sampled += 1;
            let check = proof_identity_check(f, &x, y_idx, &j).unwrap();
            worst = worst.max(check.max);
            if f.set().len() >= 2 && multi_index::total(&j) <= f.params().k {
                let z_idx = (y_idx + 1) % f.set().len();
                let far: Vec<f64> = x.iter().map(|&c| c + rng.random_range(-2.0..2.0)).collect();
                worst_taylor = worst_taylor
                    .max(taylor_difference_residual(f, &j, &far, y_idx, z_idx).unwrap());
            }
        }
    }
    let ok = worst <= 1e-9 && worst_taylor <= 1e-10;
    verdict(
        "5 (proof identities)",
        ok,
        &format!("decomposition residual {worst:.2e} (tol 1e-9), two-center residual {worst_taylor:.2e} (tol 1e-10), 500 samples x 5 instances"),
    );
}

#[test]
fn criterion_06_derivative_consistency() {
    let mode = ExecMode::default();
    let mut worst_all = 0.0f64;
    for k in 0..=2usize {
        let f = random_instance(
            sobolev(1, SobolevSmoothing::BracketSharp),
            1,
            k,
            k as f64 + 0.75,
            1.0,
            2.5,
            900 + k as u64,
        );
        let mut rng = ChaCha8Rng::seed_from_u64(910 + k as u64);
        let mut xs = Vec::new();
        while xs.len() < 1000 {
            let x = vec![rng.random_range(-7.0f64..7.0)];
            if f.set().position(&x).is_some() || dist_to_set(&x, f.set()) < 1e-9 {
                continue;
            }
            xs.push(x);
        }
        let worsts =
            lipscale::exec::map_collect(mode, &xs, |x| derivative_consistency(&f, x).unwrap());
        worst_all = worst_all.max(worsts.into_iter().fold(0.0, f64::max));
    }
    verdict(
        "6 (derivative consistency)",
        worst_all <= 1e-9,
        &format!("worst relative residual {worst_all:.2e} over 1000 points for k in 0..=2"),
    );
}

#[test]
fn criterion_07_remainder_ratio_budget() {
    let mode = ExecMode::default();
    let mut ok = true;
    let mut lines = String::new();
    for n in 1..=2usize {
        for k in 0..=2usize {
            for (tag, scale) in [
                ("sobolev", sobolev(1, SobolevSmoothing::BracketSharp)),
                ("trivial", Scale::Trivial { dim: 2 }),
            ] {
                let f = random_instance(
                    scale,
                    n,
                    k,
                    k as f64 + 0.75,
                    1.0,
                    2.5,
                    2000 + (10 * n + k) as u64,
                );
                let m = lip_norm_finite(&f).unwrap().norm;
                assert!(m > 0.0);
                // K0 = K = 1 for both scales in the suite
                let bound = 100.0;
                let lo = vec![-8.0; n];
                let hi = vec![8.5; n];
                let budget = SampleBudget {
                    grid_per_axis: if n == 1 { 60 } else { 120 },
                    random_pairs: 300,
                    seed: 42,
                };
                let base =
                    lipscale::lipnorm::lip_norm_sampled(&f, &lo, &hi, &budget, mode).unwrap();
                let doubled = SampleBudget {
                    grid_per_axis: budget.grid_per_axis * 2,
                    random_pairs: budget.random_pairs * 2,
                    seed: 42,
                };
                let refined =
                    lipscale::lipnorm::lip_norm_sampled(&f, &lo, &hi, &doubled, mode).unwrap();
                let ratio = refined.remainder_part / m;
                let stability = (refined.remainder_part / base.remainder_part.max(1e-300))
                    .max(base.remainder_part / refined.remainder_part.max(1e-300));
                let pass = ratio <= bound && stability < 2.0;
                ok &= pass;
                lines.push_str(&format!(
                    "\n  n={n} k={k} {tag}: ratio {ratio:.3e} (bound 1e2), stability {stability:.2} -> {}",
                    if pass { "ok" } else { "EXCEEDED" }
                ));
            }
        }
    }
    verdict("7 (remainder ratio budget)", ok, &lines);
}

#[test]
fn criterion_08_blow_up_bound() {
    let mut worst = 1.0f64;
    for k in 0..=2usize {
        for scale in [
            sobolev(1, SobolevSmoothing::BracketSharp),
            Scale::Trivial { dim: 2 },
        ] {
            let f = random_instance(scale, 1, k, k as f64 + 0.75, 1.0, 2.5, 3000 + k as u64);
            let stability = blow_up_stability(&f, 42).unwrap();
            worst = worst.max(stability);
        }
    }
    verdict(
        "8 (top-derivative blow-up)",
        worst < 2.0,
        &format!("worst consecutive variation {worst:.3} after the third halving"),
    );
}

#[test]
fn criterion_09_gamma_covariance_and_sigma_independence() {
    let mut ok = true;
    let mut instances = 0usize;
    let gammas = [0.5, 1.0, 3.0];
    let mut rng = ChaCha8Rng::seed_from_u64(4000);
    while instances < 100 {
        let k = instances % 3;
        let gamma = gammas[instances % gammas.len()];
        let f = random_instance(
            sobolev(1, SobolevSmoothing::BracketSharp),
            1,
            k,
            k as f64 + 0.75,
            gamma,
            2.5,
            5000 + instances as u64,
        );
        let tilde = f.normalized().unwrap();
        let shifted = f.with_sigma(3.0).unwrap();
        let table = IndexTable::get(1, k + 1);
        for _ in 0..3 {
            let x = vec![rng.random_range(-4.0f64..4.0)];
            if f.set().position(&x).is_some() {
                continue;
            }
            let xq = vec![x[0] / gamma];
            for j in table.indices() {
                let direct = extend_eval(&f, &x, j).unwrap();
                let via = extend_eval(&tilde, &xq, j)
                    .unwrap()
                    .scale(gamma.powi(-(multi_index::total(j) as i32)));
                ok &= direct == via;
                ok &= direct == extend_eval(&shifted, &x, j).unwrap();
            }
        }
        instances += 1;
    }
    verdict(
        "9 (gamma covariance, sigma independence)",
        ok,
        "bit-identical on 100 instances, gamma in {0.5, 1, 3}, two sigma choices",
    );
}

#[test]
fn criterion_10_lp_impossibility() {
    let start = Instant::now();
    let mode = ExecMode::default();

    // exhaustive orthogonality sweep
    let mut sweep_ok = true;
    for n in 1..=12usize {
        for k in 1..=n {
            for m in 1..=n {
                let expect = if k == m { 1i64 << n } else { 0 };
                sweep_ok &= sign_correlation_sum(n, k, m, mode).unwrap() == expect;
            }
        }
    }

    // diagonal bound on random complex matrices with exhaustively-verified
    // hypotheses: the bound is the worst row-image norm over all sign
    // vectors, and the diagonal norm must stay below it
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut diag_ok = true;
    for _ in 0..100 {
        let n = rng.random_range(1..=10usize);
        let q = *[1.0, 1.5, 2.0, f64::INFINITY]
            .get(rng.random_range(0..4))
            .unwrap();
        let mut m = CMatrix::zero(n).unwrap();
        for r in 0..n {
            for c in 0..n {
                m.set(
                    r,
                    c,
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                );
            }
        }
        let probe = diagonal_lower_bound_check(&m, q, f64::INFINITY, mode).unwrap();
        let check = diagonal_lower_bound_check(&m, q, probe.worst_row_norm, mode).unwrap();
        diag_ok &= check.hypothesis_holds && check.bound_holds;
    }

    // truncation residual witness: || e_k - S_theta e_k || = 1 in every
    // sequence norm once k exceeds theta
    let lp = Scale::Lp;
    let mut witness_ok = true;
    for (theta, k) in [(2.0, 3i64), (16.0, 17), (16.0, 40)] {
        let u = Element::unit(vec![k], Complex64::new(1.0, 0.0));
        let residual = u.sub(&lp.smooth(theta, &u).unwrap());
        for a in [0.0, 0.5, 1.0] {
            witness_ok &= lp.norm(a, &residual).unwrap() == 1.0;
        }
    }

    // ratio growth proportional to N^(b-a) within 1%
    let n_list: Vec<usize> = (4..=12).map(|e| 1usize << e).collect();
    let rows = no_smoothing_growth_report(
        0.0,
        1.0,
        SmoothingFamily::HalfDiagonal { a_const: 1.0 },
        &n_list,
        2.0,
    )
    .unwrap();
    let mut growth_ok = true;
    for w in rows.windows(2) {
        let measured =
            (w[1].ratio / w[0].ratio).log2() / ((w[1].n as f64) / (w[0].n as f64)).log2();
        growth_ok &= (measured - 1.0).abs() <= 0.01;
    }

    let elapsed = start.elapsed().as_secs_f64();
    let ok = sweep_ok && diag_ok && witness_ok && growth_ok && elapsed < 30.0;
    verdict(
        "10 (sequence-scale impossibility)",
        ok,
        &format!(
            "sweep {sweep_ok}, diagonal {diag_ok}, witness {witness_ok}, growth {growth_ok}, {elapsed:.1} s"
        ),
    );
}

#[test]
fn criterion_11_counterexample_quotient() {
    let q = lipscale_cli::demos::sup_quotient(1e-4);
    let ok = (q - 100.0).abs() <= 1e-9;
    verdict(
        "11 (composition counterexample)",
        ok,
        &format!("quotient at 1e-4 = {q} (expected 100 within 1e-9)"),
    );
}
