//! End-to-end acceptance of the library's headline claims. Each test covers
//! one criterion, prints a single summary line on success, and pins its
//! tolerance in code. Random data is generated from fixed seeds, so all
//! measurements are reproducible.

use std::time::Instant;

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

use repmetric::algebra::{element_norm, AlgebraElement, FdAlgebra, GeneratingSet};
use repmetric::duality::{
    biconjugate, delta_curve, function_modulus, lip_regularize, reconstruct_modulus,
    sandwich_check, sandwich_family, GridFn, RealFunctionOnSpace,
};
use repmetric::gallery::{a0_discrete, compacts_scatter, orbit_dispersion};
use repmetric::linalg::{haar_unitary, op_norm, ComplexMatrix};
use repmetric::modulus::{chain_inequality_check, modulus_calculus_report, ConcaveFn};
use repmetric::reps::{
    enumerate_irreps, eval_rep, pullback, pushforward_set, rep_distance, sample_rep_pairs,
    Homomorphism, Representation,
};
use repmetric::transport::{
    kantorovich, kantorovich_primal_oracle, lipschitz_generators, point_rep, FiniteMetricSpace,
    Measure,
};

fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn random_space(g: &mut ChaCha12Rng, n: usize) -> FiniteMetricSpace {
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|_| (4.0 * g.random::<f64>(), 4.0 * g.random::<f64>()))
        .collect();
    let rows: Vec<Vec<f64>> = coords
        .iter()
        .map(|&(x1, y1)| {
            coords
                .iter()
                .map(|&(x2, y2)| ((x1 - x2).powi(2) + (y1 - y2).powi(2)).sqrt())
                .collect()
        })
        .collect();
    let points = (0..n).map(|i| format!("p{i}")).collect();
    FiniteMetricSpace::new(points, &rows).unwrap()
}

fn random_matrix(g: &mut ChaCha12Rng, dim: usize) -> ComplexMatrix {
    let entries = (0..dim * dim)
        .map(|_| Complex64::new(g.random::<f64>() - 0.5, g.random::<f64>() - 0.5))
        .collect();
    ComplexMatrix::new(dim, entries).unwrap()
}

fn random_element(algebra: &FdAlgebra, g: &mut ChaCha12Rng) -> AlgebraElement {
    let blocks = algebra.block_dims().iter().map(|&d| random_matrix(g, d)).collect();
    AlgebraElement::new(algebra.clone(), blocks).unwrap()
}

fn random_measure(g: &mut ChaCha12Rng, space: &FiniteMetricSpace) -> Measure {
    let n = space.len();
    loop {
        let mut w: Vec<f64> = (0..n)
            .map(|_| if g.random::<f64>() < 0.3 { 0.0 } else { g.random::<f64>() })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 1e-6 {
            for x in &mut w {
                *x /= total;
            }
            return Measure::new(space, w).unwrap();
        }
    }
}

#[test]
fn criterion_01_block_doubling_pairs_stay_two_apart() {
    let tolerance = 1e-9;
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 2..=4 {
        let r = a0_discrete(n).unwrap();
        assert!(r.verdict, "exponent {n}: measured {} vs claimed 2", r.measured);
        worst = worst.max((r.measured - 2.0).abs());
    }
    let elapsed = start.elapsed();
    assert!(worst <= tolerance);
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "criterion 01 block-doubling distances: worst |measured - 2| = {worst:.3e} \
         (tol {tolerance:.0e}, {elapsed:.2?}) .. pass"
    );
}

#[test]
fn criterion_02_compact_projection_orbit_scatters() {
    let tolerance = 1e-9;
    let start = Instant::now();
    let indices: Vec<usize> = (2..=7).collect();
    let r = compacts_scatter(8, &indices).unwrap();
    let elapsed = start.elapsed();
    assert!(r.verdict, "min pairwise {} fell below 1", r.measured);
    assert!(r.measured >= 1.0 - tolerance);
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "criterion 02 compact scattering: min pairwise = {:.12} (>= 1 - {tolerance:.0e}, \
         {elapsed:.2?}) .. pass",
        r.measured
    );
}

#[test]
fn criterion_03_orbit_dispersion_matches_the_construction() {
    let tolerance = 1e-9;
    let start = Instant::now();
    let mut g = rng(303);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let dim = 3 + (trial * 7) % 14;
        let t = random_matrix(&mut g, dim);
        let r = orbit_dispersion(&t).unwrap();
        assert!(r.claimed > 1e-3, "random matrix should be far from scalar");
        assert!(
            (r.measured - r.claimed).abs() <= tolerance,
            "dim {dim}: measured {} vs claimed {}",
            r.measured,
            r.claimed
        );
        worst = worst.max((r.measured - r.claimed).abs());
    }
    for dim in [3, 9] {
        let t = ComplexMatrix::identity(dim).scale(Complex64::new(-1.5, 0.7));
        let r = orbit_dispersion(&t).unwrap();
        assert_eq!(r.claimed, 0.0);
        assert_eq!(r.measured, 0.0);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "criterion 03 orbit dispersion: worst |measured - sqrt(2) b| = {worst:.3e} \
         over 20 matrices, scalars exactly 0 (tol {tolerance:.0e}, {elapsed:.2?}) .. pass"
    );
}

#[test]
fn criterion_04_point_representations_embed_isometrically() {
    let tolerance = 1e-10;
    let mut g = rng(404);
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let n = 2 + (trial * 3) % 11;
        let space = random_space(&mut g, n);
        let k = lipschitz_generators(&space).unwrap();
        let reps: Vec<_> = (0..n)
            .map(|i| point_rep(&space, space.label(i), 1).unwrap())
            .collect();
        for i in 0..n {
            for j in 0..n {
                let measured = rep_distance(&reps[i], &reps[j], &k).unwrap();
                let gap = (measured - space.dist(i, j)).abs();
                assert!(gap <= tolerance, "pair ({i},{j}) of trial {trial}: gap {gap}");
                worst = worst.max(gap);
            }
        }
    }
    println!(
        "criterion 04 commutative isometry: worst |d_K - dist| = {worst:.3e} over 10 \
         spaces (tol {tolerance:.0e}) .. pass"
    );
}

#[test]
fn criterion_05_kantorovich_dual_agrees_with_the_primal_oracle() {
    let gap_tolerance = 1e-9;
    let dirac_tolerance = 1e-10;
    let mut g = rng(505);
    let mut worst_gap = 0.0f64;
    for trial in 0..50 {
        let n = 2 + (trial * 5) % 7;
        let space = random_space(&mut g, n);
        let mu = random_measure(&mut g, &space);
        let nu = random_measure(&mut g, &space);
        let dual = kantorovich(&mu, &nu).unwrap();
        let primal = kantorovich_primal_oracle(&mu, &nu).unwrap();
        let gap = (dual.value - primal).abs();
        assert!(gap <= gap_tolerance, "trial {trial}: duality gap {gap}");
        worst_gap = worst_gap.max(gap);
    }
    let mut worst_dirac = 0.0f64;
    let space = random_space(&mut g, 6);
    for i in 0..space.len() {
        for j in 0..space.len() {
            let di = Measure::dirac(&space, space.label(i)).unwrap();
            let dj = Measure::dirac(&space, space.label(j)).unwrap();
            let moved = kantorovich(&di, &dj).unwrap().value;
            let gap = (moved - space.dist(i, j)).abs();
            assert!(gap <= dirac_tolerance, "dirac pair ({i},{j}): gap {gap}");
            worst_dirac = worst_dirac.max(gap);
        }
    }
    println!(
        "criterion 05 Kantorovich duality: worst dual-primal gap = {worst_gap:.3e} over 50 \
         instances (tol {gap_tolerance:.0e}), worst dirac gap = {worst_dirac:.3e} \
         (tol {dirac_tolerance:.0e}) .. pass"
    );
}

#[test]
fn criterion_06_modulus_calculus_residuals_stay_small() {
    let equality_tolerance = 1e-10;
    let inequality_tolerance = 1e-9;
    let start = Instant::now();
    let mut g = rng(606);

    let algebra = FdAlgebra::new(vec![3, 4]).unwrap();
    let pairs = sample_rep_pairs(&algebra, &[1, 1], 200, 6001, 0.3).unwrap();
    let mut k = GeneratingSet::new(
        algebra.clone(),
        vec![random_element(&algebra, &mut g), random_element(&algebra, &mut g)],
    )
    .unwrap();
    let (generates, _) = k.verify(6);
    assert!(generates, "random pair should generate the algebra");

    let a = random_element(&algebra, &mut g);
    let b = random_element(&algebra, &mut g);
    let report =
        modulus_calculus_report(&pairs, &k, &a, &b, Complex64::new(0.7, -0.4)).unwrap();
    assert!(
        report.max_equality_residual() <= equality_tolerance,
        "equality residual {}",
        report.max_equality_residual()
    );
    assert!(
        report.max_inequality_residual() <= inequality_tolerance,
        "inequality residual {}",
        report.max_inequality_residual()
    );
    assert_eq!(report.sample_count, 200);

    let k_prime = GeneratingSet::new(
        algebra.clone(),
        vec![random_element(&algebra, &mut g), random_element(&algebra, &mut g)],
    )
    .unwrap();
    let chain = chain_inequality_check(&pairs, &k, &k_prime, &a).unwrap();
    assert!(chain <= inequality_tolerance, "chain residual {chain}");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "criterion 06 modulus calculus: equalities {:.3e} (tol {equality_tolerance:.0e}), \
         inequalities {:.3e}, chain {chain:.3e} (tol {inequality_tolerance:.0e}) on 200 \
         shared pairs ({elapsed:.2?}) .. pass",
        report.max_equality_residual(),
        report.max_inequality_residual()
    );
}

fn random_concave(g: &mut ChaCha12Rng) -> ConcaveFn {
    let kinks = g.random_range(2..=9usize);
    let mut slopes: Vec<f64> = (0..kinks).map(|_| 0.05 + g.random::<f64>()).collect();
    slopes.sort_by(|x, y| y.partial_cmp(x).unwrap());
    if g.random::<f64>() < 0.3 {
        *slopes.last_mut().unwrap() = 0.0;
    }
    let mut points = vec![(0.0, 0.0)];
    let (mut t, mut v) = (0.0, 0.0);
    for s in slopes {
        let gap = 0.1 + g.random::<f64>();
        t += gap;
        v += s * gap;
        points.push((t, v));
    }
    ConcaveFn::new(points).unwrap()
}

fn random_grid_fn(g: &mut ChaCha12Rng) -> GridFn {
    let n = g.random_range(2..=12usize);
    let mut t = 0.0;
    let grid = (0..n)
        .map(|_| {
            t += 0.05 + g.random::<f64>();
            t
        })
        .collect();
    let values = (0..n).map(|_| 2.0 * g.random::<f64>() - 1.0).collect();
    GridFn::new(grid, values).unwrap()
}

#[test]
fn criterion_07_fenchel_round_trip_and_exact_idempotence() {
    let tolerance = 1e-9;
    let mut g = rng(707);
    let mut worst = 0.0f64;
    for trial in 0..25 {
        let omega = random_concave(&mut g);
        let delta = delta_curve(&omega);
        let t_grid: Vec<f64> = omega.breakpoints().iter().map(|&(t, _)| t).collect();
        let back = reconstruct_modulus(&delta, &t_grid).unwrap();
        for (&(t, v), &r) in omega.breakpoints().iter().zip(back.values()) {
            let gap = (r - v).abs();
            assert!(gap <= tolerance, "trial {trial}, t = {t}: gap {gap}");
            worst = worst.max(gap);
        }
    }
    for trial in 0..25 {
        let h = random_grid_fn(&mut g);
        let once = biconjugate(&h).unwrap();
        let twice = biconjugate(&once).unwrap();
        assert_eq!(once.grid(), twice.grid(), "trial {trial}: grids diverged");
        let bits = |f: &GridFn| f.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&once), bits(&twice), "trial {trial}: idempotence broke");
    }
    println!(
        "criterion 07 Fenchel round-trip: worst breakpoint gap = {worst:.3e} over 25 moduli \
         (tol {tolerance:.0e}); biconjugation bitwise idempotent on 25 grids .. pass"
    );
}

#[test]
fn criterion_08_lipschitz_regularization_bounds() {
    let lip_tolerance = 1e-10;
    let sup_tolerance = 1e-9;
    let mut g = rng(808);
    let mut worst_lip = 0.0f64;
    let mut worst_sup = 0.0f64;
    for trial in 0..20 {
        let n = 3 + trial % 8;
        let space = random_space(&mut g, n);
        let values: Vec<f64> = (0..n).map(|_| 3.0 * g.random::<f64>() - 1.5).collect();
        let f = RealFunctionOnSpace::new(&space, values).unwrap();
        let omega = function_modulus(&f).unwrap();
        let s = if trial % 2 == 0 {
            0.1 + 4.9 * g.random::<f64>()
        } else {
            // A slope of the modulus itself, where the bound is tightest.
            let slopes = omega.slopes();
            let positive: Vec<f64> = slopes.into_iter().filter(|&x| x > 0.0).collect();
            positive[g.random_range(0..positive.len())]
        };
        let reg = lip_regularize(&f, s, &omega).unwrap();
        let fs = reg.regularized.values();
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let excess = (fs[x] - fs[y]).abs() - (s + lip_tolerance) * space.dist(x, y);
                assert!(excess <= 0.0, "trial {trial}: Lipschitz excess {excess}");
                worst_lip = worst_lip.max((fs[x] - fs[y]).abs() / space.dist(x, y) - s);
            }
        }
        let sup_gap = reg.sup_deviation - reg.delta;
        assert!(sup_gap <= sup_tolerance, "trial {trial}: sup deviation gap {sup_gap}");
        worst_sup = worst_sup.max(sup_gap);
    }
    println!(
        "criterion 08 Lipschitz regularization: worst Lip excess = {worst_lip:.3e} \
         (tol {lip_tolerance:.0e}), worst sup gap over delta = {worst_sup:.3e} \
         (tol {sup_tolerance:.0e}) over 20 instances .. pass"
    );
}

#[test]
fn criterion_09_sandwich_bounds_hold_per_sample() {
    let tolerance = 1e-9;
    let mut g = rng(909);
    let mut worst = f64::NEG_INFINITY;
    let cases: [(usize, &[usize]); 3] =
        [(3, &[1, 1, 2]), (4, &[1, 2, 1, 1]), (5, &[2, 1, 1, 1, 1])];
    for (trial, &(n, mults)) in cases.iter().enumerate() {
        let space = random_space(&mut g, n);
        let re_values: Vec<f64> = (0..n).map(|_| 2.0 * g.random::<f64>() - 1.0).collect();
        let im_values: Vec<f64> = (0..n).map(|_| 2.0 * g.random::<f64>() - 1.0).collect();
        let re = RealFunctionOnSpace::new(&space, re_values).unwrap();
        let im = RealFunctionOnSpace::new(&space, im_values).unwrap();
        let k = sandwich_family(&re, &im).unwrap();
        let pairs =
            sample_rep_pairs(&space.algebra(), mults, 40, 9000 + trial as u64, 0.4).unwrap();
        let report = sandwich_check(&re, &im, &pairs, &k).unwrap();
        assert!(report.re_residual <= tolerance, "re residual {}", report.re_residual);
        assert!(report.im_residual <= tolerance, "im residual {}", report.im_residual);
        assert!(
            report.complex_residual <= tolerance,
            "complex residual {}",
            report.complex_residual
        );
        worst = worst
            .max(report.re_residual)
            .max(report.im_residual)
            .max(report.complex_residual);
    }
    println!(
        "criterion 09 sandwich estimate: worst residual = {worst:.3e} over 120 sampled \
         pairs, real vs omega and complex vs 2*omega (tol {tolerance:.0e}) .. pass"
    );
}

#[test]
fn criterion_10_pullback_is_isometric_onto_the_image_set() {
    let tolerance = 1e-10;
    let mut g = rng(1010);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let source_dims: Vec<usize> =
            (0..g.random_range(1..=2usize)).map(|_| g.random_range(1..=2usize)).collect();
        let source = FdAlgebra::new(source_dims.clone()).unwrap();
        let target_blocks = g.random_range(1..=2usize);
        let mut rows = Vec::with_capacity(target_blocks);
        for _ in 0..target_blocks {
            let mut row: Vec<usize> =
                source_dims.iter().map(|_| g.random_range(0..=2usize)).collect();
            if row.iter().all(|&c| c == 0) {
                row[0] = 1;
            }
            rows.push(row);
        }
        let target_dims: Vec<usize> = rows
            .iter()
            .map(|row| row.iter().zip(&source_dims).map(|(&c, &n)| c * n).sum())
            .collect();
        let target = FdAlgebra::new(target_dims.clone()).unwrap();
        let conjugators = target_dims
            .iter()
            .map(|&p| haar_unitary(p, g.random::<u64>()))
            .collect::<Result<Vec<_>, _>>()
            .unwrap();
        let alpha = Homomorphism::new(source.clone(), target.clone(), rows, conjugators).unwrap();

        let mult: Vec<usize> = target_dims.iter().map(|_| g.random_range(1..=2usize)).collect();
        let ambient: usize = mult.iter().zip(&target_dims).map(|(&r, &p)| r * p).sum();
        let rho1 = Representation::new(
            target.clone(),
            mult.clone(),
            haar_unitary(ambient, g.random::<u64>()).unwrap(),
        )
        .unwrap();
        let rho2 = Representation::new(
            target.clone(),
            mult,
            haar_unitary(ambient, g.random::<u64>()).unwrap(),
        )
        .unwrap();

        let k = GeneratingSet::new(
            source.clone(),
            vec![random_element(&source, &mut g), random_element(&source, &mut g)],
        )
        .unwrap();
        let alpha_k = pushforward_set(&alpha, &k).unwrap();
        let lhs = rep_distance(
            &pullback(&alpha, &rho1).unwrap(),
            &pullback(&alpha, &rho2).unwrap(),
            &k,
        )
        .unwrap();
        let rhs = rep_distance(&rho1, &rho2, &alpha_k).unwrap();
        let gap = (lhs - rhs).abs();
        assert!(gap <= tolerance, "trial {trial}: gap {gap}");
        worst = worst.max(gap);

        // Enlarging the target set can only increase the distance.
        let mut enlarged = alpha_k.elements().to_vec();
        enlarged.push(random_element(&target, &mut g));
        let l = GeneratingSet::new(target.clone(), enlarged).unwrap();
        let d_l = rep_distance(&rho1, &rho2, &l).unwrap();
        assert!(lhs <= d_l + tolerance, "trial {trial}: {lhs} > {d_l}");
    }
    println!(
        "criterion 10 pullback laws: worst |d_K(pullbacks) - d_K'(originals)| = {worst:.3e} \
         over 100 triples (tol {tolerance:.0e}), nonexpansive under enlargement .. pass"
    );
}

#[test]
fn criterion_11_norm_equals_max_over_irreducibles() {
    let relative_tolerance = 1e-9;
    let mut g = rng(1111);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let blocks = g.random_range(1..=3usize);
        let dims: Vec<usize> = (0..blocks).map(|_| g.random_range(1..=4usize)).collect();
        let algebra = FdAlgebra::new(dims).unwrap();
        let x = random_element(&algebra, &mut g);

        let direct = element_norm(&x).unwrap();
        let via_irreps = enumerate_irreps(&algebra)
            .iter()
            .map(|pi| op_norm(&eval_rep(pi, &x).unwrap()).unwrap())
            .fold(0.0, f64::max);
        assert_eq!(direct, via_irreps, "trial {trial}: the two routes disagree");

        let star_x = x.adjoint().mul(&x);
        let lhs = element_norm(&star_x).unwrap();
        let scale = (direct * direct).max(1.0);
        let gap = (lhs - direct * direct).abs() / scale;
        assert!(gap <= relative_tolerance, "trial {trial}: C*-identity gap {gap}");
        worst = worst.max(gap);
    }
    println!(
        "criterion 11 norm via irreducibles: exact agreement on 100 elements, worst \
         relative C*-identity gap = {worst:.3e} (tol {relative_tolerance:.0e}) .. pass"
    );
}
