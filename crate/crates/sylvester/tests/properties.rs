//! Randomized and structural property checks for the solver stack.

mod common;

use common::*;
use rand::prelude::*;
use sylvester::generator::{generate_boxes, BoxConfig, SeedConvention};
use sylvester::geometry::{ConvexSet, Dynamic};
use sylvester::report::StepSchedule;
use sylvester::smoothing::{
    nesterov_minimize, smooth_value_gradient, smooth_value_gradient_seq, MajorizationAnchor,
};
use sylvester::subgrad::{solve_subgradient_observed, SubgradOptions};

#[test]
fn smoothing_sandwich_and_monotonicity() {
    check_smoothing_sandwich(1000).unwrap();
}

#[test]
fn gradients_match_finite_differences() {
    check_gradient_fd(100).unwrap();
}

#[test]
fn fixed_p_majorization_descends() {
    check_mm_descent().unwrap();
}

#[test]
fn subgradient_inequalities_hold() {
    check_subgradient_inequalities(1000).unwrap();
}

#[test]
fn power_mean_ordering_holds() {
    check_power_mean_inequalities().unwrap();
}

#[test]
fn ball_entry_times_match_closed_form_on_grid() {
    check_ball_entry_grid().unwrap();
}

#[test]
fn cone_branch_selections_match() {
    check_cone_branches().unwrap();
}

#[test]
fn traces_are_monotone_and_feasible() {
    check_trace_monotone_feasible().unwrap();
}

#[test]
fn projections_and_farthest_points_are_optimal() {
    check_projection_farthest_optimality(1000).unwrap();
}

#[test]
fn gauge_axioms_hold_per_dynamic() {
    let mut rng = rng(71);
    let dynamics = [
        Dynamic::EuclideanBall,
        Dynamic::ScaledEuclideanBall { radius: 3.0 },
        Dynamic::LInfBall,
        Dynamic::L1Ball,
    ];
    for dynamic in dynamics {
        for _ in 0..200 {
            let u = random_point(&mut rng, 4, 10.0);
            let v = random_point(&mut rng, 4, 10.0);
            let t = rng.gen_range(0.0..5.0);

            // Positive homogeneity and subadditivity.
            let scaled: Vec<f64> = u.iter().map(|x| t * x).collect();
            assert!(
                (dynamic.gauge(&scaled) - t * dynamic.gauge(&u)).abs() < 1e-9,
                "homogeneity fails for {dynamic:?}"
            );
            let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
            assert!(
                dynamic.gauge(&sum) <= dynamic.gauge(&u) + dynamic.gauge(&v) + 1e-9,
                "subadditivity fails for {dynamic:?}"
            );

            // The advertised Lipschitz constant bounds gauge differences.
            let lip = dynamic.lipschitz(4);
            assert!(
                (dynamic.gauge(&u) - dynamic.gauge(&v)).abs() <= lip * dist(&u, &v) + 1e-9,
                "Lipschitz bound fails for {dynamic:?}"
            );

            // A gauge subgradient supports the gauge from below.
            if dynamic.gauge(&u) > 1e-9 {
                let g = dynamic.gauge_subgradient(&u).unwrap();
                assert!(
                    dynamic.gauge(&v) >= dynamic.gauge(&u) + dot(&g, &sub(&v, &u)) - 1e-9,
                    "gauge subgradient inequality fails for {dynamic:?}"
                );
            }
        }
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[test]
fn smoothed_gradient_is_two_over_p_lipschitz() {
    let mut rng = rng(79);
    let inst = mixed_intersect_instance(&mut rng, 3, 12);
    for p in [0.5, 0.05] {
        for _ in 0..200 {
            let x = random_point(&mut rng, 3, 40.0);
            let y = random_point(&mut rng, 3, 40.0);
            let gx = smooth_value_gradient(&inst, &x, p).unwrap().1;
            let gy = smooth_value_gradient(&inst, &y, p).unwrap().1;
            assert!(
                dist(&gx, &gy) <= (2.0 / p) * dist(&x, &y) + 1e-8,
                "gradient Lipschitz bound fails at p={p}"
            );
        }
    }
}

#[test]
fn nesterov_constrained_solution_satisfies_stationarity() {
    // At the constrained minimizer, the gradient makes nonnegative inner
    // product with every feasible direction.
    let mut rng = rng(83);
    let inst = mixed_intersect_instance(&mut rng, 3, 10);
    let constraint = ConvexSet::cube(vec![0.0, 0.0, 0.0], 2.0).unwrap();
    let base = random_point(&mut rng, 3, 5.0);
    let anchor = MajorizationAnchor::freeze(&inst, &base).unwrap();
    let p = 0.2;
    let out = nesterov_minimize(&anchor, &constraint, &base, p, 1e-9, 200_000);
    let g = anchor.gradient(&out.point, p);
    for _ in 0..500 {
        let z = constraint.project(&random_point(&mut rng, 3, 4.0));
        assert!(
            dot(&g, &sub(&z, &out.point)) >= -1e-6,
            "feasible direction with negative inner product found"
        );
    }
}

#[test]
fn subgradient_selections_validated_along_a_run() {
    // Spot-check the chosen direction every hundred iterations against
    // the subgradient inequality at ten random probes.
    let inst = seven_disks();
    let mut rng = rng(89);
    let mut checked = 0usize;
    let opts = SubgradOptions { max_iters: 3000, ..Default::default() };
    solve_subgradient_observed(&inst, &[30.0, 25.0], &opts, |ev| {
        if ev.k % 100 != 0 {
            return;
        }
        checked += 1;
        let sx = ev.value;
        for _ in 0..10 {
            let y = random_point(&mut rng, 2, 40.0);
            let sy = inst.objective_s(&y);
            assert!(
                sy >= sx + dot(ev.direction, &sub(&y, ev.x)) - 1e-8,
                "iteration {} direction fails the subgradient inequality",
                ev.k
            );
        }
    });
    assert!(checked >= 30, "observer saw only {checked} checkpoints");
}

#[test]
fn parallel_and_sequential_smoothing_agree_at_scale() {
    let inst = generate_boxes(&BoxConfig {
        dim: 3,
        count: 1000,
        seed: 7,
        convention: SeedConvention::SkipSeed,
    })
    .unwrap();
    let mut rng = rng(97);
    for _ in 0..20 {
        let x = random_point(&mut rng, 3, 100.0);
        let p = 10f64.powf(rng.gen_range(-6.0..0.0));
        let (va, ga) = smooth_value_gradient(&inst, &x, p).unwrap();
        let (vb, gb) = smooth_value_gradient_seq(&inst, &x, p).unwrap();
        assert_eq!(va, vb, "values differ at p={p}");
        assert_eq!(ga, gb, "gradients differ at p={p}");
    }
}

#[test]
fn generated_instances_solve_identically_across_paths() {
    // The full smoothed solve is deterministic: repeated runs produce the
    // same report.
    let inst = generate_boxes(&BoxConfig {
        dim: 2,
        count: 50,
        seed: 7,
        convention: SeedConvention::SkipSeed,
    })
    .unwrap();
    let x0 = inst.default_start();
    let a = sylvester::smoothing::solve_mm(&inst, &x0, &Default::default()).unwrap();
    let b = sylvester::smoothing::solve_mm(&inst, &x0, &Default::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn directional_reach_translation_along_direction() {
    // Moving the start along the ray shifts the reach time linearly
    // while the entry point stays fixed.
    let target =
        DirectionalTargetFixture::new(ConvexSet::ball(vec![4.0, 0.0], 2.0).unwrap(), vec![1.0, 0.0]);
    let mut rng = rng(101);
    for _ in 0..100 {
        let x2 = rng.gen_range(-1.9..1.9);
        let x1 = rng.gen_range(-6.0..0.0);
        let shift = rng.gen_range(0.1..1.0);
        let t0 = target.time(&[x1, x2]);
        let t1 = target.time(&[x1 + shift, x2]);
        assert!((t0 - t1 - shift).abs() < 1e-9, "reach time not linear along the ray");
        let p0 = target.projection(&[x1, x2]);
        let p1 = target.projection(&[x1 + shift, x2]);
        assert!(dist(&p0, &p1) < 1e-9, "entry point moved with the start");
    }
}

/// Small adapter so the test reads naturally with finite times.
struct DirectionalTargetFixture(sylvester::directional::DirectionalTarget);

impl DirectionalTargetFixture {
    fn new(set: ConvexSet, dir: Vec<f64>) -> Self {
        Self(sylvester::directional::DirectionalTarget::new(set, dir).unwrap())
    }
    fn time(&self, x: &[f64]) -> f64 {
        match self.0.time(x) {
            sylvester::directional::DirectionalValue::Finite(t) => t,
            other => panic!("expected finite reach time, got {other:?}"),
        }
    }
    fn projection(&self, x: &[f64]) -> Vec<f64> {
        self.0.projection(x).unwrap()
    }
}

#[test]
fn subgradient_error_bound_certifies_two_singletons() {
    // For targets {-e1} and {e1} the optimum is 1 at the origin; the
    // divergent-series bound must dominate the observed gap.
    let inst = sylvester::timefns::SylvesterInstance::new(
        Dynamic::EuclideanBall,
        ConvexSet::whole_space(2).unwrap(),
        vec![
            ConvexSet::singleton(vec![-1.0, 0.0]).unwrap(),
            ConvexSet::singleton(vec![1.0, 0.0]).unwrap(),
        ],
        vec![],
    )
    .unwrap();
    let schedule = StepSchedule::Harmonic { c: 1.0 };
    let opts = SubgradOptions {
        schedule,
        max_iters: 10_000,
        stall_window: 10_000,
        ..Default::default()
    };
    let x0 = vec![4.0, 3.0];
    let report = sylvester::subgrad::solve_subgradient(&inst, &x0, &opts);
    let d1 = dist(&x0, &[0.0, 0.0]);
    let lip = 1.0;
    for k in [10usize, 100, 1000, 10_000] {
        let bound = sylvester::subgrad::error_bound(d1, lip, schedule, k);
        let gap = report.value_trace[k] - 1.0;
        assert!(
            gap <= bound + 1e-9,
            "V_{k} - V* = {gap} exceeds the certified bound {bound}"
        );
    }
}
