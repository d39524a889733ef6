//! Fixtures and reusable property checks shared by the integration
//! suites. Each `check_*` function returns `Err` with a description on
//! the first violated property so callers can either unwrap (unit style)
//! or collect pass/fail lines (the acceptance runner).

use rand::prelude::*;
use sylvester::directional::{DirectionalInstance, DirectionalTarget, DirectionalValue};
use sylvester::geometry::{ConvexSet, Dynamic};
use sylvester::report::StepSchedule;
use sylvester::smoothing::{self, MajorizationAnchor, SmoothingOptions};
use sylvester::subgrad::{solve_subgradient, solve_subgradient_observed, SubgradOptions};
use sylvester::timefns::{SylvesterInstance, TargetKind};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn random_point(rng: &mut StdRng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn ball(center: Vec<f64>, radius: f64) -> ConvexSet {
    ConvexSet::ball(center, radius).unwrap()
}

/// Three intersect disks and four enclose disks in the plane; optimum
/// near (0.89, 2.61) with value near 10.31.
pub fn seven_disks() -> SylvesterInstance {
    SylvesterInstance::new(
        Dynamic::EuclideanBall,
        ConvexSet::whole_space(2).unwrap(),
        vec![
            ball(vec![-6.0, 9.0], 3.0),
            ball(vec![12.0, 9.0], 2.5),
            ball(vec![-1.0, -6.0], 2.5),
        ],
        vec![
            ball(vec![-8.0, 5.0], 1.0),
            ball(vec![-7.0, 0.0], 2.0),
            ball(vec![7.0, 1.0], 4.0),
            ball(vec![2.0, 6.0], 5.0),
        ],
    )
    .unwrap()
}

/// Five unit-radius cubes in three dimensions; smallest intersecting
/// ball radius near 3.18.
pub fn five_boxes() -> SylvesterInstance {
    let centers = [
        vec![-5.0, 0.0, 0.0],
        vec![1.0, 4.0, 4.0],
        vec![0.0, 5.0, 0.0],
        vec![-4.0, -3.0, 2.0],
        vec![0.0, 0.0, 5.0],
    ];
    SylvesterInstance::new(
        Dynamic::EuclideanBall,
        ConvexSet::whole_space(3).unwrap(),
        centers.into_iter().map(|c| ConvexSet::cube(c, 1.0).unwrap()).collect(),
        vec![],
    )
    .unwrap()
}

/// Parabola epigraph reached upward, and two halfplanes reached left and
/// right; optimal value 1.875 at (0.5, 0.375).
pub fn three_region_directional() -> DirectionalInstance {
    DirectionalInstance::new(
        ConvexSet::whole_space(2).unwrap(),
        vec![
            DirectionalTarget::new(
                ConvexSet::parabola_epigraph(1.0, 2.0).unwrap(),
                vec![0.0, 1.0],
            )
            .unwrap(),
            DirectionalTarget::new(
                ConvexSet::halfspace(vec![1.0, 1.0], -1.0).unwrap(),
                vec![-1.0, 0.0],
            )
            .unwrap(),
            DirectionalTarget::new(
                ConvexSet::halfspace(vec![-1.0, 1.0], -1.0).unwrap(),
                vec![1.0, 0.0],
            )
            .unwrap(),
        ],
    )
    .unwrap()
}

/// A mixed-shape smoothable instance (Euclidean dynamic, intersect
/// targets only).
pub fn mixed_intersect_instance(rng: &mut StdRng, n: usize, m: usize) -> SylvesterInstance {
    let mut targets = Vec::with_capacity(m);
    for i in 0..m {
        let c = random_point(rng, n, 40.0);
        let set = match i % 4 {
            0 => ConvexSet::ball(c, rng.gen_range(0.5..4.0)).unwrap(),
            1 => ConvexSet::cube(c, rng.gen_range(0.5..4.0)).unwrap(),
            2 => ConvexSet::singleton(c).unwrap(),
            _ => {
                let mut a = random_point(rng, n, 1.0);
                if a.iter().all(|v| v.abs() < 1e-3) {
                    a[0] = 1.0;
                }
                ConvexSet::halfspace(a, rng.gen_range(-60.0..-20.0)).unwrap()
            }
        };
        targets.push(set);
    }
    SylvesterInstance::new(
        Dynamic::EuclideanBall,
        ConvexSet::whole_space(n).unwrap(),
        targets,
        vec![],
    )
    .unwrap()
}

fn fail(msg: String) -> Result<(), String> {
    Err(msg)
}

/// Smoothed objective stays within [D(x), D(x) + p(1+ln m)] and is
/// monotone in p.
pub fn check_smoothing_sandwich(probes: usize) -> Result<(), String> {
    let mut rng = rng(11);
    let inst = mixed_intersect_instance(&mut rng, 3, 24);
    let m = inst.intersect_targets().len() as f64;
    let ps = [2.0, 0.5, 0.1, 1e-2, 1e-4];
    for probe in 0..probes {
        let x = random_point(&mut rng, 3, 120.0);
        let exact = inst.objective_t(&x);
        let mut prev = f64::INFINITY;
        for p in ps {
            let smoothed = smoothing::smooth_value(&inst, &x, p)
                .map_err(|e| format!("smoothing failed: {e}"))?;
            if smoothed < exact - 1e-9 {
                return fail(format!(
                    "probe {probe}: D(x,{p}) = {smoothed} below exact value {exact}"
                ));
            }
            if smoothed - exact > p * (1.0 + m.ln()) + 1e-9 {
                return fail(format!(
                    "probe {probe}: gap {} exceeds p(1+ln m) at p={p}",
                    smoothed - exact
                ));
            }
            if smoothed > prev + 1e-9 {
                return fail(format!(
                    "probe {probe}: smoothed value not monotone in p ({smoothed} > {prev})"
                ));
            }
            prev = smoothed;
        }
    }
    Ok(())
}

/// Analytic gradients of the smoothed objective and of the anchored
/// majorant match central finite differences.
pub fn check_gradient_fd(probes: usize) -> Result<(), String> {
    let mut rng = rng(23);
    let inst = mixed_intersect_instance(&mut rng, 3, 16);
    let h = 1e-6;
    for probe in 0..probes {
        let x = random_point(&mut rng, 3, 60.0);
        let p = [0.5, 0.05][probe % 2];

        let (_, grad) =
            smoothing::smooth_value_gradient(&inst, &x, p).map_err(|e| e.to_string())?;
        let fd = central_diff(&x, h, |y| smoothing::smooth_value(&inst, y, p).unwrap());
        let rel = dist(&grad, &fd) / grad.iter().map(|g| g * g).sum::<f64>().sqrt().max(1.0);
        if rel > 1e-5 {
            return fail(format!("probe {probe}: smoothed gradient off by rel {rel} at p={p}"));
        }

        let base = random_point(&mut rng, 3, 60.0);
        let anchor = MajorizationAnchor::freeze(&inst, &base).map_err(|e| e.to_string())?;
        let (_, grad) = anchor.value_gradient(&x, p);
        let fd = central_diff(&x, h, |y| anchor.value(y, p));
        let rel = dist(&grad, &fd) / grad.iter().map(|g| g * g).sum::<f64>().sqrt().max(1.0);
        if rel > 1e-5 {
            return fail(format!("probe {probe}: majorant gradient off by rel {rel} at p={p}"));
        }
    }
    Ok(())
}

fn central_diff(x: &[f64], h: f64, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let mut hi = x.to_vec();
        let mut lo = x.to_vec();
        hi[j] += h;
        lo[j] -= h;
        out.push((f(&hi) - f(&lo)) / (2.0 * h));
    }
    out
}

/// Fixed-p majorization steps never increase the smoothed objective.
pub fn check_mm_descent() -> Result<(), String> {
    let mut rng = rng(37);
    let inst = mixed_intersect_instance(&mut rng, 3, 40);
    for p in [0.5, 1e-2] {
        let start = random_point(&mut rng, 3, 200.0);
        let iterates = smoothing::mm_fixed_p(&inst, &start, p, 25, 1e-7, 5_000)
            .map_err(|e| e.to_string())?;
        let mut prev = f64::INFINITY;
        for (k, xk) in iterates.iter().enumerate() {
            let v = smoothing::smooth_value(&inst, xk, p).map_err(|e| e.to_string())?;
            if v > prev + 1e-10 {
                return fail(format!("step {k}: smoothed value rose from {prev} to {v} at p={p}"));
            }
            prev = v;
        }
    }
    Ok(())
}

/// Every selected subgradient satisfies the subgradient inequality
/// f(y) >= f(x) + <g, y - x> against random probe points.
pub fn check_subgradient_inequalities(probes: usize) -> Result<(), String> {
    let mut rng = rng(41);
    let slack = 1e-8;

    let euclidean = mixed_intersect_instance(&mut rng, 3, 8);
    let enclosing = SylvesterInstance::new(
        Dynamic::EuclideanBall,
        ConvexSet::whole_space(3).unwrap(),
        vec![ConvexSet::ball(vec![6.0, 0.0, 0.0], 2.0).unwrap()],
        vec![
            ConvexSet::cube(vec![-3.0, 2.0, 1.0], 1.5).unwrap(),
            ConvexSet::ball(vec![4.0, -2.0, 0.0], 1.0).unwrap(),
            ConvexSet::singleton(vec![0.0, 5.0, -1.0]).unwrap(),
        ],
    )
    .unwrap();
    let gauges = [
        Dynamic::ScaledEuclideanBall { radius: 2.5 },
        Dynamic::LInfBall,
        Dynamic::L1Ball,
    ];
    let polyhedral: Vec<SylvesterInstance> = gauges
        .into_iter()
        .map(|dynamic| {
            SylvesterInstance::new(
                dynamic,
                ConvexSet::whole_space(3).unwrap(),
                vec![
                    ConvexSet::cube(vec![5.0, 5.0, 0.0], 1.0).unwrap(),
                    ConvexSet::ball(vec![-4.0, 1.0, 2.0], 1.5).unwrap(),
                    ConvexSet::halfspace(vec![1.0, -1.0, 0.5], -9.0).unwrap(),
                ],
                vec![
                    ConvexSet::cube(vec![0.0, -4.0, 1.0], 2.0).unwrap(),
                    ConvexSet::singleton(vec![2.0, 2.0, 2.0]).unwrap(),
                ],
            )
            .unwrap()
        })
        .collect();

    let mut instances = vec![euclidean, enclosing];
    instances.extend(polyhedral);

    let per_inst = probes / (instances.len() + 1);
    for (which, inst) in instances.iter().enumerate() {
        for probe in 0..per_inst {
            let x = random_point(&mut rng, 3, 25.0);
            let y = random_point(&mut rng, 3, 25.0);

            // T components.
            for (i, _) in inst.intersect_targets().iter().enumerate() {
                let fx = inst.minimal_time(i, &x);
                let g = inst.subgradient_t(i, &x);
                let fy = inst.minimal_time(i, &y);
                if fy < fx + dot(&g, &sub(&y, &x)) - slack {
                    return fail(format!(
                        "instance {which} probe {probe}: T[{i}] subgradient inequality fails"
                    ));
                }
            }
            // C components.
            for (j, _) in inst.enclose_targets().iter().enumerate() {
                let fx = inst.maximal_time(j, &x);
                let g = match inst.subgradient_c(j, &x) {
                    Ok(g) => g,
                    Err(_) => continue,
                };
                let fy = inst.maximal_time(j, &y);
                if fy < fx + dot(&g, &sub(&y, &x)) - slack {
                    return fail(format!(
                        "instance {which} probe {probe}: C[{j}] subgradient inequality fails"
                    ));
                }
            }
            // Combined objective through the active selection.
            let sx = inst.objective_s(&x);
            let g = match inst.active_sets(&x, 1e-12).first() {
                Some((TargetKind::Intersect, i)) => inst.subgradient_t(i, &x),
                Some((TargetKind::Enclose, j)) => match inst.subgradient_c(j, &x) {
                    Ok(g) => g,
                    Err(_) => continue,
                },
                None => continue,
            };
            let sy = inst.objective_s(&y);
            if sy < sx + dot(&g, &sub(&y, &x)) - slack {
                return fail(format!(
                    "instance {which} probe {probe}: S subgradient inequality fails"
                ));
            }
        }
    }

    // Directional selections, on targets whose domain is easy to sample.
    let targets = [
        DirectionalTarget::new(ConvexSet::halfspace(vec![1.0, 1.0], -1.0).unwrap(), vec![-1.0, 0.0])
            .unwrap(),
        DirectionalTarget::new(ConvexSet::parabola_epigraph(1.0, 2.0).unwrap(), vec![0.0, 1.0])
            .unwrap(),
        DirectionalTarget::new(ConvexSet::cube(vec![8.0, 0.0], 2.0).unwrap(), vec![1.0, 0.0])
            .unwrap(),
    ];
    for probe in 0..per_inst {
        let x = random_point(&mut rng, 2, 12.0);
        let y = random_point(&mut rng, 2, 12.0);
        for (i, target) in targets.iter().enumerate() {
            let (fx, fy) = match (target.time(&x), target.time(&y)) {
                (DirectionalValue::Finite(a), DirectionalValue::Finite(b)) => (a, b),
                _ => continue,
            };
            let g = match target.subgradient(&x, 1e-9) {
                Ok(g) => g,
                Err(_) => continue,
            };
            if fy < fx + dot(&g, &sub(&y, &x)) - slack {
                return fail(format!("directional target {i} probe {probe}: inequality fails"));
            }
        }
    }
    Ok(())
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Power-mean ordering of positive tuples and its max limit.
pub fn check_power_mean_inequalities() -> Result<(), String> {
    let mut rng = rng(53);
    for trial in 0..500 {
        let m = rng.gen_range(2..9);
        let a: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..20.0f64)).collect();
        let s = rng.gen_range(0.2..3.0);
        let t = s + rng.gen_range(0.1..3.0);

        let lhs = power_sum(&a, s);
        let rhs = power_sum(&a, t);
        if lhs <= rhs {
            return fail(format!("trial {trial}: s-norm ordering fails ({lhs} <= {rhs})"));
        }

        let lhs = power_sum_reciprocal(&a, s);
        let rhs = power_sum_reciprocal(&a, t);
        if lhs >= rhs {
            return fail(format!(
                "trial {trial}: reciprocal-power ordering fails ({lhs} >= {rhs})"
            ));
        }

        let amax = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut prev = f64::INFINITY;
        for r in [0.5, 0.1, 1e-2, 1e-3] {
            let v = power_sum_reciprocal(&a, r);
            if v < amax - 1e-9 * amax {
                return fail(format!("trial {trial}: limit approaches max from below at r={r}"));
            }
            if v > amax * (m as f64).powf(r) + 1e-9 {
                return fail(format!("trial {trial}: limit bound violated at r={r}"));
            }
            if v > prev + 1e-12 {
                return fail(format!("trial {trial}: no monotone decrease toward max at r={r}"));
            }
            prev = v;
        }
    }
    Ok(())
}

/// (sum a_i^s)^(1/s), stable in the log domain.
fn power_sum(a: &[f64], s: f64) -> f64 {
    let logs: Vec<f64> = a.iter().map(|v| s * v.ln()).collect();
    let mx = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|l| (l - mx).exp()).sum();
    ((mx + sum.ln()) / s).exp()
}

/// (sum a_i^(1/s))^s.
fn power_sum_reciprocal(a: &[f64], s: f64) -> f64 {
    power_sum(a, 1.0 / s)
}

/// Directional reach time into a disk matches its closed form on a grid
/// covering the domain.
pub fn check_ball_entry_grid() -> Result<(), String> {
    let target =
        DirectionalTarget::new(ConvexSet::ball(vec![4.0, 0.0], 2.0).unwrap(), vec![1.0, 0.0])
            .unwrap();
    for iy in 0..100 {
        let x2 = -2.0 + 4.0 * (iy as f64) / 99.0;
        // Pull the far edge in by a hair so rounding in the edge sample
        // cannot land it past the true boundary of the reachable set.
        let reach = 4.0 + (4.0 - x2 * x2).max(0.0).sqrt() - 1e-9;
        for ix in 0..100 {
            let x1 = -6.0 + (reach + 6.0) * (ix as f64) / 99.0;
            let expected = (4.0 - (4.0 - x2 * x2).max(0.0).sqrt() - x1).max(0.0);
            match target.time(&[x1, x2]) {
                DirectionalValue::Finite(t) => {
                    if (t - expected).abs() > 1e-9 {
                        return fail(format!(
                            "grid ({ix},{iy}): reach time {t} vs closed form {expected}"
                        ));
                    }
                }
                DirectionalValue::NotInDomain => {
                    return fail(format!("grid ({ix},{iy}): domain point reported unreachable"));
                }
            }
        }
    }
    for bad in [[7.0, 0.0], [0.0, 2.5], [0.0, -2.5], [6.1, 1.9]] {
        if target.time(&bad) != DirectionalValue::NotInDomain {
            return fail(format!("{bad:?} should be outside the domain"));
        }
    }
    Ok(())
}

/// Subgradient selections for the absolute-value cone reached upward,
/// modelled branch-wise by its two supporting halfplanes.
pub fn check_cone_branches() -> Result<(), String> {
    let right =
        DirectionalTarget::new(ConvexSet::halfspace(vec![1.0, -1.0], 0.0).unwrap(), vec![0.0, 1.0])
            .unwrap();
    let left =
        DirectionalTarget::new(ConvexSet::halfspace(vec![-1.0, -1.0], 0.0).unwrap(), vec![0.0, 1.0])
            .unwrap();

    // Right branch: points with x1 > 0 below the cone.
    let g = right.subgradient(&[2.0, 0.5], 1e-9).map_err(|e| e.to_string())?;
    if dist(&g, &[1.0, -1.0]) > 1e-12 {
        return fail(format!("right branch selection {g:?}, expected (1, -1)"));
    }
    // Left branch: x1 < 0.
    let g = left.subgradient(&[-2.0, 0.5], 1e-9).map_err(|e| e.to_string())?;
    if dist(&g, &[-1.0, -1.0]) > 1e-12 {
        return fail(format!("left branch selection {g:?}, expected (-1, -1)"));
    }
    // On the axis both supporting halfplanes are active; their selections
    // are the endpoints of the subdifferential segment {(a,-1): |a|<=1}.
    for (target, endpoint) in [(&right, 1.0), (&left, -1.0)] {
        let g = target.subgradient(&[0.0, -2.0], 1e-9).map_err(|e| e.to_string())?;
        if (g[1] + 1.0).abs() > 1e-12 || (g[0] - endpoint).abs() > 1e-12 {
            return fail(format!("axis selection {g:?}, expected ({endpoint}, -1)"));
        }
        if g[0].abs() > 1.0 + 1e-12 {
            return fail(format!("axis selection {g:?} leaves the segment"));
        }
    }
    // Reach times agree with t = |x1| - x2 off the cone.
    for (x, expected) in [([2.0, 0.5], 1.5), ([-3.0, -1.0], 4.0), ([0.0, -2.0], 2.0)] {
        let branch = if x[0] >= 0.0 { &right } else { &left };
        match branch.time(&x) {
            DirectionalValue::Finite(t) if (t - expected).abs() < 1e-12 => {}
            other => return fail(format!("reach time at {x:?} is {other:?}, want {expected}")),
        }
    }
    Ok(())
}

/// Running-best traces never increase and iterates stay feasible.
pub fn check_trace_monotone_feasible() -> Result<(), String> {
    let check_trace = |label: &str, trace: &[f64]| -> Result<(), String> {
        for w in trace.windows(2) {
            if w[1] > w[0] {
                return fail(format!("{label}: running best rose from {} to {}", w[0], w[1]));
            }
        }
        Ok(())
    };

    let inst = seven_disks();
    let opts = SubgradOptions { max_iters: 4000, ..Default::default() };
    let report = solve_subgradient(&inst, &[40.0, -30.0], &opts);
    check_trace("seven disks subgradient", &report.value_trace)?;

    // Constrained run: every iterate must stay inside the constraint.
    let constrained = SylvesterInstance::new(
        Dynamic::EuclideanBall,
        ConvexSet::ball(vec![0.0, 0.0], 6.0).unwrap(),
        inst.intersect_targets().to_vec(),
        inst.enclose_targets().to_vec(),
    )
    .unwrap();
    let mut infeasible = 0usize;
    let report = solve_subgradient_observed(&constrained, &[40.0, -30.0], &opts, |ev| {
        if !constrained.constraint().contains(ev.x, 1e-9) {
            infeasible += 1;
        }
    });
    if infeasible > 0 {
        return fail(format!("constrained subgradient run left the constraint {infeasible} times"));
    }
    if !constrained.constraint().contains(&report.best_point, 1e-9) {
        return fail("constrained subgradient best point infeasible".into());
    }
    check_trace("constrained subgradient", &report.value_trace)?;

    let report = smoothing::solve_mm(&five_boxes(), &[20.0, -10.0, 5.0], &SmoothingOptions::default())
        .map_err(|e| e.to_string())?;
    check_trace("five boxes smoothed", &report.value_trace)?;

    let dir = three_region_directional();
    let opts = SubgradOptions {
        schedule: StepSchedule::Harmonic { c: 1.0 },
        max_iters: 20_000,
        ..Default::default()
    };
    let report = sylvester::directional::solve_directional(&dir, &[0.0, 0.0], &opts)
        .map_err(|e| format!("directional solve failed: {e}"))?;
    check_trace("three region directional", &report.value_trace)?;
    Ok(())
}

/// Projections are distance minimizers and farthest points are distance
/// maximizers against random feasible probes.
pub fn check_projection_farthest_optimality(probes: usize) -> Result<(), String> {
    let mut rng = rng(67);
    let sets = [
        ConvexSet::ball(vec![1.0, -2.0], 3.0).unwrap(),
        ConvexSet::cube(vec![-2.0, 4.0], 1.5).unwrap(),
        ConvexSet::halfspace(vec![1.0, 2.0], 4.0).unwrap(),
        ConvexSet::singleton(vec![3.0, 3.0]).unwrap(),
        ConvexSet::parabola_epigraph(0.5, -1.0).unwrap(),
    ];
    for probe in 0..probes {
        let set = &sets[probe % sets.len()];
        let x = random_point(&mut rng, 2, 12.0);
        let proj = set.project(&x);
        if !set.contains(&proj, 1e-9) {
            return fail(format!("probe {probe}: projection lands outside {set:?}"));
        }
        let d = set.distance(&x);
        if (dist(&x, &proj) - d).abs() > 1e-9 {
            return fail(format!("probe {probe}: projection distance disagrees with distance()"));
        }
        // Random feasible point: project a random probe.
        let z = set.project(&random_point(&mut rng, 2, 12.0));
        if d > dist(&x, &z) + 1e-8 {
            return fail(format!("probe {probe}: feasible point beats the projection"));
        }

        if set.is_bounded() {
            let (far, fd) = set.farthest_point(&x).map_err(|e| e.to_string())?;
            if !set.contains(&far, 1e-9) {
                return fail(format!("probe {probe}: farthest point outside {set:?}"));
            }
            if (dist(&x, &far) - fd).abs() > 1e-9 {
                return fail(format!("probe {probe}: farthest distance inconsistent"));
            }
            if fd + 1e-8 < dist(&x, &z) {
                return fail(format!("probe {probe}: feasible point beats the farthest point"));
            }
        }
    }
    Ok(())
}
