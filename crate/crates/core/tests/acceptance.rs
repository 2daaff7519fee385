//! Acceptance run: one line per criterion, non-zero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use polynet::constructor::LipschitzPlan;
use polynet::rng::stream;
use polynet::trainer::{
    gradient_check, lattice_dataset, line_hausdorff, loss_curve_csv, perturb, train, zero_lines,
    Dataset, InitScheme, Loss, TrainConfig,
};
use polynet::verifier::{check_indicator, estimate_lp_error, shell_tolerance, SamplingPlan};
use polynet::{
    betti_architecture, clipped_gate, difference_indicator, lipschitz_approximator,
    maxpool_to_relu, sigmoid_head, union_indicator, BettiProfile, ConvexPolytope, Network,
    ShellClass, Simplex, Space,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);
type Target = dyn Fn(&[f64]) -> f64 + Sync;

const SEED: u64 = 20_240_601;
const BUILD_EPS: f64 = 0.5;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn widths(net: &Network) -> Vec<usize> {
    net.architecture().widths
}

fn architectures() -> Outcome {
    let union = union_indicator(&common::two_triangles(), BUILD_EPS).map_err(|e| e.to_string())?;
    ensure(widths(&union.network) == [2, 6, 2, 1], || {
        format!("union widths {:?}", widths(&union.network))
    })?;

    let diff = difference_indicator(&common::hexagon_minus_pentagon(), BUILD_EPS)
        .map_err(|e| e.to_string())?;
    ensure(widths(&diff.network) == [2, 11, 2, 2, 1], || {
        format!("difference widths {:?}", widths(&diff.network))
    })?;

    let betti = betti_architecture(3, &BettiProfile::new(vec![2, 2, 3, 0]).unwrap())
        .map_err(|e| e.to_string())?;
    ensure(betti.widths == [3, 34, 7, 2, 1], || {
        format!("betti widths {:?}", betti.widths)
    })?;

    let k = 6;
    let fan: Vec<ConvexPolytope> = (0..k)
        .map(|i| {
            let at = |j: usize| {
                let t = std::f64::consts::TAU * (j % k) as f64 / k as f64;
                vec![t.cos(), t.sin()]
            };
            Simplex::new(vec![at(i), at(i + 1), vec![0.0, 0.0]])
                .and_then(|s| s.facet_hyperplanes())
                .unwrap()
        })
        .collect();
    let kgon = union_indicator(&fan, 0.05).map_err(|e| e.to_string())?;
    ensure(widths(&kgon.network) == [2, 18, 6, 1], || {
        format!("k-gon widths {:?}", widths(&kgon.network))
    })?;

    let plan = LipschitzPlan::new(1, 1, 1.0, 1.0, 0.5).map_err(|e| e.to_string())?;
    ensure(plan.widths() == [1, 10, 5, 1], || {
        format!("Lipschitz widths {:?}", plan.widths())
    })?;
    Ok("(2,6,2,1) (2,11,2,2,1) (3,34,7,2,1) (2,18,6,1) (1,10,5,1)".into())
}

/// Vertices on a random ellipse at well-separated angles, so the polygon is convex.
fn random_polygon(seed: u64) -> ConvexPolytope {
    let mut rng = stream(seed, 0);
    loop {
        let k = rng.random_range(3..=8);
        let mut angles: Vec<f64> = (0..k)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        angles.sort_by(f64::total_cmp);
        let gaps_ok = (0..k).all(|i| {
            let next = if i + 1 < k {
                angles[i + 1]
            } else {
                angles[0] + std::f64::consts::TAU
            };
            let g = next - angles[i];
            g > 0.3 && g < std::f64::consts::PI - 0.3
        });
        if !gaps_ok {
            continue;
        }
        let (a, b) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
        let rot: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let c = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let pts: Vec<[f64; 2]> = angles
            .iter()
            .map(|t| {
                let (x, y) = (a * t.cos(), b * t.sin());
                [
                    c[0] + x * rot.cos() - y * rot.sin(),
                    c[1] + x * rot.sin() + y * rot.cos(),
                ]
            })
            .collect();
        if let Ok(p) = ConvexPolytope::from_polygon(&pts) {
            return p;
        }
    }
}

/// Random simplex in `[0, 1]^d` whose heights are all at least 0.1.
fn random_simplex(d: usize, seed: u64) -> ConvexPolytope {
    let mut rng = stream(seed, 0);
    loop {
        let verts: Vec<Vec<f64>> = (0..=d)
            .map(|_| (0..d).map(|_| rng.random::<f64>()).collect())
            .collect();
        let Ok(poly) = Simplex::new(verts.clone()).and_then(|s| s.facet_hyperplanes()) else {
            continue;
        };
        let tall = poly
            .faces()
            .iter()
            .all(|f| verts.iter().map(|v| f.eval(v)).fold(0.0, f64::max) >= 0.1);
        if tall {
            return poly;
        }
    }
}

fn gate_suite(seed: u64) -> Result<Vec<String>, String> {
    let mut polys: Vec<(ConvexPolytope, f64)> =
        (0..20).map(|i| (random_polygon(seed + i), 0.1)).collect();
    for (i, d) in [3, 3, 4, 4, 5].into_iter().enumerate() {
        polys.push((random_simplex(d, seed + 100 + i as u64), 0.05));
    }
    let mut reports = Vec::new();
    for (i, (poly, eps)) in polys.into_iter().enumerate() {
        let (net, _) = clipped_gate(&poly, eps).map_err(|e| format!("gate {i}: {e}"))?;
        let space = Space::Polytope(poly);
        let plan = SamplingPlan::new(&space, eps, 2500, seed + i as u64);
        let r = check_indicator(&net, &space, eps, &plan).map_err(|e| format!("gate {i}: {e}"))?;
        ensure(r.passed(), || {
            format!(
                "gate {i} (d = {}): dev_in {:e}, val_out {:e}, range [{}, {}]",
                space.dim(),
                r.max_dev_inside,
                r.max_val_outside,
                r.min_output,
                r.max_output
            )
        })?;
        reports.push(r.to_json());
    }
    Ok(reports)
}

fn gate_soundness() -> Outcome {
    let reports = gate_suite(SEED)?;
    Ok(format!("{} gates pass on 10^4 samples each", reports.len()))
}

fn epsilon_pipeline(seed: u64) -> Result<Vec<String>, String> {
    let square =
        ConvexPolytope::from_polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    let space = Space::Polytope(square.clone());
    let target = 0.5;
    let mut out = Vec::new();
    for p in [1.0, 2.0] {
        let delta = shell_tolerance(&space, target, p, seed).map_err(|e| e.to_string())?;
        let analytic = 4.0 * delta + std::f64::consts::PI * delta * delta;
        ensure(analytic < target.powf(p), || {
            format!("p = {p}: shell measure {analytic} for delta {delta}")
        })?;
        let (net, _) = clipped_gate(&square, delta).map_err(|e| e.to_string())?;
        let bx = space.bounding_box().inflate(2.0 * delta);
        let lp =
            estimate_lp_error(&net, &space, p, 1_000_000, seed, &bx).map_err(|e| e.to_string())?;
        ensure(lp.estimate + lp.ci_halfwidth < target, || {
            format!("p = {p}: L^p error {} +- {}", lp.estimate, lp.ci_halfwidth)
        })?;
        out.push(format!(
            "p = {p}: delta = {delta}, error = {:.4} +- {:.4}",
            lp.estimate, lp.ci_halfwidth
        ));
    }
    Ok(out)
}

fn epsilon_end_to_end() -> Outcome {
    Ok(epsilon_pipeline(SEED)?.join("; "))
}

fn head_preservation() -> Outcome {
    let delta = 0.01;
    let space = common::two_triangle_space();
    let base = union_indicator(&common::two_triangles(), BUILD_EPS).map_err(|e| e.to_string())?;
    let relu = maxpool_to_relu(&base.network).map_err(|e| e.to_string())?;
    let sig = sigmoid_head(&base.network, delta).map_err(|e| e.to_string())?;

    let mut rng = stream(SEED, 7);
    let inside: Vec<Vec<f64>> = (0..5000)
        .map(|_| {
            space
                .sample_inside(&mut rng, 100_000)
                .expect("inside sample")
        })
        .collect();
    let bx = space.bounding_box().inflate(4.0 * BUILD_EPS);
    let mut outside = Vec::with_capacity(5000);
    while outside.len() < 5000 {
        let x: Vec<f64> = (0..2)
            .map(|k| rng.random_range(bx.min()[k]..bx.max()[k]))
            .collect();
        if space.classify(&x, BUILD_EPS).unwrap() == ShellClass::Outside {
            outside.push(x);
        }
    }
    for (name, net) in [("relu", &relu), ("sigmoid", &sig)] {
        let lo = inside
            .iter()
            .map(|x| net.eval_scalar(x).unwrap())
            .fold(f64::INFINITY, f64::min);
        let hi = outside
            .iter()
            .map(|x| net.eval_scalar(x).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        ensure(lo >= 1.0 - delta && hi <= delta, || {
            format!("{name} head: min inside {lo}, max outside {hi}")
        })?;
    }
    Ok("relu and sigmoid heads keep both conditions on 10^4 samples".into())
}

fn riemann_l1(net: &Network, f: &(dyn Fn(&[f64]) -> f64 + Sync), d: usize) -> f64 {
    let per_axis: usize = match d {
        1 => 100_000,
        _ => 317,
    };
    let total = per_axis.pow(d as u32);
    let sum: f64 = (0..total)
        .into_par_iter()
        .map(|i| {
            let mut rest = i;
            let x: Vec<f64> = (0..d)
                .map(|_| {
                    let c = rest % per_axis;
                    rest /= per_axis;
                    (c as f64 + 0.5) / per_axis as f64
                })
                .collect();
            (net.eval_scalar(&x).unwrap() - f(&x)).abs()
        })
        .sum();
    sum / total as f64
}

fn lipschitz() -> Outcome {
    let hat = |x: &[f64]| 1.0 - (2.0 * x[0] - 1.0).abs();
    let pyramid = |x: &[f64]| 1.0 - 2.0 * (x[0] - 0.5).abs().max((x[1] - 0.5).abs());
    let cases: [(usize, &Target); 2] = [(1, &hat), (2, &pyramid)];
    let mut summary = Vec::new();
    for (d, f) in cases {
        for eps in [0.5, 0.25] {
            let plan = LipschitzPlan::new(d, 1, 2.0, 1.0, eps).map_err(|e| e.to_string())?;
            let n = plan.delta.powi(-(d as i32)).round() as usize;
            let b = lipschitz_approximator(&|x: &[f64]| vec![f(x)], &plan)
                .map_err(|e| e.to_string())?;
            ensure(widths(&b.network) == [d, 2 * n * d, n, 1], || {
                format!("d = {d}, eps = {eps}: widths {:?}", widths(&b.network))
            })?;
            let err = riemann_l1(&b.network, f, d);
            ensure(err < eps, || {
                format!("d = {d}, eps = {eps}: L1 error {err}")
            })?;
            summary.push(format!("d={d} eps={eps} n={n} L1={err:.4}"));
        }
    }
    Ok(summary.join("; "))
}

/// 8x8 sub-lattice of the training box.
fn small_dataset(space: &Space) -> Dataset {
    lattice_dataset(space, &common::lattice_box(), 8).unwrap()
}

fn gradients() -> Outcome {
    let tri_space = common::two_triangle_space();
    let union = union_indicator(&common::two_triangles(), BUILD_EPS).map_err(|e| e.to_string())?;
    let plan = common::hexagon_minus_pentagon();
    let diff = difference_indicator(&plan, BUILD_EPS).map_err(|e| e.to_string())?;
    let sig_union = sigmoid_head(&union.network, 0.01).map_err(|e| e.to_string())?;
    let sig_diff = sigmoid_head(&diff.network, 0.01).map_err(|e| e.to_string())?;
    let diff_space = Space::Difference(plan);
    // BCE is only defined on a sigmoid output.
    let cases = [
        ("maxpool", union.network, &tri_space, false),
        ("relu", diff.network, &diff_space, false),
        ("sigmoid union", sig_union, &tri_space, true),
        ("sigmoid difference", sig_diff, &diff_space, true),
    ];
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for (name, net, space, sigmoid) in &cases {
        let data = small_dataset(space);
        let kinds: &[Loss] = if *sigmoid {
            &[Loss::Mse, Loss::Bce]
        } else {
            &[Loss::Mse]
        };
        for net in [perturb(net, 0.01, SEED), perturb(net, 0.01, SEED + 1)] {
            for &kind in kinds {
                let rel = gradient_check(&net, &data, kind, SEED).map_err(|e| e.to_string())?;
                ensure(rel < 1e-5, || {
                    format!("{name} {kind:?}: relative error {rel:e}")
                })?;
                worst = worst.max(rel);
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} checks, worst relative error {worst:.2e}"))
}

struct Recovery {
    curve: Vec<f64>,
    hausdorff: Vec<f64>,
}

fn recovery_run(seed: u64) -> Result<Recovery, String> {
    let space = common::two_triangle_space();
    let bx = common::lattice_box();
    let data = lattice_dataset(&space, &bx, common::RESOLUTION).map_err(|e| e.to_string())?;
    let built = union_indicator(&common::two_triangles(), BUILD_EPS).map_err(|e| e.to_string())?;
    let start = perturb(&built.network, 0.01, seed);
    let cfg = TrainConfig::new(
        Loss::Mse,
        0.005,
        50_000,
        InitScheme::Manual(start.clone()),
        seed,
    );
    let (trained, curve) = train(&start, &data, &cfg).map_err(|e| e.to_string())?;
    let h = common::grid_step();
    let hausdorff = zero_lines(&built.network)
        .iter()
        .zip(zero_lines(&trained))
        .map(|(a, b)| match (a.line, b.line) {
            (Some(a), Some(b)) => line_hausdorff(a, b, &bx) / h,
            _ => f64::INFINITY,
        })
        .collect();
    Ok(Recovery { curve, hausdorff })
}

fn recovery() -> Outcome {
    let run = recovery_run(SEED)?;
    let last = *run.curve.last().unwrap();
    ensure(last < 1e-3, || format!("final lattice loss {last:e}"))?;
    ensure(run.hausdorff.len() == 6, || {
        format!("{} zero lines", run.hausdorff.len())
    })?;
    let far = run.hausdorff.iter().cloned().fold(0.0, f64::max);
    ensure(far <= 1.0, || {
        format!("zero-line distances {:?}", run.hausdorff)
    })?;
    Ok(format!(
        "initial loss {:.3e}, final loss {last:.3e}, max zero-line distance {far:.3} grid units",
        run.curve[0]
    ))
}

fn determinism() -> Outcome {
    let a = gate_suite(SEED + 1)?;
    let b = gate_suite(SEED + 1)?;
    ensure(a == b, || "gate reports differ between runs".into())?;
    let a = epsilon_pipeline(SEED + 1)?;
    let b = epsilon_pipeline(SEED + 1)?;
    ensure(a == b, || "L^p estimates differ between runs".into())?;
    let a = recovery_run(SEED + 1)?;
    let b = recovery_run(SEED + 1)?;
    ensure(loss_curve_csv(&a.curve) == loss_curve_csv(&b.curve), || {
        "loss curves differ between runs".into()
    })?;
    ensure(a.hausdorff == b.hausdorff, || {
        "zero lines differ between runs".into()
    })?;
    Ok("gate reports, L^p estimates and training curves repeat byte for byte".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "architecture golden values",
            Duration::from_secs(1),
            architectures,
        ),
        ("gate soundness", Duration::from_secs(30), gate_soundness),
        (
            "shell tolerance to L^p error",
            Duration::from_secs(60),
            epsilon_end_to_end,
        ),
        ("head rewrites", Duration::from_secs(30), head_preservation),
        (
            "Lipschitz approximation",
            Duration::from_secs(120),
            lipschitz,
        ),
        ("gradient correctness", Duration::from_secs(30), gradients),
        (
            "perturbed manual init recovers",
            Duration::from_secs(600),
            recovery,
        ),
        ("determinism", Duration::MAX, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let took = t.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > *limit => Err(format!("{msg}; took {took:.1?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {}: PASS {name} ({took:.1?}): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({took:.1?}): {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
