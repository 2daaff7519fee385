//! Sampling-based certification of indicator networks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::VerifyError;
use crate::geometry::{AxisBox, ConvexPolytope, ShellClass, Space};
use crate::network::Network;
use crate::rng::{stream, BLOCK};
use crate::TOOL_VERSION;

pub const INSIDE_TOL: f64 = 1e-6;
pub const OUTSIDE_TOL: f64 = 1e-6;
pub const RANGE_TOL: f64 = 1e-9;
/// Rejection budget per sample before a stratum is declared empty.
pub const MAX_ATTEMPTS: usize = 1_000_000;
pub const SHELL_MC_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingPlan {
    pub n_inside: usize,
    pub n_shell: usize,
    pub n_outside: usize,
    pub n_box: usize,
    pub seed: u64,
    pub bounding_box: AxisBox,
    /// Exponent and sample count of the `L^p` estimate attached to the report.
    pub p: f64,
    pub n_lp: usize,
}

impl SamplingPlan {
    /// `per_stratum` points in each stratum; box is the hull of `X` inflated by `2 eps`.
    pub fn new(space: &Space, eps: f64, per_stratum: usize, seed: u64) -> Self {
        Self {
            n_inside: per_stratum,
            n_shell: per_stratum,
            n_outside: per_stratum,
            n_box: per_stratum,
            seed,
            bounding_box: space.bounding_box().inflate(2.0 * eps),
            p: 1.0,
            n_lp: 4 * per_stratum,
        }
    }

    pub fn total(&self) -> usize {
        self.n_inside + self.n_shell + self.n_outside + self.n_box
    }

    fn validate(&self, space: &Space, eps: f64) -> Result<(), VerifyError> {
        let counts = [self.n_inside, self.n_shell, self.n_outside, self.n_box];
        if counts.contains(&0) {
            return Err(VerifyError::InvalidParameter(
                "stratum counts must be at least 1".into(),
            ));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(VerifyError::InvalidParameter(format!(
                "eps must be positive, got {eps}"
            )));
        }
        if self.bounding_box.dim() != space.dim() {
            return Err(VerifyError::InvalidParameter(
                "bounding box dimension differs".into(),
            ));
        }
        if !self
            .bounding_box
            .contains_box(&space.bounding_box().inflate(eps), 1e-12)
        {
            return Err(VerifyError::InvalidParameter(
                "bounding box must contain the eps-neighbourhood of the set".into(),
            ));
        }
        if !(self.p >= 1.0) {
            return Err(VerifyError::InvalidParameter(format!(
                "p must be >= 1, got {}",
                self.p
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpEstimate {
    pub p: f64,
    /// `(integral of |N - 1_X|^p)^(1/p)` over the box.
    pub estimate: f64,
    /// 95% half-width, mapped through the `1/p` power.
    pub ci_halfwidth: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub tool_version: String,
    pub eps: f64,
    pub seed: u64,
    pub n_inside: usize,
    pub n_shell: usize,
    pub n_outside: usize,
    pub n_box: usize,
    pub pass_inside: bool,
    pub pass_outside: bool,
    pub pass_range: bool,
    pub max_dev_inside: f64,
    pub max_val_outside: f64,
    pub min_output: f64,
    pub max_output: f64,
    pub lp_error: LpEstimate,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.pass_inside && self.pass_outside && self.pass_range
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Shell width around removed polytopes inside which the value-1 guarantee is waived.
fn removed_shell(space: &Space, eps: f64) -> Option<(Vec<ConvexPolytope>, f64)> {
    match space {
        Space::Difference(plan) => Some((plan.negatives.clone(), plan.inner_shell_for(eps))),
        Space::CuboidHoles(c) => Some((
            c.holes()
                .iter()
                .filter_map(|h| ConvexPolytope::from_box(h).ok())
                .collect(),
            eps / 10.0,
        )),
        _ => None,
    }
}

fn random_direction(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = u.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 {
            return u.into_iter().map(|a| a / n).collect();
        }
    }
}

fn along(p: &[f64], u: &[f64], t: f64) -> Vec<f64> {
    p.iter().zip(u).map(|(a, b)| a + t * b).collect()
}

/// Generates `n` points in blocks with independent streams; `draw` returns
/// `None` when its attempt budget is exhausted.
fn stratum<F>(n: usize, seed: u64, tag: u64, draw: F) -> Result<Vec<Vec<f64>>, VerifyError>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Option<Vec<f64>>, VerifyError> + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let parts: Vec<Result<Vec<Vec<f64>>, VerifyError>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, (tag << 32) | b as u64);
            let count = BLOCK.min(n - b * BLOCK);
            let mut pts = Vec::with_capacity(count);
            for _ in 0..count {
                match draw(&mut rng)? {
                    Some(x) => pts.push(x),
                    None => {
                        return Err(VerifyError::EmptyStratum {
                            stratum: STRATA[tag as usize],
                            attempts: MAX_ATTEMPTS,
                        })
                    }
                }
            }
            Ok(pts)
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

const STRATA: [&str; 4] = ["inside", "shell", "outside", "box"];

fn draw_inside(
    space: &Space,
    removed: &Option<(Vec<ConvexPolytope>, f64)>,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Vec<f64>>, VerifyError> {
    let mut budget = MAX_ATTEMPTS;
    while budget > 0 {
        let Some(x) = space.sample_inside(rng, budget) else {
            return Ok(None);
        };
        budget -= 1;
        if let Some((qs, r)) = removed {
            let mut near = false;
            for q in qs {
                if q.max_violation(&x) < *r && q.distance(&x)? < *r {
                    near = true;
                    break;
                }
            }
            if near {
                continue;
            }
        }
        return Ok(Some(x));
    }
    Ok(None)
}

/// Stratified check of the three indicator conditions.
pub fn check_indicator(
    net: &Network,
    space: &Space,
    eps: f64,
    plan: &SamplingPlan,
) -> Result<VerificationReport, VerifyError> {
    plan.validate(space, eps)?;
    let d = space.dim();
    if net.input_dim() != d {
        return Err(crate::error::NetworkError::DimensionMismatch {
            expected: d,
            found: net.input_dim(),
        }
        .into());
    }
    let removed = removed_shell(space, eps);
    let bx = &plan.bounding_box;
    let seed = plan.seed;

    let inside = stratum(plan.n_inside, seed, 0, |rng| {
        draw_inside(space, &removed, rng)
    })?;
    let shell = stratum(plan.n_shell, seed, 1, |rng| {
        for _ in 0..MAX_ATTEMPTS {
            let Some(p) = space.sample_inside(rng, MAX_ATTEMPTS) else {
                return Ok(None);
            };
            let u = random_direction(rng, d);
            let x = along(&p, &u, eps * rng.random::<f64>());
            if space.classify(&x, eps)? == ShellClass::Shell {
                return Ok(Some(x));
            }
        }
        Ok(None)
    })?;
    let outside = stratum(plan.n_outside, seed, 2, |rng| {
        for _ in 0..MAX_ATTEMPTS {
            let x = if rng.random::<bool>() {
                uniform(bx, rng)
            } else {
                let Some(p) = space.sample_inside(rng, MAX_ATTEMPTS) else {
                    return Ok(None);
                };
                let u = random_direction(rng, d);
                let Some(t) = first_exit(space, &p, &u, eps)? else {
                    continue;
                };
                along(&p, &u, t + 0.1 * eps * rng.random::<f64>())
            };
            if space.classify(&x, eps)? == ShellClass::Outside {
                return Ok(Some(x));
            }
        }
        Ok(None)
    })?;
    let boxed = stratum(plan.n_box, seed, 3, |rng| Ok(Some(uniform(bx, rng))))?;

    let eval = |pts: &[Vec<f64>]| -> Result<Vec<f64>, VerifyError> {
        pts.par_iter()
            .map(|x| net.eval_scalar(x).map_err(VerifyError::from))
            .collect()
    };
    let v_in = eval(&inside)?;
    let v_shell = eval(&shell)?;
    let v_out = eval(&outside)?;
    let v_box = eval(&boxed)?;

    let max_dev_inside = v_in.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let max_val_outside = v_out.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let all = v_in.iter().chain(&v_shell).chain(&v_out).chain(&v_box);
    let (min_output, max_output) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(*v), hi.max(*v))
    });
    let lp_error = estimate_lp_error(net, space, plan.p, plan.n_lp, seed ^ 0x4c50, bx)?;
    Ok(VerificationReport {
        tool_version: TOOL_VERSION.to_string(),
        eps,
        seed,
        n_inside: plan.n_inside,
        n_shell: plan.n_shell,
        n_outside: plan.n_outside,
        n_box: plan.n_box,
        pass_inside: max_dev_inside <= INSIDE_TOL,
        pass_outside: max_val_outside <= OUTSIDE_TOL,
        pass_range: min_output >= -RANGE_TOL && max_output <= 1.0 + RANGE_TOL,
        max_dev_inside,
        max_val_outside,
        min_output,
        max_output,
        lp_error,
    })
}

/// Smallest `t` (to bisection accuracy) with `dist(p + t u) >= eps`.
fn first_exit(space: &Space, p: &[f64], u: &[f64], eps: f64) -> Result<Option<f64>, VerifyError> {
    let far = |t: f64| -> Result<bool, VerifyError> {
        Ok(space.classify(&along(p, u, t), eps)? == ShellClass::Outside)
    };
    let mut lo = 0.0;
    let mut hi = eps;
    let mut grow = 0;
    while !far(hi)? {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Ok(None);
        }
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if far(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

fn uniform(bx: &AxisBox, rng: &mut ChaCha8Rng) -> Vec<f64> {
    bx.min()
        .iter()
        .zip(bx.max())
        .map(|(a, b)| a + (b - a) * rng.random::<f64>())
        .collect()
}

/// Monte-Carlo `(integral over bx of |N - 1_X|^p)^(1/p)` with a 95% interval.
pub fn estimate_lp_error(
    net: &Network,
    space: &Space,
    p: f64,
    n_samples: usize,
    seed: u64,
    bx: &AxisBox,
) -> Result<LpEstimate, VerifyError> {
    if n_samples < 100 {
        return Err(VerifyError::TooFewSamples {
            min: 100,
            got: n_samples,
        });
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(VerifyError::InvalidParameter(format!(
            "p must be >= 1, got {p}"
        )));
    }
    let blocks = n_samples.div_ceil(BLOCK);
    let partial: Vec<Result<(f64, f64), VerifyError>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b as u64);
            let count = BLOCK.min(n_samples - b * BLOCK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let x = uniform(bx, &mut rng);
                let target = if space.contains(&x)? { 1.0 } else { 0.0 };
                let v = (net.eval_scalar(&x)? - target).abs().powf(p);
                s += v;
                s2 += v * v;
            }
            Ok((s, s2))
        })
        .collect();
    let (mut s, mut s2) = (0.0, 0.0);
    for r in partial {
        let (a, b) = r?;
        s += a;
        s2 += b;
    }
    let n = n_samples as f64;
    let vol = bx.volume();
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    let integral = vol * mean;
    let half = 1.96 * vol * (var / n).sqrt();
    let inv = 1.0 / p;
    let estimate = integral.powf(inv);
    let ci_halfwidth = ((integral + half).powf(inv) - estimate)
        .max(estimate - (integral - half).max(0.0).powf(inv));
    Ok(LpEstimate {
        p,
        estimate,
        ci_halfwidth,
        samples: n_samples,
    })
}

/// Largest `delta = 2^-j`, `j = 0..=30`, whose shell `B_delta(X) \ X` has
/// measure below `eps_target^p`.
pub fn shell_tolerance(
    space: &Space,
    eps_target: f64,
    p: f64,
    seed: u64,
) -> Result<f64, VerifyError> {
    if !(eps_target > 0.0) || !(p >= 1.0) {
        return Err(VerifyError::InvalidParameter(format!(
            "need eps > 0 and p >= 1, got eps = {eps_target}, p = {p}"
        )));
    }
    let target = eps_target.powf(p);
    for j in 0..=30 {
        let delta = 0.5f64.powi(j);
        let measure = match space.analytic_shell_measure(delta) {
            Some(m) => m,
            None => shell_measure_mc(space, delta, SHELL_MC_POINTS, seed.wrapping_add(j as u64))?,
        };
        if measure < target {
            return Ok(delta);
        }
    }
    Err(VerifyError::NoTolerance { target })
}

/// Monte-Carlo `mu(B_delta(X) \ X)` over the hull inflated by `delta`.
pub fn shell_measure_mc(
    space: &Space,
    delta: f64,
    n: usize,
    seed: u64,
) -> Result<f64, VerifyError> {
    let bx = space.bounding_box().inflate(delta);
    let blocks = n.div_ceil(BLOCK);
    let counts: Vec<Result<usize, VerifyError>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b as u64);
            let count = BLOCK.min(n - b * BLOCK);
            let mut hits = 0;
            for _ in 0..count {
                let x = uniform(&bx, &mut rng);
                if space.classify(&x, delta)? == ShellClass::Shell {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect();
    let mut hits = 0;
    for c in counts {
        hits += c?;
    }
    Ok(bx.volume() * hits as f64 / n as f64)
}
