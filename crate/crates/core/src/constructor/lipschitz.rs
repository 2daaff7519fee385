use serde::Serialize;

use super::gate::{gate_layers, gate_parts, GateParts};
use super::Build;
use crate::error::ConstructError;
use crate::geometry::{AxisBox, ConvexPolytope};
use crate::network::{Activation, Layer, Matrix, Network};

/// Largest cube count accepted by callers that expose the approximator.
pub const MAX_CUBES: usize = 1_000_000;

/// Largest dense weight matrix the approximator will allocate.
const MAX_DENSE_ENTRIES: usize = 50_000_000;

/// Grid parameters for approximating an `L`-Lipschitz map on `[0,1]^{d_x}`
/// to `L^p` accuracy `target_eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzPlan {
    pub d_x: usize,
    pub d_y: usize,
    pub lipschitz_l: f64,
    pub norm_p: f64,
    pub target_eps: f64,
    /// Cube side `1/q`.
    pub delta: f64,
    /// Cubes per axis.
    pub q: usize,
    pub n_cubes: usize,
    pub cube_shell_r: f64,
}

impl LipschitzPlan {
    pub fn new(
        d_x: usize,
        d_y: usize,
        lipschitz_l: f64,
        norm_p: f64,
        target_eps: f64,
    ) -> Result<Self, ConstructError> {
        if d_x == 0 || d_y == 0 {
            return Err(ConstructError::InvalidPlan(
                "dimensions must be positive".into(),
            ));
        }
        if !(lipschitz_l >= 0.0 && lipschitz_l.is_finite()) {
            return Err(ConstructError::InvalidPlan(format!(
                "Lipschitz constant must be finite and nonnegative, got {lipschitz_l}"
            )));
        }
        if !(norm_p >= 1.0 && norm_p.is_finite()) {
            return Err(ConstructError::InvalidPlan(format!(
                "p must be >= 1, got {norm_p}"
            )));
        }
        super::check_eps(target_eps)?;
        let t = Self::threshold(d_x, lipschitz_l, norm_p, target_eps);
        let mut q = (1.0 / t).floor() as usize + 1;
        while 1.0 / (q as f64) >= t {
            q += 1;
        }
        let n_cubes = u32::try_from(d_x)
            .ok()
            .and_then(|e| q.checked_pow(e))
            .ok_or_else(|| ConstructError::Resource(format!("{q}^{d_x} cubes overflow")))?;
        let delta = 1.0 / q as f64;
        let dp = delta.powf(norm_p);
        Ok(Self {
            d_x,
            d_y,
            lipschitz_l,
            norm_p,
            target_eps,
            delta,
            q,
            n_cubes,
            cube_shell_r: delta * dp / (2.0 * d_x as f64 * (1.0 + dp)),
        })
    }

    /// `eps (1 + (sqrt(d_x) L)^p)^{-1/p}`; the cube side must stay strictly below it.
    pub fn threshold(d_x: usize, l: f64, p: f64, eps: f64) -> f64 {
        eps * (1.0 + ((d_x as f64).sqrt() * l).powf(p)).powf(-1.0 / p)
    }

    /// Widths `(d_x, 2 n d_x d_y, n d_y, d_y)`.
    pub fn widths(&self) -> Vec<usize> {
        let n = self.n_cubes;
        vec![
            self.d_x,
            2 * n * self.d_x * self.d_y,
            n * self.d_y,
            self.d_y,
        ]
    }

    /// Center of cube `index` (lexicographic over the grid, first axis slowest).
    pub fn anchor(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut x = vec![0.0; self.d_x];
        for k in (0..self.d_x).rev() {
            x[k] = ((rest % self.q) as f64 + 0.5) * self.delta;
            rest /= self.q;
        }
        x
    }
}

/// `N(x) = sum_i f(x_i) relu(T_i(x))` over the cube grid, with `x_i` the cube centers.
pub fn lipschitz_approximator(
    f: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    plan: &LipschitzPlan,
) -> Result<Build, ConstructError> {
    let fresh = LipschitzPlan::new(
        plan.d_x,
        plan.d_y,
        plan.lipschitz_l,
        plan.norm_p,
        plan.target_eps,
    )?;
    if fresh != *plan {
        return Err(ConstructError::InvalidPlan(
            "plan fields are inconsistent with its parameters".into(),
        ));
    }
    let (d, m, n) = (plan.d_x, plan.d_y, plan.n_cubes);
    let widths = plan.widths();
    let dense = widths
        .windows(2)
        .map(|w| w[0].saturating_mul(w[1]))
        .max()
        .unwrap_or(0);
    if n > MAX_CUBES || dense > MAX_DENSE_ENTRIES {
        return Err(ConstructError::Resource(format!(
            "{n} cubes need a {dense}-entry weight matrix"
        )));
    }

    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let x = plan.anchor(i);
        let y = f(&x);
        if y.len() != m {
            return Err(ConstructError::InvalidPlan(format!(
                "function returned {} values, expected {m}",
                y.len()
            )));
        }
        if let Some(v) = y.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
            return Err(ConstructError::FunctionRange {
                anchor: x,
                value: *v,
            });
        }
        values.push(y);
    }

    let cube = ConvexPolytope::from_box(&AxisBox::new(vec![0.0; d], vec![plan.delta; d])?)?;
    let template = gate_parts(&cube, plan.cube_shell_r)?;
    let mut gates: Vec<GateParts> = Vec::with_capacity(n * m);
    for _ in 0..m {
        for i in 0..n {
            let corner: Vec<f64> = plan
                .anchor(i)
                .iter()
                .map(|c| c - 0.5 * plan.delta)
                .collect();
            gates.push(template.translated(&corner));
        }
    }
    let mut layers = gate_layers(d, &gates, Activation::Relu);
    let mut w3 = Matrix::zeros(m, n * m);
    for k in 0..m {
        for (i, y) in values.iter().enumerate() {
            w3.set(k, k * n + i, y[k]);
        }
    }
    layers.push(Layer::new(w3, vec![0.0; m], Activation::Identity));
    Ok(Build {
        network: Network::new(d, layers)?,
        gates: vec![template.certificate],
    })
}
