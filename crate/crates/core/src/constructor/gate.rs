use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_eps;
use crate::error::ConstructError;
use crate::geometry::{dykstra, ConvexPolytope, MinkowskiWeights};
use crate::network::{Activation, Layer, Matrix, Network};
use crate::rng::{hash_f64s, stream, BLOCK};

/// Number of boundary samples used to estimate the margin in dimension three and up.
pub const SAMPLED_MARGIN_POINTS: usize = 100_000;

const EXACT_SAFETY: f64 = 1.25;
const SAMPLED_SAFETY: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarginMethod {
    #[serde(rename = "exact2d")]
    Exact2d,
    #[serde(rename = "sampled")]
    Sampled,
}

impl MarginMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MarginMethod::Exact2d => "exact2d",
            MarginMethod::Sampled => "sampled",
        }
    }
}

/// Parameters of one gate `T(x) = 1 + M (V - sum_i c_i relu(w_i . x + b_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCertificate {
    pub weights_c: Vec<f64>,
    pub constant_v: f64,
    /// Maximum of `V - sum c_i relu(.)` over points at distance `shell_eps / 2`.
    pub margin_mhat: f64,
    pub slope_m: f64,
    pub shell_eps: f64,
    pub margin_method: MarginMethod,
}

#[derive(Serialize)]
pub(crate) struct CertificateEntry<'a> {
    c: &'a [f64],
    #[serde(rename = "V")]
    v: f64,
    m_hat: f64,
    #[serde(rename = "M")]
    m: f64,
    eps: f64,
    method: MarginMethod,
}

impl GateCertificate {
    pub(crate) fn entry(&self) -> CertificateEntry<'_> {
        CertificateEntry {
            c: &self.weights_c,
            v: self.constant_v,
            m_hat: self.margin_mhat,
            m: self.slope_m,
            eps: self.shell_eps,
            method: self.margin_method,
        }
    }
}

/// Hidden rows and output unit of a gate, ready to be stacked into a wider network.
#[derive(Debug, Clone)]
pub(crate) struct GateParts {
    pub rows: Vec<(Vec<f64>, f64)>,
    pub out_weights: Vec<f64>,
    pub out_bias: f64,
    pub certificate: GateCertificate,
}

impl GateParts {
    /// Same gate for the polytope translated by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|(w, b)| {
                let wb: f64 = w.iter().zip(shift).map(|(a, s)| a * s).sum();
                (w.clone(), b - wb)
            })
            .collect();
        Self {
            rows,
            ..self.clone()
        }
    }
}

pub(crate) fn gate_parts(poly: &ConvexPolytope, eps: f64) -> Result<GateParts, ConstructError> {
    check_eps(eps)?;
    let MinkowskiWeights { c, v } = poly.minkowski_weights()?;
    let r = eps / 2.0;
    let (m_hat, method) = if poly.dim() <= 2 {
        (exact_margin(poly, &c, r), MarginMethod::Exact2d)
    } else {
        (sampled_margin(poly, &c, r, eps, 0), MarginMethod::Sampled)
    };
    if !(m_hat < 0.0) {
        return Err(ConstructError::NonNegativeMargin(m_hat));
    }
    let mut slope = match method {
        MarginMethod::Exact2d => EXACT_SAFETY * (-1.0 / m_hat),
        MarginMethod::Sampled => SAMPLED_SAFETY * (-1.0 / m_hat),
    };
    if method == MarginMethod::Sampled {
        // Independent points at the full shell width must land strictly below zero.
        let g_eps = sampled_margin(poly, &c, eps, eps, 1);
        let mut doublings = 0;
        while 1.0 + slope * g_eps >= 0.0 && doublings < 64 {
            slope *= 2.0;
            doublings += 1;
        }
    }
    let rows = poly
        .faces()
        .iter()
        .map(|f| (f.normal().to_vec(), f.offset()))
        .collect();
    let out_weights = c.iter().map(|ci| -slope * ci).collect();
    Ok(GateParts {
        rows,
        out_weights,
        out_bias: 1.0 + slope * v,
        certificate: GateCertificate {
            weights_c: c,
            constant_v: v,
            margin_mhat: m_hat,
            slope_m: slope,
            shell_eps: eps,
            margin_method: method,
        },
    })
}

/// Two-layer gate `d -> k -> 1`: exactly 1 on the polytope, below 1 off it,
/// and negative at distance `eps` or more.
pub fn polytope_gate(
    poly: &ConvexPolytope,
    eps: f64,
) -> Result<(Network, GateCertificate), ConstructError> {
    let parts = gate_parts(poly, eps)?;
    let net = assemble(
        poly.dim(),
        std::slice::from_ref(&parts),
        Activation::Identity,
    )?;
    Ok((net, parts.certificate))
}

/// `relu(T)`: the gate clipped to `[0, 1]`.
pub fn clipped_gate(
    poly: &ConvexPolytope,
    eps: f64,
) -> Result<(Network, GateCertificate), ConstructError> {
    let parts = gate_parts(poly, eps)?;
    let net = assemble(poly.dim(), std::slice::from_ref(&parts), Activation::Relu)?;
    Ok((net, parts.certificate))
}

/// Stacks gates side by side: one hidden layer with all rows, one output unit per gate.
pub(crate) fn assemble(
    dim: usize,
    gates: &[GateParts],
    out_act: Activation,
) -> Result<Network, ConstructError> {
    Ok(Network::new(dim, gate_layers(dim, gates, out_act))?)
}

pub(crate) fn gate_layers(dim: usize, gates: &[GateParts], out_act: Activation) -> Vec<Layer> {
    let l: usize = gates.iter().map(|g| g.rows.len()).sum();
    let k = gates.len();
    let mut w1 = Matrix::zeros(l, dim);
    let mut b1 = Vec::with_capacity(l);
    let mut w2 = Matrix::zeros(k, l);
    let mut b2 = Vec::with_capacity(k);
    let mut row = 0;
    for (g, gate) in gates.iter().enumerate() {
        for ((w, b), ow) in gate.rows.iter().zip(&gate.out_weights) {
            w1.row_mut(row).copy_from_slice(w);
            b1.push(*b);
            w2.set(g, row, *ow);
            row += 1;
        }
        b2.push(gate.out_bias);
    }
    vec![
        Layer::new(w1, b1, Activation::Relu),
        Layer::new(w2, b2, out_act),
    ]
}

/// `V - sum c_i relu(s_i(x))`, rewritten as `-sum c_i relu(-s_i(x))`.
fn concave_part(poly: &ConvexPolytope, c: &[f64], x: &[f64]) -> f64 {
    -poly
        .faces()
        .iter()
        .zip(c)
        .map(|(f, ci)| ci * (-f.eval(x)).max(0.0))
        .sum::<f64>()
}

/// Exact maximum of the concave part over the boundary of the `r`-neighbourhood
/// of an interval or polygon.
fn exact_margin(poly: &ConvexPolytope, c: &[f64], r: f64) -> f64 {
    let g = |x: &[f64]| concave_part(poly, c, x);
    if poly.dim() == 1 {
        let lo = poly
            .vertices()
            .iter()
            .map(|v| v[0])
            .fold(f64::INFINITY, f64::min);
        let hi = poly
            .vertices()
            .iter()
            .map(|v| v[0])
            .fold(f64::NEG_INFINITY, f64::max);
        return g(&[lo - r]).max(g(&[hi + r]));
    }
    let pts = poly.polygon_ccw().expect("planar polytope");
    let n = pts.len();
    let faces = poly.faces();
    let at = |p: [f64; 2]| g(&p);
    let s = |j: usize, p: [f64; 2]| faces[j].eval(&p);
    let outward = |i: usize| {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        [dy / len, -dx / len]
    };
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        // Offset edge: piecewise linear, breakpoints where some s_j vanishes.
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let out = outward(i);
        let start = [a[0] + r * out[0], a[1] + r * out[1]];
        let e = [b[0] - a[0], b[1] - a[1]];
        let point = |t: f64| [start[0] + t * e[0], start[1] + t * e[1]];
        best = best.max(at(point(0.0))).max(at(point(1.0)));
        for (j, f) in faces.iter().enumerate() {
            let slope = f.normal()[0] * e[0] + f.normal()[1] * e[1];
            if slope != 0.0 {
                let t = -s(j, start) / slope;
                if t > 0.0 && t < 1.0 {
                    best = best.max(at(point(t)));
                }
            }
        }

        // Arc around vertex b, from the outward normal of edge i to that of edge i+1.
        let v = b;
        let o0 = out;
        let o1 = outward((i + 1) % n);
        let th0 = o0[1].atan2(o0[0]);
        let mut span = o1[1].atan2(o1[0]) - th0;
        while span < 0.0 {
            span += TAU;
        }
        while span >= TAU {
            span -= TAU;
        }
        let rel = |theta: f64| (theta - th0).rem_euclid(TAU);
        let on_arc = |theta: f64| [v[0] + r * theta.cos(), v[1] + r * theta.sin()];
        let mut cuts = vec![0.0, span];
        for (j, f) in faces.iter().enumerate() {
            let kappa = -s(j, v) / r;
            if kappa.abs() <= 1.0 {
                let phi = f.normal()[1].atan2(f.normal()[0]);
                let delta = kappa.acos();
                for t in [rel(phi + delta), rel(phi - delta)] {
                    if t < span {
                        cuts.push(t);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        for &t in &cuts {
            best = best.max(at(on_arc(th0 + t)));
        }
        for w in cuts.windows(2) {
            let mid = on_arc(th0 + 0.5 * (w[0] + w[1]));
            // On this piece the active faces are fixed and the concave part is a sinusoid.
            let (mut sx, mut sy) = (0.0, 0.0);
            for (j, f) in faces.iter().enumerate() {
                if s(j, mid) < 0.0 {
                    sx += c[j] * f.normal()[0];
                    sy += c[j] * f.normal()[1];
                }
            }
            if sx != 0.0 || sy != 0.0 {
                let t = rel(sy.atan2(sx));
                if t > w[0] && t < w[1] {
                    best = best.max(at(on_arc(th0 + t)));
                }
            }
        }
    }
    best
}

/// Maximum of the concave part over deterministic points at distance `r`
/// from the polytope. `salt` selects an independent sample.
fn sampled_margin(poly: &ConvexPolytope, c: &[f64], r: f64, eps: f64, salt: u64) -> f64 {
    let seed = hash_f64s(
        poly.faces()
            .iter()
            .flat_map(|f| f.normal().iter().copied().chain([f.offset()]))
            .chain([eps, salt as f64]),
    );
    let d = poly.dim();
    let bx = poly.bounding_box().inflate(eps);
    let diam = bx
        .min()
        .iter()
        .zip(bx.max())
        .map(|(a, b)| (b - a).powi(2))
        .sum::<f64>()
        .sqrt();

    // Points straight out from each face, where the concave part is usually largest.
    let mut best = f64::NEG_INFINITY;
    for f in poly.faces() {
        let on_face: Vec<&Vec<f64>> = poly
            .vertices()
            .iter()
            .filter(|v| f.eval(v).abs() <= 1e-9 * (1.0 + diam))
            .collect();
        if on_face.is_empty() {
            continue;
        }
        let mut x = vec![0.0; d];
        for v in &on_face {
            x.iter_mut().zip(v.iter()).for_each(|(a, b)| *a += b);
        }
        x.iter_mut()
            .zip(f.normal())
            .for_each(|(a, n)| *a = *a / on_face.len() as f64 - r * n);
        best = best.max(concave_part(poly, c, &x));
    }

    let blocks = SAMPLED_MARGIN_POINTS.div_ceil(BLOCK);
    let sampled = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream(seed, b as u64);
            let count = BLOCK.min(SAMPLED_MARGIN_POINTS - b * BLOCK);
            let mut local = f64::NEG_INFINITY;
            for _ in 0..count {
                let mut y: Vec<f64> = bx
                    .min()
                    .iter()
                    .zip(bx.max())
                    .map(|(lo, hi)| rng.random_range(*lo..=*hi))
                    .collect();
                if poly.max_violation(&y) <= 0.0 {
                    let u: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                    let len = u.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-300);
                    y.iter_mut()
                        .zip(&u)
                        .for_each(|(a, ui)| *a += (diam + eps) * ui / len);
                }
                let Ok(p) = dykstra::project(&y, poly.faces()) else {
                    continue;
                };
                let dir: Vec<f64> = y.iter().zip(&p).map(|(a, b)| a - b).collect();
                let len = dir.iter().map(|a| a * a).sum::<f64>().sqrt();
                if len <= 0.0 {
                    continue;
                }
                let x: Vec<f64> = p.iter().zip(&dir).map(|(a, di)| a + r * di / len).collect();
                local = local.max(concave_part(poly, c, &x));
            }
            local
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    best.max(sampled)
}
