use serde::Serialize;

use crate::geometry::AxisBox;
use crate::network::Network;

/// Zero set `a x + b y + c = 0` of a first-layer neuron; `None` when the
/// neuron's weights vanish.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroLine {
    pub layer: usize,
    pub neuron: usize,
    pub line: Option<[f64; 3]>,
}

/// First-layer zero lines of a planar network.
pub fn zero_lines(net: &Network) -> Vec<ZeroLine> {
    let Some(first) = net.layers().first() else {
        return Vec::new();
    };
    if net.input_dim() != 2 || first.is_max_pool() {
        return Vec::new();
    }
    (0..first.weights.rows())
        .map(|i| {
            let w = first.weights.row(i);
            let line = (w[0] != 0.0 || w[1] != 0.0).then(|| [w[0], w[1], first.bias[i]]);
            ZeroLine {
                layer: 0,
                neuron: i,
                line,
            }
        })
        .collect()
}

/// `layer,neuron,a,b,c` rows; degenerate neurons leave the coefficients empty.
pub fn zero_lines_csv(lines: &[ZeroLine]) -> String {
    let mut s = String::from("layer,neuron,a,b,c\n");
    for l in lines {
        match l.line {
            Some([a, b, c]) => s.push_str(&format!("{},{},{a},{b},{c}\n", l.layer, l.neuron)),
            None => s.push_str(&format!("{},{},,,\n", l.layer, l.neuron)),
        }
    }
    s
}

/// Portion of the line `a x + b y + c = 0` inside a planar box.
pub fn clip_line(line: [f64; 3], bx: &AxisBox) -> Option<[[f64; 2]; 2]> {
    let [a, b, c] = line;
    let nn = a * a + b * b;
    if bx.dim() != 2 || !(nn > 0.0) {
        return None;
    }
    let p = [-c * a / nn, -c * b / nn];
    let dir = [-b, a];
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in 0..2 {
        let (mn, mx) = (bx.min()[k], bx.max()[k]);
        if dir[k] == 0.0 {
            if p[k] < mn || p[k] > mx {
                return None;
            }
            continue;
        }
        let (t0, t1) = ((mn - p[k]) / dir[k], (mx - p[k]) / dir[k]);
        lo = lo.max(t0.min(t1));
        hi = hi.min(t0.max(t1));
    }
    (lo <= hi).then(|| {
        let at = |t: f64| [p[0] + t * dir[0], p[1] + t * dir[1]];
        [at(lo), at(hi)]
    })
}

fn point_segment(x: [f64; 2], s: [[f64; 2]; 2]) -> f64 {
    let d = [s[1][0] - s[0][0], s[1][1] - s[0][1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((x[0] - s[0][0]) * d[0] + (x[1] - s[0][1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (x[0] - s[0][0] - t * d[0]).hypot(x[1] - s[0][1] - t * d[1])
}

/// Hausdorff distance between two lines restricted to a planar box; infinite
/// when either line misses the box.
pub fn line_hausdorff(l1: [f64; 3], l2: [f64; 3], bx: &AxisBox) -> f64 {
    match (clip_line(l1, bx), clip_line(l2, bx)) {
        (Some(s1), Some(s2)) => s1
            .iter()
            .map(|&x| point_segment(x, s2))
            .chain(s2.iter().map(|&x| point_segment(x, s1)))
            .fold(0.0, f64::max),
        _ => f64::INFINITY,
    }
}
