//! Quadrature building blocks: Gauss-Legendre rules, geometrically graded
//! panels for power-law singularities, log-spaced time meshes and a
//! deterministic pairwise summation used for every ordered reduction.

use std::f64::consts::PI;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes from Newton iteration on the Legendre recurrence.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..(order + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self.on(a, b).map(|(x, w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Pairwise summation with a fixed split pattern, so the result depends only
/// on the order of the inputs.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Geometric panel breakpoints `a, a q, a q^2, ..., b` with `shells` panels.
pub fn geometric_breaks(a: f64, b: f64, shells: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && shells >= 1);
    let ratio = (b / a).ln() / shells as f64;
    let mut out: Vec<f64> = (0..=shells).map(|k| a * (ratio * k as f64).exp()).collect();
    out[shells] = b;
    out
}

/// Splits every panel wider than `max_width` into equal sub-panels.
pub fn cap_panel_width(breaks: &[f64], max_width: f64) -> Vec<f64> {
    let mut out = vec![breaks[0]];
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = ((b - a) / max_width).ceil().max(1.0) as usize;
        for k in 1..=pieces {
            out.push(a + (b - a) * k as f64 / pieces as f64);
        }
    }
    out
}

/// Composite Gauss-Legendre over consecutive panels.
pub fn composite(gl: &GaussLegendre, breaks: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let terms: Vec<f64> = breaks
        .windows(2)
        .map(|w| gl.integrate(w[0], w[1], &f))
        .collect();
    pairwise_sum(&terms)
}

/// Integral over `(0, b]` of a function behaving like a power of `r` near the
/// origin: graded panels from `floor` to `b`, plus the analytic contribution
/// of `[0, floor]` assuming `f(r) ~ f(floor) (r/floor)^exponent` there.
pub fn graded_from_zero(
    gl: &GaussLegendre,
    floor: f64,
    b: f64,
    shells: usize,
    exponent: f64,
    f: impl Fn(f64) -> f64,
) -> f64 {
    if b <= floor {
        return gl.integrate(0.0, b, f);
    }
    let breaks = geometric_breaks(floor, b, shells);
    let body = composite(gl, &breaks, &f);
    let sliver = if exponent > -1.0 {
        f(floor) * floor / (exponent + 1.0)
    } else {
        f64::INFINITY
    };
    body + sliver
}

/// Log-spaced time mesh with trapezoid weights in `log t` and the
/// `[0, t_first]` sliver folded into the first weight.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMesh {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl TimeMesh {
    pub fn geometric(t_first: f64, t_last: f64, count: usize) -> Self {
        assert!(t_first > 0.0 && t_last > t_first && count >= 2);
        let step = (t_last / t_first).ln() / (count - 1) as f64;
        let nodes: Vec<f64> = (0..count)
            .map(|j| {
                if j == count - 1 {
                    t_last
                } else {
                    t_first * (step * j as f64).exp()
                }
            })
            .collect();
        let mut weights: Vec<f64> = nodes.iter().map(|t| t * step).collect();
        weights[0] *= 0.5;
        weights[count - 1] *= 0.5;
        weights[0] += t_first;
        TimeMesh { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
