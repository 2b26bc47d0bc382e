//! Adaptive Gauss–Legendre quadrature for fixed-size vector integrands.
//!
//! Each panel is integrated with an n-point rule on the whole panel and on
//! its two halves; the difference is the error estimate. The panel with the
//! worst normalised error is bisected until every component meets
//! `max(rel_tol · ∫|f_k|, abs_tol)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{PdcError, Result};
use crate::linalg::pairwise_sum;

/// Nodes and weights of an n-point Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n from the Chebyshev guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub const RULE_ORDER: usize = 12;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(RULE_ORDER))
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub initial_panels: usize,
    /// Number of trailing (re, im) component pairs that share one tolerance
    /// scale, so a vanishing imaginary part is judged against the modulus.
    pub complex_pairs: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_subdivisions: 20_000,
            initial_panels: 1,
            complex_pairs: 0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    /// ∫|f_k| estimates, the scale used for the relative tolerance.
    pub magnitude: [f64; N],
    pub panels: usize,
}

#[derive(Clone, Copy)]
struct RuleResult<const N: usize> {
    value: [f64; N],
    magnitude: [f64; N],
}

fn apply_rule<const N: usize, F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64) -> RuleResult<N> {
    let gl = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut value = [0.0; N];
    let mut magnitude = [0.0; N];
    for (x, w) in gl.nodes.iter().zip(&gl.weights) {
        let fx = f(mid + half * x);
        for k in 0..N {
            value[k] += w * fx[k];
            magnitude[k] += w * fx[k].abs();
        }
    }
    for k in 0..N {
        value[k] *= half;
        magnitude[k] *= half;
    }
    RuleResult { value, magnitude }
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    left: RuleResult<N>,
    right: RuleResult<N>,
    error: [f64; N],
    priority: f64,
}

impl<const N: usize> Panel<N> {
    fn build<F: Fn(f64) -> [f64; N]>(f: &F, a: f64, b: f64, whole: RuleResult<N>) -> Self {
        let m = 0.5 * (a + b);
        let left = apply_rule(f, a, m);
        let right = apply_rule(f, m, b);
        let mut error = [0.0; N];
        for k in 0..N {
            error[k] = (left.value[k] + right.value[k] - whole.value[k]).abs();
        }
        Panel {
            a,
            b,
            left,
            right,
            error,
            priority: 0.0,
        }
    }

    fn value(&self, k: usize) -> f64 {
        self.left.value[k] + self.right.value[k]
    }

    fn magnitude(&self, k: usize) -> f64 {
        self.left.magnitude[k] + self.right.magnitude[k]
    }
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Integrate the vector function `f` over [a, b].
pub fn integrate<const N: usize, F>(f: F, a: f64, b: f64, opts: &AdaptiveOptions) -> Result<Integral<N>>
where
    F: Fn(f64) -> [f64; N],
{
    if a == b {
        return Ok(Integral {
            value: [0.0; N],
            error: [0.0; N],
            magnitude: [0.0; N],
            panels: 0,
        });
    }
    let n0 = opts.initial_panels.max(1);
    let mut panels: Vec<Panel<N>> = (0..n0)
        .map(|j| {
            let pa = a + (b - a) * j as f64 / n0 as f64;
            let pb = if j + 1 == n0 { b } else { a + (b - a) * (j + 1) as f64 / n0 as f64 };
            let whole = apply_rule(&f, pa, pb);
            Panel::build(&f, pa, pb, whole)
        })
        .collect();

    let totals = |panels: &[Panel<N>]| {
        let mut err = [0.0; N];
        let mut mag = [0.0; N];
        for p in panels {
            for k in 0..N {
                err[k] += p.error[k];
                mag[k] += p.magnitude(k);
            }
        }
        (err, mag)
    };
    let first_pair = N - 2 * opts.complex_pairs.min(N / 2);
    let shared = |mag: &[f64; N]| {
        let mut m = *mag;
        for k in (first_pair..N).step_by(2) {
            let s = mag[k] + mag[k + 1];
            m[k] = s;
            m[k + 1] = s;
        }
        m
    };
    let normalised = |err: &[f64; N], mag: &[f64; N]| -> f64 {
        let mag = shared(mag);
        (0..N)
            .map(|k| err[k] / (opts.rel_tol * mag[k]).max(opts.abs_tol))
            .fold(0.0, f64::max)
    };

    let (mut err, mut mag) = totals(&panels);
    if normalised(&err, &mag) > 1.0 {
        let mut heap = BinaryHeap::new();
        let scale = |mag: &[f64; N]| {
            let mag = shared(mag);
            let mut s = [0.0; N];
            for k in 0..N {
                s[k] = 1.0 / (opts.rel_tol * mag[k]).max(opts.abs_tol);
            }
            s
        };
        let s = scale(&mag);
        for mut p in panels.drain(..) {
            p.priority = (0..N).map(|k| p.error[k] * s[k]).fold(0.0, f64::max);
            heap.push(p);
        }
        let mut count = heap.len();
        loop {
            let worst = heap.pop().expect("heap never empty");
            for k in 0..N {
                err[k] -= worst.error[k];
                mag[k] -= worst.magnitude(k);
            }
            let m = 0.5 * (worst.a + worst.b);
            let children = [
                Panel::build(&f, worst.a, m, worst.left),
                Panel::build(&f, m, worst.b, worst.right),
            ];
            for c in &children {
                for k in 0..N {
                    err[k] += c.error[k];
                    mag[k] += c.magnitude(k);
                }
            }
            let s = scale(&mag);
            for mut c in children {
                c.priority = (0..N).map(|k| c.error[k] * s[k]).fold(0.0, f64::max);
                heap.push(c);
            }
            count += 1;
            // running sums drift; recompute exactly before deciding
            if normalised(&err, &mag) <= 1.0 || count >= opts.max_subdivisions {
                panels = heap.into_vec();
                let (e, m) = totals(&panels);
                err = e;
                mag = m;
                if normalised(&err, &mag) <= 1.0 {
                    break;
                }
                if count >= opts.max_subdivisions {
                    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
                    let est = pairwise_sum(&panels.iter().map(|p| p.value(0)).collect::<Vec<_>>());
                    return Err(PdcError::Accuracy {
                        subdivisions: count,
                        estimate: est,
                        error: err.iter().cloned().fold(0.0, f64::max),
                    });
                }
                heap = panels.drain(..).collect();
            }
        }
    }
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = [0.0; N];
    let mut buf = Vec::with_capacity(panels.len());
    for k in 0..N {
        buf.clear();
        buf.extend(panels.iter().map(|p| p.value(k)));
        value[k] = pairwise_sum(&buf);
    }
    Ok(Integral {
        value,
        error: err,
        magnitude: mag,
        panels: panels.len(),
    })
}

/// Scalar convenience wrapper.
pub fn integrate_scalar<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &AdaptiveOptions) -> Result<f64> {
    integrate(|x| [f(x)], a, b, opts).map(|r| r.value[0])
}
