//! Langevin moments by exact integration of exponential sums.
//!
//! Writing e^{−Ms} = Q₋e^{−λ₋s} + Q₊e^{−λ₊s} with λ± = μ ± δ makes every
//! kernel a sum of two exponentials in s = L − z, so each moment is a sum of
//! four integrals ∫₀ᴸ e^{rs}ds. The adaptive path needs panels in proportion
//! to |Δk|L; this one costs the same at every detuning.

use crate::linalg::{Mat2, C64};
use crate::types::Geometry;

use super::moments::Moments;
use super::set::TransferSet;

/// Below this |δ|L the two exponentials nearly cancel; use quadrature instead.
pub const EXACT_MIN_SPLITTING: f64 = 1.0;

/// Largest growing exponent accepted before deferring to quadrature.
const MAX_EXPONENT: f64 = 600.0;

/// coef · exp(shift + rate·s)
#[derive(Debug, Clone, Copy)]
struct Term {
    coef: C64,
    shift: f64,
    rate: C64,
}

type Kernel = [Term; 2];

/// (e^y − 1)/y
fn phi1(y: C64) -> C64 {
    if y.norm() < 1e-3 {
        let mut acc = C64::new(1.0, 0.0);
        let mut t = C64::new(1.0, 0.0);
        for k in 2..=7 {
            t = t * y / k as f64;
            acc += t;
        }
        acc
    } else {
        (y.exp() - 1.0) / y
    }
}

/// ∫₀ᴸ a*(s)·b(s) ds for single terms.
fn product_integral(a: &Term, b: &Term, length: f64) -> C64 {
    let coef = a.coef.conj() * b.coef;
    if coef == C64::new(0.0, 0.0) {
        return coef;
    }
    let rate = a.rate.conj() + b.rate;
    let shift = a.shift + b.shift;
    let x = rate * length;
    if shift.max(shift + x.re) > MAX_EXPONENT {
        return C64::new(f64::NAN, f64::NAN);
    }
    if x.re > 0.0 {
        coef * length * C64::new(shift + x.re, x.im).exp() * phi1(-x)
    } else {
        coef * length * shift.exp() * phi1(x)
    }
}

fn overlap(a: &Kernel, b: &Kernel, length: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for ta in a {
        for tb in b {
            acc += product_integral(ta, tb, length);
        }
    }
    acc
}

/// Projector coefficients [Q₋, Q₊] and eigenvalues [λ₋, λ₊] of M.
fn spectral(m: &Mat2) -> ([Mat2; 2], [C64; 2], C64) {
    let mu = m.trace() * 0.5;
    let a = m.get(0, 0) - mu;
    let prod = m.get(0, 1) * m.get(1, 0);
    let delta = (a * a + prod).sqrt();
    // p = δ + a and q = δ − a with pq = m01·m10, the smaller one from the product
    let (p, q) = {
        let (p, q) = (delta + a, delta - a);
        if p.norm() >= q.norm() {
            (p, if p.norm() > 0.0 { prod / p } else { q })
        } else {
            (prod / q, q)
        }
    };
    let h = (delta * 2.0).inv();
    let minus = Mat2::new(q * h, -m.get(0, 1) * h, -m.get(1, 0) * h, p * h);
    let plus = Mat2::new(p * h, m.get(0, 1) * h, m.get(1, 0) * h, q * h);
    ([minus, plus], [mu - delta, mu + delta], delta)
}

/// Kernel `i, j` entry of e^{−Ms} scaled by `scale`, in s.
fn propagator_kernel(q: &[Mat2; 2], lam: &[C64; 2], i: usize, j: usize, scale: C64) -> Kernel {
    [0, 1].map(|k| Term {
        coef: q[k].get(i, j) * scale,
        shift: 0.0,
        rate: -lam[k],
    })
}

/// Exact moments, or `None` where the two-exponential form is ill-conditioned.
pub(crate) fn exact_moments(ts: &TransferSet) -> Option<Moments> {
    let m = ts.coupling();
    let l = ts.length;
    let (q, lam, delta) = spectral(m);
    if !(delta.norm() * l >= EXACT_MIN_SPLITTING) {
        return None;
    }
    let (sa, si) = ts.sqrt_losses();
    let one = C64::new(1.0, 0.0);
    let (e, f, g, h) = match ts.geometry {
        Geometry::Forward => (
            propagator_kernel(&q, &lam, 0, 0, one * sa),
            propagator_kernel(&q, &lam, 0, 1, one * si),
            propagator_kernel(&q, &lam, 1, 0, one * sa),
            propagator_kernel(&q, &lam, 1, 1, one * si),
        ),
        Geometry::Backward => {
            let d1 = ts.d1();
            if !(d1.norm() > 0.0 && d1.norm().is_finite()) {
                return None;
            }
            let inv = d1.inv();
            let mu2 = m.trace();
            // e = √α_s P₁₁(L−s)e^{−2μs}/D₁, f = −√α_i P₀₁(L−s)e^{−2μs}/D₁
            let reversed = |i: usize, j: usize, scale: f64| -> Kernel {
                [0, 1].map(|k| {
                    let x = -lam[k] * l;
                    let c = q[k].get(i, j) * scale * C64::from_polar(1.0, x.im) * (d1 / d1.norm()).conj();
                    Term {
                        coef: c,
                        shift: x.re - d1.norm().ln(),
                        rate: lam[k] - mu2,
                    }
                })
            };
            (
                reversed(1, 1, sa),
                reversed(0, 1, -si),
                propagator_kernel(&q, &lam, 1, 0, -inv * sa),
                propagator_kernel(&q, &lam, 1, 1, -inv * si),
            )
        }
    };
    let moments = Moments {
        ff: overlap(&f, &f, l).re,
        gg: overlap(&g, &g, l).re,
        ee: overlap(&e, &e, l).re,
        hh: overlap(&h, &h, l).re,
        fh: overlap(&f, &h, l),
    };
    let finite = [moments.ff, moments.gg, moments.ee, moments.hh, moments.fh.re, moments.fh.im]
        .iter()
        .all(|x| x.is_finite());
    finite.then_some(moments)
}
