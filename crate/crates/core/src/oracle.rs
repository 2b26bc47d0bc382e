//! Brute-force references for auditing the fast path.
//!
//! Nothing here shares numerical code with the transfer or quadrature modules
//! beyond complex arithmetic: the ODE oracle is fixed-step RK4, the matrix
//! exponential is a plain power series, and quadrature is composite Simpson.

use serde::Serialize;

use crate::error::{PdcError, Result};
use crate::linalg::{Mat2, C64};
use crate::transfer::CouplingMatrix;
use crate::types::{Geometry, InteractionSpec};

/// Denominator floor of relative deviations.
pub const RELATIVE_FLOOR: f64 = 1e-30;

/// Series terms used when the caller does not choose.
pub const DEFAULT_SERIES_TERMS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleCost {
    Steps(usize),
    Panels(usize),
    Terms(usize),
}

/// One fast-versus-oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub quantity: String,
    /// Flattened (re, im) components.
    pub fast: Vec<f64>,
    pub oracle: Vec<f64>,
    pub abs_deviation: f64,
    pub rel_deviation: f64,
    pub cost: OracleCost,
}

impl OracleReport {
    /// Deviation is the Euclidean norm of the component difference.
    pub fn new(quantity: impl Into<String>, fast: Vec<f64>, oracle: Vec<f64>, cost: OracleCost) -> Self {
        let abs: f64 = fast
            .iter()
            .zip(&oracle)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let scale = oracle.iter().map(|x| x * x).sum::<f64>().sqrt();
        OracleReport {
            quantity: quantity.into(),
            fast,
            oracle,
            abs_deviation: abs,
            rel_deviation: abs / scale.max(RELATIVE_FLOOR),
            cost,
        }
    }

    pub fn for_matrix(quantity: impl Into<String>, fast: &Mat2, oracle: &Mat2, cost: OracleCost) -> Self {
        Self::new(quantity, flatten(fast), flatten(oracle), cost)
    }

    pub fn for_complex(quantity: impl Into<String>, fast: C64, oracle: C64, cost: OracleCost) -> Self {
        Self::new(quantity, vec![fast.re, fast.im], vec![oracle.re, oracle.im], cost)
    }
}

fn flatten(m: &Mat2) -> Vec<f64> {
    m.0.iter().flatten().flat_map(|z| [z.re, z.im]).collect()
}

type Raw = [[C64; 2]; 2];

fn raw_mul(a: &Raw, b: &Raw) -> Raw {
    let mut r = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

fn raw_axpy(p: &Raw, k: &Raw, h: f64) -> Raw {
    let mut r = *p;
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] += k[i][j] * h;
        }
    }
    r
}

/// Fixed-step RK4 for dP/dz = −M P, P(0) = I, integrated to `length`.
pub fn ode_propagator(m: &CouplingMatrix, length: f64, steps: usize) -> Result<Mat2> {
    ode_propagator_raw(&m.m, length, steps)
}

pub fn ode_propagator_raw(m: &Mat2, length: f64, steps: usize) -> Result<Mat2> {
    if steps < 10 {
        return Err(PdcError::Config(format!("ODE oracle needs at least 10 steps, got {steps}")));
    }
    let neg: Raw = {
        let mut r = m.0;
        for row in r.iter_mut() {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
        r
    };
    let h = length / steps as f64;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut p: Raw = [[one, zero], [zero, one]];
    for _ in 0..steps {
        let k1 = raw_mul(&neg, &p);
        let k2 = raw_mul(&neg, &raw_axpy(&p, &k1, h / 2.0));
        let k3 = raw_mul(&neg, &raw_axpy(&p, &k2, h / 2.0));
        let k4 = raw_mul(&neg, &raw_axpy(&p, &k3, h));
        for i in 0..2 {
            for j in 0..2 {
                p[i][j] += (k1[i][j] + (k2[i][j] + k3[i][j]) * 2.0 + k4[i][j]) * (h / 6.0);
            }
        }
    }
    Ok(Mat2(p))
}

#[derive(Clone, Copy)]
struct Kahan {
    sum: C64,
    carry: C64,
}

impl Kahan {
    fn add(&mut self, x: C64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Σ (−M·length)ⁿ/n! for n < `terms` + 1, summed with compensation.
///
/// When ‖M·length‖ exceeds 1 the series is evaluated at length/2^s and squared
/// s times, which keeps every term smaller than the previous one.
pub fn series_expm(m: &Mat2, length: f64, terms: usize) -> Result<Mat2> {
    if terms < 1 {
        return Err(PdcError::Config("series oracle needs at least one term".into()));
    }
    if !m.is_finite() || !length.is_finite() {
        return Err(PdcError::InvalidMatrix("non-finite input to series oracle".into()));
    }
    let norm = m.norm() * length.abs();
    let squarings = if norm > 1.0 { norm.log2().ceil() as u32 } else { 0 };
    let h = length / 2f64.powi(squarings as i32);
    let mut a: Raw = m.0;
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            *x *= -h;
        }
    }
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut acc = [[Kahan { sum: zero, carry: zero }; 2]; 2];
    let mut term: Raw = [[one, zero], [zero, one]];
    for n in 0..=terms {
        if n > 0 {
            term = raw_mul(&term, &a);
            for row in term.iter_mut() {
                for x in row.iter_mut() {
                    *x /= n as f64;
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                acc[i][j].add(term[i][j]);
            }
        }
    }
    let mut r: Raw = [[zero; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = acc[i][j].sum;
        }
    }
    for _ in 0..squarings {
        r = raw_mul(&r, &r);
    }
    let out = Mat2(r);
    if !out.is_finite() {
        return Err(PdcError::InvalidMatrix("series oracle overflowed".into()));
    }
    Ok(out)
}

/// Composite Simpson rule over [0, length] with an even number of panels.
pub fn dense_quadrature<F: Fn(f64) -> C64>(f: F, length: f64, panels: usize) -> Result<C64> {
    if panels < 2 || panels % 2 != 0 {
        return Err(PdcError::Config(format!("Simpson oracle needs an even panel count >= 2, got {panels}")));
    }
    let h = length / panels as f64;
    let mut acc = Kahan {
        sum: f(0.0) + f(length),
        carry: C64::new(0.0, 0.0),
    };
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(f(h * k as f64) * w);
    }
    Ok(acc.sum * (h / 3.0))
}

/// Langevin kernels (e, f, g, h) rebuilt from series exponentials.
pub struct OracleKernel {
    m: Mat2,
    geometry: Geometry,
    length: f64,
    sqrt_alpha_s: f64,
    sqrt_alpha_i: f64,
    d1: C64,
    b1: C64,
    terms: usize,
}

impl OracleKernel {
    pub fn new(cm: &CouplingMatrix, spec: &InteractionSpec, terms: usize) -> Result<Self> {
        let full = series_expm(&cm.m, spec.length, terms)?;
        Ok(OracleKernel {
            m: cm.m,
            geometry: cm.geometry,
            length: spec.length,
            sqrt_alpha_s: spec.alpha_s.sqrt(),
            sqrt_alpha_i: spec.alpha_i.sqrt(),
            d1: full.get(1, 1),
            b1: full.get(0, 1),
            terms,
        })
    }

    /// Transfer coefficients (a, b, c, d) from the boundary conditions.
    pub fn coefficients(&self) -> Result<[C64; 4]> {
        let p = series_expm(&self.m, self.length, self.terms)?;
        let (a1, b1, c1, d1) = (p.get(0, 0), p.get(0, 1), p.get(1, 0), p.get(1, 1));
        Ok(match self.geometry {
            Geometry::Forward => [a1, b1, c1, d1],
            Geometry::Backward => [a1 - b1 * c1 / d1, b1 / d1, -c1 / d1, C64::new(1.0, 0.0) / d1],
        })
    }

    pub fn eval(&self, z: f64) -> [C64; 4] {
        let p = series_expm(&self.m, self.length - z, self.terms).unwrap_or_else(|_| Mat2::zero());
        let e1 = p.get(0, 0) * self.sqrt_alpha_s;
        let f1 = p.get(0, 1) * self.sqrt_alpha_i;
        let g1 = p.get(1, 0) * self.sqrt_alpha_s;
        let h1 = p.get(1, 1) * self.sqrt_alpha_i;
        match self.geometry {
            Geometry::Forward => [e1, f1, g1, h1],
            Geometry::Backward => [
                (e1 * self.d1 - self.b1 * g1) / self.d1,
                (f1 * self.d1 - self.b1 * h1) / self.d1,
                -g1 / self.d1,
                -h1 / self.d1,
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::{expm_neg, expm_neg_degenerate};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cm(m: Mat2) -> CouplingMatrix {
        CouplingMatrix {
            m,
            omega: 0.0,
            geometry: Geometry::Forward,
        }
    }

    #[test]
    fn ode_matches_diagonal_exponentials() {
        let m = Mat2::diag(c(40.0, 300.0), c(120.0, -300.0));
        let p = ode_propagator(&cm(m), 0.01, 10_000).unwrap();
        let exact = Mat2::diag((c(40.0, 300.0) * -0.01).exp(), (c(120.0, -300.0) * -0.01).exp());
        assert!((p - exact).max_abs() < 1e-10);
    }

    #[test]
    fn ode_is_fourth_order() {
        let m = Mat2::new(c(300.0, 800.0), c(0.0, -500.0), c(0.0, 500.0), c(100.0, -800.0));
        let exact = expm_neg(&m, 0.01).unwrap();
        let e1 = (ode_propagator(&cm(m), 0.01, 50).unwrap() - exact).norm();
        let e2 = (ode_propagator(&cm(m), 0.01, 100).unwrap() - exact).norm();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 1.5, "{ratio}");
    }

    #[test]
    fn ode_rejects_few_steps() {
        assert!(ode_propagator(&cm(Mat2::zero()), 1.0, 9).is_err());
    }

    #[test]
    fn first_order_series() {
        let m = Mat2::new(c(0.1, 0.2), c(0.0, -0.3), c(0.05, 0.0), c(0.2, -0.1));
        let s = series_expm(&m, 0.5, 1).unwrap();
        let expect = Mat2::identity() - m * 0.5;
        assert!((s - expect).max_abs() < 1e-16);
    }

    #[test]
    fn series_matches_degenerate_branch() {
        // equal diagonals and a single off-diagonal entry: a Jordan block
        let lam = c(30.0, 10.0);
        let m = Mat2::new(lam, c(0.0, -700.0), c(0.0, 0.0), lam);
        let s = series_expm(&m, 0.01, DEFAULT_SERIES_TERMS).unwrap();
        let d = expm_neg_degenerate(&m, 0.01);
        assert!(s.rel_dist(&d, 1e-300) < 1e-12, "{}", s.rel_dist(&d, 1e-300));
    }

    #[test]
    fn nilpotent_pathology_is_finite_and_matches_ode() {
        // phase mismatch exactly cancelling the coupling: M − μI is nilpotent
        let m = Mat2::new(c(100.0, 300.0), c(0.0, -300.0), c(0.0, 300.0), c(100.0, -300.0));
        let s = series_expm(&m, 0.01, DEFAULT_SERIES_TERMS).unwrap();
        let o = ode_propagator(&cm(m), 0.01, 10_000).unwrap();
        assert!(s.is_finite());
        assert!(s.rel_dist(&o, 1e-300) < 1e-8);
    }

    #[test]
    fn simpson_on_constants_and_exponentials() {
        let l = 0.37;
        assert_eq!(dense_quadrature(|_| c(1.0, 0.0), l, 2).unwrap(), c(l, 0.0));
        let a = 50.0;
        let l = 0.01;
        let v = dense_quadrature(|z| c(a * (-2.0 * a * (l - z)).exp(), 0.0), l, 10_000).unwrap();
        let exact = (1.0 - (-2.0 * a * l).exp()) / 2.0;
        assert!((v.re - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn simpson_rejects_odd_panels() {
        assert!(dense_quadrature(|_| c(1.0, 0.0), 1.0, 3).is_err());
    }

    #[test]
    fn report_uses_floor() {
        let r = OracleReport::for_complex("zero", c(1e-40, 0.0), c(0.0, 0.0), OracleCost::Terms(1));
        assert_eq!(r.abs_deviation, 1e-40);
        assert!((r.rel_deviation / 1e-10 - 1.0).abs() < 1e-12);
    }
}
