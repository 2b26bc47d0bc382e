use crate::error::Result;
use crate::linalg::C64;
use crate::quadrature::{integrate, AdaptiveOptions};

use super::set::TransferSet;

/// Weight of every Langevin second moment in a physical observable.
///
/// The kernels carry √α; a field decaying at rate α along z needs noise of
/// strength 2α to keep [a, a†] fixed, so each ∫|kernel|² enters twice.
pub const LANGEVIN_WEIGHT: f64 = 2.0;

/// Relative tolerance of the kernel integrals.
pub const MOMENT_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LangevinMoment {
    FF,
    GG,
    EE,
    HH,
    FH,
}

/// Raw kernel integrals over [0, L] (no Langevin weight applied).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub ff: f64,
    pub gg: f64,
    pub ee: f64,
    pub hh: f64,
    /// ∫ f*·h dz
    pub fh: C64,
}

impl Moments {
    pub fn get(&self, which: LangevinMoment) -> C64 {
        match which {
            LangevinMoment::FF => C64::new(self.ff, 0.0),
            LangevinMoment::GG => C64::new(self.gg, 0.0),
            LangevinMoment::EE => C64::new(self.ee, 0.0),
            LangevinMoment::HH => C64::new(self.hh, 0.0),
            LangevinMoment::FH => self.fh,
        }
    }
}

fn options(ts: &TransferSet) -> AdaptiveOptions {
    let panels = (ts.oscillation_scale() * ts.length / std::f64::consts::PI).ceil();
    AdaptiveOptions {
        rel_tol: MOMENT_REL_TOL,
        abs_tol: 1e-300,
        max_subdivisions: 50_000,
        initial_panels: (panels as usize).clamp(1, 4096),
        complex_pairs: 1,
    }
}

/// All five kernel integrals in one adaptive pass.
pub fn langevin_moments(ts: &TransferSet) -> Result<Moments> {
    let r = integrate(
        |z| {
            let [e, f, g, h] = ts.kernel(z);
            let fh = f.conj() * h;
            [f.norm_sqr(), g.norm_sqr(), e.norm_sqr(), h.norm_sqr(), fh.re, fh.im]
        },
        0.0,
        ts.length,
        &options(ts),
    )?;
    let v = r.value;
    Ok(Moments {
        ff: v[0],
        gg: v[1],
        ee: v[2],
        hh: v[3],
        fh: C64::new(v[4], v[5]),
    })
}

/// All five kernel integrals, in closed form where that is well conditioned and
/// by adaptive quadrature otherwise.
pub fn fast_moments(ts: &TransferSet) -> Result<Moments> {
    match super::exact::exact_moments(ts) {
        Some(m) => Ok(m),
        None => langevin_moments(ts),
    }
}

/// One kernel integral: ∫|f|², ∫|g|², ∫|e|², ∫|h|² or ∫f*·h over [0, L].
pub fn langevin_moment(ts: &TransferSet, which: LangevinMoment) -> Result<C64> {
    let opts = options(ts);
    let r = integrate(
        |z| {
            let [e, f, g, h] = ts.kernel(z);
            match which {
                LangevinMoment::FF => [f.norm_sqr(), 0.0],
                LangevinMoment::GG => [g.norm_sqr(), 0.0],
                LangevinMoment::EE => [e.norm_sqr(), 0.0],
                LangevinMoment::HH => [h.norm_sqr(), 0.0],
                LangevinMoment::FH => {
                    let p = f.conj() * h;
                    [p.re, p.im]
                }
            }
        },
        0.0,
        ts.length,
        &opts,
    )?;
    Ok(C64::new(r.value[0], r.value[1]))
}

/// Signal and idler commutator sums, both 1 for a consistent noise model:
/// |a|² − |b|² + w∫(|e|² − |f|²) and |d|² − |c|² + w∫(|h|² − |g|²).
pub fn commutator_sums(ts: &TransferSet, m: &Moments) -> (f64, f64) {
    let w = LANGEVIN_WEIGHT;
    (
        ts.a.norm_sqr() - ts.b.norm_sqr() + w * (m.ee - m.ff),
        ts.d.norm_sqr() - ts.c.norm_sqr() + w * (m.hh - m.gg),
    )
}
