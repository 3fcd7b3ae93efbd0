use super::eigen::{eigensystem, EigenSystem, CONTINUATION_FRACTION};
use super::{SpinSystem, TransitionPair};
use crate::error::ensure;
use crate::Result;

/// Largest |df/dB| accepted at a reported clock point: 1 Hz/μT.
pub const CLOCK_SLOPE_TOLERANCE: f64 = 1e6;

/// A field where a transition frequency is stationary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockPoint {
    /// Field (T).
    pub field: f64,
    /// Transition frequency at `field` (Hz).
    pub frequency: f64,
    /// df/dB (Hz/T).
    pub d1: f64,
    /// d²f/dB² (Hz/T²).
    pub d2: f64,
    /// Central-difference step used for `d1` (T).
    pub d1_step: f64,
    /// Central-difference step used for `d2` (T).
    pub d2_step: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ClockSearch {
    /// Points in the bracketing scan over the search range.
    pub grid_points: usize,
}

impl Default for ClockSearch {
    fn default() -> Self {
        Self { grid_points: 401 }
    }
}

pub fn find_clock_transition(
    sys: &SpinSystem,
    pair: TransitionPair,
    b_lo: f64,
    b_hi: f64,
) -> Result<Vec<ClockPoint>> {
    find_clock_transition_with(sys, pair, b_lo, b_hi, ClockSearch::default())
}

fn d1_step(field: f64) -> f64 {
    (1e-6 * field.abs()).max(1e-9)
}

fn freq_at(es: &EigenSystem, field: f64, pair: TransitionPair) -> Result<f64> {
    let step = (field - es.field()).abs().max(f64::MIN_POSITIVE);
    es.continue_to(field, step)?.frequency(pair)
}

fn slope(es: &EigenSystem, pair: TransitionPair) -> Result<f64> {
    let b = es.field();
    let h = d1_step(b);
    Ok((freq_at(es, b + h, pair)? - freq_at(es, b - h, pair)?) / (2.0 * h))
}

/// Finds every field in `[b_lo, b_hi]` where d f/dB changes sign, refined by
/// bisection. Points whose slope exceeds [`CLOCK_SLOPE_TOLERANCE`] after
/// refinement (kinks at level crossings) are dropped.
pub fn find_clock_transition_with(
    sys: &SpinSystem,
    pair: TransitionPair,
    b_lo: f64,
    b_hi: f64,
    search: ClockSearch,
) -> Result<Vec<ClockPoint>> {
    ensure!(b_lo.is_finite() && b_hi.is_finite(), "field range must be finite");
    ensure!(b_lo < b_hi, "field range must satisfy b_lo < b_hi");
    ensure!(search.grid_points >= 3, "clock search needs at least 3 grid points");
    ensure!(
        sys.has_label(pair.a) && sys.has_label(pair.b),
        "transition references a level this system does not have"
    );
    let n = search.grid_points;
    let span = b_hi - b_lo;
    let max_step = CONTINUATION_FRACTION * span;

    let mut tracked = Vec::with_capacity(n);
    let mut es = eigensystem(sys, b_lo)?;
    for k in 0..n {
        let b = if k + 1 == n { b_hi } else { b_lo + span * k as f64 / (n - 1) as f64 };
        if k > 0 {
            es = es.continue_to(b, max_step)?;
        }
        let d = slope(&es, pair)?;
        tracked.push((es.clone(), d));
    }

    let mut roots: Vec<EigenSystem> = Vec::new();
    for k in 0..n {
        let (ref es_k, d_k) = tracked[k];
        let at_end = k == 0 || k + 1 == n;
        if d_k == 0.0 || (at_end && d_k.abs() < CLOCK_SLOPE_TOLERANCE) {
            roots.push(es_k.clone());
        }
        if k + 1 < n {
            let d_next = tracked[k + 1].1;
            if d_k * d_next < 0.0 {
                roots.push(bisect(es_k, d_k, tracked[k + 1].0.field(), pair, max_step)?);
            }
        }
    }

    let merge_within = 2.0 * span / (n - 1) as f64;
    let mut points: Vec<ClockPoint> = Vec::new();
    for es in roots {
        let p = characterize(&es, pair)?;
        if p.d1.abs() >= CLOCK_SLOPE_TOLERANCE || is_kink(&es, pair)? {
            continue;
        }
        match points.iter_mut().find(|q| (q.field - p.field).abs() <= merge_within) {
            Some(q) if q.d1.abs() > p.d1.abs() => *q = p,
            Some(_) => {}
            None => points.push(p),
        }
    }
    points.sort_by(|a, b| a.field.total_cmp(&b.field));
    Ok(points)
}

fn bisect(
    left: &EigenSystem,
    d_left: f64,
    right_field: f64,
    pair: TransitionPair,
    max_step: f64,
) -> Result<EigenSystem> {
    let mut lo = left.clone();
    let mut d_lo = d_left;
    let mut hi = right_field;
    for _ in 0..200 {
        let tol = (1e-12 * lo.field().abs()).max(1e-12);
        if hi - lo.field() <= tol {
            break;
        }
        let mid = 0.5 * (lo.field() + hi);
        let es_mid = lo.continue_to(mid, max_step)?;
        let d_mid = slope(&es_mid, pair)?;
        if d_mid == 0.0 {
            return Ok(es_mid);
        }
        if d_mid * d_lo < 0.0 {
            hi = mid;
        } else {
            lo = es_mid;
            d_lo = d_mid;
        }
    }
    Ok(lo)
}

/// One-sided slopes disagree with a smooth extremum (crossing levels give a
/// V-shaped |E_a − E_b| whose central difference vanishes).
fn is_kink(es: &EigenSystem, pair: TransitionPair) -> Result<bool> {
    let b = es.field();
    let h = d1_step(b);
    let f0 = es.frequency(pair)?;
    let forward = (freq_at(es, b + h, pair)? - f0) / h;
    let backward = (f0 - freq_at(es, b - h, pair)?) / h;
    Ok(forward.abs() >= CLOCK_SLOPE_TOLERANCE || backward.abs() >= CLOCK_SLOPE_TOLERANCE)
}

fn characterize(es: &EigenSystem, pair: TransitionPair) -> Result<ClockPoint> {
    let b = es.field();
    let h1 = d1_step(b);
    let scale = es.system().field_scale();
    let h2 = (1e-3 * b.abs().max(scale)).max(h1);
    let f0 = es.frequency(pair)?;
    let fp = freq_at(es, b + h2, pair)?;
    let fm = freq_at(es, b - h2, pair)?;
    Ok(ClockPoint {
        field: b,
        frequency: f0,
        d1: slope(es, pair)?,
        d2: (fp - 2.0 * f0 + fm) / (h2 * h2),
        d1_step: h1,
        d2_step: h2,
    })
}
