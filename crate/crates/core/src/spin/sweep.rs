use std::io::{self, Write};

use super::eigen::{eigensystem, CONTINUATION_FRACTION};
use super::{SpinSystem, TransitionPair};
use crate::error::ensure;
use crate::Result;

/// Frequencies (Hz) of the requested transitions at `field`.
pub fn transition_frequencies(
    sys: &SpinSystem,
    field: f64,
    pairs: &[TransitionPair],
) -> Result<Vec<(TransitionPair, f64)>> {
    for p in pairs {
        ensure!(
            sys.has_label(p.a) && sys.has_label(p.b),
            "transition references a level this system does not have"
        );
    }
    let es = eigensystem(sys, field)?;
    pairs.iter().map(|&p| Ok((p, es.frequency(p)?))).collect()
}

/// Transition frequencies on a uniform field grid.
#[derive(Debug, Clone)]
pub struct BreitRabiTable {
    pub system: SpinSystem,
    pub pairs: Vec<TransitionPair>,
    pub fields: Vec<f64>,
    /// `frequencies[row][pair]` in Hz.
    pub frequencies: Vec<Vec<f64>>,
}

impl BreitRabiTable {
    pub fn pair_names(&self) -> Vec<String> {
        self.pairs.iter().map(|p| self.system.pair_name(*p)).collect()
    }

    pub fn column(&self, pair: usize) -> Vec<f64> {
        self.frequencies.iter().map(|row| row[pair]).collect()
    }

    /// Header `B_T,<pair>_Hz,...`; values in shortest round-trip scientific notation.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "B_T")?;
        for name in self.pair_names() {
            write!(w, ",{name}_Hz")?;
        }
        writeln!(w)?;
        for (b, row) in self.fields.iter().zip(&self.frequencies) {
            write!(w, "{b:e}")?;
            for f in row {
                write!(w, ",{f:e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Sweeps `n_points` fields from `b_min` to `b_max` inclusive. Labels are
/// continued from zero field and then along the grid in steps of at most 1%
/// of the span.
pub fn field_sweep(
    sys: &SpinSystem,
    b_min: f64,
    b_max: f64,
    n_points: usize,
    pairs: &[TransitionPair],
) -> Result<BreitRabiTable> {
    ensure!(
        b_min.is_finite() && b_max.is_finite(),
        "sweep limits must be finite"
    );
    ensure!(b_min < b_max, "sweep needs b_min < b_max, got {b_min} >= {b_max}");
    ensure!(n_points >= 2, "sweep needs at least 2 points, got {n_points}");
    for p in pairs {
        ensure!(
            sys.has_label(p.a) && sys.has_label(p.b),
            "transition references a level this system does not have"
        );
    }
    let span = b_max - b_min;
    let max_step = CONTINUATION_FRACTION * span;
    let mut es = eigensystem(sys, b_min)?;
    let mut fields = Vec::with_capacity(n_points);
    let mut frequencies = Vec::with_capacity(n_points);
    for k in 0..n_points {
        let b = if k + 1 == n_points {
            b_max
        } else {
            b_min + span * k as f64 / (n_points - 1) as f64
        };
        if k > 0 {
            es = es.continue_to(b, max_step)?;
        }
        let row = pairs
            .iter()
            .map(|&p| es.frequency(p))
            .collect::<Result<Vec<_>>>()?;
        fields.push(b);
        frequencies.push(row);
    }
    Ok(BreitRabiTable {
        system: *sys,
        pairs: pairs.to_vec(),
        fields,
        frequencies,
    })
}
