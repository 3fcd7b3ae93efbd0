use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use crate::error::ensure;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bloch {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Bloch {
    pub const UP: Bloch = Bloch { x: 0.0, y: 0.0, z: 1.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Right-handed rotation by `angle` about the unit vector `axis`.
    pub fn rotate(self, axis: [f64; 3], angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let [nx, ny, nz] = axis;
        let dot = nx * self.x + ny * self.y + nz * self.z;
        let cross = [
            ny * self.z - nz * self.y,
            nz * self.x - nx * self.z,
            nx * self.y - ny * self.x,
        ];
        Self {
            x: self.x * c + cross[0] * s + nx * dot * (1.0 - c),
            y: self.y * c + cross[1] * s + ny * dot * (1.0 - c),
            z: self.z * c + cross[2] * s + nz * dot * (1.0 - c),
        }
    }

    /// Precession about +z.
    pub fn precess(self, phase: f64) -> Self {
        let (s, c) = phase.sin_cos();
        Self {
            x: self.x * c - self.y * s,
            y: self.x * s + self.y * c,
            z: self.z,
        }
    }
}

impl Add for Bloch {
    type Output = Bloch;
    fn add(self, o: Bloch) -> Bloch {
        Bloch::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Bloch {
    type Output = Bloch;
    fn sub(self, o: Bloch) -> Bloch {
        Bloch::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Bloch {
    type Output = Bloch;
    fn mul(self, k: f64) -> Bloch {
        Bloch::new(self.x * k, self.y * k, self.z * k)
    }
}

/// A rotation about the in-plane axis at `phase` (0 = +x, π/2 = +y).
/// Zero `duration` is an instantaneous ideal rotation; otherwise the driven
/// Hamiltonian is integrated with the Rabi rate `angle / duration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub phase: f64,
    pub angle: f64,
    pub duration: f64,
}

impl Pulse {
    pub fn ideal(phase: f64, angle: f64) -> Self {
        Self { phase, angle, duration: 0.0 }
    }

    pub fn axis(&self) -> [f64; 3] {
        [self.phase.cos(), self.phase.sin(), 0.0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceItem {
    Pulse(Pulse),
    Delay(f64),
    /// Readout point; later items are ignored.
    Acquire,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    items: Vec<SequenceItem>,
    frame_detuning_hz: f64,
}

impl PulseSequence {
    pub fn new(items: Vec<SequenceItem>) -> Result<Self> {
        ensure!(!items.is_empty(), "pulse sequence is empty");
        let mut acquisitions = 0;
        for item in &items {
            match *item {
                SequenceItem::Pulse(p) => {
                    ensure!(
                        p.phase.is_finite() && p.angle.is_finite(),
                        "pulse phase and angle must be finite"
                    );
                    ensure!(
                        p.duration >= 0.0 && p.duration.is_finite(),
                        "pulse duration must be finite and non-negative, got {}",
                        p.duration
                    );
                }
                SequenceItem::Delay(t) => ensure!(
                    t >= 0.0 && t.is_finite(),
                    "delay must be finite and non-negative, got {t}"
                ),
                SequenceItem::Acquire => acquisitions += 1,
            }
        }
        ensure!(acquisitions <= 1, "sequence has {acquisitions} acquisition markers");
        Ok(Self { items, frame_detuning_hz: 0.0 })
    }

    /// Offset of the drive from the qubit frequency (Hz), added to every
    /// trajectory's detuning.
    pub fn with_frame_detuning(mut self, hz: f64) -> Self {
        self.frame_detuning_hz = hz;
        self
    }

    pub fn items(&self) -> &[SequenceItem] {
        &self.items
    }

    pub fn frame_detuning_hz(&self) -> f64 {
        self.frame_detuning_hz
    }

    /// Single drive pulse about +x of the given length and rotation angle.
    pub fn rabi(angle: f64, duration: f64) -> Result<Self> {
        Self::new(vec![
            SequenceItem::Pulse(Pulse { phase: 0.0, angle, duration }),
            SequenceItem::Acquire,
        ])
    }

    /// π/2(+x) – τ – π/2(−x).
    pub fn ramsey(tau: f64, detuning_hz: f64) -> Result<Self> {
        Ok(Self::new(vec![
            SequenceItem::Pulse(Pulse::ideal(0.0, PI / 2.0)),
            SequenceItem::Delay(tau),
            SequenceItem::Pulse(Pulse::ideal(PI, PI / 2.0)),
            SequenceItem::Acquire,
        ])?
        .with_frame_detuning(detuning_hz))
    }

    /// π/2(lead) – τ – θ(+x) – τ – π/2(+x). With `lead_phase` = 0 and θ = π
    /// the refocused signal is +1.
    pub fn echo(tau: f64, refocus_angle: f64, lead_phase: f64) -> Result<Self> {
        Self::new(vec![
            SequenceItem::Pulse(Pulse::ideal(lead_phase, PI / 2.0)),
            SequenceItem::Delay(tau),
            SequenceItem::Pulse(Pulse::ideal(0.0, refocus_angle)),
            SequenceItem::Delay(tau),
            SequenceItem::Pulse(Pulse::ideal(0.0, PI / 2.0)),
            SequenceItem::Acquire,
        ])
    }

    /// π/2 – [τ – π(±x) – τ]ᴺ – π/2 with refocusing phases alternating
    /// +x, −x. The closing pulse phase makes the refocused signal +1.
    pub fn cpmg(n_pulses: usize, tau: f64) -> Result<Self> {
        ensure!(n_pulses >= 1, "CPMG needs at least one refocusing pulse");
        let mut items = vec![SequenceItem::Pulse(Pulse::ideal(0.0, PI / 2.0))];
        for j in 0..n_pulses {
            items.push(SequenceItem::Delay(if j == 0 { tau } else { 2.0 * tau }));
            let phase = if j % 2 == 0 { 0.0 } else { PI };
            items.push(SequenceItem::Pulse(Pulse::ideal(phase, PI)));
        }
        items.push(SequenceItem::Delay(tau));
        let closing = if n_pulses % 2 == 1 { 0.0 } else { PI };
        items.push(SequenceItem::Pulse(Pulse::ideal(closing, PI / 2.0)));
        items.push(SequenceItem::Acquire);
        Self::new(items)
    }

    /// Optional inversion π pulse followed by a wait.
    pub fn inversion_recovery(invert: bool, wait: f64) -> Result<Self> {
        let mut items = Vec::new();
        if invert {
            items.push(SequenceItem::Pulse(Pulse::ideal(0.0, PI)));
        }
        items.push(SequenceItem::Delay(wait));
        items.push(SequenceItem::Acquire);
        Self::new(items)
    }
}
