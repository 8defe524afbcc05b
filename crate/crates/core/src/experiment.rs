//! Double-slit geometry, screen and telescope detectors.
//!
//! Mode registry: slit `a` is mode 0, slit `b` is mode 1. Slit `a` sits at
//! transverse position `+d/2`, slit `b` at `-d/2`, both in the slit plane;
//! the detector plane is a distance `L` behind it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, Amplitude, LadderOp, OperatorExpression, StateVector, Term};

/// Mode index of slit `a`.
pub const MODE_A: usize = 0;
/// Mode index of slit `b`.
pub const MODE_B: usize = 1;

/// Imaginary residue above which a detection probability is rejected.
pub const IMAG_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slit {
    A,
    B,
}

impl Slit {
    pub fn mode(self) -> usize {
        match self {
            Slit::A => MODE_A,
            Slit::B => MODE_B,
        }
    }

    /// Transverse coordinate of the slit in units of the slit separation.
    fn offset_sign(self) -> f64 {
        match self {
            Slit::A => 0.5,
            Slit::B => -0.5,
        }
    }
}

/// Slit and detector layout. All lengths in metres, `wavenumber` in rad/m.
///
/// Fields are public plain data; [`Geometry::new`] enforces
/// `d > 0, L > 0, d_s >= 0, k > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub slit_separation: f64,
    pub screen_distance: f64,
    pub source_distance: f64,
    pub wavenumber: f64,
}

impl Geometry {
    pub fn new(
        slit_separation: f64,
        screen_distance: f64,
        source_distance: f64,
        wavenumber: f64,
    ) -> Result<Self> {
        let g = Self { slit_separation, screen_distance, source_distance, wavenumber };
        g.validate()?;
        Ok(g)
    }

    pub fn from_wavelength(
        slit_separation: f64,
        screen_distance: f64,
        source_distance: f64,
        wavelength: f64,
    ) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::invalid(format!("wavelength must be positive, got {wavelength}")));
        }
        Self::new(slit_separation, screen_distance, source_distance, 2.0 * PI / wavelength)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("slit separation", self.slit_separation, self.slit_separation > 0.0),
            ("screen distance", self.screen_distance, self.screen_distance > 0.0),
            ("source distance", self.source_distance, self.source_distance >= 0.0),
            ("wavenumber", self.wavenumber, self.wavenumber > 0.0),
        ];
        for (name, value, ok) in checks {
            if !(ok && value.is_finite()) {
                return Err(Error::invalid(format!("{name} out of range: {value}")));
            }
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * PI / self.wavenumber
    }

    /// Small-angle fringe spacing `lambda L / d`.
    pub fn fringe_period(&self) -> f64 {
        self.wavelength() * self.screen_distance / self.slit_separation
    }

    /// Detector-plane point directly behind `slit`.
    pub fn image_point(&self, slit: Slit) -> f64 {
        slit.offset_sign() * self.slit_separation
    }
}

/// Source-state parameters: field strength and per-slit phases (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    pub epsilon: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl SourceParams {
    pub fn new(epsilon: f64, phi_a: f64, phi_b: f64) -> Result<Self> {
        let sp = Self { epsilon, phi_a, phi_b };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.phi_a.is_finite() && self.phi_b.is_finite()) {
            return Err(Error::invalid("phases must be finite"));
        }
        Ok(())
    }

    pub fn phase(&self, slit: Slit) -> f64 {
        match slit {
            Slit::A => self.phi_a,
            Slit::B => self.phi_b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternPoint {
    pub x: f64,
    pub p: f64,
}

/// Unnormalized detection probabilities sampled at strictly increasing `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pattern {
    points: Vec<PatternPoint>,
}

impl Pattern {
    pub fn new(points: Vec<PatternPoint>) -> Result<Self> {
        check_grid(points.iter().map(|p| p.x))?;
        Ok(Self { points })
    }

    pub fn from_fn(x_grid: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(x_grid.iter().map(|&x| PatternPoint { x, p: f(x) }).collect())
    }

    pub fn points(&self) -> &[PatternPoint] {
        &self.points
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.x)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.p)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub(crate) fn check_grid(xs: impl IntoIterator<Item = f64>) -> Result<()> {
    let mut prev: Option<f64> = None;
    for x in xs {
        if !x.is_finite() {
            return Err(Error::invalid(format!("grid point {x} is not finite")));
        }
        if let Some(p) = prev {
            if x <= p {
                return Err(Error::invalid(format!("grid not strictly increasing at {p} -> {x}")));
            }
        }
        prev = Some(x);
    }
    Ok(())
}

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { end } else { start + step * i as f64 })
                .collect()
        }
    }
}

/// Two-mode source state `|vac> + eps/sqrt2 (e^{i phi_a} a^+ + e^{i phi_b} b^+)|vac>`.
pub fn source_state(sp: &SourceParams) -> Result<StateVector> {
    sp.validate()?;
    let vac = fock::vacuum(2)?;
    let weight = sp.epsilon / 2f64.sqrt();
    let excitation = OperatorExpression::from_terms(vec![
        Term::new(Complex64::from_polar(weight, sp.phi_a), vec![LadderOp::create(MODE_A)]),
        Term::new(Complex64::from_polar(weight, sp.phi_b), vec![LadderOp::create(MODE_B)]),
    ])?;
    vac.added(&fock::apply_expression(&excitation, &vac)?)
}

/// Euclidean distance from `slit` to the detector point `(x, L)`.
pub fn path_length(g: &Geometry, slit: Slit, x: f64) -> f64 {
    let dx = x - slit.offset_sign() * g.slit_separation;
    g.screen_distance.hypot(dx)
}

/// `d_ax - d_bx`, evaluated without cancellation as `-2 x d / (d_ax + d_bx)`.
pub fn path_difference(g: &Geometry, x: f64) -> f64 {
    let sum = path_length(g, Slit::A, x) + path_length(g, Slit::B, x);
    -2.0 * x * g.slit_separation / sum
}

/// Propagation phase factors `e^{ik(d_s + d_ax)}`, `e^{ik(d_s + d_bx)}`.
///
/// The two factors share a common carrier `e^{ik(d_s + mean)}` and differ by
/// `e^{+-ik(d_ax - d_bx)/2}`, so their relative phase keeps full precision
/// even when `k d_ax` is ~1e9 rad.
pub(crate) fn slit_phase_factors(g: &Geometry, x: f64) -> (Amplitude, Amplitude) {
    let da = path_length(g, Slit::A, x);
    let db = path_length(g, Slit::B, x);
    let mean = 0.5 * (da + db);
    let half_diff = 0.5 * path_difference(g, x);
    let carrier = Complex64::cis(g.wavenumber * (g.source_distance + mean));
    let rel = Complex64::cis(g.wavenumber * half_diff);
    (carrier * rel, carrier * rel.conj())
}

/// Positive-frequency field at screen point `x`:
/// `a e^{ik(d_s + d_ax)} + b e^{ik(d_s + d_bx)}`.
pub fn screen_field_operator(g: &Geometry, x: f64) -> OperatorExpression {
    let (ca, cb) = slit_phase_factors(g, x);
    OperatorExpression::from_terms(vec![
        Term::new(ca, vec![LadderOp::annihilate(MODE_A)]),
        Term::new(cb, vec![LadderOp::annihilate(MODE_B)]),
    ])
    .expect("unit-modulus phase factors are finite")
}

/// Positive-frequency field seen by a telescope focused on `slit`.
///
/// The telescope passes only its slit's mode. `aperture` is its position in
/// the detector plane; `None` places it at the slit's image point.
pub fn telescope_field_operator(g: &Geometry, slit: Slit, aperture: Option<f64>) -> OperatorExpression {
    let x = aperture.unwrap_or_else(|| g.image_point(slit));
    let phase = g.wavenumber * (g.source_distance + path_length(g, slit, x));
    OperatorExpression::from_terms(vec![Term::new(
        Complex64::cis(phase),
        vec![LadderOp::annihilate(slit.mode())],
    )])
    .expect("unit-modulus phase factor is finite")
}

/// `<E^- E^+>` in state `s`, where `E^- = (E^+)^dagger`.
pub fn detection_probability(e_plus: &OperatorExpression, s: &StateVector) -> Result<f64> {
    let intensity = fock::adjoint(e_plus).compose(e_plus);
    let value = fock::expectation(&intensity, s)?;
    if value.im.abs() > IMAG_TOLERANCE {
        return Err(Error::InternalInconsistency(format!(
            "detection probability has imaginary part {}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Analytic screen law `eps^2 (1 + cos(k (d_ax - d_bx) + phi_a - phi_b))`.
pub fn closed_form_screen_probability(g: &Geometry, sp: &SourceParams, x: f64) -> f64 {
    let arg = g.wavenumber * path_difference(g, x) + sp.phi_a - sp.phi_b;
    sp.epsilon * sp.epsilon * (1.0 + arg.cos())
}

/// Screen pattern evaluated through the field-operator expectation value at
/// every grid point.
pub fn screen_pattern(g: &Geometry, sp: &SourceParams, x_grid: &[f64]) -> Result<Pattern> {
    check_grid(x_grid.iter().copied())?;
    let state = source_state(sp)?;
    let points = x_grid
        .par_iter()
        .map(|&x| {
            detection_probability(&screen_field_operator(g, x), &state).map(|p| PatternPoint { x, p })
        })
        .collect::<Result<Vec<_>>>()?;
    Pattern::new(points)
}

/// Telescope response as its aperture is moved across `aperture_grid`.
pub fn telescope_pattern(
    g: &Geometry,
    sp: &SourceParams,
    slit: Slit,
    aperture_grid: &[f64],
) -> Result<Pattern> {
    check_grid(aperture_grid.iter().copied())?;
    let state = source_state(sp)?;
    let points = aperture_grid
        .par_iter()
        .map(|&x| {
            detection_probability(&telescope_field_operator(g, slit, Some(x)), &state)
                .map(|p| PatternPoint { x, p })
        })
        .collect::<Result<Vec<_>>>()?;
    Pattern::new(points)
}

/// `(max - min) / (max + min)` of the pattern values.
pub fn fringe_visibility(p: &Pattern) -> Result<f64> {
    if p.len() < 2 {
        return Err(Error::invalid("visibility needs at least two points"));
    }
    let (min, max) = p
        .values()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if max + min <= 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok((max - min) / (max + min))
}
