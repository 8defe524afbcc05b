//! Which-path marking by polarization and its erasure.
//!
//! Four-mode registry, slit-major:
//!
//! | index | mode       |
//! |-------|------------|
//! | 0     | slit a, H  |
//! | 1     | slit a, V  |
//! | 2     | slit b, H  |
//! | 3     | slit b, V  |
//!
//! The marked source sends slit `a` out with H and slit `b` with V. A linear
//! analyzer at angle `theta` in front of the screen passes
//! `cos(theta) H + sin(theta) V`.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{
    check_grid, detection_probability, slit_phase_factors, Geometry, Pattern, PatternPoint, Slit,
    SourceParams,
};
use crate::fock::{self, LadderOp, OperatorExpression, StateVector, Term};

pub const TAGGED_MODES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// Mode index of `(slit, polarization)` in the tagged registry.
pub fn tagged_mode(slit: Slit, pol: Polarization) -> usize {
    let s = match slit {
        Slit::A => 0,
        Slit::B => 2,
    };
    let p = match pol {
        Polarization::H => 0,
        Polarization::V => 1,
    };
    s + p
}

/// Linear analyzer in front of the screen detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AnalyzerSetting {
    Absent,
    Angle(f64),
}

impl AnalyzerSetting {
    /// Analyzer at `theta`, which must lie in `[0, pi)`.
    pub fn angle(theta: f64) -> Result<Self> {
        if !(0.0..PI).contains(&theta) {
            return Err(Error::invalid(format!("analyzer angle {theta} outside [0, pi)")));
        }
        Ok(AnalyzerSetting::Angle(theta))
    }

    pub const DIAGONAL: AnalyzerSetting = AnalyzerSetting::Angle(FRAC_PI_4);
    pub const ANTIDIAGONAL: AnalyzerSetting = AnalyzerSetting::Angle(3.0 * FRAC_PI_4);
}

/// Screen field behind the analyzer: one operator, or the H/V pair whose
/// probabilities add when no analyzer is present.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyzedField {
    Single(OperatorExpression),
    Pair { h: OperatorExpression, v: OperatorExpression },
}

impl AnalyzedField {
    pub fn detection_probability(&self, s: &StateVector) -> Result<f64> {
        match self {
            AnalyzedField::Single(e) => detection_probability(e, s),
            AnalyzedField::Pair { h, v } => {
                Ok(detection_probability(h, s)? + detection_probability(v, s)?)
            }
        }
    }
}

/// Source state with slit `a` tagged `tag_a` and slit `b` tagged `tag_b`.
pub fn source_state_with_tags(
    sp: &SourceParams,
    tag_a: Polarization,
    tag_b: Polarization,
) -> Result<StateVector> {
    sp.validate()?;
    let vac = fock::vacuum(TAGGED_MODES)?;
    let weight = sp.epsilon / 2f64.sqrt();
    let excitation = OperatorExpression::from_terms(vec![
        Term::new(
            Complex64::from_polar(weight, sp.phi_a),
            vec![LadderOp::create(tagged_mode(Slit::A, tag_a))],
        ),
        Term::new(
            Complex64::from_polar(weight, sp.phi_b),
            vec![LadderOp::create(tagged_mode(Slit::B, tag_b))],
        ),
    ])?;
    vac.added(&fock::apply_expression(&excitation, &vac)?)
}

/// Path-marked source: slit `a` carries H, slit `b` carries V.
pub fn tagged_source_state(sp: &SourceParams) -> Result<StateVector> {
    source_state_with_tags(sp, Polarization::H, Polarization::V)
}

/// Screen field restricted to one polarization, summed over both slits.
fn polarized_field(g: &Geometry, x: f64, pol: Polarization, weight: f64) -> OperatorExpression {
    let (ca, cb) = slit_phase_factors(g, x);
    OperatorExpression::from_terms(vec![
        Term::new(ca * weight, vec![LadderOp::annihilate(tagged_mode(Slit::A, pol))]),
        Term::new(cb * weight, vec![LadderOp::annihilate(tagged_mode(Slit::B, pol))]),
    ])
    .expect("finite phase factors")
}

pub fn analyzed_field_operator(g: &Geometry, x: f64, setting: AnalyzerSetting) -> AnalyzedField {
    match setting {
        AnalyzerSetting::Absent => AnalyzedField::Pair {
            h: polarized_field(g, x, Polarization::H, 1.0),
            v: polarized_field(g, x, Polarization::V, 1.0),
        },
        AnalyzerSetting::Angle(theta) => AnalyzedField::Single(
            polarized_field(g, x, Polarization::H, theta.cos())
                + polarized_field(g, x, Polarization::V, theta.sin()),
        ),
    }
}

/// Screen pattern for `state` seen through `setting`.
pub fn analyzed_pattern(
    g: &Geometry,
    state: &StateVector,
    setting: AnalyzerSetting,
    x_grid: &[f64],
) -> Result<Pattern> {
    check_grid(x_grid.iter().copied())?;
    let points = x_grid
        .par_iter()
        .map(|&x| {
            analyzed_field_operator(g, x, setting)
                .detection_probability(state)
                .map(|p| PatternPoint { x, p })
        })
        .collect::<Result<Vec<_>>>()?;
    Pattern::new(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EraserPatterns {
    /// No analyzer: flat.
    pub marked: Pattern,
    /// Analyzer at pi/4: fringes.
    pub erased_diag: Pattern,
    /// Analyzer at 3pi/4: anti-fringes.
    pub erased_antidiag: Pattern,
}

pub fn eraser_patterns(g: &Geometry, sp: &SourceParams, x_grid: &[f64]) -> Result<EraserPatterns> {
    let state = tagged_source_state(sp)?;
    Ok(EraserPatterns {
        marked: analyzed_pattern(g, &state, AnalyzerSetting::Absent, x_grid)?,
        erased_diag: analyzed_pattern(g, &state, AnalyzerSetting::DIAGONAL, x_grid)?,
        erased_antidiag: analyzed_pattern(g, &state, AnalyzerSetting::ANTIDIAGONAL, x_grid)?,
    })
}

/// Expected fringe visibility `|sin 2 theta|` behind an analyzer at `theta`.
pub fn analyzer_visibility(theta: f64) -> f64 {
    (2.0 * theta).sin().abs()
}
