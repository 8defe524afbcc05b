//! Test-only oracles, independent of the library's evaluation paths.
#![allow(dead_code)]

use delayed_choice::experiment::{closed_form_screen_probability, Geometry, SourceParams};
use delayed_choice::fock::{Amplitude, FockBasisState, LadderKind, LadderOp, OperatorExpression, StateVector, Term};
use num_complex::Complex64;
use rand::Rng;

/// Per-mode truncation of the dense oracle.
pub const TRUNCATION: usize = 9;

/// Dense matrices acting on the truncated product space of `modes` modes.
pub struct DenseSpace {
    pub modes: usize,
    pub dim: usize,
}

impl DenseSpace {
    pub fn new(modes: usize) -> Self {
        Self { modes, dim: TRUNCATION.pow(modes as u32) }
    }

    pub fn index(&self, occ: &[u32]) -> usize {
        occ.iter().fold(0, |acc, &n| acc * TRUNCATION + n as usize)
    }

    pub fn occupations(&self, mut idx: usize) -> Vec<u32> {
        let mut occ = vec![0u32; self.modes];
        for slot in occ.iter_mut().rev() {
            *slot = (idx % TRUNCATION) as u32;
            idx /= TRUNCATION;
        }
        occ
    }

    /// Row-major matrix of one ladder operator, built from the textbook
    /// single-mode matrices `<n+1|a^+|n> = sqrt(n+1)` and their transpose.
    #[allow(clippy::needless_range_loop)]
    pub fn ladder_matrix(&self, op: LadderOp) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.dim]; self.dim];
        for col in 0..self.dim {
            let occ = self.occupations(col);
            let n = occ[op.mode.0] as usize;
            let mut target = occ.clone();
            let elem = match op.kind {
                LadderKind::Create => {
                    if n + 1 >= TRUNCATION {
                        continue;
                    }
                    target[op.mode.0] += 1;
                    ((n + 1) as f64).sqrt()
                }
                LadderKind::Annihilate => {
                    if n == 0 {
                        continue;
                    }
                    target[op.mode.0] -= 1;
                    (n as f64).sqrt()
                }
            };
            m[self.index(&target)][col] = elem;
        }
        m
    }

    pub fn to_dense(&self, s: &StateVector) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim];
        for (b, a) in s.iter() {
            v[self.index(b.occupations())] += a;
        }
        v
    }

    pub fn apply(&self, m: &[Vec<f64>], v: &[Complex64]) -> Vec<Complex64> {
        m.iter()
            .map(|row| row.iter().zip(v).map(|(r, x)| x * r).sum())
            .collect()
    }
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Dense-vector distance between two sparse states.
pub fn state_distance(a: &StateVector, b: &StateVector) -> f64 {
    let mut keys: Vec<FockBasisState> = a.iter().map(|(k, _)| k.clone()).collect();
    keys.extend(b.iter().map(|(k, _)| k.clone()));
    keys.iter()
        .map(|k| (a.amplitude(k) - b.amplitude(k)).norm())
        .fold(0.0, f64::max)
}

/// Direct sum of `|amp|^2`.
pub fn brute_norm_sqr(s: &StateVector) -> f64 {
    let mut total = 0.0;
    for (_, a) in s.iter() {
        total += a.re * a.re + a.im * a.im;
    }
    total
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random state with up to `terms` basis components, occupations `<= max_occ`.
pub fn random_state(rng: &mut impl Rng, modes: usize, terms: usize, max_occ: u32) -> StateVector {
    let items: Vec<(FockBasisState, Amplitude)> = (0..terms)
        .map(|_| {
            let occ = (0..modes).map(|_| rng.random_range(0..=max_occ)).collect();
            (FockBasisState::new(occ), random_complex(rng))
        })
        .collect();
    StateVector::from_terms(modes, items).unwrap()
}

pub fn random_ladder(rng: &mut impl Rng, modes: usize) -> LadderOp {
    let mode = rng.random_range(0..modes);
    if rng.random_bool(0.5) {
        LadderOp::create(mode)
    } else {
        LadderOp::annihilate(mode)
    }
}

/// Random expression with up to `max_terms` terms of up to `max_factors` factors.
pub fn random_expression(
    rng: &mut impl Rng,
    modes: usize,
    max_terms: usize,
    max_factors: usize,
) -> OperatorExpression {
    let n_terms = rng.random_range(1..=max_terms);
    let terms = (0..n_terms)
        .map(|_| {
            let n_factors = rng.random_range(0..=max_factors);
            Term::new(
                random_complex(rng),
                (0..n_factors).map(|_| random_ladder(rng, modes)).collect(),
            )
        })
        .collect();
    OperatorExpression::from_terms(terms).unwrap()
}

/// Random geometry in the ranges d in [0.1, 2] mm, L in [0.5, 5] m,
/// k in [1e6, 1e8] rad/m, d_s in [0, 2] m.
pub fn random_geometry(rng: &mut impl Rng) -> Geometry {
    Geometry::new(
        rng.random_range(0.1e-3..2e-3),
        rng.random_range(0.5..5.0),
        rng.random_range(0.0..2.0),
        rng.random_range(1e6..1e8),
    )
    .unwrap()
}

pub fn random_source(rng: &mut impl Rng) -> SourceParams {
    SourceParams::new(
        rng.random_range(0.01..1.0),
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
    .unwrap()
}

/// Symmetric grid covering at least two small-angle fringe periods.
pub fn fringe_grid(g: &Geometry, points: usize) -> Vec<f64> {
    let half = 2.0 * g.fringe_period();
    delayed_choice::experiment::linspace(-half, half, points)
}

/// Composite Simpson integral of `f` over `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n.is_multiple_of(2) { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// Bin probabilities of the screen law over `extent`, by Simpson quadrature.
pub fn screen_bin_probabilities(g: &Geometry, sp: &SourceParams, extent: (f64, f64), bins: usize) -> Vec<f64> {
    let w = (extent.1 - extent.0) / bins as f64;
    let raw: Vec<f64> = (0..bins)
        .map(|i| {
            let a = extent.0 + w * i as f64;
            simpson(|x| closed_form_screen_probability(g, sp, x), a, a + w, 400)
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

/// Cumulative screen law at `x`, by Simpson quadrature.
pub fn screen_cdf(g: &Geometry, sp: &SourceParams, extent: (f64, f64), x: f64) -> f64 {
    let f = |t| closed_form_screen_probability(g, sp, t);
    let total = simpson(f, extent.0, extent.1, 20_000);
    let x = x.clamp(extent.0, extent.1);
    simpson(f, extent.0, x, 2_000) / total
}
