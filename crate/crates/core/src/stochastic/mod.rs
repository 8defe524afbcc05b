//! Event-by-event Monte Carlo of the delayed-choice experiment.
//!
//! Each event first picks a detector system according to a [`ChoicePolicy`]
//! and then samples one click from the analytic detection laws: a screen
//! position from the fringe density, or slit `a`/`b` with probability 1/2
//! each for the pair of telescopes. Only post-selected one-photon events are
//! simulated, so every event yields exactly one click.
//!
//! Randomness is counter based: event `i` of a run with seed `s` draws from
//! a ChaCha8 stream keyed by `s` on stream `i`. Results therefore do not
//! depend on evaluation order or thread count. The policy's
//! [`ChoiceTime`] is carried as a label only and never reaches the sampler.

mod sampler;
pub mod stats;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{Geometry, Slit, SourceParams};

pub use sampler::{build_screen_sampler, ScreenSampler, DEFAULT_SUPPORT_INTERVALS};
pub use stats::ChiSquareResult;

/// Significance level used by [`compare_runs`].
pub const ALPHA: f64 = 0.01;

const CHUNK: u64 = 4096;

/// Which detector system an event is sent to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChoiceRule {
    AlwaysScreen,
    /// Both telescopes are in place; each event clicks at exactly one.
    AlwaysTelescope,
    RandomPerEvent { p_screen: f64 },
}

/// When the detector choice is nominally made relative to slit passage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChoiceTime {
    BeforeSlit,
    AfterSlit,
}

impl ChoiceTime {
    pub fn flipped(self) -> Self {
        match self {
            ChoiceTime::BeforeSlit => ChoiceTime::AfterSlit,
            ChoiceTime::AfterSlit => ChoiceTime::BeforeSlit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoicePolicy {
    pub rule: ChoiceRule,
    pub choice_time: ChoiceTime,
}

impl ChoicePolicy {
    pub fn new(rule: ChoiceRule, choice_time: ChoiceTime) -> Result<Self> {
        if let ChoiceRule::RandomPerEvent { p_screen } = rule {
            if !(0.0..=1.0).contains(&p_screen) {
                return Err(Error::invalid(format!("p_screen must lie in [0, 1], got {p_screen}")));
            }
        }
        Ok(Self { rule, choice_time })
    }

    fn validate(&self) -> Result<()> {
        Self::new(self.rule, self.choice_time).map(|_| ())
    }

    fn picks_screen(&self, u: f64) -> bool {
        match self.rule {
            ChoiceRule::AlwaysScreen => true,
            ChoiceRule::AlwaysTelescope => false,
            ChoiceRule::RandomPerEvent { p_screen } => u < p_screen,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Detector {
    Screen { x: f64 },
    Telescope { slit: Slit },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionEvent {
    pub event_id: u64,
    pub detector: Detector,
    pub choice_time: ChoiceTime,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TelescopeCounts {
    pub a: u64,
    pub b: u64,
}

impl TelescopeCounts {
    pub fn total(&self) -> u64 {
        self.a + self.b
    }
}

/// Histogram and counts of one Monte Carlo run.
///
/// Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStatistics {
    pub seed: u64,
    pub n_events: u64,
    pub extent: [f64; 2],
    pub bins: Vec<u64>,
    pub telescope: TelescopeCounts,
    pub policy: ChoiceRule,
    pub choice_time: ChoiceTime,
}

impl RunStatistics {
    fn empty(setup: &MonteCarloSetup, policy: &ChoicePolicy, seed: u64) -> Self {
        Self {
            seed,
            n_events: 0,
            extent: [setup.extent.0, setup.extent.1],
            bins: vec![0; setup.bins],
            telescope: TelescopeCounts::default(),
            policy: policy.rule,
            choice_time: policy.choice_time,
        }
    }

    pub fn screen_total(&self) -> u64 {
        self.bins.iter().sum()
    }

    /// Same histogram, telescope counts and event count, ignoring labels.
    pub fn same_outcomes(&self, other: &RunStatistics) -> bool {
        self.n_events == other.n_events
            && self.extent == other.extent
            && self.bins == other.bins
            && self.telescope == other.telescope
    }

    fn same_binning(&self, other: &RunStatistics) -> bool {
        self.extent == other.extent && self.bins.len() == other.bins.len()
    }

    /// Adds the counts of `other`, which must share the binning.
    pub fn merge(&mut self, other: &RunStatistics) -> Result<()> {
        if !self.same_binning(other) {
            return Err(Error::invalid("cannot merge runs with different binning"));
        }
        self.n_events += other.n_events;
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.telescope.a += other.telescope.a;
        self.telescope.b += other.telescope.b;
        Ok(())
    }

    fn record(&mut self, detector: Detector) {
        self.n_events += 1;
        match detector {
            Detector::Screen { x } => {
                let [lo, hi] = self.extent;
                let nb = self.bins.len();
                let idx = ((x - lo) / (hi - lo) * nb as f64).floor();
                let idx = if idx < 0.0 { 0 } else { (idx as usize).min(nb - 1) };
                self.bins[idx] += 1;
            }
            Detector::Telescope { slit: Slit::A } => self.telescope.a += 1,
            Detector::Telescope { slit: Slit::B } => self.telescope.b += 1,
        }
    }
}

/// Screen extent, histogram binning and sampler tabulation for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSetup {
    pub extent: (f64, f64),
    pub bins: usize,
    pub support_intervals: usize,
}

impl MonteCarloSetup {
    pub fn new(extent: (f64, f64), bins: usize) -> Result<Self> {
        let setup = Self { extent, bins, support_intervals: DEFAULT_SUPPORT_INTERVALS };
        setup.validate()?;
        Ok(setup)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.extent;
        if self.bins < 2 {
            return Err(Error::invalid("histogram needs at least 2 bins"));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!("bad screen extent [{lo}, {hi}]")));
        }
        Ok(())
    }
}

/// A configured experiment ready to generate runs.
#[derive(Debug, Clone)]
pub struct MonteCarlo {
    setup: MonteCarloSetup,
    sampler: ScreenSampler,
}

/// Per-event generator for stream `event_id` of `seed`.
pub fn event_rng(seed: u64, event_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(event_id);
    rng
}

impl MonteCarlo {
    pub fn new(g: &Geometry, sp: &SourceParams, setup: MonteCarloSetup) -> Result<Self> {
        setup.validate()?;
        let sampler = build_screen_sampler(g, sp, setup.extent, setup.support_intervals)?;
        Ok(Self { setup, sampler })
    }

    pub fn setup(&self) -> &MonteCarloSetup {
        &self.setup
    }

    pub fn sampler(&self) -> &ScreenSampler {
        &self.sampler
    }

    /// Generates event `event_id`: one policy draw, then one outcome draw.
    pub fn simulate_event(&self, policy: &ChoicePolicy, seed: u64, event_id: u64) -> DetectionEvent {
        let mut rng = event_rng(seed, event_id);
        let u_policy: f64 = rng.random();
        let u_outcome: f64 = rng.random();
        let detector = if policy.picks_screen(u_policy) {
            Detector::Screen { x: self.sampler.sample(u_outcome) }
        } else if u_outcome < 0.5 {
            Detector::Telescope { slit: Slit::A }
        } else {
            Detector::Telescope { slit: Slit::B }
        };
        DetectionEvent { event_id, detector, choice_time: policy.choice_time }
    }

    fn run_range(&self, policy: &ChoicePolicy, seed: u64, ids: std::ops::Range<u64>) -> RunStatistics {
        let mut stats = RunStatistics::empty(&self.setup, policy, seed);
        for id in ids {
            stats.record(self.simulate_event(policy, seed, id).detector);
        }
        stats
    }

    pub fn run(&self, policy: &ChoicePolicy, n_events: u64, seed: u64) -> Result<RunStatistics> {
        policy.validate()?;
        if n_events == 0 {
            return Err(Error::invalid("a run needs at least one event"));
        }
        let chunks = n_events.div_ceil(CHUNK);
        let partials: Vec<RunStatistics> = (0..chunks)
            .into_par_iter()
            .map(|c| self.run_range(policy, seed, c * CHUNK..((c + 1) * CHUNK).min(n_events)))
            .collect();
        let mut total = RunStatistics::empty(&self.setup, policy, seed);
        for p in &partials {
            total.merge(p)?;
        }
        Ok(total)
    }

    /// Single-threaded reference path; must agree with [`MonteCarlo::run`].
    pub fn run_serial(&self, policy: &ChoicePolicy, n_events: u64, seed: u64) -> Result<RunStatistics> {
        policy.validate()?;
        if n_events == 0 {
            return Err(Error::invalid("a run needs at least one event"));
        }
        Ok(self.run_range(policy, seed, 0..n_events))
    }
}

/// Builds the sampler and performs one run.
pub fn run(
    g: &Geometry,
    sp: &SourceParams,
    setup: MonteCarloSetup,
    policy: &ChoicePolicy,
    n_events: u64,
    seed: u64,
) -> Result<RunStatistics> {
    MonteCarlo::new(g, sp, setup)?.run(policy, n_events, seed)
}

/// Result of comparing two runs. A `None` test was not applicable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub alpha: f64,
    pub screen_chi_square: Option<ChiSquareResult>,
    pub telescope_p_value: Option<f64>,
    pub detector_split_p_value: Option<f64>,
    pub indistinguishable: bool,
}

/// Two-sample chi-square on the screen histograms, two-proportion test on
/// the a/b telescope split, and two-proportion test on the fraction of
/// events sent to the screen.
pub fn compare_runs(s1: &RunStatistics, s2: &RunStatistics) -> Result<ComparisonReport> {
    if !s1.same_binning(s2) {
        return Err(Error::invalid("runs use different screen binning"));
    }
    let (sc1, sc2) = (s1.screen_total(), s2.screen_total());
    let screen_chi_square = if sc1 > 0 && sc2 > 0 {
        Some(stats::chi_square_two_sample(&s1.bins, &s2.bins)?)
    } else {
        None
    };
    let telescope_p_value = stats::two_proportion_p_value(
        s1.telescope.a,
        s1.telescope.total(),
        s2.telescope.a,
        s2.telescope.total(),
    );
    let detector_split_p_value = stats::two_proportion_p_value(sc1, s1.n_events, sc2, s2.n_events);
    let indistinguishable = screen_chi_square.map(|r| r.p_value).into_iter()
        .chain(telescope_p_value)
        .chain(detector_split_p_value)
        .all(|p| p > ALPHA);
    Ok(ComparisonReport {
        alpha: ALPHA,
        screen_chi_square,
        telescope_p_value,
        detector_split_p_value,
        indistinguishable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Geometry, SourceParams, MonteCarloSetup) {
        (
            Geometry::from_wavelength(0.5e-3, 1.0, 1.0, 633e-9).unwrap(),
            SourceParams::new(0.1, 0.0, 0.0).unwrap(),
            MonteCarloSetup::new((-5e-3, 5e-3), 50).unwrap(),
        )
    }

    #[test]
    fn policy_validation() {
        assert!(ChoicePolicy::new(ChoiceRule::RandomPerEvent { p_screen: 1.5 }, ChoiceTime::AfterSlit)
            .is_err());
        assert!(ChoicePolicy::new(ChoiceRule::RandomPerEvent { p_screen: -0.1 }, ChoiceTime::AfterSlit)
            .is_err());
        assert!(ChoicePolicy::new(ChoiceRule::RandomPerEvent { p_screen: 1.0 }, ChoiceTime::AfterSlit)
            .is_ok());
    }

    #[test]
    fn setup_validation() {
        assert!(MonteCarloSetup::new((0.0, 1.0), 1).is_err());
        assert!(MonteCarloSetup::new((1.0, 0.0), 10).is_err());
    }

    #[test]
    fn conservation_and_policy_extremes() {
        let (g, sp, st) = setup();
        let mc = MonteCarlo::new(&g, &sp, st).unwrap();
        let screen = ChoicePolicy::new(ChoiceRule::AlwaysScreen, ChoiceTime::BeforeSlit).unwrap();
        let s = mc.run(&screen, 5000, 1).unwrap();
        assert_eq!(s.screen_total(), 5000);
        assert_eq!(s.telescope.total(), 0);

        let tel = ChoicePolicy::new(ChoiceRule::AlwaysTelescope, ChoiceTime::AfterSlit).unwrap();
        let s = mc.run(&tel, 5000, 1).unwrap();
        assert_eq!(s.screen_total(), 0);
        assert_eq!(s.telescope.total(), 5000);
        assert!(s.telescope.a > 0 && s.telescope.b > 0);
    }

    #[test]
    fn zero_events_rejected() {
        let (g, sp, st) = setup();
        let policy = ChoicePolicy::new(ChoiceRule::AlwaysScreen, ChoiceTime::BeforeSlit).unwrap();
        assert!(run(&g, &sp, st, &policy, 0, 3).is_err());
    }

    #[test]
    fn parallel_matches_serial() {
        let (g, sp, st) = setup();
        let mc = MonteCarlo::new(&g, &sp, st).unwrap();
        let policy =
            ChoicePolicy::new(ChoiceRule::RandomPerEvent { p_screen: 0.3 }, ChoiceTime::AfterSlit)
                .unwrap();
        assert_eq!(mc.run(&policy, 20_001, 42).unwrap(), mc.run_serial(&policy, 20_001, 42).unwrap());
    }

    #[test]
    fn choice_time_does_not_change_events() {
        let (g, sp, st) = setup();
        let mc = MonteCarlo::new(&g, &sp, st).unwrap();
        let before =
            ChoicePolicy::new(ChoiceRule::RandomPerEvent { p_screen: 0.5 }, ChoiceTime::BeforeSlit)
                .unwrap();
        let after = ChoicePolicy { choice_time: ChoiceTime::AfterSlit, ..before };
        for id in 0..100 {
            let e1 = mc.simulate_event(&before, 9, id);
            let e2 = mc.simulate_event(&after, 9, id);
            assert_eq!(e1.detector, e2.detector);
            assert_ne!(e1.choice_time, e2.choice_time);
        }
    }

    #[test]
    fn merge_rejects_mismatched_binning() {
        let (g, sp, st) = setup();
        let policy = ChoicePolicy::new(ChoiceRule::AlwaysScreen, ChoiceTime::BeforeSlit).unwrap();
        let mut a = run(&g, &sp, st, &policy, 10, 1).unwrap();
        let b = run(&g, &sp, MonteCarloSetup::new((-5e-3, 5e-3), 40).unwrap(), &policy, 10, 1)
            .unwrap();
        assert!(a.merge(&b).is_err());
        assert!(compare_runs(&a, &b).is_err());
    }

    #[test]
    fn compare_identical_runs() {
        let (g, sp, st) = setup();
        let policy =
            ChoicePolicy::new(ChoiceRule::RandomPerEvent { p_screen: 0.5 }, ChoiceTime::BeforeSlit)
                .unwrap();
        let s = run(&g, &sp, st, &policy, 2000, 5).unwrap();
        let r = compare_runs(&s, &s).unwrap();
        assert_eq!(r.screen_chi_square.unwrap().statistic, 0.0);
        assert!(r.indistinguishable);
    }

    #[test]
    fn json_key_order() {
        let (g, sp, st) = setup();
        let policy = ChoicePolicy::new(ChoiceRule::AlwaysTelescope, ChoiceTime::AfterSlit).unwrap();
        let s = run(&g, &sp, MonteCarloSetup { bins: 2, ..st }, &policy, 4, 0).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        let keys = ["\"seed\"", "\"n_events\"", "\"extent\"", "\"bins\"", "\"telescope\"", "\"policy\"", "\"choice_time\""];
        let pos: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{json}");
        assert!(json.contains("\"policy\":\"always-telescope\""));
        assert!(json.contains("\"choice_time\":\"after-slit\""));
        let back: RunStatistics = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
