// Event-by-event delayed choice: the detector is picked per photon, before
// or after slit passage, and the two sets of statistics are compared.
//
// Run with `cargo run --release --example delayed_choice_montecarlo`.

use delayed_choice::experiment::{Geometry, SourceParams};
use delayed_choice::stochastic::{
    compare_runs, ChoicePolicy, ChoiceRule, ChoiceTime, MonteCarlo, MonteCarloSetup,
};

pub fn run_example() -> delayed_choice::Result<()> {
    let g = Geometry::from_wavelength(0.5e-3, 1.0, 1.0, 633e-9)?;
    let sp = SourceParams::new(0.1, 0.0, 0.0)?;
    let mc = MonteCarlo::new(&g, &sp, MonteCarloSetup::new((-5e-3, 5e-3), 50)?)?;
    let rule = ChoiceRule::RandomPerEvent { p_screen: 0.5 };
    let before = ChoicePolicy::new(rule, ChoiceTime::BeforeSlit)?;
    let after = ChoicePolicy::new(rule, ChoiceTime::AfterSlit)?;
    let n = 50_000;

    let b = mc.run(&before, n, 7)?;
    let a = mc.run(&after, n, 7)?;
    println!("same seed, before vs after: identical outcomes = {}", b.same_outcomes(&a));

    let a2 = mc.run(&after, n, 8)?;
    let report = compare_runs(&b, &a2)?;
    println!("independent seeds: {report:#?}");

    let peak = *b.bins.iter().max().unwrap_or(&1) as f64;
    for (i, c) in b.bins.iter().enumerate() {
        println!("bin {i:2} {:5} {}", c, "*".repeat((*c as f64 / peak * 40.0) as usize));
    }
    println!("telescope clicks: a = {}, b = {}", b.telescope.a, b.telescope.b);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("monte carlo example");
}
