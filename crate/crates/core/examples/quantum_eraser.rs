// Polarization marking removes the fringes; an analyzer at 45 degrees
// brings them back, and the 135 degree port carries the anti-fringes.
//
// Run with `cargo run --example quantum_eraser`.

use std::f64::consts::PI;

use delayed_choice::eraser::{
    analyzed_pattern, analyzer_visibility, eraser_patterns, tagged_source_state, AnalyzerSetting,
};
use delayed_choice::experiment::{fringe_visibility, linspace, Geometry, SourceParams};

pub fn run_example() -> delayed_choice::Result<()> {
    let g = Geometry::from_wavelength(0.5e-3, 1.0, 1.0, 633e-9)?;
    let sp = SourceParams::new(0.1, 0.0, 0.0)?;
    let grid = linspace(-5e-3, 5e-3, 1001);

    let pats = eraser_patterns(&g, &sp, &grid)?;
    println!("marked          V = {:e}", fringe_visibility(&pats.marked)?);
    println!("erased (45 deg) V = {:.6}", fringe_visibility(&pats.erased_diag)?);
    println!("erased (135deg) V = {:.6}", fringe_visibility(&pats.erased_antidiag)?);

    let state = tagged_source_state(&sp)?;
    println!("\n theta    V(measured)  |sin 2theta|");
    for step in 0..8 {
        let theta = step as f64 * PI / 8.0;
        let pat = analyzed_pattern(&g, &state, AnalyzerSetting::angle(theta)?, &grid)?;
        println!(" {theta:.3}    {:.6}     {:.6}", fringe_visibility(&pat)?, analyzer_visibility(theta));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("quantum eraser example");
}
