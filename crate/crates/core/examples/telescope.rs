// Telescope detectors focused on one slit see a flat eps^2/2 response,
// while the screen shows full-contrast fringes.
//
// Run with `cargo run --example telescope`.

use delayed_choice::experiment::{
    detection_probability, fringe_visibility, linspace, screen_pattern, source_state,
    telescope_field_operator, telescope_pattern, Geometry, Slit, SourceParams,
};

pub fn run_example() -> delayed_choice::Result<()> {
    let g = Geometry::from_wavelength(0.5e-3, 1.0, 1.0, 633e-9)?;
    let sp = SourceParams::new(0.1, 0.0, 0.0)?;
    let psi = source_state(&sp)?;

    for slit in [Slit::A, Slit::B] {
        let e = telescope_field_operator(&g, slit, None);
        println!("telescope {slit:?}: E+ = {e}, P = {:.6}", detection_probability(&e, &psi)?);
    }

    let grid = linspace(-5e-3, 5e-3, 1001);
    let screen = fringe_visibility(&screen_pattern(&g, &sp, &grid)?)?;
    let tel = fringe_visibility(&telescope_pattern(&g, &sp, Slit::A, &grid)?)?;
    println!("screen visibility    = {screen:.6}");
    println!("telescope visibility = {tel:e}");
    assert!(screen > 0.999 && tel < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("telescope example");
}
