// Screen pattern of the two-mode source computed as `<E^- E^+>` and
// compared with the analytic fringe law.
//
// Run with `cargo run --example double_slit`.

use delayed_choice::experiment::{
    closed_form_screen_probability, fringe_visibility, linspace, screen_pattern, source_state,
    Geometry, SourceParams,
};

pub fn run_example() -> delayed_choice::Result<()> {
    let g = Geometry::from_wavelength(0.5e-3, 1.0, 1.0, 633e-9)?;
    let sp = SourceParams::new(0.1, 0.0, 0.0)?;
    println!("source state: {}", source_state(&sp)?);
    println!("norm^2 = {:.6} (1 + eps^2)", source_state(&sp)?.norm_sqr());

    let grid = linspace(-3e-3, 3e-3, 61);
    let pattern = screen_pattern(&g, &sp, &grid)?;
    let mut worst: f64 = 0.0;
    for pt in pattern.points() {
        worst = worst.max((pt.p - closed_form_screen_probability(&g, &sp, pt.x)).abs());
        let bar = "#".repeat((pt.p / 0.02 * 50.0).round() as usize);
        println!("{:+.2} mm  {:.5}  {bar}", pt.x * 1e3, pt.p);
    }
    println!("fringe period  ~ {:.3} mm", g.fringe_period() * 1e3);
    println!("visibility     = {:.6}", fringe_visibility(&pattern)?);
    println!("max |op - closed| = {worst:e}");
    assert!(worst < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("double slit example");
}
