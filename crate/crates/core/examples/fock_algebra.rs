// Ladder-operator algebra on a two-mode Fock space.
//
// Run with `cargo run --example fock_algebra`.

use delayed_choice::fock::{
    adjoint, apply_ladder, expectation, inner_product, normal_order, vacuum, LadderOp,
    OperatorExpression,
};
use delayed_choice::Complex64;

pub fn run_example() -> delayed_choice::Result<()> {
    let vac = vacuum(2)?;
    let one = apply_ladder(LadderOp::create(0), &vac)?;
    let two = apply_ladder(LadderOp::create(0), &one)?;
    println!("a+ |0,0>       = {one}");
    println!("a+ a+ |0,0>    = {two}");
    println!("a |0,0>        = {}", apply_ladder(LadderOp::annihilate(0), &vac)?);

    let number = OperatorExpression::create(0) * OperatorExpression::annihilate(0);
    println!("<2,0| n_a |2,0> = {}", expectation(&number, &two)?.re / two.norm_sqr());

    let e = OperatorExpression::annihilate(0) * OperatorExpression::create(0) * OperatorExpression::create(1);
    let n = normal_order(&e);
    println!("normal_order({e}) = {n}");
    let probe = one.added(&apply_ladder(LadderOp::create(1), &vac)?)?;
    let (lhs, rhs) = (expectation(&e, &probe)?, expectation(&n, &probe)?);
    println!("  <e> = {lhs}, <:e:> = {rhs}");
    assert!((lhs - rhs).norm() < 1e-12);

    let f = OperatorExpression::annihilate(0).scaled(Complex64::new(0.0, 2.0));
    println!("adjoint({f}) = {}", adjoint(&f));
    println!("<1,0|1,0> = {}", inner_product(&one, &one)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("fock algebra example");
}
