//! Mixing times of lazified chains and the gain of the lazy transformation.
//!
//! cargo run --example mixing_time

use nalgebra::{DMatrix, DVector};
use omega_rm::evaluate::{ergodic_mixing_time, gain_of_chain, lazy_chain, stationary_distribution};
use omega_rm::random::{random_ergodic_chain, rng};
use rand::Rng;

fn main() -> omega_rm::Result<()> {
    let mut r = rng(11);
    let p = random_ergodic_chain(&mut r, 5);
    println!("P = {p:.3}");
    println!(
        "stationary = {:.4}",
        stationary_distribution(&p)?.transpose()
    );
    for eps in [0.25, 0.125, 0.0625, 0.01] {
        println!("T_mix({eps}) = {}", ergodic_mixing_time(&p, eps)?);
    }

    let rewards = DMatrix::from_fn(5, 5, |_, _| r.random::<f64>());
    let expected = DVector::from_fn(5, |i, _| {
        (0..5).map(|j| p[(i, j)] * rewards[(i, j)]).sum::<f64>()
    });
    let (g, _) = gain_of_chain(&p, &expected)?;
    for alpha in [0.25, 0.5, 0.75] {
        let (hat, rh) = lazy_chain(&p, &rewards, alpha);
        let (gh, _) = gain_of_chain(&hat, &rh)?;
        println!("alpha {alpha}: lazy gain {gh:.6} = {alpha} x {g:.6}");
    }
    Ok(())
}
