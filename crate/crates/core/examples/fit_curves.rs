//! Log-space least squares: a power law and an exponential recovered from
//! noisy synthetic data, plus the effect of weighting by bin counts.
//!
//! ```text
//! cargo run --example fit_curves
//! ```

use likedness::fitting::{fit_exponential, fit_power, fit_weighted, Family};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> likedness::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut noisy = |y: f64| y * (1.0 + rng.random_range(-0.02..0.02));

    let power: Vec<(f64, f64)> = (0..20)
        .map(|k| {
            let x = 0.1 * 1.25f64.powi(k);
            (x, noisy(0.2 * x.powf(0.85)))
        })
        .collect();
    let f = fit_power(&power)?;
    println!(
        "power      : a = {:.4}, b = {:.4}, R² = {:.5}",
        f.amplitude,
        f.exponent,
        f.r_squared.unwrap_or(f64::NAN)
    );

    let exponential: Vec<(f64, f64)> = (0..20)
        .map(|k| {
            let x = 0.25 * k as f64;
            (x, noisy(0.7 * (-0.15 * x).exp()))
        })
        .collect();
    let f = fit_exponential(&exponential)?;
    println!(
        "exponential: a = {:.4}, b = {:.4}, R² = {:.5}",
        f.amplitude,
        f.exponent,
        f.r_squared.unwrap_or(f64::NAN)
    );

    let counts: Vec<f64> = (0..20).map(|k| (1000.0 / (1.0 + k as f64)).round()).collect();
    let f = fit_weighted(Family::Power, &power, &counts)?;
    println!("power, count-weighted: b = {:.4}", f.exponent);
    Ok(())
}
