//! Run the truncated Fock-space verifiers programmatically: channel
//! composition, loss/unitary commutation (with the unequal-loss
//! counterexample), the three-mode beamsplitter rewriting identity, and the
//! homodyne statistics cross-check.
//!
//! ```sh
//! cargo run --example fock_oracle
//! ```

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qread::fock::{
    mean_scale_fit, squeezed_coherent_vector, verify_bs_decomposition, verify_commutation,
    verify_composition, DensityMatrix, UnitarySpec,
};
use qread::states::SqueezedCoherentState;

/// Draw a random probe, shrinking the magnitudes whenever the state
/// constructor reports too much mass near the truncation edge.
fn probe(rng: &mut StdRng, max_energy: f64, max_r: f64, dim: usize) -> DensityMatrix {
    let (mut cap_e, mut cap_r) = (max_energy, max_r);
    loop {
        let r = rng.random_range(0.0..=cap_r);
        let a = rng.random_range(0.0..=(cap_e - r.sinh() * r.sinh()).max(0.0).sqrt());
        let phi = rng.random_range(-PI..PI);
        let theta = rng.random_range(-PI..PI);
        if let Ok(v) = squeezed_coherent_vector(a, phi, r, theta, dim) {
            return DensityMatrix::from_pure(&v);
        }
        cap_e *= 0.8;
        cap_r *= 0.8;
    }
}

fn main() {
    let mut rng = StdRng::seed_from_u64(7);

    let mut worst = 0.0f64;
    for _ in 0..10 {
        let alpha = rng.random_range(0.05..1.0);
        let beta = rng.random_range(0.05..1.0);
        let p = probe(&mut rng, 0.9, 0.15, 16);
        worst = worst.max(verify_composition(alpha, beta, 16, &[p]).unwrap());
    }
    println!("composition  E^a . E^b = E^(ab)          max distance {worst:.3e}");

    let single = probe(&mut rng, 0.8, 0.1, 12);
    let d = verify_commutation(UnitarySpec::PhaseShifter(1.2), &[0.8], 12, &[single]).unwrap();
    println!("commutation  phase shifter, eta = 0.8    distance     {d:.3e}");

    let pair = probe(&mut rng, 0.3, 0.0, 12).tensor(&probe(&mut rng, 0.3, 0.0, 12));
    let equal = verify_commutation(
        UnitarySpec::Beamsplitter(0.5),
        &[0.7, 0.7],
        12,
        std::slice::from_ref(&pair),
    )
    .unwrap();
    let unequal =
        verify_commutation(UnitarySpec::Beamsplitter(0.5), &[0.9, 0.4], 12, &[pair]).unwrap();
    println!("commutation  beamsplitter, equal loss    distance     {equal:.3e}");
    println!("commutation  beamsplitter, unequal loss  distance     {unequal:.3e}  <- hypothesis is necessary");

    let mut worst = 0.0f64;
    for _ in 0..10 {
        let alpha = rng.random_range(0.05..0.99);
        let beta = rng.random_range(0.05..0.99);
        worst = worst.max(verify_bs_decomposition(alpha, beta, 12).unwrap());
    }
    println!("decomposition three-mode splitter rewrite max distance {worst:.3e}");

    let samples: Vec<(SqueezedCoherentState, f64)> = vec![
        (SqueezedCoherentState::coherent(0.5, 0.0).unwrap(), 0.0),
        (SqueezedCoherentState::coherent(1.0, 0.0).unwrap(), 0.0),
        (SqueezedCoherentState::new(0.9, 0.4, 0.5, 1.0).unwrap(), 0.4),
        (
            SqueezedCoherentState::new(1.1, -0.2, 0.3, -0.8).unwrap(),
            -0.2,
        ),
    ];
    let fit = mean_scale_fit(&samples, 40).unwrap();
    println!(
        "homodyne     widths match the formulas 1:1 (ratio {:.9}); means carry the",
        fit.width_ratio
    );
    println!(
        "             fixed convention factor kappa = {:.9} (sqrt(2) = {:.9})",
        fit.kappa,
        std::f64::consts::SQRT_2
    );
}
