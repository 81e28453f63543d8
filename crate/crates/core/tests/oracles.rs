//! The mode-by-mode assembled second variation against the deformed immersion, by exact jets
//! and by finite differences of the full conformal-class computation.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tori::cli::verify::admissible_field;
use tori::elastica::{homogeneous_torus, TorusImmersion, TwoLobeSolver};
use tori::spectral::fd_second_derivative;
use tori::stability::hessian_form;
use tori::surface::{first_order_tau, Deformation};

fn compare(t: &TorusImmersion, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = admissible_field(t, 3, 2, &mut rng).unwrap();
    let (_, constraint) = first_order_tau(t, &phi).unwrap();
    assert!(constraint.abs() < 1e-12, "field is not admissible: {constraint:e}");
    let assembled = hessian_form(t, &phi, 32).unwrap();
    let d = Deformation::new(t, &phi, 16).unwrap();
    let jets = d.lagrangian_second_variation().unwrap();
    let fd = fd_second_derivative(|h| d.lagrangian_at(h).unwrap(), 0.02, 5).value;
    assert!((assembled - jets).abs() < 1e-8 * jets.abs().max(1.0), "b = {}: {assembled} vs jets {jets}", t.b);
    assert!((assembled - fd).abs() < 1e-4 * fd.abs(), "b = {}: {assembled} vs fd {fd}", t.b);
}

#[test]
fn clifford_and_homogeneous() {
    compare(&homogeneous_torus(1.0, 256).unwrap(), 1);
    compare(&homogeneous_torus(2.5, 256).unwrap(), 2);
}

#[test]
fn two_lobe_branch() {
    let mut s = TwoLobeSolver::default();
    for (i, b) in [2.0, 3.0].into_iter().enumerate() {
        compare(&s.torus(b, 256).unwrap(), 10 + i as u64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn assembled_form_is_quadratic(seed in 0u64..1000, c in -3.0f64..3.0) {
        let t = homogeneous_torus(1.5, 128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phi = admissible_field(&t, 3, 2, &mut rng).unwrap();
        let h1 = hessian_form(&t, &phi, 16).unwrap();
        let hc = hessian_form(&t, &phi.scale(c), 16).unwrap();
        prop_assert!((hc - c * c * h1).abs() <= 1e-10 * (1.0 + (c * c * h1).abs()));
    }
}
