use indirect_coulomb::bound_constants::{beta, maximize_h, a_from_a_tilde};
use indirect_coulomb::coulomb::direct_term;
use indirect_coulomb::density::{gaussian_l, DensityProfile};
use indirect_coulomb::{F32DensityProfile, F32TheoremConstants};

#[test]
fn constants_in_f32() {
    assert!((beta::<f32>() - 5.904_517).abs() < 1e-5);
    let tc = F32TheoremConstants::for_exponents(2.0, 0.5).unwrap();
    let a = a_from_a_tilde(tc.a_tilde_sq, &tc.params).unwrap();
    let m = maximize_h(2.0f32, a, tc.b_tilde_sq).unwrap();
    assert!((m.h_max - 1.0).abs() < 1e-5);
    assert!((m.sigma_star - 2.0 / 3.0).abs() < 1e-5);
}

#[test]
fn functionals_in_f32_track_f64() {
    let rho32: F32DensityProfile = DensityProfile::normalized_gaussian(2.0f32, 1.5, [0.0, 0.0]).unwrap();
    let rho64 = DensityProfile::normalized_gaussian(2.0f64, 1.5, [0.0, 0.0]).unwrap();
    let l32 = rho32.evaluate_l().unwrap().value;
    let l64 = rho64.evaluate_l().unwrap().value;
    assert!(((l32 as f64) / l64 - 1.0).abs() < 1e-5);
    assert!(((l32 / gaussian_l(2.0f32 * 1.5 / std::f32::consts::PI, 1.5)) - 1.0).abs() < 1e-5);
    let d32 = direct_term(&rho32).unwrap().value;
    let d64 = direct_term(&rho64).unwrap().value;
    assert!(((d32 as f64) / d64 - 1.0).abs() < 1e-4);
}
