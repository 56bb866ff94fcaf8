use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use nscs_core::coherent::{extract_angles, DeviationMatrix};
use nscs_core::geometric::{case_path, numeric_geometric_phase, PhaseCase};
use nscs_core::nmr::{composite_z_rotation, direct_z_rotation, simulate_program, PulseEvent, SystemParams};
use nscs_core::spin::SpinOperators;
use nscs_core::{
    build_coherent_state, density_matrix_elements, fidelity, husimi_q, CoherentAngles, SpinValue, C64,
};

fn spin() -> impl Strategy<Value = SpinValue> {
    (1u32..=10).prop_map(|t| SpinValue::new(t).unwrap())
}

fn interior() -> impl Strategy<Value = CoherentAngles> {
    (0.05f64..PI - 0.05, 0.0f64..TAU).prop_map(|(t, p)| CoherentAngles::new(t, p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spin_commutation_relations(j in spin()) {
        let i = C64::new(0.0, 1.0);
        let lad = SpinOperators::ladder(j);
        prop_assert!(lad.x.commutator(&lad.y).max_abs_diff(&lad.z.scale_complex(i)) < 1e-12);
        prop_assert!(lad.y.commutator(&lad.z).max_abs_diff(&lad.x.scale_complex(i)) < 1e-12);
        // I = -J flips the sign of the structure constants
        let ops = SpinOperators::nuclear(j);
        prop_assert!(ops.x.commutator(&ops.y).max_abs_diff(&ops.z.scale_complex(-i)) < 1e-12);
        let casimir = ops.squared();
        let jj = j.j() * (j.j() + 1.0);
        prop_assert!(casimir.max_abs_diff(&nscs_core::ComplexMatrix::identity(j.dimension()).scale(jj)) < 1e-11);
    }

    #[test]
    fn coherent_state_is_normalized_with_unit_bloch_vector(j in spin(), a in interior()) {
        let s = build_coherent_state(j, a);
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        let n = nscs_core::bloch_vector(&s, j);
        prop_assert!(n.distance(&a.bloch_vector()) < 1e-11);
    }

    #[test]
    fn extraction_roundtrip(j in spin(), a in interior()) {
        let got = extract_angles(&density_matrix_elements(j, a), j).unwrap();
        prop_assert!((got.theta() - a.theta()).abs() < 1e-9);
        let d = (got.phi() - a.phi()).rem_euclid(TAU);
        prop_assert!(d.min(TAU - d) < 1e-9);
    }

    #[test]
    fn fidelity_ignores_positive_scale(j in spin(), a in interior(), s in 0.01f64..5.0) {
        let dev = density_matrix_elements(j, a).to_deviation();
        let scaled = DeviationMatrix::new(dev.matrix().scale(s), nscs_core::MatrixKind::Deviation).unwrap();
        prop_assert!((fidelity(&scaled, &dev).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(j in spin(), a in interior(), b in interior()) {
        let da = DeviationMatrix::traceless(&build_coherent_state(j, a));
        let db = DeviationMatrix::traceless(&build_coherent_state(j, b));
        let fab = fidelity(&da, &db).unwrap();
        let fba = fidelity(&db, &da).unwrap();
        prop_assert!((fab - fba).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&fab));
        let neg = DeviationMatrix::new(da.matrix().scale(-2.0), nscs_core::MatrixKind::Deviation).unwrap();
        prop_assert!((fidelity(&neg, &da).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn husimi_is_blind_to_global_phase(j in spin(), a in interior(), b in interior(), alpha in 0.0f64..TAU) {
        let s = build_coherent_state(j, a);
        let grid = [a, b];
        let q1 = husimi_q(&s, j, &grid);
        let q2 = husimi_q(&s.with_global_phase(alpha), j, &grid);
        prop_assert!((q1[0] - q2[0]).abs() < 1e-12 && (q1[1] - q2[1]).abs() < 1e-12);
        prop_assert!(q1.iter().all(|q| (0.0..=1.0).contains(q)));
    }

    #[test]
    fn composite_and_direct_z_rotations_agree(two_j in 1u32..=6, angle in -10.0f64..10.0) {
        let j = SpinValue::new(two_j).unwrap();
        let c = composite_z_rotation(j, angle);
        let d = direct_z_rotation(j, angle);
        prop_assert!(c.is_unitary(1e-12));
        prop_assert!(c.max_abs_diff(&d) < 1e-11);
    }

    #[test]
    fn free_evolution_conserves_populations(two_j in 1u32..=6, a in interior(), t in 0.0f64..1e-3) {
        let j = SpinValue::new(two_j).unwrap();
        let s = build_coherent_state(j, a);
        let params = SystemParams::reference_experiment();
        let traj = simulate_program(&[PulseEvent::Delay { duration: t }], &s, &params, j).unwrap();
        let f = traj.final_state();
        for k in 0..j.dimension() {
            prop_assert!((f.amplitude(k).norm() - s.amplitude(k).norm()).abs() < 1e-12);
        }
        // ⟨Iz⟩ commutes with the quadrupolar Hamiltonian
        let e0 = traj.expectations[0];
        let e1 = traj.expectations.last().unwrap();
        prop_assert!((e0[2] - e1[2]).abs() < 1e-11);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn geometric_phase_is_gauge_invariant(
        two_j in prop::sample::select(vec![1u32, 3, 5]),
        theta in 0.1f64..PI - 0.1,
        case in prop::sample::select(PhaseCase::ALL.to_vec()),
        slope in -3.0f64..3.0,
        amp in -2.0f64..2.0,
        shift in 0.0f64..TAU,
    ) {
        let j = SpinValue::new(two_j).unwrap();
        let path = case_path(case, j, CoherentAngles::new(theta, 0.0).unwrap(), 1000).unwrap();
        let base = numeric_geometric_phase(&path).unwrap();
        let gauged = path.regauge(|p| slope * p + amp * (p + shift).sin());
        let other = numeric_geometric_phase(&gauged).unwrap();
        prop_assert!((base.geometric_phase - other.geometric_phase).abs() < 1e-6,
            "{} vs {}", base.geometric_phase, other.geometric_phase);
    }
}
