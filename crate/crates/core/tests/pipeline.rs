use toral_core::centralizer::{find_units, GeneratorSet, UnitSearchConfig};
use toral_core::conjugacy::{
    check_splitting_grid, solve_franks_manning, verify_equivariance, BlockFrame, PerturbedMap, SolverConfig, TrigTerm,
};
use toral_core::exact::{IntMatrix, IntPolynomial, ToralMatrix};
use toral_core::hypothesis::{theorem_1_1_check, CheckConfig, HypothesisError};
use toral_core::lyapunov::{coarse_spaces, default_tolerance, exponent_functionals, weyl_chambers, DEFAULT_MARGIN};

fn companion(c: &[i64]) -> ToralMatrix {
    ToralMatrix::new(IntMatrix::companion(&IntPolynomial::from_i64(c)).unwrap()).unwrap()
}

#[test]
fn cat_map_violates_rank_hypothesis() {
    let a = ToralMatrix::parse("2\n2 1\n1 1\n").unwrap();
    let err = theorem_1_1_check(&a, &CheckConfig::default()).unwrap_err();
    assert!(matches!(err, HypothesisError::HypothesisViolation(ref m) if m.contains("rank 1")), "{err}");
}

#[test]
fn generator_set_round_trips_through_text() {
    let gs = find_units(&companion(&[-1, -3, 0, 1]), &UnitSearchConfig::default()).unwrap();
    let text = gs.to_string();
    let back = GeneratorSet::parse(&text).unwrap();
    assert_eq!(back.generators(), gs.generators());
}

#[test]
fn linear_cartan_action_is_its_own_conjugate() {
    let gs = find_units(&companion(&[-1, -3, 0, 1]), &UnitSearchConfig::default()).unwrap();
    let maps: Vec<PerturbedMap> = gs.generators().iter().cloned().map(PerturbedMap::linear_only).collect();
    let r = solve_franks_manning(&maps[0], &SolverConfig { resolution: 8, ..Default::default() }).unwrap();
    let rep = verify_equivariance(&r.w, &gs, &maps, 0, 1e-12).unwrap();
    assert!(rep.commuting && rep.residuals.iter().all(|v| *v < 1e-12));
}

#[test]
fn conjugacy_of_linear_map_respects_coarse_splitting() {
    let a = companion(&[-1, -3, 0, 1]);
    let gs = find_units(&a, &UnitSearchConfig::default()).unwrap();
    let fs = exponent_functionals(&gs, 128).unwrap();
    let cs = coarse_spaces(&fs, default_tolerance(128)).unwrap();
    assert_eq!(weyl_chambers(&cs, DEFAULT_MARGIN).unwrap().len(), 6);
    let frame = BlockFrame::from_coarse(&cs);
    let r = solve_franks_manning(&PerturbedMap::linear_only(a), &SolverConfig { resolution: 8, ..Default::default() }).unwrap();
    assert!(check_splitting_grid(&r.w, &frame, &frame, 20, 1e-9).confirmed);
}

#[test]
fn perturbed_cat_conjugacy_has_holder_estimate() {
    let a = ToralMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap();
    let pm = PerturbedMap::trig(a, vec![TrigTerm::sin(&[1, 0], &[0.05, 0.0])]);
    let r = solve_franks_manning(&pm, &SolverConfig { resolution: 64, ..Default::default() }).unwrap();
    assert!(r.residual < 1e-9);
    let theta = r.holder.theta;
    assert!(theta > 0.0 && theta <= 1.2, "θ = {theta}");
}
