mod common;

use proptest::prelude::*;
use symppt::classify::{certify, classify_by_ranks, separability_certificate, Verdict, GRAM_MAX_TERMS};
use symppt::construct::{
    apply_filter_f, apply_filter_f2, FilterChain,
    lift, max_subtraction_weight, run_pipeline, subtract_product, subtraction_curve, OmegaScale, PipelineConfig,
    ProjectorScale,
};
use symppt::extremal::{
    build_fixed_point_system, extremal_search, extremality_test, solution_space, SearchConfig,
};
use symppt::hilbert::{rank_profile, rank_vector, three_rank};
use symppt::horodecki::{rho_db, HorodeckiParams};
use symppt::linalg::{c, frobenius, kron_vec, min_eigenvalue, CVector, RMatrix, RVector};
use symppt::{Alpha, ThreeRank, Tolerances};

use common::random_ppt_states;

fn example_config() -> PipelineConfig {
    PipelineConfig {
        omega_scale: OmegaScale::DoubledUnnormalized,
        ..PipelineConfig::four_qubit_example()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn horodecki_states_are_ppt_with_unit_trace(d in 2usize..=8, b in 0.0f64..=1.0) {
        let rho = rho_db(&HorodeckiParams::new(d, b).unwrap());
        prop_assert!(min_eigenvalue(&rho.matrix) >= -1e-10);
        prop_assert!(min_eigenvalue(&rho.partial_transpose_a()) >= -1e-10);
        prop_assert!((rho.trace() - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn walk_ranks_strictly_decrease(seed in 0u64..10_000) {
        let tol = Tolerances::default();
        let trace = extremal_search(seed, &SearchConfig::four_qubit_default(), &tol).unwrap();
        let mut prev: usize = trace.start_ranks.iter().sum();
        for st in &trace.steps {
            let s: usize = st.ranks.iter().sum();
            prop_assert!(s < prev);
            prev = s;
        }
        prop_assert_eq!(trace.terminal.solution_dim, 1);
        let again = extremality_test(&trace.terminal_state, &tol).unwrap();
        prop_assert_eq!(again.solution_dim, 1);
        prop_assert_eq!(again.ranks, trace.terminal.ranks);
    }

    #[test]
    fn subtraction_keeps_ppt_and_drops_a_rank(re in -10.0f64..10.0, branch in 0usize..4) {
        let tol = Tolerances::default();
        let res = run_pipeline(&PipelineConfig { subtraction: None, ..example_config() }).unwrap();
        let rho = res.lifted;
        let curve = subtraction_curve(&rho, &tol).unwrap().expect("(5,8,8) lift has a curve");
        let pts = curve.points_at_real_part(re);
        prop_assume!(!pts.is_empty());
        let alpha = Alpha::Finite(pts[branch % pts.len()]);
        let w = max_subtraction_weight(&rho, alpha, &tol).unwrap();
        let out = subtract_product(&rho, alpha, w.mu_star);
        let scale = frobenius(&rho.dicke_matrix);
        prop_assert!(out.ppt_min_eigenvalues().iter().all(|&m| m >= -tol.psd_tol * scale.max(1.0) * 10.0));
        let before = rank_vector(&rho, &tol).unwrap();
        let after = rank_vector(&out, &tol).unwrap();
        prop_assert!(after.iter().zip(&before).any(|(a, b)| a < b));
    }
}

#[test]
fn pipeline_stages_stay_ppt() {
    for o in OmegaScale::ALL {
        let res = run_pipeline(&PipelineConfig { omega_scale: o, ..PipelineConfig::four_qubit_example() }).unwrap();
        for st in &res.stages {
            // before the lift only ρ and the A-side transpose are guaranteed
            let checked = if st.stage == "omega" { 2 } else { 3 };
            assert!(
                st.min_pt_eigenvalues[..checked].iter().all(|&m| m >= -1e-10),
                "{} {:?}",
                st.stage,
                st.min_pt_eigenvalues
            );
        }
    }
}

#[test]
fn lambda_monotonicity() {
    let res = run_pipeline(&example_config()).unwrap();
    for p in ProjectorScale::ALL {
        let mut prev = vec![f64::NEG_INFINITY; 3];
        for i in 0..=40 {
            let l = 0.05 * i as f64;
            let mins = lift(&res.omega, l, p).ppt_min_eigenvalues();
            for (a, b) in mins.iter().zip(&prev) {
                assert!(*a >= b - 1e-12, "λ={l}");
            }
            prev = mins;
        }
    }
}

#[test]
fn composed_fixed_points_equal_simultaneous_fixed_points() {
    let tol = Tolerances::default();
    for s in random_ppt_states(31, 30) {
        let sys = build_fixed_point_system(&s, &tol).unwrap();
        let sol = solution_space(&sys, &tol).unwrap();
        assert_eq!(sol.composed_dim, sol.intersection_dim);
        assert_eq!(sol.dim, sol.intersection_dim);
        // each basis element is fixed by every map
        for j in 0..sol.coords.ncols() {
            let x: RVector = sol.coords.column(j).into_owned();
            for p in &sys.maps {
                assert!((p * &x - &x).norm() <= 1e-8);
            }
        }
        let _: &RMatrix = &sys.composed;
    }
}

#[test]
fn rank_table_is_a_pure_function() {
    for r in 1..=5 {
        for ra in 0..=8 {
            for rab in 0..=9 {
                let tr = ThreeRank([r, ra, rab]);
                let a = classify_by_ranks(tr).unwrap();
                let b = classify_by_ranks(tr).unwrap();
                assert_eq!(a.verdict, b.verdict);
            }
        }
    }
}

#[test]
fn certificates_and_extremality_never_conflict() {
    let tol = Tolerances::default();
    let mut states = random_ppt_states(77, 40);
    states.push(run_pipeline(&example_config()).unwrap().final_state);
    for (i, s) in states.iter().enumerate() {
        let c = certify(s, i as u64, &tol).unwrap();
        let extremal_entangled = c.classification.verdict == Verdict::ExtremalEntangled;
        assert!(!(extremal_entangled && c.certificate.is_some()));
        if let Some(cert) = separability_certificate(s, i as u64, &tol).unwrap() {
            assert!(cert.reconstruction_error() <= 1e-6);
            if matches!(cert, symppt::classify::SeparabilityCertificate::Gram(_)) {
                assert!(cert.num_terms() <= GRAM_MAX_TERMS);
            }
        }
        if let Some(edge) = &c.edge {
            for v in &edge.found_vectors {
                assert!(v.residuals.iter().all(|&r| r <= 1e-8));
            }
        }
        let _ = three_rank(s, &tol).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn filtered_ranges_contain_product_vectors(re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let tol = Tolerances::default();
        let cfg = PipelineConfig::four_qubit_example();
        let chain = FilterChain::new(5, 4, 0.5, &cfg.gammas).unwrap();
        let rho = rho_db(&HorodeckiParams::new(5, 0.5).unwrap());
        let f1 = apply_filter_f(&rho, &chain).unwrap();
        let f2 = apply_filter_f2(&f1, &chain).unwrap();
        let a = c(re, im);
        for (stage, d) in [(&f1, 5usize), (&f2, 4)] {
            let local = CVector::from_fn(d, |i, _| a.powu((d - 1 - i) as u32));
            let v = kron_vec(&CVector::from_column_slice(&[c(1.0, 0.0), a]), &local);
            let prof = rank_profile(&stage.matrix, &tol).unwrap();
            prop_assert!(prof.range_residual(&(&v / c(v.norm(), 0.0))) <= 1e-8);
            prop_assert!(min_eigenvalue(&stage.partial_transpose_a()) >= -1e-10 * frobenius(&stage.matrix));
        }
    }
}
