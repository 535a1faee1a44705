use obsrel_core::channel::{verify_nondisturbing, verify_one_side_broadcast};
use obsrel_core::feasibility::{dykstra_solve, FeasibilityProblem, SolverOptions, SolverStatus};
use obsrel_core::joint::noisy_joint;
use obsrel_core::linalg::{eigh, is_psd, partial_trace, sqrt_psd, tensor};
use obsrel_core::povm::{common_eigenbasis, mutually_commuting};
use obsrel_core::relations::{
    classify_qubit_pair, incompatibility_robustness, validate_joint, RelationOptions, Status,
};
use obsrel_core::{
    sample, tol, Channel, ComplexMatrix, Instrument, JointObservable, OrthonormalBasis, Povm,
    ProbabilityDistribution, Relation, Subsystem,
};
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ginibre(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    sample::ginibre(rng, d, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_is_associative(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, dc in 1usize..3) {
        // small Gaussian integers keep every product exact, so equality is exact
        let mut r = rng(seed);
        let mut int = |d| ComplexMatrix::from_fn(d, d, |_, _| {
            num_complex::Complex64::new(sample::integer_in(&mut r, 0, 10) as f64 - 5.0, sample::integer_in(&mut r, 0, 10) as f64 - 5.0)
        });
        let (a, b, c) = (int(da), int(db), int(dc));
        prop_assert_eq!(tensor(&tensor(&a, &b), &c), tensor(&a, &tensor(&b, &c)));
        let mut r = rng(seed);
        let (a, b, c) = (ginibre(&mut r, da), ginibre(&mut r, db), ginibre(&mut r, dc));
        let (left, right) = (tensor(&tensor(&a, &b), &c), tensor(&a, &tensor(&b, &c)));
        prop_assert!(left.distance(&right) <= 1e-14 * left.frobenius_norm());
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
        let mut r = rng(seed);
        let (a, b) = (ginibre(&mut r, da), ginibre(&mut r, db));
        let kept = partial_trace(&tensor(&a, &b), (da, db), Subsystem::Second).unwrap();
        prop_assert!(kept.distance(&a.scale_complex(b.trace())) < 1e-12);
        let kept = partial_trace(&tensor(&a, &b), (da, db), Subsystem::First).unwrap();
        prop_assert!(kept.distance(&b.scale_complex(a.trace())) < 1e-12);
    }

    #[test]
    fn frobenius_duality_with_partial_trace(seed in any::<u64>()) {
        // ⟨M, B ⊗ C⟩ = ⟨Tr_2[M (1 ⊗ C†)], B⟩ with the contraction written as
        // an explicit index loop
        let mut r = rng(seed);
        let m = ginibre(&mut r, 6);
        let b = ginibre(&mut r, 2);
        let c = ginibre(&mut r, 3);
        let direct = m.inner(&tensor(&b, &c));
        let mut contracted = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                let mut s = num_complex::Complex64::new(0.0, 0.0);
                for k in 0..3 {
                    for l in 0..3 {
                        s += m[(i * 3 + k, j * 3 + l)] * c[(k, l)].conj();
                    }
                }
                contracted[(i, j)] = s;
            }
        }
        let via_loop = contracted.inner(&b);
        prop_assert!((direct - via_loop).norm() < 1e-10);
    }

    #[test]
    fn sqrt_of_psd_is_hermitian_psd(seed in any::<u64>(), d in 1usize..5) {
        let mut r = rng(seed);
        let m = sample::psd(&mut r, d);
        let s = sqrt_psd(&m).unwrap();
        prop_assert!(s.hermiticity_deviation() < tol::HERM);
        prop_assert!(eigh(&s).unwrap().min_value() >= -tol::PSD);
        prop_assert!((&s * &s).distance(&m) < 1e-10 * m.frobenius_norm().max(1.0));
    }

    #[test]
    fn noise_mixing_keeps_validity(seed in any::<u64>(), d in 2usize..5, n in 1usize..5, lambda in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let a = sample::povm(&mut r, d, n, None);
        let t = ProbabilityDistribution::new(a.outcomes().to_vec(), sample::simplex(&mut r, n)).unwrap();
        prop_assert!(a.mix_with_trivial(lambda, &t).unwrap().validate().passed);
    }

    #[test]
    fn self_commutation_matches_commutativity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = sample::unitary(&mut r, 3);
        let a = sample::varied_povm(&mut r, &u);
        prop_assert_eq!(mutually_commuting(&a, &a).unwrap().commuting, a.is_commutative().commuting);
    }

    #[test]
    fn common_basis_diagonalizes(seed in any::<u64>(), d in 2usize..5) {
        let mut r = rng(seed);
        let u = sample::unitary(&mut r, d);
        let a = sample::diagonal_povm(&mut r, &u, 3);
        let b = sample::diagonal_povm(&mut r, &u, 2);
        let t = Povm::trivial(d, &ProbabilityDistribution::uniform(&sample::labels(2)));
        let common = common_eigenbasis(&[&a, &b, &t], &mut r).unwrap();
        for p in [&a, &b, &t] {
            for e in p.effects() {
                prop_assert!(common.basis.represent(e).max_off_diagonal() < tol::NUM);
            }
        }
    }

    #[test]
    fn constructed_channels_are_valid(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let eta = sample::state(&mut r, d);
        let u = sample::unitary(&mut r, d);
        let j = obsrel_core::joint::luders_sequential_joint(
            &sample::povm(&mut r, d, 2, None),
            &sample::povm(&mut r, d, 3, None),
        ).unwrap();
        let channels = [
            Channel::product(d, &eta, Subsystem::First).unwrap(),
            Channel::product(d, &eta, Subsystem::Second).unwrap(),
            Channel::diagonal_broadcast(&OrthonormalBasis::from_columns(&u).unwrap()),
            Channel::from_joint(&j).unwrap().0,
        ];
        for c in &channels {
            prop_assert!(c.trace_preservation_residual() < tol::TRACE);
            prop_assert!(is_psd(&c.choi(), tol::PSD).unwrap().is_psd);
        }
    }

    #[test]
    fn one_side_channel_yields_joint(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let a = sample::povm(&mut r, d, 3, None);
        let t = Povm::trivial(d, &ProbabilityDistribution::new(sample::labels(2), sample::simplex(&mut r, 2)).unwrap());
        let eta = sample::state(&mut r, d);
        let c = Channel::product(d, &eta, Subsystem::Second).unwrap();
        prop_assert!(verify_one_side_broadcast(&c, &a, &t, tol::CERT).unwrap().passed);
        let mut effects = Vec::new();
        for ea in a.effects() {
            for et in t.effects() {
                effects.push(c.dual_apply(&tensor(ea, et)).unwrap().hermitian_part());
            }
        }
        let j = JointObservable::new(a.outcomes().to_vec(), t.outcomes().to_vec(), effects).unwrap();
        prop_assert!(validate_joint(&j, &a, &t, tol::CERT).unwrap().passed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn noisy_joint_of_random_pair(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let a = sample::povm(&mut r, d, 3, None);
        let b = sample::povm(&mut r, d, 2, None);
        let t1 = ProbabilityDistribution::uniform(a.outcomes());
        let t2 = ProbabilityDistribution::uniform(b.outcomes());
        let (j, at, bt) = noisy_joint(&a, &b, &t1, &t2).unwrap();
        let check = validate_joint(&j, &at, &bt, 1e-10).unwrap();
        prop_assert!(check.passed);
    }

    #[test]
    fn robustness_is_at_least_one_half(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let a = sample::povm(&mut r, d, 2, Some(1));
        let b = sample::povm(&mut r, d, 2, Some(1));
        let t1 = ProbabilityDistribution::uniform(a.outcomes());
        let t2 = ProbabilityDistribution::uniform(b.outcomes());
        let rob = incompatibility_robustness(&a, &b, &t1, &t2, 1e-2, &RelationOptions::default()).unwrap();
        prop_assert!(rob.lambda >= 0.5 - 1e-2);
        prop_assert!(rob.lambda <= rob.upper);
    }

    #[test]
    fn solver_feasible_grids_are_joints(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = sample::povm(&mut r, 2, 3, Some(1));
        let b = sample::povm(&mut r, 2, 2, Some(1));
        let ua = ProbabilityDistribution::uniform(a.outcomes());
        let ub = ProbabilityDistribution::uniform(b.outcomes());
        let (am, bm) = (a.mix_with_trivial(0.6, &ua).unwrap(), b.mix_with_trivial(0.6, &ub).unwrap());
        let p = FeasibilityProblem::from_povms(&am, &bm).unwrap();
        let out = dykstra_solve(&p, &SolverOptions::default()).unwrap();
        if out.status == SolverStatus::Feasible {
            prop_assert!(out.diagnostics.min_eigenvalue >= -tol::PSD);
            prop_assert!(out.diagnostics.marginal_residual < tol::CERT);
            let total = obsrel_core::linalg::sum(&out.grid).unwrap();
            prop_assert!(total.distance(&ComplexMatrix::identity(2)) < tol::TRACE);
        }
    }
}

#[test]
fn luders_instruments_of_commuting_pairs_do_not_disturb() {
    let mut r = rng(11);
    for d in 2..=4 {
        for _ in 0..10 {
            let u = sample::unitary(&mut r, d);
            let a = sample::diagonal_povm(&mut r, &u, 3);
            let b = sample::diagonal_povm(&mut r, &u, 2);
            let la = Instrument::luders(&a).unwrap();
            let lb = Instrument::luders(&b).unwrap();
            assert!(verify_nondisturbing(&la, &b, tol::CERT).unwrap().passed);
            assert!(verify_nondisturbing(&lb, &a, tol::CERT).unwrap().passed);
        }
    }
}

#[test]
fn half_noise_deformations_are_feasible() {
    let mut r = rng(12);
    for _ in 0..100 {
        let (m, n) = (sample::integer_in(&mut r, 2, 4), sample::integer_in(&mut r, 2, 4));
        let a = sample::povm(&mut r, 2, m, Some(1));
        let b = sample::povm(&mut r, 2, n, Some(1));
        let ua = ProbabilityDistribution::uniform(a.outcomes());
        let ub = ProbabilityDistribution::uniform(b.outcomes());
        let p = FeasibilityProblem::from_povms(
            &a.mix_with_trivial(0.5, &ua).unwrap(),
            &b.mix_with_trivial(0.5, &ub).unwrap(),
        )
        .unwrap();
        assert_eq!(dykstra_solve(&p, &SolverOptions::default()).unwrap().status, SolverStatus::Feasible);
    }
}

#[test]
fn informational_completeness_survives_noise() {
    let sic = Povm::qubit_sic();
    let u = ProbabilityDistribution::uniform(sic.outcomes());
    for lambda in [0.1, 0.5, 0.9] {
        assert!(sic.mix_with_trivial(lambda, &u).unwrap().is_informationally_complete().complete);
    }
    assert!(!sic.mix_with_trivial(0.0, &u).unwrap().is_informationally_complete().complete);
}

#[test]
fn qubit_relation_equivalences() {
    let mut r = rng(13);
    let opts = RelationOptions::default();
    let mut commuting_nontrivial = 0;
    for _ in 0..300 {
        let u = sample::unitary(&mut r, 2);
        let a = sample::varied_povm(&mut r, &u);
        let b = sample::varied_povm(&mut r, &u);
        let report = classify_qubit_pair(&a, &b, &opts, &mut r).unwrap();
        let s = |rel| report.verdict(rel).status;
        assert_eq!(s(Relation::OneSideBroadcastable), s(Relation::MutuallyNondisturbing));
        assert_eq!(s(Relation::MutuallyNondisturbing), s(Relation::Nondisturbing));
        let mc = mutually_commuting(&a, &b).unwrap().commuting;
        if mc && !a.is_trivial().trivial && !b.is_trivial().trivial {
            commuting_nontrivial += 1;
            assert_eq!(s(Relation::Broadcastable), Status::Holds);
        }
    }
    assert!(commuting_nontrivial > 20);
}
