use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use weakpdc::fock::expm::expm_dense;
use weakpdc::fock::{
    annihilation, beamsplitter_5050, coherent_state, creation, meter_quadratures, number, BeamsplitterConvention,
    FockSpace, Operator, Space, StateVector,
};
use weakpdc::weak::{
    evolve_and_postselect_pure, pointer_shift_first_order, pointer_shift_gaussian, recover_weak_values,
    recover_weak_values_lsq, weak_value, weak_value_pure, CouplingConfig, Flag, PostselectionOperator, ShiftRecord,
    WeakMeasurement, WeakValue,
};
use weakpdc::{fock, DensityOperator, C64};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn state(dim: usize) -> impl Strategy<Value = DVector<C64>> {
    prop::collection::vec(complex(), dim).prop_filter_map("non-zero", |v| {
        let v = DVector::from_vec(v);
        (v.norm() > 1e-3).then(|| v.normalize())
    })
}

fn weak_value_strategy() -> impl Strategy<Value = WeakValue> {
    (-2.0..3.0f64, 0.0..std::f64::consts::TAU).prop_map(|(m, a)| WeakValue(C64::from_polar(10f64.powf(m), a)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ladder_commutator_is_identity_below_top(n in 2usize..20) {
        let s = FockSpace::new(n).unwrap();
        let c = &(&annihilation(s) * &creation(s)) - &(&creation(s) * &annihilation(s));
        for k in 0..n - 1 {
            prop_assert!((c.matrix()[(k, k)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
        prop_assert!((&(&creation(s) * &annihilation(s)) - &number(s)).matrix().camax() < 1e-12);
    }

    #[test]
    fn exponential_of_anti_hermitian_is_unitary(entries in prop::collection::vec(complex(), 36), t in 0.0..20.0f64) {
        let m = DMatrix::from_vec(6, 6, entries);
        let h = (&m + m.adjoint()) * C64::new(0.0, -0.5 * t);
        let u = expm_dense(&h).unwrap();
        prop_assert!((u.adjoint() * &u - DMatrix::identity(6, 6)).camax() < 1e-10);
    }

    #[test]
    fn coherent_mean_is_amplitude(alpha in complex()) {
        let s = FockSpace::new(24).unwrap();
        let psi = coherent_state(s, alpha).unwrap();
        prop_assert!((psi.expectation(&annihilation(s)).unwrap() - alpha).norm() < 1e-10);
    }

    #[test]
    fn beamsplitter_conserves_photons_below_cutoff(amps in state(16)) {
        let m = FockSpace::new(4).unwrap();
        let space = Space::product(&[m, m]).unwrap();
        let u = beamsplitter_5050(&space, BeamsplitterConvention::Symmetric).unwrap();
        // keep total photon number ≤ 3 so nothing reaches the truncation edge
        let mut v = DVector::from_element(16, C64::new(0.0, 0.0));
        for i in 0..16 {
            let occ = space.occupations(i);
            if occ[0] + occ[1] <= 3 { v[i] = amps[i]; }
        }
        prop_assume!(v.norm() > 1e-3);
        let psi = StateVector::normalized(space.clone(), v).unwrap();
        let total = &number(m).kron(&Operator::identity(m)) + &Operator::identity(m).kron(&number(m));
        let out = psi.apply(&u).unwrap();
        let before = psi.expectation(&total).unwrap().re;
        let after = StateVector::normalized(space, out.amplitudes().clone()).unwrap().expectation(&total).unwrap().re;
        prop_assert!((before - after).abs() < 1e-10);
    }

    #[test]
    fn identity_weak_value_is_one(i in state(5), f in state(5)) {
        let s = FockSpace::new(5).unwrap();
        let (i, f) = (StateVector::new(s, i).unwrap(), StateVector::new(s, f).unwrap());
        prop_assume!(f.inner(&i).norm() > 1e-3);
        let w = weak_value(&PostselectionOperator::projector(&f), &Operator::identity(s), &DensityOperator::from_pure(&i)).unwrap();
        prop_assert!((w.value() - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn inversion_round_trip(a in weak_value_strategy(), b in weak_value_strategy(), d1 in 0.2..3.0f64, d2 in 0.2..3.0f64, lg in -7.0..-2.0f64) {
        prop_assume!((d1 * d1 - d2 * d2).abs() > 0.05);
        let g = 10f64.powf(lg);
        let rec = |dq: f64| {
            let (sq, sp) = pointer_shift_gaussian(a, b, dq * dq, 0.25 / (dq * dq), g);
            ShiftRecord::new(dq, sq, sp).unwrap()
        };
        let (ra, rb) = recover_weak_values(&rec(d1), &rec(d2), g).unwrap();
        let tol = 1e-8;
        prop_assert!((ra.value() - a.value()).norm() <= tol * a.value().norm().max(b.value().norm()));
        prop_assert!((rb.value() - b.value()).norm() <= tol * a.value().norm().max(b.value().norm()));
        let lsq = recover_weak_values_lsq(&[rec(d1), rec(d2), rec(0.5 * (d1 + d2))], g).unwrap();
        prop_assert!((lsq.a_w.value() - a.value()).norm() <= tol * a.value().norm().max(b.value().norm()));
    }

    #[test]
    fn first_order_shift_is_linear_in_g(a in weak_value_strategy(), b in weak_value_strategy(), g in 1e-8..1e-3f64) {
        let mom = fock::MeterMoments { mean_q: 0.3, mean_p: -0.1, var_q: 0.7, var_p: 0.4, cov_sym: 0.2, commutator: C64::new(0.0, 1.0) };
        let (q1, p1) = pointer_shift_first_order(a, b, &mom, g, mom.commutator);
        let (q2, p2) = pointer_shift_first_order(a, b, &mom, 2.0 * g, mom.commutator);
        prop_assert!((q2 - 2.0 * q1).abs() <= 1e-12 * q2.abs().max(1e-300));
        prop_assert!((p2 - 2.0 * p1).abs() <= 1e-12 * p2.abs().max(1e-300));
    }

    #[test]
    fn flags_are_monotone(x in 0.0..2.0f64, y in 0.0..2.0f64) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        prop_assert!(Flag::classify(lo) <= Flag::classify(hi));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Exact shifts approach the first-order formulas quadratically: halving g
    /// twice shrinks the residual by at least ~4 each time (or it is already
    /// at rounding level).
    #[test]
    fn exact_shift_converges_quadratically(i in state(4), f in state(4), q0 in -0.5..0.5f64, p0 in -0.5..0.5f64) {
        let (s, d) = (FockSpace::new(4).unwrap(), FockSpace::new(28).unwrap());
        let (i, f) = (StateVector::new(s, i).unwrap(), StateVector::new(s, f).unwrap());
        prop_assume!(f.inner(&i).norm() > 0.2);
        let meter = weakpdc::gaussian_meter_state(d, &weakpdc::GaussianMeterSpec::new(q0, p0, 0.6).unwrap()).unwrap();
        let (q, p) = meter_quadratures(d, 0.0);
        let mom = fock::moments(&meter, &q, &p).unwrap();
        let a_w = weak_value_pure(&f, &weakpdc::fock::system_quadratures(s, 0.0).0, &i).unwrap();
        let b_w = weak_value_pure(&f, &weakpdc::fock::system_quadratures(s, 0.0).1, &i).unwrap();
        let rho_in = DensityOperator::from_pure(&meter);
        let residual = |g: f64| {
            let model = WeakMeasurement::quadrature(&CouplingConfig::new(g, 0.0).unwrap(), s, d);
            let (out, _) = evolve_and_postselect_pure(&model, &i, &meter, &f).unwrap();
            let out = DensityOperator::from_pure(&out);
            let dq = weakpdc::weak::pointer_shift_exact(&q, &out, &rho_in).unwrap();
            let (fo, _) = pointer_shift_first_order(a_w, b_w, &mom, g, mom.commutator);
            (dq - fo).abs()
        };
        let (r1, r2, r3) = (residual(4e-3), residual(2e-3), residual(1e-3));
        let floor = 1e-13;
        prop_assert!(r2 <= r1 / 3.0 + floor, "{r1:e} {r2:e}");
        prop_assert!(r3 <= r2 / 3.0 + floor, "{r2:e} {r3:e}");
    }
}
