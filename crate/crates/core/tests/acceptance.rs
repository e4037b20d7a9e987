//! End-to-end acceptance criteria. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::process::ExitCode;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weakpdc::fock::{meter_quadratures, system_quadratures, FockSpace, Space};
use weakpdc::setup::{
    closed_form_gains, preselected_state, squeezed_signal_gain, two_prep_protocol, measurement_model, meter_state,
    postselection, run_experiment, PostselectMode, SetupConfig,
};
use weakpdc::weak::{
    evolve_and_postselect, evolve_and_postselect_pure, pdc_generator, pointer_shift_exact, pointer_shift_gaussian,
    recover_weak_values, ShiftRecord, WeakValue,
};
use weakpdc::{DensityOperator, Result, C64};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn criterion_1() -> Result<Verdict> {
    let (eps, alpha) = (1e-2, C64::new(1e-2, 0.0));
    let gains = closed_form_gains(alpha, eps, FRAC_1_SQRT_2)?;
    let k_ok = rel(gains.k_q, 1e6) < 1e-12;
    let a_formula = (-alpha.norm_sqr() / 2.0).exp() / alpha.norm();
    let a_ok = rel(gains.a_q, a_formula) < 1e-12 && rel(gains.a_q, 100.0) < 1e-4;
    let exact = run_experiment(&SetupConfig { alpha_re: alpha.re, epsilon: eps, ..SetupConfig::default() })?;
    verdict(
        k_ok && a_ok,
        format!(
            "K = {:.9e}, A = {:.6} (|A/100 − 1| = {:.1e}); exact run: K = {:.4e}, A = {:.3}, P = {:.4e}",
            gains.k_q,
            gains.a_q,
            rel(gains.a_q, 100.0),
            exact.amplification.k_q.unwrap_or(f64::NAN),
            exact.amplification.a_q.unwrap_or(f64::NAN),
            exact.probability.exact
        ),
    )
}

fn convergence_cfg(g: f64, q0: f64) -> SetupConfig {
    SetupConfig { alpha_re: 0.5, epsilon: 0.1, g, meter_q0: q0, ..SetupConfig::default() }
}

fn closed_residual(cfg: &SetupConfig) -> Result<(f64, f64)> {
    let r = run_experiment(cfg)?;
    let c = r.shifts.dq_closed.expect("closed form applies");
    Ok(((r.shifts.dq_exact - c).abs(), rel(r.shifts.dq_exact, c)))
}

fn criterion_2() -> Result<Verdict> {
    // coherent meter displaced to ⟨q⟩ = 1; see the vacuum-centred ratio below
    let (r1, rel1) = closed_residual(&convergence_cfg(1e-3, 1.0))?;
    let (r2, _) = closed_residual(&convergence_cfg(5e-4, 1.0))?;
    let ratio = r1 / r2;
    let (v1, _) = closed_residual(&convergence_cfg(1e-3, 0.0))?;
    let (v2, _) = closed_residual(&convergence_cfg(5e-4, 0.0))?;
    verdict(
        (3.0..=5.0).contains(&ratio) && rel1 < 0.05,
        format!(
            "residual ratio {ratio:.4} (target 4 ± 25%), relative deviation at g=1e-3 {rel1:.3e}; \
             vacuum-centred meter ratio {:.3} (g² term vanishes by symmetry)",
            v1 / v2
        ),
    )
}

/// ⟨ψ_f|A_s|ψ_i⟩/⟨ψ_f|ψ_i⟩ from explicit coherent amplitudes; only the
/// |1,0⟩ and |0,1⟩ components of ψ_f contribute.
fn ideal_weak_value_oracle(alpha: f64, eps: f64, cutoff: usize) -> C64 {
    let coherent = |beta: C64| -> Vec<C64> {
        let mut c = vec![C64::new((-beta.norm_sqr() / 2.0).exp(), 0.0)];
        for n in 1..cutoff {
            let next = c[n - 1] * beta / (n as f64).sqrt();
            c.push(next);
        }
        c
    };
    let b1 = C64::new(alpha * (1.0 - eps) * FRAC_1_SQRT_2, 0.0);
    let b2 = C64::new(0.0, alpha * (1.0 + eps) * FRAC_1_SQRT_2);
    let (c1, c2) = (coherent(b1), coherent(b2));
    // A|n⟩ = i(√n|n−1⟩ − √(n+1)|n+1⟩)/√2, so ⟨m|A|ψ⟩ = i(√(m+1)c_{m+1} − √m c_{m−1})/√2
    let a_row = |c: &[C64], m: usize| {
        let up = ((m + 1) as f64).sqrt() * c[m + 1];
        let down = if m > 0 { (m as f64).sqrt() * c[m - 1] } else { C64::new(0.0, 0.0) };
        C64::new(0.0, FRAC_1_SQRT_2) * (up - down)
    };
    let i = C64::new(0.0, 1.0);
    // ⟨ψ_f| = (⟨1,0| + i⟨0,1|)/√2
    let num = (c1[1] * a_row(&c2, 0) + i * c1[0] * a_row(&c2, 1)) * FRAC_1_SQRT_2;
    let den = (c1[1] * c2[0] + i * c1[0] * c2[1]) * FRAC_1_SQRT_2;
    num / den
}

fn criterion_3() -> Result<Verdict> {
    let base = SetupConfig { alpha_re: 0.1, epsilon: 1e-2, ..SetupConfig::default() };
    let ideal = run_experiment(&base)?.weak_values.a_numeric.value();
    let thr = run_experiment(&SetupConfig { postselect: PostselectMode::Threshold, ..base.clone() })?
        .weak_values
        .a_numeric
        .value();
    let oracle = ideal_weak_value_oracle(0.1, 1e-2, 8);
    let ok_ideal = rel(ideal.re, -500.05) < 1e-3 && ideal.im.abs() < 1e-3 * 500.05;
    let ok_oracle = (ideal - oracle).norm() / oracle.norm() < 1e-12;
    let ok_thr = rel(thr.re, -500.10) < 1e-3 && thr.im.abs() < 1e-3 * 500.10;
    verdict(
        ok_ideal && ok_oracle && ok_thr,
        format!(
            "ideal A_w = {:.6} (oracle {:.6}, deviation from −500.05 {:.1e}); threshold A_w = {:.6} (deviation from −500.10 {:.1e})",
            ideal.re,
            oracle.re,
            rel(ideal.re, -500.05),
            thr.re,
            rel(thr.re, -500.10)
        ),
    )
}

fn criterion_4() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = 1e-6;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut draw = || WeakValue(C64::from_polar(10f64.powf(rng.random_range(-2.0..3.0)), rng.random_range(0.0..2.0 * PI)));
        let (a, b) = (draw(), draw());
        let rec = |dq: f64| {
            let (sq, sp) = pointer_shift_gaussian(a, b, dq * dq, 0.25 / (dq * dq), g);
            ShiftRecord::new(dq, sq, sp)
        };
        let (ra, rb) = recover_weak_values(&rec(FRAC_1_SQRT_2)?, &rec(0.4)?, g)?;
        worst = worst
            .max((ra.value() - a.value()).norm() / a.value().norm())
            .max((rb.value() - b.value()).norm() / b.value().norm());
    }
    let protocol = two_prep_protocol(&SetupConfig::default(), FRAC_1_SQRT_2, 0.4)?;
    let (ea, eb) = (protocol.a_rel_error_closed.unwrap(), protocol.b_rel_error_closed.unwrap());
    verdict(
        worst < 1e-9 && ea < 0.05 && eb < 0.05,
        format!(
            "synthetic worst relative error {worst:.2e}; full pipeline A_w = {:.4}{:+.4}i, B_w = {:.4}{:+.4}i (errors {ea:.2e}, {eb:.2e})",
            protocol.a_recovered.re(),
            protocol.a_recovered.im(),
            protocol.b_recovered.re(),
            protocol.b_recovered.im()
        ),
    )
}

fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    m.singular_values().max()
}

fn criterion_5() -> Result<Verdict> {
    let (s, d) = (FockSpace::new(6)?, FockSpace::new(10)?);
    let safe = Space::product(&[s, d])?.safe_indices(1);
    let generator = |phi: f64| {
        let (a, b) = system_quadratures(s, phi);
        let (q, p) = meter_quadratures(d, phi);
        (&a.kron(&p) + &b.kron(&q)).restrict(&safe)
    };
    let reference = generator(0.0);
    let pdc = pdc_generator(s, d).restrict(&safe);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut w_ref, mut w_pdc): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let h = generator(rng.random_range(-PI..PI));
        w_ref = w_ref.max(spectral_norm(&(&h - &reference)));
        w_pdc = w_pdc.max(spectral_norm(&(&h - &pdc)));
    }
    verdict(
        w_ref <= 1e-10 && w_pdc <= 1e-10,
        format!("max ‖H(φ) − H(0)‖ = {w_ref:.2e}, max ‖H(φ) − (a_s a_d + h.c.)‖ = {w_pdc:.2e}"),
    )
}

fn criterion_6() -> Result<Verdict> {
    let cfg = convergence_cfg(1e-3, 1.0);
    let model = measurement_model(&cfg)?;
    let psi_i = preselected_state(&cfg)?;
    let phi = meter_state(&cfg)?;
    let (sp, s) = cfg.system_modes()?;
    let psi_f = weakpdc::setup::dark_port_photon(sp, s);
    let (pure, p_pure) = evolve_and_postselect_pure(&model, &psi_i, &phi, &psi_f)?;
    let rho_d = DensityOperator::from_pure(&phi);
    let general = evolve_and_postselect(&model, &DensityOperator::from_pure(&psi_i), &rho_d, &postselection(&cfg)?)?;
    let pure_rho = DensityOperator::from_pure(&pure);
    let state_dev = (pure_rho.matrix() - general.meter.matrix()).camax() / p_pure;
    let mut shift_dev: f64 = 0.0;
    for m in [model.q(), model.p()] {
        let a = pointer_shift_exact(m, &pure_rho, &rho_d)?;
        let b = pointer_shift_exact(m, &general.meter, &rho_d)?;
        shift_dev = shift_dev.max((a - b).abs());
    }
    let thr = |eta: f64| run_experiment(&SetupConfig { postselect: PostselectMode::Threshold, eta, ..cfg.clone() });
    let full = thr(1.0)?;
    let (mut eta_shift, mut eta_slope): (f64, f64) = (0.0, 0.0);
    for eta in [0.8, 0.5, 0.1] {
        let r = thr(eta)?;
        eta_shift = eta_shift
            .max(rel(r.shifts.dq_exact, full.shifts.dq_exact))
            .max(rel(r.shifts.dp_exact, full.shifts.dp_exact));
        eta_slope = eta_slope.max(rel(r.probability.exact / eta, full.probability.exact));
    }
    verdict(
        state_dev < 1e-12 && shift_dev < 1e-12 && eta_shift < 1e-10 && eta_slope < 1e-10,
        format!(
            "meter state deviation {state_dev:.1e}, shift deviation {shift_dev:.1e}; η: shift change {eta_shift:.1e}, slope deviation {eta_slope:.1e}"
        ),
    )
}

fn criterion_7() -> Result<Verdict> {
    let r = run_experiment(&SetupConfig { alpha_re: 0.1, epsilon: 1e-2, ..SetupConfig::default() })?;
    let lead = 1e-4 * 1e-2;
    let dev = rel(r.probability.exact, lead);
    let res = |g: f64| -> Result<f64> { Ok(run_experiment(&convergence_cfg(g, 1.0))?.agreement.p_exact_minus_first_order.abs()) };
    let ratio = res(1e-3)? / res(5e-4)?;
    verdict(
        dev < 0.05 && (3.0..=5.0).contains(&ratio),
        format!("P_exact = {:.6e} vs ε²|α|² = {lead:.1e} (deviation {dev:.2e}); first-order residual ratio under g → g/2: {ratio:.4}", r.probability.exact),
    )
}

fn criterion_8() -> Result<Verdict> {
    let base = SetupConfig::default();
    let mut per_unit = Vec::new();
    let mut worst: f64 = 0.0;
    for dq in [1.0, 2.0, 5.0] {
        let r = run_experiment(&SetupConfig { meter_dq: dq, ..base.clone() })?;
        let c = r.shifts.dq_closed.expect("closed form applies");
        per_unit.push(c / (dq * dq + 0.5));
        worst = worst.max(rel(r.shifts.dq_exact, c));
    }
    let tracks = per_unit.iter().all(|u| rel(*u, per_unit[0]) < 1e-12);
    let alpha = base.alpha();
    let coherent = FRAC_1_SQRT_2;
    let gain = squeezed_signal_gain(10.0 * coherent, alpha, base.epsilon) / squeezed_signal_gain(coherent, alpha, base.epsilon);
    let full = closed_form_gains(alpha, base.epsilon, 10.0 * coherent)?.k_q / closed_form_gains(alpha, base.epsilon, coherent)?.k_q;
    verdict(
        tracks && worst < 0.05 && rel(gain, 100.0) < 0.01,
        format!(
            "closed δq ∝ Δq² + ½: {tracks}; worst exact deviation {worst:.2e}; ×10 squeezing gain {gain:.4} \
             (with the full Δq² + ½ law: {full:.2})"
        ),
    )
}

fn criterion_9() -> Result<Verdict> {
    let cfg = |g: f64| SetupConfig {
        alpha_re: 0.5,
        epsilon: 0.1,
        g,
        meter_dq: 1.0,
        meter_angle: FRAC_PI_4,
        ..SetupConfig::default()
    };
    let residuals = |g: f64| -> Result<(f64, f64, f64)> {
        let r = run_experiment(&cfg(g))?;
        let (a_w, b_w) = (r.weak_values.a_numeric, r.weak_values.b_numeric);
        let (_, gp) = pointer_shift_gaussian(a_w, b_w, r.meter.var_q, r.meter.var_p, g);
        let scale = a_w.value().norm().max(b_w.value().norm());
        let tol = (g * scale).powi(2) * r.meter.var_q.max(r.meter.var_p);
        Ok(((r.shifts.dp_exact - r.shifts.dp_first_order).abs(), (r.shifts.dp_exact - gp).abs(), tol))
    };
    let (full1, reduced1, tol) = residuals(1e-3)?;
    let (full2, reduced2, _) = residuals(5e-4)?;
    let cov = run_experiment(&cfg(1e-3))?.meter.cov_sym;
    verdict(
        cov.abs() > 0.1 && full1 <= tol && reduced1 > tol && full1 / full2 >= 3.0 && (reduced1 / reduced2 - 2.0).abs() < 0.1,
        format!(
            "cov = {cov:.4}, g² tolerance {tol:.2e}: general form misses by {full1:.2e} (ratio {:.2} under g/2), \
             covariance-free form by {reduced1:.2e} (ratio {:.2})",
            full1 / full2,
            reduced1 / reduced2
        ),
    )
}

type Criterion = fn() -> Result<Verdict>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("headline amplification point", criterion_1),
        ("exact vs first-order convergence", criterion_2),
        ("weak-value oracle", criterion_3),
        ("inversion round trip", criterion_4),
        ("quadrature-angle invariance", criterion_5),
        ("rank-one and efficiency equivalence", criterion_6),
        ("success probability", criterion_7),
        ("squeezed-meter scaling", criterion_8),
        ("anticommutator term", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!("criterion {} [{}] {name}: {detail}", k + 1, if pass { "PASS" } else { "FAIL" });
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
