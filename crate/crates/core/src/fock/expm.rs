//! Matrix exponentials: dense scaling-and-squaring with Padé approximants
//! (Higham 2005 degree selection), and a Taylor-series action exp(X)·V for
//! large sparse generators where forming exp(X) is wasteful.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::operator::Operator;
use crate::error::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade_low(a: &DMatrix<C64>, b: &[f64]) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = a.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let a2 = a * a;
    let mut u_inner = &id * C64::from(b[1]);
    let mut v = &id * C64::from(b[0]);
    let mut pow = id.clone();
    for k in 1..b.len() / 2 {
        pow = &pow * &a2;
        u_inner += &pow * C64::from(b[2 * k + 1]);
        v += &pow * C64::from(b[2 * k]);
    }
    (a * u_inner, v)
}

fn pade_13(a: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = a.nrows();
    let id = DMatrix::<C64>::identity(n, n);
    let b = |k: usize| C64::from(B13[k]);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_hi = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u_inner = &a6 * u_hi + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let v_hi = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * v_hi + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);
    (a * u_inner, v)
}

/// exp(X) for a dense complex matrix.
pub fn expm_dense(x: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    if !x.is_square() {
        return Err(Error::invalid("matrix exponential needs a square matrix"));
    }
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite entry in exponent".into()));
    }
    let n = x.nrows();
    if n == 0 {
        return Ok(x.clone());
    }
    let norm = one_norm(x);
    for (m, theta) in THETA {
        if norm <= theta {
            let b: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(x, b);
            return solve_pade(u, v);
        }
    }
    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = x * C64::from(0.5f64.powi(squarings));
    let (u, v) = pade_13(&scaled);
    let mut r = solve_pade(u, v)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

fn solve_pade(u: DMatrix<C64>, v: DMatrix<C64>) -> Result<DMatrix<C64>> {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::Numerical("singular Padé denominator".into()))
}

pub fn matrix_exponential(x: &Operator) -> Result<Operator> {
    let m = expm_dense(x.matrix())?;
    Operator::from_matrix(x.space().clone(), m)
}

/// exp(X)·V where `apply` computes X·W and `norm_bound` ≥ ‖X‖ in any
/// consistent operator norm. The interval is split so each step has norm
/// at most one, and each step's series is summed until terms drop below
/// machine precision relative to the running sum.
pub fn expm_action<F>(apply: F, norm_bound: f64, v: &DMatrix<C64>) -> Result<DMatrix<C64>>
where
    F: Fn(&DMatrix<C64>) -> DMatrix<C64>,
{
    if !norm_bound.is_finite() {
        return Err(Error::Numerical("non-finite generator norm".into()));
    }
    let steps = norm_bound.ceil().max(1.0) as usize;
    let h = C64::from(1.0 / steps as f64);
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut sum = out.clone();
        for k in 1..=60 {
            term = apply(&term) * (h / C64::from(k as f64));
            sum += &term;
            let tn = term.norm();
            if tn <= 1e-17 * sum.norm() || tn == 0.0 {
                break;
            }
        }
        out = sum;
    }
    Ok(out)
}
