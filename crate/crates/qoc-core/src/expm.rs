//! Matrix exponential by scaling and squaring with diagonal Pade
//! approximants.
//!
//! The order (3, 5, 7, 9 or 13) is selected from the 1-norm of the argument
//! against the standard backward-error thresholds; larger arguments are
//! halved `s` times so that `||A / 2^s|| <= theta_13`, then the result is
//! squared `s` times. For the step generators in this crate `||L dt||` is
//! usually well below 1, so the low orders dominate.

use num_complex::Complex64;

use crate::cmatrix::CMatrix;
use crate::math;
use crate::{Error, Result};

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
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

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Evaluate the [m/m] Pade approximant for m in {3, 5, 7, 9} given the even
/// powers A^2, A^4, ... The odd part is U = A * (odd-coefficient polynomial
/// in A^2), the even part V likewise; exp(A) ~ (V - U)^{-1} (V + U).
fn pade_low(a: &CMatrix, powers: &[CMatrix], b: &[f64]) -> Result<CMatrix> {
    let n = a.dim();
    let ident = CMatrix::identity(n);
    let mut u_poly = ident.scale(real(b[1]));
    let mut v_poly = ident.scale(real(b[0]));
    for (k, p) in powers.iter().enumerate() {
        // powers[k] = A^{2(k+1)}
        u_poly.axpy(real(b[2 * k + 3]), p);
        v_poly.axpy(real(b[2 * k + 2]), p);
    }
    let u = a.matmul(&u_poly);
    let p = v_poly.add(&u);
    let q = v_poly.sub(&u);
    q.lu_solve(&p)
}

fn pade_13(a: &CMatrix, a2: &CMatrix, a4: &CMatrix, a6: &CMatrix) -> Result<CMatrix> {
    let n = a.dim();
    let ident = CMatrix::identity(n);
    let b = &B13;
    // U = A [ A^6 (b13 A^6 + b11 A^4 + b9 A^2) + b7 A^6 + b5 A^4 + b3 A^2 + b1 I ]
    let mut w1 = a6.scale(real(b[13]));
    w1.axpy(real(b[11]), a4);
    w1.axpy(real(b[9]), a2);
    let mut w2 = a6.matmul(&w1);
    w2.axpy(real(b[7]), a6);
    w2.axpy(real(b[5]), a4);
    w2.axpy(real(b[3]), a2);
    w2.axpy(real(b[1]), &ident);
    let u = a.matmul(&w2);
    // V = A^6 (b12 A^6 + b10 A^4 + b8 A^2) + b6 A^6 + b4 A^4 + b2 A^2 + b0 I
    let mut z1 = a6.scale(real(b[12]));
    z1.axpy(real(b[10]), a4);
    z1.axpy(real(b[8]), a2);
    let mut v = a6.matmul(&z1);
    v.axpy(real(b[6]), a6);
    v.axpy(real(b[4]), a4);
    v.axpy(real(b[2]), a2);
    v.axpy(real(b[0]), &ident);
    let p = v.add(&u);
    let q = v.sub(&u);
    q.lu_solve(&p)
}

/// exp(A) for a square complex matrix.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix exponential argument"));
    }
    let norm = a.one_norm();
    if !norm.is_finite() {
        return Err(Error::NonFinite("matrix exponential argument norm"));
    }
    if norm <= THETA_3 || norm <= THETA_5 || norm <= THETA_7 || norm <= THETA_9 {
        let a2 = a.matmul(a);
        if norm <= THETA_3 {
            return pade_low(a, &[a2], &B3);
        }
        let a4 = a2.matmul(&a2);
        if norm <= THETA_5 {
            return pade_low(a, &[a2, a4], &B5);
        }
        let a6 = a4.matmul(&a2);
        if norm <= THETA_7 {
            return pade_low(a, &[a2, a4, a6], &B7);
        }
        let a8 = a6.matmul(&a2);
        return pade_low(a, &[a2, a4, a6, a8], &B9);
    }
    // Scale down to theta_13, exponentiate, square back up.
    let s = math::ceil(math::log2(norm / THETA_13)).max(0.0) as u32;
    let scaled = a.scale(real(1.0 / (1u64 << s) as f64));
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let mut e = pade_13(&scaled, &a2, &a4, &a6)?;
    for _ in 0..s {
        e = e.matmul(&e);
    }
    Ok(e)
}

/// Taylor-series exponential; an independent (slow, conditionally accurate)
/// route used only to cross-check `expm` in tests.
pub fn expm_taylor(a: &CMatrix, terms: usize) -> CMatrix {
    let n = a.dim();
    let mut sum = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..=terms {
        term = term.matmul(a).scale(real(1.0 / k as f64));
        sum = sum.add(&term);
    }
    sum
}
