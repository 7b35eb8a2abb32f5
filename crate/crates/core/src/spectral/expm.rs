//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham, 2005).

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{KuramotoError, Result};

type C64 = Complex<f64>;

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152e0;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
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
const PADE_13: [f64; 14] = [
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

// Beyond this many squarings the result cannot be represented in f64.
const MAX_SQUARINGS: i32 = 1100;

fn one_norm(m: &DMatrix<C64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scale(m: &DMatrix<C64>, s: f64) -> DMatrix<C64> {
    m.map(|z| z * s)
}

/// Low-degree approximant: `U = A * sum b_odd A^(k-1)`, `V = sum b_even A^k`.
fn pade_low(a: &DMatrix<C64>, b: &[f64]) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = a.nrows();
    let ident = DMatrix::<C64>::identity(n, n);
    let a2 = a * a;
    let mut power = ident.clone();
    let mut u_inner = scale(&ident, b[1]);
    let mut v = scale(&ident, b[0]);
    for k in (2..b.len()).step_by(2) {
        power = &power * &a2;
        v += scale(&power, b[k]);
        if k + 1 < b.len() {
            u_inner += scale(&power, b[k + 1]);
        }
    }
    (a * u_inner, v)
}

fn pade_13(a: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let b = &PADE_13;
    let n = a.nrows();
    let ident = DMatrix::<C64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_hi = scale(&a6, b[13]) + scale(&a4, b[11]) + scale(&a2, b[9]);
    let u_inner = &a6 * u_hi
        + scale(&a6, b[7])
        + scale(&a4, b[5])
        + scale(&a2, b[3])
        + scale(&ident, b[1]);
    let v_hi = scale(&a6, b[12]) + scale(&a4, b[10]) + scale(&a2, b[8]);
    let v = &a6 * v_hi + scale(&a6, b[6]) + scale(&a4, b[4]) + scale(&a2, b[2]) + scale(&ident, b[0]);
    (a * u_inner, v)
}

/// `exp(M)` for a square complex matrix.
pub fn expm(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Ok(m.clone());
    }
    let norm = one_norm(m);
    if !norm.is_finite() {
        return Err(KuramotoError::ExpmOverflow { scaled_norm: norm });
    }

    let solve = |u: DMatrix<C64>, v: DMatrix<C64>| -> Result<DMatrix<C64>> {
        let p = &v + &u;
        let q = v - u;
        q.lu()
            .solve(&p)
            .ok_or(KuramotoError::ExpmOverflow { scaled_norm: norm })
    };

    for &(degree, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match degree {
                3 => &PADE_3,
                5 => &PADE_5,
                7 => &PADE_7,
                _ => &PADE_9,
            };
            let (u, v) = pade_low(m, coeffs);
            return finite_or_overflow(solve(u, v)?, norm);
        }
    }

    let squarings = (norm / THETA_13).log2().ceil().max(0.0) as i32;
    if squarings > MAX_SQUARINGS {
        return Err(KuramotoError::ExpmOverflow { scaled_norm: norm });
    }
    let scaled = scale(m, 2f64.powi(-squarings));
    let (u, v) = pade_13(&scaled);
    let mut result = solve(u, v)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    finite_or_overflow(result, norm)
}

fn finite_or_overflow(m: DMatrix<C64>, norm: f64) -> Result<DMatrix<C64>> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(m)
    } else {
        Err(KuramotoError::ExpmOverflow { scaled_norm: norm })
    }
}

/// `exp(t K) x0`.
pub fn expm_action(k: &DMatrix<C64>, x0: &DVector<C64>, t: f64) -> Result<DVector<C64>> {
    assert_eq!(k.ncols(), x0.len(), "dimension mismatch");
    if t == 0.0 {
        return Ok(x0.clone());
    }
    let e = expm(&scale(k, t))?;
    Ok(e * x0)
}
