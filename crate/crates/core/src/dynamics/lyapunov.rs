use nalgebra::linalg::Schur;

use crate::{CMatrix, Error, Result, C64};

/// Solves `A X + X A^H = −Q` for a stable `A` (all eigenvalues in the open
/// left half-plane) by the complex Bartels–Stewart method.
///
/// With the Schur form `A = U T U^H` the problem becomes
/// `T Y + Y T^H = −U^H Q U`, solved column by column from the last one since
/// `T^H` is lower triangular.
pub fn solve_lyapunov(a: &CMatrix, q: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    if a.ncols() != n || q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch("Lyapunov operands must be square and equal-sized".into()));
    }
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Singular("zero generator in Lyapunov equation".into()));
    }
    // Schur iteration is scale-invariant; normalising keeps the default
    // convergence threshold meaningful for rates of order 1e12.
    let an = a * C64::new(1.0 / scale, 0.0);
    let qn = q * C64::new(1.0 / scale, 0.0);
    let x = match Schur::try_new(an.clone(), 4.0 * f64::EPSILON, 20_000) {
        Some(schur) => bartels_stewart(schur, &qn)?,
        // Rates spread over many decades stall the deflation criterion.
        None => sign_iteration(&an, &qn)?,
    };
    let residual = (&an * &x + &x * an.adjoint() + &qn).norm() / (x.norm() + qn.norm());
    if !residual.is_finite() || residual > 1e-8 {
        return Err(Error::Singular(format!("Lyapunov residual {residual:.2e}")));
    }
    Ok(x)
}

fn bartels_stewart(schur: Schur<C64, nalgebra::Dyn>, q: &CMatrix) -> Result<CMatrix> {
    let (u, t) = schur.unpack();
    let n = t.nrows();
    let rhs = -(u.adjoint() * q * &u);
    let mut y = CMatrix::zeros(n, n);
    for j in (0..n).rev() {
        let mut c = rhs.column(j).into_owned();
        for k in (j + 1)..n {
            let coeff = t[(j, k)].conj();
            if coeff != C64::new(0.0, 0.0) {
                c -= y.column(k) * coeff;
            }
        }
        // (T + conj(T_jj) I) y_j = c, upper triangular
        let shift = t[(j, j)].conj();
        for i in (0..n).rev() {
            let mut acc = c[i];
            for k in (i + 1)..n {
                acc -= t[(i, k)] * y[(k, j)];
            }
            let diag = t[(i, i)] + shift;
            if diag.norm() < 1e-14 {
                return Err(Error::Singular(format!(
                    "eigenvalue pair sums to zero ({diag}); generator is not stable"
                )));
            }
            y[(i, j)] = acc / diag;
        }
    }
    Ok(&u * y * u.adjoint())
}

/// Matrix sign function iteration: `A_k → −I` and `Q_k → 2X` for stable `A`.
fn sign_iteration(a: &CMatrix, q: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    let mut ak = a.clone();
    let mut qk = q.clone();
    for _ in 0..100 {
        let inv = ak
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("generator is singular in sign iteration".into()))?;
        let c = (inv.norm() / ak.norm()).sqrt();
        let next_a = (&ak * C64::new(c, 0.0) + &inv * C64::new(1.0 / c, 0.0)) * C64::new(0.5, 0.0);
        let next_q = (&qk * C64::new(c, 0.0) + &inv * &qk * inv.adjoint() * C64::new(1.0 / c, 0.0)) * C64::new(0.5, 0.0);
        let change = (&next_a - &ak).norm() / next_a.norm();
        ak = next_a;
        qk = next_q;
        if change < 1e-13 {
            let defect = (&ak + CMatrix::identity(n, n)).norm() / (n as f64).sqrt();
            if defect > 1e-8 {
                return Err(Error::Singular("generator is not stable".into()));
            }
            return Ok(qk * C64::new(0.5, 0.0));
        }
    }
    Err(Error::Singular("sign iteration did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> CMatrix {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(n, n, |_, _| C64::new(next(), next()))
    }

    #[test]
    fn residual_is_small() {
        for (n, seed) in [(3, 1), (9, 7), (16, 42)] {
            let mut a = sample(n, seed) * C64::new(3e12, 0.0);
            for i in 0..n {
                a[(i, i)] -= C64::new(2e12 * n as f64, 0.0);
            }
            let b = sample(n, seed + 100);
            let q = &b * b.adjoint();
            let x = solve_lyapunov(&a, &q).unwrap();
            let res = &a * &x + &x * a.adjoint() + &q;
            let rel = res.norm() / q.norm();
            assert!(rel < 1e-10, "n={n} residual {rel}");
            // Hermitian right-hand side gives a Hermitian solution
            assert!((&x - x.adjoint()).norm() < 1e-10 * x.norm());
        }
    }

    #[test]
    fn scalar_case() {
        let a = CMatrix::from_element(1, 1, C64::new(-2.0, 5.0));
        let q = CMatrix::from_element(1, 1, C64::new(8.0, 0.0));
        let x = solve_lyapunov(&a, &q).unwrap();
        assert!((x[(0, 0)] - C64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn sign_iteration_agrees_with_schur() {
        let n = 12;
        let mut a = sample(n, 5);
        for i in 0..n {
            a[(i, i)] -= C64::new(n as f64, 0.0);
        }
        let b = sample(n, 6);
        let q = &b * b.adjoint();
        let via_schur = bartels_stewart(Schur::new(a.clone()), &q).unwrap();
        let via_sign = sign_iteration(&a, &q).unwrap();
        assert!((&via_schur - &via_sign).norm() < 1e-10 * via_schur.norm());
    }
}
