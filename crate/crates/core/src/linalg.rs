//! Small dense linear algebra on matrices of order ≤ 8.
//!
//! Two Jacobi routines live here:
//!
//! * [`symmetric_eigen`] is the classical cyclic Jacobi eigensolver for real
//!   symmetric matrices. Hermitian 4×4 states are handled through their real
//!   8×8 embedding.
//! * [`svd`] is the one-sided (Hestenes) variant, i.e. cyclic Jacobi applied
//!   implicitly to `AᵀA` by orthogonalizing the columns of `A`. It never forms
//!   `AᵀA`, so singular values near zero keep full absolute accuracy instead of
//!   the `√ε` floor that the square root of a Gram eigenvalue would impose.
//!
//! [`trace_norm`] uses the one-sided route; [`trace_norm_via_gram`] takes the
//! eigenvalues of `MᵀM` and is kept as an independent cross-check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition `A = V diag(values) Vᵀ`, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    /// Eigenvectors as columns, each with its largest-magnitude component positive.
    pub vectors: DMatrix<f64>,
}

pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension(format!(
            "symmetric_eigen needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }
    let mut a = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm();

    let mut converged = n < 2 || scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- Jᵀ A J with J the (p, q) plane rotation
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "cyclic Jacobi eigensolver",
            sweeps: MAX_SWEEPS,
        });
    }

    let values: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let order = descending_order(&values, &v, 1e-12 * scale.max(1.0));
    let mut out_values = DVector::zeros(n);
    let mut out_vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        out_values[dst] = values[src];
        let mut col = v.column(src).clone_owned();
        canonical_sign(&mut col);
        out_vectors.set_column(dst, &col);
    }
    Ok(SymmetricEigen {
        values: out_values,
        vectors: out_vectors,
    })
}

/// Thin singular value decomposition `A = U diag(σ) Vᵀ` of an m×n matrix.
///
/// With k = min(m, n): σ has k entries sorted descending, `u` is m×k with unit
/// columns for nonzero σ (zero columns otherwise), and `v` is n×k with
/// orthonormal columns.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v: DMatrix<f64>,
}

pub fn svd(a: &DMatrix<f64>) -> Result<Svd> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }
    if a.nrows() < a.ncols() {
        // more columns than rows cannot all be made orthogonal; work on Aᵀ
        let t = svd_tall(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    svd_tall(a)
}

fn svd_tall(a: &DMatrix<f64>) -> Result<Svd> {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    // columns below this squared norm are numerically zero
    let floor = (f64::EPSILON * a.norm()).powi(2);

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha: f64 = w.column(p).norm_squared();
                let beta: f64 = w.column(q).norm_squared();
                let gamma: f64 = w.column(p).dot(&w.column(q));
                if alpha <= floor
                    || beta <= floor
                    || gamma.abs() <= 1e-15 * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let wp = w[(k, p)];
                    let wq = w[(k, q)];
                    w[(k, p)] = c * wp - s * wq;
                    w[(k, q)] = s * wp + c * wq;
                }
                for k in 0..n {
                    let vp = v[(k, p)];
                    let vq = v[(k, q)];
                    v[(k, p)] = c * vp - s * vq;
                    v[(k, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            routine: "one-sided Jacobi SVD",
            sweeps: MAX_SWEEPS,
        });
    }

    let sigma: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let scale = sigma.iter().cloned().fold(0.0, f64::max);
    let order = descending_order(&sigma, &v, 1e-12 * scale.max(1.0));
    let mut u = DMatrix::zeros(m, n);
    let mut v_out = DMatrix::zeros(n, n);
    let mut values = DVector::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = sigma[src];
        v_out.set_column(dst, &v.column(src));
        if sigma[src] > 0.0 {
            u.set_column(dst, &(w.column(src) / sigma[src]));
        }
    }
    Ok(Svd {
        u,
        singular_values: values,
        v: v_out,
    })
}

pub fn singular_values(a: &DMatrix<f64>) -> Result<DVector<f64>> {
    svd(a).map(|s| s.singular_values)
}

/// ‖A‖_tr = Σ σᵢ, through the one-sided Jacobi SVD.
pub fn trace_norm(a: &DMatrix<f64>) -> Result<f64> {
    Ok(singular_values(a)?.sum())
}

/// ‖A‖_tr = tr √(AᵀA) from the eigenvalues of the Gram matrix.
///
/// Loses absolute accuracy of order √ε on singular values near zero.
pub fn trace_norm_via_gram(a: &DMatrix<f64>) -> Result<f64> {
    let gram = a.transpose() * a;
    let eig = symmetric_eigen(&gram)?;
    Ok(eig.values.iter().map(|&l| l.max(0.0).sqrt()).sum())
}

/// Indices sorting `values` descending; near-ties go to the vector whose
/// dominant component comes first, then to the original index.
fn descending_order(values: &[f64], vectors: &DMatrix<f64>, tie_tol: f64) -> Vec<usize> {
    let dominant = |j: usize| {
        let col = vectors.column(j);
        (0..col.len())
            .max_by(|&a, &b| col[a].abs().total_cmp(&col[b].abs()).then(b.cmp(&a)))
            .unwrap_or(0)
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    // insertion sort: the comparator is not transitive under the tolerance
    for i in 1..order.len() {
        let mut k = i;
        while k > 0 {
            let (a, b) = (order[k - 1], order[k]);
            let should_swap = if (values[a] - values[b]).abs() <= tie_tol {
                (dominant(b), b) < (dominant(a), a)
            } else {
                values[b] > values[a]
            };
            if !should_swap {
                break;
            }
            order.swap(k - 1, k);
            k -= 1;
        }
    }
    order
}

fn canonical_sign(col: &mut DVector<f64>) {
    let mut best = 0;
    for i in 1..col.len() {
        if col[i].abs() > col[best].abs() + 1e-12 {
            best = i;
        }
    }
    if !col.is_empty() && col[best] < 0.0 {
        col.neg_mut();
    }
}
