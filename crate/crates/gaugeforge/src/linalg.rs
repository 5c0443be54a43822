//! Small dense complex matrices and the handful of numerical primitives the
//! rest of the crate needs: operator norms, commutators, and projection back
//! onto the unitary/orthogonal group manifold.
//!
//! Everything here is sized for matrices of dimension at most 3, stored as
//! `nalgebra::DMatrix<Complex64>`. Real groups (SO(3), O(2)) keep zero
//! imaginary parts.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C = Complex64;
pub type Mat = DMatrix<C>;

/// Identity matrix of the given dimension.
pub fn eye(dim: usize) -> Mat {
    Mat::identity(dim, dim)
}

/// Zero matrix of the given dimension.
pub fn zeros(dim: usize) -> Mat {
    Mat::zeros(dim, dim)
}

/// Complex scalar from a real.
pub fn re(x: f64) -> C {
    C::new(x, 0.0)
}

/// Operator (spectral) norm: the largest singular value.
///
/// Power iteration on AᴴA; for the 1–3 dimensional matrices used here this
/// converges far below any tolerance the crate checks against.
pub fn op_norm(m: &Mat) -> f64 {
    let dim = m.nrows();
    if dim == 1 {
        return m[(0, 0)].norm();
    }
    let b = m.adjoint() * m;
    // Frobenius norm bounds the spectral radius; exit early on zero.
    let fro = b.norm();
    if fro == 0.0 {
        return 0.0;
    }
    let mut v = nalgebra::DVector::<C>::from_element(dim, re(1.0));
    v /= re(v.norm());
    let mut lambda = 0.0;
    for _ in 0..80 {
        let w = &b * &v;
        let n = w.norm();
        if n == 0.0 {
            return 0.0;
        }
        v = w / re(n);
        lambda = n;
    }
    lambda.sqrt()
}

/// Operator-norm distance between two matrices.
pub fn op_dist(a: &Mat, b: &Mat) -> f64 {
    op_norm(&(a - b))
}

/// Commutator [a, b] = ab - ba.
pub fn comm(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// Largest absolute imaginary part of the entries.
pub fn max_imag(m: &Mat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

/// Projection onto the unitary group by the Newton polar iteration
/// `U <- (U + (Uᴴ)⁻¹)/2`. Converges quadratically to the unitary polar
/// factor for matrices near the group.
pub fn polar_unitary(m: &Mat) -> Mat {
    let mut u = m.clone();
    for _ in 0..16 {
        let inv_adj = match u.clone().adjoint().try_inverse() {
            Some(inv) => inv,
            None => break,
        };
        let next = (&u + inv_adj) * re(0.5);
        let delta = op_dist(&next, &u);
        u = next;
        if delta < 1e-15 {
            break;
        }
    }
    u
}

/// Hermitian part dropped to a purely real matrix (for SO(3)/O(2) data that
/// picked up imaginary dust through complex arithmetic).
pub fn realify(m: &Mat) -> Mat {
    m.map(|z| re(z.re))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_matches_known_values() {
        // diag(3, 4i) has singular values {3, 4}.
        let mut m = zeros(2);
        m[(0, 0)] = re(3.0);
        m[(1, 1)] = C::new(0.0, 4.0);
        assert!((op_norm(&m) - 4.0).abs() < 1e-12);

        // A rotation is an isometry.
        let t = 0.7f64;
        let mut r = zeros(2);
        r[(0, 0)] = re(t.cos());
        r[(0, 1)] = re(-t.sin());
        r[(1, 0)] = re(t.sin());
        r[(1, 1)] = re(t.cos());
        assert!((op_norm(&r) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polar_projects_back_to_unitary() {
        let t = 0.3f64;
        let mut r = zeros(2);
        r[(0, 0)] = re(t.cos());
        r[(0, 1)] = re(-t.sin());
        r[(1, 0)] = re(t.sin());
        r[(1, 1)] = re(t.cos());
        // Perturb off the group, project back.
        let mut p = r.clone();
        p[(0, 0)] += re(1e-3);
        let u = polar_unitary(&p);
        let residual = op_dist(&(u.adjoint() * &u), &eye(2));
        assert!(residual < 1e-14, "unitarity residual {residual}");
        // The projection stays near the original rotation.
        assert!(op_dist(&u, &r) < 1e-2);
    }
}
