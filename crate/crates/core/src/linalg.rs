//! Spectral decompositions with a fixed ordering and phase convention.
//!
//! Eigenvalues and singular values are sorted in descending order. Each
//! eigenvector or right singular vector is rotated so that its entry of
//! largest modulus (first one on ties) is real and positive; left singular
//! vectors are rotated by the same phase so the factorization is unchanged.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;

/// Eigendecomposition `A = V diag(values) V^†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn new(a: &DMatrix<C64>) -> Self {
        assert!(a.is_square(), "hermitian eigensolve needs a square matrix");
        let eig = nalgebra::SymmetricEigen::new(a.clone());
        let n = a.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        for c in 0..n {
            let phase = canonical_phase(vectors.column(c).iter());
            for r in 0..n {
                vectors[(r, c)] *= phase;
            }
        }
        Self { values, vectors }
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| C64::new(v, 0.0)),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }
}

/// Thin singular value decomposition `B = U diag(singular) V^†`, with
/// `U` of size `M x N` and `V` of size `N x N` for `M >= N`.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DMatrix<C64>,
    pub singular: Vec<f64>,
    pub v: DMatrix<C64>,
}

impl ThinSvd {
    /// One-sided Jacobi SVD. Clustered singular values are resolved to
    /// working precision, which the bidiagonal QR in nalgebra does not
    /// always achieve for complex input.
    pub fn new(b: &DMatrix<C64>) -> Self {
        if b.nrows() < b.ncols() {
            let t = Self::new(&b.adjoint());
            return Self {
                u: t.v,
                singular: t.singular,
                v: t.u,
            };
        }
        let (g, v_raw) = jacobi_orthogonalize(b);
        let k = b.ncols();
        let norms: Vec<f64> = (0..k).map(|c| g.column(c).norm()).collect();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

        let mut u = DMatrix::zeros(b.nrows(), k);
        let mut v = DMatrix::zeros(k, k);
        let mut singular = Vec::with_capacity(k);
        for (dst, &src) in order.iter().enumerate() {
            let phase = canonical_phase(v_raw.column(src).iter());
            v.set_column(dst, &(v_raw.column(src) * phase));
            if norms[src] > 0.0 {
                u.set_column(dst, &(g.column(src) * (phase / norms[src])));
            }
            singular.push(norms[src]);
        }
        complete_orthonormal(&mut u, &singular);
        Self { u, singular, v }
    }

    pub fn reconstruct(&self) -> DMatrix<C64> {
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            self.singular.len(),
            self.singular.iter().map(|&s| C64::new(s, 0.0)),
        ));
        &self.u * d * self.v.adjoint()
    }
}

const JACOBI_TOLERANCE: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 80;

/// Rotates the columns of `b` until they are mutually orthogonal, returning
/// `(B V, V)` with `V` unitary.
fn jacobi_orthogonalize(b: &DMatrix<C64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = b.ncols();
    let mut g = b.clone();
    let mut v = DMatrix::<C64>::identity(n, n);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = g.column(p).norm_squared();
                let beta = g.column(q).norm_squared();
                let gamma = g.column(p).dotc(&g.column(q));
                let off = gamma.norm();
                if off <= JACOBI_TOLERANCE * (alpha * beta).sqrt() || off == 0.0 {
                    continue;
                }
                rotated = true;
                // align the phase of column q, then apply a real rotation
                let phase = gamma.conj() / off;
                let zeta = (beta - alpha) / (2.0 * off);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut g, &mut v] {
                    for r in 0..m.nrows() {
                        let x = m[(r, p)];
                        let y = m[(r, q)] * phase;
                        m[(r, p)] = x * c - y * s;
                        m[(r, q)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (g, v)
}

/// Fills the columns of `u` belonging to zero singular values with an
/// orthonormal completion.
fn complete_orthonormal(u: &mut DMatrix<C64>, singular: &[f64]) {
    let rows = u.nrows();
    let mut candidate = 0;
    for c in 0..singular.len() {
        if singular[c] > 0.0 {
            continue;
        }
        while candidate < rows {
            let mut e = DVector::<C64>::zeros(rows);
            e[candidate] = C64::new(1.0, 0.0);
            candidate += 1;
            for k in 0..singular.len() {
                if k != c {
                    let col = u.column(k).clone_owned();
                    e -= &col * col.dotc(&e);
                }
            }
            let norm = e.norm();
            if norm > 1e-8 {
                u.set_column(c, &(e / C64::new(norm, 0.0)));
                break;
            }
        }
    }
}

/// Unit-modulus factor that makes the largest-modulus entry real positive.
fn canonical_phase<'a, I: Iterator<Item = &'a C64>>(entries: I) -> C64 {
    let mut best = C64::new(0.0, 0.0);
    let mut best_norm = -1.0;
    for z in entries {
        let n = z.norm();
        if n > best_norm * (1.0 + 1e-12) {
            best = *z;
            best_norm = n;
        }
    }
    if best_norm <= 0.0 {
        C64::new(1.0, 0.0)
    } else {
        best.conj() / best_norm
    }
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    ThinSvd::new(m).singular[0]
}
