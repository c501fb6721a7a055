//! Dense real symmetric matrices, tensor products, Pauli-operator embedding,
//! and the eigendecomposition contract the rest of the crate consumes.
//!
//! All Hamiltonians handled here are real symmetric (ħ = 1, dimensionless
//! energy units), so the eigenvector matrix is real orthogonal and column μ
//! holds the wave-function coefficients c_μ(α) in the basis the matrix was
//! expressed in.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use std::sync::Once;

use crate::error::{Error, Result};

/// Hard cap on matrix dimension for tensor-product builders (desk-scale
/// memory bound).
pub const MAX_DIM: usize = 1 << 16;

/// LAPACK results are only reproducible at a fixed thread count, so pin the
/// backing BLAS to one thread before the first call. Sweep-level parallelism
/// runs whole grid points concurrently instead.
fn pin_blas_threads() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| {
        std::env::set_var("OPENBLAS_NUM_THREADS", "1");
        std::env::set_var("OMP_NUM_THREADS", "1");
    });
}

/// Dense real symmetric matrix, row-major, with `entries[i][j] == entries[j][i]`
/// exactly (the constructor symmetrizes).
#[derive(Debug, Clone)]
pub struct DenseSymMatrix {
    data: Array2<f64>,
}

impl DenseSymMatrix {
    /// Symmetrize and wrap a square matrix. Rejects non-square shapes,
    /// dimensions below 2, and non-finite entries.
    pub fn from_array(a: Array2<f64>) -> Result<Self> {
        let (n, m) = a.dim();
        if n != m {
            return Err(Error::DimensionMismatch {
                context: "symmetric matrix must be square",
                left: n,
                right: m,
            });
        }
        if n < 2 {
            return Err(Error::InvalidSpec(format!("matrix dimension {n} < 2")));
        }
        for ((i, j), &v) in a.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
        let mut s = a;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (s[[i, j]] + s[[j, i]]);
                s[[i, j]] = v;
                s[[j, i]] = v;
            }
        }
        Ok(Self { data: s })
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diag(d: &[f64]) -> Result<Self> {
        Self::from_array(Array2::from_diag(&Array1::from(d.to_vec())))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    /// Largest absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }
}

/// Eigendecomposition of a dense real symmetric Hamiltonian.
///
/// `energies` is sorted ascending; column μ of `vectors` is the eigenvector
/// c_μ(α) expressed in the basis of the input matrix. Columns are sign-fixed
/// so the largest-magnitude entry of each column is positive, which makes
/// serialized spectra stable across runs.
#[derive(Debug, Clone)]
pub struct Spectrum {
    energies: Array1<f64>,
    vectors: Array2<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &Array1<f64> {
        &self.energies
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    /// c_μ(α) for 0-based α (basis index) and μ (eigenstate index).
    pub fn coefficient(&self, alpha: usize, mu: usize) -> f64 {
        self.vectors[[alpha, mu]]
    }

    /// max_{μν} |⟨col_μ, col_ν⟩ − δ_μν|. O(D³); intended for validation.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.vectors.t().dot(&self.vectors);
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[[i, j]] - target).abs());
            }
        }
        worst
    }

    /// ‖Q·diag(E)·Qᵀ − H‖_max. O(D³); intended for validation.
    pub fn reconstruction_residual(&self, h: &DenseSymMatrix) -> f64 {
        let mut scaled = self.vectors.clone();
        for (mut col, &e) in scaled.columns_mut().into_iter().zip(self.energies.iter()) {
            col.mapv_inplace(|v| v * e);
        }
        let rebuilt = scaled.dot(&self.vectors.t());
        let mut worst = 0.0f64;
        for ((i, j), &v) in rebuilt.indexed_iter() {
            worst = worst.max((v - h.as_array()[[i, j]]).abs());
        }
        worst
    }
}

/// Diagonalize a dense real symmetric matrix.
///
/// Deterministic up to the sign convention fixed in [`Spectrum`]; non-finite
/// inputs are rejected by the `DenseSymMatrix` constructor.
pub fn eigh(h: &DenseSymMatrix) -> Result<Spectrum> {
    pin_blas_threads();
    let (raw_e, raw_v) = h
        .as_array()
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Eigensolver(e.to_string()))?;

    // LAPACK returns ascending order already; permute defensively so the
    // contract does not depend on the backend.
    let n = raw_e.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw_e[a].partial_cmp(&raw_e[b]).expect("finite eigenvalues"));

    let mut energies = Array1::zeros(n);
    let mut vectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        energies[dst] = raw_e[src];
        let mut flip = false;
        let col = raw_v.column(src);
        let mut best = 0.0f64;
        let mut best_idx = 0usize;
        for (i, &v) in col.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                best_idx = i;
            }
        }
        if col[best_idx] < 0.0 {
            flip = true;
        }
        for i in 0..n {
            vectors[[i, dst]] = if flip { -col[i] } else { col[i] };
        }
    }

    Ok(Spectrum { energies, vectors })
}

/// Kronecker product. `(kron(A,B))[i·p+k][j·q+l] = A[i][j]·B[k][l]` with
/// `(p, q)` the dimensions of `B`. Rejects products whose dimension exceeds
/// [`MAX_DIM`].
pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Result<Array2<f64>> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let rows = ar.checked_mul(br).filter(|&d| d <= MAX_DIM);
    let cols = ac.checked_mul(bc).filter(|&d| d <= MAX_DIM);
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) => (r, c),
        _ => {
            return Err(Error::DimensionLimit {
                dim: ar.saturating_mul(br).max(ac.saturating_mul(bc)),
                max: MAX_DIM,
            })
        }
    };
    for ((i, j), &v) in a.indexed_iter().chain(b.indexed_iter()) {
        if !v.is_finite() {
            return Err(Error::NonFiniteEntry {
                row: i,
                col: j,
                value: v,
            });
        }
    }
    let mut out = Array2::zeros((rows, cols));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == 0.0 {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    Ok(out)
}

/// Real single-site operators. Pauli-y is excluded: every Hamiltonian built
/// here is real symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliKind {
    X,
    Z,
    Plus,
    Minus,
}

/// Embed a single-site operator into an `n_sites`-qubit register.
///
/// `site` is 1-based; site 1 occupies the least-significant position of the
/// composite index, and bit value 0 is spin-up. This is what makes the
/// odd-α ⇔ probe-up sector convention a simple index-parity test.
pub fn pauli_site(kind: PauliKind, site: usize, n_sites: usize) -> Result<Array2<f64>> {
    if site < 1 || site > n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    if n_sites >= 63 || (1usize << n_sites) > MAX_DIM {
        return Err(Error::DimensionLimit {
            dim: 1usize.checked_shl(n_sites as u32).unwrap_or(usize::MAX),
            max: MAX_DIM,
        });
    }
    let dim = 1usize << n_sites;
    let mask = 1usize << (site - 1);
    let mut out = Array2::zeros((dim, dim));
    for col in 0..dim {
        let bit_down = col & mask != 0;
        match kind {
            PauliKind::Z => out[[col, col]] = if bit_down { -1.0 } else { 1.0 },
            PauliKind::X => out[[col ^ mask, col]] = 1.0,
            // σ₊ = |↑⟩⟨↓| raises a down spin (bit set → bit clear).
            PauliKind::Plus => {
                if bit_down {
                    out[[col & !mask, col]] = 1.0;
                }
            }
            PauliKind::Minus => {
                if !bit_down {
                    out[[col | mask, col]] = 1.0;
                }
            }
        }
    }
    Ok(out)
}
