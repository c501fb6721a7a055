//! Exact quench dynamics from the spectral decomposition: eigenbasis
//! operators, observable time traces, the diagonal ensemble, and long-time
//! fluctuations both as the closed sum over off-diagonal matrix elements and
//! as a windowed time integral.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::Spectrum;
use crate::models::{DiagonalObservable, StateWeights};
use crate::util::{pairwise_sum, trapezoid_uniform};

/// Initial state and observable rotated into the eigenbasis of the coupled
/// Hamiltonian: ρ̃_μν = Σ_α w_α c_μ(α) c_ν(α) and Õ_μν likewise, together
/// with the eigenenergies E_μ.
#[derive(Debug, Clone)]
pub struct EigenbasisOperators {
    rho: Array2<f64>,
    obs: Array2<f64>,
    energies: Array1<f64>,
}

impl EigenbasisOperators {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn rho(&self) -> &Array2<f64> {
        &self.rho
    }

    pub fn obs(&self) -> &Array2<f64> {
        &self.obs
    }

    pub fn energies(&self) -> &Array1<f64> {
        &self.energies
    }

    pub fn trace_rho(&self) -> f64 {
        pairwise_sum(&(0..self.dim()).map(|i| self.rho[[i, i]]).collect::<Vec<_>>())
    }
}

/// An observable signal sampled on a strictly ascending time grid.
#[derive(Debug, Clone)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                context: "time grid vs values",
                left: times.len(),
                right: values.len(),
            });
        }
        if times.len() < 2 {
            return Err(Error::InvalidSpec("time series needs at least 2 samples".into()));
        }
        for pair in times.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidSpec(format!(
                    "time grid must be strictly ascending at t = {}",
                    pair[0]
                )));
            }
        }
        if let Some(&bad) = times.iter().chain(values.iter()).find(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(format!("non-finite sample {bad}")));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Rotate diagonal state weights and a diagonal observable into the
/// eigenbasis: two D×D congruence transforms.
pub fn rotate_to_eigenbasis(
    w: &StateWeights,
    o: &DiagonalObservable,
    spec: &Spectrum,
) -> Result<EigenbasisOperators> {
    let d = spec.dim();
    if w.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "state weights vs spectrum",
            left: w.dim(),
            right: d,
        });
    }
    if o.dim() != d {
        return Err(Error::DimensionMismatch {
            context: "observable vs spectrum",
            left: o.dim(),
            right: d,
        });
    }
    let q = spec.vectors();
    let congruence = |diag: &[f64]| -> Array2<f64> {
        let mut scaled = q.clone();
        for (mut row, &s) in scaled.rows_mut().into_iter().zip(diag.iter()) {
            row.mapv_inplace(|v| v * s);
        }
        let mut m = q.t().dot(&scaled);
        // the congruence of a diagonal matrix is symmetric; remove rounding skew
        for i in 0..d {
            for j in (i + 1)..d {
                let v = 0.5 * (m[[i, j]] + m[[j, i]]);
                m[[i, j]] = v;
                m[[j, i]] = v;
            }
        }
        m
    };
    Ok(EigenbasisOperators {
        rho: congruence(w.weights()),
        obs: congruence(o.values()),
        energies: spec.energies().clone(),
    })
}

/// ⟨O(t)⟩ = Σ_{μν} ρ̃_μν Õ_μν cos((E_μ−E_ν)t) for the real symmetric case.
/// O(D²) per time point.
pub fn observable_trace(ops: &EigenbasisOperators, t: f64) -> f64 {
    observable_series(ops, &[t])[0]
}

/// Evaluate the observable trace on a batch of times. Same arithmetic as
/// [`observable_trace`], organised as matrix products over time blocks.
pub fn observable_series(ops: &EigenbasisOperators, times: &[f64]) -> Vec<f64> {
    let d = ops.dim();
    let a = &ops.rho * &ops.obs; // Hadamard product ρ̃∘Õ
    let mut out = Vec::with_capacity(times.len());

    const BLOCK: usize = 128;
    let mut cos_block = Array2::zeros((BLOCK, d));
    let mut sin_block = Array2::zeros((BLOCK, d));
    for chunk in times.chunks(BLOCK) {
        for (ti, &t) in chunk.iter().enumerate() {
            for mu in 0..d {
                let (s, c) = (ops.energies[mu] * t).sin_cos();
                cos_block[[ti, mu]] = c;
                sin_block[[ti, mu]] = s;
            }
        }
        let cview = cos_block.slice(ndarray::s![..chunk.len(), ..]);
        let sview = sin_block.slice(ndarray::s![..chunk.len(), ..]);
        let pc = cview.dot(&a);
        let ps = sview.dot(&a);
        for ti in 0..chunk.len() {
            let terms: Vec<f64> = (0..d)
                .map(|mu| pc[[ti, mu]] * cview[[ti, mu]] + ps[[ti, mu]] * sview[[ti, mu]])
                .collect();
            out.push(pairwise_sum(&terms));
        }
    }
    out
}

/// Sample ⟨O(t)⟩ on a uniform grid over [0, t_end].
pub fn sample_series(
    ops: &EigenbasisOperators,
    t_end: f64,
    n_samples: usize,
) -> Result<TimeSeries> {
    if !(t_end > 0.0) || n_samples < 2 {
        return Err(Error::InvalidSpec(format!(
            "need t_end > 0 and at least 2 samples, got ({t_end}, {n_samples})"
        )));
    }
    let dt = t_end / (n_samples - 1) as f64;
    let times: Vec<f64> = (0..n_samples).map(|i| i as f64 * dt).collect();
    let values = observable_series(ops, &times);
    TimeSeries::new(times, values)
}

/// Diagonal ensemble O_DE = Σ_μ ρ̃_μμ Õ_μμ, the infinite-time average for a
/// non-degenerate spectrum.
pub fn diagonal_ensemble(ops: &EigenbasisOperators) -> f64 {
    let terms: Vec<f64> = (0..ops.dim()).map(|m| ops.rho[[m, m]] * ops.obs[[m, m]]).collect();
    pairwise_sum(&terms)
}

/// True when some adjacent eigenvalue pair is closer than `tol_rel`·max|E|.
pub fn has_degenerate_levels(energies: &Array1<f64>, tol_rel: f64) -> bool {
    let scale = energies.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    if scale == 0.0 {
        return energies.len() > 1;
    }
    energies
        .as_slice()
        .expect("contiguous energies")
        .windows(2)
        .any(|p| (p[1] - p[0]).abs() < tol_rel * scale)
}

/// Long-time fluctuations by the closed sum δ²(∞) = Σ_{μ≠ν} ρ̃_μν² Õ_μν².
///
/// Assumes non-degenerate energies and gaps; a near-degenerate eigenvalue
/// pair only biases the result slightly, so it is reported as a warning, not
/// an error.
pub fn fluctuations_infinite(ops: &EigenbasisOperators) -> f64 {
    if has_degenerate_levels(&ops.energies, 1e-10) {
        log::warn!(
            "spectrum has eigenvalue pairs closer than 1e-10·|E|max; \
             the closed-sum fluctuation formula assumes non-degenerate gaps"
        );
    }
    let d = ops.dim();
    let row_sums: Vec<f64> = (0..d)
        .map(|mu| {
            let terms: Vec<f64> = (0..d)
                .filter(|&nu| nu != mu)
                .map(|nu| {
                    let x = ops.rho[[mu, nu]] * ops.obs[[mu, nu]];
                    x * x
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    pairwise_sum(&row_sums)
}

/// Long-time fluctuations by windowed time integration (trapezoid on a
/// uniform grid over [0, T]): returns (δ²(T), μ(T)).
///
/// Under-sampling an oscillation-rich signal aliases high-frequency pairs
/// into the window average; the grid must resolve the spectral span for the
/// estimate to converge to the closed sum.
pub fn fluctuations_windowed(
    ops: &EigenbasisOperators,
    t_end: f64,
    n_samples: usize,
) -> Result<(f64, f64)> {
    if n_samples < 100 {
        return Err(Error::InvalidSpec(format!(
            "windowed fluctuations need at least 100 samples, got {n_samples}"
        )));
    }
    if !(t_end > 0.0) {
        return Err(Error::InvalidSpec(format!("window must be positive, got {t_end}")));
    }
    let series = sample_series(ops, t_end, n_samples)?;
    let mu = trapezoid_uniform(series.values(), t_end / (n_samples - 1) as f64) / t_end;
    let centered: Vec<f64> = series.values().iter().map(|&y| (y - mu) * (y - mu)).collect();
    let delta2 = trapezoid_uniform(&centered, t_end / (n_samples - 1) as f64) / t_end;
    Ok((delta2, mu))
}

/// Free evolution ⟨O(t)⟩₀ under H₀ alone. For diagonal weights and a
/// diagonal observable this is constant in t: Σ_α w_α O_αα.
pub fn free_evolution(
    w: &StateWeights,
    o: &DiagonalObservable,
    _energies_h0: &[f64],
    _t: f64,
) -> f64 {
    let terms: Vec<f64> = w
        .weights()
        .iter()
        .zip(o.values())
        .map(|(&wv, &ov)| wv * ov)
        .collect();
    pairwise_sum(&terms)
}
