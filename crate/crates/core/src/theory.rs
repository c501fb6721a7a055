//! Closed-form random-matrix predictions: the Fermi-golden-rule rate Γ,
//! Lorentzian eigenvector correlators Λ, four-point contraction patterns,
//! the observable constant W_O, exponential relaxation curves, and the
//! fluctuation-dissipation predictions at infinite and finite temperature.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::models::{DiagonalObservable, ObservableKind, SectorMask};
use crate::util::pairwise_sum;

/// Coarse-grained moments of a diagonal observable: [O_αα], [O²_αα], and the
/// probe-up element O_↑.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableMoments {
    pub mean: f64,
    pub mean_sq: f64,
    pub o_up: f64,
}

impl ObservableMoments {
    /// Exact moments of the built-in observables.
    pub fn of_kind(kind: ObservableKind) -> Self {
        match kind {
            ObservableKind::SigmaZProbe | ObservableKind::OSym => Self {
                mean: 0.0,
                mean_sq: 1.0,
                o_up: 1.0,
            },
            ObservableKind::OOdd => Self {
                mean: 0.5,
                mean_sq: 0.5,
                o_up: 1.0,
            },
        }
    }

    /// Moments from an explicit diagonal. O_↑ is the average over the odd-α
    /// (probe-up) sector.
    pub fn from_diagonal(o: &DiagonalObservable) -> Self {
        let d = o.values();
        let n = d.len() as f64;
        let mean = pairwise_sum(d) / n;
        let sq: Vec<f64> = d.iter().map(|&v| v * v).collect();
        let mean_sq = pairwise_sum(&sq) / n;
        let up: Vec<f64> = d.iter().step_by(2).copied().collect();
        let o_up = pairwise_sum(&up) / up.len() as f64;
        Self { mean, mean_sq, o_up }
    }

    /// [ΔO²] = [O²] − [O]².
    pub fn variance(&self) -> f64 {
        self.mean_sq - self.mean * self.mean
    }
}

/// Temperature regime selecting which W_O expansion applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemperatureRegime {
    HighT,
    LowT,
}

/// Fermi-golden-rule decay rate Γ = πg²/(Nω₀).
pub fn gamma_fgr(g: f64, n: usize, omega0: f64) -> f64 {
    PI * g * g / (n as f64 * omega0)
}

/// Ensemble-averaged eigenvector intensity, a Lorentzian of half-width nΓ:
/// Λ⁽ⁿ⁾(E_μ, E_α) = (ω₀·nΓ/π) / ((E_μ−E_α)² + (nΓ)²).
pub fn lambda_lorentzian(e_mu: f64, e_alpha: f64, gamma: f64, omega0: f64, n: u32) -> f64 {
    debug_assert!(gamma > 0.0);
    let width = n as f64 * gamma;
    let de = e_mu - e_alpha;
    omega0 * width / PI / (de * de + width * width)
}

/// Energy context for four-point correlator evaluation: constant Γ and ω₀
/// over a given level ladder.
#[derive(Debug, Clone, Copy)]
pub struct FourPointCtx<'a> {
    pub gamma: f64,
    pub omega0: f64,
    pub energies: &'a [f64],
}

impl FourPointCtx<'_> {
    fn lam(&self, m: usize, a: usize) -> f64 {
        lambda_lorentzian(self.energies[m], self.energies[a], self.gamma, self.omega0, 1)
    }

    fn lam2(&self, m: usize, n: usize) -> f64 {
        lambda_lorentzian(self.energies[m], self.energies[n], self.gamma, self.omega0, 2)
    }
}

/// Ensemble average ⟨c_μ(α) c_ν(β) c_μ(α′) c_ν(β′)⟩_V.
///
/// For μ ≠ ν this is the Gaussian contraction minus the orthogonality-induced
/// corrections; for μ = ν it is the plain sum of the three Gaussian pairings.
#[allow(clippy::too_many_arguments)]
pub fn four_point(
    mu: usize,
    nu: usize,
    alpha: usize,
    beta: usize,
    alpha_p: usize,
    beta_p: usize,
    ctx: &FourPointCtx,
) -> f64 {
    if mu == nu {
        let mut s = 0.0;
        if alpha == beta && alpha_p == beta_p {
            s += ctx.lam(mu, alpha) * ctx.lam(mu, alpha_p);
        }
        if alpha == alpha_p && beta == beta_p {
            s += ctx.lam(mu, alpha) * ctx.lam(mu, beta);
        }
        if alpha == beta_p && alpha_p == beta {
            s += ctx.lam(mu, alpha) * ctx.lam(mu, beta);
        }
        return s;
    }
    let mut s = 0.0;
    if alpha == alpha_p && beta == beta_p {
        s += ctx.lam(mu, alpha) * ctx.lam(nu, beta);
    }
    if (alpha == beta && alpha_p == beta_p) || (alpha == beta_p && beta == alpha_p) {
        let l = ctx.lam(mu, alpha) * ctx.lam(nu, beta) * ctx.lam(mu, alpha_p) * ctx.lam(nu, beta_p)
            / ctx.lam2(mu, nu);
        if alpha == beta && alpha_p == beta_p {
            s -= l;
        }
        if alpha == beta_p && beta == alpha_p {
            s -= l;
        }
    }
    s
}

/// Observable constant W_O.
///
/// High temperature: [O²] + O_↑² + (3/2)[O]² − [O]² − 2[O]O_↑ − ½[O²].
/// Low temperature (pure-state limit): [ΔO²].
pub fn w_o_constant(m: &ObservableMoments, regime: TemperatureRegime) -> f64 {
    match regime {
        TemperatureRegime::HighT => {
            m.mean_sq + m.o_up * m.o_up + 1.5 * m.mean * m.mean
                - m.mean * m.mean
                - 2.0 * m.mean * m.o_up
                - 0.5 * m.mean_sq
        }
        TemperatureRegime::LowT => m.variance(),
    }
}

/// Relaxation curve O(t) = (⟨O(t)⟩₀ − O_DE)·e^(−2Γt) + O_DE.
pub fn predict_decay(t: f64, o_free: f64, o_de: f64, gamma: f64) -> f64 {
    (o_free - o_de) * (-2.0 * gamma * t).exp() + o_de
}

/// Infinite-temperature random-matrix fluctuations:
/// δ²(∞) = W_O·ω₀ / (4π·N_B·Γ).
pub fn predict_delta2_rmt_inf_t(w_o: f64, omega0: f64, n_b: usize, gamma: f64) -> f64 {
    w_o * omega0 / (4.0 * PI * n_b as f64 * gamma)
}

/// χ(N) = C / (N_B·D̄(E)) with C = W_O/4π.
pub fn chi_prediction(c_const: f64, n_b: usize, dos_bar: f64) -> f64 {
    c_const / (n_b as f64 * dos_bar)
}

/// Finite-temperature fluctuation-dissipation prediction and the
/// partition-function diagnostics that go with it.
#[derive(Debug, Clone)]
pub struct FdtPrediction {
    /// Predicted δ²(∞).
    pub delta2: f64,
    pub w_o: f64,
    /// C = W_O/4π.
    pub c_const: f64,
    /// Γ at the thermally weighted mean energy; the constant rate for RMT.
    pub gamma: f64,
    /// Sector size entering Z_β.
    pub n_b: usize,
    /// Unbiased average density of states over the integration window.
    pub dos_bar: f64,
    pub beta: f64,
    /// Odd-sector partition sum Z_β = Σ_α e^(−β(E_α−e0)).
    pub z_beta: f64,
    /// Z′_2β = ∫ D(E)·e^(−2β(E−e0)) dE over the window.
    pub z_prime_2beta: f64,
    /// ΔE′(β) = ∫ e^(−β(E−e0)) dE over the window.
    pub delta_e_prime: f64,
}

/// Inputs for [`predict_delta2_finite_t`].
///
/// `energies` is the full unperturbed level ladder; `sector` is the set of
/// states the initial ensemble occupies (it must match the mask the weights
/// were built with, including any bulk energy cutoff); `window` is the energy
/// range the prediction integrates over, (0, N·ω₀) for the plain RMT model
/// or the cutoff window when the state is restricted to the bulk.
#[derive(Debug, Clone, Copy)]
pub struct ThermalPredictionInput<'a> {
    pub w_o: f64,
    pub beta: f64,
    pub energies: &'a [f64],
    pub sector: &'a SectorMask,
    pub e0: f64,
    pub window: (f64, f64),
}

const QUADRATURE_POINTS: usize = (1 << 12) + 1;

/// Finite-temperature fluctuation prediction
/// δ²(∞) = W_O/(8π·Z_β²) · Σ_μ e^(−2β(E_μ−e0)) / (Γ(E_μ)·D(E_μ)),
/// the level-resolved form of W_O·ΔE′(2β)·⟨Γ(E)⁻¹⟩_2β/(8π·Z_β²).
///
/// Z_β is the exact sector sum and the spectral factor is summed over the
/// actual level ladder rather than a continuum quadrature: at β ≳ 1/(level
/// spacing) only a handful of levels carry weight and the continuum limit
/// overestimates the result. Exponentials are max-shifted so the offset e0
/// only affects conditioning, not the value. At β = 0 this reproduces the
/// infinite-temperature form exactly.
pub fn predict_delta2_finite_t(
    input: &ThermalPredictionInput,
    gamma_of_e: impl Fn(f64) -> f64,
    dos_of_e: impl Fn(f64) -> f64,
) -> Result<FdtPrediction> {
    let ThermalPredictionInput {
        w_o,
        beta,
        energies,
        sector,
        e0,
        window: (e_lo, e_hi),
    } = *input;
    if !(beta >= 0.0) {
        return Err(Error::InvalidSpec(format!("beta must be >= 0, got {beta}")));
    }
    if !(e_hi > e_lo) {
        return Err(Error::InvalidSpec(format!(
            "empty integration window [{e_lo}, {e_hi}]"
        )));
    }
    if sector.len() != energies.len() {
        return Err(Error::DimensionMismatch {
            context: "sector mask vs energies",
            left: sector.len(),
            right: energies.len(),
        });
    }
    let n_b = sector.count();
    if n_b == 0 {
        return Err(Error::WeightUnderflow(
            "prediction sector is empty; shift e0 or relax the cutoff".into(),
        ));
    }

    // Z_β over the sector, max-shifted: Z = exp(m)·Σ exp(x−m).
    let xs: Vec<f64> = sector.indices().map(|i| -beta * (energies[i] - e0)).collect();
    let m_z = xs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let z_terms: Vec<f64> = xs.iter().map(|&x| (x - m_z).exp()).collect();
    let ln_z = m_z + pairwise_sum(&z_terms).ln();

    // Σ_μ e^(−2β(E_μ−e0)) / (Γ D) over levels inside the window.
    let mut ys: Vec<(f64, f64)> = Vec::new();
    for &e in energies {
        if e >= e_lo && e <= e_hi {
            ys.push((-2.0 * beta * (e - e0), e));
        }
    }
    if ys.is_empty() {
        return Err(Error::InvalidSpec(
            "no levels inside the prediction window".into(),
        ));
    }
    let m_n = ys.iter().fold(f64::NEG_INFINITY, |a, &(x, _)| a.max(x));
    let num_terms: Vec<f64> = ys
        .iter()
        .map(|&(x, e)| (x - m_n).exp() / (gamma_of_e(e) * dos_of_e(e)))
        .collect();
    let ln_num = m_n + pairwise_sum(&num_terms).ln();

    let delta2 = if w_o == 0.0 {
        0.0
    } else {
        (w_o / (8.0 * PI)).ln().exp() * (ln_num - 2.0 * ln_z).exp()
    };

    // Diagnostics by trapezoid quadrature over the window.
    let n_q = QUADRATURE_POINTS;
    let de = (e_hi - e_lo) / (n_q - 1) as f64;
    let grid: Vec<f64> = (0..n_q).map(|i| e_lo + i as f64 * de).collect();
    let shifted_integral = |factor: f64, weight: &dyn Fn(f64) -> f64| -> f64 {
        let xs: Vec<f64> = grid.iter().map(|&e| -factor * beta * (e - e0)).collect();
        let m = xs.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let integrand: Vec<f64> = grid
            .iter()
            .zip(&xs)
            .map(|(&e, &x)| (x - m).exp() * weight(e))
            .collect();
        m.exp() * crate::util::trapezoid_uniform(&integrand, de)
    };
    let delta_e_prime = shifted_integral(1.0, &|_| 1.0);
    let z_prime_2beta = shifted_integral(2.0, &|e| dos_of_e(e));
    let dos_vals: Vec<f64> = grid.iter().map(|&e| dos_of_e(e)).collect();
    let dos_bar = crate::util::trapezoid_uniform(&dos_vals, de) / (e_hi - e_lo);

    // Representative Γ at the 2β-weighted mean energy.
    let weight_norm = shifted_integral(2.0, &|_| 1.0);
    let e_mean = shifted_integral(2.0, &|e| e) / weight_norm;
    let gamma = gamma_of_e(e_mean);

    Ok(FdtPrediction {
        delta2,
        w_o,
        c_const: w_o / (4.0 * PI),
        gamma,
        n_b,
        dos_bar,
        beta,
        z_beta: ln_z.exp(),
        z_prime_2beta,
        delta_e_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn gamma_fgr_values() {
        assert_eq!(gamma_fgr(0.0, 500, 1.0 / 500.0), 0.0);
        let g = gamma_fgr(0.05, 500, 1.0 / 500.0);
        assert_relative_eq!(g, PI * 0.0025, epsilon = 1e-15);
        assert!((g - 0.00785).abs() < 1e-4);
        let g2 = gamma_fgr(0.10, 500, 1.0 / 500.0);
        assert_relative_eq!(g2, 4.0 * g, epsilon = 1e-12);
    }

    #[test]
    fn lambda_peak_and_width_scaling() {
        let (gamma, omega0) = (0.01, 0.002);
        let peak = lambda_lorentzian(0.5, 0.5, gamma, omega0, 1);
        assert_relative_eq!(peak, omega0 / (PI * gamma), epsilon = 1e-12);
        // n = 2 halves the peak and doubles the half-width
        let peak2 = lambda_lorentzian(0.5, 0.5, gamma, omega0, 2);
        assert_relative_eq!(peak2, 0.5 * peak, epsilon = 1e-12);
        let half1 = lambda_lorentzian(0.5 + gamma, 0.5, gamma, omega0, 1);
        assert_relative_eq!(half1, 0.5 * peak, epsilon = 1e-12);
        let half2 = lambda_lorentzian(0.5 + 2.0 * gamma, 0.5, gamma, omega0, 2);
        assert_relative_eq!(half2, 0.5 * peak2, epsilon = 1e-12);
    }

    #[test]
    fn lambda_normalizes_over_the_level_ladder() {
        // Σ_α Λ(μ,α) ≈ (1/ω₀)∫Λ dE = 1 for bulk μ
        let n = 4000usize;
        let omega0 = 1.0 / n as f64;
        let gamma = 20.0 * omega0;
        let e_mu = 0.5;
        let terms: Vec<f64> = (1..=n)
            .map(|a| lambda_lorentzian(e_mu, a as f64 * omega0, gamma, omega0, 1))
            .collect();
        let total: f64 = terms.iter().sum();
        assert!((total - 1.0).abs() < 0.02, "Lorentzian sum {total}");
    }

    #[test]
    fn four_point_kronecker_patterns() {
        let n = 100usize;
        let omega0 = 1.0 / n as f64;
        let energies: Vec<f64> = (1..=n).map(|a| a as f64 * omega0).collect();
        let ctx = FourPointCtx {
            gamma: 10.0 * omega0,
            omega0,
            energies: &energies,
        };
        let (mu, nu) = (40, 55);

        // all four non-interacting indices distinct → no matching pattern
        assert_eq!(four_point(mu, nu, 10, 20, 30, 40, &ctx), 0.0);

        // α = α′, β = β′, α ≠ β → Gaussian term Λ(μ,α)Λ(ν,β)
        let g = four_point(mu, nu, 42, 57, 42, 57, &ctx);
        assert_relative_eq!(g, ctx.lam(mu, 42) * ctx.lam(nu, 57), epsilon = 1e-12);

        // α = β, α′ = β′ → negative orthogonality correction
        let c = four_point(mu, nu, 42, 42, 57, 57, &ctx);
        let expect = -ctx.lam(mu, 42) * ctx.lam(nu, 42) * ctx.lam(mu, 57) * ctx.lam(nu, 57)
            / ctx.lam2(mu, nu);
        assert_relative_eq!(c, expect, epsilon = 1e-12);
        assert!(c < 0.0);
    }

    #[test]
    fn four_point_exchange_symmetry() {
        let n = 60usize;
        let omega0 = 1.0 / n as f64;
        let energies: Vec<f64> = (1..=n).map(|a| a as f64 * omega0).collect();
        let ctx = FourPointCtx {
            gamma: 6.0 * omega0,
            omega0,
            energies: &energies,
        };
        for &(mu, nu) in &[(20, 31), (12, 12)] {
            for &(a, b, ap, bp) in &[
                (10, 11, 12, 13),
                (10, 10, 12, 12),
                (10, 12, 12, 10),
                (15, 15, 15, 15),
                (10, 11, 10, 11),
            ] {
                let lhs = four_point(mu, nu, a, b, ap, bp, &ctx);
                let rhs = four_point(mu, nu, ap, bp, a, b, &ctx);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn four_point_diagonal_collapses_to_gaussian_pairings() {
        let n = 50usize;
        let omega0 = 1.0 / n as f64;
        let energies: Vec<f64> = (1..=n).map(|a| a as f64 * omega0).collect();
        let ctx = FourPointCtx {
            gamma: 5.0 * omega0,
            omega0,
            energies: &energies,
        };
        let mu = 25;
        // ⟨c⁴⟩ = 3Λ² for a single Gaussian coordinate
        let all_same = four_point(mu, mu, 20, 20, 20, 20, &ctx);
        assert_relative_eq!(all_same, 3.0 * ctx.lam(mu, 20).powi(2), epsilon = 1e-12);
        // ⟨c²(α)c²(β)⟩ = Λ(μ,α)Λ(μ,β) for α≠β: only the first pairing fires
        let two_pairs = four_point(mu, mu, 20, 20, 30, 30, &ctx);
        assert_relative_eq!(
            two_pairs,
            ctx.lam(mu, 20) * ctx.lam(mu, 30),
            epsilon = 1e-12
        );
    }

    #[test]
    fn w_o_builtin_values() {
        let sz = ObservableMoments::of_kind(ObservableKind::OSym);
        assert_relative_eq!(w_o_constant(&sz, TemperatureRegime::HighT), 1.5, epsilon = 1e-15);
        assert_relative_eq!(w_o_constant(&sz, TemperatureRegime::LowT), 1.0, epsilon = 1e-15);

        let oo = ObservableMoments::of_kind(ObservableKind::OOdd);
        assert_relative_eq!(w_o_constant(&oo, TemperatureRegime::HighT), 0.375, epsilon = 1e-15);
        assert_relative_eq!(w_o_constant(&oo, TemperatureRegime::LowT), 0.25, epsilon = 1e-15);

        let zero = ObservableMoments {
            mean: 0.0,
            mean_sq: 0.0,
            o_up: 0.0,
        };
        assert_eq!(w_o_constant(&zero, TemperatureRegime::HighT), 0.0);
    }

    #[test]
    fn decay_prediction_endpoints() {
        assert_relative_eq!(predict_decay(0.0, 0.8, 0.1, 0.3), 0.8, epsilon = 1e-15);
        assert_relative_eq!(predict_decay(1e9, 0.8, 0.1, 0.3), 0.1, epsilon = 1e-12);
        // σ_z case: o_free = 1, o_de = 0 → e^(−2Γt)
        let gamma = 0.05;
        for &t in &[0.0, 1.0, 7.5] {
            assert_relative_eq!(
                predict_decay(t, 1.0, 0.0, gamma),
                (-2.0 * gamma * t).exp(),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn rmt_inf_t_prediction_scalings() {
        assert_eq!(predict_delta2_rmt_inf_t(0.0, 0.002, 250, 0.00785), 0.0);
        let d = predict_delta2_rmt_inf_t(1.5, 1.0 / 500.0, 250, PI * 0.05 * 0.05);
        assert!((d - 1.2e-4).abs() / 1.2e-4 < 0.02, "delta2 {d}");
        let half_nb = predict_delta2_rmt_inf_t(1.5, 1.0 / 500.0, 125, PI * 0.05 * 0.05);
        assert_relative_eq!(half_nb, 2.0 * d, epsilon = 1e-12);
    }

    fn rmt_input<'a>(
        w_o: f64,
        beta: f64,
        energies: &'a [f64],
        sector: &'a SectorMask,
        e0: f64,
    ) -> ThermalPredictionInput<'a> {
        ThermalPredictionInput {
            w_o,
            beta,
            energies,
            sector,
            e0,
            window: (0.0, 1.0),
        }
    }

    #[test]
    fn finite_t_beta_zero_limit_is_exact() {
        let n = 500usize;
        let omega0 = 1.0 / n as f64;
        let gamma = gamma_fgr(0.04, n, omega0);
        let energies: Vec<f64> = (1..=n).map(|a| a as f64 * omega0).collect();
        let sector = SectorMask::odd_alpha(n);
        let input = rmt_input(1.5, 0.0, &energies, &sector, 0.5);
        let pred = predict_delta2_finite_t(&input, |_| gamma, |_| 1.0 / omega0).unwrap();
        let inf_t = predict_delta2_rmt_inf_t(1.5, omega0, n / 2, gamma);
        assert_relative_eq!(pred.delta2, inf_t, max_relative = 1e-10);
        assert_relative_eq!(pred.z_beta, (n / 2) as f64, max_relative = 1e-12);
        assert_relative_eq!(pred.dos_bar, 1.0 / omega0, max_relative = 1e-12);
    }

    #[test]
    fn finite_t_consistency_chain_with_chi() {
        let n = 500usize;
        let omega0 = 1.0 / n as f64;
        let gamma = gamma_fgr(0.04, n, omega0);
        let energies: Vec<f64> = (1..=n).map(|a| a as f64 * omega0).collect();
        let sector = SectorMask::odd_alpha(n);
        let input = rmt_input(1.5, 0.0, &energies, &sector, 0.0);
        let pred = predict_delta2_finite_t(&input, |_| gamma, |_| 1.0 / omega0).unwrap();
        // Eq-11 value = χ·Γ⁻¹ with C = W_O/4π and D̄ = 1/ω₀
        let chi = chi_prediction(pred.c_const, pred.n_b, pred.dos_bar);
        assert_relative_eq!(pred.delta2, chi / gamma, max_relative = 1e-10);
        assert_relative_eq!(pred.c_const, 1.5 / (4.0 * PI), epsilon = 1e-14);
    }

    #[test]
    fn finite_t_prediction_is_continuous_in_beta() {
        let n = 300usize;
        let omega0 = 1.0 / n as f64;
        let gamma = gamma_fgr(0.05, n, omega0);
        let energies: Vec<f64> = (1..=n).map(|a| a as f64 * omega0).collect();
        let sector = SectorMask::odd_alpha(n);
        let at = |beta: f64| {
            let input = ThermalPredictionInput {
                w_o: 1.5,
                beta,
                energies: &energies,
                sector: &sector,
                e0: 0.5,
                window: (0.0, 1.0),
            };
            predict_delta2_finite_t(&input, |_| gamma, |_| 1.0 / omega0)
                .unwrap()
                .delta2
        };
        for &beta in &[0.0, 5.0, 50.0, 200.0] {
            let (a, b) = (at(beta), at(beta + 1e-4));
            assert!(
                (a - b).abs() <= 2e-3 * a.abs().max(b.abs()),
                "discontinuity at beta {beta}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn finite_t_rejects_bad_inputs() {
        let energies = vec![0.1, 0.2, 0.3, 0.4];
        let sector = SectorMask::odd_alpha(4);
        let bad_window = ThermalPredictionInput {
            w_o: 1.0,
            beta: 0.0,
            energies: &energies,
            sector: &sector,
            e0: 0.0,
            window: (1.0, 1.0),
        };
        assert!(predict_delta2_finite_t(&bad_window, |_| 0.1, |_| 1.0).is_err());
        let empty = SectorMask::custom(vec![false; 4]);
        let bad_sector = ThermalPredictionInput {
            w_o: 1.0,
            beta: 0.0,
            energies: &energies,
            sector: &empty,
            e0: 0.0,
            window: (0.0, 0.5),
        };
        assert!(predict_delta2_finite_t(&bad_sector, |_| 0.1, |_| 1.0).is_err());
    }

    #[test]
    fn chi_prediction_scalings() {
        let c = 1.5 / (4.0 * PI);
        let chi = chi_prediction(c, 256, 25.0);
        assert_relative_eq!(chi_prediction(c, 512, 25.0), 0.5 * chi, epsilon = 1e-15);
        // N_B = 2^(N−1) growth: χ·D̄ drops by exactly 2 per added qubit
        let ratio = (chi_prediction(c, 1 << 8, 1.0) * 1.0) / (chi_prediction(c, 1 << 9, 1.0) * 1.0);
        assert_relative_eq!(ratio, 2.0, epsilon = 1e-12);
    }
}
