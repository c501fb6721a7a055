//! Estimators extracting Γ̄⁻¹, D̄(E), δ², χ(N), and scaling exponents from
//! simulated signals, plus ensemble statistics of eigenvector correlators
//! checked against the closed-form theory.

use std::collections::BTreeMap;

use crate::dynamics::TimeSeries;
use crate::error::{Error, Result};
use crate::linalg::{self, DenseSymMatrix, Spectrum};
use crate::models::{build_rmt, make_observable, ObservableKind, RmtSpec};
use crate::theory::{four_point, gamma_fgr, lambda_lorentzian, FourPointCtx};
use crate::util::{mix64, pairwise_sum, trapezoid};

/// One experiment record feeding the fluctuation-dissipation sweeps:
/// measured fluctuations, measured inverse rate, and their ratio χ.
#[derive(Debug, Clone)]
pub struct FdtPoint {
    pub n_total: usize,
    /// Device Hilbert-space dimension N_B.
    pub n_b: usize,
    /// Probe-device coupling (g for RMT, g_sb for the chain).
    pub g_sb: f64,
    pub beta: f64,
    /// Measured δ²(∞).
    pub delta2: f64,
    /// Measured Γ̄⁻¹ (time-integral estimator).
    pub inv_gamma: f64,
    /// Unbiased average density of states.
    pub dos_bar: f64,
    /// χ = δ²/Γ̄⁻¹.
    pub chi: f64,
}

impl FdtPoint {
    pub fn new(
        n_total: usize,
        n_b: usize,
        g_sb: f64,
        beta: f64,
        delta2: f64,
        inv_gamma: f64,
        dos_bar: f64,
    ) -> Result<Self> {
        if !(delta2 >= 0.0) {
            return Err(Error::InvalidSpec(format!("delta2 must be >= 0, got {delta2}")));
        }
        if !(inv_gamma > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "inv_gamma must be positive, got {inv_gamma}"
            )));
        }
        Ok(Self {
            n_total,
            n_b,
            g_sb,
            beta,
            delta2,
            inv_gamma,
            dos_bar,
            chi: chi_estimate(delta2, inv_gamma),
        })
    }
}

/// Named fit parameters with goodness-of-fit summaries.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: BTreeMap<String, f64>,
    pub r_squared: f64,
    pub residual_norm: f64,
}

impl FitResult {
    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }
}

/// Ordinary least squares y = slope·x + intercept.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            context: "linear fit inputs",
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::FitFailure(format!(
            "linear fit needs at least 2 points, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let my = pairwise_sum(y) / n;
    let sxx: f64 = pairwise_sum(&x.iter().map(|&v| (v - mx) * (v - mx)).collect::<Vec<_>>());
    if sxx == 0.0 {
        return Err(Error::FitFailure("zero-variance abscissa".into()));
    }
    let sxy: f64 = pairwise_sum(
        &x.iter()
            .zip(y)
            .map(|(&a, &b)| (a - mx) * (b - my))
            .collect::<Vec<_>>(),
    );
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = pairwise_sum(&y.iter().map(|&v| (v - my) * (v - my)).collect::<Vec<_>>());
    let residuals: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| b - (slope * a + intercept))
        .collect();
    let ss_res = pairwise_sum(&residuals.iter().map(|&r| r * r).collect::<Vec<_>>());
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let mut params = BTreeMap::new();
    params.insert("slope".into(), slope);
    params.insert("intercept".into(), intercept);
    Ok(FitResult {
        params,
        r_squared,
        residual_norm: (ss_res / x.len() as f64).sqrt(),
    })
}

/// Log-linear decay-rate fit: least squares on ln|y(t) − o_de| over the
/// window where the excursion still exceeds 10% of its initial value, then
/// Γ̂ = −slope/2. Rejects non-decaying series and windows shorter than one
/// e-folding.
pub fn fit_decay_rate(series: &TimeSeries, o_de: f64) -> Result<FitResult> {
    let amp0 = (series.values()[0] - o_de).abs();
    if amp0 == 0.0 {
        return Err(Error::FitFailure("signal starts at its asymptote".into()));
    }
    let mut ts = Vec::new();
    let mut lns = Vec::new();
    for (&t, &y) in series.times().iter().zip(series.values()) {
        let amp = (y - o_de).abs();
        if amp < 0.1 * amp0 {
            break;
        }
        ts.push(t);
        lns.push(amp.ln());
    }
    if ts.len() < 3 {
        return Err(Error::FitFailure(format!(
            "decay window has only {} samples",
            ts.len()
        )));
    }
    if lns[0] - lns[lns.len() - 1] < 1.0 {
        return Err(Error::FitFailure(
            "series covers less than one e-folding of decay".into(),
        ));
    }
    let fit = linear_fit(&ts, &lns)?;
    let slope = fit.param("slope");
    if slope >= 0.0 {
        return Err(Error::FitFailure(format!(
            "series does not decay (log-slope {slope})"
        )));
    }
    let mut params = BTreeMap::new();
    params.insert("gamma".into(), -0.5 * slope);
    params.insert("amplitude".into(), fit.param("intercept").exp());
    Ok(FitResult {
        params,
        r_squared: fit.r_squared,
        residual_norm: fit.residual_norm,
    })
}

/// Thermal-average inverse rate from the time integral of the excursion:
/// ⟨⟨Γ⁻¹⟩⟩ = 2·∫(y − o_de) dt / (o_free − o_de).
///
/// Requires the tail to have relaxed: the signed mean of (y − o_de) over the
/// final tenth of the window must be below 1% of the quench amplitude
/// (equilibrium fluctuations oscillate around zero there, so the signed mean
/// is the right convergence gauge).
pub fn integral_inverse_gamma(series: &TimeSeries, o_free: f64, o_de: f64) -> Result<f64> {
    let amp = o_free - o_de;
    if amp.abs() < 1e-300 {
        return Err(Error::FitFailure("quench amplitude is zero".into()));
    }
    let n = series.len();
    let tail_start = n - (n / 10).max(2);
    let tail: Vec<f64> = series.values()[tail_start..]
        .iter()
        .map(|&y| y - o_de)
        .collect();
    let tail_mean = pairwise_sum(&tail) / tail.len() as f64;
    if tail_mean.abs() > 0.01 * amp.abs() {
        return Err(Error::TailNotConverged(format!(
            "tail mean {:.3e} exceeds 1% of the quench amplitude {:.3e}; \
             extend the window past t = {:.3e}",
            tail_mean,
            amp,
            series.times()[n - 1]
        )));
    }
    let excursion: Vec<f64> = series.values().iter().map(|&y| y - o_de).collect();
    Ok(2.0 * trapezoid(series.times(), &excursion) / amp)
}

/// Unbiased average density of states: (number of levels)/(spectral span).
pub fn dos_average(energies: &[f64]) -> f64 {
    let lo = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    energies.len() as f64 / (hi - lo)
}

/// χ = δ²/Γ̄⁻¹.
pub fn chi_estimate(delta2: f64, inv_gamma: f64) -> f64 {
    delta2 / inv_gamma
}

/// Least squares of ln y against N for y = a·e^(−cN); `c` is positive for
/// decreasing data.
pub fn fit_exponential_scaling(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::FitFailure(format!(
            "exponential fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, y)) = points.iter().find(|&&(_, y)| !(y > 0.0)) {
        return Err(Error::FitFailure(format!(
            "exponential fit needs positive values, got y = {y} at N = {n}"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n).collect();
    let lns: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let fit = linear_fit(&xs, &lns)?;
    let mut params = BTreeMap::new();
    params.insert("a".into(), fit.param("intercept").exp());
    params.insert("c".into(), -fit.param("slope"));
    Ok(FitResult {
        params,
        r_squared: fit.r_squared,
        residual_norm: fit.residual_norm,
    })
}

/// Piecewise-linear interpolant of per-state decay rates Γ(E_α).
#[derive(Debug, Clone)]
pub struct GammaProfile {
    points: Vec<(f64, f64)>,
}

impl GammaProfile {
    /// Γ at energy `e`, clamped to the sampled range.
    pub fn at(&self, e: f64) -> f64 {
        let pts = &self.points;
        if e <= pts[0].0 {
            return pts[0].1;
        }
        if e >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let k = pts.partition_point(|&(x, _)| x < e);
        let (x0, y0) = pts[k - 1];
        let (x1, y1) = pts[k];
        y0 + (y1 - y0) * (e - x0) / (x1 - x0)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.points.iter().map(|&(_, g)| g).collect::<Vec<_>>())
            / self.points.len() as f64
    }

    /// Largest relative deviation of the sampled rates from their mean.
    pub fn max_rel_deviation(&self) -> f64 {
        let m = self.mean();
        self.points
            .iter()
            .map(|&(_, g)| (g - m).abs() / m)
            .fold(0.0, f64::max)
    }

    /// Slow-variation gauge max_E |Γ(E) − Γ(E + Γ(E))|/Γ(E); the theory
    /// assumes this is ≪ 1.
    pub fn slow_variation_max(&self) -> f64 {
        self.points
            .iter()
            .map(|&(e, g)| (g - self.at(e + g)).abs() / g)
            .fold(0.0, f64::max)
    }
}

/// Per-basis-state decay rates: quench each sampled basis state |φ_α⟩, track
/// its σ_z-like signal, and fit the decay. States outside the central 60% of
/// the unperturbed spectrum are excluded (edge Lorentzians are one-sided).
/// Individual failed fits are skipped; fewer than two usable states is an
/// error, which is also what the uncoupled V = 0 model produces.
pub fn empirical_gamma_profile(
    spectrum: &Spectrum,
    energies_h0: &[f64],
    kind: ObservableKind,
    sample: &[usize],
    t_end: f64,
    n_samples: usize,
) -> Result<GammaProfile> {
    let d = spectrum.dim();
    if energies_h0.len() != d {
        return Err(Error::DimensionMismatch {
            context: "H0 energies vs spectrum",
            left: energies_h0.len(),
            right: d,
        });
    }
    let obs = make_observable(kind, d)?;
    // rotate the observable once; each basis-state quench is then rank-1
    let q = spectrum.vectors();
    let mut scaled = q.clone();
    for (mut row, &ov) in scaled.rows_mut().into_iter().zip(obs.values()) {
        row.mapv_inplace(|v| v * ov);
    }
    let obs_rot = q.t().dot(&scaled);

    let e_lo = energies_h0.iter().cloned().fold(f64::INFINITY, f64::min);
    let e_hi = energies_h0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = e_hi - e_lo;
    let bulk = |e: f64| e >= e_lo + 0.2 * span && e <= e_hi - 0.2 * span;

    let dt = t_end / (n_samples - 1) as f64;
    let times: Vec<f64> = (0..n_samples).map(|i| i as f64 * dt).collect();

    let mut pts: Vec<(f64, f64)> = Vec::new();
    for &alpha in sample {
        if alpha >= d || !bulk(energies_h0[alpha]) {
            continue;
        }
        let c: Vec<f64> = (0..d).map(|mu| spectrum.coefficient(alpha, mu)).collect();
        let o_de = pairwise_sum(
            &(0..d)
                .map(|mu| c[mu] * c[mu] * obs_rot[[mu, mu]])
                .collect::<Vec<_>>(),
        );
        let mut values = Vec::with_capacity(n_samples);
        for &t in &times {
            let mut u = vec![0.0; d];
            let mut v = vec![0.0; d];
            for mu in 0..d {
                let (s, co) = (spectrum.energies()[mu] * t).sin_cos();
                u[mu] = c[mu] * co;
                v[mu] = c[mu] * s;
            }
            let mut acc = Vec::with_capacity(d);
            for mu in 0..d {
                let mut row_u = 0.0;
                let mut row_v = 0.0;
                for nu in 0..d {
                    row_u += obs_rot[[mu, nu]] * u[nu];
                    row_v += obs_rot[[mu, nu]] * v[nu];
                }
                acc.push(u[mu] * row_u + v[mu] * row_v);
            }
            values.push(pairwise_sum(&acc));
        }
        let series = TimeSeries::new(times.clone(), values)?;
        match fit_decay_rate(&series, o_de) {
            Ok(fit) => pts.push((energies_h0[alpha], fit.param("gamma"))),
            Err(e) => log::warn!("basis state {alpha}: decay fit failed ({e})"),
        }
    }
    if pts.len() < 2 {
        return Err(Error::FitFailure(format!(
            "only {} usable per-state decay fits; no rate profile",
            pts.len()
        )));
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite energies"));
    Ok(GammaProfile { points: pts })
}

/// One accumulated bin of the eigenvector-intensity profile.
#[derive(Debug, Clone)]
pub struct CorrelatorBin {
    /// Energy offset E_α − E_μ at the bin center.
    pub energy_offset: f64,
    /// Ensemble mean of c_μ(α)².
    pub mean_c2: f64,
    /// Λ(μ,α) at the bin center.
    pub lambda_theory: f64,
    pub count: u64,
}

/// Measured vs predicted coincident-pair four-point sum for one (μ,ν).
#[derive(Debug, Clone)]
pub struct PairStat {
    pub mu: usize,
    pub nu: usize,
    /// Ensemble mean of Σ_{α≠α′} c_μ(α)c_ν(α)c_μ(α′)c_ν(α′).
    pub measured: f64,
    /// Same sum evaluated from the four-point theory.
    pub theory: f64,
}

/// Ensemble statistics of the eigenvector correlators against theory.
#[derive(Debug, Clone)]
pub struct CorrelatorReport {
    pub realizations: usize,
    pub gamma_theory: f64,
    pub gamma_fitted: f64,
    /// |fitted − theory|/theory.
    pub width_rel_err: f64,
    /// Worst per-realization deviation of Σ_α c_μ(α)² from 1.
    pub sum_rule_max_dev: f64,
    /// Fraction of sampled (μ,ν) pairs with a negative coincident-pair sum.
    pub negative_fraction: f64,
    pub pairs: Vec<PairStat>,
    pub bins: Vec<CorrelatorBin>,
}

/// Run `m` GOE realizations of the model and accumulate eigenvector
/// correlator statistics: the Λ(μ,α) intensity profile with a fitted
/// Lorentzian width, coincident-pair four-point combinations for the sampled
/// probe pairs, and the per-realization orthonormality sum rule.
///
/// Realization r uses seed mix64(spec.seed + r), so the ensemble is fully
/// determined by the spec.
pub fn correlator_ensemble(spec: &RmtSpec, m: usize, probes: &[usize]) -> Result<CorrelatorReport> {
    if m < 50 {
        return Err(Error::InvalidSpec(format!(
            "correlator ensembles need at least 50 realizations, got {m}"
        )));
    }
    let n = spec.n;
    let omega0 = spec.omega0;
    let gamma_theory = gamma_fgr(spec.g, n, omega0);
    let energies_h0 = spec.h0_energies();

    // default probes: a band of bulk eigenstates around the spectrum center
    let probes: Vec<usize> = if probes.is_empty() {
        let lo = (n as f64 * 0.46) as usize;
        (lo..lo + 16.min(n / 4)).collect()
    } else {
        probes.to_vec()
    };
    for &p in &probes {
        if p >= n {
            return Err(Error::InvalidSpec(format!("probe index {p} out of range")));
        }
    }
    let mut pair_list: Vec<(usize, usize)> = Vec::new();
    for (i, &mu) in probes.iter().enumerate() {
        for &nu in &probes[i + 1..] {
            pair_list.push((mu, nu));
        }
    }
    if pair_list.is_empty() {
        return Err(Error::InvalidSpec("need at least two probe indices".into()));
    }

    // profile bins in units of ω₀, wide enough to hold the Lorentzian body
    let half_bins = ((12.0 * gamma_theory / omega0).ceil() as usize).clamp(20, n / 2);
    let n_bins = 2 * half_bins + 1;
    let mut bin_sum = vec![0.0f64; n_bins];
    let mut bin_count = vec![0u64; n_bins];
    let bulk = |idx: usize| idx >= n / 5 && idx < n - n / 5;

    let mut pair_acc = vec![0.0f64; pair_list.len()];
    let mut sum_rule_max_dev = 0.0f64;

    for r in 0..m {
        let seed_r = mix64(spec.seed.wrapping_add(r as u64));
        let (h0, v) = build_rmt(&spec.with_seed(seed_r))?;
        let h = DenseSymMatrix::from_array(h0.as_array() + v.as_array())?;
        let s = linalg::eigh(&h)?;
        let q = s.vectors();

        for mu in 0..n {
            let col = q.column(mu);
            let norm: f64 = col.iter().map(|&c| c * c).sum();
            sum_rule_max_dev = sum_rule_max_dev.max((norm - 1.0).abs());
            if !bulk(mu) {
                continue;
            }
            let e_mu = s.energies()[mu];
            for alpha in 0..n {
                let k = ((energies_h0[alpha] - e_mu) / omega0).round() as i64;
                if k.unsigned_abs() as usize <= half_bins {
                    let b = (k + half_bins as i64) as usize;
                    bin_sum[b] += col[alpha] * col[alpha];
                    bin_count[b] += 1;
                }
            }
        }

        for (pi, &(mu, nu)) in pair_list.iter().enumerate() {
            let (cm, cn) = (q.column(mu), q.column(nu));
            let mut dot = 0.0;
            let mut sq = 0.0;
            for alpha in 0..n {
                dot += cm[alpha] * cn[alpha];
                sq += cm[alpha] * cm[alpha] * cn[alpha] * cn[alpha];
            }
            // Σ_{α≠α′} c_μ(α)c_ν(α)c_μ(α′)c_ν(α′) = (Σ_α c_μc_ν)² − Σ_α c_μ²c_ν²
            pair_acc[pi] += dot * dot - sq;
        }
    }

    let bins: Vec<CorrelatorBin> = (0..n_bins)
        .filter(|&b| bin_count[b] > 0)
        .map(|b| {
            let x = (b as i64 - half_bins as i64) as f64 * omega0;
            CorrelatorBin {
                energy_offset: x,
                mean_c2: bin_sum[b] / bin_count[b] as f64,
                lambda_theory: lambda_lorentzian(0.0, x, gamma_theory, omega0, 1),
                count: bin_count[b],
            }
        })
        .collect();

    let gamma_fitted = fit_lorentzian_width(&bins, omega0)?;

    let ctx = FourPointCtx {
        gamma: gamma_theory,
        omega0,
        energies: &energies_h0,
    };
    let pairs: Vec<PairStat> = pair_list
        .iter()
        .zip(&pair_acc)
        .map(|(&(mu, nu), &acc)| {
            let mut theory = 0.0;
            for alpha in 0..n {
                for alpha_p in 0..n {
                    if alpha_p != alpha {
                        theory += four_point(mu, nu, alpha, alpha, alpha_p, alpha_p, &ctx);
                    }
                }
            }
            PairStat {
                mu,
                nu,
                measured: acc / m as f64,
                theory,
            }
        })
        .collect();
    let negative_fraction =
        pairs.iter().filter(|p| p.measured < 0.0).count() as f64 / pairs.len() as f64;

    Ok(CorrelatorReport {
        realizations: m,
        gamma_theory,
        gamma_fitted,
        width_rel_err: (gamma_fitted - gamma_theory).abs() / gamma_theory,
        sum_rule_max_dev,
        negative_fraction,
        pairs,
        bins,
    })
}

/// One-parameter Lorentzian width fit of the intensity profile; the
/// amplitude is tied to the normalization Σ_α⟨c²⟩ = 1. Initialized from the
/// half-width at half-maximum, refined by golden-section search on the sum
/// of squared residuals.
fn fit_lorentzian_width(bins: &[CorrelatorBin], omega0: f64) -> Result<f64> {
    if bins.len() < 5 {
        return Err(Error::FitFailure("too few profile bins".into()));
    }
    let peak = bins.iter().map(|b| b.mean_c2).fold(0.0f64, f64::max);
    if peak <= 0.0 {
        return Err(Error::FitFailure("empty intensity profile".into()));
    }
    let hwhm = bins
        .iter()
        .filter(|b| b.mean_c2 <= 0.5 * peak && b.energy_offset != 0.0)
        .map(|b| b.energy_offset.abs())
        .fold(f64::INFINITY, f64::min);
    if !hwhm.is_finite() {
        return Err(Error::FitFailure(
            "profile never drops below half maximum inside the binned window".into(),
        ));
    }
    let sse = |gamma: f64| -> f64 {
        bins.iter()
            .map(|b| {
                let model = lambda_lorentzian(0.0, b.energy_offset, gamma, omega0, 1);
                (model - b.mean_c2).powi(2)
            })
            .sum()
    };
    let (mut a, mut b) = (hwhm / 10.0, hwhm * 10.0);
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
    let (mut f1, mut f2) = (sse(x1), sse(x2));
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = sse(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = sse(x2);
        }
    }
    Ok(0.5 * (a + b))
}
