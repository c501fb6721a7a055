//! Model construction: the random-matrix Hamiltonian, the probe + spin-chain
//! Hamiltonian, initial-state weights, and the diagonal probe observables.
//!
//! Basis ordering convention used everywhere: basis states of the joint
//! probe + device system are ordered so that `index = 2·k + s` with `k` the
//! device eigenstate index and `s = 0` for probe-up, `s = 1` for probe-down.
//! In 1-based α labelling this makes odd α ⇔ probe ↑, so sector masks are
//! plain index-parity tests.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{self, DenseSymMatrix, PauliKind, Spectrum, MAX_DIM};
use crate::util::{mix64, pairwise_sum};

/// Parameters of the random-matrix model: `N` equally spaced levels with
/// spacing ω₀ = 1/N perturbed by a GOE matrix of strength `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmtSpec {
    pub n: usize,
    pub g: f64,
    pub omega0: f64,
    pub seed: u64,
}

impl RmtSpec {
    pub fn new(n: usize, g: f64, seed: u64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidSpec(format!(
                "RMT dimension must be even and at least 4, got {n}"
            )));
        }
        if !(g >= 0.0) || !g.is_finite() {
            return Err(Error::InvalidSpec(format!("coupling g must be >= 0, got {g}")));
        }
        Ok(Self {
            n,
            g,
            omega0: 1.0 / n as f64,
            seed,
        })
    }

    /// Device dimension N_B = N/2 (odd-α sector size).
    pub fn n_b(&self) -> usize {
        self.n / 2
    }

    /// Unperturbed energies E_α = α·ω₀ for α = 1..N.
    pub fn h0_energies(&self) -> Vec<f64> {
        (1..=self.n).map(|a| a as f64 * self.omega0).collect()
    }

    /// Same model with a different seed; used for ensemble runs.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..*self }
    }
}

/// Parameters of the probe + spin-chain model. The probe is site 1, the
/// device occupies sites 2..=n_total and is coupled to the probe at site
/// `n_m` (2 by convention).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinChainSpec {
    pub n_total: usize,
    pub n_m: usize,
    pub bz: f64,
    pub bx: f64,
    pub jz: f64,
    pub jx: f64,
    pub jz_sb: f64,
    pub jx_sb: f64,
}

impl SpinChainSpec {
    pub fn new(
        n_total: usize,
        n_m: usize,
        bz: f64,
        bx: f64,
        jz: f64,
        jx: f64,
        jz_sb: f64,
        jx_sb: f64,
    ) -> Result<Self> {
        if n_total < 3 {
            return Err(Error::InvalidSpec(format!(
                "chain needs at least 3 sites, got {n_total}"
            )));
        }
        if n_m < 2 || n_m > n_total {
            return Err(Error::InvalidSpec(format!(
                "probe must couple to a device site: 2 <= n_m <= {n_total}, got {n_m}"
            )));
        }
        if n_total >= 63 || (1usize << n_total) > MAX_DIM {
            return Err(Error::DimensionLimit {
                dim: 1usize.checked_shl(n_total as u32).unwrap_or(usize::MAX),
                max: MAX_DIM,
            });
        }
        for (name, v) in [
            ("bz", bz),
            ("bx", bx),
            ("jz", jz),
            ("jx", jx),
            ("jz_sb", jz_sb),
            ("jx_sb", jx_sb),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidSpec(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(Self {
            n_total,
            n_m,
            bz,
            bx,
            jz,
            jx,
            jz_sb,
            jx_sb,
        })
    }

    /// Mixed longitudinal/transverse fields with O(1) couplings, a standard
    /// non-integrable regime. `g_sb` sets both probe-device couplings.
    pub fn with_defaults(n_total: usize, g_sb: f64) -> Result<Self> {
        Self::new(n_total, 2, 0.5, 0.525, 1.0, 1.0, g_sb, g_sb)
    }

    /// Joint Hilbert-space dimension 2^N.
    pub fn dim(&self) -> usize {
        1 << self.n_total
    }

    /// Device dimension N_B = 2^(N−1).
    pub fn n_b(&self) -> usize {
        1 << (self.n_total - 1)
    }
}

/// Mask identifying the basis states an initial state may occupy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorMask {
    mask: Vec<bool>,
}

impl SectorMask {
    /// Odd-α sector (probe ↑): 0-based indices with even parity.
    pub fn odd_alpha(dim: usize) -> Self {
        Self {
            mask: (0..dim).map(|i| i % 2 == 0).collect(),
        }
    }

    /// Even-α sector (probe ↓).
    pub fn even_alpha(dim: usize) -> Self {
        Self {
            mask: (0..dim).map(|i| i % 2 == 1).collect(),
        }
    }

    pub fn all(dim: usize) -> Self {
        Self {
            mask: vec![true; dim],
        }
    }

    pub fn custom(mask: Vec<bool>) -> Self {
        Self { mask }
    }

    /// Intersect with an energy cutoff: keep only states with E_α ≥ e_min.
    /// Used to start finite-temperature states in the bulk of the spectrum
    /// rather than at its edge.
    pub fn with_energy_at_least(&self, energies: &[f64], e_min: f64) -> Self {
        Self {
            mask: self
                .mask
                .iter()
                .zip(energies)
                .map(|(&m, &e)| m && e >= e_min)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn allows(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    /// Number of allowed states.
    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }
}

/// Diagonal initial-state weights w_α in the non-interacting basis.
#[derive(Debug, Clone)]
pub struct StateWeights {
    w: Vec<f64>,
    beta: f64,
    e0: f64,
    sector: SectorMask,
}

impl StateWeights {
    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn sector(&self) -> &SectorMask {
        &self.sector
    }
}

/// Gibbs weights w_α ∝ e^(−β(E_α−e0)) on the sector, zero elsewhere,
/// normalized to Σ w_α = 1. β = 0 gives the uniform sector state. The offset
/// `e0` cancels after normalization; exponentials are max-shifted so no
/// choice of β or e0 underflows the whole sector.
pub fn thermal_weights(
    energies: &[f64],
    beta: f64,
    sector: &SectorMask,
    e0: f64,
) -> Result<StateWeights> {
    if sector.len() != energies.len() {
        return Err(Error::DimensionMismatch {
            context: "sector mask vs energies",
            left: sector.len(),
            right: energies.len(),
        });
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidSpec(format!("beta must be >= 0, got {beta}")));
    }
    if sector.count() == 0 {
        return Err(Error::WeightUnderflow(
            "sector is empty; relax the mask or lower the energy cutoff".into(),
        ));
    }
    let mut max_x = f64::NEG_INFINITY;
    for idx in sector.indices() {
        let x = -beta * (energies[idx] - e0);
        if !x.is_finite() {
            return Err(Error::WeightUnderflow(format!(
                "non-finite Boltzmann exponent at state {idx}; \
                 shift e0 closer to the occupied energies or reduce beta"
            )));
        }
        max_x = max_x.max(x);
    }
    let mut w = vec![0.0; energies.len()];
    for idx in sector.indices() {
        w[idx] = (-beta * (energies[idx] - e0) - max_x).exp();
    }
    let norm = pairwise_sum(&w);
    for v in &mut w {
        *v /= norm;
    }
    Ok(StateWeights {
        w,
        beta,
        e0,
        sector: sector.clone(),
    })
}

/// The three built-in probe observables, diagonal in the non-interacting
/// basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    /// σ_z of the probe: +1 on odd α, −1 on even α.
    SigmaZProbe,
    /// Projector-like observable: 1 on odd α, 0 otherwise.
    OOdd,
    /// Same vector as σ_z of the probe; kept as a separate kind for the
    /// random-matrix experiments.
    OSym,
}

impl ObservableKind {
    pub fn name(&self) -> &'static str {
        match self {
            ObservableKind::SigmaZProbe => "sigma_z_probe",
            ObservableKind::OOdd => "o_odd",
            ObservableKind::OSym => "o_sym",
        }
    }
}

impl std::str::FromStr for ObservableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma_z_probe" => Ok(ObservableKind::SigmaZProbe),
            "o_odd" => Ok(ObservableKind::OOdd),
            "o_sym" => Ok(ObservableKind::OSym),
            other => Err(Error::InvalidSpec(format!("unknown observable kind {other:?}"))),
        }
    }
}

/// Diagonal matrix elements O_αα of a probe observable.
#[derive(Debug, Clone)]
pub struct DiagonalObservable {
    d: Vec<f64>,
}

impl DiagonalObservable {
    pub fn from_values(d: Vec<f64>) -> Result<Self> {
        if let Some((i, &v)) = d.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteEntry {
                row: i,
                col: i,
                value: v,
            });
        }
        Ok(Self { d })
    }

    pub fn values(&self) -> &[f64] {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }
}

/// Build one of the three probe observables for joint dimension `dim`.
pub fn make_observable(kind: ObservableKind, dim: usize) -> Result<DiagonalObservable> {
    if dim % 2 != 0 {
        return Err(Error::InvalidSpec(format!(
            "observable dimension must be even, got {dim}"
        )));
    }
    let d = (0..dim)
        .map(|i| {
            let odd_alpha = i % 2 == 0;
            match kind {
                ObservableKind::SigmaZProbe | ObservableKind::OSym => {
                    if odd_alpha {
                        1.0
                    } else {
                        -1.0
                    }
                }
                ObservableKind::OOdd => {
                    if odd_alpha {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        })
        .collect();
    Ok(DiagonalObservable { d })
}

// --- counter-based Gaussian sampling -------------------------------------

/// Key for a matrix-valued stream of Gaussians.
fn stream_key(seed: u64, stream: u64) -> u64 {
    mix64(mix64(seed) ^ stream.wrapping_mul(0xd1b54a32d192ed03))
}

/// Standard normal keyed by (stream key, entry index); independent of
/// evaluation order and worker count. Two SplitMix64 outputs feed one
/// Box-Muller draw.
fn standard_normal(key: u64, index: u64) -> f64 {
    let a = mix64(key.wrapping_add((2 * index).wrapping_mul(0x9e3779b97f4a7c15)));
    let b = mix64(key.wrapping_add((2 * index + 1).wrapping_mul(0x9e3779b97f4a7c15)));
    // u1 ∈ (0,1] keeps the log finite; u2 ∈ [0,1).
    let u1 = ((a >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64);
    let u2 = (b >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Build the random-matrix model: H₀ diagonal with E_α = α·ω₀ and a GOE
/// perturbation V with ⟨V_αβ²⟩ = g²/N off the diagonal and 2g²/N on it,
/// fully determined by the seed.
pub fn build_rmt(spec: &RmtSpec) -> Result<(DenseSymMatrix, DenseSymMatrix)> {
    let n = spec.n;
    let h0 = DenseSymMatrix::from_diag(&spec.h0_energies())?;

    let sigma_off = (spec.g * spec.g / n as f64).sqrt();
    let sigma_diag = (2.0 * spec.g * spec.g / n as f64).sqrt();
    let key = stream_key(spec.seed, 0);

    let mut v = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let sigma = if i == j { sigma_diag } else { sigma_off };
            let z = sigma * standard_normal(key, (i * n + j) as u64);
            v[[i, j]] = z;
            v[[j, i]] = z;
        }
    }
    let v = DenseSymMatrix::from_array(v)?;
    Ok((h0, v))
}

/// Device Hamiltonian H_B on sites 2..=n_total, expressed in the device
/// computational basis (device site j ↔ position j−1 of an (n_total−1)-site
/// register). Open boundary conditions.
fn device_hamiltonian(spec: &SpinChainSpec) -> Result<Array2<f64>> {
    let n_dev = spec.n_total - 1;
    let dim = 1usize << n_dev;
    let mut h = Array2::zeros((dim, dim));
    for j in 2..=spec.n_total {
        let pos = j - 1;
        h = h + spec.bz * &pauli(PauliKind::Z, pos, n_dev)? + spec.bx * &pauli(PauliKind::X, pos, n_dev)?;
    }
    for j in 2..spec.n_total {
        let (a, b) = (j - 1, j);
        let zz = pauli(PauliKind::Z, a, n_dev)?.dot(&pauli(PauliKind::Z, b, n_dev)?);
        let hop = pauli(PauliKind::Plus, a, n_dev)?.dot(&pauli(PauliKind::Minus, b, n_dev)?)
            + pauli(PauliKind::Minus, a, n_dev)?.dot(&pauli(PauliKind::Plus, b, n_dev)?);
        h = h + spec.jz * &zz + spec.jx * &hop;
    }
    Ok(h)
}

fn pauli(kind: PauliKind, site: usize, n_sites: usize) -> Result<Array2<f64>> {
    linalg::pauli_site(kind, site, n_sites)
}

/// Probe-device coupling H_SB in the full computational basis (probe = site 1).
fn coupling_hamiltonian(spec: &SpinChainSpec) -> Result<Array2<f64>> {
    let n = spec.n_total;
    let zz = pauli(PauliKind::Z, 1, n)?.dot(&pauli(PauliKind::Z, spec.n_m, n)?);
    let hop = pauli(PauliKind::Plus, 1, n)?.dot(&pauli(PauliKind::Minus, spec.n_m, n)?)
        + pauli(PauliKind::Minus, 1, n)?.dot(&pauli(PauliKind::Plus, spec.n_m, n)?);
    Ok(spec.jz_sb * &zz + spec.jx_sb * &hop)
}

/// Full-space H₀ = 1⊗H_B and V = H_SB in the computational basis. Exposed
/// for oracle checks against independently assembled Hamiltonians; the
/// simulation pipeline uses [`build_spin_chain`].
pub fn chain_computational(spec: &SpinChainSpec) -> Result<(Array2<f64>, Array2<f64>)> {
    let n = spec.n_total;
    let dim = spec.dim();
    let mut h0 = Array2::zeros((dim, dim));
    for j in 2..=n {
        h0 = h0 + spec.bz * &pauli(PauliKind::Z, j, n)? + spec.bx * &pauli(PauliKind::X, j, n)?;
    }
    for j in 2..n {
        let zz = pauli(PauliKind::Z, j, n)?.dot(&pauli(PauliKind::Z, j + 1, n)?);
        let hop = pauli(PauliKind::Plus, j, n)?.dot(&pauli(PauliKind::Minus, j + 1, n)?)
            + pauli(PauliKind::Minus, j, n)?.dot(&pauli(PauliKind::Plus, j + 1, n)?);
        h0 = h0 + spec.jz * &zz + spec.jx * &hop;
    }
    Ok((h0, coupling_hamiltonian(spec)?))
}

/// Congruence transform M → (U⊗1₂)ᵀ M (U⊗1₂) exploiting that the probe bit
/// is untouched: each of the four probe blocks is a device-dimension
/// congruence.
fn congruence_device_blocks(u_dev: &Array2<f64>, m_full: &Array2<f64>) -> Array2<f64> {
    let d_dev = u_dev.nrows();
    let dim = 2 * d_dev;
    let mut out = Array2::zeros((dim, dim));
    for s in 0..2usize {
        for sp in 0..2usize {
            let mut block = Array2::zeros((d_dev, d_dev));
            for m in 0..d_dev {
                for mp in 0..d_dev {
                    block[[m, mp]] = m_full[[2 * m + s, 2 * mp + sp]];
                }
            }
            let rotated = u_dev.t().dot(&block).dot(u_dev);
            for k in 0..d_dev {
                for kp in 0..d_dev {
                    out[[2 * k + s, 2 * kp + sp]] = rotated[[k, kp]];
                }
            }
        }
    }
    out
}

/// Build the probe + spin-chain model in the non-interacting eigenbasis:
/// H₀ diagonal with the device eigenenergies (each doubly degenerate in the
/// probe), V the coupling H_SB rotated into that basis. The returned basis
/// ordering guarantees odd α ⇔ probe ↑.
pub fn build_spin_chain(spec: &SpinChainSpec) -> Result<(DenseSymMatrix, DenseSymMatrix)> {
    let h_dev = DenseSymMatrix::from_array(device_hamiltonian(spec)?)?;
    let device = linalg::eigh(&h_dev)?;
    build_spin_chain_with_device(spec, &device)
}

/// As [`build_spin_chain`] but reusing an already-diagonalized device; the
/// device spectrum is also what experiments need for DOS estimates.
pub fn build_spin_chain_with_device(
    spec: &SpinChainSpec,
    device: &Spectrum,
) -> Result<(DenseSymMatrix, DenseSymMatrix)> {
    let d_dev = device.dim();
    if d_dev != spec.n_b() {
        return Err(Error::DimensionMismatch {
            context: "device spectrum vs chain spec",
            left: d_dev,
            right: spec.n_b(),
        });
    }
    let mut energies = vec![0.0; 2 * d_dev];
    for k in 0..d_dev {
        energies[2 * k] = device.energies()[k];
        energies[2 * k + 1] = device.energies()[k];
    }
    let h0 = DenseSymMatrix::from_diag(&energies)?;

    let v_comp = coupling_hamiltonian(spec)?;
    let v_rot = congruence_device_blocks(device.vectors(), &v_comp);
    let v = DenseSymMatrix::from_array(v_rot)?;
    Ok((h0, v))
}

/// Diagonalize the device of a chain spec. Split out so pipelines can keep
/// the device spectrum around.
pub fn chain_device_spectrum(spec: &SpinChainSpec) -> Result<Spectrum> {
    let h_dev = DenseSymMatrix::from_array(device_hamiltonian(spec)?)?;
    linalg::eigh(&h_dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rmt_zero_coupling_gives_zero_perturbation() {
        let spec = RmtSpec::new(16, 0.0, 7).unwrap();
        let (_, v) = build_rmt(&spec).unwrap();
        assert_eq!(v.norm_max(), 0.0);
    }

    #[test]
    fn rmt_h0_is_equally_spaced() {
        let spec = RmtSpec::new(8, 0.1, 3).unwrap();
        let (h0, _) = build_rmt(&spec).unwrap();
        for i in 0..8 {
            assert_abs_diff_eq!(
                h0.as_array()[[i, i]],
                (i + 1) as f64 / 8.0,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn rmt_is_seed_deterministic() {
        let spec = RmtSpec::new(64, 0.3, 123).unwrap();
        let (_, v1) = build_rmt(&spec).unwrap();
        let (_, v2) = build_rmt(&spec).unwrap();
        assert_eq!(v1.as_array(), v2.as_array());
        let (_, v3) = build_rmt(&spec.with_seed(124)).unwrap();
        assert_ne!(v1.as_array(), v3.as_array());
    }

    fn sample_variance(xs: &[f64]) -> f64 {
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64
    }

    #[test]
    fn goe_moments_match_ensemble_definition() {
        let n = 2000usize;
        let g = 0.05;
        let spec = RmtSpec::new(n, g, 42).unwrap();
        let (_, v) = build_rmt(&spec).unwrap();
        let a = v.as_array();

        let mut off = Vec::with_capacity(n * (n - 1) / 2);
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            diag.push(a[[i, i]]);
            for j in (i + 1)..n {
                off.push(a[[i, j]]);
            }
        }
        let target = g * g / n as f64;
        let var_off = sample_variance(&off);
        assert!(
            (var_off - target).abs() / target < 0.05,
            "off-diagonal variance {var_off} vs {target}"
        );
        let var_diag = sample_variance(&diag);
        assert!(
            (var_diag - 2.0 * var_off).abs() / (2.0 * var_off) < 0.15,
            "diagonal variance {var_diag} vs {}",
            2.0 * var_off
        );
    }

    #[test]
    fn goe_variance_halves_when_dimension_doubles() {
        let g = 0.05;
        let var_at = |n: usize| {
            let spec = RmtSpec::new(n, g, 9).unwrap();
            let (_, v) = build_rmt(&spec).unwrap();
            let a = v.as_array();
            let mut off = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    off.push(a[[i, j]]);
                }
            }
            sample_variance(&off)
        };
        let v1000 = var_at(1000);
        let v2000 = var_at(2000);
        let ratio = v1000 / v2000;
        assert!((ratio - 2.0).abs() < 0.1, "variance ratio {ratio}");
    }

    #[test]
    fn thermal_weights_uniform_at_infinite_temperature() {
        let energies: Vec<f64> = (1..=8).map(|a| a as f64 / 8.0).collect();
        let sector = SectorMask::odd_alpha(8);
        let w = thermal_weights(&energies, 0.0, &sector, 0.0).unwrap();
        for idx in 0..8 {
            let expect = if idx % 2 == 0 { 0.25 } else { 0.0 };
            assert_abs_diff_eq!(w.weights()[idx], expect, epsilon = 1e-15);
        }
    }

    #[test]
    fn thermal_weights_normalized_at_any_beta() {
        let energies: Vec<f64> = (1..=100).map(|a| a as f64 * 0.01).collect();
        let sector = SectorMask::odd_alpha(100);
        for beta in [0.0, 0.5, 10.0, 300.0] {
            let w = thermal_weights(&energies, beta, &sector, 0.3).unwrap();
            let total: f64 = w.weights().iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            for idx in 0..100 {
                if idx % 2 == 1 {
                    assert_eq!(w.weights()[idx], 0.0);
                }
            }
        }
    }

    #[test]
    fn thermal_weights_zero_temperature_limit() {
        let energies: Vec<f64> = (1..=10).map(|a| a as f64 * 0.1).collect();
        let sector = SectorMask::odd_alpha(10);
        let w = thermal_weights(&energies, 1e6, &sector, 0.0).unwrap();
        // all weight on the lowest-energy sector state (index 0)
        assert_abs_diff_eq!(w.weights()[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn thermal_weights_rejects_empty_sector() {
        let energies = vec![0.1, 0.2];
        let sector = SectorMask::custom(vec![false, false]);
        assert!(thermal_weights(&energies, 0.0, &sector, 0.0).is_err());
    }

    #[test]
    fn observables_match_their_definitions() {
        let o = make_observable(ObservableKind::OOdd, 4).unwrap();
        assert_eq!(o.values(), &[1.0, 0.0, 1.0, 0.0]);
        let o = make_observable(ObservableKind::OSym, 4).unwrap();
        assert_eq!(o.values(), &[1.0, -1.0, 1.0, -1.0]);
        let o = make_observable(ObservableKind::SigmaZProbe, 4).unwrap();
        assert_eq!(o.values(), &[1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn observable_coarse_averages() {
        let dim = 1000;
        let mean = |k: ObservableKind| {
            make_observable(k, dim).unwrap().values().iter().sum::<f64>() / dim as f64
        };
        assert_abs_diff_eq!(mean(ObservableKind::OSym), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mean(ObservableKind::OOdd), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn chain_zero_coupling_gives_zero_v() {
        let spec = SpinChainSpec::new(3, 2, 0.5, 0.525, 1.0, 1.0, 0.0, 0.0).unwrap();
        let (_, v) = build_spin_chain(&spec).unwrap();
        assert_eq!(v.norm_max(), 0.0);
    }

    #[test]
    fn chain_probe_sigma_z_commutes_with_h0_and_orders_sectors() {
        // 1⊗σ_z^probe in the non-interacting eigenbasis stays diag(+1,−1,...)
        let spec = SpinChainSpec::with_defaults(4, 0.2).unwrap();
        let device = chain_device_spectrum(&spec).unwrap();
        let sz_full = linalg::pauli_site(PauliKind::Z, 1, spec.n_total).unwrap();
        let rotated = congruence_device_blocks(device.vectors(), &sz_full);
        for i in 0..spec.dim() {
            for j in 0..spec.dim() {
                let expect = if i == j {
                    if i % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    0.0
                };
                assert_abs_diff_eq!(rotated[[i, j]], expect, epsilon = 1e-12);
            }
        }
        // [H0, 1⊗σ_z] = 0 exactly: H0 is diagonal and σ_z is diagonal here
        let (h0, _) = build_spin_chain(&spec).unwrap();
        let h0a = h0.as_array();
        let comm = h0a.dot(&rotated) - rotated.dot(h0a);
        let worst = comm.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(worst <= 1e-12);
    }

    /// Independent 8×8 assembly of the 3-site chain from explicit bit
    /// arithmetic, no pauli_site involved.
    fn brute_force_three_site(spec: &SpinChainSpec) -> (Array2<f64>, Array2<f64>) {
        assert_eq!(spec.n_total, 3);
        assert_eq!(spec.n_m, 2);
        let dim = 8usize;
        // s_j ∈ {+1,−1} from bit j−1 (bit 0 = probe); bit value 0 = up.
        let sz = |state: usize, site: usize| -> f64 {
            if state & (1 << (site - 1)) == 0 {
                1.0
            } else {
                -1.0
            }
        };
        let flip = |state: usize, site: usize| state ^ (1 << (site - 1));
        let mut h0 = Array2::zeros((dim, dim));
        let mut v = Array2::zeros((dim, dim));
        for st in 0..dim {
            // fields on device sites 2, 3
            h0[[st, st]] += spec.bz * (sz(st, 2) + sz(st, 3));
            h0[[st, flip(st, 2)]] += spec.bx;
            h0[[st, flip(st, 3)]] += spec.bx;
            // device bond 2-3
            h0[[st, st]] += spec.jz * sz(st, 2) * sz(st, 3);
            if sz(st, 2) != sz(st, 3) {
                // σ₊σ₋ + σ₋σ₊ exchanges anti-aligned neighbours
                h0[[flip(flip(st, 2), 3), st]] += spec.jx;
            }
            // probe-device bond 1-2
            v[[st, st]] += spec.jz_sb * sz(st, 1) * sz(st, 2);
            if sz(st, 1) != sz(st, 2) {
                v[[flip(flip(st, 1), 2), st]] += spec.jx_sb;
            }
        }
        (h0, v)
    }

    #[test]
    fn chain_matches_brute_force_three_site_assembly() {
        let spec = SpinChainSpec::new(3, 2, 0.37, 0.61, 0.83, 0.29, 0.17, 0.23).unwrap();
        let (h0c, vc) = chain_computational(&spec).unwrap();
        let (h0b, vb) = brute_force_three_site(&spec);
        for i in 0..8 {
            for j in 0..8 {
                assert_abs_diff_eq!(h0c[[i, j]], h0b[[i, j]], epsilon = 1e-14);
                assert_abs_diff_eq!(vc[[i, j]], vb[[i, j]], epsilon = 1e-14);
            }
        }

        // the rotated-basis build must carry the same joint spectrum
        let (h0, v) = build_spin_chain(&spec).unwrap();
        let h_rot =
            DenseSymMatrix::from_array(h0.as_array() + v.as_array()).unwrap();
        let h_comp = DenseSymMatrix::from_array(&h0c + &vc).unwrap();
        let e_rot = linalg::eigh(&h_rot).unwrap();
        let e_comp = linalg::eigh(&h_comp).unwrap();
        for (a, b) in e_rot.energies().iter().zip(e_comp.energies().iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn chain_h0_equals_device_kron_identity() {
        let spec = SpinChainSpec::with_defaults(3, 0.31).unwrap();
        let (h0c, _) = chain_computational(&spec).unwrap();
        let h_dev = device_hamiltonian(&spec).unwrap();
        let expect = linalg::kron(&h_dev, &Array2::eye(2)).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_abs_diff_eq!(h0c[[i, j]], expect[[i, j]], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn sector_masks_follow_alpha_parity() {
        let odd = SectorMask::odd_alpha(6);
        assert_eq!(odd.count(), 3);
        assert!(odd.allows(0) && odd.allows(2) && odd.allows(4));
        let even = SectorMask::even_alpha(6);
        assert!(even.allows(1) && even.allows(3) && even.allows(5));
        let cut = odd.with_energy_at_least(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6], 0.3);
        assert_eq!(cut.count(), 2);
        assert!(!cut.allows(0) && cut.allows(2) && cut.allows(4));
    }
}
