//! Two-qubit polarization tomography: coincidence tallies, linear
//! inversion, projection onto physical states, and fidelity to |Ψ⁻⟩.

use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::optics::{AnalyzerOutcome, MeasurementBasis};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TomographyError {
    #[error("no valid coincidences for setting {0}")]
    ZeroValidCounts(String),
    #[error("density matrix has no positive eigenvalues")]
    DegenerateState,
    #[error("density matrix has non-finite entries")]
    NonFinite,
}

/// Pauli measurement setting for one analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn basis(self) -> MeasurementBasis {
        match self {
            Pauli::X => MeasurementBasis::X,
            Pauli::Y => MeasurementBasis::Y,
            Pauli::Z => MeasurementBasis::Z,
        }
    }

    /// Index into the {I, X, Y, Z} operator basis.
    fn operator_index(self) -> usize {
        self as usize + 1
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Outcome tallies for one joint setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SettingTally {
    pub pp: u64,
    pub pm: u64,
    pub mp: u64,
    pub mm: u64,
    pub invalid: u64,
}

impl SettingTally {
    pub fn record(&mut self, a: AnalyzerOutcome, b: AnalyzerOutcome) {
        match (a.sign(), b.sign()) {
            (Some(1), Some(1)) => self.pp += 1,
            (Some(1), Some(_)) => self.pm += 1,
            (Some(_), Some(1)) => self.mp += 1,
            (Some(_), Some(_)) => self.mm += 1,
            _ => self.invalid += 1,
        }
    }

    pub fn valid(&self) -> u64 {
        self.pp + self.pm + self.mp + self.mm
    }

    pub fn total(&self) -> u64 {
        self.valid() + self.invalid
    }

    /// Valid-coincidence estimate of `E[s_A · s_B]`; `None` without valid counts.
    pub fn correlation(&self) -> Option<f64> {
        let n = self.valid();
        (n > 0).then(|| (self.pp + self.mm) as f64 / n as f64 - (self.pm + self.mp) as f64 / n as f64)
    }

    /// (plus, minus) counts seen by one side among valid coincidences.
    fn marginal(&self, side: Side) -> (u64, u64) {
        match side {
            Side::A => (self.pp + self.pm, self.mp + self.mm),
            Side::B => (self.pp + self.mp, self.pm + self.mm),
        }
    }
}

impl AddAssign for SettingTally {
    fn add_assign(&mut self, o: Self) {
        self.pp += o.pp;
        self.pm += o.pm;
        self.mp += o.mp;
        self.mm += o.mm;
        self.invalid += o.invalid;
    }
}

/// Coincidence tallies over the nine Pauli settings, indexed `[A][B]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CountsTable {
    cells: [[SettingTally; 3]; 3],
}

impl CountsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_event(&mut self, a: Pauli, b: Pauli, out_a: AnalyzerOutcome, out_b: AnalyzerOutcome) {
        self.cells[a.index()][b.index()].record(out_a, out_b);
    }

    pub fn cell(&self, a: Pauli, b: Pauli) -> &SettingTally {
        &self.cells[a.index()][b.index()]
    }

    pub fn cell_mut(&mut self, a: Pauli, b: Pauli) -> &mut SettingTally {
        &mut self.cells[a.index()][b.index()]
    }

    pub fn merge(&mut self, other: &CountsTable) {
        for (row, orow) in self.cells.iter_mut().zip(&other.cells) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += *o;
            }
        }
    }

    fn iter(&self) -> impl Iterator<Item = &SettingTally> {
        self.cells.iter().flatten()
    }

    pub fn valid(&self) -> u64 {
        self.iter().map(SettingTally::valid).sum()
    }

    pub fn invalid(&self) -> u64 {
        self.iter().map(|t| t.invalid).sum()
    }

    pub fn correlation(&self, a: Pauli, b: Pauli) -> Result<f64, TomographyError> {
        self.cell(a, b).correlation().ok_or_else(|| TomographyError::ZeroValidCounts(format!("{a}{b}")))
    }

    /// Marginal `⟨σ_i⟩` for one side, pooled over the partner's settings.
    pub fn single_correlation(&self, side: Side, i: Pauli) -> Result<f64, TomographyError> {
        let (plus, minus) = Pauli::ALL
            .into_iter()
            .map(|j| match side {
                Side::A => self.cell(i, j).marginal(side),
                Side::B => self.cell(j, i).marginal(side),
            })
            .fold((0, 0), |(p, m), (dp, dm)| (p + dp, m + dm));
        let n = plus + minus;
        if n == 0 {
            let label = match side {
                Side::A => format!("{i}·"),
                Side::B => format!("·{i}"),
            };
            return Err(TomographyError::ZeroValidCounts(label));
        }
        Ok(plus as f64 / n as f64 - minus as f64 / n as f64)
    }
}

/// Expectation values `T[μ][ν] = ⟨σ_μ ⊗ σ_ν⟩` for μ, ν ∈ {I, X, Y, Z}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTensor(pub [[f64; 4]; 4]);

impl CorrelationTensor {
    pub fn from_counts(counts: &CountsTable) -> Result<Self, TomographyError> {
        let mut t = [[0.0; 4]; 4];
        t[0][0] = 1.0;
        for i in Pauli::ALL {
            t[i.operator_index()][0] = counts.single_correlation(Side::A, i)?;
            t[0][i.operator_index()] = counts.single_correlation(Side::B, i)?;
            for j in Pauli::ALL {
                t[i.operator_index()][j.operator_index()] = counts.correlation(i, j)?;
            }
        }
        Ok(Self(t))
    }
}

fn pauli_matrix(index: usize) -> Matrix2<Complex64> {
    let (o, l, i) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::i());
    match index {
        0 => Matrix2::new(l, o, o, l),
        1 => Matrix2::new(o, l, l, o),
        2 => Matrix2::new(o, -i, i, o),
        3 => Matrix2::new(l, o, o, -l),
        _ => unreachable!("operator index {index}"),
    }
}

/// 4×4 density matrix in basis order HH, HV, VH, VV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub Matrix4<Complex64>);

impl DensityMatrix {
    pub fn from_rows(rows: [[Complex64; 4]; 4]) -> Self {
        Self(Matrix4::from_fn(|r, c| rows[r][c]))
    }

    pub fn maximally_mixed() -> Self {
        Self(Matrix4::identity() * Complex64::new(0.25, 0.0))
    }

    /// Projector onto a pure state.
    pub fn pure(psi: [Complex64; 4]) -> Self {
        Self(Matrix4::from_fn(|r, c| psi[r] * psi[c].conj()))
    }

    pub fn singlet() -> Self {
        Self::pure(psi_minus())
    }

    pub fn mix(&self, weight: f64, other: &DensityMatrix) -> Self {
        Self(self.0 * Complex64::new(weight, 0.0) + other.0 * Complex64::new(1.0 - weight, 0.0))
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn hermitian_part(&self) -> Self {
        Self((self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let ev = SymmetricEigen::new(self.hermitian_part().0).eigenvalues;
        let mut out = [ev[0], ev[1], ev[2], ev[3]];
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Checks Hermiticity, positivity and unit trace to `tol`.
    pub fn check_physical(&self, tol: f64) -> Result<(), String> {
        if self.0.iter().any(|z| !z.is_finite()) {
            return Err("non-finite entry".into());
        }
        let herm = self.hermiticity_error();
        if herm > tol {
            return Err(format!("not Hermitian: max |ρ − ρ†| = {herm:e}"));
        }
        let min = self.eigenvalues()[3];
        if min < -tol {
            return Err(format!("not PSD: min eigenvalue {min:e}"));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > tol {
            return Err(format!("trace {tr} ≠ 1"));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (self.0 - other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_rows(&self) -> [[[f64; 2]; 4]; 4] {
        std::array::from_fn(|r| std::array::from_fn(|c| [self.0[(r, c)].re, self.0[(r, c)].im]))
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = <[[[f64; 2]; 4]; 4]>::deserialize(d)?;
        Ok(Self(Matrix4::from_fn(|r, c| Complex64::new(rows[r][c][0], rows[r][c][1]))))
    }
}

/// `(|HV⟩ − |VH⟩)/√2`.
pub fn psi_minus() -> [Complex64; 4] {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    [0.0, a, -a, 0.0].map(|x| Complex64::new(x, 0.0))
}

/// `ρ = ¼ Σ T[μ][ν] σ_μ ⊗ σ_ν`. Hermitian with unit trace, not necessarily PSD.
pub fn linear_inversion(t: &CorrelationTensor) -> DensityMatrix {
    let mut rho = Matrix4::<Complex64>::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            let coeff = t.0[mu][nu];
            if coeff == 0.0 {
                continue;
            }
            let term = pauli_matrix(mu).kronecker(&pauli_matrix(nu));
            rho += term * Complex64::new(0.25 * coeff, 0.0);
        }
    }
    DensityMatrix(rho)
}

/// How negative eigenvalues are removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    /// Closest density matrix in Frobenius norm: the eigenvalue vector is
    /// projected onto the probability simplex.
    #[default]
    Euclidean,
    /// Negative eigenvalues set to zero, the rest rescaled to sum to one.
    ClipRenormalize,
}

impl Projection {
    pub const ALL: [Projection; 2] = [Projection::Euclidean, Projection::ClipRenormalize];

    pub fn name(self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::ClipRenormalize => "clip-renormalize",
        }
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Projection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown projection {s:?} (expected euclidean or clip-renormalize)"))
    }
}

/// Euclidean projection of `w` onto `{x ≥ 0, Σx = 1}`.
fn simplex_projection(w: &[f64]) -> Vec<f64> {
    let mut sorted = w.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            shift = candidate;
        }
    }
    w.iter().map(|&x| (x - shift).max(0.0)).collect()
}

pub fn project_physical(rho_raw: &DensityMatrix, method: Projection) -> Result<DensityMatrix, TomographyError> {
    if rho_raw.0.iter().any(|z| !z.is_finite()) {
        return Err(TomographyError::NonFinite);
    }
    let eig = SymmetricEigen::new(rho_raw.hermitian_part().0);
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let projected = match method {
        Projection::Euclidean => simplex_projection(&values),
        Projection::ClipRenormalize => {
            let clipped: Vec<f64> = values.iter().map(|&x| x.max(0.0)).collect();
            let total: f64 = clipped.iter().sum();
            if total <= 0.0 {
                return Err(TomographyError::DegenerateState);
            }
            clipped.into_iter().map(|x| x / total).collect()
        }
    };
    let mut out = Matrix4::<Complex64>::zeros();
    for (k, &lambda) in projected.iter().enumerate() {
        if lambda == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        out += v * v.adjoint() * Complex64::new(lambda, 0.0);
    }
    Ok(DensityMatrix(out).hermitian_part())
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Fidelity(f64);

impl Fidelity {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `⟨Ψ⁻|ρ|Ψ⁻⟩`, clamped to [0, 1] against rounding.
pub fn fidelity(rho: &DensityMatrix) -> Fidelity {
    let m = &rho.0;
    let f = 0.5 * (m[(1, 1)] + m[(2, 2)] - m[(1, 2)] - m[(2, 1)]).re;
    Fidelity(f.clamp(0.0, 1.0))
}

/// Linear inversion, projection and fidelity in one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub tensor: CorrelationTensor,
    pub rho: DensityMatrix,
    pub fidelity: f64,
}

pub fn reconstruct(counts: &CountsTable, method: Projection) -> Result<Reconstruction, TomographyError> {
    let tensor = CorrelationTensor::from_counts(counts)?;
    let rho = project_physical(&linear_inversion(&tensor), method)?;
    Ok(Reconstruction { tensor, rho, fidelity: fidelity(&rho).value() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::AnalyzerOutcome::{InvalidDouble, Minus, Plus};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn tally(pp: u64, pm: u64, mp: u64, mm: u64) -> SettingTally {
        SettingTally { pp, pm, mp, mm, invalid: 0 }
    }

    #[test]
    fn records_tallies() {
        let mut t = CountsTable::new();
        assert_eq!(t.valid() + t.invalid(), 0);
        t.record_event(Pauli::Z, Pauli::Z, Plus, Minus);
        assert_eq!(t.cell(Pauli::Z, Pauli::Z).pm, 1);
        t.record_event(Pauli::X, Pauli::Y, Plus, InvalidDouble);
        assert_eq!(t.cell(Pauli::X, Pauli::Y).invalid, 1);
        assert_eq!(t.cell(Pauli::X, Pauli::Y).valid(), 0);
        assert_eq!((t.valid(), t.invalid()), (1, 1));
    }

    #[test]
    fn correlation_estimator() {
        assert_eq!(tally(50, 0, 0, 50).correlation(), Some(1.0));
        assert_eq!(tally(7, 7, 7, 7).correlation(), Some(0.0));
        assert_abs_diff_eq!(tally(30, 20, 20, 30).correlation().unwrap(), 0.2, epsilon = 1e-15);
        let empty = CountsTable::new();
        assert_eq!(empty.correlation(Pauli::X, Pauli::Z), Err(TomographyError::ZeroValidCounts("XZ".into())));
    }

    #[test]
    fn marginal_estimator() {
        let mut t = CountsTable::new();
        for j in Pauli::ALL {
            *t.cell_mut(Pauli::X, j) = tally(10, 10, 0, 0);
            *t.cell_mut(Pauli::Y, j) = tally(5, 5, 5, 5);
        }
        *t.cell_mut(Pauli::Z, Pauli::X) = tally(30, 30, 20, 20);
        assert_eq!(t.single_correlation(Side::A, Pauli::X), Ok(1.0));
        assert_eq!(t.single_correlation(Side::A, Pauli::Y), Ok(0.0));
        assert_abs_diff_eq!(t.single_correlation(Side::A, Pauli::Z).unwrap(), 0.2, epsilon = 1e-15);
        assert!(t.single_correlation(Side::B, Pauli::Y).is_ok());
        assert!(CountsTable::new().single_correlation(Side::B, Pauli::Z).is_err());
    }

    #[test]
    fn singlet_signature_inverts_to_singlet() {
        let mut t = [[0.0; 4]; 4];
        t[0][0] = 1.0;
        for k in 1..4 {
            t[k][k] = -1.0;
        }
        let rho = linear_inversion(&CorrelationTensor(t));
        assert!(rho.max_abs_diff(&DensityMatrix::singlet()) < 1e-15);
    }

    #[test]
    fn identity_term_only_is_maximally_mixed() {
        let mut t = [[0.0; 4]; 4];
        t[0][0] = 1.0;
        let rho = linear_inversion(&CorrelationTensor(t));
        assert!(rho.max_abs_diff(&DensityMatrix::maximally_mixed()) < 1e-15);
    }

    #[test]
    fn projection_is_identity_on_states() {
        let rho = DensityMatrix::singlet().mix(0.7, &DensityMatrix::maximally_mixed());
        for method in Projection::ALL {
            assert!(project_physical(&rho, method).unwrap().max_abs_diff(&rho) < 1e-12);
        }
    }

    #[test]
    fn projection_clips_negative_eigenvalue() {
        // diag(1.2, −0.2, 0, 0) → diag(1, 0, 0, 0) under both methods.
        let mut m = Matrix4::<Complex64>::zeros();
        m[(0, 0)] = Complex64::new(1.2, 0.0);
        m[(1, 1)] = Complex64::new(-0.2, 0.0);
        let mut expected = Matrix4::<Complex64>::zeros();
        expected[(0, 0)] = Complex64::new(1.0, 0.0);
        for method in Projection::ALL {
            let out = project_physical(&DensityMatrix(m), method).unwrap();
            assert!(out.max_abs_diff(&DensityMatrix(expected)) < 1e-12, "{method}");
        }
    }

    #[test]
    fn projection_methods_differ_on_spread_spectrum() {
        // diag(0.9, 0.15, 0.05, −0.1): clip gives 0.9/1.1, simplex gives 0.9 − 0.1/3.
        let mut m = Matrix4::<Complex64>::zeros();
        for (k, x) in [0.9, 0.15, 0.05, -0.1].into_iter().enumerate() {
            m[(k, k)] = Complex64::new(x, 0.0);
        }
        let clip = project_physical(&DensityMatrix(m), Projection::ClipRenormalize).unwrap();
        let eucl = project_physical(&DensityMatrix(m), Projection::Euclidean).unwrap();
        assert_abs_diff_eq!(clip.0[(0, 0)].re, 0.9 / 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(eucl.0[(0, 0)].re, 0.9 - 0.1 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eucl.0[(2, 2)].re, 0.05 - 0.1 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn all_negative_input_is_degenerate() {
        let m = -Matrix4::<Complex64>::identity();
        assert_eq!(project_physical(&DensityMatrix(m), Projection::ClipRenormalize), Err(TomographyError::DegenerateState));
        let out = project_physical(&DensityMatrix(m), Projection::Euclidean).unwrap();
        assert!(out.max_abs_diff(&DensityMatrix::maximally_mixed()) < 1e-12);
    }

    #[test]
    fn fidelity_fixtures() {
        assert_abs_diff_eq!(fidelity(&DensityMatrix::singlet()).value(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity(&DensityMatrix::maximally_mixed()).value(), 0.25, epsilon = 1e-15);
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let psi_plus = [0.0, a, a, 0.0].map(|x| Complex64::new(x, 0.0));
        assert_abs_diff_eq!(fidelity(&DensityMatrix::pure(psi_plus)).value(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn serde_layout() {
        let rho = DensityMatrix::singlet();
        let json = serde_json::to_string(&rho).unwrap();
        assert!(json.starts_with("[[[0.0,0.0],[0.0,0.0]"));
        let back: DensityMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rho);
    }

    fn random_tensor() -> impl Strategy<Value = CorrelationTensor> {
        prop::array::uniform16(-1.0f64..1.0).prop_map(|x| {
            let mut t = [[0.0; 4]; 4];
            for (k, v) in x.into_iter().enumerate() {
                t[k / 4][k % 4] = v;
            }
            t[0][0] = 1.0;
            CorrelationTensor(t)
        })
    }

    proptest! {
        #[test]
        fn projected_states_are_physical(t in random_tensor()) {
            let raw = linear_inversion(&t);
            prop_assert!(raw.hermiticity_error() < 1e-15);
            prop_assert!((raw.trace() - 1.0).abs() < 1e-15);
            for method in Projection::ALL {
                // Raw trace is one, so at least one eigenvalue is positive.
                let rho = project_physical(&raw, method).unwrap();
                prop_assert!(rho.check_physical(1e-12).is_ok(), "{:?}", rho.check_physical(1e-12));
                let f = fidelity(&rho).value();
                prop_assert!((0.0..=1.0).contains(&f));
            }
        }

        #[test]
        fn estimates_are_bounded(pp in 0u64..1000, pm in 0u64..1000, mp in 0u64..1000, mm in 1u64..1000) {
            let c = tally(pp, pm, mp, mm).correlation().unwrap();
            prop_assert!((-1.0..=1.0).contains(&c));
        }

        #[test]
        fn record_order_is_irrelevant(events in prop::collection::vec((0usize..3, 0usize..3, 0usize..4, 0usize..4), 0..200), seed in any::<u64>()) {
            let outcome = |k: usize| [Plus, Minus, InvalidDouble, AnalyzerOutcome::InvalidNone][k];
            let mut forward = CountsTable::new();
            for &(a, b, oa, ob) in &events {
                forward.record_event(Pauli::ALL[a], Pauli::ALL[b], outcome(oa), outcome(ob));
            }
            let mut shuffled = events.clone();
            let n = shuffled.len();
            for k in (1..n).rev() {
                let j = (crate::rng::mix64(seed ^ k as u64) % (k as u64 + 1)) as usize;
                shuffled.swap(k, j);
            }
            let mut backward = CountsTable::new();
            for &(a, b, oa, ob) in &shuffled {
                backward.record_event(Pauli::ALL[a], Pauli::ALL[b], outcome(oa), outcome(ob));
            }
            prop_assert_eq!(forward, backward);
        }
    }
}
