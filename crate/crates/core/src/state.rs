//! Two-electron pure states and density matrices.
//!
//! Amplitudes are always stored in the order `c_pp, c_pm, c_mp, c_mm`, i.e.
//! `|+>_1|+>_2, |+>_1|->_2, |->_1|+>_2, |->_1|->_2`. The same order indexes the
//! rows and columns of [`DensityMatrix4`].

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector4;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pauli::{c, CMatrix4, C64};

/// Amplitudes at or below this magnitude count as zero when normalizing.
pub const NULL_STATE_THRESHOLD: f64 = 1e-300;

pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

/// Tolerances used when validating matrices produced by channels, where the
/// double sum over Kraus operators accumulates more rounding.
pub const DERIVED_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinCoefficients {
    pub c_pp: C64,
    pub c_pm: C64,
    pub c_mp: C64,
    pub c_mm: C64,
}

impl SpinCoefficients {
    pub fn new(c_pp: C64, c_pm: C64, c_mp: C64, c_mm: C64) -> Self {
        SpinCoefficients { c_pp, c_pm, c_mp, c_mm }
    }

    pub fn real(pp: f64, pm: f64, mp: f64, mm: f64) -> Self {
        Self::new(c(pp, 0.0), c(pm, 0.0), c(mp, 0.0), c(mm, 0.0))
    }

    pub fn from_array(a: [C64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(&self) -> [C64; 4] {
        [self.c_pp, self.c_pm, self.c_mp, self.c_mm]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.to_array().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.to_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::from_array(self.to_array().map(|z| z * factor))
    }

    /// Exchanges `c_pm` and `c_mp`.
    pub fn swapped(&self) -> Self {
        Self::new(self.c_pp, self.c_mp, self.c_pm, self.c_mm)
    }

    /// Product state `(a|+> + b|->)_1 ⊗ (c|+> + d|->)_2`.
    pub fn product(first: [C64; 2], second: [C64; 2]) -> Self {
        Self::new(
            first[0] * second[0],
            first[0] * second[1],
            first[1] * second[0],
            first[1] * second[1],
        )
    }
}

#[derive(Serialize, Deserialize)]
struct CoefficientsRepr {
    c_pp: [f64; 2],
    c_pm: [f64; 2],
    c_mp: [f64; 2],
    c_mm: [f64; 2],
}

impl Serialize for SpinCoefficients {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pair = |z: C64| [z.re, z.im];
        CoefficientsRepr {
            c_pp: pair(self.c_pp),
            c_pm: pair(self.c_pm),
            c_mp: pair(self.c_mp),
            c_mm: pair(self.c_mm),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpinCoefficients {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CoefficientsRepr::deserialize(d)?;
        let z = |p: [f64; 2]| c(p[0], p[1]);
        Ok(SpinCoefficients::new(z(r.c_pp), z(r.c_pm), z(r.c_mp), z(r.c_mm)))
    }
}

/// A normalized two-electron spin state. The normalization constant is folded
/// into the amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TwoElectronState {
    coefficients: SpinCoefficients,
}

impl TwoElectronState {
    pub fn coefficients(&self) -> &SpinCoefficients {
        &self.coefficients
    }

    pub fn amplitudes(&self) -> [C64; 4] {
        self.coefficients.to_array()
    }

    pub fn density_matrix(&self) -> DensityMatrix4 {
        density_matrix(self)
    }

    /// The same state with `c_pm ↔ c_mp`, i.e. the two electrons relabelled.
    pub fn swapped(&self) -> TwoElectronState {
        TwoElectronState { coefficients: self.coefficients.swapped() }
    }
}

impl<'de> Deserialize<'de> for TwoElectronState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SpinCoefficients::deserialize(d)?;
        // Already-normalized input is kept bit for bit.
        if (raw.norm_sqr() - 1.0).abs() <= NORMALIZATION_TOL {
            return Ok(TwoElectronState { coefficients: raw });
        }
        normalize(&raw).map_err(serde::de::Error::custom)
    }
}

/// Scales `raw` by `(Σ|c|²)^(-1/2)`.
pub fn normalize(raw: &SpinCoefficients) -> Result<TwoElectronState> {
    let max = raw.max_magnitude();
    if !(max > NULL_STATE_THRESHOLD) {
        return Err(Error::NullState);
    }
    // Pre-scale by the largest magnitude so the sum of squares cannot
    // underflow or overflow.
    let pre = raw.scale(c(1.0 / max, 0.0));
    let n = pre.norm_sqr().sqrt().recip();
    Ok(TwoElectronState { coefficients: pre.scale(c(n, 0.0)) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellKind {
    Singlet,
    TripletA,
    TripletB,
    TripletC,
}

impl BellKind {
    pub const ALL: [BellKind; 4] =
        [BellKind::Singlet, BellKind::TripletA, BellKind::TripletB, BellKind::TripletC];

    pub fn name(self) -> &'static str {
        match self {
            BellKind::Singlet => "singlet",
            BellKind::TripletA => "triplet-a",
            BellKind::TripletB => "triplet-b",
            BellKind::TripletC => "triplet-c",
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        BellKind::ALL
            .into_iter()
            .find(|k| k.name() == key || k.name().replace('-', "") == key)
            .ok_or_else(|| {
                format!("unknown Bell state '{s}', expected singlet, triplet-a, triplet-b or triplet-c")
            })
    }
}

/// Singlet `(0, 1, -1, 0)/√2` and the triplets `(0, 1, 1, 0)/√2`,
/// `(1, 0, 0, -1)/√2`, `(1, 0, 0, 1)/√2`.
pub fn bell_state(kind: BellKind) -> TwoElectronState {
    let raw = match kind {
        BellKind::Singlet => SpinCoefficients::real(0.0, 1.0, -1.0, 0.0),
        BellKind::TripletA => SpinCoefficients::real(0.0, 1.0, 1.0, 0.0),
        BellKind::TripletB => SpinCoefficients::real(1.0, 0.0, 0.0, -1.0),
        BellKind::TripletC => SpinCoefficients::real(1.0, 0.0, 0.0, 1.0),
    };
    TwoElectronState { coefficients: raw.scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0)) }
}

/// `ρ = |ψ><ψ|`.
pub fn density_matrix(state: &TwoElectronState) -> DensityMatrix4 {
    let v = Vector4::from(state.amplitudes());
    DensityMatrix4 { m: v * v.adjoint() }
}

/// A Hermitian, unit-trace, positive semidefinite 4×4 matrix in the product
/// basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4 {
    m: CMatrix4,
}

impl DensityMatrix4 {
    /// Validates Hermiticity and trace at 1e-12 and positivity at -1e-10.
    pub fn new(m: CMatrix4) -> Result<Self> {
        Self::validated(m, HERMITIAN_TOL, TRACE_TOL)
    }

    pub(crate) fn validated(m: CMatrix4, hermitian_tol: f64, trace_tol: f64) -> Result<Self> {
        let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(herm <= hermitian_tol) {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (max |ρ - ρ†| = {herm:e})"
            )));
        }
        let tr = m.trace();
        if !((tr - c(1.0, 0.0)).norm() <= trace_tol) {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}, expected 1")));
        }
        let hermitized = (m + m.adjoint()) * c(0.5, 0.0);
        let min_eig = hermitized.symmetric_eigenvalues().min();
        if !(min_eig >= -PSD_TOL) {
            return Err(Error::InvalidDensityMatrix(format!(
                "not positive semidefinite (eigenvalue {min_eig:e})"
            )));
        }
        Ok(DensityMatrix4 { m })
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix4 { m: CMatrix4::identity() * c(0.25, 0.0) }
    }

    pub fn matrix(&self) -> &CMatrix4 {
        &self.m
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let h = (self.m + self.m.adjoint()) * c(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2], ev[3]]
    }

    /// `Tr(ρ σ)` for the Hilbert–Schmidt overlap with another density matrix.
    pub fn overlap(&self, other: &DensityMatrix4) -> C64 {
        (self.m * other.m).trace()
    }

    pub fn expectation(&self, op: &CMatrix4) -> C64 {
        (self.m * op).trace()
    }
}

impl From<TwoElectronState> for DensityMatrix4 {
    fn from(s: TwoElectronState) -> Self {
        density_matrix(&s)
    }
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// A pure state drawn uniformly (Fubini–Study) from complex Gaussian
/// amplitudes.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R) -> TwoElectronState {
    loop {
        let raw = SpinCoefficients::from_array(std::array::from_fn(|_| gaussian_complex(rng)));
        if let Ok(s) = normalize(&raw) {
            return s;
        }
    }
}

/// Raw (unnormalized) product amplitudes `(a, b) ⊗ (c, d)` with Gaussian
/// single-particle factors.
pub fn random_product_coefficients<R: Rng + ?Sized>(rng: &mut R) -> SpinCoefficients {
    let first = [gaussian_complex(rng), gaussian_complex(rng)];
    let second = [gaussian_complex(rng), gaussian_complex(rng)];
    SpinCoefficients::product(first, second)
}

pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R) -> TwoElectronState {
    loop {
        if let Ok(s) = normalize(&random_product_coefficients(rng)) {
            return s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn assert_amplitudes(s: &TwoElectronState, expected: [C64; 4]) {
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-12, "{a} vs {e}");
        }
    }

    #[test]
    fn normalize_examples() {
        let s = normalize(&SpinCoefficients::real(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_amplitudes(&s, [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);

        let s = normalize(&SpinCoefficients::real(0.0, 1.0, -1.0, 0.0)).unwrap();
        let h = FRAC_1_SQRT_2;
        assert_amplitudes(&s, [c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)]);

        let two_i = c(0.0, 2.0);
        let zero = c(0.0, 0.0);
        let s = normalize(&SpinCoefficients::new(two_i, zero, zero, two_i)).unwrap();
        assert_amplitudes(&s, [c(0.0, h), zero, zero, c(0.0, h)]);
    }

    #[test]
    fn normalize_rejects_null() {
        let zero = SpinCoefficients::real(0.0, 0.0, 0.0, 0.0);
        assert!(matches!(normalize(&zero), Err(Error::NullState)));
        let tiny = SpinCoefficients::real(1e-301, 0.0, 0.0, 0.0);
        assert!(matches!(normalize(&tiny), Err(Error::NullState)));
        let nan = SpinCoefficients::real(f64::NAN, 0.0, 0.0, 0.0);
        assert!(normalize(&nan).is_err());
    }

    #[test]
    fn normalize_survives_extreme_scales() {
        let s = normalize(&SpinCoefficients::real(1e-200, 1e-200, 0.0, 0.0)).unwrap();
        assert!((s.coefficients().norm_sqr() - 1.0).abs() < 1e-12);
        let s = normalize(&SpinCoefficients::real(1e200, 0.0, 1e200, 0.0)).unwrap();
        assert!((s.coefficients().norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_states_match_table() {
        let h = FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        assert_amplitudes(&bell_state(BellKind::Singlet), [z, c(h, 0.0), c(-h, 0.0), z]);
        assert_amplitudes(&bell_state(BellKind::TripletA), [z, c(h, 0.0), c(h, 0.0), z]);
        assert_amplitudes(&bell_state(BellKind::TripletB), [c(h, 0.0), z, z, c(-h, 0.0)]);
        assert_amplitudes(&bell_state(BellKind::TripletC), [c(h, 0.0), z, z, c(h, 0.0)]);
        for k in BellKind::ALL {
            assert!((bell_state(k).coefficients().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_kind_parsing() {
        assert_eq!("singlet".parse::<BellKind>().unwrap(), BellKind::Singlet);
        assert_eq!("triplet-b".parse::<BellKind>().unwrap(), BellKind::TripletB);
        assert_eq!("TripletC".parse::<BellKind>().unwrap(), BellKind::TripletC);
        assert!("quartet".parse::<BellKind>().is_err());
    }

    #[test]
    fn density_matrix_of_up_up() {
        let rho = density_matrix(&normalize(&SpinCoefficients::real(1.0, 0.0, 0.0, 0.0)).unwrap());
        for r in 0..4 {
            for col in 0..4 {
                let expected = if r == 0 && col == 0 { 1.0 } else { 0.0 };
                assert_eq!(rho.matrix()[(r, col)], c(expected, 0.0));
            }
        }
    }

    #[test]
    fn density_matrix_of_singlet() {
        let rho = density_matrix(&bell_state(BellKind::Singlet));
        let m = rho.matrix();
        for r in 0..4 {
            for col in 0..4 {
                let expected = match (r, col) {
                    (1, 1) | (2, 2) => 0.5,
                    (1, 2) | (2, 1) => -0.5,
                    _ => 0.0,
                };
                assert!((m[(r, col)] - c(expected, 0.0)).norm() < 1e-15);
            }
        }
        assert!(DensityMatrix4::new(*m).is_ok());
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = CMatrix4::identity() * c(0.25, 0.0);
        assert!(DensityMatrix4::new(m).is_ok());
        m[(0, 1)] = c(0.1, 0.0);
        assert!(DensityMatrix4::new(m).is_err(), "non-Hermitian");
        let m = CMatrix4::identity() * c(0.3, 0.0);
        assert!(DensityMatrix4::new(m).is_err(), "trace");
        let m = CMatrix4::from_diagonal(&Vector4::new(c(1.5, 0.0), c(-0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        assert!(DensityMatrix4::new(m).is_err(), "negative eigenvalue");
    }

    #[test]
    fn bell_density_matrices_are_orthonormal() {
        for a in BellKind::ALL {
            for b in BellKind::ALL {
                let ov = bell_state(a).density_matrix().overlap(&bell_state(b).density_matrix());
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ov - c(expected, 0.0)).norm() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn pure_state_spectrum_is_rank_one() {
        let mut rng = seeded(11);
        for _ in 0..200 {
            let rho = random_pure_state(&mut rng).density_matrix();
            let ev = rho.eigenvalues();
            assert!((ev[3] - 1.0).abs() < 1e-10);
            for e in &ev[..3] {
                assert!(e.abs() < 1e-10);
            }
            assert!(DensityMatrix4::new(*rho.matrix()).is_ok());
        }
    }

    #[test]
    fn json_shape() {
        let s = bell_state(BellKind::TripletC);
        let v = serde_json::to_value(s).unwrap();
        let h = FRAC_1_SQRT_2;
        assert_eq!(v["c_pp"], serde_json::json!([h, 0.0]));
        assert_eq!(v["c_mm"], serde_json::json!([h, 0.0]));
        let back: TwoElectronState = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);

        let raw = r#"{"c_pp":[2,0],"c_pm":[0,0],"c_mp":[0,0],"c_mm":[0,2]}"#;
        let s: TwoElectronState = serde_json::from_str(raw).unwrap();
        assert!((s.coefficients().norm_sqr() - 1.0).abs() < 1e-12);
        let null = r#"{"c_pp":[0,0],"c_pm":[0,0],"c_mp":[0,0],"c_mm":[0,0]}"#;
        assert!(serde_json::from_str::<TwoElectronState>(null).is_err());
    }
}
