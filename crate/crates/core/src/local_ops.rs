//! Local unitaries and local measurement channels on two-electron density
//! matrices, with the real 3×3 maps they induce on Pauli indices.
//!
//! Conventions, fixed so that `T' = Q₁ T Q₂ᵀ` holds against the trace oracle:
//!
//! * a unitary pair transforms `ρ' = (U₁† ⊗ U₂†) ρ (U₁ ⊗ U₂)`, and
//!   `U σ_i U† = Σ_j Q_ij σ_j`;
//! * a Kraus pair transforms `ρ' = Σ_mn (L_m ⊗ L_n) ρ (L_m† ⊗ L_n†)`, and
//!   `Σ_n L_n† σ_i L_n = Σ_j D_ij σ_j`.

use nalgebra::{Matrix3, Vector2};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pauli::{c, kron, pauli, pauli_coefficients, sigma_pair, Axis, CMatrix2, CMatrix4, C64};
use crate::rng::seeded;
use crate::state::{DensityMatrix4, DERIVED_TOL};

pub const UNITARY_TOL: f64 = 1e-12;
pub const KRAUS_TOL: f64 = 1e-10;
pub const BLOCH_TOL: f64 = 1e-10;

const GENERATION_RETRIES: usize = 16;

fn max_dev2(a: &CMatrix2, b: &CMatrix2) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalUnitary {
    u: CMatrix2,
}

impl LocalUnitary {
    pub fn new(u: CMatrix2) -> Result<Self> {
        let id = CMatrix2::identity();
        let deviation = max_dev2(&(u * u.adjoint()), &id).max(max_dev2(&(u.adjoint() * u), &id));
        if !(deviation <= UNITARY_TOL) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(LocalUnitary { u })
    }

    pub fn identity() -> Self {
        LocalUnitary { u: CMatrix2::identity() }
    }

    /// `exp(-i (angle/2) σ_axis)`.
    pub fn rotation(axis: Axis, angle: f64) -> Self {
        let (s, co) = (angle / 2.0).sin_cos();
        LocalUnitary { u: CMatrix2::identity() * c(co, 0.0) - pauli(axis) * c(0.0, s) }
    }

    /// Haar-distributed element of U(2): a uniform unit quaternion for the
    /// SU(2) part times a uniform global phase.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n < 1e-12 {
                continue;
            }
            let [a, b, cc, d] = q.map(|x| x / n);
            let gamma = rng.random_range(0.0..std::f64::consts::TAU);
            let phase = C64::from_polar(1.0, gamma);
            let su2 = CMatrix2::new(c(a, b), c(cc, d), c(-cc, d), c(a, -b));
            return LocalUnitary { u: su2 * phase };
        }
    }

    pub fn matrix(&self) -> &CMatrix2 {
        &self.u
    }

    pub fn compose(&self, other: &LocalUnitary) -> LocalUnitary {
        LocalUnitary { u: self.u * other.u }
    }
}

pub fn random_local_unitary(seed: u64) -> LocalUnitary {
    LocalUnitary::random(&mut seeded(seed))
}

/// A set of normal Kraus operators with `Σ L L† = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<CMatrix2>,
}

impl KrausSet {
    pub fn new(ops: Vec<CMatrix2>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidKrausSet("empty operator list".into()));
        }
        let sum = ops.iter().fold(CMatrix2::zeros(), |acc, l| acc + l * l.adjoint());
        let completeness = max_dev2(&sum, &CMatrix2::identity());
        if !(completeness <= KRAUS_TOL) {
            return Err(Error::InvalidKrausSet(format!(
                "Σ L L† deviates from identity by {completeness:e}"
            )));
        }
        for (n, l) in ops.iter().enumerate() {
            let comm = max_dev2(&(l * l.adjoint()), &(l.adjoint() * l));
            if !(comm <= KRAUS_TOL) {
                return Err(Error::InvalidKrausSet(format!(
                    "operator {n} is not normal ([L, L†] = {comm:e})"
                )));
            }
        }
        Ok(KrausSet { ops })
    }

    pub fn identity() -> Self {
        KrausSet { ops: vec![CMatrix2::identity()] }
    }

    /// `{√p I, √(1-p) σ_z}`.
    pub fn dephasing(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidKrausSet(format!("dephasing probability {p} outside [0, 1]")));
        }
        Self::new(vec![
            CMatrix2::identity() * c(p.sqrt(), 0.0),
            pauli(Axis::Z) * c((1.0 - p).sqrt(), 0.0),
        ])
    }

    /// `count` operators diagonal in one shared Haar-random eigenbasis, with
    /// complex Gaussian eigenvalues rescaled so that `Σ L L† = I`. A common
    /// eigenbasis keeps every rescaled operator normal.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::GenerationFailure("Kraus set needs at least one operator".into()));
        }
        for _ in 0..GENERATION_RETRIES {
            let basis = *LocalUnitary::random(rng).matrix();
            let eig: Vec<[C64; 2]> = (0..count)
                .map(|_| std::array::from_fn(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))))
                .collect();
            let weight: [f64; 2] =
                std::array::from_fn(|k| eig.iter().map(|d| d[k].norm_sqr()).sum::<f64>().sqrt());
            if weight.iter().any(|&w| w < 1e-8) {
                continue;
            }
            let ops = eig
                .iter()
                .map(|d| {
                    let diag = CMatrix2::from_diagonal(&Vector2::new(d[0] / weight[0], d[1] / weight[1]));
                    basis * diag * basis.adjoint()
                })
                .collect();
            if let Ok(k) = KrausSet::new(ops) {
                return Ok(k);
            }
        }
        Err(Error::GenerationFailure(format!(
            "no valid {count}-operator Kraus set after {GENERATION_RETRIES} attempts"
        )))
    }

    pub fn ops(&self) -> &[CMatrix2] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

pub fn random_kraus_set(seed: u64, count: usize) -> Result<KrausSet> {
    KrausSet::random(&mut seeded(seed), count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlochKind {
    Orthogonal,
    Contraction,
}

/// Real 3×3 map acting on one Pauli index of the correlation tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochMap {
    pub m: Matrix3<f64>,
    pub kind: BlochKind,
}

impl BlochMap {
    /// `max |M Mᵀ - I|` over both products.
    pub fn orthogonality_deviation(&self) -> f64 {
        let id = Matrix3::identity();
        (self.m * self.m.transpose() - id).amax().max((self.m.transpose() * self.m - id).amax())
    }

    /// `max |M Mᵀ - Mᵀ M|`.
    pub fn normality_deviation(&self) -> f64 {
        (self.m * self.m.transpose() - self.m.transpose() * self.m).amax()
    }

    /// Largest eigenvalue of `Mᵀ M`.
    pub fn max_gain(&self) -> f64 {
        (self.m.transpose() * self.m).symmetric_eigenvalues().max()
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    fn check(self) -> std::result::Result<Self, String> {
        match self.kind {
            BlochKind::Orthogonal => {
                let d = self.orthogonality_deviation();
                if d > BLOCH_TOL {
                    return Err(format!("Q is not orthogonal (deviation {d:e})"));
                }
            }
            BlochKind::Contraction => {
                let g = self.max_gain();
                if g > 1.0 + BLOCH_TOL {
                    return Err(format!("D is not contractive (largest eigenvalue of DᵀD {g})"));
                }
                let n = self.normality_deviation();
                if n > BLOCH_TOL {
                    return Err(format!("D does not commute with Dᵀ (deviation {n:e})"));
                }
            }
        }
        Ok(self)
    }
}

fn bloch_rows(f: impl Fn(Axis) -> CMatrix2) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for i in Axis::ALL {
        let coef = pauli_coefficients(&f(i));
        for j in Axis::ALL {
            m[(i.index(), j.index())] = coef[j.index()].re;
        }
    }
    m
}

/// `Q_ij = ½ Re Tr(U σ_i U† σ_j)`.
pub fn q_matrix(u: &LocalUnitary) -> Result<BlochMap> {
    let u = LocalUnitary::new(u.u)?;
    let map = BlochMap { m: bloch_rows(|i| u.u * pauli(i) * u.u.adjoint()), kind: BlochKind::Orthogonal };
    map.check().map_err(|_| Error::NotUnitary { deviation: map.orthogonality_deviation() })
}

/// `D_ij = ½ Re Tr((Σ_n L_n† σ_i L_n) σ_j)`.
pub fn d_matrix(k: &KrausSet) -> Result<BlochMap> {
    let k = KrausSet::new(k.ops.clone())?;
    let m = bloch_rows(|i| {
        k.ops.iter().fold(CMatrix2::zeros(), |acc, l| acc + l.adjoint() * pauli(i) * l)
    });
    BlochMap { m, kind: BlochKind::Contraction }.check().map_err(Error::InvalidKrausSet)
}

/// Largest entrywise deviation between `Σ_n L_n σ_i L_n†` and
/// `Σ_j (Dᵀ)_ij σ_j`, over all `i`.
pub fn d_transpose_identity_deviation(k: &KrausSet) -> Result<f64> {
    let d = d_matrix(k)?.m;
    let mut worst = 0.0f64;
    for i in Axis::ALL {
        let lhs = k.ops.iter().fold(CMatrix2::zeros(), |acc, l| acc + l * pauli(i) * l.adjoint());
        let rhs = Axis::ALL
            .iter()
            .fold(CMatrix2::zeros(), |acc, &j| acc + pauli(j) * c(d[(j.index(), i.index())], 0.0));
        worst = worst.max(max_dev2(&lhs, &rhs));
    }
    Ok(worst)
}

pub fn d_transpose_identity_check(k: &KrausSet) -> Result<bool> {
    Ok(d_transpose_identity_deviation(k)? <= BLOCH_TOL)
}

/// `ρ' = (U₁† ⊗ U₂†) ρ (U₁ ⊗ U₂)`.
pub fn apply_local_unitaries(
    rho: &DensityMatrix4,
    u1: &LocalUnitary,
    u2: &LocalUnitary,
) -> Result<DensityMatrix4> {
    let u1 = LocalUnitary::new(u1.u)?;
    let u2 = LocalUnitary::new(u2.u)?;
    let w = kron(&u1.u, &u2.u);
    let out = w.adjoint() * rho.matrix() * w;
    DensityMatrix4::validated(out, DERIVED_TOL, DERIVED_TOL)
}

/// `ρ' = Σ_mn (L_m ⊗ L_n) ρ (L_m† ⊗ L_n†)`.
pub fn apply_local_povm(rho: &DensityMatrix4, k1: &KrausSet, k2: &KrausSet) -> Result<DensityMatrix4> {
    let k1 = KrausSet::new(k1.ops.clone())?;
    let k2 = KrausSet::new(k2.ops.clone())?;
    let mut out = CMatrix4::zeros();
    for lm in &k1.ops {
        for ln in &k2.ops {
            let w = kron(lm, ln);
            out += w * rho.matrix() * w.adjoint();
        }
    }
    DensityMatrix4::validated(out, DERIVED_TOL, DERIVED_TOL)
}

/// Sorted eigenvalues of `σ_i ⊗ σ_j`.
pub fn sigma_pair_eigenvalues(i: Axis, j: Axis) -> [f64; 4] {
    let mut ev: Vec<f64> = sigma_pair(i, j).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    [ev[0], ev[1], ev[2], ev[3]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::state::{bell_state, random_pure_state, BellKind};
    use crate::tensor::{correlation_tensor_trace, entanglement_measure};
    use nalgebra::Vector3;
    use std::f64::consts::FRAC_PI_3;

    /// Brute-force projection `Tr(U σ_i U† σ_j) / 2`, entry by entry from raw
    /// 2×2 arithmetic.
    fn q_oracle(u: &CMatrix2) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                let si = pauli(Axis::from_index(i).unwrap());
                let sj = pauli(Axis::from_index(j).unwrap());
                let prod = u * si * u.adjoint() * sj;
                m[(i, j)] = (prod[(0, 0)] + prod[(1, 1)]).re / 2.0;
            }
        }
        m
    }

    #[test]
    fn unitary_validation() {
        assert!(LocalUnitary::new(CMatrix2::identity() * c(2.0, 0.0)).is_err());
        assert!(LocalUnitary::new(pauli(Axis::Y)).is_ok());
        let mut rng = seeded(1);
        for _ in 0..100 {
            assert!(LocalUnitary::new(*LocalUnitary::random(&mut rng).matrix()).is_ok());
        }
    }

    #[test]
    fn identity_maps() {
        let rho = bell_state(BellKind::TripletB).density_matrix();
        let id = LocalUnitary::identity();
        assert_eq!(apply_local_unitaries(&rho, &id, &id).unwrap(), rho);
        let k = KrausSet::identity();
        assert_eq!(apply_local_povm(&rho, &k, &k).unwrap(), rho);
        assert_eq!(q_matrix(&id).unwrap().m, Matrix3::identity());
        assert_eq!(d_matrix(&k).unwrap().m, Matrix3::identity());
    }

    #[test]
    fn z_rotation_q_matrix() {
        let phi = FRAC_PI_3;
        let u = LocalUnitary::rotation(Axis::Z, phi);
        let (s, co) = phi.sin_cos();
        // frozen from q_oracle: U σ_x U† = cos φ σ_x + sin φ σ_y
        let expected = Matrix3::new(co, s, 0.0, -s, co, 0.0, 0.0, 0.0, 1.0);
        assert!((q_oracle(u.matrix()) - expected).amax() < 1e-15);
        assert!((q_matrix(&u).unwrap().m - expected).amax() < 1e-15);
    }

    #[test]
    fn q_matches_oracle_and_is_rotation() {
        let mut rng = seeded(2);
        for _ in 0..200 {
            let u = LocalUnitary::random(&mut rng);
            let q = q_matrix(&u).unwrap();
            assert!((q.m - q_oracle(u.matrix())).amax() < 1e-14);
            assert!(q.orthogonality_deviation() < 1e-10);
            assert!((q.determinant() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn q_of_product_composes_right_to_left() {
        let mut rng = seeded(4);
        for _ in 0..100 {
            let u = LocalUnitary::random(&mut rng);
            let v = LocalUnitary::random(&mut rng);
            let quv = q_matrix(&u.compose(&v)).unwrap().m;
            let expected = q_matrix(&v).unwrap().m * q_matrix(&u).unwrap().m;
            assert!((quv - expected).amax() < 1e-10);
        }
    }

    #[test]
    fn trace_preserved_under_unitaries() {
        let mut rng = seeded(6);
        for _ in 0..100 {
            let rho = random_pure_state(&mut rng).density_matrix();
            let out = apply_local_unitaries(&rho, &LocalUnitary::random(&mut rng), &LocalUnitary::random(&mut rng)).unwrap();
            assert!((out.trace() - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn singlet_invariant_under_random_unitaries() {
        let rho = bell_state(BellKind::Singlet).density_matrix();
        let e0 = entanglement_measure(&rho).unwrap().value();
        let mut rng = seeded(8);
        for _ in 0..50 {
            let out = apply_local_unitaries(&rho, &LocalUnitary::random(&mut rng), &LocalUnitary::random(&mut rng)).unwrap();
            assert!((entanglement_measure(&out).unwrap().value() - e0).abs() < 1e-9);
        }
    }

    #[test]
    fn dephasing_d_matrix() {
        let k = KrausSet::dephasing(0.75).unwrap();
        let d = d_matrix(&k).unwrap();
        assert!((d.m - Matrix3::from_diagonal(&Vector3::new(0.5, 0.5, 1.0))).amax() < 1e-15);
        assert!(d_transpose_identity_check(&k).unwrap());
        assert!(d_transpose_identity_check(&KrausSet::identity()).unwrap());
    }

    #[test]
    fn dephasing_does_not_raise_singlet_entanglement() {
        let rho = bell_state(BellKind::Singlet).density_matrix();
        let k = KrausSet::dephasing(0.75).unwrap();
        let out = apply_local_povm(&rho, &k, &k).unwrap();
        let e = entanglement_measure(&rho).unwrap().value();
        let e_out = entanglement_measure(&out).unwrap().value();
        assert!(e_out <= e + 1e-9);
        // Both sides dephase: T' = D T Dᵀ = diag(-0.25, -0.25, -1).
        let t = correlation_tensor_trace(&out).unwrap();
        assert!((t.0 - Matrix3::from_diagonal(&Vector3::new(-0.25, -0.25, -1.0))).amax() < 1e-14);
        assert!((out.trace() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn kraus_validation() {
        assert!(KrausSet::new(vec![]).is_err());
        assert!(KrausSet::new(vec![CMatrix2::identity() * c(0.5, 0.0)]).is_err());
        // σ₊ = |+><-| is not normal; pair it with σ₋ so completeness holds.
        let raise = CMatrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let lower = raise.adjoint();
        let err = KrausSet::new(vec![raise, lower]).unwrap_err();
        assert!(matches!(err, Error::InvalidKrausSet(ref m) if m.contains("normal")), "{err}");
        assert!(KrausSet::dephasing(1.5).is_err());
    }

    #[test]
    fn random_generators_are_deterministic_and_valid() {
        assert_eq!(random_local_unitary(99), random_local_unitary(99));
        assert_ne!(random_local_unitary(99), random_local_unitary(100));
        assert_eq!(random_kraus_set(5, 3).unwrap(), random_kraus_set(5, 3).unwrap());
        for seed in 0..1000 {
            let u = random_local_unitary(seed);
            assert!(LocalUnitary::new(*u.matrix()).is_ok());
            let k = random_kraus_set(seed, 1 + (seed as usize % 4)).unwrap();
            assert!(KrausSet::new(k.ops().to_vec()).is_ok());
            assert!(d_matrix(&k).is_ok());
        }
        assert!(random_kraus_set(1, 0).is_err());
    }

    #[test]
    fn sigma_pair_spectra() {
        assert_eq!(sigma_pair_eigenvalues(Axis::Z, Axis::Z), [-1.0, -1.0, 1.0, 1.0]);
        for i in Axis::ALL {
            for j in Axis::ALL {
                let ev = sigma_pair_eigenvalues(i, j);
                for (e, x) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
                    assert!((e - x).abs() < 1e-12, "{i}{j}: {ev:?}");
                }
            }
        }
    }
}
