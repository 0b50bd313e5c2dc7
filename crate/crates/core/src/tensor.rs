//! Spin correlation tensor, polarizations and the tensor-norm entanglement
//! measure.
//!
//! Two independent routes compute the same quantities: closed-form
//! expressions in the four amplitudes of a pure state, and traces against
//! explicit 4×4 Kronecker products for an arbitrary density matrix. The
//! closed forms serve pure states; the trace forms serve everything else and
//! double as the oracle for the closed forms.

use std::ops::Sub;

use nalgebra::{Matrix3, Vector3};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pauli::{identity2, kron, pauli, sigma_pair, Axis, Particle, C64};
use crate::state::{DensityMatrix4, TwoElectronState};

/// Largest imaginary part tolerated in a trace before it is discarded.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;

const SWAP_TOL: f64 = 1e-12;

/// `T_ij = <σ_i1 σ_j2>`; rows follow particle 1's axis, columns particle 2's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTensor(pub Matrix3<f64>);

impl CorrelationTensor {
    pub fn zeros() -> Self {
        CorrelationTensor(Matrix3::zeros())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn get(&self, i: Axis, j: Axis) -> f64 {
        self.0[(i.index(), j.index())]
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> [f64; 9] {
        std::array::from_fn(|k| self.0[(k / 3, k % 3)])
    }

    pub fn max_abs_diff(&self, other: &CorrelationTensor) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Sub for CorrelationTensor {
    type Output = Matrix3<f64>;

    fn sub(self, rhs: Self) -> Matrix3<f64> {
        self.0 - rhs.0
    }
}

impl Serialize for CorrelationTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.row_major().serialize(s)
    }
}

/// `P_i = <σ_i>` for one electron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarization(pub Vector3<f64>);

impl Polarization {
    pub fn zeros() -> Self {
        Polarization(Vector3::zeros())
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn get(&self, i: Axis) -> f64 {
        self.0[i.index()]
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }

    pub fn max_abs_diff(&self, other: &Polarization) -> f64 {
        (self.0 - other.0).amax()
    }
}

impl Serialize for Polarization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

/// The scalar `E = ||T - P_1 ⊗ P_2||`. Not clamped.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct EntanglementValue(pub f64);

impl EntanglementValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Sources of the spin statistics that enter the entanglement measure.
pub trait SpinStatistics {
    fn correlation_tensor(&self) -> Result<CorrelationTensor>;
    fn polarization(&self, which: Particle) -> Result<Polarization>;
}

impl SpinStatistics for TwoElectronState {
    fn correlation_tensor(&self) -> Result<CorrelationTensor> {
        Ok(correlation_tensor_closed(self))
    }

    fn polarization(&self, which: Particle) -> Result<Polarization> {
        Ok(polarization(self, which))
    }
}

impl SpinStatistics for DensityMatrix4 {
    fn correlation_tensor(&self) -> Result<CorrelationTensor> {
        correlation_tensor_trace(self)
    }

    fn polarization(&self, which: Particle) -> Result<Polarization> {
        polarization_trace(self, which)
    }
}

/// Closed-form tensor of a normalized pure state.
pub fn correlation_tensor_closed(state: &TwoElectronState) -> CorrelationTensor {
    let [pp, pm, mp, mm] = state.amplitudes();
    let two = |z: C64| 2.0 * z;
    let a = two(mm * pp.conj() + pm * mp.conj());
    let b = two(mm * pp.conj() + mp * pm.conj());
    let d = two(mp * pm.conj() - mm * pp.conj());
    let e = two(mp * pp.conj() - mm * pm.conj());
    let f = two(pm * pp.conj() - mm * mp.conj());
    let zz = pp.norm_sqr() - mp.norm_sqr() - pm.norm_sqr() + mm.norm_sqr();
    CorrelationTensor(Matrix3::new(
        a.re, a.im, e.re, //
        b.im, d.re, e.im, //
        f.re, f.im, zz,
    ))
}

fn real_trace(rho: &DensityMatrix4, op: &crate::pauli::CMatrix4) -> Result<f64> {
    let t = rho.expectation(op);
    if t.im.abs() > IMAGINARY_RESIDUE_TOL {
        return Err(Error::NonHermitianInput { residue: t.im.abs() });
    }
    Ok(t.re)
}

/// `T_ij = Tr(ρ σ_i ⊗ σ_j)` from explicit Kronecker products.
pub fn correlation_tensor_trace(rho: &DensityMatrix4) -> Result<CorrelationTensor> {
    let mut t = Matrix3::zeros();
    for i in Axis::ALL {
        for j in Axis::ALL {
            t[(i.index(), j.index())] = real_trace(rho, &sigma_pair(i, j))?;
        }
    }
    Ok(CorrelationTensor(t))
}

/// Closed-form polarization of one electron in a pure state.
pub fn polarization(state: &TwoElectronState, which: Particle) -> Polarization {
    let [pp, pm, mp, mm] = state.amplitudes();
    let (off, z) = match which {
        Particle::First => (
            2.0 * (mp * pp.conj() + mm * pm.conj()),
            pp.norm_sqr() + pm.norm_sqr() - mp.norm_sqr() - mm.norm_sqr(),
        ),
        Particle::Second => (
            2.0 * (pm * pp.conj() + mm * mp.conj()),
            pp.norm_sqr() + mp.norm_sqr() - pm.norm_sqr() - mm.norm_sqr(),
        ),
    };
    Polarization(Vector3::new(off.re, off.im, z))
}

/// `P_i = Tr(ρ σ_i ⊗ I)` or `Tr(ρ I ⊗ σ_i)`.
pub fn polarization_trace(rho: &DensityMatrix4, which: Particle) -> Result<Polarization> {
    let mut p = Vector3::zeros();
    for i in Axis::ALL {
        let op = match which {
            Particle::First => kron(&pauli(i), &identity2()),
            Particle::Second => kron(&identity2(), &pauli(i)),
        };
        p[i.index()] = real_trace(rho, &op)?;
    }
    Ok(Polarization(p))
}

/// Outer product `p1 p2ᵀ`, the tensor a separable state would have.
pub fn product_tensor(p1: &Polarization, p2: &Polarization) -> CorrelationTensor {
    CorrelationTensor(p1.0 * p2.0.transpose())
}

/// `sqrt(Σ a_ij² / 3)`.
pub fn tensor_norm(a: &Matrix3<f64>) -> f64 {
    (a.iter().map(|x| x * x).sum::<f64>() / 3.0).sqrt()
}

pub fn entanglement_measure<S: SpinStatistics + ?Sized>(source: &S) -> Result<EntanglementValue> {
    let t = source.correlation_tensor()?;
    let p1 = source.polarization(Particle::First)?;
    let p2 = source.polarization(Particle::Second)?;
    Ok(EntanglementValue(tensor_norm(&(t - product_tensor(&p1, &p2)))))
}

/// Checks that exchanging `c_pm ↔ c_mp` transposes the tensor and exchanges
/// the two polarizations.
pub fn swap_symmetry_check(state: &TwoElectronState) -> bool {
    let swapped = state.swapped();
    let t = correlation_tensor_closed(state);
    let ts = correlation_tensor_closed(&swapped);
    let p1 = polarization(state, Particle::First);
    let p2 = polarization(state, Particle::Second);
    let p1s = polarization(&swapped, Particle::First);
    let p2s = polarization(&swapped, Particle::Second);
    (ts.0 - t.0.transpose()).amax() < SWAP_TOL
        && p1s.max_abs_diff(&p2) < SWAP_TOL
        && p2s.max_abs_diff(&p1) < SWAP_TOL
}
