//! Pauli matrices, Kronecker products and the axis labels shared by every
//! other module.
//!
//! Axis `x` is index 0, `y` is 1, `z` is 2. Two-particle operators act on the
//! product basis `|++>, |+->, |-+>, |-->` (particle 1 is the slow index).

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

pub type C64 = Complex<f64>;
pub type CMatrix2 = Matrix2<C64>;
pub type CMatrix4 = Matrix4<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn pauli(self) -> CMatrix2 {
        pauli(self)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(format!("unknown axis '{other}', expected x, y or z")),
        }
    }
}

/// Which electron an operator or statistic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Particle {
    First,
    Second,
}

impl Particle {
    pub fn number(self) -> u8 {
        match self {
            Particle::First => 1,
            Particle::Second => 2,
        }
    }
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity2() -> CMatrix2 {
    CMatrix2::identity()
}

pub fn pauli(axis: Axis) -> CMatrix2 {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match axis {
        Axis::X => Matrix2::new(o, l, l, o),
        Axis::Y => Matrix2::new(o, -i, i, o),
        Axis::Z => Matrix2::new(l, o, o, -l),
    }
}

/// Kronecker product `a ⊗ b` with `a` acting on particle 1.
pub fn kron(a: &CMatrix2, b: &CMatrix2) -> CMatrix4 {
    CMatrix4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

/// `σ_i ⊗ σ_j` in the product basis.
pub fn sigma_pair(i: Axis, j: Axis) -> CMatrix4 {
    kron(&pauli(i), &pauli(j))
}

/// Levi-Civita symbol on axis indices.
pub fn levi_civita(i: Axis, j: Axis, k: Axis) -> f64 {
    let (i, j, k) = (i.index() as i32, j.index() as i32, k.index() as i32);
    ((i - j) * (j - k) * (k - i)) as f64 / 2.0
}

/// Expands a traceless 2×2 matrix on the Pauli basis, `x = Σ_j coef_j σ_j`,
/// returning `coef_j = ½ Tr(x σ_j)`. Only the real parts are kept; callers
/// that need the residue check it separately.
pub(crate) fn pauli_coefficients(x: &CMatrix2) -> [C64; 3] {
    Axis::ALL.map(|j| (x * pauli(j)).trace() * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &CMatrix2, b: &CMatrix2, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() < tol)
    }

    #[test]
    fn pauli_entries_match_definition() {
        let sx = pauli(Axis::X);
        let sy = pauli(Axis::Y);
        let sz = pauli(Axis::Z);
        assert_eq!(sx[(0, 1)], c(1.0, 0.0));
        assert_eq!(sx[(1, 0)], c(1.0, 0.0));
        assert_eq!(sx[(0, 0)], c(0.0, 0.0));
        assert_eq!(sy[(0, 1)], c(0.0, -1.0));
        assert_eq!(sy[(1, 0)], c(0.0, 1.0));
        assert_eq!(sz[(0, 0)], c(1.0, 0.0));
        assert_eq!(sz[(1, 1)], c(-1.0, 0.0));
        assert_eq!(sz[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn pauli_hermitian_traceless_involutory() {
        for a in Axis::ALL {
            let s = pauli(a);
            assert_eq!(s, s.adjoint());
            assert_eq!(s.trace(), c(0.0, 0.0));
            assert_eq!(s * s, identity2());
        }
    }

    #[test]
    fn product_rule_all_nine_pairs() {
        // σ_i σ_j = δ_ij I + i ε_ijk σ_k
        for i in Axis::ALL {
            for j in Axis::ALL {
                let mut rhs = if i == j { identity2() } else { CMatrix2::zeros() };
                for k in Axis::ALL {
                    rhs += pauli(k) * c(0.0, levi_civita(i, j, k));
                }
                assert!(close(&(pauli(i) * pauli(j)), &rhs, 1e-15), "{i}{j}");
            }
        }
    }

    #[test]
    fn levi_civita_values() {
        assert_eq!(levi_civita(Axis::X, Axis::Y, Axis::Z), 1.0);
        assert_eq!(levi_civita(Axis::Y, Axis::X, Axis::Z), -1.0);
        assert_eq!(levi_civita(Axis::Z, Axis::X, Axis::Y), 1.0);
        assert_eq!(levi_civita(Axis::X, Axis::X, Axis::Z), 0.0);
    }

    #[test]
    fn kron_layout_particle_one_is_slow_index() {
        let zz = sigma_pair(Axis::Z, Axis::Z);
        let diag: Vec<f64> = (0..4).map(|k| zz[(k, k)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
        let zi = kron(&pauli(Axis::Z), &identity2());
        let diag: Vec<f64> = (0..4).map(|k| zi[(k, k)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn axis_parse_roundtrip() {
        for a in Axis::ALL {
            assert_eq!(a.label().to_string().parse::<Axis>().unwrap(), a);
        }
        assert!("w".parse::<Axis>().is_err());
    }
}
