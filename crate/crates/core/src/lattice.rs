//! Periodic cubic lattices and their discrete wavenumbers.
//!
//! Modes are stored in FFT order along each axis (`0, 1, …, n/2, -(n/2-1), …, -1`
//! for even `n`) and flattened with the last axis fastest. The lattice is only a
//! quadrature and sampling device for the continuum integrals `∫d³k/(2π)³`, which
//! become `(1/V) Σ_k` with `V = (n·spacing)³`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A periodic `n × n × n` grid with uniform spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    n: usize,
    spacing: f64,
}

impl LatticeSpec {
    pub fn new(n_per_side: usize, spacing: f64) -> Result<Self> {
        if n_per_side < 2 {
            return Err(Error::Config(format!(
                "lattice needs at least 2 sites per side, got {n_per_side}"
            )));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Config(format!("lattice spacing must be positive, got {spacing}")));
        }
        Ok(Self { n: n_per_side, spacing })
    }

    pub fn n_per_side(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Side length `n·spacing`.
    pub fn extent(&self) -> f64 {
        self.n as f64 * self.spacing
    }

    /// Box volume `V = (n·spacing)³`.
    pub fn volume(&self) -> f64 {
        self.extent().powi(3)
    }

    pub fn mode_count(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Wavenumber spacing `2π/(n·spacing)`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.extent()
    }

    /// Signed integer label of axis index `i` in FFT order.
    pub fn axis_label(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn flat_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    pub fn split_index(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    /// Index of the mode carrying wavenumber `-k`.
    pub fn partner(&self, idx: usize) -> usize {
        let n = self.n;
        let [ix, iy, iz] = self.split_index(idx);
        self.flat_index((n - ix) % n, (n - iy) % n, (n - iz) % n)
    }

    /// Wavenumber of mode `idx`.
    pub fn wavenumber(&self, idx: usize) -> [f64; 3] {
        let dk = self.dk();
        let [ix, iy, iz] = self.split_index(idx);
        [
            dk * self.axis_label(ix) as f64,
            dk * self.axis_label(iy) as f64,
            dk * self.axis_label(iz) as f64,
        ]
    }

    /// Position of site `idx` (same flattening as the modes), origin at site 0.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let [ix, iy, iz] = self.split_index(idx);
        [
            ix as f64 * self.spacing,
            iy as f64 * self.spacing,
            iz as f64 * self.spacing,
        ]
    }
}

/// All grid wavenumbers of a lattice, with the Hermitian-pair map.
#[derive(Debug, Clone)]
pub struct Wavenumbers {
    vectors: Vec<[f64; 3]>,
    pairs: Vec<usize>,
}

impl Wavenumbers {
    pub fn vectors(&self) -> &[[f64; 3]] {
        &self.vectors
    }

    /// `pairs()[j]` is the index of the mode with wavenumber `-k_j`.
    pub fn pairs(&self) -> &[usize] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn is_self_conjugate(&self, idx: usize) -> bool {
        self.pairs[idx] == idx
    }
}

/// Enumerates the `n³` wavenumbers `k = 2π·j/(n·spacing)` of a lattice.
pub fn wavenumbers(lattice: &LatticeSpec) -> Wavenumbers {
    let count = lattice.mode_count();
    let vectors = (0..count).map(|i| lattice.wavenumber(i)).collect();
    let pairs = (0..count).map(|i| lattice.partner(i)).collect();
    Wavenumbers { vectors, pairs }
}

pub(crate) fn norm(k: &[f64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lattices() {
        assert!(LatticeSpec::new(1, 1.0).is_err());
        assert!(LatticeSpec::new(4, 0.0).is_err());
        assert!(LatticeSpec::new(4, -1.0).is_err());
        assert!(LatticeSpec::new(4, f64::NAN).is_err());
    }

    #[test]
    fn smallest_grid_uses_zero_and_pi() {
        let lat = LatticeSpec::new(2, 1.0).unwrap();
        let w = wavenumbers(&lat);
        assert_eq!(w.len(), 8);
        for k in w.vectors() {
            for c in k {
                assert!(*c == 0.0 || (*c - PI).abs() < 1e-15, "component {c}");
            }
        }
        // every mode of the 2³ grid is its own conjugate
        assert!((0..8).all(|i| w.is_self_conjugate(i)));
    }

    #[test]
    fn max_component_matches_enumeration() {
        let lat = LatticeSpec::new(4, 0.5).unwrap();
        let w = wavenumbers(&lat);
        let max = w
            .vectors()
            .iter()
            .flat_map(|k| k.iter().map(|c| c.abs()))
            .fold(0.0, f64::max);
        assert!((max - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn pair_map_negates_modulo_grid() {
        for n in [2, 3, 4, 5, 8] {
            let lat = LatticeSpec::new(n, 0.7).unwrap();
            let w = wavenumbers(&lat);
            let half = PI / lat.spacing();
            for (i, k) in w.vectors().iter().enumerate() {
                let p = w.vectors()[w.pairs()[i]];
                for a in 0..3 {
                    // equal up to a reciprocal lattice vector (Nyquist modes)
                    let s = k[a] + p[a];
                    assert!(s.abs() < 1e-12 || (s - 2.0 * half).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn self_conjugate_count() {
        // even n: components 0 or Nyquist on every axis -> 8 fixed points
        let w = wavenumbers(&LatticeSpec::new(6, 1.0).unwrap());
        assert_eq!((0..w.len()).filter(|&i| w.is_self_conjugate(i)).count(), 8);
        // odd n: only k = 0
        let w = wavenumbers(&LatticeSpec::new(5, 1.0).unwrap());
        assert_eq!((0..w.len()).filter(|&i| w.is_self_conjugate(i)).count(), 1);
    }

    proptest::proptest! {
        #[test]
        fn pair_map_is_an_involution(n in 2usize..12, spacing in 0.05f64..4.0) {
            let lat = LatticeSpec::new(n, spacing).unwrap();
            let w = wavenumbers(&lat);
            for i in 0..w.len() {
                proptest::prop_assert_eq!(w.pairs()[w.pairs()[i]], i);
                if w.pairs()[i] == i {
                    // fixed points: every component is 0 or the Nyquist value
                    for c in w.vectors()[i] {
                        proptest::prop_assert!(c == 0.0 || (c.abs() - PI / spacing).abs() < 1e-9);
                    }
                }
            }
        }
    }
}
