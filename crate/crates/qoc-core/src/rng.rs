//! Small deterministic PRNG and samplers for randomized utilities.
//!
//! Reproducibility across platforms matters more here than statistical
//! sophistication: run configurations carry a seed, and test suites freeze
//! expected values against it. SplitMix64 is compact, has no portability
//! hazards, and is more than good enough for sampling test problems.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::cmatrix::CMatrix;
use crate::math;

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let mut u1 = self.uniform();
        if u1 < 1e-300 {
            u1 = 1e-300;
        }
        let u2 = self.uniform();
        math::sqrt(-2.0 * math::ln(u1)) * math::cos(2.0 * core::f64::consts::PI * u2)
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }
}

/// Random matrix with independent standard complex Gaussian entries.
pub fn ginibre(dim: usize, rng: &mut Rng) -> CMatrix {
    let mut m = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = rng.complex_normal();
        }
    }
    m
}

/// Haar-random unitary: QR of a Ginibre matrix with the R diagonal phases
/// absorbed into Q.
pub fn haar_unitary(dim: usize, rng: &mut Rng) -> CMatrix {
    let g = ginibre(dim, rng);
    // Modified Gram-Schmidt on columns.
    let mut q = g;
    for j in 0..dim {
        for k in 0..j {
            let mut proj = Complex64::ZERO;
            for i in 0..dim {
                proj += q[(i, k)].conj() * q[(i, j)];
            }
            for i in 0..dim {
                let s = q[(i, k)];
                q[(i, j)] -= proj * s;
            }
        }
        let mut norm_sq = 0.0;
        for i in 0..dim {
            norm_sq += q[(i, j)].norm_sqr();
        }
        let inv = 1.0 / math::sqrt(norm_sq);
        for i in 0..dim {
            q[(i, j)] *= inv;
        }
        // Fix the phase so that the distribution is exactly Haar: rotate the
        // column by the conjugate phase of its own leading Gram-Schmidt
        // coefficient, equivalent to demanding a positive R diagonal.
        let lead = q[(j, j)];
        let mag = lead.norm();
        if mag > 1e-300 {
            let phase = (lead / mag).conj();
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Random Hermitian matrix with entries of scale `scale` (GUE-like).
pub fn random_hermitian(dim: usize, scale: f64, rng: &mut Rng) -> CMatrix {
    let mut m = CMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(scale * rng.normal(), 0.0);
        for j in i + 1..dim {
            let z = rng.complex_normal() * Complex64::new(scale / core::f64::consts::SQRT_2, 0.0);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random full-rank density matrix: normalized G G^dag from a Ginibre draw.
pub fn random_density(dim: usize, rng: &mut Rng) -> CMatrix {
    let g = ginibre(dim, rng);
    let mut rho = g.matmul(&g.adjoint());
    let tr = rho.trace().re;
    rho.scale_mut(Complex64::new(1.0 / tr, 0.0));
    rho
}

/// Random probability vector of the given length.
pub fn random_probabilities(len: usize, rng: &mut Rng) -> Vec<f64> {
    let mut p: Vec<f64> = (0..len).map(|_| rng.uniform() + 1e-6).collect();
    let s: f64 = p.iter().sum();
    for x in &mut p {
        *x /= s;
    }
    p
}
