//! Spectral analysis of the field update for frozen charges.
//!
//! The update matrix `G` (weight `1 - eta` on the diagonal, `eta/(2D)` on
//! nearest neighbors) is circulant on the torus, so Fourier waves
//! `exp(2 pi i k.x / L)` are its eigenvectors with eigenvalues
//!
//! ```text
//! lambda_k = 1 - eta + (eta/D) * sum_j cos(2 pi k_j / L).
//! ```
//!
//! For a frozen charge density `q` the mean-subtracted field converges to the
//! stationary solution `sum_{k != 0} q^(k) / (L^D (1 - lambda_k)) e^{i k.x}`,
//! and the distance to it shrinks at least like `lambda_max^t`.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::automaton::ScalarField;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, TorusIndex};
use crate::toric::ChargeField;
use crate::Real;

/// Lattices with at most this many cells use the direct Fourier sum.
pub const DIRECT_SUM_MAX_CELLS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierMethod {
    /// `O(N^2)` double sum with tabulated phases.
    Direct,
    /// Separable multi-dimensional FFT.
    Fft,
    /// Direct for small lattices, FFT above [`DIRECT_SUM_MAX_CELLS`].
    Auto,
}

/// Field with zero total.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledField<T> {
    size: usize,
    dim: usize,
    values: Vec<T>,
}

impl<T: Real> RescaledField<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a + v)
    }

    /// Euclidean distance to another field on the same lattice.
    pub fn distance(&self, other: &RescaledField<T>) -> T {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
            .sqrt()
    }

    pub fn norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, &a| acc + a * a)
            .sqrt()
    }
}

/// Subtracts the mean.
pub fn rescale<T: Real>(phi: &ScalarField<T>) -> RescaledField<T> {
    rescale_values(phi.size(), phi.dim(), phi.values())
}

pub fn rescale_values<T: Real>(size: usize, dim: usize, values: &[T]) -> RescaledField<T> {
    let n = T::of(values.len() as f64);
    let mean = values.iter().fold(T::zero(), |a, &v| a + v) / n;
    RescaledField {
        size,
        dim,
        values: values.iter().map(|&v| v - mean).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralModel<T> {
    lattice: Lattice,
    eta: T,
}

impl<T: Real> SpectralModel<T> {
    pub fn new(size: usize, dim: usize, eta: T) -> Result<Self> {
        let e = eta.to_f64_lossy();
        if !(e > 0.0 && e <= 0.5) {
            return Err(Error::InvalidEta(e));
        }
        Ok(Self {
            lattice: Lattice::new(size, dim)?,
            eta,
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn size(&self) -> usize {
        self.lattice.size()
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    pub fn cells(&self) -> usize {
        self.lattice.cells()
    }

    pub fn eigenvalue(&self, k: &TorusIndex) -> T {
        self.eigenvalue_flat(self.lattice.flat(k))
    }

    pub fn eigenvalue_flat(&self, k: usize) -> T {
        let l = self.size();
        let k = self.lattice.index_of(k);
        let two_pi = T::of(std::f64::consts::TAU);
        let s = k.coords().iter().fold(T::zero(), |acc, &kj| {
            acc + (two_pi * T::of(kj as f64) / T::of(l as f64)).cos()
        });
        T::one() - self.eta + self.eta / T::of(self.dim() as f64) * s
    }

    /// Largest eigenvalue off the constant mode, attained at `k = (1, 0, ..)`.
    pub fn lambda_max(&self) -> T {
        self.eigenvalue_flat(1)
    }

    /// Matrix-free product with `G`.
    pub fn apply_update_matrix(&self, v: &[T]) -> Vec<T> {
        let mut f = ScalarField::from_values(self.size(), self.dim(), v.to_vec())
            .expect("vector length matches the lattice");
        f.update(&[], self.eta);
        f.into_values()
    }

    /// `exp(-(eta pi^2 / D) t / L^2)`, the guaranteed contraction factor of
    /// the distance to the stationary field after `t` updates.
    pub fn equilibration_bound(&self, t: usize) -> T {
        let l = T::of(self.size() as f64);
        let rate = self.eta * T::of(std::f64::consts::PI.powi(2)) / T::of(self.dim() as f64);
        (-rate * T::of(t as f64) / (l * l)).exp()
    }

    /// Stationary field of a unit charge at the origin.
    pub fn kernel(&self) -> RescaledField<T> {
        let mut rho = vec![T::zero(); self.cells()];
        rho[0] = T::one();
        self.stationary_density(&rho, FourierMethod::Auto)
    }

    /// Stationary rescaled field of the anyons in `q`, placed on the `x2 = 0`
    /// plane when the lattice is 3D.
    pub fn stationary_field(&self, q: &ChargeField) -> Result<RescaledField<T>> {
        Ok(self.stationary_density(&self.embed(q)?, FourierMethod::Auto))
    }

    /// Charge density over the whole lattice from a plane charge field.
    pub fn embed(&self, q: &ChargeField) -> Result<Vec<T>> {
        if q.size() != self.size() || self.dim() < 2 {
            return Err(Error::LatticeMismatch(self.size(), self.dim(), q.size(), 2));
        }
        let mut rho = vec![T::zero(); self.cells()];
        for c in q.anyons() {
            rho[c] = T::one();
        }
        Ok(rho)
    }

    /// Stationary rescaled field of an arbitrary density. Only the
    /// non-constant part of `rho` matters.
    pub fn stationary_density(&self, rho: &[T], method: FourierMethod) -> RescaledField<T> {
        assert_eq!(rho.len(), self.cells());
        let method = match method {
            FourierMethod::Auto if self.cells() <= DIRECT_SUM_MAX_CELLS => FourierMethod::Direct,
            FourierMethod::Auto => FourierMethod::Fft,
            m => m,
        };
        let spectrum = match method {
            FourierMethod::Direct => self.direct_transform(rho),
            _ => self.fft_transform(rho),
        };
        let values = self.check_real(spectrum);
        RescaledField {
            size: self.size(),
            dim: self.dim(),
            values,
        }
    }

    fn inverse_gap(&self, k: usize) -> T {
        if k == 0 {
            T::zero()
        } else {
            T::one() / (T::of(self.cells() as f64) * (T::one() - self.eigenvalue_flat(k)))
        }
    }

    fn direct_transform(&self, rho: &[T]) -> Vec<Complex<T>> {
        let l = self.size();
        let n = self.cells();
        let table: Vec<Complex<T>> = (0..l)
            .map(|m| {
                let a = T::of(std::f64::consts::TAU * m as f64 / l as f64);
                Complex::new(a.cos(), a.sin())
            })
            .collect();
        let coords: Vec<TorusIndex> = self.lattice.iter().collect();
        let phase = |k: &TorusIndex, x: &TorusIndex| -> usize {
            k.coords()
                .iter()
                .zip(x.coords())
                .map(|(a, b)| a * b)
                .sum::<usize>()
                % l
        };

        let sources: Vec<(usize, T)> = rho
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != T::zero())
            .map(|(i, &v)| (i, v))
            .collect();
        let mut coeff = vec![Complex::new(T::zero(), T::zero()); n];
        for (k, slot) in coeff.iter_mut().enumerate().skip(1) {
            let mut acc = Complex::new(T::zero(), T::zero());
            for &(x, v) in &sources {
                acc += table[phase(&coords[k], &coords[x])].conj() * v;
            }
            *slot = acc * self.inverse_gap(k);
        }

        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for (x, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, c) in coeff.iter().enumerate().skip(1) {
                acc += *c * table[phase(&coords[k], &coords[x])];
            }
            *slot = acc;
        }
        out
    }

    fn fft_transform(&self, rho: &[T]) -> Vec<Complex<T>> {
        let mut data: Vec<Complex<T>> = rho.iter().map(|&v| Complex::new(v, T::zero())).collect();
        let mut planner = FftPlanner::new();
        fft_nd(&mut data, self.size(), self.dim(), &mut planner, false);
        for (k, c) in data.iter_mut().enumerate() {
            *c *= self.inverse_gap(k);
        }
        fft_nd(&mut data, self.size(), self.dim(), &mut planner, true);
        data
    }

    fn check_real(&self, values: Vec<Complex<T>>) -> Vec<T> {
        let scale = values.iter().fold(T::one(), |m, c| m.max(c.re.abs()));
        let tol = T::of(1e-9).max(T::epsilon() * T::of(1e4)) * scale;
        let worst = values.iter().fold(T::zero(), |m, c| m.max(c.im.abs()));
        assert!(
            worst <= tol,
            "stationary field has imaginary residue {worst} above {tol}"
        );
        values.into_iter().map(|c| c.re).collect()
    }

    /// Discrete gradient at the origin of the stationary field of a unit
    /// charge at `y`: component `j` is `phi(-y) - phi(e_j - y)`.
    pub fn stationary_gradient_at_origin(&self, y: &TorusIndex) -> Result<Vec<T>> {
        let origin = TorusIndex::origin(self.size(), self.dim())?;
        self.lattice.try_flat(y)?;
        if *y == origin {
            return Err(Error::SelfGradient);
        }
        let kernel = self.kernel();
        let at = |x: TorusIndex| kernel.values[self.lattice.flat(&x)];
        let minus_y = y.neg();
        Ok((0..self.dim())
            .map(|j| at(minus_y) - at(minus_y.shifted(j, 1)))
            .collect())
    }
}

/// In-place multi-dimensional FFT over an `L^D` row-major array.
/// The inverse is unnormalized.
fn fft_nd<T: Real>(
    data: &mut [Complex<T>],
    size: usize,
    dim: usize,
    planner: &mut FftPlanner<T>,
    inverse: bool,
) {
    let fft = if inverse {
        planner.plan_fft_inverse(size)
    } else {
        planner.plan_fft_forward(size)
    };
    let mut line = vec![Complex::new(T::zero(), T::zero()); size];
    let n = data.len();
    let mut stride = 1;
    for _axis in 0..dim {
        for start in 0..n {
            // visit each line once, from its first element
            if (start / stride) % size != 0 {
                continue;
            }
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = data[start + i * stride];
            }
            fft.process(&mut line);
            for (i, v) in line.iter().enumerate() {
                data[start + i * stride] = *v;
            }
        }
        stride *= size;
    }
}

fn l1_norm(x: &TorusIndex) -> usize {
    x.coords().iter().map(|&c| c.min(x.size() - c)).sum()
}

fn check_bound_args(dim: usize, eta: f64, epsilon: Option<f64>) -> Result<()> {
    if dim < 2 {
        return Err(Error::DimensionTooLow(dim));
    }
    if dim > 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !(eta > 0.0 && eta <= 0.5) {
        return Err(Error::InvalidEta(eta));
    }
    if let Some(eps) = epsilon {
        if !(eps > 0.0) {
            return Err(Error::InvalidEpsilon(eps));
        }
    }
    Ok(())
}

/// Prefactor of the point-wise self-interaction time at `x`:
///
/// ```text
/// chi(x) = pi^2 eta (D-1) / (2 e D^2) * (D n 2^D / (2 eta))^(2/(D-1))
/// ```
///
/// with `n = 2 |x|_1 + 1`, the largest value `|2x + e|_1` takes over unit
/// hop directions `e`. Coordinates use the minimal image.
pub fn chi<T: Real>(dim: usize, eta: T, x: &TorusIndex) -> Result<T> {
    let eta_f = eta.to_f64_lossy();
    check_bound_args(dim, eta_f, None)?;
    let d = T::of(dim as f64);
    let n = T::of((2 * l1_norm(x) + 1) as f64);
    let pi2 = T::of(std::f64::consts::PI.powi(2));
    let e = T::of(std::f64::consts::E);
    let two = T::of(2.0);
    let base = d * n * two.powi(dim as i32) / (two * eta);
    Ok(pi2 * eta * (d - T::one()) / (two * e * d * d) * base.powf(two / (d - T::one())))
}

/// Simpler upper bound on [`chi`]: `8 n^2 / eta` in 2D, `5 n` in 3D.
pub fn chi_prime<T: Real>(dim: usize, eta: T, x: &TorusIndex) -> Result<T> {
    check_bound_args(dim, eta.to_f64_lossy(), None)?;
    let n = T::of((2 * l1_norm(x) + 1) as f64);
    Ok(match dim {
        2 => T::of(8.0) * n * n / eta,
        _ => T::of(5.0) * n,
    })
}

/// Number of field updates after which the field at `x` is within `epsilon`
/// of its new stationary value following a single hop: `chi(x) eps^(2/(1-D))`.
pub fn self_interaction_time<T: Real>(dim: usize, eta: T, x: &TorusIndex, epsilon: T) -> Result<T> {
    check_bound_args(dim, eta.to_f64_lossy(), Some(epsilon.to_f64_lossy()))?;
    let d = T::of(dim as f64);
    Ok(chi(dim, eta, x)? * epsilon.powf(T::of(2.0) / (T::one() - d)))
}

/// `ln(L)^2`, the scaling of the smallest workable field velocity.
pub fn critical_velocity(size: f64) -> f64 {
    let lg = size.ln();
    lg * lg
}
