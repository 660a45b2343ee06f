//! Random-matrix baths: Gaussian ensembles, Haar unitaries and Poisson
//! (Haar-rotated iid semicircle) Hamiltonians.
//!
//! Quaternionic matrices of size d live as 2d×2d complex matrices
//! `[[X, Y], [-conj(Y), conj(X)]]`, so the Kramers partner of basis vector
//! `i` is `i + d`.

use std::f64::consts::PI;

use ndarray::{s, Array1, Array2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{qr_positive_complex, qr_positive_real, Hermitian, C64};
use crate::numerics::bisect_newton;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum DysonClass {
    Real,
    Complex,
    Quaternion,
}

impl DysonClass {
    pub fn new(beta: u8) -> Result<Self> {
        match beta {
            1 => Ok(DysonClass::Real),
            2 => Ok(DysonClass::Complex),
            4 => Ok(DysonClass::Quaternion),
            b => Err(Error::InvalidBeta(b)),
        }
    }

    pub fn beta(self) -> u8 {
        match self {
            DysonClass::Real => 1,
            DysonClass::Complex => 2,
            DysonClass::Quaternion => 4,
        }
    }

    /// Complex dimension used to represent a d-dimensional matrix.
    pub fn storage_dim(self, d: usize) -> usize {
        if self == DysonClass::Quaternion {
            2 * d
        } else {
            d
        }
    }
}

impl TryFrom<u8> for DysonClass {
    type Error = Error;
    fn try_from(b: u8) -> Result<Self> {
        DysonClass::new(b)
    }
}

impl From<DysonClass> for u8 {
    fn from(c: DysonClass) -> u8 {
        c.beta()
    }
}

/// A Haar-distributed orthogonal, unitary or symplectic matrix.
#[derive(Clone, Debug)]
pub enum Unitary {
    Real(Array2<f64>),
    Complex(Array2<C64>),
}

impl Unitary {
    pub fn to_complex(&self) -> Array2<C64> {
        match self {
            Unitary::Real(m) => m.mapv(|x| C64::new(x, 0.0)),
            Unitary::Complex(m) => m.clone(),
        }
    }
}

/// Semicircle density ρ(E) = (d/π)√(1 − E²/4) on [−2, 2].
pub fn semicircle_density(e: f64, d: f64) -> f64 {
    if e.abs() >= 2.0 {
        0.0
    } else {
        d / PI * (1.0 - e * e / 4.0).sqrt()
    }
}

/// Fraction of the semicircle law below `e`.
pub fn semicircle_cdf(e: f64) -> f64 {
    if e <= -2.0 {
        return 0.0;
    }
    if e >= 2.0 {
        return 1.0;
    }
    0.5 + e * (4.0 - e * e).sqrt() / (4.0 * PI) + (e / 2.0).asin() / PI
}

pub fn semicircle_quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return -2.0;
    }
    if u >= 1.0 {
        return 2.0;
    }
    bisect_newton(|e| (semicircle_cdf(e) - u, semicircle_density(e, 1.0)), -2.0, 2.0, 1e-12)
        .expect("semicircle cdf is bracketed on [-2, 2]")
}

pub fn sample_semicircle<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::InvalidArgument("semicircle sample count must be positive".into()));
    }
    Ok((0..n).map(|_| semicircle_quantile(rng.random::<f64>())).collect())
}

fn gaussian_real<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Array2<f64> {
    Array2::from_shape_simple_fn((n, m), || rng.sample(StandardNormal))
}

/// Complex Gaussian entries with E|z|² = 1.
fn gaussian_complex<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Array2<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Array2::from_shape_simple_fn((n, m), || {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(h * re, h * im)
    })
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// Gaussian ensemble with off-diagonal variance 1/d, so the eigenvalue
/// variance tends to one.
pub fn sample_gre<R: Rng + ?Sized>(d: usize, beta: DysonClass, rng: &mut R) -> Result<Hermitian> {
    check_dim(d)?;
    let df = d as f64;
    Ok(match beta {
        DysonClass::Real => {
            let a = gaussian_real(d, d, rng);
            Hermitian::Real((&a + &a.t()) / (2.0 * df).sqrt())
        }
        DysonClass::Complex => {
            let a = gaussian_complex(d, d, rng);
            let h = (&a + &a.t().mapv(|z| z.conj())) / C64::new((2.0 * df).sqrt(), 0.0);
            Hermitian::Complex(h)
        }
        DysonClass::Quaternion => {
            let scale = C64::new(1.0 / (2.0 * df.sqrt()), 0.0);
            let a = gaussian_complex(d, d, rng);
            let b = gaussian_complex(d, d, rng);
            let x = (&a + &a.t().mapv(|z| z.conj())) * scale;
            let y = (&b - &b.t()) * scale;
            let mut h = Array2::<C64>::zeros((2 * d, 2 * d));
            h.slice_mut(s![..d, ..d]).assign(&x);
            h.slice_mut(s![..d, d..]).assign(&y);
            h.slice_mut(s![d.., ..d]).assign(&y.mapv(|z| -z.conj()));
            h.slice_mut(s![d.., d..]).assign(&x.mapv(|z| z.conj()));
            Hermitian::Complex(h)
        }
    })
}

/// Symplectic partner J·conj(v) of a 2d vector v = (x, y): (−conj(y), conj(x)).
fn kramers_partner(v: &Array1<C64>) -> Array1<C64> {
    let d = v.len() / 2;
    let mut p = Array1::zeros(v.len());
    for i in 0..d {
        p[i] = -v[i + d].conj();
        p[i + d] = v[i].conj();
    }
    p
}

/// Quaternionic Gram-Schmidt on Gaussian columns; column j + d is the
/// Kramers partner of column j.
fn haar_symplectic<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Array2<C64> {
    let n = 2 * d;
    let mut q = Array2::<C64>::zeros((n, n));
    let mut done = Array2::<C64>::zeros((n, 0));
    for j in 0..d {
        let mut v = gaussian_complex(n, 1, rng).remove_axis(Axis(1));
        for _ in 0..2 {
            if done.ncols() > 0 {
                let coef = done.t().mapv(|z| z.conj()).dot(&v);
                v = &v - &done.dot(&coef);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.mapv_inplace(|z| z / norm);
        let p = kramers_partner(&v);
        q.column_mut(j).assign(&v);
        q.column_mut(j + d).assign(&p);
        done.push_column(v.view()).expect("column length");
        done.push_column(p.view()).expect("column length");
    }
    q
}

/// Haar-random orthogonal (β=1), unitary (β=2) or symplectic 2d×2d (β=4) matrix.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, beta: DysonClass, rng: &mut R) -> Result<Unitary> {
    check_dim(d)?;
    Ok(match beta {
        DysonClass::Real => Unitary::Real(qr_positive_real(&gaussian_real(d, d, rng))?),
        DysonClass::Complex => Unitary::Complex(qr_positive_complex(&gaussian_complex(d, d, rng))?),
        DysonClass::Quaternion => Unitary::Complex(haar_symplectic(d, rng)),
    })
}

/// H = U Λ U† with Λ iid semicircle (Kramers-doubled for β=4) and U Haar.
pub fn sample_poisson_bath<R: Rng + ?Sized>(d: usize, beta: DysonClass, rng: &mut R) -> Result<Hermitian> {
    check_dim(d)?;
    let levels = sample_semicircle(d, rng)?;
    poisson_bath_with_levels(&levels, beta, rng)
}

pub fn poisson_bath_with_levels<R: Rng + ?Sized>(levels: &[f64], beta: DysonClass, rng: &mut R) -> Result<Hermitian> {
    let d = levels.len();
    let u = sample_haar_unitary(d, beta, rng)?;
    let lam: Array1<f64> = match beta {
        DysonClass::Quaternion => levels.iter().chain(levels).copied().collect(),
        _ => levels.iter().copied().collect(),
    };
    Ok(match u {
        Unitary::Real(u) => {
            let ul = &u * &lam.view().insert_axis(Axis(0));
            let mut h = ul.dot(&u.t());
            symmetrize_real(&mut h);
            Hermitian::Real(h)
        }
        Unitary::Complex(u) => {
            let lc = lam.mapv(|x| C64::new(x, 0.0));
            let ul = &u * &lc.view().insert_axis(Axis(0));
            let mut h = ul.dot(&u.t().mapv(|z| z.conj()));
            symmetrize_complex(&mut h);
            Hermitian::Complex(h)
        }
    })
}

fn symmetrize_real(h: &mut Array2<f64>) {
    let n = h.nrows();
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (h[[i, j]] + h[[j, i]]);
            h[[i, j]] = m;
            h[[j, i]] = m;
        }
    }
}

fn symmetrize_complex(h: &mut Array2<C64>) {
    let n = h.nrows();
    for i in 0..n {
        h[[i, i]].im = 0.0;
        for j in 0..i {
            let m = 0.5 * (h[[i, j]] + h[[j, i]].conj());
            h[[i, j]] = m;
            h[[j, i]] = m.conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_error;
    use crate::rng::stream;
    use crate::spectra::diagonalize;

    #[test]
    fn dyson_class_validation() {
        assert!(DysonClass::new(3).is_err());
        assert_eq!(DysonClass::new(4).unwrap().beta(), 4);
    }

    #[test]
    fn small_dimensions_are_rejected() {
        let mut rng = stream(0, 0);
        assert!(matches!(sample_gre(1, DysonClass::Real, &mut rng), Err(Error::InvalidDimension(1))));
        assert!(sample_haar_unitary(1, DysonClass::Complex, &mut rng).is_err());
        assert!(sample_semicircle(0, &mut rng).is_err());
    }

    #[test]
    fn gue_two_by_two_is_hermitian() {
        let h = sample_gre(2, DysonClass::Complex, &mut stream(1, 0)).unwrap();
        assert_eq!(h.hermiticity_error(), 0.0);
    }

    #[test]
    fn every_ensemble_is_hermitian() {
        let mut rng = stream(2, 0);
        for beta in [DysonClass::Real, DysonClass::Complex, DysonClass::Quaternion] {
            assert!(sample_gre(16, beta, &mut rng).unwrap().hermiticity_error() < 1e-12);
            assert!(sample_poisson_bath(16, beta, &mut rng).unwrap().hermiticity_error() < 1e-12);
        }
    }

    #[test]
    fn gse_levels_are_kramers_pairs() {
        let h = sample_gre(24, DysonClass::Quaternion, &mut stream(3, 0)).unwrap();
        let e = diagonalize(h).unwrap().energies;
        for k in 0..24 {
            assert!((e[2 * k] - e[2 * k + 1]).abs() < 1e-8);
        }
    }

    #[test]
    fn haar_matrices_are_unitary() {
        let mut rng = stream(4, 0);
        let u = sample_haar_unitary(2, DysonClass::Complex, &mut rng).unwrap().to_complex();
        let det = u[[0, 0]] * u[[1, 1]] - u[[0, 1]] * u[[1, 0]];
        assert!((det.norm() - 1.0).abs() < 1e-10);
        match sample_haar_unitary(64, DysonClass::Real, &mut rng).unwrap() {
            Unitary::Real(o) => assert!(unitarity_error(&o.mapv(|x| C64::new(x, 0.0))) < 1e-10),
            Unitary::Complex(_) => panic!("orthogonal expected"),
        }
        let sp = sample_haar_unitary(12, DysonClass::Quaternion, &mut rng).unwrap().to_complex();
        assert!(unitarity_error(&sp) < 1e-10);
        for j in 0..12 {
            let p = kramers_partner(&sp.column(j).to_owned());
            for i in 0..24 {
                assert!((p[i] - sp[[i, j + 12]]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn poisson_spectrum_is_the_sampled_levels() {
        let mut rng = stream(5, 0);
        let mut levels = sample_semicircle(16, &mut rng).unwrap();
        for beta in [DysonClass::Real, DysonClass::Complex] {
            let h = poisson_bath_with_levels(&levels, beta, &mut rng).unwrap();
            let e = diagonalize(h).unwrap().energies;
            levels.sort_by(f64::total_cmp);
            for (a, b) in e.iter().zip(&levels) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn semicircle_quantile_inverts_cdf() {
        for u in [1e-9, 0.01, 0.3, 0.5, 0.77, 0.999999] {
            assert!((semicircle_cdf(semicircle_quantile(u)) - u).abs() < 1e-11);
        }
        assert!((semicircle_cdf(0.0) - 0.5).abs() < 1e-15);
    }
}
