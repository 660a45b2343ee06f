//! Dense Hermitian matrices, operators and the LAPACK calls behind them.

use std::os::raw::c_char;

use ndarray::{s, Array1, Array2, ArrayView2, Axis, ShapeBuilder, Zip};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A dense Hermitian matrix, stored either as real symmetric or complex.
#[derive(Clone, Debug)]
pub enum Hermitian {
    Real(Array2<f64>),
    Complex(Array2<C64>),
}

impl Hermitian {
    pub fn dim(&self) -> usize {
        match self {
            Hermitian::Real(m) => m.nrows(),
            Hermitian::Complex(m) => m.nrows(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Hermitian::Real(_))
    }

    /// max |H - H†| over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        match self {
            Hermitian::Real(m) => {
                if !m.is_square() {
                    return f64::INFINITY;
                }
                Zip::from(m)
                    .and(&m.t())
                    .fold(0.0f64, |acc, a, b| acc.max((a - b).abs()))
            }
            Hermitian::Complex(m) => {
                if !m.is_square() {
                    return f64::INFINITY;
                }
                Zip::from(m)
                    .and(&m.t())
                    .fold(0.0f64, |acc, a, b| acc.max((a - b.conj()).norm()))
            }
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            Hermitian::Real(m) => m.diag().sum(),
            Hermitian::Complex(m) => m.diag().iter().map(|z| z.re).sum(),
        }
    }

    /// tr(H H†)
    pub fn frobenius_sq(&self) -> f64 {
        match self {
            Hermitian::Real(m) => m.iter().map(|x| x * x).sum(),
            Hermitian::Complex(m) => m.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    pub fn to_complex(&self) -> Array2<C64> {
        match self {
            Hermitian::Real(m) => m.mapv(|x| C64::new(x, 0.0)),
            Hermitian::Complex(m) => m.clone(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match self {
            Hermitian::Real(m) => C64::new(m[[i, j]], 0.0),
            Hermitian::Complex(m) => m[[i, j]],
        }
    }
}

/// An observable acting on a Hilbert space; diagonal ones are kept compressed.
#[derive(Clone, Debug)]
pub enum Operator {
    Diagonal(Array1<f64>),
    Dense(Hermitian),
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Diagonal(v) => v.len(),
            Operator::Dense(h) => h.dim(),
        }
    }

    /// tr(O O†)
    pub fn frobenius_sq(&self) -> f64 {
        match self {
            Operator::Diagonal(v) => v.iter().map(|x| x * x).sum(),
            Operator::Dense(h) => h.frobenius_sq(),
        }
    }

    pub fn to_dense(&self) -> Hermitian {
        match self {
            Operator::Diagonal(v) => Hermitian::Real(Array2::from_diag(v)),
            Operator::Dense(h) => h.clone(),
        }
    }
}

/// Checks one BLAS product and one eigendecomposition against plain loops.
/// Some OpenBLAS kernels picked at load time give wrong results on CPUs that
/// advertise instructions the hypervisor does not deliver; setting
/// `OPENBLAS_CORETYPE=Haswell` selects a working kernel.
pub fn backend_check() -> Result<()> {
    static CELL: std::sync::OnceLock<std::result::Result<(), String>> = std::sync::OnceLock::new();
    CELL.get_or_init(|| {
        let n = 160;
        let a = Array2::from_shape_fn((n, n), |(i, j)| ((i * 7 + j * 13) % 17) as f64 / 17.0 - 0.5);
        let sym = &a + &a.t();
        let c = a.dot(&sym);
        let mut err = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let x: f64 = (0..n).map(|k| a[[i, k]] * sym[[k, j]]).sum();
                err = err.max((x - c[[i, j]]).abs());
            }
        }
        if err > 1e-9 {
            return Err(format!("BLAS matrix product off by {err:e}; try OPENBLAS_CORETYPE=Haswell"));
        }
        let (w, v) = eigh_real(sym.clone()).map_err(|e| e.to_string())?;
        let mut res = 0.0f64;
        for k in [0, n / 2, n - 1] {
            for i in 0..n {
                let x: f64 = (0..n).map(|j| sym[[i, j]] * v[[j, k]]).sum();
                res = res.max((x - w[k] * v[[i, k]]).abs());
            }
        }
        if res > 1e-9 {
            return Err(format!("LAPACK eigensolver residual {res:e}; try OPENBLAS_CORETYPE=Haswell"));
        }
        Ok(())
    })
    .clone()
    .map_err(Error::Backend)
}

fn lapack_int(n: usize) -> Result<i32> {
    i32::try_from(n).map_err(|_| Error::InvalidDimension(n))
}

/// Real symmetric eigendecomposition (divide and conquer). The input is
/// consumed; eigenvectors come back as the columns of a column-major array.
pub fn eigh_real(mut a: Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = a.nrows();
    let ni = lapack_int(n)?;
    // A symmetric row-major buffer reads as itself in column-major order.
    if !a.is_standard_layout() {
        a = a.as_standard_layout().into_owned();
    }
    let mut w = vec![0.0; n];
    let jobz = b'V' as c_char;
    let uplo = b'L' as c_char;
    let mut info = 0;
    let mut wq = [0.0f64];
    let mut iq = [0i32];
    let query = -1;
    unsafe {
        lapack_sys::dsyevd_(
            &jobz,
            &uplo,
            &ni,
            a.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            wq.as_mut_ptr(),
            &query,
            iq.as_mut_ptr(),
            &query,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    let lwork = wq[0] as i32;
    let liwork = iq[0];
    let mut work = vec![0.0f64; lwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack_sys::dsyevd_(
            &jobz,
            &uplo,
            &ni,
            a.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    drop(work);
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    // The buffer now holds eigenvectors column-major: reinterpret without copying.
    let data = a.into_raw_vec_and_offset().0;
    let v = Array2::from_shape_vec((n, n).f(), data).expect("square buffer");
    Ok((w, v))
}

/// Complex Hermitian eigendecomposition (divide and conquer).
pub fn eigh_complex(a: Array2<C64>) -> Result<(Vec<f64>, Array2<C64>)> {
    let n = a.nrows();
    let ni = lapack_int(n)?;
    // Row-major H read column-major is H^T = conj(H); conjugate to compensate.
    let mut a = a.as_standard_layout().into_owned();
    a.mapv_inplace(|z| z.conj());
    let mut w = vec![0.0; n];
    let jobz = b'V' as c_char;
    let uplo = b'L' as c_char;
    let mut info = 0;
    let mut wq = [C64::new(0.0, 0.0)];
    let mut rq = [0.0f64];
    let mut iq = [0i32];
    let query = -1;
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &ni,
            a.as_mut_ptr().cast(),
            &ni,
            w.as_mut_ptr(),
            wq.as_mut_ptr().cast(),
            &query,
            rq.as_mut_ptr(),
            &query,
            iq.as_mut_ptr(),
            &query,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    let lwork = wq[0].re as i32;
    let lrwork = rq[0] as i32;
    let liwork = iq[0];
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack_sys::zheevd_(
            &jobz,
            &uplo,
            &ni,
            a.as_mut_ptr().cast(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr().cast(),
            &lwork,
            rwork.as_mut_ptr(),
            &lrwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    let data = a.into_raw_vec_and_offset().0;
    let v = Array2::from_shape_vec((n, n).f(), data).expect("square buffer");
    Ok((w, v))
}

/// Q factor of a square real matrix with the signs of diag(R) absorbed, so
/// that R has a positive diagonal.
pub fn qr_positive_real(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    let ni = lapack_int(n)?;
    let mut q = Array2::<f64>::zeros((n, n).f());
    q.assign(a);
    let mut tau = vec![0.0f64; n];
    let mut info = 0;
    let mut wq = [0.0f64];
    let query = -1;
    unsafe {
        lapack_sys::dgeqrf_(&ni, &ni, q.as_mut_ptr(), &ni, tau.as_mut_ptr(), wq.as_mut_ptr(), &query, &mut info);
    }
    let lwork = (wq[0] as i32).max(1);
    let mut work = vec![0.0f64; lwork as usize];
    unsafe {
        lapack_sys::dgeqrf_(&ni, &ni, q.as_mut_ptr(), &ni, tau.as_mut_ptr(), work.as_mut_ptr(), &lwork, &mut info);
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    let signs: Vec<f64> = q.diag().iter().map(|r| if *r < 0.0 { -1.0 } else { 1.0 }).collect();
    unsafe {
        lapack_sys::dorgqr_(&ni, &ni, &ni, q.as_mut_ptr(), &ni, tau.as_ptr(), wq.as_mut_ptr(), &query, &mut info);
    }
    let lwork = (wq[0] as i32).max(1);
    let mut work = vec![0.0f64; lwork as usize];
    unsafe {
        lapack_sys::dorgqr_(&ni, &ni, &ni, q.as_mut_ptr(), &ni, tau.as_ptr(), work.as_mut_ptr(), &lwork, &mut info);
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    for (mut col, s) in q.axis_iter_mut(Axis(1)).zip(signs) {
        col *= s;
    }
    Ok(q)
}

/// Complex analogue of [`qr_positive_real`]: columns rotated by the phase of diag(R).
pub fn qr_positive_complex(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    let ni = lapack_int(n)?;
    let mut q = Array2::<C64>::zeros((n, n).f());
    q.assign(a);
    let mut tau = vec![C64::new(0.0, 0.0); n];
    let mut info = 0;
    let mut wq = [C64::new(0.0, 0.0)];
    let query = -1;
    unsafe {
        lapack_sys::zgeqrf_(&ni, &ni, q.as_mut_ptr().cast(), &ni, tau.as_mut_ptr().cast(), wq.as_mut_ptr().cast(), &query, &mut info);
    }
    let lwork = (wq[0].re as i32).max(1);
    let mut work = vec![C64::new(0.0, 0.0); lwork as usize];
    unsafe {
        lapack_sys::zgeqrf_(&ni, &ni, q.as_mut_ptr().cast(), &ni, tau.as_mut_ptr().cast(), work.as_mut_ptr().cast(), &lwork, &mut info);
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    let phases: Vec<C64> = q
        .diag()
        .iter()
        .map(|r| if r.norm() > 0.0 { r / r.norm() } else { C64::new(1.0, 0.0) })
        .collect();
    unsafe {
        lapack_sys::zungqr_(&ni, &ni, &ni, q.as_mut_ptr().cast(), &ni, tau.as_ptr().cast(), wq.as_mut_ptr().cast(), &query, &mut info);
    }
    let lwork = (wq[0].re as i32).max(1);
    let mut work = vec![C64::new(0.0, 0.0); lwork as usize];
    unsafe {
        lapack_sys::zungqr_(&ni, &ni, &ni, q.as_mut_ptr().cast(), &ni, tau.as_ptr().cast(), work.as_mut_ptr().cast(), &lwork, &mut info);
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    for (mut col, ph) in q.axis_iter_mut(Axis(1)).zip(phases) {
        col *= ph;
    }
    Ok(q)
}

/// conj(A)^T B
pub fn adjoint_dot(a: &ArrayView2<C64>, b: &ArrayView2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj()).dot(b)
}

/// max |U†U - 1| for a real or complex square matrix given as complex.
pub fn unitarity_error(u: &Array2<C64>) -> f64 {
    let g = adjoint_dot(&u.view(), &u.view());
    let n = g.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[[i, j]] - target).norm());
        }
    }
    worst
}

/// Copy of a square block.
pub fn block<T: Clone>(m: &Array2<T>, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Array2<T> {
    m.slice(s![rows, cols]).to_owned()
}
