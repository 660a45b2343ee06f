//! Eigendecomposition, microcanonical estimators and eigenstate matching.

mod assignment;

use std::ops::Range;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh_complex, eigh_real, Hermitian, Operator, C64};

/// Eigenvectors as columns.
#[derive(Clone, Debug)]
pub enum Vectors {
    Real(Array2<f64>),
    Complex(Array2<C64>),
}

/// Ascending eigenvalues with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub energies: Vec<f64>,
    pub vectors: Vectors,
    /// levels come in exactly degenerate pairs (symplectic class)
    pub kramers: bool,
}

pub fn diagonalize(h: Hermitian) -> Result<EigenSystem> {
    crate::linalg::backend_check()?;
    let scale = match &h {
        Hermitian::Real(m) => m.iter().fold(0.0f64, |a, x| a.max(x.abs())),
        Hermitian::Complex(m) => m.iter().fold(0.0f64, |a, z| a.max(z.norm())),
    };
    let dev = h.hermiticity_error();
    if !(dev <= 1e-10 * scale.max(1.0)) {
        return Err(Error::NotHermitian(dev));
    }
    let (energies, vectors) = match h {
        Hermitian::Real(m) => {
            let (e, v) = eigh_real(m)?;
            (e, Vectors::Real(v))
        }
        Hermitian::Complex(m) => {
            let (e, v) = eigh_complex(m)?;
            (e, Vectors::Complex(v))
        }
    };
    Ok(EigenSystem { energies, vectors, kramers: false })
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Mark the spectrum as Kramers-degenerate; statistics then use one level per pair.
    pub fn with_kramers_pairs(mut self) -> Self {
        self.kramers = true;
        self
    }

    /// Indices of distinct levels (every second one for Kramers pairs).
    pub fn representatives(&self) -> Vec<usize> {
        if self.kramers {
            (0..self.dim()).step_by(2).collect()
        } else {
            (0..self.dim()).collect()
        }
    }

    /// Distinct levels, ascending.
    pub fn levels(&self) -> Vec<f64> {
        self.representatives().into_iter().map(|i| self.energies[i]).collect()
    }

    pub fn vector(&self, k: usize) -> Array1<C64> {
        match &self.vectors {
            Vectors::Real(v) => v.column(k).mapv(|x| C64::new(x, 0.0)),
            Vectors::Complex(v) => v.column(k).to_owned(),
        }
    }

    /// ⟨k|D|k⟩ for a diagonal operator D.
    pub fn diagonal_expectations(&self, diag: ArrayView1<f64>) -> Vec<f64> {
        match &self.vectors {
            Vectors::Real(v) => v
                .axis_iter(Axis(1))
                .map(|c| c.iter().zip(diag).map(|(x, d)| d * x * x).sum())
                .collect(),
            Vectors::Complex(v) => v
                .axis_iter(Axis(1))
                .map(|c| c.iter().zip(diag).map(|(z, d)| d * z.norm_sqr()).sum())
                .collect(),
        }
    }

    /// |⟨k|O|l⟩|² for all pairs of eigenvectors.
    pub fn abs2_elements(&self, op: &Operator) -> Result<Array2<f64>> {
        let all: Vec<usize> = (0..self.dim()).collect();
        self.abs2_block(op, &all, &all)
    }

    /// |⟨k|O|l⟩|² for k in `rows`, l in `cols`.
    pub fn abs2_block(&self, op: &Operator, rows: &[usize], cols: &[usize]) -> Result<Array2<f64>> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator of dimension {} on a {}-dimensional spectrum",
                op.dim(),
                self.dim()
            )));
        }
        let full = rows.len() == self.dim() && cols.len() == self.dim();
        match (&self.vectors, op) {
            (Vectors::Real(u), Operator::Diagonal(d)) => {
                let dcol = d.view().insert_axis(Axis(1));
                let mut w = if full {
                    let du = u * &dcol;
                    u.t().dot(&du)
                } else {
                    let duc = u.select(Axis(1), cols) * &dcol;
                    u.select(Axis(1), rows).t().dot(&duc)
                };
                w.mapv_inplace(|x| x * x);
                Ok(w)
            }
            (Vectors::Real(u), Operator::Dense(Hermitian::Real(o))) => {
                let ur = u.select(Axis(1), rows);
                let ouc = o.dot(&u.select(Axis(1), cols));
                let mut w = ur.t().dot(&ouc);
                w.mapv_inplace(|x| x * x);
                Ok(w)
            }
            _ => {
                let u = match &self.vectors {
                    Vectors::Real(u) => u.mapv(|x| C64::new(x, 0.0)),
                    Vectors::Complex(u) => u.clone(),
                };
                let ur = u.select(Axis(1), rows);
                let uc = u.select(Axis(1), cols);
                let ouc = match op {
                    Operator::Diagonal(d) => &uc * &d.mapv(|x| C64::new(x, 0.0)).view().insert_axis(Axis(1)),
                    Operator::Dense(h) => h.to_complex().dot(&uc),
                };
                let w = ur.t().mapv(|z| z.conj()).dot(&ouc);
                Ok(w.mapv(|z| z.norm_sqr()))
            }
        }
    }

    /// max_k ‖H v_k − E_k v_k‖.
    pub fn max_residual(&self, h: &Hermitian) -> f64 {
        let hc = h.to_complex();
        (0..self.dim())
            .map(|k| {
                let v = self.vector(k);
                let r = hc.dot(&v) - &v.mapv(|z| z * self.energies[k]);
                r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Energy shell |E' − E| < Δ/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicroWindow {
    pub center: f64,
    pub width: f64,
}

pub const DEFAULT_WINDOW: f64 = 0.1;

impl MicroWindow {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) || !center.is_finite() {
            return Err(Error::InvalidArgument(format!("bad window ({center}, {width})")));
        }
        Ok(MicroWindow { center, width })
    }

    pub fn at(center: f64) -> Self {
        MicroWindow { center, width: DEFAULT_WINDOW }
    }

    pub fn contains(&self, e: f64) -> bool {
        (e - self.center).abs() < 0.5 * self.width
    }

    /// Index range of a sorted list inside the window.
    pub fn range_in(&self, sorted: &[f64]) -> Range<usize> {
        let lo = self.center - 0.5 * self.width;
        let hi = self.center + 0.5 * self.width;
        let start = sorted.partition_point(|&e| e <= lo);
        let end = sorted.partition_point(|&e| e < hi);
        start..end.max(start)
    }

}

/// Counting estimate of the density of states at the window centre.
pub fn dos_estimate(energies: &[f64], window: MicroWindow) -> Result<f64> {
    let n = energies.iter().filter(|&&e| window.contains(e)).count();
    if n == 0 {
        return Err(Error::EmptyWindow { center: window.center, width: window.width });
    }
    Ok(n as f64 / window.width)
}

/// ρ(E+ω) estimated from pairs: (1/ΔN_E) Σ_a∈W(E) #{b : |E_b − E_a − ω| < Δ/2}.
pub fn pair_dos(sorted_levels: &[f64], window: MicroWindow, omega: f64) -> Result<f64> {
    let rows = window.range_in(sorted_levels);
    if rows.is_empty() {
        return Err(Error::EmptyWindow { center: window.center, width: window.width });
    }
    let n_e = rows.len();
    let total: usize = rows
        .map(|a| MicroWindow { center: sorted_levels[a] + omega, width: window.width }.range_in(sorted_levels).len())
        .sum();
    if total == 0 {
        return Err(Error::EmptyWindow { center: window.center + omega, width: window.width });
    }
    Ok(total as f64 / (window.width * n_e as f64))
}

/// Sum of |V_ab|² over b in the window at E_a + ω, read from a full element table.
pub(crate) fn target_weight(energies: &[f64], table: &Array2<f64>, a: usize, omega: f64, width: f64) -> f64 {
    let target = MicroWindow { center: energies[a] + omega, width };
    let row = table.row(a);
    target.range_in(energies).map(|b| row[b]).sum()
}

/// Spectral function ṽ(E, ω) = (1/ΔN_E) Σ_a∈W(E) Σ_b∈W(E_a+ω) |V_ab|².
pub fn spectral_function(eig: &EigenSystem, op: &Operator, omega: f64, window: MicroWindow) -> Result<f64> {
    let reps = eig.representatives();
    let rows: Vec<usize> = reps.iter().copied().filter(|&a| window.contains(eig.energies[a])).collect();
    if rows.is_empty() {
        return Err(Error::EmptyWindow { center: window.center, width: window.width });
    }
    let wide = MicroWindow { center: window.center + omega, width: 2.0 * window.width };
    let cols: Vec<usize> = wide.range_in(&eig.energies).collect();
    if cols.is_empty() {
        return Err(Error::EmptyWindow { center: window.center + omega, width: window.width });
    }
    let block = eig.abs2_block(op, &rows, &cols)?;
    let mut total = 0.0;
    let mut hits = 0usize;
    for (i, &a) in rows.iter().enumerate() {
        let target = MicroWindow { center: eig.energies[a] + omega, width: window.width };
        for (j, &b) in cols.iter().enumerate() {
            if target.contains(eig.energies[b]) {
                total += block[[i, j]];
                hits += 1;
            }
        }
    }
    if hits == 0 {
        return Err(Error::EmptyWindow { center: window.center + omega, width: window.width });
    }
    Ok(total / (window.width * rows.len() as f64))
}

/// Central contiguous block of ⌈fraction·dim⌉ indices; ties go low.
pub fn mid_spectrum_indices(dim: usize, fraction: f64) -> Result<Range<usize>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!("fraction {fraction} outside (0, 1]")));
    }
    let k = ((fraction * dim as f64).ceil() as usize).min(dim);
    let start = (dim - k) / 2;
    Ok(start..start + k)
}

/// Overlap floor below which a pair is treated as unmatched.
pub const OVERLAP_FLOOR: f64 = 1e-300;

/// Permutation π maximising Σ_α log|⟨coupled_π(α)|bare_α⟩|².
pub fn match_eigenstates(bare: &Vectors, coupled: &Vectors) -> Result<Vec<usize>> {
    let overlaps = overlap_abs2(bare, coupled)?;
    let n = overlaps.nrows();
    let mut costs = Vec::with_capacity(n * n);
    for (i, row) in overlaps.axis_iter(Axis(0)).enumerate() {
        if row.iter().all(|&o| o < OVERLAP_FLOOR) {
            return Err(Error::DegenerateOverlap(i));
        }
        costs.extend(row.iter().map(|&o| -o.max(OVERLAP_FLOOR).ln()));
    }
    Ok(assignment::solve(&costs, n))
}

/// |⟨coupled_β|bare_α⟩|² as a matrix indexed [α, β].
pub fn overlap_abs2(bare: &Vectors, coupled: &Vectors) -> Result<Array2<f64>> {
    let (nb, nc) = match (bare, coupled) {
        (Vectors::Real(a), Vectors::Real(b)) => (a.dim(), b.dim()),
        (Vectors::Complex(a), Vectors::Complex(b)) => (a.dim(), b.dim()),
        (Vectors::Real(a), Vectors::Complex(b)) => (a.dim(), b.dim()),
        (Vectors::Complex(a), Vectors::Real(b)) => (a.dim(), b.dim()),
    };
    if nb != nc || nb.0 != nb.1 {
        return Err(Error::DimensionMismatch(format!("{nb:?} vs {nc:?}")));
    }
    Ok(match (bare, coupled) {
        (Vectors::Real(a), Vectors::Real(b)) => a.t().dot(b).mapv(|x| x * x),
        _ => {
            let to_c = |v: &Vectors| match v {
                Vectors::Real(m) => m.mapv(|x| C64::new(x, 0.0)),
                Vectors::Complex(m) => m.clone(),
            };
            let (a, b) = (to_c(bare), to_c(coupled));
            a.t().mapv(|z| z.conj()).dot(&b).mapv(|z| z.norm_sqr())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn diagonal_matrix() {
        let eig = diagonalize(Hermitian::Real(Array2::from_diag(&array![3.0, 1.0, 2.0]))).unwrap();
        assert_eq!(eig.energies, vec![1.0, 2.0, 3.0]);
        let Vectors::Real(v) = &eig.vectors else { panic!() };
        let perm = [1usize, 2, 0];
        for (k, &row) in perm.iter().enumerate() {
            assert!((v[[row, k]].abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_x() {
        let eig = diagonalize(Hermitian::Real(array![[0.0, 1.0], [1.0, 0.0]])).unwrap();
        assert!((eig.energies[0] + 1.0).abs() < 1e-14 && (eig.energies[1] - 1.0).abs() < 1e-14);
        let Vectors::Real(v) = &eig.vectors else { panic!() };
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[[0, 0]] * v[[1, 0]] + 0.5).abs() < 1e-14);
        assert!((v[[0, 1]].abs() - r).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let r = diagonalize(Hermitian::Real(array![[0.0, 1.0], [0.5, 0.0]]));
        assert!(matches!(r, Err(Error::NotHermitian(_))));
    }

    #[test]
    fn mid_spectrum_examples() {
        assert_eq!(mid_spectrum_indices(8, 0.25).unwrap(), 3..5);
        let r = mid_spectrum_indices(100, 0.25).unwrap();
        assert_eq!(r.len(), 25);
        assert_eq!(r.start + 12, 49);
        assert!(mid_spectrum_indices(10, 0.0).is_err());
    }

    #[test]
    fn uniform_levels_give_inverse_spacing() {
        let s = 0.01;
        let levels: Vec<f64> = (0..1000).map(|i| -5.0 + s * (i as f64 + 0.5)).collect();
        let rho = dos_estimate(&levels, MicroWindow::new(0.0, 0.1).unwrap()).unwrap();
        assert!((rho - 1.0 / s).abs() < 1e-9);
        assert!(matches!(
            dos_estimate(&levels, MicroWindow::new(50.0, 0.1).unwrap()),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn identity_has_no_off_diagonal_weight() {
        let h = Hermitian::Real(Array2::from_diag(&Array1::linspace(-1.0, 1.0, 41)));
        let eig = diagonalize(h).unwrap();
        let v = spectral_function(&eig, &Operator::Diagonal(Array1::ones(41)), 0.5, MicroWindow::at(0.0)).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn swapped_columns_match_as_a_transposition() {
        let u0 = Array2::<f64>::eye(4);
        let mut u = u0.clone();
        for r in 0..4 {
            u.swap([r, 1], [r, 2]);
        }
        let p = match_eigenstates(&Vectors::Real(u0.clone()), &Vectors::Real(u)).unwrap();
        assert_eq!(p, vec![0, 2, 1, 3]);
        let id = match_eigenstates(&Vectors::Real(u0.clone()), &Vectors::Real(u0)).unwrap();
        assert_eq!(id, vec![0, 1, 2, 3]);
    }

    #[test]
    fn orthogonal_rows_are_degenerate() {
        let a = Array2::<f64>::eye(2);
        let z = Array2::<f64>::zeros((2, 2));
        assert!(matches!(
            match_eigenstates(&Vectors::Real(a), &Vectors::Real(z)),
            Err(Error::DegenerateOverlap(0))
        ));
    }
}
