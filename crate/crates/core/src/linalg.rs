//! Dense complex matrices, unitary validation and the decompositions the
//! synthesizers rely on: unitary diagonalization, cosine-sine split, Haar
//! sampling and phase-aware comparison.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Default tolerance for unitarity checks (max entry of `M†M − I`).
pub const TOL_UNITARY: f64 = 1e-9;
/// Default tolerance for reassembly of decompositions.
pub const TOL_RECON: f64 = 1e-9;
/// Tolerance on the 2-norm of a state vector.
pub const TOL_NORM: f64 = 1e-10;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(CMat);

impl ComplexMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        if let Some(pos) = m.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(ComplexMatrix(m))
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::new(CMat::from_row_slice(rows, cols, entries))
    }

    pub fn identity(d: usize) -> Self {
        ComplexMatrix(CMat::identity(d, d))
    }

    pub fn as_mat(&self) -> &CMat {
        &self.0
    }

    pub fn into_mat(self) -> CMat {
        self.0
    }
}

impl Deref for ComplexMatrix {
    type Target = CMat;
    fn deref(&self) -> &CMat {
        &self.0
    }
}

/// A validated `2^n × 2^n` unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix {
    qubits: usize,
    matrix: ComplexMatrix,
}

impl UnitaryMatrix {
    pub fn new(m: CMat) -> Result<Self> {
        Self::with_tolerance(m, TOL_UNITARY)
    }

    pub fn with_tolerance(m: CMat, tol: f64) -> Result<Self> {
        let m = ComplexMatrix::new(m)?;
        let qubits = qubits_for_dim(m.nrows())?;
        if !m.is_square() {
            return Err(Error::Dimension(format!("{}x{} is not square", m.nrows(), m.ncols())));
        }
        let residual = unitarity_residual(&m);
        if residual > tol {
            return Err(Error::NotUnitary { residual });
        }
        Ok(UnitaryMatrix { qubits, matrix: m })
    }

    /// Wraps a matrix the caller knows to be unitary (e.g. a product of
    /// unitaries). Only the shape is checked.
    pub fn from_mat_unchecked(m: CMat) -> Self {
        let qubits = qubits_for_dim(m.nrows()).expect("dimension must be a power of two");
        assert!(m.is_square());
        UnitaryMatrix {
            qubits,
            matrix: ComplexMatrix(m),
        }
    }

    pub fn identity(qubits: usize) -> Self {
        UnitaryMatrix {
            qubits,
            matrix: ComplexMatrix::identity(1 << qubits),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn as_mat(&self) -> &CMat {
        &self.matrix.0
    }

    pub fn into_mat(self) -> CMat {
        self.matrix.0
    }

    pub fn dagger(&self) -> UnitaryMatrix {
        UnitaryMatrix {
            qubits: self.qubits,
            matrix: ComplexMatrix(self.matrix.adjoint()),
        }
    }
}

impl Deref for UnitaryMatrix {
    type Target = CMat;
    fn deref(&self) -> &CMat {
        &self.matrix.0
    }
}

/// Unit-norm amplitude vector over `n` qubits, qubit 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: CVec,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        Self::with_tolerance(amps, TOL_NORM)
    }

    pub fn with_tolerance(amps: Vec<C64>, tol: f64) -> Result<Self> {
        let qubits = qubits_for_dim(amps.len())?;
        if let Some(pos) = amps.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector {
            qubits,
            amps: CVec::from_vec(amps),
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(qubits: usize, index: usize) -> Self {
        let mut amps = CVec::zeros(1 << qubits);
        amps[index] = C64::new(1.0, 0.0);
        StateVector { qubits, amps }
    }

    pub(crate) fn from_vec_unchecked(amps: CVec) -> Self {
        let qubits = qubits_for_dim(amps.len()).expect("length must be a power of two");
        StateVector { qubits, amps }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut CVec {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> CVec {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.amps.dotc(&other.amps).norm()
    }
}

/// Factors of `u = (a1 ⊕ b1) · [[C, −S], [S, C]] · (a2 ⊕ b2)` with
/// `C = diag(cos θ/2)`, `S = diag(sin θ/2)`.
#[derive(Clone, Debug)]
pub struct CsdResult {
    pub a1: UnitaryMatrix,
    pub b1: UnitaryMatrix,
    pub a2: UnitaryMatrix,
    pub b2: UnitaryMatrix,
    pub thetas: Vec<f64>,
}

impl CsdResult {
    /// The cosine-sine center block.
    pub fn center(&self) -> CMat {
        csd_center(&self.thetas)
    }

    pub fn reassemble(&self) -> CMat {
        direct_sum(&self.a1, &self.b1) * self.center() * direct_sum(&self.a2, &self.b2)
    }
}

pub(crate) fn qubits_for_dim(d: usize) -> Result<usize> {
    if d == 0 || !d.is_power_of_two() {
        return Err(Error::Dimension(format!("dimension {d} is not a power of two")));
    }
    Ok(d.trailing_zeros() as usize)
}

pub(crate) fn unitarity_residual(m: &CMat) -> f64 {
    let d = m.ncols();
    max_abs(&(m.adjoint() * m - CMat::identity(d, d)))
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entry magnitude of `a − b`.
pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn check_unitary(m: &CMat, tol: f64) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", m.nrows(), m.ncols())));
    }
    Ok(unitarity_residual(m) <= tol)
}

/// Kronecker product; `a` occupies the more significant index bits.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Block-diagonal `a ⊕ b`.
pub fn direct_sum(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut m = CMat::zeros(ra + rb, ca + cb);
    m.view_mut((0, 0), (ra, ca)).copy_from(a);
    m.view_mut((ra, ca), (rb, cb)).copy_from(b);
    m
}

pub(crate) fn csd_center(thetas: &[f64]) -> CMat {
    let h = thetas.len();
    let mut m = CMat::zeros(2 * h, 2 * h);
    for (j, &t) in thetas.iter().enumerate() {
        let (s, c) = (t / 2.0).sin_cos();
        m[(j, j)] = C64::new(c, 0.0);
        m[(j, j + h)] = C64::new(-s, 0.0);
        m[(j + h, j)] = C64::new(s, 0.0);
        m[(j + h, j + h)] = C64::new(c, 0.0);
    }
    m
}

/// Nearest unitary in Frobenius norm (polar factor `U·V†` of the SVD).
pub fn nearest_unitary(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

const EIG_CLUSTER_GAP: f64 = 1e-4;
const EIG_SCALAR_TOL: f64 = 1e-11;
const EIG_MAX_DEPTH: usize = 8;

/// Diagonalizes a unitary: `u = V·diag(λ)·V†` with `|λ| = 1`.
///
/// A real mix `cos(a)·H + sin(a)·K` of the Hermitian parts of `u` shares its
/// eigenvectors. Its eigenvalues are `cos(λ − a)`, so distinct `λ` can
/// collide; colliding clusters are compressed and re-split with a new mixing
/// angle until each block is scalar.
pub fn eig_unitary(u: &UnitaryMatrix) -> Result<(Vec<C64>, UnitaryMatrix)> {
    let v = eig_split(u.as_mat(), 0);
    let d = v.adjoint() * u.as_mat() * &v;
    let vals: Vec<C64> = (0..d.nrows())
        .map(|k| {
            let z = d[(k, k)];
            let r = z.norm();
            if r > 0.0 {
                z / r
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    let recon = &v * CMat::from_diagonal(&CVec::from_column_slice(&vals)) * v.adjoint();
    let residual = max_diff(&recon, u.as_mat());
    if residual > TOL_RECON || !residual.is_finite() {
        return Err(Error::Numerical {
            what: "unitary diagonalization",
            residual,
        });
    }
    Ok((vals, UnitaryMatrix::from_mat_unchecked(v)))
}

fn mixing_angle(depth: usize) -> f64 {
    0.377 + 1.1913 * depth as f64
}

fn eig_split(u: &CMat, depth: usize) -> CMat {
    let d = u.nrows();
    if d == 1 {
        return CMat::identity(1, 1);
    }
    let mean = u.trace() / d as f64;
    if max_diff(u, &(CMat::identity(d, d) * mean)) <= EIG_SCALAR_TOL {
        return CMat::identity(d, d);
    }
    let a = mixing_angle(depth);
    let ua = u.adjoint();
    let h = (u + &ua).scale(0.5);
    let k = (u - &ua) * C64::new(0.0, -0.5);
    let mix = h.scale(a.cos()) + k.scale(a.sin());
    let eig = mix.symmetric_eigen();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vecs = CMat::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    if depth >= EIG_MAX_DEPTH {
        return vecs;
    }

    let mut out = CMat::zeros(d, d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && vals[end] - vals[end - 1] < EIG_CLUSTER_GAP {
            end += 1;
        }
        let vc = vecs.columns(start, end - start).into_owned();
        if end - start == 1 {
            out.columns_mut(start, 1).copy_from(&vc);
        } else {
            let block = vc.adjoint() * u * &vc;
            let inner = eig_split(&block, depth + 1);
            out.columns_mut(start, end - start).copy_from(&(vc * inner));
        }
        start = end;
    }
    out
}

/// Cosine-sine decomposition splitting on the most significant qubit.
///
/// The SVD of the top-left block fixes `a1`, `a2` and the cosines (sorted
/// ascending); a QR of the bottom-left block against `a2†` yields `b1` and
/// the sines; `b2` and a refined `a2` come from stripping the left factors.
pub fn cosine_sine_decompose(u: &UnitaryMatrix) -> Result<CsdResult> {
    let n = u.qubits();
    if n == 0 {
        return Err(Error::Dimension(
            "cosine-sine decomposition needs at least one qubit".into(),
        ));
    }
    let h = u.dim() / 2;
    let m = u.as_mat();
    let u00 = m.view((0, 0), (h, h)).into_owned();
    let u10 = m.view((h, 0), (h, h)).into_owned();

    let svd = u00.svd(true, true);
    let lu = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..h).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let a1 = CMat::from_fn(h, h, |r, c| lu[(r, order[c])]);
    let a2 = CMat::from_fn(h, h, |r, c| vt[(order[r], c)]);
    let cos: Vec<f64> = order.iter().map(|&i| svd.singular_values[i].min(1.0)).collect();

    let x = &u10 * a2.adjoint();
    let qr = x.qr();
    let q = qr.q();
    let r = qr.r();
    let mut b1 = q;
    let mut sin = vec![0.0; h];
    for j in 0..h {
        let rjj = r[(j, j)];
        let mag = rjj.norm();
        sin[j] = mag.min(1.0);
        if mag > 0.0 {
            let ph = rjj / mag;
            let col = b1.column(j) * ph;
            b1.column_mut(j).copy_from(&col);
        }
    }
    let thetas: Vec<f64> = (0..h).map(|j| 2.0 * sin[j].atan2(cos[j])).collect();

    let left = direct_sum(&a1, &b1);
    let center = csd_center(&thetas);
    let rm = center.adjoint() * left.adjoint() * m;
    let a2r = rm.view((0, 0), (h, h)).into_owned();
    let b2r = rm.view((h, h), (h, h)).into_owned();
    let off = max_abs(&rm.view((0, h), (h, h)).into_owned()).max(max_abs(&rm.view((h, 0), (h, h)).into_owned()));
    if off > TOL_RECON || !off.is_finite() {
        return Err(Error::Numerical {
            what: "cosine-sine decomposition",
            residual: off,
        });
    }
    let res = CsdResult {
        a1: UnitaryMatrix::from_mat_unchecked(a1),
        b1: UnitaryMatrix::from_mat_unchecked(b1),
        a2: UnitaryMatrix::from_mat_unchecked(a2r),
        b2: UnitaryMatrix::from_mat_unchecked(b2r),
        thetas,
    };
    let residual = max_diff(&res.reassemble(), m);
    if residual > TOL_RECON {
        return Err(Error::Numerical {
            what: "cosine-sine decomposition",
            residual,
        });
    }
    Ok(res)
}

fn gaussian_c64(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-random unitary on `n` qubits, deterministic in `seed`.
pub fn random_unitary(n: usize, seed: u64) -> UnitaryMatrix {
    let d = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMat::from_fn(d, d, |_, _| gaussian_c64(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let mag = rjj.norm();
        if mag > 0.0 {
            let col = q.column(j) * (rjj / mag);
            q.column_mut(j).copy_from(&col);
        }
    }
    UnitaryMatrix::from_mat_unchecked(q)
}

/// Uniformly random pure state on `n` qubits, deterministic in `seed`.
pub fn random_state(n: usize, seed: u64) -> StateVector {
    let d = 1usize << n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = CVec::from_fn(d, |_, _| gaussian_c64(&mut rng));
    let norm = v.norm();
    StateVector::from_vec_unchecked(v / C64::new(norm, 0.0))
}

/// Phase `φ = arg tr(b†a)` and `max |a − e^{iφ} b|`.
pub fn phase_aligned_distance(a: &CMat, b: &CMat) -> Result<(f64, f64)> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    let tr: C64 = b.iter().zip(a.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if tr.norm() == 0.0 { 0.0 } else { tr.arg() };
    let rot = C64::from_polar(1.0, phase);
    let err = a
        .iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - rot * y).norm()));
    Ok((phase, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma_x() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    fn ry_matrix(t: f64) -> CMat {
        let (s, co) = (t / 2.0).sin_cos();
        CMat::from_row_slice(2, 2, &[c(co, 0.), c(s, 0.), c(-s, 0.), c(co, 0.)])
    }

    #[test]
    fn check_unitary_examples() {
        assert!(check_unitary(&CMat::identity(4, 4), 1e-9).unwrap());
        let ones = CMat::from_element(2, 2, c(1., 0.));
        assert!(!check_unitary(&ones, 1e-9).unwrap());
        assert!(check_unitary(&random_unitary(3, 5), 1e-9).unwrap());
        assert!(check_unitary(&CMat::zeros(2, 3), 1e-9).is_err());
    }

    #[test]
    fn kron_matches_index_formula() {
        let i2 = CMat::identity(2, 2);
        assert_eq!(kron(&i2, &i2), CMat::identity(4, 4));
        let xi = kron(&sigma_x(), &i2);
        for r in 0..4 {
            for col in 0..4 {
                let expect = if (r ^ col) == 2 { 1.0 } else { 0.0 };
                assert_eq!(xi[(r, col)], c(expect, 0.));
            }
        }
        let a = random_unitary(1, 1);
        let b = random_unitary(1, 2);
        let ab = kron(&a, &b);
        for x in 0..2 {
            for y in 0..2 {
                let basis = CVec::from_fn(4, |i, _| if i == 2 * x + y { c(1., 0.) } else { c(0., 0.) });
                let lhs = &ab * basis;
                let ea = a.column(x).into_owned();
                let eb = b.column(y).into_owned();
                let rhs = ea.kronecker(&eb);
                assert!(lhs.iter().zip(rhs.iter()).all(|(p, q)| (p - q).norm() < 1e-14));
            }
        }
    }

    #[test]
    fn eig_of_identity_and_sigma_x() {
        let (vals, v) = eig_unitary(&UnitaryMatrix::identity(1)).unwrap();
        assert!(vals.iter().all(|z| (z - c(1., 0.)).norm() < 1e-12));
        assert!(check_unitary(&v, 1e-12).unwrap());

        let x = UnitaryMatrix::new(sigma_x()).unwrap();
        let (vals, v) = eig_unitary(&x).unwrap();
        let mut re: Vec<f64> = vals.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
        for (k, val) in vals.iter().enumerate() {
            let col = v.column(k);
            let ratio = col[1] / col[0];
            let expect = if val.re > 0.0 { 1.0 } else { -1.0 };
            assert!((ratio - c(expect, 0.)).norm() < 1e-10);
        }
    }

    #[test]
    fn eig_random_reassembles() {
        for seed in 0..5 {
            let u = random_unitary(3, seed);
            let (vals, v) = eig_unitary(&u).unwrap();
            let recon = &*v * CMat::from_diagonal(&CVec::from_column_slice(&vals)) * v.adjoint();
            assert!(max_diff(&recon, &u) < 1e-10);
            assert!(vals.iter().all(|z| (z.norm() - 1.0).abs() < 1e-9));
        }
    }

    #[test]
    fn eig_degenerate_spectrum() {
        let w = random_unitary(3, 11);
        let spec = [1.0, 1.0, -1.0, -1.0, 1.0, -1.0, 1.0, 1.0];
        let d = CMat::from_fn(8, 8, |r, col| if r == col { c(spec[r], 0.) } else { c(0., 0.) });
        let u = UnitaryMatrix::from_mat_unchecked(&*w * d * w.adjoint());
        let (vals, v) = eig_unitary(&u).unwrap();
        let recon = &*v * CMat::from_diagonal(&CVec::from_column_slice(&vals)) * v.adjoint();
        assert!(max_diff(&recon, &u) < 1e-10);

        let ph = [0.3, -0.3, 0.3, 2.0, -2.0, 0.3, 0.3 + 1e-7, PI];
        let d = CMat::from_fn(8, 8, |r, col| {
            if r == col {
                C64::from_polar(1.0, ph[r])
            } else {
                c(0., 0.)
            }
        });
        let u = UnitaryMatrix::from_mat_unchecked(&*w * d * w.adjoint());
        let (vals, v) = eig_unitary(&u).unwrap();
        let recon = &*v * CMat::from_diagonal(&CVec::from_column_slice(&vals)) * v.adjoint();
        assert!(max_diff(&recon, &u) < 1e-10);
    }

    #[test]
    fn csd_block_diagonal_has_zero_angles() {
        let a = random_unitary(2, 1);
        let b = random_unitary(2, 2);
        let u = UnitaryMatrix::from_mat_unchecked(direct_sum(&a, &b));
        let csd = cosine_sine_decompose(&u).unwrap();
        assert!(csd.thetas.iter().all(|t| t.abs() < 1e-12));
        assert!(max_diff(&(&*csd.a1 * &*csd.a2), &a) < 1e-10);
        assert!(max_diff(&(&*csd.b1 * &*csd.b2), &b) < 1e-10);
    }

    #[test]
    fn csd_single_qubit_recovers_angle() {
        for &t in &[0.4, 1.3, -2.1, 3.0] {
            let u = UnitaryMatrix::new(ry_matrix(t)).unwrap();
            let csd = cosine_sine_decompose(&u).unwrap();
            assert_eq!(csd.thetas.len(), 1);
            assert!((csd.thetas[0].abs() - f64::abs(t)).abs() < 1e-12);
            assert!(max_diff(&csd.reassemble(), &u) < 1e-12);
        }
    }

    #[test]
    fn csd_random_reassembles() {
        for n in 1..=5 {
            let u = random_unitary(n, 40 + n as u64);
            let csd = cosine_sine_decompose(&u).unwrap();
            assert!(max_diff(&csd.reassemble(), &u) <= 1e-9);
            for f in [&csd.a1, &csd.b1, &csd.a2, &csd.b2] {
                assert!(check_unitary(f, 1e-8).unwrap());
            }
            assert!(csd.thetas.iter().all(|t| (-PI..=PI).contains(t)));
        }
    }

    #[test]
    fn random_instances_are_deterministic() {
        assert_eq!(random_unitary(1, 7), random_unitary(1, 7));
        assert_ne!(random_unitary(2, 1), random_unitary(2, 2));
        assert!(check_unitary(&random_unitary(3, 1), 1e-10).unwrap());
        assert!((random_state(4, 3).norm() - 1.0).abs() < 1e-12);
        let s0 = random_state(0, 1);
        assert!((s0.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
        assert_eq!(random_state(3, 9), random_state(3, 9));
    }

    #[test]
    fn phase_aligned_distance_examples() {
        let u = random_unitary(2, 3);
        let (_, err) = phase_aligned_distance(&u, &u).unwrap();
        assert!(err < 1e-15);
        let shifted = u.as_mat() * C64::from_polar(1.0, PI / 3.0);
        let (phase, err) = phase_aligned_distance(&shifted, &u).unwrap();
        assert!((phase - PI / 3.0).abs() < 1e-12 && err < 1e-12);
        let v = random_unitary(2, 4);
        let (_, err) = phase_aligned_distance(&u, &v).unwrap();
        assert!(err > 0.1);
        let (phase, _) =
            phase_aligned_distance(&CMat::zeros(2, 2), &u.as_mat().view((0, 0), (2, 2)).into_owned()).unwrap();
        assert_eq!(phase, 0.0);
    }

    #[test]
    fn nearest_unitary_projects() {
        let u = random_unitary(2, 8);
        let noisy = u.as_mat() + CMat::from_element(4, 4, c(1e-8, -1e-8));
        let p = nearest_unitary(&noisy);
        assert!(check_unitary(&p, 1e-12).unwrap());
        assert!(max_diff(&p, &u) < 1e-7);
    }

    #[test]
    fn state_vector_validation() {
        assert!(StateVector::new(vec![c(1., 0.), c(0., 0.), c(0., 0.)]).is_err());
        assert!(matches!(
            StateVector::new(vec![c(1., 0.), c(1., 0.)]),
            Err(Error::NotNormalized { .. })
        ));
        let s = StateVector::new(vec![c(0.6, 0.), c(0., 0.8)]).unwrap();
        assert_eq!(s.qubits(), 1);
    }
}
