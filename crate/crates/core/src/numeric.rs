//! Complex dense linear algebra helpers shared by the representation code.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `exp(2πi t)`.
pub fn turn_to_phase(t: f64) -> Complex64 {
    let a = std::f64::consts::TAU * t;
    c(a.cos(), a.sin())
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Block-diagonal matrix with the given blocks in order.
pub fn block_diag(blocks: &[CMat]) -> CMat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let m: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(n, m);
    let (mut r, mut col) = (0, 0);
    for b in blocks {
        out.view_mut((r, col), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        col += b.ncols();
    }
    out
}

pub fn frob(m: &CMat) -> f64 {
    m.norm()
}

/// `‖a - b‖` in the Frobenius norm.
pub fn dist(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm()
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// splitmix64 finalizer, used to derive independent stream seeds.
pub fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Folds a sequence of words into one seed, order-sensitively.
pub fn mix_all(seed: u64, words: impl IntoIterator<Item = u64>) -> u64 {
    words.into_iter().fold(mix(seed), |acc, w| mix(acc ^ w.wrapping_mul(0x2545_f491_4f6c_dd1d)))
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMat {
    let a = random_matrix(n, n, rng);
    (&a + a.adjoint()) * c(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let sym = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(h.nrows(), h.ncols());
    for (k, &i) in order.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Groups sorted eigenvalues into clusters of (numerically) equal values.
/// Returns `None` when two clusters are closer than `gap`, i.e. when the
/// split is ambiguous.
pub fn cluster_sorted(vals: &[f64], same: f64, gap: f64) -> Option<Vec<std::ops::Range<usize>>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > same {
            if i < vals.len() && vals[i] - vals[i - 1] < gap {
                return None;
            }
            out.push(start..i);
            start = i;
        }
    }
    Some(out)
}

/// The isometric factor `m (m*m)^{-1/2}` of the polar decomposition of a
/// square or tall `m`, with the smallest singular value. Both come from the
/// Hermitian eigenproblem of `m*m`, which is more reliable here than the
/// complex SVD.
pub fn polar_unitary(m: &CMat) -> (CMat, f64) {
    let (vals, v) = hermitian_eigen(&(m.adjoint() * m));
    let smin = vals.first().map_or(0.0, |&x| x.max(0.0).sqrt());
    let inv_sqrt: Vec<Complex64> = vals.iter().map(|&x| c(if x > 0.0 { 1.0 / x.sqrt() } else { 0.0 }, 0.0)).collect();
    let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(inv_sqrt));
    (m * (&v * d * v.adjoint()), smin)
}

/// Orthonormal basis of the column space, dropping singular values below
/// `tol`.
pub fn range_basis(m: &CMat, tol: f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(&(m * m.adjoint()));
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > tol * tol).collect();
    let mut out = CMat::zeros(m.nrows(), keep.len());
    for (k, &i) in keep.iter().rev().enumerate() {
        out.set_column(k, &vecs.column(i));
    }
    out
}

pub fn columns(m: &CMat, range: std::ops::Range<usize>) -> CMat {
    m.columns(range.start, range.len()).into_owned()
}

pub fn is_unitary(m: &CMat, tol: f64) -> bool {
    m.is_square() && dist(&(m * m.adjoint()), &identity(m.nrows())) <= tol
}

/// Rounds a float matrix entry to `digits` decimal digits, producing a value
/// safe for byte-stable printing.
pub fn round_to(x: f64, scale: f64) -> f64 {
    let r = (x * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}
