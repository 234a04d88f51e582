//! Dense integer matrices and the Smith normal form.
//!
//! One elimination routine serves two regimes: exact arithmetic over `Z`,
//! and arithmetic over `Z/m` (equivalently: over `Z` with the generators
//! `m e_i` adjoined, which is how congruence systems are handled). In the
//! modular regime entries are kept in the balanced range `(-m/2, m/2]` and
//! the output is diagonal but not necessarily a divisibility chain; the
//! invariants are then `gcd(d_i, m)`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i128>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{:?}", self.to_rows())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.concat() }
    }

    /// Builds a matrix with `cols` columns from a flat row-major buffer.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<i128>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i128>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `v * self` for a row vector `v`.
    pub fn vec_mul(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(self.rows, v.len());
        let mut out = vec![0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += vi * a;
            }
        }
        out
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// True when every row and every column holds exactly one entry `1` and
    /// zeros elsewhere.
    pub fn is_permutation(&self) -> bool {
        if self.rows != self.cols || self.data.iter().any(|&x| x != 0 && x != 1) {
            return false;
        }
        (0..self.rows).all(|i| self.row(i).iter().sum::<i128>() == 1)
            && (0..self.cols).all(|j| self.column(j).iter().sum::<i128>() == 1)
    }

    /// Places `block` with its top-left corner at `(r, c)`.
    pub fn set_block(&mut self, r: usize, c: usize, block: &IntMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r + i, c + j, block.get(i, j));
            }
        }
    }

    pub fn block(&self, r: usize, c: usize, rows: usize, cols: usize) -> IntMatrix {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r + i, c + j));
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

/// Reduction to the representative of `x mod m` in `(-m/2, m/2]`.
#[inline]
pub fn balanced_mod(x: i128, m: i128) -> i128 {
    let r = x.rem_euclid(m);
    if 2 * r > m {
        r - m
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SmithOptions {
    /// Work over `Z/m` instead of `Z`.
    pub modulus: Option<i128>,
    pub track_left: bool,
    pub track_right: bool,
}

/// `left * a * right = diag(diagonal)` (modulo `modulus` when set), with
/// `left`, `right` invertible and their inverses recorded alongside.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<i128>,
    pub modulus: Option<i128>,
    pub left: Option<IntMatrix>,
    pub left_inv: Option<IntMatrix>,
    pub right: Option<IntMatrix>,
    pub right_inv: Option<IntMatrix>,
}

impl SmithForm {
    /// Diagonal entry `i`, zero past the end of the diagonal.
    pub fn diag(&self, i: usize) -> i128 {
        self.diagonal.get(i).copied().unwrap_or(0)
    }

    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|&&d| d != 0).count()
    }
}

struct Elimination {
    m: IntMatrix,
    modulus: Option<i128>,
    left: Option<IntMatrix>,
    left_inv: Option<IntMatrix>,
    right: Option<IntMatrix>,
    right_inv: Option<IntMatrix>,
}

impl Elimination {
    #[inline]
    fn reduce(&self, x: i128) -> i128 {
        match self.modulus {
            Some(m) => balanced_mod(x, m),
            None => x,
        }
    }

    #[inline]
    fn axpy(&self, x: i128, q: i128, y: i128) -> i128 {
        // x - q*y, checked in the exact regime
        match self.modulus {
            Some(m) => balanced_mod(x - balanced_mod(q, m) * y, m),
            None => q
                .checked_mul(y)
                .and_then(|p| x.checked_sub(p))
                .expect("integer overflow in Smith normal form"),
        }
    }

    /// row_i -= q * row_t
    fn row_sub(&mut self, i: usize, t: usize, q: i128) {
        let cols = self.m.cols;
        for j in 0..cols {
            let y = self.m.data[t * cols + j];
            if y != 0 {
                self.m.data[i * cols + j] = self.axpy(self.m.data[i * cols + j], q, y);
            }
        }
        if let Some(mut l) = self.left.take() {
            let n = l.cols;
            for j in 0..n {
                let y = l.data[t * n + j];
                if y != 0 {
                    l.data[i * n + j] = self.axpy(l.data[i * n + j], q, y);
                }
            }
            self.left = Some(l);
        }
        if let Some(mut li) = self.left_inv.take() {
            // col_t += q * col_i
            let n = li.cols;
            for r in 0..li.rows {
                let y = li.data[r * n + i];
                if y != 0 {
                    li.data[r * n + t] = self.axpy(li.data[r * n + t], -q, y);
                }
            }
            self.left_inv = Some(li);
        }
    }

    /// col_j -= q * col_t
    fn col_sub(&mut self, j: usize, t: usize, q: i128) {
        let cols = self.m.cols;
        for r in 0..self.m.rows {
            let y = self.m.data[r * cols + t];
            if y != 0 {
                self.m.data[r * cols + j] = self.axpy(self.m.data[r * cols + j], q, y);
            }
        }
        if let Some(mut rt) = self.right.take() {
            let n = rt.cols;
            for r in 0..rt.rows {
                let y = rt.data[r * n + t];
                if y != 0 {
                    rt.data[r * n + j] = self.axpy(rt.data[r * n + j], q, y);
                }
            }
            self.right = Some(rt);
        }
        if let Some(mut ri) = self.right_inv.take() {
            // row_t += q * row_j
            let n = ri.cols;
            for c in 0..n {
                let y = ri.data[j * n + c];
                if y != 0 {
                    ri.data[t * n + c] = self.axpy(ri.data[t * n + c], -q, y);
                }
            }
            self.right_inv = Some(ri);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.m.swap_rows(a, b);
        if let Some(l) = self.left.as_mut() {
            l.swap_rows(a, b);
        }
        if let Some(li) = self.left_inv.as_mut() {
            li.swap_cols(a, b);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.m.swap_cols(a, b);
        if let Some(r) = self.right.as_mut() {
            r.swap_cols(a, b);
        }
        if let Some(ri) = self.right_inv.as_mut() {
            ri.swap_rows(a, b);
        }
    }

    fn negate_row(&mut self, t: usize) {
        let cols = self.m.cols;
        for j in 0..cols {
            self.m.data[t * cols + j] = -self.m.data[t * cols + j];
        }
        if let Some(l) = self.left.as_mut() {
            let n = l.cols;
            for j in 0..n {
                l.data[t * n + j] = -l.data[t * n + j];
            }
        }
        if let Some(li) = self.left_inv.as_mut() {
            let n = li.cols;
            for r in 0..li.rows {
                li.data[r * n + t] = -li.data[r * n + t];
            }
        }
    }

    fn smallest_in(&self, t: usize) -> Option<(usize, usize)> {
        let (r, c) = (self.m.rows, self.m.cols);
        let mut best: Option<(i128, usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                let x = self.m.get(i, j).abs();
                if x != 0 && best.is_none_or(|(b, _, _)| x < b) {
                    best = Some((x, i, j));
                    if x == 1 {
                        return Some((i, j));
                    }
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    /// Smallest nonzero entry in row t / column t other than the pivot.
    fn smallest_on_cross(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(i128, usize, usize)> = None;
        for i in t + 1..self.m.rows {
            let x = self.m.get(i, t).abs();
            if x != 0 && best.is_none_or(|(b, _, _)| x < b) {
                best = Some((x, i, t));
            }
        }
        for j in t + 1..self.m.cols {
            let x = self.m.get(t, j).abs();
            if x != 0 && best.is_none_or(|(b, _, _)| x < b) {
                best = Some((x, t, j));
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn run(&mut self) -> Vec<i128> {
        let (rows, cols) = (self.m.rows, self.m.cols);
        let steps = rows.min(cols);
        let mut diagonal = Vec::with_capacity(steps);
        for t in 0..steps {
            let Some((pi, pj)) = self.smallest_in(t) else {
                diagonal.resize(steps, 0);
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let p = self.m.get(t, t);
                for i in t + 1..rows {
                    let x = self.m.get(i, t);
                    if x != 0 {
                        self.row_sub(i, t, x / p);
                    }
                }
                for j in t + 1..cols {
                    let x = self.m.get(t, j);
                    if x != 0 {
                        self.col_sub(j, t, x / p);
                    }
                }
                if let Some((i, j)) = self.smallest_on_cross(t) {
                    // a remainder smaller than the pivot survived
                    if i != t {
                        self.swap_rows(t, i);
                    } else {
                        self.swap_cols(t, j);
                    }
                    continue;
                }
                if self.modulus.is_none() {
                    let bad = (t + 1..rows)
                        .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                        .find(|&(i, j)| self.m.get(i, j) % p != 0);
                    if let Some((i, _)) = bad {
                        // row_t += row_i, then re-eliminate
                        self.row_sub(t, i, -1);
                        continue;
                    }
                }
                break;
            }
            if self.modulus.is_none() && self.m.get(t, t) < 0 {
                self.negate_row(t);
            }
            diagonal.push(self.reduce(self.m.get(t, t)));
        }
        diagonal
    }
}

pub fn smith_normal_form(a: &IntMatrix, opts: SmithOptions) -> SmithForm {
    let mut m = a.clone();
    if let Some(md) = opts.modulus {
        assert!(md >= 1, "modulus must be positive");
        for x in &mut m.data {
            *x = balanced_mod(*x, md);
        }
    }
    let mut e = Elimination {
        left: opts.track_left.then(|| IntMatrix::identity(a.rows)),
        left_inv: opts.track_left.then(|| IntMatrix::identity(a.rows)),
        right: opts.track_right.then(|| IntMatrix::identity(a.cols)),
        right_inv: opts.track_right.then(|| IntMatrix::identity(a.cols)),
        m,
        modulus: opts.modulus,
    };
    let diagonal = e.run();
    SmithForm {
        diagonal,
        modulus: opts.modulus,
        left: e.left,
        left_inv: e.left_inv,
        right: e.right,
        right_inv: e.right_inv,
    }
}

/// The solution set `{x in (Z/m)^c : A x ≡ 0 (mod m)}` as a direct sum of
/// cyclic groups, with the data needed to express a kernel element in the
/// generators.
#[derive(Clone, Debug)]
pub struct ModKernel {
    pub modulus: i128,
    /// Generator vectors, entries in `[0, m)`.
    pub generators: Vec<Vec<i128>>,
    /// Order of each generator.
    pub orders: Vec<i128>,
    positions: Vec<usize>,
    scales: Vec<i128>,
    right_inv: IntMatrix,
}

impl ModKernel {
    /// Coordinates of a kernel element in the generators, or `None` when
    /// `x` is not in the kernel.
    pub fn coordinates(&self, x: &[i128]) -> Option<Vec<i128>> {
        let y: Vec<i128> = self
            .right_inv
            .mul_vec(x)
            .into_iter()
            .map(|v| v.rem_euclid(self.modulus))
            .collect();
        let mut coords = Vec::with_capacity(self.positions.len());
        for (&p, &s) in self.positions.iter().zip(&self.scales) {
            if y[p] % s != 0 {
                return None;
            }
            coords.push(y[p] / s);
        }
        // every other y-coordinate must vanish
        let used: std::collections::HashSet<usize> = self.positions.iter().copied().collect();
        if y.iter().enumerate().any(|(i, &v)| v != 0 && !used.contains(&i)) {
            return None;
        }
        Some(coords)
    }
}

pub fn kernel_mod(a: &IntMatrix, m: i128) -> ModKernel {
    let snf = smith_normal_form(
        a,
        SmithOptions { modulus: Some(m), track_left: false, track_right: true },
    );
    let right = snf.right.clone().expect("tracked");
    let right_inv = snf.right_inv.clone().expect("tracked");
    let mut generators = Vec::new();
    let mut orders = Vec::new();
    let mut positions = Vec::new();
    let mut scales = Vec::new();
    for i in 0..a.cols() {
        let d = if i < a.rows() { snf.diag(i) } else { 0 };
        let order = d.gcd(&m);
        if order == 1 {
            continue;
        }
        let scale = m / order;
        let g: Vec<i128> = right.column(i).iter().map(|&v| (v * scale).rem_euclid(m)).collect();
        generators.push(g);
        orders.push(order);
        positions.push(i);
        scales.push(scale);
    }
    ModKernel { modulus: m, generators, orders, positions, scales, right_inv }
}

/// Solves `A x ≡ b (mod k)` given an exact Smith form of `A` with both
/// transforms tracked. Returns the solution with free coordinates set to 0.
pub fn solve_mod(snf: &SmithForm, b: &[i128], k: i128) -> Option<Vec<i128>> {
    let left = snf.left.as_ref().expect("left transform required");
    let right = snf.right.as_ref().expect("right transform required");
    let ub: Vec<i128> = left.mul_vec(b).into_iter().map(|v| v.rem_euclid(k)).collect();
    let cols = right.rows();
    let mut y = vec![0i128; cols];
    for (i, &u) in ub.iter().enumerate() {
        let d = if i < cols { snf.diag(i) } else { 0 };
        let g = d.gcd(&k);
        if u % g != 0 {
            return None;
        }
        if i < cols && d != 0 {
            let kk = k / g;
            let inv = mod_inverse((d / g).rem_euclid(kk), kk)?;
            y[i] = ((u / g) * inv).rem_euclid(kk);
        }
    }
    Some(right.mul_vec(&y).into_iter().map(|v| v.rem_euclid(k)).collect())
}

pub fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let e = a.extended_gcd(&m);
    (e.gcd == 1).then(|| e.x.rem_euclid(m))
}

/// Rank over `Q`, by fraction-free elimination in big integers.
pub fn rank_over_q(a: &IntMatrix) -> usize {
    let mut m: Vec<Vec<BigInt>> = a
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let (rows, cols) = (a.rows(), a.cols());
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&m[rank][c] * &m[r][j] - &m[r][c] * &m[rank][j]) / &prev;
                m[r][j] = v;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[rank][c].abs();
        if prev.is_zero() {
            prev = BigInt::from(1);
        }
        rank += 1;
    }
    rank
}

/// Exact matrix power, in big integers, reduced to `i128` entries where they
/// fit; used only for rank computations of small matrices.
pub fn rank_of_power(a: &IntMatrix, k: u32) -> usize {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let to_big = |m: &IntMatrix| -> Vec<Vec<BigInt>> {
        m.to_rows().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()
    };
    let base = to_big(a);
    let mut acc = to_big(&IntMatrix::identity(n));
    for _ in 0..k {
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if acc[i][l].is_zero() {
                    continue;
                }
                for j in 0..n {
                    next[i][j] += &acc[i][l] * &base[l][j];
                }
            }
        }
        acc = next;
    }
    rank_big(acc)
}

fn rank_big(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..rows {
            if m[r][c].is_zero() {
                continue;
            }
            let (a, b) = (m[rank][c].clone(), m[r][c].clone());
            for j in c..cols {
                let v = &a * &m[r][j] - &b * &m[rank][j];
                m[r][j] = v;
            }
            let g = m[r].iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !g.is_zero() && g != BigInt::from(1) {
                for x in m[r].iter_mut() {
                    *x = &*x / &g;
                }
            }
        }
        rank += 1;
    }
    rank
}
