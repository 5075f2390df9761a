//! Prime fields and dense linear algebra over them.
//!
//! All matrix routines are generic over [`Field`]; the concrete prime fields
//! are the const-generic [`Fp`] type, aliased at the crate root (`Gf2`, `Gf3`, ...).
//! Row reduction always picks the lowest-index pivot, so the reduced row-echelon
//! form returned by [`FieldMatrix::rref`] is the canonical representative of a
//! row space.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite field of prime order.
pub trait Field:
    Copy
    + Eq
    + Ord
    + Hash
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Number of elements `q`.
    const ORDER: u32;

    /// Reduces an integer into the field.
    fn from_u64(v: u64) -> Self;

    /// Canonical representative in `[0, q)`.
    fn value(self) -> u32;

    /// Multiplicative inverse, `None` for zero.
    fn inv(self) -> Option<Self>;

    /// All field elements in ascending order of their representative.
    fn elements() -> Vec<Self> {
        (0..Self::ORDER as u64).map(Self::from_u64).collect()
    }
}

const fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of GF(P), P prime.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fp<const P: u32>(u32);

impl<const P: u32> Fp<P> {
    const PRIME: () = assert!(is_prime(P), "Fp modulus must be prime");

    pub fn new(v: u32) -> Self {
        #[allow(clippy::let_unit_value)]
        let _ = Self::PRIME;
        Fp(v % P)
    }

    fn pow(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl<const P: u32> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Fp(((self.0 as u64 + rhs.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Fp(((self.0 as u64 + P as u64 - rhs.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Fp(((self.0 as u64 * rhs.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u32> Zero for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u32> One for Fp<P> {
    fn one() -> Self {
        Fp(1 % P)
    }
}

impl<const P: u32> Field for Fp<P> {
    const ORDER: u32 = P;

    fn from_u64(v: u64) -> Self {
        Self::new((v % P as u64) as u32)
    }

    fn value(self) -> u32 {
        self.0
    }

    fn inv(self) -> Option<Self> {
        // Fermat: a^(p-2)
        (!self.is_zero()).then(|| self.pow(P - 2))
    }
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: fmt::Debug> fmt::Debug for FieldMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldMatrix{}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for (c, v) in self.data[r * self.cols..(r + 1) * self.cols].iter().enumerate() {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v:?}")?;
            }
        }
        write!(f, "]")
    }
}

/// Serialized as its integer value.
impl<const P: u32> Serialize for Fp<P> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

/// Serialized as a list of rows.
impl<F: Serialize> Serialize for FieldMatrix<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for r in 0..self.rows {
            seq.serialize_element(&self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        seq.end()
    }
}

impl<F: Field> FieldMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        m
    }

    /// Empty matrix (no rows) with a declared column count.
    pub fn empty(cols: usize) -> Self {
        Self::zeros(0, cols)
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<F>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(FieldMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from integer rows, reducing every entry mod q.
    pub fn from_u64_rows(cols: usize, rows: &[&[u64]]) -> Result<Self> {
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| F::from_u64(v)).collect())
                .collect(),
        )
    }

    /// Unit vector `e_i` (0-based) of length `n`.
    pub fn unit(n: usize, i: usize) -> Vec<F> {
        let mut v = vec![F::zero(); n];
        v[i] = F::one();
        v
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> F {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[F]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        self.row_iter().map(<[F]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx] + a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `c · M`.
    pub fn left_mul_vec(&self, c: &[F]) -> Result<Vec<F>> {
        if c.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: c.len(),
            });
        }
        let mut out = vec![F::zero(); self.cols];
        for (r, &coef) in c.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(r)) {
                *o = *o + coef * m;
            }
        }
        Ok(out)
    }

    /// Vertical concatenation. `cols` is the declared width, needed when `blocks` is empty.
    pub fn stack<'a, I>(cols: usize, blocks: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a FieldMatrix<F>>,
    {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: b.cols,
                });
            }
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(FieldMatrix { rows, cols, data })
    }

    /// Appends one row, returning a new matrix.
    pub fn with_row(&self, row: &[F]) -> Result<Self> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: row.len(),
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(row);
        Ok(FieldMatrix {
            rows: self.rows + 1,
            cols: self.cols,
            data,
        })
    }

    /// Reduced row-echelon form (zero rows dropped) and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let (m, pivots, _) = self.reduce(false);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Canonical basis of the row space (RREF without zero rows).
    pub fn row_space_basis(&self) -> Self {
        self.rref().0
    }

    /// Forward elimination with lowest-index pivot, then back substitution.
    /// When `track` is set, also returns for each surviving row the combination of
    /// original rows producing it.
    fn reduce(&self, track: bool) -> (Self, Vec<usize>, Vec<Vec<F>>) {
        let mut m = self.data.clone();
        let cols = self.cols;
        let mut comb: Vec<Vec<F>> = if track {
            (0..self.rows).map(|i| Self::unit(self.rows, i)).collect()
        } else {
            Vec::new()
        };
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..cols {
            if prow == self.rows {
                break;
            }
            let Some(sel) = (prow..self.rows).find(|&r| !m[r * cols + c].is_zero()) else {
                continue;
            };
            if sel != prow {
                for j in 0..cols {
                    m.swap(sel * cols + j, prow * cols + j);
                }
                if track {
                    comb.swap(sel, prow);
                }
            }
            let inv = m[prow * cols + c].inv().expect("nonzero pivot");
            for j in 0..cols {
                m[prow * cols + j] = m[prow * cols + j] * inv;
            }
            if track {
                for v in comb[prow].iter_mut() {
                    *v = *v * inv;
                }
            }
            for r in 0..self.rows {
                if r == prow {
                    continue;
                }
                let f = m[r * cols + c];
                if f.is_zero() {
                    continue;
                }
                for j in 0..cols {
                    m[r * cols + j] = m[r * cols + j] - f * m[prow * cols + j];
                }
                if track {
                    let (src, dst) = if r < prow {
                        let (a, b) = comb.split_at_mut(prow);
                        (&b[0], &mut a[r])
                    } else {
                        let (a, b) = comb.split_at_mut(r);
                        (&a[prow], &mut b[0])
                    };
                    for (d, &s) in dst.iter_mut().zip(src.iter()) {
                        *d = *d - f * s;
                    }
                }
            }
            pivots.push(c);
            prow += 1;
        }
        m.truncate(prow * cols);
        comb.truncate(prow);
        (
            FieldMatrix {
                rows: prow,
                cols,
                data: m,
            },
            pivots,
            comb,
        )
    }

    /// Finds `c` with `c · self = v`, or `None` when `v` is outside the row space.
    ///
    /// Free coefficients are set to zero, so the answer is deterministic.
    pub fn solve_in_row_space(&self, v: &[F]) -> Result<Option<Vec<F>>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let (red, pivots, comb) = self.reduce(true);
        let mut rem = v.to_vec();
        let mut coeffs = vec![F::zero(); self.rows];
        for (i, &p) in pivots.iter().enumerate() {
            let f = rem[p];
            if f.is_zero() {
                continue;
            }
            for (x, &y) in rem.iter_mut().zip(red.row(i)) {
                *x = *x - f * y;
            }
            for (c, &w) in coeffs.iter_mut().zip(&comb[i]) {
                *c = *c + f * w;
            }
        }
        if rem.iter().any(|x| !x.is_zero()) {
            return Ok(None);
        }
        debug_assert_eq!(self.left_mul_vec(&coeffs).ok().as_deref(), Some(v));
        Ok(Some(coeffs))
    }

    /// Whether `v` lies in the row space.
    pub fn spans(&self, v: &[F]) -> bool {
        let (red, pivots) = self.rref();
        let mut rem = v.to_vec();
        for (i, &p) in pivots.iter().enumerate() {
            let f = rem[p];
            if f.is_zero() {
                continue;
            }
            for (x, &y) in rem.iter_mut().zip(red.row(i)) {
                *x = *x - f * y;
            }
        }
        rem.iter().all(Zero::is_zero)
    }

    /// Columns holding a nonzero entry in some row.
    pub fn support(&self) -> Vec<usize> {
        (0..self.cols)
            .filter(|&c| (0..self.rows).any(|r| !self.get(r, c).is_zero()))
            .collect()
    }

    /// Embeds a matrix over `positions.len()` columns into `cols` columns.
    pub fn embed_columns(&self, cols: usize, positions: &[usize]) -> Self {
        assert_eq!(positions.len(), self.cols);
        let mut out = Self::zeros(self.rows, cols);
        for r in 0..self.rows {
            for (c, &p) in positions.iter().enumerate() {
                out.data[r * cols + p] = self.get(r, c);
            }
        }
        out
    }

    /// Integer representatives, row-major.
    pub fn to_values(&self) -> Vec<Vec<u32>> {
        self.row_iter()
            .map(|r| r.iter().map(|v| v.value()).collect())
            .collect()
    }
}

/// Number of subspaces of `GF(q)^dim` with dimension at most `max_rank`
/// (sum of Gaussian binomials), saturating at `u64::MAX`.
pub fn subspace_count(q: u32, dim: usize, max_rank: usize) -> u64 {
    let q = q as u128;
    let mut total: u128 = 0;
    for r in 0..=max_rank.min(dim) {
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for i in 0..r {
            num = num.saturating_mul(q.saturating_pow((dim - i) as u32).saturating_sub(1));
            den = den.saturating_mul(q.saturating_pow((i + 1) as u32).saturating_sub(1));
        }
        total = total.saturating_add(num / den.max(1));
    }
    total.min(u64::MAX as u128) as u64
}

/// All subspaces of `F^dim` of dimension at most `max_rank`, each given by its
/// RREF basis. Ordered by dimension, then lexicographically by basis entries.
pub fn enumerate_subspaces<F: Field>(dim: usize, max_rank: usize) -> Vec<FieldMatrix<F>> {
    let elems = F::elements();
    let mut out = Vec::new();
    for r in 0..=max_rank.min(dim) {
        let mut level = Vec::new();
        for pivots in combinations(dim, r) {
            // free slots: (row, col) right of the row's pivot and not a pivot column
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(t, &p)| {
                    ((p + 1)..dim)
                        .filter(|c| !pivots.contains(c))
                        .map(move |c| (t, c))
                })
                .collect();
            let mut digits = vec![0usize; free.len()];
            loop {
                let mut m = FieldMatrix::<F>::zeros(r, dim);
                for (t, &p) in pivots.iter().enumerate() {
                    m.data[t * dim + p] = F::one();
                }
                for (&(t, c), &d) in free.iter().zip(&digits) {
                    m.data[t * dim + c] = elems[d];
                }
                level.push(m);
                // odometer, last slot fastest
                let mut i = free.len();
                let exhausted = loop {
                    if i == 0 {
                        break true;
                    }
                    i -= 1;
                    digits[i] += 1;
                    if digits[i] < elems.len() {
                        break false;
                    }
                    digits[i] = 0;
                };
                if exhausted {
                    break;
                }
            }
        }
        level.sort_by(|a, b| a.data.cmp(&b.data));
        out.extend(level);
    }
    out
}

/// r-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < r - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type G2 = Fp<2>;
    type G5 = Fp<5>;

    fn m2(cols: usize, rows: &[&[u64]]) -> FieldMatrix<G2> {
        FieldMatrix::from_u64_rows(cols, rows).unwrap()
    }

    #[test]
    fn prime_field_arithmetic() {
        let a = G5::new(3);
        assert_eq!((a + G5::new(4)).value(), 2);
        assert_eq!((a * a.inv().unwrap()).value(), 1);
        assert_eq!((-a).value(), 2);
        assert!(G5::zero().inv().is_none());
        assert_eq!((G2::one() + G2::one()).value(), 0);
    }

    #[test]
    fn rank_basics() {
        assert_eq!(FieldMatrix::<G2>::identity(3).rank(), 3);
        assert_eq!(FieldMatrix::<G2>::zeros(2, 3).rank(), 0);
        // rows e1, e3, e4 followed by two zero rows
        let g = m2(
            5,
            &[
                &[1, 0, 0, 0, 0],
                &[0, 0, 1, 0, 0],
                &[0, 0, 0, 1, 0],
                &[0, 0, 0, 0, 0],
                &[0, 0, 0, 0, 0],
            ],
        );
        assert_eq!(g.rank(), 3);
    }

    #[test]
    fn rank_is_field_dependent() {
        // [[1,1],[1,-1]] is singular over GF(2) only
        let rows: &[&[u64]] = &[&[1, 1], &[1, 4]];
        assert_eq!(m2(2, &[&[1, 1], &[1, 1]]).rank(), 1);
        assert_eq!(FieldMatrix::<G5>::from_u64_rows(2, rows).unwrap().rank(), 2);
    }

    #[test]
    fn solve_examples() {
        let id = FieldMatrix::<G2>::identity(3);
        let e2 = FieldMatrix::<G2>::unit(3, 1);
        assert_eq!(id.solve_in_row_space(&e2).unwrap(), Some(e2.clone()));

        let m = m2(3, &[&[1, 1, 0], &[0, 1, 1]]);
        let v: Vec<G2> = [1, 0, 1].iter().map(|&x| G2::new(x)).collect();
        assert_eq!(
            m.solve_in_row_space(&v).unwrap(),
            Some(vec![G2::one(), G2::one()])
        );

        let m = m2(3, &[&[1, 0, 0]]);
        assert_eq!(m.solve_in_row_space(&e2).unwrap(), None);
        assert!(m.solve_in_row_space(&[G2::one()]).is_err());
    }

    #[test]
    fn stack_cases() {
        let s = FieldMatrix::stack(
            2,
            [&FieldMatrix::<G2>::identity(2), &FieldMatrix::zeros(2, 2)],
        )
        .unwrap();
        assert_eq!(s.rows(), 4);
        assert_eq!(s.row(0), FieldMatrix::<G2>::unit(2, 0).as_slice());
        assert_eq!(s.rank(), 2);

        let e = FieldMatrix::<G2>::stack(3, []).unwrap();
        assert_eq!((e.rows(), e.cols()), (0, 3));

        assert!(FieldMatrix::stack(2, [&FieldMatrix::<G2>::identity(3)]).is_err());
    }

    #[test]
    fn subspace_enumeration_matches_gaussian_binomials() {
        for dim in 0..=5 {
            let all = enumerate_subspaces::<G2>(dim, dim);
            assert_eq!(all.len() as u64, subspace_count(2, dim, dim), "dim {dim}");
            let mut seen = std::collections::HashSet::new();
            for s in &all {
                assert_eq!(s.rank(), s.rows());
                assert_eq!(&s.row_space_basis(), s);
                assert!(seen.insert(s.clone()));
            }
        }
        // GF(2)^5 has 374 subspaces; GF(3)^3 has 1 + 13 + 13 + 1
        assert_eq!(subspace_count(2, 5, 5), 374);
        assert_eq!(enumerate_subspaces::<Fp<3>>(3, 3).len(), 28);
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = FieldMatrix<G2>> {
        (1..=max, 1..=max).prop_flat_map(|(r, c)| {
            proptest::collection::vec(0u64..2, r * c).prop_map(move |v| {
                FieldMatrix::from_rows(c, v.chunks(c).map(|ch| ch.iter().map(|&x| G2::new(x as u32)).collect()).collect())
                    .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(m in arb_matrix(6)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
            prop_assert!(m.rank() <= m.rows().min(m.cols()));
        }

        #[test]
        fn solve_agrees_with_rank_predicate(m in arb_matrix(6), bits in proptest::collection::vec(0u32..2, 6)) {
            let v: Vec<G2> = bits[..m.cols()].iter().map(|&b| G2::new(b)).collect();
            let in_span = m.with_row(&v).unwrap().rank() == m.rank();
            match m.solve_in_row_space(&v).unwrap() {
                Some(c) => {
                    prop_assert!(in_span);
                    prop_assert_eq!(m.left_mul_vec(&c).unwrap(), v);
                }
                None => prop_assert!(!in_span),
            }
        }

        #[test]
        fn stack_rank_is_subadditive(a in proptest::collection::vec(0u32..2, 16), b in proptest::collection::vec(0u32..2, 16)) {
            let mk = |v: &[u32]| FieldMatrix::<G2>::from_rows(4, v.chunks(4).map(|c| c.iter().map(|&x| G2::new(x)).collect()).collect()).unwrap();
            let (a, b) = (mk(&a), mk(&b));
            let s = FieldMatrix::stack(4, [&a, &b]).unwrap();
            prop_assert!(s.rank() <= a.rank() + b.rank());
            prop_assert!(s.rank() >= a.rank().max(b.rank()));
        }
    }
}
