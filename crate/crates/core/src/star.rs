//! Matrices over `F ∪ {★}`: each one stands for the family of field matrices
//! obtained by substituting arbitrary field values for the ★ entries.
//!
//! Arithmetic follows the ★ tables: anything plus ★ is ★, zero times anything
//! (★ included) is zero, a nonzero element times ★ is ★. Integer matrices act on
//! families after collapsing every nonzero integer to `1`.

use std::fmt;
use std::ops::{Add, Mul};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Field, FieldMatrix};

/// One entry of a matrix family.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum StarEntry<F> {
    Fixed(F),
    Star,
}

impl<F: Field> StarEntry<F> {
    pub fn zero() -> Self {
        StarEntry::Fixed(F::zero())
    }

    pub fn one() -> Self {
        StarEntry::Fixed(F::one())
    }

    pub fn is_star(self) -> bool {
        matches!(self, StarEntry::Star)
    }

    pub fn is_zero(self) -> bool {
        matches!(self, StarEntry::Fixed(v) if v.is_zero())
    }
}

impl<F: Field> Add for StarEntry<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (StarEntry::Fixed(a), StarEntry::Fixed(b)) => StarEntry::Fixed(a + b),
            _ => StarEntry::Star,
        }
    }
}

impl<F: Field> Mul for StarEntry<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        match (self, rhs) {
            (StarEntry::Fixed(a), StarEntry::Fixed(b)) => StarEntry::Fixed(a * b),
            (a, b) if a.is_zero() || b.is_zero() => Self::zero(),
            _ => StarEntry::Star,
        }
    }
}

/// `a + b` under the ★ addition table.
pub fn star_add<F: Field>(a: StarEntry<F>, b: StarEntry<F>) -> StarEntry<F> {
    a + b
}

/// `a · b` under the ★ multiplication table.
pub fn star_mul<F: Field>(a: StarEntry<F>, b: StarEntry<F>) -> StarEntry<F> {
    a * b
}

/// Matrix over `F ∪ {★}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StarMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<StarEntry<F>>,
}

impl<F: fmt::Debug> fmt::Debug for StarMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StarMatrix{}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                match &self.data[r * self.cols + c] {
                    StarEntry::Star => write!(f, "*")?,
                    StarEntry::Fixed(v) => write!(f, "{v:?}")?,
                }
            }
        }
        write!(f, "]")
    }
}

impl<F: Field> StarMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        StarMatrix {
            rows,
            cols,
            data: vec![StarEntry::zero(); rows * cols],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<StarEntry<F>>>) -> Result<Self> {
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
        Ok(StarMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Parses `"* 0 0; 0 0 *"`: rows split on `;`, entries on whitespace, `*` is ★.
    pub fn parse(s: &str) -> Result<Self> {
        let rows: Vec<Vec<StarEntry<F>>> = s
            .split(';')
            .map(|r| {
                r.split_whitespace()
                    .map(|t| match t {
                        "*" => Ok(StarEntry::Star),
                        v => v
                            .parse::<u64>()
                            .map(|v| StarEntry::Fixed(F::from_u64(v)))
                            .map_err(|_| Error::InvalidInstance(format!("bad entry {t:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(cols, rows)
    }

    /// A `rows × cols` zero-fixed pattern with ★ where `is_star` holds.
    pub fn from_pattern(rows: usize, cols: usize, mut is_star: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if is_star(r, c) {
                    m.data[r * cols + c] = StarEntry::Star;
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> StarEntry<F> {
        self.data[r * self.cols + c]
    }

    /// Column indices of the ★ entries of row `r`.
    pub fn star_columns(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.get(r, c).is_star()).collect()
    }

    pub fn star_count(&self) -> usize {
        self.data.iter().filter(|e| e.is_star()).count()
    }

    /// Every fixed entry is zero.
    pub fn is_zero_fixed(&self) -> bool {
        self.data.iter().all(|e| e.is_star() || e.is_zero())
    }

    /// Whether every ★ of `self` is also a ★ of `other`.
    pub fn stars_subset_of(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| !a.is_star() || b.is_star())
    }

    /// Row `r` as a `1 × cols` family.
    pub fn row_matrix(&self, r: usize) -> Self {
        StarMatrix {
            rows: 1,
            cols: self.cols,
            data: self.data[r * self.cols..(r + 1) * self.cols].to_vec(),
        }
    }

    /// Kronecker product, entries combined with the ★ multiplication.
    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = Vec::with_capacity(rows * cols);
        for ar in 0..self.rows {
            for br in 0..other.rows {
                for ac in 0..self.cols {
                    let a = self.get(ar, ac);
                    for bc in 0..other.cols {
                        data.push(a * other.get(br, bc));
                    }
                }
            }
        }
        StarMatrix { rows, cols, data }
    }

    /// `self ⊗ 1_n`: every row repeated `n` times.
    pub fn repeat_rows(&self, n: usize) -> Self {
        self.tensor(&StarMatrix {
            rows: n,
            cols: 1,
            data: vec![StarEntry::one(); n],
        })
    }

    /// Whether the field matrix `m` belongs to the family.
    pub fn member(&self, m: &FieldMatrix<F>) -> Result<bool> {
        if m.rows() != self.rows || m.cols() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: m.rows() * m.cols(),
            });
        }
        Ok((0..self.rows).all(|r| {
            (0..self.cols).all(|c| match self.get(r, c) {
                StarEntry::Star => true,
                StarEntry::Fixed(v) => v == m.get(r, c),
            })
        }))
    }

    /// Member of the family with every ★ drawn uniformly from the field.
    pub fn sample(&self, seed: u64) -> FieldMatrix<F> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| match self.get(r, c) {
                        StarEntry::Fixed(v) => v,
                        StarEntry::Star => F::from_u64(rng.gen_range(0..F::ORDER as u64)),
                    })
                    .collect()
            })
            .collect();
        FieldMatrix::from_rows(self.cols, rows).expect("shape preserved")
    }

    /// Greedy canonical completion: scanning rows top-down, each row takes the
    /// unit vector of its smallest ★ column not already used by an earlier row;
    /// rows left without a fresh ★ column become zero.
    pub fn gamma(&self) -> FieldMatrix<F> {
        let mut used = vec![false; self.cols];
        let mut rows = Vec::with_capacity(self.rows);
        for r in 0..self.rows {
            let mut row = vec![F::zero(); self.cols];
            if let Some(c) = (0..self.cols).find(|&c| !used[c] && self.get(r, c).is_star()) {
                used[c] = true;
                row[c] = F::one();
            }
            rows.push(row);
        }
        FieldMatrix::from_rows(self.cols, rows).expect("shape preserved")
    }

    /// Maximum rank over all members of a zero-fixed family.
    ///
    /// Equal to the term rank of the ★ pattern: a maximum matching of rows to
    /// ★ columns yields a permutation submatrix of ones, and no completion can
    /// beat the term rank.
    pub fn maxrank(&self) -> Result<usize> {
        if !self.is_zero_fixed() {
            return Err(Error::NonZeroFixed);
        }
        let adj: Vec<Vec<usize>> = (0..self.rows).map(|r| self.star_columns(r)).collect();
        Ok(max_bipartite_matching(&adj, self.cols).len())
    }
}

/// Kuhn's augmenting-path matching. `adj[u]` lists right vertices of left vertex `u`.
/// Returns matched `(left, right)` pairs sorted by left vertex.
pub fn max_bipartite_matching(adj: &[Vec<usize>], right: usize) -> Vec<(usize, usize)> {
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
                owner[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; right];
    for u in 0..adj.len() {
        let mut seen = vec![false; right];
        augment(u, adj, &mut seen, &mut owner);
    }
    let mut pairs: Vec<(usize, usize)> = owner
        .iter()
        .enumerate()
        .filter_map(|(v, o)| o.map(|u| (u, v)))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Matrix of nonnegative integers (adjacency matrices and their powers).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1; n])
    }

    /// All-ones `rows × cols`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![1; rows * cols],
        }
    }

    pub fn diag(v: &[u64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in v.iter().enumerate() {
            m.data[i * n + i] = x;
        }
        m
    }

    pub fn from_rows(rows: &[&[u64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::new();
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn all_positive(&self) -> bool {
        self.data.iter().all(|&v| v > 0)
    }

    /// Ordinary product with saturating arithmetic.
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
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx].saturating_add(a.saturating_mul(rhs.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    /// Every nonzero entry replaced by 1.
    pub fn support(&self) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| u64::from(v != 0)).collect(),
        }
    }

    /// `self^e` collapsed to 0/1 after every step; only positivity is tracked.
    pub fn boolean_pow(&self, e: usize) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let base = self.support();
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(&base)?.support();
        }
        Ok(acc)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = Vec::with_capacity(rows * cols);
        for ar in 0..self.rows {
            for br in 0..other.rows {
                for ac in 0..self.cols {
                    let a = self.get(ar, ac);
                    for bc in 0..other.cols {
                        data.push(a.saturating_mul(other.get(br, bc)));
                    }
                }
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// `self · family`, each nonzero integer acting as the field element 1.
    pub fn mul_star<F: Field>(&self, a: &StarMatrix<F>) -> Result<StarMatrix<F>> {
        int_mul_star(self, a)
    }
}

/// Product of an integer matrix with a family; nonzero integers become `1`.
pub fn int_mul_star<F: Field>(b: &IntMatrix, a: &StarMatrix<F>) -> Result<StarMatrix<F>> {
    if b.cols != a.rows {
        return Err(Error::DimensionMismatch {
            expected: b.cols,
            found: a.rows,
        });
    }
    let mut out = StarMatrix::zeros(b.rows, a.cols);
    for i in 0..b.rows {
        for j in 0..a.cols {
            let mut acc = StarEntry::zero();
            for k in 0..b.cols {
                let coef = if b.get(i, k) == 0 {
                    StarEntry::zero()
                } else {
                    StarEntry::Fixed(F::one())
                };
                acc = acc + coef * a.get(k, j);
            }
            out.data[i * a.cols + j] = acc;
        }
    }
    Ok(out)
}
