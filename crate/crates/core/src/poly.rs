//! Sparse multivariate polynomials over fading-variable identifiers, and
//! sparse matrices of them.
//!
//! Amplify-and-forward propagation with unit gains only ever produces
//! integer coefficients, so entries evaluate exactly over both the complex
//! numbers and prime fields.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Fading-variable identifier (the edge id of the owning network).
pub type Var = u32;

/// A monomial: sorted `(variable, exponent)` pairs, exponents >= 1.
/// The empty monomial is the constant 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Monomial(pub Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }
}

/// Sparse multivariate polynomial with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, i64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), 1);
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry += c;
        if *entry == 0 {
            // remove the key we just zeroed
            let key = self
                .terms
                .iter()
                .find(|(_, &v)| v == 0)
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in other.terms() {
            self.add_term(m.clone(), c);
        }
    }

    pub fn mul_var(&self, v: Var) -> Poly {
        let mv = Monomial::var(v);
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.mul(&mv), c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn has_constant_term(&self) -> bool {
        self.terms.contains_key(&Monomial::one())
    }

    pub fn collect_vars(&self, into: &mut BTreeSet<Var>) {
        for m in self.terms.keys() {
            into.extend(m.0.iter().map(|&(v, _)| v));
        }
    }

    pub fn eval_complex(&self, assignment: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in self.terms() {
            let mut t = Complex64::new(c as f64, 0.0);
            for &(v, e) in &m.0 {
                for _ in 0..e {
                    t *= assignment[v as usize];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_mod(&self, assignment: &[u64], p: u64) -> u64 {
        let mut acc: u64 = 0;
        for (m, c) in self.terms() {
            let mut t = c.rem_euclid(p as i64) as u64;
            for &(v, e) in &m.0 {
                for _ in 0..e {
                    t = mulmod(t, assignment[v as usize] % p, p);
                }
            }
            acc = addmod(acc, t, p);
        }
        acc
    }
}

pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

/// Sparse matrix of polynomials; absent entries are structural zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(u32, u32), Poly>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        assert!(r < self.rows && c < self.cols);
        if p.is_zero() {
            self.entries.remove(&(r as u32, c as u32));
        } else {
            self.entries.insert((r as u32, c as u32), p);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&Poly> {
        self.entries.get(&(r as u32, c as u32))
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Poly)> {
        self.entries
            .iter()
            .map(|(&(r, c), p)| (r as usize, c as usize, p))
    }

    pub fn num_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn identity_pattern(n: usize, var_of: impl Fn(usize) -> Var) -> Self {
        let mut m = PolyMatrix::new(n, n);
        for i in 0..n {
            m.set(i, i, Poly::var(var_of(i)));
        }
        m
    }

    pub fn collect_vars(&self, into: &mut BTreeSet<Var>) {
        for p in self.entries.values() {
            p.collect_vars(into);
        }
    }

    /// Upper bound on the total degree of any determinant-sized minor:
    /// the sum over rows of the largest entry degree in that row.
    pub fn det_degree_bound(&self) -> u32 {
        let mut row_max = vec![0u32; self.rows];
        for (r, _, p) in self.entries() {
            row_max[r] = row_max[r].max(p.total_degree());
        }
        row_max.iter().sum()
    }

    pub fn eval_complex(&self, assignment: &[Complex64]) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, p) in self.entries() {
            m[(r, c)] = p.eval_complex(assignment);
        }
        m
    }

    pub fn eval_mod(&self, assignment: &[u64], p: u64) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; self.cols]; self.rows];
        for (r, c, poly) in self.entries() {
            m[r][c] = poly.eval_mod(assignment, p);
        }
        m
    }

    /// Submatrix selected by row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> PolyMatrix {
        let mut m = PolyMatrix::new(rows.len(), cols.len());
        for (ri, &r) in rows.iter().enumerate() {
            for (ci, &c) in cols.iter().enumerate() {
                if let Some(p) = self.get(r, c) {
                    m.set(ri, ci, p.clone());
                }
            }
        }
        m
    }

    /// Symbolic determinant by cofactor expansion; intended for the small
    /// witness submatrices (a handful of rows).
    pub fn det_symbolic(&self) -> Poly {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        if n == 0 {
            return Poly::one();
        }
        let dense: Vec<Vec<Poly>> = (0..n)
            .map(|r| (0..n).map(|c| self.get(r, c).cloned().unwrap_or_default()).collect())
            .collect();
        det_rec(&dense, &(0..n).collect::<Vec<_>>(), 0)
    }

    pub fn to_json(&self) -> PolyMatrixJson {
        PolyMatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries()
                .map(|(r, c, p)| PolyEntryJson {
                    row: r,
                    col: c,
                    monomials: p
                        .terms()
                        .map(|(m, coeff)| MonomialJson {
                            coeff,
                            vars: m.0.clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

fn det_rec(m: &[Vec<Poly>], cols: &[usize], row: usize) -> Poly {
    if cols.is_empty() {
        return Poly::one();
    }
    let mut acc = Poly::zero();
    for (i, &c) in cols.iter().enumerate() {
        let e = &m[row][c];
        if e.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols
            .iter()
            .copied()
            .filter(|&x| x != c)
            .collect();
        let sub = det_rec(m, &rest, row + 1);
        let term = e.mul(&sub);
        if i % 2 == 0 {
            acc.add_assign(&term);
        } else {
            acc.add_assign(&term.neg());
        }
    }
    acc
}

/// Sparse serialization of a polynomial matrix.
#[derive(Debug, Clone, Serialize)]
pub struct PolyMatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<PolyEntryJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PolyEntryJson {
    pub row: usize,
    pub col: usize,
    pub monomials: Vec<MonomialJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonomialJson {
    pub coeff: i64,
    pub vars: Vec<(Var, u32)>,
}
