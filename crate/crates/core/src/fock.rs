//! Truncated bosonic Fock space over a discrete single-boson grid.
//!
//! Basis states are occupation multisets with at most `N_max` bosons, stored
//! as sorted mode lists and enumerated by boson number, then
//! lexicographically. Discrete creation and annihilation operators carry
//! `√w`, so `a*(f) = Σ_n √w_n f_n a*_n` and
//! `[a(f), a*(g)] = Σ_n w_n conj(f_n) g_n`.

use crate::error::{invalid, Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::io::{self, Write};

/// Default cap on the basis dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 2_000_000;

/// Occupation basis of `⊕_{n ≤ N_max} Sym^n(ℂ^B)`.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: usize,
    n_max: usize,
    states: Vec<Vec<u32>>,
    sector_start: Vec<usize>,
    index: HashMap<Vec<u32>, usize>,
}

/// Number of multisets of size `n` drawn from `b` modes, `C(b + n - 1, n)`.
pub fn multiset_count(b: usize, n: usize) -> Option<usize> {
    let mut c: usize = 1;
    for i in 0..n {
        c = c.checked_mul(b + i)? / (i + 1);
    }
    Some(c)
}

impl FockBasis {
    pub fn new(modes: usize, n_max: usize, cap: usize) -> Result<Self> {
        if modes == 0 || n_max == 0 {
            return Err(invalid("Fock basis needs at least one mode and N_max >= 1"));
        }
        let mut dim: usize = 0;
        for n in 0..=n_max {
            let c = multiset_count(modes, n).unwrap_or(usize::MAX);
            dim = dim.saturating_add(c);
        }
        if dim > cap {
            return Err(Error::DimensionCapExceeded { dim, cap });
        }
        let mut states = Vec::with_capacity(dim);
        let mut sector_start = Vec::with_capacity(n_max + 2);
        for n in 0..=n_max {
            sector_start.push(states.len());
            push_multisets(modes as u32, n, &mut Vec::with_capacity(n), 0, &mut states);
        }
        sector_start.push(states.len());
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(FockBasis {
            modes,
            n_max,
            states,
            sector_start,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Sorted mode list of basis state `i`.
    pub fn state(&self, i: usize) -> &[u32] {
        &self.states[i]
    }

    pub fn find(&self, modes: &[u32]) -> Option<usize> {
        self.index.get(modes).copied()
    }

    /// Index range of the `n`-boson sector.
    pub fn sector(&self, n: usize) -> std::ops::Range<usize> {
        self.sector_start[n]..self.sector_start[n + 1]
    }

    pub fn boson_number(&self, i: usize) -> usize {
        self.states[i].len()
    }

    /// Occupation of mode `m` in state `i`.
    pub fn occupation(&self, i: usize, m: u32) -> usize {
        self.states[i].iter().filter(|&&x| x == m).count()
    }
}

fn push_multisets(b: u32, n: usize, cur: &mut Vec<u32>, from: u32, out: &mut Vec<Vec<u32>>) {
    if cur.len() == n {
        out.push(cur.clone());
        return;
    }
    for m in from..b {
        cur.push(m);
        push_multisets(b, n, cur, m, out);
        cur.pop();
    }
}

/// Sparse Hermitian matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub label: String,
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
}

impl FockOperator {
    /// Builds from per-row `(column, value)` lists; duplicate columns are summed.
    pub fn from_rows(label: &str, rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *values.last_mut().expect("entry") += v;
                } else {
                    cols.push(c);
                    values.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        FockOperator {
            label: label.to_string(),
            dim,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.row(i).find(|e| e.0 == j).map(|e| e.1).unwrap_or_default()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    /// `y = M x`, parallel over rows.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            *yi = self.row(i).map(|(c, v)| v * x[c]).sum();
        });
    }

    pub fn apply_new(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::default(); self.dim];
        self.apply(x, &mut y);
        y
    }

    /// `max |M_ij - conj M_ji|`.
    pub fn hermiticity_defect(&self) -> f64 {
        (0..self.dim)
            .into_par_iter()
            .map(|i| {
                self.row(i)
                    .map(|(j, v)| (v - self.get(j, i).conj()).norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_estimate(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Writes one `row col re im` line per stored entry.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {} dim={} nnz={}", self.label, self.dim, self.nnz())?;
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {:e} {:e}", v.re, v.im)?;
            }
        }
        Ok(())
    }

    /// Dense copy as row-major nested vectors.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut m = vec![vec![Complex64::default(); self.dim]; self.dim];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] += v;
            }
        }
        m
    }
}

/// Assembles `diag(i) + Σ_n (c_n a*_n + conj(c_n) a_n)` where the `c_n`
/// already include the `√w_n` factor.
pub fn assemble_with_field(
    label: &str,
    basis: &FockBasis,
    diag: impl Fn(&[u32]) -> f64 + Sync,
    coeff: &[Complex64],
) -> Result<FockOperator> {
    if coeff.len() != basis.modes() {
        return Err(invalid("one field coefficient per mode required"));
    }
    let n_max = basis.n_max();
    let rows: Vec<Vec<(usize, Complex64)>> = (0..basis.dim())
        .into_par_iter()
        .map(|i| {
            let s = basis.state(i);
            let mut row = Vec::with_capacity(1 + 2 * basis.modes());
            row.push((i, Complex64::new(diag(s), 0.0)));
            // ⟨s| a_m |t⟩ with t = s + m: conj(c_m) √(n_m(s) + 1)
            if s.len() < n_max {
                let mut t = Vec::with_capacity(s.len() + 1);
                for m in 0..basis.modes() as u32 {
                    if coeff[m as usize] == Complex64::default() {
                        continue;
                    }
                    t.clear();
                    t.extend_from_slice(s);
                    let pos = t.partition_point(|&x| x <= m);
                    t.insert(pos, m);
                    let j = basis.find(&t).expect("state in basis");
                    let occ = s.iter().filter(|&&x| x == m).count() as f64;
                    row.push((j, coeff[m as usize].conj() * (occ + 1.0).sqrt()));
                }
            }
            // ⟨s| a*_m |t⟩ with t = s - m: c_m √n_m(s)
            let mut prev = None;
            for (p, &m) in s.iter().enumerate() {
                if prev == Some(m) || coeff[m as usize] == Complex64::default() {
                    prev = Some(m);
                    continue;
                }
                prev = Some(m);
                let mut t = s.to_vec();
                t.remove(p);
                let j = basis.find(&t).expect("state in basis");
                let occ = s.iter().filter(|&&x| x == m).count() as f64;
                row.push((j, coeff[m as usize] * occ.sqrt()));
            }
            row
        })
        .collect();
    Ok(FockOperator::from_rows(label, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_counts_and_order() {
        let b = FockBasis::new(3, 2, 100).unwrap();
        assert_eq!(b.dim(), 1 + 3 + 6);
        assert_eq!(b.state(0), &[] as &[u32]);
        assert_eq!(b.state(4), &[0, 0]);
        assert_eq!(b.state(9), &[2, 2]);
        assert_eq!(b.sector(1), 1..4);
        for i in 0..b.dim() {
            assert_eq!(b.find(b.state(i)), Some(i));
        }
        assert_eq!(multiset_count(10, 3), Some(220));
    }

    #[test]
    fn dimension_cap_is_enforced() {
        assert!(matches!(
            FockBasis::new(100, 3, 1000),
            Err(Error::DimensionCapExceeded { .. })
        ));
    }

    #[test]
    fn field_operator_is_hermitian_and_sector_local() {
        let b = FockBasis::new(4, 3, 1000).unwrap();
        let c: Vec<Complex64> = (0..4).map(|m| Complex64::new(0.3 + m as f64, 0.7 - m as f64)).collect();
        let op = assemble_with_field("phi", &b, |_| 0.0, &c).unwrap();
        assert!(op.hermiticity_defect() < 1e-15);
        for i in 0..b.dim() {
            for (j, v) in op.row(i) {
                if v.norm() > 0.0 {
                    let dn = b.boson_number(i) as i64 - b.boson_number(j) as i64;
                    assert_eq!(dn.abs(), 1);
                }
            }
        }
    }

    #[test]
    fn canonical_commutator_on_low_sectors() {
        // ⟨Ω, a(f) a*(f) Ω⟩ = Σ |c|² with a*(f) Ω read off the field operator
        let b = FockBasis::new(5, 2, 1000).unwrap();
        let c: Vec<Complex64> = (0..5).map(|m| Complex64::new(0.1 * m as f64, 0.2)).collect();
        let op = assemble_with_field("phi", &b, |_| 0.0, &c).unwrap();
        let mut omega = vec![Complex64::default(); b.dim()];
        omega[0] = Complex64::new(1.0, 0.0);
        let phi_omega = op.apply_new(&omega);
        let norm: f64 = phi_omega.iter().map(|z| z.norm_sqr()).sum();
        let expected: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - expected).abs() < 1e-12);
    }

    #[test]
    fn triplet_dump_lists_all_entries() {
        let b = FockBasis::new(2, 1, 10).unwrap();
        let op = assemble_with_field("h", &b, |s| s.len() as f64, &[Complex64::new(1.0, 0.0); 2]).unwrap();
        let mut out = Vec::new();
        op.write_triplets(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 1 + op.nnz());
        assert!(text.lines().nth(1).unwrap().starts_with("0 0 "));
    }
}
