//! Sparse direct solver for the (possibly indefinite) cotan systems.
//!
//! The matrix is reordered with reverse Cuthill-McKee and factored as a band
//! matrix with partial pivoting, followed by iterative refinement against the
//! original sparse matrix.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-wise sparse matrix; duplicate entries are summed.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub fn new(n: usize) -> Self {
        SparseMatrix { n, rows: vec![Vec::new(); n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let row = &mut self.rows[i];
        match row.iter_mut().find(|(c, _)| *c == j) {
            Some(entry) => entry.1 += v,
            None => row.push((j, v)),
        }
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().map(|&(c, v)| v * x[c]).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().fold(0.0, |m, &(_, v)| m.max(v.abs()))
    }

    fn symmetric_pattern(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in row {
                if i != j {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }
}

/// Reverse Cuthill-McKee ordering; `order[new] = old`.
pub fn rcm_ordering(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let degree = |v: usize| adj[v].len();
    while order.len() < n {
        let seed = (0..n).filter(|&v| !placed[v]).min_by_key(|&v| (degree(v), v)).unwrap();
        let start = pseudo_peripheral(adj, seed, &placed);
        placed[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !placed[w]).collect();
            next.sort_unstable_by_key(|&w| (degree(w), w));
            for w in next {
                placed[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(adj: &[Vec<usize>], seed: usize, excluded: &[bool]) -> usize {
    let mut start = seed;
    let mut best_depth = 0;
    for _ in 0..4 {
        let (depth, last_level) = bfs_levels(adj, start, excluded);
        let candidate = last_level.into_iter().min_by_key(|&v| (adj[v].len(), v)).unwrap_or(start);
        if depth <= best_depth {
            break;
        }
        best_depth = depth;
        start = candidate;
    }
    start
}

fn bfs_levels(adj: &[Vec<usize>], start: usize, excluded: &[bool]) -> (usize, Vec<usize>) {
    let mut level = vec![usize::MAX; adj.len()];
    level[start] = 0;
    let mut frontier = vec![start];
    let mut depth = 0;
    loop {
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in &adj[v] {
                if !excluded[w] && level[w] == usize::MAX {
                    level[w] = depth + 1;
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return (depth, frontier);
        }
        depth += 1;
        frontier = next;
    }
}

/// LU factorization of a permuted band matrix with partial pivoting.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    band: usize,
    width: usize,
    order: Vec<usize>,
    position: Vec<usize>,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let n = a.dim();
        let order = rcm_ordering(&a.symmetric_pattern());
        let mut position = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let mut band = 0;
        for (i, row) in a.rows.iter().enumerate() {
            for &(j, _) in row {
                band = band.max(position[i].abs_diff(position[j]));
            }
        }
        // Row r holds columns r - band ..= r + 2 * band (fill-in from pivoting).
        let width = 3 * band + 1;
        let mut lu = BandLu { n, band, width, order, position, data: vec![0.0; n * width], pivots: vec![0; n] };
        for (i, row) in a.rows.iter().enumerate() {
            for &(j, v) in row {
                let (r, c) = (lu.position[i], lu.position[j]);
                *lu.at_mut(r, c) += v;
            }
        }

        let threshold = 1e-13 * a.max_abs();
        for k in 0..n {
            let last = (k + band).min(n - 1);
            let mut p = k;
            let mut best = lu.at(k, k).abs();
            for r in k + 1..=last {
                let v = lu.at(r, k).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            // Also rejects NaN pivots.
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(best > threshold) {
                return Err(Error::SingularSystem { pivot: k });
            }
            lu.pivots[k] = p;
            let cmax = (k + 2 * band).min(n - 1);
            if p != k {
                for c in k..=cmax {
                    let t = lu.at(k, c);
                    *lu.at_mut(k, c) = lu.at(p, c);
                    *lu.at_mut(p, c) = t;
                }
            }
            let pivot = lu.at(k, k);
            for r in k + 1..=last {
                let l = lu.at(r, k) / pivot;
                *lu.at_mut(r, k) = l;
                if l != 0.0 {
                    for c in k + 1..=cmax {
                        let u = lu.at(k, c);
                        *lu.at_mut(r, c) -= l * u;
                    }
                }
            }
        }
        Ok(lu)
    }

    pub fn bandwidth(&self) -> usize {
        self.band
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.order.iter().map(|&old| b[old]).collect();
        for k in 0..n {
            y.swap(k, self.pivots[k]);
            let yk = y[k];
            let last = (k + self.band).min(n.saturating_sub(1));
            for (r, yr) in y.iter_mut().enumerate().take(last + 1).skip(k + 1) {
                *yr -= self.at(r, k) * yk;
            }
        }
        for k in (0..n).rev() {
            let last = (k + 2 * self.band).min(n - 1);
            let s = y[k] - (k + 1..=last).map(|c| self.at(k, c) * y[c]).sum::<f64>();
            y[k] = s / self.at(k, k);
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.order.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }

    fn index(&self, r: usize, c: usize) -> usize {
        debug_assert!(c + self.band >= r && c <= r + 2 * self.band);
        r * self.width + (c + self.band - r)
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[self.index(r, c)]
    }

    fn at_mut(&mut self, r: usize, c: usize) -> &mut f64 {
        let i = self.index(r, c);
        &mut self.data[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    /// `‖b - A x‖∞` after refinement.
    pub residual: f64,
    pub refinement_steps: usize,
}

/// Solves `A x = b` with up to `max_refine` steps of iterative refinement.
pub fn solve(a: &SparseMatrix, b: &[f64], max_refine: usize) -> Result<Solution> {
    let lu = BandLu::factor(a)?;
    Ok(refine(a, &lu, b, max_refine))
}

/// Solves with an existing factorization of `a`, then refines.
pub fn refine(a: &SparseMatrix, lu: &BandLu, b: &[f64], max_refine: usize) -> Solution {
    let mut x = lu.solve(b);
    let residual_of = |x: &[f64]| -> Vec<f64> { a.mul_vec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect() };
    let mut r = residual_of(&x);
    let mut norm = inf_norm(&r);
    let mut steps = 0;
    while steps < max_refine && norm > 0.0 {
        let dx = lu.solve(&r);
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let rc = residual_of(&candidate);
        let nc = inf_norm(&rc);
        steps += 1;
        // Stops on NaN too.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(nc < norm) {
            break;
        }
        x = candidate;
        r = rc;
        norm = nc;
    }
    Solution { x, residual: norm, refinement_steps: steps }
}

pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
