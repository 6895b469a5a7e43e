#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use nullag_core::algebra::{int, Rational};
use nullag_core::{RationalMatrix, Subspace};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn nullag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nullag")).args(args).output().expect("binary runs")
}

pub fn nullag_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nullag")).current_dir(dir).args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn small_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, sparsity: f64) -> RationalMatrix {
    let mut x = RationalMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            if !rng.gen_bool(sparsity) {
                x.set(i, j, int(rng.gen_range(-2..=2)));
            }
        }
    }
    x
}

/// Random subspace with small integer entries; retries until the basis is independent.
pub fn random_subspace(rng: &mut ChaCha8Rng, m: usize, n: usize, d: usize) -> Subspace {
    loop {
        let sparsity = rng.gen_range(0.0..0.6);
        let basis = (0..d).map(|_| small_matrix(rng, m, n, sparsity)).collect();
        if let Ok(k) = Subspace::new(m, n, basis) {
            return k;
        }
    }
}

/// Random subspace whose first basis matrix is u vᵀ.
pub fn planted_rank_one(rng: &mut ChaCha8Rng, m: usize, n: usize, d: usize) -> Subspace {
    loop {
        let u: Vec<i64> = (0..m).map(|_| rng.gen_range(-2..=2)).collect();
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        let mut b0 = RationalMatrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                b0.set(i, j, int(u[i] * v[j]));
            }
        }
        let sparsity = rng.gen_range(0.0..0.5);
        let mut basis = vec![b0];
        basis.extend((1..d).map(|_| small_matrix(rng, m, n, sparsity)));
        if let Ok(k) = Subspace::new(m, n, basis) {
            return k;
        }
    }
}

/// The d ≤ 3 fuzz corpus. Unplanted three-dimensional cases use shapes of at least 3×3, where
/// the rank-1 locus has codimension ≥ 4 and a random plane misses it.
pub fn fuzz_subspace(rng: &mut ChaCha8Rng, i: usize) -> Subspace {
    let d = 1 + i % 3;
    let planted = i.is_multiple_of(4);
    let (lo, hi) = if d == 3 { (3, 4) } else { (1, 4) };
    loop {
        let (m, n) = (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
        if m * n < d {
            continue;
        }
        return if planted { planted_rank_one(rng, m, n, d) } else { random_subspace(rng, m, n, d) };
    }
}

/// Leibniz expansion.
pub fn det_leibniz(a: &RationalMatrix) -> Rational {
    let n = a.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Rational::zero();
    permute(&mut perm, 0, a, &mut total);
    total
}

fn permute(p: &mut Vec<usize>, k: usize, a: &RationalMatrix, total: &mut Rational) {
    if k == p.len() {
        let inversions = (0..p.len()).flat_map(|i| (i + 1..p.len()).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let mut term = Rational::one();
        for (i, &j) in p.iter().enumerate() {
            term *= a.get(i, j);
        }
        if inversions % 2 == 1 {
            term = -term;
        }
        *total += term;
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, a, total);
        p.swap(k, i);
    }
}

/// A symmetric matrix is PSD iff every principal minor is non-negative.
pub fn psd_by_principal_minors(q: &RationalMatrix) -> bool {
    let n = q.rows();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        !det_leibniz(&q.submatrix(&idx, &idx).expect("in range")).is_negative()
    })
}
