//! Catalogue of concrete subspaces and measures used by tests, benches and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{int, Rational, RationalMatrix};
use crate::error::{Error, Result};
use crate::measures::DiscreteMeasure;
use crate::subspace::Subspace;

/// Expected answers for a fixture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExpectedVerdicts {
    pub rank_one: bool,
    pub certificate: bool,
    pub nontrivial_measure: bool,
}

impl ExpectedVerdicts {
    /// A certificate excludes non-trivial measures, and a rank-1 element produces one.
    pub fn is_consistent(&self) -> bool {
        !(self.certificate && self.nontrivial_measure) && (!self.rank_one || self.nontrivial_measure)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureEntry {
    pub name: String,
    pub description: String,
    pub subspace: Subspace,
    pub expected: ExpectedVerdicts,
    /// Known atoms worth offering to the measure construction.
    pub candidates: Vec<RationalMatrix>,
    /// A known non-trivial measure with barycenter 0, when one is catalogued.
    pub measure: Option<DiscreteMeasure>,
}

/// The 3×3 pencil with free parameters (α, β, γ, δ).
fn b_block(alpha: i64, beta: i64, gamma: i64, delta: i64) -> [[i64; 3]; 3] {
    [[beta + delta, alpha - gamma, gamma], [alpha + gamma, 0, delta], [alpha, beta, 0]]
}

fn embed_block(size: usize, block: [[i64; 3]; 3]) -> RationalMatrix {
    let mut x = RationalMatrix::zeros(size, size);
    for (i, row) in block.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            x.set(i, j, int(v));
        }
    }
    x
}

/// (4 + r)-dimensional subspace of (3+2r)×(3+2r) matrices: the 3×3 block above plus
/// one free parameter per k repeated on two diagonal slots (2k+1, 2k+2), 0-based.
pub fn kr_family(r: usize) -> Subspace {
    let size = 3 + 2 * r;
    let mut basis: Vec<RationalMatrix> = (0..4)
        .map(|l| {
            let mut e = [0i64; 4];
            e[l] = 1;
            embed_block(size, b_block(e[0], e[1], e[2], e[3]))
        })
        .collect();
    for k in 1..=r {
        let mut s = RationalMatrix::zeros(size, size);
        s.set(1 + 2 * k, 1 + 2 * k, int(1));
        s.set(2 + 2 * k, 2 + 2 * k, int(1));
        basis.push(s);
    }
    Subspace::new(size, size, basis).expect("independent by construction")
}

/// The eight atoms ±H_i, with H_i the block evaluated at the i-th standard basis vector of R⁴.
pub fn kr_atoms(r: usize) -> Vec<RationalMatrix> {
    let size = 3 + 2 * r;
    (0..4)
        .flat_map(|l| {
            let mut e = [0i64; 4];
            e[l] = 1;
            let h = embed_block(size, b_block(e[0], e[1], e[2], e[3]));
            let neg = h.neg();
            [h, neg]
        })
        .collect()
}

/// Uniform measure on the eight atoms of [`kr_atoms`].
pub fn kr_measure(r: usize) -> DiscreteMeasure {
    let atoms = kr_atoms(r);
    let w = Rational::new(1.into(), 8.into());
    DiscreteMeasure::new((3 + 2 * r, 3 + 2 * r), atoms, vec![w; 8]).expect("valid by construction")
}

/// diag(y₁, y₁, …, y_k, y_k, 0, …) inside m×n matrices.
pub fn v0(k: usize, m: usize, n: usize) -> Result<Subspace> {
    if k == 0 || m < 2 * k || n < 2 * k {
        return Err(Error::Precondition(format!("V0 needs k ≥ 1 and m, n ≥ 2k (k={k}, m={m}, n={n})")));
    }
    let basis = (0..k)
        .map(|l| {
            let mut x = RationalMatrix::zeros(m, n);
            x.set(2 * l, 2 * l, int(1));
            x.set(2 * l + 1, 2 * l + 1, int(1));
            x
        })
        .collect();
    Subspace::new(m, n, basis)
}

/// {[[u, v], [c·v, u]]}: the 2×2 system matrices for the flux a(v) = c·v.
pub fn k0_linear(c: i64) -> Subspace {
    let basis = vec![RationalMatrix::from_i64(&[&[1, 0], &[0, 1]]), RationalMatrix::from_i64(&[&[0, 1], &[c, 0]])];
    Subspace::new(2, 2, basis).expect("independent")
}

/// Random 3-dimensional subspace of symmetric 3×3 matrices with small integer entries.
pub fn sym3_random(seed: u64) -> Subspace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let basis: Vec<RationalMatrix> = (0..3)
            .map(|_| {
                let mut x = RationalMatrix::zeros(3, 3);
                for i in 0..3 {
                    for j in i..3 {
                        let v = int(rng.gen_range(-3..=3));
                        x.set(i, j, v.clone());
                        x.set(j, i, v);
                    }
                }
                x
            })
            .collect();
        if let Ok(k) = Subspace::new(3, 3, basis) {
            return k;
        }
    }
}

pub fn rank1_line() -> Subspace {
    Subspace::new(2, 3, vec![RationalMatrix::from_i64(&[&[1, 2, 0], &[2, 4, 0]])]).expect("non-zero")
}

/// {[[u, v], [−v, u]]}, whose determinant u² + v² never vanishes off the origin.
pub fn rotation() -> Subspace {
    k0_linear(-1)
}

/// diag(z₁, z₁, z₂, z₂) in 4×4 matrices.
pub fn diag_pencil() -> Subspace {
    v0(2, 4, 4).expect("valid shape")
}

fn parse_args(s: &str, name: &str) -> Option<Vec<(Option<String>, u64)>> {
    let inner = s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    inner
        .split(',')
        .map(|part| {
            let part = part.trim();
            match part.split_once('=') {
                Some((k, v)) => v.trim().parse().ok().map(|v| (Some(k.trim().to_string()), v)),
                None => part.parse().ok().map(|v| (None, v)),
            }
        })
        .collect()
}

fn arg(args: &[(Option<String>, u64)], pos: usize, key: &str) -> Option<u64> {
    args.iter().find(|(k, _)| k.as_deref() == Some(key)).or_else(|| args.get(pos).filter(|(k, _)| k.is_none())).map(|(_, v)| *v)
}

/// Names accepted by [`builtin`]; parameterised names show their default arguments.
pub fn builtin_names() -> Vec<&'static str> {
    vec![
        "Kr(r=0)",
        "Kr(r=1)",
        "Kr(r=2)",
        "Kr(r=3)",
        "V0(k=2,m=4,n=4)",
        "diag-pencil",
        "rotation",
        "K0-linear",
        "rank1-line",
        "sym3-random(seed=0)",
    ]
}

pub fn builtin(name: &str) -> Result<FixtureEntry> {
    let unknown = || Error::UnknownFixture(name.to_string());
    let trivial = ExpectedVerdicts { rank_one: false, certificate: true, nontrivial_measure: false };
    let rank_one = ExpectedVerdicts { rank_one: true, certificate: false, nontrivial_measure: true };
    let entry = |description: &str, subspace: Subspace, expected: ExpectedVerdicts| FixtureEntry {
        name: name.to_string(),
        description: description.to_string(),
        subspace,
        expected,
        candidates: Vec::new(),
        measure: None,
    };
    if let Some(args) = parse_args(name, "Kr") {
        let r = arg(&args, 0, "r").ok_or_else(unknown)? as usize;
        let mut e = entry(
            "counterexample family: no rank-1 element, yet a non-trivial eight-atom measure",
            kr_family(r),
            ExpectedVerdicts { rank_one: false, certificate: false, nontrivial_measure: true },
        );
        e.candidates = kr_atoms(r);
        e.measure = Some(kr_measure(r));
        return Ok(e);
    }
    if let Some(args) = parse_args(name, "V0") {
        let (k, m, n) = (arg(&args, 0, "k"), arg(&args, 1, "m"), arg(&args, 2, "n"));
        let (Some(k), Some(m), Some(n)) = (k, m, n) else { return Err(unknown()) };
        return Ok(entry("repeated diagonal blocks diag(y1, y1, ..., yk, yk, 0, ...)", v0(k as usize, m as usize, n as usize)?, trivial));
    }
    if let Some(args) = parse_args(name, "sym3-random") {
        let seed = arg(&args, 0, "seed").ok_or_else(unknown)?;
        // Rank-1 symmetric 3×3 matrices form a surface of codimension 3 in the projectivized
        // space, so a generic plane misses it; seeds 0..100 all certify.
        return Ok(entry("random three-dimensional subspace of symmetric 3x3 matrices", sym3_random(seed), trivial));
    }
    match name {
        "diag-pencil" => Ok(entry("diag(z1, z1, z2, z2) in 4x4 matrices", diag_pencil(), trivial)),
        "rotation" => Ok(entry("rotation pencil [[u, v], [-v, u]]", rotation(), trivial)),
        "K0-linear" => Ok(entry("2x2 system matrices [[u, v], [v, u]] for the flux a(v) = v", k0_linear(1), rank_one)),
        "rank1-line" => {
            let mut e = entry("line spanned by a single rank-1 matrix", rank1_line(), rank_one);
            e.measure = Some(DiscreteMeasure::symmetric_pair(rank1_line().basis()[0].clone())?);
            Ok(e)
        }
        _ => Err(unknown()),
    }
}
