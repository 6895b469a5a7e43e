//! Constructive search for a non-negative minor combination when d ≤ 3.
//!
//! The pencil is brought to simpler shapes by invertible row and column transforms. These
//! leave the span of the order-2 minors unchanged, so a square (ℓ·z)² or a signed 2×2
//! determinant found on the reduced pencil is pulled back to β by an exact linear solve
//! against the minors of the original pencil.

use num_traits::{One, Zero};
use serde::Serialize;

use super::chain::heuristic_combination;
use super::combination::{verify_combination, Cone, MinorCombination};
use crate::algebra::{
    express_in, independent_subset, span_intersection, vectors_rank, Definiteness, QuadraticForm, Rational,
    RationalMatrix,
};
use crate::error::{Error, Result};
use crate::subspace::{find_rank_one, RankOneOptions, RankOneSearch, SearchMode, Subspace};

/// Which reduction produced the target form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionCase {
    /// A row or column whose entries all lie on one line ℓ; target ℓ².
    SingleDirection,
    /// The pencil reduces to a 2×2 block; target ± its determinant.
    TwoByTwo,
    /// A row spanning a plane W meets a column span U; target ψ² for ψ ∈ W ∩ U.
    SharedDirection,
    /// A row spans R³ and some entry ã lies outside its columns; target ã².
    FullRowOutside,
    /// Canonical 3×3 shape with a non-symmetric part b; target (b·z)².
    SkewPart,
    /// No case applied (the canonical 3×3 shape is symmetric); the identity or a seeded
    /// positive definite target was projected onto the minor span instead.
    Projection,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertificateSearch {
    Found { combination: MinorCombination, case: ReductionCase },
    RankOne { search: RankOneSearch },
    NotFound,
}

impl CertificateSearch {
    pub fn combination(&self) -> Option<&MinorCombination> {
        match self {
            Self::Found { combination, .. } => Some(combination),
            _ => None,
        }
    }
}

/// m×n array of entry vectors a_ij ∈ Q^d, entry (i, j) of the pencil being a_ij · z.
#[derive(Clone, Debug)]
struct EntryPencil {
    d: usize,
    a: Vec<Vec<Vec<Rational>>>,
}

impl EntryPencil {
    fn from_subspace(k: &Subspace) -> Self {
        Self { d: k.d(), a: (0..k.m()).map(|i| (0..k.n()).map(|j| k.entry_vector(i, j)).collect()).collect() }
    }

    fn m(&self) -> usize {
        self.a.len()
    }

    fn n(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    fn is_zero(v: &[Rational]) -> bool {
        v.iter().all(Zero::is_zero)
    }

    fn transpose(&self) -> Self {
        Self { d: self.d, a: (0..self.n()).map(|j| (0..self.m()).map(|i| self.a[i][j].clone()).collect()).collect() }
    }

    fn column(&self, j: usize) -> Vec<Vec<Rational>> {
        self.a.iter().map(|r| r[j].clone()).collect()
    }

    fn row_dim(&self, i: usize) -> usize {
        vectors_rank(&self.a[i])
    }

    fn col_dim(&self, j: usize) -> usize {
        vectors_rank(&self.column(j))
    }

    /// Drops rows and columns that vanish identically.
    fn compressed(&self) -> Self {
        let rows: Vec<usize> = (0..self.m()).filter(|&i| self.a[i].iter().any(|v| !Self::is_zero(v))).collect();
        let cols: Vec<usize> = (0..self.n()).filter(|&j| rows.iter().any(|&i| !Self::is_zero(&self.a[i][j]))).collect();
        self.select(&rows, &cols)
    }

    fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self { d: self.d, a: rows.iter().map(|&i| cols.iter().map(|&j| self.a[i][j].clone()).collect()).collect() }
    }

    fn combine(vs: &[&Vec<Rational>], coeffs: &[Rational], d: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); d];
        for (v, c) in vs.iter().zip(coeffs) {
            if !c.is_zero() {
                for (o, x) in out.iter_mut().zip(v.iter()) {
                    *o += c * x;
                }
            }
        }
        out
    }

    /// New rows Σ_i' R[r][i'] · row_i'.
    fn left(&self, r: &RationalMatrix) -> Self {
        let a = (0..r.rows())
            .map(|i| {
                (0..self.n())
                    .map(|j| {
                        let col: Vec<&Vec<Rational>> = self.a.iter().map(|row| &row[j]).collect();
                        Self::combine(&col, r.row(i), self.d)
                    })
                    .collect()
            })
            .collect();
        Self { d: self.d, a }
    }

    /// New columns Σ_j' col_j' · C[j'][c].
    fn right(&self, c: &RationalMatrix) -> Self {
        self.transpose().left(&c.transpose()).transpose()
    }

    fn entry_form(&self, i: usize, j: usize) -> QuadraticForm {
        QuadraticForm::square_of_linear(&self.a[i][j])
    }

    fn first_nonzero(vs: &[Vec<Rational>]) -> Option<&Vec<Rational>> {
        vs.iter().find(|v| !Self::is_zero(v))
    }
}

type Target = (QuadraticForm, ReductionCase);

fn square(v: &[Rational]) -> Target {
    (QuadraticForm::square_of_linear(v), ReductionCase::SingleDirection)
}

/// Row (or column) elimination of entry `pivot` column vectors: keeps an independent subset of rows
/// and subtracts combinations of them from the others so their `pivot` entries vanish.
fn eliminate_rows(p: &EntryPencil, pivot: usize) -> (EntryPencil, Vec<usize>) {
    let col = p.column(pivot);
    let keep = independent_subset(&col);
    let basis: Vec<Vec<Rational>> = keep.iter().map(|&i| col[i].clone()).collect();
    let m = p.m();
    let mut r = RationalMatrix::identity(m);
    for i in 0..m {
        if keep.contains(&i) {
            continue;
        }
        let c = express_in(&basis, &col[i]).expect("spanned by the independent subset");
        for (l, &ki) in keep.iter().enumerate() {
            r.set(i, ki, -c[l].clone());
        }
    }
    (p.left(&r), keep)
}

fn eliminate_cols(p: &EntryPencil, pivot: usize) -> (EntryPencil, Vec<usize>) {
    let (t, keep) = eliminate_rows(&p.transpose(), pivot);
    (t.transpose(), keep)
}

/// n = 2 after compression.
fn two_columns(p: &EntryPencil) -> Option<Target> {
    let (q, keep) = eliminate_rows(p, 0);
    for i in 0..q.m() {
        if !keep.contains(&i) && !EntryPencil::is_zero(&q.a[i][1]) {
            return Some(square(&q.a[i][1]));
        }
    }
    if keep.len() != 2 {
        return None;
    }
    let (r0, r1) = (keep[0], keep[1]);
    let det = QuadraticForm::linear_combination(
        p.d,
        &[symmetric_product(&q.a[r0][0], &q.a[r1][1]), symmetric_product(&q.a[r0][1], &q.a[r1][0])],
        &[Rational::one(), -Rational::one()],
    )
    .expect("same dimension");
    match det.definiteness() {
        Definiteness::PositiveDefinite | Definiteness::PositiveSemidefinite => Some((det, ReductionCase::TwoByTwo)),
        Definiteness::NegativeDefinite | Definiteness::NegativeSemidefinite => {
            Some((det.scale(&-Rational::one()), ReductionCase::TwoByTwo))
        }
        _ => None,
    }
}

/// (u·z)(v·z) as a symmetric form.
fn symmetric_product(u: &[Rational], v: &[Rational]) -> QuadraticForm {
    let d = u.len();
    let half = Rational::new(1.into(), 2.into());
    let mut m = RationalMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m.set(i, j, (&u[i] * &v[j] + &u[j] * &v[i]) * &half);
        }
    }
    QuadraticForm::new(m).expect("symmetric")
}

/// Row `i0` spans a plane.
fn shared_direction(p: &EntryPencil, i0: usize, depth: usize) -> Option<Target> {
    let (q, pivots) = eliminate_cols(p, i0);
    let w1: Vec<Vec<Rational>> = pivots.iter().map(|&j| q.a[i0][j].clone()).collect();
    for j0 in (0..q.n()).filter(|j| !pivots.contains(j)) {
        let u1: Vec<Vec<Rational>> = (0..q.m()).filter(|&i| i != i0).map(|i| q.a[i][j0].clone()).collect();
        match vectors_rank(&u1) {
            0 => continue,
            1 => return Some(square(EntryPencil::first_nonzero(&u1).expect("rank 1"))),
            _ => {
                let psi = span_intersection(&w1, &u1, p.d).into_iter().next()?;
                return Some((QuadraticForm::square_of_linear(&psi), ReductionCase::SharedDirection));
            }
        }
    }
    let rows: Vec<usize> = (0..q.m()).collect();
    find_target(&q.select(&rows, &pivots), depth + 1)
}

/// d = 3 and row `i0` spans R³.
fn full_row(p: &EntryPencil, i0: usize, depth: usize) -> Option<Target> {
    if p.n() > 3 {
        let (q, pivots) = eliminate_cols(p, i0);
        for i in (0..q.m()).filter(|&i| i != i0) {
            for j in (0..q.n()).filter(|j| !pivots.contains(j)) {
                if !EntryPencil::is_zero(&q.a[i][j]) {
                    return Some((q.entry_form(i, j), ReductionCase::FullRowOutside));
                }
            }
        }
        let rows: Vec<usize> = (0..q.m()).collect();
        return find_target(&q.select(&rows, &pivots), depth + 1);
    }
    if p.m() > 3 {
        let (q, keep) = eliminate_rows(p, 0);
        let extra = (0..q.m()).any(|i| !keep.contains(&i) && q.a[i].iter().any(|v| !EntryPencil::is_zero(v)));
        if extra {
            return find_target(&q, depth + 1);
        }
        return find_target(&q.select(&keep, &[0, 1, 2]), depth + 1);
    }
    skew_part(p, depth)
}

/// 3×3 pencil in three variables with every row and column spanning R³.
fn skew_part(p: &EntryPencil, depth: usize) -> Option<Target> {
    let first = RationalMatrix::from_rows(&p.column(0)).ok()?;
    let q = p.left(&first.inverse()?);
    let row0 = [&q.a[0][0], &q.a[0][1], &q.a[0][2]];
    if vectors_rank(&row0.iter().map(|v| (*v).clone()).collect::<Vec<_>>()) < 3 {
        return find_target(&q, depth + 1);
    }
    // Clear the first coordinate of entries (0,1), (0,2) using column 0 (whose entry is e1).
    let mut c = RationalMatrix::identity(3);
    c.set(0, 1, -q.a[0][1][0].clone());
    c.set(0, 2, -q.a[0][2][0].clone());
    let q = q.right(&c);
    let n = RationalMatrix::from_rows(&[
        vec![q.a[0][1][1].clone(), q.a[0][2][1].clone()],
        vec![q.a[0][1][2].clone(), q.a[0][2][2].clone()],
    ])
    .ok()?;
    let ninv = n.inverse()?;
    let mut c = RationalMatrix::identity(3);
    for a in 0..2 {
        for b in 0..2 {
            c.set(a + 1, b + 1, ninv.get(a, b).clone());
        }
    }
    let q = q.right(&c);
    let b: Vec<Rational> = q.a[1][2].iter().zip(&q.a[2][1]).map(|(x, y)| x - y).collect();
    if EntryPencil::is_zero(&b) {
        return None;
    }
    Some((QuadraticForm::square_of_linear(&b), ReductionCase::SkewPart))
}

fn find_target(p: &EntryPencil, depth: usize) -> Option<Target> {
    let p = p.compressed();
    if depth > 16 || p.m() < 2 || p.n() < 2 {
        return None;
    }
    let rows: Vec<usize> = (0..p.m()).map(|i| p.row_dim(i)).collect();
    let cols: Vec<usize> = (0..p.n()).map(|j| p.col_dim(j)).collect();
    if let Some(i) = rows.iter().position(|&r| r == 1) {
        return Some(square(EntryPencil::first_nonzero(&p.a[i]).expect("non-zero row")));
    }
    if let Some(j) = cols.iter().position(|&r| r == 1) {
        return Some(square(EntryPencil::first_nonzero(&p.column(j)).expect("non-zero column")));
    }
    if p.n() == 2 {
        return two_columns(&p);
    }
    if p.m() == 2 {
        return two_columns(&p.transpose());
    }
    if let Some(i) = rows.iter().position(|&r| r == 2) {
        return shared_direction(&p, i, depth);
    }
    if let Some(j) = cols.iter().position(|&r| r == 2) {
        return shared_direction(&p.transpose(), j, depth);
    }
    if p.d == 3 {
        if let Some(i) = rows.iter().position(|&r| r == 3) {
            return full_row(&p, i, depth);
        }
    }
    None
}

/// Expresses `target` as Σ β_k M_k(P(z)) over the order-2 minors of `k`, supported on an
/// independent subset of the minor forms.
pub fn pull_back(k: &Subspace, target: &QuadraticForm) -> Option<Vec<Rational>> {
    let forms = k.minor_forms();
    let vecs: Vec<Vec<Rational>> = forms.iter().map(QuadraticForm::upper_vector).collect();
    let keep = independent_subset(&vecs);
    if keep.is_empty() {
        return None;
    }
    let cols: Vec<Vec<Rational>> = keep.iter().map(|&i| vecs[i].clone()).collect();
    let coeffs = express_in(&cols, &target.upper_vector())?;
    let mut beta = vec![Rational::zero(); forms.len()];
    for (c, &i) in coeffs.into_iter().zip(&keep) {
        beta[i] = c;
    }
    Some(beta)
}

/// Runs the reduction without the rank-1 pre-check; the result is verified exactly.
pub fn constructive_combination(k: &Subspace) -> Result<Option<(MinorCombination, ReductionCase)>> {
    if k.d() > 3 {
        return Err(Error::Unsupported(format!("constructive search covers d ≤ 3, got d = {}", k.d())));
    }
    let Some((target, case)) = find_target(&EntryPencil::from_subspace(k), 0) else { return Ok(None) };
    let Some(beta) = pull_back(k, &target) else { return Ok(None) };
    let combo = MinorCombination::new(k, beta)?;
    if !verify_combination(k, &combo, &Cone::whole(k.d()))?.is_certified() {
        return Ok(None);
    }
    Ok(Some((combo, case)))
}

const PROJECTION_ATTEMPTS: usize = 32;

/// β with Σ β_k M_k ≥ 0 and ≢ 0 on K, for d ≤ 3; `RankOne` when K has a rank-1 element.
pub fn find_certificate_d_le_3(k: &Subspace, opts: &RankOneOptions) -> Result<CertificateSearch> {
    if k.d() > 3 {
        return Err(Error::Unsupported(format!("constructive search covers d ≤ 3, got d = {}", k.d())));
    }
    let search = find_rank_one(k, SearchMode::Auto, opts)?;
    if search.found() {
        return Ok(CertificateSearch::RankOne { search });
    }
    if let Some((combination, case)) = constructive_combination(k)? {
        return Ok(CertificateSearch::Found { combination, case });
    }
    Ok(match heuristic_combination(k, opts.seed, PROJECTION_ATTEMPTS)? {
        Some(combination) => CertificateSearch::Found { combination, case: ReductionCase::Projection },
        None => CertificateSearch::NotFound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{enumerate_minors, int, MinorOrder};
    use crate::fixtures;

    fn found(k: &Subspace) -> (MinorCombination, ReductionCase) {
        match find_certificate_d_le_3(k, &RankOneOptions::default()).unwrap() {
            CertificateSearch::Found { combination, case } => (combination, case),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diag_pencil_uses_squares() {
        let k = fixtures::diag_pencil();
        let (c, case) = found(&k);
        assert_eq!(case, ReductionCase::SingleDirection);
        assert!(c.form().definiteness().is_psd());
        // Each selected minor is a product of two diagonal entries.
        let idx = enumerate_minors(4, 4, MinorOrder::Order(2)).unwrap();
        for i in c.support() {
            assert_eq!(idx[i].rows, idx[i].cols);
        }
    }

    #[test]
    fn rotation_uses_determinant() {
        let (c, _) = found(&fixtures::rotation());
        assert_eq!(c.beta(), &[int(1)]);
        assert_eq!(c.form(), &QuadraticForm::identity(2));
    }

    #[test]
    fn rank_one_reported() {
        let r = find_certificate_d_le_3(&fixtures::rank1_line(), &RankOneOptions::default()).unwrap();
        assert!(matches!(r, CertificateSearch::RankOne { .. }));
        assert!(find_certificate_d_le_3(&fixtures::kr_family(0), &RankOneOptions::default()).is_err());
    }

    #[test]
    fn skew_three_by_three() {
        // Row 0 and column 0 both read (z1, z2, z3); the lower block is a rotation in (z2, z3)
        // plus z1 on the diagonal, which keeps the pencil away from rank 1.
        let e = |i: usize| {
            let mut v = vec![int(0); 3];
            v[i] = int(1);
            v
        };
        let mut entries = vec![vec![int(0); 3]; 9];
        entries[0] = e(0);
        entries[1] = e(1);
        entries[2] = e(2);
        entries[3] = e(1);
        entries[6] = e(2);
        entries[4] = e(0);
        entries[8] = e(0);
        entries[5] = vec![int(0), int(1), int(2)];
        entries[7] = vec![int(0), int(-2), int(1)];
        let k = Subspace::from_entry_vectors(3, 3, 3, &entries).unwrap();
        let target = constructive_combination(&k).unwrap();
        let (c, _) = target.expect("certificate");
        assert!(c.form().definiteness().is_psd());
    }

    #[test]
    fn symmetric_pencil_without_rank_one_is_certified() {
        // Every row spans R³ and the canonical form is symmetric, so no reduction case fires.
        let k = fixtures::sym3_random(33);
        assert!(constructive_combination(&k).unwrap().is_none());
        let (c, case) = found(&k);
        assert_eq!(case, ReductionCase::Projection);
        assert!(c.form().definiteness().is_psd());
    }
}
