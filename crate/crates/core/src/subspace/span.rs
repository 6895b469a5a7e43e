use super::{parametrize, Subspace};
use crate::algebra::{
    enumerate_minors, independent_subset, monomials_of_degree, poly_det, vectors_rank, MinorOrder, MultiPoly, Rational,
};
use crate::error::{Error, Result};

/// The order-p minors of a pencil as polynomials in z, with an independent subset.
#[derive(Clone, Debug)]
pub struct MinorSpan {
    pub order: usize,
    pub polys: Vec<MultiPoly>,
    pub span_basis: Vec<usize>,
}

impl MinorSpan {
    pub fn dim(&self) -> usize {
        self.span_basis.len()
    }

    /// Coefficient vectors over the degree-`order` monomials.
    pub fn coefficient_rows(&self) -> Vec<Vec<Rational>> {
        let nvars = self.polys.first().map_or(0, MultiPoly::nvars);
        let mons = monomials_of_degree(nvars, self.order as u32);
        self.polys.iter().map(|p| p.coefficients_in(&mons)).collect()
    }
}

pub fn minor_span(k: &Subspace, order: usize) -> Result<MinorSpan> {
    let (m, n, d) = (k.m(), k.n(), k.d());
    if order < 2 || order > m.min(n) {
        return Err(Error::OrderOutOfRange { order, m, n });
    }
    let polys: Vec<MultiPoly> = if order == 2 {
        k.minor_forms().iter().map(|q| q.to_poly()).collect()
    } else {
        let pencil = parametrize(k);
        enumerate_minors(m, n, MinorOrder::Order(order))?
            .iter()
            .map(|idx| {
                let sub: Vec<Vec<MultiPoly>> =
                    idx.rows.iter().map(|&i| idx.cols.iter().map(|&j| pencil[i][j].clone()).collect()).collect();
                poly_det(&sub, d)
            })
            .collect()
    };
    let mons = monomials_of_degree(d, order as u32);
    let rows: Vec<Vec<Rational>> = polys.iter().map(|p| p.coefficients_in(&mons)).collect();
    let span_basis = independent_subset(&rows);
    Ok(MinorSpan { order, polys, span_basis })
}

/// Whether two minor spans (same variable count and order) are the same polynomial subspace.
pub fn same_polynomial_span(a: &MinorSpan, b: &MinorSpan) -> bool {
    if a.order != b.order {
        return false;
    }
    let ra: Vec<Vec<Rational>> = {
        let rows = a.coefficient_rows();
        a.span_basis.iter().map(|&i| rows[i].clone()).collect()
    };
    let rb: Vec<Vec<Rational>> = {
        let rows = b.coefficient_rows();
        b.span_basis.iter().map(|&i| rows[i].clone()).collect()
    };
    if ra.len() != rb.len() {
        return false;
    }
    if ra.is_empty() {
        return true;
    }
    let stacked: Vec<Vec<Rational>> = ra.iter().chain(&rb).cloned().collect();
    vectors_rank(&stacked) == ra.len()
}
