use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::matrix::RationalMatrix;
use super::rational::{to_f64, Rational};
use crate::error::{Error, Result};

pub type Exponent = Vec<u32>;

/// Sparse polynomial over Q in `nvars` variables; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rational::one());
        p
    }

    /// The linear form Σ c_l z_l.
    pub fn linear(coeffs: &[Rational]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, Rational)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch(format!("exponent of length {} for {nvars} variables", e.len())));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Rational> {
        &self.terms
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn homogeneous_part(&self, deg: u32) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == deg).map(|(e, c)| (e.clone(), c.clone())).collect();
        Self { nvars: self.nvars, terms }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    fn check_vars(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "polynomials over different variable counts");
    }

    pub fn eval(&self, z: &[Rational]) -> Result<Rational> {
        if z.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!("{} values for {} variables", z.len(), self.nvars)));
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in z.iter().zip(e) {
                if k > 0 {
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| to_f64(c) * z.iter().zip(e).map(|(x, &k)| x.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.nvars, Rational::one());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// g(w) = f(L w + shift), where L is nvars × k and the result lives in k variables.
    pub fn compose_linear(&self, l: &RationalMatrix, shift: &[Rational]) -> Result<Self> {
        if l.rows() != self.nvars || shift.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "substitution {}x{} with shift {} into {} variables",
                l.rows(),
                l.cols(),
                shift.len(),
                self.nvars
            )));
        }
        let k = l.cols();
        let subs: Vec<Self> = (0..self.nvars)
            .map(|i| &Self::linear(l.row(i)) + &Self::constant(k, shift[i].clone()))
            .collect();
        let mut cache: HashMap<(usize, u32), Self> = HashMap::new();
        let mut out = Self::zero(k);
        for (e, c) in &self.terms {
            let mut t = Self::constant(k, c.clone());
            for (i, &p) in e.iter().enumerate() {
                if p > 0 {
                    let pw = cache.entry((i, p)).or_insert_with(|| subs[i].pow(p));
                    t = &t * pw;
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Coefficients against an explicit monomial list; terms outside the list are ignored.
    pub fn coefficients_in(&self, monomials: &[Exponent]) -> Vec<Rational> {
        monomials.iter().map(|m| self.coeff(m)).collect()
    }
}

/// All exponent vectors of total degree `deg`, in lexicographically descending order.
pub fn monomials_of_degree(nvars: usize, deg: u32) -> Vec<Exponent> {
    fn rec(i: usize, left: u32, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[i] = k;
            rec(i + 1, left - k, cur, out);
        }
    }
    if nvars == 0 {
        return if deg == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(0, deg, &mut vec![0; nvars], &mut out);
    out
}

/// Determinant of a square matrix of polynomials by Laplace expansion memoized on column subsets.
pub fn poly_det(entries: &[Vec<MultiPoly>], nvars: usize) -> MultiPoly {
    let p = entries.len();
    assert!(p <= 24, "poly_det limited to small orders");
    let mut memo: HashMap<u32, MultiPoly> = HashMap::new();
    fn rec(row: usize, cols: u32, e: &[Vec<MultiPoly>], nvars: usize, memo: &mut HashMap<u32, MultiPoly>) -> MultiPoly {
        let p = e.len();
        if row == p {
            return MultiPoly::constant(nvars, Rational::one());
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = MultiPoly::zero(nvars);
        let mut sign_pos = true;
        for c in 0..p {
            if cols & (1 << c) != 0 {
                continue;
            }
            if !e[row][c].is_zero() {
                let sub = rec(row + 1, cols | (1 << c), e, nvars, memo);
                if !sub.is_zero() {
                    let t = &e[row][c] * &sub;
                    acc = if sign_pos { &acc + &t } else { &acc - &t };
                }
            }
            sign_pos = !sign_pos;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    rec(0, 0, entries, nvars, &mut memo)
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.check_vars(rhs);
        let mut acc: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponent = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        MultiPoly { nvars: self.nvars, terms: acc }
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}
