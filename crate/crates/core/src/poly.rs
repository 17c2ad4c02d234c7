//! Sparse multivariate polynomials and polynomial parametrizations
//! `t ↦ [φ_0(t) : … : φ_N(t)]` of projective varieties.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::Matrix;

/// Exponent vector of a monomial.
///
/// Ordered by total degree first; within one degree, larger exponents on
/// earlier variables come first (`t1^2 < t1*t2 < t2^2`). Iterating a
/// polynomial therefore lists `1, t1, …, tn, t1^2, t1*t2, …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(exps: Vec<u32>) -> Self {
        Exponent(exps)
    }

    pub fn zero(n_vars: usize) -> Self {
        Exponent(vec![0; n_vars])
    }

    pub fn unit(n_vars: usize, i: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[i] = 1;
        Exponent(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    field: Field,
    n_vars: usize,
    terms: BTreeMap<Exponent, Scalar>,
}

impl MultiPoly {
    pub fn zero(field: Field, n_vars: usize) -> Self {
        MultiPoly {
            field,
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_vars: usize, c: Scalar) -> Self {
        let mut p = MultiPoly::zero(c.field(), n_vars);
        p.add_term(Exponent::zero(n_vars), c);
        p
    }

    /// The variable `t_{i+1}` (0-based index `i`).
    pub fn var(field: Field, n_vars: usize, i: usize) -> Self {
        let mut p = MultiPoly::zero(field, n_vars);
        p.add_term(Exponent::unit(n_vars, i), field.one());
        p
    }

    pub fn monomial(coeff: Scalar, exps: Vec<u32>) -> Self {
        let n = exps.len();
        let mut p = MultiPoly::zero(coeff.field(), n);
        p.add_term(Exponent(exps), coeff);
        p
    }

    pub fn from_terms(
        field: Field,
        n_vars: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, Scalar)>,
    ) -> Result<Self> {
        let mut p = MultiPoly::zero(field, n_vars);
        for (e, c) in terms {
            if e.len() != n_vars {
                return Err(Error::DimensionMismatch {
                    expected: n_vars,
                    got: e.len(),
                });
            }
            if c.field() != field {
                return Err(Error::MixedField(field.to_string(), c.field().to_string()));
            }
            p.add_term(Exponent(e), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponent, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Scalar {
        self.terms
            .get(&Exponent(exps.to_vec()))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Exponent::degree).max()
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        let mut out = MultiPoly::zero(self.field, self.n_vars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n_vars, other.n_vars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.scale(&-self.field.one()))
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.n_vars, other.n_vars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.field, self.n_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.n_vars, self.field.one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn evaluate(&self, t: &[Scalar]) -> Result<Scalar> {
        if t.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: t.len(),
            });
        }
        let max_deg = self.total_degree().unwrap_or(0) as usize;
        let powers = power_table(self.field, t, max_deg);
        Ok(self.evaluate_with(&powers))
    }

    fn evaluate_with(&self, powers: &[Vec<Scalar>]) -> Scalar {
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (v, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    term = &term * &powers[v][k as usize];
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Formal partial derivative with respect to `t_{i+1}` (0-based `i`).
    pub fn partial_derivative(&self, i: usize) -> Result<MultiPoly> {
        if i >= self.n_vars {
            return Err(Error::IndexOutOfRange {
                index: i,
                n_vars: self.n_vars,
            });
        }
        let mut out = MultiPoly::zero(self.field, self.n_vars);
        for (e, c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut d = e.clone();
            d.0[i] -= 1;
            out.add_term(d, c * &self.field.from_u64(k as u64));
        }
        Ok(out)
    }

    /// Substitutes `subs[i]` for `t_{i+1}`; the result lives in the variables of `subs`.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<MultiPoly> {
        if subs.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                got: subs.len(),
            });
        }
        let target = subs.first().map_or(0, MultiPoly::n_vars);
        if let Some(bad) = subs.iter().find(|s| s.n_vars != target) {
            return Err(Error::DimensionMismatch {
                expected: target,
                got: bad.n_vars,
            });
        }
        let max_deg = self.total_degree().unwrap_or(0);
        let mut powers: Vec<Vec<MultiPoly>> = Vec::with_capacity(subs.len());
        for s in subs {
            let mut row = vec![MultiPoly::constant(target, self.field.one())];
            for k in 1..=max_deg as usize {
                let next = row[k - 1].mul(s);
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = MultiPoly::zero(self.field, target);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(target, c.clone());
            for (v, &k) in e.0.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&powers[v][k as usize]);
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }
}

fn power_table(field: Field, t: &[Scalar], max_deg: usize) -> Vec<Vec<Scalar>> {
    t.iter()
        .map(|x| {
            let mut row = Vec::with_capacity(max_deg + 1);
            row.push(field.one());
            for k in 1..=max_deg {
                let next = &row[k - 1] * x;
                row.push(next);
            }
            row
        })
        .collect()
}

/// Debug notation: `c*t1^a1*…*tn^an` terms joined by ` + `, graded order.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (v, &k) in e.0.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*t{}", v + 1)?,
                    _ => write!(f, "*t{}^{}", v + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

/// An affine map `s ↦ linear·s + offset` from `d` parameters to `n` parameters.
#[derive(Clone, Debug)]
pub struct AffineMap {
    /// `n × d`
    pub linear: Matrix,
    /// length `n`
    pub offset: Vec<Scalar>,
}

impl AffineMap {
    pub fn new(linear: Matrix, offset: Vec<Scalar>) -> Result<Self> {
        if offset.len() != linear.rows() {
            return Err(Error::DimensionMismatch {
                expected: linear.rows(),
                got: offset.len(),
            });
        }
        Ok(AffineMap { linear, offset })
    }

    pub fn linear_only(linear: Matrix) -> Self {
        let field = linear.field();
        let offset = vec![field.zero(); linear.rows()];
        AffineMap { linear, offset }
    }

    pub fn source_dim(&self) -> usize {
        self.linear.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.linear.rows()
    }
}

/// Second-order jet of a parametrization at a point.
#[derive(Clone, Debug)]
pub struct Taylor2Data {
    pub value: Vec<Scalar>,
    /// `n_params × (N+1)`; row `i` is `∂φ/∂t_i`.
    pub jacobian: Matrix,
    /// One row per pair `i ≤ j`, in the order of [`hessian_pairs`].
    pub hessians: Matrix,
}

impl Taylor2Data {
    pub fn hessian(&self, i: usize, j: usize) -> &[Scalar] {
        let n = self.jacobian.rows();
        self.hessians.row(pair_index(n, i.min(j), i.max(j)))
    }
}

/// Pairs `(i, j)` with `i ≤ j < n`, row-major.
pub fn hessian_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

pub(crate) fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    i * n - i * (i + 1) / 2 + j
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parametrization {
    n_params: usize,
    coords: Vec<MultiPoly>,
    label: String,
}

impl Parametrization {
    pub fn new(label: impl Into<String>, n_params: usize, coords: Vec<MultiPoly>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a parametrization needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|c| c.n_vars() != n_params) {
            return Err(Error::DimensionMismatch {
                expected: n_params,
                got: bad.n_vars(),
            });
        }
        let field = coords[0].field();
        if let Some(bad) = coords.iter().find(|c| c.field() != field) {
            return Err(Error::MixedField(
                field.to_string(),
                bad.field().to_string(),
            ));
        }
        if coords.iter().all(MultiPoly::is_zero) {
            return Err(Error::InvalidArgument("all coordinates are zero".into()));
        }
        Ok(Parametrization {
            n_params,
            coords,
            label: label.into(),
        })
    }

    pub fn field(&self) -> Field {
        self.coords[0].field()
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    /// `N` of the ambient `P^N`.
    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[MultiPoly] {
        &self.coords
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    fn check_point(&self, t: &[Scalar]) -> Result<()> {
        if t.len() != self.n_params {
            return Err(Error::DimensionMismatch {
                expected: self.n_params,
                got: t.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, t: &[Scalar]) -> Result<Vec<Scalar>> {
        self.check_point(t)?;
        let max_deg = self
            .coords
            .iter()
            .filter_map(MultiPoly::total_degree)
            .max()
            .unwrap_or(0);
        let powers = power_table(self.field(), t, max_deg as usize);
        Ok(self
            .coords
            .iter()
            .map(|c| c.evaluate_with(&powers))
            .collect())
    }

    /// `φ(t0)` and the `n_params × (N+1)` Jacobian at `t0`.
    pub fn value_and_jacobian(&self, t0: &[Scalar]) -> Result<(Vec<Scalar>, Matrix)> {
        self.check_point(t0)?;
        let field = self.field();
        let max_deg = self
            .coords
            .iter()
            .filter_map(MultiPoly::total_degree)
            .max()
            .unwrap_or(0);
        let powers = power_table(field, t0, max_deg as usize);
        let value: Vec<Scalar> = self
            .coords
            .iter()
            .map(|c| c.evaluate_with(&powers))
            .collect();
        let mut jac = Vec::with_capacity(self.n_params * value.len());
        for i in 0..self.n_params {
            for c in &self.coords {
                jac.push(c.partial_derivative(i)?.evaluate_with(&powers));
            }
        }
        let width = value.len();
        Ok((value, Matrix::new(field, self.n_params, width, jac)?))
    }

    /// Value, first partials and second partials at `t0`.
    pub fn taylor2(&self, t0: &[Scalar]) -> Result<Taylor2Data> {
        self.check_point(t0)?;
        let field = self.field();
        let n = self.n_params;
        let width = self.coords.len();
        let max_deg = self
            .coords
            .iter()
            .filter_map(MultiPoly::total_degree)
            .max()
            .unwrap_or(0);
        let powers = power_table(field, t0, max_deg as usize);

        let value: Vec<Scalar> = self
            .coords
            .iter()
            .map(|c| c.evaluate_with(&powers))
            .collect();
        let firsts: Vec<Vec<MultiPoly>> = (0..n)
            .map(|i| {
                self.coords
                    .iter()
                    .map(|c| c.partial_derivative(i))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;

        let mut jac = Vec::with_capacity(n * width);
        for row in &firsts {
            jac.extend(row.iter().map(|p| p.evaluate_with(&powers)));
        }
        let pairs = hessian_pairs(n);
        let mut hess = Vec::with_capacity(pairs.len() * width);
        for &(i, j) in &pairs {
            for p in &firsts[i] {
                hess.push(p.partial_derivative(j)?.evaluate_with(&powers));
            }
        }
        Ok(Taylor2Data {
            value,
            jacobian: Matrix::new(field, n, width, jac)?,
            hessians: Matrix::new(field, pairs.len(), width, hess)?,
        })
    }

    /// `ψ_k = Σ_j L[k][j]·φ_j`, landing in `P^{rows(L)-1}`.
    pub fn compose_linear(&self, l: &Matrix) -> Result<Parametrization> {
        if l.cols() != self.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coords.len(),
                got: l.cols(),
            });
        }
        let field = self.field();
        let coords: Vec<MultiPoly> = l
            .row_iter()
            .map(|row| {
                row.iter()
                    .zip(&self.coords)
                    .filter(|(c, _)| !c.is_zero())
                    .fold(MultiPoly::zero(field, self.n_params), |acc, (c, p)| {
                        acc.add(&p.scale(c))
                    })
            })
            .collect();
        if coords.iter().all(MultiPoly::is_zero) {
            return Err(Error::DegenerateProjection);
        }
        if coords.len() < 2 {
            return Err(Error::InvalidArgument(
                "projection target must be at least P^1".into(),
            ));
        }
        Ok(Parametrization {
            n_params: self.n_params,
            coords,
            label: self.label.clone(),
        })
    }

    /// Precomposes with an affine map of full rank `d = map.source_dim()`.
    pub fn substitute_affine(&self, map: &AffineMap) -> Result<Parametrization> {
        if map.target_dim() != self.n_params {
            return Err(Error::DimensionMismatch {
                expected: self.n_params,
                got: map.target_dim(),
            });
        }
        let d = map.source_dim();
        if d > self.n_params {
            return Err(Error::InvalidArgument(format!(
                "cannot substitute {d} parameters into {} parameters",
                self.n_params
            )));
        }
        let rank = map.linear.rank();
        if rank != d {
            return Err(Error::RankDeficientMap { rank, expected: d });
        }
        let field = self.field();
        let subs: Vec<MultiPoly> = (0..self.n_params)
            .map(|k| {
                let mut p = MultiPoly::constant(d, map.offset[k].clone());
                for j in 0..d {
                    p = p.add(&MultiPoly::var(field, d, j).scale(map.linear.get(k, j)));
                }
                p
            })
            .collect();
        let coords = self
            .coords
            .iter()
            .map(|c| c.compose(&subs))
            .collect::<Result<Vec<_>>>()?;
        Ok(Parametrization {
            n_params: d,
            coords,
            label: self.label.clone(),
        })
    }

    /// Matrix of coefficients: one row per coordinate, one column per monomial.
    pub fn coefficient_matrix(&self) -> Matrix {
        let monomials: Vec<&Exponent> = {
            let mut all: Vec<&Exponent> = self.coords.iter().flat_map(|c| c.terms.keys()).collect();
            all.sort();
            all.dedup();
            all
        };
        let field = self.field();
        let mut m = Matrix::zeros(field, self.coords.len(), monomials.len());
        for (i, c) in self.coords.iter().enumerate() {
            for (j, e) in monomials.iter().enumerate() {
                if let Some(v) = c.terms.get(*e) {
                    m.set(i, j, v.clone());
                }
            }
        }
        m
    }
}

impl fmt::Display for Parametrization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} ({} params, P^{})",
            self.label,
            self.n_params,
            self.ambient_dim()
        )?;
        for (k, c) in self.coords.iter().enumerate() {
            writeln!(f, "  x{k} = {c}")?;
        }
        Ok(())
    }
}
