//! Fields of non-degenerate indefinite quadratic forms and the
//! pseudo-Euclidean linear algebra they induce.
//!
//! A form is stored as its symmetric matrix `J_x`, so that `𝒥_x(v) = ⟨J_x v, v⟩`.
//! Canonical bases always list the negative directions first.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{check_dim, dot, inverse, sym_eigen, Matrix};
use crate::scalar::Scalar;

/// Relative threshold under which an eigenvalue of `J_x` counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Default relative tolerance of the `Zero` cone class.
pub const DEFAULT_CONE_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;

/// Position of a vector relative to the cones of a form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ConeClass {
    Positive,
    Negative,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
enum FormKind<T> {
    Constant { matrix: Matrix<T>, inverse: Matrix<T> },
    /// Piecewise-constant field: the matrix of the nearest sample point.
    Sampled(Vec<(Vec<T>, Matrix<T>)>),
}

/// A point-dependent non-degenerate symmetric bilinear form of fixed index.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticFormField<T> {
    dim: usize,
    index: usize,
    kind: FormKind<T>,
}

/// Basis change `B` with `Bᵀ J B = diag(-1,…,-1,+1,…,+1)`.
#[derive(Debug, Clone)]
pub struct LagrangeBasis<T> {
    pub basis: Matrix<T>,
    pub negatives: usize,
    pub positives: usize,
}

impl<T: Scalar> LagrangeBasis<T> {
    pub fn signature(&self) -> (usize, usize) {
        (self.negatives, self.positives)
    }

    /// Columns spanning the standard negative subspace.
    pub fn negative_axes(&self) -> Vec<Vec<T>> {
        (0..self.negatives).map(|j| self.basis.col(j)).collect()
    }

    /// Columns spanning the standard positive subspace.
    pub fn positive_axes(&self) -> Vec<Vec<T>> {
        (self.negatives..self.negatives + self.positives).map(|j| self.basis.col(j)).collect()
    }
}

/// Result of pseudo Gram–Schmidt: vectors with `⟨J uᵢ, uⱼ⟩ = signs[i]·δᵢⱼ`.
#[derive(Debug, Clone)]
pub struct JOrthonormalBasis<T> {
    pub vectors: Vec<Vec<T>>,
    pub signs: Vec<T>,
}

/// Counts eigenvalue signs of a symmetric matrix after checking it is
/// non-degenerate. Returns `(negatives, positives)`.
pub fn signature<T: Scalar>(j: &Matrix<T>) -> Result<(usize, usize)> {
    let eig = sym_eigen(j);
    let scale = eig.spectral_norm();
    let tol = T::c(DEGENERACY_TOL) * scale;
    if let Some(bad) = eig.values.iter().find(|v| v.abs() < tol || scale == T::zero()) {
        return Err(Error::NonDegeneracyViolation { eigenvalue: bad.as_f64(), tolerance: tol.as_f64() });
    }
    let neg = eig.values.iter().filter(|v| **v < T::zero()).count();
    Ok((neg, j.rows() - neg))
}

/// Lagrange normalization of a single symmetric matrix (definite matrices allowed).
pub fn lagrange_normalize_matrix<T: Scalar>(j: &Matrix<T>) -> Result<LagrangeBasis<T>> {
    let (negatives, positives) = signature(j)?;
    let eig = sym_eigen(j);
    let n = j.rows();
    let mut basis = Matrix::zeros(n, n);
    for (c, &lambda) in eig.values.iter().enumerate() {
        let mut col = eig.vectors.col(c);
        if let Some(first) = col.iter().find(|x| x.abs() > T::c(1e-14)) {
            if *first < T::zero() {
                col.iter_mut().for_each(|x| *x = -*x);
            }
        }
        let s = T::one() / lambda.abs().sqrt();
        basis.set_col(c, &col.iter().map(|&x| x * s).collect::<Vec<_>>());
    }
    Ok(LagrangeBasis { basis, negatives, positives })
}

/// `J⁻¹ Lᵀ J`.
pub fn j_adjoint_matrix<T: Scalar>(j: &Matrix<T>, j_inv: &Matrix<T>, l: &Matrix<T>) -> Matrix<T> {
    &(j_inv * &l.transpose()) * j
}

impl<T: Scalar> QuadraticFormField<T> {
    /// Constant form given by a symmetric matrix.
    pub fn constant(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        let asym = matrix.asymmetry();
        if asym > T::c(SYMMETRY_TOL) * matrix.max_abs().max(T::one()) {
            return Err(Error::NotSymmetric(asym.as_f64()));
        }
        let matrix = matrix.symmetrize();
        let (index, _) = signature(&matrix)?;
        let dim = matrix.rows();
        if index == 0 || index == dim {
            return Err(Error::InvalidIndex { index, dim });
        }
        let inverse = inverse(&matrix)?;
        Ok(QuadraticFormField { dim, index, kind: FormKind::Constant { matrix, inverse } })
    }

    pub fn diagonal(diag: &[T]) -> Result<Self> {
        Self::constant(Matrix::from_diag(diag))
    }

    /// Nearest-sample field built from `(point, J)` pairs sharing one index.
    pub fn sampled(samples: Vec<(Vec<T>, Matrix<T>)>) -> Result<Self> {
        let Some((p0, m0)) = samples.first() else {
            return Err(Error::InvalidSpec("sampled form needs at least one sample".into()));
        };
        let dim = m0.rows();
        check_dim(p0, dim)?;
        let (index, _) = signature(m0)?;
        if index == 0 || index == dim {
            return Err(Error::InvalidIndex { index, dim });
        }
        let mut cleaned = Vec::with_capacity(samples.len());
        for (p, m) in samples {
            check_dim(&p, dim)?;
            if m.rows() != dim || !m.is_square() {
                return Err(Error::DimensionMismatch { expected: dim, found: m.rows() });
            }
            let m = m.symmetrize();
            let (q, _) = signature(&m)?;
            if q != index {
                return Err(Error::InvalidSpec(format!("form index varies across samples ({index} vs {q})")));
            }
            cleaned.push((p, m));
        }
        if cleaned.len() == 1 {
            let (_, m) = cleaned.pop().expect("one sample");
            return Self::constant(m);
        }
        Ok(QuadraticFormField { dim, index, kind: FormKind::Sampled(cleaned) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of negative eigenvalues `q`.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, FormKind::Constant { .. })
    }

    pub fn matrix_at(&self, x: &[T]) -> &Matrix<T> {
        match &self.kind {
            FormKind::Constant { matrix, .. } => matrix,
            FormKind::Sampled(samples) => {
                let mut best = 0;
                let mut best_d = T::infinity();
                for (i, (p, _)) in samples.iter().enumerate() {
                    let d: T = p.iter().zip(x).map(|(&a, &b)| (a - b) * (a - b)).sum();
                    if d < best_d {
                        best_d = d;
                        best = i;
                    }
                }
                &samples[best].1
            }
        }
    }

    fn inverse_at(&self, x: &[T]) -> Result<Matrix<T>> {
        match &self.kind {
            FormKind::Constant { inverse, .. } => Ok(inverse.clone()),
            FormKind::Sampled(_) => inverse(self.matrix_at(x)),
        }
    }

    /// The form `-𝒥` (index `n - q`).
    pub fn negated(&self) -> Self {
        let kind = match &self.kind {
            FormKind::Constant { matrix, inverse } => FormKind::Constant { matrix: -matrix, inverse: -inverse },
            FormKind::Sampled(s) => FormKind::Sampled(s.iter().map(|(p, m)| (p.clone(), -m)).collect()),
        };
        QuadraticFormField { dim: self.dim, index: self.dim - self.index, kind }
    }

    /// `𝒥_x(v) = ⟨J_x v, v⟩`.
    pub fn evaluate(&self, x: &[T], v: &[T]) -> Result<T> {
        check_dim(v, self.dim)?;
        Ok(self.matrix_at(x).bilinear(v, v))
    }

    /// `⟨J_x v, w⟩`.
    pub fn bilinear(&self, x: &[T], v: &[T], w: &[T]) -> Result<T> {
        check_dim(v, self.dim)?;
        check_dim(w, self.dim)?;
        Ok(self.matrix_at(x).bilinear(v, w))
    }

    pub fn cone_membership(&self, x: &[T], v: &[T], tol: T) -> Result<ConeClass> {
        let value = self.evaluate(x, v)?;
        Ok(classify_value(value, dot(v, v), tol))
    }

    pub fn lagrange_normalize(&self, x: &[T]) -> Result<LagrangeBasis<T>> {
        lagrange_normalize_matrix(self.matrix_at(x))
    }

    /// Basis of `{w : ⟨J_x v, w⟩ = 0 for all v in subspace}`, Euclidean-orthonormal.
    pub fn pseudo_orthogonal_complement(&self, x: &[T], subspace: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        for v in subspace {
            check_dim(v, self.dim)?;
        }
        let j = self.matrix_at(x);
        let k = subspace.len();
        if k == 0 {
            return Ok((0..self.dim).map(|i| crate::linalg::unit(self.dim, i)).collect());
        }
        let jv: Vec<Vec<T>> = subspace.iter().map(|v| j.mul_vec(v)).collect();
        let gram = Matrix::from_fn(k, k, |a, b| dot(&jv[a], &subspace[b]));
        let eig = sym_eigen(&gram);
        let scale = subspace.iter().map(|v| dot(v, v)).fold(T::zero(), T::max) * sym_eigen(j).spectral_norm();
        if eig.values.iter().any(|l| l.abs() <= T::c(DEGENERACY_TOL) * scale) {
            return Err(Error::DegenerateSubspace);
        }
        let gram_inv = inverse(&gram).map_err(|_| Error::DegenerateSubspace)?;
        // I - V G⁻¹ (JV)ᵀ projects onto the J-orthogonal complement.
        let n = self.dim;
        let mut proj = Matrix::identity(n);
        for a in 0..k {
            for b in 0..k {
                let g = gram_inv[(a, b)];
                for r in 0..n {
                    for c in 0..n {
                        proj[(r, c)] = proj[(r, c)] - subspace[a][r] * g * jv[b][c];
                    }
                }
            }
        }
        let comp = crate::linalg::orthonormalize(&proj.columns(), T::c(1e-8));
        if comp.len() + k != n {
            return Err(Error::DegenerateSubspace);
        }
        Ok(comp)
    }

    /// Pseudo Gram–Schmidt: returns a basis of the same span with
    /// `⟨J uᵢ, uⱼ⟩ = ±δᵢⱼ`.
    ///
    /// A candidate that is (numerically) `𝒥`-null is deferred; when every
    /// remaining candidate is null, a sum or difference of two candidates with
    /// non-zero mutual pairing is used instead.
    pub fn pseudo_gram_schmidt(&self, x: &[T], basis: &[Vec<T>]) -> Result<JOrthonormalBasis<T>> {
        for v in basis {
            check_dim(v, self.dim)?;
        }
        let j = self.matrix_at(x);
        let tol = T::c(1e-10);
        let mut remaining: Vec<Vec<T>> = basis.to_vec();
        let mut out = JOrthonormalBasis { vectors: Vec::new(), signs: Vec::new() };

        let reduce = |w: &[T], out: &JOrthonormalBasis<T>| -> Vec<T> {
            let mut w = w.to_vec();
            for _ in 0..2 {
                for (u, &s) in out.vectors.iter().zip(&out.signs) {
                    let c = s * j.bilinear(&w, u);
                    for (wi, &ui) in w.iter_mut().zip(u) {
                        *wi = *wi - c * ui;
                    }
                }
            }
            w
        };

        while !remaining.is_empty() {
            let reduced: Vec<Vec<T>> = remaining.iter().map(|w| reduce(w, &out)).collect();
            let usable = |w: &Vec<T>| {
                let nn = dot(w, w);
                nn > T::zero() && j.bilinear(w, w).abs() > tol * nn
            };
            let pick = reduced.iter().position(usable);
            let chosen = match pick {
                Some(i) => {
                    remaining.remove(i);
                    reduced[i].clone()
                }
                None => {
                    // every candidate is null: look for a non-null combination
                    let mut found = None;
                    'outer: for a in 0..reduced.len() {
                        for b in (a + 1)..reduced.len() {
                            for sgn in [T::one(), -T::one()] {
                                let w: Vec<T> = reduced[a].iter().zip(&reduced[b]).map(|(&p, &q)| p + sgn * q).collect();
                                if usable(&w) {
                                    found = Some((a, w));
                                    break 'outer;
                                }
                            }
                        }
                    }
                    match found {
                        Some((a, w)) => {
                            remaining.remove(a);
                            w
                        }
                        None => return Err(Error::DegenerateSubspace),
                    }
                }
            };
            let value = j.bilinear(&chosen, &chosen);
            let s = value.signum();
            let scale = T::one() / value.abs().sqrt();
            out.vectors.push(chosen.iter().map(|&c| c * scale).collect());
            out.signs.push(s);
        }
        Ok(out)
    }

    /// Pseudo-adjoint `L⁺ = J_x⁻¹ Lᵀ J_x`.
    pub fn j_adjoint(&self, x: &[T], l: &Matrix<T>) -> Result<Matrix<T>> {
        if l.rows() != self.dim || l.cols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: l.rows() });
        }
        Ok(j_adjoint_matrix(self.matrix_at(x), &self.inverse_at(x)?, l))
    }
}

/// Cone class of a vector with form value `value` and squared norm `norm_sq`.
pub fn classify_value<T: Scalar>(value: T, norm_sq: T, tol: T) -> ConeClass {
    if value > tol * norm_sq {
        ConeClass::Positive
    } else if value < -tol * norm_sq {
        ConeClass::Negative
    } else {
        ConeClass::Zero
    }
}

/// Textual form specification accepted from the command line and config files.
#[derive(Debug, Clone, PartialEq)]
pub enum FormSpec {
    /// `diag:a,b,...`
    Diagonal(Vec<f64>),
    /// `matrix:[...]`, row-major
    Dense(Vec<f64>),
    /// `adapted` or `adapted:<splitting.json>`
    Adapted(Option<String>),
}

impl FormSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let numbers = |body: &str| -> Result<Vec<f64>> {
            body.split(|c: char| c == ',' || c.is_whitespace())
                .map(|t| t.trim_matches(|c| c == '[' || c == ']'))
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().map_err(|_| Error::InvalidSpec(format!("bad number `{t}` in form"))))
                .collect()
        };
        if let Some(body) = s.strip_prefix("diag:") {
            let v = numbers(body)?;
            if v.is_empty() {
                return Err(Error::InvalidSpec("empty diagonal form".into()));
            }
            Ok(FormSpec::Diagonal(v))
        } else if let Some(body) = s.strip_prefix("matrix:") {
            let v = numbers(body)?;
            let n = (v.len() as f64).sqrt().round() as usize;
            if n == 0 || n * n != v.len() {
                return Err(Error::InvalidSpec(format!("matrix form needs n² entries, got {}", v.len())));
            }
            Ok(FormSpec::Dense(v))
        } else if s == "adapted" {
            Ok(FormSpec::Adapted(None))
        } else if let Some(path) = s.strip_prefix("adapted:") {
            Ok(FormSpec::Adapted(Some(path.to_string())))
        } else {
            Err(Error::InvalidSpec(format!("unrecognized form `{s}` (expected diag:, matrix: or adapted)")))
        }
    }

    /// Constant form for `diag:` and `matrix:` specifications.
    pub fn build_constant<T: Scalar>(&self) -> Result<QuadraticFormField<T>> {
        match self {
            FormSpec::Diagonal(d) => QuadraticFormField::diagonal(&d.iter().map(|&x| T::c(x)).collect::<Vec<_>>()),
            FormSpec::Dense(v) => {
                let n = (v.len() as f64).sqrt().round() as usize;
                QuadraticFormField::constant(Matrix::from_row_major(n, n, v.iter().map(|&x| T::c(x)).collect())?)
            }
            FormSpec::Adapted(_) => Err(Error::InvalidSpec("adapted forms are built from a splitting".into())),
        }
    }
}

impl fmt::Display for FormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        match self {
            FormSpec::Diagonal(d) => write!(f, "diag:{}", join(d)),
            FormSpec::Dense(v) => write!(f, "matrix:[{}]", join(v)),
            FormSpec::Adapted(None) => write!(f, "adapted"),
            FormSpec::Adapted(Some(p)) => write!(f, "adapted:{p}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j1() -> QuadraticFormField<f64> {
        QuadraticFormField::<f64>::diagonal(&[-1.0, 1.0, 1.0]).unwrap()
    }

    const O: [f64; 3] = [0.0; 3];

    #[test]
    fn evaluate_examples() {
        let j = j1();
        assert_eq!(j.evaluate(&O, &[1.0, 0.0, 0.0]).unwrap(), -1.0);
        assert_eq!(j.evaluate(&O, &[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(j.evaluate(&O, &[1.0, 1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(j.evaluate(&O, &[1.0, 1.0]).unwrap_err(), Error::DimensionMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn cone_examples() {
        let j = j1();
        assert_eq!(j.cone_membership(&O, &[0.0, 1.0, 0.0], 1e-12).unwrap(), ConeClass::Positive);
        assert_eq!(j.cone_membership(&O, &[1.0, 0.0, 0.0], 1e-12).unwrap(), ConeClass::Negative);
        assert_eq!(j.cone_membership(&O, &[1.0, 1.0, 0.0], 1e-12).unwrap(), ConeClass::Zero);
    }

    #[test]
    fn lagrange_diagonal() {
        let b = lagrange_normalize_matrix(&Matrix::from_diag(&[-4.0_f64, 9.0])).unwrap();
        assert_eq!(b.signature(), (1, 1));
        assert!((b.basis[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((b.basis[(1, 1)] - 1.0 / 3.0).abs() < 1e-15);
        assert!(b.basis[(0, 1)].abs() < 1e-15 && b.basis[(1, 0)].abs() < 1e-15);
    }

    #[test]
    fn lagrange_identity_and_swap() {
        let b = lagrange_normalize_matrix(&Matrix::<f64>::identity(3)).unwrap();
        assert_eq!(b.signature(), (0, 3));
        assert!((&b.basis - &Matrix::identity(3)).max_abs() < 1e-15);

        let swap = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let b = lagrange_normalize_matrix(&swap).unwrap();
        assert_eq!(b.signature(), (1, 1));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b.basis.col(0)[0] - r).abs() < 1e-14 && (b.basis.col(0)[1] + r).abs() < 1e-14);
        assert!((b.basis.col(1)[0] - r).abs() < 1e-14 && (b.basis.col(1)[1] - r).abs() < 1e-14);
        let canon = &(&b.basis.transpose() * &swap) * &b.basis;
        assert!((&canon - &Matrix::from_diag(&[-1.0, 1.0])).max_abs() < 1e-10);
    }

    #[test]
    fn degenerate_form_rejected() {
        let err = QuadraticFormField::<f64>::diagonal(&[-1.0, 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonDegeneracyViolation { .. }));
        assert!(matches!(QuadraticFormField::<f64>::diagonal(&[1.0, 2.0]).unwrap_err(), Error::InvalidIndex { .. }));
    }

    #[test]
    fn complement_examples() {
        let j = j1();
        let c = j.pseudo_orthogonal_complement(&O, &[vec![0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(c.len(), 2);
        for v in &c {
            assert!(v[2].abs() < 1e-14);
        }
        // a J-null direction cannot be split off
        assert_eq!(j.pseudo_orthogonal_complement(&O, &[vec![1.0, 1.0, 0.0]]).unwrap_err(), Error::DegenerateSubspace);

        let plane = QuadraticFormField::<f64>::diagonal(&[-1.0, 1.0]).unwrap();
        let c = plane.pseudo_orthogonal_complement(&[0.0, 0.0], &[vec![1.0, 2.0]]).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0][0] * 1.0 - c[0][1] * 2.0).abs() < 1e-14);
        assert!((c[0][0] / c[0][1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gram_schmidt_examples() {
        let j = QuadraticFormField::<f64>::diagonal(&[-1.0, 1.0]).unwrap();
        let z = [0.0, 0.0];
        let b = j.pseudo_gram_schmidt(&z, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(b.vectors, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);

        let b = j.pseudo_gram_schmidt(&z, &[vec![2.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!((b.vectors[0][0].abs() - 1.0).abs() < 1e-14 && b.vectors[0][1].abs() < 1e-14);
        assert!((b.vectors[1][1].abs() - 1.0).abs() < 1e-14 && b.vectors[1][0].abs() < 1e-14);

        // both inputs are null vectors
        let b = j.pseudo_gram_schmidt(&z, &[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap();
        assert_eq!(b.vectors.len(), 2);
        for a in 0..2 {
            for c in 0..2 {
                let g = j.bilinear(&z, &b.vectors[a], &b.vectors[c]).unwrap();
                let expect = if a == c { b.signs[a] } else { 0.0 };
                assert!((g - expect).abs() < 1e-10);
            }
        }

        // a single null vector spans a degenerate subspace
        assert_eq!(j.pseudo_gram_schmidt(&z, &[vec![1.0, 1.0]]).unwrap_err(), Error::DegenerateSubspace);
    }

    #[test]
    fn adjoint_examples() {
        let z = [0.0, 0.0];
        let j = QuadraticFormField::<f64>::diagonal(&[-1.0, 1.0]).unwrap();
        let (a, b, c, d) = (1.5, -2.0, 0.25, 3.0);
        let l = Matrix::from_rows(&[vec![a, b], vec![c, d]]).unwrap();
        let adj = j.j_adjoint(&z, &l).unwrap();
        let expect = Matrix::from_rows(&[vec![a, -c], vec![-b, d]]).unwrap();
        assert!((&adj - &expect).max_abs() < 1e-15);
        let jm = j.matrix_at(&z);
        for v in [[1.0, 0.0], [0.0, 1.0]] {
            for w in [[1.0, 0.0], [0.0, 1.0]] {
                let lhs = jm.bilinear(&l.mul_vec(&v), &w);
                let rhs = jm.bilinear(&v, &adj.mul_vec(&w));
                assert!((lhs - rhs).abs() < 1e-14);
            }
        }

        let s: f64 = 0.7;
        let u = Matrix::from_rows(&[vec![s.cosh(), s.sinh()], vec![s.sinh(), s.cosh()]]).unwrap();
        let prod = &j.j_adjoint(&z, &u).unwrap() * &u;
        assert!((&prod - &Matrix::identity(2)).max_abs() < 1e-14);
    }

    #[test]
    fn form_spec_strings() {
        assert_eq!(FormSpec::parse("diag:-1,1,1").unwrap(), FormSpec::Diagonal(vec![-1.0, 1.0, 1.0]));
        assert_eq!(FormSpec::parse("matrix:[0,1,1,0]").unwrap(), FormSpec::Dense(vec![0.0, 1.0, 1.0, 0.0]));
        assert_eq!(FormSpec::parse("matrix:[[0,1],[1,0]]").unwrap(), FormSpec::Dense(vec![0.0, 1.0, 1.0, 0.0]));
        assert_eq!(FormSpec::parse("adapted").unwrap(), FormSpec::Adapted(None));
        assert!(FormSpec::parse("matrix:[1,2,3]").is_err());
        assert!(FormSpec::parse("hyperbolic").is_err());
        let f: QuadraticFormField<f64> = FormSpec::parse("matrix:[0,1,1,0]").unwrap().build_constant().unwrap();
        assert_eq!(f.index(), 1);
    }

    #[test]
    fn sampled_form_rejects_mixed_index() {
        let a = (vec![0.0, 0.0], Matrix::from_diag(&[-1.0, 1.0]));
        let b = (vec![1.0, 0.0], Matrix::from_diag(&[1.0, 1.0]));
        assert!(QuadraticFormField::sampled(vec![a.clone(), b]).is_err());
        let c = (vec![1.0, 0.0], Matrix::from_diag(&[-2.0, 1.0]));
        let f = QuadraticFormField::sampled(vec![a, c]).unwrap();
        assert!(!f.is_constant());
        assert_eq!(f.matrix_at(&[0.9, 0.0])[(0, 0)], -2.0);
    }
}
