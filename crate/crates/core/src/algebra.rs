//! Finite-dimensional von Neumann algebra kernel.
//!
//! An [`Algebra`] is a direct sum of full complex matrix blocks `M_{n_k}(ℂ)`
//! with strictly positive trace weights `w_k`; its trace is
//! `τ(x) = Σ_k w_k Tr(x_k)`, faithful and finite at this scale. [`Element`]s
//! are block-diagonal complex matrices carrying a shared algebra reference;
//! `L²(𝒜,τ)` is the element space with inner product `(x,y) = τ(x*y)`,
//! conjugate-linear in the first slot.
//!
//! Coordinates: the canonical complex basis ("canonical-v1") is the weighted
//! matrix units `E^{(k)}_{ij}/√w_k` ordered by block, then row-major; the
//! hermitian basis is the generalized Gell-Mann family per block (diagonal
//! units, then symmetric and antisymmetric pairs for `i < j`), orthonormal
//! for the same inner product and spanning the Hermitian part over ℝ.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

/// Direct sum of full matrix blocks with strictly positive trace weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Algebra {
    block_dims: Vec<usize>,
    trace_weights: Vec<f64>,
    offsets: Vec<usize>,
}

/// Shared handle; elements and operators hold one of these.
pub type AlgebraRef = Arc<Algebra>;

impl Algebra {
    pub fn new(block_dims: Vec<usize>, trace_weights: Vec<f64>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.len() != trace_weights.len() {
            return Err(Error::InvalidAlgebra(format!(
                "need matching nonempty dims/weights, got {} dims and {} weights",
                block_dims.len(),
                trace_weights.len()
            )));
        }
        if block_dims.contains(&0) {
            return Err(Error::InvalidAlgebra("every block dimension must be >= 1".into()));
        }
        if trace_weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
            return Err(Error::InvalidAlgebra(
                "every trace weight must be strictly positive and finite".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(block_dims.len());
        let mut acc = 0usize;
        for &n in &block_dims {
            offsets.push(acc);
            acc += n * n;
        }
        Ok(Algebra {
            block_dims,
            trace_weights,
            offsets,
        })
    }

    /// Single full matrix block with unit weight.
    pub fn factor(n: usize) -> AlgebraRef {
        Arc::new(Algebra::new(vec![n], vec![1.0]).expect("valid factor"))
    }

    pub fn shared(block_dims: Vec<usize>, trace_weights: Vec<f64>) -> Result<AlgebraRef> {
        Ok(Arc::new(Algebra::new(block_dims, trace_weights)?))
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn trace_weights(&self) -> &[f64] {
        &self.trace_weights
    }

    /// Complex dimension of `L²`, `Σ_k n_k²`.
    pub fn dim_l2(&self) -> usize {
        self.offsets.last().unwrap() + {
            let n = *self.block_dims.last().unwrap();
            n * n
        }
    }

    /// `τ(1) = Σ_k w_k n_k`.
    pub fn total_trace(&self) -> f64 {
        self.block_dims
            .iter()
            .zip(&self.trace_weights)
            .map(|(&n, &w)| w * n as f64)
            .sum()
    }

    /// Flat coordinate index of the weighted matrix unit `E^{(k)}_{ij}/√w_k`.
    pub fn coord_index(&self, block: usize, i: usize, j: usize) -> usize {
        self.offsets[block] + i * self.block_dims[block] + j
    }

    /// Inverse of [`Algebra::coord_index`].
    pub fn coord_position(&self, idx: usize) -> (usize, usize, usize) {
        let block = match self.offsets.binary_search(&idx) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        let n = self.block_dims[block];
        let rel = idx - self.offsets[block];
        (block, rel / n, rel % n)
    }

    /// Index permutation implementing the star operation on coordinates:
    /// `coords(x*)[m] = conj(coords(x)[σ(m)])` with `σ` swapping `(i,j) ↔ (j,i)`.
    pub fn star_index(&self, idx: usize) -> usize {
        let (k, i, j) = self.coord_position(idx);
        self.coord_index(k, j, i)
    }

    /// Tensor with `M_n`: block dims multiply by `n`, weights unchanged
    /// (the amplified trace is `τ ⊗ tr` with `tr` the unnormalized trace,
    /// so `τ⊗tr(1) = n·τ(1)`).
    pub fn amplify(&self, n: usize) -> AlgebraRef {
        Arc::new(
            Algebra::new(
                self.block_dims.iter().map(|&d| d * n).collect(),
                self.trace_weights.clone(),
            )
            .expect("amplified algebra is valid"),
        )
    }

    /// Block-indicator central projections; every central element is a
    /// complex combination of these.
    pub fn center_basis(self: &AlgebraRef) -> Vec<Element> {
        (0..self.num_blocks())
            .map(|k| {
                let blocks = self
                    .block_dims
                    .iter()
                    .enumerate()
                    .map(|(l, &d)| {
                        if l == k {
                            DMatrix::identity(d, d)
                        } else {
                            DMatrix::zeros(d, d)
                        }
                    })
                    .collect();
                Element::from_blocks(self.clone(), blocks).expect("shapes match")
            })
            .collect()
    }

    /// Central element with value `values[k]` on block `k`.
    pub fn central_element(self: &AlgebraRef, values: &[f64]) -> Element {
        assert_eq!(values.len(), self.num_blocks(), "one value per block");
        let blocks = self
            .block_dims
            .iter()
            .zip(values)
            .map(|(&d, &v)| DMatrix::identity(d, d).map(|e: f64| C64::new(e * v, 0.0)))
            .collect();
        Element::from_blocks(self.clone(), blocks).expect("shapes match")
    }
}

/// Block-diagonal complex matrix conforming to an [`Algebra`].
#[derive(Debug, Clone)]
pub struct Element {
    algebra: AlgebraRef,
    blocks: Vec<DMatrix<C64>>,
}

impl Element {
    pub fn from_blocks(algebra: AlgebraRef, blocks: Vec<DMatrix<C64>>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (k, (b, &d)) in blocks.iter().zip(algebra.block_dims()).enumerate() {
            if b.nrows() != d || b.ncols() != d {
                return Err(Error::ShapeMismatch(format!(
                    "block {k} is {}x{}, expected {d}x{d}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Element { algebra, blocks })
    }

    pub fn zero(algebra: &AlgebraRef) -> Self {
        let blocks = algebra.block_dims().iter().map(|&d| DMatrix::zeros(d, d)).collect();
        Element {
            algebra: algebra.clone(),
            blocks,
        }
    }

    pub fn identity(algebra: &AlgebraRef) -> Self {
        let blocks = algebra.block_dims().iter().map(|&d| DMatrix::identity(d, d)).collect();
        Element {
            algebra: algebra.clone(),
            blocks,
        }
    }

    /// Canonical basis element `E^{(k)}_{ij}/√w_k`.
    pub fn basis_element(algebra: &AlgebraRef, block: usize, i: usize, j: usize) -> Self {
        let mut e = Element::zero(algebra);
        e.blocks[block][(i, j)] = C64::new(1.0 / algebra.trace_weights()[block].sqrt(), 0.0);
        e
    }

    /// Unnormalized matrix unit `E^{(k)}_{ij}`.
    pub fn matrix_unit(algebra: &AlgebraRef, block: usize, i: usize, j: usize) -> Self {
        let mut e = Element::zero(algebra);
        e.blocks[block][(i, j)] = C64::new(1.0, 0.0);
        e
    }

    /// Rank-one element `v v*` embedded in one block.
    pub fn rank_one(algebra: &AlgebraRef, block: usize, v: &DVector<C64>) -> Self {
        assert_eq!(v.len(), algebra.block_dims()[block], "vector length mismatch");
        let mut e = Element::zero(algebra);
        for i in 0..v.len() {
            for j in 0..v.len() {
                e.blocks[block][(i, j)] = v[i] * v[j].conj();
            }
        }
        e
    }

    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    pub fn blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &DMatrix<C64> {
        &self.blocks[k]
    }

    pub fn adjoint(&self) -> Element {
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Element {
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b * c).collect(),
        }
    }

    fn zip_with(&self, other: &Element, f: impl Fn(&DMatrix<C64>, &DMatrix<C64>) -> DMatrix<C64>) -> Element {
        assert_eq!(
            self.algebra, other.algebra,
            "elements belong to different algebras"
        );
        Element {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn mul(&self, other: &Element) -> Element {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn commutator(&self, other: &Element) -> Element {
        self.zip_with(other, |a, b| a * b - b * a)
    }

    /// Max absolute deviation from `x = x*`.
    pub fn hermitian_defect(&self) -> f64 {
        self.blocks.iter().map(linalg::hermitian_defect).fold(0.0, f64::max)
    }

    /// Max absolute deviation from `x* = -x`.
    pub fn skew_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| linalg::max_abs(&(b.adjoint() + b)))
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * (1.0 + self.op_norm())
    }

    /// Hermitian with all eigenvalues above `-tol·(1 + ‖a‖_∞)`.
    pub fn is_positive(&self, tol: f64) -> bool {
        let bound = tol * (1.0 + self.op_norm());
        if self.hermitian_defect() > bound {
            return false;
        }
        self.blocks.iter().all(|b| {
            if b.nrows() == 0 {
                return true;
            }
            let (vals, _) = linalg::hermitian_eigen(b);
            vals[0] >= -bound
        })
    }

    /// Weighted trace `τ(x) = Σ_k w_k Tr(x_k)`.
    pub fn trace(&self) -> C64 {
        self.blocks
            .iter()
            .zip(self.algebra.trace_weights())
            .map(|(b, &w)| b.diagonal().sum() * C64::new(w, 0.0))
            .sum()
    }

    /// `(x, y) = τ(x* y)`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Element) -> C64 {
        assert_eq!(
            self.algebra, other.algebra,
            "elements belong to different algebras"
        );
        let mut acc = C64::new(0.0, 0.0);
        for ((a, b), &w) in self.blocks.iter().zip(&other.blocks).zip(self.algebra.trace_weights()) {
            // τ(a* b) = Σ_ij conj(a_ij) b_ij, weighted
            let mut s = C64::new(0.0, 0.0);
            for (x, y) in a.iter().zip(b.iter()) {
                s += x.conj() * y;
            }
            acc += s * C64::new(w, 0.0);
        }
        acc
    }

    /// `‖x‖₂ = τ(x*x)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// Operator norm (largest singular value over blocks), `‖x‖_∞`.
    pub fn op_norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    /// Singular values per block, each ascending.
    pub fn singular_values(&self) -> Vec<Vec<f64>> {
        self.blocks
            .iter()
            .map(|b| {
                let gram = b.adjoint() * b;
                let (vals, _) = linalg::hermitian_eigen(&gram);
                vals.iter().map(|v| v.max(0.0).sqrt()).collect()
            })
            .collect()
    }

    /// `‖x‖_p = τ(|x|^p)^{1/p}` for `1 ≤ p < ∞`; the operator norm at `p = ∞`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_infinite() && p > 0.0 {
            return Ok(self.op_norm());
        }
        if p < 1.0 || p.is_nan() {
            return Err(Error::InvalidExponent(p));
        }
        let mut acc = 0.0f64;
        for (svals, &w) in self.singular_values().iter().zip(self.algebra.trace_weights()) {
            acc += w * svals.iter().map(|s| s.powf(p)).sum::<f64>();
        }
        Ok(acc.powf(1.0 / p))
    }

    /// Decompose `x = y + iz` with `y, z` Hermitian.
    pub fn hermitian_split(&self) -> (Element, Element) {
        let adj = self.adjoint();
        let half = C64::new(0.5, 0.0);
        let y = (self + &adj).scale(half);
        let z = (self - &adj).scale(C64::new(0.0, -0.5));
        (y, z)
    }

    /// Coordinates over the canonical complex basis.
    pub fn coords(&self) -> DVector<C64> {
        let mut v = DVector::zeros(self.algebra.dim_l2());
        for (k, (b, &w)) in self.blocks.iter().zip(self.algebra.trace_weights()).enumerate() {
            let sw = w.sqrt();
            let n = b.nrows();
            for i in 0..n {
                for j in 0..n {
                    v[self.algebra.coord_index(k, i, j)] = b[(i, j)] * C64::new(sw, 0.0);
                }
            }
        }
        v
    }

    pub fn from_coords(algebra: &AlgebraRef, coords: &DVector<C64>) -> Element {
        assert_eq!(coords.len(), algebra.dim_l2(), "coordinate length mismatch");
        let mut e = Element::zero(algebra);
        for (k, &w) in algebra.trace_weights().iter().enumerate() {
            let isw = 1.0 / w.sqrt();
            let n = algebra.block_dims()[k];
            for i in 0..n {
                for j in 0..n {
                    e.blocks[k][(i, j)] = coords[algebra.coord_index(k, i, j)] * C64::new(isw, 0.0);
                }
            }
        }
        e
    }

    /// Real coordinates of the Hermitian part over the hermitian basis.
    pub fn hermitian_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.algebra.dim_l2());
        for (b, &w) in self.blocks.iter().zip(self.algebra.trace_weights()) {
            let n = b.nrows();
            let sw = w.sqrt();
            for i in 0..n {
                out.push(sw * b[(i, i)].re);
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let sym = (b[(i, j)] + b[(j, i)].conj()) * 0.5;
                    out.push((2.0 * w).sqrt() * sym.re);
                    out.push((2.0 * w).sqrt() * sym.im);
                }
            }
        }
        out
    }

    /// Hermitian element with the given real coordinates over the hermitian basis.
    pub fn from_hermitian_coords(algebra: &AlgebraRef, coords: &[f64]) -> Element {
        assert_eq!(coords.len(), algebra.dim_l2(), "coordinate length mismatch");
        let mut e = Element::zero(algebra);
        let mut pos = 0usize;
        for (k, &w) in algebra.trace_weights().iter().enumerate() {
            let n = algebra.block_dims()[k];
            let isw = 1.0 / w.sqrt();
            for i in 0..n {
                e.blocks[k][(i, i)] = C64::new(coords[pos] * isw, 0.0);
                pos += 1;
            }
            let s2w = 1.0 / (2.0 * w).sqrt();
            for i in 0..n {
                for j in (i + 1)..n {
                    let re = coords[pos] * s2w;
                    let im = coords[pos + 1] * s2w;
                    pos += 2;
                    e.blocks[k][(i, j)] = C64::new(re, im);
                    e.blocks[k][(j, i)] = C64::new(re, -im);
                }
            }
        }
        e
    }
}

macro_rules! element_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for &Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
    };
}
element_binop!(Add, add, +);
element_binop!(Sub, sub, -);

impl std::ops::Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        Element::mul(self, rhs)
    }
}

impl std::ops::Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Materialized orthonormal bases of `L²(𝒜,τ)`.
///
/// Hot paths use index arithmetic on [`Element::coords`] /
/// [`Element::hermitian_coords`] instead; this struct exists for the Gram
/// checks and basis-dependent compressions.
pub struct ElementBasis {
    pub algebra: AlgebraRef,
    pub complex_basis: Vec<Element>,
    pub hermitian_basis: Vec<Element>,
}

impl ElementBasis {
    pub fn new(algebra: &AlgebraRef) -> Self {
        let dim = algebra.dim_l2();
        let complex_basis = (0..dim)
            .map(|idx| {
                let (k, i, j) = algebra.coord_position(idx);
                Element::basis_element(algebra, k, i, j)
            })
            .collect();
        let hermitian_basis = (0..dim)
            .map(|idx| {
                let mut coords = vec![0.0; dim];
                coords[idx] = 1.0;
                Element::from_hermitian_coords(algebra, &coords)
            })
            .collect();
        ElementBasis {
            algebra: algebra.clone(),
            complex_basis,
            hermitian_basis,
        }
    }

    /// Change of basis `B` with `coords(x) = B·hcoords(x)` for Hermitian `x`;
    /// columns are the complex coordinates of the hermitian basis elements.
    pub fn hermitian_to_complex(&self) -> DMatrix<C64> {
        let dim = self.algebra.dim_l2();
        let mut b = DMatrix::zeros(dim, dim);
        for (j, h) in self.hermitian_basis.iter().enumerate() {
            b.column_mut(j).copy_from(&h.coords());
        }
        b
    }

    pub fn gram_defect_complex(&self) -> f64 {
        gram_defect(&self.complex_basis)
    }

    pub fn gram_defect_hermitian(&self) -> f64 {
        gram_defect(&self.hermitian_basis)
    }
}

fn gram_defect(basis: &[Element]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let g = a.inner(b);
            let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}

/// Change of basis `B` (hermitian → complex coordinates) without
/// materializing the basis elements.
pub fn hermitian_to_complex_matrix(algebra: &AlgebraRef) -> DMatrix<C64> {
    ElementBasis::new(algebra).hermitian_to_complex()
}

/// Expand a superoperator matrix on `𝒜` to `𝒜 ⊗ M_n` (acting as `T ⊗ id`).
///
/// The amplified algebra's canonical basis is a reindexing of
/// `b_i ⊗ E_{αβ}`, so the expansion is a permuted Kronecker product with the
/// identity.
pub fn amplify_superop_matrix(algebra: &AlgebraRef, n: usize, m: &DMatrix<C64>) -> DMatrix<C64> {
    let amp = algebra.amplify(n);
    let dim_amp = amp.dim_l2();
    let mut out = DMatrix::<C64>::zeros(dim_amp, dim_amp);
    let dim = algebra.dim_l2();
    for col in 0..dim {
        let (k, p, q) = algebra.coord_position(col);
        for row in 0..dim {
            let v = m[(row, col)];
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let (k2, p2, q2) = algebra.coord_position(row);
            for a in 0..n {
                for b in 0..n {
                    let rc = amp.coord_index(k2, p2 * n + a, q2 * n + b);
                    let cc = amp.coord_index(k, p * n + a, q * n + b);
                    out[(rc, cc)] = v;
                }
            }
        }
    }
    out
}

/// Assemble an element of `𝒜 ⊗ M_n` from its `n × n` array of parts,
/// `X = Σ_{αβ} parts[α][β] ⊗ E_{αβ}`.
pub fn amplified_from_parts(amplified: &AlgebraRef, n: usize, parts: &[Vec<Element>]) -> Element {
    assert_eq!(parts.len(), n);
    let base = parts[0][0].algebra();
    let blocks = base
        .block_dims()
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            DMatrix::from_fn(d * n, d * n, |r, c| {
                let (p, a) = (r / n, r % n);
                let (q, b) = (c / n, c % n);
                parts[a][b].block(k)[(p, q)]
            })
        })
        .collect();
    Element::from_blocks(amplified.clone(), blocks).expect("shapes match")
}

/// Inverse of [`amplified_from_parts`].
pub fn amplified_parts(x: &Element, n: usize, base: &AlgebraRef) -> Vec<Vec<Element>> {
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let blocks = base
                        .block_dims()
                        .iter()
                        .enumerate()
                        .map(|(k, &d)| {
                            DMatrix::from_fn(d, d, |p, q| x.block(k)[(p * n + a, q * n + b)])
                        })
                        .collect();
                    Element::from_blocks(base.clone(), blocks).expect("shapes match")
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn two_block() -> AlgebraRef {
        Algebra::shared(vec![2, 3], vec![1.0, 0.5]).unwrap()
    }

    #[test]
    fn trace_of_identity_is_weighted_dimension() {
        let alg = Algebra::factor(2);
        assert!((Element::identity(&alg).trace() - C64::new(2.0, 0.0)).norm() < 1e-15);
        let alg = two_block();
        assert!((Element::identity(&alg).trace() - C64::new(3.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_of_hermitian_is_real_and_conjugation_rule_holds() {
        let alg = two_block();
        let mut rng = sample::rng(0, "algebra-trace", 0);
        for i in 0..20 {
            let x = sample::random_element(&alg, &mut rng, sample::scale_for(i));
            let (h, _) = x.hermitian_split();
            assert!(h.trace().im.abs() < 1e-12 * (1.0 + h.l2_norm()));
            assert!((x.adjoint().trace() - x.trace().conj()).norm() < 1e-12 * (1.0 + x.l2_norm()));
        }
    }

    /// Oracle: trace as an independent sum of closed-form eigenvalues times
    /// weights, for Hermitian 2x2 / 3x3 blocks (characteristic polynomial).
    #[test]
    fn trace_matches_eigenvalue_sum_oracle() {
        fn eig2(b: &DMatrix<C64>) -> [f64; 2] {
            let tr = (b[(0, 0)] + b[(1, 1)]).re;
            let det = (b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)]).re;
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            [tr / 2.0 - disc, tr / 2.0 + disc]
        }
        let alg = Algebra::shared(vec![2, 2], vec![1.25, 0.75]).unwrap();
        let mut rng = sample::rng(3, "algebra-eigsum", 0);
        for _ in 0..10 {
            let x = sample::random_hermitian(&alg, &mut rng, 1.0);
            let oracle: f64 = x
                .blocks()
                .iter()
                .zip(alg.trace_weights())
                .map(|(b, &w)| w * eig2(b).iter().sum::<f64>())
                .sum();
            assert!((x.trace().re - oracle).abs() < 1e-12 * (1.0 + oracle.abs()));
        }
    }

    #[test]
    fn inner_product_axioms() {
        let alg = two_block();
        let one = Element::identity(&alg);
        assert!((one.inner(&one) - C64::new(alg.total_trace(), 0.0)).norm() < 1e-14);
        let mut rng = sample::rng(1, "algebra-inner", 0);
        for _ in 0..20 {
            let x = sample::random_element(&alg, &mut rng, 1.0);
            let y = sample::random_element(&alg, &mut rng, 1.0);
            assert!((x.inner(&y) - y.inner(&x).conj()).norm() < 1e-12);
            assert!(x.inner(&x).re >= 0.0);
            // hermitian pairs pair to real values
            let (hx, _) = x.hermitian_split();
            let (hy, _) = y.hermitian_split();
            assert!(hx.inner(&hy).im.abs() < 1e-12);
        }
    }

    /// Oracle: inner product via basis coordinates (Euclidean dot of
    /// coordinate vectors) against the direct trace formula.
    #[test]
    fn inner_agrees_with_coordinate_expansion() {
        let alg = two_block();
        let mut rng = sample::rng(2, "algebra-coords", 0);
        for _ in 0..10 {
            let x = sample::random_element(&alg, &mut rng, 2.0);
            let y = sample::random_element(&alg, &mut rng, 0.5);
            let via_coords = x.coords().dotc(&y.coords());
            assert!((via_coords - x.inner(&y)).norm() < 1e-12 * (1.0 + via_coords.norm()));
            // round trip
            let back = Element::from_coords(&alg, &x.coords());
            assert!((&back - &x).l2_norm() < 1e-13 * (1.0 + x.l2_norm()));
        }
    }

    #[test]
    fn rank_one_projection_norm_is_weight_root() {
        let alg = Algebra::shared(vec![2], vec![0.7]).unwrap();
        let mut e = Element::zero(&alg);
        e.blocks[0][(0, 0)] = C64::new(1.0, 0.0);
        for p in [1.0, 2.0, 4.0] {
            assert!((e.lp_norm(p).unwrap() - 0.7f64.powf(1.0 / p)).abs() < 1e-14);
        }
        assert!((e.lp_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(e.lp_norm(0.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn l2_norm_squared_equals_inner() {
        let alg = two_block();
        let mut rng = sample::rng(5, "algebra-l2", 0);
        for i in 0..30 {
            let x = sample::random_element(&alg, &mut rng, sample::scale_for(i));
            let n2 = x.lp_norm(2.0).unwrap();
            let ip = x.inner(&x).re;
            assert!((n2 * n2 - ip).abs() <= 1e-10 * (1.0 + ip));
            assert!((x.lp_norm(1.5).unwrap() - x.adjoint().lp_norm(1.5).unwrap()).abs() < 1e-10);
        }
    }

    /// Hölder `‖xy‖_r ≤ ‖x‖_p ‖y‖_q`, 500 seeded triples across the
    /// exponent triples (2,2,1), (4,4,2), (∞,1,1).
    #[test]
    fn hoelder_inequality_sweep() {
        let alg = two_block();
        let combos = [(2.0, 2.0, 1.0), (4.0, 4.0, 2.0), (f64::INFINITY, 1.0, 1.0)];
        for i in 0..500 {
            let mut rng = sample::rng(7, "algebra-hoelder", i);
            let x = sample::random_element(&alg, &mut rng, sample::scale_for(i as usize));
            let y = sample::random_element(&alg, &mut rng, 1.0);
            let (p, q, r) = combos[i as usize % combos.len()];
            let lhs = (&x * &y).lp_norm(r).unwrap();
            let rhs = x.lp_norm(p).unwrap() * y.lp_norm(q).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-10), "Hölder violated: {lhs} > {rhs}");
        }
    }

    /// `0 ≤ x ≤ y ⇒ ‖x‖_p ≤ ‖y‖_p` on pairs built as `y = x + PSD noise`.
    #[test]
    fn lp_norm_is_order_monotone() {
        let alg = two_block();
        for i in 0..100u64 {
            let mut rng = sample::rng(11, "algebra-monotone", i);
            let a = sample::random_element(&alg, &mut rng, 1.0);
            let b = sample::random_element(&alg, &mut rng, 1.0);
            let x = &a.adjoint() * &a;
            let y = &x + &(&b.adjoint() * &b);
            for p in [1.0, 2.0, 3.0, f64::INFINITY] {
                assert!(x.lp_norm(p).unwrap() <= y.lp_norm(p).unwrap() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn hermitian_split_examples() {
        let alg = two_block();
        let one = Element::identity(&alg);
        let (y, z) = one.hermitian_split();
        assert!((&y - &one).l2_norm() < 1e-15);
        assert!(z.l2_norm() < 1e-15);
        let i_one = one.scale(C64::new(0.0, 1.0));
        let (y, z) = i_one.hermitian_split();
        assert!(y.l2_norm() < 1e-15);
        assert!((&z - &one).l2_norm() < 1e-15);
        let mut rng = sample::rng(9, "algebra-split", 0);
        let x = sample::random_element(&alg, &mut rng, 3.0);
        let (y, z) = x.hermitian_split();
        let back = &y + &z.scale(C64::new(0.0, 1.0));
        assert!((&back - &x).l2_norm() < 1e-14 * (1.0 + x.l2_norm()));
        assert!(y.hermitian_defect() < 1e-13);
        assert!(z.hermitian_defect() < 1e-13);
    }

    #[test]
    fn center_basis_spans_center_and_commutes() {
        let single = Algebra::factor(3);
        let c = single.center_basis();
        assert_eq!(c.len(), 1);
        assert!((&c[0] - &Element::identity(&single)).l2_norm() < 1e-15);

        let alg = two_block();
        let c = alg.center_basis();
        assert_eq!(c.len(), 2);
        let sum = &c[0] + &c[1];
        assert!((&sum - &Element::identity(&alg)).l2_norm() < 1e-15);
        assert!((&c[0] * &c[1]).l2_norm() < 1e-15);
        let mut rng = sample::rng(13, "algebra-center", 0);
        for i in 0..100 {
            let x = sample::random_element(&alg, &mut rng, sample::scale_for(i));
            for ce in &c {
                assert!(ce.commutator(&x).op_norm() < 1e-14 * (1.0 + x.op_norm()));
            }
        }
    }

    #[test]
    fn basis_grams_are_identities() {
        let alg = two_block();
        let basis = ElementBasis::new(&alg);
        assert_eq!(basis.complex_basis.len(), alg.dim_l2());
        assert_eq!(basis.hermitian_basis.len(), alg.dim_l2());
        assert!(basis.gram_defect_complex() < 1e-10);
        assert!(basis.gram_defect_hermitian() < 1e-10);
        for h in &basis.hermitian_basis {
            assert!(h.hermitian_defect() < 1e-14);
        }
        // hermitian coordinates invert the basis expansion
        let mut rng = sample::rng(17, "algebra-hcoords", 0);
        let x = sample::random_hermitian(&alg, &mut rng, 2.0);
        let coords = x.hermitian_coords();
        let back = Element::from_hermitian_coords(&alg, &coords);
        assert!((&back - &x).l2_norm() < 1e-12 * (1.0 + x.l2_norm()));
    }

    #[test]
    fn trace_is_faithful() {
        let alg = two_block();
        let mut rng = sample::rng(19, "algebra-faithful", 0);
        for _ in 0..50 {
            let x = sample::random_element(&alg, &mut rng, 1e-12);
            let t = (&x.adjoint() * &x).trace().re;
            if t < 1e-20 {
                assert!(x.op_norm() < 1e-8);
            }
        }
        // and the contrapositive on a non-trivial element
        let x = Element::identity(&alg);
        assert!((&x.adjoint() * &x).trace().re > 1e-20);
    }

    #[test]
    fn from_blocks_rejects_bad_shapes() {
        let alg = two_block();
        let bad = vec![DMatrix::zeros(2, 2), DMatrix::zeros(2, 2)];
        assert!(matches!(
            Element::from_blocks(alg, bad),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn star_index_is_an_involution_matching_adjoint() {
        let alg = two_block();
        let mut rng = sample::rng(23, "algebra-star", 0);
        let x = sample::random_element(&alg, &mut rng, 1.0);
        let cx = x.coords();
        let cadj = x.adjoint().coords();
        for m in 0..alg.dim_l2() {
            assert_eq!(alg.star_index(alg.star_index(m)), m);
            assert!((cadj[m] - cx[alg.star_index(m)].conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn amplified_parts_round_trip() {
        let alg = two_block();
        let n = 2;
        let amp = alg.amplify(n);
        assert_eq!(amp.dim_l2(), n * n * alg.dim_l2());
        assert!((amp.total_trace() - 2.0 * alg.total_trace()).abs() < 1e-14);
        let mut rng = sample::rng(29, "algebra-amp", 0);
        let parts: Vec<Vec<Element>> = (0..n)
            .map(|_| (0..n).map(|_| sample::random_element(&alg, &mut rng, 1.0)).collect())
            .collect();
        let big = amplified_from_parts(&amp, n, &parts);
        let back = amplified_parts(&big, n, &alg);
        for a in 0..n {
            for b in 0..n {
                assert!((&back[a][b] - &parts[a][b]).l2_norm() < 1e-14);
            }
        }
        // ‖X‖² = Σ ‖x_αβ‖²
        let total: f64 = parts
            .iter()
            .flatten()
            .map(|p| p.l2_norm().powi(2))
            .sum();
        assert!((big.l2_norm().powi(2) - total).abs() < 1e-10 * (1.0 + total));
    }
}
