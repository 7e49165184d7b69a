//! Explicit Dirichlet-form factories from derivation families.
//!
//! `ℰ(x,y) = Σ_i (d_i x, d_i y) + Σ_{ij} (d_i x, c_{ij} d_j y)` with the
//! `c_{ij}` self-adjoint central and antisymmetric (`c_{ij} = -c_{ji}`)
//! yields a Dirichlet form whose sector constant is at most `n‖C‖_∞ + 1`.
//! The general coefficient version `Σ_{ij} (d_i x, a_{ij} d_j y)` with
//! coercive symmetric part reduces to the first by `B = Ã^{1/2}`,
//! `δ_i = Σ_j b_{ij} d_j`, `C = B^{-1}Ǎ B^{-1}`; and `Re(δx,δy)+Im(δx,δy)`
//! for an arbitrary derivation δ reduces to the *-derivation pair
//! `d₁ = (δ+δ†)/2`, `d₂ = (δ-δ†)/2i` with coefficients `[[1,1],[-1,1]]`.

use nalgebra::DMatrix;

use crate::algebra::AlgebraRef;
use crate::derivations::Derivation;
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::linalg;
use crate::C64;

/// Coercivity floor for `Ã ≥ νI`; `B^{-1}` amplifies noise as `ν^{-1/2}`.
pub const COERCIVITY_TOL: f64 = 1e-8;

/// Matrix of self-adjoint central coefficients: one real `n×n` matrix per
/// central component (block), since central elements are block scalars.
#[derive(Debug, Clone)]
pub struct CoefficientMatrix {
    algebra: AlgebraRef,
    size: usize,
    components: Vec<DMatrix<f64>>,
}

impl CoefficientMatrix {
    pub fn new(algebra: AlgebraRef, components: Vec<DMatrix<f64>>) -> Result<Self> {
        if components.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} central components, got {}",
                algebra.num_blocks(),
                components.len()
            )));
        }
        let size = components[0].nrows();
        for c in &components {
            if c.nrows() != size || c.ncols() != size {
                return Err(Error::ShapeMismatch(
                    "coefficient components must be square of equal size".into(),
                ));
            }
        }
        Ok(CoefficientMatrix {
            algebra,
            size,
            components,
        })
    }

    /// Same real matrix on every central component.
    pub fn scalar(algebra: AlgebraRef, m: DMatrix<f64>) -> Result<Self> {
        let comps = vec![m; algebra.num_blocks()];
        CoefficientMatrix::new(algebra, comps)
    }

    pub fn zero(algebra: AlgebraRef, size: usize) -> Self {
        let comps = vec![DMatrix::zeros(size, size); algebra.num_blocks()];
        CoefficientMatrix {
            algebra,
            size,
            components: comps,
        }
    }

    pub fn identity(algebra: AlgebraRef, size: usize) -> Self {
        let comps = vec![DMatrix::identity(size, size); algebra.num_blocks()];
        CoefficientMatrix {
            algebra,
            size,
            components: comps,
        }
    }

    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn components(&self) -> &[DMatrix<f64>] {
        &self.components
    }

    /// Central values of the entry `a_{ij}`, one per block.
    pub fn entry_values(&self, i: usize, j: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[(i, j)]).collect()
    }

    pub fn symmetric_part(&self) -> CoefficientMatrix {
        CoefficientMatrix {
            algebra: self.algebra.clone(),
            size: self.size,
            components: self
                .components
                .iter()
                .map(|c| (c + c.transpose()).scale(0.5))
                .collect(),
        }
    }

    pub fn antisymmetric_part(&self) -> CoefficientMatrix {
        CoefficientMatrix {
            algebra: self.algebra.clone(),
            size: self.size,
            components: self
                .components
                .iter()
                .map(|c| (c - c.transpose()).scale(0.5))
                .collect(),
        }
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        self.components
            .iter()
            .map(|c| (c + c.transpose()).amax())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the symmetric part across components: the
    /// coercivity constant `ν` of `Ã ≥ νI`.
    pub fn coercivity(&self) -> f64 {
        self.symmetric_part()
            .components
            .iter()
            .map(|c| linalg::real_sym_eigen(c).0[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// `‖·‖_∞` of the coefficient matrix as an element of `𝒜 ⊗ M_n`: the
    /// largest component operator norm.
    pub fn op_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let cc = DMatrix::from_fn(c.nrows(), c.ncols(), |i, j| C64::new(c[(i, j)], 0.0));
                linalg::op_norm(&cc)
            })
            .fold(0.0, f64::max)
    }
}

fn check_family(derivs: &[Derivation]) -> Result<&AlgebraRef> {
    assert!(!derivs.is_empty(), "need at least one derivation");
    let alg = derivs[0].algebra();
    for d in derivs {
        assert_eq!(d.algebra(), alg, "derivations on different algebras");
        let defect = d.star_defect();
        if !d.is_star_derivation(1e-9) {
            return Err(Error::NotSelfAdjoint { defect });
        }
        if !d.leibniz_verified() {
            return Err(Error::LeibnizViolation {
                pair: 0,
                residual: f64::NAN,
                tolerance: 0.0,
            });
        }
    }
    Ok(alg)
}

/// Left-multiplication by the central element with the given block values,
/// in coordinates: a diagonal scaling per block.
fn central_scaling(alg: &AlgebraRef, values: &[f64], m: &DMatrix<C64>) -> DMatrix<C64> {
    let dim = alg.dim_l2();
    let mut out = m.clone();
    for row in 0..dim {
        let (k, _, _) = alg.coord_position(row);
        for col in 0..dim {
            out[(row, col)] *= C64::new(values[k], 0.0);
        }
    }
    out
}

/// `ℰ(x,y) = Σ_i (d_i x, d_i y) + Σ_{ij} (d_i x, c_{ij} d_j y)` for a family
/// of *-derivations and an antisymmetric central coefficient matrix.
///
/// Post-construction the form is checked to be star-real, real-positive (the
/// coefficient term cancels on Hermitian arguments) and within the sector
/// bound `n‖C‖_∞ + 1`.
pub fn derivation_family_form(derivs: &[Derivation], c: &CoefficientMatrix) -> Result<Form> {
    let alg = check_family(derivs)?.clone();
    let n = derivs.len();
    if c.size() != n {
        return Err(Error::ShapeMismatch(format!(
            "coefficient matrix size {} does not match {} derivations",
            c.size(),
            n
        )));
    }
    if c.algebra() != &alg {
        return Err(Error::ShapeMismatch(
            "coefficient matrix over a different algebra".into(),
        ));
    }
    let defect = c.antisymmetry_defect();
    if defect > 1e-10 * (1.0 + c.op_norm()) {
        return Err(Error::NotAntisymmetric { defect });
    }

    let dim = alg.dim_l2();
    let mut g = DMatrix::<C64>::zeros(dim, dim);
    for d in derivs {
        g += d.matrix().adjoint() * d.matrix();
    }
    for i in 0..n {
        for j in 0..n {
            let values = c.entry_values(i, j);
            if values.iter().all(|v| v.abs() == 0.0) {
                continue;
            }
            g += derivs[i].matrix().adjoint() * central_scaling(&alg, &values, derivs[j].matrix());
        }
    }
    let e = Form::from_matrix(alg, g)?;

    // construction guarantees, verified cheaply and exactly
    let (min_eig, _) = e.real_positivity();
    let scale = 1.0 + e.op_norm();
    if min_eig < -1e-9 * scale {
        return Err(Error::NotRealPositive { min_eig });
    }
    let k = e.sector_constant()?;
    let bound = n as f64 * c.op_norm() + 1.0;
    if k > bound + 1e-9 * (1.0 + bound) {
        return Err(Error::InvalidConfig(format!(
            "sector constant {k} exceeded the construction bound {bound}"
        )));
    }
    Ok(e)
}

/// `ℰ(x,y) = Σ_{ij} (d_i x, a_{ij} d_j y)` for commutator derivations
/// `d_i = [z_i, ·]` with skew-adjoint `z_i` and a self-adjoint central
/// coefficient matrix whose symmetric part is coercive.
///
/// Reduction: `B = Ã^{1/2}` per central component, `δ_i = Σ_j b_{ij} d_j`,
/// `C = B^{-1} Ǎ B^{-1}` (real, antisymmetric), then the normalized family
/// form; the result is checked against the direct assembly.
pub fn commutator_form(zs: &[crate::algebra::Element], a: &CoefficientMatrix) -> Result<Form> {
    assert!(!zs.is_empty(), "need at least one commutator element");
    let alg = zs[0].algebra().clone();
    let n = zs.len();
    if a.size() != n {
        return Err(Error::ShapeMismatch(format!(
            "coefficient matrix size {} does not match {} elements",
            a.size(),
            n
        )));
    }
    let nu = a.coercivity();
    if nu < COERCIVITY_TOL {
        return Err(Error::NotCoercive {
            component: a
                .symmetric_part()
                .components()
                .iter()
                .enumerate()
                .min_by(|(_, x), (_, y)| {
                    linalg::real_sym_eigen(x).0[0].total_cmp(&linalg::real_sym_eigen(y).0[0])
                })
                .map(|(i, _)| i)
                .unwrap_or(0),
            nu,
            required: COERCIVITY_TOL,
        });
    }

    let derivs: Vec<Derivation> = zs
        .iter()
        .map(|z| Derivation::inner(z.clone()))
        .collect::<Result<_>>()?;

    // per-component reduction
    let sym = a.symmetric_part();
    let asym = a.antisymmetric_part();
    let mut b_comps = Vec::with_capacity(a.components().len());
    let mut c_comps = Vec::with_capacity(a.components().len());
    for (s, v) in sym.components().iter().zip(asym.components()) {
        let b = linalg::spd_sqrt(s);
        let binv = linalg::spd_inv_sqrt(s);
        let c = &binv * v * &binv;
        b_comps.push(b);
        c_comps.push(c);
    }
    let c = CoefficientMatrix::new(alg.clone(), c_comps)?;
    // C must come out real and skew-symmetric
    let cdefect = c.antisymmetry_defect();
    if cdefect > 1e-8 * (1.0 + c.op_norm()) {
        return Err(Error::NotAntisymmetric { defect: cdefect });
    }

    // δ_i = Σ_j b_{ij} d_j with central b_{ij}
    let normalized: Vec<Derivation> = (0..n)
        .map(|i| {
            let mut acc = Derivation::zero(&alg);
            for (j, d) in derivs.iter().enumerate() {
                let values: Vec<f64> = b_comps.iter().map(|b| b[(i, j)]).collect();
                acc = acc.add(&d.central_scale(&values));
            }
            acc
        })
        .collect();

    let e = derivation_family_form(&normalized, &c)?;

    // dual-route consistency: direct assembly Σ (d_i x, a_{ij} d_j y)
    let dim = alg.dim_l2();
    let mut direct = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            let values = a.entry_values(i, j);
            direct +=
                derivs[i].matrix().adjoint() * central_scaling(&alg, &values, derivs[j].matrix());
        }
    }
    let dev = linalg::max_abs(&(&direct - e.matrix()));
    if dev > 1e-10 * (1.0 + linalg::op_norm(&direct)) {
        return Err(Error::InvalidConfig(format!(
            "reduced and direct assemblies disagree by {dev:.3e}"
        )));
    }
    Ok(e)
}

/// `ℰ(x,y) = Re(δx, δy) + Im(δx, δy)` for an arbitrary derivation `δ`
/// (the Re/Im parts taken as symmetric/antisymmetric components on the
/// Hermitian subspace). Assembled through the *-derivation pair
/// `d₁ = (δ+δ†)/2`, `d₂ = (δ-δ†)/2i` with coefficients `[[1,1],[-1,1]]`.
pub fn reim_form(delta: &Derivation) -> Result<Form> {
    let alg = delta.algebra().clone();
    let half = C64::new(0.5, 0.0);
    let dag = delta.dagger();
    let d1 = delta.add(&dag).scale(half);
    let d2 = delta.add(&dag.scale(C64::new(-1.0, 0.0))).scale(C64::new(0.0, -0.5));
    // both are *-derivations by construction
    let c = CoefficientMatrix::scalar(
        alg,
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
    )?;
    derivation_family_form(&[d1, d2], &c)
}
