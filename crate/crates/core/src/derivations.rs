//! Derivations on the algebra and their functional-calculus bounds.
//!
//! A derivation is a linear map with `δ(ab) = a·δb + δa·b`. Inner
//! derivations `[z,·]` with skew-adjoint `z` are *-derivations
//! (`δ(x*) = (δx)*`); general linear maps are accepted as `explicit`
//! derivations only after passing seeded Leibniz verification. The adjoint
//! derivation is `δ†a = (δa*)*` and the doubled operator acts on the
//! `M₂`-amplified algebra as `δ†` on the first row of parts and `δ` on the
//! second.

use nalgebra::DMatrix;

use crate::algebra::{self, AlgebraRef, Element};
use crate::calculus::{self, ScalarFunction};
use crate::error::{Error, Result};
use crate::sample;
use crate::C64;

/// Seeded pair count for Leibniz verification at construction.
const LEIBNIZ_SAMPLES: usize = 64;
const LEIBNIZ_SEED: u64 = 0x4c65_6962;

#[derive(Debug, Clone)]
pub enum DerivationKind {
    /// `δ = [z, ·]` with `z` skew-adjoint; a *-derivation.
    Inner { z: Element },
    /// Arbitrary linear action over the canonical basis.
    Explicit,
}

/// A verified derivation with its action matrix over the canonical basis.
#[derive(Debug, Clone)]
pub struct Derivation {
    algebra: AlgebraRef,
    kind: DerivationKind,
    mat: DMatrix<C64>,
    leibniz_verified: bool,
    leibniz_samples: usize,
}

fn assemble_matrix(alg: &AlgebraRef, apply: impl Fn(&Element) -> Element) -> DMatrix<C64> {
    let dim = alg.dim_l2();
    let mut m = DMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let (k, i, j) = alg.coord_position(idx);
        let b = Element::basis_element(alg, k, i, j);
        m.column_mut(idx).copy_from(&apply(&b).coords());
    }
    m
}

fn leibniz_residual(apply: &impl Fn(&Element) -> Element, a: &Element, b: &Element) -> (f64, f64) {
    let lhs = apply(&(a * b));
    let rhs = &(a * &apply(b)) + &(&apply(a) * b);
    let resid = (&lhs - &rhs).l2_norm();
    let scale = (a.op_norm() + a.l2_norm()) * (b.op_norm() + b.l2_norm());
    (resid, scale)
}

impl Derivation {
    /// `δ(x) = z x - x z` for skew-adjoint `z` (`z* = -z`): a *-derivation
    /// with `δ(1) = 0`.
    pub fn inner(z: Element) -> Result<Self> {
        let defect = z.skew_defect();
        if defect > 1e-9 * (1.0 + z.op_norm()) {
            return Err(Error::NotSkewAdjoint { defect });
        }
        let alg = z.algebra().clone();
        let mat = assemble_matrix(&alg, |x| z.commutator(x));
        Ok(Derivation {
            algebra: alg,
            kind: DerivationKind::Inner { z },
            mat,
            leibniz_verified: true,
            leibniz_samples: 0, // exact: bilinearity of the commutator
        })
    }

    /// `[w, ·]` for arbitrary `w`; a derivation, but not a *-derivation
    /// unless `w` is skew-adjoint. Stored as an explicit action.
    pub fn commutator_with(w: &Element) -> Self {
        let alg = w.algebra().clone();
        let mat = assemble_matrix(&alg, |x| w.commutator(x));
        Derivation {
            algebra: alg,
            kind: DerivationKind::Explicit,
            mat,
            leibniz_verified: true,
            leibniz_samples: 0,
        }
    }

    /// Explicit action matrix over the canonical basis; Leibniz is verified
    /// on seeded pairs and failure is a hard error.
    pub fn explicit(algebra: AlgebraRef, mat: DMatrix<C64>) -> Result<Self> {
        let dim = algebra.dim_l2();
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::ShapeMismatch(format!(
                "derivation matrix is {}x{}, expected {dim}x{dim}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let d = Derivation {
            algebra,
            kind: DerivationKind::Explicit,
            mat,
            leibniz_verified: false,
            leibniz_samples: 0,
        };
        d.verify_leibniz()
    }

    fn verify_leibniz(mut self) -> Result<Self> {
        let opn = crate::linalg::op_norm(&self.mat);
        for i in 0..LEIBNIZ_SAMPLES {
            let mut rng = sample::rng(LEIBNIZ_SEED, "leibniz", i as u64);
            let a = sample::random_element(&self.algebra, &mut rng, 1.0);
            let b = sample::random_element(&self.algebra, &mut rng, 1.0);
            let (resid, scale) = leibniz_residual(&|x| self.apply(x), &a, &b);
            let tolerance = 1e-10 * (1.0 + opn) * (1.0 + scale);
            if resid > tolerance {
                return Err(Error::LeibnizViolation {
                    pair: i,
                    residual: resid,
                    tolerance,
                });
            }
        }
        self.leibniz_verified = true;
        self.leibniz_samples = LEIBNIZ_SAMPLES;
        Ok(self)
    }

    pub fn zero(algebra: &AlgebraRef) -> Self {
        let dim = algebra.dim_l2();
        Derivation {
            algebra: algebra.clone(),
            kind: DerivationKind::Explicit,
            mat: DMatrix::zeros(dim, dim),
            leibniz_verified: true,
            leibniz_samples: 0,
        }
    }

    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    pub fn kind(&self) -> &DerivationKind {
        &self.kind
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn leibniz_verified(&self) -> bool {
        self.leibniz_verified
    }

    pub fn leibniz_samples(&self) -> usize {
        self.leibniz_samples
    }

    pub fn apply(&self, x: &Element) -> Element {
        match &self.kind {
            DerivationKind::Inner { z } => z.commutator(x),
            DerivationKind::Explicit => {
                Element::from_coords(&self.algebra, &(&self.mat * x.coords()))
            }
        }
    }

    /// Max deviation from the *-derivation identity `δ(x*) = (δx)*` on the
    /// canonical basis.
    pub fn star_defect(&self) -> f64 {
        crate::linalg::max_abs(&(&self.dagger_matrix() - &self.mat))
    }

    pub fn is_star_derivation(&self, tol: f64) -> bool {
        self.star_defect() <= tol * (1.0 + crate::linalg::op_norm(&self.mat))
    }

    fn dagger_matrix(&self) -> DMatrix<C64> {
        let dim = self.algebra.dim_l2();
        DMatrix::from_fn(dim, dim, |m, l| {
            self.mat[(self.algebra.star_index(m), self.algebra.star_index(l))].conj()
        })
    }

    /// Adjoint derivation `δ†a = (δa*)*`; for inner skew-adjoint `z`,
    /// `δ† = δ`.
    pub fn dagger(&self) -> Derivation {
        let mat = self.dagger_matrix();
        match &self.kind {
            DerivationKind::Inner { z } => Derivation {
                algebra: self.algebra.clone(),
                kind: DerivationKind::Inner { z: z.clone() },
                mat,
                leibniz_verified: true,
                leibniz_samples: 0,
            },
            DerivationKind::Explicit => Derivation {
                algebra: self.algebra.clone(),
                kind: DerivationKind::Explicit,
                mat,
                // δ† obeys Leibniz whenever δ does
                leibniz_verified: self.leibniz_verified,
                leibniz_samples: self.leibniz_samples,
            },
        }
    }

    /// Pointwise sum; a derivation again.
    pub fn add(&self, other: &Derivation) -> Derivation {
        assert_eq!(self.algebra, other.algebra, "derivations on different algebras");
        Derivation {
            algebra: self.algebra.clone(),
            kind: DerivationKind::Explicit,
            mat: &self.mat + &other.mat,
            leibniz_verified: self.leibniz_verified && other.leibniz_verified,
            leibniz_samples: self.leibniz_samples.max(other.leibniz_samples),
        }
    }

    pub fn scale(&self, c: C64) -> Derivation {
        Derivation {
            algebra: self.algebra.clone(),
            kind: DerivationKind::Explicit,
            mat: &self.mat * c,
            leibniz_verified: self.leibniz_verified,
            leibniz_samples: self.leibniz_samples,
        }
    }

    /// Multiply the action by a central self-adjoint element (blockwise real
    /// scaling). Centrality keeps the Leibniz rule intact.
    pub fn central_scale(&self, values: &[f64]) -> Derivation {
        assert_eq!(values.len(), self.algebra.num_blocks());
        let dim = self.algebra.dim_l2();
        let mut mat = self.mat.clone();
        for row in 0..dim {
            let (k, _, _) = self.algebra.coord_position(row);
            for col in 0..dim {
                mat[(row, col)] *= C64::new(values[k], 0.0);
            }
        }
        Derivation {
            algebra: self.algebra.clone(),
            kind: DerivationKind::Explicit,
            mat,
            leibniz_verified: self.leibniz_verified,
            leibniz_samples: self.leibniz_samples,
        }
    }

    /// The doubled operator `diag(δ†, δ)` on the `M₂`-amplified algebra:
    /// first row of parts gets `δ†`, second gets `δ`, giving
    /// `‖D(a,b;c,d)‖² = ‖δa*‖² + ‖δb*‖² + ‖δc‖² + ‖δd‖²`.
    ///
    /// For a non-* derivation this operator is not itself a Leibniz map (the
    /// mixed terms pick up `δ† - δ`), so it is returned unverified; it exists
    /// for the graph-norm identity and the modulus-bound diagnostics.
    pub fn doubled(&self) -> Derivation {
        let amp = self.algebra.amplify(2);
        let dim = self.algebra.dim_l2();
        let dag = self.dagger_matrix();
        let dim_amp = amp.dim_l2();
        let mut out = DMatrix::<C64>::zeros(dim_amp, dim_amp);
        for col in 0..dim {
            let (k, p, q) = self.algebra.coord_position(col);
            for row in 0..dim {
                let (k2, p2, q2) = self.algebra.coord_position(row);
                for a in 0..2usize {
                    let v = if a == 0 { dag[(row, col)] } else { self.mat[(row, col)] };
                    if v.norm_sqr() == 0.0 {
                        continue;
                    }
                    for b in 0..2usize {
                        let rc = amp.coord_index(k2, p2 * 2 + a, q2 * 2 + b);
                        let cc = amp.coord_index(k, p * 2 + a, q * 2 + b);
                        out[(rc, cc)] = v;
                    }
                }
            }
        }
        let star = self.is_star_derivation(1e-10);
        Derivation {
            algebra: amp,
            kind: DerivationKind::Explicit,
            mat: out,
            leibniz_verified: star && self.leibniz_verified,
            leibniz_samples: if star { self.leibniz_samples } else { 0 },
        }
    }
}

/// `‖δf(a) - π_a(f̃)·δa‖₂`: the chain-rule residual, an exact identity for
/// derivations and C¹ functions with `f(0) = 0`.
pub fn chain_rule_residual(d: &Derivation, a: &Element, f: &ScalarFunction) -> Result<f64> {
    if !f.vanishes_at_zero() {
        return Err(Error::NonVanishing {
            name: f.name().to_string(),
            value: f.eval(0.0),
        });
    }
    let fa = calculus::apply_function(a, f)?;
    let lhs = d.apply(&fa);
    let rhs = calculus::apply_divided_difference(a, f, &d.apply(a))?;
    Ok((&lhs - &rhs).l2_norm())
}

/// Two sides of a norm inequality plus the comparison outcome.
#[derive(Debug, Clone, Copy)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn with_tol(lhs: f64, rhs: f64, tol: f64) -> Self {
        BoundCheck {
            lhs,
            rhs,
            holds: lhs <= rhs + tol,
        }
    }
}

/// `‖δ f(a)‖₂ ≤ ‖f‖_Lip · ‖δa‖₂` for Lipschitz `f` with `f(0) = 0`.
pub fn lipschitz_bound(d: &Derivation, a: &Element, f: &ScalarFunction) -> Result<BoundCheck> {
    let lip = f.lip_constant().ok_or(Error::MissingLipschitz {
        name: f.name().to_string(),
    })?;
    let fa = calculus::apply_function(a, f)?;
    let lhs = d.apply(&fa).l2_norm();
    let da = d.apply(a).l2_norm();
    let rhs = lip * da;
    Ok(BoundCheck::with_tol(lhs, rhs, 1e-9 * (1.0 + rhs)))
}

/// `‖δ|a|‖₂ ≤ √2 · ‖δa‖₂`, defined for every element `a`.
pub fn modulus_bound(d: &Derivation, a: &Element) -> BoundCheck {
    let lhs = d.apply(&calculus::modulus(a)).l2_norm();
    let rhs = std::f64::consts::SQRT_2 * d.apply(a).l2_norm();
    BoundCheck::with_tol(lhs, rhs, 1e-9 * (1.0 + rhs))
}

/// Smoothed path to the modulus: `‖δ ψ_n(|a|)‖₂` along the given indices,
/// with `ψ_n(t) = √(t² + 1/n²) - 1/n`. Converges to `‖δ|a|‖₂`.
pub fn modulus_smoothing_path(d: &Derivation, a: &Element, ns: &[u32]) -> Vec<f64> {
    let m = calculus::modulus(a);
    ns.iter()
        .map(|&n| {
            let inv = 1.0 / n as f64;
            let psi = ScalarFunction::new(format!("psi:{n}"), move |t| {
                (t * t + inv * inv).sqrt() - inv
            })
            .with_derivative(move |t| t / (t * t + inv * inv).sqrt())
            .with_lipschitz(1.0);
            let smoothed = calculus::apply_function(&m, &psi).expect("|a| is hermitian");
            d.apply(&smoothed).l2_norm()
        })
        .collect()
}

/// Graph-norm identity of the doubled operator on an element assembled from
/// parts `(a, b; c, d)`: returns `(‖D·X‖₂², ‖δa*‖² + ‖δb*‖² + ‖δc‖² + ‖δd‖²)`.
pub fn doubled_graph_norms(d: &Derivation, parts: &[Vec<Element>]) -> (f64, f64) {
    let doubled = d.doubled();
    let x = algebra::amplified_from_parts(doubled.algebra(), 2, parts);
    let lhs = doubled.apply(&x).l2_norm().powi(2);
    let rhs = d.apply(&parts[0][0].adjoint()).l2_norm().powi(2)
        + d.apply(&parts[0][1].adjoint()).l2_norm().powi(2)
        + d.apply(&parts[1][0]).l2_norm().powi(2)
        + d.apply(&parts[1][1]).l2_norm().powi(2);
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;

    fn factor2() -> AlgebraRef {
        Algebra::factor(2)
    }

    fn rotation_z(alg: &AlgebraRef) -> Element {
        // z = [[0,1],[-1,0]] on one 2x2 block, weight 1
        Element::from_blocks(
            alg.clone(),
            vec![DMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::new(0.0, 0.0),
                    C64::new(1.0, 0.0),
                    C64::new(-1.0, 0.0),
                    C64::new(0.0, 0.0),
                ],
            )],
        )
        .unwrap()
    }

    #[test]
    fn inner_requires_skew_adjoint() {
        let alg = factor2();
        let one = Element::identity(&alg);
        assert!(matches!(
            Derivation::inner(one),
            Err(Error::NotSkewAdjoint { .. })
        ));
    }

    #[test]
    fn inner_examples_and_hand_commutator() {
        let alg = factor2();
        let zero = Derivation::inner(Element::zero(&alg)).unwrap();
        let mut rng = sample::rng(0, "deriv-zero", 0);
        let x = sample::random_element(&alg, &mut rng, 1.0);
        assert!(zero.apply(&x).l2_norm() < 1e-15);

        let d = Derivation::inner(rotation_z(&alg)).unwrap();
        // hand oracle: [z, diag(1,0)] = [[0,-1],[-1,0]]
        let x = Element::from_blocks(
            alg.clone(),
            vec![DMatrix::from_row_slice(
                2,
                2,
                &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
            )],
        )
        .unwrap();
        let expected = Element::from_blocks(
            alg.clone(),
            vec![DMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::new(0.0, 0.0),
                    C64::new(-1.0, 0.0),
                    C64::new(-1.0, 0.0),
                    C64::new(0.0, 0.0),
                ],
            )],
        )
        .unwrap();
        assert!((&d.apply(&x) - &expected).l2_norm() < 1e-14);
        // δ(1) = 0
        assert!(d.apply(&Element::identity(&alg)).l2_norm() < 1e-15);
        // *-derivation and Leibniz flags
        assert!(d.is_star_derivation(1e-12));
        assert!(d.leibniz_verified());
    }

    #[test]
    fn explicit_rejects_non_derivations() {
        let alg = factor2();
        // the transpose map on coordinates is linear but not Leibniz
        let dim = alg.dim_l2();
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for idx in 0..dim {
            m[(alg.star_index(idx), idx)] = C64::new(1.0, 0.0);
        }
        assert!(matches!(
            Derivation::explicit(alg, m),
            Err(Error::LeibnizViolation { .. })
        ));
    }

    #[test]
    fn dagger_is_involutive_and_fixes_star_derivations() {
        let alg = Algebra::shared(vec![2, 2], vec![1.0, 2.0]).unwrap();
        let mut rng = sample::rng(1, "deriv-dagger", 0);
        let z = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
        let d = Derivation::inner(z).unwrap();
        assert!(crate::linalg::max_abs(&(d.dagger().matrix() - d.matrix())) < 1e-12);

        // non-* derivation: [w,·] with general w
        let w = sample::random_element(&alg, &mut rng, 1.0);
        let dw = Derivation::commutator_with(&w);
        assert!(dw.star_defect() > 1e-3); // genuinely non-*
        let dd = dw.dagger().dagger();
        assert!(crate::linalg::max_abs(&(dd.matrix() - dw.matrix())) < 1e-12);
    }

    /// Oracle: δ† by elementwise definition `(δ(b*))*` over the basis.
    #[test]
    fn dagger_matches_elementwise_definition() {
        let alg = Algebra::shared(vec![2, 3], vec![1.0, 0.5]).unwrap();
        let mut rng = sample::rng(2, "deriv-dagdef", 0);
        let z = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
        let z2 = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
        // δ = [z,·] + i[z',·] is a derivation but not *-invariant
        let d = Derivation::commutator_with(&z).add(&Derivation::commutator_with(&z2).scale(C64::new(0.0, 1.0)));
        let dag = d.dagger();
        for idx in 0..alg.dim_l2() {
            let (k, i, j) = alg.coord_position(idx);
            let b = Element::basis_element(&alg, k, i, j);
            let oracle = d.apply(&b.adjoint()).adjoint();
            assert!((&dag.apply(&b) - &oracle).l2_norm() < 1e-12);
        }
        // graph-norm identity ‖δ†a‖ = ‖δa*‖
        for _ in 0..10 {
            let a = sample::random_element(&alg, &mut rng, 1.0);
            let lhs = dag.apply(&a).l2_norm();
            let rhs = d.apply(&a.adjoint()).l2_norm();
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs));
        }
    }

    #[test]
    fn doubled_zero_is_zero_and_graph_norm_identity_holds() {
        let alg = Algebra::shared(vec![2, 2], vec![1.0, 0.5]).unwrap();
        let zero = Derivation::zero(&alg);
        assert!(crate::linalg::max_abs(zero.doubled().matrix()) == 0.0);

        let mut rng = sample::rng(3, "deriv-doubled", 0);
        let w = sample::random_element(&alg, &mut rng, 1.0);
        let d = Derivation::commutator_with(&w);
        assert!(!d.doubled().leibniz_verified()); // non-* base
        for i in 0..100u64 {
            let mut r = sample::rng(4, "deriv-doubled-gn", i);
            let parts: Vec<Vec<Element>> = (0..2)
                .map(|_| (0..2).map(|_| sample::random_element(&alg, &mut r, 1.0)).collect())
                .collect();
            let (lhs, rhs) = doubled_graph_norms(&d, &parts);
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs), "identity off: {lhs} vs {rhs}");
        }

        // for a *-derivation the doubled operator is again a verified derivation
        let z = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
        let ds = Derivation::inner(z).unwrap();
        assert!(ds.doubled().leibniz_verified());
    }

    #[test]
    fn chain_rule_identity_for_powers_and_smoothstep() {
        let alg = Algebra::factor(3);
        let mut rng = sample::rng(5, "deriv-chain", 0);
        let z = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
        let d = Derivation::inner(z).unwrap();
        let a = sample::random_hermitian(&alg, &mut rng, 1.0);
        // f = id: residual 0 (kernel ≡ 1)
        let r = chain_rule_residual(&d, &a, &ScalarFunction::identity()).unwrap();
        assert!(r < 1e-12 * (1.0 + d.apply(&a).l2_norm()));
        // powers: telescoping identity
        for k in [2u32, 3, 5] {
            let r = chain_rule_residual(&d, &a, &ScalarFunction::power(k)).unwrap();
            assert!(r <= 1e-10 * (1.0 + a.op_norm().powi(k as i32)) * (1.0 + d.apply(&a).l2_norm()));
        }
        // smoothstep on a 3x3 block
        let r = chain_rule_residual(&d, &a, &ScalarFunction::smoothstep()).unwrap();
        assert!(r <= 1e-8 * (1.0 + d.apply(&a).l2_norm()));
    }

    #[test]
    fn lipschitz_bound_examples() {
        let alg = Algebra::shared(vec![3], vec![0.8]).unwrap();
        let mut rng = sample::rng(6, "deriv-lip", 0);
        let z = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
        let d = Derivation::inner(z).unwrap();
        let a = sample::random_hermitian(&alg, &mut rng, 1.5);
        let clip = lipschitz_bound(&d, &a, &ScalarFunction::clip_unit()).unwrap();
        assert!(clip.holds);
        // f(t) = 2t: equality by homogeneity
        let double = ScalarFunction::new("double", |t| 2.0 * t)
            .with_lipschitz(2.0)
            .with_derivative(|_| 2.0);
        let bc = lipschitz_bound(&d, &a, &double).unwrap();
        assert!(bc.holds && (bc.lhs - bc.rhs).abs() < 1e-9 * (1.0 + bc.rhs));
        // missing certificate is a domain error
        let free = ScalarFunction::new("cube", |t| t * t * t);
        assert!(matches!(
            lipschitz_bound(&d, &a, &free),
            Err(Error::MissingLipschitz { .. })
        ));
    }

    #[test]
    fn lipschitz_bound_abs_sweep_has_no_violations() {
        let alg = Algebra::shared(vec![2, 2], vec![1.0, 0.5]).unwrap();
        let f = ScalarFunction::abs();
        for i in 0..1000u64 {
            let mut rng = sample::rng(7, "deriv-lip-sweep", i);
            let z = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
            let d = Derivation::inner(z).unwrap();
            let a = sample::random_hermitian(&alg, &mut rng, sample::scale_for(i as usize));
            assert!(lipschitz_bound(&d, &a, &f).unwrap().holds, "violation at seed {i}");
        }
    }

    #[test]
    fn modulus_bound_cases() {
        let alg = factor2();
        let mut rng = sample::rng(8, "deriv-mod", 0);
        let z = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
        let d = Derivation::inner(z).unwrap();
        // positive a: |a| = a, bound holds with slack
        let g = sample::random_element(&alg, &mut rng, 1.0);
        let a = &g.adjoint() * &g;
        let bc = modulus_bound(&d, &a);
        assert!(bc.holds && bc.lhs <= d.apply(&a).l2_norm() + 1e-9);
        // hermitian unitary (spectrum {±1}): |a| = 1, lhs = 0
        let h = Element::from_blocks(
            alg.clone(),
            vec![DMatrix::from_row_slice(
                2,
                2,
                &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            )],
        )
        .unwrap();
        let bc = modulus_bound(&d, &h);
        assert!(bc.lhs < 1e-12 && bc.holds);
    }

    /// Oracle: both sides of the modulus bound on a fixed seeded 2x2
    /// instance, with `|a|` from the closed-form PSD square root
    /// `(M + √det·I)/√(tr + 2√det)` of `M = a*a`.
    #[test]
    fn modulus_bound_matches_closed_form_oracle() {
        let alg = factor2();
        let mut rng = sample::rng(42, "deriv-mod-oracle", 0);
        let z = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
        let d = Derivation::inner(z.clone()).unwrap();
        let a = sample::random_element(&alg, &mut rng, 1.0);
        let m = a.block(0).adjoint() * a.block(0);
        let det = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
        let tr = (m[(0, 0)] + m[(1, 1)]).re;
        let sqrt_det = det.sqrt();
        let denom = (tr + 2.0 * sqrt_det).sqrt();
        let id2 = DMatrix::<C64>::identity(2, 2);
        let abs_oracle = Element::from_blocks(
            alg.clone(),
            vec![(m + id2 * C64::new(sqrt_det, 0.0)) / C64::new(denom, 0.0)],
        )
        .unwrap();
        assert!((&abs_oracle - &calculus::modulus(&a)).op_norm() < 1e-12);
        let lhs_oracle = z.commutator(&abs_oracle).l2_norm();
        let rhs_oracle = std::f64::consts::SQRT_2 * z.commutator(&a).l2_norm();
        let bc = modulus_bound(&d, &a);
        assert!((bc.lhs - lhs_oracle).abs() < 1e-12 * (1.0 + lhs_oracle));
        assert!((bc.rhs - rhs_oracle).abs() < 1e-12 * (1.0 + rhs_oracle));
        assert!(bc.holds && lhs_oracle <= rhs_oracle);
    }

    #[test]
    fn modulus_smoothing_path_converges() {
        let alg = Algebra::factor(3);
        let mut rng = sample::rng(9, "deriv-psi", 0);
        let z = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
        let d = Derivation::inner(z).unwrap();
        let a = sample::random_element(&alg, &mut rng, 1.0);
        let path = modulus_smoothing_path(&d, &a, &[4, 16, 64, 256]);
        let limit = d.apply(&calculus::modulus(&a)).l2_norm();
        let errs: Vec<f64> = path.iter().map(|v| (v - limit).abs()).collect();
        assert!(errs.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
        assert!(errs.last().unwrap() / (1.0 + limit) < 1e-2);
    }

    /// Sum-of-derivations closure: the Lipschitz bound holds with the same
    /// constants for `δ = Σ δ_i` built from up to 4 inner derivations.
    #[test]
    fn summed_derivations_keep_lipschitz_bound() {
        let alg = factor2();
        let f = ScalarFunction::abs();
        for i in 0..200u64 {
            let mut rng = sample::rng(10, "deriv-sum", i);
            let count = 1 + (i as usize % 4);
            let mut d = Derivation::zero(&alg);
            for _ in 0..count {
                let z = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
                d = d.add(&Derivation::inner(z).unwrap());
            }
            let a = sample::random_hermitian(&alg, &mut rng, sample::scale_for(i as usize));
            assert!(lipschitz_bound(&d, &a, &f).unwrap().holds);
        }
    }

    /// *-derivation criterion: `inner(z)` with `z* = -z` satisfies
    /// `δ(x*) = (δx)*` on samples.
    #[test]
    fn star_derivation_criterion() {
        let alg = Algebra::shared(vec![2, 3], vec![1.0, 2.0]).unwrap();
        let mut rng = sample::rng(11, "deriv-star", 0);
        let z = sample::random_skew_adjoint(&alg, &mut rng, 1.0);
        let d = Derivation::inner(z).unwrap();
        for _ in 0..50 {
            let x = sample::random_element(&alg, &mut rng, 1.0);
            let lhs = d.apply(&x.adjoint());
            let rhs = d.apply(&x).adjoint();
            assert!((&lhs - &rhs).l2_norm() < 1e-12 * (1.0 + x.l2_norm()));
        }
    }
}
