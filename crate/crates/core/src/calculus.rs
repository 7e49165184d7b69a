//! Spectral and Lipschitz functional calculus on Hermitian elements.
//!
//! `f(a) = U f(Λ) U*` blockwise, normal contractions (`t⁺∧1`, `t∧α`, `|t|`,
//! …), bump-kernel mollification of Lipschitz functions, divided differences
//! `f̃(s,t) = (f(s)-f(t))/(s-t)`, and the eigenbasis Schur multiplier that
//! realizes `b ↦ U (K ∘ U*bU) U*` for a two-variable kernel `K`. With the
//! divided-difference kernel this is the Fréchet derivative of `a ↦ f(a)`.

use std::sync::Arc;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::algebra::{AlgebraRef, Element};
use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Real scalar function with optional derivative and Lipschitz certificate.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    eval: RealFn,
    deriv: Option<RealFn>,
    lip_constant: Option<f64>,
    vanishes_at_zero: bool,
}

impl std::fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .field("lip_constant", &self.lip_constant)
            .field("vanishes_at_zero", &self.vanishes_at_zero)
            .finish()
    }
}

impl ScalarFunction {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let name = name.into();
        let eval: RealFn = Arc::new(eval);
        let vanishes = eval(0.0).abs() <= 1e-14;
        ScalarFunction {
            name,
            eval,
            deriv: None,
            lip_constant: None,
            vanishes_at_zero: vanishes,
        }
    }

    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(d));
        self
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lip_constant = Some(l);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn deriv(&self, t: f64) -> Result<f64> {
        match &self.deriv {
            Some(d) => Ok(d(t)),
            None => Err(Error::MissingDerivative {
                name: self.name.clone(),
                at: t,
            }),
        }
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    pub fn lip_constant(&self) -> Option<f64> {
        self.lip_constant
    }

    pub fn vanishes_at_zero(&self) -> bool {
        self.vanishes_at_zero
    }

    // ---- named functions addressable from the CLI ----

    pub fn identity() -> Self {
        ScalarFunction::new("identity", |t| t)
            .with_derivative(|_| 1.0)
            .with_lipschitz(1.0)
    }

    pub fn abs() -> Self {
        ScalarFunction::new("abs", f64::abs).with_lipschitz(1.0)
    }

    /// `t ↦ (t ∨ 0) ∧ 1`, the unit-interval contraction.
    pub fn clip_unit() -> Self {
        ScalarFunction::new("clip_unit", |t| t.clamp(0.0, 1.0)).with_lipschitz(1.0)
    }

    pub fn pos_part() -> Self {
        ScalarFunction::new("pos_part", |t| t.max(0.0)).with_lipschitz(1.0)
    }

    pub fn neg_part() -> Self {
        ScalarFunction::new("neg_part", |t| (-t).max(0.0)).with_lipschitz(1.0)
    }

    /// `t ↦ t ∧ α`.
    pub fn wedge(alpha: f64) -> Self {
        ScalarFunction::new(format!("wedge:{alpha}"), move |t| t.min(alpha)).with_lipschitz(1.0)
    }

    /// `t ↦ (t - 1)⁺`.
    pub fn shifted_pos() -> Self {
        ScalarFunction::new("shifted_pos", |t| (t - 1.0).max(0.0)).with_lipschitz(1.0)
    }

    pub fn power(k: u32) -> Self {
        ScalarFunction::new(format!("power:{k}"), move |t| t.powi(k as i32))
            .with_derivative(move |t| k as f64 * t.powi(k as i32 - 1))
    }

    /// C¹ ramp: 0 below 0, `3t² - 2t³` on `[0,1]`, 1 above.
    pub fn smoothstep() -> Self {
        ScalarFunction::new("smoothstep", |t| {
            if t <= 0.0 {
                0.0
            } else if t >= 1.0 {
                1.0
            } else {
                t * t * (3.0 - 2.0 * t)
            }
        })
        .with_derivative(|t| if (0.0..=1.0).contains(&t) { 6.0 * t * (1.0 - t) } else { 0.0 })
        .with_lipschitz(1.5)
    }

    /// Parse the CLI-facing names: `clip_unit`, `abs`, `pos_part`,
    /// `wedge:<α>`, `power:<k>`, `smoothstep`.
    pub fn parse(name: &str) -> Result<Self> {
        if let Some(rest) = name.strip_prefix("wedge:") {
            let alpha: f64 = rest.parse().map_err(|_| Error::UnknownFunction(name.into()))?;
            return Ok(ScalarFunction::wedge(alpha));
        }
        if let Some(rest) = name.strip_prefix("power:") {
            let k: u32 = rest.parse().map_err(|_| Error::UnknownFunction(name.into()))?;
            return Ok(ScalarFunction::power(k));
        }
        match name {
            "clip_unit" => Ok(ScalarFunction::clip_unit()),
            "abs" => Ok(ScalarFunction::abs()),
            "pos_part" => Ok(ScalarFunction::pos_part()),
            "smoothstep" => Ok(ScalarFunction::smoothstep()),
            _ => Err(Error::UnknownFunction(name.into())),
        }
    }
}

// ---------------------------------------------------------------------------
// spectral decomposition and functional calculus
// ---------------------------------------------------------------------------

/// Blockwise `a = U Λ U*` of a Hermitian element, eigenvalues ascending.
pub struct SpectralDecomposition {
    algebra: AlgebraRef,
    pub eigenvalues: Vec<Vec<f64>>,
    pub unitaries: Vec<DMatrix<C64>>,
}

impl SpectralDecomposition {
    /// Element `U g(Λ) U*`.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> Element {
        let blocks = self
            .unitaries
            .iter()
            .zip(&self.eigenvalues)
            .map(|(u, vals)| {
                let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    vals.len(),
                    vals.iter().map(|&v| C64::new(g(v), 0.0)),
                ));
                u * d * u.adjoint()
            })
            .collect();
        Element::from_blocks(self.algebra.clone(), blocks).expect("shapes match")
    }

    pub fn reassemble(&self) -> Element {
        self.map(|t| t)
    }

    pub fn all_eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.eigenvalues.iter().flatten().copied()
    }
}

fn hermitian_tolerance(a: &Element) -> f64 {
    1e-9 * (1.0 + a.op_norm())
}

/// Blockwise eigendecomposition; rejects non-Hermitian input.
pub fn hermitian_eig(a: &Element) -> Result<SpectralDecomposition> {
    let defect = a.hermitian_defect();
    if defect > hermitian_tolerance(a) {
        return Err(Error::NotHermitian { defect });
    }
    let mut eigenvalues = Vec::with_capacity(a.blocks().len());
    let mut unitaries = Vec::with_capacity(a.blocks().len());
    for b in a.blocks() {
        let (vals, vecs) = linalg::hermitian_eigen(b);
        eigenvalues.push(vals.iter().copied().collect());
        unitaries.push(vecs);
    }
    Ok(SpectralDecomposition {
        algebra: a.algebra().clone(),
        eigenvalues,
        unitaries,
    })
}

/// `f(a)` by spectral calculus; requires `a` Hermitian.
pub fn apply_function(a: &Element, f: &ScalarFunction) -> Result<Element> {
    Ok(hermitian_eig(a)?.map(|t| f.eval(t)))
}

/// `a⁺ ∧ 1`: eigenvalues clipped to `[0,1]` exactly.
pub fn clip_unit(a: &Element) -> Result<Element> {
    Ok(hermitian_eig(a)?.map(|t| t.clamp(0.0, 1.0)))
}

/// `a ∧ α`.
pub fn wedge(a: &Element, alpha: f64) -> Result<Element> {
    Ok(hermitian_eig(a)?.map(|t| t.min(alpha)))
}

pub fn pos_part(a: &Element) -> Result<Element> {
    Ok(hermitian_eig(a)?.map(|t| t.max(0.0)))
}

pub fn neg_part(a: &Element) -> Result<Element> {
    Ok(hermitian_eig(a)?.map(|t| (-t).max(0.0)))
}

/// `(a - 1)⁺`.
pub fn shifted_pos(a: &Element) -> Result<Element> {
    Ok(hermitian_eig(a)?.map(|t| (t - 1.0).max(0.0)))
}

/// `|x| = (x*x)^{1/2}`, defined for every element.
pub fn modulus(x: &Element) -> Element {
    let gram = &x.adjoint() * x;
    hermitian_eig(&gram)
        .expect("x*x is hermitian")
        .map(|t| t.max(0.0).sqrt())
}

// ---------------------------------------------------------------------------
// divided differences and the eigenbasis Schur multiplier
// ---------------------------------------------------------------------------

/// Relative threshold below which `f̃(s,t)` switches to `f'((s+t)/2)`.
pub fn coincidence_threshold(s: f64, t: f64) -> f64 {
    1e-7 * (1.0 + s.abs() + t.abs())
}

/// `f̃(s,t) = (f(s)-f(t))/(s-t)`, with `f'` at near-coincident arguments.
pub fn divided_difference(f: &ScalarFunction, s: f64, t: f64) -> Result<f64> {
    if (s - t).abs() <= coincidence_threshold(s, t) {
        f.deriv(0.5 * (s + t))
    } else {
        Ok((f.eval(s) - f.eval(t)) / (s - t))
    }
}

/// `b ↦ U (K ∘ (U* b U)) U*` per block, where `a = U Λ U*` and
/// `K_{ij} = kernel(λ_i, λ_j)`.
///
/// For a product kernel `k(s,t) = f(s)g(t)` this is exactly `f(a)·b·g(a)`.
pub fn schur_multiplier(
    a: &Element,
    kernel: impl Fn(f64, f64) -> f64,
    b: &Element,
) -> Result<Element> {
    assert_eq!(a.algebra(), b.algebra(), "elements belong to different algebras");
    let dec = hermitian_eig(a)?;
    let blocks = dec
        .unitaries
        .iter()
        .zip(&dec.eigenvalues)
        .zip(b.blocks())
        .map(|((u, vals), bb)| {
            let rotated = u.adjoint() * bb * u;
            let scaled = DMatrix::from_fn(rotated.nrows(), rotated.ncols(), |i, j| {
                rotated[(i, j)] * C64::new(kernel(vals[i], vals[j]), 0.0)
            });
            u * scaled * u.adjoint()
        })
        .collect();
    Element::from_blocks(a.algebra().clone(), blocks)
}

/// `π_a(f̃) b`: the divided-difference kernel applied to `b`, i.e. the
/// derivative of `a ↦ f(a)` at `a` in direction `b` when both are Hermitian.
pub fn apply_divided_difference(a: &Element, f: &ScalarFunction, b: &Element) -> Result<Element> {
    let dec = hermitian_eig(a)?;
    // Fail early if a coincidence would need a missing derivative.
    if !f.has_derivative() {
        let vals: Vec<f64> = dec.all_eigenvalues().collect();
        for (i, &s) in vals.iter().enumerate() {
            for &t in &vals[i..] {
                if (s - t).abs() <= coincidence_threshold(s, t) {
                    return Err(Error::MissingDerivative {
                        name: f.name().to_string(),
                        at: 0.5 * (s + t),
                    });
                }
            }
        }
    }
    schur_multiplier(
        a,
        |s, t| divided_difference(f, s, t).expect("derivative availability checked above"),
        b,
    )
}

// ---------------------------------------------------------------------------
// mollifiers
// ---------------------------------------------------------------------------

/// Adaptive Simpson quadrature with an absolute tolerance.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
                + rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fb, fm) = (f(a), f(b), f(m));
    let whole = simpson(a, fa, b, fb, fm);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

fn bump_raw(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// Normalization of the standard bump on `(-1,1)`, computed once to 1e-12.
fn bump_mass() -> f64 {
    static MASS: OnceLock<f64> = OnceLock::new();
    *MASS.get_or_init(|| adaptive_simpson(&bump_raw, -1.0, 1.0, 1e-12))
}

fn bump(t: f64) -> f64 {
    bump_raw(t) / bump_mass()
}

fn bump_deriv(t: f64) -> f64 {
    if t.abs() >= 1.0 - 1e-12 {
        return 0.0;
    }
    let d = 1.0 - t * t;
    bump_raw(t) * (-2.0 * t / (d * d)) / bump_mass()
}

const MOLLIFY_TOL: f64 = 1e-10;

/// Mollified family member `f_n = f * φ_n - (f * φ_n)(0)`, `φ_n(t) = n·φ(nt)`.
#[derive(Debug, Clone)]
pub struct MollifierFamily {
    pub base: ScalarFunction,
    pub n: u32,
    pub mollified: ScalarFunction,
}

/// Mollify a Lipschitz function with `f(0) = 0` against the standard bump.
///
/// The returned function is smooth, vanishes at zero, stays within `2/n·Lip`
/// of `f` in sup norm, and keeps the Lipschitz constant of `f`. Its
/// derivative is evaluated by differentiating the kernel, so no derivative
/// of `f` is needed.
pub fn mollify(f: &ScalarFunction, n: u32) -> Result<MollifierFamily> {
    let lip = f.lip_constant().ok_or(Error::MissingLipschitz {
        name: f.name().to_string(),
    })?;
    if !f.vanishes_at_zero() {
        return Err(Error::NonVanishing {
            name: f.name().to_string(),
            value: f.eval(0.0),
        });
    }
    assert!(n > 0, "mollifier index must be positive");
    let base_eval = f.eval.clone();
    let nn = n as f64;
    let conv = move |t: f64, g: &RealFn| {
        adaptive_simpson(&|u| g(t - u / nn) * bump(u), -1.0, 1.0, MOLLIFY_TOL)
    };
    let at_zero = conv(0.0, &base_eval);

    let eval_base = base_eval.clone();
    let eval = move |t: f64| {
        adaptive_simpson(&|u| eval_base(t - u / nn) * bump(u), -1.0, 1.0, MOLLIFY_TOL) - at_zero
    };
    let deriv_base = base_eval.clone();
    let deriv = move |t: f64| {
        adaptive_simpson(&|u| deriv_base(t - u / nn) * nn * bump_deriv(u), -1.0, 1.0, MOLLIFY_TOL)
    };

    let name = format!("mollified:{}:{}", f.name(), n);
    let mollified = ScalarFunction {
        name,
        eval: Arc::new(eval),
        deriv: Some(Arc::new(deriv)),
        lip_constant: Some(lip),
        vanishes_at_zero: true,
    };
    Ok(MollifierFamily {
        base: f.clone(),
        n,
        mollified,
    })
}

/// Smoothed unit contraction `φ_ε`, realized as the mollified clip with
/// index `n = ⌈1/ε⌉`; maps into `[-ε, 1+ε]`, Lipschitz constant 1.
pub fn smoothed_clip(eps: f64) -> ScalarFunction {
    let n = (1.0 / eps).ceil().max(1.0) as u32;
    mollify(&ScalarFunction::clip_unit(), n)
        .expect("clip is Lipschitz and vanishes at zero")
        .mollified
}
