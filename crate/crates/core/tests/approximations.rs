//! Approximation limits: the resolvent-built approximating forms, the
//! bounded-generator semigroup approximation, order-interval closure under
//! limits, and amplification compatibility.

use ncd_core::algebra::Algebra;
use ncd_core::forms::Form;
use ncd_core::instance::{generate, Family, GenConfig};
use ncd_core::semigroups::{self, approx_form, approx_form_matrix, resolvent, semigroup};
use ncd_core::{linalg, sample, C64};

const BETA_GRID: [f64; 4] = [10.0, 100.0, 1000.0, 10_000.0];

fn dirichlet_instance(seed: u64) -> (Form, semigroups::SuperOperator) {
    let inst = generate(&GenConfig::new(Family::DerivationFamily, vec![2, 2], 2, seed)).unwrap();
    (inst.form, inst.generator)
}

#[test]
fn approximating_forms_converge_with_bounded_constants() {
    for seed in 0..5u64 {
        let (e, l) = dirichlet_instance(seed);
        let alg = e.algebra().clone();
        let k = e.sector_constant().unwrap();
        let mut rng = sample::rng(seed, "approx-pairs", 0);
        for _ in 0..5 {
            let x = {
                let raw = sample::random_hermitian(&alg, &mut rng, 1.0);
                raw.scale(C64::new(1.0 / raw.l2_norm(), 0.0))
            };
            let y = {
                let raw = sample::random_hermitian(&alg, &mut rng, 1.0);
                raw.scale(C64::new(1.0 / raw.l2_norm(), 0.0))
            };
            let target = e.eval(&x, &y);
            let mut last = f64::INFINITY;
            for beta in BETA_GRID {
                let err = (approx_form(&l, beta, &x, &y).unwrap() - target).norm();
                assert!(err <= last * (1.0 + 1e-9), "no decrease at β = {beta}");
                last = err;

                // (K+1) bound: |ℰ₁^(β)(x,y)| ≤ (K+1) ℰ₁(x,x)^½ ℰ₁^(β)(y,y)^½
                let eb = approx_form(&l, beta, &x, &y).unwrap() + x.inner(&y);
                let dx = e.eval_shifted(1.0, &x, &x).re;
                let dyb = (approx_form(&l, beta, &y, &y).unwrap() + y.inner(&y)).re;
                assert!(dx >= 0.0 && dyb >= -1e-12);
                assert!(
                    eb.norm() <= (k + 1.0) * (dx * dyb.max(0.0)).sqrt() + 1e-9,
                    "constant bound violated at β = {beta}"
                );
            }
            assert!(last <= 1e-3 * (1.0 + target.norm()), "final error {last}");
        }

        // boundedness: ℰ^(β)(x,x) within 10% of ℰ(x,x) at β = 10⁴
        for i in 0..10 {
            let x = sample::random_hermitian(&alg, &mut rng, sample::scale_for(i));
            let diag = e.eval(&x, &x).re;
            let approx = approx_form(&l, 1e4, &x, &x).unwrap().re;
            assert!(
                (approx - diag).abs() <= 0.1 * diag.abs() + 1e-8 * x.l2_norm().powi(2),
                "β-diagonal drifted: {approx} vs {diag}"
            );
        }

        // matrix-level route agrees with the scalar route
        let eb = approx_form_matrix(&l, 100.0).unwrap();
        let mut rng2 = sample::rng(seed, "approx-matrix", 0);
        let x = sample::random_hermitian(&alg, &mut rng2, 1.0);
        let y = sample::random_hermitian(&alg, &mut rng2, 1.0);
        let a = eb.eval(&x, &y);
        let b = approx_form(&l, 100.0, &x, &y).unwrap();
        assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()));
    }
}

#[test]
fn yosida_limits_keep_the_order_interval() {
    let (_, l) = dirichlet_instance(11);
    let alg = l.algebra().clone();
    let mut rng = sample::rng(13, "yosida-interval", 0);
    for _ in 0..8 {
        let x = sample::random_unit_interval(&alg, &mut rng);
        // the Yosida family maps [0,1] into [0,1]; its limit (the semigroup)
        // must stay there, the order interval being closed under L² limits
        let mut approx = Vec::new();
        for alpha in BETA_GRID {
            let y = semigroups::yosida(&l, alpha, 0.7).unwrap().apply(&x);
            assert!(y.is_positive(1e-7), "Yosida left the cone at α = {alpha}");
            approx.push(y);
        }
        let limit = semigroup(&l, 0.7).apply(&x);
        let drift = (&approx[approx.len() - 1] - &limit).l2_norm();
        assert!(drift <= 1e-3 * (1.0 + limit.l2_norm()));
        assert!(limit.is_positive(1e-8));
        let ones = ncd_core::algebra::Element::identity(&alg);
        assert!((&ones - &limit).is_positive(1e-8), "limit exceeded 1");
    }
}

#[test]
fn amplification_preserves_resolvents_and_shrinks_the_sector() {
    let (e, l) = dirichlet_instance(17);
    // n = 1 amplification is the identity
    let e1 = e.amplify(1);
    assert!(linalg::max_abs(&(e1.matrix() - e.matrix())) < 1e-15);

    for n in [2usize, 3] {
        let ea = e.amplify(n);
        let la = l.amplify(n);
        // entrywise resolvent compatibility
        let lhs = resolvent(&la, 1.3).unwrap();
        let rhs = resolvent(&l, 1.3).unwrap().amplify(n);
        assert!(linalg::max_abs(&(lhs.matrix() - rhs.matrix())) < 1e-10);
        // the amplified generator is the generator of the amplified form
        let ga = semigroups::generator_from_form(&ea);
        assert!(linalg::max_abs(&(ga.matrix() - la.matrix())) < 1e-12);
        // sector constant does not grow under amplification
        let k = e.sector_constant().unwrap();
        let ka = ea.sector_constant().unwrap();
        assert!(ka <= k + 1e-9, "K^[{n}] = {ka} exceeds K = {k}");
    }
}

#[test]
fn laplace_quadrature_matches_resolvent_on_an_instance() {
    let (_, l) = dirichlet_instance(23);
    let alg = l.algebra().clone();
    let mut rng = sample::rng(29, "laplace", 0);
    let x = sample::random_element(&alg, &mut rng, 1.0);
    for alpha in [0.8, 2.0] {
        let direct = resolvent(&l, alpha).unwrap().apply(&x);
        let quad = semigroups::laplace_resolvent(&l, alpha, &x);
        assert!(
            (&direct - &quad).l2_norm() <= 1e-6 * (1.0 + direct.l2_norm()),
            "quadrature drift at α = {alpha}"
        );
    }
}

#[test]
fn interval_limit_lemma_on_sequences() {
    // limits of [0,1]-valued sequences stay in [0,1]
    let alg = Algebra::shared(vec![2, 2], vec![1.0, 0.5]).unwrap();
    let mut rng = sample::rng(31, "interval-limit", 0);
    let target = sample::random_unit_interval(&alg, &mut rng);
    let mut seq = Vec::new();
    for k in 1..=6 {
        let noise = sample::random_hermitian(&alg, &mut rng, 1.0 / (1 << k) as f64);
        let x = &target + &noise;
        seq.push(ncd_core::calculus::clip_unit(&x).unwrap());
    }
    let last = seq.last().unwrap();
    assert!((last - &target).l2_norm() < 0.2);
    assert!(last.is_positive(1e-12));
    let ones = ncd_core::algebra::Element::identity(&alg);
    assert!((&ones - last).is_positive(1e-12));
}
