//! Property tests for the grid calculus invariants.

mod common;
use common::*;
use plasma_branch::Domain;
use proptest::prelude::*;

fn interior_field(domain: &Domain, coeffs: &[f64]) -> plasma_branch::Field {
    let mut f = domain.field_from_fn(|x, y| {
        coeffs[0]
            + coeffs[1] * x
            + coeffs[2] * y
            + coeffs[3] * x * y
            + coeffs[4] * (3.0 * x + y).sin()
    });
    for i in 0..domain.node_count() {
        if domain.is_boundary(i) {
            f.values_mut()[i] = 0.0;
        }
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn integrate_is_linear(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        c1 in -2.0f64..2.0,
        c2 in -2.0f64..2.0,
    ) {
        let d = disk(32, 16);
        let f = d.field_from_fn(|x, y| x + 0.5 * y * y + c1);
        let g = d.field_from_fn(|x, y| (x * y).cos() + c2);
        let combo = f.scaled(a).axpy(b, &g);
        let lhs = d.integrate(&combo);
        let rhs = a * d.integrate(&f) + b * d.integrate(&g);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())));
    }

    #[test]
    fn green_is_self_adjoint(
        cf in proptest::array::uniform5(-1.0f64..1.0),
        cg in proptest::array::uniform5(-1.0f64..1.0),
    ) {
        let d = disk(24, 16);
        let f = interior_field(&d, &cf);
        let g = interior_field(&d, &cg);
        let gf = d.green(&f).unwrap();
        let gg = d.green(&g).unwrap();
        let q = d.quad_weights();
        let a: f64 = (0..d.node_count()).map(|i| q[i] * f.values()[i] * gg.values()[i]).sum();
        let b: f64 = (0..d.node_count()).map(|i| q[i] * g.values()[i] * gf.values()[i]).sum();
        let scale = f.max_abs() * g.max_abs() + 1.0;
        prop_assert!((a - b).abs() <= 1e-10 * scale);
    }

    #[test]
    fn fluctuations_have_zero_mean(
        w0 in 0.2f64..3.0,
        wx in -0.1f64..0.1,
        cf in proptest::array::uniform5(-2.0f64..2.0),
    ) {
        let d = square(24);
        let w = d.field_from_fn(|x, _| w0 + wx * x);
        let f = d.field_from_fn(|x, y| cf[0] + cf[1] * x + cf[2] * y + cf[3] * x * x + cf[4] * (x + y).sin());
        let fl = d.weighted_fluctuation(&w, &f).unwrap();
        let m = d.weighted_mean(&w, &fl).unwrap();
        prop_assert!(m.abs() <= 1e-13 * (1.0 + f.max_abs()));
        // idempotence: [f] is its own fluctuation
        let fl2 = d.weighted_fluctuation(&w, &fl).unwrap();
        let gap = fl.values().iter().zip(fl2.values()).fold(0.0f64, |mx, (a, b)| mx.max((a - b).abs()));
        prop_assert!(gap <= 1e-12 * (1.0 + f.max_abs()));
    }

    #[test]
    fn green_of_nonnegative_source_is_positive(
        bumps in proptest::collection::vec((0.1f64..0.9, 0.1f64..0.9, 0.1f64..2.0), 1..4),
    ) {
        let d = square(24);
        let mut src = d.zeros();
        for (bx, by, amp) in &bumps {
            let f = d.field_from_fn(|x, y| {
                let r2 = (x - bx).powi(2) + (y - by).powi(2);
                amp * (-60.0 * r2).exp()
            });
            src = src.axpy(1.0, &f);
        }
        for i in 0..d.node_count() {
            if d.is_boundary(i) {
                src.values_mut()[i] = 0.0;
            }
        }
        let sol = d.green(&src).unwrap();
        for i in 0..d.node_count() {
            if !d.is_boundary(i) {
                prop_assert!(sol.values()[i] > 0.0);
            }
        }
    }
}
