//! Property-based invariants of the jump product and its estimators over
//! randomized box-union catalogs.

use bvf::geometry::{
    jump_facets, jump_product, l2_norm_sq, total_variation, BVFunction, Shape,
};
use bvf::vec::{pt2, Rotation};
use proptest::prelude::*;

/// Random half-integer box in [0, 2.5]^2 with weight in {-2, -1, 1, 2}.
fn arb_term() -> impl Strategy<Value = (f64, [u8; 4])> {
    (
        prop_oneof![Just(-2.0), Just(-1.0), Just(1.0), Just(2.0)],
        (0u8..4, 0u8..4, 1u8..3, 1u8..3).prop_map(|(x, y, w, h)| [x, y, w, h]),
    )
}

fn build(terms: Vec<(f64, [u8; 4])>) -> BVFunction {
    let shapes = terms
        .into_iter()
        .map(|(w, b)| {
            let lo = [b[0] as f64 * 0.5, b[1] as f64 * 0.5];
            let hi = [lo[0] + b[2] as f64 * 0.5, lo[1] + b[3] as f64 * 0.5];
            (w, Shape::axis_box(2, &lo, &hi).unwrap())
        })
        .collect();
    BVFunction::new(2, shapes).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// J(u+v, u+v) = J(u,u) + 2 J(u,v) + J(v,v).
    #[test]
    fn polarization(a in prop::collection::vec(arb_term(), 1..3),
                    b in prop::collection::vec(arb_term(), 1..3)) {
        let u = build(a);
        let v = build(b);
        let s = u.sum(&v).unwrap();
        let juu = jump_product(&u, &u).unwrap().value;
        let jvv = jump_product(&v, &v).unwrap().value;
        let juv = jump_product(&u, &v).unwrap().value;
        let jss = jump_product(&s, &s).unwrap().value;
        prop_assert!((jss - (juu + 2.0 * juv + jvv)).abs() < 1e-9,
            "polarization gap: {jss} vs {}", juu + 2.0 * juv + jvv);
    }

    /// |J(u,v)| <= sqrt(J(u,u) J(v,v)).
    #[test]
    fn cauchy_schwarz(a in prop::collection::vec(arb_term(), 1..3),
                      b in prop::collection::vec(arb_term(), 1..3)) {
        let u = build(a);
        let v = build(b);
        let juu = jump_product(&u, &u).unwrap().value;
        let jvv = jump_product(&v, &v).unwrap().value;
        let juv = jump_product(&u, &v).unwrap().value;
        prop_assert!(juv.abs() <= (juu * jvv).sqrt() + 1e-9);
    }

    /// J is nonnegative on the diagonal and scales like lambda^{d-1}; rigid
    /// motions leave it unchanged.
    #[test]
    fn scaling_and_rigid_motion(a in prop::collection::vec(arb_term(), 1..4),
                                lambda in 0.3f64..3.0,
                                angle in 0.0f64..6.28,
                                tx in -2.0f64..2.0) {
        let u = build(a);
        let j = jump_product(&u, &u).unwrap().value;
        prop_assert!(j >= -1e-12);
        let scaled = u.dilated(lambda).unwrap();
        let js = jump_product(&scaled, &scaled).unwrap().value;
        prop_assert!((js - lambda * j).abs() < 1e-9 * (1.0 + j),
            "scaling: {js} vs {}", lambda * j);
        let moved = u.rotated(&Rotation::from_angle_2d(angle)).translated(&pt2(tx, 0.7));
        let jm = jump_product(&moved, &moved).unwrap().value;
        prop_assert!((jm - j).abs() < 1e-8 * (1.0 + j), "rigid motion: {jm} vs {j}");
    }

    /// Facet total variation matches a brute-force finite-difference grid
    /// estimate within 1% for axis-box catalogs.
    #[test]
    fn total_variation_matches_grid_oracle(a in prop::collection::vec(arb_term(), 1..3)) {
        let u = build(a);
        let tv = total_variation(&u).unwrap();
        prop_assume!(tv > 0.5);
        // pixel oracle on a fine grid: sum of |u(x+h e_k) - u(x)| h over a
        // staircase; exact for axis-aligned discontinuities as h -> 0.
        // offset the grid so samples never hit the half-integer facets
        let h = 1.0 / 512.0;
        let (lo, hi) = u.support_bbox().unwrap();
        let nx = ((hi[0] - lo[0]) / h).round() as usize + 4;
        let ny = ((hi[1] - lo[1]) / h).round() as usize + 4;
        let x0 = lo[0] - 1.5 * h;
        let y0 = lo[1] - 1.5 * h;
        let mut est = 0.0;
        for i in 0..nx {
            for j in 0..ny {
                let x = x0 + i as f64 * h + 0.31 * h;
                let y = y0 + j as f64 * h + 0.31 * h;
                let v = u.eval(&pt2(x, y));
                est += (u.eval(&pt2(x + h, y)) - v).abs() * h;
                est += (u.eval(&pt2(x, y + h)) - v).abs() * h;
            }
        }
        prop_assert!((est - tv).abs() <= 0.01 * tv,
            "grid TV {est} vs facet TV {tv}");
    }

    /// Plancherel consistency: the facet decomposition reproduces the
    /// L2-norm bilinearity J(u,u) = sum over facets of jump^2 measure.
    #[test]
    fn facet_sum_equals_diagonal_product(a in prop::collection::vec(arb_term(), 1..4)) {
        let u = build(a);
        let facets = jump_facets(&u).unwrap();
        let direct: f64 = facets.iter().map(|f| f.jump() * f.jump() * f.measure).sum();
        let paired = jump_product(&u, &u).unwrap().value;
        prop_assert!((direct - paired).abs() < 1e-9 * (1.0 + direct));
        // sanity: norms stay finite and consistent
        let l2 = l2_norm_sq(&u).unwrap();
        prop_assert!(l2 >= -1e-12);
    }
}
