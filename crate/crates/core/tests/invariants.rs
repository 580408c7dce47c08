use bohmian::bohm::{bohm_momentum, polar_decompose};
use bohmian::grid::{build_grid, to_momentum_rep};
use bohmian::moyal::{cev_momentum, star_poly, weak_value_momentum, wigner_transform, PolySymbol};
use bohmian::schrodinger::{chirped_gaussian, superpose};
use bohmian::{Complex, C64};
use num_rational::Ratio;
use proptest::prelude::*;

type Q = Ratio<i64>;

fn poly() -> impl Strategy<Value = PolySymbol<Q>> {
    prop::collection::vec(((0u32..3, 0u32..3), -4i64..5, -4i64..5), 1..4).prop_map(|terms| {
        PolySymbol::from_terms(
            terms
                .into_iter()
                .map(|(ab, re, im)| (ab, Complex::new(Q::from_integer(re), Q::from_integer(im)))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn star_product_is_associative(a in poly(), b in poly(), c in poly(), num in 1i64..5, den in 1i64..4) {
        let hbar = Q::new(num, den);
        let star = |x: &PolySymbol<Q>, y: &PolySymbol<Q>| star_poly(x, y, &hbar, 16).symbol;
        prop_assert_eq!(star(&star(&a, &b), &c), star(&a, &star(&b, &c)));
    }

    #[test]
    fn the_three_momentum_routes_agree(
        x0 in -2.0f64..2.0,
        width in 0.8f64..1.5,
        p0 in -1.5f64..1.5,
        chirp in -0.2f64..0.2,
    ) {
        // the unmasked support stays within a quarter box of the packet
        let g = build_grid(-24.0, 24.0, 256).unwrap();
        let psi = chirped_gaussian(g, x0, width, p0, chirp, 1.0).unwrap();
        let p_b = bohm_momentum(&polar_decompose(&psi, 1.0).unwrap());
        let cev = cev_momentum(&wigner_transform(&psi, 1.0));
        let weak = weak_value_momentum(&psi, 1.0).real();
        prop_assert!(cev.max_gap(&p_b).unwrap() < 1e-6);
        prop_assert!(weak.max_gap(&p_b).unwrap() < 1e-6);
    }

    #[test]
    fn wigner_marginals_match_both_densities(
        x1 in -5.0f64..-1.0,
        x2 in 1.0f64..5.0,
        p1 in -1.0f64..1.0,
        w in 0.2f64..1.0,
        phase in 0.0f64..std::f64::consts::TAU,
    ) {
        let g = build_grid(-20.0, 20.0, 256).unwrap();
        let a = chirped_gaussian(g, x1, 1.0, p1, 0.0, 1.0).unwrap();
        let b = chirped_gaussian(g, x2, 0.9, -p1, 0.1, 1.0).unwrap();
        let psi = superpose(&a, &b, (C64::new(1.0, 0.0), C64::from_polar(w, phase))).unwrap();
        let f = wigner_transform(&psi, 1.0);
        let rho = psi.density();
        let phi = to_momentum_rep(&psi, 1.0).density();
        for (m, r) in f.x_marginal().iter().zip(&rho.values) {
            prop_assert!((m - r).abs() < 1e-8);
        }
        for (m, r) in f.p_marginal().iter().zip(&phi) {
            prop_assert!((m - r).abs() < 1e-8);
        }
        prop_assert!((f.total() - 1.0).abs() < 1e-8);
    }
}
