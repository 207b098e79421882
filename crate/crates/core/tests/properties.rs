use hypermetric::contraction::{caratheodory_diameter, dilate_disk, dilation_constant};
use hypermetric::holomap::{Expr, RangeVerdict};
use hypermetric::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn omega(a: Complex64, b: Complex64) -> f64 {
    let num = (c(1.0, 0.0) - a.conj() * b).norm();
    let diff = (a - b).norm();
    0.5 * ((num + diff) / (num - diff)).ln()
}

fn complex(scale: f64) -> impl Strategy<Value = Complex64> {
    (-scale..scale, -scale..scale).prop_map(|(re, im)| c(re, im))
}

fn in_disk(r: f64) -> impl Strategy<Value = Complex64> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, t)| Complex64::from_polar(m, t))
}

fn expr_text(n: usize) -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (1..=n).prop_map(|j| format!("z{j}")),
        (-9.0..9.0f64).prop_map(|x| format!("{x:.3}")),
        (0.0..5.0f64).prop_map(|x| format!("{x:.2}i")),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} - {b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/({b})")),
            (inner.clone(), 0u32..4).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.prop_map(|a| format!("-({a})")),
        ]
    })
}

/// `m_{b2} ∘ p ∘ m_{b1}` with `Σ|p_j| < 1`: a self-map of the disk with
/// relatively compact image.
fn self_map() -> impl Strategy<Value = HoloMap> {
    (
        in_disk(0.8),
        in_disk(0.8),
        prop::collection::vec(complex(1.0), 1..5),
        0.05..0.99f64,
    )
        .prop_map(|(b1, b2, coeffs, budget)| {
            let total: f64 = coeffs.iter().map(|z| z.norm()).sum::<f64>().max(1e-9);
            let mobius = |b: Complex64, e: Expr| {
                Expr::Div(
                    Box::new(Expr::Sub(Box::new(e.clone()), Box::new(Expr::Const(b)))),
                    Box::new(Expr::Sub(
                        Box::new(Expr::Const(c(1.0, 0.0))),
                        Box::new(Expr::Mul(Box::new(Expr::Const(b.conj())), Box::new(e))),
                    )),
                )
            };
            let w = mobius(b1, Expr::Var(0));
            let mut poly = Expr::Const(c(0.0, 0.0));
            for (j, a) in coeffs.iter().enumerate() {
                let term = Expr::Mul(
                    Box::new(Expr::Const(a * budget / total)),
                    Box::new(Expr::Pow(Box::new(w.clone()), j as u32)),
                );
                poly = Expr::Add(Box::new(poly), Box::new(term));
            }
            HoloMap::from_components(1, vec![mobius(b2, poly)]).unwrap()
        })
}

fn nested_disks() -> impl Strategy<Value = (Domain, Domain)> {
    (
        complex(2.0),
        0.2..2.0f64,
        0.05..0.95f64,
        0.0..1.0f64,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(cx, rx, frac, off, ang)| {
            let ru = frac * rx;
            let shift = Complex64::from_polar(off * (rx - ru) * 0.99, ang);
            (Domain::disk(cx, rx).unwrap(), Domain::disk(cx + shift, ru).unwrap())
        })
}

fn nested_polydiscs() -> impl Strategy<Value = (Domain, Domain)> {
    (nested_disks(), nested_disks()).prop_map(|((x1, u1), (x2, u2))| {
        let (cx1, rx1) = x1.product_form().unwrap();
        let (cu1, ru1) = u1.product_form().unwrap();
        let (cx2, rx2) = x2.product_form().unwrap();
        let (cu2, ru2) = u2.product_form().unwrap();
        (
            Domain::polydisc(vec![cx1[0], cx2[0]], vec![rx1[0], rx2[0]]).unwrap(),
            Domain::polydisc(vec![cu1[0], cu2[0]], vec![ru1[0], ru2[0]]).unwrap(),
        )
    })
}

fn unit_direction(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(complex(1.0), n).prop_filter_map("nonzero", |v| {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (norm > 1e-3).then(|| v.iter().map(|z| z / norm).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_maps_reparse_identically(text in expr_text(3)) {
        let f = HoloMap::parse(&text, 3).unwrap();
        let again = HoloMap::parse(&f.to_string(), 3).unwrap();
        prop_assert_eq!(f.components(), again.components());
    }

    #[test]
    fn jvp_is_complex_linear(text in expr_text(2), z in prop::collection::vec(complex(0.9), 2),
                             v in prop::collection::vec(complex(1.0), 2), w in prop::collection::vec(complex(1.0), 2),
                             a in complex(2.0), b in complex(2.0)) {
        let f = HoloMap::parse(&text, 2).unwrap();
        prop_assume!(f.eval_raw(&z).is_ok_and(|y| y.iter().all(|u| u.norm() < 1e8)));
        let combo: Vec<Complex64> = v.iter().zip(&w).map(|(p, q)| a * p + b * q).collect();
        let lhs = f.jvp(&z, &combo).unwrap();
        let jv = f.jvp(&z, &v).unwrap();
        let jw = f.jvp(&z, &w).unwrap();
        for ((l, p), q) in lhs.iter().zip(&jv).zip(&jw) {
            let rhs = a * p + b * q;
            // cancelling terms leave rounding noise even when the derivative vanishes
            let scale = (a * p).norm() + (b * q).norm() + a.norm() + b.norm();
            prop_assert!((l - rhs).norm() <= 1e-12 * scale.max(l.norm()), "{} vs {}", l, rhs);
        }
    }

    #[test]
    fn metrics_are_homogeneous(lambda in complex(3.0), v in unit_direction(2), t in 0.0..0.95f64, s in 0.0..0.95f64) {
        prop_assume!(lambda.norm() > 1e-3);
        let poly = Domain::polydisc(vec![c(0.1, 0.0), c(0.0, -0.3)], vec![1.0, 0.7]).unwrap();
        let domains = [poly.clone(), poly.to_semianalytic().unwrap()];
        let x = [c(0.1, 0.0) + Complex64::from_polar(t, 1.0), c(0.0, -0.3) + Complex64::from_polar(0.7 * s, -2.0)];
        let lv: Vec<Complex64> = v.iter().map(|z| lambda * z).collect();
        for d in &domains {
            for m in [&Caratheodory::new(d) as &dyn Metric, &Kobayashi::new(d)] {
                let base = m.eval(&x, &v).unwrap().value;
                let scaled = m.eval(&x, &lv).unwrap().value;
                let want = lambda.norm() * base;
                prop_assert!((scaled - want).abs() <= 1e-12 * want, "{} vs {}", scaled, want);
            }
        }
    }

    #[test]
    fn larger_domains_have_smaller_metrics((x, u) in nested_polydiscs(), seed in 0u64..1000, v in unit_direction(2)) {
        for p in u.sample(16, seed).unwrap() {
            let ex = caratheodory_metric(&x, &p, &v).unwrap().value;
            let eu = caratheodory_metric(&u, &p, &v).unwrap().value;
            prop_assert!(ex <= eu * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn holomorphic_self_maps_contract(f in self_map(), z in in_disk(0.999), w in in_disk(0.999), v in complex(1.0)) {
        let d = Domain::unit_disk();
        prop_assert_eq!(range_check(&f, &d, &d, 32, 0).unwrap().verdict, RangeVerdict::Supported);
        let (fz, dv) = f.eval_jvp(&[z], &[v]).unwrap();
        let before = poincare_metric(z, v).unwrap();
        prop_assert!(poincare_metric(fz[0], dv[0]).unwrap() <= before + 1e-9 * before.max(1.0));
        let fw = f.eval_raw(&[w]).unwrap();
        prop_assert!(poincare_distance(fz[0], fw[0]).unwrap() <= poincare_distance(z, w).unwrap() + 1e-9);
    }

    #[test]
    fn bidisc_distance_is_a_metric(a in prop::collection::vec(in_disk(0.99), 2), b in prop::collection::vec(in_disk(0.99), 2),
                                   m in prop::collection::vec(in_disk(0.99), 2)) {
        let d = Domain::polydisc(vec![c(0.0, 0.0); 2], vec![1.0, 1.0]).unwrap();
        let dist = |p: &[Complex64], q: &[Complex64]| caratheodory_distance(&d, p, q).unwrap().value;
        let ab = dist(&a, &b);
        prop_assert!((ab - dist(&b, &a)).abs() <= 1e-12 * ab.max(1.0));
        prop_assert!(ab <= dist(&a, &m) + dist(&m, &b) + 1e-12);
        let oracle = omega(a[0], b[0]).max(omega(a[1], b[1]));
        prop_assert!((ab - oracle).abs() <= 1e-9 * oracle.max(1.0));
    }

    #[test]
    fn gap_balls_stay_inside((x, u) in nested_disks(), seed in 0u64..1000, dir in unit_direction(1)) {
        let semi = (x.to_semianalytic().unwrap(), u.to_semianalytic().unwrap());
        for (outer, inner) in [(&x, &u), (&semi.0, &semi.1)] {
            let r = inner_gap(inner, outer, 64, seed).unwrap();
            for p in inner.sample(32, seed + 1).unwrap() {
                let q = p.offset(&dir, 0.999 * r).unwrap();
                prop_assert!(outer.contains(&q).unwrap());
            }
        }
    }

    #[test]
    fn members_have_positive_boundary_distance(seed in 0u64..1000) {
        let ring = Domain::semianalytic(
            1,
            vec![Constraint::parse("z1", 1, 1.0).unwrap(), Constraint::parse("1/z1", 1, 4.0).unwrap()],
            vec![BoxRange::new((-1.0, 1.0), (-1.0, 1.0))],
        ).unwrap();
        let poly = Domain::polydisc(vec![c(0.0, 0.0), c(1.0, 1.0)], vec![1.0, 0.25]).unwrap();
        for d in [ring, poly] {
            for p in d.sample(16, seed).unwrap() {
                prop_assert!(d.contains(&p).unwrap());
                prop_assert!(d.boundary_distance(&p).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn dilation_constant_is_monotone(big_r in 0.01..10.0f64, r1 in 0.01..10.0f64, r2 in 0.01..10.0f64) {
        prop_assume!(r1 < r2);
        let k1 = dilation_constant(big_r, r1).unwrap();
        let k2 = dilation_constant(big_r, r2).unwrap();
        prop_assert!(k2 < k1 && k1 < 1.0 && k2 > 0.0);
        prop_assert!(dilation_constant(r1, big_r).unwrap() < dilation_constant(r2, big_r).unwrap());
    }

    #[test]
    fn dilated_disks_stay_in_the_outer_domain((x, u) in nested_disks(), coeffs in prop::collection::vec(complex(1.0), 1..4), seed in 0u64..100) {
        // φ(ζ) = c_U + ρ_U Σ a_j ζ^j with Σ|a_j| < 1 maps Δ into U
        let (cu, ru) = u.product_form().unwrap();
        let total: f64 = coeffs.iter().map(|z| z.norm()).sum::<f64>().max(1e-9);
        let mut text = format!("({:?}{:+?}i)", cu[0].re, cu[0].im);
        for (j, a) in coeffs.iter().enumerate() {
            let a = a * 0.999 * ru[0] / total;
            text.push_str(&format!(" + ({:?}{:+?}i)*z1^{}", a.re, a.im, j + 1));
        }
        let phi = HoloMap::parse(&text, 1).unwrap();
        let disk = Domain::unit_disk();
        prop_assume!(range_check(&phi, &disk, &u, 64, seed).unwrap().verdict == RangeVerdict::Supported);
        let r = inner_gap(&u, &x, 64, seed).unwrap();
        let big_r = u.diameter_bound().unwrap();
        let psi = dilate_disk(&phi, r, big_r).unwrap();
        for p in disk.sample(128, seed).unwrap() {
            let img = psi.eval(&p).unwrap();
            prop_assert!(x.contains(&img).unwrap(), "{:?} escapes", img);
        }
    }

    #[test]
    fn tail_bounds_hold_on_concentric_disks(a in complex(1.0), b in complex(1.0), k0 in complex(1.0), budget in 0.05..0.55f64, z0 in in_disk(0.99)) {
        // f = α z² + β z + γ with |α| + |β| + |γ| = budget < 0.6 maps Δ into Disk(0, 0.6)
        let total = a.norm() + b.norm() + k0.norm();
        prop_assume!(total > 1e-6);
        let (a, b, k0) = (a * budget / total, b * budget / total, k0 * budget / total);
        let text = format!("({:?}{:+?}i)*z1^2 + ({:?}{:+?}i)*z1 + ({:?}{:+?}i)", a.re, a.im, b.re, b.im, k0.re, k0.im);
        let f = HoloMap::parse(&text, 1).unwrap();
        let x = Domain::unit_disk();
        let u = Domain::disk(c(0.0, 0.0), 0.6).unwrap();
        let res = picard_solve(&f, &x, &u, &Point::scalar(z0).unwrap(), &SolveOptions::default()).unwrap();
        let fixed = res.c[0];
        prop_assert!(res.residual <= 1e-10);
        for (n, p) in res.trace.points.iter().enumerate() {
            prop_assert!(omega(p[0], fixed) <= certify_tail(&res.trace, n).unwrap() + 1e-9);
        }
        prop_assert!(res.trace.replays(&f));
        let other = picard_solve(&f, &x, &u, &Point::scalar(-z0 * 0.5).unwrap(), &SolveOptions::default()).unwrap();
        prop_assert!(other.c.distance(&res.c) <= 2e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn integrated_distances_are_symmetric_and_subadditive(a in in_disk(0.8), b in in_disk(0.8), m in in_disk(0.8)) {
        let d = Domain::unit_disk();
        let metric = Caratheodory::new(&d);
        let opts = PathOptions::default();
        let dist = |p: Complex64, q: Complex64| {
            integrated_distance(&metric, &Point::scalar(p).unwrap(), &Point::scalar(q).unwrap(), &opts).unwrap().value
        };
        let ab = dist(a, b);
        let slack = 2.0 * 1e-4;
        prop_assert!((ab - dist(b, a)).abs() <= slack);
        prop_assert!(ab <= dist(a, m) + dist(m, b) + slack);
    }

    #[test]
    fn sampled_diameters_never_exceed_the_closed_form(rho in 0.1..0.9f64, seed in 0u64..100) {
        let x = Domain::unit_disk();
        let u = Domain::disk(c(0.0, 0.0), rho).unwrap();
        let exact = caratheodory_diameter(&x, &u, &DiameterOptions::default()).unwrap().value;
        let opts = DiameterOptions { samples: 64, seed, closed_form: false };
        let sampled = caratheodory_diameter(&x, &u, &opts).unwrap();
        prop_assert_eq!(sampled.kind, BoundKind::Lower);
        prop_assert!(sampled.value <= exact + 1e-12);
    }
}
