//! Scaling of the weighted Plancherel ratio across dilations.

use kohn_sphere::multiplier_calculus::{plancherel_check, ComponentCache, Multiplier, PlancherelOptions};
use kohn_sphere::sphere_geometry::rational_sphere_points;

fn shapes() -> Vec<(&'static str, Multiplier)> {
    vec![
        (
            "indicator",
            Multiplier::Indicator {
                lo: 0.0,
                hi: 1.0,
                lo_closed: false,
                hi_closed: true,
            },
        ),
        ("ramp", Multiplier::ramp()),
        (
            "bump",
            Multiplier::Bump {
                center: 0.5,
                radius: 0.5,
            },
        ),
    ]
}

/// Growth per doubling of `N` must not speed up, and the last doubling must
/// add at most half; at these sizes the ratio is still approaching its limit.
#[test]
fn hormander_ratio_stays_bounded() {
    let cache = ComponentCache::new();
    let w = &rational_sphere_points(3, 2, 4)[1];
    for (name, shape) in shapes() {
        for theta in [0.0, 0.5, 1.0] {
            let ratios: Vec<f64> = [4, 8, 16, 32]
                .iter()
                .map(|&big_n| {
                    plancherel_check(&shape, 3, 1, big_n, theta, w, PlancherelOptions::default(), &cache)
                        .unwrap()
                        .hormander_ratio
                })
                .collect();
            let growth: Vec<f64> = ratios.windows(2).map(|r| r[1] / r[0]).collect();
            for g in growth.windows(2) {
                assert!(g[1] <= g[0] * 1.02, "{name} theta={theta}: ratios {ratios:?}");
            }
            assert!(*growth.last().unwrap() <= 1.5, "{name} theta={theta}: ratios {ratios:?}");
        }
    }
}

#[test]
fn exact_left_side_matches_the_surrogate_at_the_endpoints() {
    let cache = ComponentCache::new();
    let w = &rational_sphere_points(3, 2, 4)[1];
    let opts = PlancherelOptions { exact: true, mc: None };
    for theta in [0.0, 1.0] {
        let r = plancherel_check(&Multiplier::ramp(), 3, 1, 4, theta, w, opts, &cache).unwrap();
        let exact = r.exact_lhs.unwrap().to_f64();
        if theta == 0.0 {
            assert!((exact - r.m_theta_norm_sq).abs() <= 1e-9 * exact);
        } else {
            // the mixed-class constant is not one, but it is moderate
            assert!(exact <= 6.0 * r.m_theta_norm_sq && r.m_theta_norm_sq <= 6.0 * exact, "{exact} {}", r.m_theta_norm_sq);
        }
    }
}
