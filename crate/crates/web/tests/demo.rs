use mg_opcon::scenario::day1_load;
use mg_opcon_web::{Condition, Demo};

fn reference() -> Condition {
    Condition {
        x: 2.0,
        wind: 1.2,
        pv: 0.55,
        load: 2.25,
    }
}

#[test]
fn reference_balance_point() {
    let demo = Demo::default();
    let b = demo.dispatch_at(&reference()).unwrap();
    let d = &b.dispatch;
    assert!((d.rho - 0.3).abs() < 1e-12);
    let p = [d.p_t[0], d.p_s[0], d.p_r[0], d.p_r[1]];
    for (g, w) in p.iter().zip([0.2, 0.3, 1.2, 0.55]) {
        assert!((g - w).abs() < 1e-12, "{p:?}");
    }
    assert!((b.next_x - (2.0 - 0.3 * 0.25)).abs() < 1e-12);
    assert!(b.feasible.0 <= 2.25 && 2.25 <= b.feasible.1);
}

#[test]
fn curves_cross_the_load_at_the_balance_point() {
    let demo = Demo::default();
    let c = reference();
    let curves = demo.droop_curves(&c, -2.0, 2.0, 401).unwrap();
    assert_eq!(curves.rho.len(), 401);
    assert_eq!(curves.units.len(), 4);
    assert!(curves.total.windows(2).all(|w| w[0] <= w[1] + 1e-12));
    // rho = 0.3 sits exactly on the sample grid (index 230).
    assert!((curves.rho[230] - 0.3).abs() < 1e-12);
    assert!((curves.total[230] - 2.25).abs() < 1e-9);
    for (u, t) in curves.units.iter().zip(["thermal", "storage", "wind", "pv"]) {
        assert_eq!(u.name, t);
    }
}

#[test]
fn bad_curve_ranges_are_rejected() {
    let demo = Demo::default();
    assert!(demo.droop_curves(&reference(), 1.0, 1.0, 10).is_err());
    assert!(demo.droop_curves(&reference(), -1.0, 1.0, 1).is_err());
}

#[test]
fn overload_is_an_error() {
    let demo = Demo::default();
    let c = Condition {
        load: 9.0,
        ..reference()
    };
    assert!(demo.dispatch_at(&c).is_err());
}

#[test]
fn scenario_band_orders_and_interpolates() {
    let demo = Demo::default();
    let lo = demo.scenario_profile(0.0).unwrap();
    let hi = demo.scenario_profile(1.0).unwrap();
    let mid = demo.scenario_profile(0.5).unwrap();
    let b = day1_load();
    assert_eq!(mid.hour.len(), b.len());
    assert_eq!(mid.hour[24], 24.0);
    for k in 0..b.len() {
        assert!(mid.lower[k] <= mid.upper[k]);
        assert_eq!(lo.scenario[k], -b.lower[k].w_d[0]);
        assert_eq!(hi.scenario[k], -b.upper[k].w_d[0]);
        let avg = 0.5 * (lo.scenario[k] + hi.scenario[k]);
        assert!((mid.scenario[k] - avg).abs() < 1e-12);
    }
    assert!(demo.scenario_profile(1.5).is_err());
}
