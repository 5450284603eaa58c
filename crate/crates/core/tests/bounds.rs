use std::f64::consts::{PI, SQRT_2};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;

use tlsc::bounds::{
    asymptotic_density_ratio, ball_volume, cap_area, code_density, grid_lower_bound, sphere_surface,
    upper_bound, BoundReport, CenterDensityTable, DensityConstruction, FaceRule,
};
use tlsc::cyclic::search_family;
use tlsc::layering::{permutation_layers, polygon2d_layers};

fn counts(r: &BoundReport) -> Vec<u64> {
    r.per_layer.iter().map(|l| l.count.to_u64().unwrap()).collect()
}

fn total(r: &BoundReport) -> f64 {
    r.total.to_f64().unwrap()
}

fn constructed(d: f64) -> Vec<u64> {
    let fam = polygon2d_layers(d).unwrap();
    search_family(fam.angles.as_ref().unwrap(), d)
        .unwrap()
        .iter()
        .map(|c| c.order_m)
        .collect()
}

/// Both bounds evaluated by hand on the six layers at d = 0.3.
#[test]
fn point_three_by_direct_evaluation() {
    let d = 0.3;
    let fam = polygon2d_layers(d).unwrap();
    let lam2 = 1.0 / (2.0 * 3f64.sqrt());
    let a = (d / 4.0).asin();
    let mut up = Vec::new();
    let mut low = Vec::new();
    for c in &fam.radii {
        let (c1, c2) = (c.get(0), c.get(1));
        let two_d = (PI * PI / (a * a) * c1 * c2 * lam2).floor() as u64;
        let big = c1.max(c2);
        up.push(if two_d > 0 { two_d } else { (PI / (d / (2.0 * big)).asin()).floor() as u64 });
        let w = |r: f64| if d / (2.0 * r) <= 1.0 { (PI / (d / (2.0 * r)).asin()).floor() as u64 } else { 1 };
        low.push(w(c1) * w(c2));
    }
    let table = CenterDensityTable::standard();
    let u = upper_bound(&fam, d, &table, FaceRule::ProjectOnZero).unwrap();
    let l = grid_lower_bound(&fam, d).unwrap();
    assert_eq!(counts(&u), up);
    assert_eq!(counts(&l), low);
    assert_eq!(counts(&u), vec![16, 156, 241, 241, 156, 16]);
    assert_eq!(counts(&l), vec![20, 114, 192, 192, 114, 20]);
    assert_eq!(u.total, BigUint::from(826u32));
    assert_eq!(l.total, BigUint::from(652u32));
    assert_eq!(u.per_layer[0].face_dim, 2);
}

#[test]
fn upper_bound_rows() {
    let table = CenterDensityTable::standard();
    for (d, published, rel) in [(0.1, 22478.0, 0.03), (0.01, 2.279e7, 0.01)] {
        let fam = polygon2d_layers(d).unwrap();
        let u = total(&upper_bound(&fam, d, &table, FaceRule::ProjectOnZero).unwrap());
        assert!((u - published).abs() / published <= rel, "d = {d}: {u}");
    }
}

#[test]
fn grid_rows_within_ten_percent() {
    for (d, published) in [(0.3, 612.0), (0.2, 2148.0), (0.1, 18884.0), (0.01, 1.967e7)] {
        let fam = polygon2d_layers(d).unwrap();
        let l = total(&grid_lower_bound(&fam, d).unwrap());
        assert!((l - published).abs() / published <= 0.10, "d = {d}: {l}");
    }
}

#[test]
fn constructed_codes_sit_between_the_bounds() {
    let table = CenterDensityTable::standard();
    for d in [0.5, 0.4, 0.3, 0.2, 0.1] {
        let fam = polygon2d_layers(d).unwrap();
        let m = constructed(d);
        let low = counts(&grid_lower_bound(&fam, d).unwrap());
        let faces = counts(&upper_bound(&fam, d, &table, FaceRule::MaxOverFaces).unwrap());
        for i in 0..m.len() {
            assert!(low[i] <= m[i], "d = {d} layer {i}: grid {} > {}", low[i], m[i]);
            assert!(m[i] <= faces[i], "d = {d} layer {i}: {} > face bound {}", m[i], faces[i]);
        }
    }
}

/// The default rule undercounts the thin outer layers: their 2-D face is
/// nonzero but smaller than what a great circle through the layer holds.
#[test]
fn projection_rule_undercounts_thin_layers() {
    let table = CenterDensityTable::standard();
    let fam = polygon2d_layers(0.3).unwrap();
    let u = counts(&upper_bound(&fam, 0.3, &table, FaceRule::ProjectOnZero).unwrap());
    assert_eq!((u[0], constructed(0.3)[0]), (16, 20));
    for d in [0.3, 0.2, 0.1] {
        let fam = polygon2d_layers(d).unwrap();
        let u = total(&upper_bound(&fam, d, &table, FaceRule::ProjectOnZero).unwrap());
        let m: u64 = constructed(d).iter().sum();
        assert!(u >= m as f64, "d = {d}");
    }
    let fam = polygon2d_layers(0.5).unwrap();
    let u = total(&upper_bound(&fam, 0.5, &table, FaceRule::ProjectOnZero).unwrap());
    assert_eq!(u, 166.0);
}

#[test]
fn upper_bound_is_never_zero() {
    let table = CenterDensityTable::standard();
    for d in [SQRT_2, 1.2, 0.9, 0.7, 0.5, 0.05] {
        let fam = polygon2d_layers(d).unwrap();
        let r = upper_bound(&fam, d, &table, FaceRule::ProjectOnZero).unwrap();
        assert!(r.per_layer.iter().all(|l| l.count > BigUint::from(0u32)), "d = {d}");
    }
    let fam = permutation_layers(24, 0.1).unwrap();
    let r = upper_bound(&fam, 0.1, &table, FaceRule::ProjectOnZero).unwrap();
    assert_eq!(r.per_layer.len(), 24);
    assert!(r.per_layer.iter().all(|l| l.count > BigUint::from(0u32)));
}

#[test]
fn small_caps_approach_the_ball() {
    for l in [2usize, 3, 4, 5, 8] {
        let d: f64 = 1e-3;
        let ratio = cap_area((d / 2.0).asin(), l).unwrap() / (ball_volume(l - 1) * (d / 2.0).powi(l as i32 - 1));
        assert!((ratio - 1.0).abs() < 1e-6, "l = {l}: {ratio}");
    }
    for l in 2..10 {
        assert!((cap_area(PI, l).unwrap() - sphere_surface(l)).abs() < 1e-9 * sphere_surface(l));
    }
}

proptest! {
    #[test]
    fn cap_area_grows_and_matches_closed_forms(a in 0.0f64..PI, b in 0.0f64..PI) {
        prop_assume!((a - b).abs() > 1e-9);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        for l in 2..7 {
            prop_assert!(cap_area(lo, l).unwrap() < cap_area(hi, l).unwrap());
        }
        prop_assert!((cap_area(a, 2).unwrap() - 2.0 * a).abs() < 1e-10);
        prop_assert!((cap_area(a, 3).unwrap() - 2.0 * PI * (1.0 - a.cos())).abs() < 1e-10);
    }

    #[test]
    fn lower_bound_never_exceeds_the_constructed_layers(d in 0.15f64..1.2) {
        let fam = polygon2d_layers(d).unwrap();
        let low = counts(&grid_lower_bound(&fam, d).unwrap());
        let m = constructed(d);
        for i in 0..m.len() {
            prop_assert!(low[i] <= m[i], "layer {}: {} > {}", i, low[i], m[i]);
        }
    }
}

#[test]
fn tiling_densities() {
    assert!((code_density(4.0, SQRT_2, 2).unwrap() - 1.0).abs() < 1e-12);
    assert!((code_density(2.0, 2.0, 2).unwrap() - 1.0).abs() < 1e-12);
    assert!(code_density(5.0, SQRT_2, 2).is_err());
    let direct = 798.0 * cap_area(0.15f64.asin(), 4).unwrap() / sphere_surface(4);
    assert!((code_density(798.0, 0.3, 4).unwrap() - direct).abs() < 1e-15);
}

#[test]
fn density_ratio_trend() {
    let table = CenterDensityTable::standard();
    let ds = [0.2, 0.1, 0.05, 0.01];
    let r = asymptotic_density_ratio(&ds, 2, &table, DensityConstruction::Cyclic).unwrap();
    for w in r.windows(2) {
        assert!(w[1].ratio >= w[0].ratio * 0.95);
    }
    assert!(r.iter().all(|x| x.ratio > 0.0 && x.ratio <= 1.05));
    assert!((r[3].ratio - 1.0).abs() <= 0.15);
    let grid = asymptotic_density_ratio(&ds, 2, &table, DensityConstruction::Grid).unwrap();
    assert!(grid.iter().zip(&r).all(|(g, c)| g.ratio <= c.ratio));
    let one = asymptotic_density_ratio(&[0.3], 2, &table, DensityConstruction::Cyclic).unwrap();
    assert_eq!(one.len(), 1);
    assert!(asymptotic_density_ratio(&[0.1, 0.2], 2, &table, DensityConstruction::Cyclic).is_err());
}
