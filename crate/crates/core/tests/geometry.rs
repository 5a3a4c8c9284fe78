use proptest::prelude::*;
use vfm_core::field::{BoxDomain, FieldKind, FieldSpec};
use vfm_core::geometry::{omega_partition, rasterize, GridSpec, OrientedRect, RasterMask};

fn rect() -> impl Strategy<Value = OrientedRect> {
    (-0.5f64..0.5, -0.5f64..0.5, 0.0f64..std::f64::consts::PI, 0.05f64..0.6, 0.01f64..0.3)
        .prop_map(|(x, y, a, l, w)| OrientedRect::new([x, y], a, l, w).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dilation_contains_the_original(r in rect(), k in 1.0f64..12.0) {
        let d = r.dilate(k).unwrap();
        prop_assert!(d.contains_rect(&r));
        prop_assert!(d.contains_point(r.center));
        prop_assert!((d.area() - k * k * r.area()).abs() <= 1e-12 * d.area());
    }

    #[test]
    fn intersection_is_symmetric(a in rect(), b in rect()) {
        prop_assert_eq!(a.intersects(&b), b.intersects(&a));
        if a.contains_rect(&b) {
            prop_assert!(a.intersects(&b));
        }
    }

    #[test]
    fn raster_area_is_within_a_boundary_layer(r in rect()) {
        let grid = GridSpec::covering([-1.0, -1.0], 2.0, 256).unwrap();
        let mask = rasterize(&r, &grid);
        let h = grid.spacing;
        let layer = 2.0 * (r.length + r.width) * h * std::f64::consts::SQRT_2;
        prop_assert!((mask.measure() - r.area()).abs() <= layer + 1e-12, "{} vs {}", mask.measure(), r.area());
    }
}

#[test]
fn omega_bins_partition_the_grid() {
    let field = FieldSpec::new(FieldKind::Rotation, BoxDomain::square(1.0), "rotation").unwrap();
    let grid = GridSpec::covering([-0.75, -0.75], 1.5, 32).unwrap();
    let part = omega_partition(&field, 0.125, &grid, 64).unwrap();
    let mut union = part.degenerate.union(&part.undefined).unwrap();
    let mut total = part.degenerate.count() + part.undefined.count();
    for mask in part.bins.values() {
        assert!(mask.is_disjoint(&union).unwrap());
        union.union_with(mask).unwrap();
        total += mask.count();
    }
    assert_eq!(union, RasterMask::full(grid));
    assert_eq!(total, grid.len());
}

#[test]
fn mask_csv_round_trips() {
    let grid = GridSpec::covering([0.0, 0.0], 1.0, 16).unwrap();
    let r = OrientedRect::new([0.5, 0.5], 0.3, 0.6, 0.2).unwrap();
    let mask = rasterize(&r, &grid);
    let mut buf = Vec::new();
    mask.write_csv(&mut buf).unwrap();
    assert_eq!(RasterMask::read_csv(buf.as_slice()).unwrap(), mask);
}
