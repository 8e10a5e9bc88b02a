mod common;

use common::*;
use coveval::geometry::{box_area, car, intersection_area, iou};
use proptest::prelude::*;

#[test]
fn rejects_degenerate_and_non_finite() {
    assert!(coveval::BBox::new(5.0, 0.0, 5.0, 3.0).is_err());
    assert!(coveval::BBox::new(0.0, 4.0, 3.0, 1.0).is_err());
    assert!(coveval::BBox::new(f64::NAN, 0.0, 1.0, 1.0).is_err());
    assert!(coveval::BBox::new(0.0, 0.0, f64::INFINITY, 1.0).is_err());
}

#[test]
fn small_box_inside_large_one() {
    let g = bx(0.0, 0.0, 100.0, 100.0);
    let d = bx(10.0, 10.0, 20.0, 20.0);
    assert_eq!(car(&g, &d), 1.0);
    assert!((iou(&g, &d) - 0.01).abs() < 1e-15);
}

#[test]
fn touching_edges_do_not_overlap() {
    let a = bx(0.0, 0.0, 2.0, 2.0);
    let b = bx(2.0, 0.0, 4.0, 2.0);
    assert_eq!(intersection_area(&a, &b), 0.0);
    assert_eq!(iou(&a, &b), 0.0);
    assert_eq!(car(&a, &b), 0.0);
}

#[test]
fn json_shape() {
    let b = bx(1.5, 2.0, 3.0, 4.25);
    let s = serde_json::to_string(&b).unwrap();
    assert_eq!(s, r#"{"x1":1.5,"y1":2.0,"x2":3.0,"y2":4.25}"#);
    assert!(serde_json::from_str::<coveval::BBox>(r#"{"x1":3,"y1":0,"x2":1,"y2":1}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn sort_construction_matches_clamped_spans(a in arb_box(), b in arb_box()) {
        prop_assert_eq!(intersection_area(&a, &b), clamped_intersection(&a, &b));
    }

    #[test]
    fn sort_construction_on_grid(a in arb_grid_box(), b in arb_grid_box()) {
        prop_assert_eq!(intersection_area(&a, &b), clamped_intersection(&a, &b));
    }

    #[test]
    fn overlap_ordering(a in arb_box(), b in arb_box()) {
        let (i, c) = (iou(&a, &b), car(&a, &b));
        prop_assert!((0.0..=1.0).contains(&i));
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!(i <= c);
    }

    #[test]
    fn symmetric(a in arb_box(), b in arb_box()) {
        prop_assert_eq!(iou(&a, &b), iou(&b, &a));
        prop_assert_eq!(car(&a, &b), car(&b, &a));
    }

    #[test]
    fn contained_box_has_full_cover(outer in arb_box(), fx in 0.0..1.0f64, fy in 0.0..1.0f64, fw in 0.05..1.0f64, fh in 0.05..1.0f64) {
        let x1 = outer.x1() + fx * (1.0 - fw) * outer.width();
        let y1 = outer.y1() + fy * (1.0 - fh) * outer.height();
        let x2 = (x1 + fw * outer.width()).min(outer.x2());
        let y2 = (y1 + fh * outer.height()).min(outer.y2());
        prop_assume!(x1 < x2 && y1 < y2);
        let inner = bx(x1, y1, x2, y2);
        prop_assert!(outer.contains(&inner));
        prop_assert_eq!(car(&outer, &inner), 1.0);
    }

    #[test]
    fn self_overlap_is_one(a in arb_box()) {
        prop_assert_eq!(iou(&a, &a), 1.0);
        prop_assert_eq!(car(&a, &a), 1.0);
        prop_assert_eq!(box_area(&a), a.width() * a.height());
    }

    #[test]
    fn iou_shrinks_as_copy_slides_away(a in arb_box(), step in 0.01..0.3f64) {
        let w = a.width();
        let mut prev = 1.0;
        for i in 1..=5 {
            let dx = step * w * i as f64;
            let moved = bx(a.x1() + dx, a.y1(), a.x2() + dx, a.y2());
            let v = iou(&a, &moved);
            prop_assert!(v <= prev + 1e-12);
            prev = v;
        }
    }
}
