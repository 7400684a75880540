mod common;

use std::f64::consts::PI;

use common::{dyadic, functions_on_grid, grid};
use multikit::{Builtin, CombineOp, Field2D, Grid1D, Grid2D, IndexMap, MFunction, PointwiseOp};
use proptest::prelude::*;

fn pointwise(f: &MFunction, op: CombineOp, g: &MFunction) -> MFunction {
    f.combine(op, g).unwrap()
}

proptest! {
    #[test]
    fn lattice_laws_hold_samplewise(fs in functions_on_grid(3, dyadic())) {
        let (f, g, h) = (&fs[0], &fs[1], &fs[2]);
        use CombineOp::*;
        prop_assert_eq!(pointwise(f, Union, f), f.clone());
        prop_assert_eq!(pointwise(f, Intersection, f), f.clone());
        prop_assert_eq!(
            pointwise(&pointwise(f, Union, g), Intersection, h),
            pointwise(&pointwise(f, Intersection, h), Union, &pointwise(g, Intersection, h))
        );
        prop_assert_eq!(
            pointwise(f, Union, &pointwise(g, Intersection, h)),
            pointwise(&pointwise(f, Union, g), Intersection, &pointwise(f, Union, h))
        );
        prop_assert_eq!(
            pointwise(f, Intersection, g).complement(),
            pointwise(&f.complement(), Union, &g.complement())
        );
        prop_assert_eq!(
            pointwise(f, Union, g).complement(),
            pointwise(&f.complement(), Intersection, &g.complement())
        );
        prop_assert!(pointwise(f, Sum, &f.complement()).samples().iter().all(|v| *v == 0.0));
        for op in [Union, Intersection, Sum] {
            prop_assert_eq!(pointwise(f, op, g), pointwise(g, op, f));
            prop_assert_eq!(pointwise(&pointwise(f, op, g), op, h), pointwise(f, op, &pointwise(g, op, h)));
        }
    }

    #[test]
    fn union_bounded_by_sum_for_nonnegative(fs in functions_on_grid(2, 0.0f64..10.0)) {
        let u = pointwise(&fs[0], CombineOp::Union, &fs[1]);
        let s = pointwise(&fs[0], CombineOp::Sum, &fs[1]);
        prop_assert!(u.samples().iter().zip(s.samples()).all(|(a, b)| a <= b));
    }

    #[test]
    fn integral_is_linear(fs in functions_on_grid(2, -10.0f64..10.0), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let (f, g) = (&fs[0], &fs[1]);
        let combo = f.zip_with(g, |x, y| a * x + b * y).unwrap();
        let expected = a * f.integral() + b * g.integral();
        let scale = f.abs_integral().max(g.abs_integral()).max(1.0) * 6.0;
        prop_assert!((combo.integral() - expected).abs() <= 1e-12 * scale);
    }

    #[test]
    fn quotient_zeroes_where_divisor_vanishes(fs in functions_on_grid(2, dyadic())) {
        let q = fs[0].pointwise(PointwiseOp::Quotient, &fs[1]).unwrap();
        for ((n, d), v) in fs[0].samples().iter().zip(fs[1].samples()).zip(q.samples()) {
            prop_assert_eq!(*v, if *d == 0.0 { 0.0 } else { n / d });
        }
    }

    #[test]
    fn mset_view_round_trip(fs in functions_on_grid(1, dyadic())) {
        let f = &fs[0];
        let view = f.mset_view();
        for (i, v) in f.samples().iter().enumerate() {
            prop_assert_eq!(view.multiplicity(i + 1), *v);
        }
        prop_assert_eq!(&MFunction::from_mset_view(&view, *f.grid()).unwrap(), f);
    }

    #[test]
    fn csv_round_trip_keeps_values_to_print_precision(fs in functions_on_grid(1, -100.0f64..100.0)) {
        let f = &fs[0];
        prop_assume!(f.grid().len() >= 2);
        let back = MFunction::read_csv(f.to_csv_string().as_bytes()).unwrap();
        prop_assert_eq!(back.grid().len(), f.grid().len());
        // Each printed endpoint is off by at most 5e-12 |x|.
        let g = f.grid();
        let reach = g.x0().abs().max(g.x(g.len() - 1).abs());
        let slack = 1e-11 * reach / (g.len() - 1) as f64 + 1e-15 * g.dx();
        prop_assert!((back.grid().dx() - g.dx()).abs() <= slack);
        for (a, b) in back.samples().iter().zip(f.samples()) {
            prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-2));
        }
    }

    #[test]
    fn normalize_area_is_idempotent(fs in functions_on_grid(1, -5.0f64..5.0)) {
        let f = &fs[0];
        prop_assume!(f.abs_integral() > 0.0);
        let n = f.normalize_area().unwrap();
        prop_assert!((n.abs_integral() - 1.0).abs() < 1e-12);
        prop_assert!(n.normalize_area().unwrap().max_abs_diff(&n).unwrap() < 1e-12);
    }

    #[test]
    fn misaligned_grids_are_rejected(g1 in grid(), g2 in grid()) {
        prop_assume!(g1 != g2);
        let r = MFunction::zeros(g1).combine(CombineOp::Union, &MFunction::zeros(g2));
        prop_assert!(r.unwrap_err().is_alignment());
    }
}

#[test]
fn index_map_is_a_bijection() {
    for ni in 1..=8 {
        for nj in 1..=8 {
            let map = IndexMap::new(ni, nj).unwrap();
            let mut seen = vec![false; ni * nj];
            for j in 1..=nj {
                for i in 1..=ni {
                    let k = map.flatten(i, j).unwrap();
                    assert_eq!(k, ni * (j - 1) + i - 1);
                    assert!(!seen[k]);
                    seen[k] = true;
                    assert_eq!(map.unflatten(k).unwrap(), (i, j));
                }
            }
            assert!(seen.iter().all(|s| *s));
            assert!(map.flatten(0, 1).is_err());
            assert!(map.flatten(ni + 1, 1).is_err());
            assert!(map.unflatten(ni * nj).is_err());
        }
    }
    assert_eq!(IndexMap::new(3, 4).unwrap().flatten(2, 3).unwrap(), 7);
}

#[test]
fn builtins_and_pointwise_examples() {
    let grid = Grid1D::default_experiment();
    assert_eq!(grid.len(), 2048);
    assert_eq!(Builtin::GaussG.eval(0.0), 1.0);
    assert_eq!(Builtin::LaplaceH.eval(0.1), 2.0);
    assert!((Builtin::GaussG.eval(0.1) - (-0.1f64).exp()).abs() < 1e-15);

    let at = |x: f64| Grid1D::new(x, 1.0, 1).unwrap();
    let g0 = Builtin::GaussG.sample(at(0.0));
    let h0 = Builtin::LaplaceH.sample(at(0.0));
    let i = g0.combine(CombineOp::Intersection, &h0).unwrap();
    assert!((i.samples()[0] - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
    let g1 = Builtin::GaussG.sample(at(0.1));
    let h1 = Builtin::LaplaceH.sample(at(0.1));
    assert_eq!(g1.combine(CombineOp::Union, &h1).unwrap().samples()[0], 2.0);
}

#[test]
fn quadrature_examples() {
    let one = MFunction::constant(Grid1D::span(0.0, 1.0, 100).unwrap(), 1.0);
    assert!((one.integral() - 1.0).abs() < 1e-12);

    let grid = Grid1D::span(0.0, 1.0, 4096).unwrap();
    let s = MFunction::from_fn(grid, |x| (2.0 * PI * x).sin());
    assert!(s.integral().abs() < 1e-12);
    assert!((s.abs_integral() - 2.0 / PI).abs() < 1e-5);

    let two = MFunction::constant(Grid1D::span(0.0, 1.0, 64).unwrap(), 2.0);
    assert!(two.normalize_area().unwrap().samples().iter().all(|v| (v - 1.0).abs() < 1e-15));

    let g = Builtin::GaussG.sample(Grid1D::span(-1.0, 1.0, 4096).unwrap());
    assert!((g.normalize_area().unwrap().abs_integral() - 1.0).abs() < 1e-9);
    assert!(MFunction::zeros(grid).normalize_area().is_err());
}

#[test]
fn from_vector_examples() {
    let v = [3.0, 2.5, PI, 0.0, -1.0];
    let f = MFunction::from_vector(&v, Grid1D::new(1.0, 1.0, 5).unwrap()).unwrap();
    let view = f.mset_view();
    assert_eq!(view.len(), 4);
    assert_eq!(view.multiplicity(3), PI);
    assert_eq!(view.multiplicity(5), -1.0);
    assert_eq!(f.samples(), &v);
    assert!(MFunction::from_vector(&[], Grid1D::new(0.0, 1.0, 1).unwrap()).is_err());
    assert!(Grid1D::new(0.0, 1.0, 0).is_err());
    assert!(Grid1D::new(0.0, 0.0, 3).is_err());

    let z = MFunction::from_vector(&[0.0; 3], Grid1D::new(0.0, 1.0, 3).unwrap()).unwrap();
    assert!(z.mset_view().is_empty());
    assert_eq!(z.samples(), &[0.0; 3]);
}

#[test]
fn field_csv_round_trip() {
    let grid = Grid2D::new(Grid1D::new(-1.0, 0.5, 4).unwrap(), Grid1D::new(2.0, 0.25, 3).unwrap());
    let samples: Vec<f64> = (0..12).map(|k| f64::from(k) * 0.75 - 3.0).collect();
    let field = Field2D::new(grid, samples).unwrap();
    let mut buf = Vec::new();
    field.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("x,y,value\n-1,2,-3\n-0.5,2,-2.25\n"));
    let back = Field2D::read_csv(buf.as_slice()).unwrap();
    assert_eq!(back.samples(), field.samples());
    assert_eq!(back.get(3, 2), field.get(3, 2));
    assert!((field.integral() - field.samples().iter().sum::<f64>() * 0.125).abs() < 1e-12);
}
