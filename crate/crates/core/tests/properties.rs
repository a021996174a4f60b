//! Property-based checks of the core invariants.

use hyperflow::diagnostics::{convergence_rates, momentum_map};
use hyperflow::dim::{Lattice, Matrix, Vector};
use hyperflow::integrator::{Body, ContactSettings, System};
use hyperflow::kinematics::{cauchy_green, deformation_gradients, CellJet};
use hyperflow::materials::{slot_energies, Law, Material, MooneyRivlinParams, StVKParams, TaitParams};
use hyperflow::mesh::{GridSpec, Mesh};
use hyperflow::scenario::{Scenario, Selector};
use hyperflow::verify::det;
use hyperflow::Dim;
use nalgebra::{Rotation2, Rotation3, Vector2, Vector3};
use proptest::prelude::*;

/// Affine image of the reference cell plus bounded corner noise.
fn cell<const D: usize>(spacing: [f64; D], a: &[f64], noise: &[f64]) -> (CellJet<D>, [f64; D])
where
    Dim<D>: Lattice<D>,
{
    let m = Matrix::<D>::identity() + Matrix::<D>::from_fn(|i, j| a[i * D + j]);
    let h = spacing.iter().copied().fold(f64::INFINITY, f64::min);
    let mut jet = CellJet::reference(spacing).map(|x| m * x);
    for (k, c) in jet.corners.iter_mut().enumerate() {
        *c += Vector::<D>::from_fn(|i, _| noise[k * D + i] * h);
    }
    (jet, spacing)
}

fn admissible<const D: usize>(jet: &CellJet<D>, spacing: &[f64; D]) -> bool
where
    Dim<D>: Lattice<D>,
{
    deformation_gradients(jet, spacing).unwrap().iter().all(|f| <Dim<D> as Lattice<D>>::jacobian(f) > 0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn jacobian_is_determinant_2d(
        sx in 0.01f64..0.3, sy in 0.01f64..0.3,
        a in prop::collection::vec(-0.4f64..0.4, 4),
        noise in prop::collection::vec(-0.15f64..0.15, 8),
    ) {
        let (jet, spacing) = cell::<2>([sx, sy], &a, &noise);
        prop_assume!(admissible(&jet, &spacing));
        let f = deformation_gradients(&jet, &spacing).unwrap();
        for (f, c) in f.iter().zip(&cauchy_green(&f)) {
            let j = <Dim<2> as Lattice<2>>::jacobian(f);
            prop_assert!((det(f) - j).abs() <= 1e-10 * j.abs());
            prop_assert!((det(c) - j * j).abs() <= 1e-10 * j * j);
        }
    }

    #[test]
    fn jacobian_is_determinant_3d(
        s in prop::array::uniform3(0.01f64..0.3),
        a in prop::collection::vec(-0.3f64..0.3, 9),
        noise in prop::collection::vec(-0.1f64..0.1, 24),
    ) {
        let (jet, spacing) = cell::<3>(s, &a, &noise);
        prop_assume!(admissible(&jet, &spacing));
        let f = deformation_gradients(&jet, &spacing).unwrap();
        for (f, c) in f.iter().zip(&cauchy_green(&f)) {
            let j = <Dim<3> as Lattice<3>>::jacobian(f);
            prop_assert!((det(f) - j).abs() <= 1e-10 * j.abs());
            prop_assert!((det(c) - j * j).abs() <= 1e-10 * j * j);
        }
    }

    #[test]
    fn rigid_motion_leaves_energy_unchanged_2d(
        a in prop::collection::vec(-0.3f64..0.3, 4),
        noise in prop::collection::vec(-0.1f64..0.1, 8),
        angle in -3.2f64..3.2,
        // Translations on the scale of the scenarios; edge differences lose
        // about log10(|x|/Δs) digits to rounding.
        u in prop::array::uniform2(-1.0f64..1.0),
    ) {
        let (jet, spacing) = cell::<2>([0.05, 0.08], &a, &noise);
        prop_assume!(admissible(&jet, &spacing));
        let q = *Rotation2::new(angle).matrix();
        let moved = jet.map(|x| q * x + Vector2::from(u));
        let c0 = cauchy_green(&deformation_gradients(&jet, &spacing).unwrap());
        let c1 = cauchy_green(&deformation_gradients(&moved, &spacing).unwrap());
        for (x, y) in c0.iter().zip(&c1) {
            prop_assert!((x - y).amax() <= 1e-12);
        }
        let laws = [
            Law::StVenantKirchhoff(StVKParams::new(945.0, 2.5e6, 0.4999).unwrap()),
            Law::Tait(TaitParams::new(997.0, 6.0, 3.041e4, 3.0397e4).unwrap()),
        ];
        for law in &laws {
            let w0 = slot_energies(&jet, &spacing, law).unwrap();
            let w1 = slot_energies(&moved, &spacing, law).unwrap();
            for (x, y) in w0.iter().zip(&w1) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn rigid_motion_leaves_energy_unchanged_3d(
        a in prop::collection::vec(-0.2f64..0.2, 9),
        noise in prop::collection::vec(-0.05f64..0.05, 24),
        axis in prop::array::uniform3(-1.0f64..1.0),
        u in prop::array::uniform3(-1.0f64..1.0),
    ) {
        let axis = Vector3::from(axis);
        prop_assume!(axis.norm() > 1e-3);
        let (jet, spacing) = cell::<3>([0.1, 0.07, 0.05], &a, &noise);
        prop_assume!(admissible(&jet, &spacing));
        let q = *Rotation3::from_scaled_axis(axis).matrix();
        let moved = jet.map(|x| q * x + Vector3::from(u));
        let law = Law::MooneyRivlin(MooneyRivlinParams::new(945.0, 1.848, 0.264, 1.0).unwrap());
        let w0 = slot_energies(&jet, &spacing, &law).unwrap();
        let w1 = slot_energies(&moved, &spacing, &law).unwrap();
        for (x, y) in w0.iter().zip(&w1) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{} vs {}", x, y);
        }
    }

    #[test]
    fn rates_ignore_error_scale(
        e0 in 1e-6f64..1.0,
        ratios in prop::collection::vec(1.1f64..8.0, 1..5),
        scale in 1e-6f64..1e6,
    ) {
        let mut errors = vec![e0];
        for r in &ratios {
            errors.push(errors[errors.len() - 1] / r);
        }
        let params: Vec<f64> = (0..errors.len()).map(|i| 0.1 / 2f64.powi(i as i32)).collect();
        let scaled: Vec<f64> = errors.iter().map(|e| e * scale).collect();
        let a = convergence_rates(&params, &errors).unwrap();
        let b = convergence_rates(&params, &scaled).unwrap();
        for ((x, y), r) in a.rates.iter().zip(&b.rates).zip(&ratios) {
            prop_assert!((x - y).abs() <= 1e-9);
            prop_assert!((x - r.log2()).abs() <= 1e-9);
        }
    }

    #[test]
    fn power_law_errors_give_their_order(order in 0.3f64..4.0, c in 1e-3f64..1e3) {
        let params = [0.2, 0.1, 0.05, 0.025];
        let errors: Vec<f64> = params.iter().map(|p: &f64| c * p.powf(order)).collect();
        let rep = convergence_rates(&params, &errors).unwrap();
        for r in rep.rates {
            prop_assert!((r - order).abs() <= 1e-9);
        }
    }

    #[test]
    fn free_body_conserves_momentum(
        v in prop::collection::vec(-0.05f64..0.05, 24),
        mean in prop::array::uniform2(-0.3f64..0.3),
    ) {
        let mesh = Mesh::new(GridSpec::new([4, 3], [0.05, 0.05]).with_origin(Vector2::new(0.2, 0.1))).unwrap();
        let law = Law::StVenantKirchhoff(StVKParams::new(945.0, 1e6, 0.3).unwrap());
        let mut body = Body::new("b", mesh, Material::new(law, 1e4).unwrap(), Vector2::from(mean), &[]).unwrap();
        for (k, vel) in body.state.velocities.iter_mut().enumerate() {
            *vel += Vector2::new(v[2 * k], v[2 * k + 1]);
        }
        let mut sys = System::new(vec![body], Vector2::zeros(), ContactSettings::default(), 1e-4).unwrap();
        let j0 = momentum_map(&sys.bodies);
        for _ in 0..100 {
            sys.advance().unwrap();
        }
        let j1 = momentum_map(&sys.bodies);
        let scale = j0.components().iter().map(|x| x.abs()).fold(1e-12, f64::max);
        prop_assert!(j0.max_abs_diff(&j1) <= 1e-12 * scale);
    }
}

/// Random well-typed selector text with explicit parentheses.
fn condition() -> impl Strategy<Value = String> {
    let term = prop_oneof![
        (0i64..5).prop_map(|n| n.to_string()),
        prop::sample::select(vec!["a", "b", "c", "A", "B", "C"]).prop_map(String::from),
    ];
    let sum = (term.clone(), prop::sample::select(vec!["+", "-", "*"]), term.clone())
        .prop_map(|(x, op, y)| format!("{x} {op} {y}"));
    let arith = prop_oneof![term, sum];
    let cmp = (arith.clone(), prop::sample::select(vec!["==", "!=", "<", "<=", ">", ">="]), arith)
        .prop_map(|(x, op, y)| format!("{x} {op} {y}"));
    cmp.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), prop::sample::select(vec!["&&", "||"]), inner.clone())
                .prop_map(|(x, op, y)| format!("({x}) {op} ({y})")),
            inner.prop_map(|x| format!("!({x})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn selector_display_round_trips(text in condition()) {
        let sel = Selector::parse(&text).unwrap();
        let again = Selector::parse(&sel.to_string()).unwrap();
        prop_assert_eq!(&sel, &again);
        let max = [3usize, 2, 2];
        for a in 0..=3 {
            for b in 0..=2 {
                for c in 0..=2 {
                    prop_assert_eq!(sel.matches(&[a, b, c], &max), again.matches(&[a, b, c], &max));
                }
            }
        }
    }

    #[test]
    fn scenario_serialize_round_trips(
        dt in 1e-6f64..1e-3,
        steps in 1usize..5000,
        three in any::<bool>(),
        counts in prop::array::uniform3(2usize..7),
        spacing in prop::array::uniform3(0.01f64..0.2),
        origin in prop::array::uniform3(-1.0f64..1.0),
        g in -20.0f64..20.0,
        young in 1e4f64..1e7,
        poisson in 0.0f64..0.4999,
        penalty in 0.0f64..1e5,
        fixed in prop::option::of(condition()),
        fluid in any::<bool>(),
        stiffness in 0.0f64..1e10,
        stride in 1usize..500,
        vtk in any::<bool>(),
    ) {
        let d = if three { 3 } else { 2 };
        let list = |v: &[f64]| v[..d].iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let ulist = |v: &[usize]| v[..d].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut text = format!("[time]\ndt = {dt:?}\nsteps = {steps}\n\n[gravity]\ng = ");
        text += &if three { format!("0, 0, {g:?}") } else { format!("0, {g:?}") };
        text += "\n\n[solid.body]\n";
        text += &if three {
            format!("material = mooney_rivlin\nc1 = {:?}\nc2 = {:?}\n", young * 1e-6, poisson)
        } else {
            format!("material = stvk\nyoung = {young:?}\npoisson = {poisson:?}\n")
        };
        text += &format!(
            "density = 945\npenalty = {penalty:?}\ncounts = {}\nspacing = {}\norigin = {}\n",
            ulist(&counts), list(&spacing), list(&origin)
        );
        if let Some(f) = &fixed {
            // Only selectors valid in this dimension.
            if Selector::parse(f).unwrap().dimension_needed() <= d {
                text += &format!("fixed = {f}\n");
            }
        }
        if fluid {
            text += &format!(
                "\n[fluid.water]\ndensity = 997\ngamma = 6\na_tilde = 3.041e4\nb = 3.0397e4\ncounts = {}\nspacing = {}\n",
                ulist(&counts), list(&spacing)
            );
        }
        text += &format!("\n[contact]\nstiffness = {stiffness:?}\nfamilies = 1, 3\n\n[output]\nstride = {stride}\nformats = csv{}\n",
            if vtk { ", vtk" } else { "" });
        let s = Scenario::parse(&text).unwrap();
        let back = Scenario::parse(&s.serialize()).unwrap();
        prop_assert_eq!(&s, &back);
        prop_assert_eq!(s.serialize(), back.serialize());
    }
}
