use knotcluster::braid::{closure_diagram, parse_braid_word};
use knotcluster::cluster::{check_nondegenerate, evolve, ClusterTuple};
use knotcluster::decoration::{assemble_solution, decorate, generic_decoration};
use knotcluster::error::Error;
use knotcluster::fixtures;
use knotcluster::geometry::{all_shapes, gluing_residual, shape_from_ptolemy, volume, TetShape, TET_ORIENTATION};
use knotcluster::linalg::{cr, Vec2, C};
use knotcluster::ptolemy::{extend_assignment, literal_relations, meridian_holonomy, verify_crossing_relations, TETS};
use knotcluster::representation::{obstruction_class, solve_parabolic};

#[test]
fn fixture_x1_entries_at_table_params() {
    let f = fixtures::example_41();
    let dec = decorate(&f.diagram, &f.rep, [cr(2.0), cr(1.0), cr(3.0)], Some(Vec2::real(1.0, 0.0))).unwrap();
    let x = assemble_solution(&f.diagram, &dec);
    assert!((x[0].0[0] + 1.0).norm() < 1e-14);
    assert!((x[0].0[2] - 1.0).norm() < 1e-14);
    assert!((x[0].0[5] + 1.0).norm() < 1e-14);
    assert_eq!(x[0], x[5]);
}

#[test]
fn table_params_are_degenerate_for_the_dynamics() {
    // x^4_5 = (lambda - 1)(2 beta - alpha) vanishes at alpha = 2 beta.
    let f = fixtures::example_41();
    let dec = decorate(&f.diagram, &f.rep, [cr(2.0), cr(1.0), cr(3.0)], None).unwrap();
    let x = assemble_solution(&f.diagram, &dec);
    assert!(x[3].0[4].norm() < 1e-14);
    assert!(!check_nondegenerate(&x, Some(&f.diagram.braid)).pass);
    assert!(matches!(evolve(&f.diagram.braid, &x[0]), Err(Error::DegenerateInput { level: Some(4), .. })));
}

#[test]
fn beta_zero_fails_nondegeneracy() {
    let f = fixtures::example_41();
    let dec = decorate(&f.diagram, &f.rep, [C::new(0.7, 0.2), cr(0.0), C::new(-0.3, 1.1)], None).unwrap();
    let r = check_nondegenerate(&assemble_solution(&f.diagram, &dec), None);
    assert!(r.zero_entries.contains(&(1, 2)));
}

#[test]
fn generic_decorations_over_many_seeds() {
    let f = fixtures::example_41();
    let mut total = 0;
    for seed in 0..100 {
        let (_, k) = generic_decoration(&f.diagram, &f.rep, seed).unwrap();
        total += k;
    }
    assert!(total < 150, "{total} draws for 100 seeds");
}

#[test]
fn parity_gate_both_directions() {
    // odd length: succeeds; even length: mismatch
    let f = fixtures::example_41();
    assert!(generic_decoration(&f.diagram, &f.rep, 1).is_ok());
    let (d, rep) = fixtures::even_braid_rep();
    assert_eq!(obstruction_class(&d, &rep), Ok(-1));
    assert_eq!(generic_decoration(&d, &rep, 1).err(), Some(Error::ObstructionMismatch { rep: -1, braid: 1 }));
    // solver reps on the even braid hit the same barrier
    for s in solve_parabolic(&d, 3, 32).unwrap() {
        assert!(matches!(generic_decoration(&d, &s.rep, 1), Err(Error::ObstructionMismatch { .. })));
    }
}

#[test]
fn perturbation_is_local() {
    let f = fixtures::example_41();
    let (dec, _) = generic_decoration(&f.diagram, &f.rep, 2).unwrap();
    let mut a = extend_assignment(&f.diagram, &assemble_solution(&f.diagram, &dec)).unwrap();
    a.crossings[2].y[0] *= 1.0 + 1e-4;
    let r = verify_crossing_relations(&a);
    for c in &r.crossings {
        let failing = c.literal.iter().filter(|&&x| x > 1e-9).count();
        if c.crossing == 3 {
            assert!((1..=5).contains(&failing));
        } else {
            assert_eq!(failing, 0);
        }
    }
    // y1 appears in exactly three of the five relations
    let o = &a.crossings[2];
    let bad = literal_relations(o).iter().filter(|(l, p, q)| (l - p - q).norm() > 1e-9 * l.norm()).count();
    assert_eq!(bad, 3);
}

#[test]
fn shapes_agree_with_ptolemy_ratios() {
    let f = fixtures::example_41();
    let (dec, _) = generic_decoration(&f.diagram, &f.rep, 9).unwrap();
    let a = extend_assignment(&f.diagram, &assemble_solution(&f.diagram, &dec)).unwrap();
    let shapes = all_shapes(&f.diagram, &f.rep, &dec).unwrap();
    assert_eq!(shapes.len(), 25);
    for s in &shapes {
        let z = shape_from_ptolemy(&a.crossings[s.crossing - 1], s.tet);
        assert!((z - s.z).norm() <= 1e-9 * s.z.norm().max(1.0));
        assert!(s.z.norm() > 1e-9 && (s.z - 1.0).norm() > 1e-9);
    }
}

#[test]
fn conjugate_rep_negates_volume() {
    let f = fixtures::example_41();
    let (dec, _) = generic_decoration(&f.diagram, &f.rep, 4).unwrap();
    let v = volume(&all_shapes(&f.diagram, &f.rep, &dec).unwrap()).unwrap();
    let bar = f.rep.complex_conjugate();
    let (dec_bar, _) = generic_decoration(&f.diagram, &bar, 4).unwrap();
    let vb = volume(&all_shapes(&f.diagram, &bar, &dec_bar).unwrap()).unwrap();
    assert!((v + vb).abs() < 1e-9, "{v} {vb}");
}

#[test]
fn non_solution_c_values_break_gluing() {
    // Shapes read off Ptolemy coordinates of a tuple that is not a solution.
    let f = fixtures::example_41();
    let d = &f.diagram;
    let x1 = ClusterTuple((0..13).map(|j| C::new(1.0 + 0.1 * j as f64, 0.3 - 0.05 * j as f64)).collect());
    let tuples = evolve(&d.braid, &x1).unwrap();
    let a = extend_assignment(d, &tuples).unwrap();
    let shapes: Vec<TetShape> = a
        .crossings
        .iter()
        .flat_map(|o| {
            TETS.iter().enumerate().map(move |(ti, t)| TetShape {
                crossing: o.crossing,
                tet: *t,
                z: shape_from_ptolemy(o, *t),
                orientation: TET_ORIENTATION[ti] * o.sign,
            })
        })
        .collect();
    assert!(gluing_residual(&shapes, d).max_residual > 1e-3);
}

#[test]
fn uncovered_arc_has_no_path() {
    let f = fixtures::example_41();
    let (dec, _) = generic_decoration(&f.diagram, &f.rep, 0).unwrap();
    let a = extend_assignment(&f.diagram, &assemble_solution(&f.diagram, &dec)).unwrap();
    assert_eq!(meridian_holonomy(&a, &f.diagram, 99).err(), Some(Error::PathNotRecorded { arc: 99 }));
    let (_, m) = meridian_holonomy(&a, &f.diagram, 1).unwrap();
    assert!((m.trace() + 2.0).norm() < 1e-9);
}

#[test]
fn solver_matrices_are_parabolic() {
    for t in ["[1,1,1]", "[1,-2,1,-2]", "[1,1,1,1,1]"] {
        let d = closure_diagram(&parse_braid_word(t, None).unwrap());
        for s in solve_parabolic(&d, 5, 24).unwrap() {
            for g in &s.rep.matrices {
                assert!((g.det() - 1.0).norm() < 1e-10);
                assert!((g.trace() + 2.0).norm() < 1e-10);
            }
            assert!(s.provenance.residual <= 1e-10);
        }
    }
}

#[test]
fn trefoil_shapes_are_flat() {
    let d = closure_diagram(&parse_braid_word("[1,1,1]", None).unwrap());
    let rep = solve_parabolic(&d, 1, 32).unwrap().remove(0).rep;
    assert_eq!(obstruction_class(&d, &rep), Ok(-1));
    let (dec, _) = generic_decoration(&d, &rep, 1).unwrap();
    let shapes = all_shapes(&d, &rep, &dec).unwrap();
    assert!(volume(&shapes).unwrap().abs() < 1e-9);
    assert!(gluing_residual(&shapes, &d).pass);
}
