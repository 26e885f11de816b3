use polyvem::grid_gen::{build_cornerpoint, flip_vertical, pad_embed, triangulate_faces, LayeredModel};
use polyvem::loads::LoadMethod;
use polyvem::mesh::{compute_geometry, PolyMesh};
use polyvem::vem::Stabilization;
use polyvem::verify::compaction::{solve_compaction, CompactionCase, CompactionLoad, VerticalFrame};

fn eroded_model() -> LayeredModel {
    let mut lm = LayeredModel::new([6, 6, 6], [600.0, 600.0, 60.0]);
    lm.pillar_tilt = 0.3;
    lm.horizon_amplitude = 0.2;
    lm.eroded_layer = Some(2);
    lm
}

fn gravity_error(mesh: &PolyMesh, up: bool, method: LoadMethod) -> f64 {
    let g = compute_geometry(mesh).unwrap();
    let frame = VerticalFrame::of_mesh(mesh, 2, up);
    solve_compaction(mesh, &g, &frame, &CompactionCase::default(), method, Stabilization::AlphaG, 1e-12)
        .unwrap()
        .metrics
        .vert_rel_max
}

#[test]
fn load_methods_on_eroded_cornerpoint_grid() {
    let mesh = triangulate_faces(&build_cornerpoint(&eroded_model().spec().unwrap()).unwrap()).unwrap();
    let errs: Vec<f64> = [LoadMethod::Projection, LoadMethod::Nodal, LoadMethod::DiscreteGradient]
        .into_iter()
        .map(|m| gravity_error(&mesh, false, m))
        .collect();
    println!("projection {:.3e} nodal {:.3e} dgrad {:.3e}", errs[0], errs[1], errs[2]);
    assert!(errs.iter().all(|e| e.is_finite()));
    assert!(errs[2] < errs[0] && errs[2] < errs[1], "{errs:?}");
}

#[test]
fn flipped_model_gives_the_same_answer() {
    let mesh = triangulate_faces(&build_cornerpoint(&eroded_model().spec().unwrap()).unwrap()).unwrap();
    let flipped = flip_vertical(&mesh, 2).unwrap();
    for m in [LoadMethod::Projection, LoadMethod::DiscreteGradient] {
        let a = gravity_error(&mesh, false, m);
        let b = gravity_error(&flipped, true, m);
        assert!((a - b).abs() <= 1e-8 * a, "{m:?}: {a} vs {b}");
    }
}

#[test]
fn padded_model_is_a_box_and_solves() {
    let mut lm = LayeredModel::new([4, 4, 3], [400.0, 400.0, 30.0]);
    lm.pillar_tilt = 0.3;
    lm.horizon_amplitude = 0.2;
    let padded = pad_embed(&lm.spec().unwrap(), 1).unwrap();
    assert_eq!(padded.dims(), [6, 6, 5]);
    let mesh = triangulate_faces(&build_cornerpoint(&padded).unwrap()).unwrap();
    let g = compute_geometry(&mesh).unwrap();
    let frame = VerticalFrame::of_mesh(&mesh, 2, false);
    let case = CompactionCase {
        load: CompactionLoad::TopTraction(-2e6),
        ..CompactionCase::default()
    };
    let run = solve_compaction(&mesh, &g, &frame, &case, LoadMethod::Projection, Stabilization::AlphaG, 1e-12).unwrap();
    assert!(run.metrics.rel_max < 1e-8, "{:?}", run.metrics);
}
