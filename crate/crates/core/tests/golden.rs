mod common;

use num_bigint::BigInt;
use tfm_core::cohomology::{kodaira_check, serre_duality_check, weil_cohomology};
use tfm_core::divisor::{self, divisor_polytope, ClassSpace};
use tfm_core::fan::{build_split_bundle, standard::*, unimodular_equivalence};
use tfm_core::lattice::{int, rat, smith_normal_form, sublattice_index, IntVector};
use tfm_core::mmp::{mmp_step, run_mmp, StepKind, StepOutcome, Terminal};
use tfm_core::moricone::{
    check_cone_theorem, fujita_report, mori_cone, verify_split_bundle_over_p1, ContractionKind,
};
use tfm_core::{Error, Fan, FoliatedPair, FoliationSubspace, IntMatrix, TorusDivisor};

fn iv(v: &[i64]) -> IntVector {
    IntVector(v.to_vec())
}

fn span(v: &[&[i64]], n: usize) -> FoliationSubspace {
    FoliationSubspace::from_int(&v.iter().map(|x| iv(x)).collect::<Vec<_>>(), n).unwrap()
}

fn d(c: &[i64]) -> TorusDivisor {
    TorusDivisor::from_ints(c)
}

/// Face fan of the triangular prism with its squares cut along cyclically
/// oriented diagonals. No strictly convex support function exists: the
/// three wall inequalities sum to `0 < 0`.
fn twisted_prism() -> Fan {
    Fan::from_arrays(
        3,
        &[&[1, 0, 1], &[0, 1, 1], &[-1, -1, 1], &[1, 0, -1], &[0, 1, -1], &[-1, -1, -1]],
        &[&[0, 1, 2], &[3, 4, 5], &[0, 1, 4], &[0, 3, 4], &[1, 2, 5], &[1, 4, 5], &[0, 2, 3], &[2, 3, 5]],
    )
    .unwrap()
}

#[test]
fn smith_forms() {
    let m = |r: Vec<Vec<i64>>| IntMatrix::from_rows(r.into_iter().map(|x| x.into_iter().map(BigInt::from).collect()).collect());
    assert_eq!(smith_normal_form(&m(vec![vec![2, 0], vec![0, 3]])).diag, vec![BigInt::from(1), BigInt::from(6)]);
    assert_eq!(smith_normal_form(&m(vec![vec![1, 0], vec![1, 2]])).diag, vec![BigInt::from(1), BigInt::from(2)]);
    assert_eq!(sublattice_index(&[iv(&[1, 0]), iv(&[1, 2])]).unwrap(), BigInt::from(2));
    assert_eq!(sublattice_index(&[iv(&[1, 0, 1]), iv(&[0, 1, 1])]).unwrap(), BigInt::from(1));
}

#[test]
fn weighted_plane_divisors() {
    let p112 = weighted_p112();
    assert!(p112.is_simplicial() && !p112.is_smooth());
    assert!(divisor::is_qcartier(&p112, &d(&[0, 0, 1])));
    assert!(!divisor::is_cartier(&p112, &d(&[0, 0, 1])));
    assert!(divisor::is_ample(&p112, &d(&[0, 0, 1])).unwrap());
    let pts = divisor_polytope(&p112, &d(&[0, 0, 1])).unwrap().lattice_points().unwrap();
    assert_eq!(pts, vec![iv(&[0, 0]), iv(&[1, 0])]);
    let walls = p112.walls().unwrap();
    let t = walls.iter().position(|w| w.rays == [0]).unwrap();
    let b = divisor::ray_pairings(&p112, &walls[t]).unwrap();
    assert_eq!(b, vec![rat(1, 2), int(1), rat(1, 2)]);
    let data = divisor::qcartier_data(&p112, &d(&[0, 1, 0])).unwrap();
    assert_eq!(divisor::intersect_wall(&p112, &data, &walls[t]).unwrap(), int(1));
}

#[test]
fn cube_and_non_projective_fans() {
    let cube = cube_face_fan();
    assert!(!cube.is_simplicial() && cube.is_complete());
    assert!(!divisor::is_qcartier(&cube, &TorusDivisor::prime(8, 0)));
    let q = cube.qfactorialize().unwrap();
    assert_eq!((q.fan.num_rays(), q.fan.cones().len()), (8, 12));
    assert!(cube.is_projective().unwrap());

    let twisted = twisted_prism();
    assert!(twisted.validate().is_valid());
    assert!(twisted.is_complete() && twisted.is_simplicial());
    assert!(!twisted.is_projective().unwrap());
    assert!(matches!(mori_cone(&twisted), Err(Error::NotProjective)));
}

#[test]
fn blowups_and_split_bundles() {
    let f = projective_space(2).star_subdivision(&iv(&[1, 1])).unwrap();
    assert!(unimodular_equivalence(&f, &blown_up_plane()).is_some());
    let b = build_split_bundle(&projective_space(1), &[vec![0, 1]]).unwrap();
    assert!(unimodular_equivalence(&b, &blown_up_plane()).is_some());
    let flat = build_split_bundle(&projective_space(1), &[vec![0, 0]]).unwrap();
    assert!(unimodular_equivalence(&flat, &blown_up_plane()).is_none());
}

#[test]
fn discrepancies_on_the_plane() {
    let p2 = projective_space(2);
    let w = iv(&[1, 1]);
    let full = FoliatedPair::without_boundary(p2.clone(), FoliationSubspace::full(2)).unwrap();
    let x = full.discrepancy(&w).unwrap();
    assert_eq!((x.a, x.iota), (int(1), 1));
    let bounded = FoliatedPair::new(p2.clone(), FoliationSubspace::full(2), d(&[1, 1, 0])).unwrap();
    let x = bounded.discrepancy(&w).unwrap();
    assert_eq!((x.a, x.iota), (int(-1), 1));
    let line = FoliatedPair::without_boundary(p2, span(&[&[1, 0]], 2)).unwrap();
    let x = line.discrepancy(&w).unwrap();
    assert_eq!(x.iota, 0);
    assert_eq!(x.a, line.discrepancy_via_subdivision(&w).unwrap());
}

#[test]
fn cone_theorem_examples() {
    let p2 = FoliatedPair::without_boundary(projective_space(2), FoliationSubspace::full(2)).unwrap();
    let rep = check_cone_theorem(&p2).unwrap();
    assert_eq!(rep.rays.len(), 1);
    assert_eq!(rep.rays[0].length, int(3));
    assert!(rep.rays[0].bundle.as_ref().unwrap().detected);

    let p1 = projective_space(1);
    let pp = FoliatedPair::without_boundary(product(&p1, &p1), span(&[&[1, 0]], 2)).unwrap();
    let rep = check_cone_theorem(&pp).unwrap();
    let long: Vec<_> = rep.rays.iter().filter(|r| r.length == int(2)).collect();
    assert_eq!(long.len(), 1);
    assert!(long[0].bundle.as_ref().unwrap().ok());
    assert_eq!(long[0].kind, ContractionKind::Fiber);

    let half = FoliatedPair::new(blown_up_plane(), span(&[&[1, 1]], 2), TorusDivisor::new(vec![int(0), rat(1, 2), int(0), int(0)]))
        .unwrap();
    let rep = check_cone_theorem(&half).unwrap();
    assert!(rep.ok());
    assert!(rep.rays.iter().all(|r| r.length <= int(2)));
}

#[test]
fn fujita_examples() {
    let p2 = FoliatedPair::without_boundary(projective_space(2), span(&[&[1, 0]], 2)).unwrap();
    assert!(fujita_report(&p2, &d(&[1, 0, 0])).unwrap().ok());

    let p1 = projective_space(1);
    let pp = FoliatedPair::without_boundary(product(&p1, &p1), span(&[&[1, 0]], 2)).unwrap();
    let rep = fujita_report(&pp, &d(&[1, 0, 1, 0])).unwrap();
    assert!(!rep.improved_nef);
    assert_eq!(rep.exceptions.len(), 1);
    assert!(rep.exceptions[0].verified);
    assert_eq!(rep.exceptions[0].a_dot_line, int(1));
    assert!(rep.ok());

    let f1 = FoliatedPair::without_boundary(blown_up_plane(), span(&[&[1, 0]], 2)).unwrap();
    assert!(fujita_report(&f1, &d(&[0, 0, 2, 1])).unwrap().generic_nef);
}

#[test]
fn split_bundle_dichotomy() {
    assert!(!verify_split_bundle_over_p1(&[1], &[int(0), int(0)]).unwrap().zero_ray);
    assert!(!verify_split_bundle_over_p1(&[0, 2], &vec![int(0); 3]).unwrap().zero_ray);
    let flat = verify_split_bundle_over_p1(&[0, 0], &[rat(1, 2), int(0), rat(1, 3)]).unwrap();
    assert!(flat.trivial && flat.zero_ray && flat.holds);
}

#[test]
fn cohomology_examples() {
    assert_eq!(weil_cohomology(&projective_space(1), &d(&[-2, 0]), None).unwrap().h, vec![0, 1]);
    let p2 = projective_space(2);
    assert_eq!(weil_cohomology(&p2, &d(&[0, 0, 2]), None).unwrap().h, vec![6, 0, 0]);
    assert_eq!(weil_cohomology(&p2, &d(&[-1, -1, -1]), None).unwrap().h, vec![0, 0, 1]);
    assert!(serre_duality_check(&p2, &d(&[0, 0, 2])).unwrap());
    let p1 = projective_space(1);
    let pp = product(&p1, &p1);
    assert_eq!(weil_cohomology(&pp, &d(&[1, 0, 0, 0]), None).unwrap().h, vec![2, 0, 0]);
    assert!(serre_duality_check(&pp, &d(&[1, 0, 0, 0])).unwrap());

    let full = FoliatedPair::without_boundary(weighted_p112(), FoliationSubspace::full(2)).unwrap();
    let rep = kodaira_check(&full, &d(&[0, 0, 1]), None).unwrap();
    assert_eq!(rep.h, vec![2, 0, 0]);
    assert!(rep.ok());

    let half = FoliatedPair::new(blown_up_plane(), span(&[&[1, 1]], 2), TorusDivisor::new(vec![int(0), rat(1, 2), int(0), int(0)]))
        .unwrap();
    let rep = kodaira_check(&half, &d(&[0, 0, 1, 0]), None).unwrap();
    assert!(rep.ok());
}

#[test]
fn mmp_examples() {
    let f1 = blown_up_plane();
    let v = FoliatedPair::without_boundary(f1.clone(), span(&[&[1, 1]], 2)).unwrap();
    match mmp_step(&v).unwrap() {
        StepOutcome::Fiber { step } => {
            assert_eq!(step.length, int(2));
            assert_eq!(step.bundle, Some(true));
        }
        other => panic!("{other:?}"),
    }
    let w = FoliatedPair::without_boundary(f1, span(&[&[1, 0]], 2)).unwrap();
    match mmp_step(&w).unwrap() {
        StepOutcome::Divisorial { step, pair } => {
            assert_eq!(step.length, int(1));
            assert_eq!(pair.fan().num_rays(), 3);
            assert!(unimodular_equivalence(pair.fan(), &projective_space(2)).is_some());
            assert!(pair.subspace().same_as(w.subspace().basis()));
        }
        other => panic!("{other:?}"),
    }
    let line = FoliatedPair::without_boundary(projective_space(2), span(&[&[1, 0]], 2)).unwrap();
    let t = run_mmp(&line, 5).unwrap();
    assert_eq!(t.steps.len(), 1);
    assert_eq!(t.steps[0].kind, StepKind::Fiber);

    // K_F + Δ nef: nothing to do
    let nef = FoliatedPair::without_boundary(projective_space(2), span(&[&[1, 2]], 2)).unwrap();
    let t = run_mmp(&nef, 5).unwrap();
    assert!(t.steps.is_empty());
    assert_eq!(t.terminal, Some(Terminal::MinimalModel));
}

#[test]
fn class_space_ranks() {
    for nf in common::base_fans() {
        let space = ClassSpace::new(&nf.fan).unwrap();
        assert_eq!(space.rank(), nf.fan.num_rays() - nf.fan.dim(), "{}", nf.name);
    }
}
