use bootperc::certify::{PartitionStats, Property};
use bootperc::families::BaseSpec;
use bootperc::{
    certify, check_p1, check_p2, check_p3, check_p4, check_p5, check_p6, distance_matrix, replay,
    separating_partition, CertRequest, FamilySpec, Graph, GraphFamily, Verdict, VertexId,
};

fn fam(spec: FamilySpec) -> GraphFamily {
    GraphFamily::new(spec).unwrap()
}

fn complete(n: u64) -> GraphFamily {
    let edges = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    fam(FamilySpec::Explicit {
        order: n,
        edges,
        k: 1,
    })
}

fn path(n: u64) -> GraphFamily {
    fam(FamilySpec::Explicit {
        order: n,
        edges: (0..n - 1).map(|a| (a, a + 1)).collect(),
        k: 1,
    })
}

#[test]
fn p1_hypercube_and_star_product() {
    let q8 = fam(FamilySpec::Hypercube { n: 8 });
    for x in [0u64, 0b1011_0110, 255] {
        assert!(check_p1(&q8, VertexId(x), 3, 2).unwrap().is_pass());
    }
    let stars = fam(FamilySpec::Product {
        bases: vec![BaseSpec::Star(3), BaseSpec::Star(3)],
    });
    let centre = stars.parse_vertex("(0,0)").unwrap();
    let v = check_p1(&stars, centre, 1, 1).unwrap();
    let w = v
        .witness()
        .expect("star product centre violates P1 at K = 1");
    assert_eq!((w.ell, w.measured, w.bound), (Some(1), 2.0, 1.0));
    assert!(replay(&stars, w).unwrap());
    let petersen = fam(FamilySpec::Odd { n: 3 });
    assert!(check_p1(&petersen, VertexId(0b011), 2, 1)
        .unwrap()
        .is_pass());
}

#[test]
fn p2_complete_graph_fails() {
    let k8 = complete(8);
    let v = check_p2(&k8, VertexId(0), 1, 1).unwrap();
    let w = v.witness().unwrap();
    assert_eq!((w.measured, w.bound), (7.0, 1.0));
    assert!(replay(&k8, w).unwrap());
    assert!(check_p2(&k8, VertexId(0), 0, 1).unwrap().is_pass());
    let q8 = fam(FamilySpec::Hypercube { n: 8 });
    for x in q8.vertices() {
        assert!(check_p2(&q8, x, 3, 2).unwrap().is_pass());
    }
}

#[test]
fn p3_examples() {
    let q6 = fam(FamilySpec::Hypercube { n: 6 });
    for x in q6.vertices() {
        assert!(check_p3(&q6, x, 3, 2).unwrap().is_pass());
    }
    let m4 = fam(FamilySpec::MiddleLayer { n: 4 });
    for x in m4.vertices() {
        assert!(check_p3(&m4, x, 2, 4).unwrap().is_pass());
    }
    let torus = fam(FamilySpec::Torus { dims: vec![4, 4] });
    for x in torus.vertices() {
        assert!(check_p3(&torus, x, 2, 4).unwrap().is_pass());
    }
}

#[test]
fn p4_examples() {
    let q6 = fam(FamilySpec::Hypercube { n: 6 });
    assert!(check_p4(&q6, VertexId(0), 3, 2, 1).unwrap().is_pass());
    let m4 = fam(FamilySpec::MiddleLayer { n: 4 });
    assert!(check_p4(&m4, m4.vertex_at(0), 2, 4, 1).unwrap().is_pass());
    let k8 = complete(8);
    assert!(matches!(
        check_p4(&k8, VertexId(0), 1, 1, 1).unwrap(),
        Verdict::NotEvaluated { .. }
    ));
}

#[test]
fn p5_examples() {
    let q8 = fam(FamilySpec::Hypercube { n: 8 });
    assert!(check_p5(&q8, VertexId(0), 2, 2).unwrap().is_pass());
    let k8 = complete(8);
    let v = check_p5(&k8, VertexId(3), 1, 1).unwrap();
    let w = v.witness().unwrap();
    assert_eq!((w.measured, w.bound), (7.0, 1.0));
    assert!(replay(&k8, w).unwrap());
    assert!(check_p5(&k8, VertexId(3), 0, 1).unwrap().is_pass());
}

#[test]
fn p6_examples() {
    assert!(check_p6(&fam(FamilySpec::Hypercube { n: 12 }), 2).is_pass());
    assert!(check_p6(&fam(FamilySpec::MiddleLayer { n: 6 }), 4).is_pass());
    let p = path(1000);
    let v = check_p6(&p, 1);
    let w = v.witness().unwrap();
    assert!((w.measured - 1000f64.ln()).abs() < 1e-12);
    assert_eq!(w.bound, 1.0);
    assert!(w.replayed);
}

#[test]
fn partition_of_hypercube_four() {
    let q4 = fam(FamilySpec::Hypercube { n: 4 });
    let part = separating_partition(&q4, VertexId(0), 2, 2).unwrap();
    let labels: Vec<Vec<String>> = part
        .classes
        .iter()
        .map(|c| c.iter().map(|&v| q4.label(v)).collect())
        .collect();
    assert_eq!(
        labels,
        vec![
            vec!["1100", "0011"],
            vec!["1010", "0101"],
            vec!["0110", "1001"]
        ]
    );
    assert_eq!(part.bound, 24.0);
    assert!(part.verdict.is_pass());
    let q6 = fam(FamilySpec::Hypercube { n: 6 });
    for x in q6.vertices() {
        let part = separating_partition(&q6, x, 1, 2).unwrap();
        assert_eq!(part.classes.len(), 1);
        assert_eq!(part.bound, 2.0);
    }
}

#[test]
fn partition_classes_are_separated() {
    let g = fam(FamilySpec::MiddleLayer { n: 4 });
    let dm = distance_matrix(&g).unwrap();
    for x in g.vertices() {
        for ell in 1..=3 {
            let part = separating_partition(&g, x, ell, 4).unwrap();
            for class in &part.classes {
                for (i, &a) in class.iter().enumerate() {
                    for &b in &class[i + 1..] {
                        let d = dm.get(g.index_of(a).unwrap(), g.index_of(b).unwrap());
                        assert!(u32::from(d) >= 2 * ell);
                    }
                }
            }
            let size: usize = part.classes.iter().map(Vec::len).sum();
            assert_eq!(size, bootperc::sphere(&g, x, ell).unwrap().len());
        }
    }
}

#[test]
fn certify_complete_graph_fails_p2() {
    let k8 = complete(8);
    let cert = certify(&CertRequest::new(&k8, 1).ell_max(1)).unwrap();
    assert!(!cert.passed());
    let w = cert.verdict(Property::P2).witness().unwrap();
    assert!(w.replayed);
    assert_eq!(w.x, Some(VertexId(0)));
    assert!(cert.verdict(Property::P1).is_pass());
    assert!(cert.verdict(Property::P6).is_pass());
    assert!(matches!(
        cert.verdict(Property::P4),
        Verdict::NotEvaluated { .. }
    ));
}

#[test]
fn certify_small_families() {
    for (spec, k, ell_max) in [
        (FamilySpec::Hypercube { n: 6 }, 2, 3),
        (FamilySpec::MiddleLayer { n: 4 }, 4, 2),
        (FamilySpec::Odd { n: 4 }, 4, 2),
        (FamilySpec::Folded { n: 6 }, 3, 2),
        (FamilySpec::Torus { dims: vec![4, 4] }, 4, 2),
        (
            FamilySpec::Grid {
                dims: vec![3, 4, 2],
            },
            4,
            2,
        ),
    ] {
        let g = fam(spec.clone());
        let cert = certify(&CertRequest::new(&g, k).ell_max(ell_max)).unwrap();
        for report in &cert.properties {
            assert!(!report.verdict.is_fail(), "{spec}: {:?}", report);
        }
        assert!(cert.centers.exhaustive);
        assert_eq!(cert.partitions.len() as u64, g.order() * u64::from(ell_max));
        assert!(cert
            .partitions
            .iter()
            .all(|p: &PartitionStats| p.classes as f64 <= p.bound));
    }
}

#[test]
fn triangle_bases_break_separation_at_radius_one() {
    for spec in [
        FamilySpec::Hamming { n: 3, q: 3 },
        FamilySpec::Torus {
            dims: vec![3, 3, 3],
        },
    ] {
        let g = fam(spec);
        let cert = certify(&CertRequest::new(&g, 3).ell_max(2)).unwrap();
        let w = cert.verdict(Property::P5).witness().unwrap();
        assert_eq!((w.ell, w.measured, w.bound), (Some(1), 2.0, 1.0));
        assert!(w.replayed);
        for p in [
            Property::P1,
            Property::P2,
            Property::P3,
            Property::P4,
            Property::P6,
            Property::Partition,
        ] {
            assert!(cert.verdict(p).is_pass(), "{p:?}");
        }
        // no admissible D helps: at ℓ = 1 it may hold one vertex, and S(x, 1) has three triangles
        let x = VertexId(0);
        assert_eq!(bootperc::sphere(&g, x, 1).unwrap().len(), 6);
    }
}

#[test]
fn certificates_are_deterministic() {
    let g = fam(FamilySpec::Hypercube { n: 13 });
    let req = CertRequest::new(&g, 2)
        .ell_max(2)
        .centers(bootperc::CenterPolicy::Sampled { count: 5, seed: 3 });
    let a = certify(&req).unwrap();
    let b = certify(&req).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.centers.count, 5);
    assert!(!a.centers.exhaustive);
    assert!(a.passed());
}

#[test]
fn request_validation() {
    let g = fam(FamilySpec::Hypercube { n: 3 });
    assert!(certify(&CertRequest::new(&g, 0)).is_err());
    assert!(certify(&CertRequest::new(&g, 2).ell_max(7)).is_err());
    assert!(certify(&CertRequest::new(&g, 2).ell_max(0)).is_err());
}
