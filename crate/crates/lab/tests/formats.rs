use ffwd_core::algorithms::cga::generate_instances;
use ffwd_core::algorithms::{CgaInstance, Graph, Permutation};
use ffwd_core::zoo::{fock_matrix, QuadraticHamiltonian};
use ffwd_core::{DenseOperator, RngStream, C64};
use ffwd_lab::formats::*;
use proptest::prelude::*;

#[test]
fn text_matrix() {
    let m = parse_matrix("# pauli y\n2\n0 0  0 -1\n0 1  0 0\n").unwrap();
    assert_eq!(m.dim, 2);
    let op = m.to_operator().unwrap();
    assert_eq!(op.get(0, 1), C64::new(0.0, -1.0));
    assert_eq!(op.get(1, 0), C64::new(0.0, 1.0));
    assert_eq!(parse_matrix(&m.to_text()).unwrap(), m);
}

#[test]
fn json_matrix() {
    let m = parse_matrix(r#"{"dim": 1, "entries": [[0.5, 0.0]]}"#).unwrap();
    assert_eq!(m.to_operator().unwrap().get(0, 0), C64::new(0.5, 0.0));
    assert_eq!(serde_json::from_str::<MatrixFile>(&serde_json::to_string(&m).unwrap()).unwrap(), m);
}

#[test]
fn malformed_matrices() {
    assert!(parse_matrix("2\n1 0 0 0\n").unwrap_err().to_string().contains("missing matrix row 1"));
    assert!(parse_matrix("2\n1 0 0\n0 0 1 0\n").unwrap_err().to_string().contains("expected 4"));
    assert!(parse_matrix("1\n1 x\n").unwrap_err().to_string().contains("not a number"));
    assert!(parse_matrix("1\n1 0\n5\n").unwrap_err().to_string().contains("trailing"));
    let short = MatrixFile { dim: 2, entries: vec![[1.0, 0.0]] };
    assert!(short.to_operator().is_err());
}

#[test]
fn quadratic_text_and_json_agree() {
    let text = "A\n2\n0.5 0  0.1 0.2\n0.1 -0.2  -0.3 0\nB\n2\n0 0  0.4 0\n-0.4 0  0 0\n";
    let q = parse_quadratic(text).unwrap();
    assert_eq!(q.modes(), 2);
    let f = QuadraticFile {
        a: MatrixFile::from_operator(q.hopping()),
        b: MatrixFile::from_operator(q.pairing()),
    };
    let q2 = parse_quadratic(&serde_json::to_string(&f).unwrap()).unwrap();
    assert_eq!(fock_matrix(&q).unwrap(), fock_matrix(&q2).unwrap());
    // A must be Hermitian
    assert!(parse_quadratic("A\n1\n0 1\nB\n1\n0 0\n").is_err());
    assert!(parse_quadratic("B\n1\n0 0\n").unwrap_err().to_string().contains("expected section A"));
}

#[test]
fn random_quadratic_round_trip() {
    let mut rng = RngStream::new(4, 0);
    let q = QuadraticHamiltonian::random(3, &mut rng).unwrap();
    let f = QuadraticFile { a: MatrixFile::from_operator(q.hopping()), b: MatrixFile::from_operator(q.pairing()) };
    let text = format!("A\n{}B\n{}", f.a.to_text(), f.b.to_text());
    let back = parse_quadratic(&text).unwrap();
    let d: DenseOperator = fock_matrix(&back).unwrap().sub(&fock_matrix(&q).unwrap());
    assert_eq!(d.max_abs(), 0.0);
}

#[test]
fn cga_file() {
    let text = "# square\nvertices: 4\n0: 1 3\n1: 0 2\n2: 1 3\n3: 0 2\nsigma: (0 1 2 3)\n";
    let inst = parse_cga(text).unwrap();
    assert_eq!(inst.graph.edges().len(), 4);
    assert!(inst.graph.is_automorphism(&inst.sigma).unwrap());
    assert_eq!(write_cga(&inst), text.trim_start_matches("# square\n"));
    let again = parse_cga(&write_cga(&inst)).unwrap();
    assert_eq!(again, inst);
}

#[test]
fn cga_errors() {
    assert!(parse_cga("0: 1\nsigma: ()\n").unwrap_err().to_string().contains("vertices"));
    assert!(parse_cga("vertices: 2\n0: 0\nsigma: ()\n").unwrap_err().to_string().contains("self-loop"));
    assert!(parse_cga("vertices: 2\n0: 1\n").unwrap_err().to_string().contains("sigma"));
    assert!(parse_cga("vertices: 3\nsigma: (0 1\n").unwrap_err().to_string().contains("unclosed"));
    assert!(parse_cga("vertices: 3\nsigma: (0 5)\n").is_err());
    assert!(parse_cga("vertices: 3\ncolour: red\n").unwrap_err().to_string().contains("unknown key"));
}

#[test]
fn cycle_notation_examples() {
    assert_eq!(cycle_notation(&Permutation::identity(4)), "()");
    let p = Permutation::from_cycles(6, &[vec![0, 2], vec![3, 4, 5]]).unwrap();
    assert_eq!(cycle_notation(&p), "(0 2)(3 4 5)");
    assert_eq!(parse_cycles(6, "(0 2)(3 4 5)").unwrap(), p);
    assert_eq!(parse_cycles(6, "( 0, 2 ) (3 4 5)").unwrap(), p);
    assert_eq!(parse_cycles(3, "()").unwrap(), Permutation::identity(3));
}

#[test]
fn generated_instances_round_trip() {
    let mut rng = RngStream::new(9, 9);
    for (inst, _) in generate_instances(5, 5, &mut rng).unwrap() {
        assert_eq!(parse_cga(&write_cga(&inst)).unwrap(), inst);
    }
}

proptest! {
    #[test]
    fn arbitrary_instances_round_trip(n in 1usize..12, bits in any::<u64>(), perm_seed in any::<u64>()) {
        let mut edges = Vec::new();
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if bits >> (k % 64) & 1 == 1 {
                    edges.push((u, v));
                }
                k += 1;
            }
        }
        let mut images: Vec<usize> = (0..n).collect();
        RngStream::new(perm_seed, 0).shuffle(&mut images);
        let inst = CgaInstance::new(Graph::from_edges(n, &edges).unwrap(), Permutation::new(images).unwrap()).unwrap();
        prop_assert_eq!(parse_cga(&write_cga(&inst)).unwrap(), inst);
    }

    #[test]
    fn arbitrary_matrices_round_trip(dim in 1usize..5, vals in prop::collection::vec(-1e10f64..1e10, 50)) {
        let entries: Vec<[f64; 2]> = (0..dim * dim).map(|k| [vals[2 * k % 50], vals[(2 * k + 1) % 50]]).collect();
        let m = MatrixFile { dim, entries };
        prop_assert_eq!(parse_matrix(&m.to_text()).unwrap(), m.clone());
        prop_assert_eq!(MatrixFile::from_operator(&m.to_operator().unwrap()), m);
    }
}
