use selfsim::automatic::{from_group_ring, DEFAULT_SYMBOL_CAP};
use selfsim::mealy::bundled;
use selfsim::recursion::level_matrix;
use selfsim::sequences::{kernel, toeplitz_from_alpha};
use selfsim::series::{diagonal_series, grigorchuk_diagonal_system};
use selfsim::triangular::{alpha, first_diagonal_oracle};
use selfsim::{FpMatrix, GroupRingElem, MarkedBasis};

#[test]
fn diagonal_kernel_predicts_matrix() {
    let g = bundled::grigorchuk();
    let b = g.generator("b").unwrap();
    let basis = MarkedBasis::binomial(2).unwrap();
    let diag = first_diagonal_oracle(&g, &b, 1023, &basis).unwrap();
    let oracle = |n: u64| if n == 0 || n > 1023 { None } else { Some(diag[n as usize - 1]) };
    let k = kernel(oracle, 2, 64, 32).unwrap();
    assert_eq!(k.num_symbols(), 5);
    for n in 1..1024u64 {
        assert_eq!(k.term(n).unwrap(), diag[n as usize - 1]);
    }
    let a = alpha(&g, &b).unwrap();
    let t = toeplitz_from_alpha(a.preperiod(), a.period(), 2).unwrap();
    assert_eq!(t.prefix(1, 1023).unwrap(), diag);
}

#[test]
fn entries_agree_with_blocks() {
    let g = bundled::grigorchuk();
    let basis = MarkedBasis::binomial(2).unwrap();
    for name in ["a", "b", "c", "d", "abd"] {
        let e = g.parse_element(name).unwrap();
        let a = GroupRingElem::from_element(&g, basis.field(), &e).unwrap();
        let m = from_group_ring(&g, &a, &basis, DEFAULT_SYMBOL_CAP).unwrap();
        for levels in [4, 6, 8] {
            let n = 1 << levels;
            assert_eq!(m.truncate(n, n), m.block(levels), "{name} at {n}");
        }
        assert_eq!(m.block(8), level_matrix(&g, &a, 8, &basis).unwrap());
    }
}

#[test]
fn series_from_matrices_and_recursion() {
    let g = bundled::grigorchuk();
    let basis = MarkedBasis::binomial(2).unwrap();
    let sys = grigorchuk_diagonal_system(6, 120).unwrap();
    for (name, table) in [("b", &sys.b), ("c", &sys.c), ("d", &sys.d)] {
        let e = g.generator(name).unwrap();
        for i in 0..=6 {
            let s = diagonal_series(&g, &e, i, 120, &basis).unwrap();
            let len = 128 - i;
            assert_eq!(&s.coeffs()[..len.min(120)], &table[i].coeffs()[..len.min(120)], "{name} {i}");
        }
    }
}

#[test]
fn gupta_sidki_is_unitriangular() {
    let gs = bundled::gupta_sidki();
    let basis = MarkedBasis::binomial(3).unwrap();
    for e in gs.generators() {
        let a = GroupRingElem::from_element(&gs, basis.field(), &e).unwrap();
        let m: FpMatrix = level_matrix(&gs, &a, 4, &basis).unwrap();
        assert!(m.is_upper_unitriangular());
        assert!(m.pow(3).unwrap().is_identity());
    }
}
