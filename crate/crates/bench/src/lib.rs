//! Fixtures shared by the benchmarks.

use selfsim::mealy::bundled;
use selfsim::{Group, GroupRingElem, MarkedBasis};

pub fn grigorchuk_generator(name: &str) -> (Group, GroupRingElem, MarkedBasis) {
    let g = bundled::grigorchuk();
    let basis = MarkedBasis::binomial(2).expect("prime");
    let e = g.generator(name).expect("bundled generator");
    let a = GroupRingElem::from_element(&g, basis.field(), &e).expect("finite closure");
    (g, a, basis)
}
