//! Writes the level-9 image of Grigorchuk's `b` computed by the level-matrix recursion.
use selfsim::mealy::bundled;
use selfsim::recursion::level_matrix;
use selfsim::{render, Field, GroupRingElem, MarkedBasis};

fn main() -> selfsim::Result<()> {
    let g = bundled::grigorchuk();
    let f2 = Field::new(2)?;
    let b = GroupRingElem::from_element(&g, f2, &g.generator("b")?)?;
    let m = level_matrix(&g, &b, 9, &MarkedBasis::binomial(2)?)?;
    let path = std::env::args().nth(1).unwrap_or_else(|| "tests/golden/grigorchuk_b_level9.pbm".into());
    std::fs::write(path, render::render(&m)).expect("writable output");
    Ok(())
}
