//! Plain netpbm and CSV export of matrix truncations.

use crate::automatic::AutoMatrix;
use crate::fp::FpMatrix;

/// PBM (`P1`, 1 = black) over `F_2`, PGM (`P2`, maxval `p − 1`) otherwise.
pub fn render(m: &FpMatrix) -> String {
    let p = m.field().p();
    let mut out = if p == 2 {
        format!("P1\n{} {}\n", m.cols(), m.rows())
    } else {
        format!("P2\n{} {}\n{}\n", m.cols(), m.rows(), p - 1)
    };
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(u8::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// The `n × n` truncation of `a`, rendered.
pub fn render_auto(a: &AutoMatrix, n: usize) -> String {
    render(&a.truncate(n, n))
}

/// Comma-separated residues, one row per line.
pub fn to_csv(m: &FpMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(u8::to_string).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
