//! The groups used throughout the examples and tests.

use super::{parse_group, Group};

pub const ADDING_MACHINE: &str = "p = 2\na = s (1, a)\n";

pub const GRIGORCHUK: &str = "p = 2\na = s\nb = (a, c)\nc = (a, d)\nd = (1, b)\n";

pub const GUPTA_SIDKI: &str = "p = 3\na = s\nb = (a, a', b)\n";

/// Binary adding machine `a = σ(1, a)`.
pub fn adding_machine() -> Group {
    parse_group(ADDING_MACHINE).expect("bundled group parses")
}

/// Grigorchuk group on generators `a, b, c, d`.
pub fn grigorchuk() -> Group {
    parse_group(GRIGORCHUK).expect("bundled group parses")
}

/// Gupta–Sidki 3-group on generators `a, b`.
pub fn gupta_sidki() -> Group {
    parse_group(GUPTA_SIDKI).expect("bundled group parses")
}

/// Adding machine over `p` letters: `a = σ(1, .., 1, a)`.
pub fn adding_machine_p(p: usize) -> Group {
    let mut secs = vec!["1"; p];
    secs[p - 1] = "a";
    parse_group(&format!("p = {p}\na = s ({})\n", secs.join(", "))).expect("valid presentation")
}
