use crate::error::{Error, Result};

/// Explicit finite invertible Mealy machine over the alphabet `{0..d-1}`.
///
/// `next[q][x]` is the state after reading `x` in state `q`, `out[q][x]` the
/// letter written.  Every `out[q]` is a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyMachine {
    d: usize,
    names: Vec<String>,
    next: Vec<Vec<usize>>,
    out: Vec<Vec<u8>>,
}

impl MealyMachine {
    pub fn new(
        d: usize,
        names: Vec<String>,
        next: Vec<Vec<usize>>,
        out: Vec<Vec<u8>>,
    ) -> Result<MealyMachine> {
        let n = names.len();
        if next.len() != n || out.len() != n {
            return Err(Error::Dimension("one row per state".into()));
        }
        for (row, outs) in next.iter().zip(&out) {
            if row.len() != d || outs.len() != d || row.iter().any(|&q| q >= n) {
                return Err(Error::Dimension("transition is not total".into()));
            }
            let mut seen = vec![false; d];
            for &y in outs {
                if (y as usize) >= d || std::mem::replace(&mut seen[y as usize], true) {
                    return Err(Error::Dimension("output map is not a permutation".into()));
                }
            }
        }
        Ok(MealyMachine { d, names, next, out })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn next(&self, q: usize, x: u8) -> usize {
        self.next[q][x as usize]
    }

    pub fn output(&self, q: usize, x: u8) -> u8 {
        self.out[q][x as usize]
    }

    /// Output word for input `w` starting in state `q`.
    pub fn run(&self, mut q: usize, w: &[u8]) -> Result<Vec<u8>> {
        let mut res = Vec::with_capacity(w.len());
        for &x in w {
            if x as usize >= self.d {
                return Err(Error::LetterOutOfRange {
                    letter: x as usize,
                    d: self.d,
                });
            }
            res.push(self.out[q][x as usize]);
            q = self.next[q][x as usize];
        }
        Ok(res)
    }
}

/// Vertex permutations of an automorphism on the first `n` levels.
///
/// Level `k` lists `d^k` permutations indexed by vertex `Σ x_i d^(i-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Portrait {
    d: usize,
    labels: Vec<Vec<Vec<u8>>>,
}

impl Portrait {
    pub(crate) fn new(d: usize, labels: Vec<Vec<Vec<u8>>>) -> Portrait {
        Portrait { d, labels }
    }

    pub fn depth(&self) -> usize {
        self.labels.len()
    }

    pub fn level(&self, k: usize) -> &[Vec<u8>] {
        &self.labels[k]
    }

    /// Permutation at vertex `v` (`|v|` below the depth).
    pub fn label(&self, v: &[u8]) -> &[u8] {
        let idx = v
            .iter()
            .rev()
            .fold(0usize, |acc, &x| acc * self.d + x as usize);
        &self.labels[v.len()][idx]
    }

    /// Applies the portrait to a word of length at most the depth.
    pub fn act(&self, w: &[u8]) -> Vec<u8> {
        (0..w.len()).map(|i| self.label(&w[..i])[w[i] as usize]).collect()
    }
}
