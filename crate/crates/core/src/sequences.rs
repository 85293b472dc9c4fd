//! Moore automata and `d`-automatic sequences.
//!
//! Digits of `n` are read least significant first, matching the inverse-lex
//! order of level matrices.

use crate::error::{Error, Result};
use crate::mealy::MealyMachine;
use std::collections::{HashMap, VecDeque};

/// Finite system of decimations: `term(s, n·d + i) = term(step(s, i), n)`.
///
/// A symbol whose head is `None` denotes a sequence with no term at `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSystem {
    d: usize,
    step: Vec<Vec<usize>>,
    head: Vec<Option<u8>>,
    root: usize,
}

impl SequenceSystem {
    pub fn new(d: usize, step: Vec<Vec<usize>>, head: Vec<Option<u8>>, root: usize) -> Result<SequenceSystem> {
        let n = head.len();
        if d < 2 {
            return Err(Error::Dimension("decimation arity must be at least 2".into()));
        }
        if step.len() != n || root >= n || step.iter().any(|r| r.len() != d || r.iter().any(|&s| s >= n)) {
            return Err(Error::Dimension("step map is not total".into()));
        }
        Ok(SequenceSystem { d, step, head, root })
    }

    pub fn arity(&self) -> usize {
        self.d
    }

    pub fn num_symbols(&self) -> usize {
        self.head.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn step(&self, s: usize, i: usize) -> usize {
        self.step[s][i]
    }

    pub fn head(&self, s: usize) -> Option<u8> {
        self.head[s]
    }

    /// Same system, rooted at another symbol.
    pub fn with_root(&self, root: usize) -> SequenceSystem {
        assert!(root < self.num_symbols(), "symbol out of range");
        SequenceSystem { root, ..self.clone() }
    }

    pub fn term(&self, n: u64) -> Result<u8> {
        let mut s = self.root;
        let mut m = n;
        let d = self.d as u64;
        while m > 0 {
            s = self.step[s][(m % d) as usize];
            m /= d;
        }
        self.head[s].ok_or(Error::UndefinedTerm(n))
    }

    /// Terms `start, .., start + len - 1`.
    pub fn prefix(&self, start: u64, len: usize) -> Result<Vec<u8>> {
        (0..len as u64).map(|k| self.term(start + k)).collect()
    }
}

/// Constant sequence over `d`-decimations.
pub fn constant(d: usize, c: u8) -> SequenceSystem {
    SequenceSystem::new(d, vec![vec![0; d]], vec![Some(c)], 0).expect("valid system")
}

/// Thue–Morse sequence: digit sum mod 2.
pub fn thue_morse() -> SequenceSystem {
    SequenceSystem::new(2, vec![vec![0, 1], vec![1, 0]], vec![Some(0), Some(1)], 0).expect("valid system")
}

/// Toeplitz sequence `n ↦ alpha[ν_p(n)]` for `n ≥ 1`.
pub fn toeplitz_from_alpha(pre: &[u8], period: &[u8], p: usize) -> Result<SequenceSystem> {
    if period.is_empty() {
        return Err(Error::EmptyPeriod);
    }
    if p < 2 {
        return Err(Error::Dimension("decimation arity must be at least 2".into()));
    }
    let alpha: Vec<u8> = pre.iter().chain(period).copied().collect();
    let k = alpha.len();
    let mut letters: Vec<u8> = alpha.clone();
    letters.sort_unstable();
    letters.dedup();
    let konst = |c: u8| k + letters.binary_search(&c).expect("letter present");
    let mut step = Vec::new();
    let mut head = Vec::new();
    for j in 0..k {
        let next = if j + 1 < k { j + 1 } else { pre.len() };
        let mut row = vec![konst(alpha[j]); p];
        row[0] = next;
        step.push(row);
        head.push(None);
    }
    for (i, &c) in letters.iter().enumerate() {
        step.push(vec![k + i; p]);
        head.push(Some(c));
    }
    SequenceSystem::new(p, step, head, 0)
}

/// The `d` decimations `(a_i, a_{i+d}, ..)` of a prefix, each truncated to `⌊L/d⌋`.
pub fn decimate<T: Clone>(seq: &[T], d: usize) -> Vec<Vec<T>> {
    let m = seq.len() / d;
    (0..d).map(|i| (0..m).map(|n| seq[n * d + i].clone()).collect()).collect()
}

/// Inverse of [`decimate`] on equal-length components.
pub fn interleave<T: Clone>(parts: &[Vec<T>]) -> Vec<T> {
    let m = parts.iter().map(Vec::len).min().unwrap_or(0);
    let mut out = Vec::with_capacity(m * parts.len());
    for n in 0..m {
        for part in parts {
            out.push(part[n].clone());
        }
    }
    out
}

/// Kernel of `n ↦ oracle(n)` by breadth-first decimation.
///
/// Two decimations are identified when their first `prefix_len` terms agree,
/// so the result is only as reliable as the prefix is separating.
pub fn kernel(
    oracle: impl Fn(u64) -> Option<u8>,
    d: usize,
    prefix_len: usize,
    cap: usize,
) -> Result<SequenceSystem> {
    if d < 2 {
        return Err(Error::Dimension("decimation arity must be at least 2".into()));
    }
    let fetch = |offset: u64, stride: u64| -> Result<Vec<Option<u8>>> {
        (0..prefix_len as u64)
            .map(|n| {
                let idx = stride
                    .checked_mul(n)
                    .and_then(|v| v.checked_add(offset))
                    .ok_or(Error::Overflow)?;
                Ok(oracle(idx))
            })
            .collect()
    };
    let mut by_prefix: HashMap<Vec<Option<u8>>, usize> = HashMap::new();
    let mut nodes: Vec<(u64, u64)> = Vec::new();
    let mut head = Vec::new();
    let mut queue = VecDeque::new();
    let root = fetch(0, 1)?;
    head.push(oracle(0));
    by_prefix.insert(root, 0);
    nodes.push((0, 1));
    queue.push_back(0);
    let mut step: Vec<Vec<usize>> = vec![Vec::new()];
    while let Some(s) = queue.pop_front() {
        let (offset, stride) = nodes[s];
        let next_stride = stride.checked_mul(d as u64).ok_or(Error::Overflow)?;
        for i in 0..d as u64 {
            let o = stride
                .checked_mul(i)
                .and_then(|v| v.checked_add(offset))
                .ok_or(Error::Overflow)?;
            let key = fetch(o, next_stride)?;
            let t = match by_prefix.get(&key) {
                Some(&t) => t,
                None => {
                    let t = nodes.len();
                    if t >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    by_prefix.insert(key, t);
                    nodes.push((o, next_stride));
                    head.push(oracle(o));
                    step.push(Vec::new());
                    queue.push_back(t);
                    t
                }
            };
            step[s].push(t);
        }
    }
    SequenceSystem::new(d, step, head, 0)
}

/// Prefix as CSV: one letter per line.
pub fn to_csv(prefix: &[u8]) -> String {
    prefix.iter().map(|x| format!("{x}\n")).collect()
}

/// Deterministic Moore machine; the output depends only on the state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MooreMachine {
    inputs: usize,
    trans: Vec<Vec<usize>>,
    out: Vec<Option<u8>>,
    initial: usize,
}

impl MooreMachine {
    pub fn new(inputs: usize, trans: Vec<Vec<usize>>, out: Vec<Option<u8>>, initial: usize) -> Result<MooreMachine> {
        let n = out.len();
        if trans.len() != n || initial >= n || trans.iter().any(|r| r.len() != inputs || r.iter().any(|&q| q >= n)) {
            return Err(Error::Dimension("transition is not total".into()));
        }
        Ok(MooreMachine {
            inputs,
            trans,
            out,
            initial,
        })
    }

    pub fn num_states(&self) -> usize {
        self.out.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn transition(&self, q: usize, x: u8) -> usize {
        self.trans[q][x as usize]
    }

    pub fn output(&self, q: usize) -> Option<u8> {
        self.out[q]
    }

    /// Outputs `τ(q_1) .. τ(q_n)` of the states visited after each letter.
    pub fn run(&self, w: &[u8]) -> Result<Vec<u8>> {
        let mut q = self.initial;
        let mut res = Vec::with_capacity(w.len());
        for &x in w {
            if x as usize >= self.inputs {
                return Err(Error::LetterOutOfRange {
                    letter: x as usize,
                    d: self.inputs,
                });
            }
            q = self.trans[q][x as usize];
            res.push(self.out[q].expect("only the initial state has no output"));
        }
        Ok(res)
    }
}

/// Moore machine on `Q × X ∪ {p_0}` computing the same word function.
pub fn mealy_to_moore(m: &MealyMachine, initial: usize) -> Result<MooreMachine> {
    let d = m.degree();
    let n = m.num_states();
    if initial >= n {
        return Err(Error::IndexOutOfRange { index: initial as u64, bound: n as u64 });
    }
    let pair = |q: usize, y: u8| q * d + y as usize;
    let p0 = n * d;
    let mut trans = vec![Vec::with_capacity(d); n * d + 1];
    let mut out = vec![None; n * d + 1];
    for q in 0..n {
        for y in 0..d as u8 {
            out[pair(q, y)] = Some(y);
            for x in 0..d as u8 {
                trans[pair(q, y)].push(pair(m.next(q, x), m.output(q, x)));
            }
        }
    }
    for x in 0..d as u8 {
        trans[p0].push(pair(m.next(initial, x), m.output(initial, x)));
    }
    MooreMachine::new(d, trans, out, p0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mealy::bundled;
    use proptest::prelude::*;

    fn all_words(d: usize, len: usize) -> Vec<Vec<u8>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..d as u8).map(move |x| {
                        let mut v = w.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn thue_morse_terms() {
        let t = thue_morse();
        assert_eq!(t.prefix(0, 8).unwrap(), vec![0, 1, 1, 0, 1, 0, 0, 1]);
        assert_eq!(t.term(1 << 10).unwrap(), 1);
        for n in 0..2048u64 {
            assert_eq!(t.term(n).unwrap() as u32, n.count_ones() % 2);
        }
        assert_eq!(constant(3, 0).term(12345).unwrap(), 0);
    }

    #[test]
    fn decimations() {
        assert_eq!(decimate(&[0, 1, 2, 3, 4, 5], 2), vec![vec![0, 2, 4], vec![1, 3, 5]]);
        let t = thue_morse().prefix(0, 128).unwrap();
        let parts = decimate(&t, 2);
        assert_eq!(parts[0], t[..64]);
        assert!(parts[1].iter().zip(&t).all(|(a, b)| a + b == 1));
        let c = vec![7u8; 10];
        assert!(decimate(&c, 2).iter().all(|p| p.iter().all(|&x| x == 7)));
    }

    #[test]
    fn step_consistency() {
        let systems = [
            thue_morse(),
            constant(2, 1),
            toeplitz_from_alpha(&[0], &[1, 1, 0], 2).unwrap(),
            toeplitz_from_alpha(&[1, 2], &[0, 1], 3).unwrap(),
        ];
        for sys in &systems {
            for i in 0..sys.arity() {
                let child = sys.with_root(sys.step(sys.root(), i));
                for n in 0..512u64 {
                    let lhs = sys.term(n * sys.arity() as u64 + i as u64);
                    let rhs = child.term(n);
                    assert_eq!(lhs, rhs.map_err(|_| Error::UndefinedTerm(n * sys.arity() as u64 + i as u64)));
                }
            }
        }
    }

    #[test]
    fn toeplitz_examples() {
        let a = toeplitz_from_alpha(&[1], &[0], 2).unwrap();
        assert_eq!(a.prefix(1, 8).unwrap(), vec![1, 0, 1, 0, 1, 0, 1, 0]);
        assert_eq!(a.term(0), Err(Error::UndefinedTerm(0)));
        let b = toeplitz_from_alpha(&[0], &[1, 1, 0], 2).unwrap();
        for k in 0..4u32 {
            for m in 0..20u64 {
                let n = (2 * m + 1) << (3 * k);
                assert_eq!(b.term(n).unwrap(), 0);
                assert_eq!(b.term(n << 1).unwrap(), 1);
                assert_eq!(b.term(n << 2).unwrap(), 1);
            }
        }
        let z = toeplitz_from_alpha(&[], &[0], 5).unwrap();
        assert!(z.prefix(1, 200).unwrap().iter().all(|&x| x == 0));
        assert_eq!(toeplitz_from_alpha(&[1], &[], 2), Err(Error::EmptyPeriod));
    }

    #[test]
    fn kernels() {
        let t = thue_morse();
        let k = kernel(|n| Some(t.term(n).unwrap()), 2, 64, 16).unwrap();
        assert_eq!(k.num_symbols(), 2);
        for n in (1u64 << 10)..(1 << 10) + 101 {
            assert_eq!(k.term(n), t.term(n));
        }
        assert_eq!(kernel(|_| Some(3), 2, 16, 4).unwrap().num_symbols(), 1);
        let b = toeplitz_from_alpha(&[0], &[1, 1, 0], 2).unwrap();
        let kb = kernel(|n| b.term(n).ok(), 2, 64, 16).unwrap();
        assert_eq!(kb.num_symbols(), 5);
        assert_eq!(kb.term(0), Err(Error::UndefinedTerm(0)));
        assert_eq!(
            kernel(|n| Some((n as f64).sqrt().fract().eq(&0.0) as u8), 2, 32, 6),
            Err(Error::CapExceeded(6))
        );
    }

    #[test]
    fn mealy_to_moore_word_function() {
        let am = bundled::adding_machine();
        let (m, idx) = am.generator_machine().unwrap();
        let moore = mealy_to_moore(&m, idx[0]).unwrap();
        assert_eq!(moore.num_states(), m.num_states() * 2 + 1);
        let g = bundled::grigorchuk();
        let (gm, gidx) = g.generator_machine().unwrap();
        let gmoore = mealy_to_moore(&gm, gidx[1]).unwrap();
        for len in 0..=8 {
            for w in all_words(2, len) {
                assert_eq!(moore.run(&w).unwrap(), m.run(idx[0], &w).unwrap());
                assert_eq!(gmoore.run(&w).unwrap(), gm.run(gidx[1], &w).unwrap());
            }
        }
        let id = MealyMachine::new(2, vec!["e".into()], vec![vec![0, 0]], vec![vec![0, 1]]).unwrap();
        let echo = mealy_to_moore(&id, 0).unwrap();
        assert_eq!(echo.run(&[1, 0, 1, 1]).unwrap(), vec![1, 0, 1, 1]);
    }

    #[test]
    fn csv_export() {
        assert_eq!(to_csv(&[0, 1, 1]), "0\n1\n1\n");
    }

    proptest! {
        #[test]
        fn interleave_inverts_decimate(seq in prop::collection::vec(0u8..5, 0..60), d in 2usize..5) {
            let m = seq.len() / d * d;
            prop_assert_eq!(interleave(&decimate(&seq, d)), seq[..m].to_vec());
        }
    }
}
