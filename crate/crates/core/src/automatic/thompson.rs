//! Higman–Thompson elements and the partial maps `ψ_{u,v}`.

use super::{shift_operators, AutoMatrix};
use crate::error::{Error, Result};
use crate::mealy::{Element, Group, StateId};
use crate::recursion::MarkedBasis;
use std::collections::{BTreeSet, HashSet, VecDeque};

type Word = Vec<u8>;

/// Element of `V_d`: `v_i w ↦ u_i w` for complete prefix codes `{v_i}` and `{u_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThompsonElement {
    d: usize,
    pairs: Vec<(Word, Word)>,
}

fn check_code(d: usize, code: &[Word]) -> Result<()> {
    for w in code {
        if w.iter().any(|&x| x as usize >= d) {
            return Err(Error::InvalidPrefixCode(format!("letter out of range in {w:?}")));
        }
    }
    for (i, a) in code.iter().enumerate() {
        for b in &code[i + 1..] {
            if a.starts_with(b) || b.starts_with(a) {
                return Err(Error::InvalidPrefixCode(format!("{a:?} and {b:?} are not prefix-free")));
            }
        }
    }
    let depth = code.iter().map(Vec::len).max().unwrap_or(0) as u32;
    let total: u128 = code.iter().map(|w| (d as u128).pow(depth - w.len() as u32)).sum();
    if total != (d as u128).pow(depth) {
        return Err(Error::InvalidPrefixCode("code does not cover every infinite word".into()));
    }
    Ok(())
}

/// Merges complete sibling sets `(a x ↦ b x)_{x ∈ X}` into `a ↦ b` and sorts.
fn reduce_pairs(d: usize, pairs: Vec<(Word, Word)>) -> Vec<(Word, Word)> {
    let mut set: BTreeSet<(Word, Word)> = pairs.into_iter().collect();
    loop {
        let mut merged = None;
        for (a, b) in &set {
            let (Some(&x), Some(&y)) = (a.last(), b.last()) else {
                continue;
            };
            if x != 0 || y != 0 {
                continue;
            }
            let (pa, pb) = (&a[..a.len() - 1], &b[..b.len() - 1]);
            let all = (0..d as u8).all(|z| {
                let mut aa = pa.to_vec();
                aa.push(z);
                let mut bb = pb.to_vec();
                bb.push(z);
                set.contains(&(aa, bb))
            });
            if all {
                merged = Some((pa.to_vec(), pb.to_vec()));
                break;
            }
        }
        match merged {
            Some((pa, pb)) => {
                for z in 0..d as u8 {
                    let mut aa = pa.clone();
                    aa.push(z);
                    let mut bb = pb.clone();
                    bb.push(z);
                    set.remove(&(aa, bb));
                }
                set.insert((pa, pb));
            }
            None => return set.into_iter().collect(),
        }
    }
}

impl ThompsonElement {
    /// `domain[i] w ↦ range[i] w`.
    pub fn new(d: usize, domain: Vec<Word>, range: Vec<Word>) -> Result<ThompsonElement> {
        if domain.len() != range.len() {
            return Err(Error::InvalidPrefixCode(format!(
                "codes of sizes {} and {}",
                domain.len(),
                range.len()
            )));
        }
        check_code(d, &domain)?;
        check_code(d, &range)?;
        Ok(ThompsonElement {
            d,
            pairs: reduce_pairs(d, domain.into_iter().zip(range).collect()),
        })
    }

    pub fn identity(d: usize) -> ThompsonElement {
        ThompsonElement {
            d,
            pairs: vec![(Vec::new(), Vec::new())],
        }
    }

    pub fn arity(&self) -> usize {
        self.d
    }

    /// Reduced pairs `(v_i, u_i)`, sorted by domain word.
    pub fn pairs(&self) -> &[(Word, Word)] {
        &self.pairs
    }

    /// Image of a word long enough to pass the domain code.
    pub fn apply(&self, w: &[u8]) -> Option<Word> {
        self.pairs.iter().find(|(v, _)| w.starts_with(v)).map(|(v, u)| {
            let mut out = u.clone();
            out.extend_from_slice(&w[v.len()..]);
            out
        })
    }

    pub fn inverse(&self) -> ThompsonElement {
        ThompsonElement {
            d: self.d,
            pairs: reduce_pairs(self.d, self.pairs.iter().map(|(v, u)| (u.clone(), v.clone())).collect()),
        }
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &ThompsonElement) -> Result<ThompsonElement> {
        if self.d != other.d {
            return Err(Error::Dimension(format!("arities {} and {}", self.d, other.d)));
        }
        let mut pairs = Vec::new();
        for (v, u) in &other.pairs {
            for (v2, u2) in &self.pairs {
                if v2.starts_with(u) {
                    let mut dom = v.clone();
                    dom.extend_from_slice(&v2[u.len()..]);
                    pairs.push((dom, u2.clone()));
                } else if u.starts_with(v2) {
                    let mut rng = u2.clone();
                    rng.extend_from_slice(&u[v2.len()..]);
                    pairs.push((v.clone(), rng));
                }
            }
        }
        Ok(ThompsonElement {
            d: self.d,
            pairs: reduce_pairs(self.d, pairs),
        })
    }

    /// `L_ψ = Σ T_{u_i} T'_{v_i}` in the basis `B`.
    pub fn operator(&self, basis: &MarkedBasis) -> Result<AutoMatrix> {
        if basis.size() != self.d {
            return Err(Error::Dimension(format!("basis of size {} for arity {}", basis.size(), self.d)));
        }
        let field = basis.field();
        let (ts, tps) = shift_operators(basis);
        let id = AutoMatrix::identity(field, self.d);
        let mut acc = AutoMatrix::zero(field, self.d);
        for (v, u) in &self.pairs {
            let mut term = id.clone();
            for &x in u {
                term = term.mul(&ts[x as usize])?;
            }
            for &x in v.iter().rev() {
                term = term.mul(&tps[x as usize])?;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

/// Partial map `w ↦ w'` of infinite words, up to equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PartialPrefixMap {
    Empty,
    /// A state of a finite-state tree automorphism.
    Automorphism(StateId),
    /// Reduced pairs `(a_i, b_i)`: `a_i w ↦ b_i w`, defined on the cylinders `a_i X^ω`.
    Pieces(Vec<(Word, Word)>),
}

/// `{ψ_{u,v} : |u| = |v|}` for a finite-state automorphism: `g|_v` when `g(v) = u`, empty otherwise.
pub fn psi_closure_automorphism(group: &Group, g: &Element, cap: usize) -> Result<Vec<PartialPrefixMap>> {
    let id = group.canonical(g)?;
    let d = group.degree();
    let mut seen: HashSet<PartialPrefixMap> = HashSet::new();
    let mut order = vec![PartialPrefixMap::Automorphism(id)];
    seen.insert(order[0].clone());
    let mut i = 0;
    while i < order.len() {
        let mut next = Vec::new();
        match &order[i] {
            PartialPrefixMap::Automorphism(q) => {
                let perm = group.perm_of(*q);
                let secs = group.sections_of(*q);
                for x in 0..d {
                    for y in 0..d {
                        next.push(if perm[y] as usize == x {
                            PartialPrefixMap::Automorphism(secs[y])
                        } else {
                            PartialPrefixMap::Empty
                        });
                    }
                }
            }
            _ => next.push(PartialPrefixMap::Empty),
        }
        for m in next {
            if seen.insert(m.clone()) {
                if order.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                order.push(m);
            }
        }
        i += 1;
    }
    Ok(order)
}

/// `φ_{x,y}`: `w ↦ w'` where `φ(y w) = x w'`.
fn restrict(pairs: &[(Word, Word)], x: u8, y: u8) -> Vec<(Word, Word)> {
    let mut out = Vec::new();
    for (v, u) in pairs {
        match (v.split_first(), u.split_first()) {
            (None, Some((&u0, rest))) => {
                if u0 == x {
                    let mut b = rest.to_vec();
                    b.push(y);
                    out.push((Vec::new(), b));
                }
            }
            (None, None) => {
                if x == y {
                    out.push((Vec::new(), Vec::new()));
                }
            }
            (Some((&v0, vrest)), Some((&u0, urest))) => {
                if v0 == y && u0 == x {
                    out.push((vrest.to_vec(), urest.to_vec()));
                }
            }
            (Some((&v0, vrest)), None) => {
                if v0 == y {
                    let mut a = vrest.to_vec();
                    a.push(x);
                    out.push((a, Vec::new()));
                }
            }
        }
    }
    out
}

/// `{ψ_{u,v} : |u| = |v|}` for a Thompson element; finite exactly when it is synchronously automatic.
pub fn psi_closure_thompson(t: &ThompsonElement, cap: usize) -> Result<Vec<PartialPrefixMap>> {
    let d = t.d;
    let wrap = |pairs: Vec<(Word, Word)>| {
        if pairs.is_empty() {
            PartialPrefixMap::Empty
        } else {
            PartialPrefixMap::Pieces(reduce_pairs(d, pairs))
        }
    };
    let root = wrap(t.pairs.clone());
    let mut seen: HashSet<PartialPrefixMap> = HashSet::new();
    seen.insert(root.clone());
    let mut queue = VecDeque::from([root.clone()]);
    let mut order = vec![root];
    while let Some(m) = queue.pop_front() {
        let pairs = match &m {
            PartialPrefixMap::Pieces(p) => p.clone(),
            _ => Vec::new(),
        };
        for x in 0..d as u8 {
            for y in 0..d as u8 {
                let r = wrap(restrict(&pairs, x, y));
                if seen.insert(r.clone()) {
                    if order.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    order.push(r.clone());
                    queue.push_back(r);
                }
            }
        }
    }
    Ok(order)
}
