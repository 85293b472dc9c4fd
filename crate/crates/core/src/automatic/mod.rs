//! Column-finite `d`-automatic matrices as finite decimation-closed symbol systems.
//!
//! The `(i, j)` decimation of `A` is `A_ij[r][s] = A[i + d·r][j + d·s]`.

mod thompson;

pub use thompson::{psi_closure_automorphism, psi_closure_thompson, PartialPrefixMap, ThompsonElement};

use crate::error::{Error, Result};
use crate::fp::{Field, FpMatrix};
use crate::mealy::Group;
use crate::recursion::{xi_in_basis, GroupRingElem, MarkedBasis};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::Hash;

/// Default bound on the number of symbols explored by a closure.
pub const DEFAULT_SYMBOL_CAP: usize = 100_000;

/// Minimal automaton of an infinite matrix over `F_p`.
///
/// Symbols are numbered breadth-first from the root (symbol 0), so two
/// values are equal exactly when they denote the same matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AutoMatrix {
    field: Field,
    d: usize,
    corner: Vec<u8>,
    dec: Vec<Vec<u32>>,
}

impl AutoMatrix {
    /// Closure of `root` under `dec`, minimized.
    pub fn build<K, C, D>(field: Field, d: usize, root: K, cap: usize, mut corner: C, mut dec: D) -> Result<AutoMatrix>
    where
        K: Hash + Eq + Clone,
        C: FnMut(&K) -> Result<u8>,
        D: FnMut(&K) -> Result<Vec<K>>,
    {
        let mut index: HashMap<K, u32> = HashMap::new();
        let mut keys = vec![root.clone()];
        index.insert(root, 0);
        let mut corners = Vec::new();
        let mut decs = Vec::new();
        let mut i = 0;
        while i < keys.len() {
            let key = keys[i].clone();
            corners.push(corner(&key)? % field.p());
            let children = dec(&key)?;
            if children.len() != d * d {
                return Err(Error::Dimension(format!("decimation must have {} entries", d * d)));
            }
            let mut row = Vec::with_capacity(d * d);
            for child in children {
                let id = match index.get(&child) {
                    Some(&id) => id,
                    None => {
                        if keys.len() >= cap {
                            return Err(Error::CapExceeded(cap));
                        }
                        let id = keys.len() as u32;
                        index.insert(child.clone(), id);
                        keys.push(child);
                        id
                    }
                };
                row.push(id);
            }
            decs.push(row);
            i += 1;
        }
        Ok(AutoMatrix::minimized(field, d, corners, decs, 0))
    }

    fn minimized(field: Field, d: usize, corner: Vec<u8>, dec: Vec<Vec<u32>>, root: u32) -> AutoMatrix {
        let n = corner.len();
        let mut class: Vec<u32> = corner.iter().map(|&c| c as u32).collect();
        let mut count = renumber(&mut class);
        loop {
            let mut sigs: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next = vec![0u32; n];
            for s in 0..n {
                let mut sig = Vec::with_capacity(d * d + 1);
                sig.push(class[s]);
                sig.extend(dec[s].iter().map(|&t| class[t as usize]));
                let fresh = sigs.len() as u32;
                next[s] = *sigs.entry(sig).or_insert(fresh);
            }
            let new_count = sigs.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // breadth-first renumbering of the quotient from the root
        let mut order: Vec<u32> = Vec::new();
        let mut label: HashMap<u32, u32> = HashMap::new();
        let mut rep: HashMap<u32, usize> = HashMap::new();
        for s in 0..n {
            rep.entry(class[s]).or_insert(s);
        }
        label.insert(class[root as usize], 0);
        order.push(class[root as usize]);
        let mut i = 0;
        let mut new_dec = Vec::new();
        let mut new_corner = Vec::new();
        while i < order.len() {
            let s = rep[&order[i]];
            new_corner.push(corner[s]);
            let mut row = Vec::with_capacity(d * d);
            for &t in &dec[s] {
                let c = class[t as usize];
                let next = label.len() as u32;
                let id = *label.entry(c).or_insert_with(|| {
                    order.push(c);
                    next
                });
                row.push(id);
            }
            new_dec.push(row);
            i += 1;
        }
        AutoMatrix {
            field,
            d,
            corner: new_corner,
            dec: new_dec,
        }
    }

    pub fn zero(field: Field, d: usize) -> AutoMatrix {
        AutoMatrix {
            field,
            d,
            corner: vec![0],
            dec: vec![vec![0; d * d]],
        }
    }

    pub fn identity(field: Field, d: usize) -> AutoMatrix {
        AutoMatrix::build(field, d, true, 2, |&one| Ok(one as u8), |&one| {
            Ok((0..d * d).map(|k| one && k / d == k % d).collect())
        })
        .expect("two symbols")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn arity(&self) -> usize {
        self.d
    }

    pub fn num_symbols(&self) -> usize {
        self.corner.len()
    }

    pub fn corner(&self, s: usize) -> u8 {
        self.corner[s]
    }

    /// Symbol of the `(i, j)` decimation of symbol `s`.
    pub fn dec(&self, s: usize, i: usize, j: usize) -> usize {
        self.dec[s][i * self.d + j] as usize
    }

    /// The matrix denoted by symbol `s`.
    pub fn rooted_at(&self, s: usize) -> AutoMatrix {
        AutoMatrix::minimized(self.field, self.d, self.corner.clone(), self.dec.clone(), s as u32)
    }

    pub fn entry(&self, m: u64, n: u64) -> u8 {
        let d = self.d as u64;
        let (mut m, mut n) = (m, n);
        let mut s = 0usize;
        while m > 0 || n > 0 {
            s = self.dec[s][((m % d) * d + n % d) as usize] as usize;
            m /= d;
            n /= d;
        }
        self.corner[s]
    }

    pub fn truncate(&self, rows: usize, cols: usize) -> FpMatrix {
        FpMatrix::from_fn(self.field, rows, cols, |i, j| self.entry(i as u64, j as u64))
    }

    /// Square truncation of size `d^levels` assembled from decimations only.
    pub fn block(&self, levels: usize) -> FpMatrix {
        self.block_of(0, levels)
    }

    fn block_of(&self, s: usize, levels: usize) -> FpMatrix {
        if levels == 0 {
            return FpMatrix::from_fn(self.field, 1, 1, |_, _| self.corner[s]);
        }
        let d = self.d;
        let size = d.pow(levels as u32);
        let subs: Vec<FpMatrix> = self.dec[s].iter().map(|&t| self.block_of(t as usize, levels - 1)).collect();
        FpMatrix::from_fn(self.field, size, size, |r, c| subs[(r % d) * d + c % d].get(r / d, c / d))
    }

    /// The `d × d` decimations, row-major.
    pub fn decimations(&self) -> Vec<AutoMatrix> {
        self.dec[0].iter().map(|&t| self.rooted_at(t as usize)).collect()
    }

    fn check(&self, other: &AutoMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.p(), other.field.p()));
        }
        if self.d != other.d {
            return Err(Error::Dimension(format!("arities {} and {}", self.d, other.d)));
        }
        Ok(())
    }

    pub fn add(&self, other: &AutoMatrix) -> Result<AutoMatrix> {
        self.check(other)?;
        let f = self.field;
        let d = self.d;
        AutoMatrix::build(
            f,
            d,
            (0usize, 0usize),
            DEFAULT_SYMBOL_CAP,
            |&(s, t)| Ok(f.add(self.corner[s], other.corner[t])),
            |&(s, t)| {
                Ok((0..d * d)
                    .map(|k| (self.dec[s][k] as usize, other.dec[t][k] as usize))
                    .collect())
            },
        )
    }

    pub fn scale(&self, c: u8) -> AutoMatrix {
        let f = self.field;
        if c.is_multiple_of(f.p()) {
            return AutoMatrix::zero(f, self.d);
        }
        AutoMatrix {
            corner: self.corner.iter().map(|&x| f.mul(x, c)).collect(),
            ..self.clone()
        }
    }

    pub fn transpose(&self) -> AutoMatrix {
        let d = self.d;
        let dec = self
            .dec
            .iter()
            .map(|row| (0..d * d).map(|k| row[(k % d) * d + k / d]).collect())
            .collect();
        AutoMatrix::minimized(self.field, d, self.corner.clone(), dec, 0)
    }

    /// `s` denotes a matrix whose column 0 vanishes below row 0 (`rows = false`),
    /// or whose row 0 vanishes right of column 0 (`rows = true`).
    fn zero_tail(&self, rows: bool) -> Vec<bool> {
        let d = self.d;
        let n = self.num_symbols();
        let mut ok = vec![true; n];
        loop {
            let mut changed = false;
            for s in 0..n {
                if !ok[s] {
                    continue;
                }
                let at = |k: usize| if rows { self.dec[s][k] } else { self.dec[s][k * d] } as usize;
                let good = ok[at(0)] && (1..d).all(|k| self.corner[at(k)] == 0 && ok[at(k)]);
                if !good {
                    ok[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return ok;
            }
        }
    }

    /// Product; requires `other` to be column-finite.
    pub fn mul(&self, other: &AutoMatrix) -> Result<AutoMatrix> {
        self.check(other)?;
        let f = self.field;
        let d = self.d;
        let col_zero = other.zero_tail(false);
        let row_zero = self.zero_tail(true);
        let mut memo: HashMap<(usize, usize), u8> = HashMap::new();
        let mut corner_of = |combo: &Vec<((usize, usize), u8)>| -> Result<u8> {
            let mut acc = 0;
            for &((s, t), c) in combo {
                let mut active = HashSet::new();
                let r = self.tail_product(other, s, t, &col_zero, &row_zero, &mut memo, &mut active)?;
                let v = f.add(f.mul(self.corner[s], other.corner[t]), r);
                acc = f.add(acc, f.mul(c, v));
            }
            Ok(acc)
        };
        let root = vec![((0usize, 0usize), 1u8)];
        AutoMatrix::build(
            f,
            d,
            root,
            DEFAULT_SYMBOL_CAP,
            |combo| corner_of(combo),
            |combo| {
                let mut out = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        let mut acc: BTreeMap<(usize, usize), u8> = BTreeMap::new();
                        for &((s, t), c) in combo {
                            for k in 0..d {
                                let pair = (self.dec[s][i * d + k] as usize, other.dec[t][k * d + j] as usize);
                                let slot = acc.entry(pair).or_insert(0);
                                *slot = f.add(*slot, c);
                            }
                        }
                        out.push(acc.into_iter().filter(|&(_, c)| c != 0).collect());
                    }
                }
                Ok(out)
            },
        )
    }

    /// `Σ_{k ≥ 1} A_s[0][k]·B_t[k][0]`.
    #[allow(clippy::too_many_arguments)]
    fn tail_product(
        &self,
        other: &AutoMatrix,
        s: usize,
        t: usize,
        col_zero: &[bool],
        row_zero: &[bool],
        memo: &mut HashMap<(usize, usize), u8>,
        active: &mut HashSet<(usize, usize)>,
    ) -> Result<u8> {
        if col_zero[t] || row_zero[s] {
            return Ok(0);
        }
        if let Some(&v) = memo.get(&(s, t)) {
            return Ok(v);
        }
        if !active.insert((s, t)) {
            return Err(Error::NotColumnFinite);
        }
        let f = self.field;
        let d = self.d;
        let mut acc = 0;
        for k in 1..d {
            let a = self.dec[s][k] as usize;
            let b = other.dec[t][k * d] as usize;
            acc = f.add(acc, f.mul(self.corner[a], other.corner[b]));
            let r = self.tail_product(other, a, b, col_zero, row_zero, memo, active)?;
            acc = f.add(acc, r);
        }
        let r = self.tail_product(other, self.dec[s][0] as usize, other.dec[t][0] as usize, col_zero, row_zero, memo, active)?;
        acc = f.add(acc, r);
        active.remove(&(s, t));
        memo.insert((s, t), acc);
        Ok(acc)
    }
}

fn renumber(class: &mut [u32]) -> usize {
    let mut map: HashMap<u32, u32> = HashMap::new();
    for c in class.iter_mut() {
        let next = map.len() as u32;
        *c = *map.entry(*c).or_insert(next);
    }
    map.len()
}

/// Linear span closure of `a` under the basis-`B` matrix recursion.
pub fn group_ring_closure(group: &Group, a: &GroupRingElem, basis: &MarkedBasis, cap: usize) -> Result<Vec<GroupRingElem>> {
    let mut seen: HashSet<GroupRingElem> = HashSet::new();
    let mut order = vec![a.clone()];
    seen.insert(a.clone());
    let mut i = 0;
    while i < order.len() {
        let m = xi_in_basis(group, &order[i], basis)?;
        for r in 0..m.size() {
            for c in 0..m.size() {
                let e = m.get(r, c);
                if !seen.contains(e) {
                    if order.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    seen.insert(e.clone());
                    order.push(e.clone());
                }
            }
        }
        i += 1;
    }
    Ok(order)
}

/// Automatic matrix of `π(a)` in the marked basis `B`.
pub fn from_group_ring(group: &Group, a: &GroupRingElem, basis: &MarkedBasis, cap: usize) -> Result<AutoMatrix> {
    if !basis.is_marked() {
        return Err(Error::NotMarked);
    }
    let d = group.degree();
    AutoMatrix::build(
        basis.field(),
        d,
        a.clone(),
        cap,
        |e| Ok(e.augmentation()),
        |e| {
            let m = xi_in_basis(group, e, basis)?;
            Ok((0..d * d).map(|k| m.get(k / d, k % d).clone()).collect())
        },
    )
}

/// Infinite matrix with entries `(k + d·m, m) = c_k` (`transposed = false`)
/// or `(m, k + d·m) = c_k` (`transposed = true`).
pub fn repeated_pattern(field: Field, c: &[u8], transposed: bool) -> AutoMatrix {
    let d = c.len();
    let m = AutoMatrix::build(
        field,
        d,
        c.to_vec(),
        DEFAULT_SYMBOL_CAP,
        |c| Ok(c[0]),
        |c| {
            let mut out = Vec::with_capacity(d * d);
            for i in 0..d {
                for j in 0..d {
                    let mut e = vec![0u8; d];
                    e[j] = c[i];
                    out.push(e);
                }
            }
            Ok(out)
        },
    )
    .expect("finitely many patterns");
    if transposed {
        m.transpose()
    } else {
        m
    }
}

/// `(T_x, T'_x)` for `x ∈ X`: prefixing by `δ_x` and evaluating the first variable at `x`.
pub fn shift_operators(basis: &MarkedBasis) -> (Vec<AutoMatrix>, Vec<AutoMatrix>) {
    let f = basis.field();
    let d = basis.size();
    let t = basis.transition();
    let tinv = basis.inverse_transition();
    let ts = (0..d)
        .map(|x| repeated_pattern(f, &tinv.column(x), false))
        .collect();
    let tps = (0..d)
        .map(|x| repeated_pattern(f, t.row(x), true))
        .collect();
    (ts, tps)
}

/// Selection matrices `E_i` and their transposes `E_i'`.
pub fn selection_operators(field: Field) -> (Vec<AutoMatrix>, Vec<AutoMatrix>) {
    let d = field.p() as usize;
    let unit = |i: usize| (0..d).map(|k| (k == i) as u8).collect::<Vec<u8>>();
    (
        (0..d).map(|i| repeated_pattern(field, &unit(i), false)).collect(),
        (0..d).map(|i| repeated_pattern(field, &unit(i), true)).collect(),
    )
}
