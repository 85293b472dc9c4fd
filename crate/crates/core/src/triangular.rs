//! The Kaloujnine group `K_p`: tableaux, abelianization, diagonals and heights.

use crate::error::{Error, Result};
use crate::fp::{Field, ReducedPoly};
use crate::mealy::{cycle_exponent, Element, Group, StateId};
use crate::recursion::{level_matrix, GroupRingElem, MarkedBasis};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

/// Tableau `[f_0, f_1(x_1), .., f_{n-1}(x_1, .., x_{n-1})]`.
///
/// The element acts by `x_{k+1} ↦ x_{k+1} + f_k(x_1, .., x_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    field: Field,
    polys: Vec<ReducedPoly>,
}

impl Tableau {
    pub fn new(field: Field, polys: Vec<ReducedPoly>) -> Result<Tableau> {
        for (k, f) in polys.iter().enumerate() {
            if f.field() != field {
                return Err(Error::ModulusMismatch(f.field().p(), field.p()));
            }
            if f.nvars() > k {
                return Err(Error::Dimension(format!("f{k} has more than {k} variables")));
            }
        }
        let polys = polys.iter().enumerate().map(|(k, f)| f.embed(k)).collect();
        Ok(Tableau { field, polys })
    }

    pub fn identity(field: Field, depth: usize) -> Tableau {
        Tableau {
            field,
            polys: (0..depth).map(|k| ReducedPoly::zero(field, k)).collect(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn depth(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[ReducedPoly] {
        &self.polys
    }

    pub fn act(&self, w: &[u8]) -> Vec<u8> {
        let f = self.field;
        w.iter()
            .enumerate()
            .map(|(k, &x)| f.add(x, self.polys[k].eval(&w[..k])))
            .collect()
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, poly) in self.polys.iter().enumerate() {
            writeln!(f, "f{k} = {poly}")?;
        }
        Ok(())
    }
}

/// Tableau of `g` to depth `n`, interpolating the σ-exponents of its portrait.
pub fn tableau_of(group: &Group, g: &Element, n: usize) -> Result<Tableau> {
    let field = Field::new(group.degree() as u64)?;
    let portrait = group.portrait(g, n);
    let mut polys = Vec::with_capacity(n);
    for k in 0..n {
        let values: Vec<u8> = portrait
            .level(k)
            .iter()
            .map(|perm| cycle_exponent(perm).ok_or(Error::NotInKp))
            .collect::<Result<_>>()?;
        polys.push(ReducedPoly::interpolate(field, k, &values)?);
    }
    Ok(Tableau { field, polys })
}

/// Tableau of `s·t`, where `t` acts first.
pub fn tableau_mul(s: &Tableau, t: &Tableau) -> Result<Tableau> {
    if s.field != t.field {
        return Err(Error::ModulusMismatch(s.field.p(), t.field.p()));
    }
    if s.depth() != t.depth() {
        return Err(Error::Dimension(format!("depths {} and {}", s.depth(), t.depth())));
    }
    let f = s.field;
    let mut polys = Vec::with_capacity(s.depth());
    for k in 0..s.depth() {
        let shifted: Vec<ReducedPoly> = (0..k)
            .map(|i| ReducedPoly::var(f, k, i).add(&t.polys[i].embed(k)))
            .collect::<Result<_>>()?;
        let moved = if k == 0 {
            s.polys[0].clone()
        } else {
            s.polys[k].substitute(&shifted)?.embed(k)
        };
        polys.push(t.polys[k].add(&moved)?);
    }
    Ok(Tableau { field: f, polys })
}

/// Eventually periodic sequence over `F_p`, kept with minimal preperiod and period.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlphaSequence {
    field: Field,
    pre: Vec<u8>,
    period: Vec<u8>,
}

impl AlphaSequence {
    pub fn new(field: Field, pre: &[u8], period: &[u8]) -> Result<AlphaSequence> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        let p = field.p();
        let mut s = AlphaSequence {
            field,
            pre: pre.iter().map(|x| x % p).collect(),
            period: period.iter().map(|x| x % p).collect(),
        };
        s.canonicalize();
        Ok(s)
    }

    pub fn zero(field: Field) -> AlphaSequence {
        AlphaSequence {
            field,
            pre: Vec::new(),
            period: vec![0],
        }
    }

    fn canonicalize(&mut self) {
        let l = self.period.len();
        if let Some(q) = (1..=l).find(|&q| l.is_multiple_of(q) && (q..l).all(|i| self.period[i] == self.period[i - q])) {
            self.period.truncate(q);
        }
        while let Some(&last) = self.pre.last() {
            if last != *self.period.last().expect("nonempty period") {
                break;
            }
            self.pre.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.pre
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn get(&self, k: usize) -> u8 {
        if k < self.pre.len() {
            self.pre[k]
        } else {
            self.period[(k - self.pre.len()) % self.period.len()]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pre.is_empty() && self.period == [0]
    }

    pub fn add(&self, other: &AlphaSequence) -> Result<AlphaSequence> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.p(), other.field.p()));
        }
        let f = self.field;
        let pre_len = self.pre.len().max(other.pre.len());
        let per_len = lcm(self.period.len(), other.period.len());
        let sum = |k: usize| f.add(self.get(k), other.get(k));
        let pre: Vec<u8> = (0..pre_len).map(sum).collect();
        let period: Vec<u8> = (pre_len..pre_len + per_len).map(sum).collect();
        AlphaSequence::new(f, &pre, &period)
    }
}

impl fmt::Display for AlphaSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pre={:?} period={:?}", self.pre, self.period)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// `α(g)`: level sums of the σ-exponents of the portrait.
pub fn alpha(group: &Group, g: &Element) -> Result<AlphaSequence> {
    let field = Field::new(group.degree() as u64)?;
    let id = group.canonical(g)?;
    alpha_of_id(group, field, id)
}

fn alpha_of_id(group: &Group, field: Field, id: StateId) -> Result<AlphaSequence> {
    let states = group.closure_ids(id);
    let index: HashMap<StateId, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let exps: Vec<u8> = states
        .iter()
        .map(|&s| cycle_exponent(&group.perm_of(s)).ok_or(Error::NotInKp))
        .collect::<Result<_>>()?;
    let sections: Vec<Vec<usize>> = states
        .iter()
        .map(|&s| group.sections_of(s).iter().map(|t| index[t]).collect())
        .collect();
    let mut counts = vec![0u8; states.len()];
    counts[0] = 1;
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut values = Vec::new();
    loop {
        if let Some(&start) = seen.get(&counts) {
            return AlphaSequence::new(field, &values[..start], &values[start..]);
        }
        seen.insert(counts.clone(), values.len());
        values.push(
            counts
                .iter()
                .zip(&exps)
                .fold(0, |acc, (&c, &e)| field.add(acc, field.mul(c, e))),
        );
        let mut next = vec![0u8; states.len()];
        for (q, &c) in counts.iter().enumerate() {
            if c != 0 {
                for &t in &sections[q] {
                    next[t] = field.add(next[t], c);
                }
            }
        }
        counts = next;
    }
}

/// `p`-adic valuation of `n ≥ 1`.
pub fn valuation(n: u64, p: u64) -> usize {
    assert!(n > 0, "valuation of zero");
    let mut n = n;
    let mut k = 0;
    while n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

/// First diagonal `s_1, .., s_L` (1-based: `s_n` is entry `(n-1, n)`), via `s_n = α_{ν_p(n)}`.
pub fn first_diagonal(group: &Group, g: &Element, len: usize) -> Result<Vec<u8>> {
    let a = alpha(group, g)?;
    let p = group.degree() as u64;
    Ok((1..=len as u64).map(|n| a.get(valuation(n, p))).collect())
}

/// First diagonal read off a level matrix in the basis `basis`.
pub fn first_diagonal_oracle(group: &Group, g: &Element, len: usize, basis: &MarkedBasis) -> Result<Vec<u8>> {
    let p = group.degree();
    let mut n = 0;
    while p.pow(n as u32) < len + 1 {
        n += 1;
    }
    let a = GroupRingElem::from_element(group, basis.field(), g)?;
    let m = level_matrix(group, &a, n, basis)?;
    Ok((1..=len).map(|k| m.get(k - 1, k)).collect())
}

/// Columns `p^k` (`k < n`) of the level-`n` matrix in the monomial basis, above the diagonal.
///
/// Column `p^k` holds the coefficients of `u_k`, where `π(g) x_{k+1} = x_{k+1} + u_k`;
/// `u_k` is the level-`k` polynomial of the tableau of `g⁻¹`.
pub fn principal_columns(group: &Group, g: &Element, n: usize) -> Result<Vec<Vec<u8>>> {
    let t = tableau_of(group, &g.inverse(), n)?;
    Ok(t.polys().iter().map(ReducedPoly::coefficients).collect())
}

/// Column `j` of the level-`n` matrix in the monomial basis, from the principal columns.
pub fn reconstruct_column(field: Field, principal: &[Vec<u8>], j: usize, n: usize) -> Result<Vec<u8>> {
    let symbolic: Vec<Vec<ReducedPoly>> = principal
        .iter()
        .map(|col| col.iter().map(|&c| ReducedPoly::constant(field, 0, c)).collect())
        .collect();
    let col = reconstruct_column_symbolic(field, &symbolic, j, n)?;
    Ok(col.iter().map(|c| c.coefficient(&[])).collect())
}

/// As [`reconstruct_column`], with entries that are polynomials in shared symbolic variables.
///
/// `π(g)(e_j) = Π_i (x_i + u_{i-1})^{r_i}` for `j = Σ r_i p^(i-1)`.
pub fn reconstruct_column_symbolic(
    field: Field,
    principal: &[Vec<ReducedPoly>],
    j: usize,
    n: usize,
) -> Result<Vec<ReducedPoly>> {
    let p = field.p() as usize;
    let size = p.pow(n as u32);
    if j >= size {
        return Err(Error::IndexOutOfRange {
            index: j as u64,
            bound: size as u64,
        });
    }
    if principal.len() < n {
        return Err(Error::WrongLength {
            expected: n,
            got: principal.len(),
        });
    }
    let m = principal
        .iter()
        .flatten()
        .map(ReducedPoly::nvars)
        .max()
        .unwrap_or(0);
    let total = n + m;
    let lift: Vec<ReducedPoly> = (0..m).map(|i| ReducedPoly::var(field, total, n + i)).collect();
    let mut product = ReducedPoly::constant(field, total, 1);
    let mut r = j;
    for (k, col) in principal.iter().take(n).enumerate() {
        let digit = r % p;
        r /= p;
        if digit == 0 {
            continue;
        }
        if col.len() != p.pow(k as u32) {
            return Err(Error::WrongLength {
                expected: p.pow(k as u32),
                got: col.len(),
            });
        }
        let mut u = ReducedPoly::var(field, total, k);
        for (idx, c) in col.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coeff = c.embed(m).substitute(&lift)?.embed(total);
            let exps: Vec<u32> = crate::fp::poly::monomial_exponents(idx as u64, p, k)
                .into_iter()
                .map(u32::from)
                .chain(std::iter::repeat_n(0, total - k))
                .collect();
            u = u.add(&ReducedPoly::monomial(field, &exps, 1).mul(&coeff)?)?;
        }
        product = product.mul(&u.pow(digit as u32))?;
    }
    let mut out = vec![ReducedPoly::zero(field, m); size];
    for (exps, c) in product.terms() {
        let idx = crate::fp::poly::monomial_index(&exps[..n], p) as usize;
        let sym: Vec<u32> = exps[n..].iter().map(|&e| u32::from(e)).collect();
        out[idx] = out[idx].add(&ReducedPoly::monomial(field, &sym, c))?;
    }
    Ok(out)
}

/// `R_k(f) = Σ_x C(x, p-1-k) f(.., x)` on the last variable.
pub fn r_operator(f: &ReducedPoly, k: u8) -> ReducedPoly {
    let field = f.field();
    let p = field.p();
    let mut acc = ReducedPoly::zero(field, f.nvars().saturating_sub(1));
    for x in 0..p {
        let c = field.binomial(x as u64, (p - 1 - k) as u64);
        if c != 0 {
            acc = acc.add(&f.restrict_last(x).scale(c)).expect("same field");
        }
    }
    acc
}

/// `T_k(f) = Σ_x C(x, p-1-k) f(x, ..)` on the first variable.
pub fn t_operator(f: &ReducedPoly, k: u8) -> ReducedPoly {
    let field = f.field();
    let p = field.p();
    let mut acc = ReducedPoly::zero(field, f.nvars().saturating_sub(1));
    for x in 0..p {
        let c = field.binomial(x as u64, (p - 1 - k) as u64);
        if c != 0 {
            acc = acc.add(&f.restrict_first(x).scale(c)).expect("same field");
        }
    }
    acc
}

/// Height `γ(f) = max Σ k_i p^(i-1)` over the monomials of `f`; `γ(0) = -1`.
pub fn height_brute(f: &ReducedPoly) -> i64 {
    f.height()
}

/// Height through the digits `j_n, j_{n-1}, ..` read off `R_k` on the last variable.
pub fn height_rk(f: &ReducedPoly) -> i64 {
    if f.is_zero() {
        return -1;
    }
    let p = f.field().p();
    let mut g = f.clone();
    let mut gamma = 0i64;
    for _ in 0..f.nvars() {
        let (j, next) = (0..p)
            .rev()
            .map(|k| (k, r_operator(&g, k)))
            .find(|(_, r)| !r.is_zero())
            .expect("a nonzero polynomial has a nonzero R_k");
        gamma = gamma * p as i64 + j as i64;
        g = next;
    }
    gamma
}

/// Height through `γ(f) = j_1 + p·γ(h_{j_1})` with `h_k = T_k(f)` on the first variable.
pub fn height_t(f: &ReducedPoly) -> i64 {
    if f.is_zero() {
        return -1;
    }
    if f.nvars() == 0 {
        return 0;
    }
    let p = f.field().p();
    let hs: Vec<(u8, i64)> = (0..p).map(|k| (k, height_t(&t_operator(f, k)))).collect();
    let top = hs.iter().map(|&(_, h)| h).max().expect("p > 0");
    let j1 = hs.iter().filter(|&&(_, h)| h == top).map(|&(k, _)| k).max().expect("nonempty");
    j1 as i64 + p as i64 * top
}

/// Binary rule: `2·max(γ(f_0), γ(f_1)) + 1` if the heights differ, else `2·γ(f_0)`.
pub fn height_p2(f: &ReducedPoly) -> Result<i64> {
    if f.field().p() != 2 {
        return Err(Error::RequiresBinary(f.field().p()));
    }
    Ok(height_p2_rec(f))
}

fn height_p2_rec(f: &ReducedPoly) -> i64 {
    if f.is_zero() {
        return -1;
    }
    if f.nvars() == 0 {
        return 0;
    }
    let h0 = height_p2_rec(&f.restrict_first(0));
    let h1 = height_p2_rec(&f.restrict_first(1));
    if h0 != h1 {
        2 * h0.max(h1) + 1
    } else {
        2 * h0
    }
}

/// Outcome of the uniseriality criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Uniseriality {
    pub uniserial: bool,
    /// Levels `k < preperiod` are listed individually; later ones repeat with the period.
    pub preperiod: usize,
    /// Per level, the index of a generator with `α_k ≠ 0`.
    pub witnesses: Vec<Option<usize>>,
}

impl Uniseriality {
    pub fn witness(&self, k: usize) -> Option<usize> {
        let period = self.witnesses.len() - self.preperiod;
        let i = if k < self.preperiod {
            k
        } else {
            self.preperiod + (k - self.preperiod) % period
        };
        self.witnesses[i]
    }
}

/// Decides whether every `α_k` is nonzero on some generator.
pub fn is_uniserial(group: &Group, generators: &[Element]) -> Result<Uniseriality> {
    let alphas: Vec<AlphaSequence> = generators.iter().map(|g| alpha(group, g)).collect::<Result<_>>()?;
    let preperiod = alphas.iter().map(|a| a.preperiod().len()).max().unwrap_or(0);
    let period = alphas.iter().map(|a| a.period().len()).fold(1, lcm);
    let witnesses: Vec<Option<usize>> = (0..preperiod + period)
        .map(|k| alphas.iter().position(|a| a.get(k) != 0))
        .collect();
    Ok(Uniseriality {
        uniserial: witnesses.iter().all(Option::is_some),
        preperiod,
        witnesses,
    })
}

/// Checks in level-`n` matrices that `Σ_g (π(g) - 1) U_{k+1} = U_k` for all `k < p^n - 1`.
pub fn uniserial_direct(group: &Group, generators: &[Element], n: usize) -> Result<bool> {
    let p = group.degree();
    let basis = MarkedBasis::monomial(p as u64)?;
    let field = basis.field();
    let mats = generators
        .iter()
        .map(|g| {
            let a = GroupRingElem::from_element(group, field, g)?;
            let m = level_matrix(group, &a, n, &basis)?;
            if !m.is_upper_unitriangular() {
                return Err(Error::NotInKp);
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    let size = p.pow(n as u32);
    // pivots[i]: stored vector whose highest nonzero entry is at i, normalised to 1
    let mut pivots: Vec<Option<Vec<u8>>> = vec![None; size];
    let mut rank = 0;
    for j in 1..size {
        for m in &mats {
            let mut v: Vec<u8> = (0..j).map(|i| m.get(i, j)).collect();
            while let Some(top) = v.iter().rposition(|&x| x != 0) {
                match &pivots[top] {
                    Some(piv) => {
                        let c = field.neg(v[top]);
                        for (a, &b) in v.iter_mut().zip(piv) {
                            *a = field.add(*a, field.mul(c, b));
                        }
                    }
                    None => {
                        let s = field.inv(v[top]).expect("nonzero");
                        v.iter_mut().for_each(|a| *a = field.mul(*a, s));
                        pivots[top] = Some(v);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        if rank != j {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Order of the group generated by `σ` at the vertices `0^k`, `k < n`, acting on `X^n`.
pub fn sylow_order_check(p: usize, n: usize, cap: usize) -> Result<u64> {
    if !crate::fp::is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    let size = (p as u64)
        .checked_pow(n as u32)
        .filter(|&s| s <= crate::recursion::SIZE_GUARD)
        .ok_or(Error::SizeGuard(u64::MAX))? as usize;
    let gens: Vec<Vec<u32>> = (0..n)
        .map(|k| {
            let low = p.pow(k as u32);
            (0..size)
                .map(|v| {
                    if v % low == 0 {
                        let digit = (v / low) % p;
                        let bumped = (digit + 1) % p;
                        (v - digit * low + bumped * low) as u32
                    } else {
                        v as u32
                    }
                })
                .collect()
        })
        .collect();
    let identity: Vec<u32> = (0..size as u32).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    queue.push_back(identity);
    while let Some(perm) = queue.pop_front() {
        for g in &gens {
            let next: Vec<u32> = perm.iter().map(|&v| g[v as usize]).collect();
            if !seen.contains(&next) {
                if seen.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(seen.len() as u64)
}
