//! Matrix recursions over the group ring `F_p[G]` and level matrices `π_n`.
//!
//! Rows and columns of a level-`n` matrix are indexed by `m = Σ x_i p^(i-1)`,
//! so the first letter of a word is the least significant digit and the
//! `(i, j)` block of the recursion sits at residues `(i mod p, j mod p)`.

use crate::error::{Error, Result};
use crate::fp::{binomial_transition, Field, FpMatrix, IntMatrix};
use crate::mealy::{Element, Group, StateId};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Largest admissible matrix side for level matrices.
pub const SIZE_GUARD: u64 = 1 << 16;

/// Finite F_p-linear combination of canonical group elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupRingElem {
    field: Field,
    terms: BTreeMap<StateId, u8>,
}

impl GroupRingElem {
    pub fn zero(field: Field) -> GroupRingElem {
        GroupRingElem {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(field: Field) -> GroupRingElem {
        GroupRingElem::from_id(field, StateId::IDENTITY)
    }

    pub fn from_id(field: Field, id: StateId) -> GroupRingElem {
        GroupRingElem::from_terms(field, [(id, 1)])
    }

    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = (StateId, u8)>) -> GroupRingElem {
        let mut out = GroupRingElem::zero(field);
        for (id, c) in terms {
            out.add_term(id, c);
        }
        out
    }

    pub fn from_element(group: &Group, field: Field, g: &Element) -> Result<GroupRingElem> {
        Ok(GroupRingElem::from_id(field, group.canonical(g)?))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (StateId, u8)> + '_ {
        self.terms.iter().map(|(&id, &c)| (id, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, id: StateId, c: u8) {
        let f = self.field;
        let c = c % f.p();
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(id).or_insert(0);
        *slot = f.add(*slot, c);
        if *slot == 0 {
            self.terms.remove(&id);
        }
    }

    pub fn add(&self, other: &GroupRingElem) -> GroupRingElem {
        let mut out = self.clone();
        for (id, c) in other.terms() {
            out.add_term(id, c);
        }
        out
    }

    pub fn scale(&self, c: u8) -> GroupRingElem {
        GroupRingElem::from_terms(self.field, self.terms().map(|(id, v)| (id, self.field.mul(v, c))))
    }

    pub fn mul(&self, group: &Group, other: &GroupRingElem) -> Result<GroupRingElem> {
        let f = self.field;
        let mut out = GroupRingElem::zero(f);
        for (g, a) in self.terms() {
            for (h, b) in other.terms() {
                out.add_term(group.mul_ids(g, h)?, f.mul(a, b));
            }
        }
        Ok(out)
    }

    /// Augmentation `ε(a)`: the sum of the coefficients.
    pub fn augmentation(&self) -> u8 {
        self.terms().fold(0, |s, (_, c)| self.field.add(s, c))
    }

    pub fn display<'a>(&'a self, group: &'a Group) -> impl fmt::Display + 'a {
        DisplayRing { elem: self, group }
    }
}

struct DisplayRing<'a> {
    elem: &'a GroupRingElem,
    group: &'a Group,
}

impl fmt::Display for DisplayRing<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elem.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .elem
            .terms()
            .map(|(id, c)| {
                let name = self.group.format_element(&self.group.element_of(id));
                if c == 1 {
                    name
                } else {
                    format!("{c}*{name}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Ordered basis of `F_p^X` given by the values of its functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedBasis {
    name: String,
    transition: FpMatrix,
    inverse: FpMatrix,
}

impl MarkedBasis {
    /// Basis from function values: `vectors[j][x] = y_j(x)`.
    pub fn new(name: &str, field: Field, vectors: &[Vec<u8>]) -> Result<MarkedBasis> {
        let p = field.p() as usize;
        if vectors.len() != p || vectors.iter().any(|v| v.len() != p) {
            return Err(Error::Dimension(format!("a basis of F_{p}^X needs {p} vectors of length {p}")));
        }
        let t = FpMatrix::from_fn(field, p, p, |x, j| vectors[j][x]);
        let inverse = t.inverse()?;
        Ok(MarkedBasis {
            name: name.to_string(),
            transition: t,
            inverse,
        })
    }

    /// Indicator functions `δ_0, .., δ_{p-1}`.
    pub fn delta(p: u64) -> Result<MarkedBasis> {
        let f = Field::new(p)?;
        let n = p as usize;
        let vs: Vec<Vec<u8>> = (0..n).map(|j| (0..n).map(|x| (x == j) as u8).collect()).collect();
        MarkedBasis::new("delta", f, &vs)
    }

    /// Monomials `1, x, .., x^(p-1)`.
    pub fn monomial(p: u64) -> Result<MarkedBasis> {
        let f = Field::new(p)?;
        let n = p as usize;
        let vs: Vec<Vec<u8>> = (0..n)
            .map(|k| (0..n).map(|x| f.pow(x as u8, k as u64)).collect())
            .collect();
        MarkedBasis::new("monomial", f, &vs)
    }

    /// Binomial functions `b_k(x) = C(p-1-x, k)`.
    pub fn binomial(p: u64) -> Result<MarkedBasis> {
        let (t, inverse) = binomial_transition(p)?;
        Ok(MarkedBasis {
            name: "binomial".into(),
            transition: t,
            inverse,
        })
    }

    pub fn by_name(name: &str, p: u64) -> Result<MarkedBasis> {
        match name {
            "delta" => MarkedBasis::delta(p),
            "monomial" => MarkedBasis::monomial(p),
            "binomial" => MarkedBasis::binomial(p),
            other => Err(Error::UndefinedName(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> Field {
        self.transition.field()
    }

    pub fn size(&self) -> usize {
        self.transition.rows()
    }

    /// `T[x][j] = y_j(x)`: columns are the basis functions in delta coordinates.
    pub fn transition(&self) -> &FpMatrix {
        &self.transition
    }

    pub fn inverse_transition(&self) -> &FpMatrix {
        &self.inverse
    }

    /// Whether the first vector is the constant function `1`.
    pub fn is_marked(&self) -> bool {
        (0..self.size()).all(|x| self.transition.get(x, 0) == 1)
    }
}

/// Square matrix with group-ring entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMatrix {
    d: usize,
    entries: Vec<GroupRingElem>,
}

impl RingMatrix {
    pub fn from_fn(d: usize, f: impl Fn(usize, usize) -> GroupRingElem) -> RingMatrix {
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                entries.push(f(i, j));
            }
        }
        RingMatrix { d, entries }
    }

    pub fn size(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElem {
        &self.entries[i * self.d + j]
    }

    pub fn mul(&self, group: &Group, other: &RingMatrix) -> Result<RingMatrix> {
        let d = self.d;
        let field = self.entries[0].field();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let mut s = GroupRingElem::zero(field);
                for k in 0..d {
                    s = s.add(&self.get(i, k).mul(group, other.get(k, j))?);
                }
                entries.push(s);
            }
        }
        Ok(RingMatrix { d, entries })
    }
}

fn check_field(group: &Group, basis: &MarkedBasis) -> Result<Field> {
    let f = basis.field();
    if f.p() as usize != group.degree() {
        return Err(Error::ModulusMismatch(f.p(), group.degree() as u8));
    }
    Ok(f)
}

/// `Ξ_B(a)` for the basis `B`; `Ξ_B(g)[i][j] = Σ_l T⁻¹[i][g(l)]·T[l][j]·g|_l`.
pub fn xi_in_basis(group: &Group, a: &GroupRingElem, basis: &MarkedBasis) -> Result<RingMatrix> {
    let f = check_field(group, basis)?;
    let d = group.degree();
    let (t, tinv) = (basis.transition(), basis.inverse_transition());
    let mut entries = vec![GroupRingElem::zero(f); d * d];
    for (g, c) in a.terms() {
        let perm = group.perm_of(g);
        let secs = group.sections_of(g);
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    let coef = f.mul(tinv.get(i, perm[l] as usize), t.get(l, j));
                    if coef != 0 {
                        entries[i * d + j].add_term(secs[l], f.mul(coef, c));
                    }
                }
            }
        }
    }
    Ok(RingMatrix { d, entries })
}

/// `Ξ(g)` in the delta basis: entry `(g(x), x)` is `g|_x`.
pub fn xi(group: &Group, g: &Element) -> Result<RingMatrix> {
    let f = Field::new(group.degree() as u64)?;
    let a = GroupRingElem::from_element(group, f, g)?;
    xi_in_basis(group, &a, &MarkedBasis::delta(group.degree() as u64)?)
}

fn guard(p: usize, n: usize) -> Result<usize> {
    let size = (p as u64).checked_pow(n as u32).ok_or(Error::SizeGuard(u64::MAX))?;
    if size > SIZE_GUARD {
        return Err(Error::SizeGuard(size));
    }
    Ok(size as usize)
}

/// Memoized level matrices of canonical states in one basis.
pub struct LevelCache<'g> {
    group: &'g Group,
    basis: MarkedBasis,
    coef: HashMap<Vec<u8>, Vec<FpMatrix>>,
    memo: HashMap<(StateId, usize), FpMatrix>,
}

impl<'g> LevelCache<'g> {
    pub fn new(group: &'g Group, basis: &MarkedBasis) -> Result<LevelCache<'g>> {
        check_field(group, basis)?;
        Ok(LevelCache {
            group,
            basis: basis.clone(),
            coef: HashMap::new(),
            memo: HashMap::new(),
        })
    }

    /// `C_l[i][j] = T⁻¹[i][π(l)]·T[l][j]` for each letter `l`.
    fn coefficients(&mut self, perm: &[u8]) -> &Vec<FpMatrix> {
        let basis = &self.basis;
        self.coef.entry(perm.to_vec()).or_insert_with(|| {
            let f = basis.field();
            let d = perm.len();
            (0..d)
                .map(|l| {
                    FpMatrix::from_fn(f, d, d, |i, j| {
                        f.mul(
                            basis.inverse_transition().get(i, perm[l] as usize),
                            basis.transition().get(l, j),
                        )
                    })
                })
                .collect()
        })
    }

    /// Level-`n` matrix of the state `id`.
    pub fn state(&mut self, id: StateId, n: usize) -> Result<FpMatrix> {
        let d = self.group.degree();
        guard(d, n)?;
        if let Some(m) = self.memo.get(&(id, n)) {
            return Ok(m.clone());
        }
        let f = self.basis.field();
        let m = if n == 0 {
            FpMatrix::identity(f, 1)
        } else {
            let perm = self.group.perm_of(id);
            let secs = self.group.sections_of(id);
            let coefs = self.coefficients(&perm).clone();
            let size = d.pow(n as u32);
            let mut acc = FpMatrix::zeros(f, size, size);
            for (l, c) in coefs.iter().enumerate() {
                let below = self.state(secs[l], n - 1)?;
                let block = crate::fp::kron(&below, c)?;
                acc.add_scaled(1, &block);
            }
            acc
        };
        self.memo.insert((id, n), m.clone());
        Ok(m)
    }

    pub fn ring(&mut self, a: &GroupRingElem, n: usize) -> Result<FpMatrix> {
        let size = guard(self.group.degree(), n)?;
        let mut acc = FpMatrix::zeros(self.basis.field(), size, size);
        for (id, c) in a.terms() {
            let m = self.state(id, n)?;
            acc.add_scaled(c, &m);
        }
        Ok(acc)
    }
}

/// Matrix of `π_n(a)` in the basis `B^{⊗n}`.
pub fn level_matrix(group: &Group, a: &GroupRingElem, n: usize, basis: &MarkedBasis) -> Result<FpMatrix> {
    LevelCache::new(group, basis)?.ring(a, n)
}

/// Level matrix of a single element.
///
/// Falls back to conjugating the permutation matrix when the element is not
/// proven finite-state within the group's cap.
pub fn level_matrix_element(group: &Group, g: &Element, n: usize, basis: &MarkedBasis) -> Result<FpMatrix> {
    match group.canonical(g) {
        Ok(id) => level_matrix(group, &GroupRingElem::from_id(basis.field(), id), n, basis),
        Err(Error::CapExceeded(_)) => level_matrix_via_permutation(group, g, n, basis),
        Err(e) => Err(e),
    }
}

/// Permutation matrix of `g` on `X^n`: entry `(g(v), v)` is one.
pub fn permutation_matrix(group: &Group, g: &Element, n: usize) -> Result<FpMatrix> {
    let d = group.degree();
    let size = guard(d, n)?;
    let f = Field::new(d as u64)?;
    let mut m = FpMatrix::zeros(f, size, size);
    let mut word = vec![0u8; n];
    for v in 0..size {
        let mut r = v;
        for x in word.iter_mut() {
            *x = (r % d) as u8;
            r /= d;
        }
        let image = group.act(g, &word)?;
        let u = image.iter().rev().fold(0usize, |acc, &y| acc * d + y as usize);
        m.set(u, v, 1);
    }
    Ok(m)
}

/// `T_n = T ⊗ .. ⊗ T` (`n` factors; `T_0 = [1]`).
pub fn transition_tensor(t: &FpMatrix, n: usize) -> Result<FpMatrix> {
    let mut acc = FpMatrix::identity(t.field(), 1);
    for _ in 0..n {
        acc = crate::fp::kron(&acc, t)?;
    }
    Ok(acc)
}

pub fn transition_tensor_int(t: &IntMatrix, n: usize) -> IntMatrix {
    let mut acc = IntMatrix::from_rows(&[vec![1]]).expect("1x1");
    for _ in 0..n {
        acc = acc.kron(t);
    }
    acc
}

/// `T_n⁻¹ · P_n(g) · T_n`, computed from the action on `X^n` only.
pub fn level_matrix_via_permutation(
    group: &Group,
    g: &Element,
    n: usize,
    basis: &MarkedBasis,
) -> Result<FpMatrix> {
    check_field(group, basis)?;
    let perm = permutation_matrix(group, g, n)?;
    let t = transition_tensor(basis.transition(), n)?;
    let tinv = transition_tensor(basis.inverse_transition(), n)?;
    tinv.mul(&perm)?.mul(&t)
}

/// Binomial-basis recursion for `p = 2`: `g = (g0, g1)` gives `[[g1, 0], [g0+g1, g0]]`,
/// `g = σ(g0, g1)` gives `[[g0, g0], [g0+g1, g0]]`.
pub fn lemma57(group: &Group, g0: &Element, g1: &Element, twisted: bool) -> Result<RingMatrix> {
    if group.degree() != 2 {
        return Err(Error::RequiresBinary(group.degree() as u8));
    }
    let f = Field::new(2)?;
    let a = GroupRingElem::from_element(group, f, g0)?;
    let b = GroupRingElem::from_element(group, f, g1)?;
    let zero = GroupRingElem::zero(f);
    let sum = a.add(&b);
    let entries = if twisted {
        vec![a.clone(), a.clone(), sum, a]
    } else {
        vec![b, zero, sum, a]
    };
    Ok(RingMatrix { d: 2, entries })
}
