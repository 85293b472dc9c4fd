//! Truncated power series over `F_p` and the diagonal generating series of
//! automatic matrices.

use crate::error::{Error, Result};
use crate::fp::{Field, FpMatrix};
use crate::mealy::{Element, Group};
use crate::recursion::{level_matrix, GroupRingElem, MarkedBasis, SIZE_GUARD};
use std::fmt;

/// `Σ_{k<N} c_k x^k`, known modulo `x^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpSeries {
    field: Field,
    coeffs: Vec<u8>,
}

impl FpSeries {
    /// Series from its first `N = coeffs.len()` coefficients.
    pub fn new(field: Field, coeffs: &[u8]) -> FpSeries {
        FpSeries {
            field,
            coeffs: coeffs.iter().map(|&c| c % field.p()).collect(),
        }
    }

    pub fn zero(field: Field, n: usize) -> FpSeries {
        FpSeries {
            field,
            coeffs: vec![0; n],
        }
    }

    pub fn one(field: Field, n: usize) -> FpSeries {
        FpSeries::monomial(field, 0, 1, n)
    }

    /// `c·x^k` modulo `x^n`.
    pub fn monomial(field: Field, k: usize, c: u8, n: usize) -> FpSeries {
        let mut s = FpSeries::zero(field, n);
        if k < n {
            s.coeffs[k] = c % field.p();
        }
        s
    }

    /// Polynomial with coefficients `poly` (lowest first), truncated to `n` terms.
    pub fn from_poly(field: Field, poly: &[u8], n: usize) -> FpSeries {
        let mut s = FpSeries::zero(field, n);
        for (k, &c) in poly.iter().enumerate().take(n) {
            s.coeffs[k] = c % field.p();
        }
        s
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: usize) -> u8 {
        self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &FpSeries) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.p(), other.field.p()));
        }
        if self.order() != other.order() {
            return Err(Error::Dimension(format!(
                "truncation orders {} and {}",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &FpSeries) -> Result<FpSeries> {
        self.check(other)?;
        let f = self.field;
        Ok(FpSeries {
            field: f,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f.add(a, b)).collect(),
        })
    }

    pub fn sub(&self, other: &FpSeries) -> Result<FpSeries> {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u8) -> FpSeries {
        let f = self.field;
        FpSeries {
            field: f,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect(),
        }
    }

    pub fn mul(&self, other: &FpSeries) -> Result<FpSeries> {
        self.check(other)?;
        let f = self.field;
        let n = self.order();
        let mut out = vec![0u8; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs[..n - i].iter().enumerate() {
                if b != 0 {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
        }
        Ok(FpSeries { field: f, coeffs: out })
    }

    pub fn pow(&self, e: u32) -> FpSeries {
        let mut acc = FpSeries::one(self.field, self.order());
        for _ in 0..e {
            acc = acc.mul(self).expect("same order");
        }
        acc
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> FpSeries {
        let n = self.order();
        let mut out = vec![0u8; n];
        for i in 0..n.saturating_sub(k) {
            out[i + k] = self.coeffs[i];
        }
        FpSeries {
            field: self.field,
            coeffs: out,
        }
    }

    /// `f(x^k)`, same truncation order.
    pub fn stretch(&self, k: usize) -> FpSeries {
        let n = self.order();
        let mut out = vec![0u8; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i * k < n {
                out[i * k] = c;
            }
        }
        FpSeries {
            field: self.field,
            coeffs: out,
        }
    }

    /// Same coefficients, new truncation order (zero-padded or cut).
    pub fn with_order(&self, n: usize) -> FpSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n, 0);
        FpSeries {
            field: self.field,
            coeffs,
        }
    }

    pub fn inverse(&self) -> Result<FpSeries> {
        let f = self.field;
        let c0 = self.coeffs.first().copied().unwrap_or(0);
        let inv0 = f.inv(c0).ok_or(Error::Singular)?;
        let n = self.order();
        let mut out = vec![0u8; n];
        for k in 0..n {
            let mut s = if k == 0 { 1 } else { 0 };
            for j in 1..=k {
                s = f.sub(s, f.mul(self.coeffs[j], out[k - j]));
            }
            out[k] = f.mul(s, inv0);
        }
        Ok(FpSeries { field: f, coeffs: out })
    }

    /// The `d` series of the decimations `(c_i, c_{i+d}, ..)`, each of order `⌊N/d⌋`.
    pub fn decimate(&self, d: usize) -> Vec<FpSeries> {
        crate::sequences::decimate(&self.coeffs, d)
            .into_iter()
            .map(|c| FpSeries { field: self.field, coeffs: c })
            .collect()
    }
}

impl fmt::Display for FpSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, c)| format!("{c}*s^{k}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0 + O(s^{})", self.order())
        } else {
            write!(f, "{} + O(s^{})", parts.join(" + "), self.order())
        }
    }
}

/// `numer / denom` expanded modulo `x^n`.
pub fn rational(field: Field, numer: &[u8], denom: &[u8], n: usize) -> Result<FpSeries> {
    let d = FpSeries::from_poly(field, denom, n.max(1));
    if d.coefficient(0) == 0 {
        return Err(Error::Singular);
    }
    let num = FpSeries::from_poly(field, numer, n.max(1));
    Ok(num.mul(&d.inverse()?)?.with_order(n))
}

/// Coefficients of `1 + x^k`.
pub fn one_plus_power(k: usize) -> Vec<u8> {
    let mut v = vec![0u8; k + 1];
    v[0] = 1;
    v[k] += 1;
    v
}

pub fn series_of_sequence(field: Field, prefix: &[u8]) -> FpSeries {
    FpSeries::new(field, prefix)
}

/// `Σ_i x^i G_i(x^d)`; parts share one order `M`, the result has order `d·M`.
pub fn recompose(parts: &[FpSeries]) -> Result<FpSeries> {
    let d = parts.len();
    let first = parts.first().ok_or_else(|| Error::Dimension("no parts".into()))?;
    let m = first.order();
    let mut out = FpSeries::zero(first.field(), d * m);
    for (i, part) in parts.iter().enumerate() {
        first.check(part)?;
        out = out.add(&part.with_order(d * m).stretch(d).shift(i))?;
    }
    Ok(out)
}

/// `Σ_i x^i G_i(x)^p`, with each part raised as a polynomial; equals [`recompose`] when `d = p`.
pub fn frobenius_recompose(parts: &[FpSeries]) -> Result<FpSeries> {
    let d = parts.len();
    let first = parts.first().ok_or_else(|| Error::Dimension("no parts".into()))?;
    let p = first.field().p() as usize;
    if d != p {
        return Err(Error::Dimension(format!("{d} parts over F_{p}")));
    }
    let m = first.order();
    let mut out = FpSeries::zero(first.field(), p * m);
    for (i, part) in parts.iter().enumerate() {
        first.check(part)?;
        out = out.add(&part.with_order(p * m).pow(p as u32).shift(i))?;
    }
    Ok(out)
}

/// Whether `Σ_k coeffs[k]·G^k ≡ 0 mod x^order`.
pub fn verify_algebraic(g: &FpSeries, coeffs: &[FpSeries], order: usize) -> Result<bool> {
    let n = g.order();
    if n < 8 {
        return Err(Error::TruncationTooShort(n));
    }
    if order > n {
        return Err(Error::Dimension(format!("order {order} beyond truncation {n}")));
    }
    let mut acc = FpSeries::zero(g.field(), n);
    let mut power = FpSeries::one(g.field(), n);
    for c in coeffs {
        acc = acc.add(&c.mul(&power)?)?;
        power = power.mul(g)?;
    }
    Ok(acc.coeffs()[..order].iter().all(|&c| c == 0))
}

/// Series of the `i`-th diagonal `(a_{0,i}, a_{1,i+1}, ..)` of `π(g)` in basis `B`, `L` terms.
pub fn diagonal_series(group: &Group, g: &Element, i: usize, len: usize, basis: &MarkedBasis) -> Result<FpSeries> {
    let p = group.degree();
    let mut n = 0;
    while (p as u64).pow(n as u32) < (len + i) as u64 {
        n += 1;
        if (p as u64).pow(n as u32) > SIZE_GUARD {
            return Err(Error::SizeGuard((p as u64).pow(n as u32)));
        }
    }
    let a = GroupRingElem::from_element(group, basis.field(), g)?;
    let m = level_matrix(group, &a, n, basis)?;
    Ok(diagonal_of(&m, i, len))
}

/// `(M[r][r+i])_{r < len}`, zero beyond the matrix.
pub fn diagonal_of(m: &FpMatrix, i: usize, len: usize) -> FpSeries {
    let coeffs: Vec<u8> = (0..len)
        .map(|r| if r + i < m.cols() && r < m.rows() { m.get(r, r + i) } else { 0 })
        .collect();
    FpSeries::new(m.field(), &coeffs)
}

/// For `k + n = d·q + r`: the `k`-th decimation of `Δ_n(M)` is `Δ_q` of block `(k, r)`.
pub fn diagonal_decimation_map(n: usize, k: usize, d: usize) -> (usize, usize, usize) {
    let total = k + n;
    (k, total % d, total / d)
}

/// Upper-triangular `N × N` matrix as `Σ_i M_i(s) t^i`, `M_i[r] = A[r][r+i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TSPoly {
    field: Field,
    n: usize,
    diags: Vec<FpSeries>,
}

impl TSPoly {
    pub fn new(field: Field, n: usize, diags: Vec<FpSeries>) -> Result<TSPoly> {
        let mut out = Vec::with_capacity(diags.len());
        for (i, s) in diags.into_iter().enumerate() {
            if s.order() != n || s.field() != field {
                return Err(Error::Dimension(format!("diagonal {i} has order {}", s.order())));
            }
            let mut c = s.coeffs().to_vec();
            for r in n.saturating_sub(i)..n {
                c[r] = 0;
            }
            out.push(FpSeries::new(field, &c));
        }
        let mut t = TSPoly { field, n, diags: out };
        t.trim();
        Ok(t)
    }

    fn trim(&mut self) {
        while self.diags.last().is_some_and(FpSeries::is_zero) {
            self.diags.pop();
        }
    }

    /// Reads the upper triangle of a square matrix.
    pub fn from_matrix(m: &FpMatrix) -> Result<TSPoly> {
        let n = m.rows();
        if m.cols() != n {
            return Err(Error::Dimension("square matrix expected".into()));
        }
        let diags = (0..n).map(|i| diagonal_of(m, i, n)).collect();
        TSPoly::new(m.field(), n, diags)
    }

    pub fn to_matrix(&self) -> FpMatrix {
        let mut m = FpMatrix::zeros(self.field, self.n, self.n);
        for (i, s) in self.diags.iter().enumerate() {
            for r in 0..self.n - i.min(self.n) {
                m.set(r, r + i, s.coefficient(r));
            }
        }
        m
    }

    pub fn degree(&self) -> Option<usize> {
        self.diags.len().checked_sub(1)
    }

    /// `M_i`, zero beyond the degree.
    pub fn diagonal(&self, i: usize) -> FpSeries {
        self.diags.get(i).cloned().unwrap_or_else(|| FpSeries::zero(self.field, self.n))
    }
}

/// Product with the twist `t·f(s) = (shifted f)(s)·t`.
pub fn ts_mul(u: &TSPoly, v: &TSPoly) -> Result<TSPoly> {
    if u.field != v.field {
        return Err(Error::ModulusMismatch(u.field.p(), v.field.p()));
    }
    if u.n != v.n {
        return Err(Error::Dimension(format!("orders {} and {}", u.n, v.n)));
    }
    let f = u.field;
    let n = u.n;
    let deg = (u.diags.len() + v.diags.len()).min(n + 1);
    let mut out = vec![vec![0u8; n]; deg.max(1)];
    for (i, ui) in u.diags.iter().enumerate() {
        for (j, vj) in v.diags.iter().enumerate() {
            if i + j >= n {
                continue;
            }
            for r in 0..n - i - j {
                let a = ui.coefficient(r);
                if a != 0 {
                    let slot = &mut out[i + j][r];
                    *slot = f.add(*slot, f.mul(a, vj.coefficient(r + i)));
                }
            }
        }
    }
    TSPoly::new(f, n, out.iter().map(|c| FpSeries::new(f, c)).collect())
}

/// `num / (1 + s^(2^k)) + coeff · B_1^(2^l)` over `F_2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedForm {
    pub num: Vec<u8>,
    pub k: u32,
    pub coeff: Vec<u8>,
    pub l: u32,
}

fn poly_trim(mut p: Vec<u8>) -> Vec<u8> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn poly_add2(a: &[u8], b: &[u8]) -> Vec<u8> {
    let n = a.len().max(b.len());
    poly_trim((0..n).map(|i| (a.get(i).unwrap_or(&0) ^ b.get(i).unwrap_or(&0)) & 1).collect())
}

fn poly_mul2(a: &[u8], b: &[u8]) -> Vec<u8> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x & 1 == 1 {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] ^= y & 1;
            }
        }
    }
    poly_trim(out)
}

fn poly_square2(a: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; (2 * a.len()).saturating_sub(1)];
    for (i, &x) in a.iter().enumerate() {
        out[2 * i] = x & 1;
    }
    poly_trim(out)
}

/// `(1 + s^(2^k))^(2^m)` = `1 + s^(2^(k+m))`, so raising a denominator is a power of the base.
fn denominator_lift(num: &[u8], k: u32, target: u32) -> Vec<u8> {
    let mut n = num.to_vec();
    for j in k..target {
        n = poly_mul2(&n, &one_plus_power(1 << j));
    }
    n
}

impl ClosedForm {
    pub fn rational(num: Vec<u8>, k: u32) -> ClosedForm {
        ClosedForm {
            num: poly_trim(num),
            k,
            coeff: Vec::new(),
            l: 0,
        }
    }

    pub fn b1() -> ClosedForm {
        ClosedForm {
            num: Vec::new(),
            k: 0,
            coeff: vec![1],
            l: 0,
        }
    }

    pub fn square(&self) -> ClosedForm {
        ClosedForm {
            num: poly_square2(&self.num),
            k: self.k + 1,
            coeff: poly_square2(&self.coeff),
            l: if self.coeff.is_empty() { 0 } else { self.l + 1 },
        }
    }

    pub fn times_s(&self) -> ClosedForm {
        let shift = |p: &[u8]| if p.is_empty() { Vec::new() } else { [&[0u8][..], p].concat() };
        ClosedForm {
            num: shift(&self.num),
            k: self.k,
            coeff: shift(&self.coeff),
            l: self.l,
        }
    }

    /// Sum; `None` when both carry a `B_1` term with different exponents.
    pub fn add(&self, other: &ClosedForm) -> Option<ClosedForm> {
        let k = self.k.max(other.k);
        let num = poly_add2(&denominator_lift(&self.num, self.k, k), &denominator_lift(&other.num, other.k, k));
        let (coeff, l) = match (self.coeff.is_empty(), other.coeff.is_empty()) {
            (true, true) => (Vec::new(), 0),
            (false, true) => (self.coeff.clone(), self.l),
            (true, false) => (other.coeff.clone(), other.l),
            (false, false) if self.l == other.l => (poly_add2(&self.coeff, &other.coeff), self.l),
            _ => return None,
        };
        let l = if coeff.is_empty() { 0 } else { l };
        Some(ClosedForm { num, k, coeff, l })
    }

    pub fn to_series(&self, b1: &FpSeries) -> Result<FpSeries> {
        let f = b1.field();
        let n = b1.order();
        let rat = rational(f, &self.num, &one_plus_power(1 << self.k), n)?;
        let b = b1.pow(1 << self.l);
        rat.add(&FpSeries::from_poly(f, &self.coeff, n).mul(&b)?)
    }
}

/// Diagonal series `A_n, B_n, C_n, D_n, I_n` of the Grigorchuk generators and the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalSystem {
    pub a: Vec<FpSeries>,
    pub b: Vec<FpSeries>,
    pub c: Vec<FpSeries>,
    pub d: Vec<FpSeries>,
    pub i: Vec<FpSeries>,
}

/// Solves the diagonal recursions for `n ≤ n_max` modulo `s^len`.
pub fn grigorchuk_diagonal_system(n_max: usize, len: usize) -> Result<DiagonalSystem> {
    let f = Field::new(2)?;
    let m = 2 * n_max + 2;
    let ones = rational(f, &[1], &[1, 1], len)?;
    let mut a = vec![FpSeries::zero(f, len); m];
    let mut id = vec![FpSeries::zero(f, len); m];
    id[0] = ones.clone();
    a[0] = ones.clone();
    a[1] = rational(f, &[1], &[1, 0, 1], len)?;
    let seed = FpSeries::one(f, len);
    let mut b = vec![FpSeries::zero(f, len); m];
    let (mut c, mut d) = (b.clone(), b.clone());
    b[0] = seed.clone();
    c[0] = seed.clone();
    d[0] = seed;
    let sq = |x: &FpSeries| x.mul(x).expect("same order");
    let s = |x: &FpSeries| x.shift(1);
    for _ in 0..=len + 1 {
        let (ob, oc, od) = (b.clone(), c.clone(), d.clone());
        for n in 0..m {
            let (h, odd) = (n / 2, n % 2 == 1);
            let pick = |v: &Vec<FpSeries>, k: usize| v.get(k).cloned().unwrap_or_else(|| FpSeries::zero(f, len));
            if odd {
                let (ah, ih) = (pick(&a, h + 1), pick(&id, h + 1));
                b[n] = s(&sq(&pick(&oc, h + 1)).add(&sq(&ah))?);
                c[n] = s(&sq(&pick(&od, h + 1)).add(&sq(&ah))?);
                d[n] = s(&sq(&ih).add(&sq(&pick(&ob, h + 1)))?);
            } else {
                let (ah, ih) = (pick(&a, h), pick(&id, h));
                b[n] = sq(&oc[h]).add(&s(&sq(&ah)))?;
                c[n] = sq(&od[h]).add(&s(&sq(&ah)))?;
                d[n] = sq(&ob[h]).add(&s(&sq(&ih)))?;
            }
        }
        if b == ob && c == oc && d == od {
            break;
        }
    }
    let keep = n_max + 1;
    for v in [&mut a, &mut b, &mut c, &mut d, &mut id] {
        v.truncate(keep);
    }
    Ok(DiagonalSystem { a, b, c, d, i: id })
}

/// Closed forms of `B_n, C_n, D_n` (`n ≤ n_max`) in terms of `B_1`.
pub fn grigorchuk_closed_forms(n_max: usize) -> Vec<[ClosedForm; 3]> {
    let zero = ClosedForm::rational(Vec::new(), 0);
    let ones = ClosedForm::rational(vec![1], 0);
    let a_of = |n: usize| match n {
        0 => ones.clone(),
        1 => ClosedForm::rational(vec![1], 1),
        _ => zero.clone(),
    };
    let i_of = |n: usize| if n == 0 { ones.clone() } else { zero.clone() };
    let b1 = ClosedForm::b1();
    let d1 = b1.square().times_s();
    let c1 = d1.square().add(&a_of(1).square()).expect("rational summand").times_s();
    let mut table: Vec<[ClosedForm; 3]> = vec![[ones.clone(), ones.clone(), ones.clone()], [b1, c1, d1]];
    for n in 2..=n_max {
        let h = n / 2;
        let row = if n % 2 == 0 {
            let [_, ch, dh] = &table[h];
            let bh = &table[h][0];
            [
                ch.square().add(&a_of(h).square().times_s()),
                dh.square().add(&a_of(h).square().times_s()),
                bh.square().add(&i_of(h).square().times_s()),
            ]
        } else {
            let [bh, ch, dh] = &table[h + 1];
            [
                ch.square().add(&a_of(h + 1).square()).map(|x| x.times_s()),
                dh.square().add(&a_of(h + 1).square()).map(|x| x.times_s()),
                i_of(h + 1).square().add(&bh.square()).map(|x| x.times_s()),
            ]
        };
        table.push(row.map(|x| x.expect("one B_1 term per entry")));
    }
    table.truncate(n_max + 1);
    table
}

/// `s^7 X^8 + X + r_1 + r_2 = 0` as coefficient list for [`verify_algebraic`].
pub fn eight_term_relation(field: Field, n: usize, rational_parts: &[(usize, usize)]) -> Result<Vec<FpSeries>> {
    let mut constant = FpSeries::zero(field, n);
    for &(num_pow, den_pow) in rational_parts {
        let mut num = vec![0u8; num_pow + 1];
        num[num_pow] = 1;
        constant = constant.add(&rational(field, &num, &one_plus_power(den_pow), n)?)?;
    }
    let mut coeffs = vec![constant, FpSeries::one(field, n)];
    coeffs.extend((2..8).map(|_| FpSeries::zero(field, n)));
    coeffs.push(FpSeries::monomial(field, 7, 1, n));
    Ok(coeffs)
}

/// Relation for `B_1`: `s^7B^8 + B + s^3/(1+s^8) + s/(1+s^4)`.
pub fn relation_b1(n: usize) -> Vec<FpSeries> {
    eight_term_relation(Field::new(2).expect("prime"), n, &[(3, 8), (1, 4)]).expect("valid relation")
}

/// Relation for `C_1`: `s^7C^8 + C + s^7/(1+s^16) + s/(1+s^4)`.
pub fn relation_c1(n: usize) -> Vec<FpSeries> {
    eight_term_relation(Field::new(2).expect("prime"), n, &[(7, 16), (1, 4)]).expect("valid relation")
}

/// Relation for `D_1`: `s^7D^8 + D + s^7/(1+s^16) + s^3/(1+s^8)`.
pub fn relation_d1(n: usize) -> Vec<FpSeries> {
    eight_term_relation(Field::new(2).expect("prime"), n, &[(7, 16), (3, 8)]).expect("valid relation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mealy::bundled;
    use crate::sequences::thue_morse;
    use proptest::prelude::*;

    fn f2() -> Field {
        Field::new(2).unwrap()
    }

    #[test]
    fn rational_expansions() {
        let g = rational(f2(), &[1], &[1, 1], 16).unwrap();
        assert!(g.coeffs().iter().all(|&c| c == 1));
        let h = rational(f2(), &[0, 1], &[1, 0, 0, 0, 1], 16).unwrap();
        let ones: Vec<usize> = (0..16).filter(|&k| h.coefficient(k) == 1).collect();
        assert_eq!(ones, vec![1, 5, 9, 13]);
        assert_eq!(rational(f2(), &[1], &[0, 1], 8), Err(Error::Singular));
        let t = thue_morse().prefix(0, 16).unwrap();
        let st = series_of_sequence(f2(), &t);
        assert_eq!(&st.coeffs()[..4], &[0, 1, 1, 0]);
        assert_eq!(one_plus_power(4), vec![1, 0, 0, 0, 1]);
    }

    #[test]
    fn recomposition() {
        let t = thue_morse().prefix(0, 64).unwrap();
        let s = series_of_sequence(f2(), &t);
        let parts = s.decimate(2);
        assert_eq!(recompose(&parts).unwrap(), s);
        assert_eq!(frobenius_recompose(&parts).unwrap(), s);
        let z = vec![FpSeries::zero(f2(), 8); 2];
        assert!(recompose(&z).unwrap().is_zero());
        let one_x = FpSeries::from_poly(f2(), &[1, 1], 8);
        assert_eq!(one_x.stretch(2), one_x.pow(2));
        let f3 = Field::new(3).unwrap();
        let seq: Vec<u8> = (0..81u64).map(|n| (n.count_ones() % 3) as u8).collect();
        let s3 = series_of_sequence(f3, &seq);
        assert_eq!(frobenius_recompose(&s3.decimate(3)).unwrap(), s3);
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let a = FpSeries::zero(f2(), 8);
        let b = FpSeries::zero(f2(), 9);
        assert!(matches!(a.add(&b), Err(Error::Dimension(_))));
        assert!(matches!(a.mul(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn thue_morse_relation() {
        // brute-force check of the candidate relation before relying on it
        let n = 64;
        let t = series_of_sequence(f2(), &thue_morse().prefix(0, n).unwrap());
        let one_x = FpSeries::from_poly(f2(), &[1, 1], n);
        let coeffs = vec![
            FpSeries::monomial(f2(), 1, 1, n),
            one_x.pow(2),
            one_x.pow(3),
        ];
        let mut direct = coeffs[0].clone();
        direct = direct.add(&coeffs[1].mul(&t).unwrap()).unwrap();
        direct = direct.add(&coeffs[2].mul(&t.mul(&t).unwrap()).unwrap()).unwrap();
        assert!(direct.is_zero());
        assert!(verify_algebraic(&t, &coeffs, 56).unwrap());
        assert_eq!(verify_algebraic(&t.with_order(4), &coeffs, 4), Err(Error::TruncationTooShort(4)));
    }

    #[test]
    fn diagonal_series_examples() {
        let am = bundled::adding_machine();
        let basis = MarkedBasis::binomial(2).unwrap();
        let a = am.generator("a").unwrap();
        assert!(diagonal_series(&am, &a, 0, 32, &basis).unwrap().coeffs().iter().all(|&c| c == 1));
        assert!(diagonal_series(&am, &a, 2, 32, &basis).unwrap().is_zero());
        let g = bundled::grigorchuk();
        let ga = g.generator("a").unwrap();
        assert_eq!(
            diagonal_series(&g, &ga, 1, 32, &basis).unwrap(),
            rational(f2(), &[1], &[1, 0, 1], 32).unwrap()
        );
    }

    #[test]
    fn decimation_map() {
        assert_eq!(diagonal_decimation_map(1, 0, 2), (0, 1, 0));
        assert_eq!(diagonal_decimation_map(1, 1, 2), (1, 0, 1));
        assert_eq!(diagonal_decimation_map(3, 1, 2), (1, 0, 2));
        let g = bundled::grigorchuk();
        let basis = MarkedBasis::binomial(2).unwrap();
        let b = GroupRingElem::from_element(&g, f2(), &g.generator("b").unwrap()).unwrap();
        let m = level_matrix(&g, &b, 6, &basis).unwrap();
        for n in 1..6 {
            let diag = diagonal_of(&m, n, 64 - n);
            for k in 0..2 {
                let (bk, r, q) = diagonal_decimation_map(n, k, 2);
                let block = FpMatrix::from_fn(f2(), 32, 32, |i, j| m.get(bk + 2 * i, r + 2 * j));
                let want = diagonal_of(&block, q, 32);
                let got = &diag.decimate(2)[k];
                let len = got.order().min(32 - q);
                assert_eq!(&got.coeffs()[..len], &want.coeffs()[..len], "n={n} k={k}");
            }
        }
    }

    #[test]
    fn diagonal_system_matches_matrices() {
        let len = 64;
        let sys = grigorchuk_diagonal_system(8, len).unwrap();
        let g = bundled::grigorchuk();
        let basis = MarkedBasis::binomial(2).unwrap();
        for n in 0..=8 {
            for (name, table) in [("a", &sys.a), ("b", &sys.b), ("c", &sys.c), ("d", &sys.d)] {
                let e = g.generator(name).unwrap();
                let want = diagonal_series(&g, &e, n, len - n, &basis).unwrap();
                let got = &table[n].coeffs()[..len - n];
                assert_eq!(got, want.coeffs(), "{name} diagonal {n}");
            }
        }
        assert!(sys.a[2..].iter().all(FpSeries::is_zero));
        let d0 = sys.b[0].mul(&sys.b[0]).unwrap().add(&sys.i[0].mul(&sys.i[0]).unwrap().shift(1)).unwrap();
        assert_eq!(sys.d[0], d0);
    }

    #[test]
    fn eighth_degree_relations() {
        let sys = grigorchuk_diagonal_system(1, 64).unwrap();
        assert!(verify_algebraic(&sys.b[1], &relation_b1(64), 64).unwrap());
        assert!(verify_algebraic(&sys.c[1], &relation_c1(64), 64).unwrap());
        assert!(verify_algebraic(&sys.d[1], &relation_d1(64), 64).unwrap());
        assert!(!verify_algebraic(&sys.c[1], &relation_b1(64), 64).unwrap());
    }

    #[test]
    fn closed_forms_fit() {
        let len = 128;
        let sys = grigorchuk_diagonal_system(16, len).unwrap();
        let forms = grigorchuk_closed_forms(16);
        for (n, row) in forms.iter().enumerate() {
            for (k, table) in [&sys.b, &sys.c, &sys.d].iter().enumerate() {
                assert_eq!(row[k].to_series(&sys.b[1]).unwrap(), table[n], "n={n} k={k}");
            }
        }
        assert_eq!(forms[1][2], ClosedForm { num: vec![], k: 1, coeff: vec![0, 1], l: 1 });
    }

    #[test]
    fn ts_products() {
        let n = 64;
        let ones = rational(f2(), &[1], &[1, 1], n).unwrap();
        let t = TSPoly::new(f2(), n, vec![FpSeries::zero(f2(), n), ones.clone()]).unwrap();
        let f = TSPoly::new(f2(), n, vec![ones.clone()]).unwrap();
        assert_eq!(ts_mul(&t, &f).unwrap(), ts_mul(&f, &t).unwrap());
        let g = bundled::grigorchuk();
        let am = bundled::adding_machine();
        let basis = MarkedBasis::binomial(2).unwrap();
        let mat = |group: &Group, name: &str| {
            let a = GroupRingElem::from_element(group, f2(), &group.parse_element(name).unwrap()).unwrap();
            level_matrix(group, &a, 6, &basis).unwrap()
        };
        let j = TSPoly::from_matrix(&mat(&am, "a")).unwrap();
        let jj = ts_mul(&j, &j).unwrap();
        assert_eq!(jj.diagonal(2).coeffs()[..62], vec![1u8; 62][..]);
        let b = TSPoly::from_matrix(&mat(&g, "b")).unwrap();
        let bb = ts_mul(&b, &b).unwrap();
        assert_eq!(bb.degree(), Some(0));
        assert_eq!(bb.diagonal(0), ones);
        let mats: Vec<FpMatrix> = vec![mat(&g, "a"), mat(&g, "b"), mat(&g, "c"), mat(&g, "d"), mat(&am, "a"), mat(&g, "1")];
        for x in &mats {
            for y in &mats {
                let (tx, ty) = (TSPoly::from_matrix(x).unwrap(), TSPoly::from_matrix(y).unwrap());
                let prod = ts_mul(&tx, &ty).unwrap();
                assert_eq!(prod.to_matrix(), x.mul(y).unwrap());
                for z in &mats[..2] {
                    let tz = TSPoly::from_matrix(z).unwrap();
                    assert_eq!(ts_mul(&prod, &tz).unwrap(), ts_mul(&tx, &ts_mul(&ty, &tz).unwrap()).unwrap());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn frobenius_identity(coeffs in prop::collection::vec(0u8..3, 1..40), p in prop::sample::select(vec![2u64, 3])) {
            let f = Field::new(p).unwrap();
            let n = 3 * coeffs.len();
            let s = FpSeries::from_poly(f, &coeffs, n);
            prop_assert_eq!(s.pow(p as u32), s.stretch(p as usize));
        }

        #[test]
        fn recompose_inverts_decimate(coeffs in prop::collection::vec(0u8..2, 64)) {
            let s = FpSeries::new(f2(), &coeffs);
            prop_assert_eq!(recompose(&s.decimate(2)).unwrap(), s);
        }
    }
}
