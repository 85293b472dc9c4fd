use super::{Field, FpMatrix};
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

/// Element of `F_p[x_1, .., x_n] / (x_i^p - x_i)`.
///
/// Exponent vectors are little-endian: index 0 holds the exponent of `x_1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ReducedPoly {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Vec<u8>, u8>,
}

/// Reduces `x^e` using `x^p = x`.
#[inline]
fn reduce_exp(e: u32, p: u8) -> u8 {
    if e < p as u32 {
        e as u8
    } else {
        (((e - 1) % (p as u32 - 1)) + 1) as u8
    }
}

impl ReducedPoly {
    pub fn zero(field: Field, nvars: usize) -> ReducedPoly {
        ReducedPoly {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: Field, nvars: usize, c: u8) -> ReducedPoly {
        let mut f = ReducedPoly::zero(field, nvars);
        f.add_term(vec![0; nvars], c);
        f
    }

    /// The variable `x_{i+1}` (0-based index `i`).
    pub fn var(field: Field, nvars: usize, i: usize) -> ReducedPoly {
        assert!(i < nvars, "variable index out of range");
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        let mut f = ReducedPoly::zero(field, nvars);
        f.add_term(exps, 1);
        f
    }

    /// Monomial with the given exponents, reducing any exponent `>= p`.
    pub fn monomial(field: Field, exps: &[u32], c: u8) -> ReducedPoly {
        let e = exps.iter().map(|&e| reduce_exp(e, field.p())).collect();
        let mut f = ReducedPoly::zero(field, exps.len());
        f.add_term(e, c);
        f
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], u8)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exps: &[u8]) -> u8 {
        let mut key = exps.to_vec();
        key.resize(self.nvars, 0);
        self.terms.get(&key).copied().unwrap_or(0)
    }

    fn add_term(&mut self, exps: Vec<u8>, c: u8) {
        let c = c % self.field.p();
        if c == 0 {
            return;
        }
        let f = self.field;
        let slot = self.terms.entry(exps).or_insert(0);
        *slot = f.add(*slot, c);
        if *slot == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    /// Same polynomial viewed in `nvars >= self.nvars` variables.
    pub fn embed(&self, nvars: usize) -> ReducedPoly {
        assert!(nvars >= self.nvars, "cannot embed into fewer variables");
        let terms = self
            .terms
            .iter()
            .map(|(e, &c)| {
                let mut e = e.clone();
                e.resize(nvars, 0);
                (e, c)
            })
            .collect();
        ReducedPoly {
            field: self.field,
            nvars,
            terms,
        }
    }

    fn aligned(&self, other: &ReducedPoly) -> Result<(ReducedPoly, ReducedPoly)> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.field.p(), other.field.p()));
        }
        let n = self.nvars.max(other.nvars);
        Ok((self.embed(n), other.embed(n)))
    }

    pub fn add(&self, other: &ReducedPoly) -> Result<ReducedPoly> {
        let (mut a, b) = self.aligned(other)?;
        for (e, c) in b.terms {
            a.add_term(e, c);
        }
        Ok(a)
    }

    pub fn sub(&self, other: &ReducedPoly) -> Result<ReducedPoly> {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u8) -> ReducedPoly {
        let f = self.field;
        let c = c % f.p();
        let terms = self
            .terms
            .iter()
            .filter(|_| c != 0)
            .map(|(e, &v)| (e.clone(), f.mul(v, c)))
            .collect();
        ReducedPoly {
            field: f,
            nvars: self.nvars,
            terms,
        }
    }

    pub fn mul(&self, other: &ReducedPoly) -> Result<ReducedPoly> {
        let (a, b) = self.aligned(other)?;
        let f = a.field;
        let p = f.p();
        let mut acc: BTreeMap<Vec<u8>, u8> = BTreeMap::new();
        for (ea, &ca) in &a.terms {
            for (eb, &cb) in &b.terms {
                let e: Vec<u8> = ea
                    .iter()
                    .zip(eb)
                    .map(|(&x, &y)| reduce_exp(x as u32 + y as u32, p))
                    .collect();
                let slot = acc.entry(e).or_insert(0);
                *slot = f.add(*slot, f.mul(ca, cb));
            }
        }
        acc.retain(|_, v| *v != 0);
        Ok(ReducedPoly {
            field: f,
            nvars: a.nvars,
            terms: acc,
        })
    }

    pub fn pow(&self, e: u32) -> ReducedPoly {
        let mut acc = ReducedPoly::constant(self.field, self.nvars, 1);
        for _ in 0..e {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Evaluates at a point; missing coordinates count as zero.
    pub fn eval(&self, point: &[u8]) -> u8 {
        let f = self.field;
        let mut s = 0;
        for (e, &c) in &self.terms {
            let mut t = c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = f.mul(t, f.pow(point.get(i).copied().unwrap_or(0), k as u64));
                }
            }
            s = f.add(s, t);
        }
        s
    }

    /// Values at all `p^nvars` points; point index `Σ x_i p^(i-1)` (x_1 least significant).
    pub fn values(&self) -> Vec<u8> {
        let p = self.field.p() as usize;
        let size = p.pow(self.nvars as u32);
        let mut point = vec![0u8; self.nvars];
        (0..size)
            .map(|idx| {
                let mut r = idx;
                for x in point.iter_mut() {
                    *x = (r % p) as u8;
                    r /= p;
                }
                self.eval(&point)
            })
            .collect()
    }

    /// Interpolates the function given by its values at all points (ordering as in [`values`]).
    ///
    /// [`values`]: ReducedPoly::values
    pub fn interpolate(field: Field, nvars: usize, values: &[u8]) -> Result<ReducedPoly> {
        let p = field.p() as usize;
        let size = p.pow(nvars as u32);
        if values.len() != size {
            return Err(Error::WrongLength {
                expected: size,
                got: values.len(),
            });
        }
        let w = vandermonde_inverse(field);
        let coeffs = transform(field, nvars, values, &w);
        Ok(ReducedPoly::from_coefficients(field, nvars, &coeffs))
    }

    /// Coefficient vector indexed by monomial height `Σ k_i p^(i-1)`.
    pub fn coefficients(&self) -> Vec<u8> {
        let p = self.field.p() as usize;
        let mut out = vec![0; p.pow(self.nvars as u32)];
        for (e, &c) in &self.terms {
            out[monomial_index(e, p) as usize] = c;
        }
        out
    }

    pub fn from_coefficients(field: Field, nvars: usize, coeffs: &[u8]) -> ReducedPoly {
        let p = field.p() as usize;
        let mut f = ReducedPoly::zero(field, nvars);
        for (idx, &c) in coeffs.iter().enumerate() {
            if c % field.p() != 0 {
                f.terms.insert(monomial_exponents(idx as u64, p, nvars), c % field.p());
            }
        }
        f
    }

    /// Brute-force height: the largest monomial index present, `-1` for zero.
    pub fn height(&self) -> i64 {
        let p = self.field.p() as usize;
        self.terms
            .keys()
            .map(|e| monomial_index(e, p) as i64)
            .max()
            .unwrap_or(-1)
    }

    /// Substitutes the value `x` for the first variable and shifts the remaining ones down.
    pub fn restrict_first(&self, x: u8) -> ReducedPoly {
        let f = self.field;
        let nv = self.nvars.saturating_sub(1);
        let mut out = ReducedPoly::zero(f, nv);
        for (e, &c) in &self.terms {
            let (k, rest) = match e.split_first() {
                Some((&k, rest)) => (k, rest.to_vec()),
                None => (0, Vec::new()),
            };
            out.add_term(rest, f.mul(c, f.pow(x, k as u64)));
        }
        out
    }

    /// Substitutes the value `x` for the last variable.
    pub fn restrict_last(&self, x: u8) -> ReducedPoly {
        let f = self.field;
        let nv = self.nvars.saturating_sub(1);
        let mut out = ReducedPoly::zero(f, nv);
        for (e, &c) in &self.terms {
            let k = e.last().copied().unwrap_or(0);
            out.add_term(e[..nv].to_vec(), f.mul(c, f.pow(x, k as u64)));
        }
        out
    }

    /// Substitutes polynomials (in a common variable set) for every variable.
    pub fn substitute(&self, images: &[ReducedPoly]) -> Result<ReducedPoly> {
        assert_eq!(images.len(), self.nvars, "one image per variable");
        let target = images.iter().map(|g| g.nvars).max().unwrap_or(0);
        let mut out = ReducedPoly::zero(self.field, target);
        for (e, &c) in &self.terms {
            let mut t = ReducedPoly::constant(self.field, target, c);
            for (g, &k) in images.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&g.pow(k as u32))?;
                }
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }
}

/// `Σ k_i p^(i-1)` for the exponent vector `k`.
pub(crate) fn monomial_index(exps: &[u8], p: usize) -> u64 {
    exps.iter().rev().fold(0u64, |acc, &k| acc * p as u64 + k as u64)
}

pub(crate) fn monomial_exponents(mut idx: u64, p: usize, nvars: usize) -> Vec<u8> {
    let mut e = vec![0u8; nvars];
    for slot in e.iter_mut() {
        *slot = (idx % p as u64) as u8;
        idx /= p as u64;
    }
    e
}

/// Inverse of `V[x][k] = x^k` (with `0^0 = 1`).
fn vandermonde_inverse(field: Field) -> FpMatrix {
    let p = field.p() as usize;
    let v = FpMatrix::from_fn(field, p, p, |x, k| field.pow(x as u8, k as u64));
    v.inverse().expect("Vandermonde matrix on distinct points is invertible")
}

/// Applies `w` along every axis of a `p^n` array (axis 0 = least significant index digit).
pub(crate) fn transform(field: Field, nvars: usize, values: &[u8], w: &FpMatrix) -> Vec<u8> {
    let p = field.p() as usize;
    let mut cur = values.to_vec();
    let mut stride = 1;
    for _ in 0..nvars {
        let mut next = vec![0u8; cur.len()];
        for base in 0..cur.len() {
            if (base / stride) % p != 0 {
                continue;
            }
            for k in 0..p {
                let mut s = 0u8;
                for x in 0..p {
                    s = field.add(s, field.mul(w.get(k, x), cur[base + x * stride]));
                }
                next[base + k * stride] = s;
            }
        }
        cur = next;
        stride *= p;
    }
    cur
}

/// One-variable interpolation through the values at `0, 1, .., p-1`.
pub fn reduced_interpolate(field: Field, values: &[u8]) -> Result<ReducedPoly> {
    ReducedPoly::interpolate(field, 1, values)
}

impl fmt::Display for ReducedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let p = self.field.p() as usize;
        let mut terms: Vec<(&Vec<u8>, u8)> = self.terms.iter().map(|(e, &c)| (e, c)).collect();
        terms.sort_by_key(|(e, _)| std::cmp::Reverse(monomial_index(e, p)));
        let parts: Vec<String> = terms
            .into_iter()
            .map(|(e, c)| {
                let mut factors: Vec<String> = Vec::new();
                if c != 1 || e.iter().all(|&k| k == 0) {
                    factors.push(c.to_string());
                }
                for (i, &k) in e.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => factors.push(format!("x{}", i + 1)),
                        _ => factors.push(format!("x{}^{}", i + 1, k)),
                    }
                }
                factors.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
