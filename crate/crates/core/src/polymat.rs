//! Exact bivariate polynomials over the integers and square matrices of
//! them, used to model one-parameter unipotents `exp(t ad e_alpha)` and to
//! match group commutator identities symbolically.

use std::collections::BTreeMap;
use std::fmt;

/// Polynomial in two formal variables `t`, `u` with `i128` coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly2 {
    /// Monomial exponents `(deg_t, deg_u)` to coefficient; zero entries
    /// are never stored.
    terms: BTreeMap<(u32, u32), i128>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn constant(c: i128) -> Self {
        let mut p = Poly2::default();
        if c != 0 {
            p.terms.insert((0, 0), c);
        }
        p
    }

    pub fn monomial(c: i128, dt: u32, du: u32) -> Self {
        let mut p = Poly2::default();
        if c != 0 {
            p.terms.insert((dt, du), c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, dt: u32, du: u32) -> i128 {
        self.terms.get(&(dt, du)).copied().unwrap_or(0)
    }

    pub fn add_assign(&mut self, other: &Poly2) {
        for (&m, &c) in &other.terms {
            let e = self.terms.entry(m).or_insert(0);
            *e = e.checked_add(c).expect("poly coefficient overflow");
            if *e == 0 {
                self.terms.remove(&m);
            }
        }
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&m, &c) in &other.terms {
            let e = out.terms.entry(m).or_insert(0);
            *e = e.checked_sub(c).expect("poly coefficient overflow");
            if *e == 0 {
                out.terms.remove(&m);
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::default();
        for (&(at, au), &ac) in &self.terms {
            for (&(bt, bu), &bc) in &other.terms {
                let m = (at + bt, au + bu);
                let c = ac.checked_mul(bc).expect("poly coefficient overflow");
                let e = out.terms.entry(m).or_insert(0);
                *e = e.checked_add(c).expect("poly coefficient overflow");
                if *e == 0 {
                    out.terms.remove(&m);
                }
            }
        }
        out
    }

    /// Exact division by an integer; panics if any coefficient resists.
    pub fn div_exact(&self, d: i128) -> Poly2 {
        let mut out = Poly2::default();
        for (&m, &c) in &self.terms {
            assert!(c % d == 0, "inexact polynomial division");
            out.terms.insert(m, c / d);
        }
        out
    }

    pub fn eval(&self, t: i128, u: i128) -> i128 {
        let mut acc: i128 = 0;
        for (&(dt, du), &c) in &self.terms {
            let mut v = c;
            for _ in 0..dt {
                v = v.checked_mul(t).expect("poly eval overflow");
            }
            for _ in 0..du {
                v = v.checked_mul(u).expect("poly eval overflow");
            }
            acc = acc.checked_add(v).expect("poly eval overflow");
        }
        acc
    }

    pub fn max_deg_t(&self) -> u32 {
        self.terms.keys().map(|&(dt, _)| dt).max().unwrap_or(0)
    }

    pub fn max_deg_u(&self) -> u32 {
        self.terms.keys().map(|&(_, du)| du).max().unwrap_or(0)
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(dt, du), &c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            if dt > 0 {
                write!(f, "*t^{dt}")?;
            }
            if du > 0 {
                write!(f, "*u^{du}")?;
            }
        }
        Ok(())
    }
}

/// Square matrix with `Poly2` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    pub dim: usize,
    pub entries: Vec<Poly2>,
}

impl PolyMatrix {
    pub fn zero(dim: usize) -> Self {
        PolyMatrix {
            dim,
            entries: vec![Poly2::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = PolyMatrix::zero(dim);
        for i in 0..dim {
            *m.at_mut(i, i) = Poly2::constant(1);
        }
        m
    }

    pub fn from_int(dim: usize, rows: &[Vec<i128>]) -> Self {
        let mut m = PolyMatrix::zero(dim);
        for i in 0..dim {
            for j in 0..dim {
                *m.at_mut(i, j) = Poly2::constant(rows[i][j]);
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &Poly2 {
        &self.entries[i * self.dim + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Poly2 {
        &mut self.entries[i * self.dim + j]
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = PolyMatrix::zero(self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..self.dim {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.at_mut(i, j).add_assign(&a.mul(b));
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = PolyMatrix::zero(self.dim);
        for idx in 0..self.entries.len() {
            out.entries[idx] = self.entries[idx].sub(&other.entries[idx]);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly2::is_zero)
    }

    /// Extract the matrix of coefficients of `t^dt u^du`.
    pub fn coeff_matrix(&self, dt: u32, du: u32) -> Vec<Vec<i128>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.at(i, j).coeff(dt, du)).collect())
            .collect()
    }

    pub fn eval(&self, t: i128, u: i128) -> Vec<Vec<i128>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.at(i, j).eval(t, u)).collect())
            .collect()
    }

    /// First entry where the two matrices differ, as a witness string.
    pub fn first_difference(&self, other: &PolyMatrix) -> Option<String> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if self.at(i, j) != other.at(i, j) {
                    return Some(format!(
                        "entry ({i},{j}): {} != {}",
                        self.at(i, j),
                        other.at(i, j)
                    ));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_arithmetic() {
        let t = Poly2::monomial(1, 1, 0);
        let u = Poly2::monomial(1, 0, 1);
        let s = {
            let mut x = t.clone();
            x.add_assign(&u);
            x
        };
        let sq = s.mul(&s);
        assert_eq!(sq.coeff(2, 0), 1);
        assert_eq!(sq.coeff(1, 1), 2);
        assert_eq!(sq.coeff(0, 2), 1);
        assert_eq!(sq.eval(2, 3), 25);
    }

    #[test]
    fn matrix_identity_mul() {
        let id = PolyMatrix::identity(3);
        let mut m = PolyMatrix::zero(3);
        *m.at_mut(0, 1) = Poly2::monomial(2, 1, 0);
        *m.at_mut(2, 2) = Poly2::constant(5);
        assert_eq!(id.mul(&m), m);
        assert_eq!(m.mul(&id), m);
    }
}
