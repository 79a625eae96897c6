//! Root systems of the finite irreducible Cartan types.
//!
//! Roots are dense integer coordinate vectors in the simple-root basis.
//! Node numbering follows Bourbaki, and the Cartan matrix convention is
//! `a[i][j] = <delta_j, delta_i^vee>`, so that for any root `r`
//!
//! ```text
//! <r, delta_i^vee> = sum_j r[j] * a[i][j].
//! ```
//!
//! Positive roots are enumerated bottom-up by height using root strings:
//! `alpha + delta_i` is a root iff `q = p - <alpha, delta_i^vee> > 0`,
//! where `p` counts how far the string through `alpha` extends downward.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Series {
    pub fn letter(self) -> char {
        match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        }
    }
}

/// A finite irreducible Cartan type, e.g. `A2`, `B4`, `G2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CartanType {
    pub series: Series,
    pub rank: usize,
}

impl CartanType {
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        let ok = match series {
            Series::A => rank >= 1,
            Series::B | Series::C => rank >= 2,
            // D3 = A3 is admitted; it adds nothing but breaks nothing.
            Series::D => rank >= 3,
            Series::E => (6..=8).contains(&rank),
            Series::F => rank == 4,
            Series::G => rank == 2,
        };
        if ok {
            Ok(CartanType { series, rank })
        } else {
            Err(Error::InvalidCartanType {
                series: series.letter(),
                rank,
            })
        }
    }

    /// Closed-form count of positive roots for the type.
    pub fn positive_root_count(&self) -> usize {
        let n = self.rank;
        match self.series {
            Series::A => n * (n + 1) / 2,
            Series::B | Series::C => n * n,
            Series::D => n * (n - 1),
            Series::E => match n {
                6 => 36,
                7 => 63,
                _ => 120,
            },
            Series::F => 24,
            Series::G => 6,
        }
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.series.letter(), self.rank)
    }
}

impl FromStr for CartanType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let letter = chars
            .next()
            .ok_or_else(|| Error::ParseCartanType(s.to_string()))?;
        let series = match letter.to_ascii_uppercase() {
            'A' => Series::A,
            'B' => Series::B,
            'C' => Series::C,
            'D' => Series::D,
            'E' => Series::E,
            'F' => Series::F,
            'G' => Series::G,
            _ => return Err(Error::ParseCartanType(s.to_string())),
        };
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::ParseCartanType(s.to_string()))?;
        CartanType::new(series, rank)
    }
}

/// A root, written in the simple-root basis. All coordinates share a sign.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Root {
    pub coords: Vec<i64>,
}

impl Root {
    pub fn new(coords: Vec<i64>) -> Self {
        Root { coords }
    }

    /// Sum of coordinates; negative for negative roots.
    pub fn height(&self) -> i64 {
        self.coords.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.height() > 0
    }

    pub fn neg(&self) -> Root {
        Root::new(self.coords.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &Root) -> Root {
        Root::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Root) -> Root {
        Root::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scaled(&self, k: i64) -> Root {
        Root::new(self.coords.iter().map(|c| k * c).collect())
    }

    fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// An irreducible root system: Cartan matrix, positive roots sorted by
/// `(height, lex)`, highest root and Coxeter number. Immutable after
/// construction; all queries are pure.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub cartan_type: CartanType,
    pub cartan_matrix: Vec<Vec<i64>>,
    pub simple_roots: Vec<Root>,
    pub positive_roots: Vec<Root>,
    pub highest_root: Root,
    pub coxeter_number: i64,
    positive_set: BTreeSet<Root>,
    /// Integer symmetrizer: `(delta_i, delta_j) = sym[i] * a[i][j]`.
    sym: Vec<i64>,
}

/// Dynkin-diagram edges with Bourbaki numbering, as entries of the Cartan
/// matrix: each `(i, j, aij, aji)` sets `a[i][j] = aij`, `a[j][i] = aji`.
fn dynkin_edges(t: CartanType) -> Vec<(usize, usize, i64, i64)> {
    let n = t.rank;
    let mut edges = Vec::new();
    let chain = |edges: &mut Vec<(usize, usize, i64, i64)>, upto: usize| {
        for i in 0..upto {
            edges.push((i, i + 1, -1, -1));
        }
    };
    match t.series {
        Series::A => chain(&mut edges, n - 1),
        Series::B => {
            // delta_n short: <delta_{n-1}, delta_n^vee> = -2.
            chain(&mut edges, n.saturating_sub(2));
            edges.push((n - 2, n - 1, -1, -2));
        }
        Series::C => {
            // delta_n long: <delta_n, delta_{n-1}^vee> = -2.
            chain(&mut edges, n.saturating_sub(2));
            edges.push((n - 2, n - 1, -2, -1));
        }
        Series::D => {
            chain(&mut edges, n - 2);
            edges.push((n - 3, n - 1, -1, -1));
        }
        Series::E => {
            // Bourbaki: chain 1-3-4-5-...-n with node 2 attached to node 4.
            edges.push((0, 2, -1, -1));
            edges.push((1, 3, -1, -1));
            for i in 2..n - 1 {
                edges.push((i, i + 1, -1, -1));
            }
        }
        Series::F => {
            // delta_1, delta_2 long; delta_3, delta_4 short.
            edges.push((0, 1, -1, -1));
            edges.push((1, 2, -2, -1));
            edges.push((2, 3, -1, -1));
        }
        Series::G => {
            // delta_1 short, delta_2 long: a[0][1] = <delta_2, delta_1^vee> = -3.
            edges.push((0, 1, -3, -1));
        }
    }
    edges
}

impl RootSystem {
    pub fn new(t: CartanType) -> Result<Self> {
        let n = t.rank;
        let mut a = vec![vec![0i64; n]; n];
        for i in 0..n {
            a[i][i] = 2;
        }
        for (i, j, aij, aji) in dynkin_edges(t) {
            a[i][j] = aij;
            a[j][i] = aji;
        }

        let simple_roots: Vec<Root> = (0..n)
            .map(|i| {
                let mut c = vec![0i64; n];
                c[i] = 1;
                Root::new(c)
            })
            .collect();

        // Symmetrizer d_i with d_i * a[i][j] = d_j * a[j][i]; propagated over
        // the (connected) diagram as exact fractions, then scaled to integers.
        let sym = symmetrizer(&a)?;

        // Closure by height. Levels below the current one are complete, so
        // the downward string count p is exact.
        let mut positive_set: BTreeSet<Root> = simple_roots.iter().cloned().collect();
        let mut level: Vec<Root> = simple_roots.clone();
        while !level.is_empty() {
            let mut next: BTreeSet<Root> = BTreeSet::new();
            for alpha in &level {
                for (i, delta) in simple_roots.iter().enumerate() {
                    let mut p = 0i64;
                    loop {
                        let down = alpha.sub(&delta.scaled(p + 1));
                        if positive_set.contains(&down) {
                            p += 1;
                        } else {
                            break;
                        }
                    }
                    let pairing = pairing_raw(&a, alpha, i);
                    let q = p - pairing;
                    if q > 0 {
                        next.insert(alpha.add(delta));
                    }
                }
            }
            level = next
                .into_iter()
                .filter(|r| positive_set.insert(r.clone()))
                .collect();
        }

        let mut positive_roots: Vec<Root> = positive_set.iter().cloned().collect();
        positive_roots.sort_by_key(|r| (r.height(), r.coords.clone()));

        let top_height = positive_roots.last().map(|r| r.height()).unwrap_or(0);
        let top: Vec<&Root> = positive_roots
            .iter()
            .filter(|r| r.height() == top_height)
            .collect();
        if top.len() != 1 {
            return Err(Error::Internal(format!(
                "expected a unique highest root for {t}, found {}",
                top.len()
            )));
        }
        let highest_root = top[0].clone();
        let coxeter_number = 1 + highest_root.height();

        Ok(RootSystem {
            cartan_type: t,
            cartan_matrix: a,
            simple_roots,
            positive_roots,
            highest_root,
            coxeter_number,
            positive_set,
            sym,
        })
    }

    pub fn rank(&self) -> usize {
        self.cartan_type.rank
    }

    /// Every root of the system, negatives first, sorted by `(height, lex)`.
    pub fn all_roots(&self) -> Vec<Root> {
        let mut all: Vec<Root> = self
            .positive_roots
            .iter()
            .map(|r| r.neg())
            .chain(self.positive_roots.iter().cloned())
            .collect();
        all.sort_by_key(|r| (r.height(), r.coords.clone()));
        all
    }

    pub fn contains(&self, r: &Root) -> bool {
        if r.is_zero() {
            return false;
        }
        if r.is_positive() {
            self.positive_set.contains(r)
        } else {
            self.positive_set.contains(&r.neg())
        }
    }

    /// `<r, delta_i^vee>` for a simple-root index `i`.
    pub fn pairing(&self, r: &Root, i: usize) -> Result<i64> {
        if i >= self.rank() {
            return Err(Error::IndexOutOfRange {
                index: i,
                rank: self.rank(),
            });
        }
        Ok(pairing_raw(&self.cartan_matrix, r, i))
    }

    /// Squared length `(r, r)` in the (integer-scaled) invariant form.
    pub fn len2(&self, r: &Root) -> i64 {
        let mut acc = 0i64;
        for (i, &ri) in r.coords.iter().enumerate() {
            if ri == 0 {
                continue;
            }
            for (j, &rj) in r.coords.iter().enumerate() {
                if rj != 0 {
                    acc += ri * rj * self.sym[i] * self.cartan_matrix[i][j];
                }
            }
        }
        acc
    }

    /// `<r, a^vee> = 2 (r, a) / (a, a)` for an arbitrary root `a`.
    pub fn pairing_coroot(&self, r: &Root, a: &Root) -> i64 {
        let mut inner = 0i64;
        for (i, &ri) in r.coords.iter().enumerate() {
            if ri == 0 {
                continue;
            }
            for (j, &aj) in a.coords.iter().enumerate() {
                if aj != 0 {
                    inner += ri * aj * self.sym[i] * self.cartan_matrix[i][j];
                }
            }
        }
        let num = 2 * inner;
        let den = self.len2(a);
        debug_assert!(den > 0 && num % den == 0, "coroot pairing not integral");
        num / den
    }

    /// Reflection of `r` in the hyperplane of `a`: `r - <r, a^vee> a`.
    pub fn reflect(&self, a: &Root, r: &Root) -> Root {
        r.sub(&a.scaled(self.pairing_coroot(r, a)))
    }

    /// The `a`-string through `b`: `(p, q)` with `b - p a, ..., b + q a` all
    /// roots. Satisfies `p - q = <b, a^vee>`.
    pub fn root_string(&self, a: &Root, b: &Root) -> Result<(i64, i64)> {
        if !self.contains(a) {
            return Err(Error::NotARoot(a.coords.clone()));
        }
        if !self.contains(b) {
            return Err(Error::NotARoot(b.coords.clone()));
        }
        if b == a || *b == a.neg() {
            return Err(Error::ProportionalRoots);
        }
        let mut p = 0i64;
        while self.contains(&b.sub(&a.scaled(p + 1))) {
            p += 1;
        }
        let mut q = 0i64;
        while self.contains(&b.add(&a.scaled(q + 1))) {
            q += 1;
        }
        Ok((p, q))
    }

    /// Coordinates of the coroot `r^vee` in the simple-coroot basis:
    /// `r^vee = sum_i c_i delta_i^vee` with `c_i = r_i |delta_i|^2 / |r|^2`.
    pub fn coroot_coords(&self, r: &Root) -> Vec<i64> {
        let len_r = self.len2(r);
        r.coords
            .iter()
            .enumerate()
            .map(|(i, &ri)| {
                let num = ri * 2 * self.sym[i];
                debug_assert!(num % len_r == 0, "coroot coordinates not integral");
                num / len_r
            })
            .collect()
    }
}

fn pairing_raw(a: &[Vec<i64>], r: &Root, i: usize) -> i64 {
    r.coords
        .iter()
        .enumerate()
        .map(|(j, &rj)| rj * a[i][j])
        .sum()
}

fn symmetrizer(a: &[Vec<i64>]) -> Result<Vec<i64>> {
    let n = a.len();
    // Exact fractions (num, den); node 0 seeded to 1.
    let mut d: Vec<Option<(i64, i64)>> = vec![None; n];
    d[0] = Some((1, 1));
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            for j in 0..n {
                if i != j && a[i][j] != 0 {
                    if let (Some((ni, di)), None) = (d[i], d[j]) {
                        // d_j = d_i * a[i][j] / a[j][i]
                        let num = ni * a[i][j];
                        let den = di * a[j][i];
                        let g = gcd(num.abs(), den.abs()).max(1);
                        let s = if den < 0 { -1 } else { 1 };
                        d[j] = Some((s * num / g, s * den / g));
                        changed = true;
                    }
                }
            }
        }
    }
    let mut lcm_den = 1i64;
    for entry in &d {
        let (_, den) = entry.ok_or_else(|| Error::Internal("disconnected diagram".into()))?;
        lcm_den = lcm_den / gcd(lcm_den, den) * den;
    }
    Ok(d.iter()
        .map(|e| {
            let (num, den) = e.unwrap();
            num * (lcm_den / den)
        })
        .collect())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}
