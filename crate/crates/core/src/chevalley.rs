//! Chevalley structure constants and group-level commutator identities,
//! computed and verified by exact arithmetic in the adjoint representation.
//!
//! Signs follow the extraspecial-pair convention: positive roots are
//! totally ordered by height (ties by coordinates read from the last node,
//! which orders equal-height simples by node index); for each non-simple
//! positive root the minimal decomposition gets `N = +(p+1)`, and every
//! other constant is forced from those by the standard four-root and
//! cyclic identities. The construction then verifies antisymmetry,
//! `|N| = p + 1` against root strings, and the Jacobi identity on all
//! basis triples; a failure is reported as an internal error rather than
//! tolerated.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use num::BigInt;

use crate::error::{Error, Result};
use crate::polymat::{Poly2, PolyMatrix};
use crate::root_system::{Root, RootSystem};

/// Total order used for extraspecial pairs.
fn chev_key(r: &Root) -> (i64, Vec<i64>) {
    let mut rev = r.coords.clone();
    rev.reverse();
    (r.height(), rev)
}

/// A Chevalley basis of the Lie algebra attached to a root system, with
/// its full table of structure constants `N(a, b)` and the adjoint action.
#[derive(Debug, Clone)]
pub struct ChevalleyBasis {
    pub rs: Arc<RootSystem>,
    /// All roots in basis order (height, then lex), negatives first.
    pub roots: Vec<Root>,
    root_index: BTreeMap<Root, usize>,
    /// `N(a, b)` for every ordered pair of roots with `a + b` a root.
    n_table: HashMap<(usize, usize), i64>,
    /// Coroot coordinates per root, in the simple-coroot basis.
    coroots: Vec<Vec<i64>>,
}

impl ChevalleyBasis {
    pub fn new(rs: Arc<RootSystem>) -> Result<Self> {
        let roots = rs.all_roots();
        let root_index: BTreeMap<Root, usize> =
            roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();

        let n_pos = positive_constants(&rs)?;
        let lookup_pos = |a: &Root, b: &Root| -> i64 {
            if chev_key(a) < chev_key(b) {
                *n_pos.get(&(a.clone(), b.clone())).expect("positive pair")
            } else {
                -*n_pos.get(&(b.clone(), a.clone())).expect("positive pair")
            }
        };

        // Extend to arbitrary sign patterns through the cyclic identity.
        let mut n_table = HashMap::new();
        for a in &roots {
            for b in &roots {
                let s = a.add(b);
                if !rs.contains(&s) {
                    continue;
                }
                let value = match (a.is_positive(), b.is_positive()) {
                    (true, true) => lookup_pos(a, b),
                    (false, false) => -lookup_pos(&a.neg(), &b.neg()),
                    (true, false) => mixed_constant(&rs, &lookup_pos, a, b, &s),
                    (false, true) => -mixed_constant(&rs, &lookup_pos, b, a, &s),
                };
                n_table.insert((root_index[a], root_index[b]), value);
            }
        }

        let coroots = roots.iter().map(|r| rs.coroot_coords(r)).collect();

        let basis = ChevalleyBasis {
            rs,
            roots,
            root_index,
            n_table,
            coroots,
        };
        basis.verify_internal()?;
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.roots.len() + self.rs.rank()
    }

    pub fn root_idx(&self, r: &Root) -> usize {
        self.root_index[r]
    }

    /// `N(a, b)`; zero when `a + b` is not a root. Undefined (error) for
    /// `b = -a`.
    pub fn n_const(&self, a: &Root, b: &Root) -> Result<i64> {
        if *b == a.neg() {
            return Err(Error::OppositeRoots);
        }
        Ok(self
            .n_table
            .get(&(self.root_idx(a), self.root_idx(b)))
            .copied()
            .unwrap_or(0))
    }

    /// Bracket of two basis elements as a linear combination of basis
    /// elements. Indices `0..|Phi|` are root vectors, the rest are the
    /// simple coroots `h_1..h_n`.
    fn bracket(&self, a: usize, b: usize) -> Vec<(usize, i64)> {
        let nroots = self.roots.len();
        match (a < nroots, b < nroots) {
            (true, true) => {
                let ra = &self.roots[a];
                let rb = &self.roots[b];
                if *rb == ra.neg() {
                    self.coroots[a]
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(i, &c)| (nroots + i, c))
                        .collect()
                } else {
                    let s = ra.add(rb);
                    match self.root_index.get(&s) {
                        Some(&idx) => {
                            let n = self.n_table[&(a, b)];
                            vec![(idx, n)]
                        }
                        None => Vec::new(),
                    }
                }
            }
            (true, false) => {
                // [e_r, h_i] = -<r, delta_i^vee> e_r
                let i = b - nroots;
                let c = -self.rs.pairing(&self.roots[a], i).expect("valid index");
                if c != 0 {
                    vec![(a, c)]
                } else {
                    Vec::new()
                }
            }
            (false, true) => {
                let i = a - nroots;
                let c = self.rs.pairing(&self.roots[b], i).expect("valid index");
                if c != 0 {
                    vec![(b, c)]
                } else {
                    Vec::new()
                }
            }
            (false, false) => Vec::new(),
        }
    }

    fn bracket_lincomb(&self, a: usize, v: &BTreeMap<usize, i64>) -> BTreeMap<usize, i64> {
        let mut out = BTreeMap::new();
        for (&b, &c) in v {
            for (idx, n) in self.bracket(a, b) {
                let e = out.entry(idx).or_insert(0i64);
                *e += c * n;
                if *e == 0 {
                    out.remove(&idx);
                }
            }
        }
        out
    }

    /// Antisymmetry, |N| = p + 1 against root strings, and the Jacobi
    /// identity on all basis triples.
    fn verify_internal(&self) -> Result<()> {
        for a in &self.roots {
            for b in &self.roots {
                if *b == a.neg() {
                    continue;
                }
                let n_ab = self.n_const(a, b)?;
                let n_ba = self.n_const(b, a)?;
                if n_ab != -n_ba {
                    return Err(Error::Internal(format!(
                        "antisymmetry fails at ({a}, {b}): {n_ab} vs {n_ba}"
                    )));
                }
                if self.rs.contains(&a.add(b)) {
                    let (p, _) = self.rs.root_string(a, b)?;
                    if n_ab.abs() != p + 1 {
                        return Err(Error::Internal(format!(
                            "|N({a}, {b})| = {} but the string gives {}",
                            n_ab.abs(),
                            p + 1
                        )));
                    }
                }
            }
        }

        let dim = self.dim();
        for x in 0..dim {
            for y in x + 1..dim {
                for z in y + 1..dim {
                    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
                    for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
                        let inner: BTreeMap<usize, i64> =
                            self.bracket(b, c).into_iter().collect();
                        for (idx, v) in self.bracket_lincomb(a, &inner) {
                            let e = acc.entry(idx).or_insert(0);
                            *e += v;
                            if *e == 0 {
                                acc.remove(&idx);
                            }
                        }
                    }
                    if !acc.is_empty() {
                        return Err(Error::Internal(format!(
                            "Jacobi identity fails on basis triple ({x}, {y}, {z})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Matrix of `ad e_r` on the basis (column `j` is the image of basis
    /// vector `j`).
    pub fn ad_matrix(&self, r: &Root) -> Vec<Vec<i128>> {
        let dim = self.dim();
        let a = self.root_idx(r);
        let mut m = vec![vec![0i128; dim]; dim];
        for j in 0..dim {
            for (target, c) in self.bracket(a, j) {
                m[target][j] += c as i128;
            }
        }
        m
    }

    /// `exp(c t^dt u^du ad e_r)` as an exact polynomial matrix; the
    /// nilpotency of `ad e_r` makes the sum finite, and every division by
    /// `k!` is checked to be exact (Chevalley integrality).
    pub fn exp_monomial(&self, r: &Root, c: i128, dt: u32, du: u32) -> PolyMatrix {
        let dim = self.dim();
        let ad = self.ad_matrix(r);
        let mut out = PolyMatrix::identity(dim);
        let mut power = ad.clone();
        let mut factorial: i128 = 1;
        let mut scalar: i128 = 1;
        let mut k: u32 = 1;
        loop {
            scalar = scalar.checked_mul(c).expect("exp scalar overflow");
            if power.iter().all(|row| row.iter().all(|&v| v == 0)) {
                break;
            }
            for i in 0..dim {
                for j in 0..dim {
                    let v = power[i][j];
                    if v == 0 {
                        continue;
                    }
                    assert!(v % factorial == 0, "adjoint exponential not integral");
                    let coeff = (v / factorial) * scalar;
                    out.at_mut(i, j)
                        .add_assign(&Poly2::monomial(coeff, dt * k, du * k));
                }
            }
            power = mat_mul(&power, &ad);
            k += 1;
            factorial = factorial.checked_mul(k as i128).expect("factorial overflow");
        }
        out
    }

    /// `exp(t ad e_r)` in the formal variable `t`.
    pub fn adjoint_exp(&self, r: &Root) -> PolyMatrix {
        self.exp_monomial(r, 1, 1, 0)
    }
}

fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    let mut out = vec![vec![0i128; n]; n];
    for i in 0..n {
        for k in 0..n {
            let v = a[i][k];
            if v == 0 {
                continue;
            }
            for j in 0..n {
                if b[k][j] != 0 {
                    out[i][j] = out[i][j]
                        .checked_add(v.checked_mul(b[k][j]).expect("matrix overflow"))
                        .expect("matrix overflow");
                }
            }
        }
    }
    out
}

/// Structure constants on positive special pairs, extraspecial pairs
/// seeded with `+(p+1)` and the rest forced by the four-root identity.
fn positive_constants(rs: &RootSystem) -> Result<HashMap<(Root, Root), i64>> {
    let mut order: Vec<Root> = rs.positive_roots.clone();
    order.sort_by_key(chev_key);

    let mut table: HashMap<(Root, Root), i64> = HashMap::new();
    // Fraction-valued signed lookup into the table built so far.
    let lookup = |table: &HashMap<(Root, Root), i64>, a: &Root, b: &Root| -> i64 {
        if chev_key(a) < chev_key(b) {
            *table.get(&(a.clone(), b.clone())).expect("pair computed")
        } else {
            -*table.get(&(b.clone(), a.clone())).expect("pair computed")
        }
    };

    for gamma in &order {
        if gamma.height() == 1 {
            continue;
        }
        // Decompositions gamma = alpha + beta with alpha < beta; the first
        // is extraspecial.
        let mut decomps = Vec::new();
        for alpha in &order {
            let beta = gamma.sub(alpha);
            if beta.is_positive() && rs.contains(&beta) && chev_key(alpha) < chev_key(&beta) {
                decomps.push((alpha.clone(), beta));
            }
        }
        decomps.sort_by_key(|(a, _)| chev_key(a));
        if decomps.is_empty() {
            return Err(Error::Internal(format!(
                "no decomposition for non-simple root {gamma}"
            )));
        }
        let (alpha0, beta0) = decomps[0].clone();
        let (p, _) = rs.root_string(&alpha0, &beta0)?;
        table.insert((alpha0.clone(), beta0.clone()), p + 1);

        let n0 = p + 1;
        let len = |r: &Root| rs.len2(r) as i128;
        for (alpha, beta) in decomps.iter().skip(1) {
            // Four-root identity on (-alpha0, alpha, beta, -beta0); see the
            // module docs. eta and xi are the two cross differences.
            let eta = alpha.sub(&alpha0);
            let xi = beta.sub(&alpha0);
            let mut num: i128 = 0;
            let mut den: i128 = 1;
            if rs.contains(&eta) {
                let t_num = -(lookup(&table, &eta, &alpha0) as i128)
                    * (lookup(&table, &eta, beta) as i128)
                    * len(&eta);
                let t_den = len(alpha) * len(&beta0);
                num = num * t_den + t_num * den;
                den *= t_den;
            }
            if rs.contains(&xi) {
                let t_num = -(lookup(&table, &alpha0, &xi) as i128)
                    * (lookup(&table, &xi, alpha) as i128)
                    * len(&xi);
                let t_den = len(beta) * len(&beta0);
                num = num * t_den + t_num * den;
                den *= t_den;
            }
            num *= len(gamma);
            den *= n0 as i128;
            if den == 0 || num % den != 0 {
                return Err(Error::Internal(format!(
                    "four-root identity produced a non-integer at ({alpha}, {beta})"
                )));
            }
            table.insert((alpha.clone(), beta.clone()), (num / den) as i64);
        }
    }
    Ok(table)
}

/// `N(x, y)` for `x` positive, `y` negative, reduced to a positive pair by
/// the cyclic identity.
fn mixed_constant(
    rs: &RootSystem,
    lookup_pos: &impl Fn(&Root, &Root) -> i64,
    x: &Root,
    y: &Root,
    s: &Root,
) -> i64 {
    let len = |r: &Root| rs.len2(r) as i128;
    let (num, den) = if s.is_positive() {
        // N(x, y) = N(s, -y) |s|^2 / |x|^2
        (
            lookup_pos(s, &y.neg()) as i128 * len(s),
            len(x),
        )
    } else {
        // N(x, y) = N(-s, x) |s|^2 / |y|^2
        (
            lookup_pos(&s.neg(), x) as i128 * len(s),
            len(y),
        )
    };
    debug_assert!(num % den == 0, "cyclic identity not integral");
    (num / den) as i64
}

/// The table of commutator constants `c_ij` for ordered root pairs:
/// `[x_a(t), x_b(u)] = prod x_{i a + j b}(c_ij t^i u^j)`, the product taken
/// over `i, j > 0` with `i a + j b` a root, in increasing `(i + j, i)`.
#[derive(Debug, Clone, Default)]
pub struct CommutatorTable {
    entries: HashMap<(Root, Root), Vec<((i64, i64), i64)>>,
}

impl CommutatorTable {
    /// Compute constants for the given pairs only.
    pub fn build_for<'a>(
        cb: &ChevalleyBasis,
        pairs: impl IntoIterator<Item = (&'a Root, &'a Root)>,
    ) -> Result<CommutatorTable> {
        let mut entries = HashMap::new();
        for (a, b) in pairs {
            entries.insert((a.clone(), b.clone()), commutator_constants(cb, a, b)?);
        }
        Ok(CommutatorTable { entries })
    }

    /// Compute constants for every ordered pair of roots with nonzero sum.
    pub fn build_full(cb: &ChevalleyBasis) -> Result<CommutatorTable> {
        let roots = cb.roots.clone();
        let mut entries = HashMap::new();
        for a in &roots {
            for b in &roots {
                if *b == a.neg() || b == a {
                    continue;
                }
                entries.insert((a.clone(), b.clone()), commutator_constants(cb, a, b)?);
            }
        }
        Ok(CommutatorTable { entries })
    }

    pub fn get(&self, a: &Root, b: &Root) -> Option<&Vec<((i64, i64), i64)>> {
        self.entries.get(&(a.clone(), b.clone()))
    }
}

/// Solve for the `c_ij` of the pair `(a, b)` by matching
/// `E_a(t) E_b(u) E_a(-t) E_b(-u)` against the ordered product of
/// exponentials, then require exact equality of both sides.
pub fn commutator_constants(
    cb: &ChevalleyBasis,
    a: &Root,
    b: &Root,
) -> Result<Vec<((i64, i64), i64)>> {
    if *b == a.neg() {
        return Err(Error::OppositeRoots);
    }
    let rs = &cb.rs;
    let mut support: Vec<(i64, i64)> = Vec::new();
    for i in 1..=4i64 {
        for j in 1..=4i64 {
            if rs.contains(&a.scaled(i).add(&b.scaled(j))) {
                support.push((i, j));
            }
        }
    }
    support.sort_by_key(|&(i, j)| (i + j, i));

    let lhs = cb
        .exp_monomial(a, 1, 1, 0)
        .mul(&cb.exp_monomial(b, 1, 0, 1))
        .mul(&cb.exp_monomial(a, -1, 1, 0))
        .mul(&cb.exp_monomial(b, -1, 0, 1));

    let mut constants = Vec::new();
    let mut acc = PolyMatrix::identity(cb.dim());
    let mut acc_inv = PolyMatrix::identity(cb.dim());
    for &(i, j) in &support {
        let rest = acc_inv.mul(&lhs);
        let coeff = rest.coeff_matrix(i as u32, j as u32);
        let root = a.scaled(i).add(&b.scaled(j));
        let ad = cb.ad_matrix(&root);
        let mut c: Option<i128> = None;
        for (row_c, row_a) in coeff.iter().zip(&ad) {
            for (&vc, &va) in row_c.iter().zip(row_a) {
                if va != 0 {
                    if vc % va != 0 {
                        return Err(Error::Internal(format!(
                            "commutator matching non-integral at ({i},{j}) for ({a}, {b})"
                        )));
                    }
                    c = Some(vc / va);
                    break;
                }
            }
            if c.is_some() {
                break;
            }
        }
        let c = c.ok_or_else(|| Error::Internal("zero adjoint matrix".into()))?;
        // The whole coefficient matrix must match c * ad, not just one entry.
        for (row_c, row_a) in coeff.iter().zip(&ad) {
            for (&vc, &va) in row_c.iter().zip(row_a) {
                if vc != c * va {
                    return Err(Error::Internal(format!(
                        "commutator coefficient at ({i},{j}) for ({a}, {b}) is not a multiple of the adjoint"
                    )));
                }
            }
        }
        constants.push(((i, j), c as i64));
        acc = acc.mul(&cb.exp_monomial(&root, c, i as u32, j as u32));
        acc_inv = cb
            .exp_monomial(&root, -c, i as u32, j as u32)
            .mul(&acc_inv);
    }

    if acc.sub(&lhs).is_zero() {
        Ok(constants)
    } else {
        Err(Error::Internal(format!(
            "commutator product does not reproduce the group commutator for ({a}, {b})"
        )))
    }
}

/// One instance of a group-level Chevalley relation.
#[derive(Debug, Clone)]
pub enum GroupRelation {
    /// Torus elements commute.
    Diag { i: usize, j: usize },
    /// `h_delta(v) x_alpha(u) h_delta(v)^{-1} = x_alpha(v^{<alpha, delta>} u)`.
    DiagUni { node: usize, root: Root },
    /// Root subgroups with non-root, nonzero sum commute.
    Uni1 { a: Root, b: Root },
    /// The commutator formula with constants `c_ij`.
    Uni2 { a: Root, b: Root },
}

impl std::fmt::Display for GroupRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupRelation::Diag { i, j } => write!(f, "Diag (d{}, d{})", i + 1, j + 1),
            GroupRelation::DiagUni { node, root } => {
                write!(f, "Diag-uni (d{}, {root})", node + 1)
            }
            GroupRelation::Uni1 { a, b } => write!(f, "Uni-1 ({a}, {b})"),
            GroupRelation::Uni2 { a, b } => write!(f, "Uni-2 ({a}, {b})"),
        }
    }
}

/// Verify one relation instance exactly; `Err` carries the first
/// difference as a witness.
pub fn verify_group_relation(cb: &ChevalleyBasis, rel: &GroupRelation) -> Result<()> {
    match rel {
        GroupRelation::Diag { i, j } => verify_diag(cb, *i, *j),
        GroupRelation::DiagUni { node, root } => verify_diag_uni(cb, *node, root),
        GroupRelation::Uni1 { a, b } => {
            let s = a.add(b);
            if cb.rs.contains(&s) || s.coords.iter().all(|&c| c == 0) {
                return Err(Error::Internal(format!(
                    "Uni-1 applied to a summing pair ({a}, {b})"
                )));
            }
            let ea = cb.exp_monomial(a, 1, 1, 0);
            let eb = cb.exp_monomial(b, 1, 0, 1);
            let lhs = ea.mul(&eb);
            let rhs = eb.mul(&ea);
            match lhs.first_difference(&rhs) {
                None => Ok(()),
                Some(w) => Err(Error::Internal(format!("Uni-1 ({a}, {b}): {w}"))),
            }
        }
        GroupRelation::Uni2 { a, b } => {
            // commutator_constants already enforces the full identity.
            commutator_constants(cb, a, b).map(|_| ())
        }
    }
}

/// Exponent of the diagonal torus action of node `i` on basis vector `b`.
fn torus_exponent(cb: &ChevalleyBasis, i: usize, b: usize) -> i64 {
    if b < cb.roots.len() {
        cb.rs.pairing(&cb.roots[b], i).expect("valid node")
    } else {
        0
    }
}

fn big_pow(v: i64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(v));
    if e >= 0 {
        num::traits::Pow::pow(base, e as u64)
    } else {
        num::traits::Pow::pow(base, (-e) as u64).recip()
    }
}

fn verify_diag(cb: &ChevalleyBasis, i: usize, j: usize) -> Result<()> {
    let dim = cb.dim();
    for (v, w) in [(2i64, 3i64), (3, 5), (5, 2), (7, 11), (4, 9)] {
        let di: Vec<BigRational> = (0..dim).map(|b| big_pow(v, torus_exponent(cb, i, b))).collect();
        let dj: Vec<BigRational> = (0..dim).map(|b| big_pow(w, torus_exponent(cb, j, b))).collect();
        for b in 0..dim {
            let lhs = &di[b] * &dj[b];
            let rhs = &dj[b] * &di[b];
            if lhs != rhs {
                return Err(Error::Internal(format!(
                    "Diag (d{}, d{}) differs at basis {b} for (v, w) = ({v}, {w})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// Check `D(v) exp(u ad e_alpha) D(v)^{-1} = exp(v^k u ad e_alpha)` with
/// `k = <alpha, delta^vee>`, coefficient-wise in `u`, exactly over the
/// rationals at `max degree + 1` integer points (at least five).
fn verify_diag_uni(cb: &ChevalleyBasis, node: usize, alpha: &Root) -> Result<()> {
    let dim = cb.dim();
    let k = cb.rs.pairing(alpha, node)?;
    let p_mat = cb.exp_monomial(alpha, 1, 0, 1);
    let max_s = (0..dim * dim)
        .map(|idx| p_mat.entries[idx].max_deg_u())
        .max()
        .unwrap_or(0);
    let n_points = (max_s as usize + 1).max(5);
    for v in 2..2 + n_points as i64 {
        let d: Vec<BigRational> = (0..dim)
            .map(|b| big_pow(v, torus_exponent(cb, node, b)))
            .collect();
        for s in 0..=max_s {
            let scale = big_pow(v, k * s as i64);
            let coeff = p_mat.coeff_matrix(0, s);
            for i in 0..dim {
                for j in 0..dim {
                    if coeff[i][j] == 0 {
                        continue;
                    }
                    let c = BigRational::from_integer(BigInt::from(coeff[i][j] as i64));
                    let lhs = &d[i] * &c / &d[j];
                    let rhs = &scale * &c;
                    if lhs != rhs {
                        return Err(Error::Internal(format!(
                            "Diag-uni (d{}, {alpha}) differs at entry ({i},{j}), u^{s}, v = {v}",
                            node + 1
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// The `SL_2` identity behind the opposite-root relation:
/// `(1+E12)(1+pE21) = (1+p(1+p)^{-1}E21)((1+p)E11+(1+p)^{-1}E22)(1+(1+p)^{-1}E12)`,
/// checked entrywise mod `p^k` and as an exact rational identity.
pub fn verify_uni3_sl2(p: u64, k: u32) -> Result<()> {
    use crate::ncseries::Modulus;
    let m = Modulus::new(p, k)?;
    let inv = m.inv((1 + p) % m.pk)?;
    let mul2 = |a: [[u64; 2]; 2], b: [[u64; 2]; 2]| -> [[u64; 2]; 2] {
        let mut out = [[0u64; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = m.add(m.mul(a[i][0], b[0][j]), m.mul(a[i][1], b[1][j]));
            }
        }
        out
    };
    let lhs = mul2([[1, 1], [0, 1]], [[1, 0], [p % m.pk, 1]]);
    let rhs = mul2(
        mul2(
            [[1, 0], [m.mul(p % m.pk, inv), 1]],
            [[(1 + p) % m.pk, 0], [0, inv]],
        ),
        [[1, inv], [0, 1]],
    );
    if lhs != rhs {
        return Err(Error::Internal(format!(
            "SL2 identity fails mod {p}^{k}: {lhs:?} vs {rhs:?}"
        )));
    }

    // Exact rational route.
    let q = BigRational::from_integer(BigInt::from(p));
    let one = BigRational::one();
    let inv_q = (&one + &q).recip();
    let rmul = |a: [[BigRational; 2]; 2], b: [[BigRational; 2]; 2]| {
        let mut out = [
            [BigRational::zero(), BigRational::zero()],
            [BigRational::zero(), BigRational::zero()],
        ];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
            }
        }
        out
    };
    let lhs_q = rmul(
        [[one.clone(), one.clone()], [BigRational::zero(), one.clone()]],
        [[one.clone(), BigRational::zero()], [q.clone(), one.clone()]],
    );
    let rhs_q = rmul(
        rmul(
            [
                [one.clone(), BigRational::zero()],
                [&q * &inv_q, one.clone()],
            ],
            [
                [&one + &q, BigRational::zero()],
                [BigRational::zero(), inv_q.clone()],
            ],
        ),
        [[one.clone(), inv_q.clone()], [BigRational::zero(), one.clone()]],
    );
    for i in 0..2 {
        for j in 0..2 {
            if lhs_q[i][j] != rhs_q[i][j] {
                return Err(Error::Internal(format!(
                    "SL2 identity fails over Q at entry ({i},{j})"
                )));
            }
        }
    }
    let det = &rhs_q[0][0] * &rhs_q[1][1] - &rhs_q[0][1] * &rhs_q[1][0];
    if det != one || lhs_q[0][0].is_negative() {
        return Err(Error::Internal("SL2 identity: determinant is not 1".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(name: &str) -> ChevalleyBasis {
        let rs = Arc::new(RootSystem::new(name.parse().unwrap()).unwrap());
        ChevalleyBasis::new(rs).unwrap()
    }

    fn root(v: &[i64]) -> Root {
        Root::new(v.to_vec())
    }

    #[test]
    fn a2_extraspecial_sign() {
        let cb = basis("A2");
        assert_eq!(cb.n_const(&root(&[1, 0]), &root(&[0, 1])).unwrap(), 1);
        assert_eq!(cb.n_const(&root(&[0, 1]), &root(&[1, 0])).unwrap(), -1);
        // Non-summing pair has no constant.
        assert_eq!(cb.n_const(&root(&[1, 1]), &root(&[1, 0])).unwrap(), 0);
        assert!(cb.n_const(&root(&[1, 0]), &root(&[-1, 0])).is_err());
    }

    #[test]
    fn b2_string_lengths() {
        let cb = basis("B2");
        let long = root(&[1, 0]);
        let short = root(&[0, 1]);
        assert_eq!(cb.n_const(&short, &long).unwrap().abs(), 1);
        assert_eq!(cb.n_const(&short, &root(&[1, 1])).unwrap().abs(), 2);
    }

    #[test]
    fn construction_verifies_for_small_types() {
        for name in ["A1", "A2", "A3", "B2", "B3", "C3", "G2", "F4"] {
            let _ = basis(name);
        }
    }

    #[test]
    fn adjoint_exp_examples() {
        let cb = basis("A1");
        let alpha = root(&[1]);
        // t = 0 is the identity.
        let e = cb.adjoint_exp(&alpha);
        let at_zero = e.eval(0, 0);
        for i in 0..cb.dim() {
            for j in 0..cb.dim() {
                assert_eq!(at_zero[i][j], i128::from(i == j));
            }
        }
        // (ad e_alpha)^3 = 0 in the 3-dimensional adjoint: max degree 2.
        let max_deg = e.entries.iter().map(Poly2::max_deg_t).max().unwrap();
        assert_eq!(max_deg, 2);
    }

    #[test]
    fn adjoint_exp_one_parameter_subgroup() {
        for name in ["A2", "B2", "G2"] {
            let cb = basis(name);
            for r in cb.roots.clone() {
                let e = cb.adjoint_exp(&r);
                for (t, u) in [(1i128, 2i128), (3, 4), (-2, 5)] {
                    let lhs = mat_mul(&e.eval(t, 0), &e.eval(u, 0));
                    let rhs = e.eval(t + u, 0);
                    assert_eq!(lhs, rhs, "{name} {r}");
                }
            }
        }
    }

    #[test]
    fn adjoint_exp_det_one() {
        // det(exp(t ad e)) = 1: checked as an exact integer determinant at
        // enough points to pin the determinant polynomial.
        for name in ["A1", "A2", "B2"] {
            let cb = basis(name);
            for r in cb.roots.clone() {
                let e = cb.adjoint_exp(&r);
                let maxd = e.entries.iter().map(Poly2::max_deg_t).max().unwrap() as i128;
                let points = (maxd * cb.dim() as i128 + 1).max(3);
                for t in 0..points {
                    let m = e.eval(t, 0);
                    assert_eq!(bigint_det(&m), BigInt::from(1), "{name} {r} t={t}");
                }
            }
        }
    }

    fn bigint_det(m: &[Vec<i128>]) -> BigInt {
        // Fraction-free Gaussian elimination (Bareiss).
        let n = m.len();
        let mut a: Vec<Vec<BigInt>> = m
            .iter()
            .map(|row| row.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        let mut sign = BigInt::from(1);
        let mut prev = BigInt::from(1);
        for k in 0..n - 1 {
            if a[k][k] == BigInt::zero() {
                let swap = (k + 1..n).find(|&r| a[r][k] != BigInt::zero());
                match swap {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    #[test]
    fn commutator_constants_a2() {
        let cb = basis("A2");
        let c = commutator_constants(&cb, &root(&[1, 0]), &root(&[0, 1])).unwrap();
        assert_eq!(c, vec![((1, 1), 1)]);
        let c = commutator_constants(&cb, &root(&[0, 1]), &root(&[1, 0])).unwrap();
        assert_eq!(c, vec![((1, 1), -1)]);
        // theta + d1 is not a root: empty table.
        let c = commutator_constants(&cb, &root(&[1, 1]), &root(&[1, 0])).unwrap();
        assert!(c.is_empty());
        assert!(commutator_constants(&cb, &root(&[1, 0]), &root(&[-1, 0])).is_err());
    }

    #[test]
    fn commutator_constants_g2_support() {
        let cb = basis("G2");
        let c = commutator_constants(&cb, &root(&[1, 0]), &root(&[0, 1])).unwrap();
        let support: Vec<(i64, i64)> = c.iter().map(|&(ij, _)| ij).collect();
        assert_eq!(support, vec![(1, 1), (2, 1), (3, 1), (3, 2)]);
    }

    #[test]
    fn commutator_c11_matches_structure_constant_and_string() {
        for name in ["A2", "A3", "B2", "B3", "G2"] {
            let cb = basis(name);
            let roots = cb.roots.clone();
            for a in &roots {
                for b in &roots {
                    if a == b || *b == a.neg() {
                        continue;
                    }
                    let c = commutator_constants(&cb, a, b).unwrap();
                    let sum = a.add(b);
                    if cb.rs.contains(&sum) {
                        let c11 = c
                            .iter()
                            .find(|&&(ij, _)| ij == (1, 1))
                            .map(|&(_, v)| v)
                            .unwrap();
                        assert_eq!(c11, cb.n_const(a, b).unwrap(), "{name} ({a}, {b})");
                        let (p, _) = cb.rs.root_string(a, b).unwrap();
                        assert_eq!(c11.abs(), p + 1, "{name} ({a}, {b})");
                    } else {
                        assert!(c.is_empty(), "{name} ({a}, {b})");
                    }
                    // Support is exactly the roots of the form ia + jb.
                    for &((i, j), v) in &c {
                        assert!(cb.rs.contains(&a.scaled(i).add(&b.scaled(j))));
                        let _ = v;
                    }
                }
            }
        }
    }

    #[test]
    fn uni2_matches_integer_evaluation_oracle() {
        // Independent route: evaluate both sides of the commutator formula
        // at integer parameter points and compare as integer matrices.
        let cb = basis("A2");
        let a = root(&[1, 0]);
        let b = root(&[0, 1]);
        let c = commutator_constants(&cb, &a, &b).unwrap();
        for (t, u) in [(1i128, 1i128), (2, 3), (3, 2), (4, 5), (5, 4)] {
            let lhs = mat_mul(
                &mat_mul(
                    &cb.exp_monomial(&a, 1, 1, 0).eval(t, 0),
                    &cb.exp_monomial(&b, 1, 0, 1).eval(0, u),
                ),
                &mat_mul(
                    &cb.exp_monomial(&a, -1, 1, 0).eval(t, 0),
                    &cb.exp_monomial(&b, -1, 0, 1).eval(0, u),
                ),
            );
            let mut rhs = {
                let dim = cb.dim();
                let mut id = vec![vec![0i128; dim]; dim];
                for (i, row) in id.iter_mut().enumerate() {
                    row[i] = 1;
                }
                id
            };
            for &((i, j), v) in &c {
                let r = a.scaled(i).add(&b.scaled(j));
                let factor = cb
                    .exp_monomial(&r, v as i128, 1, 1)
                    .eval(t.pow(i as u32), u.pow(j as u32));
                rhs = mat_mul(&rhs, &factor);
            }
            assert_eq!(lhs, rhs, "t={t} u={u}");
        }
    }

    #[test]
    fn group_relations_a2_b2() {
        for name in ["A2", "B2"] {
            let cb = basis(name);
            let roots = cb.roots.clone();
            for a in &roots {
                for b in &roots {
                    if a == b || *b == a.neg() {
                        continue;
                    }
                    let s = a.add(b);
                    let rel = if cb.rs.contains(&s) {
                        GroupRelation::Uni2 {
                            a: a.clone(),
                            b: b.clone(),
                        }
                    } else if s.coords.iter().all(|&x| x == 0) {
                        continue;
                    } else {
                        GroupRelation::Uni1 {
                            a: a.clone(),
                            b: b.clone(),
                        }
                    };
                    verify_group_relation(&cb, &rel).unwrap();
                }
            }
            for node in 0..cb.rs.rank() {
                for alpha in &roots {
                    verify_group_relation(
                        &cb,
                        &GroupRelation::DiagUni {
                            node,
                            root: alpha.clone(),
                        },
                    )
                    .unwrap();
                }
                for node2 in 0..cb.rs.rank() {
                    verify_group_relation(&cb, &GroupRelation::Diag { i: node, j: node2 })
                        .unwrap();
                }
            }
        }
    }

    #[test]
    fn uni3_sl2() {
        use crate::ncseries::Modulus;
        let m = Modulus::new(5, 2).unwrap();
        assert_eq!(m.inv(6).unwrap(), 21);
        verify_uni3_sl2(5, 2).unwrap();
        verify_uni3_sl2(5, 4).unwrap();
        verify_uni3_sl2(7, 3).unwrap();
    }
}
