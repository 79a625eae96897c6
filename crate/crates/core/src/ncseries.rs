//! Truncated noncommutative power series over `Z/p^K`, with the weighted
//! degree filtration of the generator table, and exact p-adic binomial
//! coefficients.
//!
//! A polynomial lives in a shared context (generator weights, modulus,
//! truncation bound `N`); all products are computed "mod Fil^{N+1}", i.e.
//! words of weighted degree above the bound are dropped.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Gen = u16;
pub type Word = Vec<Gen>;

/// `p^k` with overflow checking; coefficients are residues below `pk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Modulus {
    pub p: u64,
    pub k: u32,
    pub pk: u64,
}

impl Modulus {
    pub fn new(p: u64, k: u32) -> Result<Modulus> {
        if p < 2 || k == 0 {
            return Err(Error::ModulusOverflow { p, k });
        }
        let pk = p
            .checked_pow(k)
            .ok_or(Error::ModulusOverflow { p, k })?;
        Ok(Modulus { p, k, pk })
    }

    pub fn reduce_i128(&self, v: i128) -> u64 {
        let m = self.pk as i128;
        (((v % m) + m) % m) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.pk as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.pk - b % self.pk)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pk as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.pk - a
        }
    }

    /// Inverse of a unit modulo `p^k`, by extended Euclid.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let (g, x, _) = ext_gcd(a as i128, self.pk as i128);
        if g != 1 {
            return Err(Error::Internal(format!(
                "attempted to invert the non-unit {a} mod {}",
                self.pk
            )));
        }
        Ok(self.reduce_i128(x))
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Shared ring context: generator weights, coefficient modulus, and the
/// weighted-degree truncation bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesCtx {
    pub weights: Vec<i64>,
    pub modulus: Modulus,
    pub bound: i64,
}

impl SeriesCtx {
    pub fn new(weights: Vec<i64>, modulus: Modulus, bound: i64) -> Arc<SeriesCtx> {
        Arc::new(SeriesCtx {
            weights,
            modulus,
            bound,
        })
    }

    pub fn weighted_degree(&self, w: &[Gen]) -> i64 {
        w.iter().map(|&g| self.weights[g as usize]).sum()
    }
}

/// Weighted degree of a word under a weight table; the empty word has
/// degree 0.
pub fn weighted_degree(word: &[Gen], weights: &[i64]) -> i64 {
    word.iter().map(|&g| weights[g as usize]).sum()
}

/// A finitely supported map from words to residues, truncated in weighted
/// degree. Immutable value semantics: every operation returns a fresh
/// polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NCPoly {
    pub ctx: Arc<SeriesCtx>,
    terms: BTreeMap<Word, u64>,
}

impl NCPoly {
    pub fn zero(ctx: &Arc<SeriesCtx>) -> NCPoly {
        NCPoly {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Arc<SeriesCtx>) -> NCPoly {
        let mut p = NCPoly::zero(ctx);
        p.insert(Vec::new(), 1);
        p
    }

    /// The single generator `X_i`.
    pub fn gen(ctx: &Arc<SeriesCtx>, i: Gen) -> NCPoly {
        let mut p = NCPoly::zero(ctx);
        p.insert(vec![i], 1);
        p
    }

    pub fn one_plus_gen(ctx: &Arc<SeriesCtx>, i: Gen) -> NCPoly {
        let mut p = NCPoly::one(ctx);
        p.insert(vec![i], 1);
        p
    }

    pub fn from_word(ctx: &Arc<SeriesCtx>, word: Word, coeff: u64) -> NCPoly {
        let mut p = NCPoly::zero(ctx);
        p.insert(word, coeff);
        p
    }

    fn insert(&mut self, word: Word, coeff: u64) {
        if self.ctx.weighted_degree(&word) > self.ctx.bound {
            return;
        }
        let c = coeff % self.ctx.modulus.pk;
        if c == 0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(word) {
            Entry::Occupied(mut e) => {
                let v = self.ctx.modulus.add(*e.get(), c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Word, u64> {
        &self.terms
    }

    pub fn coeff(&self, word: &[Gen]) -> u64 {
        self.terms.get(word).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in the stable export order: length first, then lex.
    pub fn terms_sorted(&self) -> Vec<(Word, u64)> {
        let mut v: Vec<(Word, u64)> = self.terms.iter().map(|(w, &c)| (w.clone(), c)).collect();
        v.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
        v
    }

    fn check_ctx(&self, other: &NCPoly) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &NCPoly) -> Result<NCPoly> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            let e = out.terms.entry(w.clone()).or_insert(0);
            *e = out.ctx.modulus.add(*e, c);
        }
        out.terms.retain(|_, &mut c| c != 0);
        Ok(out)
    }

    pub fn sub(&self, other: &NCPoly) -> Result<NCPoly> {
        self.check_ctx(other)?;
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            let e = out.terms.entry(w.clone()).or_insert(0);
            *e = out.ctx.modulus.sub(*e, c);
        }
        out.terms.retain(|_, &mut c| c != 0);
        Ok(out)
    }

    pub fn scale(&self, c: u64) -> NCPoly {
        let mut out = NCPoly::zero(&self.ctx);
        for (w, &v) in &self.terms {
            let cv = self.ctx.modulus.mul(v, c);
            if cv != 0 {
                out.terms.insert(w.clone(), cv);
            }
        }
        out
    }

    /// Concatenation-convolution product, truncated at the bound.
    pub fn mul(&self, other: &NCPoly) -> Result<NCPoly> {
        self.check_ctx(other)?;
        let mut out = NCPoly::zero(&self.ctx);
        for (wa, &ca) in &self.terms {
            let da = self.ctx.weighted_degree(wa);
            for (wb, &cb) in &other.terms {
                if da + self.ctx.weighted_degree(wb) > self.ctx.bound {
                    continue;
                }
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                let c = self.ctx.modulus.mul(ca, cb);
                if c == 0 {
                    continue;
                }
                let e = out.terms.entry(w).or_insert(0);
                *e = self.ctx.modulus.add(*e, c);
            }
        }
        out.terms.retain(|_, &mut c| c != 0);
        Ok(out)
    }

    /// Drop every word of weighted degree above `n` (reduce mod
    /// `Fil^{n+1}`).
    pub fn reduce_mod_fil(&self, n: i64) -> NCPoly {
        let mut out = NCPoly::zero(&self.ctx);
        for (w, &c) in &self.terms {
            if self.ctx.weighted_degree(w) <= n {
                out.terms.insert(w.clone(), c);
            }
        }
        out
    }

    /// Reduce the coefficient ring to `F_p` (same weights and bound).
    pub fn to_mod_p(&self) -> NCPoly {
        let modulus = Modulus::new(self.ctx.modulus.p, 1).expect("p fits");
        let ctx = SeriesCtx::new(self.ctx.weights.clone(), modulus, self.ctx.bound);
        let mut out = NCPoly::zero(&ctx);
        for (w, &c) in &self.terms {
            let cp = c % modulus.p;
            if cp != 0 {
                out.terms.insert(w.clone(), cp);
            }
        }
        out
    }

    /// `(1 + X_i)^M` as a truncated binomial series. The exponent may be a
    /// p-adic scalar (checked for sufficient precision) or an exact
    /// integer (no precision limit).
    pub fn one_plus_pow(ctx: &Arc<SeriesCtx>, i: Gen, exponent: &Exponent) -> Result<NCPoly> {
        let w = ctx.weights[i as usize];
        let max_m = (ctx.bound / w).max(0) as u64;
        let mut out = NCPoly::zero(ctx);
        for m in 0..=max_m {
            let c = match exponent {
                Exponent::Padic(s) => binom_padic(s, m, ctx.modulus.k)?,
                Exponent::Int(n) => binom_exact_int(*n, m, ctx.modulus.p, ctx.modulus.k),
            };
            if c % ctx.modulus.pk != 0 {
                out.terms.insert(vec![i; m as usize], c % ctx.modulus.pk);
            }
        }
        Ok(out)
    }
}

/// Exponent for `(1 + X)^M`.
#[derive(Debug, Clone)]
pub enum Exponent {
    Padic(PadicScalar),
    Int(i64),
}

/// A p-adic integer known to finite precision: a residue mod
/// `p^precision`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadicScalar {
    pub residue: u64,
    pub p: u64,
    pub precision: u32,
}

impl PadicScalar {
    pub fn from_int(n: i64, p: u64, precision: u32) -> Result<PadicScalar> {
        let m = Modulus::new(p, precision)?;
        Ok(PadicScalar {
            residue: m.reduce_i128(n as i128),
            p,
            precision,
        })
    }

    /// `(1 + p)^e` mod `p^precision`, with negative exponents via the
    /// modular inverse.
    pub fn one_plus_p_pow(e: i64, p: u64, precision: u32) -> Result<PadicScalar> {
        let m = Modulus::new(p, precision)?;
        let base = if e >= 0 {
            (1 + p) % m.pk
        } else {
            m.inv((1 + p) % m.pk)?
        };
        let mut acc = 1u64;
        for _ in 0..e.unsigned_abs() {
            acc = m.mul(acc, base);
        }
        Ok(PadicScalar {
            residue: acc,
            p,
            precision,
        })
    }

    pub fn add(&self, other: &PadicScalar) -> PadicScalar {
        assert_eq!(self.p, other.p);
        let precision = self.precision.min(other.precision);
        let m = Modulus::new(self.p, precision).expect("smaller modulus fits");
        PadicScalar {
            residue: m.add(self.residue % m.pk, other.residue % m.pk),
            p: self.p,
            precision,
        }
    }

    pub fn residue_mod(&self, k: u32) -> u64 {
        assert!(k <= self.precision);
        self.residue % self.p.pow(k)
    }
}

/// p-adic valuation and base-p digit sum of `n >= 1`.
pub fn vp_and_sp(n: u64, p: u64) -> (u32, u64) {
    assert!(n >= 1 && p >= 2);
    let mut v = 0u32;
    let mut m = n;
    while m % p == 0 {
        v += 1;
        m /= p;
    }
    let mut s = 0u64;
    let mut m = n;
    while m > 0 {
        s += m % p;
        m /= p;
    }
    (v, s)
}

/// `v_p(n!) = (n - s_p(n)) / (p - 1)`; `v_p(0!) = 0`.
pub fn vp_factorial(n: u64, p: u64) -> u32 {
    if n == 0 {
        return 0;
    }
    let (_, s) = vp_and_sp(n, p);
    ((n - s) / (p - 1)) as u32
}

/// Binomial coefficient `C(M, m)` of a p-adic scalar, reduced mod
/// `p^k_target`. Exact because the falling factorial is accumulated at the
/// scalar's full precision before the division by `m!`; errors out rather
/// than silently losing digits when the precision cannot support that.
pub fn binom_padic(scalar: &PadicScalar, m: u64, k_target: u32) -> Result<u64> {
    if m == 0 {
        return Ok(1);
    }
    let needed = k_target + vp_factorial(m, scalar.p);
    if scalar.precision < needed {
        return Err(Error::PrecisionTooLow {
            needed,
            have: scalar.precision,
        });
    }
    let work = Modulus::new(scalar.p, scalar.precision)?;
    // Falling factorial M (M-1) ... (M-m+1) mod p^precision.
    let mut num = 1u64;
    for t in 0..m {
        let factor = work.sub(scalar.residue, (t as u128 % work.pk as u128) as u64);
        num = work.mul(num, factor);
    }
    // m! = p^v * unit; divide the p-part out of the residue (exact), then
    // multiply by the inverse of the unit at the target precision.
    let v = vp_factorial(m, scalar.p);
    let target = Modulus::new(scalar.p, k_target)?;
    let mut stripped = num;
    for _ in 0..v {
        debug_assert!(stripped % scalar.p == 0, "falling factorial lacks p-power");
        stripped /= scalar.p;
    }
    let mut unit = 1u64;
    for t in 1..=m {
        let mut f = t;
        while f % scalar.p == 0 {
            f /= scalar.p;
        }
        unit = target.mul(unit, f % target.pk);
    }
    Ok(target.mul(stripped % target.pk, target.inv(unit)?))
}

/// Binomial coefficient `C(n, m) mod p^k` for an exact (possibly negative)
/// integer `n`, by stripping p-powers factor by factor. Total: no
/// precision ceiling.
pub fn binom_exact_int(n: i64, m: u64, p: u64, k: u32) -> u64 {
    let modulus = Modulus::new(p, k).expect("modulus fits");
    if m == 0 {
        return 1 % modulus.pk;
    }
    let mut vp_total: i64 = 0;
    let mut unit: u64 = 1;
    let mut negative = false;
    for t in 0..m as i64 {
        let mut f = n - t;
        if f == 0 {
            return 0;
        }
        if f < 0 {
            negative = !negative;
            f = -f;
        }
        let mut fu = f as u64;
        while fu % p == 0 {
            fu /= p;
            vp_total += 1;
        }
        unit = modulus.mul(unit, fu % modulus.pk);
    }
    let mut den_unit: u64 = 1;
    for t in 1..=m {
        let mut f = t;
        while f % p == 0 {
            f /= p;
            vp_total -= 1;
        }
        den_unit = modulus.mul(den_unit, f % modulus.pk);
    }
    debug_assert!(vp_total >= 0, "binomial of integers is an integer");
    if vp_total as u32 >= k {
        return 0;
    }
    let mut out = modulus.mul(unit, modulus.inv(den_unit).expect("unit"));
    for _ in 0..vp_total {
        out = modulus.mul(out, p % modulus.pk);
    }
    if negative {
        modulus.neg(out)
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(weights: Vec<i64>, p: u64, k: u32, bound: i64) -> Arc<SeriesCtx> {
        SeriesCtx::new(weights, Modulus::new(p, k).unwrap(), bound)
    }

    // A1 generator table: U (weight 1), W (weight 2), V (weight 1).
    fn a1(bound: i64) -> Arc<SeriesCtx> {
        ctx(vec![1, 2, 1], 5, 3, bound)
    }

    const U: Gen = 0;
    const W: Gen = 1;
    const V: Gen = 2;

    #[test]
    fn weighted_degree_examples() {
        let c = a1(8);
        assert_eq!(c.weighted_degree(&[V]), 1);
        assert_eq!(c.weighted_degree(&[V, U, W]), 4);
        assert_eq!(c.weighted_degree(&[]), 0);
        // A2 table: U_{-theta} weight 1, ..., V_theta weight 2.
        let a2 = ctx(vec![1, 2, 2, 3, 3, 1, 2, 1], 5, 1, 6);
        assert_eq!(a2.weighted_degree(&[0, 6]), 3);
    }

    #[test]
    fn mul_examples() {
        let c = a1(8);
        let one = NCPoly::one(&c);
        let f = NCPoly::one_plus_gen(&c, V);
        assert_eq!(f.mul(&one).unwrap(), f);

        let g = NCPoly::one_plus_gen(&c, U);
        let fg = f.mul(&g).unwrap();
        assert_eq!(fg.coeff(&[]), 1);
        assert_eq!(fg.coeff(&[V]), 1);
        assert_eq!(fg.coeff(&[U]), 1);
        assert_eq!(fg.coeff(&[V, U]), 1);
        assert_eq!(fg.coeff(&[U, V]), 0);

        let tight = a1(1);
        let v = NCPoly::gen(&tight, V);
        assert!(v.mul(&v).unwrap().is_zero());
    }

    #[test]
    fn ring_mismatch_rejected() {
        let c1 = a1(8);
        let c2 = a1(9);
        let f = NCPoly::one(&c1);
        let g = NCPoly::one(&c2);
        assert!(matches!(f.mul(&g), Err(Error::RingMismatch)));
    }

    #[test]
    fn vp_sp_examples() {
        assert_eq!(vp_and_sp(10, 5), (1, 2));
        assert_eq!(vp_factorial(10, 5), 2);
        assert_eq!(vp_and_sp(1, 7), (0, 1));
        assert_eq!(vp_and_sp(125, 5), (3, 1));
        let mut direct = 0u32;
        for t in 1..=20u64 {
            let (v, _) = vp_and_sp(t, 5);
            direct += v;
        }
        assert_eq!(vp_factorial(20, 5), direct);
    }

    #[test]
    fn binom_examples() {
        let m6 = PadicScalar::from_int(6, 5, 4).unwrap();
        assert_eq!(binom_padic(&m6, 2, 1).unwrap(), 0); // C(6,2) = 15
        assert_eq!(binom_padic(&m6, 0, 1).unwrap(), 1);
        let m10 = PadicScalar::from_int(10, 5, 4).unwrap();
        assert_eq!(binom_padic(&m10, 3, 1).unwrap(), 0); // C(10,3) = 120
        assert_eq!(binom_exact_int(10, 3, 5, 2), 120 % 25);
        assert_eq!(binom_exact_int(36, 2, 5, 3), 630 % 125);
        // Insufficient precision must error, never truncate.
        let low = PadicScalar::from_int(6, 5, 1).unwrap();
        assert!(matches!(
            binom_padic(&low, 5, 1),
            Err(Error::PrecisionTooLow { .. })
        ));
    }

    #[test]
    fn binom_negative_integer() {
        // C(-2, m) = (-1)^m (m+1)
        for m in 0..6u64 {
            let expect = (m + 1) as i64 * if m % 2 == 0 { 1 } else { -1 };
            let modulus = Modulus::new(5, 3).unwrap();
            assert_eq!(
                binom_exact_int(-2, m, 5, 3),
                modulus.reduce_i128(expect as i128)
            );
        }
    }

    #[test]
    fn one_plus_pow_m36() {
        // (1+V)^36 over F_5 truncated at weight 4: C(36, m) = 0 mod 5 for
        // 2 <= m <= 4 (630, 7140, 58905), leaving 1 + V.
        let c = ctx(vec![1, 2, 1], 5, 1, 4);
        let m = PadicScalar::from_int(36, 5, 3).unwrap();
        let f = NCPoly::one_plus_pow(&c, V, &Exponent::Padic(m)).unwrap();
        assert_eq!(f, NCPoly::one_plus_gen(&c, V));
        assert_eq!(binom_exact_int(36, 2, 5, 1), 0);
        assert_eq!(binom_exact_int(36, 3, 5, 1), 0);
        assert_eq!(binom_exact_int(36, 4, 5, 1), 0);
    }

    #[test]
    fn one_plus_pow_unit_exponent() {
        let c = a1(8);
        let one = PadicScalar::from_int(1, 5, 5).unwrap();
        let f = NCPoly::one_plus_pow(&c, V, &Exponent::Padic(one)).unwrap();
        assert_eq!(f, NCPoly::one_plus_gen(&c, V));
    }

    #[test]
    fn inverse_exponent_binomials_vanish() {
        // Q = (1+p)^{-1} = 1 mod p, so C(Q, m) = 0 mod p for 2 <= m <= p-2.
        let p = 5u64;
        for m in 2..=(p - 2) {
            let prec = 1 + vp_factorial(m, p);
            let q = PadicScalar::one_plus_p_pow(-1, p, prec).unwrap();
            assert_eq!(binom_padic(&q, m, 1).unwrap(), 0, "m = {m}");
        }
    }

    #[test]
    fn exponent_additivity() {
        let c = a1(6);
        for (e1, e2) in [(1i64, 1i64), (2, 3), (-1, 1), (4, -2)] {
            let prec = 8;
            let m1 = PadicScalar::one_plus_p_pow(e1, 5, prec).unwrap();
            let m2 = PadicScalar::one_plus_p_pow(e2, 5, prec).unwrap();
            let m12 = PadicScalar::one_plus_p_pow(e1 + e2, 5, prec).unwrap();
            let f1 = NCPoly::one_plus_pow(&c, V, &Exponent::Padic(m1)).unwrap();
            let f2 = NCPoly::one_plus_pow(&c, V, &Exponent::Padic(m2)).unwrap();
            let f12 = NCPoly::one_plus_pow(&c, V, &Exponent::Padic(m12)).unwrap();
            assert_eq!(f1.mul(&f2).unwrap(), f12, "exponents {e1}+{e2}");
        }
    }

    #[test]
    fn reduce_mod_fil_examples() {
        let c = a1(8);
        let f = NCPoly::gen(&c, U)
            .mul(&NCPoly::gen(&c, W))
            .unwrap(); // weight 3
        assert!(f.reduce_mod_fil(2).is_zero());
        assert_eq!(f.reduce_mod_fil(8), f);

        let fg = NCPoly::one_plus_gen(&c, V)
            .mul(&NCPoly::one_plus_gen(&c, U))
            .unwrap();
        let r = fg.reduce_mod_fil(1);
        assert_eq!(r.coeff(&[]), 1);
        assert_eq!(r.coeff(&[V]), 1);
        assert_eq!(r.coeff(&[U]), 1);
        assert_eq!(r.coeff(&[V, U]), 0);
    }

    #[test]
    fn padic_binomial_lemma_in_machine_range() {
        // C(c p^k, r) = 0 mod p via the p-adic route, on the range where
        // the scalar precision fits u64. The exhaustive range is covered by
        // binom_exact_int in the acceptance suite.
        for p in [5u64, 7, 11] {
            for k in 1..=2u32 {
                for c in 1..p.min(4) {
                    let n = c * p.pow(k);
                    for r in (1..p.pow(k)).step_by(std::cmp::max(1, p.pow(k) as usize / 17)) {
                        let prec = 1 + vp_factorial(r, p);
                        if p.checked_pow(prec).is_none() {
                            continue;
                        }
                        let m = PadicScalar::from_int(n as i64, p, prec).unwrap();
                        let via_padic = binom_padic(&m, r, 1).unwrap();
                        assert_eq!(via_padic, 0, "p={p} k={k} c={c} r={r}");
                        assert_eq!(binom_exact_int(n as i64, r, p, 1), 0);
                    }
                }
            }
        }
    }

    fn arb_poly(ctx: Arc<SeriesCtx>) -> impl Strategy<Value = NCPoly> {
        let d = ctx.weights.len() as u16;
        prop::collection::vec((prop::collection::vec(0..d, 0..4), 0u64..125), 0..8).prop_map(
            move |terms| {
                let mut p = NCPoly::zero(&ctx);
                for (w, c) in terms {
                    p.insert(w, c);
                }
                p
            },
        )
    }

    proptest! {
        #[test]
        fn mul_is_associative_and_distributive(
            f in arb_poly(a1(6)), g in arb_poly(a1(6)), h in arb_poly(a1(6))
        ) {
            let fg_h = f.mul(&g).unwrap().mul(&h).unwrap();
            let f_gh = f.mul(&g.mul(&h).unwrap()).unwrap();
            prop_assert_eq!(&fg_h, &f_gh);

            let f_gph = f.mul(&g.add(&h).unwrap()).unwrap();
            let fg_p_fh = f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap();
            prop_assert_eq!(&f_gph, &fg_p_fh);
        }

        #[test]
        fn reduce_mod_fil_idempotent_and_multiplicative(
            f in arb_poly(a1(6)), g in arb_poly(a1(6)), n in 0i64..7
        ) {
            let r = f.reduce_mod_fil(n);
            prop_assert_eq!(&r.reduce_mod_fil(n), &r);

            let lhs = f.mul(&g).unwrap().reduce_mod_fil(n);
            let rhs = f.reduce_mod_fil(n)
                .mul(&g.reduce_mod_fil(n)).unwrap()
                .reduce_mod_fil(n);
            prop_assert_eq!(&lhs, &rhs);
        }
    }
}
