//! Graded rewriting over `F_p`: normal-order words in the generators by
//! transposing adjacent out-of-order pairs, with the correction terms the
//! graded relations prescribe.
//!
//! Each transposition strictly decreases the inversion count, and every
//! correction branch shortens the word, so normal forms terminate. In the
//! graded quotient only three pair shapes pick up corrections:
//!
//! * `V V` with summing roots: `c_11 V_{sum}`,
//! * `V U` with a negative-root sum: `c_11 U_{sum}`,
//! * `V U` on opposite roots: `sum_i n_i W_i` with `n_i` the coordinates.
//!
//! All other out-of-order pairs commute in the graded quotient; every
//! correction has the exact weight of the transposed pair, so rewriting is
//! homogeneous.

use std::collections::BTreeMap;

use dashmap::DashMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chevalley::ChevalleyBasis;
use crate::error::{Error, Result};
use crate::ncseries::{weighted_degree, Gen, Word};
use crate::ordering::{GenKind, GeneratorTable};
use crate::presentation::RelId;

/// Homogeneous element of the graded quotient: a linear combination of
/// words of one common weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedElement {
    pub weight: i64,
    pub terms: BTreeMap<Word, u64>,
}

impl GradedElement {
    pub fn single(weight: i64, word: Word) -> GradedElement {
        let mut terms = BTreeMap::new();
        terms.insert(word, 1);
        GradedElement { weight, terms }
    }

    pub fn zero(weight: i64) -> GradedElement {
        GradedElement {
            weight,
            terms: BTreeMap::new(),
        }
    }

    fn add_scaled(&mut self, other: &GradedElement, c: u64, p: u64) {
        for (w, &v) in &other.terms {
            let e = self.terms.entry(w.clone()).or_insert(0);
            *e = (*e + c * v) % p;
            if *e == 0 {
                self.terms.remove(w);
            }
        }
    }
}

/// One step of a rewrite trace.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub word: Word,
    pub inversions: usize,
    pub rule: RelId,
    pub swapped: Word,
}

#[derive(Debug, Clone)]
struct SwapRule {
    rule: RelId,
    corrections: Vec<(Gen, u64)>,
}

/// Pair-selection strategy; normal forms must not depend on it.
#[derive(Debug, Clone, Copy)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    Seeded(u64),
}

/// Result of the spanning computation at one weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimBound {
    pub weight: i64,
    pub word_count: u128,
    pub ordered_word_count: usize,
    pub rank: usize,
}

/// The rewriting engine for one (type, prime) context. `normal_form` is
/// pure; the memo table tolerates concurrent insert-or-read because
/// results are deterministic.
pub struct Rewriter {
    pub gt: GeneratorTable,
    pub p: u64,
    rules: Vec<Option<SwapRule>>,
    memo: DashMap<Word, GradedElement>,
}

impl Rewriter {
    pub fn new(cb: &ChevalleyBasis, gt: &GeneratorTable, p: u64) -> Result<Rewriter> {
        crate::check_prime(p, gt.coxeter_number)?;
        let d = gt.len();
        let mut rules: Vec<Option<SwapRule>> = vec![None; d * d];
        for a in 0..d {
            for b in 0..a {
                let ga = &gt.generators[a];
                let gb = &gt.generators[b];
                let rule = match (ga.kind, gb.kind) {
                    (GenKind::V, GenKind::V) => {
                        let sum = ga.root.add(&gb.root);
                        if cb.rs.contains(&sum) {
                            let c = cb.n_const(&ga.root, &gb.root)?;
                            let idx = gt
                                .index_of(GenKind::V, &sum)
                                .ok_or_else(|| Error::Internal("missing V generator".into()))?;
                            SwapRule {
                                rule: RelId::R5,
                                corrections: vec![(idx as Gen, reduce_mod(c, p))],
                            }
                        } else {
                            SwapRule {
                                rule: RelId::R5,
                                corrections: Vec::new(),
                            }
                        }
                    }
                    (GenKind::V, GenKind::U) => {
                        let sum = ga.root.add(&gb.root);
                        if sum.coords.iter().all(|&c| c == 0) {
                            let corrections = ga
                                .root
                                .coords
                                .iter()
                                .enumerate()
                                .filter(|(_, &n)| n != 0)
                                .map(|(i, &n)| {
                                    let idx = gt
                                        .index_of_node(i)
                                        .ok_or_else(|| Error::Internal("missing W".into()))?;
                                    Ok((idx as Gen, reduce_mod(n, p)))
                                })
                                .collect::<Result<Vec<_>>>()?;
                            SwapRule {
                                rule: RelId::R8,
                                corrections,
                            }
                        } else if cb.rs.contains(&sum) && !sum.is_positive() {
                            let c = cb.n_const(&ga.root, &gb.root)?;
                            let idx = gt
                                .index_of(GenKind::U, &sum)
                                .ok_or_else(|| Error::Internal("missing U generator".into()))?;
                            SwapRule {
                                rule: RelId::R7,
                                corrections: vec![(idx as Gen, reduce_mod(c, p))],
                            }
                        } else if cb.rs.contains(&sum) {
                            // Positive sum: the correction exponents all
                            // carry a factor p and vanish in the graded
                            // quotient.
                            SwapRule {
                                rule: RelId::R7,
                                corrections: Vec::new(),
                            }
                        } else {
                            SwapRule {
                                rule: RelId::R4,
                                corrections: Vec::new(),
                            }
                        }
                    }
                    (GenKind::V, GenKind::W) => SwapRule {
                        rule: RelId::R2,
                        corrections: Vec::new(),
                    },
                    (GenKind::W, GenKind::U) => SwapRule {
                        rule: RelId::R3,
                        corrections: Vec::new(),
                    },
                    (GenKind::W, GenKind::W) => SwapRule {
                        rule: RelId::R1,
                        corrections: Vec::new(),
                    },
                    (GenKind::U, GenKind::U) => SwapRule {
                        rule: RelId::R6,
                        corrections: Vec::new(),
                    },
                    other => {
                        return Err(Error::Internal(format!(
                            "impossible out-of-order pair kinds {other:?}"
                        )))
                    }
                };
                // Homogeneity: corrections must carry exactly the weight of
                // the transposed pair.
                let pair_weight = ga.weight + gb.weight;
                for &(g, _) in &rule.corrections {
                    if gt.generators[g as usize].weight != pair_weight {
                        return Err(Error::Internal(format!(
                            "correction weight mismatch for pair ({a}, {b})"
                        )));
                    }
                }
                rules[a * d + b] = Some(rule);
            }
        }
        Ok(Rewriter {
            gt: gt.clone(),
            p,
            rules,
            memo: DashMap::new(),
        })
    }

    pub fn weights(&self) -> Vec<i64> {
        self.gt.weights()
    }

    pub fn word_weight(&self, w: &[Gen]) -> i64 {
        weighted_degree(w, &self.gt.weights())
    }

    /// Number of out-of-order position pairs.
    pub fn inversions(&self, w: &[Gen]) -> usize {
        let mut count = 0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                if w[i] > w[j] {
                    count += 1;
                }
            }
        }
        count
    }

    fn rule(&self, a: Gen, b: Gen) -> Result<&SwapRule> {
        self.rules[a as usize * self.gt.len() + b as usize]
            .as_ref()
            .ok_or_else(|| {
                Error::Internal(format!(
                    "no rewrite rule covers the out-of-order pair ({a}, {b})"
                ))
            })
    }

    /// Resolve the inverted adjacent pair at position `pos`: the swapped
    /// word plus correction words, all of the weight of the input.
    fn apply_at(&self, w: &[Gen], pos: usize) -> Result<(GradedElement, TraceEntry)> {
        let (a, b) = (w[pos], w[pos + 1]);
        debug_assert!(a > b, "pair at {pos} is not inverted");
        let rule = self.rule(a, b)?;
        let weight = self.word_weight(w);
        let mut swapped = w.to_vec();
        swapped.swap(pos, pos + 1);
        let mut out = GradedElement::single(weight, swapped.clone());
        for &(g, c) in &rule.corrections {
            if c == 0 {
                continue;
            }
            let mut corr: Word = Vec::with_capacity(w.len() - 1);
            corr.extend_from_slice(&w[..pos]);
            corr.push(g);
            corr.extend_from_slice(&w[pos + 2..]);
            let e = out.terms.entry(corr).or_insert(0);
            *e = (*e + c) % self.p;
        }
        let entry = TraceEntry {
            word: w.to_vec(),
            inversions: self.inversions(w),
            rule: rule.rule,
            swapped,
        };
        Ok((out, entry))
    }

    /// One rewriting step at the leftmost inverted adjacent pair.
    pub fn rewrite_step(&self, w: &[Gen]) -> Result<(GradedElement, TraceEntry)> {
        let pos = (0..w.len().saturating_sub(1))
            .find(|&i| w[i] > w[i + 1])
            .ok_or_else(|| Error::Internal("rewrite_step on an ordered word".into()))?;
        let (out, entry) = self.apply_at(w, pos)?;
        debug_assert!(
            self.inversions(&entry.swapped) < entry.inversions,
            "swap did not decrease inversions"
        );
        Ok((out, entry))
    }

    /// Normal form of a single word (leftmost strategy, memoized).
    pub fn normal_form_word(&self, w: &[Gen]) -> Result<GradedElement> {
        if is_sorted(w) {
            return Ok(GradedElement::single(self.word_weight(w), w.to_vec()));
        }
        if let Some(hit) = self.memo.get(w) {
            return Ok(hit.clone());
        }
        let (step, _) = self.rewrite_step(w)?;
        let mut out = GradedElement::zero(self.word_weight(w));
        for (word, &c) in &step.terms {
            let nf = self.normal_form_word(word)?;
            out.add_scaled(&nf, c, self.p);
        }
        self.memo.insert(w.to_vec(), out.clone());
        Ok(out)
    }

    /// Normal form of a linear combination.
    pub fn normal_form(&self, e: &GradedElement) -> Result<GradedElement> {
        let mut out = GradedElement::zero(e.weight);
        for (word, &c) in &e.terms {
            let nf = self.normal_form_word(word)?;
            out.add_scaled(&nf, c, self.p);
        }
        Ok(out)
    }

    /// Normal form under an explicit pair-selection strategy, without the
    /// shared memo (each call uses a private one).
    pub fn normal_form_with_strategy(&self, w: &[Gen], strategy: Strategy) -> Result<GradedElement> {
        let mut rng = match strategy {
            Strategy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        let mut memo: BTreeMap<Word, GradedElement> = BTreeMap::new();
        self.nf_strategy(w, strategy, &mut rng, &mut memo)
    }

    fn nf_strategy(
        &self,
        w: &[Gen],
        strategy: Strategy,
        rng: &mut Option<ChaCha8Rng>,
        memo: &mut BTreeMap<Word, GradedElement>,
    ) -> Result<GradedElement> {
        if is_sorted(w) {
            return Ok(GradedElement::single(self.word_weight(w), w.to_vec()));
        }
        if let Some(hit) = memo.get(w) {
            return Ok(hit.clone());
        }
        let positions: Vec<usize> = (0..w.len() - 1).filter(|&i| w[i] > w[i + 1]).collect();
        let pos = match strategy {
            Strategy::Leftmost => positions[0],
            Strategy::Rightmost => *positions.last().unwrap(),
            Strategy::Seeded(_) => {
                let r = rng.as_mut().expect("seeded strategy has an rng");
                positions[r.gen_range(0..positions.len())]
            }
        };
        let (step, _) = self.apply_at(w, pos)?;
        let mut out = GradedElement::zero(self.word_weight(w));
        for (word, &c) in &step.terms {
            let nf = self.nf_strategy(word, strategy, rng, memo)?;
            out.add_scaled(&nf, c, self.p);
        }
        memo.insert(w.to_vec(), out.clone());
        Ok(out)
    }

    /// Normal-form the word under each strategy and demand agreement.
    pub fn confluence_probe(&self, w: &[Gen], strategies: &[Strategy]) -> Result<()> {
        assert!(strategies.len() >= 2, "need at least two strategies");
        let reference = self.normal_form_with_strategy(w, strategies[0])?;
        for s in &strategies[1..] {
            let other = self.normal_form_with_strategy(w, *s)?;
            if other != reference {
                return Err(Error::Internal(format!(
                    "confluence probe disagrees on {w:?} under {s:?}"
                )));
            }
        }
        Ok(())
    }

    /// Enumerate every word of the given weight, normal-form each, and
    /// return the rank of the resulting matrix over the ordered-word
    /// basis. The rank is the dimension the rewriter presents in that
    /// degree; it can never exceed the ordered-word count.
    pub fn graded_dim_upper_bound(&self, weight: i64, word_cap: u128) -> Result<DimBound> {
        let weights = self.gt.weights();
        let total = count_words(&weights, weight);
        if total > word_cap {
            return Err(Error::ResourceExceeded {
                what: "weight-n word enumeration",
                needed: total,
                cap: word_cap,
            });
        }

        let ordered = enumerate_ordered_words(&weights, weight);
        let col_of: BTreeMap<&Word, usize> =
            ordered.iter().enumerate().map(|(i, w)| (w, i)).collect();

        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(total as usize);
        let mut stack: Vec<Word> = vec![Vec::new()];
        while let Some(prefix) = stack.pop() {
            let used = self.word_weight(&prefix);
            if used == weight {
                let nf = self.normal_form_word(&prefix)?;
                let mut row = vec![0u64; ordered.len()];
                for (word, &c) in &nf.terms {
                    let col = *col_of
                        .get(word)
                        .ok_or_else(|| Error::Internal("normal form not ordered".into()))?;
                    row[col] = c;
                }
                rows.push(row);
                continue;
            }
            for g in (0..weights.len() as Gen).rev() {
                if used + weights[g as usize] <= weight {
                    let mut next = prefix.clone();
                    next.push(g);
                    stack.push(next);
                }
            }
        }

        let rank = rank_mod_p(rows, self.p);
        Ok(DimBound {
            weight,
            word_count: total,
            ordered_word_count: ordered.len(),
            rank,
        })
    }
}

fn reduce_mod(v: i64, p: u64) -> u64 {
    (((v % p as i64) + p as i64) % p as i64) as u64
}

fn is_sorted(w: &[Gen]) -> bool {
    w.windows(2).all(|pair| pair[0] <= pair[1])
}

/// Number of words (ordered sequences) of the given weight.
pub fn count_words(weights: &[i64], weight: i64) -> u128 {
    if weight < 0 {
        return 0;
    }
    let n = weight as usize;
    let mut dp = vec![0u128; n + 1];
    dp[0] = 1;
    for total in 1..=n {
        for &w in weights {
            let w = w as usize;
            if w <= total {
                dp[total] = dp[total]
                    .checked_add(dp[total - w])
                    .expect("word count overflow");
            }
        }
    }
    dp[n]
}

/// All nondecreasing words of the given weight, in lexicographic order.
pub fn enumerate_ordered_words(weights: &[i64], weight: i64) -> Vec<Word> {
    let mut out = Vec::new();
    let mut current: Word = Vec::new();
    fn recurse(
        weights: &[i64],
        weight: i64,
        min_gen: Gen,
        current: &mut Word,
        out: &mut Vec<Word>,
    ) {
        if weight == 0 {
            out.push(current.clone());
            return;
        }
        for g in min_gen..weights.len() as Gen {
            if weights[g as usize] <= weight {
                current.push(g);
                recurse(weights, weight - weights[g as usize], g, current, out);
                current.pop();
            }
        }
    }
    recurse(weights, weight, 0, &mut current, &mut out);
    out
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map(Vec::len).unwrap_or(0);
    let mut rank = 0;
    for col in 0..cols {
        let pivot = (rank..rows.len()).find(|&r| rows[r][col] % p != 0);
        let Some(pivot) = pivot else { continue };
        rows.swap(rank, pivot);
        let inv = mod_inv(rows[rank][col] % p, p);
        for c in col..cols {
            rows[rank][c] = rows[rank][c] % p * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] % p != 0 {
                let factor = rows[r][col] % p;
                for c in col..cols {
                    let sub = factor * rows[rank][c] % p;
                    rows[r][c] = (rows[r][c] + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat; p is prime.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Deterministic random words of weight at most `max_weight` (and at least
/// one letter), for probe-style tests.
pub fn random_words(gt: &GeneratorTable, max_weight: i64, count: usize, seed: u64) -> Vec<Word> {
    let weights = gt.weights();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut word: Word = Vec::new();
        let mut used = 0i64;
        loop {
            let g = rng.gen_range(0..weights.len()) as Gen;
            if used + weights[g as usize] > max_weight {
                break;
            }
            word.push(g);
            used += weights[g as usize];
            if rng.gen_ratio(1, 6) {
                break;
            }
        }
        if !word.is_empty() {
            out.push(word);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{generator_table, longest_word, papi_order};
    use crate::root_system::RootSystem;
    use std::sync::Arc;

    fn rewriter(name: &str, p: u64) -> Rewriter {
        let rs = Arc::new(RootSystem::new(name.parse().unwrap()).unwrap());
        let cb = ChevalleyBasis::new(rs.clone()).unwrap();
        let ord = papi_order(&rs, &longest_word(&rs)).unwrap();
        let gt = generator_table(&rs, &ord).unwrap();
        Rewriter::new(&cb, &gt, p).unwrap()
    }

    // A1 table: 0 = U, 1 = W, 2 = V.
    const U: Gen = 0;
    const W: Gen = 1;
    const V: Gen = 2;

    #[test]
    fn inversion_counts() {
        let rw = rewriter("A1", 5);
        assert_eq!(rw.inversions(&[U, W, V]), 0);
        assert_eq!(rw.inversions(&[V, U]), 1);
        assert_eq!(rw.inversions(&[V, W, U]), 3);
        let descending: Word = vec![2, 1, 0];
        assert_eq!(rw.inversions(&descending), 3);
    }

    #[test]
    fn a1_single_step() {
        let rw = rewriter("A1", 5);
        let (out, trace) = rw.rewrite_step(&[V, U]).unwrap();
        assert_eq!(trace.rule, RelId::R8);
        assert_eq!(trace.inversions, 1);
        assert_eq!(out.terms.len(), 2);
        assert_eq!(out.terms[&vec![U, V]], 1);
        assert_eq!(out.terms[&vec![W]], 1);
        assert_eq!(rw.inversions(&trace.swapped), 0);
    }

    #[test]
    fn a2_v_pair_step_carries_sign() {
        // Compatible order d1 < theta < d2, so (V_{d2}, V_{d1}) is
        // inverted; c_11 = N(d2, d1) = -1 = 4 mod 5.
        let rw = rewriter("A2", 5);
        let v_d1 = 5 as Gen;
        let v_theta = 6 as Gen;
        let v_d2 = 7 as Gen;
        let (out, trace) = rw.rewrite_step(&[v_d2, v_d1]).unwrap();
        assert_eq!(trace.rule, RelId::R5);
        assert_eq!(out.terms[&vec![v_d1, v_d2]], 1);
        assert_eq!(out.terms[&vec![v_theta]], 4);
    }

    #[test]
    fn a2_w_pair_commutes() {
        let rw = rewriter("A2", 5);
        let w1 = 3 as Gen;
        let w2 = 4 as Gen;
        let (out, trace) = rw.rewrite_step(&[w2, w1]).unwrap();
        assert_eq!(trace.rule, RelId::R1);
        assert_eq!(out.terms.len(), 1);
        assert_eq!(out.terms[&vec![w1, w2]], 1);
    }

    #[test]
    fn a1_normal_forms() {
        let rw = rewriter("A1", 5);
        let nf = rw.normal_form_word(&[V, U]).unwrap();
        assert_eq!(nf.terms.len(), 2);
        assert_eq!(nf.terms[&vec![U, V]], 1);
        assert_eq!(nf.terms[&vec![W]], 1);

        let ordered = rw.normal_form_word(&[U, U, W, V]).unwrap();
        assert_eq!(ordered.terms.len(), 1);
        assert_eq!(ordered.terms[&vec![U, U, W, V]], 1);
    }

    #[test]
    fn a1_weight_two_span() {
        let rw = rewriter("A1", 5);
        let bound = rw.graded_dim_upper_bound(2, 10_000).unwrap();
        assert_eq!(bound.word_count, 5); // UU, UV, VU, VV, W
        assert_eq!(bound.ordered_word_count, 4);
        assert_eq!(bound.rank, 4);
    }

    #[test]
    fn upper_bound_low_degrees() {
        let rw = rewriter("A1", 5);
        assert_eq!(rw.graded_dim_upper_bound(1, 1000).unwrap().rank, 2);
        let rw2 = rewriter("A2", 5);
        assert_eq!(rw2.graded_dim_upper_bound(1, 1000).unwrap().rank, 3);
        assert_eq!(rw2.graded_dim_upper_bound(0, 1000).unwrap().rank, 1);
    }

    #[test]
    fn word_cap_is_enforced() {
        let rw = rewriter("A2", 5);
        assert!(matches!(
            rw.graded_dim_upper_bound(6, 10),
            Err(Error::ResourceExceeded { .. })
        ));
    }

    #[test]
    fn normal_form_homogeneous_and_idempotent() {
        let rw = rewriter("A2", 5);
        for word in random_words(&rw.gt, 6, 300, 11) {
            let weight = rw.word_weight(&word);
            let nf = rw.normal_form_word(&word).unwrap();
            for w in nf.terms.keys() {
                assert_eq!(rw.word_weight(w), weight);
                assert!(is_sorted(w));
            }
            assert_eq!(rw.normal_form(&nf).unwrap(), nf);
        }
    }

    #[test]
    fn strict_inversion_decrease_along_leading_branch() {
        let rw = rewriter("B2", 7);
        for word in random_words(&rw.gt, 6, 500, 23) {
            let mut current = word;
            while rw.inversions(&current) > 0 {
                let (_, trace) = rw.rewrite_step(&current).unwrap();
                assert!(rw.inversions(&trace.swapped) < trace.inversions);
                current = trace.swapped;
            }
        }
    }

    #[test]
    fn confluence_probe_strategies_agree() {
        let rw = rewriter("A2", 5);
        let strategies = [Strategy::Leftmost, Strategy::Rightmost, Strategy::Seeded(99)];
        for word in random_words(&rw.gt, 6, 300, 37) {
            rw.confluence_probe(&word, &strategies).unwrap();
        }
        // Ordered words pass trivially.
        rw.confluence_probe(&[0, 1, 2], &strategies).unwrap();
    }

    #[test]
    fn strategy_matches_memoized_leftmost() {
        let rw = rewriter("B2", 7);
        for word in random_words(&rw.gt, 6, 200, 41) {
            let a = rw.normal_form_word(&word).unwrap();
            let b = rw.normal_form_with_strategy(&word, Strategy::Leftmost).unwrap();
            assert_eq!(a, b);
        }
    }
}
