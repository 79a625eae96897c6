//! Compatible (additive) orderings of the positive roots and the ordered
//! generator set of the pro-p Iwahori group.
//!
//! A total order `<` on `Phi^+` is *compatible* when
//!
//! 1. `lambda < mu` and `lambda + mu` a root imply
//!    `lambda < lambda + mu < mu`, and
//! 2. every root of the form `lambda + mu` has a summand preceding it.
//!
//! Such orders are exactly the sequences `sigma_j = s_{i_1}...s_{i_{j-1}}
//! (delta_{i_j})` attached to reduced words for the longest Weyl element.
//! On top of one fixed compatible order the module builds the generator
//! table: `U_beta` (negative roots by increasing height), then `W_delta`
//! (simple coroots by node), then `V_alpha` (positive roots in compatible
//! order), with integer weights `h + ht(beta)`, `h`, `ht(alpha)` and
//! valuations `weight / h`.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::error::{Error, Result};
use crate::root_system::{Root, RootSystem};

/// A word in the simple reflections, 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReducedWord(pub Vec<usize>);

/// A compatible ordering of all positive roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibleOrder {
    pub roots: Vec<Root>,
}

impl CompatibleOrder {
    pub fn position(&self, r: &Root) -> Option<usize> {
        self.roots.iter().position(|x| x == r)
    }
}

/// Why an ordering failed the compatibility checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderWitness {
    /// Condition (1): `lambda + mu` not strictly between `lambda < mu`,
    /// or between-ness fails for a higher multiple `i mu + j lambda`.
    NotBetween {
        lambda: Root,
        mu: Root,
        sum: Root,
        i: i64,
        j: i64,
    },
    /// Condition (2): no summand of `sum` precedes it.
    NoPrecedingSummand { sum: Root },
}

impl std::fmt::Display for OrderWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OrderWitness::NotBetween {
                lambda,
                mu,
                sum,
                i,
                j,
            } => write!(
                f,
                "{i}*{mu} + {j}*{lambda} = {sum} does not sit strictly between {lambda} and {mu}"
            ),
            OrderWitness::NoPrecedingSummand { sum } => {
                write!(f, "no summand of {sum} precedes it")
            }
        }
    }
}

/// Rank x rank matrix of a Weyl group element acting on root coordinates;
/// column `j` is the image of `delta_j`.
#[derive(Debug, Clone)]
struct WeylMatrix {
    n: usize,
    cols: Vec<Vec<i64>>,
}

impl WeylMatrix {
    fn identity(n: usize) -> Self {
        WeylMatrix {
            n,
            cols: (0..n)
                .map(|j| (0..n).map(|i| i64::from(i == j)).collect())
                .collect(),
        }
    }

    fn apply(&self, r: &Root) -> Root {
        let mut out = vec![0i64; self.n];
        for (j, &c) in r.coords.iter().enumerate() {
            if c != 0 {
                for i in 0..self.n {
                    out[i] += c * self.cols[j][i];
                }
            }
        }
        Root::new(out)
    }

    /// Right-multiply by the simple reflection `s_i`.
    fn append_reflection(&mut self, rs: &RootSystem, i: usize) {
        let si_cols: Vec<Root> = rs
            .simple_roots
            .iter()
            .map(|d| rs.reflect(&rs.simple_roots[i], d))
            .collect();
        self.cols = si_cols.iter().map(|c| self.apply(c).coords).collect();
    }
}

/// Deterministic reduced word for the longest element: at each step take
/// the smallest simple index the current prefix still sends to a positive
/// root.
pub fn longest_word(rs: &RootSystem) -> ReducedWord {
    longest_word_with(rs, |candidates, _| candidates[0])
}

/// Greedy longest-word construction with a caller-supplied choice among
/// the valid next letters.
fn longest_word_with(
    rs: &RootSystem,
    mut choose: impl FnMut(&[usize], usize) -> usize,
) -> ReducedWord {
    let n = rs.rank();
    let total = rs.positive_roots.len();
    let mut w = WeylMatrix::identity(n);
    let mut word = Vec::with_capacity(total);
    for step in 0..total {
        let candidates: Vec<usize> = (0..n)
            .filter(|&i| w.apply(&rs.simple_roots[i]).is_positive())
            .collect();
        debug_assert!(!candidates.is_empty(), "greedy extension must exist");
        let i = choose(&candidates, step);
        word.push(i);
        w.append_reflection(rs, i);
    }
    ReducedWord(word)
}

/// A reduced word for the longest element with uniformly random choices.
pub fn random_reduced_word<R: Rng>(rs: &RootSystem, rng: &mut R) -> ReducedWord {
    longest_word_with(rs, |candidates, _| {
        candidates[rng.gen_range(0..candidates.len())]
    })
}

/// All reduced words for the longest element, aborting with a resource
/// error when more than `cap` DFS nodes are visited. Only sensible for
/// small ranks.
pub fn enumerate_reduced_words(rs: &RootSystem, cap: usize) -> Result<Vec<ReducedWord>> {
    let total = rs.positive_roots.len();
    let mut out = Vec::new();
    let mut visited = 0usize;
    let mut stack: Vec<(WeylMatrix, Vec<usize>)> =
        vec![(WeylMatrix::identity(rs.rank()), Vec::new())];
    while let Some((w, word)) = stack.pop() {
        visited += 1;
        if visited > cap {
            return Err(Error::ResourceExceeded {
                what: "reduced-word enumeration nodes",
                needed: visited as u128,
                cap: cap as u128,
            });
        }
        if word.len() == total {
            out.push(ReducedWord(word));
            continue;
        }
        for i in 0..rs.rank() {
            if w.apply(&rs.simple_roots[i]).is_positive() {
                let mut w2 = w.clone();
                w2.append_reflection(rs, i);
                let mut word2 = word.clone();
                word2.push(i);
                stack.push((w2, word2));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The ordered sequence `sigma_j = s_{i_1}...s_{i_{j-1}}(delta_{i_j})`
/// attached to a reduced word for the longest element.
pub fn papi_order(rs: &RootSystem, word: &ReducedWord) -> Result<CompatibleOrder> {
    let mut w = WeylMatrix::identity(rs.rank());
    let mut roots = Vec::with_capacity(word.0.len());
    for (j, &i) in word.0.iter().enumerate() {
        if i >= rs.rank() {
            return Err(Error::IndexOutOfRange {
                index: i,
                rank: rs.rank(),
            });
        }
        let sigma = w.apply(&rs.simple_roots[i]);
        if !sigma.is_positive() {
            return Err(Error::NonReducedWord { prefix_len: j + 1 });
        }
        roots.push(sigma);
        w.append_reflection(rs, i);
    }
    if word.0.len() != rs.positive_roots.len() {
        return Err(Error::NonReducedWord {
            prefix_len: word.0.len(),
        });
    }
    let distinct: BTreeSet<&Root> = roots.iter().collect();
    if distinct.len() != roots.len() {
        return Err(Error::Internal("reduced word produced repeated roots".into()));
    }
    Ok(CompatibleOrder { roots })
}

/// Exhaustive check of the two compatibility conditions plus the
/// strengthened between-ness for higher multiples `i mu + j lambda`
/// (`i, j > 0`), which the inversion-counting argument relies on.
pub fn verify_compatible(rs: &RootSystem, ord: &CompatibleOrder) -> Result<(), OrderWitness> {
    let n = ord.roots.len();
    let expect: BTreeSet<&Root> = rs.positive_roots.iter().collect();
    let got: BTreeSet<&Root> = ord.roots.iter().collect();
    if n != rs.positive_roots.len() || expect != got {
        // A non-permutation can only come from caller error; surface it as
        // a failed condition with the first missing root.
        let missing = expect.difference(&got).next().map(|r| (*r).clone());
        return Err(OrderWitness::NoPrecedingSummand {
            sum: missing.unwrap_or_else(|| Root::new(vec![])),
        });
    }
    let pos: BTreeMap<&Root, usize> = ord.roots.iter().enumerate().map(|(i, r)| (r, i)).collect();

    for a in 0..n {
        for b in a + 1..n {
            let lambda = &ord.roots[a];
            let mu = &ord.roots[b];
            // Multiples i*mu + j*lambda; (1,1) is condition (1), the rest is
            // the strengthened between-ness. Exponents 4 suffice for all
            // reduced systems (G2 tops out at 3a+2b).
            for i in 1..=4i64 {
                for j in 1..=4i64 {
                    let cand = mu.scaled(i).add(&lambda.scaled(j));
                    if cand.is_positive() && rs.contains(&cand) {
                        let k = pos[&cand];
                        if !(a < k && k < b) {
                            return Err(OrderWitness::NotBetween {
                                lambda: lambda.clone(),
                                mu: mu.clone(),
                                sum: cand,
                                i,
                                j,
                            });
                        }
                    }
                }
            }
        }
    }

    // Condition (2): for S = Phi^+ both summands are present, so it reduces
    // to "some summand precedes the sum".
    for (k, nu) in ord.roots.iter().enumerate() {
        for lambda in &rs.positive_roots {
            let mu = nu.sub(lambda);
            if mu.is_positive() && rs.contains(&mu) {
                let pl = pos[lambda];
                let pm = pos[&mu];
                if pl.min(pm) >= k {
                    return Err(OrderWitness::NoPrecedingSummand { sum: nu.clone() });
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    U,
    W,
    V,
}

impl GenKind {
    pub fn letter(self) -> char {
        match self {
            GenKind::U => 'U',
            GenKind::W => 'W',
            GenKind::V => 'V',
        }
    }
}

/// One generator of the ordered basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub kind: GenKind,
    /// The root attached to the generator (the simple root itself for `W`).
    pub root: Root,
    /// Node index for `W` generators, 0-based.
    pub node: Option<usize>,
    /// Shifted valuation; `h + ht(beta)`, `h`, or `ht(alpha)`.
    pub weight: i64,
}

impl Generator {
    /// The valuation `omega = weight / h` as a reduced fraction.
    pub fn omega(&self, h: i64) -> (i64, i64) {
        let g = gcd(self.weight, h);
        (self.weight / g, h / g)
    }

    pub fn label(&self) -> String {
        match self.kind {
            GenKind::W => format!("W{}", self.node.unwrap() + 1),
            k => format!("{}{}", k.letter(), self.root),
        }
    }
}

/// The ordered list of all `d = |Phi| + |Delta|` generators, with lookup
/// by kind and root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorTable {
    pub generators: Vec<Generator>,
    pub coxeter_number: i64,
    by_root: BTreeMap<(GenKind, Root), usize>,
}

impl GeneratorTable {
    /// Assemble a table from explicit generators (used when re-importing
    /// an exported presentation).
    pub fn from_generators(generators: Vec<Generator>, coxeter_number: i64) -> GeneratorTable {
        let by_root = generators
            .iter()
            .enumerate()
            .map(|(i, g)| ((g.kind, g.root.clone()), i))
            .collect();
        GeneratorTable {
            generators,
            coxeter_number,
            by_root,
        }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn weights(&self) -> Vec<i64> {
        self.generators.iter().map(|g| g.weight).collect()
    }

    pub fn index_of(&self, kind: GenKind, root: &Root) -> Option<usize> {
        self.by_root.get(&(kind, root.clone())).copied()
    }

    pub fn index_of_node(&self, node: usize) -> Option<usize> {
        self.generators
            .iter()
            .position(|g| g.kind == GenKind::W && g.node == Some(node))
    }
}

/// Build the generator table over a verified compatible order.
pub fn generator_table(rs: &RootSystem, ord: &CompatibleOrder) -> Result<GeneratorTable> {
    if let Err(w) = verify_compatible(rs, ord) {
        return Err(Error::Internal(format!(
            "ordering is not compatible: {w}"
        )));
    }
    let h = rs.coxeter_number;
    let mut generators = Vec::with_capacity(2 * rs.positive_roots.len() + rs.rank());

    // Negative roots by increasing height, ties broken lexicographically.
    let mut negatives: Vec<Root> = rs.positive_roots.iter().map(Root::neg).collect();
    negatives.sort_by_key(|r| (r.height(), r.coords.clone()));
    for beta in negatives {
        let weight = h + beta.height();
        generators.push(Generator {
            kind: GenKind::U,
            root: beta,
            node: None,
            weight,
        });
    }
    for (i, delta) in rs.simple_roots.iter().enumerate() {
        generators.push(Generator {
            kind: GenKind::W,
            root: delta.clone(),
            node: Some(i),
            weight: h,
        });
    }
    for alpha in &ord.roots {
        generators.push(Generator {
            kind: GenKind::V,
            root: alpha.clone(),
            node: None,
            weight: alpha.height(),
        });
    }

    let by_root = generators
        .iter()
        .enumerate()
        .map(|(i, g)| ((g.kind, g.root.clone()), i))
        .collect();
    Ok(GeneratorTable {
        generators,
        coxeter_number: h,
        by_root,
    })
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}
