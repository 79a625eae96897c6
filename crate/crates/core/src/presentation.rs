//! Materialized defining relations of the Iwasawa algebra and their
//! reductions modulo the weight filtration.
//!
//! Every relation is stored with the out-of-order product on the left, so
//! that over `F_p` and modulo `Fil^{fil+1}` the element `lhs - rhs` equals
//!
//! ```text
//! X_a X_b - X_b X_a - (corrections)
//! ```
//!
//! for the transposed generator pair `(a, b)`. The correction term is
//! empty except for three shapes: summing `V V` pairs (`c_11 V_{sum}`),
//! mixed `V U` pairs with a negative-root sum (`c_11 U_{sum}`), and
//! opposite-root pairs (`sum_i n_i W_i`). `verify_primed` recomputes the
//! reduction by full expansion and demands a zero residual.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chevalley::{ChevalleyBasis, CommutatorTable};
use crate::error::{Error, Result};
use crate::ncseries::{Exponent, Gen, Modulus, NCPoly, PadicScalar, SeriesCtx, Word};
use crate::ordering::{GenKind, GeneratorTable};
use crate::root_system::{CartanType, Root, RootSystem};

/// Tag recorded in exports: extraspecial pairs get `N = +(p+1)`, positive
/// roots ordered by height with ties read from the last coordinate.
pub const SIGN_CONVENTION: &str = "extraspecial-positive/height-revlex";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelId {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
}

impl fmt::Display for RelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{}", *self as u8 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresentationParams {
    pub p: u64,
    /// Exported coefficient precision `K` (coefficients mod `p^K`).
    pub precision: u32,
    /// Truncation bound `N` on weighted degree; at least `2h`.
    pub max_degree: i64,
}

/// One relation instance: the pair of generators it transposes and both
/// sides as truncated series.
#[derive(Debug, Clone)]
pub struct RelationInstance {
    pub id: RelId,
    /// Out-of-order generator pair `(a, b)`, `a` left of `b` in `lhs`.
    pub pair: (Gen, Gen),
    pub lhs: NCPoly,
    pub rhs: NCPoly,
    /// For R2/R3: the pairing exponent in `M = (1+p)^e`.
    pub exponent: Option<i64>,
}

/// The graded reduction of a relation: transposing the pair costs the
/// listed corrections modulo `Fil^{fil_level + 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimedRelation {
    pub source: RelId,
    pub fil_level: i64,
    /// Single-generator corrections with coefficients mod p.
    pub corrections: Vec<(Gen, u64)>,
}

/// Nonzero residual from `verify_primed`, listing offending words with
/// their mod-p coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimedResidual(pub Vec<(Word, u64)>);

impl fmt::Display for PrimedResidual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "residual terms:")?;
        for (w, c) in &self.0 {
            write!(f, " {c}*{w:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Relation {
    pub instance: RelationInstance,
    pub primed: PrimedRelation,
}

/// A full presentation: generator table plus all materialized relations.
#[derive(Debug, Clone)]
pub struct Presentation {
    pub cartan_type: CartanType,
    pub params: PresentationParams,
    pub gt: GeneratorTable,
    pub relations: Vec<Relation>,
    pub ctx: Arc<SeriesCtx>,
}

struct Builder<'a> {
    rs: &'a RootSystem,
    gt: &'a GeneratorTable,
    ctx: Arc<SeriesCtx>,
    p: u64,
    m_precision: u32,
    commutators: CommutatorTable,
}

impl<'a> Builder<'a> {
    fn one_plus(&self, g: Gen) -> NCPoly {
        NCPoly::one_plus_gen(&self.ctx, g)
    }

    fn one_plus_pow(&self, g: Gen, e: &Exponent) -> Result<NCPoly> {
        NCPoly::one_plus_pow(&self.ctx, g, e)
    }

    fn padic_power(&self, e: i64) -> Result<PadicScalar> {
        PadicScalar::one_plus_p_pow(e, self.p, self.m_precision)
    }

    fn gen_index(&self, kind: GenKind, root: &Root) -> Result<Gen> {
        self.gt
            .index_of(kind, root)
            .map(|i| i as Gen)
            .ok_or_else(|| Error::Internal(format!("generator {kind:?} {root} missing")))
    }

    /// Ordered commutator factors for a root pair, as
    /// `(root, i, j, c_ij)` in increasing `(i + j, i)`.
    fn commutator_factors(&self, a: &Root, b: &Root) -> Result<Vec<(Root, i64, i64, i64)>> {
        let entry = self
            .commutators
            .get(a, b)
            .ok_or_else(|| Error::Internal(format!("missing commutator table for ({a}, {b})")))?;
        Ok(entry
            .iter()
            .map(|&((i, j), c)| (a.scaled(i).add(&b.scaled(j)), i, j, c))
            .collect())
    }
}

impl Presentation {
    /// Materialize the presentation for a verified generator table.
    pub fn build(
        rs: &Arc<RootSystem>,
        cb: &ChevalleyBasis,
        gt: &GeneratorTable,
        params: PresentationParams,
    ) -> Result<Presentation> {
        let h = rs.coxeter_number;
        crate::check_prime(params.p, h)?;
        if params.precision == 0 || params.max_degree < 2 * h {
            return Err(Error::Internal(format!(
                "need precision >= 1 and max degree >= {}",
                2 * h
            )));
        }
        let p = params.p;
        let slack = (params.max_degree / (p as i64 - 1)) as u32 + 1;
        let k_work = params.precision + slack;
        let m_precision = k_work + slack;
        // Both p^{k_work} and p^{m_precision} must fit u64.
        Modulus::new(p, m_precision)?;
        let ctx = SeriesCtx::new(gt.weights(), Modulus::new(p, k_work)?, params.max_degree);

        // Root pairs whose commutator constants the relations need.
        let positives_in_order: Vec<Root> = gt
            .generators
            .iter()
            .filter(|g| g.kind == GenKind::V)
            .map(|g| g.root.clone())
            .collect();
        let negatives_in_order: Vec<Root> = gt
            .generators
            .iter()
            .filter(|g| g.kind == GenKind::U)
            .map(|g| g.root.clone())
            .collect();
        let mut needed_pairs: Vec<(Root, Root)> = Vec::new();
        for (i, a1) in positives_in_order.iter().enumerate() {
            for a2 in positives_in_order.iter().take(i) {
                if rs.contains(&a1.add(a2)) {
                    needed_pairs.push((a1.clone(), a2.clone()));
                }
            }
        }
        for (i, b1) in negatives_in_order.iter().enumerate() {
            for b2 in negatives_in_order.iter().take(i) {
                if rs.contains(&b1.add(b2)) {
                    needed_pairs.push((b1.clone(), b2.clone()));
                }
            }
        }
        for alpha in &positives_in_order {
            for beta in &negatives_in_order {
                if rs.contains(&alpha.add(beta)) {
                    needed_pairs.push((alpha.clone(), beta.clone()));
                }
            }
        }
        let commutators =
            CommutatorTable::build_for(cb, needed_pairs.iter().map(|(a, b)| (a, b)))?;

        let builder = Builder {
            rs,
            gt,
            ctx: ctx.clone(),
            p,
            m_precision,
            commutators,
        };

        let mut relations = Vec::new();

        // R1: torus generators commute exactly.
        for j in 0..rs.rank() {
            for i in 0..j {
                let wi = builder.gen_index(GenKind::W, &rs.simple_roots[i])?;
                let wj = builder.gen_index(GenKind::W, &rs.simple_roots[j])?;
                let lhs = builder.one_plus(wj).mul(&builder.one_plus(wi))?;
                let rhs = builder.one_plus(wi).mul(&builder.one_plus(wj))?;
                relations.push(make_relation(
                    gt,
                    RelId::R1,
                    (wj, wi),
                    lhs,
                    rhs,
                    None,
                    Vec::new(),
                ));
            }
        }

        // R2: (1+V)^M (1+W) = (1+W)(1+V) with M = (1+p)^{<alpha, delta>}.
        for (node, delta) in rs.simple_roots.iter().enumerate() {
            let w = builder.gen_index(GenKind::W, delta)?;
            for alpha in &positives_in_order {
                let v = builder.gen_index(GenKind::V, alpha)?;
                let e = rs.pairing(alpha, node)?;
                let m = builder.padic_power(e)?;
                let lhs = builder
                    .one_plus_pow(v, &Exponent::Padic(m))?
                    .mul(&builder.one_plus(w))?;
                let rhs = builder.one_plus(w).mul(&builder.one_plus(v))?;
                relations.push(make_relation(gt, RelId::R2, (v, w), lhs, rhs, Some(e), Vec::new()));
            }
        }

        // R3: (1+W)(1+U) = (1+U)^M (1+W) with M = (1+p)^{<beta, delta>}.
        for (node, delta) in rs.simple_roots.iter().enumerate() {
            let w = builder.gen_index(GenKind::W, delta)?;
            for beta in &negatives_in_order {
                let u = builder.gen_index(GenKind::U, beta)?;
                let e = rs.pairing(beta, node)?;
                let m = builder.padic_power(e)?;
                let lhs = builder.one_plus(w).mul(&builder.one_plus(u))?;
                let rhs = builder
                    .one_plus_pow(u, &Exponent::Padic(m))?
                    .mul(&builder.one_plus(w))?;
                relations.push(make_relation(gt, RelId::R3, (w, u), lhs, rhs, Some(e), Vec::new()));
            }
        }

        // R4 / R7 / R8 split the mixed pairs by their sum.
        for alpha in &positives_in_order {
            let v = builder.gen_index(GenKind::V, alpha)?;
            for beta in &negatives_in_order {
                let u = builder.gen_index(GenKind::U, beta)?;
                let sum = alpha.add(beta);
                let lhs = builder.one_plus(v).mul(&builder.one_plus(u))?;
                if sum.coords.iter().all(|&c| c == 0) {
                    // R8: (1+V)(1+U) = (1+U)^Q prod (1+W_i)^{n_i} (1+V)^Q.
                    let q = builder.padic_power(-1)?;
                    let mut rhs = builder.one_plus_pow(u, &Exponent::Padic(q))?;
                    let mut corrections = Vec::new();
                    for (node, &n) in alpha.coords.iter().enumerate() {
                        if n == 0 {
                            continue;
                        }
                        let w = gt
                            .index_of_node(node)
                            .ok_or_else(|| Error::Internal("missing W".into()))?
                            as Gen;
                        rhs = rhs.mul(&builder.one_plus_pow(w, &Exponent::Int(n))?)?;
                        corrections.push((w, reduce_mod(n, p)));
                    }
                    rhs = rhs.mul(&builder.one_plus_pow(v, &Exponent::Padic(q))?)?;
                    relations.push(make_relation(gt, RelId::R8, (v, u), lhs, rhs, None, corrections));
                } else if rs.contains(&sum) {
                    // R7: U factors (negative sums, exponent c p^{j-1}),
                    // then V factors (positive sums, exponent c p^j).
                    let factors = builder.commutator_factors(alpha, beta)?;
                    let mut rhs = NCPoly::one(&ctx);
                    for (root, _, j, c) in factors.iter().filter(|(r, _, _, _)| !r.is_positive()) {
                        let g = builder.gen_index(GenKind::U, root)?;
                        let e = c * (p as i64).pow(*j as u32 - 1);
                        rhs = rhs.mul(&builder.one_plus_pow(g, &Exponent::Int(e))?)?;
                    }
                    for (root, _, j, c) in factors.iter().filter(|(r, _, _, _)| r.is_positive()) {
                        let g = builder.gen_index(GenKind::V, root)?;
                        let e = c * (p as i64).pow(*j as u32);
                        rhs = rhs.mul(&builder.one_plus_pow(g, &Exponent::Int(e))?)?;
                    }
                    rhs = rhs.mul(&builder.one_plus(u))?.mul(&builder.one_plus(v))?;
                    let corrections = if !sum.is_positive() {
                        let g = builder.gen_index(GenKind::U, &sum)?;
                        let c11 = cb.n_const(alpha, beta)?;
                        vec![(g, reduce_mod(c11, p))]
                    } else {
                        Vec::new()
                    };
                    relations.push(make_relation(gt, RelId::R7, (v, u), lhs, rhs, None, corrections));
                } else {
                    // R4: exact commutation.
                    let rhs = builder.one_plus(u).mul(&builder.one_plus(v))?;
                    relations.push(make_relation(gt, RelId::R4, (v, u), lhs, rhs, None, Vec::new()));
                }
            }
        }

        // R5: out-of-order positive pairs with a root sum.
        for (i, a1) in positives_in_order.iter().enumerate() {
            for a2 in positives_in_order.iter().take(i) {
                if !rs.contains(&a1.add(a2)) {
                    continue;
                }
                let v1 = builder.gen_index(GenKind::V, a1)?;
                let v2 = builder.gen_index(GenKind::V, a2)?;
                let lhs = builder.one_plus(v1).mul(&builder.one_plus(v2))?;
                let mut rhs = NCPoly::one(&ctx);
                for (root, _, _, c) in builder.commutator_factors(a1, a2)? {
                    let g = builder.gen_index(GenKind::V, &root)?;
                    rhs = rhs.mul(&builder.one_plus_pow(g, &Exponent::Int(c))?)?;
                }
                rhs = rhs.mul(&builder.one_plus(v2))?.mul(&builder.one_plus(v1))?;
                let sum_gen = builder.gen_index(GenKind::V, &a1.add(a2))?;
                let c11 = cb.n_const(a1, a2)?;
                relations.push(make_relation(
                    gt,
                    RelId::R5,
                    (v1, v2),
                    lhs,
                    rhs,
                    None,
                    vec![(sum_gen, reduce_mod(c11, p))],
                ));
            }
        }

        // R6: out-of-order negative pairs with a root sum; the correction
        // exponents all carry p-powers, so the graded form commutes.
        for (i, b1) in negatives_in_order.iter().enumerate() {
            for b2 in negatives_in_order.iter().take(i) {
                if !rs.contains(&b1.add(b2)) {
                    continue;
                }
                let u1 = builder.gen_index(GenKind::U, b1)?;
                let u2 = builder.gen_index(GenKind::U, b2)?;
                let lhs = builder.one_plus(u1).mul(&builder.one_plus(u2))?;
                let mut rhs = NCPoly::one(&ctx);
                for (root, i_exp, j_exp, c) in builder.commutator_factors(b1, b2)? {
                    let g = builder.gen_index(GenKind::U, &root)?;
                    let e = c * (p as i64).pow((i_exp + j_exp) as u32 - 1);
                    rhs = rhs.mul(&builder.one_plus_pow(g, &Exponent::Int(e))?)?;
                }
                rhs = rhs.mul(&builder.one_plus(u2))?.mul(&builder.one_plus(u1))?;
                relations.push(make_relation(gt, RelId::R6, (u1, u2), lhs, rhs, None, Vec::new()));
            }
        }

        Ok(Presentation {
            cartan_type: rs.cartan_type,
            params,
            gt: gt.clone(),
            relations,
            ctx,
        })
    }

    /// Verify every primed reduction; first failure wins.
    pub fn verify_all_primed(&self) -> Result<(), (String, PrimedResidual)> {
        for rel in &self.relations {
            if let Err(res) = verify_primed(&rel.instance, &rel.primed) {
                return Err((relation_label(&self.gt, &rel.instance), res));
            }
        }
        Ok(())
    }
}

fn make_relation(
    gt: &GeneratorTable,
    id: RelId,
    pair: (Gen, Gen),
    lhs: NCPoly,
    rhs: NCPoly,
    exponent: Option<i64>,
    corrections: Vec<(Gen, u64)>,
) -> Relation {
    let fil_level =
        gt.generators[pair.0 as usize].weight + gt.generators[pair.1 as usize].weight;
    let corrections = corrections.into_iter().filter(|&(_, c)| c != 0).collect();
    Relation {
        instance: RelationInstance {
            id,
            pair,
            lhs,
            rhs,
            exponent,
        },
        primed: PrimedRelation {
            source: id,
            fil_level,
            corrections,
        },
    }
}

fn reduce_mod(v: i64, p: u64) -> u64 {
    (((v % p as i64) + p as i64) % p as i64) as u64
}

pub fn relation_label(gt: &GeneratorTable, rel: &RelationInstance) -> String {
    format!(
        "{} ({}, {})",
        rel.id,
        gt.generators[rel.pair.0 as usize].label(),
        gt.generators[rel.pair.1 as usize].label()
    )
}

/// Expand the relation over `F_p`, subtract the primed identity, reduce
/// modulo `Fil^{fil+1}`; the residual must vanish.
pub fn verify_primed(
    rel: &RelationInstance,
    primed: &PrimedRelation,
) -> Result<(), PrimedResidual> {
    let diff = rel
        .lhs
        .sub(&rel.rhs)
        .expect("sides share a ring")
        .to_mod_p()
        .reduce_mod_fil(primed.fil_level);
    let ctx = diff.ctx.clone();
    let (a, b) = rel.pair;
    let mut expected = NCPoly::gen(&ctx, a)
        .mul(&NCPoly::gen(&ctx, b))
        .expect("same ring");
    expected = expected
        .sub(
            &NCPoly::gen(&ctx, b)
                .mul(&NCPoly::gen(&ctx, a))
                .expect("same ring"),
        )
        .expect("same ring");
    for &(g, c) in &primed.corrections {
        expected = expected
            .sub(&NCPoly::gen(&ctx, g).scale(c))
            .expect("same ring");
    }
    let expected = expected.reduce_mod_fil(primed.fil_level);
    let residual = diff.sub(&expected).expect("same ring");
    if residual.is_zero() {
        Ok(())
    } else {
        Err(PrimedResidual(
            residual.terms_sorted().into_iter().collect(),
        ))
    }
}

// -- export / import ---------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PresentationDoc {
    pub r#type: String,
    pub p: u64,
    pub precision: u32,
    pub max_degree: i64,
    pub sign_convention: String,
    pub generators: Vec<GeneratorDoc>,
    pub relations: Vec<RelationDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GeneratorDoc {
    /// 1-based position in the ordered basis.
    pub index: usize,
    pub kind: String,
    pub root: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
    pub omega: String,
    pub weight: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RelationDoc {
    pub id: String,
    /// 1-based generator indices of the out-of-order pair.
    pub pair: [usize; 2],
    pub lhs: PolyDoc,
    pub rhs: PolyDoc,
    pub primed: PrimedDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PolyDoc {
    pub modulus: ModulusDoc,
    pub bound: i64,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ModulusDoc {
    pub p: u64,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TermDoc {
    /// 1-based generator indices.
    pub word: Vec<usize>,
    pub coeff: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PrimedDoc {
    pub fil_level: i64,
    pub corrections: Vec<CorrectionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CorrectionDoc {
    /// 1-based generator index.
    pub gen: usize,
    pub coeff: u64,
}

fn poly_doc(poly: &NCPoly, k_export: u32) -> PolyDoc {
    let p = poly.ctx.modulus.p;
    let pk = p.pow(k_export);
    let terms = poly
        .terms_sorted()
        .into_iter()
        .filter_map(|(w, c)| {
            let c = c % pk;
            if c == 0 {
                None
            } else {
                Some(TermDoc {
                    word: w.iter().map(|&g| g as usize + 1).collect(),
                    coeff: c,
                })
            }
        })
        .collect();
    PolyDoc {
        modulus: ModulusDoc { p, k: k_export },
        bound: poly.ctx.bound,
        terms,
    }
}

impl Presentation {
    pub fn to_doc(&self) -> PresentationDoc {
        let h = self.gt.coxeter_number;
        let generators = self
            .gt
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let (num, den) = g.omega(h);
                GeneratorDoc {
                    index: i + 1,
                    kind: g.kind.letter().to_string(),
                    root: g.root.coords.clone(),
                    node: g.node.map(|n| n + 1),
                    omega: format!("{num}/{den}"),
                    weight: g.weight,
                }
            })
            .collect();
        let relations = self
            .relations
            .iter()
            .map(|r| RelationDoc {
                id: r.instance.id.to_string(),
                pair: [r.instance.pair.0 as usize + 1, r.instance.pair.1 as usize + 1],
                lhs: poly_doc(&r.instance.lhs, self.params.precision),
                rhs: poly_doc(&r.instance.rhs, self.params.precision),
                primed: PrimedDoc {
                    fil_level: r.primed.fil_level,
                    corrections: r
                        .primed
                        .corrections
                        .iter()
                        .map(|&(g, c)| CorrectionDoc {
                            gen: g as usize + 1,
                            coeff: c,
                        })
                        .collect(),
                },
            })
            .collect();
        PresentationDoc {
            r#type: self.cartan_type.to_string(),
            p: self.params.p,
            precision: self.params.precision,
            max_degree: self.params.max_degree,
            sign_convention: SIGN_CONVENTION.to_string(),
            generators,
            relations,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_doc()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let h = self.gt.coxeter_number;
        out.push_str(&format!(
            "presentation {}  p = {}  precision = {}  max degree = {}\n",
            self.cartan_type, self.params.p, self.params.precision, self.params.max_degree
        ));
        out.push_str(&format!("sign convention: {SIGN_CONVENTION}\n\n"));
        out.push_str(&format!(
            "generators (d = {}), Coxeter number h = {h}:\n",
            self.gt.len()
        ));
        out.push_str("  idx  gen         omega   weight\n");
        for (i, g) in self.gt.generators.iter().enumerate() {
            let (num, den) = g.omega(h);
            out.push_str(&format!(
                "  {:>3}  {:<10}  {:>5}  {:>6}\n",
                i + 1,
                g.label(),
                format!("{num}/{den}"),
                g.weight
            ));
        }
        out.push_str(&format!("\nrelations ({}):\n", self.relations.len()));
        for rel in &self.relations {
            let a = &self.gt.generators[rel.instance.pair.0 as usize];
            let b = &self.gt.generators[rel.instance.pair.1 as usize];
            let mut corr = String::new();
            for (g, c) in &rel.primed.corrections {
                corr.push_str(&format!(
                    " + {c}*{}",
                    self.gt.generators[*g as usize].label()
                ));
            }
            out.push_str(&format!(
                "  {:<22} {}*{} = {}*{}{}   (mod Fil^{})\n",
                relation_label(&self.gt, &rel.instance),
                a.label(),
                b.label(),
                b.label(),
                a.label(),
                corr,
                rel.primed.fil_level + 1
            ));
        }
        out
    }

    /// Rebuild a presentation from its exported document. The polynomials
    /// come back at the exported precision.
    pub fn from_doc(doc: &PresentationDoc) -> Result<Presentation> {
        let cartan_type: CartanType = doc.r#type.parse()?;
        let mut generators = Vec::with_capacity(doc.generators.len());
        let mut coxeter = 0;
        for g in &doc.generators {
            let kind = match g.kind.as_str() {
                "U" => GenKind::U,
                "W" => GenKind::W,
                "V" => GenKind::V,
                other => return Err(Error::Internal(format!("unknown generator kind {other}"))),
            };
            if kind == GenKind::W {
                coxeter = g.weight;
            }
            generators.push(crate::ordering::Generator {
                kind,
                root: Root::new(g.root.clone()),
                node: g.node.map(|n| n - 1),
                weight: g.weight,
            });
        }
        let gt = GeneratorTable::from_generators(generators, coxeter);
        let modulus = Modulus::new(doc.p, doc.precision)?;
        let ctx = SeriesCtx::new(gt.weights(), modulus, doc.max_degree);
        let parse_poly = |pd: &PolyDoc| -> Result<NCPoly> {
            if pd.modulus.p != doc.p || pd.bound != doc.max_degree {
                return Err(Error::RingMismatch);
            }
            let mut acc = NCPoly::zero(&ctx);
            for t in &pd.terms {
                let word: Word = t
                    .word
                    .iter()
                    .map(|&i| {
                        if i == 0 || i > gt.len() {
                            Err(Error::IndexOutOfRange {
                                index: i,
                                rank: gt.len(),
                            })
                        } else {
                            Ok((i - 1) as Gen)
                        }
                    })
                    .collect::<Result<_>>()?;
                acc = acc.add(&NCPoly::from_word(&ctx, word, t.coeff))?;
            }
            Ok(acc)
        };
        let mut relations = Vec::with_capacity(doc.relations.len());
        for rd in &doc.relations {
            let id = match rd.id.as_str() {
                "R1" => RelId::R1,
                "R2" => RelId::R2,
                "R3" => RelId::R3,
                "R4" => RelId::R4,
                "R5" => RelId::R5,
                "R6" => RelId::R6,
                "R7" => RelId::R7,
                "R8" => RelId::R8,
                other => return Err(Error::Internal(format!("unknown relation id {other}"))),
            };
            relations.push(Relation {
                instance: RelationInstance {
                    id,
                    pair: ((rd.pair[0] - 1) as Gen, (rd.pair[1] - 1) as Gen),
                    lhs: parse_poly(&rd.lhs)?,
                    rhs: parse_poly(&rd.rhs)?,
                    exponent: None,
                },
                primed: PrimedRelation {
                    source: id,
                    fil_level: rd.primed.fil_level,
                    corrections: rd
                        .primed
                        .corrections
                        .iter()
                        .map(|c| ((c.gen - 1) as Gen, c.coeff))
                        .collect(),
                },
            });
        }
        Ok(Presentation {
            cartan_type,
            params: PresentationParams {
                p: doc.p,
                precision: doc.precision,
                max_degree: doc.max_degree,
            },
            gt,
            relations,
            ctx,
        })
    }

    pub fn from_json(s: &str) -> Result<Presentation> {
        let doc: PresentationDoc = serde_json::from_str(s)
            .map_err(|e| Error::Internal(format!("presentation parse error: {e}")))?;
        Presentation::from_doc(&doc)
    }
}

/// Count relation instances by id.
pub fn relation_counts(p: &Presentation) -> BTreeMap<RelId, usize> {
    let mut out = BTreeMap::new();
    for r in &p.relations {
        *out.entry(r.instance.id).or_insert(0) += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{generator_table, longest_word, papi_order};

    fn build(name: &str, p: u64) -> Presentation {
        let rs = Arc::new(RootSystem::new(name.parse().unwrap()).unwrap());
        let cb = ChevalleyBasis::new(rs.clone()).unwrap();
        let ord = papi_order(&rs, &longest_word(&rs)).unwrap();
        let gt = generator_table(&rs, &ord).unwrap();
        let params = PresentationParams {
            p,
            precision: 1,
            max_degree: 2 * rs.coxeter_number,
        };
        Presentation::build(&rs, &cb, &gt, params).unwrap()
    }

    #[test]
    fn prime_guard() {
        let rs = Arc::new(RootSystem::new("G2".parse().unwrap()).unwrap());
        let cb = ChevalleyBasis::new(rs.clone()).unwrap();
        let ord = papi_order(&rs, &longest_word(&rs)).unwrap();
        let gt = generator_table(&rs, &ord).unwrap();
        let params = PresentationParams {
            p: 5,
            precision: 1,
            max_degree: 12,
        };
        match Presentation::build(&rs, &cb, &gt, params) {
            Err(Error::PrimeTooSmall { minimum, h, .. }) => {
                assert_eq!(h, 6);
                assert_eq!(minimum, 11);
            }
            other => panic!("expected PrimeTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn a1_relation_inventory() {
        let pres = build("A1", 5);
        let counts = relation_counts(&pres);
        assert_eq!(counts.get(&RelId::R2), Some(&1));
        assert_eq!(counts.get(&RelId::R3), Some(&1));
        assert_eq!(counts.get(&RelId::R8), Some(&1));
        assert_eq!(counts.get(&RelId::R1), None);
        // The R2 instance has exponent <alpha, alpha> = 2, so M = (1+5)^2.
        let r2 = pres
            .relations
            .iter()
            .find(|r| r.instance.id == RelId::R2)
            .unwrap();
        assert_eq!(r2.instance.exponent, Some(2));
        let m = PadicScalar::one_plus_p_pow(2, 5, 3).unwrap();
        assert_eq!(m.residue, 36 % 125);
        // R8 correction is W with coefficient n_1 = 1 at fil level h = 2.
        let r8 = pres
            .relations
            .iter()
            .find(|r| r.instance.id == RelId::R8)
            .unwrap();
        assert_eq!(r8.primed.fil_level, 2);
        assert_eq!(r8.primed.corrections, vec![(1, 1)]);
    }

    #[test]
    fn a2_relation_inventory() {
        let pres = build("A2", 5);
        let counts = relation_counts(&pres);
        assert_eq!(counts.get(&RelId::R1), Some(&1));
        assert_eq!(counts.get(&RelId::R2), Some(&6));
        assert_eq!(counts.get(&RelId::R3), Some(&6));
        assert_eq!(counts.get(&RelId::R4), Some(&2));
        assert_eq!(counts.get(&RelId::R5), Some(&1));
        assert_eq!(counts.get(&RelId::R6), Some(&1));
        assert_eq!(counts.get(&RelId::R7), Some(&4));
        assert_eq!(counts.get(&RelId::R8), Some(&3));
        assert_eq!(pres.relations.len(), 24);
    }

    #[test]
    fn a2_r5_correction_sign() {
        let pres = build("A2", 5);
        let r5 = pres
            .relations
            .iter()
            .find(|r| r.instance.id == RelId::R5)
            .unwrap();
        // Pair (V_{d2}, V_{d1}); correction is N(d2, d1) = -1 = 4 mod 5 on
        // V_theta (generator index 6, 0-based).
        assert_eq!(r5.primed.fil_level, 2);
        assert_eq!(r5.primed.corrections, vec![(6, 4)]);
    }

    #[test]
    fn a2_r2_primed_is_plain_commutation() {
        let pres = build("A2", 5);
        for rel in pres.relations.iter().filter(|r| r.instance.id == RelId::R2) {
            assert!(rel.primed.corrections.is_empty());
            verify_primed(&rel.instance, &rel.primed).unwrap();
        }
    }

    #[test]
    fn all_primed_verify_a1_a2() {
        for (name, p) in [("A1", 5), ("A2", 5)] {
            let pres = build(name, p);
            pres.verify_all_primed()
                .unwrap_or_else(|(label, res)| panic!("{name} {label}: {res}"));
        }
    }

    #[test]
    fn relation_elements_have_no_constant_or_stray_linear_terms() {
        let pres = build("A2", 5);
        for rel in &pres.relations {
            let diff = rel
                .instance
                .lhs
                .sub(&rel.instance.rhs)
                .unwrap()
                .to_mod_p()
                .reduce_mod_fil(rel.primed.fil_level);
            assert_eq!(diff.coeff(&[]), 0, "constant term in {}", rel.instance.id);
            for (w, _) in diff.terms_sorted() {
                if w.len() == 1 {
                    let is_correction = rel
                        .primed
                        .corrections
                        .iter()
                        .any(|&(g, _)| vec![g] == w);
                    assert!(
                        is_correction,
                        "{}: stray linear term {w:?}",
                        relation_label(&pres.gt, &rel.instance)
                    );
                }
            }
        }
    }

    #[test]
    fn r7_positive_sum_commutes_and_r2_trivial_pairing_exact() {
        let pres = build("A2", 5);
        // R7 instances with a positive sum have empty corrections.
        for rel in pres.relations.iter().filter(|r| r.instance.id == RelId::R7) {
            let a = &pres.gt.generators[rel.instance.pair.0 as usize];
            let b = &pres.gt.generators[rel.instance.pair.1 as usize];
            let sum = a.root.add(&b.root);
            if sum.is_positive() {
                assert!(rel.primed.corrections.is_empty());
            } else {
                assert_eq!(rel.primed.corrections.len(), 1);
            }
        }
        // R2/R3 with pairing zero are exact commutation before reduction.
        for rel in &pres.relations {
            if rel.instance.exponent == Some(0) {
                let diff = rel.instance.lhs.sub(&rel.instance.rhs).unwrap();
                assert!(
                    diff.is_zero(),
                    "{}: M = 1 should commute exactly",
                    relation_label(&pres.gt, &rel.instance)
                );
            }
        }
    }

    #[test]
    fn export_roundtrip_and_stability() {
        let pres = build("A1", 5);
        let json1 = pres.to_json();
        let parsed = Presentation::from_json(&json1).unwrap();
        assert_eq!(parsed.to_doc(), pres.to_doc());
        let json2 = build("A1", 5).to_json();
        assert_eq!(json1, json2, "export is byte-stable");
        assert_eq!(parsed.to_json(), json1);
    }

    #[test]
    fn a2_export_has_eight_generators() {
        let pres = build("A2", 5);
        let doc = pres.to_doc();
        assert_eq!(doc.generators.len(), 8);
        assert_eq!(doc.sign_convention, SIGN_CONVENTION);
        assert!(!pres.to_text().is_empty());
    }
}
