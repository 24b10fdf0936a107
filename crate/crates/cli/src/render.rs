//! Conversions of library results into JSON documents and terminal text.

use std::fmt::Write as _;
use std::sync::OnceLock;

use mahler_core::exactalg::{FieldElem, Matrix, Poly, RatFunc, SubspaceBasis};
use mahler_core::relations::{Independence, RelationBasis, Status};
use mahler_core::values::{NumericCheck, PointReport, Verdict};
use mahler_core::Classification;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

static COLOR: OnceLock<bool> = OnceLock::new();

/// Enables ANSI colors for the rest of the process.
pub fn init_color(enabled: bool) {
    let _ = COLOR.set(enabled);
}

#[derive(Clone, Copy)]
pub enum Tone {
    Good,
    Bad,
    Warn,
}

pub fn paint(s: &str, tone: Tone) -> String {
    if !COLOR.get().copied().unwrap_or(false) {
        return s.to_string();
    }
    let code = match tone {
        Tone::Good => "32",
        Tone::Bad => "31",
        Tone::Warn => "33",
    };
    format!("\x1b[{code}m{s}\x1b[0m")
}

pub fn poly(p: &Poly) -> String {
    p.render("z")
}

pub fn vector(v: &[Poly]) -> Vec<String> {
    v.iter().map(poly).collect()
}

pub fn elems(v: &[FieldElem]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

pub fn subspace(b: &SubspaceBasis) -> Vec<Vec<String>> {
    b.rows().iter().map(|r| elems(r)).collect()
}

pub fn ratfunc_matrix(m: &Matrix<RatFunc>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(RatFunc::render).collect()).collect()
}

pub fn status(s: Status) -> &'static str {
    match s {
        Status::Certified => "certified",
        Status::Candidate => "candidate",
    }
}

#[derive(Serialize)]
pub struct RelationsDoc {
    pub rank: usize,
    pub generators: Vec<Vec<String>>,
    pub status: &'static str,
    pub columns_used: usize,
    pub height: usize,
}

impl From<&RelationBasis> for RelationsDoc {
    fn from(b: &RelationBasis) -> Self {
        RelationsDoc {
            rank: b.rank,
            generators: b.generators.iter().map(|g| vector(&g.w)).collect(),
            status: status(b.status),
            columns_used: b.columns_used,
            height: b.height,
        }
    }
}

impl RelationsDoc {
    pub fn text(&self) -> String {
        let tone = if self.status == "certified" { Tone::Good } else { Tone::Warn };
        let mut out = format!(
            "rank {} ({}), height {}, {} columns\n",
            self.rank,
            paint(self.status, tone),
            self.height,
            self.columns_used
        );
        for g in &self.generators {
            let _ = writeln!(out, "  ({})", g.join(", "));
        }
        out
    }
}

#[derive(Serialize)]
pub struct FullBoundDoc {
    pub height: usize,
    pub columns: String,
    pub kernel_dim: usize,
}

#[derive(Serialize)]
pub struct IndependenceDoc {
    pub decision: &'static str,
    pub columns_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full_bound: Option<FullBoundDoc>,
}

impl From<&Independence> for IndependenceDoc {
    fn from(d: &Independence) -> Self {
        let (decision, columns_used, relation) = match d {
            Independence::Independent { columns_used } => ("independent", *columns_used, None),
            Independence::Dependent { relation, columns_used, .. } => {
                ("dependent", *columns_used, Some(vector(relation)))
            }
            Independence::Inconclusive { columns_used } => ("inconclusive", *columns_used, None),
        };
        IndependenceDoc { decision, columns_used, relation, full_bound: None }
    }
}

impl IndependenceDoc {
    pub fn text(&self) -> String {
        let tone = match self.decision {
            "independent" => Tone::Good,
            "dependent" => Tone::Bad,
            _ => Tone::Warn,
        };
        let mut out = format!("{} after {} columns\n", paint(self.decision, tone), self.columns_used);
        if let Some(r) = &self.relation {
            let _ = writeln!(out, "  relation ({})", r.join(", "));
        }
        if let Some(fb) = &self.full_bound {
            let _ = writeln!(
                out,
                "  full bound: {} columns at height {}, kernel dimension {}",
                fb.columns, fb.height, fb.kernel_dim
            );
        }
        out
    }
}

#[derive(Serialize)]
pub struct PipelineDoc {
    pub bbc_order: usize,
    pub lambda: Vec<String>,
    pub doublings: usize,
    pub size: usize,
}

#[derive(Serialize)]
pub struct PointDoc {
    pub alpha: String,
    pub class: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_at: Option<u32>,
    pub l: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<Vec<String>>>,
    pub functional_values: Vec<Vec<String>>,
    pub value_relations: Vec<Vec<String>>,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineDoc>,
}

impl From<&PointReport> for PointDoc {
    fn from(r: &PointReport) -> Self {
        let (class, singular_at) = match r.class.classification {
            Classification::Regular => ("regular", None),
            Classification::SingularDetZero(l) => ("singular-det-zero", Some(l)),
            Classification::SingularPole(l) => ("singular-pole", Some(l)),
        };
        PointDoc {
            alpha: r.alpha.to_string(),
            class,
            singular_at,
            l: r.l,
            kernel: r.kernel.as_ref().map(subspace),
            functional_values: subspace(&r.functional_eval),
            value_relations: subspace(&r.value_relations),
            status: status(r.status),
            pipeline: r.pipeline.as_ref().map(|p| PipelineDoc {
                bbc_order: p.order,
                lambda: elems(&p.lambda),
                doublings: p.doublings,
                size: p.size,
            }),
        }
    }
}

fn rows_text(out: &mut String, title: &str, rows: &[Vec<String>]) {
    if rows.is_empty() {
        let _ = writeln!(out, "{title}: {{0}}");
    } else {
        let _ = writeln!(out, "{title}:");
        for r in rows {
            let _ = writeln!(out, "  ({})", r.join(", "));
        }
    }
}

impl PointDoc {
    pub fn text(&self) -> String {
        let mut out = format!("alpha = {}\nclass: {}", self.alpha, self.class);
        if let Some(l) = self.singular_at {
            let _ = write!(out, " at iterate {l}");
        }
        let _ = writeln!(out, "\nl = {}", self.l);
        if let Some(k) = &self.kernel {
            rows_text(&mut out, "ker A_l(alpha)", k);
        }
        if let Some(p) = &self.pipeline {
            let _ = writeln!(
                out,
                "embedding order {}, {} doublings, working size {}, scale {}",
                p.bbc_order,
                p.doublings,
                p.size,
                p.lambda.first().map_or("1", String::as_str)
            );
        }
        rows_text(&mut out, "value relations", &self.value_relations);
        out
    }
}

#[derive(Serialize)]
pub struct VerdictEntry {
    pub f: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl VerdictEntry {
    pub fn new(label: String, v: &Verdict) -> Self {
        let (status, value, reason) = match v {
            Verdict::Algebraic(x) => ("algebraic", Some(x.to_string()), None),
            Verdict::Transcendental => ("transcendental", None, None),
            Verdict::Inconclusive(r) => ("inconclusive", None, Some(r.clone())),
        };
        VerdictEntry { f: label, status, value, reason }
    }

    pub fn text(&self) -> String {
        match (&self.value, &self.reason) {
            (Some(v), _) => format!("{}(alpha) = {}  [{}]", self.f, v, paint(self.status, Tone::Good)),
            (_, Some(r)) => format!("{}(alpha): {} ({r})", self.f, paint(self.status, Tone::Warn)),
            _ => format!("{}(alpha): {}", self.f, paint(self.status, Tone::Good)),
        }
    }
}

#[derive(Serialize)]
pub struct WeightedDoc {
    pub weights: Vec<String>,
    #[serde(flatten)]
    pub verdict: VerdictEntry,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_part: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub functional_part: Option<Vec<String>>,
}

#[derive(Serialize)]
pub struct ResidualDoc {
    pub label: String,
    pub contains_zero: bool,
    pub center: String,
    pub radius: String,
}

/// Scientific notation for nonnegative rationals of any size.
pub fn sci(x: &BigRational) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let e2 = x.numer().bits() as i64 - x.denom().bits() as i64;
    // bring the value near 1 before converting to f64
    let scaled = if e2 > 0 {
        x / BigRational::from_integer(BigInt::one() << e2 as u64)
    } else {
        x * BigRational::from_integer(BigInt::one() << (-e2) as u64)
    };
    let log10 = scaled.to_f64().unwrap_or(1.0).log10() + e2 as f64 * std::f64::consts::LOG10_2;
    let e = log10.floor();
    format!("{:.3}e{}", 10f64.powf(log10 - e), e as i64)
}

#[derive(Serialize)]
pub struct CheckDoc {
    pub terms: usize,
    pub precision: u32,
    pub tail: String,
    pub tail_certified: bool,
    pub passed: bool,
    pub residuals: Vec<ResidualDoc>,
}

impl CheckDoc {
    pub fn new(c: &NumericCheck, terms: usize, precision: u32) -> Self {
        let residuals = c
            .residuals
            .iter()
            .map(|r| {
                let (re, im) = r.ball.to_f64();
                let w = r.ball.width().to_f64().unwrap_or(f64::NAN);
                ResidualDoc {
                    label: r.label.clone(),
                    contains_zero: r.contains_zero,
                    center: format!("{re:.3e}{im:+.3e}i"),
                    radius: format!("{:.3e}", w / 2.0),
                }
            })
            .collect();
        CheckDoc {
            terms,
            precision,
            tail: sci(&c.tail),
            tail_certified: c.tail_certified,
            passed: c.all_contain_zero(),
            residuals,
        }
    }

    pub fn text(&self) -> String {
        let verdict = if self.passed { paint("pass", Tone::Good) } else { paint("FAIL", Tone::Bad) };
        let mut out = format!(
            "numeric check ({} terms, {} bits, tail {}{}): {verdict}\n",
            self.terms,
            self.precision,
            self.tail,
            if self.tail_certified { "" } else { ", estimated" }
        );
        for r in &self.residuals {
            let mark = if r.contains_zero { "0 in ball" } else { "0 NOT in ball" };
            let _ = writeln!(out, "  {:<17} {} +- {}  {mark}", r.label, r.center, r.radius);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mahler_core::exactalg::expr::parse_poly;
    use mahler_core::exactalg::NumberField;

    #[test]
    fn rendered_polynomials_parse_back() {
        let k = mahler_core::fixtures::golden_field();
        for src in ["1 - z", "(1/2*t + 1)*z^2 - z", "-t", "0", "z^3 + 2/3"] {
            let p = parse_poly(src, &k).unwrap();
            assert_eq!(parse_poly(&poly(&p), &k).unwrap(), p, "{src}");
        }
        let q = NumberField::rationals();
        assert_eq!(poly(&Poly::from_ints(&q, &[1, -1])), "-z + 1");
    }

    #[test]
    fn scientific_notation_survives_underflow() {
        let tiny = BigRational::new(BigInt::one(), BigInt::from(10).pow(500));
        assert_eq!(sci(&tiny), "1.000e-500");
        assert_eq!(sci(&BigRational::from_integer(BigInt::from(2500))), "2.500e3");
        assert_eq!(sci(&BigRational::zero()), "0");
    }

    #[test]
    fn colors_are_off_by_default() {
        assert_eq!(paint("x", Tone::Good), "x");
    }
}
