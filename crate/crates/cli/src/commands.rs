use std::fmt::Write as _;
use std::io::IsTerminal;

use mahler_core::exactalg::expr::{parse_field_elem, parse_rational};
use mahler_core::exactalg::{ComplexBox, FieldElem};
use mahler_core::relations::{
    decide_independence_with, decision_height, find_relations, stream_dense_kernel, zero_bound, zero_bound_exact,
    Independence, SearchOptions,
};
use mahler_core::values::{
    evaluate_at, numeric_check, value_relation_basis, verdict, weighted_verdict, PointOptions, Verdict,
};
use mahler_core::{CoefficientStream, MahlerSystem};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::input::{Demo, Session};
use crate::render::{self, CheckDoc, IndependenceDoc, PointDoc, RelationsDoc, VerdictEntry, WeightedDoc};

/// What a command produced.
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub inconclusive: bool,
}

impl Outcome {
    fn new(text: String, doc: impl Serialize) -> Self {
        let json = serde_json::to_value(doc).expect("documents serialize");
        Outcome { text, json, inconclusive: false }
    }
}

/// Options shared by every command.
#[derive(Clone, Debug)]
pub struct Global {
    pub max_columns: Option<usize>,
    pub full_bound: bool,
}

impl Global {
    pub fn search(&self, session: &Session) -> SearchOptions {
        let mut o = SearchOptions { full_bound: self.full_bound, window: session.options.window, ..Default::default() };
        if let Some(m) = self.max_columns.or(session.options.max_columns) {
            o.max_columns = m;
        }
        o
    }
}

fn matrix_text(s: &MahlerSystem) -> String {
    format!("q = {}, n = {}\nA(z) =\n{}\ndet A(z) = {}\n", s.q(), s.n(), s.matrix(), s.det())
}

pub fn compile_automaton(session: &Session) -> Result<Outcome, CliError> {
    let dfao = session
        .automaton
        .as_ref()
        .ok_or_else(|| CliError::Input("compile-automaton needs an automaton input".into()))?;
    let s = &session.system;
    let mut text = format!("{} states, {} kernel sequences\n", dfao.states().len(), s.n());
    text.push_str(&matrix_text(s));
    for w in dfao.warnings() {
        let _ = writeln!(text, "warning: {w}");
    }
    let doc = json!({
        "q": s.q(),
        "states": dfao.states(),
        "size": s.n(),
        "matrix": render::ratfunc_matrix(s.matrix()),
        "det": s.det().render(),
        "warnings": dfao.warnings(),
    });
    Ok(Outcome::new(text, doc))
}

pub fn expand(session: &Session, terms: Option<usize>, component: Option<usize>) -> Result<Outcome, CliError> {
    let n = session.system.n();
    let terms = terms.or(session.options.terms).unwrap_or(10);
    if let Some(c) = component {
        if c == 0 || c > n {
            return Err(mahler_core::Error::Precondition(format!("component must be in 1..={n}, got {c}")).into());
        }
    }
    let coeffs = session.stream.prefix(terms);
    let mut text = String::new();
    let mut rows = Vec::with_capacity(terms);
    for (i, v) in coeffs.iter().enumerate() {
        let cells = match component {
            Some(c) => vec![v[c - 1].to_string()],
            None => render::elems(v),
        };
        let _ = writeln!(text, "{i}: {}", cells.join(", "));
        rows.push(cells);
    }
    Ok(Outcome::new(text, json!({ "terms": rows })))
}

pub fn bound(n: u64, d: u64, q: u64, nu: u64, h: u64) -> Result<Outcome, CliError> {
    if q < 2 {
        return Err(mahler_core::Error::Precondition(format!("q must be at least 2, got {q}")).into());
    }
    let c = zero_bound(n, d, q, nu, h);
    let exact = zero_bound_exact(n, d, q, nu, h).map(|x| x.to_string());
    let text = format!("{c}\n");
    Ok(Outcome::new(text, json!({ "c": c.to_string(), "exact": exact })))
}

fn augmented(session: &Session, augment: bool) -> (MahlerSystem, CoefficientStream) {
    if augment {
        (session.system.augment_constant(), session.stream.augment_constant())
    } else {
        (session.system.clone(), session.stream.clone())
    }
}

pub fn relations(session: &Session, g: &Global, augment: bool) -> Result<Outcome, CliError> {
    let (s, f) = augmented(session, augment);
    let basis = find_relations(&s, &f, &g.search(session))?;
    let doc = RelationsDoc::from(&basis);
    Ok(Outcome::new(doc.text(), doc))
}

pub fn independence(session: &Session, g: &Global, augment: bool) -> Result<Outcome, CliError> {
    let (s, f) = augmented(session, augment);
    let decision = decide_independence_with(&s, &f, &g.search(session))?;
    let mut doc = IndependenceDoc::from(&decision);
    if g.full_bound {
        let h = decision_height(&s);
        let c = zero_bound(s.n() as u64, s.d() as u64, s.q() as u64, s.nu() as u64, h as u64);
        let columns = usize::try_from(&c)
            .map_err(|_| mahler_core::Error::Precondition(format!("zero bound {c} does not fit in memory indices")))?;
        let verbose = std::io::stderr().is_terminal();
        let t = stream_dense_kernel(&f, h, columns, |i| {
            if verbose {
                eprintln!("{i} / {columns} columns");
            }
        })?;
        doc.full_bound = Some(render::FullBoundDoc { height: h, columns: c.to_string(), kernel_dim: t.kernel_dim() });
    }
    let inconclusive = matches!(decision, Independence::Inconclusive { .. });
    let mut out = Outcome::new(doc.text(), doc);
    out.inconclusive = inconclusive;
    Ok(out)
}

/// Options of the point and verdict commands.
#[derive(Clone, Debug, Default)]
pub struct PointArgs {
    pub alpha: String,
    pub l: Option<usize>,
    pub pipeline: bool,
}

impl PointArgs {
    fn options(&self, session: &Session, g: &Global) -> PointOptions {
        PointOptions { l: self.l, force_pipeline: self.pipeline, search: g.search(session) }
    }
}

pub fn point(session: &Session, g: &Global, args: &PointArgs) -> Result<Outcome, CliError> {
    let alpha = parse_field_elem(&args.alpha, &session.field)?;
    let report = value_relation_basis(&session.system, &session.stream, &alpha, &args.options(session, g))?;
    let doc = PointDoc::from(&report);
    Ok(Outcome::new(doc.text(), doc))
}

/// Settings of the partial-sum check.
#[derive(Clone, Debug)]
pub struct CheckArgs {
    pub terms: usize,
    pub precision: Option<u32>,
    pub coefficient_bound: Option<String>,
}

#[derive(Serialize)]
struct VerdictDoc {
    #[serde(flatten)]
    point: PointDoc,
    verdicts: Vec<VerdictEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weighted: Option<WeightedDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<CheckDoc>,
}

fn weighted_ball(balls: &[ComplexBox], v: &[FieldElem], bits: u32) -> Result<ComplexBox, CliError> {
    let mut acc = ComplexBox::zero();
    for (x, b) in v.iter().zip(balls) {
        if !x.is_zero() {
            acc = acc.add(&x.embed_ball(bits)?.mul(b)).round(bits);
        }
    }
    Ok(acc)
}

pub fn verdict_cmd(
    session: &Session,
    g: &Global,
    args: &PointArgs,
    weights: Option<&str>,
    check: Option<&CheckArgs>,
) -> Result<Outcome, CliError> {
    let field = &session.field;
    let (s, f) = (&session.system, &session.stream);
    let alpha = parse_field_elem(&args.alpha, field)?;
    let opts = args.options(session, g);
    let vr = verdict(s, f, &alpha, &opts)?;
    let labels: Vec<String> = (1..=s.n()).map(|i| format!("f{i}")).collect();
    let verdicts: Vec<VerdictEntry> =
        vr.verdicts.iter().zip(&labels).map(|(v, l)| VerdictEntry::new(l.clone(), v)).collect();
    let mut inconclusive = vr.verdicts.iter().any(|v| matches!(v, Verdict::Inconclusive(_)));

    let weighted = match weights {
        None => None,
        Some(w) => {
            let omega = w
                .split(',')
                .map(|x| parse_field_elem(x.trim(), field))
                .collect::<Result<Vec<_>, _>>()?;
            let wv = weighted_verdict(s, f, &alpha, &omega, &opts)?;
            inconclusive |= matches!(wv.verdict, Verdict::Inconclusive(_));
            let label = omega
                .iter()
                .zip(&labels)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, l)| if c.is_one() { l.clone() } else { format!("({c})*{l}") })
                .collect::<Vec<_>>();
            let label = if label.len() == 1 { label[0].clone() } else { format!("({})", label.join(" + ")) };
            let (kernel_part, functional_part) = match &wv.decomposition {
                Some((a, b)) => (Some(render::elems(a)), Some(render::elems(b))),
                None => (None, None),
            };
            let doc = WeightedDoc {
                weights: render::elems(&omega),
                verdict: VerdictEntry::new(label, &wv.verdict),
                kernel_part,
                functional_part,
            };
            Some((omega, wv.verdict, doc))
        }
    };

    let check_doc = match check {
        None => None,
        Some(c) => {
            let bound = c.coefficient_bound.as_deref().map(parse_rational).transpose()?;
            let precision = c.precision.or(session.options.precision).unwrap_or(256);
            let faug = f.augment_constant();
            let mut nc = numeric_check(&vr.report, &faug, &vr.verdicts, c.terms, precision, bound.as_ref())?;
            if let Some((omega, Verdict::Algebraic(v), _)) = &weighted {
                let bits = precision + 16;
                let (balls, _, _) = evaluate_at(&faug, &alpha, c.terms, precision, bound.as_ref())?;
                let ball = weighted_ball(&balls, omega, bits)?.sub(&v.embed_ball(bits)?);
                nc.residuals.push(mahler_core::values::Residual {
                    label: "weighted - value".into(),
                    contains_zero: ball.contains_zero(),
                    ball,
                });
            }
            Some(CheckDoc::new(&nc, c.terms, precision))
        }
    };

    let point = PointDoc::from(&vr.report);
    let mut text = point.text();
    for v in &verdicts {
        let _ = writeln!(text, "{}", v.text());
    }
    let weighted = weighted.map(|(_, _, doc)| {
        let _ = writeln!(text, "{}", doc.verdict.text());
        doc
    });
    if let Some(c) = &check_doc {
        text.push_str(&c.text());
    }
    let doc = VerdictDoc { point, verdicts, weighted, check: check_doc };
    let mut out = Outcome::new(text, doc);
    out.inconclusive = inconclusive;
    Ok(out)
}

/// Runs the full analysis of a built-in example.
pub fn demo(which: Demo, g: &Global) -> Result<Outcome, CliError> {
    let session = which.session()?;
    let (name, points, weights): (&str, &[&str], Option<&str>) = match which {
        Demo::Thue3 => ("thue3", &["t", "1/2"], None),
        Demo::FourState => ("four-state", &["t"], Some("1,1,1,1")),
    };
    let check = CheckArgs { terms: 2000, precision: Some(256), coefficient_bound: Some("1".into()) };
    let field = &session.field;
    let mut text = format!("field: Q(t), {} = 0, t ~ -0.618\n\n", field.minpoly_string().replace('z', "t"));
    let mut docs = serde_json::Map::new();
    docs.insert("demo".into(), json!(name));
    docs.insert("field".into(), json!({ "minpoly": field.minpoly_string(), "root_near": "-0.618" }));
    let mut inconclusive = false;
    let mut section = |title: &str, key: &str, out: Outcome, text: &mut String| {
        let _ = writeln!(text, "== {title}\n{}", out.text);
        docs.insert(key.into(), out.json);
        inconclusive |= out.inconclusive;
    };
    section("automaton", "compile", compile_automaton(&session)?, &mut text);
    section("independence over k(z)", "independence", independence(&session, g, false)?, &mut text);
    section("relations with the constant function", "relations", relations(&session, g, true)?, &mut text);
    let mut verdicts = Vec::new();
    for (i, alpha) in points.iter().enumerate() {
        let args = PointArgs { alpha: alpha.to_string(), ..Default::default() };
        let w = if i == 0 { weights } else { None };
        let out = verdict_cmd(&session, g, &args, w, Some(&check))?;
        let _ = writeln!(text, "== values at {alpha}\n{}", out.text);
        inconclusive |= out.inconclusive;
        verdicts.push(out.json);
    }
    docs.insert("points".into(), Value::Array(verdicts));
    let mut out = Outcome { text, json: Value::Object(docs), inconclusive };
    out.text = out.text.trim_end().to_string() + "\n";
    Ok(out)
}
