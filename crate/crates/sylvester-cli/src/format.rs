//! Instance file parsing and rendering.
//!
//! The format is line oriented. `#` starts a comment, blank lines are
//! skipped, and the first directive must be `dim <n>` so later
//! descriptors know how many coordinates to read. Remaining directives:
//!
//! ```text
//! dynamic euclidean | scaled-euclidean <r> | linf | l1
//! constraint <set>
//! intersect <set>
//! enclose <set>
//! directional <set> dir <v_1 .. v_n>
//! ```
//!
//! where `<set>` is one of
//!
//! ```text
//! ball <c_1 .. c_n> <radius>
//! cube <c_1 .. c_n> <radius>
//! halfspace <a_1 .. a_n> <offset>
//! singleton <p_1 .. p_n>
//! parabola <shift> <offset>          (n = 2 only)
//! whole                              (constraint only)
//! ```
//!
//! A file parses to exactly one instance kind: `directional` lines may
//! not be mixed with `intersect`/`enclose` lines, and only standard
//! files take a `dynamic` directive. A missing `constraint` defaults to
//! the whole space; a missing `dynamic` defaults to `euclidean`.

use std::fmt;

use sylvester::directional::{DirectionalInstance, DirectionalTarget};
use sylvester::geometry::{ConvexSet, Dynamic};
use sylvester::timefns::SylvesterInstance;

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedInstance {
    Standard(SylvesterInstance),
    Directional(DirectionalInstance),
}

impl ParsedInstance {
    pub fn dim(&self) -> usize {
        match self {
            ParsedInstance::Standard(inst) => inst.dim(),
            ParsedInstance::Directional(inst) => inst.dim(),
        }
    }

    /// Total number of targets, the `m` column of reports.
    pub fn target_count(&self) -> usize {
        match self {
            ParsedInstance::Standard(inst) => {
                inst.intersect_targets().len() + inst.enclose_targets().len()
            }
            ParsedInstance::Directional(inst) => inst.targets().len(),
        }
    }
}

/// Parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, col, message: message.into() })
}

/// Whitespace-separated tokens of one line with their 1-based character
/// columns, the comment tail stripped.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((char_col(body, s), &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((char_col(body, s), &body[s..]));
    }
    out
}

fn char_col(body: &str, byte_pos: usize) -> usize {
    body[..byte_pos].chars().count() + 1
}

/// Cursor over one line's tokens that reports precise positions on
/// missing or malformed fields.
struct Cursor<'a> {
    line_no: usize,
    line_len: usize,
    toks: &'a [(usize, &'a str)],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        match self.toks.get(self.pos) {
            Some(&(col, tok)) => {
                self.pos += 1;
                Ok((col, tok))
            }
            None => err(self.line_no, self.line_len + 1, format!("expected {what}")),
        }
    }

    fn number(&mut self, what: &str) -> Result<f64, ParseError> {
        let (col, tok) = self.next(what)?;
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => err(self.line_no, col, format!("expected {what}, got `{tok}`")),
        }
    }

    fn numbers(&mut self, count: usize, what: &str) -> Result<Vec<f64>, ParseError> {
        (0..count).map(|_| self.number(what)).collect()
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.toks.get(self.pos) {
            Some(&(col, tok)) => err(self.line_no, col, format!("unexpected trailing `{tok}`")),
            None => Ok(()),
        }
    }
}

/// Parse a set descriptor. `allow_whole` admits the bare `whole` form
/// used by constraints.
fn parse_set(cur: &mut Cursor, dim: usize, allow_whole: bool) -> Result<ConvexSet, ParseError> {
    let (col, kind) = cur.next("a set kind")?;
    let line = cur.line_no;
    let constructed = match kind {
        "ball" => {
            let center = cur.numbers(dim, "a center coordinate")?;
            let radius = cur.number("a radius")?;
            ConvexSet::ball(center, radius)
        }
        "cube" => {
            let center = cur.numbers(dim, "a center coordinate")?;
            let radius = cur.number("a radius")?;
            ConvexSet::cube(center, radius)
        }
        "halfspace" => {
            let normal = cur.numbers(dim, "a normal coordinate")?;
            let offset = cur.number("an offset")?;
            ConvexSet::halfspace(normal, offset)
        }
        "singleton" => {
            let point = cur.numbers(dim, "a point coordinate")?;
            ConvexSet::singleton(point)
        }
        "parabola" => {
            if dim != 2 {
                return err(line, col, format!("parabola sets are planar, instance has dim {dim}"));
            }
            let shift = cur.number("a shift")?;
            let offset = cur.number("an offset")?;
            ConvexSet::parabola_epigraph(shift, offset)
        }
        "whole" if allow_whole => ConvexSet::whole_space(dim),
        _ => return err(line, col, format!("unknown set kind `{kind}`")),
    };
    constructed.map_err(|e| ParseError { line, col, message: e.to_string() })
}

fn parse_dynamic(cur: &mut Cursor) -> Result<Dynamic, ParseError> {
    let (col, tag) = cur.next("a dynamic tag")?;
    match tag {
        "euclidean" => Ok(Dynamic::EuclideanBall),
        "scaled-euclidean" => {
            let radius = cur.number("a radius")?;
            if radius <= 0.0 {
                return err(cur.line_no, col, "scaled-euclidean radius must be positive");
            }
            Ok(Dynamic::ScaledEuclideanBall { radius })
        }
        "linf" => Ok(Dynamic::LInfBall),
        "l1" => Ok(Dynamic::L1Ball),
        _ => err(cur.line_no, col, format!("unknown dynamic `{tag}`")),
    }
}

pub fn parse_str(text: &str) -> Result<ParsedInstance, ParseError> {
    let mut dim: Option<usize> = None;
    let mut dynamic: Option<(usize, Dynamic)> = None;
    let mut constraint: Option<ConvexSet> = None;
    let mut intersect: Vec<ConvexSet> = Vec::new();
    let mut enclose: Vec<ConvexSet> = Vec::new();
    let mut directional: Vec<(usize, DirectionalTarget)> = Vec::new();
    let mut first_standard_line: Option<usize> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            line_no,
            line_len: raw.chars().count(),
            toks: &toks,
            pos: 0,
        };
        let (col, directive) = cur.next("a directive")?;

        if directive == "dim" {
            if dim.is_some() {
                return err(line_no, col, "duplicate dim directive");
            }
            let (vcol, tok) = cur.next("a positive dimension")?;
            match tok.parse::<usize>() {
                Ok(n) if n >= 1 => dim = Some(n),
                _ => return err(line_no, vcol, format!("expected a positive dimension, got `{tok}`")),
            }
            cur.finish()?;
            continue;
        }
        let Some(n) = dim else {
            return err(line_no, col, "dim must be the first directive");
        };

        match directive {
            "dynamic" => {
                if dynamic.is_some() {
                    return err(line_no, col, "duplicate dynamic directive");
                }
                dynamic = Some((line_no, parse_dynamic(&mut cur)?));
            }
            "constraint" => {
                if constraint.is_some() {
                    return err(line_no, col, "duplicate constraint directive");
                }
                constraint = Some(parse_set(&mut cur, n, true)?);
            }
            "intersect" => {
                first_standard_line.get_or_insert(line_no);
                intersect.push(parse_set(&mut cur, n, false)?);
            }
            "enclose" => {
                first_standard_line.get_or_insert(line_no);
                enclose.push(parse_set(&mut cur, n, false)?);
            }
            "directional" => {
                let set = parse_set(&mut cur, n, false)?;
                let (kcol, keyword) = cur.next("the keyword `dir`")?;
                if keyword != "dir" {
                    return err(line_no, kcol, format!("expected `dir`, got `{keyword}`"));
                }
                let v = cur.numbers(n, "a direction coordinate")?;
                let target = DirectionalTarget::new(set, v)
                    .map_err(|e| ParseError { line: line_no, col, message: e.to_string() })?;
                directional.push((line_no, target));
            }
            _ => return err(line_no, col, format!("unknown directive `{directive}`")),
        }
        cur.finish()?;
    }

    let Some(n) = dim else {
        return err(last_line.max(1), 1, "missing dim directive");
    };
    let constraint = constraint.unwrap_or_else(|| ConvexSet::whole_space(n).expect("n >= 1"));

    if let Some((dline, _)) = directional.first() {
        if let Some(sline) = first_standard_line {
            let line = sline.max(*dline);
            return err(line, 1, "directional targets cannot be mixed with intersect or enclose targets");
        }
        if let Some((dyn_line, _)) = dynamic {
            return err(dyn_line, 1, "directional instances take no dynamic directive");
        }
        let targets = directional.into_iter().map(|(_, t)| t).collect();
        let inst = DirectionalInstance::new(constraint, targets)
            .map_err(|e| ParseError { line: last_line, col: 1, message: e.to_string() })?;
        return Ok(ParsedInstance::Directional(inst));
    }

    let dynamic = dynamic.map(|(_, d)| d).unwrap_or(Dynamic::EuclideanBall);
    let inst = SylvesterInstance::new(dynamic, constraint, intersect, enclose)
        .map_err(|e| ParseError { line: last_line, col: 1, message: e.to_string() })?;
    Ok(ParsedInstance::Standard(inst))
}

fn push_numbers(out: &mut String, values: &[f64]) {
    for v in values {
        out.push(' ');
        out.push_str(&format!("{v:?}"));
    }
}

fn render_set(out: &mut String, set: &ConvexSet) {
    match set {
        ConvexSet::Ball { center, radius } => {
            out.push_str("ball");
            push_numbers(out, center);
            push_numbers(out, &[*radius]);
        }
        ConvexSet::Box { center, radius } => {
            out.push_str("cube");
            push_numbers(out, center);
            push_numbers(out, &[*radius]);
        }
        ConvexSet::Halfspace { normal, offset } => {
            out.push_str("halfspace");
            push_numbers(out, normal);
            push_numbers(out, &[*offset]);
        }
        ConvexSet::Singleton { point } => {
            out.push_str("singleton");
            push_numbers(out, point);
        }
        ConvexSet::ParabolaEpigraph2D { shift, offset } => {
            out.push_str("parabola");
            push_numbers(out, &[*shift, *offset]);
        }
        ConvexSet::WholeSpace { .. } => out.push_str("whole"),
    }
}

fn render_dynamic(out: &mut String, dynamic: &Dynamic) {
    match dynamic {
        Dynamic::EuclideanBall => out.push_str("euclidean"),
        Dynamic::ScaledEuclideanBall { radius } => {
            out.push_str("scaled-euclidean");
            push_numbers(out, &[*radius]);
        }
        Dynamic::LInfBall => out.push_str("linf"),
        Dynamic::L1Ball => out.push_str("l1"),
    }
}

/// Render an instance in the file format; `parse_str` inverts this
/// exactly, floats included.
pub fn render(inst: &ParsedInstance) -> String {
    let mut out = String::new();
    out.push_str(&format!("dim {}\n", inst.dim()));
    match inst {
        ParsedInstance::Standard(inst) => {
            out.push_str("dynamic ");
            render_dynamic(&mut out, inst.dynamic());
            out.push('\n');
            out.push_str("constraint ");
            render_set(&mut out, inst.constraint());
            out.push('\n');
            for set in inst.intersect_targets() {
                out.push_str("intersect ");
                render_set(&mut out, set);
                out.push('\n');
            }
            for set in inst.enclose_targets() {
                out.push_str("enclose ");
                render_set(&mut out, set);
                out.push('\n');
            }
        }
        ParsedInstance::Directional(inst) => {
            out.push_str("constraint ");
            render_set(&mut out, inst.constraint());
            out.push('\n');
            for target in inst.targets() {
                out.push_str("directional ");
                render_set(&mut out, target.set());
                out.push_str(" dir");
                push_numbers(&mut out, target.direction());
                out.push('\n');
            }
        }
    }
    out
}
