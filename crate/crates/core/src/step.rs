//! Minimal STEP (ISO 10303-21) reader and writer for the analytic B-rep
//! subset of this crate.
//!
//! The reader accepts ASCII Part 21 files, follows references from each
//! `MANIFOLD_SOLID_BREP` (or, failing that, each `CLOSED_SHELL`), and maps
//! the reachable entities 1:1 onto [`Model`]. Reachable entities outside the
//! supported subset are hard errors; unreachable ones (product context,
//! units, presentation) are skipped with a warning. The writer emits a
//! deterministic file that reads back geometry-identically.

use crate::brep::{
    BrepError, Coedge, Curve, Edge, EdgeId, Face, FaceId, Loop, LoopKind, Model, Surface, Vertex,
    VertexId,
};
use crate::math::Vec3;
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StepError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("#{referer} references #{target}, which is not defined")]
    DanglingReference { referer: u64, target: u64 },
    #[error("#{id}: unsupported entity {keyword}")]
    UnsupportedEntity { id: u64, keyword: String },
    #[error("no MANIFOLD_SOLID_BREP or CLOSED_SHELL entity in the file")]
    NoSolid,
    #[error(transparent)]
    Topology(#[from] BrepError),
}

/// Entity keywords the converter understands.
const SUPPORTED: &[&str] = &[
    "CARTESIAN_POINT",
    "DIRECTION",
    "VECTOR",
    "AXIS2_PLACEMENT_3D",
    "PLANE",
    "CYLINDRICAL_SURFACE",
    "CONICAL_SURFACE",
    "SPHERICAL_SURFACE",
    "TOROIDAL_SURFACE",
    "LINE",
    "CIRCLE",
    "VERTEX_POINT",
    "EDGE_CURVE",
    "ORIENTED_EDGE",
    "EDGE_LOOP",
    "FACE_BOUND",
    "FACE_OUTER_BOUND",
    "ADVANCED_FACE",
    "CLOSED_SHELL",
    "MANIFOLD_SOLID_BREP",
];

/// One parameter of an entity record.
#[derive(Clone, Debug, PartialEq)]
pub enum Param {
    Real(f64),
    Str(String),
    Ref(u64),
    Enum(String),
    Unset,
    Derived,
    List(Vec<Param>),
    /// Typed parameter, e.g. `LENGTH_MEASURE(1.0)`.
    Typed(String, Vec<Param>),
}

impl Param {
    fn refs_into(&self, out: &mut Vec<u64>) {
        match self {
            Param::Ref(r) => out.push(*r),
            Param::List(ps) | Param::Typed(_, ps) => {
                for p in ps {
                    p.refs_into(out);
                }
            }
            _ => {}
        }
    }
}

/// One `#id = KEYWORD(...)` record, with its source position.
#[derive(Clone, Debug, PartialEq)]
pub struct StepEntity {
    pub id: u64,
    pub keyword: String,
    pub params: Vec<Param>,
    pub line: usize,
    pub col: usize,
}

/// Parsed DATA section, keyed by instance id.
#[derive(Clone, Debug, Default)]
pub struct StepFile {
    pub entities: BTreeMap<u64, StepEntity>,
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ref(u64),
    Keyword(String),
    Str(String),
    Real(f64),
    Enum(String),
    Unset,
    Derived,
    LParen,
    RParen,
    Comma,
    Semi,
    Equal,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ref(r) => write!(f, "#{r}"),
            Tok::Keyword(k) => write!(f, "{k}"),
            Tok::Str(_) => write!(f, "string"),
            Tok::Real(v) => write!(f, "{v}"),
            Tok::Enum(e) => write!(f, ".{e}."),
            Tok::Unset => write!(f, "$"),
            Tok::Derived => write!(f, "*"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Comma => write!(f, ","),
            Tok::Semi => write!(f, ";"),
            Tok::Equal => write!(f, "="),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> StepError {
    StepError::Syntax { line, col, message: message.into() }
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) -> Result<(), StepError> {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') => {
                    let (line, col) = (self.line, self.col);
                    self.bump();
                    if self.chars.peek() == Some(&'*') {
                        self.bump();
                        let mut prev = ' ';
                        loop {
                            match self.bump() {
                                None => return Err(syntax(line, col, "unterminated comment")),
                                Some('/') if prev == '*' => break,
                                Some(c) => prev = c,
                            }
                        }
                    } else {
                        return Err(syntax(line, col, "stray '/'"));
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn number(&mut self, first: char, line: usize, col: usize) -> Result<Tok, StepError> {
        let mut int = String::new();
        let mut frac = String::new();
        let mut exp = String::new();
        let mut c = first;
        let mut sign = "";
        if c == '+' || c == '-' {
            if c == '-' {
                sign = "-";
            }
            c = self
                .bump()
                .ok_or_else(|| syntax(line, col, "number cut short"))?;
        }
        let mut cur = c;
        while cur.is_ascii_digit() {
            int.push(cur);
            match self.chars.peek() {
                Some(d) if d.is_ascii_digit() || *d == '.' || *d == 'e' || *d == 'E' => {
                    cur = self.bump().expect("peeked");
                }
                _ => {
                    cur = ' ';
                }
            }
        }
        if cur == '.' {
            while let Some(d) = self.chars.peek() {
                if d.is_ascii_digit() {
                    frac.push(self.bump().expect("peeked"));
                } else {
                    break;
                }
            }
            if matches!(self.chars.peek(), Some('e' | 'E')) {
                cur = self.bump().expect("peeked");
            } else {
                cur = ' ';
            }
        }
        if cur == 'e' || cur == 'E' {
            if matches!(self.chars.peek(), Some('+' | '-')) {
                exp.push(self.bump().expect("peeked"));
            }
            let mut any = false;
            while let Some(d) = self.chars.peek() {
                if d.is_ascii_digit() {
                    exp.push(self.bump().expect("peeked"));
                    any = true;
                } else {
                    break;
                }
            }
            if !any {
                return Err(syntax(line, col, "exponent without digits"));
            }
        }
        if int.is_empty() && frac.is_empty() {
            return Err(syntax(line, col, "malformed number"));
        }
        let normalized = format!(
            "{sign}{}.{}e{}",
            if int.is_empty() { "0" } else { &int },
            if frac.is_empty() { "0" } else { &frac },
            if exp.is_empty() { "0" } else { &exp },
        );
        normalized
            .parse::<f64>()
            .map(Tok::Real)
            .map_err(|_| syntax(line, col, "malformed number"))
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize, usize)>, StepError> {
        self.skip_trivia()?;
        let (line, col) = (self.line, self.col);
        let Some(c) = self.bump() else { return Ok(None) };
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '=' => Tok::Equal,
            '$' => Tok::Unset,
            '*' => Tok::Derived,
            '#' => {
                let mut digits = String::new();
                while let Some(d) = self.chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(self.bump().expect("peeked"));
                    } else {
                        break;
                    }
                }
                let id = digits
                    .parse::<u64>()
                    .map_err(|_| syntax(line, col, "'#' without an instance id"))?;
                Tok::Ref(id)
            }
            '\'' => {
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(syntax(line, col, "unterminated string")),
                        Some('\'') => {
                            if self.chars.peek() == Some(&'\'') {
                                self.bump();
                                s.push('\'');
                            } else {
                                break;
                            }
                        }
                        Some(ch) => s.push(ch),
                    }
                }
                Tok::Str(s)
            }
            '.' => {
                if self.chars.peek().is_some_and(|d| d.is_ascii_digit()) {
                    return self.number_fraction_start(line, col).map(|t| Some((t, line, col)));
                }
                let mut name = String::new();
                loop {
                    match self.bump() {
                        None => return Err(syntax(line, col, "unterminated enumeration")),
                        Some('.') => break,
                        Some(ch) if ch.is_ascii_alphanumeric() || ch == '_' => name.push(ch),
                        Some(ch) => {
                            return Err(syntax(line, col, format!("bad enumeration char {ch:?}")))
                        }
                    }
                }
                Tok::Enum(name)
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' => self.number(c, line, col)?,
            c if c.is_ascii_alphabetic() => {
                let mut kw = String::from(c);
                while let Some(d) = self.chars.peek() {
                    if d.is_ascii_alphanumeric() || *d == '_' || *d == '-' {
                        kw.push(self.bump().expect("peeked"));
                    } else {
                        break;
                    }
                }
                Tok::Keyword(kw)
            }
            other => return Err(syntax(line, col, format!("unexpected character {other:?}"))),
        };
        Ok(Some((tok, line, col)))
    }

    fn number_fraction_start(&mut self, line: usize, col: usize) -> Result<Tok, StepError> {
        let mut frac = String::new();
        while let Some(d) = self.chars.peek() {
            if d.is_ascii_digit() {
                frac.push(self.bump().expect("peeked"));
            } else {
                break;
            }
        }
        format!("0.{frac}")
            .parse::<f64>()
            .map(Tok::Real)
            .map_err(|_| syntax(line, col, "malformed number"))
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or((1, 1), |&(_, l, c)| (l, c))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn next(&mut self, what: &str) -> Result<Tok, StepError> {
        let (l, c) = self.here();
        match self.toks.get(self.pos) {
            Some((t, _, _)) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(syntax(l, c, format!("expected {what}, found end of file"))),
        }
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), StepError> {
        let (l, c) = self.here();
        let got = self.next(what)?;
        if &got == want {
            Ok(())
        } else {
            Err(syntax(l, c, format!("expected {what}, found {got}")))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), StepError> {
        self.expect(&Tok::Keyword(kw.to_string()), kw)
    }

    fn param(&mut self) -> Result<Param, StepError> {
        let (l, c) = self.here();
        match self.next("parameter")? {
            Tok::Real(v) => Ok(Param::Real(v)),
            Tok::Str(s) => Ok(Param::Str(s)),
            Tok::Ref(r) => Ok(Param::Ref(r)),
            Tok::Enum(e) => Ok(Param::Enum(e)),
            Tok::Unset => Ok(Param::Unset),
            Tok::Derived => Ok(Param::Derived),
            Tok::LParen => {
                let ps = self.param_list_tail()?;
                Ok(Param::List(ps))
            }
            Tok::Keyword(kw) => {
                self.expect(&Tok::LParen, "(")?;
                let ps = self.param_list_tail()?;
                Ok(Param::Typed(kw, ps))
            }
            other => Err(syntax(l, c, format!("expected parameter, found {other}"))),
        }
    }

    /// Parses parameters up to and including the closing parenthesis.
    fn param_list_tail(&mut self) -> Result<Vec<Param>, StepError> {
        let mut out = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            out.push(self.param()?);
            let (l, c) = self.here();
            match self.next("',' or ')'")? {
                Tok::Comma => {}
                Tok::RParen => return Ok(out),
                other => return Err(syntax(l, c, format!("expected ',' or ')', found {other}"))),
            }
        }
    }
}

/// Parse the text of a Part 21 file into its DATA-section entities.
pub fn parse_step(text: &str) -> Result<StepFile, StepError> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    while let Some(t) = lexer.next_token()? {
        toks.push(t);
    }
    let mut p = Parser { toks, pos: 0 };

    p.expect_keyword("ISO-10303-21")?;
    p.expect(&Tok::Semi, ";")?;
    p.expect_keyword("HEADER")?;
    p.expect(&Tok::Semi, ";")?;
    // Header records: KEYWORD(params); until ENDSEC;
    loop {
        let (l, c) = p.here();
        match p.next("header record or ENDSEC")? {
            Tok::Keyword(kw) if kw == "ENDSEC" => {
                p.expect(&Tok::Semi, ";")?;
                break;
            }
            Tok::Keyword(_) => {
                p.expect(&Tok::LParen, "(")?;
                p.param_list_tail()?;
                p.expect(&Tok::Semi, ";")?;
            }
            other => {
                return Err(syntax(l, c, format!("expected header record, found {other}")))
            }
        }
    }

    let mut file = StepFile::default();
    loop {
        let (l, c) = p.here();
        match p.next("DATA or END-ISO-10303-21")? {
            Tok::Keyword(kw) if kw == "DATA" => {
                p.expect(&Tok::Semi, ";")?;
                loop {
                    let (el, ec) = p.here();
                    match p.next("entity or ENDSEC")? {
                        Tok::Keyword(kw) if kw == "ENDSEC" => {
                            p.expect(&Tok::Semi, ";")?;
                            break;
                        }
                        Tok::Ref(id) => {
                            p.expect(&Tok::Equal, "=")?;
                            let (kl, kc) = p.here();
                            let kw = match p.next("entity keyword")? {
                                Tok::Keyword(kw) => kw,
                                other => {
                                    return Err(syntax(
                                        kl,
                                        kc,
                                        format!("expected entity keyword, found {other}"),
                                    ))
                                }
                            };
                            p.expect(&Tok::LParen, "(")?;
                            let params = p.param_list_tail()?;
                            p.expect(&Tok::Semi, ";")?;
                            let entity =
                                StepEntity { id, keyword: kw, params, line: el, col: ec };
                            if file.entities.insert(id, entity).is_some() {
                                return Err(syntax(el, ec, format!("duplicate instance id #{id}")));
                            }
                        }
                        other => {
                            return Err(syntax(el, ec, format!("expected entity, found {other}")))
                        }
                    }
                }
            }
            Tok::Keyword(kw) if kw == "END-ISO-10303-21" => {
                p.expect(&Tok::Semi, ";")?;
                if let Some(t) = p.peek() {
                    let (l, c) = p.here();
                    return Err(syntax(l, c, format!("trailing content after footer: {t}")));
                }
                return Ok(file);
            }
            other => return Err(syntax(
                l,
                c,
                format!("expected DATA section or END-ISO-10303-21, found {other}"),
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// Conversion to Model
// ---------------------------------------------------------------------------

struct Converter<'f> {
    file: &'f StepFile,
    model: Model,
    vertex_map: HashMap<u64, VertexId>,
    edge_map: HashMap<u64, EdgeId>,
    warnings: Vec<String>,
}

impl<'f> Converter<'f> {
    fn err(&self, e: &StepEntity, message: impl Into<String>) -> StepError {
        syntax(e.line, e.col, format!("#{} {}: {}", e.id, e.keyword, message.into()))
    }

    fn entity(&self, id: u64, referer: u64) -> Result<&'f StepEntity, StepError> {
        self.file
            .entities
            .get(&id)
            .ok_or(StepError::DanglingReference { referer, target: id })
    }

    fn typed(&self, id: u64, keyword: &str, referer: u64) -> Result<&'f StepEntity, StepError> {
        let e = self.entity(id, referer)?;
        if e.keyword == keyword {
            Ok(e)
        } else {
            Err(self.err(e, format!("expected a {keyword} here")))
        }
    }

    fn param<'e>(&self, e: &'e StepEntity, i: usize) -> Result<&'e Param, StepError> {
        e.params
            .get(i)
            .ok_or_else(|| self.err(e, format!("missing parameter {}", i + 1)))
    }

    fn as_ref_param(&self, e: &StepEntity, i: usize) -> Result<u64, StepError> {
        match self.param(e, i)? {
            Param::Ref(r) => Ok(*r),
            other => Err(self.err(e, format!("parameter {} must be a reference, got {other:?}", i + 1))),
        }
    }

    fn as_real(&self, e: &StepEntity, i: usize) -> Result<f64, StepError> {
        match self.param(e, i)? {
            Param::Real(v) => Ok(*v),
            other => Err(self.err(e, format!("parameter {} must be a real, got {other:?}", i + 1))),
        }
    }

    fn as_list<'e>(&self, e: &'e StepEntity, i: usize) -> Result<&'e [Param], StepError> {
        match self.param(e, i)? {
            Param::List(ps) => Ok(ps),
            other => Err(self.err(e, format!("parameter {} must be a list, got {other:?}", i + 1))),
        }
    }

    fn as_bool(&self, e: &StepEntity, i: usize) -> Result<bool, StepError> {
        match self.param(e, i)? {
            Param::Enum(v) if v == "T" || v == "TRUE" => Ok(true),
            Param::Enum(v) if v == "F" || v == "FALSE" => Ok(false),
            other => Err(self.err(e, format!("parameter {} must be .T./.F., got {other:?}", i + 1))),
        }
    }

    fn triple(&self, e: &StepEntity, i: usize) -> Result<Vec3, StepError> {
        let ps = self.as_list(e, i)?;
        if ps.len() != 3 {
            return Err(self.err(e, "coordinate list must hold 3 reals"));
        }
        let mut v = [0.0; 3];
        for (slot, p) in v.iter_mut().zip(ps) {
            match p {
                Param::Real(x) => *slot = *x,
                other => return Err(self.err(e, format!("coordinate must be a real, got {other:?}"))),
            }
        }
        Ok(Vec3::from(v))
    }

    fn point(&self, id: u64, referer: u64) -> Result<Vec3, StepError> {
        let e = self.typed(id, "CARTESIAN_POINT", referer)?;
        self.triple(e, 1)
    }

    fn direction(&self, id: u64, referer: u64) -> Result<Vec3, StepError> {
        let e = self.typed(id, "DIRECTION", referer)?;
        self.triple(e, 1)?
            .normalized()
            .ok_or_else(|| self.err(e, "zero direction"))
    }

    /// Location and axis of an AXIS2_PLACEMENT_3D; an unset axis defaults to +Z.
    fn placement(&self, id: u64, referer: u64) -> Result<(Vec3, Vec3), StepError> {
        let e = self.typed(id, "AXIS2_PLACEMENT_3D", referer)?;
        let loc = self.point(self.as_ref_param(e, 1)?, id)?;
        let axis = match self.param(e, 2)? {
            Param::Unset => Vec3::new(0.0, 0.0, 1.0),
            Param::Ref(r) => self.direction(*r, id)?,
            other => return Err(self.err(e, format!("axis must be a direction, got {other:?}"))),
        };
        Ok((loc, axis))
    }

    fn surface(&self, id: u64, referer: u64) -> Result<Surface, StepError> {
        let e = self.entity(id, referer)?;
        match e.keyword.as_str() {
            "PLANE" => {
                let (origin, normal) = self.placement(self.as_ref_param(e, 1)?, id)?;
                Ok(Surface::Plane { origin, normal })
            }
            "CYLINDRICAL_SURFACE" => {
                let (axis_origin, axis_dir) = self.placement(self.as_ref_param(e, 1)?, id)?;
                let radius = self.as_real(e, 2)?;
                Ok(Surface::Cylinder { axis_origin, axis_dir, radius })
            }
            "CONICAL_SURFACE" => {
                let (origin, axis_dir) = self.placement(self.as_ref_param(e, 1)?, id)?;
                let radius = self.as_real(e, 2)?;
                let half_angle = self.as_real(e, 3)?;
                if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
                    return Err(self.err(e, "semi-angle must lie in (0, pi/2)"));
                }
                let apex = origin - axis_dir * (radius / half_angle.tan());
                Ok(Surface::Cone { apex, axis_dir, half_angle })
            }
            "SPHERICAL_SURFACE" => {
                let (center, _) = self.placement(self.as_ref_param(e, 1)?, id)?;
                let radius = self.as_real(e, 2)?;
                Ok(Surface::Sphere { center, radius })
            }
            "TOROIDAL_SURFACE" => {
                let (center, axis_dir) = self.placement(self.as_ref_param(e, 1)?, id)?;
                let major_radius = self.as_real(e, 2)?;
                let minor_radius = self.as_real(e, 3)?;
                Ok(Surface::Torus { center, axis_dir, major_radius, minor_radius })
            }
            other => Err(self.err(e, format!("{other} is not a supported surface"))),
        }
    }

    fn vertex(&mut self, id: u64, referer: u64) -> Result<VertexId, StepError> {
        if let Some(&v) = self.vertex_map.get(&id) {
            return Ok(v);
        }
        let e = self.typed(id, "VERTEX_POINT", referer)?;
        let point = self.point(self.as_ref_param(e, 1)?, id)?;
        let vid = VertexId(self.model.vertices.len() as u32);
        self.model.vertices.push(Vertex { id: vid, point });
        self.vertex_map.insert(id, vid);
        Ok(vid)
    }

    fn edge(&mut self, id: u64, referer: u64) -> Result<EdgeId, StepError> {
        if let Some(&eid) = self.edge_map.get(&id) {
            return Ok(eid);
        }
        let e = self.typed(id, "EDGE_CURVE", referer)?;
        let start = self.vertex(self.as_ref_param(e, 1)?, id)?;
        let end = self.vertex(self.as_ref_param(e, 2)?, id)?;
        let curve_ref = self.as_ref_param(e, 3)?;
        let same_sense = self.as_bool(e, 4)?;
        let ce = self.entity(curve_ref, id)?;
        let curve = match ce.keyword.as_str() {
            "LINE" => Curve::Line,
            "CIRCLE" => {
                let (center, mut axis) = self.placement(self.as_ref_param(ce, 1)?, curve_ref)?;
                let radius = self.as_real(ce, 2)?;
                if !same_sense {
                    // The edge runs against the circle's parameterization,
                    // i.e. counterclockwise around the flipped axis.
                    axis = -axis;
                }
                Curve::Arc { center, axis, radius }
            }
            other => return Err(self.err(ce, format!("{other} is not a supported edge curve"))),
        };
        let eid = EdgeId(self.model.edges.len() as u32);
        self.model.edges.push(Edge { id: eid, curve, start, end });
        self.edge_map.insert(id, eid);
        Ok(eid)
    }

    fn bound(&mut self, id: u64, referer: u64) -> Result<Loop, StepError> {
        let e = self.entity(id, referer)?;
        let kind = match e.keyword.as_str() {
            "FACE_OUTER_BOUND" => LoopKind::Outer,
            "FACE_BOUND" => LoopKind::Inner,
            other => return Err(self.err(e, format!("{other} is not a face bound"))),
        };
        let loop_ref = self.as_ref_param(e, 1)?;
        let orientation = self.as_bool(e, 2)?;
        let le = self.typed(loop_ref, "EDGE_LOOP", id)?;
        let mut coedges = Vec::new();
        for p in self.as_list(le, 1)?.to_vec() {
            let Param::Ref(oe_ref) = p else {
                return Err(self.err(le, format!("loop element must be a reference, got {p:?}")));
            };
            let oe = self.typed(oe_ref, "ORIENTED_EDGE", loop_ref)?;
            let edge_ref = self.as_ref_param(oe, 3)?;
            let forward = self.as_bool(oe, 4)?;
            let edge = self.edge(edge_ref, oe_ref)?;
            coedges.push(Coedge { edge, reversed: !forward });
        }
        if !orientation {
            coedges.reverse();
            for c in &mut coedges {
                c.reversed = !c.reversed;
            }
        }
        Ok(Loop { kind, coedges })
    }

    /// Conservative bounding-box diagonal of a loop, for outer promotion.
    fn loop_extent(&self, lp: &Loop) -> f64 {
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut grow = |p: Vec3| {
            lo = lo.min_with(p);
            hi = hi.max_with(p);
        };
        for c in &lp.coedges {
            let Some(edge) = self.model.edges.get(c.edge.0 as usize) else { continue };
            for vid in [edge.start, edge.end] {
                if let Some(v) = self.model.vertices.get(vid.0 as usize) {
                    grow(v.point);
                }
            }
            if let Curve::Arc { center, axis, radius } = edge.curve {
                let u = axis.any_perpendicular();
                let w = axis.cross(u);
                for dir in [u, -u, w, -w] {
                    grow(center + dir * radius);
                }
            }
        }
        if lo.x > hi.x {
            0.0
        } else {
            (hi - lo).norm()
        }
    }

    fn face(&mut self, id: u64, shell: u32, referer: u64) -> Result<(), StepError> {
        let e = self.typed(id, "ADVANCED_FACE", referer)?;
        let bound_refs = self.as_list(e, 1)?.to_vec();
        let surface = self.surface(self.as_ref_param(e, 2)?, id)?;
        let sense = self.as_bool(e, 3)?;
        let mut loops = Vec::new();
        for p in bound_refs {
            let Param::Ref(b) = p else {
                return Err(self.err(e, format!("bound must be a reference, got {p:?}")));
            };
            loops.push(self.bound(b, id)?);
        }
        if !loops.is_empty() && !loops.iter().any(|l| l.kind == LoopKind::Outer) {
            let largest = loops
                .iter()
                .enumerate()
                .max_by(|(ai, a), (bi, b)| {
                    self.loop_extent(a)
                        .total_cmp(&self.loop_extent(b))
                        .then(bi.cmp(ai))
                })
                .map(|(i, _)| i)
                .expect("non-empty loops");
            loops[largest].kind = LoopKind::Outer;
            self.warnings.push(format!(
                "#{id} ADVANCED_FACE: no FACE_OUTER_BOUND; promoted its largest loop to outer"
            ));
        }
        let fid = FaceId(self.model.faces.len() as u32);
        self.model.faces.push(Face { id: fid, surface, sense, loops, shell });
        Ok(())
    }

    fn shell(&mut self, id: u64, shell_index: u32, referer: u64) -> Result<(), StepError> {
        let e = self.typed(id, "CLOSED_SHELL", referer)?;
        for p in self.as_list(e, 1)?.to_vec() {
            let Param::Ref(f) = p else {
                return Err(self.err(e, format!("shell face must be a reference, got {p:?}")));
            };
            self.face(f, shell_index, id)?;
        }
        Ok(())
    }
}

/// Solid roots of the file: every MANIFOLD_SOLID_BREP, or every CLOSED_SHELL
/// when no solid entity is present.
fn solid_roots(file: &StepFile) -> Result<Vec<&StepEntity>, StepError> {
    let solids: Vec<&StepEntity> = file
        .entities
        .values()
        .filter(|e| e.keyword == "MANIFOLD_SOLID_BREP")
        .collect();
    if !solids.is_empty() {
        return Ok(solids);
    }
    let shells: Vec<&StepEntity> =
        file.entities.values().filter(|e| e.keyword == "CLOSED_SHELL").collect();
    if shells.is_empty() {
        Err(StepError::NoSolid)
    } else {
        Ok(shells)
    }
}

/// Convert parsed entities into a validated model, plus warnings about
/// ignored content.
pub fn to_model(file: &StepFile) -> Result<(Model, Vec<String>), StepError> {
    let roots = solid_roots(file)?;

    // Reachability sweep: everything the solid references must exist and be
    // within the supported subset.
    let mut reached: HashSet<u64> = HashSet::new();
    let mut queue: VecDeque<(u64, u64)> = roots.iter().map(|e| (e.id, e.id)).collect();
    while let Some((id, referer)) = queue.pop_front() {
        if !reached.insert(id) {
            continue;
        }
        let Some(e) = file.entities.get(&id) else {
            return Err(StepError::DanglingReference { referer, target: id });
        };
        if !SUPPORTED.contains(&e.keyword.as_str()) {
            return Err(StepError::UnsupportedEntity { id, keyword: e.keyword.clone() });
        }
        let mut refs = Vec::new();
        for p in &e.params {
            p.refs_into(&mut refs);
        }
        for r in refs {
            queue.push_back((r, id));
        }
    }

    let mut conv = Converter {
        file,
        model: Model {
            units: "mm".to_string(),
            vertices: Vec::new(),
            edges: Vec::new(),
            faces: Vec::new(),
        },
        vertex_map: HashMap::new(),
        edge_map: HashMap::new(),
        warnings: Vec::new(),
    };
    for e in file.entities.values() {
        if !reached.contains(&e.id) && !SUPPORTED.contains(&e.keyword.as_str()) {
            conv.warnings
                .push(format!("#{} {}: ignored (not part of the solid)", e.id, e.keyword));
        }
    }

    for (shell_index, root) in roots.iter().enumerate() {
        let shell_id = match root.keyword.as_str() {
            "MANIFOLD_SOLID_BREP" => conv.as_ref_param(root, 1)?,
            _ => root.id,
        };
        conv.shell(shell_id, shell_index as u32, root.id)?;
    }

    conv.model.ensure_valid()?;
    Ok((conv.model, conv.warnings))
}

/// Read and convert a STEP file.
pub fn load_step(path: &Path) -> Result<(Model, Vec<String>), StepError> {
    let text = std::fs::read_to_string(path)?;
    let file = parse_step(&text)?;
    to_model(&file)
}

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

/// Part 21 real syntax from the shortest round-trip form.
fn fmt_real(x: f64) -> String {
    let s = format!("{x:?}");
    match s.find(['e', 'E']) {
        None => {
            if s.contains('.') {
                s
            } else {
                format!("{s}.")
            }
        }
        Some(i) => {
            let (m, e) = s.split_at(i);
            let exp = &e[1..];
            if m.contains('.') {
                format!("{m}E{exp}")
            } else {
                format!("{m}.E{exp}")
            }
        }
    }
}

#[derive(Default)]
struct StepWriter {
    body: String,
    next_id: u64,
    points: HashMap<[u64; 3], u64>,
    directions: HashMap<[u64; 3], u64>,
    vertices: HashMap<VertexId, u64>,
    edges: HashMap<EdgeId, u64>,
}

impl StepWriter {
    fn emit(&mut self, record: String) -> u64 {
        self.next_id += 1;
        let id = self.next_id;
        writeln!(self.body, "#{id}={record};").expect("string write");
        id
    }

    fn point(&mut self, p: Vec3) -> u64 {
        let key = [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()];
        if let Some(&id) = self.points.get(&key) {
            return id;
        }
        let id = self.emit(format!(
            "CARTESIAN_POINT('',({},{},{}))",
            fmt_real(p.x),
            fmt_real(p.y),
            fmt_real(p.z)
        ));
        self.points.insert(key, id);
        id
    }

    fn direction(&mut self, d: Vec3) -> u64 {
        let key = [d.x.to_bits(), d.y.to_bits(), d.z.to_bits()];
        if let Some(&id) = self.directions.get(&key) {
            return id;
        }
        let id = self.emit(format!(
            "DIRECTION('',({},{},{}))",
            fmt_real(d.x),
            fmt_real(d.y),
            fmt_real(d.z)
        ));
        self.directions.insert(key, id);
        id
    }

    fn placement(&mut self, location: Vec3, axis: Vec3) -> u64 {
        let loc = self.point(location);
        let ax = self.direction(axis);
        let rf = self.direction(axis.any_perpendicular());
        self.emit(format!("AXIS2_PLACEMENT_3D('',#{loc},#{ax},#{rf})"))
    }

    fn vertex(&mut self, model: &Model, vid: VertexId) -> u64 {
        if let Some(&id) = self.vertices.get(&vid) {
            return id;
        }
        let p = model.vertex_point(vid).expect("valid model vertex");
        let pt = self.point(p);
        let id = self.emit(format!("VERTEX_POINT('',#{pt})"));
        self.vertices.insert(vid, id);
        id
    }

    fn edge(&mut self, model: &Model, eid: EdgeId) -> u64 {
        if let Some(&id) = self.edges.get(&eid) {
            return id;
        }
        let edge = *model.edge(eid).expect("valid model edge");
        let sv = self.vertex(model, edge.start);
        let ev = self.vertex(model, edge.end);
        let curve = match edge.curve {
            Curve::Line => {
                let a = model.vertex_point(edge.start).expect("valid model vertex");
                let b = model.vertex_point(edge.end).expect("valid model vertex");
                let dir = (b - a).normalized().unwrap_or(Vec3::new(1.0, 0.0, 0.0));
                let pt = self.point(a);
                let d = self.direction(dir);
                let v = self.emit(format!("VECTOR('',#{d},1.)"));
                self.emit(format!("LINE('',#{pt},#{v})"))
            }
            Curve::Arc { center, axis, radius } => {
                let place = self.placement(center, axis);
                self.emit(format!("CIRCLE('',#{place},{})", fmt_real(radius)))
            }
        };
        let id = self.emit(format!("EDGE_CURVE('',#{sv},#{ev},#{curve},.T.)"));
        self.edges.insert(eid, id);
        id
    }

    fn surface(&mut self, s: Surface) -> u64 {
        match s {
            Surface::Plane { origin, normal } => {
                let p = self.placement(origin, normal);
                self.emit(format!("PLANE('',#{p})"))
            }
            Surface::Cylinder { axis_origin, axis_dir, radius } => {
                let p = self.placement(axis_origin, axis_dir);
                self.emit(format!("CYLINDRICAL_SURFACE('',#{p},{})", fmt_real(radius)))
            }
            Surface::Cone { apex, axis_dir, half_angle } => {
                // Reference circle one unit above the apex.
                let p = self.placement(apex + axis_dir, axis_dir);
                self.emit(format!(
                    "CONICAL_SURFACE('',#{p},{},{})",
                    fmt_real(half_angle.tan()),
                    fmt_real(half_angle)
                ))
            }
            Surface::Sphere { center, radius } => {
                let p = self.placement(center, Vec3::new(0.0, 0.0, 1.0));
                self.emit(format!("SPHERICAL_SURFACE('',#{p},{})", fmt_real(radius)))
            }
            Surface::Torus { center, axis_dir, major_radius, minor_radius } => {
                let p = self.placement(center, axis_dir);
                self.emit(format!(
                    "TOROIDAL_SURFACE('',#{p},{},{})",
                    fmt_real(major_radius),
                    fmt_real(minor_radius)
                ))
            }
        }
    }
}

/// Serialize a model as a deterministic Part 21 file.
pub fn write_step(model: &Model, name: &str) -> String {
    let mut w = StepWriter::default();
    let mut shells: BTreeMap<u32, Vec<&Face>> = BTreeMap::new();
    for face in &model.faces {
        shells.entry(face.shell).or_default().push(face);
    }
    for (shell_index, faces) in &shells {
        let mut face_ids = Vec::new();
        for face in faces {
            let mut bound_ids = Vec::new();
            for lp in &face.loops {
                let mut oriented = Vec::new();
                for c in &lp.coedges {
                    let edge = w.edge(model, c.edge);
                    let flag = if c.reversed { ".F." } else { ".T." };
                    oriented.push(w.emit(format!("ORIENTED_EDGE('',*,*,#{edge},{flag})")));
                }
                let refs: Vec<String> = oriented.iter().map(|i| format!("#{i}")).collect();
                let el = w.emit(format!("EDGE_LOOP('',({}))", refs.join(",")));
                let kw = match lp.kind {
                    LoopKind::Outer => "FACE_OUTER_BOUND",
                    LoopKind::Inner => "FACE_BOUND",
                };
                bound_ids.push(w.emit(format!("{kw}('',#{el},.T.)")));
            }
            let surf = w.surface(face.surface);
            let refs: Vec<String> = bound_ids.iter().map(|i| format!("#{i}")).collect();
            let flag = if face.sense { ".T." } else { ".F." };
            face_ids.push(w.emit(format!(
                "ADVANCED_FACE('',({}),#{surf},{flag})",
                refs.join(",")
            )));
        }
        let refs: Vec<String> = face_ids.iter().map(|i| format!("#{i}")).collect();
        let shell = w.emit(format!("CLOSED_SHELL('',({}))", refs.join(",")));
        let label = if shells.len() == 1 {
            name.to_string()
        } else {
            format!("{name}_{shell_index}")
        };
        w.emit(format!("MANIFOLD_SOLID_BREP('{label}',#{shell})"));
    }

    format!(
        "ISO-10303-21;\n\
         HEADER;\n\
         FILE_DESCRIPTION((''),'2;1');\n\
         FILE_NAME('{name}','',(''),(''),'','','');\n\
         FILE_SCHEMA(('AUTOMOTIVE_DESIGN'));\n\
         ENDSEC;\n\
         DATA;\n\
         {}ENDSEC;\n\
         END-ISO-10303-21;\n",
        w.body
    )
}

pub fn save_step(model: &Model, name: &str, path: &Path) -> Result<(), StepError> {
    std::fs::write(path, write_step(model, name))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::fixtures;

    fn wrap(data: &str) -> String {
        format!(
            "ISO-10303-21;\nHEADER;\nFILE_NAME('t','',(''),(''),'','','');\nENDSEC;\nDATA;\n{data}\nENDSEC;\nEND-ISO-10303-21;\n"
        )
    }

    #[test]
    fn parses_a_point_entity() {
        let file = parse_step(&wrap("#1=CARTESIAN_POINT('',(0.,0.,0.));")).unwrap();
        let e = &file.entities[&1];
        assert_eq!(e.keyword, "CARTESIAN_POINT");
        assert_eq!(e.params.len(), 2);
        assert_eq!(
            e.params[1],
            Param::List(vec![Param::Real(0.0), Param::Real(0.0), Param::Real(0.0)])
        );
    }

    #[test]
    fn missing_footer_is_a_syntax_error() {
        let text = "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\nENDSEC;\n";
        match parse_step(text) {
            Err(StepError::Syntax { message, .. }) => {
                assert!(message.contains("end of file"), "{message}");
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn reals_parse_in_part21_notation() {
        let file = parse_step(&wrap("#1=CARTESIAN_POINT('',(1.E-7,-2.5,.5));")).unwrap();
        let Param::List(ps) = &file.entities[&1].params[1] else { panic!() };
        assert_eq!(ps[0], Param::Real(1e-7));
        assert_eq!(ps[1], Param::Real(-2.5));
        assert_eq!(ps[2], Param::Real(0.5));
    }

    #[test]
    fn reachable_unknown_keyword_is_rejected() {
        let data = "\
#1=MANIFOLD_SOLID_BREP('s',#2);\n\
#2=CLOSED_SHELL('',(#3));\n\
#3=ADVANCED_FACE('',(),#4,.T.);\n\
#4=B_SPLINE_SURFACE('', 1, 1, (), .UNSPECIFIED., .F., .F., .F.);";
        let file = parse_step(&wrap(data)).unwrap();
        match to_model(&file) {
            Err(StepError::UnsupportedEntity { id, keyword }) => {
                assert_eq!(id, 4);
                assert_eq!(keyword, "B_SPLINE_SURFACE");
            }
            other => panic!("expected unsupported entity, got {other:?}"),
        }
    }

    #[test]
    fn dangling_reference_is_reported() {
        let data = "#1=MANIFOLD_SOLID_BREP('s',#99);";
        let file = parse_step(&wrap(data)).unwrap();
        match to_model(&file) {
            Err(StepError::DanglingReference { referer, target }) => {
                assert_eq!((referer, target), (1, 99));
            }
            other => panic!("expected dangling reference, got {other:?}"),
        }
    }

    #[test]
    fn unreachable_unknown_entities_only_warn() {
        let fx = fixtures::hole_one_cylinder(4.0).unwrap();
        let mut text = write_step(&fx.model, "part");
        text = text.replace(
            "ENDSEC;\nEND-ISO",
            "#9001=PRESENTATION_LAYER_ASSIGNMENT('','',());\nENDSEC;\nEND-ISO",
        );
        let file = parse_step(&text).unwrap();
        let (model, warnings) = to_model(&file).unwrap();
        assert_eq!(model.faces.len(), fx.model.faces.len());
        assert!(warnings.iter().any(|w| w.contains("PRESENTATION_LAYER_ASSIGNMENT")));
    }

    #[test]
    fn cuboid_roundtrips_through_step() {
        let model = fixtures::cuboid_stock(20.0, 15.0, 10.0);
        let text = write_step(&model, "block");
        assert_eq!(text.matches("ADVANCED_FACE").count(), 6);
        assert_eq!(write_step(&model, "block"), text, "writer must be deterministic");
        let (back, warnings) = to_model(&parse_step(&text).unwrap()).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        assert_eq!(back.faces.len(), 6);
        assert_eq!(back.edges.len(), 12);
        assert_eq!(back.vertices.len(), 8);
        back.ensure_valid().unwrap();
        for (a, b) in model.faces.iter().zip(&back.faces) {
            assert_eq!(a.sense, b.sense);
            assert_eq!(a.loops.len(), b.loops.len());
            match (a.surface, b.surface) {
                (
                    Surface::Plane { origin: ao, normal: an },
                    Surface::Plane { origin: bo, normal: bn },
                ) => {
                    assert!(an.approx_eq(bn, 1e-9));
                    assert!(((ao - bo).dot(an)).abs() < 1e-9, "same plane");
                }
                other => panic!("expected planes, got {other:?}"),
            }
        }
    }

    #[test]
    fn curved_solid_roundtrips_through_step() {
        let fx = fixtures::counterbore_block(6.0, 6.0, 3.0).unwrap();
        let text = write_step(&fx.model, "counterbore");
        let (back, _) = to_model(&parse_step(&text).unwrap()).unwrap();
        back.ensure_valid().unwrap();
        assert_eq!(back.faces.len(), fx.model.faces.len());
        assert_eq!(back.edges.len(), fx.model.edges.len());
        assert_eq!(back.vertices.len(), fx.model.vertices.len());
        for (a, b) in fx.model.faces.iter().zip(&back.faces) {
            assert_eq!(a.surface.face_type(), b.surface.face_type());
            match (a.surface, b.surface) {
                (
                    Surface::Cylinder { axis_origin: ao, axis_dir: ad, radius: ar },
                    Surface::Cylinder { axis_origin: bo, axis_dir: bd, radius: br },
                ) => {
                    assert!(ad.approx_eq(bd, 1e-9));
                    assert!((ar - br).abs() < 1e-9);
                    let off = bo - ao;
                    assert!(off.cross(ad).norm() < 1e-9, "same axis line");
                }
                (Surface::Plane { .. }, Surface::Plane { .. }) => {}
                other => panic!("face classes diverged: {other:?}"),
            }
        }
    }

    #[test]
    fn missing_outer_bound_promotes_largest_loop() {
        let model = fixtures::cuboid_stock(10.0, 10.0, 10.0);
        let text = write_step(&model, "block").replace("FACE_OUTER_BOUND", "FACE_BOUND");
        let (back, warnings) = to_model(&parse_step(&text).unwrap()).unwrap();
        back.ensure_valid().unwrap();
        assert_eq!(warnings.iter().filter(|w| w.contains("promoted")).count(), 6);
        for face in &back.faces {
            assert!(face.loops.iter().any(|l| l.kind == LoopKind::Outer));
        }
    }

    #[test]
    fn real_formatting_is_part21_compatible() {
        assert_eq!(fmt_real(0.0), "0.0");
        assert_eq!(fmt_real(6.0), "6.0");
        assert_eq!(fmt_real(-2.5), "-2.5");
        assert_eq!(fmt_real(1e-7), "1.E-7");
        assert_eq!(fmt_real(1.5e300), "1.5E300");
        for x in [0.0, 6.0, -2.5, 1e-7, 0.1 + 0.2, std::f64::consts::PI] {
            assert_eq!(fmt_real(x).to_lowercase().parse::<f64>().unwrap(), x);
        }
    }
}
