//! Structure-definition files.
//!
//! ```text
//! [dims]
//! nu=0 d=2 mu=1
//! [phi]
//! t1^2/2
//! t1^3/3
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::{GaussRat, Poly, RatFun, VarSet};
use crate::approx::normal_form_vars;
use crate::bundle::RatMatrix;
use crate::structure::{canonical_vars, StructureDef};
use crate::Error;

pub const SECTIONS: [&str; 7] = ["dims", "phi", "kernel", "candidate", "bundle", "approx", "fbi"];

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub name: String,
    pub pairs: Vec<(String, Poly)>,
}

/// Connection matrices of a user bundle over the structure's frame, plus objects to test against it.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleSpec {
    pub rank: usize,
    /// `(j, D_j)` for the frame fields given; the rest are zero.
    pub connection: Vec<(usize, RatMatrix)>,
    pub sections: Vec<Vec<RatFun>>,
    pub lambda: Option<RatMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxSpec {
    pub n: usize,
    pub b: Vec<Poly>,
    pub a: Option<Vec<Vec<Poly>>>,
    pub u0: Vec<Poly>,
    pub order: Option<usize>,
    pub half_width: Option<f64>,
    pub grid: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FbiSpec {
    /// Normal form coefficient over `(x1, t1)`; derived from the structure when absent.
    pub b: Option<Poly>,
    pub u0: RatFun,
    pub covector: Option<GaussRat>,
    pub kappa: Option<f64>,
    pub dirs: Option<usize>,
    pub radii: Option<(f64, f64, usize)>,
    pub half_width: Option<f64>,
    pub grid: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureFile {
    pub nu: usize,
    pub d: usize,
    pub mu: usize,
    pub phi: Vec<Poly>,
    pub kernel: Vec<Vec<Poly>>,
    pub candidates: Vec<Candidate>,
    pub bundle: Option<BundleSpec>,
    pub approx: Option<ApproxSpec>,
    pub fbi: Option<FbiSpec>,
}

impl StructureFile {
    pub fn vars(&self) -> VarSet {
        canonical_vars(self.nu, self.d, self.mu)
    }

    pub fn structure(&self) -> Result<StructureDef, Error> {
        StructureDef::new(self.nu, self.d, self.mu, self.phi.clone())
    }
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::ParseError { line, col, msg: msg.into() }
}

/// A piece of source text with its 1-based position.
#[derive(Clone, Copy, Debug)]
struct Span<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

impl<'a> Span<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        perr(self.line, self.col, msg)
    }

    fn trim(self) -> Span<'a> {
        let lead = self.text.len() - self.text.trim_start().len();
        Span { text: self.text.trim(), line: self.line, col: self.col + self.text[..lead].chars().count() }
    }

    fn split(self, sep: char) -> Vec<Span<'a>> {
        let mut out = Vec::new();
        let mut start = 0;
        let mut col = self.col;
        let mut piece_col = self.col;
        for (i, ch) in self.text.char_indices() {
            if ch == sep {
                out.push(Span { text: &self.text[start..i], line: self.line, col: piece_col }.trim());
                start = i + ch.len_utf8();
                piece_col = col + 1;
            }
            col += 1;
        }
        out.push(Span { text: &self.text[start..], line: self.line, col: piece_col }.trim());
        out
    }

    fn split_once(self, sep: char) -> Option<(Span<'a>, Span<'a>)> {
        let i = self.text.find(sep)?;
        let lhs = Span { text: &self.text[..i], line: self.line, col: self.col };
        let rhs_col = self.col + self.text[..i].chars().count() + 1;
        let rhs = Span { text: &self.text[i + sep.len_utf8()..], line: self.line, col: rhs_col };
        Some((lhs.trim(), rhs.trim()))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: Span) -> Result<Vec<(Tok, usize)>, Error> {
    let chars: Vec<char> = s.text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = s.col + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[st..i].iter().collect();
            out.push((Tok::Num(digits.parse().expect("digit string")), col));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((Tok::Ident(chars[st..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return Err(perr(s.line, col, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct ExprParser<'v> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
    vars: &'v VarSet,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end_col)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        perr(self.line, self.col(), msg)
    }

    fn expr(&mut self) -> Result<RatFun, Error> {
        let mut acc = self.term()?;
        while let Some(Tok::Sym(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFun, Error> {
        let mut acc = self.unary()?;
        while let Some(Tok::Sym(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let col = self.col();
            let rhs = self.unary()?;
            if c == '*' {
                acc = &acc * &rhs;
            } else {
                acc = acc.checked_div(&rhs).ok_or_else(|| perr(self.line, col, "division by zero"))?;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFun, Error> {
        match self.peek() {
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Sym('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFun, Error> {
        let base = self.atom()?;
        if let Some(Tok::Sym('^')) = self.peek() {
            self.pos += 1;
            let e = match self.peek() {
                Some(Tok::Num(n)) => u32::try_from(n.clone()).map_err(|_| self.err("exponent too large"))?,
                _ => return Err(self.err("expected a nonnegative integer exponent")),
            };
            self.pos += 1;
            let mut acc = RatFun::one(self.vars);
            for _ in 0..e {
                acc = &acc * &base;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFun, Error> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.err("unexpected end of expression"));
        };
        let col = self.col();
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(RatFun::constant(self.vars, GaussRat::real(BigRational::from_integer(n)))),
            Tok::Ident(name) if name == "i" => Ok(RatFun::constant(self.vars, GaussRat::i())),
            Tok::Ident(name) => match Poly::var_named(self.vars, &name) {
                Some(p) => Ok(RatFun::from_poly(p)),
                None => Err(perr(self.line, col, format!("unknown variable '{name}'"))),
            },
            Tok::Sym('(') => {
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::Sym(')')) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.err("expected ')'")),
                }
            }
            Tok::Sym(c) => Err(perr(self.line, col, format!("unexpected '{c}'"))),
        }
    }
}

/// Parses an infix expression over `vars`. Errors carry `line`/`col` of the offending token.
pub fn parse_expr_at(text: &str, vars: &VarSet, line: usize, col: usize) -> Result<RatFun, Error> {
    let s = Span { text, line, col };
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(s.err("empty expression"));
    }
    let mut p = ExprParser { toks, pos: 0, line, end_col: col + text.chars().count(), vars };
    let r = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.err("unexpected token"));
    }
    Ok(r)
}

pub fn parse_expr(text: &str, vars: &VarSet) -> Result<RatFun, Error> {
    parse_expr_at(text, vars, 1, 1)
}

fn ratfun(s: Span, vars: &VarSet) -> Result<RatFun, Error> {
    parse_expr_at(s.text, vars, s.line, s.col)
}

fn poly(s: Span, vars: &VarSet) -> Result<Poly, Error> {
    ratfun(s, vars)?.as_poly().ok_or_else(|| s.err("expected a polynomial"))
}

fn constant(s: Span) -> Result<GaussRat, Error> {
    let v = VarSet::new::<&str>(&[]);
    Ok(poly(s, &v)?.constant_term())
}

fn real(s: Span) -> Result<f64, Error> {
    if let Ok(x) = s.text.parse::<f64>() {
        if x.is_finite() {
            return Ok(x);
        }
    }
    let c = constant(s)?;
    if !c.is_real() {
        return Err(s.err("expected a real number"));
    }
    Ok(c.to_f64_pair().0)
}

fn count(s: Span) -> Result<usize, Error> {
    s.text.parse().map_err(|_| s.err("expected a nonnegative integer"))
}

fn poly_list(s: Span, vars: &VarSet) -> Result<Vec<Poly>, Error> {
    s.split(',').into_iter().map(|p| poly(p, vars)).collect()
}

fn matrix(s: Span, vars: &VarSet) -> Result<Vec<Vec<RatFun>>, Error> {
    let rows: Vec<Vec<RatFun>> = s
        .split(';')
        .into_iter()
        .map(|row| row.split(',').into_iter().map(|e| ratfun(e, vars)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(s.err("matrix rows have different lengths"));
    }
    Ok(rows)
}

fn key_values<'a>(lines: &[Span<'a>]) -> Result<Vec<(String, Span<'a>, Span<'a>)>, Error> {
    let mut out: Vec<(String, Span, Span)> = Vec::new();
    for l in lines {
        let (k, v) = l.split_once('=').ok_or_else(|| l.err("expected key = value"))?;
        if k.text.is_empty() {
            return Err(k.err("missing key"));
        }
        if out.iter().any(|(name, _, _)| name == k.text) {
            return Err(k.err(format!("duplicate key '{}'", k.text)));
        }
        out.push((k.text.to_string(), k, v));
    }
    Ok(out)
}

fn reject_unknown(kv: &[(String, Span, Span)], allowed: &[&str], section: &str) -> Result<(), Error> {
    for (k, ks, _) in kv {
        let base = k.trim_start_matches(|c: char| c.is_ascii_alphabetic());
        let stem = &k[..k.len() - base.len()];
        let ok = allowed.contains(&k.as_str()) || (stem == "D" && section == "bundle" && base.parse::<usize>().is_ok());
        if !ok {
            return Err(ks.err(format!("unknown key '{k}' in [{section}]")));
        }
    }
    Ok(())
}

fn parse_dims(lines: &[Span], header: Span) -> Result<(usize, usize, usize), Error> {
    let mut vals: [Option<usize>; 3] = [None; 3];
    for l in lines {
        let chars: Vec<char> = l.text.chars().collect();
        let mut i = 0;
        let skip = |i: &mut usize| {
            while *i < chars.len() && (chars[*i].is_whitespace() || chars[*i] == ',') {
                *i += 1;
            }
        };
        loop {
            skip(&mut i);
            if i >= chars.len() {
                break;
            }
            let kc = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            let key: String = chars[kc..i].iter().collect();
            let slot = match key.as_str() {
                "nu" => 0,
                "d" => 1,
                "mu" => 2,
                _ => return Err(perr(l.line, l.col + kc, format!("unknown dimension '{key}'"))),
            };
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '=' {
                return Err(perr(l.line, l.col + i, "expected '='"));
            }
            i += 1;
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            let vc = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if vc == i {
                return Err(perr(l.line, l.col + vc, "expected a nonnegative integer"));
            }
            let v: String = chars[vc..i].iter().collect();
            if vals[slot].is_some() {
                return Err(perr(l.line, l.col + kc, format!("duplicate dimension '{key}'")));
            }
            vals[slot] = Some(v.parse().map_err(|_| perr(l.line, l.col + vc, "dimension too large"))?);
        }
    }
    match vals {
        [Some(nu), Some(d), Some(mu)] => Ok((nu, d, mu)),
        _ => Err(header.err("[dims] needs nu, d and mu")),
    }
}

fn parse_candidates(lines: &[Span], vars: &VarSet) -> Result<Vec<Candidate>, Error> {
    let mut out = Vec::new();
    for (idx, l) in lines.iter().enumerate() {
        let (name, body) = match l.split_once(':') {
            Some((n, b)) => {
                if n.text.is_empty() || !n.text.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(n.err("candidate names are alphanumeric"));
                }
                (n.text.to_string(), b)
            }
            None => (format!("X{}", idx + 1), *l),
        };
        let mut pairs = Vec::new();
        if body.text != "0" {
            for part in body.split(',') {
                let (k, v) = part.split_once('=').ok_or_else(|| part.err("expected coordinate = expression"))?;
                if vars.index_of(k.text).is_none() {
                    return Err(k.err(format!("unknown coordinate '{}'", k.text)));
                }
                if pairs.iter().any(|(n, _): &(String, Poly)| n == k.text) {
                    return Err(k.err(format!("duplicate coordinate '{}'", k.text)));
                }
                pairs.push((k.text.to_string(), poly(v, vars)?));
            }
        }
        if out.iter().any(|c: &Candidate| c.name == name) {
            return Err(l.err(format!("duplicate candidate '{name}'")));
        }
        out.push(Candidate { name, pairs });
    }
    Ok(out)
}

fn parse_bundle(lines: &[Span], header: Span, vars: &VarSet, n_frame: usize) -> Result<BundleSpec, Error> {
    let kv = key_values(lines)?;
    reject_unknown(&kv, &["rank", "section", "lambda"], "bundle")?;
    let rank = match kv.iter().find(|(k, _, _)| k == "rank") {
        Some((_, _, v)) => count(*v)?,
        None => return Err(header.err("[bundle] needs rank")),
    };
    let square = |m: &Vec<Vec<RatFun>>, s: Span| {
        if m.len() != rank || m.iter().any(|r| r.len() != rank) {
            Err(s.err(format!("expected a {rank}x{rank} matrix")))
        } else {
            Ok(())
        }
    };
    let mut connection = Vec::new();
    let mut sections = Vec::new();
    let mut lambda = None;
    for (k, ks, v) in &kv {
        if let Some(j) = k.strip_prefix('D') {
            let j: usize = j.parse().map_err(|_| ks.err("expected D<index>"))?;
            if j == 0 || j > n_frame {
                return Err(ks.err(format!("frame index {j} outside 1..={n_frame}")));
            }
            let m = matrix(*v, vars)?;
            square(&m, *v)?;
            connection.push((j - 1, m));
        } else if k == "section" {
            let row: Vec<RatFun> = v.split(',').into_iter().map(|e| ratfun(e, vars)).collect::<Result<_, _>>()?;
            if row.len() != rank {
                return Err(v.err(format!("section needs {rank} components")));
            }
            sections.push(row);
        } else if k == "lambda" {
            let m = matrix(*v, vars)?;
            square(&m, *v)?;
            lambda = Some(m);
        }
    }
    connection.sort_by_key(|(j, _)| *j);
    Ok(BundleSpec { rank, connection, sections, lambda })
}

fn parse_radii(s: Span) -> Result<(f64, f64, usize), Error> {
    let parts = s.split(':');
    if parts.len() != 3 {
        return Err(s.err("radii are given as a:b:M"));
    }
    let (a, b, m) = (real(parts[0])?, real(parts[1])?, count(parts[2])?);
    if !(a > 0.0 && b > a && m >= 2) {
        return Err(s.err("radii need 0 < a < b and M ≥ 2"));
    }
    Ok((a, b, m))
}

fn parse_approx(lines: &[Span], header: Span) -> Result<ApproxSpec, Error> {
    let kv = key_values(lines)?;
    reject_unknown(&kv, &["n", "b", "a", "u0", "order", "box", "grid"], "approx")?;
    let get = |k: &str| kv.iter().find(|(name, _, _)| name == k).map(|(_, _, v)| *v);
    let b_span = get("b").ok_or_else(|| header.err("[approx] needs b"))?;
    let n = b_span.split(',').len();
    if let Some(v) = get("n") {
        if count(v)? != n {
            return Err(v.err(format!("n disagrees with the {n} entries of b")));
        }
    }
    let vars = normal_form_vars(n);
    let b = poly_list(b_span, &vars)?;
    let a = match get("a") {
        Some(v) => Some(
            matrix(v, &vars)?
                .into_iter()
                .map(|r| r.into_iter().map(|e| e.as_poly().ok_or_else(|| v.err("a must be polynomial"))).collect())
                .collect::<Result<Vec<Vec<Poly>>, _>>()?,
        ),
        None => None,
    };
    let u0 = poly_list(get("u0").ok_or_else(|| header.err("[approx] needs u0"))?, &vars)?;
    Ok(ApproxSpec {
        n,
        b,
        a,
        u0,
        order: get("order").map(count).transpose()?,
        half_width: get("box").map(real).transpose()?,
        grid: get("grid").map(count).transpose()?,
    })
}

fn parse_fbi(lines: &[Span], header: Span) -> Result<FbiSpec, Error> {
    let kv = key_values(lines)?;
    reject_unknown(&kv, &["b", "u0", "covector", "kappa", "dirs", "radii", "box", "grid"], "fbi")?;
    let get = |k: &str| kv.iter().find(|(name, _, _)| name == k).map(|(_, _, v)| *v);
    let vars = normal_form_vars(1);
    Ok(FbiSpec {
        b: get("b").map(|v| poly(v, &vars)).transpose()?,
        u0: ratfun(get("u0").ok_or_else(|| header.err("[fbi] needs u0"))?, &vars)?,
        covector: get("covector").map(constant).transpose()?,
        kappa: get("kappa").map(real).transpose()?,
        dirs: get("dirs").map(count).transpose()?,
        radii: get("radii").map(parse_radii).transpose()?,
        half_width: get("box").map(real).transpose()?,
        grid: get("grid").map(count).transpose()?,
    })
}

/// Parses a structure file; the structure itself is validated as well.
pub fn parse_structure(text: &str) -> Result<StructureFile, Error> {
    let mut sections: Vec<(&str, Span, Vec<Span>)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let span = Span { text: body, line: ln + 1, col: 1 }.trim();
        if span.text.is_empty() {
            continue;
        }
        if let Some(rest) = span.text.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| span.err("unterminated section header"))?.trim();
            let Some(&name) = SECTIONS.iter().find(|s| **s == name) else {
                return Err(span.err(format!("unknown section [{name}]")));
            };
            if sections.iter().any(|(n, _, _)| *n == name) {
                return Err(span.err(format!("duplicate section [{name}]")));
            }
            sections.push((name, span, Vec::new()));
            continue;
        }
        match sections.last_mut() {
            Some((_, _, lines)) => lines.push(span),
            None => return Err(span.err("content before the first section")),
        }
    }
    let find = |name: &str| sections.iter().find(|(n, _, _)| *n == name).map(|(_, h, l)| (*h, l.as_slice()));
    let (dh, dl) = find("dims").ok_or_else(|| perr(1, 1, "missing [dims] section"))?;
    let (nu, d, mu) = parse_dims(dl, dh)?;
    let vars = canonical_vars(nu, d, mu);
    let phi = match find("phi") {
        Some((_, lines)) => lines.iter().map(|l| poly(*l, &vars)).collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    if phi.len() != d {
        return Err(Error::DimensionMismatch(format!("[phi] has {} entries but d = {}", phi.len(), d)));
    }
    let kernel = match find("kernel") {
        Some((_, lines)) => lines.iter().map(|l| poly_list(*l, &vars)).collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    if let Some(b) = kernel.iter().find(|b| b.len() != d) {
        return Err(Error::DimensionMismatch(format!("kernel vector has {} entries but d = {}", b.len(), d)));
    }
    let candidates = match find("candidate") {
        Some((_, lines)) => parse_candidates(lines, &vars)?,
        None => Vec::new(),
    };
    let bundle = find("bundle").map(|(h, l)| parse_bundle(l, h, &vars, nu + mu)).transpose()?;
    let approx = find("approx").map(|(h, l)| parse_approx(l, h)).transpose()?;
    let fbi = find("fbi").map(|(h, l)| parse_fbi(l, h)).transpose()?;
    let file = StructureFile { nu, d, mu, phi, kernel, candidates, bundle, approx, fbi };
    file.structure()?;
    Ok(file)
}

fn join<T: fmt::Display>(items: &[T], sep: &str) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

fn fmt_matrix(m: &[Vec<RatFun>]) -> String {
    m.iter().map(|r| join(r, ", ")).collect::<Vec<_>>().join("; ")
}

impl fmt::Display for StructureFile {
    /// Serializes in the grammar accepted by [`parse_structure`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[dims]\nnu={} d={} mu={}", self.nu, self.d, self.mu)?;
        writeln!(f, "[phi]")?;
        for p in &self.phi {
            writeln!(f, "{p}")?;
        }
        if !self.kernel.is_empty() {
            writeln!(f, "[kernel]")?;
            for b in &self.kernel {
                writeln!(f, "{}", join(b, ", "))?;
            }
        }
        if !self.candidates.is_empty() {
            writeln!(f, "[candidate]")?;
            for c in &self.candidates {
                let body: Vec<String> = c.pairs.iter().map(|(k, p)| format!("{k} = {p}")).collect();
                writeln!(f, "{}: {}", c.name, if body.is_empty() { "0".into() } else { body.join(", ") })?;
            }
        }
        if let Some(b) = &self.bundle {
            writeln!(f, "[bundle]\nrank = {}", b.rank)?;
            for (j, m) in &b.connection {
                writeln!(f, "D{} = {}", j + 1, fmt_matrix(m))?;
            }
            for s in &b.sections {
                writeln!(f, "section = {}", join(s, ", "))?;
            }
            if let Some(l) = &b.lambda {
                writeln!(f, "lambda = {}", fmt_matrix(l))?;
            }
        }
        if let Some(a) = &self.approx {
            writeln!(f, "[approx]\nn = {}\nb = {}", a.n, join(&a.b, ", "))?;
            if let Some(m) = &a.a {
                let rows: Vec<String> = m.iter().map(|r| join(r, ", ")).collect();
                writeln!(f, "a = {}", rows.join("; "))?;
            }
            writeln!(f, "u0 = {}", join(&a.u0, ", "))?;
            if let Some(v) = a.order {
                writeln!(f, "order = {v}")?;
            }
            if let Some(v) = a.half_width {
                writeln!(f, "box = {v}")?;
            }
            if let Some(v) = a.grid {
                writeln!(f, "grid = {v}")?;
            }
        }
        if let Some(s) = &self.fbi {
            writeln!(f, "[fbi]")?;
            if let Some(b) = &s.b {
                writeln!(f, "b = {b}")?;
            }
            writeln!(f, "u0 = {}", s.u0)?;
            if let Some(c) = &s.covector {
                writeln!(f, "covector = {c}")?;
            }
            if let Some(v) = s.kappa {
                writeln!(f, "kappa = {v}")?;
            }
            if let Some(v) = s.dirs {
                writeln!(f, "dirs = {v}")?;
            }
            if let Some((a, b, m)) = s.radii {
                writeln!(f, "radii = {a}:{b}:{m}")?;
            }
            if let Some(v) = s.half_width {
                writeln!(f, "box = {v}")?;
            }
            if let Some(v) = s.grid {
                writeln!(f, "grid = {v}")?;
            }
        }
        Ok(())
    }
}
