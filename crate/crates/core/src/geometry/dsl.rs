//! Body description strings.
//!
//! ```text
//! body      := ball | ellipsoid | lq | linimg | trig | support
//! ball      := "ball" [ ":r=" num ]
//! ellipsoid := "ellipsoid:a=" num ",b=" num [ ",c=" num ]
//! lq        := "lq:q=" ( num | "inf" )
//! linimg    := "linimg:(" body "):m=" num { "," num }      row-major, dim² entries
//! trig      := "trig:a=" num ",b=" num { ",c" k "=" num | ",s" k "=" num }   k even >= 2
//! support   := "support:" path
//! ```
//!
//! A support file holds one `index,h` pair per line on the offset circle grid
//! of N nodes; `#` starts a comment and an optional `grid=s1:N=<n>` line fixes
//! N (otherwise N is the number of pairs).

use super::body::{BodyKind, BodySpec, TrigMode};
use crate::error::{HbmError, Result};
use crate::sphere_disc::GridDescriptor;
use std::fmt;
use std::path::Path;

/// Parse a body string for ambient dimension `dim`.
pub fn parse_body(src: &str, dim: usize) -> Result<BodySpec> {
    let mut p = Parser { src, pos: 0 };
    let body = p.body(dim)?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("trailing characters after body"));
    }
    Ok(body)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> HbmError {
        HbmError::Parse { offset: self.pos, message: msg.to_string() }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let t = self.rest().trim_start();
        self.pos = self.src.len() - t.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{tok}'")))
        }
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let n = self.rest().find(|c: char| !c.is_ascii_alphanumeric()).unwrap_or(self.rest().len());
        let s = &self.rest()[..n];
        self.pos += n;
        s
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let n = self.rest().find([',', ')', ':', ';']).unwrap_or(self.rest().len());
        let tok = self.rest()[..n].trim();
        let v = match tok {
            "inf" | "infinity" => f64::INFINITY,
            _ => tok
                .parse::<f64>()
                .map_err(|_| HbmError::Parse { offset: start, message: format!("expected a number, found '{tok}'") })?,
        };
        self.pos += n;
        Ok(v)
    }

    /// `key=value` pairs separated by commas.
    fn params(&mut self) -> Result<Vec<(String, f64, usize)>> {
        let mut out = Vec::new();
        loop {
            let at = self.pos;
            let key = self.ident();
            if key.is_empty() {
                return Err(HbmError::Parse { offset: at, message: "expected a parameter name".into() });
            }
            self.expect("=")?;
            out.push((key.to_string(), self.number()?, at));
            if !self.eat(",") {
                return Ok(out);
            }
        }
    }

    fn body(&mut self, dim: usize) -> Result<BodySpec> {
        let at = self.pos;
        let name = self.ident();
        let wrap = |e: HbmError| match e {
            HbmError::Input(m) => HbmError::Parse { offset: at, message: m },
            e => e,
        };
        match name {
            "ball" => {
                let mut r = 1.0;
                if self.eat(":") {
                    for (k, v, off) in self.params()? {
                        match k.as_str() {
                            "r" => r = v,
                            _ => {
                                return Err(HbmError::Parse {
                                    offset: off,
                                    message: format!("unknown ball parameter '{k}'"),
                                })
                            }
                        }
                    }
                }
                BodySpec::ball(dim, r).map_err(wrap)
            }
            "ellipsoid" => {
                self.expect(":")?;
                let ps = self.params()?;
                let mut axes = [None, None, None];
                for (k, v, off) in ps {
                    let slot = match k.as_str() {
                        "a" => 0,
                        "b" => 1,
                        "c" => 2,
                        _ => {
                            return Err(HbmError::Parse {
                                offset: off,
                                message: format!("unknown ellipsoid parameter '{k}'"),
                            })
                        }
                    };
                    axes[slot] = Some(v);
                }
                let (Some(a), Some(b)) = (axes[0], axes[1]) else {
                    return Err(HbmError::Parse { offset: at, message: "ellipsoid needs a= and b=".into() });
                };
                let semi: Vec<f64> = match axes[2] {
                    Some(c) => vec![a, b, c],
                    None => vec![a, b],
                };
                if semi.len() != dim {
                    return Err(HbmError::Parse {
                        offset: at,
                        message: format!("ellipsoid has {} semi-axes but dimension is {dim}", semi.len()),
                    });
                }
                BodySpec::ellipsoid(&semi).map_err(wrap)
            }
            "lq" => {
                self.expect(":")?;
                let ps = self.params()?;
                match ps.as_slice() {
                    [(k, q, _)] if k == "q" => BodySpec::lq(dim, *q).map_err(wrap),
                    _ => Err(HbmError::Parse { offset: at, message: "lq takes exactly one parameter q=".into() }),
                }
            }
            "linimg" => {
                self.expect(":")?;
                self.expect("(")?;
                let base = self.body(dim)?;
                self.expect(")")?;
                self.expect(":")?;
                self.expect("m")?;
                self.expect("=")?;
                let mat_at = self.pos;
                let mut m = vec![self.number()?];
                while self.eat(",") {
                    m.push(self.number()?);
                }
                BodySpec::linear_image(base, &m).map_err(|e| match e {
                    HbmError::Input(msg) => HbmError::Parse { offset: mat_at, message: msg },
                    e => e,
                })
            }
            "trig" => {
                if dim != 2 {
                    return Err(HbmError::Parse { offset: at, message: "trig bodies are planar".into() });
                }
                self.expect(":")?;
                let (mut a, mut b) = (None, None);
                let mut modes: Vec<TrigMode> = Vec::new();
                for (k, v, off) in self.params()? {
                    let bad = || HbmError::Parse { offset: off, message: format!("unknown trig parameter '{k}'") };
                    match k.as_str() {
                        "a" => a = Some(v),
                        "b" => b = Some(v),
                        _ => {
                            let (kind, num) = k.split_at(1);
                            let h: usize = num.parse().map_err(|_| bad())?;
                            let idx = match modes.iter().position(|m| m.k == h) {
                                Some(i) => i,
                                None => {
                                    modes.push(TrigMode { k: h, cos: 0.0, sin: 0.0 });
                                    modes.len() - 1
                                }
                            };
                            match kind {
                                "c" => modes[idx].cos = v,
                                "s" => modes[idx].sin = v,
                                _ => return Err(bad()),
                            }
                        }
                    }
                }
                let (Some(a), Some(b)) = (a, b) else {
                    return Err(HbmError::Parse { offset: at, message: "trig needs a= and b=".into() });
                };
                modes.sort_by_key(|m| m.k);
                BodySpec::trig(a, b, modes).map_err(wrap)
            }
            "support" => {
                self.expect(":")?;
                self.skip_ws();
                let path = self.rest().trim_end();
                self.pos = self.src.len();
                if dim != 2 {
                    return Err(HbmError::Parse { offset: at, message: "sampled support files are planar".into() });
                }
                load_support_file(Path::new(path))
            }
            "" => Err(HbmError::Parse { offset: at, message: "expected a body name".into() }),
            other => Err(HbmError::Parse { offset: at, message: format!("unknown body '{other}'") }),
        }
    }
}

/// Read `index,h` pairs; see the module docs for the format.
pub fn load_support_file(path: &Path) -> Result<BodySpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HbmError::input(format!("cannot read support file {}: {e}", path.display())))?;
    parse_support_text(&text)
}

pub fn parse_support_text(text: &str) -> Result<BodySpec> {
    let mut n_declared = None;
    let mut pairs = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let content = line.split('#').next().unwrap_or("").trim();
        let bad = |m: String| HbmError::Parse { offset, message: m };
        if let Some(g) = content.strip_prefix("grid=") {
            match g.parse::<GridDescriptor>() {
                Ok(GridDescriptor::Circle { n }) => n_declared = Some(n),
                _ => return Err(bad(format!("support files need a circle grid, got '{g}'"))),
            }
        } else if !content.is_empty() {
            let (i, h) = content.split_once(',').ok_or_else(|| bad("expected 'index,h'".into()))?;
            let i: usize = i.trim().parse().map_err(|_| bad(format!("bad node index '{}'", i.trim())))?;
            let h: f64 = h.trim().parse().map_err(|_| bad(format!("bad support value '{}'", h.trim())))?;
            pairs.push((i, h, offset));
        }
        offset += line.len();
    }
    let n = n_declared.unwrap_or(pairs.len());
    let mut values = vec![f64::NAN; n];
    for (i, h, off) in pairs {
        if i >= n {
            return Err(HbmError::Parse { offset: off, message: format!("node index {i} out of range for N={n}") });
        }
        values[i] = h;
    }
    if let Some(j) = values.iter().position(|v| v.is_nan()) {
        return Err(HbmError::input(format!("support file is missing node {j}")));
    }
    BodySpec::sampled(values)
}

/// DSL spelling of a body; parses back to the same body for every kind but
/// sampled supports and Wulff shapes.
impl fmt::Display for BodySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            BodyKind::Ball { radius } if *radius == 1.0 => write!(f, "ball"),
            BodyKind::Ball { radius } => write!(f, "ball:r={radius}"),
            BodyKind::Ellipsoid { semi_axes } => {
                write!(f, "ellipsoid:a={},b={}", semi_axes[0], semi_axes[1])?;
                if let Some(c) = semi_axes.get(2) {
                    write!(f, ",c={c}")?;
                }
                Ok(())
            }
            BodyKind::Lq { q } if q.is_infinite() => write!(f, "lq:q=inf"),
            BodyKind::Lq { q } => write!(f, "lq:q={q}"),
            BodyKind::LinearImage { base, matrix } => {
                write!(f, "linimg:({base}):m=")?;
                let d = self.dim();
                for i in 0..d {
                    for j in 0..d {
                        if i + j > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", matrix[(i, j)])?;
                    }
                }
                Ok(())
            }
            BodyKind::Trig { a, b, modes } => {
                write!(f, "trig:a={a},b={b}")?;
                for m in modes {
                    write!(f, ",c{k}={},s{k}={}", m.cos, m.sin, k = m.k)?;
                }
                Ok(())
            }
            BodyKind::Sampled(s) => write!(f, "<sampled support, {} values>", s.len()),
            BodyKind::Wulff(w) => write!(f, "<wulff shape, {} vertices>", w.vertices().len()),
        }
    }
}
