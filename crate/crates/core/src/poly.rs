//! Dense bivariate polynomials.

use crate::error::{HbmError, Result};
use std::fmt;

/// `sum c[i][j] x^i y^j`, stored in a square table of side `degree + 1`.
#[derive(Clone, Debug)]
pub struct Poly2 {
    c: Vec<Vec<f64>>,
}

impl Poly2 {
    pub fn zero(degree: usize) -> Self {
        Poly2 { c: vec![vec![0.0; degree + 1]; degree + 1] }
    }

    pub fn monomial(coef: f64, i: usize, j: usize) -> Self {
        let mut p = Poly2::zero(i + j);
        p.c[i][j] = coef;
        p
    }

    pub fn from_terms(terms: &[(f64, usize, usize)]) -> Self {
        let d = terms.iter().map(|t| t.1 + t.2).max().unwrap_or(0);
        let mut p = Poly2::zero(d);
        for &(a, i, j) in terms {
            p.c[i][j] += a;
        }
        p
    }

    /// Total degree of the nonzero terms (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        let mut d = 0;
        for (i, row) in self.c.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    d = d.max(i + j);
                }
            }
        }
        d
    }

    fn side(&self) -> usize {
        self.c.len()
    }

    pub fn coef(&self, i: usize, j: usize) -> f64 {
        self.c.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        // Horner in x of Horner-in-y rows.
        let mut acc = 0.0;
        for row in self.c.iter().rev() {
            let mut r = 0.0;
            for &v in row.iter().rev() {
                r = r * y + v;
            }
            acc = acc * x + r;
        }
        acc
    }

    pub fn dx(&self) -> Self {
        let n = self.side();
        let mut p = Poly2 { c: vec![vec![0.0; n]; n] };
        for i in 1..n {
            for j in 0..n {
                if self.c[i][j] != 0.0 {
                    p.c[i - 1][j] += i as f64 * self.c[i][j];
                }
            }
        }
        p
    }

    pub fn dy(&self) -> Self {
        let n = self.side();
        let mut p = Poly2 { c: vec![vec![0.0; n]; n] };
        for i in 0..n {
            for j in 1..n {
                if self.c[i][j] != 0.0 {
                    p.c[i][j - 1] += j as f64 * self.c[i][j];
                }
            }
        }
        p
    }

    pub fn laplacian(&self) -> Self {
        self.dx().dx().add(&self.dy().dy())
    }

    pub fn add(&self, o: &Poly2) -> Self {
        let n = self.side().max(o.side());
        let mut p = Poly2::zero(n - 1);
        for i in 0..n {
            for j in 0..n {
                p.c[i][j] = self.coef(i, j) + o.coef(i, j);
            }
        }
        p
    }

    pub fn scale(&self, a: f64) -> Self {
        Poly2 { c: self.c.iter().map(|r| r.iter().map(|v| a * v).collect()).collect() }
    }

    pub fn mul(&self, o: &Poly2) -> Self {
        let mut p = Poly2::zero(self.side() + o.side() - 2);
        for (i, r) in self.c.iter().enumerate() {
            for (j, &a) in r.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (k, s) in o.c.iter().enumerate() {
                    for (l, &b) in s.iter().enumerate() {
                        p.c[i + k][j + l] += a * b;
                    }
                }
            }
        }
        p
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.c.iter().flatten().all(|v| v.abs() <= tol)
    }

    /// Real and imaginary parts of `(x + i y)^k`.
    pub fn z_power(k: usize) -> (Poly2, Poly2) {
        let mut re = Poly2::zero(k);
        let mut im = Poly2::zero(k);
        let mut binom = 1.0f64;
        for j in 0..=k {
            // term C(k,j) x^{k-j} (i y)^j
            match j % 4 {
                0 => re.c[k - j][j] += binom,
                1 => im.c[k - j][j] += binom,
                2 => re.c[k - j][j] -= binom,
                _ => im.c[k - j][j] -= binom,
            }
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        (re, im)
    }

    /// Parse sums of monomials such as `"x^3 - 3*x*y^2 + 0.5"`.
    pub fn parse(s: &str) -> Result<Poly2> {
        PolyParser { s: s.as_bytes(), pos: 0 }.parse()
    }
}

impl PartialEq for Poly2 {
    fn eq(&self, o: &Poly2) -> bool {
        let n = self.side().max(o.side());
        (0..n).all(|i| (0..n).all(|j| self.coef(i, j) == o.coef(i, j)))
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for d in (0..self.side() * 2).rev() {
            for i in (0..=d).rev() {
                let j = d - i;
                let a = self.coef(i, j);
                if a == 0.0 {
                    continue;
                }
                if !first {
                    write!(f, " {} ", if a < 0.0 { '-' } else { '+' })?;
                } else if a < 0.0 {
                    write!(f, "-")?;
                }
                first = false;
                write!(f, "{}", a.abs())?;
                if i > 0 {
                    write!(f, "*x^{i}")?;
                }
                if j > 0 {
                    write!(f, "*y^{j}")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

struct PolyParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl PolyParser<'_> {
    fn err(&self, msg: &str) -> HbmError {
        HbmError::Parse { offset: self.pos, message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Poly2> {
        let mut terms = Vec::new();
        let mut sign = 1.0;
        if let Some(c @ (b'+' | b'-')) = self.peek() {
            sign = if c == b'-' { -1.0 } else { 1.0 };
            self.pos += 1;
        }
        loop {
            let (a, i, j) = self.term()?;
            terms.push((sign * a, i, j));
            match self.peek() {
                None => break,
                Some(b'+') => sign = 1.0,
                Some(b'-') => sign = -1.0,
                Some(_) => return Err(self.err("expected '+' or '-'")),
            }
            self.pos += 1;
        }
        if terms.is_empty() {
            return Err(self.err("empty polynomial"));
        }
        Ok(Poly2::from_terms(&terms))
    }

    fn term(&mut self) -> Result<(f64, usize, usize)> {
        let mut a = 1.0;
        let (mut i, mut j) = (0, 0);
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == b'.' => {
                    a *= self.number()?;
                }
                Some(c @ (b'x' | b'y')) => {
                    self.pos += 1;
                    let mut e = 1;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.skip_ws();
                        let start = self.pos;
                        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                            self.pos += 1;
                        }
                        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
                        e = txt.parse().map_err(|_| HbmError::Parse {
                            offset: start,
                            message: "expected integer exponent".into(),
                        })?;
                    }
                    if c == b'x' {
                        i += e;
                    } else {
                        j += e;
                    }
                }
                _ => return Err(self.err("expected number, 'x' or 'y'")),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
                continue;
            }
            match self.peek() {
                Some(b'x' | b'y') => continue,
                _ => break,
            }
        }
        Ok((a, i, j))
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.pos < self.s.len() {
            let c = self.s[self.pos];
            let exp_sign = (c == b'-' || c == b'+') && self.pos > start && matches!(self.s[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        txt.parse().map_err(|_| HbmError::Parse { offset: start, message: format!("bad number '{txt}'") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_powers_are_harmonic() {
        for k in 0..12 {
            let (re, im) = Poly2::z_power(k);
            assert!(re.laplacian().is_zero(1e-9), "Re z^{k}");
            assert!(im.laplacian().is_zero(1e-9), "Im z^{k}");
        }
        let (re, im) = Poly2::z_power(3);
        assert_eq!(re, Poly2::from_terms(&[(1.0, 3, 0), (-3.0, 1, 2)]));
        assert_eq!(im.coef(2, 1), 3.0);
        assert_eq!(im.coef(0, 3), -1.0);
    }

    #[test]
    fn parse_and_eval() {
        let p = Poly2::parse("x^3 - 3*x*y^2 + 0.5").unwrap();
        assert_eq!(p.eval(2.0, 1.0), 8.0 - 6.0 + 0.5);
        let q = Poly2::parse("-2xy + y^2x").unwrap();
        assert_eq!(q.eval(1.0, 3.0), -6.0 + 9.0);
        let e = Poly2::parse("x^2 + * y").unwrap_err();
        assert!(matches!(e, HbmError::Parse { offset: 6, .. }), "{e:?}");
        assert!(Poly2::parse("1e-3*x").unwrap().eval(2.0, 0.0) - 2e-3 < 1e-18);
    }

    #[test]
    fn derivatives_and_products() {
        let p = Poly2::parse("x^2*y + 4*y^3").unwrap();
        assert_eq!(p.dx(), Poly2::parse("2*x*y").unwrap());
        let q = p.mul(&Poly2::parse("x - y").unwrap());
        for &(x, y) in &[(0.3, -1.2), (2.0, 0.5)] {
            assert!((q.eval(x, y) - p.eval(x, y) * (x - y)).abs() < 1e-12);
        }
        assert_eq!(q.degree(), 4);
    }
}
