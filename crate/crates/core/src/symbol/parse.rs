//! Text form of symbols.
//!
//! ```text
//! symbol  := ["+"|"-"] term (("+"|"-") term)*
//! term    := literal ["*" factor ("*" factor)*] | factor ("*" factor)*
//! literal := rational | rational "i" | "i"
//! factor  := "xi" INDEX ["^" NAT]
//! ```
//!
//! Rationals are integers, decimals or `p/q`. Whitespace is ignored between
//! tokens. System files hold one symbol per line; a line whose first
//! non-blank character is `#` is a comment, and `# dim: N` fixes the
//! dimension.

use num_traits::{One, Signed, Zero};

use super::{coeff, MultiIndex, OperatorSymbol, SymbolSystem};
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

/// Parses a single symbol of dimension `dim`.
pub fn parse_symbol(text: &str, dim: usize) -> Result<OperatorSymbol> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let terms = Parser::new(text, 1).symbol()?;
    build(terms, dim, 1)
}

/// Parses a system file. The dimension is taken from `dim` when given,
/// otherwise from a `# dim: N` line, otherwise from the largest variable
/// index that occurs.
pub fn parse_system(text: &str, dim: Option<usize>) -> Result<SymbolSystem> {
    let mut pragma = None;
    let mut parsed = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("dim:") {
                let n: usize = v.trim().parse().map_err(|_| Error::Syntax {
                    line: lineno,
                    column: 1,
                    message: format!("bad dimension pragma '{}'", v.trim()),
                })?;
                pragma = Some(n);
            }
            continue;
        }
        parsed.push((lineno, Parser::new(line, lineno).symbol()?));
    }
    if parsed.is_empty() {
        return Err(Error::EmptySystem);
    }
    let used = parsed
        .iter()
        .flat_map(|(_, terms)| terms.iter())
        .flat_map(|t| t.factors.iter().map(|f| f.index))
        .max()
        .unwrap_or(1);
    let n = dim.or(pragma).unwrap_or(used);
    let symbols = parsed
        .into_iter()
        .map(|(lineno, terms)| build(terms, n, lineno))
        .collect::<Result<Vec<_>>>()?;
    SymbolSystem::new(symbols)
}

struct Factor {
    index: usize,
    power: u32,
    column: usize,
}

struct Term {
    re: Rational,
    im: Rational,
    factors: Vec<Factor>,
}

fn build(terms: Vec<Term>, dim: usize, line: usize) -> Result<OperatorSymbol> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut out = Vec::with_capacity(terms.len());
    for term in terms {
        let mut alpha = vec![0u32; dim];
        for f in &term.factors {
            if f.index > dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: f.index,
                });
            }
            let slot = &mut alpha[f.index - 1];
            *slot = slot.checked_add(f.power).ok_or(Error::ExponentOverflow {
                line,
                column: f.column,
            })?;
        }
        out.push((MultiIndex::new(alpha), coeff(term.re, term.im)));
    }
    OperatorSymbol::from_terms(dim, out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            line,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: self.line,
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn symbol(&mut self) -> Result<Vec<Term>> {
        let mut terms = Vec::new();
        let mut negative = false;
        if self.eat(b'-') {
            negative = true;
        } else {
            self.eat(b'+');
        }
        loop {
            let mut term = self.term()?;
            if negative {
                term.re = -term.re;
                term.im = -term.im;
            }
            terms.push(term);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    negative = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    negative = true;
                }
                Some(c) => return self.err(format!("unexpected character '{}'", c as char)),
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Term> {
        let mut term = Term {
            re: int(1),
            im: int(0),
            factors: Vec::new(),
        };
        match self.peek() {
            Some(b'x') => {}
            Some(c) if c.is_ascii_digit() || c == b'.' || c == b'i' => {
                let (re, im) = self.literal()?;
                term.re = re;
                term.im = im;
                if !self.eat(b'*') {
                    return Ok(term);
                }
            }
            Some(c) => return self.err(format!("expected a term, found '{}'", c as char)),
            None => return self.err("expected a term, found end of input"),
        }
        loop {
            term.factors.push(self.factor()?);
            if !self.eat(b'*') {
                return Ok(term);
            }
        }
    }

    fn literal(&mut self) -> Result<(Rational, Rational)> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b'i') {
            self.pos += 1;
            return Ok((int(0), int(1)));
        }
        let start = self.pos;
        let mut end = self.pos;
        while end < self.src.len() && matches!(self.src[end], b'0'..=b'9' | b'.' | b'/') {
            end += 1;
        }
        let text = std::str::from_utf8(&self.src[start..end]).unwrap_or("");
        let Some(value) = rational::parse(text) else {
            return self.err(format!("malformed number '{text}'"));
        };
        self.pos = end;
        if self.src.get(self.pos) == Some(&b'i') && self.src.get(self.pos + 1) != Some(&b'x') {
            self.pos += 1;
            return Ok((int(0), value));
        }
        Ok((value, int(0)))
    }

    fn factor(&mut self) -> Result<Factor> {
        self.skip_ws();
        let column = self.pos + 1;
        if !self.src[self.pos..].starts_with(b"xi") {
            return self.err("expected a variable 'xiN'");
        }
        self.pos += 2;
        let index = self.digits()?;
        let index: usize = match index.parse() {
            Ok(v) if v >= 1 => v,
            _ => return self.err(format!("bad variable index '{index}'")),
        };
        let mut power = 1;
        if self.eat(b'^') {
            self.skip_ws();
            let col = self.pos + 1;
            let digits = self.digits()?;
            power = digits.parse().map_err(|_| Error::ExponentOverflow {
                line: self.line,
                column: col,
            })?;
        }
        Ok(Factor {
            index,
            power,
            column,
        })
    }

    fn digits(&mut self) -> Result<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }
}

/// Prints a symbol in a form `parse_symbol` reads back exactly. A
/// coefficient with both real and imaginary parts becomes two terms.
pub(crate) fn print_symbol(p: &OperatorSymbol) -> String {
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut keys: Vec<&MultiIndex> = p.terms().keys().collect();
    keys.sort_by(|a, b| b.order().cmp(&a.order()).then_with(|| b.cmp(a)));
    for alpha in keys {
        let c = &p.terms()[alpha];
        let monomial = monomial_text(alpha);
        for (part, imaginary) in [(&c.re, false), (&c.im, true)] {
            if part.is_zero() {
                continue;
            }
            let negative = part.is_negative();
            let mag = part.abs();
            let mut lit = if mag.is_one() && (imaginary || !monomial.is_empty()) {
                String::new()
            } else {
                rational::format(&mag)
            };
            if imaginary {
                lit.push('i');
            }
            let text = match (lit.is_empty(), monomial.is_empty()) {
                (true, _) => monomial.clone(),
                (false, true) => lit,
                (false, false) => format!("{lit}*{monomial}"),
            };
            pieces.push((negative, text));
        }
    }
    if pieces.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (negative, text)) in pieces.iter().enumerate() {
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(text);
    }
    out
}

fn monomial_text(alpha: &MultiIndex) -> String {
    alpha
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(j, &e)| {
            if e == 1 {
                format!("xi{}", j + 1)
            } else {
                format!("xi{}^{}", j + 1, e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn key(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn parses_examples() {
        let lap = parse_symbol("xi1^2 + xi2^2", 2).unwrap();
        assert_eq!(lap.terms().len(), 2);
        assert_eq!(lap.coefficient(&key(&[2, 0])), Some(&coeff(int(1), int(0))));
        let one = parse_symbol("1", 2).unwrap();
        assert_eq!(one.coefficient(&key(&[0, 0])), Some(&coeff(int(1), int(0))));
        let heat = parse_symbol("i*xi1 + xi2^2", 2).unwrap();
        assert_eq!(heat.coefficient(&key(&[1, 0])), Some(&coeff(int(0), int(1))));
    }

    #[test]
    fn literal_forms() {
        let p = parse_symbol("-3/4*xi1 + 2i*xi2 - 0.5 - i", 2).unwrap();
        assert_eq!(p.coefficient(&key(&[1, 0])), Some(&coeff(ratio(-3, 4), int(0))));
        assert_eq!(p.coefficient(&key(&[0, 1])), Some(&coeff(int(0), int(2))));
        assert_eq!(p.coefficient(&key(&[0, 0])), Some(&coeff(ratio(-1, 2), int(-1))));
        let q = parse_symbol("xi1 * xi1 * xi2^3", 2).unwrap();
        assert_eq!(q.coefficient(&key(&[2, 3])), Some(&coeff(int(1), int(0))));
    }

    #[test]
    fn reports_positions() {
        match parse_symbol("xi1^2 + * xi2", 2) {
            Err(Error::Syntax { line: 1, column: 9, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_symbol("xi3", 2),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
        assert!(matches!(
            parse_symbol("xi1^99999999999", 1),
            Err(Error::ExponentOverflow { line: 1, column: 5 })
        ));
        assert!(matches!(
            parse_symbol("xi1^4000000000*xi1^4000000000", 1),
            Err(Error::ExponentOverflow { .. })
        ));
        assert!(parse_symbol("xi0", 1).is_err());
        assert!(parse_symbol("", 1).is_err());
        assert!(parse_symbol("1/0", 1).is_err());
    }

    #[test]
    fn system_files() {
        let sys = parse_system("# wave\nxi1^2 - xi2^2\n\n", None).unwrap();
        assert_eq!(sys.dim(), 2);
        let sys = parse_system("# dim: 3\nxi1^2\nxi2^2 + 1\n", None).unwrap();
        assert_eq!(sys.dim(), 3);
        assert_eq!(sys.len(), 2);
        match parse_system("xi1\nxi1 +\n", None) {
            Err(Error::Syntax { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_system("# nothing\n", None), Err(Error::EmptySystem)));
    }

    #[test]
    fn prints() {
        let p = parse_symbol("xi2^2 - i*xi1 + 3/2 + 2i", 2).unwrap();
        assert_eq!(print_symbol(&p), "xi2^2 - i*xi1 + 3/2 + 2i");
        let q = parse_symbol("-xi1*xi2", 2).unwrap();
        assert_eq!(print_symbol(&q), "-xi1*xi2");
        assert_eq!(print_symbol(&OperatorSymbol::zero(2)), "0");
        for text in ["xi1^2 + xi2^2", "i*xi1 + xi2^2", "1", "-i", "7/3i*xi1^5"] {
            let p = parse_symbol(text, 2).unwrap();
            assert_eq!(parse_symbol(&print_symbol(&p), 2).unwrap(), p);
        }
    }
}
