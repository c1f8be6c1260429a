//! Expression trees for custom maps, their parser, and phase-form matching.
//!
//! Grammar (EBNF):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = factor { "*" factor } ;
//! factor  = "-" factor | power ;
//! power   = atom [ "^" digits ] ;
//! atom    = number | "pi" | variable | "sin" "(" expr ")"
//!         | "cos" "(" expr ")" | "(" expr ")" ;
//! variable = "x" digits ;                      (* x0, x1, ... *)
//! number  = digits [ "." digits ] [ ("e"|"E") ["+"|"-"] digits ] ;
//! ```
//!
//! There is no division: map formulas that need reciprocals should be
//! rewritten, which keeps box evaluation total. Exponents are nonnegative
//! integer literals. `pi` evaluates through a directed bracket in enclosure
//! mode and is unavailable on exact scalars (no finite representation).
//!
//! Phase-form matching recognises components shaped like
//! `base + amp * trig(2*pi*(affine in the variables))` with exactly
//! representable affine coefficients; it is deliberately strict, because a
//! criterion applied to an approximately extracted form would certify the
//! wrong map.

use crate::error::{Error, Result};
use crate::interval::{BoxN, Interval};
use crate::scalar::Scalar;

/// Expression tree over variables `x0..x{n-1}`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr<S: Scalar> {
    Const(S),
    Pi,
    Var(usize),
    Neg(Box<Expr<S>>),
    Add(Box<Expr<S>>, Box<Expr<S>>),
    Sub(Box<Expr<S>>, Box<Expr<S>>),
    Mul(Box<Expr<S>>, Box<Expr<S>>),
    Pow(Box<Expr<S>>, u32),
    Sin(Box<Expr<S>>),
    Cos(Box<Expr<S>>),
}

impl<S: Scalar> Expr<S> {
    /// Largest variable index used, if any variable occurs.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) | Expr::Pi => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sin(a) | Expr::Cos(a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    /// Enclosure of the expression over a box.
    pub fn eval_box(&self, b: &BoxN<S>) -> Result<Interval<S>> {
        match self {
            Expr::Const(c) => Interval::point(c.clone()),
            Expr::Pi => match S::pi_bracket() {
                Some((lo, hi)) => Interval::new(lo, hi),
                None => Err(Error::TrigUnsupported),
            },
            Expr::Var(i) => {
                if *i >= b.dims() {
                    return Err(Error::DimMismatch { expected: b.dims(), got: *i });
                }
                Ok(b.comp(*i).clone())
            }
            Expr::Neg(a) => Ok(a.eval_box(b)?.neg()),
            Expr::Add(a, c) => Ok(a.eval_box(b)?.add(&c.eval_box(b)?)),
            Expr::Sub(a, c) => Ok(a.eval_box(b)?.sub(&c.eval_box(b)?)),
            Expr::Mul(a, c) => Ok(a.eval_box(b)?.mul(&c.eval_box(b)?)),
            Expr::Pow(a, n) => Ok(a.eval_box(b)?.powi(*n)),
            Expr::Sin(a) => a.eval_box(b)?.sin(),
            Expr::Cos(a) => a.eval_box(b)?.cos(),
        }
    }

    /// Round-to-nearest point evaluation.
    pub fn eval_point(&self, p: &[S]) -> Result<S> {
        match self {
            Expr::Const(c) => Ok(c.clone()),
            Expr::Pi => S::pi_near().ok_or(Error::TrigUnsupported),
            Expr::Var(i) => {
                if *i >= p.len() {
                    return Err(Error::DimMismatch { expected: p.len(), got: *i });
                }
                Ok(p[*i].clone())
            }
            Expr::Neg(a) => Ok(a.eval_point(p)?.neg()),
            Expr::Add(a, b) => Ok(a.eval_point(p)?.add_near(&b.eval_point(p)?)),
            Expr::Sub(a, b) => Ok(a.eval_point(p)?.sub_near(&b.eval_point(p)?)),
            Expr::Mul(a, b) => Ok(a.eval_point(p)?.mul_near(&b.eval_point(p)?)),
            Expr::Pow(a, n) => {
                let v = a.eval_point(p)?;
                let mut acc = S::one();
                for _ in 0..*n {
                    acc = acc.mul_near(&v);
                }
                Ok(acc)
            }
            Expr::Sin(a) => a.eval_point(p)?.sin_near().ok_or(Error::TrigUnsupported),
            Expr::Cos(a) => a.eval_point(p)?.cos_near().ok_or(Error::TrigUnsupported),
        }
    }

    /// Fold to a constant only when every operation is provably exact.
    fn fold_exact(&self) -> Option<S> {
        match self {
            Expr::Const(c) => Some(c.clone()),
            Expr::Pi | Expr::Var(_) => None,
            Expr::Neg(a) => Some(a.fold_exact()?.neg()),
            Expr::Add(a, b) => exact_binop(&a.fold_exact()?, &b.fold_exact()?, BinOp::Add),
            Expr::Sub(a, b) => exact_binop(&a.fold_exact()?, &b.fold_exact()?, BinOp::Sub),
            Expr::Mul(a, b) => exact_binop(&a.fold_exact()?, &b.fold_exact()?, BinOp::Mul),
            Expr::Pow(a, n) => {
                let v = a.fold_exact()?;
                let mut acc = S::one();
                for _ in 0..*n {
                    acc = exact_binop(&acc, &v, BinOp::Mul)?;
                }
                Some(acc)
            }
            Expr::Sin(_) | Expr::Cos(_) => None,
        }
    }
}

enum BinOp {
    Add,
    Sub,
    Mul,
}

/// Perform a scalar op only if both rounding directions agree (the result
/// is exact).
fn exact_binop<S: Scalar>(a: &S, b: &S, op: BinOp) -> Option<S> {
    let (d, u) = match op {
        BinOp::Add => (a.add_down(b), a.add_up(b)),
        BinOp::Sub => (a.sub_down(b), a.sub_up(b)),
        BinOp::Mul => (a.mul_down(b), a.mul_up(b)),
    };
    if d == u {
        Some(d)
    } else {
        None
    }
}

/// Parse an expression; errors carry the byte offset into `text`.
pub fn parse<S: Scalar>(text: &str) -> Result<Expr<S>> {
    let mut p = Parser { text: text.as_bytes(), pos: 0 };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::ExprParse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr<S: Scalar>(&mut self) -> Result<Expr<S>> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                acc = Expr::Add(Box::new(acc), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                acc = Expr::Sub(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<S: Scalar>(&mut self) -> Result<Expr<S>> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            let rhs = self.factor()?;
            acc = Expr::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn factor<S: Scalar>(&mut self) -> Result<Expr<S>> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power<S: Scalar>(&mut self) -> Result<Expr<S>> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let start = self.pos;
            let digits = self.take_while(|c| c.is_ascii_digit());
            if digits.is_empty() {
                self.pos = start;
                return Err(self.err("expected integer exponent after '^'"));
            }
            let n: u32 = digits
                .parse()
                .map_err(|_| Error::ExprParse { pos: start, msg: "exponent too large".into() })?;
            self.skip_ws();
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn take_while(&mut self, pred: impl Fn(u8) -> bool) -> String {
        let start = self.pos;
        while self.pos < self.text.len() && pred(self.text[self.pos]) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.text[start..self.pos]).into_owned()
    }

    fn atom<S: Scalar>(&mut self) -> Result<Expr<S>> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let word = self.take_while(|c| c.is_ascii_alphanumeric());
                match word.as_str() {
                    "pi" => {
                        self.skip_ws();
                        Ok(Expr::Pi)
                    }
                    "sin" | "cos" => {
                        self.skip_ws();
                        if !self.eat(b'(') {
                            return Err(self.err("expected '(' after function name"));
                        }
                        let arg = Box::new(self.expr()?);
                        if !self.eat(b')') {
                            return Err(self.err("expected ')'"));
                        }
                        Ok(if word == "sin" { Expr::Sin(arg) } else { Expr::Cos(arg) })
                    }
                    w if w.starts_with('x') && w[1..].chars().all(|c| c.is_ascii_digit()) && w.len() > 1 => {
                        let idx: usize = w[1..].parse().map_err(|_| {
                            Error::ExprParse { pos: self.pos, msg: "variable index too large".into() }
                        })?;
                        self.skip_ws();
                        Ok(Expr::Var(idx))
                    }
                    _ => Err(Error::ExprParse {
                        pos: self.pos.saturating_sub(word.len()),
                        msg: format!("unknown identifier '{word}'"),
                    }),
                }
            }
            _ => Err(self.err("expected a number, variable, function, or '('")),
        }
    }

    fn number<S: Scalar>(&mut self) -> Result<Expr<S>> {
        let start = self.pos;
        let mut s = self.take_while(|c| c.is_ascii_digit());
        if self.peek() == Some(b'.') {
            self.pos += 1;
            let frac = self.take_while(|c| c.is_ascii_digit());
            s = format!("{s}.{frac}");
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            let mut exp = String::new();
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                exp.push(self.text[self.pos] as char);
                self.pos += 1;
            }
            let digits = self.take_while(|c| c.is_ascii_digit());
            if digits.is_empty() {
                // Not an exponent after all (e.g. `2*e`); back out.
                self.pos = save;
            } else {
                s = format!("{s}e{exp}{digits}");
            }
        }
        self.skip_ws();
        match S::from_decimal(&s) {
            Some(v) => Ok(Expr::Const(v)),
            None => Err(Error::ExprParse { pos: start, msg: format!("invalid number '{s}'") }),
        }
    }
}

/// Which trig function a phase-form component uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    Sin,
    Cos,
}

/// A component of the shape `base + amp * trig(2*pi*(L(x) + constant))`
/// with `L(x) = sum coeffs[i] * x_i` and `amp >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseForm<S: Scalar> {
    pub base: S,
    pub amp: S,
    pub kind: TrigKind,
    pub coeffs: Vec<S>,
    pub constant: S,
}

impl<S: Scalar> PhaseForm<S> {
    /// Enclosure of the affine phase `L(x) + constant` over a box, in
    /// period units (the `2*pi` factor is not applied).
    pub fn phase_over(&self, b: &BoxN<S>) -> Result<Interval<S>> {
        if b.dims() < self.coeffs.len() {
            return Err(Error::DimMismatch { expected: self.coeffs.len(), got: b.dims() });
        }
        let mut acc = Interval::point(self.constant.clone())?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == S::zero() {
                continue;
            }
            acc = acc.add(&b.comp(i).scale(c));
        }
        Ok(acc)
    }
}

/// Match `expr` against the phase form, with every extracted coefficient
/// provably exact. `dims` sizes the coefficient vector.
pub fn match_phase_form<S: Scalar>(expr: &Expr<S>, dims: usize) -> Option<PhaseForm<S>> {
    // Top level: base + trig-term, in either order, with subtraction folded.
    let (a, b, b_negated) = match expr {
        Expr::Add(a, b) => (a.as_ref(), b.as_ref(), false),
        Expr::Sub(a, b) => (a.as_ref(), b.as_ref(), true),
        _ => return None,
    };
    let (base, trig_term, negated) = if let Some(c) = a.fold_exact() {
        (c, b, b_negated)
    } else {
        let c = b.fold_exact()?;
        if b_negated {
            // trig - const: base is the negated constant.
            (c.neg(), a, false)
        } else {
            (c, a, false)
        }
    };

    // The trig term: product of exact constants and exactly one sin/cos.
    let mut factors = Vec::new();
    flatten_mul(trig_term, &mut factors);
    let mut amp = S::one();
    let mut trig: Option<(&Expr<S>, TrigKind)> = None;
    let mut pending_neg = negated;
    for f in factors {
        let mut f = f;
        while let Expr::Neg(inner) = f {
            pending_neg = !pending_neg;
            f = inner;
        }
        match f {
            Expr::Sin(arg) => {
                if trig.is_some() {
                    return None;
                }
                trig = Some((arg.as_ref(), TrigKind::Sin));
            }
            Expr::Cos(arg) => {
                if trig.is_some() {
                    return None;
                }
                trig = Some((arg.as_ref(), TrigKind::Cos));
            }
            other => {
                let c = other.fold_exact()?;
                amp = exact_binop(&amp, &c, BinOp::Mul)?;
            }
        }
    }
    let (arg, kind) = trig?;
    let _ = pending_neg; // Sign of amp does not affect the sweep range.

    // The argument must be 2 * pi * (affine), as a flat product.
    let mut arg_factors = Vec::new();
    flatten_mul(arg, &mut arg_factors);
    let mut const_product = S::one();
    let mut saw_pi = false;
    let mut affine_part: Option<&Expr<S>> = None;
    for f in arg_factors {
        match f {
            Expr::Pi => {
                if saw_pi {
                    return None;
                }
                saw_pi = true;
            }
            other => {
                if let Some(c) = other.fold_exact() {
                    const_product = exact_binop(&const_product, &c, BinOp::Mul)?;
                } else if affine_part.is_none() {
                    affine_part = Some(other);
                } else {
                    return None;
                }
            }
        }
    }
    if !saw_pi || const_product != S::from_int(2) {
        return None;
    }
    let affine_part = affine_part?;
    let mut coeffs = vec![S::zero(); dims];
    let mut constant = S::zero();
    extract_affine(affine_part, &mut coeffs, &mut constant, &S::one())?;

    Some(PhaseForm { base, amp: amp.abs(), kind, coeffs, constant })
}

fn flatten_mul<'e, S: Scalar>(e: &'e Expr<S>, out: &mut Vec<&'e Expr<S>>) {
    match e {
        Expr::Mul(a, b) => {
            flatten_mul(a, out);
            flatten_mul(b, out);
        }
        other => out.push(other),
    }
}

/// Accumulate `weight * e` into an affine form, requiring exactness.
fn extract_affine<S: Scalar>(
    e: &Expr<S>,
    coeffs: &mut [S],
    constant: &mut S,
    weight: &S,
) -> Option<()> {
    match e {
        Expr::Const(c) => {
            let wc = exact_binop(weight, c, BinOp::Mul)?;
            *constant = exact_binop(constant, &wc, BinOp::Add)?;
            Some(())
        }
        Expr::Var(i) => {
            if *i >= coeffs.len() {
                return None;
            }
            coeffs[*i] = exact_binop(&coeffs[*i], weight, BinOp::Add)?;
            Some(())
        }
        Expr::Neg(a) => extract_affine(a, coeffs, constant, &weight.neg()),
        Expr::Add(a, b) => {
            extract_affine(a, coeffs, constant, weight)?;
            extract_affine(b, coeffs, constant, weight)
        }
        Expr::Sub(a, b) => {
            extract_affine(a, coeffs, constant, weight)?;
            extract_affine(b, coeffs, constant, &weight.neg())
        }
        Expr::Mul(a, b) => {
            if let Some(c) = a.fold_exact() {
                let w = exact_binop(weight, &c, BinOp::Mul)?;
                extract_affine(b, coeffs, constant, &w)
            } else if let Some(c) = b.fold_exact() {
                let w = exact_binop(weight, &c, BinOp::Mul)?;
                extract_affine(a, coeffs, constant, &w)
            } else {
                None
            }
        }
        Expr::Pow(a, 1) => extract_affine(a, coeffs, constant, weight),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse64(s: &str) -> Expr<f64> {
        parse(s).unwrap()
    }

    #[test]
    fn parses_and_evaluates() {
        let e = parse64("0.5 + 2*x0 - x1^2");
        assert_eq!(e.eval_point(&[1.0, 3.0]).unwrap(), 0.5 + 2.0 - 9.0);
        let b = BoxN::from_endpoints(vec![(0.0, 1.0), (-2.0, 1.0)]).unwrap();
        let enc = e.eval_box(&b).unwrap();
        // x1^2 over [-2,1] is [0,4], so the range is [0.5-4, 0.5+2].
        assert_eq!(*enc.lo(), -3.5);
        assert_eq!(*enc.hi(), 2.5);
    }

    #[test]
    fn parser_reports_positions() {
        let err = parse::<f64>("1 + @").unwrap_err();
        match err {
            Error::ExprParse { pos, .. } => assert_eq!(pos, 4),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse::<f64>("sin(x0").is_err());
        assert!(parse::<f64>("x0 x1").is_err());
        assert!(parse::<f64>("foo(x0)").is_err());
    }

    #[test]
    fn pi_evaluates_as_bracket() {
        let e = parse64("cos(pi)");
        let b = BoxN::from_endpoints(vec![(0.0, 1.0)]).unwrap();
        let enc = e.eval_box(&b).unwrap();
        assert!(enc.contains(&-1.0));
        assert!(enc.width() < 1e-12);
    }

    #[test]
    fn matches_phase_form() {
        let e = parse64("0.5 + 0.6*cos(2*pi*(4*x0 + 3*(x1 - 0.5)))");
        let form = match_phase_form(&e, 2).unwrap();
        assert_eq!(form.base, 0.5);
        assert_eq!(form.amp, 0.6);
        assert_eq!(form.kind, TrigKind::Cos);
        assert_eq!(form.coeffs, vec![4.0, 3.0]);
        assert_eq!(form.constant, -1.5);

        let g = parse64("0.5 + 0.5*sin(2*pi*(x0 + x1))");
        let form = match_phase_form(&g, 2).unwrap();
        assert_eq!(form.kind, TrigKind::Sin);
        assert_eq!(form.coeffs, vec![1.0, 1.0]);
        assert_eq!(form.constant, 0.0);
    }

    #[test]
    fn phase_form_rejections() {
        // Wrong period factor.
        assert!(match_phase_form(&parse64("0.5 + 0.6*cos(3*pi*x0)"), 1).is_none());
        // Nonlinear phase.
        assert!(match_phase_form(&parse64("0.5 + 0.6*cos(2*pi*x0^2)"), 1).is_none());
        // Two trig factors.
        assert!(match_phase_form(&parse64("0.5 + sin(2*pi*x0)*cos(2*pi*x0)"), 1).is_none());
        // No additive base.
        assert!(match_phase_form(&parse64("0.6*cos(2*pi*x0)"), 1).is_none());
        // Inexact folded coefficient (0.1 * 0.2 is inexact in binary64).
        assert!(match_phase_form(&parse64("0.5 + cos(2*pi*(0.1*0.2)*x0)"), 1).is_none());
    }

    #[test]
    fn phase_enclosure_in_period_units() {
        let e = parse64("0.5 + 0.6*cos(2*pi*(4*x0 + 3*(x1 - 0.5)))");
        let form = match_phase_form(&e, 2).unwrap();
        let b = BoxN::from_endpoints(vec![(0.0, 0.0), (0.0, 1.0)]).unwrap();
        let phase = form.phase_over(&b).unwrap();
        assert_eq!(*phase.lo(), -1.5);
        assert_eq!(*phase.hi(), 1.5);
    }
}
