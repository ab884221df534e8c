use std::fmt::Write as _;

use num_traits::Signed;

use super::SosError;
use crate::polycore::{format_rational, parse_real, Rational, RealPolynomial, VarSet, Vars};

/// `weight · (root / d^denominator_exponent)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSquare {
    pub weight: Rational,
    pub root: RealPolynomial,
    pub denominator_exponent: u32,
}

/// The identity
/// `w^m · target / d^k = Σ weight_i · (root_i / d^{e_i})² + c · g`,
/// with `d` absent (`1`) for plain polynomials and `c, g` absent without
/// an ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct SosCertificate {
    pub target: RealPolynomial,
    pub denominator: Option<RealPolynomial>,
    pub target_exponent: u32,
    pub multiplier: RealPolynomial,
    pub multiplier_exponent: u32,
    pub squares: Vec<WeightedSquare>,
    pub ideal: Option<RealPolynomial>,
    pub ideal_cofactor: Option<RealPolynomial>,
}

const HEADER: &str = "sos-certificate";

impl SosCertificate {
    pub fn polynomial(target: RealPolynomial, multiplier: RealPolynomial, m: u32, squares: Vec<WeightedSquare>) -> Self {
        Self {
            target,
            denominator: None,
            target_exponent: 0,
            multiplier,
            multiplier_exponent: m,
            squares,
            ideal: None,
            ideal_cofactor: None,
        }
    }

    pub fn vars(&self) -> &Vars {
        self.target.vars()
    }

    /// Left side minus right side after clearing denominators.
    pub fn residual(&self) -> RealPolynomial {
        let vars = self.vars();
        let d = self.denominator.clone().unwrap_or_else(|| RealPolynomial::one(vars));
        let top = self
            .squares
            .iter()
            .map(|s| 2 * s.denominator_exponent)
            .chain(std::iter::once(self.target_exponent))
            .max()
            .unwrap_or(0);
        let mut lhs = &self.multiplier.pow(self.multiplier_exponent) * &self.target;
        lhs = &lhs * &d.pow(top - self.target_exponent);
        let mut rhs = RealPolynomial::zero(vars);
        for s in &self.squares {
            let sq = (&s.root * &s.root).scale(&s.weight);
            rhs = &rhs + &(&sq * &d.pow(top - 2 * s.denominator_exponent));
        }
        if let (Some(g), Some(c)) = (&self.ideal, &self.ideal_cofactor) {
            rhs = &rhs + &(&(c * g) * &d.pow(top));
        }
        &lhs - &rhs
    }

    /// Zero residual and non-negative weights.
    pub fn verify(&self) -> bool {
        self.squares.iter().all(|s| !s.weight.is_negative()) && self.residual().is_zero()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{HEADER}");
        let _ = writeln!(s, "vars: {}", self.vars().names().join(", "));
        let _ = writeln!(s, "target: {}", self.target);
        if let Some(d) = &self.denominator {
            let _ = writeln!(s, "denominator: {d}");
            let _ = writeln!(s, "target_exponent: {}", self.target_exponent);
        }
        let _ = writeln!(s, "multiplier: {}", self.multiplier);
        let _ = writeln!(s, "multiplier_exponent: {}", self.multiplier_exponent);
        for sq in &self.squares {
            let _ = writeln!(s, "square: {}; {}; {}", format_rational(&sq.weight), sq.root, sq.denominator_exponent);
        }
        if let Some(g) = &self.ideal {
            let _ = writeln!(s, "ideal: {g}");
        }
        if let Some(c) = &self.ideal_cofactor {
            let _ = writeln!(s, "ideal_cofactor: {c}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, SosError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, HEADER)) => {}
            _ => return Err(SosError::Format(format!("missing '{HEADER}' header"))),
        }
        let mut vars: Option<Vars> = None;
        let mut target = None;
        let mut denominator = None;
        let mut target_exponent = 0;
        let mut multiplier = None;
        let mut multiplier_exponent = 0;
        let mut squares = Vec::new();
        let mut ideal = None;
        let mut ideal_cofactor = None;
        for (line, l) in lines {
            let (key, value) = l
                .split_once(':')
                .ok_or_else(|| SosError::Format(format!("line {line}: expected 'key: value'")))?;
            let value = value.trim();
            let bad = |what: &str| SosError::Format(format!("line {line}: bad {what}"));
            if key == "vars" {
                let names: Vec<String> = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                vars = Some(vars_from_names(&names));
                continue;
            }
            let v = vars.as_ref().ok_or_else(|| SosError::Format(format!("line {line}: 'vars' must come first")))?;
            let poly = |s: &str| parse_real(s, v).map_err(|e| SosError::Parse(e.at_line(line)));
            match key {
                "target" => target = Some(poly(value)?),
                "denominator" => denominator = Some(poly(value)?),
                "target_exponent" => target_exponent = value.parse().map_err(|_| bad("exponent"))?,
                "multiplier" => multiplier = Some(poly(value)?),
                "multiplier_exponent" => multiplier_exponent = value.parse().map_err(|_| bad("exponent"))?,
                "square" => {
                    let parts: Vec<&str> = value.split(';').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(bad("square (expected 'weight; root; exponent')"));
                    }
                    let weight = poly(parts[0])?;
                    if !weight.is_constant() {
                        return Err(bad("square weight"));
                    }
                    squares.push(WeightedSquare {
                        weight: weight.constant_term(),
                        root: poly(parts[1])?,
                        denominator_exponent: parts[2].parse().map_err(|_| bad("square exponent"))?,
                    });
                }
                "ideal" => ideal = Some(poly(value)?),
                "ideal_cofactor" => ideal_cofactor = Some(poly(value)?),
                other => return Err(SosError::Format(format!("line {line}: unknown key '{other}'"))),
            }
        }
        let vars = vars.ok_or_else(|| SosError::Format("missing 'vars'".into()))?;
        Ok(Self {
            target: target.ok_or_else(|| SosError::Format("missing 'target'".into()))?,
            denominator,
            target_exponent,
            multiplier: multiplier.unwrap_or_else(|| RealPolynomial::one(&vars)),
            multiplier_exponent,
            squares,
            ideal,
            ideal_cofactor,
        })
    }
}

/// The standard real variable sets when the names match, else plain.
pub fn vars_from_names(names: &[String]) -> Vars {
    if names.len() % 2 == 0 && !names.is_empty() {
        let r = VarSet::real(names.len() / 2);
        if r.names() == names {
            return r;
        }
    }
    VarSet::plain(names)
}
