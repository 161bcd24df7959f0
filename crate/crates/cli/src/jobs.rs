//! Parsing of the field, form and range flags into a [`JobSpec`].

use qcircle::formulas::{diagonalize, Method};
use qcircle::{FieldCtx, FqElem, QuadForm};

use crate::CliError;

/// What a `count` job computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// `N(P)`.
    N,
    /// `N~(P)`, primitive solutions up to units.
    Primitive,
    /// `#Mor_P(P^1, X)(F_q)`.
    Mor,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::N => "n",
            Quantity::Primitive => "primitive",
            Quantity::Mor => "mor",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "n" | "N" => Ok(Quantity::N),
            "primitive" | "prim" => Ok(Quantity::Primitive),
            "mor" => Ok(Quantity::Mor),
            other => Err(CliError::Usage(format!("unknown quantity '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Emit {
    Json,
    Csv,
}

impl Emit {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "json" => Ok(Emit::Json),
            "csv" => Ok(Emit::Csv),
            other => Err(CliError::Usage(format!("unknown output format '{other}'"))),
        }
    }
}

/// A fully validated count or table job.
#[derive(Clone, Debug)]
pub struct JobSpec {
    pub field: FieldCtx,
    pub form: QuadForm,
    /// Original Gram matrix when the form came from `--gram`.
    pub gram: Option<Vec<Vec<FqElem>>>,
    pub ps: Vec<usize>,
    pub methods: Vec<Method>,
    pub quantity: Quantity,
    pub emit: Emit,
    pub budget: u128,
}

/// Raw flag values, before validation.
#[derive(Clone, Debug, Default)]
pub struct RawJob {
    pub p: u32,
    pub nu: u32,
    pub modulus: Option<String>,
    pub coeffs: Option<String>,
    pub gram: Option<String>,
    pub big_p: Option<usize>,
    pub p_range: Option<String>,
    pub method: String,
    pub quantity: String,
    pub emit: String,
    pub budget: Option<String>,
}

impl RawJob {
    pub fn build(&self) -> Result<JobSpec, CliError> {
        let modulus = self.modulus.as_deref().map(parse_u32_list).transpose()?;
        let field = FieldCtx::new(self.p, self.nu, modulus.as_deref())?;
        let (form, gram) = match (&self.coeffs, &self.gram) {
            (Some(c), None) => (QuadForm::new(parse_elems(&field, c)?)?, None),
            (None, Some(g)) => {
                let gram = parse_gram(&field, g)?;
                (diagonalize(&field, &gram)?, Some(gram))
            }
            _ => return Err(CliError::Usage("give exactly one of --coeffs and --gram".into())),
        };
        let ps = match (self.big_p, &self.p_range) {
            (Some(p), None) => vec![p],
            (None, Some(r)) => parse_range(r)?,
            _ => return Err(CliError::Usage("give exactly one of --P and --P-range".into())),
        };
        let methods = self
            .method
            .split(',')
            .map(parse_method)
            .collect::<Result<Vec<_>, _>>()?;
        let budget = match &self.budget {
            Some(b) => qcircle::oracle::parse_budget(b)
                .ok_or_else(|| CliError::Usage(format!("invalid budget '{b}'")))?,
            None => qcircle::oracle::default_budget(),
        };
        Ok(JobSpec {
            field,
            form,
            gram,
            ps,
            methods,
            quantity: Quantity::parse(&self.quantity)?,
            emit: Emit::parse(&self.emit)?,
            budget,
        })
    }
}

pub fn parse_method(s: &str) -> Result<Method, CliError> {
    match s.trim() {
        "exact" | "exact_formula" => Ok(Method::ExactFormula),
        "circle" | "circle_reassembly" => Ok(Method::CircleReassembly),
        "brute" | "brute_force" => Ok(Method::BruteForce),
        "conv" | "convolution" => Ok(Method::Convolution),
        other => Err(CliError::Usage(format!("unknown method '{other}'"))),
    }
}

fn parse_int(s: &str) -> Result<i64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("not an integer: '{s}'")))
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("not a residue: '{t}'")))
        })
        .collect()
}

/// Splits on commas that are not inside brackets.
fn split_top(s: &str) -> Result<Vec<&str>, CliError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if !(0..=1).contains(&depth) {
            return Err(CliError::Usage(format!("unbalanced brackets in '{s}'")));
        }
    }
    if depth != 0 {
        return Err(CliError::Usage(format!("unbalanced brackets in '{s}'")));
    }
    out.push(&s[start..]);
    Ok(out)
}

/// One field element: an integer (prime subfield) or `[c0 c1 ...]` in the
/// power basis of the modulus.
pub fn parse_elem(f: &FieldCtx, s: &str) -> Result<FqElem, CliError> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        let p = f.p() as i64;
        let coords = inner
            .split_whitespace()
            .map(|t| parse_int(t).map(|k| k.rem_euclid(p) as u32))
            .collect::<Result<Vec<_>, _>>()?;
        if coords.len() > f.nu() as usize {
            return Err(CliError::Usage(format!("'{s}' has more than {} coordinates", f.nu())));
        }
        let mut coords = coords;
        coords.resize(f.nu() as usize, 0);
        Ok(f.elem(&coords)?)
    } else {
        Ok(f.from_int(parse_int(s)?))
    }
}

pub fn parse_elems(f: &FieldCtx, s: &str) -> Result<Vec<FqElem>, CliError> {
    split_top(s)?.into_iter().map(|t| parse_elem(f, t)).collect()
}

/// Rows separated by `;`, entries by `,`.
pub fn parse_gram(f: &FieldCtx, s: &str) -> Result<Vec<Vec<FqElem>>, CliError> {
    s.split(';').map(|row| parse_elems(f, row)).collect()
}

/// Inclusive range `a..b`, `a..=b` or `a-b`; empty when `a > b`.
pub fn parse_range(s: &str) -> Result<Vec<usize>, CliError> {
    let s = s.trim();
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .or_else(|| s.split_once('-'))
        .ok_or_else(|| CliError::Usage(format!("invalid range '{s}'")))?;
    let bound = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("invalid range '{s}'")))
    };
    Ok((bound(a)?..=bound(b)?).collect())
}

/// Coefficient rendering that round-trips through [`parse_elem`].
pub fn render_elem(f: &FieldCtx, a: FqElem) -> String {
    let coords = f.coords(a);
    if f.nu() == 1 {
        coords[0].to_string()
    } else {
        let parts: Vec<String> = coords.iter().map(u32::to_string).collect();
        format!("[{}]", parts.join(" "))
    }
}
