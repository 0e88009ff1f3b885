//! Input-side parsing: wire expressions, rationals, and the structure,
//! module, and ψ specs accepted by the subcommands.
//!
//! Wire naming: an expression names the product `W_n ∘ W_m` — `n` is the
//! first (left) factor's index and `m` the second — matching how the family
//! is usually written. The core library names arguments positionally with
//! `m` first, so this boundary swaps the two variables in both directions.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;

use serde::Deserialize;

use gal_core::rational::{parse_rational, Rational};
use gal_core::weight::ModuleSource;
use gal_core::witt::GradedStructure;
use gal_core::{parse_expression, MultiPoly};

use crate::CliError;

/// Swap the grading variables `m` and `n`, translating between the wire
/// naming and the core's positional naming.
pub fn swap_mn(p: &MultiPoly) -> MultiPoly {
    let subs: BTreeMap<String, MultiPoly> = [
        ("m".to_string(), MultiPoly::var("n")),
        ("n".to_string(), MultiPoly::var("m")),
    ]
    .into();
    p.compose(&subs)
}

/// Identifiers appearing in the source, minus the grading variables; used as
/// the allowed-parameter set so unbound names parse as formal parameters.
fn scan_params(src: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut chars = src.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            name.push(c);
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    name.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            if name != "m" && name != "n" {
                out.insert(name);
            }
        }
    }
    out
}

/// Parse a wire expression into the core's positional naming.
pub fn parse_wire_expression(context: &str, src: &str) -> Result<MultiPoly, CliError> {
    let params = scan_params(src);
    let expr = parse_expression(src, &params)
        .map_err(|e| CliError(format!("{context}: {e}")))?;
    Ok(swap_mn(&expr))
}

/// Parse a rational-valued flag through the expression grammar, so malformed
/// input reports a byte position.
pub fn rational_flag(flag: &str, src: &str) -> Result<Rational, CliError> {
    let expr = parse_expression(src, &BTreeSet::new())
        .map_err(|e| CliError(format!("{flag}: {e}")))?;
    expr.constant_value()
        .ok_or_else(|| CliError(format!("{flag}: byte 1: expected a rational, got `{src}`")))
}

fn rational_field(context: &str, src: &str) -> Result<Rational, CliError> {
    parse_rational(src).map_err(|e| CliError(format!("{context}: {e}")))
}

/// A `NAME=VALUE` parameter binding from the command line.
pub fn parse_param(arg: &str) -> Result<(String, Rational), CliError> {
    let Some((name, value)) = arg.split_once('=') else {
        return Err(CliError(format!("--param: expected NAME=VALUE, got `{arg}`")));
    };
    let value = rational_flag(&format!("--param {name}"), value)?;
    Ok((name.to_string(), value))
}

/// Inline JSON (leading `{`) or the contents of a file at the given path.
fn spec_text(context: &str, spec: &str) -> Result<String, CliError> {
    if spec.trim_start().starts_with('{') {
        Ok(spec.to_string())
    } else {
        fs::read_to_string(spec).map_err(|e| CliError(format!("{context}: cannot read `{spec}`: {e}")))
    }
}

fn from_json<'a, T: Deserialize<'a>>(context: &str, text: &'a str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError(format!("{context}: {e}")))
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum StructureDto {
    Symbolic {
        expr: String,
        #[serde(default)]
        params: BTreeMap<String, String>,
    },
    Table {
        window: i64,
        entries: Vec<TableEntryDto>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntryDto {
    m: i64,
    n: i64,
    value: String,
}

fn structure_from_dto(context: &str, dto: StructureDto) -> Result<GradedStructure, CliError> {
    match dto {
        StructureDto::Symbolic { expr, params } => {
            let poly = parse_wire_expression(context, &expr)?;
            let mut bindings = BTreeMap::new();
            for (name, value) in params {
                let value = rational_field(&format!("{context}: param `{name}`"), &value)?;
                bindings.insert(name, value);
            }
            GradedStructure::symbolic(poly, bindings)
                .map_err(|e| CliError(format!("{context}: {e}")))
        }
        StructureDto::Table { window, entries } => {
            let w = gal_core::report::Window::new(window)
                .map_err(|e| CliError(format!("{context}: {e}")))?;
            let mut map = BTreeMap::new();
            for e in entries {
                let value = rational_field(&format!("{context}: entry ({}, {})", e.m, e.n), &e.value)?;
                if map.insert((e.m, e.n), value).is_some() {
                    return Err(CliError(format!(
                        "{context}: duplicate entry ({}, {})",
                        e.m, e.n
                    )));
                }
            }
            GradedStructure::table(w, map).map_err(|e| CliError(format!("{context}: {e}")))
        }
    }
}

/// Resolve a structure spec: `family` (formal), `family:g=<rational>`,
/// inline JSON, or a file path.
pub fn parse_structure_spec(context: &str, spec: &str) -> Result<GradedStructure, CliError> {
    if spec == "family" {
        return Ok(gal_core::witt::family_structure(None));
    }
    if let Some(rest) = spec.strip_prefix("family:") {
        let Some(value) = rest.strip_prefix("g=") else {
            return Err(CliError(format!(
                "{context}: family shorthand is `family:g=<rational>`, got `{spec}`"
            )));
        };
        let gamma = rational_flag(context, value)?;
        return Ok(gal_core::witt::family_structure(Some(&gamma)));
    }
    let text = spec_text(context, spec)?;
    let dto = from_json(context, &text)?;
    structure_from_dto(context, dto)
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum ModuleDto {
    Family {
        family: String,
        #[serde(default)]
        alpha: Option<String>,
        #[serde(default)]
        beta: Option<String>,
    },
    Valpha {
        alpha: String,
    },
    Vbeta {
        beta: String,
    },
    Valphabeta {
        alpha: String,
        beta: String,
    },
    FromStructure {
        structure: StructureDto,
    },
    Table {
        entries: Vec<ModuleEntryDto>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModuleEntryDto {
    m: i64,
    i: i64,
    value: String,
}

fn named_family(
    context: &str,
    family: &str,
    alpha: Option<String>,
    beta: Option<String>,
) -> Result<ModuleSource, CliError> {
    let need = |field: &str, v: Option<String>| {
        v.ok_or_else(|| CliError(format!("{context}: family `{family}` needs `{field}`")))
    };
    match family {
        "valpha" => Ok(ModuleSource::Valpha {
            alpha: rational_field(context, &need("alpha", alpha)?)?,
        }),
        "vbeta" => Ok(ModuleSource::Vbeta {
            beta: rational_field(context, &need("beta", beta)?)?,
        }),
        "valphabeta" => Ok(ModuleSource::ValphaBeta {
            alpha: rational_field(context, &need("alpha", alpha)?)?,
            beta: rational_field(context, &need("beta", beta)?)?,
        }),
        other => Err(CliError(format!("{context}: unknown family `{other}`"))),
    }
}

/// Resolve a module spec: inline JSON or a file path.
pub fn parse_module_spec(context: &str, spec: &str) -> Result<ModuleSource, CliError> {
    let text = spec_text(context, spec)?;
    let dto: ModuleDto = from_json(context, &text)?;
    match dto {
        ModuleDto::Family {
            family,
            alpha,
            beta,
        } => named_family(context, &family, alpha, beta),
        ModuleDto::Valpha { alpha } => Ok(ModuleSource::Valpha {
            alpha: rational_field(context, &alpha)?,
        }),
        ModuleDto::Vbeta { beta } => Ok(ModuleSource::Vbeta {
            beta: rational_field(context, &beta)?,
        }),
        ModuleDto::Valphabeta { alpha, beta } => Ok(ModuleSource::ValphaBeta {
            alpha: rational_field(context, &alpha)?,
            beta: rational_field(context, &beta)?,
        }),
        ModuleDto::FromStructure { structure } => Ok(ModuleSource::FromStructure(
            structure_from_dto(context, structure)?,
        )),
        ModuleDto::Table { entries } => {
            let mut map = BTreeMap::new();
            for e in entries {
                let value = rational_field(&format!("{context}: entry ({}, {})", e.m, e.i), &e.value)?;
                if map.insert((e.m, e.i), value).is_some() {
                    return Err(CliError(format!(
                        "{context}: duplicate entry ({}, {})",
                        e.m, e.i
                    )));
                }
            }
            Ok(ModuleSource::Tabulated { entries: map })
        }
    }
}

/// Resolve a ψ spec — a JSON object `{"m": "p/q", …}` inline or in a file —
/// into an index-keyed coefficient map.
pub fn parse_psi_spec(context: &str, spec: &str) -> Result<BTreeMap<i64, Rational>, CliError> {
    let text = spec_text(context, spec)?;
    let raw: BTreeMap<String, String> = from_json(context, &text)?;
    let mut psi = BTreeMap::new();
    for (key, value) in raw {
        let m: i64 = key
            .parse()
            .map_err(|_| CliError(format!("{context}: key `{key}` is not an integer index")))?;
        psi.insert(m, rational_field(&format!("{context}: psi[{m}]"), &value)?);
    }
    Ok(psi)
}
