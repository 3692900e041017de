//! Command-line front end: JSON descriptors for groups, cocycles,
//! bicharacters, commutation functions and polynomials; the built-in
//! example catalog; and the pipelines behind the `analyze`, `matrix`,
//! `classify`, `identity` and `examples` subcommands.
//!
//! All reports are deterministic: the same input produces byte-identical
//! output.

use crate::classify::{canonical_decomposition, pi_class_and_exponent, PiClass};
use crate::cocycles::{dihedral_quaternion_cocycle, staircase_cocycle, Cocycle};
use crate::comm_matrix::build_matrix;
use crate::commfun::{
    alternating_cocycle, epsilon_form, eta_form, tau_form, Bicharacter, CommutationFunction,
};
use crate::cyclo::{CycNumber, RootOfUnity};
use crate::envelopes::{
    check_regularity, grassmann_envelope, is_graded_identity, twisted_as_graded,
    GradedAlgebra, MultilinearPolynomial, TruncatedGrassmann,
};
use crate::error::{Error, Result};
use crate::groups::{
    group_by_name, group_from_descriptor, FiniteGroup, GroupDescriptor, GroupElement,
};
use crate::twisted::{
    center_dimension_oracle, ray_classes, simplicity, z2_simplicity, z2_simplicity_oracle,
    TwistedAlgebra,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

/// Flags shared by the subcommands.
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    /// Emit JSON instead of aligned text.
    pub json: bool,
    /// Length bound for regularity sweeps and identity degrees.
    pub max_degree: Option<usize>,
    /// Rank of the truncated Grassmann algebra used for envelopes.
    pub grassmann_rank: Option<u32>,
    /// Run the brute-force cross-checks alongside the structural ones.
    pub oracle: bool,
    /// Include the full matrix entries in `matrix` output.
    pub dump_matrix: bool,
}

// ---------------------------------------------------------------------
// JSON descriptors
// ---------------------------------------------------------------------

/// Cocycle input: a builtin name, an alternating-bicharacter
/// construction, or an explicit table of root exponents.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CocycleDescriptor {
    Name(String),
    Scheunert { scheunert: BicharacterDescriptor },
    Table {
        group: GroupDescriptor,
        order: u32,
        table: Vec<Vec<i64>>,
    },
}

/// Bicharacter input on an abelian group: values on generator pairs as
/// exponents of the common root order.
#[derive(Debug, Clone, Deserialize)]
pub struct BicharacterDescriptor {
    pub abelian: Vec<u32>,
    pub order: u32,
    pub gen_table: Vec<Vec<i64>>,
}

/// A commutation-function input: either a full descriptor with a
/// parity-sign vector, a bare bicharacter, or a bare cocycle (taken
/// with the trivial parity).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum InputDescriptor {
    Function {
        cocycle: CocycleDescriptor,
        psi: Vec<i8>,
    },
    Bicharacter(BicharacterDescriptor),
    Cocycle(CocycleDescriptor),
}

/// One term of a multilinear polynomial: a permutation and its
/// coefficient, given as a plain integer or a root of unity.
#[derive(Debug, Clone, Deserialize)]
pub struct TermDescriptor {
    pub perm: Vec<usize>,
    pub coeff: CoeffDescriptor,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CoeffDescriptor {
    Int(i64),
    Root { order: u32, exp: i64 },
}

/// A strongly homogeneous multilinear polynomial: named variables with
/// their degrees (as element indices) and coefficient terms.
#[derive(Debug, Clone, Deserialize)]
pub struct PolyDescriptor {
    pub signature: Vec<(String, usize)>,
    pub terms: Vec<TermDescriptor>,
}

pub fn cocycle_from_descriptor(desc: &CocycleDescriptor) -> Result<Cocycle> {
    match desc {
        CocycleDescriptor::Name(name) => match name.as_str() {
            "d8q16" => Ok(dihedral_quaternion_cocycle()),
            _ => Err(Error::BadCocycle(format!("unknown cocycle name: {name}"))),
        },
        CocycleDescriptor::Scheunert { scheunert } => {
            let b = bicharacter_from_descriptor(scheunert)?;
            alternating_cocycle(&b)
        }
        CocycleDescriptor::Table {
            group,
            order,
            table,
        } => {
            let g = group_from_descriptor(group)?;
            let rows = table
                .iter()
                .map(|row| row.iter().map(|&e| RootOfUnity::new(*order, e)).collect())
                .collect();
            Cocycle::new(g, rows)
        }
    }
}

pub fn bicharacter_from_descriptor(desc: &BicharacterDescriptor) -> Result<Bicharacter> {
    let group = FiniteGroup::from_invariant_factors(&desc.abelian)?;
    let k = group.invariant_factors().map_or(0, |f| f.len());
    if desc.gen_table.len() != k || desc.gen_table.iter().any(|row| row.len() != k) {
        return Err(Error::BadBicharacter(format!(
            "gen_table must be {k}x{k} for this group"
        )));
    }
    let vals: Vec<Vec<RootOfUnity>> = desc
        .gen_table
        .iter()
        .map(|row| row.iter().map(|&e| RootOfUnity::new(desc.order, e)).collect())
        .collect();
    Bicharacter::from_gen_table(group, &vals)
}

pub fn function_from_descriptor(desc: &InputDescriptor) -> Result<CommutationFunction> {
    match desc {
        InputDescriptor::Function { cocycle, psi } => {
            let c = cocycle_from_descriptor(cocycle)?;
            let parity = psi
                .iter()
                .map(|&s| match s {
                    1 => Ok(0u8),
                    -1 => Ok(1u8),
                    _ => Err(Error::Validation(format!(
                        "psi entries must be 1 or -1, got {s}"
                    ))),
                })
                .collect::<Result<Vec<u8>>>()?;
            CommutationFunction::new(c, parity)
        }
        InputDescriptor::Bicharacter(b) => {
            CommutationFunction::from_bicharacter(&bicharacter_from_descriptor(b)?)
        }
        InputDescriptor::Cocycle(c) => Ok(CommutationFunction::even(cocycle_from_descriptor(c)?)),
    }
}

pub fn polynomial_from_descriptor(
    group: &Arc<FiniteGroup>,
    desc: &PolyDescriptor,
) -> Result<MultilinearPolynomial> {
    let signature: Vec<GroupElement> = desc
        .signature
        .iter()
        .map(|(_, idx)| GroupElement(*idx))
        .collect();
    for &g in &signature {
        group.check_element(g)?;
    }
    let terms = desc
        .terms
        .iter()
        .map(|t| {
            let coeff = match t.coeff {
                CoeffDescriptor::Int(v) => CycNumber::from_int(2, v as i128),
                CoeffDescriptor::Root { order, exp } => {
                    CycNumber::from_root(&RootOfUnity::new(order, exp))
                }
            };
            (t.perm.clone(), coeff)
        })
        .collect();
    MultilinearPolynomial::new(group.clone(), signature, terms)
}

// ---------------------------------------------------------------------
// Built-in catalog
// ---------------------------------------------------------------------

/// The named examples reachable from the command line, with one-line
/// descriptions.
pub fn catalog_entries() -> Vec<(&'static str, &'static str)> {
    vec![
        ("grassmann", "sign commutation on C2 (the exterior algebra)"),
        ("klein", "nondegenerate alternating pairing on the Klein group"),
        ("symbol:n", "symbol algebra M_n(F) finely graded by Zn x Zn"),
        ("z4z4:1", "Z4 x Z4 symbol grading with the primitive fourth root"),
        ("z4z4:3", "Z4 x Z4 symbol grading with the inverse fourth root"),
        ("eps:m", "mixed-diagonal pairing on Z(2^m) x Z(2^m)"),
        ("d8q16", "dihedral group with the quaternion-multiplier twist"),
        ("d8q16-envelope", "the same twist with the reflections odd"),
        ("trivial:<group>", "untwisted group algebra (degenerate beyond order 1)"),
        ("product:(a,b)", "tensor product of two catalog entries"),
        ("hat:(a,b)", "parity-signed tensor product of two catalog entries"),
    ]
}

/// Concrete catalog instances used for sweeps (every template with
/// small parameters).
pub fn catalog_instances() -> Vec<&'static str> {
    vec![
        "grassmann",
        "klein",
        "symbol:2",
        "symbol:3",
        "z4z4:1",
        "z4z4:3",
        "eps:1",
        "eps:2",
        "d8q16",
        "d8q16-envelope",
        "trivial:z2",
        "product:(klein,klein)",
        "hat:(grassmann,grassmann)",
    ]
}

fn staircase_function(n: u32, exp: i64) -> Result<CommutationFunction> {
    let group = FiniteGroup::from_invariant_factors(&[n, n])?;
    let mut lower = BTreeMap::new();
    lower.insert((1usize, 0usize), RootOfUnity::new(n, exp));
    Ok(CommutationFunction::even(staircase_cocycle(&group, &lower)?))
}

/// Resolve a catalog name to its commutation function.
pub fn catalog_function(name: &str) -> Result<CommutationFunction> {
    match name {
        "grassmann" => CommutationFunction::from_bicharacter(&tau_form()),
        "klein" => CommutationFunction::from_bicharacter(&eta_form(2, 1)?),
        "d8q16" => Ok(CommutationFunction::even(dihedral_quaternion_cocycle())),
        "d8q16-envelope" => {
            let parity: Vec<u8> = (0..8).map(|i| (i % 2) as u8).collect();
            CommutationFunction::new(dihedral_quaternion_cocycle(), parity)
        }
        "z4z4:1" => staircase_function(4, 1),
        "z4z4:3" => staircase_function(4, 3),
        _ => {
            if let Some(arg) = name.strip_prefix("symbol:") {
                let n: u32 = arg
                    .parse()
                    .map_err(|_| Error::Validation(format!("bad symbol size: {arg}")))?;
                if n == 0 {
                    return Err(Error::Validation("symbol size must be positive".into()));
                }
                return staircase_function(n, 1);
            }
            if let Some(arg) = name.strip_prefix("eps:") {
                let m: u32 = arg
                    .parse()
                    .map_err(|_| Error::Validation(format!("bad eps exponent: {arg}")))?;
                return CommutationFunction::from_bicharacter(&epsilon_form(m)?);
            }
            if let Some(arg) = name.strip_prefix("trivial:") {
                let group = group_by_name(arg)?;
                return Ok(CommutationFunction::even(Cocycle::trivial(group)));
            }
            if let Some(arg) = name.strip_prefix("product:") {
                let (a, b) = split_pair(arg)?;
                return catalog_function(a)?.tensor(&catalog_function(b)?);
            }
            if let Some(arg) = name.strip_prefix("hat:") {
                let (a, b) = split_pair(arg)?;
                return catalog_function(a)?.hat(&catalog_function(b)?);
            }
            Err(Error::Validation(format!("unknown catalog entry: {name}")))
        }
    }
}

/// Split `"(a,b)"` at the top-level comma.
fn split_pair(arg: &str) -> Result<(&str, &str)> {
    let inner = arg
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Validation(format!("expected (a,b), got {arg}")))?;
    let mut depth = 0usize;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth.checked_sub(1).ok_or_else(|| {
                    Error::Validation(format!("unbalanced parentheses in {arg}"))
                })?
            }
            ',' if depth == 0 => return Ok((&inner[..i], &inner[i + 1..])),
            _ => {}
        }
    }
    Err(Error::Validation(format!(
        "expected a top-level comma in {arg}"
    )))
}

/// Resolve a command-line input: an existing file is parsed as a JSON
/// descriptor, anything else is looked up in the catalog.
pub fn load_function(input: &str) -> Result<CommutationFunction> {
    if Path::new(input).is_file() {
        let text = std::fs::read_to_string(input)?;
        let desc: InputDescriptor = serde_json::from_str(&text)?;
        function_from_descriptor(&desc)
    } else {
        catalog_function(input)
    }
}

// ---------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct InputSummary {
    pub name: String,
    pub group: String,
    pub group_order: usize,
    pub abelian: bool,
    pub coeff_order: u32,
    /// Size of the even subgroup of the parity split.
    pub even_subgroup_order: usize,
}

#[derive(Debug, Serialize)]
pub struct RegularitySummary {
    pub regular: bool,
    pub checked_length: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct MatrixSummary {
    pub n: usize,
    pub square_identity: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_plus: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_minus: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub char_poly: Option<Vec<i128>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_poly: Option<Vec<i128>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det: Option<i128>,
    /// Nonzero components of a kernel vector of the matrix, as
    /// (position, element) pairs; present exactly in the degenerate
    /// case.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<(usize, String)>>,
}

/// The full `analyze` report.
#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub input: InputSummary,
    pub regularity: RegularitySummary,
    pub nondegenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degeneracy_witness: Option<usize>,
    /// True when every diagonal commutation sign is +1.
    pub psi_trivial: bool,
    pub center_dim: usize,
    pub simple: bool,
    pub z2_simple: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure_type: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exp: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi_class: Option<String>,
    pub matrix: MatrixSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_checks: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    pub canonical: Vec<String>,
    pub exp: usize,
    pub pi_class: String,
    pub witnesses: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize)]
pub struct IdentityReport {
    pub degree: usize,
    pub algebra_dim: usize,
    pub holds: bool,
    pub vacuous: bool,
}

#[derive(Debug, Serialize)]
pub struct MatrixReport {
    pub summary: MatrixSummary,
    pub trace_ok: bool,
    pub det_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scalar_order: Option<u32>,
    /// Row-major entries as (scalar exponent, commutator index) pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<Vec<(i64, usize)>>>,
}

fn group_label(group: &Arc<FiniteGroup>) -> String {
    if let Some(name) = group.name() {
        return name.to_string();
    }
    match group.invariant_factors() {
        Some(factors) => {
            let parts: Vec<String> = factors.iter().map(|f| format!("Z{f}")).collect();
            parts.join("x")
        }
        None => format!("table group of order {}", group.order()),
    }
}

/// The graded algebra a commutation function acts on: the twisted
/// group algebra itself for a trivial parity, its Grassmann envelope
/// along the even subgroup otherwise.
pub fn realized_algebra(f: &CommutationFunction, rank: u32) -> Result<GradedAlgebra> {
    let algebra = TwistedAlgebra::new(f.cocycle().clone());
    let graded = twisted_as_graded(&algebra);
    let kernel = f.parity_kernel();
    if kernel.len() == f.group().order() {
        Ok(graded)
    } else {
        let e = TruncatedGrassmann::new(rank)?;
        grassmann_envelope(&graded, &kernel, &e)
    }
}

/// Largest dimension for which characteristic polynomials stay inside
/// `i128` arithmetic.
const SPECTRUM_DIM_LIMIT: usize = 32;

fn build_matrix_summary(f: &CommutationFunction, nondegenerate: bool) -> Result<MatrixSummary> {
    let matrix = build_matrix(f)?;
    let n = matrix.n();
    let square = matrix.verify_square()?;
    if square != nondegenerate {
        return Err(Error::InvariantViolation(format!(
            "square identity {square} disagrees with nondegeneracy {nondegenerate}"
        )));
    }
    if !square {
        let kernel = matrix.degenerate_kernel()?;
        let rendered = kernel
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(pos, v)| {
                let terms: Vec<String> = v
                    .terms()
                    .map(|(g, c)| format!("({c})*U{}", g.0))
                    .collect();
                (pos, terms.join(" + "))
            })
            .collect::<Vec<_>>();
        return Ok(MatrixSummary {
            n,
            square_identity: false,
            trace: None,
            alpha_plus: None,
            alpha_minus: None,
            char_poly: None,
            min_poly: None,
            det: None,
            kernel: Some(rendered),
        });
    }
    if n > SPECTRUM_DIM_LIMIT {
        let trace: i64 = f.group().elements().map(|g| f.psi(g) as i64).sum();
        return Ok(MatrixSummary {
            n,
            square_identity: true,
            trace: Some(trace),
            alpha_plus: None,
            alpha_minus: None,
            char_poly: None,
            min_poly: None,
            det: None,
            kernel: None,
        });
    }
    let spectrum = matrix.spectrum()?;
    let det = match &spectrum.det_value {
        Some(v) => Some(v.as_int().ok_or_else(|| {
            Error::InvariantViolation("determinant is not a rational integer".into())
        })?),
        None => None,
    };
    Ok(MatrixSummary {
        n,
        square_identity: true,
        trace: Some(spectrum.trace_scalar),
        alpha_plus: Some(spectrum.alpha_plus),
        alpha_minus: Some(spectrum.alpha_minus),
        char_poly: Some(spectrum.char_poly),
        min_poly: Some(spectrum.min_poly),
        det,
        kernel: None,
    })
}

/// Run the full analysis pipeline on a named or file input.
pub fn cmd_analyze(input: &str, opts: &Options) -> Result<AnalysisReport> {
    let f = load_function(input)?;
    analyze_function(input, &f, opts)
}

pub fn analyze_function(
    name: &str,
    f: &CommutationFunction,
    opts: &Options,
) -> Result<AnalysisReport> {
    let group = f.group().clone();
    let kernel = f.parity_kernel();
    let algebra = TwistedAlgebra::new(f.cocycle().clone());

    let rank = opts.grassmann_rank.unwrap_or(4);
    let graded = realized_algebra(f, rank)?;
    let input_summary = InputSummary {
        name: name.to_string(),
        group: group_label(&group),
        group_order: group.order(),
        abelian: group.is_abelian(),
        coeff_order: algebra.coeff_order(),
        even_subgroup_order: kernel.len(),
    };

    let length = opts.max_degree.unwrap_or(2);
    let reg = check_regularity(&graded, length)?;
    let regularity = RegularitySummary {
        regular: reg.regular,
        checked_length: reg.checked_length,
        failure: reg.failure.clone(),
    };
    if !reg.regular {
        return Err(Error::InvariantViolation(format!(
            "realized algebra fails regularity: {}",
            reg.failure.unwrap_or_default()
        )));
    }

    let nd = f.nondegeneracy()?;
    let psi_trivial = group.elements().all(|g| f.psi(g) == 1);

    let rays = ray_classes(&algebra)?;
    let simp = simplicity(&algebra)?;
    let z2 = z2_simplicity(&algebra, &kernel)?;

    let mut oracle_checks = Vec::new();
    if opts.oracle {
        let center_oracle = center_dimension_oracle(&algebra)?;
        if center_oracle != rays.center_dim {
            return Err(Error::InvariantViolation(format!(
                "ray-class center dimension {} disagrees with the linear oracle {}",
                rays.center_dim, center_oracle
            )));
        }
        oracle_checks.push(format!("center_dim oracle agrees ({center_oracle})"));
        let z2_oracle = z2_simplicity_oracle(&algebra, &kernel)?;
        if z2_oracle != z2.z2_simple {
            return Err(Error::InvariantViolation(format!(
                "graded-simplicity criterion {} disagrees with the ideal oracle {}",
                z2.z2_simple, z2_oracle
            )));
        }
        oracle_checks.push(format!("z2_simplicity oracle agrees ({z2_oracle})"));
    }

    let (structure_type, exp, pi_class) = if nd.nondegenerate {
        let report = pi_class_and_exponent(f)?;
        if report.exp != group.order() {
            return Err(Error::InvariantViolation(format!(
                "exponent {} differs from the group order {}",
                report.exp,
                group.order()
            )));
        }
        let t = match report.class {
            PiClass::MatrixField { .. } => 1u8,
            PiClass::MatrixSuper { .. } => 2,
            PiClass::MatrixGrassmann { .. } => 3,
        };
        (Some(t), Some(report.exp), Some(report.class.label()))
    } else {
        (None, None, None)
    };

    let matrix = build_matrix_summary(f, nd.nondegenerate)?;
    if let Some(trace) = matrix.trace {
        let full = trace == group.order() as i64;
        if full != psi_trivial {
            return Err(Error::InvariantViolation(format!(
                "trace {trace} disagrees with the diagonal signs (psi trivial: {psi_trivial})"
            )));
        }
        if let Some(t) = structure_type {
            if full != (t == 1) {
                return Err(Error::InvariantViolation(format!(
                    "trace {trace} inconsistent with structure type {t}"
                )));
            }
        }
    }

    let (canonical, witnesses) = if group.is_abelian() && nd.nondegenerate {
        let b = f.to_bicharacter()?;
        let d = canonical_decomposition(&b)?;
        let labels = d.form.labels();
        let wit = d
            .raw
            .iter()
            .map(|(_, gens)| gens.iter().map(|g| g.0).collect())
            .collect();
        (Some(labels), Some(wit))
    } else {
        (None, None)
    };

    Ok(AnalysisReport {
        input: input_summary,
        regularity,
        nondegenerate: nd.nondegenerate,
        degeneracy_witness: nd.witness.map(|g| g.0),
        psi_trivial,
        center_dim: rays.center_dim,
        simple: simp.simple,
        z2_simple: z2.z2_simple,
        structure_type,
        exp,
        pi_class,
        matrix,
        canonical,
        witnesses,
        oracle_checks: if oracle_checks.is_empty() {
            None
        } else {
            Some(oracle_checks)
        },
    })
}

/// Build the commutation matrix and verify its spectral identities.
pub fn cmd_matrix(input: &str, opts: &Options) -> Result<MatrixReport> {
    let f = load_function(input)?;
    let nd = f.nondegeneracy()?;
    let summary = build_matrix_summary(&f, nd.nondegenerate)?;
    let n = summary.n;
    let trace_ok = match summary.trace {
        Some(t) => t == 0 || t == n as i64,
        None => true,
    };
    let det_ok = summary.det.map(|d| {
        let expected = if n % 2 == 0 {
            (n as i128).pow(n as u32 / 2)
        } else {
            let r = crate::twisted::isqrt(n as u32) as i128;
            r.pow(n as u32)
        };
        d.abs() == expected
    });
    let (scalar_order, entries) = if opts.dump_matrix {
        let matrix = build_matrix(&f)?;
        let group = f.group().clone();
        let co = TwistedAlgebra::new(f.cocycle().clone()).coeff_order();
        let rows = group
            .elements()
            .map(|g| {
                group
                    .elements()
                    .map(|h| {
                        let (s, c) = matrix.entry(g, h);
                        let s = s.change_order(co).expect("entries are stored at this order");
                        (s.exp as i64, c.0)
                    })
                    .collect()
            })
            .collect();
        (Some(co), Some(rows))
    } else {
        (None, None)
    };
    Ok(MatrixReport {
        summary,
        trace_ok,
        det_ok,
        scalar_order,
        entries,
    })
}

/// Classify a bicharacter input (or the bicharacter of an abelian
/// catalog entry) into canonical factors.
pub fn cmd_classify(input: &str) -> Result<ClassifyReport> {
    let f = load_function(input)?;
    let b = f.to_bicharacter()?;
    let d = canonical_decomposition(&b)?;
    let report = pi_class_and_exponent(&f)?;
    Ok(ClassifyReport {
        canonical: d.form.labels(),
        exp: report.exp,
        pi_class: report.class.label(),
        witnesses: d
            .raw
            .iter()
            .map(|(_, gens)| gens.iter().map(|g| g.0).collect())
            .collect(),
    })
}

/// Decide whether a polynomial is a graded identity of the realized
/// algebra of the input.
pub fn cmd_identity(algebra_input: &str, poly_path: &str, opts: &Options) -> Result<IdentityReport> {
    let f = load_function(algebra_input)?;
    let text = std::fs::read_to_string(poly_path)?;
    let desc: PolyDescriptor = serde_json::from_str(&text)?;
    let poly = polynomial_from_descriptor(f.group(), &desc)?;
    if let Some(max) = opts.max_degree {
        if poly.degree() > max {
            return Err(Error::Validation(format!(
                "polynomial degree {} exceeds the bound {max}",
                poly.degree()
            )));
        }
    }
    let rank = opts
        .grassmann_rank
        .unwrap_or(2 * poly.degree().max(1) as u32);
    let graded = realized_algebra(&f, rank)?;
    let verdict = is_graded_identity(&poly, &graded)?;
    Ok(IdentityReport {
        degree: poly.degree(),
        algebra_dim: graded.dim(),
        holds: verdict.holds,
        vacuous: verdict.vacuous,
    })
}

// ---------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------

pub fn render_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn push_line(out: &mut String, key: &str, value: impl std::fmt::Display) {
    out.push_str(&format!("{key:<18} {value}\n"));
}

pub fn render_analysis_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    push_line(&mut out, "input:", &r.input.name);
    push_line(
        &mut out,
        "group:",
        format!(
            "{} (order {}, {})",
            r.input.group,
            r.input.group_order,
            if r.input.abelian { "abelian" } else { "nonabelian" }
        ),
    );
    push_line(&mut out, "coeff order:", r.input.coeff_order);
    push_line(
        &mut out,
        "even subgroup:",
        format!("{} of {}", r.input.even_subgroup_order, r.input.group_order),
    );
    push_line(
        &mut out,
        "regular:",
        format!("{} (length <= {})", r.regularity.regular, r.regularity.checked_length),
    );
    match r.degeneracy_witness {
        None => push_line(&mut out, "nondegenerate:", r.nondegenerate),
        Some(w) => push_line(
            &mut out,
            "nondegenerate:",
            format!("{} (witness element {w})", r.nondegenerate),
        ),
    }
    push_line(&mut out, "psi trivial:", r.psi_trivial);
    push_line(&mut out, "center_dim:", r.center_dim);
    push_line(&mut out, "simple:", r.simple);
    push_line(&mut out, "z2 simple:", r.z2_simple);
    if let Some(t) = r.structure_type {
        push_line(&mut out, "type:", t);
    }
    if let Some(e) = r.exp {
        push_line(&mut out, "exp:", e);
    }
    if let Some(c) = &r.pi_class {
        push_line(&mut out, "pi class:", c);
    }
    push_line(&mut out, "square identity:", r.matrix.square_identity);
    if let Some(t) = r.matrix.trace {
        push_line(&mut out, "trace:", t);
    }
    if let (Some(p), Some(m)) = (r.matrix.alpha_plus, r.matrix.alpha_minus) {
        push_line(&mut out, "alpha:", format!("({p}, {m})"));
    }
    if let Some(d) = r.matrix.det {
        push_line(&mut out, "det:", d);
    }
    if let Some(kernel) = &r.matrix.kernel {
        let parts: Vec<String> = kernel
            .iter()
            .map(|(pos, v)| format!("[{pos}] {v}"))
            .collect();
        push_line(&mut out, "kernel vector:", parts.join("; "));
    }
    if let Some(canonical) = &r.canonical {
        push_line(&mut out, "canonical:", canonical.join(" (x) "));
    }
    if let Some(oracles) = &r.oracle_checks {
        for line in oracles {
            push_line(&mut out, "oracle:", line);
        }
    }
    out
}

pub fn render_matrix_text(r: &MatrixReport) -> String {
    let mut out = String::new();
    push_line(&mut out, "n:", r.summary.n);
    push_line(&mut out, "square identity:", r.summary.square_identity);
    if let Some(t) = r.summary.trace {
        push_line(&mut out, "trace:", format!("{t} (ok: {})", r.trace_ok));
    }
    if let (Some(p), Some(m)) = (r.summary.alpha_plus, r.summary.alpha_minus) {
        push_line(&mut out, "alpha:", format!("({p}, {m})"));
    }
    if let Some(d) = r.summary.det {
        push_line(
            &mut out,
            "det:",
            format!("{d} (magnitude ok: {})", r.det_ok.unwrap_or(false)),
        );
    }
    if let Some(poly) = &r.summary.char_poly {
        push_line(&mut out, "char poly:", format_poly(poly));
    }
    if let Some(poly) = &r.summary.min_poly {
        push_line(&mut out, "min poly:", format_poly(poly));
    }
    if let Some(kernel) = &r.summary.kernel {
        let parts: Vec<String> = kernel
            .iter()
            .map(|(pos, v)| format!("[{pos}] {v}"))
            .collect();
        push_line(&mut out, "kernel vector:", parts.join("; "));
    }
    if let (Some(order), Some(entries)) = (r.scalar_order, &r.entries) {
        push_line(&mut out, "scalar order:", order);
        for (i, row) in entries.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .map(|(e, c)| format!("({e},{c})"))
                .collect();
            push_line(&mut out, &format!("row {i}:"), cells.join(" "));
        }
    }
    out
}

fn format_poly(coeffs: &[i128]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| match i {
            0 => format!("{c}"),
            1 => format!("{c}*x"),
            _ => format!("{c}*x^{i}"),
        })
        .collect();
    terms.join(" + ")
}

pub fn render_classify_text(r: &ClassifyReport) -> String {
    let mut out = String::new();
    push_line(&mut out, "canonical:", r.canonical.join(" (x) "));
    push_line(&mut out, "exp:", r.exp);
    push_line(&mut out, "pi class:", &r.pi_class);
    let parts: Vec<String> = r
        .witnesses
        .iter()
        .map(|w| {
            let items: Vec<String> = w.iter().map(|g| g.to_string()).collect();
            format!("[{}]", items.join(", "))
        })
        .collect();
    push_line(&mut out, "witnesses:", parts.join(" "));
    out
}

pub fn render_identity_text(r: &IdentityReport) -> String {
    let mut out = String::new();
    push_line(&mut out, "degree:", r.degree);
    push_line(&mut out, "algebra dim:", r.algebra_dim);
    push_line(&mut out, "identity:", r.holds);
    push_line(&mut out, "vacuous:", r.vacuous);
    out
}

pub fn render_examples_text() -> String {
    let mut out = String::new();
    for (name, desc) in catalog_entries() {
        out.push_str(&format!("{name:<22} {desc}\n"));
    }
    out
}
