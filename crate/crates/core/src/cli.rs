//! Interchange format, report serialization and the command-line front end.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classifier::{classify, dimension_audit, report_from_decomposition, ClassificationReport};
use crate::error::{Error, Result};
use crate::ftensor::{admissible_projection, assemble_from_operators, FTensor, OperatorFamily};
use crate::matrix::Matrix;
use crate::projectors::{decompose, CLASS_COUNT};
use crate::samples::{example, ExampleParams};
use crate::scalar::{Rational, Scalar};
use crate::selftest::run_suites;
use crate::structure::{standard_structure, StructureSpace};
use crate::tensor::Tensor3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub n: usize,
    #[serde(default = "default_mode")]
    pub scalars: String,
    #[serde(rename = "F")]
    pub f: TensorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub admit: Option<bool>,
}

fn default_mode() -> String {
    Rational::MODE.to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TensorSpec {
    Tensor {
        values: Value,
    },
    Operators {
        #[serde(rename = "A")]
        a: Vec<Value>,
        #[serde(rename = "A_xi", default, skip_serializing_if = "Option::is_none")]
        a_xi: Option<Value>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub g: Value,
    pub phi: Value,
    pub xi: Value,
    pub eta: Value,
}

/// A parsed input: the tensor (carrying its structure) and, when the input
/// was projected, the max-abs distance it moved.
#[derive(Clone, Debug)]
pub struct ParsedInput<S> {
    pub tensor: FTensor<S>,
    pub projection_distance: Option<S>,
}

impl<S> ParsedInput<S> {
    pub fn structure(&self) -> &Arc<StructureSpace<S>>
    where
        S: Scalar,
    {
        self.tensor.structure()
    }
}

fn input_err(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

fn scalar_vec<S: Scalar>(v: &Value, len: usize, what: &str) -> Result<Vec<S>> {
    let items = v
        .as_array()
        .ok_or_else(|| input_err(format!("{what} must be an array")))?;
    if items.len() != len {
        return Err(input_err(format!(
            "{what} must have length {len}, found {}",
            items.len()
        )));
    }
    items.iter().map(S::from_json).collect()
}

fn scalar_matrix<S: Scalar>(v: &Value, d: usize, what: &str) -> Result<Matrix<S>> {
    let rows = v
        .as_array()
        .ok_or_else(|| input_err(format!("{what} must be an array of rows")))?;
    if rows.len() != d {
        return Err(input_err(format!("{what} must have {d} rows, found {}", rows.len())));
    }
    let rows = rows
        .iter()
        .enumerate()
        .map(|(r, row)| scalar_vec(row, d, &format!("{what} row {r}")))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

fn scalar_tensor<S: Scalar>(v: &Value, d: usize) -> Result<Tensor3<S>> {
    let planes = v
        .as_array()
        .ok_or_else(|| input_err("F.values must be a nested array"))?;
    if planes.len() != d {
        return Err(input_err(format!(
            "F.values must have {d} planes, found {}",
            planes.len()
        )));
    }
    let mut nested = Vec::with_capacity(d);
    for (a, plane) in planes.iter().enumerate() {
        nested.push(scalar_matrix::<S>(plane, d, &format!("F.values[{a}]"))?.to_rows());
    }
    Tensor3::from_nested(nested).ok_or_else(|| input_err("F.values is not a cube"))
}

/// Reads the arithmetic mode declared by a document.
pub fn document_mode(bytes: &[u8]) -> Result<String> {
    let doc: InputDocument = serde_json::from_slice(bytes)?;
    Ok(doc.scalars)
}

/// Parses and validates a document in the arithmetic mode `S`. `tol`
/// overrides the structure's zero tolerance (float mode only).
pub fn parse_input<S: Scalar>(bytes: &[u8], tol: Option<f64>, admit: bool) -> Result<ParsedInput<S>> {
    let doc: InputDocument = serde_json::from_slice(bytes)?;
    parse_document(&doc, tol, admit)
}

pub fn parse_document<S: Scalar>(doc: &InputDocument, tol: Option<f64>, admit: bool) -> Result<ParsedInput<S>> {
    if doc.scalars != S::MODE {
        return Err(input_err(format!(
            "scalars must be \"rational\" or \"float\"; expected {:?}, found {:?}",
            S::MODE,
            doc.scalars
        )));
    }
    if doc.n == 0 {
        return Err(Error::ZeroDimension);
    }
    let d = 2 * doc.n + 1;
    let structure = match &doc.structure {
        None => standard_structure::<S>(doc.n)?,
        Some(spec) => StructureSpace::new(
            doc.n,
            scalar_matrix(&spec.g, d, "structure.g")?,
            scalar_matrix(&spec.phi, d, "structure.phi")?,
            scalar_vec(&spec.xi, d, "structure.xi")?,
            scalar_vec(&spec.eta, d, "structure.eta")?,
        )?,
    };
    let structure = match tol {
        Some(t) if !S::EXACT => structure.with_tolerance(t),
        _ => structure,
    };
    let s = Arc::new(structure);
    let admit = admit || doc.admit.unwrap_or(false);
    match &doc.f {
        TensorSpec::Tensor { values } => {
            let t = scalar_tensor::<S>(values, d)?;
            match FTensor::new(Arc::clone(&s), t.clone()) {
                Ok(tensor) => Ok(ParsedInput {
                    tensor,
                    projection_distance: None,
                }),
                Err(Error::Inadmissible(_)) if admit => {
                    let tensor = admissible_projection(&s, &t)?;
                    let distance = t.sub(tensor.coeffs()).max_abs();
                    Ok(ParsedInput {
                        tensor,
                        projection_distance: Some(distance),
                    })
                }
                Err(e) => Err(e),
            }
        }
        TensorSpec::Operators { a, a_xi } => {
            if a.len() != 2 * doc.n {
                return Err(input_err(format!(
                    "F.A must list {} matrices, found {}",
                    2 * doc.n,
                    a.len()
                )));
            }
            let ops = a
                .iter()
                .enumerate()
                .map(|(i, m)| scalar_matrix::<S>(m, d, &format!("F.A[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let fam = match a_xi {
                Some(m) => OperatorFamily::new(Arc::clone(&s), ops, scalar_matrix(m, d, "F.A_xi")?)?,
                None => OperatorFamily::with_derived_axi(Arc::clone(&s), ops)?,
            };
            Ok(ParsedInput {
                tensor: assemble_from_operators(&fam)?,
                projection_distance: None,
            })
        }
    }
}

fn json_matrix<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(S::to_json).collect()))
            .collect(),
    )
}

fn json_vec<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(S::to_json).collect())
}

/// The tensor as a `kind: "tensor"` document; the structure is included
/// unless it is the standard one.
pub fn tensor_document<S: Scalar>(f: &FTensor<S>) -> InputDocument {
    let s = f.structure();
    let values = Value::Array(
        f.coeffs()
            .to_nested()
            .iter()
            .map(|plane| Value::Array(plane.iter().map(|row| json_vec(row)).collect()))
            .collect(),
    );
    let standard = standard_structure::<S>(s.n()).is_ok_and(|st| st == **s);
    InputDocument {
        n: s.n(),
        scalars: S::MODE.to_string(),
        f: TensorSpec::Tensor { values },
        structure: (!standard).then(|| StructureSpec {
            g: json_matrix(s.g()),
            phi: json_matrix(s.phi()),
            xi: json_vec(s.xi()),
            eta: json_vec(s.eta()),
        }),
        admit: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Text,
}

pub fn serialize_report<S: Scalar>(report: &ClassificationReport<S>, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let value = json!({
                "label": report.label,
                "n": report.n,
                "scalars": S::MODE,
                "tol": report.tol,
                "flags": report.flags.to_vec(),
                "magnitudes": json_vec(&report.magnitudes),
                "self_ips": json_vec(&report.self_ips),
                "characterization_ok": report.characterization_ok.to_vec(),
                "one_forms_summary": {
                    "theta_xi": report.one_forms.theta_xi.to_json(),
                    "theta_star_xi": report.one_forms.theta_star_xi.to_json(),
                    "omega": json_vec(&report.one_forms.omega),
                },
                "projection_distance": report.projection_distance.as_ref().map(S::to_json),
                "notes": report.notes,
            });
            let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "label: {}", report.label);
            let _ = writeln!(
                s,
                "{:<6}{:<6}{:>20}{:>20}  identity",
                "class", "flag", "magnitude", "self_ip"
            );
            for i in 0..CLASS_COUNT {
                let _ = writeln!(
                    s,
                    "{:<6}{:<6}{:>20}{:>20}  {}",
                    format!("F{}", i + 1),
                    if report.flags[i] { "*" } else { "-" },
                    report.magnitudes[i].to_text(),
                    report.self_ips[i].to_text(),
                    if report.characterization_ok[i] { "ok" } else { "FAIL" }
                );
            }
            let _ = writeln!(
                s,
                "theta(xi) = {}  theta*(xi) = {}  omega = [{}]",
                report.one_forms.theta_xi.to_text(),
                report.one_forms.theta_star_xi.to_text(),
                report
                    .one_forms
                    .omega
                    .iter()
                    .map(S::to_text)
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            if let Some(dist) = &report.projection_distance {
                let _ = writeln!(s, "projected onto admissible space, distance {}", dist.to_text());
            }
            for note in &report.notes {
                let _ = writeln!(s, "note: {note}");
            }
            s
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "paracontact",
    version,
    about = "Eleven-class decomposition of almost paracontact structure tensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the tensor described by an input document.
    Classify {
        #[arg(long)]
        input: PathBuf,
        /// Zero threshold; components count as zero when max|c| <= tol*(1+max|F|).
        #[arg(long)]
        tol: Option<f64>,
        /// Project an inadmissible tensor instead of rejecting it.
        #[arg(long)]
        admit: bool,
        #[arg(long, value_enum, default_value = "json")]
        report: ReportFormat,
    },
    /// Write the eleven components as documents c01.json..c11.json.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        admit: bool,
    },
    /// Classify one of the printed examples.
    Example {
        #[arg(long)]
        name: String,
        /// Comma-separated k=v list, e.g. a=1,b=-2/3.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, value_enum, default_value = "json")]
        report: ReportFormat,
    },
    /// Run the property suites.
    Selftest {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the ranks of the eleven component projectors.
    Dims {
        #[arg(long)]
        n: usize,
    },
}

/// Runs the CLI with explicit output streams; returns the exit code.
pub fn run_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            let _ = out.flush();
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn execute(cmd: Command) -> Result<(String, i32)> {
    match cmd {
        Command::Classify {
            input,
            tol,
            admit,
            report,
        } => {
            let bytes = std::fs::read(&input)?;
            match document_mode(&bytes)?.as_str() {
                "float" => classify_bytes::<f64>(&bytes, tol, admit, report),
                _ => classify_bytes::<Rational>(&bytes, tol, admit, report),
            }
            .map(|s| (s, 0))
        }
        Command::Decompose { input, output, admit } => {
            let bytes = std::fs::read(&input)?;
            match document_mode(&bytes)?.as_str() {
                "float" => decompose_bytes::<f64>(&bytes, &output, admit),
                _ => decompose_bytes::<Rational>(&bytes, &output, admit),
            }
            .map(|s| (s, 0))
        }
        Command::Example { name, params, report } => {
            let params = ExampleParams::<Rational>::parse(&name, &params)?;
            let (_, _, f) = example(&params)?;
            Ok((serialize_report(&classify(&f, 0.0), report), 0))
        }
        Command::Selftest { n, trials, seed } => {
            let r = run_suites(n, trials, seed)?;
            Ok((r.render(), if r.passed() { 0 } else { 1 }))
        }
        Command::Dims { n } => {
            let audit = dimension_audit(n)?;
            let mut s = format!("n = {n}\n");
            for (i, d) in audit.ranks.iter().enumerate() {
                let _ = writeln!(s, "d{:<3}{d}", i + 1);
            }
            let _ = writeln!(s, "total {}", audit.total());
            let _ = writeln!(s, "null-space dimension {}", audit.nullspace_dim);
            let _ = writeln!(s, "projection rank {}", audit.projection_rank);
            let ok = audit.consistent();
            let _ = writeln!(s, "{}", if ok { "consistent" } else { "INCONSISTENT" });
            Ok((s, if ok { 0 } else { 1 }))
        }
    }
}

fn resolve_tol<S: Scalar>(tol: Option<f64>) -> Result<f64> {
    match tol {
        Some(t) if !(t.is_finite() && t >= 0.0) => {
            Err(input_err(format!("tol must be a finite non-negative number, got {t}")))
        }
        Some(t) => Ok(t),
        None => Ok(S::default_tolerance()),
    }
}

pub fn classify_bytes<S: Scalar>(bytes: &[u8], tol: Option<f64>, admit: bool, format: ReportFormat) -> Result<String> {
    let tol = resolve_tol::<S>(tol)?;
    let parsed = parse_input::<S>(bytes, Some(tol), admit)?;
    let mut report = report_from_decomposition(&decompose(&parsed.tensor), tol);
    report.projection_distance = parsed.projection_distance;
    Ok(serialize_report(&report, format))
}

pub fn decompose_bytes<S: Scalar>(bytes: &[u8], output: &Path, admit: bool) -> Result<String> {
    let parsed = parse_input::<S>(bytes, None, admit)?;
    let dec = decompose(&parsed.tensor);
    std::fs::create_dir_all(output)?;
    let mut summary = String::new();
    for (i, c) in dec.components.iter().enumerate() {
        let path = output.join(format!("c{:02}.json", i + 1));
        let mut text = serde_json::to_string_pretty(&tensor_document(c))?;
        text.push('\n');
        std::fs::write(&path, text)?;
        let _ = writeln!(summary, "{}", path.display());
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn run_capture(s: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(&args(s), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn example_subcommand() {
        let (code, out, _) = run_capture("paracontact example --name 5.3 --params a=1,b=2");
        assert_eq!(code, 0);
        assert!(out.contains("\"label\": \"F_10\""));
    }

    #[test]
    fn usage_errors_exit_2() {
        let (code, _, err) = run_capture("paracontact frobnicate");
        assert_eq!(code, 2);
        assert!(err.contains("Usage"));
        assert_eq!(run_capture("paracontact example --name 5.9").0, 1);
    }

    #[test]
    fn zero_document() {
        let zero = vec![vec![vec!["0"; 3]; 3]; 3];
        let doc = json!({"n": 1, "scalars": "rational", "F": {"kind": "tensor", "values": zero}});
        let p = parse_input::<Rational>(doc.to_string().as_bytes(), None, false).unwrap();
        assert!(p.tensor.is_zero());
        let r = classify(&p.tensor, 0.0);
        assert!(serialize_report(&r, ReportFormat::Json).contains("\"label\": \"F_0\""));
    }

    #[test]
    fn inadmissible_requires_admit() {
        let mut vals = vec![vec![vec![json!("0"); 3]; 3]; 3];
        vals[0][1][1] = json!("1");
        let doc = json!({"n": 1, "F": {"kind": "tensor", "values": vals}});
        let bytes = doc.to_string();
        assert!(matches!(
            parse_input::<Rational>(bytes.as_bytes(), None, false),
            Err(Error::Inadmissible(_))
        ));
        let p = parse_input::<Rational>(bytes.as_bytes(), None, true).unwrap();
        assert_eq!(p.projection_distance, Some(q(1, 1)));
    }

    #[test]
    fn operator_document_example_51() {
        let params =
            ExampleParams::new("5.1", &[("a", q(1, 1)), ("b", q(0, 1)), ("c", q(0, 1)), ("d", q(0, 1))]).unwrap();
        let (ops, _) = crate::samples::example_operators(&params);
        let doc = json!({"n": 2, "scalars": "rational", "F": {"kind": "operators", "A": ops.iter().map(json_matrix).collect::<Vec<_>>()}});
        let p = parse_input::<Rational>(doc.to_string().as_bytes(), None, false).unwrap();
        assert_eq!(classify(&p.tensor, 0.0).label, "F_3");
    }

    #[test]
    fn text_report_rows() {
        let params = ExampleParams::parse("5.2", "a=1,b=2,c=3,d=4,e=5,f=6").unwrap();
        let (_, _, f) = example::<Rational>(&params).unwrap();
        let text = serialize_report(&classify(&f, 0.0), ReportFormat::Text);
        let rows: Vec<&str> = text.lines().filter(|l| l.starts_with('F')).collect();
        assert_eq!(rows.len(), 11);
        for row in rows {
            let flagged = row.split_whitespace().nth(1) == Some("*");
            assert_eq!(flagged, row.starts_with("F9 "), "{row}");
        }
    }
}
