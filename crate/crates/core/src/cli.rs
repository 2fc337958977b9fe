//! The `lch` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::algebra::{Element, FreeDga, Word};
use crate::augment::{
    enumerate_augmentations, filtered_induction, surgery_quotient, Augmentation, TriangleStructure,
    DEFAULT_AUGMENTATION_CAP,
};
use crate::diagram::{diagram_to_dga, parse_diagram, resolve_crossing, DiscSearch};
use crate::error::{Error, Result};
use crate::formula::{surgery_formula, LoadedFixture};
use crate::io::{dga_from_json, dga_to_json};
use crate::linearized::{bilinearized_complex, homology_f2, Ranks};
use crate::twisted::{ainf_from_link, build_mc_from_aug, check_maurer_cartan, chop_rank_check, tw_hom_complex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "lch", version, about = "Legendrian contact homology over F2")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for the randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on dart steps in the disc search.
    #[arg(long, global = true, env = "LCH_BUDGET_DISCS", default_value_t = DiscSearch::default().budget,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub budget_discs: u64,
    /// Cap on the number of degree-0 generators enumerated over.
    #[arg(long, global = true, env = "LCH_BUDGET_AUGS", default_value_t = DEFAULT_AUGMENTATION_CAP,
          value_parser = positive)]
    pub budget_augs: usize,
    #[command(subcommand)]
    pub command: Command,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// d² = 0, grading, energy and a seeded Leibniz sample.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        words: usize,
    },
    /// Derive the DGA of a diagram.
    Dga {
        #[arg(long)]
        from_diagram: PathBuf,
        /// Smooth these contractible crossings first.
        #[arg(long, value_delimiter = ',')]
        smooth: Vec<String>,
    },
    /// List all augmentations.
    Augs { file: PathBuf },
    /// Solve for the augmentation of a triangle-structured DGA.
    Induce {
        file: PathBuf,
        #[arg(long)]
        structure: PathBuf,
    },
    /// Quotient by chords sent to 1.
    Surger {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        chords: Vec<String>,
        #[arg(long)]
        aug: PathBuf,
        /// Also write the pushed-forward augmentation here.
        #[arg(long)]
        aug_output: Option<PathBuf>,
    },
    /// Bilinearized homology between two groups of components.
    Linhom {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        comp0: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        comp1: Vec<String>,
        #[arg(long, requires = "aug1", conflicts_with = "all_pairs")]
        aug0: Option<PathBuf>,
        #[arg(long, requires = "aug0")]
        aug1: Option<PathBuf>,
        #[arg(long, required_unless_present = "aug0")]
        all_pairs: bool,
    },
    /// Twisted complexes built from an augmentation.
    Twisted {
        #[command(subcommand)]
        op: TwistedOp,
    },
    /// Compare the twisted side with the surgered side.
    SurgeryFormula {
        #[arg(long, required = true)]
        fixture: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct TwistedArgs {
    file: PathBuf,
    /// Objects of the twisted complex, in order.
    #[arg(long, value_delimiter = ',', required = true)]
    order: Vec<String>,
    #[arg(long)]
    aug: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum TwistedOp {
    /// Emit the A∞ data on the test object followed by the ordered objects.
    Ainf {
        #[command(flatten)]
        args: TwistedArgs,
        #[arg(long)]
        test: Option<String>,
    },
    /// Check the Maurer-Cartan equation for X built from the augmentation.
    Mc {
        #[command(flatten)]
        args: TwistedArgs,
        #[arg(long)]
        test: Option<String>,
    },
    /// Homology of hom_Tw(T, 𝔏).
    Hom {
        #[command(flatten)]
        args: TwistedArgs,
        #[arg(long)]
        test: String,
    },
    /// Chop the first object off an acyclic twisted complex.
    Chop {
        #[command(flatten)]
        args: TwistedArgs,
        #[arg(long)]
        test: String,
    },
}

/// A report: key/value notes followed by a table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub notes: Vec<(String, String)>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    fn table<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Report { headers: headers.into_iter().map(Into::into).collect(), ..Default::default() }
    }

    fn note(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.notes.push((key.into(), value.to_string()));
        self
    }

    fn row(&mut self, cells: Vec<Value>) {
        debug_assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Renders a report. JSON is an array of row objects, CSV has a header row,
/// text prints the notes and then an aligned table.
pub fn emit_table(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|r| Value::Object(report.headers.iter().cloned().zip(r.iter().cloned()).collect::<Map<_, _>>()))
                .collect();
            let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.headers).expect("in-memory write");
            for r in &report.rows {
                w.write_record(r.iter().map(cell_text)).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
        }
        Format::Text => {
            let mut out = String::new();
            for (k, v) in &report.notes {
                out.push_str(&format!("{k}: {v}\n"));
            }
            if report.headers.is_empty() || (report.rows.is_empty() && !report.notes.is_empty()) {
                return out;
            }
            if !out.is_empty() {
                out.push('\n');
            }
            let cells: Vec<Vec<String>> = std::iter::once(report.headers.clone())
                .chain(report.rows.iter().map(|r| r.iter().map(cell_text).collect()))
                .collect();
            let widths: Vec<usize> = (0..report.headers.len())
                .map(|i| cells.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
                .collect();
            for r in &cells {
                let line: Vec<String> = r.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
                out.push_str(line.join("  ").trim_end());
                out.push('\n');
            }
            out
        }
    }
}

/// What a command produces: a rendered document and whether it passed.
struct Outcome {
    body: String,
    passed: bool,
}

impl Outcome {
    fn report(r: &Report, format: Format, passed: bool) -> Self {
        Outcome { body: emit_table(r, format), passed }
    }

    fn document(body: String) -> Self {
        Outcome { body, passed: true }
    }
}

/// Reads a DGA file, or a diagram file (recognized by its `crossings` key)
/// whose DGA is derived on the spot.
pub fn load_dga(path: &Path, search: &DiscSearch) -> Result<FreeDga> {
    let text = std::fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)?;
    if value.get("crossings").is_some() {
        diagram_to_dga(&parse_diagram(&text)?, search)
    } else {
        dga_from_json(&text)
    }
}

fn load_aug(dga: &FreeDga, path: &Path) -> Result<Augmentation> {
    Augmentation::from_json(dga, &std::fs::read_to_string(path)?)
}

fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn ranks_row(label: &str, r: Ranks) -> Vec<Value> {
    vec![json!(label), json!(r.h0), json!(r.h1), json!(r.total())]
}

fn random_word(dga: &FreeDga, rng: &mut ChaCha8Rng) -> Word {
    let len = rng.gen_range(1..=5);
    Word((0..len).map(|_| crate::GenId(rng.gen_range(0..dga.len()))).collect())
}

/// Leibniz identity on random word pairs; returns the number checked and the
/// first failing product.
fn leibniz_sample(dga: &FreeDga, words: usize, seed: u64) -> Result<(usize, Option<String>)> {
    if dga.is_empty() {
        return Ok((0, None));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..words {
        let (u, v) = (random_word(dga, &mut rng), random_word(dga, &mut rng));
        let lhs = dga.apply_differential(&Element::from_word(u.concat(&v)))?;
        let du = dga.apply_differential(&Element::from_word(u.clone()))?;
        let dv = dga.apply_differential(&Element::from_word(v.clone()))?;
        let rhs = du.right_mul_word(&v).add(&dv.left_mul_word(&u));
        if lhs != rhs {
            return Ok((words, Some(dga.format_word(&u.concat(&v)))));
        }
    }
    Ok((words, None))
}

fn check(dga: &FreeDga, words: usize, seed: u64, format: Format) -> Result<Outcome> {
    let d2 = dga.check_d_squared();
    let energy = dga.energy_failure();
    let (n, leibniz) = leibniz_sample(dga, words, seed)?;
    let mut r = Report::table(["generator", "residual"])
        .note("generators", dga.len())
        .note("d^2 = 0", pass(d2.passed()))
        .note("grading", pass(true))
        .note("energy", pass(energy.is_none()))
        .note(format!("leibniz ({n} words, seed {seed})"), pass(leibniz.is_none()));
    if let Some((g, w)) = &energy {
        r = r.note("energy witness", format!("{} -> {}", dga.name(*g), dga.format_word(w)));
    }
    if let Some(w) = &leibniz {
        r = r.note("leibniz witness", w);
    }
    for (g, e) in &d2.failures {
        r.row(vec![json!(dga.name(*g)), json!(dga.format_element(e))]);
    }
    let ok = d2.passed() && energy.is_none() && leibniz.is_none();
    Ok(Outcome::report(&r, format, ok))
}

fn augs(dga: &FreeDga, cap: usize, format: Format) -> Result<Outcome> {
    let all = enumerate_augmentations(dga, cap)?;
    let mut names: Vec<&str> = dga.ids().map(|g| dga.name(g)).collect();
    names.sort_unstable();
    let mut r = Report::table(names.iter().copied()).note("augmentations", all.len());
    for a in &all {
        r.row(names.iter().map(|n| json!(u8::from(a.value(dga.id(n).unwrap())))).collect());
    }
    Ok(Outcome::report(&r, format, true))
}

fn components(dga: &FreeDga, names: &[String]) -> Result<Vec<usize>> {
    names.iter().map(|n| dga.component_index(n)).collect()
}

fn support(dga: &FreeDga, a: &Augmentation) -> String {
    let mut s: Vec<&str> = a.support().map(|g| dga.name(g)).collect();
    s.sort_unstable();
    format!("{{{}}}", s.join(","))
}

fn linhom(
    dga: &FreeDga,
    comp0: &[String],
    comp1: &[String],
    pair: Option<(Augmentation, Augmentation)>,
    cap: usize,
    format: Format,
) -> Result<Outcome> {
    let (g0, g1) = (components(dga, comp0)?, components(dga, comp1)?);
    let mut r = Report::table(["aug0", "aug1", "h0", "h1", "total"]);
    match pair {
        Some((e0, e1)) => {
            let h = homology_f2(&bilinearized_complex(dga, &g0, &g1, &e0, &e1)?)?;
            r.row(vec![json!(support(dga, &e0)), json!(support(dga, &e1)), json!(h.h0), json!(h.h1), json!(h.total())]);
        }
        None => {
            let all = enumerate_augmentations(dga, cap)?;
            for (i, a) in all.iter().enumerate() {
                r = r.note(format!("aug {i}"), support(dga, a));
            }
            for (i, e0) in all.iter().enumerate() {
                for (j, e1) in all.iter().enumerate() {
                    let h = homology_f2(&bilinearized_complex(dga, &g0, &g1, e0, e1)?)?;
                    r.row(vec![json!(i), json!(j), json!(h.h0), json!(h.h1), json!(h.total())]);
                }
            }
        }
    }
    Ok(Outcome::report(&r, format, true))
}

fn objects_with_test(dga: &FreeDga, test: Option<&str>, order: &[String]) -> Result<Vec<usize>> {
    let mut all = Vec::new();
    if let Some(t) = test {
        all.push(dga.component_index(t)?);
    }
    all.extend(components(dga, order)?);
    Ok(all)
}

fn twisted(op: &TwistedOp, search: &DiscSearch, format: Format) -> Result<Outcome> {
    let (args, test) = match op {
        TwistedOp::Ainf { args, test } | TwistedOp::Mc { args, test } => (args, test.as_deref()),
        TwistedOp::Hom { args, test } | TwistedOp::Chop { args, test } => (args, Some(test.as_str())),
    };
    let dga = load_dga(&args.file, search)?;
    let eps = load_aug(&dga, &args.aug)?;
    let ainf = ainf_from_link(&dga, &objects_with_test(&dga, test, &args.order)?, &eps)?;
    let order = components(&dga, &args.order)?;
    match op {
        TwistedOp::Ainf { .. } => Ok(Outcome::document(ainf.to_json())),
        TwistedOp::Mc { .. } => {
            let tw = build_mc_from_aug(&dga, &order, &eps)?;
            let mc = check_maurer_cartan(&ainf, &tw)?;
            let relations = ainf.a_infinity_failure();
            let mut r = Report::table(["entry", "source", "target"])
                .note("objects", tw.objects.join(","))
                .note("a-infinity relations", pass(relations.is_none()))
                .note("maurer-cartan", pass(mc.holds()));
            if !mc.holds() {
                r = r.note("residual", mc.residual.join(" + "));
            }
            for x in &tw.x {
                let m = &ainf.morphisms()[ainf.morphism_index(x)?];
                r.row(vec![json!(x), json!(ainf.objects()[m.hom.0]), json!(ainf.objects()[m.hom.1])]);
            }
            Ok(Outcome::report(&r, format, mc.holds() && relations.is_none()))
        }
        TwistedOp::Hom { test, .. } => {
            let tw = build_mc_from_aug(&dga, &order, &eps)?;
            let c = tw_hom_complex(&ainf, test, &tw)?;
            let h = homology_f2(&c)?;
            let squares = c.d_squared_failure().is_none();
            let mut r = Report::table(["degree", "rank"])
                .note("generators", c.len())
                .note("d^2 = 0", pass(squares));
            r.row(vec![json!(0), json!(h.h0)]);
            r.row(vec![json!(1), json!(h.h1)]);
            Ok(Outcome::report(&r, format, squares))
        }
        TwistedOp::Chop { test, .. } => {
            let tw = build_mc_from_aug(&dga, &order, &eps)?;
            let mut r = Report::table(["side", "h0", "h1", "total"]);
            let passed = match chop_rank_check(&ainf, test, &tw) {
                Ok(c) => {
                    r = r.note("acyclic", "yes").note("chop", pass(c.holds()));
                    r.row(ranks_row("full", c.full));
                    r.row(ranks_row(&format!("hom({test}, {})", tw.objects[0]), c.first));
                    r.row(ranks_row("rest", c.rest));
                    c.holds()
                }
                Err(Error::NotAcyclic(n)) => {
                    r = r.note("acyclic", format!("no (total rank {n})")).note("chop", pass(false));
                    false
                }
                Err(e) => return Err(e),
            };
            Ok(Outcome::report(&r, format, passed))
        }
    }
}

fn formula(paths: &[PathBuf], search: &DiscSearch, format: Format) -> Result<Outcome> {
    let mut r = Report::table(["fixture", "pipeline", "h0", "h1", "total", "result"]);
    let mut all = true;
    for p in paths {
        let fx = LoadedFixture::from_file(p, search)?;
        let rep = surgery_formula(&fx, search)?;
        let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let t = rep.twisted.total();
        let mut push = |label: &str, h: Ranks| {
            let mut row = ranks_row(label, h);
            row.insert(0, json!(name));
            row.push(json!(pass(h.total() == t)));
            r.row(row);
        };
        push("twisted", rep.twisted);
        push("quotient", rep.quotient);
        if let Some((h, _)) = rep.resolved {
            push("resolved", h);
        }
        all &= rep.holds();
    }
    let r = r.note("surgery formula", pass(all));
    Ok(Outcome::report(&r, format, all))
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let search = DiscSearch { budget: cli.budget_discs };
    let format = cli.format;
    match &cli.command {
        Command::Check { file, words } => check(&load_dga(file, &search)?, *words, cli.seed, format),
        Command::Dga { from_diagram, smooth } => {
            let mut d = parse_diagram(&std::fs::read_to_string(from_diagram)?)?;
            for c in smooth {
                d = resolve_crossing(&d, c)?;
            }
            Ok(Outcome::document(dga_to_json(&diagram_to_dga(&d, &search)?)))
        }
        Command::Augs { file } => augs(&load_dga(file, &search)?, cli.budget_augs, format),
        Command::Induce { file, structure } => {
            let dga = load_dga(file, &search)?;
            let s = TriangleStructure::from_json(&dga, &std::fs::read_to_string(structure)?)?;
            Ok(Outcome::document(filtered_induction(&dga, &s)?.to_json(&dga)))
        }
        Command::Surger { file, chords, aug, aug_output } => {
            let dga = load_dga(file, &search)?;
            let eps = load_aug(&dga, aug)?;
            let ids = chords.iter().map(|c| dga.id(c)).collect::<Result<Vec<_>>>()?;
            let q = surgery_quotient(&dga, &ids, &eps)?;
            if let Some(p) = aug_output {
                std::fs::write(p, q.augmentation.to_json(&q.dga))?;
            }
            Ok(Outcome::document(dga_to_json(&q.dga)))
        }
        Command::Linhom { file, comp0, comp1, aug0, aug1, .. } => {
            let dga = load_dga(file, &search)?;
            let pair = match (aug0, aug1) {
                (Some(a), Some(b)) => Some((load_aug(&dga, a)?, load_aug(&dga, b)?)),
                _ => None,
            };
            linhom(&dga, comp0, comp1, pair, cli.budget_augs, format)
        }
        Command::Twisted { op } => twisted(op, &search, format),
        Command::SurgeryFormula { fixture } => formula(fixture, &search, format),
    }
}

/// Runs `lch` with the given arguments (program name first) and returns the
/// exit code: 0 on success, 1 when a check fails, 2 on bad input.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return if e.is_input() { 2 } else { 1 };
        }
    };
    let written = match &cli.output {
        Some(p) => std::fs::write(p, &outcome.body),
        None => out.write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return 2;
    }
    if outcome.passed {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(rel: &str) -> String {
        format!("{}/../../fixtures/{rel}", env!("CARGO_MANIFEST_DIR"))
    }

    fn lch(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("lch").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn sample() -> Report {
        let mut r = Report::table(["name", "count"]).note("total", 2);
        r.row(vec![json!("long-name"), json!(1)]);
        r.row(vec![json!("b"), json!(10)]);
        r
    }

    #[test]
    fn text_table_is_aligned() {
        assert_eq!(emit_table(&sample(), Format::Text), "total: 2\n\nname       count\nlong-name  1\nb          10\n");
    }

    #[test]
    fn csv_and_json_keep_column_order() {
        assert_eq!(emit_table(&sample(), Format::Csv), "name,count\nlong-name,1\nb,10\n");
        let empty = Report::table(["z", "a"]);
        assert_eq!(emit_table(&empty, Format::Csv), "z,a\n");
        assert_eq!(emit_table(&empty, Format::Json), "[]\n");
        let json = emit_table(&sample(), Format::Json);
        assert!(json.find("\"name\"").unwrap() < json.find("\"count\"").unwrap());
    }

    #[test]
    fn check_on_the_unknot_passes() {
        let (code, out, _) = lch(&["check", &fixture("unknot.json")]);
        assert_eq!(code, 0);
        assert!(out.contains("d^2 = 0: PASS"));
        assert!(out.contains("leibniz (1000 words, seed 0): PASS"));
    }

    #[test]
    fn obstructed_dga_has_no_augmentations() {
        let (code, out, _) = lch(&["--format", "csv", "augs", &fixture("dga/obstructed.json")]);
        assert_eq!(code, 0);
        assert_eq!(out, "b\n");
    }

    #[test]
    fn input_errors_exit_with_two() {
        let (code, _, err) = lch(&["check", &fixture("malformed.json")]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error:"));
        assert_eq!(lch(&["check", &fixture("missing.json")]).0, 2);
        assert_eq!(lch(&["no-such-command"]).0, 2);
    }

    #[test]
    fn failed_chop_exits_with_one() {
        let dga = fixture("twisted/cone.dga.json");
        let args = |aug: &str| ["twisted", "chop", &dga, "--order", "L0,L1", "--test", "T", "--aug", &fixture(aug)].map(String::from);
        let pass = args("twisted/cone.aug.json");
        let (code, out, _) = lch(&pass.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("chop: PASS"));
        let fail = args("twisted/cone.zero.aug.json");
        let (code, out, _) = lch(&fail.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code, 1);
        assert!(out.contains("acyclic: no (total rank 2)"));
    }

    #[test]
    fn output_flag_writes_the_report() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        let (code, out, _) = lch(&["--output", path.to_str().unwrap(), "check", &fixture("unknot.json")]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        assert!(std::fs::read_to_string(path).unwrap().contains("d^2 = 0: PASS"));
    }
}
