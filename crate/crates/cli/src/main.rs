mod verify;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use assocfree::arith::{is_odd_prime, odd_primes_in};
use assocfree::assocorder::{orders_equal, ring_conditions};
use assocfree::cfrac::e_set_bruteforce;
use assocfree::ramification::{classify, valid_jumps};
use assocfree::verdict::verdict;
use assocfree::{
    cf_expand, validate, CaseTag, Closure, OrderProfile, RamificationData, RingReport, Verdict,
    VerdictError,
};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "assocfree",
    version,
    about = "Freeness of rings of integers over associated orders in degree p extensions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClosureArg {
    Dihedral,
    Cyclic,
}

impl From<ClosureArg> for Closure {
    fn from(c: ClosureArg) -> Self {
        match c {
            ClosureArg::Dihedral => Closure::Dihedral,
            ClosureArg::Cyclic => Closure::Cyclic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SurveyClosure {
    Dihedral,
    Cyclic,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum TotRam {
    True,
    False,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecordFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum SurveyFormat {
    Json,
    Csv,
}

#[derive(clap::Args)]
struct Tuple {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    e: u64,
    #[arg(long)]
    t: u64,
    #[arg(long, value_enum, default_value = "dihedral")]
    closure: ClosureArg,
    #[arg(long, default_value = "true", action = clap::ArgAction::Set)]
    totally_ramified: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Freeness verdict for one tuple.
    Verdict {
        #[command(flatten)]
        tuple: Tuple,
        #[arg(long, value_enum, default_value = "json")]
        format: RecordFormat,
    },
    /// Valuation profile of the associated order for one tuple.
    Order {
        #[command(flatten)]
        tuple: Tuple,
    },
    /// Continued fraction of x/p, its convergents and the set E.
    Cf {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        p: u64,
    },
    /// Verdicts for every valid jump over a range of parameters.
    Survey {
        #[arg(long, value_delimiter = ',', conflicts_with = "p_max")]
        p_list: Option<Vec<u64>>,
        #[arg(long)]
        p_max: Option<u64>,
        #[arg(long)]
        e_max: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: SurveyFormat,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "dihedral")]
        closure: SurveyClosure,
        #[arg(long, value_enum, default_value = "both")]
        totally_ramified: TotRam,
    },
    /// Run an invariant suite.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: verify::Suite,
        #[arg(long, default_value_t = 50)]
        max_p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: RecordFormat,
    },
}

/// One verdict with the profile data that applies to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub p: u64,
    pub e: u64,
    pub t: u64,
    pub closure: Closure,
    pub totally_ramified: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ell: Option<u64>,
    pub a: u64,
    pub a0: u64,
    pub cf: Vec<u64>,
    pub cf_length: usize,
    pub case: String,
    pub free: bool,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nu: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<Vec<u64>>,
    #[serde(rename = "E", skip_serializing_if = "Option::is_none", default)]
    pub e_set: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scaffold_c: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scaffold_l: Option<u64>,
}

const CSV_HEADER: [&str; 15] = [
    "p",
    "e",
    "t",
    "closure",
    "totally_ramified",
    "ell",
    "a",
    "a0",
    "cf",
    "cf_length",
    "case",
    "free",
    "reason",
    "scaffold_c",
    "scaffold_l",
];

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

fn opt(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl SurveyRecord {
    fn from_verdict(v: &Verdict, rd: &RamificationData) -> Self {
        let profile = OrderProfile::new(rd).ok();
        SurveyRecord {
            p: v.p,
            e: v.e,
            t: v.t,
            closure: v.closure,
            totally_ramified: v.totally_ramified,
            ell: v.ell,
            a: v.a,
            a0: v.a0,
            cf: v.cf.clone(),
            cf_length: v.cf_length,
            case: v.case.as_str().to_string(),
            free: v.free,
            reason: v.reason.code.as_str().to_string(),
            nu: profile.as_ref().map(|p| p.nu.clone()),
            n: profile.as_ref().map(|p| p.n.clone()),
            e_set: profile.as_ref().map(|p| p.e_set.to_vec()),
            scaffold_c: profile.as_ref().and_then(|p| p.scaffold).map(|s| s.c),
            scaffold_l: profile.as_ref().and_then(|p| p.scaffold).map(|s| s.l),
        }
    }

    fn csv_row(&self) -> [String; 15] {
        [
            self.p.to_string(),
            self.e.to_string(),
            self.t.to_string(),
            self.closure.to_string(),
            self.totally_ramified.to_string(),
            opt(self.ell),
            self.a.to_string(),
            self.a0.to_string(),
            join(&self.cf),
            self.cf_length.to_string(),
            self.case.clone(),
            self.free.to_string(),
            self.reason.clone(),
            opt(self.scaffold_c),
            opt(self.scaffold_l),
        ]
    }

    fn text(&self) -> String {
        format!(
            "p = {}, e = {}, t = {} ({}, totally ramified: {})\na = {}, a0 = {}, cf = {:?} (length {})\nfree: {} [{}; {}]",
            self.p,
            self.e,
            self.t,
            self.closure,
            self.totally_ramified,
            self.a,
            self.a0,
            self.cf,
            self.cf_length,
            self.free,
            self.case,
            self.reason
        )
    }
}

/// Failure modes mapped onto exit codes.
enum Failure {
    Validation(serde_json::Value),
    Io(String),
    Verification,
}

impl Failure {
    fn report(self) -> ExitCode {
        match self {
            Failure::Validation(v) => {
                eprintln!("{v}");
                ExitCode::from(2)
            }
            Failure::Io(msg) => {
                eprintln!("{}", json!({ "error": "Io", "message": msg }));
                ExitCode::from(3)
            }
            Failure::Verification => ExitCode::from(1),
        }
    }
}

fn validation(kind: &str, message: impl Into<String>) -> Failure {
    Failure::Validation(json!({ "error": kind, "message": message.into() }))
}

fn verdict_failure(err: VerdictError) -> Failure {
    let message = err.to_string();
    let mut v = match &err {
        VerdictError::Ramification(r) => serde_json::to_value(r).unwrap_or_else(|_| json!({})),
        VerdictError::Order(_) => json!({ "error": "Order" }),
        VerdictError::Pattern(_) => json!({ "error": "Pattern" }),
        VerdictError::Inconsistent(_) => json!({ "error": "Inconsistent" }),
    };
    v["message"] = json!(message);
    Failure::Validation(v)
}

fn validated(tuple: &Tuple) -> Result<RamificationData, Failure> {
    let closure = Closure::from(tuple.closure);
    if closure == Closure::Cyclic && !tuple.totally_ramified {
        return Err(validation(
            "Unsupported",
            "cyclic data is always totally ramified",
        ));
    }
    validate(tuple.p, tuple.e, tuple.t, closure, tuple.totally_ramified)
        .map_err(|e| verdict_failure(VerdictError::Ramification(e)))
}

fn record(rd: &RamificationData) -> Result<SurveyRecord, VerdictError> {
    let v = verdict(rd.p, rd.e, rd.t, rd.closure, rd.totally_ramified)?;
    Ok(SurveyRecord::from_verdict(&v, rd))
}

fn to_json<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("records serialize")
}

fn cmd_verdict(tuple: &Tuple, format: RecordFormat) -> Result<(), Failure> {
    let rd = validated(tuple)?;
    let rec = record(&rd).map_err(verdict_failure)?;
    match format {
        RecordFormat::Json => println!("{}", to_json(&rec)),
        RecordFormat::Text => println!("{}", rec.text()),
    }
    Ok(())
}

#[derive(Serialize)]
struct OrderRecord {
    #[serde(flatten)]
    rd: RamificationData,
    #[serde(skip_serializing_if = "Option::is_none")]
    band: Option<CaseTag>,
    orders_equal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    nu: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<Vec<u64>>,
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    e_set: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d_max: Option<BTreeMap<usize, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ring: Option<RingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaffold_c: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaffold_l: Option<u64>,
}

fn cmd_order(tuple: &Tuple) -> Result<(), Failure> {
    let rd = validated(tuple)?;
    let prof = OrderProfile::new(&rd).ok();
    let dihedral = prof.as_ref().is_some_and(|_| rd.is_dihedral_totram());
    let rec = OrderRecord {
        rd,
        band: classify(&rd).ok(),
        orders_equal: orders_equal(&rd),
        nu: prof.as_ref().map(|p| p.nu.clone()),
        n: prof.as_ref().map(|p| p.n.clone()),
        e_set: prof.as_ref().map(|p| p.e_set.to_vec()),
        d_max: prof
            .as_ref()
            .filter(|_| dihedral)
            .map(|p| p.d_max_table.clone()),
        ring: ring_conditions(&rd).ok(),
        scaffold_c: prof.as_ref().and_then(|p| p.scaffold).map(|s| s.c),
        scaffold_l: prof.as_ref().and_then(|p| p.scaffold).map(|s| s.l),
    };
    println!("{}", to_json(&rec));
    Ok(())
}

fn cmd_cf(x: u64, p: u64) -> Result<(), Failure> {
    if !is_odd_prime(p) {
        return Err(validation(
            "NotOddPrime",
            format!("{p} is not an odd prime"),
        ));
    }
    let a = x % p;
    let cf = cf_expand(a, p).map_err(|e| validation("Cf", e.to_string()))?;
    let mut partials = cf.partials().to_vec();
    partials[0] = x / p;
    let e_set = if a == 0 {
        None
    } else {
        e_set_bruteforce(a, p).ok().map(|e| e.to_vec())
    };
    let mut out = json!({
        "x": x,
        "p": p,
        "a": a,
        "cf": partials,
        "length": cf.length(),
        "q": cf.qs(),
    });
    if let Some(e) = e_set {
        out["E"] = json!(e);
    }
    println!("{}", to_json(&out));
    Ok(())
}

fn survey_variants(closure: SurveyClosure, tr: TotRam) -> Vec<(Closure, bool)> {
    let dihedral = match tr {
        TotRam::True => vec![(Closure::Dihedral, true)],
        TotRam::False => vec![(Closure::Dihedral, false)],
        TotRam::Both => vec![(Closure::Dihedral, true), (Closure::Dihedral, false)],
    };
    let cyclic = vec![(Closure::Cyclic, true)];
    match closure {
        SurveyClosure::Dihedral => dihedral,
        SurveyClosure::Cyclic => cyclic,
        SurveyClosure::All => dihedral.into_iter().chain(cyclic).collect(),
    }
}

/// Records for every valid jump, ordered by `(p, e, t)` and then by variant.
pub fn survey_records(
    primes: &[u64],
    e_max: u64,
    variants: &[(Closure, bool)],
) -> Result<Vec<SurveyRecord>, VerdictError> {
    let jobs: Vec<(u64, u64, usize)> = primes
        .iter()
        .flat_map(|&p| (1..=e_max).flat_map(move |e| (0..variants.len()).map(move |v| (p, e, v))))
        .collect();
    let batches: Vec<Vec<SurveyRecord>> = jobs
        .par_iter()
        .map(|&(p, e, v)| {
            let (closure, tr) = variants[v];
            valid_jumps(p, e, closure, tr).iter().map(record).collect()
        })
        .collect::<Result<_, _>>()?;
    let mut keyed: Vec<((u64, u64, u64, usize), SurveyRecord)> = batches
        .into_iter()
        .flatten()
        .map(|r| {
            let v = variants
                .iter()
                .position(|&x| x == (r.closure, r.totally_ramified))
                .unwrap_or(0);
            ((r.p, r.e, r.t, v), r)
        })
        .collect();
    keyed.sort_by_key(|(k, _)| *k);
    Ok(keyed.into_iter().map(|(_, r)| r).collect())
}

fn write_survey(
    records: &[SurveyRecord],
    format: SurveyFormat,
    sink: Box<dyn Write>,
) -> io::Result<()> {
    let mut sink = BufWriter::new(sink);
    match format {
        SurveyFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, records)?;
            writeln!(sink)?;
        }
        SurveyFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            w.write_record(CSV_HEADER)?;
            for r in records {
                w.write_record(r.csv_row())?;
            }
            w.flush()?;
        }
    }
    sink.flush()
}

fn cmd_survey(
    p_list: Option<Vec<u64>>,
    p_max: Option<u64>,
    e_max: u64,
    format: SurveyFormat,
    out: Option<PathBuf>,
    closure: SurveyClosure,
    tr: TotRam,
) -> Result<(), Failure> {
    let primes = match (p_list, p_max) {
        (Some(list), _) => {
            if let Some(bad) = list.iter().find(|&&p| !is_odd_prime(p)) {
                return Err(validation(
                    "NotOddPrime",
                    format!("{bad} is not an odd prime"),
                ));
            }
            let mut list = list;
            list.sort_unstable();
            list.dedup();
            list
        }
        (None, Some(max)) => odd_primes_in(3, max + 1),
        (None, None) => {
            return Err(validation(
                "Usage",
                "one of --p-list or --p-max is required",
            ))
        }
    };
    let records =
        survey_records(&primes, e_max, &survey_variants(closure, tr)).map_err(verdict_failure)?;
    let sink: Box<dyn Write> = match &out {
        Some(path) => Box::new(
            File::create(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout()),
    };
    write_survey(&records, format, sink).map_err(|e| Failure::Io(e.to_string()))
}

fn cmd_verify(
    suite: verify::Suite,
    max_p: u64,
    seed: u64,
    format: RecordFormat,
) -> Result<(), Failure> {
    let checks = verify::run(suite, max_p, seed);
    match format {
        RecordFormat::Json => println!("{}", to_json(&checks)),
        RecordFormat::Text => {
            for c in &checks {
                println!("{c}");
            }
        }
    }
    if checks.iter().all(|c| c.pass) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Verdict { tuple, format } => cmd_verdict(&tuple, format),
        Cmd::Order { tuple } => cmd_order(&tuple),
        Cmd::Cf { x, p } => cmd_cf(x, p),
        Cmd::Survey {
            p_list,
            p_max,
            e_max,
            format,
            out,
            closure,
            totally_ramified,
        } => cmd_survey(p_list, p_max, e_max, format, out, closure, totally_ramified),
        Cmd::Verify {
            suite,
            max_p,
            seed,
            format,
        } => cmd_verify(suite, max_p, seed, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
