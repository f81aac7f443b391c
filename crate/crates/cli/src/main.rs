//! Batch command-line surface: symbol-space construction, L-function
//! pipelines with interpolation reports, Iwasawa invariants of serialized
//! elements, and weight-direction gluing. Every run emits a provenance
//! block with the profile and the pinned conventions; machine output is
//! deterministic byte-for-byte for identical inputs.
//!
//! Exit codes: 0 success, 1 hard verification failure, 2 input error,
//! 3 precondition failure, 4 precision-indeterminate.

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use padiclf::family::{glue_family_lp, specialize_family, WeightDisc};
use padiclf::formats::{
    FamilyFixtureRecord, InterpolationRecord, LambdaRecord, LpRecord, Provenance,
    QExpansionFixture, SpaceRecord, TwoVarRecord,
};
use padiclf::iwasawa::{mu_lambda, LambdaCycElement};
use padiclf::modsym::{
    build_space, find_eigensymbol, p_stabilize, DirichletNebentypus, RootChoice, StabilizedForm,
    SymbolSpace,
};
use padiclf::padic::PadicCharacter;
use padiclf::plfn::{
    build_lp_finite_slope, build_lp_ordinary, check_interpolation, LpBody, PadicLFunction, Verdict,
};
use padiclf::PrecisionProfile;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_HARD_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_INDETERMINATE: u8 = 4;

#[derive(Parser)]
#[command(name = "padiclf", about = "exact p-adic L-function pipelines", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportMode {
    Table,
    Record,
}

#[derive(Clone, Copy, ValueEnum)]
enum RootSel {
    Small,
    Large,
}

#[derive(Clone, Copy, ValueEnum)]
enum LpMode {
    Ordinary,
    Slope,
}

#[derive(Args, Clone)]
struct ProfileArgs {
    /// odd prime p
    #[arg(long, default_value_t = 3)]
    p: u64,
    /// additive precision: work modulo p^prec
    #[arg(long, default_value_t = 40)]
    prec: u32,
    /// truncation degree for power series
    #[arg(long = "series-cap", default_value_t = 96)]
    series_cap: usize,
}

impl ProfileArgs {
    fn profile(&self) -> Result<PrecisionProfile> {
        PrecisionProfile::new(self.p, self.prec, self.series_cap).map_err(|e| anyhow!("{e}"))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Build the Manin symbol space and report its dimensions
    Msspace {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        weight: u64,
        #[arg(long, default_value = "trivial")]
        character: String,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportMode::Table)]
        report: ReportMode,
    },
    /// Build a p-adic L-function from a q-expansion fixture and verify its
    /// interpolation over a (j, character) grid
    Lp {
        /// q-expansion fixture (JSON)
        #[arg(long)]
        fixture: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, value_enum, default_value_t = RootSel::Small)]
        root: RootSel,
        #[arg(long, value_enum)]
        mode: LpMode,
        /// logarithmic growth order for the finite-slope mode
        #[arg(long)]
        h: Option<u32>,
        /// deepest Mazur-Tate layer
        #[arg(long, default_value_t = 4)]
        nmax: u32,
        /// largest character conductor exponent in the report grid
        #[arg(long = "max-cond-exp", default_value_t = 2)]
        max_cond_exp: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportMode::Table)]
        report: ReportMode,
    },
    /// mu/lambda invariants per branch of a serialized element
    Invariants {
        /// L-function record or bare semi-local element (JSON)
        #[arg(long)]
        lp: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, value_enum, default_value_t = ReportMode::Table)]
        report: ReportMode,
    },
    /// Glue per-weight L-function files over the weight disc of a family
    /// fixture
    Glue {
        /// family fixture (JSON) carrying p, k0, r
        #[arg(long)]
        fixture: PathBuf,
        /// per-weight inputs as k=path, repeatable
        #[arg(long = "lp", value_parser = parse_node)]
        lps: Vec<(i64, PathBuf)>,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportMode::Table)]
        report: ReportMode,
    },
}

fn parse_node(s: &str) -> Result<(i64, PathBuf), String> {
    let (k, path) = s.split_once('=').ok_or_else(|| format!("expected k=path, got {s}"))?;
    let k = k.parse::<i64>().map_err(|e| e.to_string())?;
    Ok((k, PathBuf::from(path)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn write_out(out: &Option<PathBuf>, payload: &str) -> Result<()> {
    if let Some(path) = out {
        std::fs::write(path, payload).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Msspace { level, weight, character, profile, out, report } => {
            if character != "trivial" {
                eprintln!("error: only the trivial character is supported");
                return Ok(ExitCode::from(EXIT_INPUT));
            }
            let prof = profile.profile()?;
            let space = match build_space(level, weight, DirichletNebentypus::Trivial) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(EXIT_INPUT));
                }
            };
            let rec = SpaceRecord::of(&space);
            let payload = serde_json::to_string_pretty(&serde_json::json!({
                "provenance": Provenance::new(&prof),
                "space": rec,
            }))?;
            write_out(&out, &payload)?;
            match report {
                ReportMode::Record => println!("{payload}"),
                ReportMode::Table => {
                    println!("level {level} weight {weight} character trivial");
                    println!("  quotient dimension   {}", rec.dim);
                    println!("  cuspidal dimension   {}", rec.cuspidal_dim);
                    println!("  relation rank        {}", rec.relation_rank);
                    println!("  projective line size {}", rec.p1_size);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Lp { fixture, profile, root, mode, h, nmax, max_cond_exp, out, report } => {
            let prof = profile.profile()?;
            let fx: QExpansionFixture = serde_json::from_str(
                &std::fs::read_to_string(&fixture)
                    .with_context(|| format!("reading {}", fixture.display()))?,
            )?;
            if fx.character != "trivial" {
                eprintln!("error: only the trivial character is supported");
                return Ok(ExitCode::from(EXIT_INPUT));
            }
            let (form, space) = match prepare_form(&fx, &prof, root) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return Ok(ExitCode::from(EXIT_INPUT));
                }
            };
            let lp = match mode {
                LpMode::Ordinary => build_lp_ordinary(&form, &space, nmax, &prof),
                LpMode::Slope => {
                    let h = h.unwrap_or(form.slope.max(0) as u32);
                    build_lp_finite_slope(&form, &space, h, nmax, &prof)
                }
            };
            let lp = match lp {
                Ok(lp) => lp,
                Err(e) => {
                    eprintln!("refused: {e}");
                    return Ok(ExitCode::from(EXIT_PRECONDITION));
                }
            };
            let reports = interpolation_grid(&lp, &form, &space, max_cond_exp, &prof)?;
            let lp_rec =
                LpRecord::of_body(&lp.body, lp.layer, lp.slope, lp.weight, &lp.depleted_at, &prof);
            let payload = serde_json::to_string_pretty(&serde_json::json!({
                "lp": lp_rec,
                "interpolation": reports.iter().map(InterpolationRecord::of).collect::<Vec<_>>(),
            }))?;
            write_out(&out, &payload)?;
            match report {
                ReportMode::Record => println!("{payload}"),
                ReportMode::Table => {
                    println!("{} at p={}: slope {}, layer {}", fx.label, prof.p, lp.slope, lp.layer);
                    println!("  j  tame wild      certified verdict");
                    for r in &reports {
                        println!(
                            "  {:<2} {:<4} {}^{:<5} {:>8}  {}",
                            r.j,
                            r.tame,
                            r.wild_level,
                            r.wild_exp,
                            r.certified,
                            match r.verdict {
                                Verdict::Pass => "pass",
                                Verdict::Fail => "FAIL",
                                Verdict::Indeterminate => "indeterminate",
                            }
                        );
                    }
                }
            }
            let any_fail = reports.iter().any(|r| r.verdict == Verdict::Fail);
            let any_indet = reports.iter().any(|r| r.verdict == Verdict::Indeterminate);
            if any_fail {
                return Ok(ExitCode::from(EXIT_HARD_FAIL));
            }
            if any_indet {
                eprintln!("note: some verdicts are precision-indeterminate");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Invariants { lp, profile, report } => {
            let prof = profile.profile()?;
            let text = std::fs::read_to_string(&lp)
                .with_context(|| format!("reading {}", lp.display()))?;
            let element = parse_element(&text, &prof)?;
            let ml = mu_lambda(&element, &prof);
            let payload = serde_json::to_string_pretty(&serde_json::json!({
                "provenance": Provenance::new(&prof),
                "mu_lambda": ml,
            }))?;
            match report {
                ReportMode::Record => println!("{payload}"),
                ReportMode::Table => {
                    for (i, e) in ml.iter().enumerate() {
                        match e {
                            Some((mu, lambda)) => println!("branch {i}: mu = {mu}, lambda = {lambda}"),
                            None => println!("branch {i}: zero at precision"),
                        }
                    }
                }
            }
            if ml.iter().any(|e| e.is_none()) {
                return Ok(ExitCode::from(EXIT_INDETERMINATE));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Glue { fixture, lps, profile, out, report } => {
            let prof = profile.profile()?;
            let fx: FamilyFixtureRecord = serde_json::from_str(
                &std::fs::read_to_string(&fixture)
                    .with_context(|| format!("reading {}", fixture.display()))?,
            )?;
            if fx.p != prof.p {
                eprintln!("error: fixture p = {} but profile p = {}", fx.p, prof.p);
                return Ok(ExitCode::from(EXIT_INPUT));
            }
            let disc = WeightDisc { p: fx.p, k0: fx.k0, r: fx.r };
            let mut bodies = Vec::new();
            for (k, path) in &lps {
                let rec: LpRecord = serde_json::from_str(
                    &std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?,
                )?;
                bodies.push((*k, rec.to_body(&prof).map_err(|e| anyhow!("{e}"))?));
            }
            let node_refs: Vec<(i64, &LpBody)> = bodies.iter().map(|(k, b)| (*k, b)).collect();
            let two = match glue_family_lp(&disc, &node_refs, &prof) {
                Ok(two) => two,
                Err(e) => {
                    eprintln!("refused: {e}");
                    return Ok(ExitCode::from(EXIT_PRECONDITION));
                }
            };
            // node report: specialization at each node must return the input
            let mut node_ok = Vec::new();
            for (k, body) in &bodies {
                let spec = specialize_family(&two, *k, &prof).map_err(|e| anyhow!("{e}"))?;
                node_ok.push((*k, bodies_agree(&spec, body, &prof)));
            }
            let rec = TwoVarRecord::of(&two, &prof);
            let payload = serde_json::to_string_pretty(&serde_json::json!({
                "glued": rec,
                "nodes": node_ok
                    .iter()
                    .map(|(k, ok)| serde_json::json!({"k": k, "round_trip": ok}))
                    .collect::<Vec<_>>(),
            }))?;
            write_out(&out, &payload)?;
            match report {
                ReportMode::Record => println!("{payload}"),
                ReportMode::Table => {
                    println!(
                        "glued {} nodes over the disc (k0 = {}, r = {}), certified {} digits",
                        two.ideal.points.len(),
                        fx.k0,
                        fx.r,
                        two.certified_abs_precision
                    );
                    for (k, ok) in &node_ok {
                        println!("  node k = {k}: round trip {}", if *ok { "exact" } else { "FAIL" });
                    }
                }
            }
            if node_ok.iter().any(|(_, ok)| !ok) {
                return Ok(ExitCode::from(EXIT_HARD_FAIL));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_element(text: &str, prof: &PrecisionProfile) -> Result<LambdaCycElement> {
    if let Ok(rec) = serde_json::from_str::<LpRecord>(text) {
        if let Ok(body) = rec.to_body(prof) {
            return Ok(body_to_lambda(body));
        }
    }
    if let Ok(wrap) = serde_json::from_str::<serde_json::Value>(text) {
        if let Some(inner) = wrap.get("lp") {
            let rec: LpRecord = serde_json::from_value(inner.clone())?;
            return Ok(body_to_lambda(rec.to_body(prof).map_err(|e| anyhow!("{e}"))?));
        }
    }
    let rec: LambdaRecord = serde_json::from_str(text)?;
    rec.to_element(prof).map_err(|e| anyhow!("{e}"))
}

fn body_to_lambda(body: LpBody) -> LambdaCycElement {
    match body {
        LpBody::Ordinary(e) => e,
        LpBody::FiniteSlope { element, .. } => element.to_lambda(),
    }
}

fn bodies_agree(a: &LpBody, b: &LpBody, prof: &PrecisionProfile) -> bool {
    let tbl = |x: &LpBody| -> Vec<Vec<padiclf::padic::PadicScalar>> {
        match x {
            LpBody::Ordinary(e) => e.branches.iter().map(|s| s.coeffs.clone()).collect(),
            LpBody::FiniteSlope { element, .. } => {
                element.branches.iter().map(|s| s.coeffs.clone()).collect()
            }
        }
    };
    let (ta, tb) = (tbl(a), tbl(b));
    ta.len() == tb.len()
        && ta.iter().zip(tb.iter()).all(|(ra, rb)| {
            ra.len() == rb.len() && ra.iter().zip(rb.iter()).all(|(x, y)| x.eq_at_precision(y, prof))
        })
}

/// Builds the space and cuts out the eigen-symbol pair using the fixture's
/// eigenvalues, adding primes until both signs separate, then stabilizes.
fn prepare_form(
    fx: &QExpansionFixture,
    prof: &PrecisionProfile,
    root: RootSel,
) -> Result<(StabilizedForm, SymbolSpace)> {
    let space =
        build_space(fx.level, fx.weight, DirichletNebentypus::Trivial).map_err(|e| anyhow!("{e}"))?;
    let primes = [2u64, 3, 5, 7, 11, 13, 17, 19];
    let mut eigen = Vec::new();
    let mut found = None;
    for ell in primes {
        if fx.level % ell == 0 || ell == prof.p {
            continue;
        }
        let a = fx
            .eigenvalue(ell)
            .map_err(|e| anyhow!("{e}"))?
            .ok_or_else(|| anyhow!("fixture lacks a_{ell}"))?;
        eigen.push((ell, a));
        match (find_eigensymbol(&space, &eigen, 1), find_eigensymbol(&space, &eigen, -1)) {
            (Ok(p), Ok(m)) => {
                found = Some((p, m));
                break;
            }
            _ => continue,
        }
    }
    let (mut plus, mut minus) =
        found.ok_or_else(|| anyhow!("could not separate the eigen-symbol"))?;
    let ap = fx
        .eigenvalue(prof.p)
        .map_err(|e| anyhow!("{e}"))?
        .ok_or_else(|| anyhow!("fixture lacks a_p"))?;
    plus.eigenvalues.insert(prof.p, ap.clone());
    minus.eigenvalues.insert(prof.p, ap);
    let which = match root {
        RootSel::Small => RootChoice::SmallSlope,
        RootSel::Large => RootChoice::LargeSlope,
    };
    let form =
        p_stabilize(&plus, &minus, &space, prof.p, which, prof).map_err(|e| anyhow!("{e}"))?;
    Ok((form, space))
}

/// The (j, phi) verification grid: window columns for the finite-slope
/// body, the full critical range for the ordinary one, against every
/// character of conductor exponent up to the requested cap.
fn interpolation_grid(
    lp: &PadicLFunction,
    form: &StabilizedForm,
    space: &SymbolSpace,
    max_cond_exp: u32,
    prof: &PrecisionProfile,
) -> Result<Vec<padiclf::plfn::InterpolationReport>> {
    let (jmin, jmax) = match &lp.body {
        LpBody::Ordinary(_) => (1, lp.weight as i64 - 1),
        LpBody::FiniteSlope { l, l_prime, .. } => (*l, *l_prime),
    };
    let cap = max_cond_exp
        .min(prof.max_cyclo_level())
        .min(lp.layer.saturating_sub(1));
    let mut chars = vec![PadicCharacter::trivial()];
    for tame in 0..(prof.p - 1) as u32 {
        if tame != 0 {
            chars.push(PadicCharacter::finite(tame, 0, 0, prof).map_err(|e| anyhow!("{e}"))?);
        }
        for wl in 1..=cap.saturating_sub(1) {
            for we in 1..prof.p {
                chars
                    .push(PadicCharacter::finite(tame, wl, we, prof).map_err(|e| anyhow!("{e}"))?);
            }
        }
    }
    let mut out = Vec::new();
    for j in jmin..=jmax {
        for phi in &chars {
            out.push(check_interpolation(lp, form, space, j, phi, prof).map_err(|e| anyhow!("{e}"))?);
        }
    }
    Ok(out)
}
