//! The verification batteries behind each CLI subcommand.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use conductor_core::annulus::{count_zeros, ktheory_check};
use conductor_core::covers::CoverSpec;
use conductor_core::error::{CoreError, CoreResult};
use conductor_core::field::FieldElem;
use conductor_core::fq::{Fq, FqElem};
use conductor_core::laurent::LaurentPoly;
use conductor_core::plfun::PLFun;
use conductor_core::ramify::{discriminant_fun, verify_theorem, CheckResult, CheckStatus};
use conductor_core::rat::Rat;
use serde::Deserialize;

use crate::report::{CharacterReport, PieceReport, Report, ReportStatus, ZeroCase};
use crate::scenario::{parse_poly, Scenario};
use crate::svg::render_plfun;

#[derive(Clone, Debug)]
pub struct CmdOptions {
    pub precision: Option<i64>,
    pub svg: bool,
    pub out_dir: Option<PathBuf>,
    /// Sample pairs per piece boundary in the slope-difference battery.
    pub grid: usize,
    pub fuzz: u64,
    pub seed: u64,
    pub threads: usize,
    pub update_golden: bool,
}

impl Default for CmdOptions {
    fn default() -> Self {
        CmdOptions {
            precision: None,
            svg: false,
            out_dir: None,
            grid: 5,
            fuzz: 0,
            seed: 0xC0FFEE,
            threads: 1,
            update_golden: false,
        }
    }
}

fn piece_reports(cover: &CoverSpec) -> CoreResult<Vec<PieceReport>> {
    Ok(cover
        .decompose()?
        .iter()
        .map(|p| PieceReport {
            interval: (p.interval.0.to_string(), p.interval.1.to_string()),
            delta_f: p.delta_f,
            components: p.components.iter().map(|c| (c.order, c.derivative_order)).collect(),
            sigma: p.sigma(),
        })
        .collect())
}

fn character_battery(
    cover: &CoverSpec,
    scenario: &Scenario,
    grid: usize,
) -> CoreResult<Vec<CharacterReport>> {
    let chars = cover.group.characters();
    let indices = scenario.character_indices(chars.len())?;
    let mut out = Vec::new();
    for i in indices {
        let rep = verify_theorem(cover, &chars[i], grid)?;
        out.push(CharacterReport {
            index: i,
            sw_fun: rep.sw_fun.clone(),
            phi_vals: rep
                .phi_vals
                .iter()
                .map(|(t, v)| (t.to_string(), v.to_string()))
                .collect(),
            convex: rep.convexity_check,
            integer_slopes: rep.integer_slope_check,
            checks: rep.checks,
            ledger: rep.ledger,
        });
    }
    Ok(out)
}

fn discriminant_battery(cover: &CoverSpec) -> CoreResult<(PLFun, Vec<CheckResult>)> {
    let disc = discriminant_fun(cover)?;
    let mut checks = Vec::new();
    for piece in cover.decompose()? {
        let mid = &(&piece.interval.0 + &piece.interval.1) / &Rat::int(2);
        let slope = disc.right_deriv(&mid).or_else(|_| disc.left_deriv(&mid))?;
        let lutke = piece.sigma() - cover.degree() as i64 + piece.delta_f as i64;
        let ok = slope == Rat::int(lutke);
        checks.push(CheckResult {
            name: "lutkebohmert-slope".into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            lhs: slope.to_string(),
            rhs: lutke.to_string(),
            witness: format!("piece ({}, {})", piece.interval.0, piece.interval.1),
        });
    }
    // convexity is asserted for etale covers; all abelian kinds in scope are
    // etale, a monic cover is etale when its discriminant has no zeros on the
    // closed annulus
    let etale = match &cover.kind {
        conductor_core::covers::CoverKind::Monic { coeffs } => {
            let yp = conductor_core::laurent::YPoly::new(cover.fq(), coeffs.clone())?;
            let d = yp.discriminant_resultant()?;
            count_zeros(&d, (&cover.interval.0, &cover.interval.1)).map(|n| n == 0)?
        }
        _ => true,
    };
    checks.push(CheckResult {
        name: "discriminant-convex".into(),
        status: if !etale {
            CheckStatus::NotComputed
        } else if disc.is_convex() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        lhs: format!("{} segments", disc.slopes().len()),
        rhs: String::new(),
        witness: if etale { String::new() } else { "cover not etale on the closed annulus".into() },
    });
    Ok((disc, checks))
}

fn emit_svg(opts: &CmdOptions, name: &str, f: &PLFun, title: &str) -> CoreResult<()> {
    if !opts.svg {
        return Ok(());
    }
    let dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CoreError::Scenario(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(format!("{name}.svg"));
    std::fs::write(&path, render_plfun(f, title))
        .map_err(|e| CoreError::Scenario(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

/// `swan`: the theorem battery for every selected character.
pub fn cmd_swan(scenario: &Scenario, opts: &CmdOptions) -> CoreResult<Report> {
    let cover = scenario.build_cover(opts.precision)?;
    if !cover.is_abelian() {
        return Err(CoreError::Scenario(
            "swan needs an abelian cover kind (kummer, artin-schreier, compositum)".into(),
        ));
    }
    let mut report = Report::new(&scenario.id, "swan");
    report.pieces = piece_reports(&cover)?;
    report.characters = character_battery(&cover, scenario, opts.grid)?;
    for c in &report.characters {
        emit_svg(
            opts,
            &format!("{}-sw-chi{}", scenario.id, c.index),
            &c.sw_fun,
            &format!("sw({}, chi_{})", scenario.id, c.index),
        )?;
    }
    check_expected_sw(scenario, &mut report)?;
    report.record_failures();
    Ok(report)
}

fn check_expected_sw(scenario: &Scenario, report: &mut Report) -> CoreResult<()> {
    let Some(expected) = &scenario.expected else {
        return Ok(());
    };
    if let Some(golden) = &expected.sw_json {
        let Some(c) = report.characters.iter().find(|c| c.index > 0) else {
            return Ok(());
        };
        let got = serde_json::to_string(&c.sw_fun).expect("sw serialization");
        let ok = &got == golden;
        report.checks.push(CheckResult {
            name: "golden-sw".into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            lhs: got,
            rhs: golden.clone(),
            witness: format!("character {}", c.index),
        });
    }
    Ok(())
}

/// `discriminant`: the discriminant function with slope and convexity checks.
pub fn cmd_discriminant(scenario: &Scenario, opts: &CmdOptions) -> CoreResult<Report> {
    let cover = scenario.build_cover(opts.precision)?;
    let mut report = Report::new(&scenario.id, "discriminant");
    report.pieces = piece_reports(&cover)?;
    let (disc, checks) = discriminant_battery(&cover)?;
    emit_svg(
        opts,
        &format!("{}-discriminant", scenario.id),
        &disc,
        &format!("discriminant({})", scenario.id),
    )?;
    if let Some(expected) = &scenario.expected {
        if let Some(golden) = &expected.discriminant_json {
            let got = serde_json::to_string(&disc).expect("disc serialization");
            let ok = &got == golden;
            report.checks.push(CheckResult {
                name: "golden-discriminant".into(),
                status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
                lhs: got,
                rhs: golden.clone(),
                witness: String::new(),
            });
        }
    }
    report.discriminant = Some(disc);
    report.checks.extend(checks);
    report.record_failures();
    Ok(report)
}

/// `decompose`: piece data only.
pub fn cmd_decompose(scenario: &Scenario, opts: &CmdOptions) -> CoreResult<Report> {
    let cover = scenario.build_cover(opts.precision)?;
    let mut report = Report::new(&scenario.id, "decompose");
    report.pieces = piece_reports(&cover)?;
    report.record_failures();
    Ok(report)
}

/// Zeros document: a Laurent polynomial and a closed interval.
#[derive(Debug, Deserialize)]
pub struct ZerosDoc {
    pub id: String,
    pub q: u64,
    pub interval: (String, String),
    pub poly: std::collections::BTreeMap<String, String>,
}

impl ZerosDoc {
    pub fn load(path: &Path) -> CoreResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CoreError::Scenario(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CoreError::Scenario(format!("bad zeros doc: {e}")))
    }
}

/// `zeros`: the zero-counting identity on a document and/or fuzz cases.
pub fn cmd_zeros(doc: Option<&ZerosDoc>, opts: &CmdOptions) -> CoreResult<Report> {
    let mut report = Report::new(
        doc.map(|d| d.id.as_str()).unwrap_or("fuzz"),
        "zeros",
    );
    if let Some(d) = doc {
        let fq = Fq::new(d.q)?;
        let poly = parse_poly(&fq, &d.poly)?;
        let a: Rat = d.interval.0.parse().map_err(CoreError::Scenario)?;
        let b: Rat = d.interval.1.parse().map_err(CoreError::Scenario)?;
        let chk = ktheory_check(&poly, (&a, &b))?;
        report.zero_cases.push(ZeroCase {
            label: "document".into(),
            interval: (a.to_string(), b.to_string()),
            lhs: chk.lhs,
            rhs: chk.rhs,
            ok: chk.ok,
        });
    }
    if opts.fuzz > 0 {
        report.zero_cases.extend(fuzz_zero_cases(opts.fuzz, opts.seed)?);
    }
    report.record_failures();
    Ok(report)
}

/// Deterministic split-mix generator; the seed comes from CONDUCTOR_LAB_SEED.
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// Random products of (xi - a_i) with root valuations on the half-integer
/// lattice in [-2, 4] over closed intervals with thirds endpoints, so roots
/// never sit exactly on a boundary circle.
pub fn fuzz_zero_cases(n: u64, seed: u64) -> CoreResult<Vec<ZeroCase>> {
    let fq = Fq::new(5)?;
    let mut rng = SplitMix64(seed);
    let mut out = Vec::new();
    for case in 0..n {
        let k = 1 + rng.below(4);
        let mut roots: Vec<Rat> = Vec::new();
        let mut poly = LaurentPoly::one(&fq);
        for i in 0..k {
            let v = Rat::new(rng.below(13) as i64 - 4, 2); // [-2, 4] by halves
            let c = FqElem::from_int(&fq, 1 + (i as i64 % 4));
            let root = FieldElem::monomial(&fq, c, v.clone());
            poly = poly.mul(&LaurentPoly::xi(&fq).sub(&LaurentPoly::monomial(&fq, root, 0)));
            roots.push(v);
        }
        // a monomial unit shift leaves every zero count unchanged
        let shift = rng.below(7) as i64 - 3;
        poly = poly.mul(&LaurentPoly::monomial(&fq, FieldElem::one(&fq), shift));
        // lower endpoint n/3 with 3 never dividing n, width a positive third
        let mut lo = rng.below(16) as i64 - 8;
        if lo % 3 == 0 {
            lo += 1;
        }
        let a = Rat::new(lo, 3);
        let b = &a + &Rat::new(1 + rng.below(12) as i64, 3);
        let expected = roots.iter().filter(|v| **v >= a && **v <= b).count() as i64;
        let chk = ktheory_check(&poly, (&a, &b))?;
        out.push(ZeroCase {
            label: format!("case-{case}"),
            interval: (a.to_string(), b.to_string()),
            lhs: chk.lhs,
            rhs: chk.rhs,
            ok: chk.ok && chk.lhs == expected,
        });
    }
    Ok(out)
}

/// Runs the full battery for a corpus scenario: decomposition, discriminant
/// checks, and the theorem battery per selected character.
pub fn run_scenario_battery(scenario: &Scenario, opts: &CmdOptions) -> CoreResult<Report> {
    let cover = scenario.build_cover(opts.precision)?;
    let mut report = Report::new(&scenario.id, "corpus");
    report.pieces = piece_reports(&cover)?;
    let (disc, checks) = discriminant_battery(&cover)?;
    report.discriminant = Some(disc);
    report.checks.extend(checks);
    if cover.is_abelian() {
        report.characters = character_battery(&cover, scenario, opts.grid)?;
    }
    check_expected_sw(scenario, &mut report)?;
    report.record_failures();
    Ok(report)
}

pub struct CorpusOutcome {
    /// (scenario id, passed, detail), sorted by id.
    pub results: Vec<(String, bool, String)>,
    /// Concatenated report JSON keyed by id, for determinism checks.
    pub reports: Vec<(String, String)>,
    pub exit_code: i32,
}

/// `corpus`: runs every scenario file in a directory (in parallel), compares
/// against golden reports byte-exactly, and writes a JUnit summary.
pub fn cmd_corpus(dir: &Path, opts: &CmdOptions) -> CorpusOutcome {
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Err(e) => {
            return CorpusOutcome {
                results: vec![(dir.display().to_string(), false, format!("unreadable dir: {e}"))],
                reports: Vec::new(),
                exit_code: 3,
            }
        }
        Ok(rd) => rd
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().and_then(|s| s.to_str()) == Some("toml"))
            .collect(),
    };
    files.sort();
    if files.is_empty() {
        eprintln!("warning: no scenario files in {}", dir.display());
        return CorpusOutcome {
            results: Vec::new(),
            reports: Vec::new(),
            exit_code: 0,
        };
    }

    let golden_dir = dir.join("golden");
    let opts_arc = Arc::new(opts.clone());
    let n_threads = opts.threads.max(1).min(files.len());
    let files = Arc::new(std::sync::Mutex::new(files.into_iter().enumerate().collect::<Vec<_>>()));
    let results = Arc::new(std::sync::Mutex::new(Vec::<(String, bool, String, String)>::new()));
    let mut scenario_error = false;

    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for _ in 0..n_threads {
            let files = files.clone();
            let results = results.clone();
            let opts = opts_arc.clone();
            let golden_dir = golden_dir.clone();
            handles.push(scope.spawn(move || {
                loop {
                    let job = { files.lock().unwrap().pop() };
                    let Some((_, path)) = job else { break };
                    let outcome = run_corpus_file(&path, &opts, &golden_dir);
                    results.lock().unwrap().push(outcome);
                }
            }));
        }
        for h in handles {
            let _ = h.join();
        }
    });

    let mut collected = Arc::try_unwrap(results).unwrap().into_inner().unwrap();
    collected.sort_by(|a, b| a.0.cmp(&b.0));
    // scenario ids must be unique in a corpus directory
    for i in 1..collected.len() {
        if collected[i].0 == collected[i - 1].0 {
            collected[i].1 = false;
            collected[i].2 = format!("scenario error: duplicate id `{}`", collected[i].0);
        }
    }
    for (_, ok, detail, _) in &collected {
        if !ok && detail.starts_with("scenario error") {
            scenario_error = true;
        }
    }
    let any_fail = collected.iter().any(|(_, ok, _, _)| !ok);
    let exit_code = if scenario_error {
        3
    } else if any_fail {
        2
    } else {
        0
    };

    if let Some(out_dir) = &opts.out_dir {
        let _ = std::fs::create_dir_all(out_dir);
        for (id, _, _, json) in &collected {
            if !json.is_empty() {
                let _ = std::fs::write(out_dir.join(format!("{id}.json")), json);
            }
        }
        let summary: Vec<(String, bool, String)> = collected
            .iter()
            .map(|(id, ok, d, _)| (id.clone(), *ok, d.clone()))
            .collect();
        let _ = crate::report::write_junit(&out_dir.join("corpus-junit.xml"), &summary);
    }

    CorpusOutcome {
        results: collected
            .iter()
            .map(|(id, ok, d, _)| (id.clone(), *ok, d.clone()))
            .collect(),
        reports: collected
            .into_iter()
            .map(|(id, _, _, json)| (id, json))
            .collect(),
        exit_code,
    }
}

fn run_corpus_file(path: &Path, opts: &CmdOptions, golden_dir: &Path) -> (String, bool, String, String) {
    let label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario")
        .to_string();
    let scenario = match Scenario::load(path) {
        Ok(s) => s,
        Err(e) => {
            return (
                label,
                false,
                format!("scenario error in {}: {e}", path.display()),
                String::new(),
            )
        }
    };
    let report = match run_scenario_battery(&scenario, opts) {
        Ok(r) => r,
        Err(e) => {
            return (
                scenario.id.clone(),
                false,
                format!("scenario error in {}: {e}", path.display()),
                String::new(),
            )
        }
    };
    let json = report.to_json();
    let mut ok = report.status == ReportStatus::Pass;
    let mut detail = if ok { String::new() } else { "checks failed".to_string() };
    let golden_path = golden_dir.join(format!("{}.json", scenario.id));
    if opts.update_golden {
        let _ = std::fs::create_dir_all(golden_dir);
        let _ = std::fs::write(&golden_path, &json);
    } else if golden_path.exists() {
        match std::fs::read_to_string(&golden_path) {
            Ok(golden) if golden == json => {}
            Ok(_) => {
                ok = false;
                detail = format!("report differs from golden {}", golden_path.display());
            }
            Err(e) => {
                ok = false;
                detail = format!("cannot read golden: {e}");
            }
        }
    } else {
        eprintln!("warning: no golden report for {}", scenario.id);
    }
    (scenario.id.clone(), ok, detail, json)
}
