use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use cylindra::algebra::AtomStructureJson;
use cylindra::games::{
    cone_script, network_hypergame, solve_game_with, verify_script, GameConfig, GraphArena, HyperConfig,
    NetworkArena, Variant, Winner, STATE_BUDGET,
};
use cylindra::rablur::{
    basic_matrices_with, blowup_blur_atoms, ca_atoms_from_basis, check_cylindric_basis, check_nblur, BlurSpec,
    BlurSpecJson, FiniteRa, IndexBlur, MATRIX_BUDGET,
};
use cylindra::rainbow::{build_bf, build_bf_with_tints, build_czn, enumerate_atoms_with, ATOM_BUDGET};
use cylindra::repsearch::{
    brute_force_represent, check_m_square, clique_guarded_eval, parse_formula, RepSearch, UnitKind,
};
use cylindra::toposet::{coproduct_decompose, FiniteTopology, TopologyJson};
use cylindra::{check_ca_axioms, check_tca_axioms};

use crate::input::{ra_from, Document};
use crate::manifest::{read_input, RunManifest};
use crate::{Build, Check, Command, Decompose, Eval, GameKind, Global, Outcome, Preset, RaArgs, Represent, Solve};

/// The command's name and its parameters as recorded in the manifest.
pub fn describe(c: &Command) -> (String, Value) {
    let path = |p: &Option<std::path::PathBuf>| p.as_ref().map(|p| p.display().to_string());
    let ra = |r: &RaArgs| json!({ "ra": path(&r.ra), "k": r.k });
    match c {
        Command::Build(b) => match b {
            Build::RainbowBf { n, tints } => ("build rainbow-bf".into(), json!({ "n": n, "tints": tints })),
            Build::RainbowCzn { n, m, with_atoms } => {
                ("build rainbow-czn".into(), json!({ "n": n, "m": m, "with_atoms": with_atoms }))
            }
            Build::Maddux { k } => ("build maddux".into(), json!({ "k": k })),
            Build::Blur(a) => (
                "build blur".into(),
                json!({ "ra": ra(&a.ra), "j": a.j, "rows": a.rows, "preset": preset(a.preset) }),
            ),
            Build::BasisCa { ra: r, n } => ("build basis-ca".into(), json!({ "ra": ra(r), "n": n })),
        },
        Command::Solve(s) => (
            "solve".into(),
            json!({
                "file": s.file.display().to_string(), "game": format!("{:?}", s.game), "m": s.m,
                "rounds": s.rounds, "hyper_len": s.hyper_len, "cone": s.cone,
            }),
        ),
        Command::Check(k) => match k {
            Check::Ca { file } => ("check ca".into(), json!({ "file": file.display().to_string() })),
            Check::Tca { file } => ("check tca".into(), json!({ "file": file.display().to_string() })),
            Check::Nblur { ra: r, j, n } => ("check nblur".into(), json!({ "ra": ra(r), "j": j, "n": n })),
            Check::Basis { ra: r, n } => ("check basis".into(), json!({ "ra": ra(r), "n": n })),
            Check::Msquare { algebra, rep, m } => (
                "check msquare".into(),
                json!({ "algebra": algebra.display().to_string(), "rep": rep.display().to_string(), "m": m }),
            ),
            Check::Represent(r) => ("check represent".into(), represent_params(r)),
        },
        Command::Eval(e) => (
            "eval".into(),
            json!({
                "algebra": e.algebra.display().to_string(), "rep": e.rep.display().to_string(),
                "m": e.m, "formula": e.formula,
            }),
        ),
        Command::Decompose(d) => (
            "decompose".into(),
            json!({ "topology": path(&d.topology), "base": d.base, "parts": d.parts, "n": d.n }),
        ),
        Command::Repsearch(r) => ("repsearch".into(), represent_params(r)),
    }
}

fn represent_params(r: &Represent) -> Value {
    let file = r.file.as_ref().or(r.algebra.as_ref()).map(|p| p.display().to_string());
    json!({ "algebra": file, "max_base": r.max_base, "unit": r.unit, "topological": r.topological })
}

fn preset(p: Preset) -> IndexBlur {
    match p {
        Preset::Distinct => IndexBlur::Distinct,
        Preset::All => IndexBlur::All,
    }
}

pub fn run(c: &Command, g: &Global, m: &mut RunManifest) -> Result<Outcome> {
    match c {
        Command::Build(b) => build(b, g, m),
        Command::Solve(s) => solve(s, g, m),
        Command::Check(k) => check(k, g, m),
        Command::Eval(e) => eval(e, m),
        Command::Decompose(d) => decompose(d, m),
        Command::Repsearch(r) => represent(r, g, m),
    }
}

fn verdict(ok: bool) -> u8 {
    if ok {
        0
    } else {
        2
    }
}

fn build(b: &Build, g: &Global, m: &mut RunManifest) -> Result<Outcome> {
    let atom_budget = g.budget_states.unwrap_or(ATOM_BUDGET);
    let (body, summary) = match b {
        Build::RainbowBf { n, tints } => {
            let sig = match tints {
                Some(t) => build_bf_with_tints(*n, *t)?,
                None => build_bf(*n)?,
            };
            let atoms = enumerate_atoms_with(&sig, atom_budget)?;
            let summary = format!("B_f n={n}: {} atoms", atoms.structure.len());
            (json!({ "signature": sig.to_json(), "atoms": AtomStructureJson::from(&atoms.structure) }), summary)
        }
        Build::RainbowCzn { n, m: width, with_atoms } => {
            let sig = build_czn(*n, *width)?;
            let mut body = json!({ "signature": sig.to_json() });
            let mut summary = format!("C_(Z,N) n={n} truncated at {width}");
            if *with_atoms {
                let atoms = enumerate_atoms_with(&sig, atom_budget)?;
                summary += &format!(": {} atoms", atoms.structure.len());
                body["atoms"] = serde_json::to_value(AtomStructureJson::from(&atoms.structure))?;
            }
            (body, summary)
        }
        Build::Maddux { k } => {
            let r = cylindra::rablur::maddux_ek23(*k)?;
            (json!({ "ra": r.to_json() }), format!("E_{k}(2,3): {} atoms", r.len()))
        }
        Build::Blur(a) => {
            let r = ra_from(m, a.ra.ra.as_deref(), a.ra.k)?;
            let spec = blur_spec(m, &r, &a.j, preset(a.preset), a.rows)?;
            let blown = blowup_blur_atoms(&r, &spec)?;
            let summary = format!("blow-up with {} rows: {} atoms", spec.rows, blown.ra.len());
            (json!({ "ra": blown.ra.to_json(), "blur": spec.to_json(&r) }), summary)
        }
        Build::BasisCa { ra, n } => {
            let r = ra_from(m, ra.ra.as_deref(), ra.k)?;
            let mats = basic_matrices_with(&r, *n, g.budget_states.unwrap_or(MATRIX_BUDGET))?;
            let at = ca_atoms_from_basis(&mats, &r, *n)?;
            let summary = format!("CA_{n} atom structure from {} basic matrices", mats.len());
            (json!({ "atoms": AtomStructureJson::from(&at) }), summary)
        }
    };
    Ok(Outcome { body, code: 0, summary, compact: true })
}

fn blur_spec(m: &mut RunManifest, r: &FiniteRa, j: &str, e: IndexBlur, rows: usize) -> Result<BlurSpec> {
    Ok(match j {
        "whole" => BlurSpec::whole(r, e, rows),
        "singletons" => BlurSpec::singletons(r, e, rows),
        file => {
            let bytes = read_input(m, Path::new(file))?;
            let v: Value = serde_json::from_slice(&bytes).with_context(|| format!("parsing {file}"))?;
            let v = v.get("blur").cloned().unwrap_or(v);
            let spec: BlurSpecJson = serde_json::from_value(v).with_context(|| format!("{file}: bad blur"))?;
            BlurSpec::from_json(r, &spec)?
        }
    })
}

fn game_config(s: &Solve) -> Result<GameConfig> {
    let need_m = || s.m.with_context(|| format!("--game {:?} needs --m", s.game));
    Ok(match s.game {
        GameKind::G => GameConfig::gk(s.rounds),
        GameKind::Gmk => GameConfig::gmk(need_m()?, s.rounds),
        GameKind::BoldG => GameConfig::bold(need_m()?, s.rounds),
        GameKind::Hk => GameConfig {
            variant: Variant::Hk,
            rounds: s.rounds,
            node_bound: None,
            reuse: false,
            hyperedge_len_bound: s.hyper_len,
        },
    })
}

fn solve(s: &Solve, g: &Global, m: &mut RunManifest) -> Result<Outcome> {
    let doc = Document::load(m, &s.file)?;
    let cfg = game_config(s)?;
    let budget = g.budget_states.unwrap_or(STATE_BUDGET);
    let sig = doc.signature()?;
    let mut body = json!({ "game": cfg });
    let result = match (&sig, cfg.variant) {
        (Some(sig), v) if v != Variant::Hk => {
            let arena = GraphArena::new(sig, cfg.limit(sig.n).cap)?;
            if let Some(tints) = &s.cone {
                let report = verify_script(&arena, &cone_script(tints.iter().copied()), &cfg)?;
                let verified = report.verified;
                body["script"] = serde_json::to_value(&report)?;
                if verified {
                    let summary = format!("∀ wins: cone script verified over {} branches", report.branches);
                    return Ok(Outcome { body, code: 2, summary, compact: false });
                }
            }
            solve_game_with(&arena, &cfg, budget)?
        }
        _ => {
            if s.cone.is_some() {
                bail!("cone scripts need a rainbow signature");
            }
            let at = Arc::new(doc.structure()?);
            if cfg.variant == Variant::Hk {
                network_hypergame(at.clone(), &HyperConfig::from_game(&cfg, at.n())?, budget)?
            } else {
                solve_game_with(&NetworkArena::new(at), &cfg, budget)?
            }
        }
    };
    let winner = result.winner;
    body["result"] = serde_json::to_value(&result)?;
    let summary = match winner {
        Winner::Exists => format!("∃ wins {} rounds", cfg.rounds),
        Winner::Forall => format!("∀ wins (decided at round {:?})", result.decided_at),
    };
    Ok(Outcome { body, code: verdict(winner == Winner::Exists), summary, compact: false })
}

fn check(k: &Check, g: &Global, m: &mut RunManifest) -> Result<Outcome> {
    match k {
        Check::Ca { file } | Check::Tca { file } => {
            let a = Document::load(m, file)?.algebra()?;
            let report = match k {
                Check::Ca { .. } => check_ca_axioms(&a)?,
                _ => check_tca_axioms(&a, g.seed)?,
            };
            let failed: Vec<String> = report.failures().map(|f| format!("{} {}", f.axiom, f.instance)).collect();
            let summary = if failed.is_empty() {
                format!("all {} axiom instances hold", report.results.len())
            } else {
                format!("failed: {}", failed.join(", "))
            };
            Ok(Outcome { code: verdict(report.passed()), body: serde_json::to_value(&report)?, summary, compact: false })
        }
        Check::Nblur { ra, j, n } => {
            let r = ra_from(m, ra.ra.as_deref(), ra.k)?;
            let spec = blur_spec(m, &r, j, IndexBlur::Distinct, 1)?;
            let report = check_nblur(&r, &spec.j, *n)?;
            let failed: Vec<&str> = report.conditions.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
            let summary = if failed.is_empty() {
                format!("{n}-blur (strong: {})", report.is_strong())
            } else {
                format!("not a {n}-blur: {} fail", failed.join(", "))
            };
            Ok(Outcome { code: verdict(report.is_blur()), body: serde_json::to_value(&report)?, summary, compact: false })
        }
        Check::Basis { ra, n } => {
            let r = ra_from(m, ra.ra.as_deref(), ra.k)?;
            let mats = basic_matrices_with(&r, *n, g.budget_states.unwrap_or(MATRIX_BUDGET))?;
            let report = check_cylindric_basis(&mats, &r, *n)?;
            let summary = format!("Mat_{n}: {} matrices, is_basis {}", mats.len(), report.is_basis);
            Ok(Outcome { code: verdict(report.is_basis), body: serde_json::to_value(&report)?, summary, compact: false })
        }
        Check::Msquare { algebra, rep, m: width } => {
            let a = Document::load(m, algebra)?.algebra()?;
            let rep = Document::load(m, rep)?.representation(&a)?;
            let report = check_m_square(&a, &rep, *width)?;
            let summary = format!("{width}-square: {} ({} cliques)", report.square, report.cliques);
            Ok(Outcome { code: verdict(report.square), body: serde_json::to_value(&report)?, summary, compact: false })
        }
        Check::Represent(r) => represent(r, g, m),
    }
}

fn represent(r: &Represent, g: &Global, m: &mut RunManifest) -> Result<Outcome> {
    let file = r.file.as_ref().or(r.algebra.as_ref()).context("an algebra file is required")?;
    let a = Document::load(m, file)?.algebra()?;
    let mut q = RepSearch::new(r.max_base, UnitKind::parse(&r.unit)?);
    if r.topological {
        q = q.topological();
    }
    if let Some(b) = g.budget_states {
        q.budget = b as u64;
    }
    let out = brute_force_represent(&a, &q)?;
    let mut body = json!({ "found": out.found.is_some(), "base_size": out.base_size(), "bounds": out.bounds });
    let summary = match &out.found {
        Some(rep) => {
            body["representation"] = serde_json::to_value(rep.to_json())?;
            format!("represented on {} points", rep.base.len())
        }
        None => format!("NONE within bounds (base ≤ {}, unit {})", r.max_base, r.unit),
    };
    Ok(Outcome { code: verdict(out.found.is_some()), body, summary, compact: false })
}

fn eval(e: &Eval, m: &mut RunManifest) -> Result<Outcome> {
    let a = Document::load(m, &e.algebra)?.algebra()?;
    let rep = Document::load(m, &e.rep)?.representation(&a)?;
    let phi = parse_formula(&e.formula)?;
    let sat = clique_guarded_eval(&rep, &phi, e.m)?;
    let named: Vec<Vec<&str>> = sat.iter().map(|s| s.iter().map(|&x| rep.base[x].as_str()).collect()).collect();
    let summary = format!("{} satisfying assignments", sat.len());
    let body = json!({ "formula": phi.to_string(), "m": e.m, "count": sat.len(), "assignments": named });
    Ok(Outcome { body, code: 0, summary, compact: false })
}

fn decompose(d: &Decompose, m: &mut RunManifest) -> Result<Outcome> {
    let topo = match (&d.topology, d.base) {
        (Some(p), None) => {
            let bytes = read_input(m, p)?;
            let j: TopologyJson = serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", p.display()))?;
            FiniteTopology::from_json(&j)?
        }
        (None, Some(u)) => FiniteTopology::discrete(u),
        _ => bail!("give exactly one of --topology FILE and --base N"),
    };
    let parts = d
        .parts
        .split(';')
        .map(|p| p.split(',').map(|x| x.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .context("--parts must look like `0,1;2`")?;
    let cp = coproduct_decompose(&topo, &parts, d.n)?;
    let sizes: Vec<usize> = cp.components.iter().map(|c| c.atom_count()).collect();
    let summary = format!("{} factors with {:?} atoms, isomorphism {}", sizes.len(), sizes, cp.isomorphism);
    let body = json!({
        "atoms": cp.whole.atom_count(), "components": sizes, "mode": cp.mode,
        "isomorphism": cp.isomorphism, "witness": cp.witness,
    });
    Ok(Outcome { code: verdict(cp.isomorphism), body, summary, compact: false })
}
