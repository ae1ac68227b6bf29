//! Handlers for the subcommands. Each returns the `result` body of the
//! report and the exit code.

use std::io::BufRead;
use std::path::{Path, PathBuf};

use hornlab::analysis::{self, ShadowGraph};
use hornlab::efgame::{self, GameInstance, GameState, SpoilerMove, SpoilerPolicy, Violation};
use hornlab::generators::{self, SearchBudget};
use hornlab::hom::{hom_enumerate, hom_exists};
use hornlab::io::{self, Document};
use hornlab::membership::{self, Failure, MemberOptions};
use hornlab::polymorphism::{self, ClassifyOptions};
use hornlab::{Error, Hypergraph, KStructure};
use serde_json::{json, Value};

use crate::{
    CliError, Command, CommandSpec, ConvertTarget, EfgameArgs, GenerateArgs, GenerateKind, SpoilerMode,
    Success, EXIT_NO, EXIT_YES,
};

type Outcome = Result<Success, CliError>;

fn success(code: i32, result: Value, summary: impl Into<String>) -> Outcome {
    let mut summary = summary.into();
    summary.push('\n');
    Ok(Success {
        code,
        result,
        summary,
    })
}

pub(crate) fn spec_for(args: &[String], command: &Command) -> CommandSpec {
    let mut spec = CommandSpec {
        subcommand: String::new(),
        args: args.to_vec(),
        inputs: Vec::new(),
        output: None,
        seed: None,
        budget: None,
        stdin: None,
    };
    let budget = |b: &crate::BudgetArgs| Some(serde_json::to_value(b).expect("budget serialises"));
    match command {
        Command::Analyze { file, .. } => {
            spec.subcommand = "analyze".into();
            spec.inputs = vec![file.clone()];
        }
        Command::Hom {
            source,
            target,
            budget: b,
            ..
        } => {
            spec.subcommand = "hom".into();
            spec.inputs = vec![source.clone(), target.clone()];
            spec.budget = budget(b);
        }
        Command::Colour { file, .. } => {
            spec.subcommand = "colour".into();
            spec.inputs = vec![file.clone()];
        }
        Command::Member {
            structure,
            templates,
            certificate,
            budget: b,
            ..
        } => {
            spec.subcommand = "member".into();
            spec.inputs = std::iter::once(structure.clone())
                .chain(templates.iter().cloned())
                .collect();
            spec.output = certificate.clone();
            spec.budget = budget(b);
        }
        Command::Classify { file, budget: b, .. } => {
            spec.subcommand = "classify".into();
            spec.inputs = vec![file.clone()];
            spec.budget = budget(b);
        }
        Command::Polymorphism { file, budget: b, .. } => {
            spec.subcommand = "polymorphism".into();
            spec.inputs = vec![file.clone()];
            spec.budget = budget(b);
        }
        Command::Generate(g) => {
            spec.subcommand = "generate".into();
            spec.inputs = match &g.kind {
                GenerateKind::Incomparability { h1, h2, .. } => vec![h1.clone(), h2.clone()],
                GenerateKind::Density { g1, g2 } => vec![g1.clone(), g2.clone()],
                GenerateKind::Nfa { template, .. } => vec![template.clone()],
                _ => Vec::new(),
            };
            spec.output = g.out.clone();
            spec.seed = Some(g.seed);
            spec.budget = Some(json!({
                "max_candidates": g.budget,
                "min_vertices": g.min_vertices,
                "max_vertices": g.max_vertices,
            }));
        }
        Command::Efgame(e) => {
            spec.subcommand = "efgame".into();
            spec.inputs = vec![e.base.clone()];
            if e.spoiler == SpoilerMode::Random {
                spec.seed = Some(e.seed);
                spec.budget = Some(json!({ "trials": e.trials }));
            }
        }
        Command::Convert { file, out, .. } => {
            spec.subcommand = "convert".into();
            spec.inputs = vec![file.clone()];
            spec.output = out.clone();
        }
    }
    spec
}

pub(crate) fn execute(command: Command, input: &mut dyn BufRead, spec: &mut CommandSpec) -> Outcome {
    match command {
        Command::Analyze { file, k, colour_cap } => analyze(&file, k, colour_cap),
        Command::Hom {
            source,
            target,
            k,
            enumerate,
            budget,
            ..
        } => hom(&source, &target, k, enumerate, budget),
        Command::Colour { file, colours, cap } => colour(&file, colours, cap),
        Command::Member {
            structure,
            templates,
            k,
            certificate,
            hom_cap,
            budget,
        } => member(&structure, &templates, k, certificate.as_deref(), hom_cap, budget),
        Command::Classify { file, k, budget } => classify(&file, k, budget),
        Command::Polymorphism {
            file,
            arity,
            idempotent,
            k,
            budget,
        } => polymorphism(&file, arity, idempotent, k, budget),
        Command::Generate(args) => generate(&args),
        Command::Efgame(args) => efgame_command(&args, input, spec),
        Command::Convert { file, to, k, out } => convert(&file, to, k, out.as_deref()),
    }
}

fn read_document(path: &Path) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    io::parse_document(&text).map_err(|error| CliError::Format {
        path: path.to_path_buf(),
        error,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Loads structures at a common arity: the explicit `k`, else the arity of
/// the first structure document, else the largest edge size (at least 2).
fn load_structures(paths: &[&Path], k: Option<usize>) -> Result<Vec<KStructure>, CliError> {
    let docs = paths
        .iter()
        .map(|p| read_document(p))
        .collect::<Result<Vec<_>, _>>()?;
    let k = k.unwrap_or_else(|| {
        docs.iter()
            .find_map(|d| match d {
                Document::KStructure(s) => Some(s.arity()),
                Document::Hypergraph(_) => None,
            })
            .unwrap_or_else(|| {
                docs.iter()
                    .map(|d| match d {
                        Document::Hypergraph(h) => h.max_edge_size(),
                        Document::KStructure(_) => 0,
                    })
                    .max()
                    .unwrap_or(0)
                    .max(2)
            })
    });
    Ok(docs
        .iter()
        .map(|d| d.to_kstructure(Some(k)))
        .collect::<Result<Vec<_>, _>>()?)
}

fn load_one(path: &Path, k: Option<usize>) -> Result<KStructure, CliError> {
    Ok(load_structures(&[path], k)?.remove(0))
}

/// Hypergraph view; structures must be set-closed.
fn load_hypergraph(path: &Path) -> Result<Hypergraph, CliError> {
    match read_document(path)? {
        Document::Hypergraph(h) => Ok(h),
        Document::KStructure(s) => Ok(s.to_hypergraph()?),
    }
}

fn names(s: &KStructure, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| s.universe()[x].clone()).collect()
}

fn vertex_names(h: &Hypergraph, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| h.vertices()[x].clone()).collect()
}

fn named_map(s: &KStructure, t: &KStructure, map: &[usize]) -> Value {
    let obj: serde_json::Map<String, Value> = map
        .iter()
        .enumerate()
        .map(|(x, &y)| (s.universe()[x].clone(), json!(t.universe()[y])))
        .collect();
    Value::Object(obj)
}

fn document_value(text: &str) -> Value {
    serde_json::from_str(text).expect("canonical output is JSON")
}

fn analyze(file: &Path, k: Option<usize>, cap: usize) -> Outcome {
    let doc = read_document(file)?;
    let s = match &doc {
        Document::KStructure(s) => s.clone(),
        Document::Hypergraph(h) => h.to_kstructure(k.unwrap_or(h.max_edge_size().max(2)))?,
    };
    let set_closed = s.is_set_closed();
    // cycle and colour questions are asked of the underlying hypergraph
    let h = match &doc {
        Document::Hypergraph(h) => h.clone(),
        Document::KStructure(s) => s.set_closure().to_hypergraph()?,
    };
    let girth = analysis::girth(&h);
    let chromatic = if h.is_loop_free() {
        match analysis::chromatic_number(&h, cap) {
            Ok(c) => json!(c.colours),
            Err(Error::CapExceeded(_)) => Value::Null,
            Err(e) => return Err(e.into()),
        }
    } else {
        Value::Null
    };
    let result = json!({
        "arity": s.arity(),
        "elements": s.len(),
        "tuples": s.relation().len(),
        "edges": h.num_edges(),
        "set_closed": set_closed,
        "girth": girth.as_ref().map(|g| g.0),
        "girth_witness": girth.as_ref().map(|(_, w)| json!({
            "vertices": vertex_names(&h, &w.vertices),
            "edges": w.edges.iter().map(|e| vertex_names(&h, e)).collect::<Vec<_>>(),
        })),
        "hyperforest": girth.is_none(),
        "chromatic": chromatic,
        "colour_cap": cap,
        "uniform": s.is_uniform(),
        "loop_free": s.is_loop_free(),
        "components": ShadowGraph::of_structure(&s).components(),
    });
    let g = girth.map_or("infinite".to_string(), |g| g.0.to_string());
    success(
        EXIT_YES,
        result,
        format!("girth {g}, chromatic number {chromatic}"),
    )
}

fn hom(
    source: &Path,
    target: &Path,
    k: Option<usize>,
    enumerate: Option<usize>,
    budget: crate::BudgetArgs,
) -> Outcome {
    let v = load_structures(&[source, target], k)?;
    let (s, t) = (&v[0], &v[1]);
    let limits = budget.limits();
    if let Some(cap) = enumerate {
        let set = hom_enumerate(s, t, cap, limits)?;
        let code = if set.is_empty() { EXIT_NO } else { EXIT_YES };
        let maps: Vec<Value> = set.homs.iter().map(|h| named_map(s, t, h.map())).collect();
        let summary = format!(
            "{} homomorphisms{}",
            maps.len(),
            if set.complete { "" } else { " (truncated)" }
        );
        return success(
            code,
            json!({"hom": !set.is_empty(), "count": maps.len(), "complete": set.complete, "homomorphisms": maps}),
            summary,
        );
    }
    match hom_exists(s, t, limits)? {
        Some(h) => success(
            EXIT_YES,
            json!({"hom": true, "map": named_map(s, t, h.map())}),
            "homomorphism found",
        ),
        None => success(EXIT_NO, json!({"hom": false}), "no homomorphism"),
    }
}

fn colour(file: &Path, colours: Option<usize>, cap: usize) -> Outcome {
    let h = load_hypergraph(file)?;
    let assignment = |a: &[usize]| -> Value {
        Value::Object(
            a.iter()
                .enumerate()
                .map(|(v, &c)| (h.vertices()[v].clone(), json!(c)))
                .collect(),
        )
    };
    match colours {
        Some(c) => match analysis::colour_with(&h, c)? {
            Some(a) => success(
                EXIT_YES,
                json!({"colourable": true, "colours": c, "assignment": assignment(&a)}),
                format!("{c}-colourable"),
            ),
            None => success(
                EXIT_NO,
                json!({"colourable": false, "colours": c}),
                format!("not {c}-colourable"),
            ),
        },
        None => {
            let c = analysis::chromatic_number(&h, cap)?;
            success(
                EXIT_YES,
                json!({"chromatic": c.colours, "assignment": assignment(&c.assignment)}),
                format!("chromatic number {}", c.colours),
            )
        }
    }
}

fn failure_json(s: &KStructure, f: &Failure) -> Value {
    let mut v = json!({"condition": f.id()});
    match f {
        Failure::NoHomomorphism => {}
        Failure::Unseparated { x, y } => v["pair"] = json!(names(s, &[*x, *y])),
        Failure::NonTupleKept { tuple } => v["tuple"] = json!(names(s, tuple)),
    }
    v
}

fn member(
    structure: &Path,
    templates: &[PathBuf],
    k: Option<usize>,
    certificate: Option<&Path>,
    hom_cap: usize,
    budget: crate::BudgetArgs,
) -> Outcome {
    let paths: Vec<&Path> = std::iter::once(structure)
        .chain(templates.iter().map(PathBuf::as_path))
        .collect();
    let mut all = load_structures(&paths, k)?;
    let s = all.remove(0);
    let limits = budget.limits();
    let cert = membership::member_with(&s, &all, MemberOptions { hom_cap, limits })?;
    membership::verify_certificate(&cert, &s, &all, limits)?;
    if let Some(path) = certificate {
        let body = json!({
            "universe": s.universe(),
            "templates": all.iter().map(|t| t.universe().to_vec()).collect::<Vec<_>>(),
            "certificate": cert,
        });
        write_file(
            path,
            &(serde_json::to_string_pretty(&body).expect("certificate serialises") + "\n"),
        )?;
    }
    let result = json!({
        "member": cert.member,
        "failure": cert.failure.as_ref().map(|f| failure_json(&s, f)),
        "witnesses": cert.witnesses.len(),
        "pairs": cert.pairs.len(),
        "non_tuples": cert.non_tuples.len(),
        "by_set": cert.by_set,
        "verified": true,
        "certificate": certificate,
    });
    let summary = match &cert.failure {
        None => "member".to_string(),
        Some(f) => format!("not a member: {} fails", f.id()),
    };
    success(if cert.member { EXIT_YES } else { EXIT_NO }, result, summary)
}

fn classify(file: &Path, k: Option<usize>, budget: crate::BudgetArgs) -> Outcome {
    let s = load_one(file, k)?;
    let limits = budget.limits();
    let verdict = polymorphism::classify_with(
        &s,
        ClassifyOptions {
            limits,
            ..Default::default()
        },
    )?;
    verdict.validate(&s, limits)?;
    let summary = if verdict.is_tractable() {
        "tractable"
    } else {
        "NP-complete"
    };
    success(
        EXIT_YES,
        json!({"classification": verdict, "universe": s.universe(), "validated": true}),
        summary,
    )
}

fn polymorphism(
    file: &Path,
    p: usize,
    idempotent: bool,
    k: Option<usize>,
    budget: crate::BudgetArgs,
) -> Outcome {
    let s = load_one(file, k)?;
    let search = polymorphism::cyclic_polymorphism(&s, p, idempotent, budget.limits())?;
    let Some(table) = search.table else {
        return success(
            EXIT_NO,
            json!({"found": false, "arity": p, "classes": search.classes, "nodes": search.nodes}),
            format!("no cyclic polymorphism of arity {p}"),
        );
    };
    let validated = match table.is_polymorphism(&s) {
        Ok(ok) => json!(ok),
        Err(Error::TooLarge(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let rows: Vec<Value> = table
        .representatives
        .iter()
        .zip(&table.values)
        .map(|(rep, &v)| json!({"necklace": names(&s, rep), "value": s.universe()[v]}))
        .collect();
    success(
        EXIT_YES,
        json!({
            "found": true,
            "arity": p,
            "classes": search.classes,
            "nodes": search.nodes,
            "idempotent": table.is_idempotent(),
            "validated": validated,
            "table": rows,
        }),
        format!("cyclic polymorphism of arity {p} found"),
    )
}

fn generate(args: &GenerateArgs) -> Outcome {
    let budget = SearchBudget {
        max_candidates: args.budget,
        min_vertices: args.min_vertices,
        max_vertices: args.max_vertices,
        prefer_fixture: args.fixture,
        ..SearchBudget::with_seed(args.seed)
    };
    let hypergraph_result = |h: &Hypergraph, extra: Value| -> (String, Value) {
        let text = io::hypergraph_to_json(h);
        let mut v = json!({
            "structure": document_value(&text),
            "vertices": h.num_vertices(),
            "edges": h.num_edges(),
        });
        if let Value::Object(m) = extra {
            v.as_object_mut().expect("object").extend(m);
        }
        (text, v)
    };
    let (text, result) = match &args.kind {
        GenerateKind::Complete { n, k } => {
            hypergraph_result(&generators::complete_hypergraph(*n, *k)?, json!({}))
        }
        GenerateKind::Edge { size } => hypergraph_result(&generators::single_edge(*size)?, json!({})),
        GenerateKind::Forest { k, edges } => {
            hypergraph_result(&generators::random_hyperforest(*k, *edges, args.seed)?, json!({}))
        }
        GenerateKind::Sparse { k, girth, colours } => {
            let h = generators::high_chromatic_sparse(*k, *girth, *colours, &budget)?;
            let chromatic = analysis::chromatic_number(&h, analysis::DEFAULT_COLOUR_CAP)
                .ok()
                .map(|c| c.colours);
            hypergraph_result(
                &h,
                json!({"girth": analysis::girth_value(&h), "chromatic": chromatic, "verified": true}),
            )
        }
        GenerateKind::Incomparability { h1, h2, girth } => {
            let v = load_structures(&[h1, h2], None)?;
            let s = generators::sparse_incomparability(&v[0], &v[1], *girth, &budget)?;
            let text = io::kstructure_to_json(&s);
            let result = json!({"structure": document_value(&text), "elements": s.len()});
            (text, result)
        }
        GenerateKind::Density { g1, g2 } => {
            let v = load_structures(&[g1, g2], None)?;
            let w = generators::density_witness(&v[0], &v[1], &budget)?;
            let text = io::kstructure_to_json(&w.structure);
            let result = json!({
                "structure": document_value(&text),
                "elements": w.structure.len(),
                "sparse_elements": w.sparse.len(),
                "checks": {
                    "g1_to_h": w.checks[0],
                    "h_to_g2": w.checks[1],
                    "h_not_to_g1": w.checks[2],
                    "g2_not_to_h": w.checks[3],
                },
            });
            (text, result)
        }
        GenerateKind::Nfa { template, n } => {
            let m = load_one(template, None)?;
            let report = generators::nfa_witness(&m, *n, &budget)?;
            let text = io::hypergraph_to_json(&report.witness);
            let mut result = serde_json::to_value(&report).expect("report serialises");
            result["structure"] = document_value(&text);
            (text, result)
        }
    };
    if let Some(out) = &args.out {
        write_file(out, &text)?;
    }
    success(EXIT_YES, result, "generated")
}

fn move_json(inst: &GameInstance, mv: SpoilerMove) -> Value {
    json!({
        "side": mv.side,
        "element": mv.element,
        "name": inst.structure(mv.side).universe()[mv.element],
    })
}

fn violation_json(inst: &GameInstance, v: &Violation) -> Value {
    let transcript: Vec<Value> = v
        .transcript
        .iter()
        .map(|r| {
            let other = r.spoiler.side.other();
            let reply = (r.reply < inst.side_len(other)).then(|| {
                move_json(
                    inst,
                    SpoilerMove {
                        side: other,
                        element: r.reply,
                    },
                )
            });
            json!({"spoiler": move_json(inst, r.spoiler), "duplicator": reply})
        })
        .collect();
    let moves: Vec<String> = v
        .transcript
        .iter()
        .map(|r| format!("{} {}", r.spoiler.side, r.spoiler.element))
        .collect();
    json!({
        "play": v.play,
        "round": v.round,
        "failures": v.failures,
        "transcript": transcript,
        "moves": moves.join(","),
    })
}

fn efgame_command(args: &EfgameArgs, input: &mut dyn BufRead, spec: &mut CommandSpec) -> Outcome {
    let base = load_one(&args.base, args.k)?;
    let inst = efgame::build_instance(&base, args.rounds, args.radius, !args.non_strict)?;
    let header = json!({
        "g_elements": inst.g.len(),
        "h_elements": inst.h.len(),
        "ball_copies": inst.copies.len(),
        "rounds": args.rounds,
        "radius": args.radius,
        "strict": inst.strict,
        "spoiler": args.spoiler,
    });
    let policy = match args.spoiler {
        SpoilerMode::Exhaustive => SpoilerPolicy::Exhaustive,
        SpoilerMode::Random => SpoilerPolicy::Random {
            seed: args.seed,
            trials: args.trials,
        },
        SpoilerMode::Scripted => {
            let text = args
                .moves
                .as_deref()
                .ok_or_else(|| CliError::Usage("--spoiler scripted needs --moves".into()))?;
            let moves = text
                .split(',')
                .filter(|m| !m.trim().is_empty())
                .map(|m| efgame::parse_spoiler_move(&inst, m))
                .collect::<Result<Vec<_>, _>>()?;
            SpoilerPolicy::Scripted(moves)
        }
        SpoilerMode::Stdin => return interactive(&inst, header, input, spec),
    };
    let report = efgame::play(&inst, &policy);
    let mut result = header;
    result["plays"] = json!(report.plays);
    result["rounds_checked"] = json!(report.rounds_checked);
    result["violation_count"] = json!(report.violation_count);
    result["violations"] = report
        .violations
        .iter()
        .map(|v| violation_json(&inst, v))
        .collect();
    let code = if report.is_clean() { EXIT_YES } else { EXIT_NO };
    let summary = format!(
        "{} plays, {} with violations",
        report.plays, report.violation_count
    );
    success(code, result, summary)
}

/// Reads Spoiler moves line by line; prompts go to the summary stream.
fn interactive(
    inst: &GameInstance,
    header: Value,
    input: &mut dyn BufRead,
    spec: &mut CommandSpec,
) -> Outcome {
    let mut state = GameState::default();
    let mut transcript = Vec::new();
    let mut consumed = Vec::new();
    let mut log = String::new();
    let mut failures = Vec::new();
    while state.round() < inst.rounds {
        log.push_str(&format!(
            "round {}: move as `G <element>` or `H <element>`\n",
            state.round() + 1
        ));
        let mut line = String::new();
        match input.read_line(&mut line) {
            Ok(0) | Err(_) => break,
            Ok(_) => {}
        }
        let line = line.trim().to_string();
        consumed.push(line.clone());
        if line.is_empty() {
            continue;
        }
        let mv = match efgame::parse_spoiler_move(inst, &line) {
            Ok(mv) => mv,
            Err(e) => {
                log.push_str(&format!("rejected: {e}\n"));
                continue;
            }
        };
        let reply = match efgame::duplicator_move(inst, &state, mv) {
            Ok(r) => r,
            Err(e) => {
                log.push_str(&format!("strategy failed: {e}\n"));
                failures.push(
                    json!({"round": state.round() + 1, "condition": "strategy", "detail": e.to_string()}),
                );
                break;
            }
        };
        let other = mv.side.other();
        state.played.push(match mv.side {
            efgame::Side::G => (mv.element, reply),
            efgame::Side::H => (reply, mv.element),
        });
        let reply_move = SpoilerMove {
            side: other,
            element: reply,
        };
        log.push_str(&format!(
            "duplicator answers {} {} ({})\n",
            other,
            reply,
            inst.structure(other).universe()[reply]
        ));
        for f in efgame::check_conditions(inst, &state) {
            log.push_str(&format!("condition {} fails: {}\n", f.condition, f.detail));
            failures.push(json!({"round": state.round(), "condition": f.condition, "detail": f.detail}));
        }
        transcript.push(json!({"spoiler": move_json(inst, mv), "duplicator": move_json(inst, reply_move)}));
    }
    spec.stdin = Some(consumed);
    let mut result = header;
    result["rounds_played"] = json!(state.round());
    result["transcript"] = json!(transcript);
    result["failures"] = json!(failures);
    let code = if failures.is_empty() { EXIT_YES } else { EXIT_NO };
    log.push_str(&format!(
        "{} rounds played, {} failures",
        state.round(),
        failures.len()
    ));
    success(code, result, log)
}

fn convert(file: &Path, to: ConvertTarget, k: Option<usize>, out: Option<&Path>) -> Outcome {
    let doc = read_document(file)?;
    let text = match to {
        ConvertTarget::Kstructure => io::kstructure_to_json(&doc.to_kstructure(k)?),
        ConvertTarget::Hypergraph => match &doc {
            Document::Hypergraph(h) => io::hypergraph_to_json(h),
            Document::KStructure(s) => io::hypergraph_to_json(&s.to_hypergraph()?),
        },
    };
    if let Some(out) = out {
        write_file(out, &text)?;
    }
    success(EXIT_YES, json!({"document": text}), "converted")
}
