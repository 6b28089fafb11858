//! `img`: build kneading groups on the binary rooted tree, solve their word
//! problem, and inspect their structure.
//!
//! Three constructor verbs — `kv <bits>`, `kwv <w> <v>`, `angle <p/q>` —
//! each take a subcommand acting on the resulting group; a bare `angle`
//! prints the doubling orbit and kneading data.  `--json` switches every
//! command to a JSON report.  Exit codes: 0 on success, 1 on a domain error
//! (bad kneading pair, malformed word, angle with no group), 2 on usage
//! errors.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use img_core::angles::{group_from_angle, Angle, KneadingResult};
use img_core::automaton::{act, moore_dot, AutomatonSpec, Letter, Vertex};
use img_core::kneading::{BitWord, KneadingData, KneadingGroup, KvGroup, KwvGroup};
use img_core::parser::{format_word, parse_word, SymbolTable};
use img_core::presentation::{
    emit_hnn_kv, emit_hnn_kwv, fbar_relators, phi_expand, presentation_doc_kv,
    presentation_doc_kwv, relators_kv, relators_kwv, verify_relators, PresentationDoc,
};
use img_core::solver::{
    equal, involution_check, is_level_transitive, is_trivial, nucleus_closure, orbits_on_level,
    order_probe, tau_word, ElementOrder, InfiniteWitness, NucleusOptions, OrderProbeOptions,
};
use img_core::word::{Gen, GroupWord, StateId};

const ORBIT_DEPTH_CAP: usize = 12;

#[derive(Parser)]
#[command(name = "img", version, about = "kneading groups on the binary rooted tree")]
struct Cli {
    /// Emit a JSON report instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Group of a periodic kneading sequence, from its period bits.
    Kv {
        /// Bits x_1..x_(n-1); the empty string gives the adding machine.
        bits: String,
        #[command(subcommand)]
        action: Action,
    },
    /// Group of a strictly pre-periodic kneading sequence.
    Kwv {
        /// Pre-period bits y_1..y_k.
        w: String,
        /// Period bits x_1..x_n; the last letters of w and v must differ.
        v: String,
        #[command(subcommand)]
        action: Action,
    },
    /// Rational external angle; bare prints its orbit and kneading data.
    Angle {
        /// The angle, written p/q.
        theta: String,
        #[command(subcommand)]
        action: Option<Action>,
    },
}

#[derive(Subcommand)]
enum Action {
    /// List the nucleus.
    Nucleus,
    /// Probe the order of an element.
    Order { word: String },
    /// Decide whether a word is the identity.
    Trivial { word: String },
    /// Decide whether two words are the same element.
    Equal { w1: String, w2: String },
    /// Apply a word to a vertex (a bitstring).
    Act { word: String, vertex: String },
    /// Orbits of a word on one level of the tree.
    Orbit {
        word: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Image of a word in the abelianization.
    Abelianize { word: String },
    /// Activity parity sequence of a word across the levels.
    Tau { word: String },
    /// Whether a word acts transitively on every level.
    Transitive { word: String },
    /// Print the recursive presentation, expanded through a level.
    Relators {
        #[arg(long, default_value_t = 1)]
        levels: u32,
    },
    /// Check every relator of the presentation against the word problem.
    CheckPresentation {
        #[arg(long, default_value_t = 1)]
        levels: u32,
    },
    /// Print the finitely presented HNN overgroup.
    Hnn,
    /// Print the automaton; --dot for Graphviz.
    Moore {
        #[arg(long)]
        dot: bool,
        /// Write to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the branching witnesses.
    Witnesses,
    /// Print the endomorphism data.
    EndoParams,
}

enum CliError {
    Core(img_core::Error),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<img_core::Error> for CliError {
    fn from(e: img_core::Error) -> CliError {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

/// One command's result: the plain rendering and the JSON rendering.
struct Report {
    text: String,
    json: Value,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_mode = cli.json;
    match run(cli) {
        Ok(report) => {
            // A closed pipe downstream (e.g. `img ... | head`) is not an error.
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            let _ = if json_mode {
                writeln!(out, "{:#}", report.json)
            } else {
                writeln!(out, "{}", report.text)
            };
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<Report, CliError> {
    match cli.verb {
        Verb::Kv { bits, action } => {
            let group = KneadingGroup::Kv(KvGroup::new(BitWord::parse(&bits)?));
            dispatch(&group, &action, cli.json)
        }
        Verb::Kwv { w, v, action } => {
            let group =
                KneadingGroup::Kwv(KwvGroup::new(BitWord::parse(&w)?, BitWord::parse(&v)?)?);
            dispatch(&group, &action, cli.json)
        }
        Verb::Angle { theta, action } => {
            let theta: Angle = theta.parse()?;
            let (group, result) = group_from_angle(theta)?;
            match action {
                Some(action) => dispatch(&group, &action, cli.json),
                None => Ok(angle_report(theta, &group, &result)),
            }
        }
    }
}

fn angle_report(theta: Angle, group: &KneadingGroup, result: &KneadingResult) -> Report {
    let orbit: Vec<String> = result.orbit.iter().map(Angle::to_string).collect();
    let kneading_text = match &result.canonical {
        KneadingData::Periodic { v } if v.is_empty() => "periodic v = ∅".to_string(),
        KneadingData::Periodic { v } => format!("periodic v = {v}"),
        KneadingData::Preperiodic { w, v } => format!("preperiodic w = {w}, v = {v}"),
    };
    let mut lines = vec![
        format!("theta: {theta}"),
        format!("orbit: {}", orbit.join(" ↦ ")),
        format!("preperiod: {}", result.preperiod),
        format!("period: {}", result.period),
        format!("itinerary: {}", result.raw),
        format!("kneading: {kneading_text}"),
        format!("group: {}", group.display_name()),
    ];
    if result.period_collapsed {
        lines.push("note: the kneading period is shorter than the angle period".to_string());
    }
    let kneading_json = match &result.canonical {
        KneadingData::Periodic { v } => json!({"kind": "periodic", "v": v.to_string()}),
        KneadingData::Preperiodic { w, v } => {
            json!({"kind": "preperiodic", "w": w.to_string(), "v": v.to_string()})
        }
    };
    Report {
        text: lines.join("\n"),
        json: json!({
            "theta": theta.to_string(),
            "orbit": orbit,
            "preperiod": result.preperiod,
            "period": result.period,
            "itinerary": result.raw.to_string(),
            "kneading": kneading_json,
            "period_collapsed": result.period_collapsed,
            "group": group.display_name(),
        }),
    }
}

fn doc_report(doc: PresentationDoc) -> Report {
    Report {
        text: doc.to_text().trim_end_matches('\n').to_string(),
        json: serde_json::to_value(&doc).expect("presentation serializes"),
    }
}

fn witness_text(w: InfiniteWitness) -> &'static str {
    match w {
        InfiniteWitness::LevelTransitiveTau => "transitive on every level",
        InfiniteWitness::NonzeroAbelianization => "nonzero image in the abelianization",
        InfiniteWitness::TorsionFreeNontrivial => "nontrivial in a torsion-free group",
    }
}

fn recursion_table(spec: &AutomatonSpec) -> String {
    let section = |id: StateId, x: Letter| {
        spec.state_section(id, x).map_or("1".to_string(), |s| spec.state_name(s).to_string())
    };
    spec.state_ids()
        .map(|id| {
            format!(
                "{} = <{}, {}>{}",
                spec.state_name(id),
                section(id, Letter::ZERO),
                section(id, Letter::ONE),
                if spec.state_active(id) { " sigma" } else { "" },
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn dispatch(group: &KneadingGroup, action: &Action, json_mode: bool) -> Result<Report, CliError> {
    let spec = group.spec();
    let table = SymbolTable::from_spec(spec);
    let word = |text: &str| parse_word(text, &table);

    match action {
        Action::Nucleus => {
            let nucleus = nucleus_closure(spec, NucleusOptions::default())?;
            let elements: Vec<String> =
                nucleus.members().iter().map(|w| format_word(w, &table)).collect();
            let mut lines = vec![
                format!("group: {}", group.display_name()),
                format!("size: {}", nucleus.len()),
            ];
            lines.extend(elements.iter().cloned());
            Ok(Report {
                text: lines.join("\n"),
                json: json!({
                    "group": group.display_name(),
                    "size": nucleus.len(),
                    "elements": elements,
                }),
            })
        }
        Action::Order { word: text } => {
            let g = word(text)?;
            Ok(match order_probe(&g, spec, group.traits(), OrderProbeOptions::default()) {
                ElementOrder::Finite(n) => {
                    Report { text: n.to_string(), json: json!({"order": n}) }
                }
                ElementOrder::Infinite(wit) => Report {
                    text: format!("infinite ({})", witness_text(wit)),
                    json: json!({"order": "infinite", "witness": witness_text(wit)}),
                },
                ElementOrder::Unknown { tested_to } => Report {
                    text: format!("unknown (no finite order up to {tested_to})"),
                    json: json!({"order": "unknown", "tested_to": tested_to}),
                },
            })
        }
        Action::Trivial { word: text } => {
            let g = word(text)?;
            let answer = is_trivial(&g, spec);
            Ok(Report { text: answer.to_string(), json: json!({"trivial": answer}) })
        }
        Action::Equal { w1, w2 } => {
            let a = word(w1)?;
            let b = word(w2)?;
            let answer = equal(&a, &b, spec);
            Ok(Report { text: answer.to_string(), json: json!({"equal": answer}) })
        }
        Action::Act { word: text, vertex } => {
            let g = word(text)?;
            let v = Vertex::parse(vertex)?;
            let image = act(&g, &v, spec);
            Ok(Report {
                text: image.to_string(),
                json: json!({"vertex": v.to_string(), "image": image.to_string()}),
            })
        }
        Action::Orbit { word: text, depth } => {
            if *depth > ORBIT_DEPTH_CAP {
                return Err(img_core::Error::DepthCap {
                    requested: *depth,
                    cap: ORBIT_DEPTH_CAP,
                }
                .into());
            }
            let g = word(text)?;
            let orbits = orbits_on_level(&[g], *depth, spec);
            let mut lines =
                vec![format!("depth: {}", orbits.depth), format!("orbits: {}", orbits.count())];
            let mut entries = Vec::new();
            for orbit in &orbits.orbits {
                let rep = Vertex::from_index(*depth, *orbit.iter().min().expect("nonempty orbit"));
                lines.push(format!("  size {} at {}", orbit.len(), rep));
                entries.push(json!({"size": orbit.len(), "representative": rep.to_string()}));
            }
            Ok(Report {
                text: lines.join("\n"),
                json: json!({"depth": orbits.depth, "count": orbits.count(), "orbits": entries}),
            })
        }
        Action::Abelianize { word: text } => {
            let g = word(text)?;
            let (coords, modulus): (Vec<i64>, Value) = match group {
                KneadingGroup::Kv(kv) => (kv.abelianize(&g), Value::Null),
                KneadingGroup::Kwv(kwv) => {
                    (kwv.abelianize(&g).iter().map(|&c| c as i64).collect(), json!(2))
                }
            };
            let tuple =
                coords.iter().map(i64::to_string).collect::<Vec<_>>().join(", ");
            Ok(Report {
                text: format!("({tuple})"),
                json: json!({
                    "basis": spec.state_names(),
                    "coordinates": coords,
                    "modulus": modulus,
                }),
            })
        }
        Action::Tau { word: text } => {
            let g = word(text)?;
            let tau = tau_word(&g, spec);
            Ok(Report {
                text: tau.to_string(),
                json: json!({"tau": tau.to_string(), "all_ones": tau.is_all_ones()}),
            })
        }
        Action::Transitive { word: text } => {
            let g = word(text)?;
            let answer = is_level_transitive(&g, spec);
            Ok(Report { text: answer.to_string(), json: json!({"transitive": answer}) })
        }
        Action::Relators { levels } => {
            let doc = match group {
                KneadingGroup::Kv(g) => presentation_doc_kv(g, *levels),
                KneadingGroup::Kwv(g) => presentation_doc_kwv(g, &g.endomorphism()?, *levels),
            };
            Ok(doc_report(doc))
        }
        Action::CheckPresentation { levels } => {
            let (words, involutions) = match group {
                KneadingGroup::Kv(g) => {
                    (phi_expand(&relators_kv(g, 2), &g.endomorphism(), *levels), None)
                }
                KneadingGroup::Kwv(g) => {
                    let data = g.endomorphism()?;
                    let mut words = fbar_relators(g, &data, *levels).base;
                    words.extend(phi_expand(&relators_kwv(g, &data), &data.phi, *levels));
                    (words, Some(involution_check(spec)))
                }
            };
            let report = verify_relators(&words, spec);
            let sound = report.all_trivial() && involutions.unwrap_or(true);
            let mut lines = vec![
                format!("relators: {} ({} distinct)", report.raw_count, report.deduped_count),
                format!("failures: {}", report.failures.len()),
            ];
            if let Some(inv) = involutions {
                lines.push(format!("involutions hold: {inv}"));
            }
            lines.push(format!("sound: {sound}"));
            let failures: Vec<String> =
                report.failures.iter().map(|w| format_word(w, &table)).collect();
            Ok(Report {
                text: lines.join("\n"),
                json: json!({
                    "raw_count": report.raw_count,
                    "deduped_count": report.deduped_count,
                    "failures": failures,
                    "involutions": involutions,
                    "sound": sound,
                }),
            })
        }
        Action::Hnn => {
            let doc = match group {
                KneadingGroup::Kv(g) => emit_hnn_kv(g),
                KneadingGroup::Kwv(g) => emit_hnn_kwv(g, &g.endomorphism()?),
            };
            Ok(doc_report(doc))
        }
        Action::Moore { dot, out } => {
            let text_content = if *dot { moore_dot(spec) } else { recursion_table(spec) };
            let json_value: Value =
                serde_json::from_str(&spec.to_json()).expect("automaton JSON is valid");
            match out {
                Some(path) => {
                    let content = if json_mode {
                        format!("{json_value:#}\n")
                    } else if text_content.ends_with('\n') {
                        text_content
                    } else {
                        format!("{text_content}\n")
                    };
                    std::fs::write(path, content)?;
                    Ok(Report {
                        text: format!("wrote {}", path.display()),
                        json: json!({"wrote": path.display().to_string()}),
                    })
                }
                None => Ok(Report {
                    text: text_content.trim_end_matches('\n').to_string(),
                    json: json_value,
                }),
            }
        }
        Action::Witnesses => {
            let report = group.branch_witnesses();
            let mut lines: Vec<String> = report
                .statements
                .iter()
                .map(|s| format!("[{}] {}", if s.passed { "ok" } else { "FAIL" }, s.description))
                .collect();
            lines.push(format!("conclusion: {}", report.conclusion));
            let statements: Vec<Value> = report
                .statements
                .iter()
                .map(|s| json!({"description": s.description, "passed": s.passed}))
                .collect();
            Ok(Report {
                text: lines.join("\n"),
                json: json!({
                    "statements": statements,
                    "conclusion": report.conclusion,
                    "all_passed": report.all_passed(),
                }),
            })
        }
        Action::EndoParams => {
            let mut lines = Vec::new();
            let mut head = serde_json::Map::new();
            let phi = match group {
                KneadingGroup::Kv(g) => g.endomorphism(),
                KneadingGroup::Kwv(g) => {
                    let data = g.endomorphism()?;
                    lines.push(format!("m = {}", data.m));
                    lines.push(format!("s = {}", format_word(&data.s, &table)));
                    lines.push(format!("t = {}", format_word(&data.t, &table)));
                    lines.push(format!("u = {}", format_word(&data.u, &table)));
                    head.insert("m".into(), json!(data.m));
                    head.insert("s".into(), json!(format_word(&data.s, &table)));
                    head.insert("t".into(), json!(format_word(&data.t, &table)));
                    head.insert("u".into(), json!(format_word(&data.u, &table)));
                    data.phi
                }
            };
            let mut phi_map = serde_json::Map::new();
            let mut rho_map = serde_json::Map::new();
            for id in spec.state_ids() {
                let name = spec.state_name(id);
                let image = format_word(phi.image(id), &table);
                lines.push(format!("phi({name}) = {image}"));
                phi_map.insert(name.to_string(), json!(image));
            }
            for id in spec.state_ids() {
                let name = spec.state_name(id);
                let gen = GroupWord::single(Gen::plain(id), spec.mode());
                let rho = format_word(&phi.rho(&gen), &table);
                lines.push(format!("rho({name}) = {rho}"));
                rho_map.insert(name.to_string(), json!(rho));
            }
            head.insert("phi".into(), Value::Object(phi_map));
            head.insert("rho".into(), Value::Object(rho_map));
            Ok(Report { text: lines.join("\n"), json: Value::Object(head) })
        }
    }
}
