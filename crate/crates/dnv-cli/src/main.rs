//! Command-line front end: reference-state emission, enumeration tables,
//! Mori-fan and secondary-fan reports, graph export, and verification.

use std::collections::BTreeMap;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use dnv_core::enumeration::{
    bfs, is_symmetric, p_stratum, t_coordinates, triple_of, ClassFilter,
};
use dnv_core::lattice::{Class, Int, Lattice};
use dnv_core::morifan::{build_flop_graph, cone_census, orbit_length, secondary_fan};
use dnv_core::pairs::{BaseTag, BoundarySide, Curve, Latent, Pair, Role};
use dnv_core::projectivity::{decide, glue_certificates, lp_feasible, verify_certificate};
use dnv_core::state::{Gluing, State, StateClass};

const SCHEMA: &str = "dnv-state/1";

#[derive(Parser)]
#[command(name = "dnv", about = "Degree-2 DNV model classification engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefState {
    Yp,
    Yt,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    P,
    T,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a reference state as a JSON document.
    Build { reference: RefState },
    /// Enumerate isomorphism classes with their invariants.
    Enumerate {
        #[arg(long, value_enum, default_value = "both")]
        class: ClassArg,
        /// Restrict the closure to projective states.
        #[arg(long, default_value_t = true)]
        projective_only: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: TableFormat,
    },
    /// Count the maximal cones of the Mori fan, both ways.
    CountCones,
    /// Report the components of the secondary fan.
    SecondaryFan,
    /// Emit the labelled flop graph.
    FlopGraph {
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
    },
    /// Read a state document and report projectivity verdicts.
    Check {
        /// Path to a state document, or `-` for standard input.
        path: String,
    },
    /// Run the oracle-agreement and invariant suites.
    Verify,
}

#[derive(Serialize, Deserialize)]
struct StateDocument {
    schema: String,
    class: String,
    components: Vec<ComponentDoc>,
    gluings: Vec<GluingDoc>,
}

#[derive(Serialize, Deserialize)]
struct ComponentDoc {
    base: String,
    rank: usize,
    /// Row-major Gram matrix of the component lattice.
    gram: Vec<Int>,
    curves: Vec<CurveDoc>,
    boundary: Vec<SideDoc>,
    canonical: Vec<Int>,
    latents: Vec<LatentDoc>,
    retired: Vec<LatentDoc>,
}

#[derive(Serialize, Deserialize)]
struct CurveDoc {
    name: String,
    coeffs: Vec<Int>,
    role: String,
    square: Int,
}

#[derive(Serialize, Deserialize)]
struct SideDoc {
    name: String,
    coeffs: Vec<Int>,
    square: Int,
    anchor: Vec<AnchorDoc>,
    nodes: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct AnchorDoc {
    curve: String,
    mult: Int,
}

#[derive(Serialize, Deserialize)]
struct LatentDoc {
    node: String,
    coeffs: Vec<Int>,
    node_mult: Int,
    crossings: Vec<AnchorDoc>,
    contact: Vec<AnchorDoc>,
}

#[derive(Serialize, Deserialize)]
struct GluingDoc {
    a: EndDoc,
    b: EndDoc,
    kind: String,
    conserved_sum: Int,
}

#[derive(Serialize, Deserialize)]
struct EndDoc {
    component: usize,
    side: String,
}

fn emit(state: &State) -> StateDocument {
    let components = state
        .comps
        .iter()
        .map(|p| ComponentDoc {
            base: match p.base {
                BaseTag::Y1 => "Y1".into(),
                BaseTag::Y2 => "Y2".into(),
                BaseTag::Y4 => "Y4".into(),
            },
            rank: p.rank(),
            gram: p.lattice.gram().iter().flatten().copied().collect(),
            curves: p
                .curves
                .iter()
                .map(|(name, c)| CurveDoc {
                    name: name.clone(),
                    coeffs: c.class.0.clone(),
                    role: match c.role {
                        Role::Root => "root".into(),
                        Role::Exceptional => "exceptional".into(),
                        Role::Interior => "interior".into(),
                    },
                    square: p.pairing(&c.class, &c.class),
                })
                .collect(),
            boundary: p
                .boundary
                .iter()
                .map(|s| SideDoc {
                    name: s.name.clone(),
                    coeffs: s.class.0.clone(),
                    square: p.pairing(&s.class, &s.class),
                    anchor: s
                        .anchor
                        .iter()
                        .map(|(curve, &mult)| AnchorDoc { curve: curve.clone(), mult })
                        .collect(),
                    nodes: s.nodes.clone(),
                })
                .collect(),
            canonical: p.canonical.0.clone(),
            latents: p.latents.iter().map(latent_doc).collect(),
            retired: p.retired.iter().map(latent_doc).collect(),
        })
        .collect();
    let gluings = state
        .gluings
        .iter()
        .map(|g| GluingDoc {
            a: EndDoc { component: g.a.0, side: g.a.1.clone() },
            b: EndDoc { component: g.b.0, side: g.b.1.clone() },
            kind: if g.is_self() { "self".into() } else { "cross".into() },
            conserved_sum: state.side_square(&g.a) + state.side_square(&g.b),
        })
        .collect();
    StateDocument {
        schema: SCHEMA.into(),
        class: match state.class {
            StateClass::P => "P".into(),
            StateClass::T => "T".into(),
        },
        components,
        gluings,
    }
}

fn latent_doc(w: &Latent) -> LatentDoc {
    LatentDoc {
        node: w.node.clone(),
        coeffs: w.class.0.clone(),
        node_mult: w.node_mult,
        crossings: w
            .crossings
            .iter()
            .map(|(curve, &mult)| AnchorDoc { curve: curve.clone(), mult })
            .collect(),
        contact: w
            .contact
            .iter()
            .map(|(curve, &mult)| AnchorDoc { curve: curve.clone(), mult })
            .collect(),
    }
}

fn parse(doc: &StateDocument) -> Result<State, String> {
    if doc.schema != SCHEMA {
        return Err(format!("unsupported schema {:?}", doc.schema));
    }
    let class = match doc.class.as_str() {
        "P" => StateClass::P,
        "T" => StateClass::T,
        other => return Err(format!("unknown class tag {other:?}")),
    };
    let mut comps = Vec::new();
    for c in &doc.components {
        if c.gram.len() != c.rank * c.rank {
            return Err("gram matrix does not match the rank".into());
        }
        let gram: Vec<Vec<Int>> = c.gram.chunks(c.rank).map(|r| r.to_vec()).collect();
        let lattice = Lattice::new(gram);
        let base = match c.base.as_str() {
            "Y1" => BaseTag::Y1,
            "Y2" => BaseTag::Y2,
            "Y4" => BaseTag::Y4,
            other => return Err(format!("unknown base tag {other:?}")),
        };
        let mut curves = BTreeMap::new();
        for cv in &c.curves {
            let role = match cv.role.as_str() {
                "root" => Role::Root,
                "exceptional" => Role::Exceptional,
                "interior" => Role::Interior,
                other => return Err(format!("unknown role {other:?}")),
            };
            curves.insert(
                cv.name.clone(),
                Curve { class: Class(cv.coeffs.clone()), role },
            );
        }
        let boundary = c
            .boundary
            .iter()
            .map(|s| BoundarySide {
                name: s.name.clone(),
                class: Class(s.coeffs.clone()),
                anchor: s
                    .anchor
                    .iter()
                    .map(|a| (a.curve.clone(), a.mult))
                    .collect(),
                nodes: s.nodes.clone(),
            })
            .collect();
        comps.push(Pair {
            lattice,
            base,
            curves,
            boundary,
            canonical: Class(c.canonical.clone()),
            latents: c.latents.iter().map(parse_latent).collect(),
            retired: c.retired.iter().map(parse_latent).collect(),
        });
    }
    let gluings = doc
        .gluings
        .iter()
        .map(|g| Gluing {
            a: (g.a.component, g.a.side.clone()),
            b: (g.b.component, g.b.side.clone()),
        })
        .collect();
    State::from_parts(comps, gluings, class)
}

fn parse_latent(w: &LatentDoc) -> Latent {
    Latent {
        node: w.node.clone(),
        class: Class(w.coeffs.clone()),
        node_mult: w.node_mult,
        crossings: w.crossings.iter().map(|a| (a.curve.clone(), a.mult)).collect(),
        contact: w.contact.iter().map(|a| (a.curve.clone(), a.mult)).collect(),
    }
}

#[derive(Serialize)]
struct ClassRow {
    id: usize,
    class: String,
    triple: Option<[Int; 3]>,
    t_coordinates: Option<[Int; 2]>,
    stratum: Option<String>,
    symmetric: bool,
    orbit_length: usize,
}

#[derive(Serialize)]
struct ClassTable {
    rows: Vec<ClassRow>,
    total: usize,
    class_p: usize,
    class_t: usize,
    symmetric: usize,
}

fn enumerate_table(filter: ClassFilter, projective_only: bool) -> ClassTable {
    let classes = bfs(filter, projective_only);
    let mut rows = Vec::new();
    let mut class_p = 0;
    let mut class_t = 0;
    let mut symmetric = 0;
    for (id, st) in classes.values().enumerate() {
        let sym = is_symmetric(st);
        if sym {
            symmetric += 1;
        }
        match st.class {
            StateClass::P => class_p += 1,
            StateClass::T => class_t += 1,
        }
        rows.push(ClassRow {
            id,
            class: format!("{:?}", st.class),
            triple: triple_of(st),
            t_coordinates: (st.class == StateClass::T).then(|| t_coordinates(st)),
            stratum: (st.class == StateClass::P)
                .then(|| format!("{:?}", p_stratum(st).expect("class P stratum"))),
            symmetric: sym,
            orbit_length: orbit_length(st),
        });
    }
    ClassTable { total: rows.len(), rows, class_p, class_t, symmetric }
}

fn run() -> Result<(), (u8, String)> {
    let cli = Cli::parse();
    match cli.command {
        Command::Build { reference } => {
            let st = match reference {
                RefState::Yp => State::build_yp(),
                RefState::Yt => State::build_yt(),
            };
            let doc = emit(&st);
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("document serializes")
            );
        }
        Command::Enumerate { class, projective_only, format } => {
            let filter = match class {
                ClassArg::P => ClassFilter::P,
                ClassArg::T => ClassFilter::T,
                ClassArg::Both => ClassFilter::Both,
            };
            let table = enumerate_table(filter, projective_only);
            match format {
                TableFormat::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&table).expect("table serializes")
                ),
                TableFormat::Csv => {
                    println!("id,class,triple,t_coordinates,stratum,symmetric,orbit_length");
                    for r in &table.rows {
                        let triple = r
                            .triple
                            .map(|t| format!("({} {} {})", t[0], t[1], t[2]))
                            .unwrap_or_default();
                        let coords = r
                            .t_coordinates
                            .map(|t| format!("({} {})", t[0], t[1]))
                            .unwrap_or_default();
                        println!(
                            "{},{},{},{},{},{},{}",
                            r.id,
                            r.class,
                            triple,
                            coords,
                            r.stratum.clone().unwrap_or_default(),
                            r.symmetric,
                            r.orbit_length
                        );
                    }
                    println!(
                        "total,{},P,{},T,{},symmetric,{}",
                        table.total, table.class_p, table.class_t, table.symmetric
                    );
                }
            }
        }
        Command::CountCones => {
            let census = cone_census();
            let graph = build_flop_graph();
            println!(
                "{} (P: {}, T: {})",
                census.total(),
                census.class_p,
                census.class_t
            );
            println!("labelled graph nodes: {}", graph.nodes.len());
            if graph.nodes.len() != census.total() {
                return Err((
                    1,
                    format!(
                        "orbit sum {} disagrees with labelled node count {}",
                        census.total(),
                        graph.nodes.len()
                    ),
                ));
            }
        }
        Command::SecondaryFan => {
            let graph = build_flop_graph();
            let components = secondary_fan(&graph);
            let sizes: Vec<usize> = components.iter().map(|c| c.len()).collect();
            println!("{} components, sizes {:?}", components.len(), sizes);
        }
        Command::FlopGraph { format } => {
            let graph = build_flop_graph();
            let mut iso_ids: BTreeMap<&dnv_core::enumeration::IsoClassKey, usize> =
                BTreeMap::new();
            for node in &graph.nodes {
                let next = iso_ids.len();
                iso_ids.entry(&node.iso).or_insert(next);
            }
            match format {
                GraphFormat::Dot => {
                    println!("graph morifan {{");
                    for (i, node) in graph.nodes.iter().enumerate() {
                        println!(
                            "  n{} [class=\"{:?}\", iso={}];",
                            i, node.class, iso_ids[&node.iso]
                        );
                    }
                    for e in &graph.edges {
                        println!(
                            "  n{} -- n{} [type=\"{}\", move=\"{}\"];",
                            e.a,
                            e.b,
                            if e.type_ii { "II" } else { "I" },
                            e.descriptor
                        );
                    }
                    println!("}}");
                }
                GraphFormat::Json => {
                    #[derive(Serialize)]
                    struct NodeDoc {
                        id: usize,
                        class: String,
                        iso: usize,
                    }
                    #[derive(Serialize)]
                    struct EdgeDoc {
                        a: usize,
                        b: usize,
                        flop: String,
                        descriptor: String,
                    }
                    #[derive(Serialize)]
                    struct GraphDoc {
                        nodes: Vec<NodeDoc>,
                        edges: Vec<EdgeDoc>,
                    }
                    let doc = GraphDoc {
                        nodes: graph
                            .nodes
                            .iter()
                            .enumerate()
                            .map(|(id, n)| NodeDoc {
                                id,
                                class: format!("{:?}", n.class),
                                iso: iso_ids[&n.iso],
                            })
                            .collect(),
                        edges: graph
                            .edges
                            .iter()
                            .map(|e| EdgeDoc {
                                a: e.a,
                                b: e.b,
                                flop: if e.type_ii { "II".into() } else { "I".into() },
                                descriptor: e.descriptor.clone(),
                            })
                            .collect(),
                    };
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&doc).expect("graph serializes")
                    );
                }
            }
        }
        Command::Check { path } => {
            let text = if path == "-" {
                let mut buf = String::new();
                std::io::stdin()
                    .read_to_string(&mut buf)
                    .map_err(|e| (2, format!("reading standard input: {e}")))?;
                buf
            } else {
                std::fs::read_to_string(&path).map_err(|e| (2, format!("reading {path}: {e}")))?
            };
            let doc: StateDocument =
                serde_json::from_str(&text).map_err(|e| (2, format!("parsing document: {e}")))?;
            let st = parse(&doc).map_err(|e| (2, format!("assembling state: {e}")))?;
            let verdict = decide(&st);
            let cert = lp_feasible(&st);
            println!(
                "criterion: {}",
                match &verdict {
                    Ok(v) => v.to_string(),
                    Err(e) => format!("uncovered ({e})"),
                }
            );
            println!("lp: {}", cert.is_some());
            if let Some(cert) = &cert {
                verify_certificate(&st, cert).map_err(|e| (1, format!("bad certificate: {e}")))?;
                println!("certificate witness: {}", cert.witness);
                for (i, comp) in cert.coeffs.iter().enumerate() {
                    let terms: Vec<String> =
                        comp.iter().map(|(id, c)| format!("{c}*{id}")).collect();
                    println!("  component {i}: {}", terms.join(" + "));
                }
            }
            if let Ok(v) = verdict {
                if v != cert.is_some() {
                    return Err((1, "criterion and oracle disagree".into()));
                }
            }
        }
        Command::Verify => {
            let classes = bfs(ClassFilter::Both, true);
            let mut failures = Vec::new();
            for (i, st) in classes.values().enumerate() {
                if let Err(e) = st.validate() {
                    failures.push(format!("class {i}: invalid state: {e}"));
                }
                let lp = lp_feasible(st);
                match decide(st) {
                    Ok(v) => {
                        if v != lp.is_some() {
                            failures.push(format!("class {i}: criterion disagrees with oracle"));
                        }
                    }
                    Err(e) => failures.push(format!("class {i}: uncovered pattern: {e}")),
                }
                if lp.is_some() {
                    match glue_certificates(st) {
                        Ok(cert) => {
                            if let Err(e) = verify_certificate(st, &cert) {
                                failures.push(format!("class {i}: glued certificate fails: {e}"));
                            }
                        }
                        Err(e) => failures.push(format!("class {i}: glue fails: {e}")),
                    }
                }
            }
            let census = cone_census();
            let graph = build_flop_graph();
            if census.total() != graph.nodes.len() {
                failures.push(format!(
                    "cone census {} vs labelled nodes {}",
                    census.total(),
                    graph.nodes.len()
                ));
            }
            println!(
                "verified {} classes, {} cones, {} failures",
                classes.len(),
                census.total(),
                failures.len()
            );
            for f in &failures {
                println!("FAIL {f}");
            }
            if !failures.is_empty() {
                return Err((1, format!("{} verification failures", failures.len())));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
