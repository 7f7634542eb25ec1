mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use rtdich::abelian_gauss::{
    gauss_sum_bracket, gauss_sum_fast, rt_pointed_surgery, tv_pointed_trivial, FinAbGroup, MetricGroup, TvInput,
};
use rtdich::cocycle::{classify_dichotomy, is_trivializable, psi_trilinear, validate_cocycle, Classification, Cocycle, DichotomyInput};
use rtdich::cyclotomic::sqrt_of_integer;
use rtdich::formats::{emit_linking, emit_weights, parse_document, Document};
use rtdich::graph_manifolds::{
    first_homology, plumbing_presentation, rt_center_product, rt_graph_manifold, rt_half_edge_sum, signature_data,
    SurgeryPresentation,
};
use rtdich::graph_partition::{edge_weight_matrix, is_mbr1, partition_function, rectangular_blocks, Graph, WeightMatrix};
use rtdich::modular_data::{validate_modular_data, ModularData};
use rtdich::{Budget, CycNum};

use output::{Format, Out};

/// Exact quantum invariants of graph manifolds and dichotomy classifiers.
#[derive(Parser, Debug)]
#[command(name = "rtdich", version)]
struct Cli {
    /// Log2 of the largest number of terms one enumeration may visit.
    #[arg(long, global = true, default_value_t = 24)]
    budget: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every consistency check on modular data, a metric group or a cocycle.
    Validate { file: PathBuf },
    /// RT complexity label of modular data.
    Classify { md: PathBuf },
    /// TV complexity label of a pointed input (group, cocycle).
    ClassifyTv { group: PathBuf, cocycle: PathBuf },
    /// Edge-weight matrix A(i,j) = S_{i,j*}/(d_i d_j).
    Weights { md: PathBuf },
    /// Partition function Z_A(G).
    Partition { weights: PathBuf, graph: PathBuf },
    /// Z(M_G) through the graph formula.
    EvalGraph { md: PathBuf, graph: PathBuf },
    /// Z(M_G) through the half-edge state sum.
    EvalHalfedge { md: PathBuf, graph: PathBuf },
    /// Z(M) of a pointed category by surgery; a graph is plumbed first.
    EvalSurgery {
        mg: PathBuf,
        input: PathBuf,
        /// Global dimension D as a token; defaults to the positive √|Λ|.
        #[arg(long)]
        d: Option<String>,
    },
    /// Z_{Z(C)}(M_G) of the center.
    EvalCenter { md: PathBuf, graph: PathBuf },
    /// Turaev-Viro invariant of Vec_Λ.
    EvalTv { group: PathBuf, input: PathBuf },
    /// Gauss sum of a linking matrix (or a plumbed graph) by both engines.
    Gauss { mg: PathBuf, matrix: PathBuf },
    /// Multiplicative block-rank-one test.
    Mbr1 { weights: PathBuf },
    /// Linking matrix of the plumbing of a graph.
    Plumb { graph: PathBuf },
    /// H₁ and inertia of a linking matrix.
    Homology { matrix: PathBuf },
    /// ψ on generator triples and trivializability.
    Psi { group: PathBuf, cocycle: PathBuf },
}

fn load(path: &Path) -> Result<Document> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_document(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn wrong(path: &Path, doc: &Document, wanted: &str) -> anyhow::Error {
    anyhow!("{}: expected {wanted}, found {}", path.display(), doc.kind())
}

fn modular(path: &Path) -> Result<ModularData> {
    match load(path)? {
        Document::Modular(md) => Ok(md),
        other => Err(wrong(path, &other, "modular data")),
    }
}

fn graph(path: &Path) -> Result<Graph> {
    match load(path)? {
        Document::Graph(g) => Ok(g),
        other => Err(wrong(path, &other, "a graph")),
    }
}

fn metric(path: &Path) -> Result<MetricGroup> {
    match load(path)? {
        Document::Metric(mg) => Ok(mg),
        other => Err(wrong(path, &other, "a metric group")),
    }
}

fn group(path: &Path) -> Result<FinAbGroup> {
    match load(path)? {
        Document::Group(g) => Ok(g),
        Document::Metric(mg) => Ok(mg.group().clone()),
        other => Err(wrong(path, &other, "a group")),
    }
}

/// A cocycle whose group must match the separately given one.
fn cocycle(group_path: &Path, path: &Path) -> Result<Cocycle> {
    let g = group(group_path)?;
    let c = match load(path)? {
        Document::Cocycle(c) => c,
        Document::Group(h) => Cocycle::trivial(h),
        other => return Err(wrong(path, &other, "a cocycle")),
    };
    if c.group() != &g {
        bail!(
            "{}: cocycle is on orders {:?}, group file gives {:?}",
            path.display(),
            c.group().orders(),
            g.orders()
        );
    }
    Ok(c)
}

fn weights(path: &Path) -> Result<WeightMatrix> {
    match load(path)? {
        Document::Weights(a) => Ok(a),
        Document::Modular(md) => Ok(edge_weight_matrix(&md)?),
        other => Err(wrong(path, &other, "modular data or a weight matrix")),
    }
}

/// A linking matrix, or a graph passed through the plumbing construction.
fn presentation(path: &Path) -> Result<SurgeryPresentation> {
    match load(path)? {
        Document::Linking(sp) => Ok(sp),
        Document::Graph(g) => Ok(plumbing_presentation(&g)?),
        other => Err(wrong(path, &other, "a linking matrix or a graph")),
    }
}

fn classification(out: &mut Out, c: &Classification) {
    out.record(
        c.to_string(),
        json!({ "label": c.label(), "reason": c.reason(), "theorem": c.theorem }),
    );
}

/// Runs one command; `Ok(false)` means it completed but a check failed.
fn run(cli: &Cli, out: &mut Out) -> Result<bool> {
    let budget = Budget(cli.budget);
    match &cli.command {
        Command::Validate { file } => {
            let report = match load(file)? {
                Document::Modular(md) => validate_modular_data(&md),
                Document::Metric(mg) => mg.validate(),
                Document::Cocycle(c) => validate_cocycle(&c),
                other => return Err(wrong(file, &other, "modular data, a metric group or a cocycle")),
            };
            out.report(&report);
            return Ok(report.all_passed());
        }
        Command::Classify { md } => {
            let md = modular(md)?;
            classification(out, &classify_dichotomy(DichotomyInput::Modular(&md))?);
        }
        Command::ClassifyTv { group, cocycle: path } => {
            let c = cocycle(group, path)?;
            classification(out, &classify_dichotomy(DichotomyInput::Pointed(&c))?);
        }
        Command::Weights { md } => {
            let a = edge_weight_matrix(&modular(md)?)?;
            out.document("weight matrix", &emit_weights(&a));
        }
        Command::Partition { weights: w, graph: g } => {
            let z = partition_function(&weights(w)?, &graph(g)?, budget)?;
            out.value("Z_A(G)", &z);
        }
        Command::EvalGraph { md, graph: g } => {
            let z = rt_graph_manifold(&modular(md)?, &graph(g)?, budget)?;
            out.value("Z(M_G)", &z);
        }
        Command::EvalHalfedge { md, graph: g } => {
            let z = rt_half_edge_sum(&modular(md)?, &graph(g)?, budget)?;
            out.value("Z(M_G)", &z);
        }
        Command::EvalSurgery { mg, input, d } => {
            let mg = metric(mg)?;
            let d = match d {
                Some(token) => CycNum::parse_token(token).map_err(|e| anyhow!("--d: {e}"))?,
                None => sqrt_of_integer(mg.group().size() as u64),
            };
            let z = rt_pointed_surgery(&mg, &d, &presentation(input)?)?;
            out.value("Z(M)", &z);
        }
        Command::EvalCenter { md, graph: g } => {
            let z = rt_center_product(&modular(md)?, &graph(g)?, budget)?;
            out.value("Z_center(M_G)", &z);
        }
        Command::EvalTv { group: gp, input } => {
            let lambda = group(gp)?;
            let z = match load(input)? {
                Document::Graph(g) => tv_pointed_trivial(&lambda, TvInput::Graph(&g), budget)?,
                Document::Linking(sp) => tv_pointed_trivial(&lambda, TvInput::Presentation(&sp), budget)?,
                other => return Err(wrong(input, &other, "a graph or a linking matrix")),
            };
            out.value("|M|", &z);
        }
        Command::Gauss { mg, matrix } => {
            let mg = metric(mg)?;
            let b = presentation(matrix)?;
            let fast = gauss_sum_fast(&mg, b.matrix())?;
            let bracket = gauss_sum_bracket(&mg, b.matrix(), budget)?;
            out.value("fast", &fast);
            out.value("bracket", &bracket);
            let agree = fast == bracket;
            out.record(format!("agree: {}", if agree { "yes" } else { "NO" }), json!({ "agree": agree }));
            return Ok(agree);
        }
        Command::Mbr1 { weights: w } => {
            let a = weights(w)?;
            let m = is_mbr1(&a);
            let blocks = rectangular_blocks(&a);
            let mut text = format!("mbr1: {}", m.mbr1);
            if let Some(r) = m.witness_r {
                text.push_str(&format!("\nr: {r}"));
            }
            if let Some((i, j, i2, j2)) = m.violation {
                text.push_str(&format!("\nviolation: rows {{{i},{i2}}} cols {{{j},{j2}}}"));
            }
            match &blocks {
                Some(bs) => {
                    for b in bs {
                        text.push_str(&format!("\nblock rows {:?} cols {:?}", b.rows, b.cols));
                    }
                }
                None => text.push_str("\nsupport not rectangular"),
            }
            let json_blocks = blocks.map(|bs| bs.iter().map(|b| json!({ "rows": b.rows, "cols": b.cols })).collect::<Vec<_>>());
            out.record(
                text,
                json!({ "mbr1": m.mbr1, "r": m.witness_r, "violation": m.violation, "blocks": json_blocks }),
            );
        }
        Command::Plumb { graph: g } => {
            let sp = plumbing_presentation(&graph(g)?)?;
            out.document("linking matrix", &emit_linking(&sp));
        }
        Command::Homology { matrix } => {
            let sp = presentation(matrix)?;
            let h = first_homology(&sp);
            let (bp, bm, b0) = signature_data(&sp);
            let torsion: Vec<String> = h.torsion.iter().map(|t| t.to_string()).collect();
            let mut text = format!("H1: Z^{}", h.free_rank);
            for t in &torsion {
                text.push_str(&format!(" + Z/{t}"));
            }
            text.push_str(&format!("\nsignature: b+ = {bp}, b- = {bm}, b0 = {b0}"));
            out.record(
                text,
                json!({ "free_rank": h.free_rank, "torsion": torsion, "signature": [bp, bm, b0] }),
            );
        }
        Command::Psi { group: gp, cocycle: path } => {
            let c = cocycle(gp, path)?;
            let g = c.group();
            let rank = g.rank();
            for i in 0..rank {
                for j in i + 1..rank {
                    for k in j + 1..rank {
                        let v = psi_trilinear(&c, g.generator(i), g.generator(j), g.generator(k));
                        out.value(&format!("psi(e{},e{},e{})", i + 1, j + 1, k + 1), &v);
                    }
                }
            }
            let t = is_trivializable(&c);
            let witness = t.witness.map(|w| w.map(|x| g.coords(x)));
            out.record(
                format!("trivializable: {}", t.trivializable),
                json!({ "trivializable": t.trivializable, "witness": witness }),
            );
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let mut out = Out::new(cli.format, name);
    let result = run(&cli, &mut out);
    print!("{}", out.finish());
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Classify { .. } => "classify",
        Command::ClassifyTv { .. } => "classify-tv",
        Command::Weights { .. } => "weights",
        Command::Partition { .. } => "partition",
        Command::EvalGraph { .. } => "eval-graph",
        Command::EvalHalfedge { .. } => "eval-halfedge",
        Command::EvalSurgery { .. } => "eval-surgery",
        Command::EvalCenter { .. } => "eval-center",
        Command::EvalTv { .. } => "eval-tv",
        Command::Gauss { .. } => "gauss",
        Command::Mbr1 { .. } => "mbr1",
        Command::Plumb { .. } => "plumb",
        Command::Homology { .. } => "homology",
        Command::Psi { .. } => "psi",
    }
}
