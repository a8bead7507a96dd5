//! The `webmaps` command line.
//!
//! Exit codes: 0 success, 1 parse or I/O error, 2 region mismatch, 3 a
//! `check` that found the map not good. Diagnostics go to standard error.

use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::algebra::{complement, join, meet_from_maps};
use crate::dot::to_dot;
use crate::error::{Error, Result};
use crate::graph::{load_graph_files, LabeledGraph, NodeId};
use crate::mapper::{check, good_map, k_map, score_nodes, Map, ScoreFn};
use crate::navlang::{evaluate, parse, Semantics};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REGION_MISMATCH: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "webmaps",
    version,
    about = "Good maps of graph regions and their algebra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Edge file: src<TAB>label<TAB>dst per line.
    #[arg(short = 'g', long = "graph")]
    graph: PathBuf,
    /// Attribute file: node<TAB>key<TAB>value per line.
    #[arg(short = 'a', long = "attrs")]
    attrs: Option<PathBuf>,
}

impl GraphArgs {
    fn load(&self) -> Result<LabeledGraph> {
        load_graph_files(&self.graph, self.attrs.as_deref())
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a navigational expression and write the region and the selected nodes.
    Region {
        #[command(flatten)]
        graph: GraphArgs,
        /// Node to start from.
        #[arg(long)]
        seed: String,
        /// Expression text, or @FILE to read it from a file.
        #[arg(long)]
        expr: String,
        /// `visited` keeps every edge explored, `successful` only edges on
        /// matching walks.
        #[arg(long, default_value = "visited")]
        sem: Semantics,
        /// Region edge file (standard output when omitted).
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Distinguished node list: the selected nodes plus the seed.
        #[arg(long)]
        selected: Option<PathBuf>,
    },
    /// Compute the good map over a node list.
    Goodmap {
        #[command(flatten)]
        graph: GraphArgs,
        /// Newline-separated node ids.
        #[arg(short = 'n', long = "nodes")]
        nodes: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Compute the good map over all nodes scoring at least K.
    Kmap {
        #[command(flatten)]
        graph: GraphArgs,
        /// indegree, outdegree or pagerank.
        #[arg(long)]
        score: ScoreFn,
        #[arg(short = 'k', allow_hyphen_values = true)]
        k: f64,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Join two maps: the good map over the union of their nodes.
    Join {
        #[command(flatten)]
        graph: GraphArgs,
        first: PathBuf,
        second: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Meet two maps using only the map files.
    Meet {
        first: PathBuf,
        second: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// The good map over every region node missing from the map.
    Complement {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(short = 'm', long = "map")]
        map: PathBuf,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Print the map predicates; exit 0 iff the map is good.
    Check {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(short = 'm', long = "map")]
        map: PathBuf,
    },
    /// Print node<TAB>score for every node.
    Score {
        #[command(flatten)]
        graph: GraphArgs,
        /// indegree, outdegree or pagerank.
        #[arg(long)]
        score: ScoreFn,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Render the region, and optionally a map over it, as Graphviz DOT.
    ExportDot {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(short = 'm', long = "map")]
        map: Option<PathBuf>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

/// Runs the command line with `argv[0]` being the program name.
pub fn run<S: AsRef<str>>(argv: &[S]) -> i32 {
    let argv: Vec<&str> = argv.iter().map(AsRef::as_ref).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("webmaps: {e}");
            match e {
                Error::RegionMismatch { .. } => EXIT_REGION_MISMATCH,
                _ => EXIT_ERROR,
            }
        }
    }
}

fn emit(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut out = BufWriter::new(File::create(p)?);
            write(&mut out)?;
            out.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            write(&mut out)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn read_node_list(path: &Path) -> Result<BTreeSet<NodeId>> {
    let mut nodes = BTreeSet::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        nodes.insert(NodeId::new(line).map_err(|m| Error::Parse {
            line: i + 1,
            message: m,
        })?);
    }
    Ok(nodes)
}

fn expression_text(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => Ok(fs::read_to_string(path)?.trim_end().to_owned()),
        None => Ok(arg.to_owned()),
    }
}

fn write_map(map: &Map, output: Option<&Path>) -> Result<()> {
    emit(output, |w| map.write(w))
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Region {
            graph,
            seed,
            expr,
            sem,
            output,
            selected,
        } => {
            let g = graph.load()?;
            let expr = parse(&expression_text(&expr)?)?;
            let seed = NodeId::new(seed).map_err(|m| Error::Parse {
                line: 0,
                message: m,
            })?;
            let result = evaluate(&g, &seed, &expr, sem)?;
            emit(output.as_deref(), |w| result.region.write_edges(w))?;
            if let Some(path) = selected {
                let mut nodes = result.selected.clone();
                nodes.insert(result.seed.clone());
                emit(Some(&path), |w| {
                    for n in &nodes {
                        writeln!(w, "{n}")?;
                    }
                    Ok(())
                })?;
            }
        }
        Command::Goodmap {
            graph,
            nodes,
            output,
        } => {
            let g = graph.load()?;
            let n = read_node_list(&nodes)?;
            write_map(&good_map(&g, &n)?, output.as_deref())?;
        }
        Command::Kmap {
            graph,
            score,
            k,
            output,
        } => {
            let g = graph.load()?;
            let scores = score_nodes(&g, score);
            write_map(&k_map(&g, &scores, k)?, output.as_deref())?;
        }
        Command::Join {
            graph,
            first,
            second,
            output,
        } => {
            let g = graph.load()?;
            let m1 = Map::read_file(&first)?;
            let m2 = Map::read_file(&second)?;
            write_map(&join(&m1, &m2, &g)?, output.as_deref())?;
        }
        Command::Meet {
            first,
            second,
            output,
        } => {
            // No region is available here to verify goodness; map files are
            // taken to be good maps as written by this tool.
            let m1 = Map::read_file(&first)?.assume_good();
            let m2 = Map::read_file(&second)?.assume_good();
            write_map(&meet_from_maps(&m1, &m2)?, output.as_deref())?;
        }
        Command::Complement { graph, map, output } => {
            let g = graph.load()?;
            let m = Map::read_file(&map)?;
            write_map(&complement(&m, &g)?, output.as_deref())?;
        }
        Command::Check { graph, map } => {
            let g = graph.load()?;
            let m = Map::read_file(&map)?;
            let v = check(&m, &g)?;
            println!("map\t{}", v.is_map);
            println!("complete\t{}", v.is_complete);
            println!("route-complete\t{}", v.is_route_complete);
            println!("non-redundant\t{}", v.is_non_redundant);
            if !v.is_good() {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
        Command::Score {
            graph,
            score,
            output,
        } => {
            let g = graph.load()?;
            let table = score_nodes(&g, score);
            emit(output.as_deref(), |w| {
                for (n, s) in table.iter() {
                    writeln!(w, "{n}\t{s}")?;
                }
                Ok(())
            })?;
        }
        Command::ExportDot { graph, map, output } => {
            let g = graph.load()?;
            let m = map.as_deref().map(Map::read_file).transpose()?;
            if let Some(m) = &m {
                if m.region() != g.region_id() {
                    return Err(Error::RegionMismatch {
                        expected: g.region_id().clone(),
                        found: m.region().clone(),
                    });
                }
            }
            let dot = to_dot(&g, m.as_ref());
            emit(output.as_deref(), |w| w.write_all(dot.as_bytes()))?;
        }
    }
    Ok(EXIT_OK)
}
