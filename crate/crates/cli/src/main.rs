//! `polymu` command-line front end.
//!
//! Exit codes: 0 on a completed run, 2 on bad input, 3 when two internal
//! procedures that must agree do not.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use polymu::automata::{accepts, find_pumping_pair, formula_to_apt};
use polymu::bisim::{
    bisimilar, factor, largest_d_bisimulation, power_conditions, quotient, BisimError,
    PowerMethod,
};
use polymu::eval::Evaluator;
use polymu::graph::{
    example_graph, power, product, read_graph, unfold, write_graph, FiniteTree, LabeledGraph,
    Signature,
};
use polymu::logic::{monofy, parse, polyfy, print, Formula};
use polymu::pumping::{gen_rword_tree, pump, Letter};
use polymu::queries::{
    one_letter_with_budget, one_lifted_with_budget, two_lifted_with_budget,
    two_letter_with_budget, NonUnivVerdict, QueryError, DEFAULT_STEP_BUDGET,
};
use polymu::xcheck::{run_all, run_criterion, RunConfig, SuiteReport};

#[derive(Parser)]
#[command(name = "polymu", version, about = "Polyadic modal mu-calculus toolkit")]
struct Cli {
    /// Write results here instead of stdout.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Model-check a formula of the given arity at the root tuple.
    Mc {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long, default_value_t = 1)]
        arity: usize,
        /// Print the satisfying tuples instead of the verdict.
        #[arg(long)]
        tuples: bool,
    },
    /// Decide whether the roots of two graphs are bisimilar.
    Bisim {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        graph2: PathBuf,
    },
    /// Print the bisimulation quotient.
    Quotient {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Print the largest d-bisimulation of a lifted graph.
    Dbisim {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Decide whether a lifted graph is bisimilar to a d-th power.
    DetectPower {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short = 'd', long = "dimension")]
        d: usize,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// Also print the three conditions.
        #[arg(long)]
        verbose: bool,
    },
    /// Print the i-th factor of a lifted graph.
    Factor {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        component: usize,
    },
    /// Print the d-th power of a graph.
    Power {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short = 'd', long = "dimension")]
        d: usize,
    },
    /// Print the product of the given graphs, in order.
    Product {
        #[arg(long, required = true)]
        graph: Vec<PathBuf>,
        #[arg(long)]
        graph2: Option<PathBuf>,
    },
    /// Print the tree unfolding up to a depth.
    Unfold {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Translate a d-rooted formula of the given arity to the lifted signature.
    Mono {
        #[command(flatten)]
        sig: SigArgs,
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long)]
        arity: usize,
    },
    /// Translate a lifted formula back to a d-rooted formula.
    Poly {
        #[command(flatten)]
        sig: SigArgs,
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(short = 'd', long = "dimension")]
        d: usize,
    },
    /// Non-universality of a 1-letter NFA.
    Nonuniv1 {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: usize,
    },
    /// The lifted 1-letter query on a lifted graph.
    Nonuniv1Lifted {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short = 'd', long = "dimension")]
        d: usize,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: usize,
    },
    /// Non-universality of a 2-letter NFA.
    Nonuniv2 {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: usize,
    },
    /// The lifted 2-letter query on a lifted graph.
    Nonuniv2Lifted {
        #[arg(long)]
        graph: PathBuf,
        #[arg(short = 'd', long = "dimension")]
        d: usize,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: usize,
    },
    /// Pump a tree between two nodes of a root path.
    Pump {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        path: PathArg,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        k: usize,
    },
    /// Find a pumping pair for the automaton of a formula along a root path.
    PumpFind {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
        #[command(flatten)]
        path: PathArg,
    },
    /// Print the parity tree automaton of a closed formula.
    Apt {
        #[command(flatten)]
        sig: SigArgs,
        #[command(flatten)]
        formula: FormulaArg,
        /// Report whether the automaton accepts the `--graph` tree.
        #[arg(long, requires = "graph")]
        check: bool,
    },
    /// Emit a fixture.
    Gen {
        #[command(subcommand)]
        fixture: Fixture,
    },
    /// Run the randomized cross-checks.
    Xcheck {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Sample count for every randomized check.
        #[arg(long)]
        iters: Option<usize>,
        /// Run only this check (1 to 12).
        #[arg(long)]
        criterion: Option<usize>,
        #[arg(long, default_value_t = 5)]
        max_nodes: usize,
        #[arg(long, default_value_t = 12)]
        max_formula_size: usize,
        #[arg(long, default_value_t = 2)]
        max_d: usize,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        budget: usize,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum Fixture {
    /// The three-node ({a},{f}) example graph.
    Ex1,
    /// The square of the example graph.
    PowerEx1,
    /// A full word tree over ({a,b},{f}).
    Rword {
        /// Letters `colors:action` separated by commas, colors joined by `+`,
        /// e.g. `:a,f:b`.
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 2)]
        branching: usize,
        /// Defaults to one less than the word length.
        #[arg(long)]
        depth: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Dbisim,
    Logic,
    Both,
}

#[derive(Args)]
struct FormulaArg {
    /// Formula text, or `@PATH` to read it from a file.
    #[arg(long = "formula")]
    text: String,
}

#[derive(Args)]
struct PathArg {
    /// Node ids of a path starting at the root, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    path: Vec<String>,
}

/// Where a formula's signature comes from: a graph, or explicit lists.
#[derive(Args)]
struct SigArgs {
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', conflicts_with = "graph")]
    actions: Vec<String>,
    #[arg(long, value_delimiter = ',', conflicts_with = "graph")]
    colors: Vec<String>,
}

enum Failure {
    Input(String),
    Disagreement(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn load_graph(path: &Path) -> Result<LabeledGraph, Failure> {
    let bytes = fs::read(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    read_graph(&bytes).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<FiniteTree, Failure> {
    let g = load_graph(path)?;
    FiniteTree::from_graph(g).map_err(|e| input(format!("{}: {e}", path.display())))
}

impl FormulaArg {
    fn text(&self) -> Result<String, Failure> {
        match self.text.strip_prefix('@') {
            Some(path) => fs::read_to_string(path)
                .map(|s| s.trim().to_string())
                .map_err(|e| input(format!("{path}: {e}"))),
            None => Ok(self.text.clone()),
        }
    }

    fn parse(&self, sig: &Signature, arity: usize) -> Result<Formula, Failure> {
        Ok(parse(&self.text()?, sig, arity)?)
    }
}

impl SigArgs {
    /// The base signature; a lifted graph contributes its base.
    fn base(&self) -> Result<Signature, Failure> {
        match &self.graph {
            Some(path) => {
                let g = load_graph(path)?;
                Ok(match g.signature().lifted_shape() {
                    Some(shape) => shape.base,
                    None => g.signature().clone(),
                })
            }
            None if self.actions.is_empty() && self.colors.is_empty() => {
                Err(input("give --graph or --actions/--colors"))
            }
            None => Ok(Signature::new(self.actions.clone(), self.colors.clone())?),
        }
    }
}

fn path_indices(tree: &FiniteTree, ids: &[String]) -> Result<Vec<usize>, Failure> {
    ids.iter()
        .map(|id| {
            tree.graph()
                .node_index(id)
                .ok_or_else(|| input(format!("unknown node {id:?} in --path")))
        })
        .collect()
}

fn graph_text(g: &LabeledGraph) -> String {
    String::from_utf8(write_graph(g)).expect("graph JSON is UTF-8")
}

fn verdict(result: Result<NonUnivVerdict, QueryError>) -> Result<String, Failure> {
    match result {
        Ok(v) => Ok(v.to_json()),
        Err(e @ QueryError::WitnessRejected(_)) => Err(Failure::Disagreement(e.to_string())),
        Err(e) => Err(e.into()),
    }
}

fn parse_word(text: &str) -> Result<Vec<Letter>, Failure> {
    text.split(',')
        .map(|letter| {
            let (colors, action) = letter
                .trim()
                .split_once(':')
                .ok_or_else(|| input(format!("letter {letter:?} is not colors:action")))?;
            let colors = colors.split('+').filter(|c| !c.is_empty());
            Ok(Letter::new(colors, action))
        })
        .collect()
}

fn xcheck_report(cfg: &RunConfig, criterion: Option<usize>) -> Result<SuiteReport, Failure> {
    Ok(match criterion {
        Some(id) => SuiteReport {
            config: cfg.clone(),
            criteria: vec![run_criterion(id, cfg)?],
        },
        None => run_all(cfg)?,
    })
}

fn run(command: Command) -> Result<String, Failure> {
    Ok(match command {
        Command::Mc {
            graph,
            formula,
            arity,
            tuples,
        } => {
            let g = load_graph(&graph)?;
            let f = formula.parse(g.signature(), arity)?;
            let ev = Evaluator::new(&g, arity);
            if tuples {
                ev.evaluate(&f, &Default::default())?.0.format_tuples(&g)
            } else {
                format!("{}\n", ev.models(&f)?)
            }
        }
        Command::Bisim { graph, graph2 } => {
            let (g, h) = (load_graph(&graph)?, load_graph(&graph2)?);
            format!("{}\n", bisimilar(&g, &h)?)
        }
        Command::Quotient { graph } => graph_text(&quotient(&load_graph(&graph)?)),
        Command::Dbisim { graph } => {
            let g = load_graph(&graph)?;
            let fam = largest_d_bisimulation(&g)?;
            let d = fam.dimension();
            let mut relations = Vec::new();
            for i in 0..d {
                for j in 0..d {
                    let pairs: Vec<[&str; 2]> = fam
                        .get(i, j)
                        .pairs()
                        .map(|(v, w)| [g.node_id(v), g.node_id(w)])
                        .collect();
                    relations.push(json!({ "i": i, "j": j, "pairs": pairs }));
                }
            }
            format!("{}\n", json!({ "d": d, "relations": relations }))
        }
        Command::DetectPower {
            graph,
            d,
            method,
            verbose,
        } => {
            let g = load_graph(&graph)?;
            let method = match method {
                Method::Dbisim => PowerMethod::DBisim,
                Method::Logic => PowerMethod::Logic,
                Method::Both => PowerMethod::Both,
            };
            match power_conditions(&g, d, method) {
                Ok(c) if verbose => format!("{}\n{c}\n", c.is_power()),
                Ok(c) => format!("{}\n", c.is_power()),
                Err(e @ BisimError::MethodDisagreement { .. }) => {
                    return Err(Failure::Disagreement(e.to_string()))
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Factor { graph, component } => {
            graph_text(&factor(&load_graph(&graph)?, component)?)
        }
        Command::Power { graph, d } => graph_text(&power(&load_graph(&graph)?, d)?),
        Command::Product { graph, graph2 } => {
            let graphs = graph
                .iter()
                .chain(graph2.as_ref())
                .map(|p| load_graph(p))
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&LabeledGraph> = graphs.iter().collect();
            graph_text(&product(&refs)?)
        }
        Command::Unfold { graph, depth } => {
            graph_text(unfold(&load_graph(&graph)?, depth).graph())
        }
        Command::Mono {
            sig,
            formula,
            arity,
        } => {
            let base = sig.base()?;
            let f = formula.parse(&base, arity)?;
            let m = monofy(&f, arity)?;
            let lifted = base.lift(arity.saturating_sub(1).max(1))?;
            format!("{}\n", print(&m, &lifted, 1))
        }
        Command::Poly { sig, formula, d } => {
            let base = sig.base()?;
            let f = formula.parse(&base.lift(d)?, 1)?;
            let p = polyfy(&f, d)?;
            format!("{}\n", print(&p, &base, d + 1))
        }
        Command::Nonuniv1 { graph, budget } => {
            verdict(one_letter_with_budget(&load_graph(&graph)?, budget))? + "\n"
        }
        Command::Nonuniv1Lifted { graph, d, budget } => {
            verdict(one_lifted_with_budget(&load_graph(&graph)?, d, budget))? + "\n"
        }
        Command::Nonuniv2 { graph, budget } => {
            verdict(two_letter_with_budget(&load_graph(&graph)?, budget))? + "\n"
        }
        Command::Nonuniv2Lifted { graph, d, budget } => {
            verdict(two_lifted_with_budget(&load_graph(&graph)?, d, budget))? + "\n"
        }
        Command::Pump {
            graph,
            path,
            i,
            j,
            k,
        } => {
            let tree = load_tree(&graph)?;
            let path = path_indices(&tree, &path.path)?;
            graph_text(pump(&tree, &path, i, j, k)?.graph())
        }
        Command::PumpFind {
            graph,
            formula,
            path,
        } => {
            let tree = load_tree(&graph)?;
            let sig = tree.graph().signature().clone();
            let apt = formula_to_apt(&formula.parse(&sig, 1)?, &sig)?;
            let path = path_indices(&tree, &path.path)?;
            let (i, j) = find_pumping_pair(&apt, &tree, &path)?;
            format!("{}\n", json!({ "i": i, "j": j, "states": apt.num_states() }))
        }
        Command::Apt {
            sig,
            formula,
            check,
        } => {
            let base = sig.base()?;
            let apt = formula_to_apt(&formula.parse(&base, 1)?, &base)?;
            let mut out = apt.to_string();
            if check {
                let g = load_graph(sig.graph.as_deref().expect("required by clap"))?;
                out += &format!("accepted: {}\n", accepts(&apt, &g)?);
            }
            out
        }
        Command::Gen { fixture } => match fixture {
            Fixture::Ex1 => graph_text(&example_graph()),
            Fixture::PowerEx1 => graph_text(&power(&example_graph(), 2)?),
            Fixture::Rword {
                word,
                branching,
                depth,
            } => {
                let word = parse_word(&word)?;
                let sig = Signature::new(["a", "b"], ["f"])?;
                let depth = depth.unwrap_or(word.len().saturating_sub(1));
                graph_text(gen_rword_tree(&sig, &word, branching, depth)?.graph())
            }
        },
        Command::Xcheck {
            seed,
            iters,
            criterion,
            max_nodes,
            max_formula_size,
            max_d,
            budget,
            json,
        } => {
            let cfg = RunConfig {
                seed,
                iterations: iters,
                max_nodes,
                max_formula_size,
                max_d,
                step_budget: budget,
            };
            let report = xcheck_report(&cfg, criterion)?;
            for c in report.criteria.iter().filter(|c| !c.passed()) {
                eprintln!("criterion {} failed", c.id);
            }
            let text = if json {
                serde_json::to_string_pretty(&report)? + "\n"
            } else {
                format!("{report}\n")
            };
            if report.failures() > 0 {
                print!("{text}");
                return Err(Failure::Disagreement(format!(
                    "{} cross-check criteria failed",
                    report.failures()
                )));
            }
            text
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli.command).and_then(|text| {
        match &cli.output {
            Some(path) => fs::write(path, &text).map_err(|e| input(format!("{}: {e}", path.display())))?,
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| input(e.to_string()))?,
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Disagreement(msg)) => {
            eprintln!("disagreement: {msg}");
            ExitCode::from(3)
        }
    }
}
